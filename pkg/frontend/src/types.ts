/** Wire types of the registry's native JSON API. */

export interface EntrySummary {
  id: string;
  title: string;
  workflow_class: string;
  maturity: string;
  team_ids: string[];
  tags: string[];
  license: string | null;
  visibility: string;
  latest_version: number | null;
  metrics: { views: number; downloads: number };
  created_at: string | null;
  updated_at: string | null;
}

export interface Creator {
  name: string;
  orcid: string | null;
  affiliation: string | null;
}

export interface ToolRef {
  raw_id: string;
  biotools_id: string | null;
  display_name: string;
}

export interface VersionView {
  version: number;
  main_workflow_path: string;
  diagram_path: string | null;
  abstract_cwl_path: string | null;
  source: { kind: string; remote?: string; commit_id?: string; ref?: string | null };
  frozen: boolean;
  created_at: string;
  revision_comment: string;
  doi: string | null;
  files: { path: string; size: number; media_type: string }[];
}

export interface StructureView {
  name: string | null;
  inputs: { id: string; data_type: string | null; edam_format: string | null }[];
  outputs: { id: string; data_type: string | null }[];
  steps: { id: string; label: string | null; tool: ToolRef | null; subworkflow: string | null }[];
}

export interface EntryDetail extends EntrySummary {
  description: string;
  creators: Creator[];
  other_contributors: string;
  submitter: string;
  edam_topics: string[];
  edam_operations: string[];
  tool_refs: ToolRef[];
  attributions: string[];
  custom_citation: string | null;
  test_status: string | null;
  policy: PolicyView;
  doi_records: Record<string, string>;
  versions: VersionView[];
  launch: { id: string; url: string }[];
  collections: { id: string; title: string }[];
  structure: StructureView | null;
  citation: { kind: string; text: string };
}

export interface PolicyView {
  visibility: string;
  embargo_until: string | null;
  grants: { subject_kind: string; subject_id: string; right: string }[];
}

export interface EmbargoStubView {
  id: string;
  title: string;
  workflow_class: string;
  team_ids: string[];
  embargo_until: string | null;
  embargoed: true;
}

export interface SearchResponse {
  hits: EntrySummary[];
  total: number;
  page: number;
  page_size: number;
  facets: Record<string, Record<string, number>>;
  embargoed: EmbargoStubView[];
}

export interface ValidationFinding {
  code: string;
  message: string;
  field: string | null;
}

export interface PreviewResponse {
  prefill: Record<string, unknown> & {
    title?: string;
    description?: string;
    tool_refs?: ToolRef[];
    team_ids?: string[];
  };
  detected_class: string;
  main_path: string;
  errors: ValidationFinding[];
  warnings: ValidationFinding[];
  structure: StructureView | null;
}

export interface SourceBody {
  kind: "upload" | "git" | "crate";
  files?: Record<string, string>;
  main_path?: string;
  remote?: string;
  ref?: string | null;
  archive_b64?: string;
}

export interface TeamView {
  id: string;
  name: string;
  space_id: string;
  description: string;
  members: { user_id: string; role: string }[];
  default_license: string | null;
  default_policy: PolicyView;
}

export interface SpaceView {
  id: string;
  name: string;
  description: string;
  admin_user_ids: string[];
  is_default: boolean;
}

export interface ApiError {
  code: string;
  message: string;
  errors?: ValidationFinding[];
  warnings?: ValidationFinding[];
}
