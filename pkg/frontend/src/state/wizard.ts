/** Registration wizard state machine.
 *
 * Four steps: source -> review_metadata -> ownership_policy -> confirm.
 * After source selection the draft round-trips through the server
 * (POST /workflows/preview) so the human reviews what the parser found
 * before anything is committed.  Advancing past review is impossible
 * while the server reports validation errors; going back never loses
 * edits.
 */

import type { ApiClient } from "../api.js";
import type { EntryDetail, PreviewResponse, SourceBody, ValidationFinding } from "../types.js";

export type WizardStep = "source" | "review_metadata" | "ownership_policy" | "confirm";

const STEP_ORDER: WizardStep[] = ["source", "review_metadata", "ownership_policy", "confirm"];

export interface WizardEdits {
  title?: string;
  description?: string;
  license?: string | null;
  tags?: string[];
  maturity?: string;
  team_ids?: string[];
  policy?: { visibility: string; embargo_until?: string | null; grants: unknown[] };
  creators?: { name: string; orcid: string | null; affiliation: string | null }[];
}

export class WizardMachine {
  step: WizardStep = "source";
  source: SourceBody | null = null;
  preview: PreviewResponse | null = null;
  edits: WizardEdits = {};
  submitting = false;
  result: EntryDetail | null = null;

  constructor(private readonly client: ApiClient) {}

  /** Server round-trip: parse the source and prefill the draft. */
  async selectSource(source: SourceBody): Promise<PreviewResponse> {
    this.source = source;
    this.preview = await this.client.preview(source, this.metadata());
    this.step = "review_metadata";
    return this.preview;
  }

  /** The draft the server saw last: prefill overlaid with user edits. */
  metadata(): Record<string, unknown> {
    const merged: Record<string, unknown> = {};
    const prefill = this.preview?.prefill ?? {};
    for (const key of ["title", "description", "license", "tags", "maturity",
                       "creators", "edam_topics", "edam_operations", "custom_citation",
                       "tool_refs", "team_ids"] as const) {
      const value = (prefill as Record<string, unknown>)[key];
      if (value !== undefined && value !== null && value !== "") merged[key] = value;
    }
    for (const [key, value] of Object.entries(this.edits)) {
      if (value !== undefined) merged[key] = value;
    }
    return merged;
  }

  /** Fields the parser derived, shown for review before submission. */
  reviewSummary(): {
    detectedClass: string;
    mainPath: string;
    description: string;
    tools: { display_name: string; biotools_id: string | null }[];
    errors: ValidationFinding[];
    warnings: ValidationFinding[];
  } {
    if (!this.preview) throw new Error("no source selected yet");
    const metadata = this.metadata();
    return {
      detectedClass: this.preview.detected_class,
      mainPath: this.preview.main_path,
      description: String(metadata["description"] ?? ""),
      tools: (this.preview.prefill.tool_refs ?? []).map((t) => ({
        display_name: t.display_name,
        biotools_id: t.biotools_id,
      })),
      errors: this.preview.errors,
      warnings: this.preview.warnings,
    };
  }

  edit(edits: WizardEdits): void {
    Object.assign(this.edits, edits);
  }

  /** Re-validate the edited draft against the server. */
  async revalidate(): Promise<PreviewResponse> {
    if (!this.source) throw new Error("no source selected yet");
    this.preview = await this.client.preview(this.source, this.metadata());
    return this.preview;
  }

  /** Errors that block the current step.  Ownership (teams) is decided
   * on its own step, so a missing-teams error does not pin the user to
   * the review screen. */
  private blockingErrors(step: WizardStep = this.step): ValidationFinding[] {
    const errors = this.preview?.errors ?? [];
    if (step === "review_metadata") {
      return errors.filter((e) => e.code !== "missing_teams");
    }
    return errors;
  }

  canAdvance(): boolean {
    if (this.step === "source") return this.source !== null && this.preview !== null;
    if (this.step === "review_metadata") return this.blockingErrors().length === 0;
    if (this.step === "ownership_policy") {
      const teams = (this.metadata()["team_ids"] as string[] | undefined) ?? [];
      return teams.length > 0 && this.blockingErrors().length === 0;
    }
    return false; // confirm is the last step; leaving it means submitting
  }

  async advance(): Promise<WizardStep> {
    if (this.step === "review_metadata" || this.step === "ownership_policy") {
      await this.revalidate(); // the gate judges the *edited* draft
    }
    if (!this.canAdvance()) {
      throw new Error(`cannot advance past ${this.step}: validation errors remain`);
    }
    const index = STEP_ORDER.indexOf(this.step);
    this.step = STEP_ORDER[Math.min(index + 1, STEP_ORDER.length - 1)]!;
    return this.step;
  }

  /** Back navigation preserves edits by construction (edits live apart). */
  back(): WizardStep {
    const index = STEP_ORDER.indexOf(this.step);
    this.step = STEP_ORDER[Math.max(index - 1, 0)]!;
    return this.step;
  }

  async submit(): Promise<EntryDetail> {
    if (this.step !== "confirm") throw new Error("submit only from the confirm step");
    if (!this.source) throw new Error("no source selected");
    this.submitting = true;
    try {
      this.result = await this.client.register(this.source, this.metadata());
      return this.result;
    } finally {
      this.submitting = false;
    }
  }
}
