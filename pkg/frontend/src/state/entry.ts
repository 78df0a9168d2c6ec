/** Entry-page view model: tab selection plus pass-through accessors.
 *
 * Everything displayed is an API field; the model only organises them
 * into the three tabs (overview / files / related).
 */

import type { EntryDetail } from "../types.js";

export type EntryTab = "overview" | "files" | "related";

export class EntryView {
  tab: EntryTab = "overview";

  constructor(public entry: EntryDetail) {}

  selectTab(tab: EntryTab): void {
    this.tab = tab;
  }

  headVersion() {
    const versions = this.entry.versions;
    return versions.length ? versions[versions.length - 1]! : null;
  }

  /** Citation block: the API already chose DOI > custom > canonical URL. */
  citationText(): string {
    return this.entry.citation.text;
  }

  sourceLink(): string | null {
    const head = this.headVersion();
    return head?.source.kind === "git" ? (head.source.remote ?? null) : null;
  }

  versionHistory(): { version: number; comment: string; commit: string | null; frozen: boolean }[] {
    return this.entry.versions
      .slice()
      .reverse()
      .map((v) => ({
        version: v.version,
        comment: v.revision_comment,
        commit: v.source.kind === "git" ? (v.source.commit_id ?? null) : null,
        frozen: v.frozen,
      }));
  }

  canEdit(editableIds: string[]): boolean {
    return this.entry.team_ids.some((team) => editableIds.includes(team));
  }
}
