/** Browse-page state: text query, facet selections, sort, pagination.
 *
 * The state only *builds request parameters* and *holds the last
 * response*; result rows and facet counts are displayed exactly as the
 * API returned them.
 */

import type { SearchResponse } from "../types.js";

export const FACETS = [
  "class",
  "tag",
  "creator",
  "team",
  "space",
  "organisation",
  "maturity",
  "edam_topic",
  "edam_operation",
  "tool",
] as const;

export type FacetName = (typeof FACETS)[number];

export const SORT_KEYS = ["title", "created", "updated", "views", "downloads"] as const;

export class BrowseState {
  text = "";
  filters = new Map<FacetName, Set<string>>();
  sortKey: (typeof SORT_KEYS)[number] = "updated";
  sortDir: "asc" | "desc" = "desc";
  page = 1;
  pageSize = 20;
  lastResponse: SearchResponse | null = null;

  /** Query parameters for GET /search, exactly as the API expects them. */
  toParams(): URLSearchParams {
    const params = new URLSearchParams();
    if (this.text.trim()) params.set("q", this.text.trim());
    for (const facet of FACETS) {
      for (const value of [...(this.filters.get(facet) ?? [])].sort()) {
        params.append(facet, value);
      }
    }
    params.set("sort", `${this.sortKey}:${this.sortDir}`);
    params.set("page", String(this.page));
    params.set("page_size", String(this.pageSize));
    return params;
  }

  setText(text: string): void {
    this.text = text;
    this.page = 1;
  }

  toggleFacet(facet: FacetName, value: string): void {
    const selected = this.filters.get(facet) ?? new Set<string>();
    if (selected.has(value)) {
      selected.delete(value);
    } else {
      selected.add(value);
    }
    if (selected.size) {
      this.filters.set(facet, selected);
    } else {
      this.filters.delete(facet);
    }
    this.page = 1;
  }

  isSelected(facet: FacetName, value: string): boolean {
    return this.filters.get(facet)?.has(value) ?? false;
  }

  setSort(key: (typeof SORT_KEYS)[number], dir: "asc" | "desc"): void {
    this.sortKey = key;
    this.sortDir = dir;
    this.page = 1;
  }

  setPage(page: number): void {
    this.page = Math.max(1, page);
  }

  apply(response: SearchResponse): void {
    this.lastResponse = response;
  }

  /** Rows the UI renders: the API's hit list, order untouched. */
  rows(): SearchResponse["hits"] {
    return this.lastResponse?.hits ?? [];
  }

  facetCounts(facet: FacetName): [string, number][] {
    const counts = this.lastResponse?.facets[facet] ?? {};
    return Object.entries(counts);
  }

  totalPages(): number {
    if (!this.lastResponse) return 1;
    return Math.max(1, Math.ceil(this.lastResponse.total / this.lastResponse.page_size));
  }
}
