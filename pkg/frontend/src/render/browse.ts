/** Browse page: search box, facet sidebar with live counts, sort
 * selector, pagination, result rows, and the embargoed-stub strip. */

import type { ApiClient } from "../api.js";
import { BrowseState, FACETS, SORT_KEYS, type FacetName } from "../state/browse.js";
import { button, clear, el } from "./dom.js";

const FACET_LABELS: Record<FacetName, string> = {
  class: "Workflow type",
  tag: "Tags",
  creator: "Creators",
  team: "Teams",
  space: "Spaces",
  organisation: "Organisations",
  maturity: "Maturity",
  edam_topic: "Topics",
  edam_operation: "Operations",
  tool: "Tools",
};

export class BrowsePage {
  readonly state = new BrowseState();

  constructor(
    private readonly client: ApiClient,
    private readonly root: HTMLElement,
    private readonly openEntry: (id: string) => void,
  ) {}

  async refresh(): Promise<void> {
    this.state.apply(await this.client.search(this.state.toParams()));
    this.render();
  }

  render(): void {
    clear(this.root);
    const searchBox = el("input", {
      type: "search",
      placeholder: "Search workflows…",
      value: this.state.text,
      class: "search-box",
    });
    searchBox.addEventListener("change", () => {
      this.state.setText(searchBox.value);
      void this.refresh();
    });

    const sortSelect = el("select", { class: "sort-select" });
    for (const key of SORT_KEYS) {
      for (const dir of ["desc", "asc"] as const) {
        const option = el("option", { value: `${key}:${dir}` }, `${key} (${dir})`);
        if (key === this.state.sortKey && dir === this.state.sortDir) {
          option.setAttribute("selected", "selected");
        }
        sortSelect.append(option);
      }
    }
    sortSelect.addEventListener("change", () => {
      const [key, dir] = sortSelect.value.split(":") as [
        (typeof SORT_KEYS)[number],
        "asc" | "desc",
      ];
      this.state.setSort(key, dir);
      void this.refresh();
    });

    const sidebar = el("aside", { class: "facets" });
    for (const facet of FACETS) {
      const counts = this.state.facetCounts(facet);
      if (!counts.length) continue;
      const section = el("section", {}, el("h3", {}, FACET_LABELS[facet]));
      for (const [value, count] of counts) {
        const row = button(
          `${value} (${count})`,
          () => {
            this.state.toggleFacet(facet, value);
            void this.refresh();
          },
          this.state.isSelected(facet, value) ? "facet selected" : "facet",
        );
        section.append(row);
      }
      sidebar.append(section);
    }

    const results = el("section", { class: "results" });
    for (const hit of this.state.rows()) {
      const row = el(
        "article",
        { class: "hit" },
        el("span", { class: "badge" }, hit.workflow_class),
        el("h2", {}, hit.title),
        el(
          "p",
          { class: "meta" },
          `${hit.maturity} · ${hit.metrics.views} views · ${hit.metrics.downloads} downloads`,
        ),
      );
      row.addEventListener("click", () => this.openEntry(hit.id));
      results.append(row);
    }
    const embargoed = this.state.lastResponse?.embargoed ?? [];
    if (embargoed.length) {
      const strip = el("section", { class: "embargoed" }, el("h3", {}, "Embargoed"));
      for (const stub of embargoed) {
        strip.append(
          el("p", {}, `${stub.title} (${stub.workflow_class}) — embargoed until ${stub.embargo_until ?? "?"}`),
        );
      }
      results.append(strip);
    }

    const pager = el("nav", { class: "pager" });
    pager.append(
      button("‹ prev", () => {
        this.state.setPage(this.state.page - 1);
        void this.refresh();
      }),
      el("span", {}, ` page ${this.state.page} / ${this.state.totalPages()} `),
      button("next ›", () => {
        this.state.setPage(this.state.page + 1);
        void this.refresh();
      }),
    );

    this.root.append(
      el("div", { class: "toolbar" }, searchBox, sortSelect),
      el("div", { class: "browse-layout" }, sidebar, el("div", {}, results, pager)),
    );
  }
}
