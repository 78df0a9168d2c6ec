/** Entry page: header with class badge and title, action panel, and the
 * overview / files / related tabs. */

import type { ApiClient } from "../api.js";
import { EntryView, type EntryTab } from "../state/entry.js";
import { button, clear, el } from "./dom.js";

export class EntryPage {
  private view: EntryView | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly root: HTMLElement,
  ) {}

  async open(entryId: string): Promise<void> {
    this.view = new EntryView(await this.client.getEntry(entryId));
    this.render();
  }

  render(): void {
    if (!this.view) return;
    const entry = this.view.entry;
    clear(this.root);

    const header = el(
      "header",
      { class: "entry-header" },
      el("span", { class: "badge" }, entry.workflow_class),
      el("h1", {}, entry.title),
      el("span", { class: "maturity" }, entry.maturity),
    );

    const actions = el("nav", { class: "actions" });
    const source = this.view.sourceLink();
    if (source) actions.append(el("a", { href: source }, "Source repository"));
    actions.append(
      el("a", { href: this.client.crateUrl(entry.id) }, "Download RO-Crate"),
      button("Subscribe", () => void this.client.subscribe(entry.id)),
    );
    for (const launch of entry.launch) {
      actions.append(el("a", { href: launch.url, class: "launch" }, `Run in ${launch.id}`));
    }

    const tabs = el("nav", { class: "tabs" });
    for (const tab of ["overview", "files", "related"] as EntryTab[]) {
      tabs.append(
        button(
          tab,
          () => {
            this.view!.selectTab(tab);
            this.render();
          },
          this.view.tab === tab ? "tab selected" : "tab",
        ),
      );
    }

    const body = el("section", { class: "tab-body" });
    if (this.view.tab === "overview") this.renderOverview(body);
    if (this.view.tab === "files") this.renderFiles(body);
    if (this.view.tab === "related") this.renderRelated(body);

    this.root.append(header, actions, tabs, body);
  }

  private renderOverview(body: HTMLElement): void {
    const entry = this.view!.entry;
    body.append(el("section", { class: "description" }, entry.description));

    const history = el("section", {}, el("h3", {}, "Versions"));
    for (const item of this.view!.versionHistory()) {
      history.append(
        el(
          "p",
          {},
          `v${item.version}${item.frozen ? " (frozen)" : ""}` +
            (item.commit ? ` @ ${item.commit.slice(0, 8)}` : "") +
            (item.comment ? ` — ${item.comment}` : ""),
        ),
      );
    }
    body.append(history);

    const people = el("section", {}, el("h3", {}, "Creators"));
    for (const creator of entry.creators) {
      people.append(
        el("p", {}, creator.orcid ? `${creator.name} (${creator.orcid})` : creator.name),
      );
    }
    people.append(el("p", { class: "submitter" }, `Submitted by ${entry.submitter}`));
    body.append(people);

    const tools = el("section", {}, el("h3", {}, "Tools"));
    for (const tool of entry.tool_refs) {
      tools.append(
        tool.biotools_id
          ? el("a", { href: `https://bio.tools/${tool.biotools_id}` }, tool.display_name)
          : el("span", {}, tool.display_name),
        el("span", {}, " "),
      );
    }
    body.append(tools);

    body.append(
      el("p", { class: "license" }, `License: ${entry.license ?? "unspecified"}`),
      el(
        "p",
        { class: "metrics" },
        `${entry.metrics.views} views · ${entry.metrics.downloads} downloads`,
      ),
    );

    const chips = el("section", { class: "chips" });
    for (const annotation of [...entry.edam_topics, ...entry.edam_operations, ...entry.tags]) {
      chips.append(el("span", { class: "chip" }, annotation));
    }
    body.append(chips);

    const head = this.view!.headVersion();
    if (head?.diagram_path) {
      body.append(
        el("img", {
          class: "diagram",
          src: `${this.client.crateUrl(entry.id)}#${head.diagram_path}`,
          alt: "workflow diagram",
        }),
      );
    }

    if (entry.structure) {
      const structure = el("section", {}, el("h3", {}, "Inputs / outputs / steps"));
      structure.append(
        el("p", {}, `${entry.structure.inputs.length} inputs, ${entry.structure.outputs.length} outputs`),
      );
      for (const step of entry.structure.steps) {
        structure.append(el("p", { class: "step" }, step.label ?? step.id));
      }
      body.append(structure);
    }

    body.append(el("section", { class: "citation" }, el("h3", {}, "Cite as"), el("p", {}, this.view!.citationText())));
  }

  private renderFiles(body: HTMLElement): void {
    const head = this.view!.headVersion();
    if (!head) return;
    for (const file of head.files) {
      body.append(el("p", { class: "file" }, `${file.path} (${file.size} bytes, ${file.media_type})`));
    }
  }

  private renderRelated(body: HTMLElement): void {
    const entry = this.view!.entry;
    const collections = el("section", {}, el("h3", {}, "Collections"));
    for (const coll of entry.collections) {
      collections.append(el("p", {}, coll.title));
    }
    const attributions = el("section", {}, el("h3", {}, "Based on"));
    for (const target of entry.attributions) {
      attributions.append(el("a", { href: `#/workflows/${target}` }, target));
    }
    body.append(collections, attributions, el("p", {}, `Teams: ${entry.team_ids.join(", ")}`));
  }
}
