/** Four-step registration wizard; each screen is driven by the
 * WizardMachine so the DOM layer holds no logic of its own. */

import type { ApiClient } from "../api.js";
import { WizardMachine } from "../state/wizard.js";
import { button, clear, el } from "./dom.js";

export class WizardPage {
  machine: WizardMachine;

  constructor(
    private readonly client: ApiClient,
    private readonly root: HTMLElement,
    private readonly done: (entryId: string) => void,
  ) {
    this.machine = new WizardMachine(client);
  }

  render(): void {
    clear(this.root);
    this.root.append(el("h1", {}, "Register a workflow"));
    this.root.append(
      el(
        "p",
        { class: "steps" },
        ["source", "review_metadata", "ownership_policy", "confirm"]
          .map((step) => (step === this.machine.step ? `[${step}]` : step))
          .join(" → "),
      ),
    );
    const body = el("section", { class: "wizard-body" });
    if (this.machine.step === "source") this.renderSource(body);
    if (this.machine.step === "review_metadata") this.renderReview(body);
    if (this.machine.step === "ownership_policy") this.renderOwnership(body);
    if (this.machine.step === "confirm") this.renderConfirm(body);
    this.root.append(body);

    const nav = el("nav", { class: "wizard-nav" });
    if (this.machine.step !== "source") {
      nav.append(
        button("‹ Back", () => {
          this.machine.back();
          this.render();
        }),
      );
    }
    if (this.machine.step !== "confirm" && this.machine.step !== "source") {
      const next = button("Next ›", () => {
        void this.machine.advance().then(
          () => this.render(),
          (err) => this.showError(String(err)),
        );
      });
      if (!this.machine.canAdvance()) next.setAttribute("disabled", "disabled");
      nav.append(next);
    }
    this.root.append(nav, el("p", { class: "error", id: "wizard-error" }));
  }

  private showError(message: string): void {
    const node = this.root.querySelector("#wizard-error");
    if (node) node.textContent = message;
  }

  private renderSource(body: HTMLElement): void {
    const gitInput = el("input", { type: "url", placeholder: "https://…/repo.git" });
    body.append(
      el("h2", {}, "Where is the workflow?"),
      el("label", {}, "Git repository URL: ", gitInput),
      button("Fetch & parse", () => {
        void this.machine
          .selectSource({ kind: "git", remote: gitInput.value })
          .then(() => this.render(), (err) => this.showError(String(err)));
      }),
      el("p", {}, "— or —"),
      this.uploadControl(),
    );
  }

  private uploadControl(): HTMLElement {
    const fileInput = el("input", { type: "file" });
    fileInput.addEventListener("change", () => {
      const file = fileInput.files?.[0];
      if (!file) return;
      void file.arrayBuffer().then((buffer) => {
        const bytes = new Uint8Array(buffer);
        let binary = "";
        for (const byte of bytes) binary += String.fromCharCode(byte);
        const source = {
          kind: "upload" as const,
          files: { [file.name]: btoa(binary) },
          main_path: file.name,
        };
        void this.machine
          .selectSource(source)
          .then(() => this.render(), (err) => this.showError(String(err)));
      });
    });
    return el("label", {}, "Upload a workflow file: ", fileInput);
  }

  private renderReview(body: HTMLElement): void {
    const summary = this.machine.reviewSummary();
    body.append(
      el("h2", {}, "Review what the parser found"),
      el("p", {}, `Detected class: ${summary.detectedClass} (main: ${summary.mainPath})`),
    );
    const title = el("input", {
      type: "text",
      value: String(this.machine.metadata()["title"] ?? ""),
    });
    title.addEventListener("change", () => this.machine.edit({ title: title.value }));
    body.append(el("label", {}, "Title: ", title));

    const description = el("textarea", { rows: "8" });
    description.value = summary.description;
    description.addEventListener("change", () =>
      this.machine.edit({ description: description.value }),
    );
    body.append(el("label", {}, "Description (from README when imported): ", description));

    const tools = el("section", {}, el("h3", {}, "Tools found in the workflow"));
    for (const tool of summary.tools) {
      tools.append(
        el("p", {}, tool.biotools_id ? `${tool.display_name} → bio.tools/${tool.biotools_id}` : tool.display_name),
      );
    }
    body.append(tools);

    for (const finding of summary.errors) {
      body.append(el("p", { class: "finding error" }, `${finding.code}: ${finding.message}`));
    }
    for (const finding of summary.warnings) {
      body.append(el("p", { class: "finding warning" }, `${finding.code}: ${finding.message}`));
    }
  }

  private renderOwnership(body: HTMLElement): void {
    body.append(el("h2", {}, "Ownership and sharing"));
    const teams = el("input", {
      type: "text",
      placeholder: "team ids, comma separated",
      value: ((this.machine.metadata()["team_ids"] as string[]) ?? []).join(","),
    });
    teams.addEventListener("change", () =>
      this.machine.edit({ team_ids: teams.value.split(",").map((t) => t.trim()).filter(Boolean) }),
    );
    body.append(el("label", {}, "Owning teams: ", teams));

    const visibility = el("select", {});
    for (const level of ["private", "registered", "embargoed", "public"]) {
      visibility.append(el("option", { value: level }, level));
    }
    visibility.addEventListener("change", () =>
      this.machine.edit({ policy: { visibility: visibility.value, grants: [] } }),
    );
    body.append(el("label", {}, "Visibility: ", visibility));
  }

  private renderConfirm(body: HTMLElement): void {
    const metadata = this.machine.metadata();
    body.append(
      el("h2", {}, "Confirm"),
      el("pre", {}, JSON.stringify(metadata, null, 2)),
      button("Register workflow", () => {
        void this.machine.submit().then(
          (entry) => this.done(entry.id),
          (err) => this.showError(String(err)),
        );
      }),
    );
  }
}
