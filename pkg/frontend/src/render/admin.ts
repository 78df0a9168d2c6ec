/** Team and Space management for admins. */

import type { ApiClient } from "../api.js";
import { button, clear, el } from "./dom.js";

export class AdminPage {
  constructor(
    private readonly client: ApiClient,
    private readonly root: HTMLElement,
  ) {}

  async render(): Promise<void> {
    clear(this.root);
    this.root.append(el("h1", {}, "Teams & Spaces"));
    const [teams, spaces] = await Promise.all([this.client.listTeams(), this.client.listSpaces()]);

    const spaceList = el("section", {}, el("h2", {}, "Spaces"));
    for (const space of spaces.spaces) {
      spaceList.append(
        el("p", {}, `${space.name}${space.is_default ? " (default)" : ""} — ${space.id}`),
      );
    }
    const spaceName = el("input", { type: "text", placeholder: "new space name" });
    spaceList.append(
      el("label", {}, spaceName),
      button("Create space", () => {
        void this.client
          .createSpace({ name: spaceName.value })
          .then(() => this.render(), (err) => this.showError(String(err)));
      }),
    );

    const teamList = el("section", {}, el("h2", {}, "Teams"));
    for (const team of teams.teams) {
      teamList.append(el("p", {}, `${team.name} — ${team.id} (space ${team.space_id})`));
    }
    const teamName = el("input", { type: "text", placeholder: "new team name" });
    const teamSpace = el("select", {});
    for (const space of spaces.spaces) {
      teamSpace.append(el("option", { value: space.id }, space.name));
    }
    teamList.append(
      el("label", {}, teamName),
      el("label", {}, teamSpace),
      button("Create team", () => {
        void this.client
          .createTeam({ name: teamName.value, space_id: teamSpace.value })
          .then(() => this.render(), (err) => this.showError(String(err)));
      }),
    );

    this.root.append(spaceList, teamList, el("p", { class: "error", id: "admin-error" }));
  }

  private showError(message: string): void {
    const node = this.root.querySelector("#admin-error");
    if (node) node.textContent = message;
  }
}
