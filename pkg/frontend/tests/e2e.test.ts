/** End-to-end: the wizard against a live registry server.
 *
 * Spawns `python3 -m flowhub serve` on a scratch store, registers a
 * fixture Git repository through the wizard machine, checks that the
 * README-derived description and the parsed tool list are visible
 * before submission, and compares the created entry field-for-field
 * with a control entry registered through the CLI on a second store.
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync, mkdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { BrowseState } from "../src/state/browse.js";
import { WizardMachine } from "../src/state/wizard.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;
let scratch: string;
let storeA: string;
let storeB: string;
let repo: string;
let apiKey: string;
let token: string;
let client: ApiClient;

const GALAXY_DOC = JSON.stringify({
  a_galaxy_workflow: "true",
  "format-version": "0.1",
  name: "E2E transcripts",
  steps: {
    "0": { type: "data_input", label: "reads", tool_id: null },
    "1": {
      type: "tool",
      name: "fastp",
      tool_id: "toolshed.g2.bx.psu.edu/repos/iuc/fastp/fastp/0.23.2",
      workflow_outputs: [{ output_name: "out", label: "trimmed" }],
    },
    "2": {
      type: "tool",
      name: "StringTie",
      tool_id: "toolshed.g2.bx.psu.edu/repos/iuc/stringtie/stringtie/2.2.1",
      workflow_outputs: [],
    },
  },
});

const README = "# E2E pipeline\n\nReadme text that must appear in the wizard.\n";

function py(args: string[], env: Record<string, string>): string {
  return execFileSync("python3", ["-m", "flowhub", ...args], {
    env: { ...process.env, ...env },
    encoding: "utf-8",
  });
}

function git(args: string[], cwd: string): void {
  execFileSync("git", args, {
    cwd,
    env: {
      ...process.env,
      GIT_AUTHOR_NAME: "E2E",
      GIT_AUTHOR_EMAIL: "e2e@example.org",
      GIT_COMMITTER_NAME: "E2E",
      GIT_COMMITTER_EMAIL: "e2e@example.org",
    },
  });
}

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${BASE}/ga4gh/trs/v2/service-info`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("server did not come up");
}

beforeAll(async () => {
  scratch = mkdtempSync(join(tmpdir(), "flowhub-e2e-"));
  storeA = join(scratch, "store-a");
  storeB = join(scratch, "store-b");

  // fixture git repository with README, CITATION.cff and a Galaxy workflow
  repo = join(scratch, "repo");
  mkdirSync(repo);
  writeFileSync(join(repo, "workflow.ga"), GALAXY_DOC);
  writeFileSync(join(repo, "README.md"), README);
  writeFileSync(
    join(repo, "CITATION.cff"),
    "cff-version: 1.2.0\ntitle: E2E cited title\nauthors:\n" +
      "  - family-names: Silver\n    given-names: Ada\n" +
      "    orcid: https://orcid.org/0000-0002-1825-0097\n",
  );
  git(["init", "-q", "-b", "main"], repo);
  git(["add", "-A"], repo);
  git(["commit", "-q", "-m", "fixture"], repo);

  // seed store A (user + team) before the server boots, then serve it
  const userOut = py(["admin", "create-user", "Wizard User"], { FLOWHUB_STORE: storeA });
  apiKey = /api_key: (\w+)/.exec(userOut)![1]!;
  py(["admin", "create-team", "Wizard Team", "--actor", "u000001"], { FLOWHUB_STORE: storeA });

  server = spawn("python3", ["-m", "flowhub", "serve", "--port", String(PORT)], {
    env: { ...process.env, FLOWHUB_STORE: storeA },
    stdio: "ignore",
  });
  await waitForServer();

  client = new ApiClient(BASE);
  const issued = await client.issueToken("u000001", apiKey);
  token = issued.token;
  client.setToken(token);
});

afterAll(() => {
  server?.kill();
});

describe("wizard end to end", () => {
  it("shows README description and parsed tools before submission, and the created entry matches the CLI control", async () => {
    const machine = new WizardMachine(client);
    await machine.selectSource({ kind: "git", remote: repo });

    // pre-submission review: README-derived description and parsed tools
    const summary = machine.reviewSummary();
    expect(summary.description).toContain("Readme text that must appear in the wizard");
    expect(summary.detectedClass).toBe("galaxy");
    expect(summary.tools.map((t) => t.display_name)).toEqual(["fastp", "stringtie"]);
    expect(summary.tools.map((t) => t.biotools_id)).toEqual(["fastp", "stringtie"]);
    expect(machine.metadata()["title"]).toBe("E2E cited title"); // CITATION.cff prefill

    // nothing registered yet
    const emptySearch = await client.search(new URLSearchParams({ q: "E2E" }));
    expect(emptySearch.total).toBe(0);

    machine.edit({ team_ids: ["t000001"] });
    await machine.advance(); // review -> ownership
    await machine.advance(); // ownership -> confirm
    expect(machine.step).toBe("confirm");
    const created = await machine.submit();
    expect(created.id).toBe("w000001");

    // control entry: the CLI registration of the same repo on a fresh store
    py(["admin", "create-user", "Wizard User"], { FLOWHUB_STORE: storeB });
    py(["admin", "create-team", "Wizard Team", "--actor", "u000001"], { FLOWHUB_STORE: storeB });
    py(["register", repo, "--team", "t000001", "--actor", "u000001"], { FLOWHUB_STORE: storeB });
    const controlJson = execFileSync(
      "python3",
      [
        "-c",
        [
          "import json",
          "from flowhub.registry import Registry, Store",
          "from flowhub.api.views import entry_detail",
          `registry = Registry(Store(${JSON.stringify(storeB)}))`,
          "print(json.dumps(entry_detail(registry, registry.get_entry('w000001'))))",
        ].join("\n"),
      ],
      { encoding: "utf-8" },
    );
    const control = JSON.parse(controlJson);
    const wizardEntry = await client.getEntry(created.id);

    // field-for-field comparison of everything that is not a timestamp
    const FIELDS = [
      "id", "title", "description", "workflow_class", "maturity", "license",
      "tags", "edam_topics", "edam_operations", "creators", "tool_refs",
      "attributions", "custom_citation", "team_ids", "policy", "submitter",
    ] as const;
    for (const field of FIELDS) {
      expect((wizardEntry as never)[field], field).toEqual(control[field]);
    }
    expect(wizardEntry.versions[0]!.main_workflow_path).toBe(
      control.versions[0].main_workflow_path,
    );
    expect(wizardEntry.versions[0]!.files.map((f) => f.path)).toEqual(
      control.versions[0].files.map((f: { path: string }) => f.path),
    );
    expect(wizardEntry.versions[0]!.source.commit_id).toBe(control.versions[0].source.commit_id);
  });

  it("wizard submissions the API rejects never appear in browse", async () => {
    const machine = new WizardMachine(client);
    await machine.selectSource({ kind: "git", remote: repo });
    machine.edit({ title: "", team_ids: ["t000001"] }); // empty title: rejected
    await machine.revalidate();
    expect(machine.canAdvance()).toBe(false);
    // force a direct submission attempt around the guard
    machine.step = "confirm";
    await expect(machine.submit()).rejects.toThrow(/validation_failed/);
    const browse = new BrowseState();
    browse.setText("E2E");
    browse.apply(await client.search(browse.toParams()));
    const titles = browse.rows().map((h) => h.title);
    expect(titles).not.toContain("");
    expect(browse.rows().every((h) => h.title !== "")).toBe(true);
  });

  it("facet clicks and sort changes match direct GET /search exactly (live)", async () => {
    const state = new BrowseState();
    state.toggleFacet("class", "Galaxy");
    state.setSort("views", "desc");
    const viaState = await client.search(state.toParams());
    const direct = await fetch(`${BASE}/search?${state.toParams().toString()}`, {
      headers: { Authorization: `Bearer ${token}` }, // same actor as the UI client
    });
    const directBody = await direct.json();
    expect(viaState).toEqual(directBody);
    state.apply(viaState);
    expect(state.rows().map((h) => h.id)).toEqual(
      directBody.hits.map((h: { id: string }) => h.id),
    );
  });
});
