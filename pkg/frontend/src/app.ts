/** Application shell: hash routing and token handling.
 *
 * Configuration is a single value: the API base URL (read from
 * <meta name="flowhub-api"> or defaulting to the page origin).
 */

import { ApiClient, ApiRequestError } from "./api.js";
import { AdminPage } from "./render/admin.js";
import { BrowsePage } from "./render/browse.js";
import { button, clear, el } from "./render/dom.js";
import { EntryPage } from "./render/entry.js";
import { WizardPage } from "./render/wizard.js";

function apiBase(): string {
  const meta = document.querySelector('meta[name="flowhub-api"]');
  return meta?.getAttribute("content") || window.location.origin;
}

export function start(): void {
  const client = new ApiClient(apiBase());
  const stored = window.sessionStorage.getItem("flowhub-token");
  if (stored) client.setToken(stored);

  const outlet = document.getElementById("app")!;
  const browse = new BrowsePage(client, outlet, (id) => {
    window.location.hash = `#/workflows/${id}`;
  });
  const entry = new EntryPage(client, outlet);
  const admin = new AdminPage(client, outlet);

  const route = async () => {
    const hash = window.location.hash || "#/browse";
    try {
      if (hash.startsWith("#/workflows/")) {
        await entry.open(decodeURIComponent(hash.slice("#/workflows/".length)));
      } else if (hash === "#/register") {
        new WizardPage(client, outlet, (id) => {
          window.location.hash = `#/workflows/${id}`;
        }).render();
      } else if (hash === "#/admin") {
        await admin.render();
      } else if (hash === "#/login") {
        renderLogin(client, outlet);
      } else {
        await browse.refresh();
      }
    } catch (err) {
      if (err instanceof ApiRequestError && err.status === 401) {
        window.location.hash = "#/login";
        return;
      }
      clear(outlet).append(
        el("p", { class: "error" },
           err instanceof ApiRequestError ? `${err.body.code}: ${err.body.message}` : String(err)),
      );
    }
  };

  window.addEventListener("hashchange", () => void route());
  void route();
}

function renderLogin(client: ApiClient, outlet: HTMLElement): void {
  clear(outlet);
  const userId = el("input", { type: "text", placeholder: "user id" });
  const apiKey = el("input", { type: "password", placeholder: "api key" });
  outlet.append(
    el("h1", {}, "Sign in"),
    el("label", {}, "User id: ", userId),
    el("label", {}, "API key: ", apiKey),
    button("Get token", () => {
      void client.issueToken(userId.value, apiKey.value).then(
        ({ token }) => {
          client.setToken(token);
          window.sessionStorage.setItem("flowhub-token", token);
          window.location.hash = "#/browse";
        },
        (err) => {
          outlet.append(el("p", { class: "error" }, String(err)));
        },
      );
    }),
  );
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}
