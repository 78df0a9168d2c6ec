/** Thin fetch wrapper over the registry API.
 *
 * The UI performs no computation the API does not expose: everything
 * rendered comes straight out of these response bodies.
 */

import type {
  ApiError,
  EntryDetail,
  PreviewResponse,
  SearchResponse,
  SourceBody,
  SpaceView,
  TeamView,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiError,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

export class ApiClient {
  constructor(
    public readonly baseUrl: string,
    private token: string | null = null,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  get authenticated(): boolean {
    return this.token !== null;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let payload: ApiError;
      try {
        payload = (await response.json()) as ApiError;
      } catch {
        payload = { code: "http_error", message: response.statusText };
      }
      throw new ApiRequestError(response.status, payload);
    }
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  issueToken(userId: string, apiKey: string): Promise<{ token: string; expires_at: string }> {
    return this.request("POST", "/auth/token", { user_id: userId, api_key: apiKey });
  }

  search(params: URLSearchParams): Promise<SearchResponse> {
    const query = params.toString();
    return this.request("GET", `/search${query ? "?" + query : ""}`);
  }

  getEntry(id: string): Promise<EntryDetail> {
    return this.request("GET", `/workflows/${encodeURIComponent(id)}`);
  }

  preview(source: SourceBody, metadata: Record<string, unknown>): Promise<PreviewResponse> {
    return this.request("POST", "/workflows/preview", { source, metadata });
  }

  register(source: SourceBody, metadata: Record<string, unknown>): Promise<EntryDetail> {
    return this.request("POST", "/workflows", { source, metadata });
  }

  patchEntry(id: string, patch: Record<string, unknown>): Promise<EntryDetail> {
    return this.request("PATCH", `/workflows/${encodeURIComponent(id)}`, patch);
  }

  mintDoi(id: string, version: number): Promise<{ doi: string }> {
    return this.request("POST", `/workflows/${encodeURIComponent(id)}/versions/${version}/doi`);
  }

  subscribe(id: string): Promise<{ subscribed: boolean }> {
    return this.request("POST", `/workflows/${encodeURIComponent(id)}/subscribe`);
  }

  unsubscribe(id: string): Promise<{ subscribed: boolean }> {
    return this.request("DELETE", `/workflows/${encodeURIComponent(id)}/subscribe`);
  }

  listTeams(): Promise<{ teams: TeamView[] }> {
    return this.request("GET", "/teams");
  }

  listSpaces(): Promise<{ spaces: SpaceView[] }> {
    return this.request("GET", "/spaces");
  }

  createTeam(body: { name: string; space_id: string; description?: string }): Promise<TeamView> {
    return this.request("POST", "/teams", body);
  }

  createSpace(body: { name: string; description?: string }): Promise<SpaceView> {
    return this.request("POST", "/spaces", body);
  }

  notifications(): Promise<{ events: { kind: string; entry_id: string; timestamp: string }[] }> {
    return this.request("GET", "/notifications");
  }

  crateUrl(id: string, version?: number): string {
    const suffix = version === undefined ? "" : `?version=${version}`;
    return `${this.baseUrl}/workflows/${encodeURIComponent(id)}/ro_crate${suffix}`;
  }
}
