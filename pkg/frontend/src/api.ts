// Thin typed client over the content service HTTP API. The UI never
// computes content or links itself; every rendered byte comes from here.

export interface DirEntry {
  segment: string;
  kind: string;
  node: string;
}

export interface Decoration {
  start_word: number;
  end_word: number;
  link: string;
  destinations: string[];
}

export interface PageBlock {
  cell: string;
  kind: string;
  text: string;
  level: number;
  decorations: Decoration[];
  markup?: string;
}

export interface PageTree {
  v: number;
  page: string;
  context_path: string;
  context: string | null;
  plain_text: string;
  blocks: PageBlock[];
}

export interface ContextInfo {
  id: string;
  name: string;
}

export interface Backref {
  parent: string;
  name: string;
  relation: string;
}

export interface CellPayload {
  kind: string;
  content: string;
  meta: Record<string, string>;
}

export interface ErrorBody {
  error: string;
  detail: string;
  offset?: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ErrorBody,
  ) {
    super(`${body.error}: ${body.detail}`);
  }
}

export class Client {
  /** Revision seen on the most recent response, for conflict detection. */
  revision: number | null = null;

  constructor(public base: string) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await fetch(this.base + path, init);
    const rev = response.headers.get("X-Repo-Revision");
    if (rev !== null) this.revision = Number(rev);
    if (!response.ok) {
      let body: ErrorBody;
      try {
        body = (await response.json()) as ErrorBody;
      } catch {
        body = { error: `HTTP${response.status}`, detail: response.statusText };
      }
      throw new ApiError(response.status, body);
    }
    return response;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    return (await this.request(path, init)).json() as Promise<T>;
  }

  repoInfo(): Promise<{ root: string; name: string; revision: number }> {
    return this.json("/api/repo");
  }

  tree(path: string): Promise<{ path: string; entries: DirEntry[] }> {
    return this.json(`/api/tree?path=${encodeURIComponent(path)}`);
  }

  page(path: string, context: string | null): Promise<PageTree> {
    const ctx = context ? `&context=${encodeURIComponent(context)}` : "";
    return this.json(`/api/page?path=${encodeURIComponent(path)}${ctx}`);
  }

  async pageHtml(path: string, context: string | null): Promise<string> {
    const ctx = context ? `&context=${encodeURIComponent(context)}` : "";
    const response = await this.request(
      `/api/page?path=${encodeURIComponent(path)}${ctx}&format=html`,
    );
    return response.text();
  }

  contexts(): Promise<{ contexts: ContextInfo[] }> {
    return this.json("/api/contexts");
  }

  backrefs(node: string): Promise<{ node: string; referrers: Backref[] }> {
    return this.json(`/api/backrefs/${encodeURIComponent(node)}`);
  }

  cell(id: string): Promise<{ id: string; kind: string; meta: Record<string, string>; content: string }> {
    return this.json(`/api/cells/${encodeURIComponent(id)}`);
  }

  putCell(id: string, payload: CellPayload): Promise<{ id: string; created: boolean }> {
    return this.json(`/api/cells/${encodeURIComponent(id)}`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }
}
