// Typed client for the portal HTTP API (/api/v1). The UI performs no
// computation on pipeline text: whatever the API returns is displayed as-is.

export interface Requirements {
  lint_required: boolean;
  coverage_target: number;
  security_scan_required: boolean;
}

export interface Application {
  id: string;
  name: string;
  requirements: Requirements;
  repository_ids: string[];
}

export interface Repository {
  id: string;
  name: string;
  url: string;
  path: string;
  languages: string[];
  toolchains: string[];
  engine_id: string;
  application_id: string;
}

export interface CIEngine {
  id: string;
  name: string;
  kind: "gitlab" | "github";
}

export interface Pipeline {
  id: string;
  repository_id: string;
  engine_id: string;
  template_refs: string[];
  rendered_digest: string;
  catalog_version: string;
  name: string;
}

export interface ProvisionResult {
  pipeline_id: string;
  sealed_text: string;
  plan: Record<string, string[]>;
  catalog_version: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: string,
  ) {
    super(`HTTP ${status}: ${body}`);
  }
}

async function request<T>(method: string, url: string, body?: unknown): Promise<T> {
  const resp = await fetch(url, {
    method,
    headers: body === undefined ? undefined : { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const text = await resp.text();
  if (!resp.ok) {
    throw new ApiError(resp.status, text);
  }
  return (text ? JSON.parse(text) : undefined) as T;
}

export class ApiClient {
  constructor(private base: string = "/api/v1") {}

  listRepositories(): Promise<Repository[]> {
    return request("GET", `${this.base}/repositories`);
  }

  createRepository(body: Omit<Repository, "id">): Promise<Repository> {
    return request("POST", `${this.base}/repositories`, body);
  }

  listApplications(): Promise<Application[]> {
    return request("GET", `${this.base}/applications`);
  }

  createApplication(body: Omit<Application, "id">): Promise<Application> {
    return request("POST", `${this.base}/applications`, body);
  }

  listEngines(): Promise<CIEngine[]> {
    return request("GET", `${this.base}/ci-engines`);
  }

  createEngine(body: Omit<CIEngine, "id">): Promise<CIEngine> {
    return request("POST", `${this.base}/ci-engines`, body);
  }

  listPipelines(filter: { template?: string; engine_id?: string } = {}): Promise<Pipeline[]> {
    const params = new URLSearchParams();
    if (filter.template) params.set("template", filter.template);
    if (filter.engine_id) params.set("engine_id", filter.engine_id);
    const query = params.toString();
    return request("GET", `${this.base}/pipelines${query ? "?" + query : ""}`);
  }

  provision(
    repositoryId: string,
    body: { engine_id: string; mode: "include" | "inline"; write_back: boolean },
  ): Promise<ProvisionResult> {
    return request("POST", `${this.base}/repositories/${repositoryId}/provision`, body);
  }
}
