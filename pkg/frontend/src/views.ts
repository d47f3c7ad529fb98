// Pure HTML renderers for the portal screens. Everything here is a string
// function so the screens stay testable without a browser.

import type { CIEngine, Pipeline, ProvisionResult, Repository } from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderRepositoryList(repos: Repository[], engines: CIEngine[]): string {
  if (repos.length === 0) {
    return `<p class="empty">No repositories registered yet.</p>`;
  }
  const engineNames = new Map(engines.map((e) => [e.id, e.name]));
  const rows = repos
    .map(
      (repo) => `<tr>
  <td>${escapeHtml(repo.name)}</td>
  <td>${escapeHtml(repo.languages.join(", "))}</td>
  <td>${escapeHtml(repo.toolchains.join(", "))}</td>
  <td>${escapeHtml(engineNames.get(repo.engine_id) ?? "")}</td>
  <td><code>${escapeHtml(repo.path || repo.url)}</code></td>
</tr>`,
    )
    .join("\n");
  return `<table>
<thead><tr><th>Name</th><th>Languages</th><th>Toolchains</th><th>Engine</th><th>Location</th></tr></thead>
<tbody>
${rows}
</tbody>
</table>`;
}

export function renderPipelineList(
  pipelines: Pipeline[],
  repos: Repository[],
  engines: CIEngine[],
): string {
  if (pipelines.length === 0) {
    return `<p class="empty">No pipelines provisioned yet.</p>`;
  }
  const repoNames = new Map(repos.map((r) => [r.id, r.name]));
  const engineNames = new Map(engines.map((e) => [e.id, e.name]));
  const rows = pipelines
    .map(
      (p) => `<tr>
  <td>${escapeHtml(p.template_refs.join(", "))}</td>
  <td>${escapeHtml(engineNames.get(p.engine_id) ?? p.engine_id)}</td>
  <td>${escapeHtml(repoNames.get(p.repository_id) ?? p.repository_id)}</td>
  <td><code>${escapeHtml(p.rendered_digest.slice(0, 12))}</code></td>
</tr>`,
    )
    .join("\n");
  return `<table>
<thead><tr><th>Templates</th><th>Engine</th><th>Repository</th><th>Digest</th></tr></thead>
<tbody>
${rows}
</tbody>
</table>`;
}

// The preview pane must show the API's sealed text byte-for-byte; the text
// is installed via textContent, never trimmed or reformatted.
export function previewText(result: ProvisionResult): string {
  return result.sealed_text;
}

export function renderStageSummary(plan: Record<string, string[]>): string {
  const items = Object.entries(plan)
    .map(
      ([stage, jobs]) =>
        `<li><strong>${escapeHtml(stage)}</strong>: ${escapeHtml(jobs.join(", "))}</li>`,
    )
    .join("\n");
  return `<ul class="stage-summary">\n${items}\n</ul>`;
}

export function renderErrors(errors: string[]): string {
  if (errors.length === 0) {
    return "";
  }
  const items = errors.map((e) => `<li>${escapeHtml(e)}</li>`).join("");
  return `<ul class="errors">${items}</ul>`;
}

export function renderApiError(status: number, body: string): string {
  return `<div class="api-error">HTTP ${status}: <code>${escapeHtml(body)}</code></div>`;
}
