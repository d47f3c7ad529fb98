// DOM wiring for the portal screens. All state lives on the server; after
// every mutation the affected lists are re-fetched.

import { ApiClient, ApiError } from "./api.js";
import {
  engineLabel,
  parseToolchains,
  submitApplication,
  submitRepository,
} from "./forms.js";
import {
  previewText,
  renderApiError,
  renderErrors,
  renderPipelineList,
  renderRepositoryList,
  renderStageSummary,
} from "./views.js";

const api = new ApiClient();

const LANGUAGES = ["Go", "Python", "Java", "Rust", "TypeScript", "Terraform"];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function showApiError(target: HTMLElement, err: unknown): void {
  if (err instanceof ApiError) {
    target.innerHTML = renderApiError(err.status, err.body);
  } else {
    target.textContent = String(err);
  }
}

function selectedValues(select: HTMLSelectElement): string[] {
  return Array.from(select.selectedOptions).map((o) => o.value);
}

async function refreshEngineSelects(): Promise<void> {
  const engines = await api.listEngines();
  for (const id of ["repo-engine", "provision-engine"]) {
    const select = el<HTMLSelectElement>(id);
    const current = select.value;
    select.innerHTML = engines
      .map((e) => `<option value="${e.id}">${engineLabel(e)}</option>`)
      .join("");
    if (current) select.value = current;
  }
}

async function refreshRepositoryViews(): Promise<void> {
  const [repos, engines] = await Promise.all([api.listRepositories(), api.listEngines()]);
  el("repo-list").innerHTML = renderRepositoryList(repos, engines);
  const options = repos.map((r) => `<option value="${r.id}">${r.name}</option>`).join("");
  el<HTMLSelectElement>("app-repos").innerHTML = options;
  el<HTMLSelectElement>("provision-repo").innerHTML = options;
}

async function refreshPipelineList(): Promise<void> {
  const template = el<HTMLInputElement>("pipeline-filter-template").value.trim();
  const engineId = el<HTMLSelectElement>("pipeline-filter-engine").value;
  const [pipelines, repos, engines] = await Promise.all([
    api.listPipelines({ template: template || undefined, engine_id: engineId || undefined }),
    api.listRepositories(),
    api.listEngines(),
  ]);
  el("pipeline-list").innerHTML = renderPipelineList(pipelines, repos, engines);
  const filterSelect = el<HTMLSelectElement>("pipeline-filter-engine");
  const current = filterSelect.value;
  filterSelect.innerHTML =
    `<option value="">all engines</option>` +
    engines.map((e) => `<option value="${e.id}">${engineLabel(e)}</option>`).join("");
  filterSelect.value = current;
}

function wireRepositoryForm(): void {
  el<HTMLFormElement>("repo-form").addEventListener("submit", async (event) => {
    event.preventDefault();
    const errorsBox = el("repo-errors");
    const form = {
      name: el<HTMLInputElement>("repo-name").value,
      url: el<HTMLInputElement>("repo-url").value,
      path: el<HTMLInputElement>("repo-path").value,
      languages: selectedValues(el<HTMLSelectElement>("repo-languages")),
      toolchains: parseToolchains(el<HTMLInputElement>("repo-toolchains").value),
      engine_id: el<HTMLSelectElement>("repo-engine").value,
    };
    try {
      const result = await submitRepository(form, api);
      errorsBox.innerHTML = renderErrors(result.errors);
      if (result.created) {
        el<HTMLFormElement>("repo-form").reset();
        await refreshRepositoryViews();
      }
    } catch (err) {
      showApiError(errorsBox, err);
    }
  });
}

function wireEngineForm(): void {
  el<HTMLFormElement>("engine-form").addEventListener("submit", async (event) => {
    event.preventDefault();
    const errorsBox = el("engine-errors");
    try {
      await api.createEngine({
        name: el<HTMLInputElement>("engine-name").value,
        kind: el<HTMLSelectElement>("engine-kind").value as "gitlab" | "github",
      });
      errorsBox.innerHTML = "";
      el<HTMLFormElement>("engine-form").reset();
      await refreshEngineSelects();
      await refreshPipelineList();
    } catch (err) {
      showApiError(errorsBox, err);
    }
  });
}

function wireApplicationForm(): void {
  el<HTMLFormElement>("app-form").addEventListener("submit", async (event) => {
    event.preventDefault();
    const errorsBox = el("app-errors");
    const form = {
      name: el<HTMLInputElement>("app-name").value,
      lint_required: el<HTMLInputElement>("app-lint").checked,
      coverage_target: Number(el<HTMLInputElement>("app-coverage").value),
      repository_ids: selectedValues(el<HTMLSelectElement>("app-repos")),
    };
    try {
      const result = await submitApplication(form, api);
      errorsBox.innerHTML = renderErrors(result.errors);
      if (result.created) {
        el("app-created").textContent = `created application ${result.created.name}`;
        el<HTMLFormElement>("app-form").reset();
      }
    } catch (err) {
      showApiError(errorsBox, err);
    }
  });
}

function wireProvision(): void {
  el<HTMLFormElement>("provision-form").addEventListener("submit", async (event) => {
    event.preventDefault();
    const errorsBox = el("provision-errors");
    const repoId = el<HTMLSelectElement>("provision-repo").value;
    const engineId = el<HTMLSelectElement>("provision-engine").value;
    const mode = el<HTMLSelectElement>("provision-mode").value as "include" | "inline";
    try {
      const result = await api.provision(repoId, {
        engine_id: engineId,
        mode,
        write_back: el<HTMLInputElement>("provision-write-back").checked,
      });
      errorsBox.innerHTML = "";
      // Regenerate-overwrites: a new provision replaces the whole preview.
      el<HTMLPreElement>("preview-pane").textContent = previewText(result);
      el("preview-summary").innerHTML = renderStageSummary(result.plan);
      await refreshPipelineList();
    } catch (err) {
      showApiError(errorsBox, err);
    }
  });
}

function wireTabs(): void {
  for (const button of Array.from(document.querySelectorAll<HTMLButtonElement>(".tab"))) {
    button.addEventListener("click", () => {
      for (const other of Array.from(document.querySelectorAll(".tab"))) {
        other.classList.toggle("active", other === button);
      }
      for (const screen of Array.from(document.querySelectorAll<HTMLElement>(".screen"))) {
        screen.hidden = screen.id !== `screen-${button.dataset.screen}`;
      }
    });
  }
}

async function boot(): Promise<void> {
  el<HTMLSelectElement>("repo-languages").innerHTML = LANGUAGES.map(
    (l) => `<option value="${l}">${l}</option>`,
  ).join("");
  wireTabs();
  wireRepositoryForm();
  wireEngineForm();
  wireApplicationForm();
  wireProvision();
  el("pipeline-filter-apply").addEventListener("click", () => void refreshPipelineList());
  await refreshEngineSelects();
  await refreshRepositoryViews();
  await refreshPipelineList();
}

document.addEventListener("DOMContentLoaded", () => {
  void boot();
});
