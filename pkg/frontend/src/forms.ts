// Form models and client-side validation. Constraints mirror the registry
// invariants exactly: invalid forms never reach the network.

import type { Application, ApiClient, CIEngine, Repository } from "./api.js";

export interface RepositoryForm {
  name: string;
  url: string;
  path: string;
  languages: string[];
  toolchains: string[];
  engine_id: string;
}

export interface ApplicationForm {
  name: string;
  lint_required: boolean;
  coverage_target: number;
  repository_ids: string[];
}

export function validateRepository(form: RepositoryForm): string[] {
  const errors: string[] = [];
  if (form.name.trim() === "") {
    errors.push("name is required");
  }
  if (form.languages.length === 0) {
    errors.push("select at least one language");
  }
  return errors;
}

export function validateApplication(form: ApplicationForm): string[] {
  const errors: string[] = [];
  if (form.name.trim() === "") {
    errors.push("name is required");
  }
  if (!Number.isFinite(form.coverage_target) || form.coverage_target < 0 || form.coverage_target > 100) {
    errors.push("coverage target must be between 0 and 100");
  }
  return errors;
}

export interface SubmitResult<T> {
  errors: string[];
  created?: T;
}

// Validate-then-submit. On validation errors the client is never called.
export async function submitRepository(
  form: RepositoryForm,
  api: Pick<ApiClient, "createRepository">,
): Promise<SubmitResult<Repository>> {
  const errors = validateRepository(form);
  if (errors.length > 0) {
    return { errors };
  }
  const created = await api.createRepository({ ...form, application_id: "" });
  return { errors: [], created };
}

export async function submitApplication(
  form: ApplicationForm,
  api: Pick<ApiClient, "createApplication">,
): Promise<SubmitResult<Application>> {
  const errors = validateApplication(form);
  if (errors.length > 0) {
    return { errors };
  }
  const created = await api.createApplication({
    name: form.name,
    requirements: {
      lint_required: form.lint_required,
      coverage_target: form.coverage_target,
      security_scan_required: true,
    },
    repository_ids: form.repository_ids,
  });
  return { errors: [], created };
}

export function parseToolchains(raw: string): string[] {
  return raw
    .split(",")
    .map((part) => part.trim())
    .filter((part) => part !== "");
}

export function engineLabel(engine: CIEngine): string {
  return `${engine.name} (${engine.kind})`;
}
