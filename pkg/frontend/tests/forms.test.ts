import { describe, expect, it, vi } from "vitest";

import {
  parseToolchains,
  submitApplication,
  submitRepository,
  validateApplication,
  validateRepository,
} from "../src/forms.js";

const repoForm = {
  name: "go-service",
  url: "",
  path: "/srv/go-service",
  languages: ["Go"],
  toolchains: ["make"],
  engine_id: "e1",
};

const appForm = {
  name: "shop",
  lint_required: true,
  coverage_target: 80,
  repository_ids: ["r1"],
};

describe("validateRepository", () => {
  it("accepts a complete form", () => {
    expect(validateRepository(repoForm)).toEqual([]);
  });

  it("requires a name", () => {
    expect(validateRepository({ ...repoForm, name: "  " })).toContain("name is required");
  });

  it("requires at least one language", () => {
    expect(validateRepository({ ...repoForm, languages: [] })).toContain(
      "select at least one language",
    );
  });
});

describe("validateApplication", () => {
  it("accepts coverage inside [0, 100]", () => {
    expect(validateApplication(appForm)).toEqual([]);
    expect(validateApplication({ ...appForm, coverage_target: 0 })).toEqual([]);
    expect(validateApplication({ ...appForm, coverage_target: 100 })).toEqual([]);
  });

  it("rejects coverage outside [0, 100]", () => {
    expect(validateApplication({ ...appForm, coverage_target: 150 })).toContain(
      "coverage target must be between 0 and 100",
    );
    expect(validateApplication({ ...appForm, coverage_target: -1 })).not.toEqual([]);
    expect(validateApplication({ ...appForm, coverage_target: NaN })).not.toEqual([]);
  });
});

describe("submitRepository", () => {
  it("posts valid forms", async () => {
    const createRepository = vi.fn(async (body) => ({ ...body, id: "r9" }));
    const result = await submitRepository(repoForm, { createRepository });
    expect(result.errors).toEqual([]);
    expect(result.created?.id).toBe("r9");
    expect(createRepository).toHaveBeenCalledWith({ ...repoForm, application_id: "" });
  });

  it("never calls the API when validation fails", async () => {
    const createRepository = vi.fn();
    const result = await submitRepository({ ...repoForm, name: "" }, { createRepository });
    expect(result.errors.length).toBeGreaterThan(0);
    expect(createRepository).not.toHaveBeenCalled();
  });
});

describe("submitApplication", () => {
  it("maps form fields onto requirements", async () => {
    const createApplication = vi.fn(async (body) => ({ ...body, id: "a1" }));
    const result = await submitApplication(appForm, { createApplication });
    expect(result.errors).toEqual([]);
    expect(createApplication).toHaveBeenCalledWith({
      name: "shop",
      requirements: {
        lint_required: true,
        coverage_target: 80,
        security_scan_required: true,
      },
      repository_ids: ["r1"],
    });
  });

  it("blocks out-of-range coverage client-side", async () => {
    const createApplication = vi.fn();
    const result = await submitApplication(
      { ...appForm, coverage_target: 150 },
      { createApplication },
    );
    expect(result.errors).toContain("coverage target must be between 0 and 100");
    expect(createApplication).not.toHaveBeenCalled();
  });
});

describe("parseToolchains", () => {
  it("splits on commas and trims", () => {
    expect(parseToolchains(" make , docker,,go ")).toEqual(["make", "docker", "go"]);
  });

  it("handles the empty string", () => {
    expect(parseToolchains("")).toEqual([]);
  });
});
