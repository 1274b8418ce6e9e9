import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { MissingColumnError, parseCsv } from "../src/csv.js";
import { KINDS, Kind, render } from "../src/figures.js";

const here = dirname(fileURLToPath(import.meta.url));
const diagPath = join(here, "fixtures", "reference_diagnostics.csv");
const profPath = join(here, "fixtures", "shock1_profile.csv");

const diagText = readFileSync(diagPath, "utf8");
const profText = readFileSync(profPath, "utf8");

// shock speeds of the reference pattern, as reported in its report.json
const SIGMA = { sigma1: -1.421569729361443, sigma3: 1.386750490563073 };

function renderKind(kind: Kind, text: string, path: string): string {
  const table = parseCsv(text, path);
  return render(kind, table, { path, ...SIGMA });
}

function sourceFor(kind: Kind): [string, string] {
  return kind === "profiles" ? [profText, profPath] : [diagText, diagPath];
}

describe("figure rendering", () => {
  for (const kind of KINDS) {
    it(`renders ${kind} deterministically`, () => {
      const [text, path] = sourceFor(kind);
      const a = renderKind(kind, text, path);
      const b = renderKind(kind, text, path);
      expect(a.startsWith("<svg ")).toBe(true);
      expect(a).toContain("</svg>");
      expect(Buffer.from(a).equals(Buffer.from(b))).toBe(true);
      expect(a).not.toMatch(/\d{4}-\d{2}-\d{2}/); // no dates anywhere
    });
  }

  it("renders every diagnostics series with data", () => {
    const svg = renderKind("shifts", diagText, diagPath);
    const polylines = svg.match(/<polyline /g) ?? [];
    expect(polylines.length).toBe(4);
  });

  it("separation corridor keeps the shock sides ordered", () => {
    const svg = renderKind("separation", diagText, diagPath);
    expect(svg).toContain("X1 + s1 t");
    expect(svg).toContain("X3 + s3 t");
  });

  it("separation without sigmas is a clear error", () => {
    const table = parseCsv(diagText, diagPath);
    expect(() => render("separation", table, { path: diagPath })).toThrow(/sigma/);
  });

  it("residual figure defaults to log-log", () => {
    const svg = renderKind("residuals", diagText, diagPath);
    expect(svg).toContain("1 + t");
  });
});

describe("column validation", () => {
  it("names the missing column", () => {
    const lines = diagText.split("\n");
    const cols = lines[0].split(",");
    const drop = cols.indexOf("E_rel");
    const mutilated = lines
      .filter((l) => l.length > 0)
      .map((l) => l.split(",").filter((_, i) => i !== drop).join(","))
      .join("\n");
    const table = parseCsv(mutilated, "mutilated.csv");
    try {
      render("entropy", table, { path: "mutilated.csv" });
      expect.unreachable("should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(MissingColumnError);
      expect((err as Error).message).toContain('"E_rel"');
    }
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1,2\n3\n", "r.csv")).toThrow(/row 3/);
  });

  it("rejects non-numeric cells", () => {
    expect(() => parseCsv("a,b\n1,x\n", "r.csv")).toThrow(/not a finite number/);
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("", "e.csv")).toThrow(/empty/);
  });
});
