import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

const here = dirname(fileURLToPath(import.meta.url));
const cliPath = join(here, "..", "dist", "cli.js");
const diagPath = join(here, "fixtures", "reference_diagnostics.csv");
const profPath = join(here, "fixtures", "shock1_profile.csv");

function runCli(args: string[]): { status: number; stderr: string } {
  try {
    execFileSync("node", [cliPath, ...args], { stdio: ["ignore", "pipe", "pipe"] });
    return { status: 0, stderr: "" };
  } catch (err) {
    const e = err as { status?: number; stderr?: Buffer };
    return { status: e.status ?? -1, stderr: e.stderr?.toString() ?? "" };
  }
}

describe("nsflab-plot CLI (built dist)", () => {
  const out = mkdtempSync(join(tmpdir(), "nsflab-plot-"));

  it("renders all five kinds byte-identically on re-render", () => {
    const jobs: [string, string, string[]][] = [
      ["profiles", profPath, []],
      ["entropy", diagPath, []],
      ["shifts", diagPath, []],
      ["separation", diagPath, ["--sigma1=-1.421569729361443",
                                "--sigma3=1.386750490563073"]],
      ["residuals", diagPath, []],
    ];
    for (const [kind, src, extra] of jobs) {
      const f1 = join(out, `${kind}_1.svg`);
      const f2 = join(out, `${kind}_2.svg`);
      expect(runCli(["--kind", kind, "--in", src, "--out", f1, ...extra]).status).toBe(0);
      expect(runCli(["--kind", kind, "--in", src, "--out", f2, ...extra]).status).toBe(0);
      expect(readFileSync(f1).equals(readFileSync(f2))).toBe(true);
    }
  });

  it("fails with the column name on a mutilated CSV", () => {
    const text = readFileSync(diagPath, "utf8").split("\n");
    const cols = text[0].split(",");
    const drop = cols.indexOf("X3");
    const mutilated = text
      .filter((l) => l.length > 0)
      .map((l) => l.split(",").filter((_, i) => i !== drop).join(","))
      .join("\n");
    const bad = join(out, "bad.csv");
    writeFileSync(bad, mutilated);
    const res = runCli(["--kind", "shifts", "--in", bad, "--out", join(out, "x.svg")]);
    expect(res.status).toBe(1);
    expect(res.stderr).toContain('"X3"');
  });

  it("rejects unknown kinds", () => {
    const res = runCli(["--kind", "pie", "--in", diagPath, "--out", join(out, "p.svg")]);
    expect(res.status).toBe(2);
  });
});
