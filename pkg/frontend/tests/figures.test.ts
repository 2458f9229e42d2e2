import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";
import { main, render } from "../src/cli.js";
import { SchemaError, gridMeta, loadTable } from "../src/schema.js";

const FIXTURES = join(__dirname, "fixtures");
const fx = (name: string) => join(FIXTURES, name);
const outDir = mkdtempSync(join(tmpdir(), "plots-"));

function renderToString(kind: string, inputs: string[]): string {
  const out = join(outDir, `${kind}-${Math.random().toString(36).slice(2)}.svg`);
  render(kind, inputs, out);
  return readFileSync(out, "utf8");
}

describe("figure rendering", () => {
  it("draws the solution overlay with two curves", () => {
    const svg = renderToString("solution", [fx("reconstruction.csv"), fx("reference.csv")]);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("particle reconstruction");
    expect(svg).toContain("reference t=");
    expect((svg.match(/stroke-dasharray/g) ?? []).length).toBeGreaterThan(0);
  });

  it("draws the solution from the reconstruction alone", () => {
    const svg = renderToString("solution", [fx("reconstruction.csv")]);
    expect(svg).toContain("</svg>");
  });

  it("draws the count timeline with annihilation markers", () => {
    const table = loadTable(fx("run.csv"), ["time", "particle_count", "annihilated"]);
    const events = table.rows.filter((r) => r.annihilated).length;
    expect(events).toBeGreaterThan(0); // the fixture was produced with a low threshold
    const svg = renderToString("count_timeline", [fx("run.csv")]);
    expect((svg.match(/<circle/g) ?? []).length).toBe(events);
    expect(svg).toContain("particle count");
  });

  it("draws one efficiency curve per method on log axes", () => {
    const svg = renderToString("efficiency", [fx("efficiency.csv")]);
    expect(svg).toContain("birth_death");
    expect(svg).toContain("baseline_spm");
    expect(svg).toContain("wall time (s)");
  });

  it("draws side-by-side contours with a shared color scale", () => {
    const svg = renderToString("contour", [fx("projection.csv"), fx("projection.csv")]);
    expect(svg).toContain("shared scale:");
    expect((svg.match(/<g transform/g) ?? []).length).toBe(2);
    expect((svg.match(/<path/g) ?? []).length).toBeGreaterThan(2);
  });

  it("renders identical output for identical input", () => {
    const a = renderToString("contour", [fx("projection.csv")]);
    const b = renderToString("contour", [fx("projection.csv")]);
    expect(a).toBe(b);
  });
});

describe("schema validation", () => {
  it("names the missing column on a corrupted fixture", () => {
    const corrupted = join(outDir, "corrupted.csv");
    const original = readFileSync(fx("run.csv"), "utf8");
    writeFileSync(corrupted, original.replace("particle_count", "particles"));
    expect(() => render("count_timeline", [corrupted], join(outDir, "x.svg"))).toThrowError(
      /particle_count/
    );
    try {
      render("count_timeline", [corrupted], join(outDir, "x.svg"));
    } catch (err) {
      expect(err).toBeInstanceOf(SchemaError);
      expect((err as SchemaError).column).toBe("particle_count");
    }
  });

  it("parses the projection grid metadata comment", () => {
    const meta = gridMeta(loadTable(fx("projection.csv"), ["mu", "nu", "value"]));
    expect(meta.bounds).toEqual([-6, 8, -6, 8]);
    expect(meta.h).toBe(0.5);
  });

  it("rejects a projection without metadata", () => {
    const stripped = join(outDir, "no-meta.csv");
    const lines = readFileSync(fx("projection.csv"), "utf8").split("\n");
    writeFileSync(stripped, lines.filter((l) => !l.startsWith("#")).join("\n"));
    expect(() => render("contour", [stripped], join(outDir, "x.svg"))).toThrowError(/metadata/);
  });
});

describe("command line", () => {
  it("exits zero and writes the file on success", () => {
    const out = join(outDir, "cli.svg");
    const code = main(["count_timeline", "--in", fx("run.csv"), "--out", out]);
    expect(code).toBe(0);
    expect(readFileSync(out, "utf8")).toContain("<svg");
  });

  it("exits nonzero with the column name on a schema mismatch", () => {
    const corrupted = join(outDir, "corrupted-cli.csv");
    writeFileSync(corrupted, readFileSync(fx("run.csv"), "utf8").replace("time,", "t,"));
    const code = main(["count_timeline", "--in", corrupted, "--out", join(outDir, "y.svg")]);
    expect(code).toBe(1);
  });
});
