import { readFileSync } from "fs";
import Papa from "papaparse";

/** Thrown when a CSV is missing a column the figure needs. */
export class SchemaError extends Error {
  constructor(public file: string, public column: string) {
    super(`${file}: missing required column "${column}"`);
    this.name = "SchemaError";
  }
}

export interface Table {
  file: string;
  /** Leading "# ..." comment lines, stripped of the marker. */
  comments: string[];
  rows: Record<string, number>[];
}

/**
 * Load a CSV produced by the solver CLI. Every file starts with an optional
 * block of "# ..." comment lines followed by a header row; all data cells
 * are numeric except method names, which are kept as strings elsewhere.
 */
export function loadTable(file: string, required: string[], stringColumns: string[] = []): Table {
  const raw = readFileSync(file, "utf8");
  const lines = raw.split(/\r?\n/);
  const comments: string[] = [];
  let start = 0;
  while (start < lines.length && lines[start].startsWith("#")) {
    comments.push(lines[start].replace(/^#\s?/, ""));
    start++;
  }
  const parsed = Papa.parse(lines.slice(start).join("\n").trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const fields = (parsed.meta.fields ?? []).map((f) => f.trim());
  for (const column of required) {
    if (!fields.includes(column)) {
      throw new SchemaError(file, column);
    }
  }
  const rows = (parsed.data as Record<string, string>[]).map((r) => {
    const out: Record<string, number> = {};
    for (const key of fields) {
      const cell = (r[key] ?? "").trim();
      out[key] = stringColumns.includes(key) ? (cell as unknown as number) : Number(cell);
    }
    return out;
  });
  return { file, comments, rows };
}

export interface GridMeta {
  bounds: [number, number, number, number];
  h: number;
}

/** Parse the "bounds=l1,r1,l2,r2 h=0.4" metadata comment of projection.csv. */
export function gridMeta(table: Table): GridMeta {
  for (const line of table.comments) {
    const m = line.match(/bounds=([-\d.,eE+]+)\s+h=([-\d.eE+]+)/);
    if (m) {
      const parts = m[1].split(",").map(Number);
      if (parts.length === 4 && parts.every(Number.isFinite)) {
        return { bounds: parts as [number, number, number, number], h: Number(m[2]) };
      }
    }
  }
  throw new Error(`${table.file}: no "bounds=... h=..." metadata comment`);
}
