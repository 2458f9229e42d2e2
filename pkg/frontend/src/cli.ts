#!/usr/bin/env node
import { writeFileSync } from "fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { renderContour } from "./figures/contour.js";
import { renderCountTimeline } from "./figures/countTimeline.js";
import { renderEfficiency } from "./figures/efficiency.js";
import { renderSolution } from "./figures/solution.js";
import { SchemaError } from "./schema.js";

export const RENDERERS: Record<string, (inputs: string[]) => string> = {
  solution: renderSolution,
  count_timeline: renderCountTimeline,
  efficiency: renderEfficiency,
  contour: renderContour,
};

export function render(kind: string, inputs: string[], out: string): void {
  const renderer = RENDERERS[kind];
  if (!renderer) {
    throw new Error(`unknown figure kind "${kind}" (have: ${Object.keys(RENDERERS).join(", ")})`);
  }
  if (inputs.length === 0) {
    throw new Error("at least one input CSV is required");
  }
  writeFileSync(out, renderer(inputs));
}

export function main(argv: string[]): number {
  const args = yargs(argv)
    .command("$0 <kind>", "render one figure from solver CSV output", (y) =>
      y
        .positional("kind", { type: "string", choices: Object.keys(RENDERERS), demandOption: true })
        .option("in", { type: "string", array: true, demandOption: true, describe: "input CSV file(s)" })
        .option("out", { type: "string", demandOption: true, describe: "output SVG file" })
    )
    .strict()
    .exitProcess(false)
    .parseSync();
  try {
    render(args.kind as string, args.in as string[], args.out as string);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error in ${err.file}: missing column "${err.column}"`);
    } else {
      console.error(String(err instanceof Error ? err.message : err));
    }
    return 1;
  }
  return 0;
}

const isDirect = process.argv[1] && import.meta.url.endsWith(process.argv[1].replace(/^.*\//, "/"));
if (isDirect) {
  process.exit(main(hideBin(process.argv)));
}
