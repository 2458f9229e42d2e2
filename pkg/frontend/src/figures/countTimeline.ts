import { extent } from "d3-array";
import { scaleLinear } from "d3-scale";
import { loadTable } from "../schema.js";
import { HEIGHT, MARGIN, PALETTE, WIDTH, axes, circle, legend, openSvg, polyline } from "../svg.js";

/**
 * Particle count over time from run.csv. Annihilation rows (the sawtooth
 * drops back to the initial count) are marked with dots.
 */
export function renderCountTimeline(inputs: string[]): string {
  const run = loadTable(inputs[0], ["time", "particle_count", "annihilated"]);
  const pts = run.rows.map((r): [number, number] => [r.time, r.particle_count]);
  const [t0, t1] = extent(pts.map((p) => p[0])) as [number, number];
  const cMax = Math.max(...pts.map((p) => p[1]));
  const x = scaleLinear([t0, t1], [MARGIN.left, WIDTH - MARGIN.right]);
  const y = scaleLinear([0, 1.05 * cMax], [HEIGHT - MARGIN.bottom, MARGIN.top]);

  let svg = openSvg();
  svg += polyline(pts.map((p): [number, number] => [x(p[0]), y(p[1])]), PALETTE[0]);
  for (const r of run.rows) {
    if (r.annihilated) {
      svg += circle(x(r.time), y(r.particle_count), 3, PALETTE[1]);
    }
  }
  svg += axes(x, y, "t", "particle count N(t)");
  svg += legend(
    [
      { label: "N(t)", color: PALETTE[0] },
      { label: "annihilation step", color: PALETTE[1] },
    ],
    MARGIN.left + 10,
    MARGIN.top + 10
  );
  return svg + "</svg>\n";
}
