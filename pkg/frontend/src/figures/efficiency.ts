import { extent } from "d3-array";
import { scaleLog } from "d3-scale";
import { loadTable } from "../schema.js";
import { HEIGHT, MARGIN, PALETTE, WIDTH, axes, circle, legend, openSvg, polyline } from "../svg.js";

interface MeanPoint {
  method: string;
  n0: number;
  seconds: number;
  error: number;
}

/**
 * Error versus wall time on log-log axes from efficiency.csv, one curve per
 * method, seed runs averaged per (method, n0).
 */
export function renderEfficiency(inputs: string[]): string {
  const table = loadTable(inputs[0], ["method", "n0", "seed", "error", "wall_ms"], ["method"]);
  const groups = new Map<string, { errs: number[]; walls: number[] }>();
  for (const r of table.rows) {
    const key = `${r.method}|${r.n0}`;
    const g = groups.get(key) ?? { errs: [], walls: [] };
    g.errs.push(r.error);
    g.walls.push(r.wall_ms);
    groups.set(key, g);
  }
  const mean = (xs: number[]) => xs.reduce((a, b) => a + b, 0) / xs.length;
  const points: MeanPoint[] = [...groups.entries()].map(([key, g]) => {
    const [method, n0] = key.split("|");
    return { method, n0: Number(n0), seconds: mean(g.walls) / 1000, error: mean(g.errs) };
  });
  points.sort((a, b) => a.seconds - b.seconds);

  const [s0, s1] = extent(points.map((p) => p.seconds)) as [number, number];
  const [e0, e1] = extent(points.map((p) => p.error)) as [number, number];
  const x = scaleLog([s0 / 1.3, s1 * 1.3], [MARGIN.left, WIDTH - MARGIN.right]);
  const y = scaleLog([e0 / 1.3, e1 * 1.3], [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const methods = [...new Set(points.map((p) => p.method))];
  let svg = openSvg();
  methods.forEach((method, i) => {
    const curve = points.filter((p) => p.method === method);
    svg += polyline(curve.map((p): [number, number] => [x(p.seconds), y(p.error)]), PALETTE[i]);
    for (const p of curve) {
      svg += circle(x(p.seconds), y(p.error), 3, PALETTE[i]);
    }
  });
  svg += axes(x, y, "wall time (s)", "relative L2 error", { xLog: true, yLog: true });
  svg += legend(methods.map((m, i) => ({ label: m, color: PALETTE[i] })), WIDTH - 220, MARGIN.top + 10);
  return svg + "</svg>\n";
}
