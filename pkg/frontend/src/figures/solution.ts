import { extent } from "d3-array";
import { scaleLinear } from "d3-scale";
import { loadTable } from "../schema.js";
import { HEIGHT, MARGIN, PALETTE, WIDTH, axes, legend, openSvg, polyline } from "../svg.js";

/**
 * Overlay of the particle reconstruction against the deterministic reference.
 * First input: reconstruction.csv (x,u). Optional second: reference.csv
 * (time,x,u), of which the latest time is drawn.
 */
export function renderSolution(inputs: string[]): string {
  const recon = loadTable(inputs[0], ["x", "u"]);
  const curves: { label: string; pts: [number, number][]; dash: string }[] = [
    { label: "particle reconstruction", pts: recon.rows.map((r) => [r.x, r.u]), dash: "" },
  ];
  if (inputs.length > 1) {
    const ref = loadTable(inputs[1], ["time", "x", "u"]);
    const tLast = Math.max(...ref.rows.map((r) => r.time));
    const pts = ref.rows.filter((r) => r.time === tLast).map((r): [number, number] => [r.x, r.u]);
    curves.push({ label: `reference t=${tLast}`, pts, dash: "6 3" });
  }

  const allX = curves.flatMap((c) => c.pts.map((p) => p[0]));
  const allU = curves.flatMap((c) => c.pts.map((p) => p[1]));
  const [x0, x1] = extent(allX) as [number, number];
  const [u0, u1] = extent(allU) as [number, number];
  const pad = 0.05 * (u1 - u0 || 1);
  const x = scaleLinear([x0, x1], [MARGIN.left, WIDTH - MARGIN.right]);
  const y = scaleLinear([u0 - pad, u1 + pad], [HEIGHT - MARGIN.bottom, MARGIN.top]);

  let svg = openSvg();
  curves.forEach((c, i) => {
    const pts = c.pts
      .slice()
      .sort((a, b) => a[0] - b[0])
      .map((p): [number, number] => [x(p[0]), y(p[1])]);
    svg += polyline(pts, PALETTE[i], 1.5, c.dash);
  });
  svg += axes(x, y, "x", "u(x, T)");
  svg += legend(curves.map((c, i) => ({ label: c.label, color: PALETTE[i] })), MARGIN.left + 10, MARGIN.top + 10);
  return svg + "</svg>\n";
}
