import { contours } from "d3-contour";
import { scaleLinear } from "d3-scale";
import { GridMeta, Table, gridMeta, loadTable } from "../schema.js";
import { escapeXml, openSvg, text } from "../svg.js";

interface Panel {
  label: string;
  meta: GridMeta;
  n1: number;
  n2: number;
  /** Row-major over nu (x2), mu (x1) fastest, as d3-contour expects. */
  values: Float64Array;
}

function toPanel(table: Table): Panel {
  const meta = gridMeta(table);
  const [l1, r1, l2, r2] = meta.bounds;
  const n1 = Math.round((r1 - l1) / meta.h);
  const n2 = Math.round((r2 - l2) / meta.h);
  const values = new Float64Array(n1 * n2);
  for (const row of table.rows) {
    values[row.nu * n1 + row.mu] = row.value;
  }
  return { label: table.file.replace(/^.*\//, ""), meta, n1, n2, values };
}

const PANEL = 300;
const GAP = 30;
const TOP = 40;
const BOTTOM = 20;

/**
 * Filled contours of 2-D projection grids (mu,nu,value). With two inputs the
 * panels sit side by side and share one color scale, so the numeric solution
 * and the reference are directly comparable.
 */
export function renderContour(inputs: string[]): string {
  const panels = inputs.map((f) => toPanel(loadTable(f, ["mu", "nu", "value"])));
  let lo = Infinity;
  let hi = -Infinity;
  for (const p of panels) {
    for (const v of p.values) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!(hi > lo)) {
    hi = lo + 1;
  }
  const color = scaleLinear<string>()
    .domain([lo, (lo + hi) / 2, hi])
    .range(["#313695", "#ffffbf", "#a50026"]);
  const thresholds = Array.from({ length: 12 }, (_, i) => lo + ((i + 0.5) / 12) * (hi - lo));

  const width = panels.length * PANEL + (panels.length - 1) * GAP + 40;
  const height = PANEL + TOP + BOTTOM;
  let svg = openSvg(width, height);
  panels.forEach((panel, pi) => {
    const ox = 20 + pi * (PANEL + GAP);
    const sx = PANEL / panel.n1;
    const sy = PANEL / panel.n2;
    const bands = contours().size([panel.n1, panel.n2]).thresholds(thresholds)(panel.values as unknown as number[]);
    svg += `<g transform="translate(${ox},${TOP})">\n`;
    svg += `<rect width="${PANEL}" height="${PANEL}" fill="${color(lo)}"/>\n`;
    for (const band of bands) {
      let d = "";
      for (const poly of band.coordinates) {
        for (const ring of poly) {
          d += ring
            .map(([u, v], i) => `${i === 0 ? "M" : "L"}${(u * sx).toFixed(1)},${(PANEL - v * sy).toFixed(1)}`)
            .join("");
          d += "Z";
        }
      }
      if (d) {
        svg += `<path d="${d}" fill="${color(band.value)}" stroke="none"/>\n`;
      }
    }
    svg += `<rect width="${PANEL}" height="${PANEL}" fill="none" stroke="black"/>\n`;
    svg += `</g>\n`;
    svg += text(ox + PANEL / 2, TOP - 12, escapeXml(panel.label));
  });
  svg += text(width / 2, height - 4, `shared scale: ${lo.toPrecision(3)} to ${hi.toPrecision(3)}`);
  return svg + "</svg>\n";
}
