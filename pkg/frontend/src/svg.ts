import { ScaleContinuousNumeric } from "d3-scale";

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { top: 24, right: 20, bottom: 44, left: 64 };

export function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export function openSvg(width = WIDTH, height = HEIGHT): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n`
  );
}

export function polyline(points: [number, number][], stroke: string, width = 1.5, dash = ""): string {
  const d = points.map(([x, y], i) => `${i === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`).join("");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<path d="${d}" fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr}/>\n`;
}

export function circle(x: number, y: number, r: number, fill: string): string {
  return `<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="${r}" fill="${fill}"/>\n`;
}

export function text(x: number, y: number, s: string, anchor = "middle", extra = ""): string {
  return `<text x="${x.toFixed(2)}" y="${y.toFixed(2)}" text-anchor="${anchor}" ${extra}>${escapeXml(s)}</text>\n`;
}

type Scale = ScaleContinuousNumeric<number, number>;

/** Bottom and left axes with tick marks and labels. */
export function axes(
  x: Scale,
  y: Scale,
  xLabel: string,
  yLabel: string,
  opts: { xLog?: boolean; yLog?: boolean; plotLeft?: number; plotRight?: number } = {}
): string {
  const left = opts.plotLeft ?? MARGIN.left;
  const right = opts.plotRight ?? WIDTH - MARGIN.right;
  const top = MARGIN.top;
  const bottom = HEIGHT - MARGIN.bottom;
  let out = `<g stroke="black" stroke-width="1">\n`;
  out += `<line x1="${left}" y1="${bottom}" x2="${right}" y2="${bottom}"/>\n`;
  out += `<line x1="${left}" y1="${top}" x2="${left}" y2="${bottom}"/>\n`;
  out += `</g>\n`;
  const fmt = (v: number) => (Math.abs(v) >= 1e4 || (v !== 0 && Math.abs(v) < 1e-2) ? v.toExponential(0) : String(+v.toPrecision(4)));
  for (const t of x.ticks(opts.xLog ? 4 : 7)) {
    const px = x(t);
    out += `<line x1="${px}" y1="${bottom}" x2="${px}" y2="${bottom + 5}" stroke="black"/>\n`;
    out += text(px, bottom + 18, fmt(t));
  }
  for (const t of y.ticks(opts.yLog ? 4 : 6)) {
    const py = y(t);
    out += `<line x1="${left - 5}" y1="${py}" x2="${left}" y2="${py}" stroke="black"/>\n`;
    out += text(left - 8, py + 4, fmt(t), "end");
  }
  out += text((left + right) / 2, HEIGHT - 8, xLabel);
  out += text(0, 0, yLabel, "middle", `transform="translate(16,${(top + bottom) / 2}) rotate(-90)"`);
  return out;
}

export function legend(entries: { label: string; color: string }[], x: number, y: number): string {
  let out = "";
  entries.forEach((e, i) => {
    const yy = y + i * 18;
    out += `<line x1="${x}" y1="${yy}" x2="${x + 24}" y2="${yy}" stroke="${e.color}" stroke-width="2"/>\n`;
    out += text(x + 30, yy + 4, e.label, "start");
  });
  return out;
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
