/**
 * Minimal SVG builder: axes, ticks, polylines, rects and text.
 *
 * Deterministic by construction (pure string assembly, fixed precision),
 * so a job rendered twice from the same bytes emits identical markup.
 */

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export const DEFAULT_FRAME: Frame = {
  width: 720,
  height: 480,
  left: 70,
  right: 24,
  top: 40,
  bottom: 58,
};

export interface Scale {
  (v: number): number;
  ticks: number[];
  log: boolean;
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function niceLinearTicks(lo: number, hi: number, count: number): number[] {
  const range = hi - lo || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rough) ?? rough;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) ticks.push(v);
  return ticks;
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo)); e <= Math.floor(Math.log10(hi)); e++) {
    ticks.push(Math.pow(10, e));
  }
  if (ticks.length === 0) ticks.push(lo, hi);
  return ticks;
}

export function makeScale(
  lo: number,
  hi: number,
  outLo: number,
  outHi: number,
  log: boolean,
): Scale {
  if (log) {
    const safeLo = lo > 0 ? lo : 1e-12;
    const safeHi = hi > safeLo ? hi : safeLo * 10;
    const a = Math.log(safeLo);
    const b = Math.log(safeHi);
    const fn = ((v: number) =>
      outLo + ((Math.log(Math.max(v, safeLo)) - a) / (b - a)) * (outHi - outLo)) as Scale;
    fn.ticks = decadeTicks(safeLo, safeHi);
    fn.log = true;
    return fn;
  }
  const span = hi - lo || 1;
  const fn = ((v: number) => outLo + ((v - lo) / span) * (outHi - outLo)) as Scale;
  fn.ticks = niceLinearTicks(lo, hi, 6);
  fn.log = false;
  return fn;
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e5 || a < 1e-3) return v.toExponential(0).replace("+", "");
  return String(Number(v.toPrecision(6)));
}

export function line(x1: number, y1: number, x2: number, y2: number, style: string): string {
  return `<line x1="${r2(x1)}" y1="${r2(y1)}" x2="${r2(x2)}" y2="${r2(y2)}" ${style}/>`;
}

export function text(
  x: number,
  y: number,
  s: string,
  anchor = "middle",
  size = 12,
  extra = "",
): string {
  return (
    `<text x="${r2(x)}" y="${r2(y)}" text-anchor="${anchor}" ` +
    `font-family="sans-serif" font-size="${size}"${extra}>${esc(s)}</text>`
  );
}

export function polyline(pts: Array<[number, number]>, color: string, width = 1.5, dash = ""): string {
  const d = pts.map(([x, y]) => `${r2(x)},${r2(y)}`).join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline points="${d}" fill="none" stroke="${color}" stroke-width="${width}"${dashAttr}/>`;
}

export function r2(v: number): string {
  return (Math.round(v * 100) / 100).toFixed(2);
}

export interface AxisSpec {
  frame: Frame;
  xScale: Scale;
  yScale: Scale;
  xLabel: string;
  yLabel: string;
  title: string;
}

export function axes(spec: AxisSpec): string {
  const { frame, xScale, yScale } = spec;
  const x0 = frame.left;
  const x1 = frame.width - frame.right;
  const y0 = frame.height - frame.bottom;
  const y1 = frame.top;
  const parts: string[] = [];
  const grid = 'stroke="#ddd" stroke-width="0.6"';
  const axis = 'stroke="#333" stroke-width="1"';
  for (const t of xScale.ticks) {
    const px = xScale(t);
    parts.push(line(px, y0, px, y1, grid));
    parts.push(text(px, y0 + 18, fmtTick(t)));
  }
  for (const t of yScale.ticks) {
    const py = yScale(t);
    parts.push(line(x0, py, x1, py, grid));
    parts.push(text(x0 - 8, py + 4, fmtTick(t), "end"));
  }
  parts.push(line(x0, y0, x1, y0, axis));
  parts.push(line(x0, y0, x0, y1, axis));
  parts.push(text((x0 + x1) / 2, frame.height - 18, spec.xLabel));
  parts.push(
    `<g transform="rotate(-90 16 ${(y0 + y1) / 2})">` +
      text(16, (y0 + y1) / 2, spec.yLabel) +
      "</g>",
  );
  parts.push(text((x0 + x1) / 2, 22, spec.title, "middle", 14, ' font-weight="bold"'));
  return parts.join("\n");
}

export function document(frame: Frame, body: string, footer: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" ` +
    `height="${frame.height}" viewBox="0 0 ${frame.width} ${frame.height}">\n` +
    `<rect width="${frame.width}" height="${frame.height}" fill="white"/>\n` +
    body +
    "\n" +
    text(frame.width - frame.right, frame.height - 6, footer, "end", 9, ' fill="#777"') +
    "\n</svg>\n"
  );
}

export function legend(
  frame: Frame,
  entries: Array<{ label: string; color: string; dash?: string }>,
): string {
  const parts: string[] = [];
  let y = frame.top + 10;
  const x = frame.left + 12;
  for (const e of entries) {
    parts.push(
      `<line x1="${r2(x)}" y1="${r2(y)}" x2="${r2(x + 26)}" y2="${r2(y)}" ` +
        `stroke="${e.color}" stroke-width="2"` +
        (e.dash ? ` stroke-dasharray="${e.dash}"` : "") +
        "/>",
    );
    parts.push(text(x + 34, y + 4, e.label, "start", 11));
    y += 16;
  }
  return parts.join("\n");
}
