/**
 * The four figure kinds rendered from kclab CSV outputs.
 *
 * growth        norm_estimate + both analytic bounds on log-log axes with
 *               the fitted exponent annotated exactly as written in the CSV;
 * trajectories  the three partial-sum norm trajectories against the cutoff;
 * heatmap       a projection matrix in (i, j, value) long form;
 * table         a membership witness table with match/mismatch colouring.
 */

import { SchemaMismatch, Table, parseCsv } from "./csv.js";
import {
  DEFAULT_FRAME,
  Frame,
  axes,
  document,
  esc,
  legend,
  makeScale,
  polyline,
  r2,
  text,
} from "./svg.js";

export interface RenderOptions {
  logX?: boolean;
  logY?: boolean;
  footer: string;
}

const SERIES_COLORS = ["#2456a4", "#c23b22", "#2d6a4f", "#7b2d8b", "#b8860b"];

export const GROWTH_COLUMNS = [
  "alpha",
  "k",
  "norm_estimate",
  "paper_lower_bound",
  "sqrt_variant_bound",
  "fitted_exponent",
];

export function renderGrowth(inputs: Array<{ path: string; text: string }>,
                             opts: RenderOptions): string {
  const tables = inputs.map(({ path, text: t }) => ({
    path,
    table: parseCsv(t, path, GROWTH_COLUMNS),
  }));
  const frame = DEFAULT_FRAME;
  const logX = opts.logX ?? true; // growth curves default to log-log
  const logY = opts.logY ?? true;
  let kAll: number[] = [];
  let vAll: number[] = [];
  for (const { table } of tables) {
    kAll = kAll.concat(table.cols.get("k")!);
    for (const col of ["norm_estimate", "paper_lower_bound", "sqrt_variant_bound"]) {
      vAll = vAll.concat(table.cols.get(col)!.filter((v) => isFinite(v) && v > 0));
    }
  }
  const xs = makeScale(Math.min(...kAll), Math.max(...kAll), frame.left,
    frame.width - frame.right, logX);
  const ys = makeScale(Math.min(...vAll), Math.max(...vAll),
    frame.height - frame.bottom, frame.top, logY);
  const body: string[] = [];
  const legendEntries: Array<{ label: string; color: string; dash?: string }> = [];
  const annotations: string[] = [];
  tables.forEach(({ table }, ti) => {
    const alpha = table.raw.get("alpha")![0];
    const k = table.cols.get("k")!;
    const base = SERIES_COLORS[ti % SERIES_COLORS.length];
    const seriesSpec: Array<[string, string, string]> = [
      ["norm_estimate", base, ""],
      ["paper_lower_bound", base, "7,4"],
      ["sqrt_variant_bound", base, "2,3"],
    ];
    for (const [col, color, dash] of seriesSpec) {
      const vals = table.cols.get(col)!;
      const pts: Array<[number, number]> = [];
      k.forEach((kv, i) => {
        if (isFinite(vals[i]) && (!ys.log || vals[i] > 0)) {
          pts.push([xs(kv), ys(vals[i])]);
        }
      });
      if (pts.length > 1) {
        body.push(polyline(pts, color, col === "norm_estimate" ? 2 : 1.2, dash));
      }
      legendEntries.push({
        label: `${col} (alpha=${alpha})`,
        color,
        dash: dash || undefined,
      });
    }
    // the aggregate fitted exponent lives on the last row; echo it verbatim
    const fitted = table.raw.get("fitted_exponent")!;
    const last = fitted[fitted.length - 1] ?? "";
    if (last !== "") {
      annotations.push(`slope = ${last} (alpha=${alpha})`);
    }
  });
  annotations.forEach((a, i) => {
    body.push(text(frame.width - frame.right - 6, frame.top + 14 + 14 * i, a,
      "end", 11, ' fill="#333"'));
  });
  body.push(axes({
    frame,
    xScale: xs,
    yScale: ys,
    xLabel: logX ? "k (log)" : "k",
    yLabel: logY ? "operator norm bound (log)" : "operator norm bound",
    title: "Projection norm growth",
  }));
  body.push(legend(frame, legendEntries));
  return document(frame, body.join("\n"), opts.footer);
}

export function renderTrajectories(inputs: Array<{ path: string; text: string }>,
                                   opts: RenderOptions): string {
  const required = ["m", "norm_S", "norm_S_plus", "norm_S_minus"];
  const { path, text: t } = inputs[0];
  const table = parseCsv(t, path, required);
  const frame = DEFAULT_FRAME;
  const m = table.cols.get("m")!;
  const series = ["norm_S", "norm_S_plus", "norm_S_minus"];
  const vals = series.flatMap((s) => table.cols.get(s)!.filter((v) => isFinite(v)));
  const logX = opts.logX ?? true;
  const logY = opts.logY ?? false;
  const xs = makeScale(Math.min(...m), Math.max(...m), frame.left,
    frame.width - frame.right, logX);
  const positive = vals.filter((v) => v > 0);
  const yLo = logY ? Math.min(...positive) : 0;
  const ys = makeScale(yLo, Math.max(...vals), frame.height - frame.bottom,
    frame.top, logY);
  const body: string[] = [];
  series.forEach((s, i) => {
    const v = table.cols.get(s)!;
    const pts: Array<[number, number]> = [];
    m.forEach((mv, j) => {
      if (isFinite(v[j]) && (!logY || v[j] > 0)) pts.push([xs(mv), ys(v[j])]);
    });
    body.push(polyline(pts, SERIES_COLORS[i], 1.8));
  });
  body.push(axes({
    frame,
    xScale: xs,
    yScale: ys,
    xLabel: logX ? "cutoff m (log)" : "cutoff m",
    yLabel: "partial-sum norm",
    title: "Partial-sum norm trajectories",
  }));
  body.push(legend(frame, series.map((s, i) => ({ label: s, color: SERIES_COLORS[i] }))));
  return document(frame, body.join("\n"), opts.footer);
}

export function renderHeatmap(inputs: Array<{ path: string; text: string }>,
                              opts: RenderOptions): string {
  const { path, text: t } = inputs[0];
  const table = parseCsv(t, path, ["i", "j", "value"]);
  const is = table.cols.get("i")!;
  const js = table.cols.get("j")!;
  const vs = table.cols.get("value")!;
  const n = Math.max(...is) + 1;
  const m = Math.max(...js) + 1;
  const frame: Frame = { ...DEFAULT_FRAME, width: 560, height: 560, bottom: 40 };
  const plotW = frame.width - frame.left - frame.right;
  const plotH = frame.height - frame.top - frame.bottom;
  const cw = plotW / m;
  const ch = plotH / n;
  const vmax = Math.max(...vs.map(Math.abs), 1e-300);
  const body: string[] = [];
  for (let r = 0; r < is.length; r++) {
    const x = frame.left + js[r] * cw;
    const y = frame.top + is[r] * ch;
    body.push(
      `<rect x="${r2(x)}" y="${r2(y)}" width="${r2(cw)}" height="${r2(ch)}" ` +
        `fill="${divergingColor(vs[r] / vmax)}" stroke="#fff" stroke-width="0.4"/>`,
    );
  }
  body.push(text(frame.width / 2, 22, "Spectral projection matrix", "middle",
    14, ' font-weight="bold"'));
  body.push(text(frame.width / 2, frame.height - 16, "column j"));
  body.push(`<g transform="rotate(-90 16 ${frame.height / 2})">` +
    text(16, frame.height / 2, "row i") + "</g>");
  return document(frame, body.join("\n"), opts.footer);
}

function divergingColor(v: number): string {
  // -1 .. 1 -> blue .. white .. red
  const clamp = Math.max(-1, Math.min(1, v));
  const mix = (a: number, b: number, t: number) => Math.round(a + (b - a) * t);
  if (clamp >= 0) {
    const t = clamp;
    return `rgb(${mix(255, 178, t)},${mix(255, 24, t)},${mix(255, 43, t)})`;
  }
  const t = -clamp;
  return `rgb(${mix(255, 33, t)},${mix(255, 102, t)},${mix(255, 172, t)})`;
}

export function renderTable(inputs: Array<{ path: string; text: string }>,
                            opts: RenderOptions): string {
  const { path, text: t } = inputs[0];
  const required = ["alpha", "beta", "function", "domain_alpha", "verdict",
    "expected"];
  const table = parseCsv(t, path, required);
  const rowH = 26;
  const frame: Frame = {
    width: 640,
    height: 80 + rowH * (table.rows + 1) + 24,
    left: 16,
    right: 16,
    top: 48,
    bottom: 24,
  };
  const colXs = [30, 90, 170, 280, 400, 520];
  const headers = required;
  const body: string[] = [];
  body.push(text(frame.width / 2, 26, "Domain membership witnesses", "middle",
    14, ' font-weight="bold"'));
  headers.forEach((h, c) => {
    body.push(text(colXs[c], frame.top + 16, h, "start", 12,
      ' font-weight="bold"'));
  });
  for (let r = 0; r < table.rows; r++) {
    const y = frame.top + 16 + rowH * (r + 1);
    const verdict = table.raw.get("verdict")![r];
    const expected = table.raw.get("expected")![r];
    const ok = verdict === expected;
    body.push(
      `<rect x="${r2(frame.left)}" y="${r2(y - 16)}" ` +
        `width="${r2(frame.width - frame.left - frame.right)}" height="${rowH}" ` +
        `fill="${ok ? "#e7f4e9" : "#fbe4e4"}"/>`,
    );
    headers.forEach((h, c) => {
      body.push(text(colXs[c], y + 2, table.raw.get(h)![r], "start", 12));
    });
  }
  return document(frame, body.join("\n"), opts.footer);
}
