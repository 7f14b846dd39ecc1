#!/usr/bin/env node
/**
 * plots <kind> --in CSV [--in CSV...] --out IMG [--log-x] [--log-y]
 *
 * kinds: growth | trajectories | heatmap | table
 * Exit codes: 0 figure written, 1 schema/data error, 2 usage error.
 */

import { readFileSync, writeFileSync, mkdirSync } from "fs";
import { dirname } from "path";

import { SchemaMismatch } from "./csv.js";
import {
  renderGrowth,
  renderHeatmap,
  renderTable,
  renderTrajectories,
} from "./charts.js";
import { footerFor } from "./hash.js";

const KINDS = ["growth", "trajectories", "heatmap", "table"] as const;
type Kind = (typeof KINDS)[number];

interface Job {
  kind: Kind;
  inputs: string[];
  out: string;
  logX?: boolean;
  logY?: boolean;
}

export function parseArgs(argv: string[]): Job {
  if (argv.length === 0) {
    throw new UsageError("missing figure kind");
  }
  const kind = argv[0] as Kind;
  if (!KINDS.includes(kind)) {
    throw new UsageError(`unknown kind '${argv[0]}'; expected ${KINDS.join("|")}`);
  }
  const inputs: string[] = [];
  let out = "";
  let logX: boolean | undefined;
  let logY: boolean | undefined;
  for (let i = 1; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--in") {
      const v = argv[++i];
      if (!v) throw new UsageError("--in needs a path");
      inputs.push(v);
    } else if (a === "--out") {
      const v = argv[++i];
      if (!v) throw new UsageError("--out needs a path");
      out = v;
    } else if (a === "--log-x") {
      logX = true;
    } else if (a === "--log-y") {
      logY = true;
    } else {
      throw new UsageError(`unknown argument '${a}'`);
    }
  }
  if (inputs.length === 0) throw new UsageError("at least one --in CSV required");
  if (!out) throw new UsageError("--out IMG required");
  return { kind, inputs, out, logX, logY };
}

export class UsageError extends Error {}

export function renderJob(job: Job): string {
  const loaded = job.inputs.map((path) => ({
    path,
    text: readFileSync(path, "utf-8"),
  }));
  const footer = footerFor(loaded[0].path, loaded[0].text);
  const opts = { logX: job.logX, logY: job.logY, footer };
  switch (job.kind) {
    case "growth":
      return renderGrowth(loaded, opts);
    case "trajectories":
      return renderTrajectories(loaded, opts);
    case "heatmap":
      return renderHeatmap(loaded, opts);
    case "table":
      return renderTable(loaded, opts);
  }
}

export function main(argv: string[]): number {
  let job: Job;
  try {
    job = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`usage error: ${err.message}`);
      console.error(
        "usage: plots <growth|trajectories|heatmap|table> --in CSV " +
          "[--in CSV...] --out IMG [--log-x] [--log-y]",
      );
      return 2;
    }
    throw err;
  }
  try {
    const svg = renderJob(job);
    mkdirSync(dirname(job.out) || ".", { recursive: true });
    writeFileSync(job.out, svg, "utf-8");
    console.log(`wrote ${job.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaMismatch) {
      console.error(err.message);
      return 1;
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      console.error(`input not found: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
