/**
 * Provenance footer: the generating run's config hash when the sidecar
 * run_summary.txt sits next to the first input CSV, else a hash of the
 * input bytes themselves.
 */

import { createHash } from "crypto";
import { existsSync, readFileSync } from "fs";
import { dirname, join } from "path";

export function footerFor(firstInputPath: string, firstInputText: string): string {
  const sidecar = join(dirname(firstInputPath), "run_summary.txt");
  if (existsSync(sidecar)) {
    const match = readFileSync(sidecar, "utf-8")
      .split(/\r?\n/)
      .find((l) => l.startsWith("config_hash"));
    if (match) {
      const value = match.split("=")[1]?.trim();
      if (value) return `cfg:${value.slice(0, 12)}`;
    }
  }
  const digest = createHash("sha256").update(firstInputText).digest("hex");
  return `csv:${digest.slice(0, 12)}`;
}
