/**
 * CSV loading with schema validation.
 *
 * Inputs are the CSV files emitted by the kclab CLI: UTF-8, mandatory
 * header row, '.' decimals.  A file whose header does not carry the
 * columns a figure kind needs is rejected with SchemaMismatch naming the
 * offending columns.
 */

export class SchemaMismatch extends Error {
  readonly missing: string[];

  constructor(path: string, missing: string[], found: string[]) {
    super(
      `schema mismatch in ${path}: missing column(s) [${missing.join(", ")}]` +
        ` (found: [${found.join(", ")}])`,
    );
    this.name = "SchemaMismatch";
    this.missing = missing;
  }
}

export interface Table {
  /** column name -> values as raw strings (exact file text) */
  raw: Map<string, string[]>;
  /** column name -> numeric values (NaN for blanks/non-numerics) */
  cols: Map<string, number[]>;
  header: string[];
  rows: number;
}

export function parseCsv(text: string, path: string, required: string[]): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaMismatch(path, required, []);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const missing = required.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new SchemaMismatch(path, missing, header);
  }
  const raw = new Map<string, string[]>(header.map((h) => [h, []]));
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    header.forEach((h, i) => raw.get(h)!.push(parts[i] ?? ""));
  }
  const cols = new Map<string, number[]>();
  for (const [h, vals] of raw) {
    cols.set(
      h,
      vals.map((v) => (v === "" ? NaN : Number(v))),
    );
  }
  return { raw, cols, header, rows: lines.length - 1 };
}
