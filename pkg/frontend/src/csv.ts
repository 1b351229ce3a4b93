/** Minimal CSV handling for the solver's log files (no quoting needed:
 * the writers emit plain numeric/enum fields). */

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("empty file: no header row");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((l) => l.split(","));
  return { header, rows };
}

/** Map column names to indices, failing loudly with the missing name. */
export function columnIndices(
  table: Table,
  columns: string[],
  source: string,
): Record<string, number> {
  const out: Record<string, number> = {};
  for (const name of columns) {
    const idx = table.header.indexOf(name);
    if (idx < 0) {
      throw new Error(`column '${name}' missing in ${source}`);
    }
    out[name] = idx;
  }
  return out;
}

/** Parse a cell; empty cells become null. */
export function num(cell: string | undefined): number | null {
  if (cell === undefined || cell === "") return null;
  const v = Number(cell);
  if (Number.isNaN(v)) {
    throw new Error(`cannot parse '${cell}' as a number`);
  }
  return v;
}
