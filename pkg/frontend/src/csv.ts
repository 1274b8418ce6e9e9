/** Strict CSV reading for the fixed column contracts. */

export class MissingColumnError extends Error {
  constructor(public readonly column: string, path: string) {
    super(`missing column "${column}" in ${path}`);
    this.name = "MissingColumnError";
  }
}

export class MalformedCsvError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "MalformedCsvError";
  }
}

export interface Table {
  columns: string[];
  /** column name -> values, row order preserved */
  data: Map<string, number[]>;
  rows: number;
}

export function parseCsv(text: string, path: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new MalformedCsvError(`empty CSV ${path}`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  if (columns.some((c) => c === "")) {
    throw new MalformedCsvError(`blank column name in header of ${path}`);
  }
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new MalformedCsvError(
        `row ${i + 1} of ${path} has ${cells.length} cells, header has ${columns.length}`,
      );
    }
    for (let j = 0; j < columns.length; j++) {
      const value = Number(cells[j]);
      if (!Number.isFinite(value)) {
        throw new MalformedCsvError(
          `row ${i + 1}, column "${columns[j]}" of ${path} is not a finite number: "${cells[j]}"`,
        );
      }
      data.get(columns[j])!.push(value);
    }
  }
  const rows = lines.length - 1;
  if (rows === 0) {
    throw new MalformedCsvError(`no data rows in ${path}`);
  }
  return { columns, data, rows };
}

export function requireColumns(table: Table, names: string[], path: string): number[][] {
  return names.map((name) => {
    const col = table.data.get(name);
    if (col === undefined) {
      throw new MissingColumnError(name, path);
    }
    return col;
  });
}
