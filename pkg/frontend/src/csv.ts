/**
 * CSV loading with column-schema validation.
 *
 * Every reader names the offending column (and file) when the input does
 * not match the documented solver output schemas.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export function readTable(path: string): Table {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`${path}: ${first.message} (row ${first.row})`);
  }
  const columns = parsed.meta.fields ?? [];
  return { columns, rows: parsed.data };
}

export function requireColumns(table: Table, path: string, names: string[]): void {
  for (const name of names) {
    if (!table.columns.includes(name)) {
      throw new SchemaError(`${path}: missing column '${name}' (found: ${table.columns.join(", ")})`);
    }
  }
}

export function numericColumn(table: Table, path: string, name: string): number[] {
  requireColumns(table, path, [name]);
  return table.rows.map((row, index) => {
    const value = Number(row[name]);
    if (!Number.isFinite(value)) {
      throw new SchemaError(`${path}: column '${name}' has non-numeric value '${row[name]}' at data row ${index}`);
    }
    return value;
  });
}

/** Numeric column in which empty cells are allowed and map to null. */
export function optionalNumericColumn(table: Table, path: string, name: string): Array<number | null> {
  requireColumns(table, path, [name]);
  return table.rows.map((row, index) => {
    const raw = row[name];
    if (raw === undefined || raw === "") return null;
    const value = Number(raw);
    if (!Number.isFinite(value)) {
      throw new SchemaError(`${path}: column '${name}' has non-numeric value '${raw}' at data row ${index}`);
    }
    return value;
  });
}

export function stringColumn(table: Table, path: string, name: string): string[] {
  requireColumns(table, path, [name]);
  return table.rows.map((row) => row[name] ?? "");
}

export function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}
