#!/usr/bin/env node
/**
 * render --kind <surface|slice|regions|path> --in <csv...> --out <image.svg>
 *
 * Exit codes: 0 success, 1 usage or schema error.
 */

import { SchemaError } from "./csv.js";
import { FigureKind, FigureSpec, render } from "./figures.js";

const KINDS: FigureKind[] = ["surface", "slice", "regions", "path"];

export function parseArgs(argv: string[]): FigureSpec {
  let kind: string | undefined;
  const inputs: string[] = [];
  let output: string | undefined;
  let title: string | undefined;

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    switch (arg) {
      case "--kind":
        kind = argv[++i];
        break;
      case "--in":
        while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
          inputs.push(argv[++i]);
        }
        break;
      case "--out":
        output = argv[++i];
        break;
      case "--title":
        title = argv[++i];
        break;
      default:
        throw new Error(`unknown argument '${arg}'`);
    }
  }
  if (!kind || !KINDS.includes(kind as FigureKind)) {
    throw new Error(`--kind must be one of ${KINDS.join("|")}, got '${kind ?? ""}'`);
  }
  if (inputs.length === 0) throw new Error("--in requires at least one CSV path");
  if (!output) throw new Error("--out is required");
  return { kind: kind as FigureKind, inputs, output, title };
}

export function main(argv: string[]): number {
  try {
    render(parseArgs(argv));
  } catch (error) {
    if (error instanceof SchemaError || error instanceof Error) {
      console.error(`error: ${error.message}`);
      return 1;
    }
    throw error;
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  (process.argv[1].endsWith("/cli.js") || process.argv[1].endsWith("/render") || process.argv[1].endsWith("\\cli.js"));
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
