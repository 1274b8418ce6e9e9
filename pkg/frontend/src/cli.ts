#!/usr/bin/env node
/** nsflab-plot: render one figure from a diagnostics or profile CSV.
 *
 * Usage:
 *   nsflab-plot --kind entropy --in diagnostics.csv --out entropy.svg
 *   nsflab-plot --kind separation --in diagnostics.csv --out sep.svg \
 *               --sigma1=-1.4216 --sigma3=1.3868
 *
 * Negative option values must use the attached --flag=value form.
 */
import { readFileSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { parseCsv } from "./csv.js";
import { KINDS, Kind, render } from "./figures.js";

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        in: { type: "string" },
        out: { type: "string" },
        sigma1: { type: "string" },
        sigma3: { type: "string" },
        "log-x": { type: "boolean" },
        "log-y": { type: "boolean" },
        help: { type: "boolean" },
      },
    }).values;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
  if (args.help) {
    process.stdout.write(
      `usage: nsflab-plot --kind <${KINDS.join("|")}> --in <csv> --out <svg>\n` +
        `       [--sigma1 S --sigma3 S] [--log-x] [--log-y]\n`,
    );
    return 0;
  }
  const kind = args.kind as Kind | undefined;
  if (kind === undefined || !KINDS.includes(kind)) {
    process.stderr.write(`error: --kind must be one of ${KINDS.join(", ")}\n`);
    return 2;
  }
  if (!args.in || !args.out) {
    process.stderr.write("error: --in and --out are required\n");
    return 2;
  }
  try {
    const text = readFileSync(args.in, "utf8");
    const table = parseCsv(text, args.in);
    const svg = render(kind, table, {
      path: args.in,
      logX: args["log-x"],
      logY: args["log-y"],
      sigma1: args.sigma1 !== undefined ? Number(args.sigma1) : undefined,
      sigma3: args.sigma3 !== undefined ? Number(args.sigma3) : undefined,
    });
    writeFileSync(args.out, svg);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
  return 0;
}

const entry = process.argv[1];
if (entry !== undefined && import.meta.url === pathToFileURL(entry).href) {
  process.exit(main(process.argv.slice(2)));
}
