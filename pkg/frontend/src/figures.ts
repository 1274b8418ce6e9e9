/** The five figure kinds, each reading its columns from the fixed CSV
 * contracts and returning a deterministic SVG string. */

import { Table, requireColumns } from "./csv.js";
import { FigureLayout, color, renderFigure } from "./svg.js";

export const KINDS = ["profiles", "entropy", "shifts", "separation", "residuals"] as const;
export type Kind = (typeof KINDS)[number];

export interface FigureOptions {
  /** CSV origin, used in error messages only. */
  path: string;
  logX?: boolean;
  logY?: boolean;
  /** shock speeds; required by the separation corridor figure */
  sigma1?: number;
  sigma3?: number;
}

function profilesFigure(table: Table, opt: FigureOptions): FigureLayout {
  const [xi] = requireColumns(table, ["xi"], opt.path);
  const fields = table.columns.filter((c) => c !== "xi");
  if (fields.length === 0) {
    throw new Error(`no field columns besides xi in ${opt.path}`);
  }
  return {
    title: "wave profile",
    xAxis: { label: "xi", log: opt.logX },
    yAxis: { label: "field value", log: opt.logY },
    series: fields.map((name, i) => ({
      x: xi,
      y: table.data.get(name)!,
      color: color(i),
      label: name,
    })),
  };
}

function entropyFigure(table: Table, opt: FigureOptions): FigureLayout {
  const [t, e] = requireColumns(table, ["t", "E_rel"], opt.path);
  return {
    title: "weighted relative entropy decay",
    xAxis: { label: "t", log: opt.logX },
    yAxis: { label: "E_rel", log: opt.logY },
    series: [{ x: t, y: e, color: color(0), label: "E_rel(t)" }],
  };
}

function shiftsFigure(table: Table, opt: FigureOptions): FigureLayout {
  const [t, x1, x3, xd1, xd3] = requireColumns(
    table, ["t", "X1", "X3", "Xdot1", "Xdot3"], opt.path,
  );
  return {
    title: "shock shifts and shift rates",
    xAxis: { label: "t", log: opt.logX },
    yAxis: { label: "shift / rate", log: opt.logY },
    series: [
      { x: t, y: x1, color: color(0), label: "X1" },
      { x: t, y: x3, color: color(1), label: "X3" },
      { x: t, y: xd1, color: color(0), label: "dX1/dt", dash: "5 3" },
      { x: t, y: xd3, color: color(1), label: "dX3/dt", dash: "5 3" },
    ],
  };
}

function separationFigure(table: Table, opt: FigureOptions): FigureLayout {
  if (opt.sigma1 === undefined || opt.sigma3 === undefined) {
    throw new Error("separation figure needs --sigma1 and --sigma3");
  }
  const [t, x1, x3] = requireColumns(table, ["t", "X1", "X3"], opt.path);
  const s1 = opt.sigma1;
  const s3 = opt.sigma3;
  return {
    title: "wave-separation corridor",
    xAxis: { label: "t", log: opt.logX },
    yAxis: { label: "position", log: opt.logY },
    series: [
      { x: t, y: t.map((tv, i) => x1[i] + s1 * tv), color: color(0), label: "X1 + s1 t" },
      { x: t, y: t.map((tv) => (s1 * tv) / 2), color: color(0), label: "s1 t / 2", dash: "5 3" },
      { x: t, y: t.map((tv) => (s3 * tv) / 2), color: color(1), label: "s3 t / 2", dash: "5 3" },
      { x: t, y: t.map((tv, i) => x3[i] + s3 * tv), color: color(1), label: "X3 + s3 t" },
    ],
  };
}

function residualsFigure(table: Table, opt: FigureOptions): FigureLayout {
  const [t, q1, q2] = requireColumns(table, ["t", "Q1_l2", "Q2_l2"], opt.path);
  // shifted time keeps t = 0 plottable on the default log axis
  const tp = t.map((v) => 1 + v);
  return {
    title: "interaction residual decay",
    xAxis: { label: "1 + t", log: opt.logX ?? true },
    yAxis: { label: "L2 norm", log: opt.logY ?? true },
    series: [
      { x: tp, y: q1, color: color(0), label: "|Q1|" },
      { x: tp, y: q2, color: color(1), label: "|Q2|" },
    ],
  };
}

const BUILDERS: Record<Kind, (table: Table, opt: FigureOptions) => FigureLayout> = {
  profiles: profilesFigure,
  entropy: entropyFigure,
  shifts: shiftsFigure,
  separation: separationFigure,
  residuals: residualsFigure,
};

export function render(kind: Kind, table: Table, opt: FigureOptions): string {
  const builder = BUILDERS[kind];
  if (builder === undefined) {
    throw new Error(`unknown figure kind "${kind}"`);
  }
  return renderFigure(builder(table, opt));
}
