/** Minimal deterministic SVG plotting: fixed styles, fixed precision, no
 * timestamps, so identical inputs reproduce identical bytes. */

export interface Series {
  x: number[];
  y: number[];
  color: string;
  label: string;
  dash?: string;
  width?: number;
}

export interface AxisSpec {
  label: string;
  log?: boolean;
}

export interface FigureLayout {
  title: string;
  xAxis: AxisSpec;
  yAxis: AxisSpec;
  series: Series[];
  width?: number;
  height?: number;
}

const MARGIN = { top: 34, right: 18, bottom: 46, left: 64 };
const PALETTE = ["#1f5fa8", "#c23b22", "#2e7d32", "#8e44ad", "#e67e22", "#16828c"];

export function color(i: number): string {
  return PALETTE[i % PALETTE.length];
}

function fmt(v: number): string {
  // fixed-precision coordinates keep the output byte-stable
  return v.toFixed(2);
}

export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(parseFloat(v.toPrecision(4)));
}

function niceTicks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / Math.max(n - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const norm = step0 / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += step) out.push(v);
  return out;
}

function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(lo)); Math.pow(10, e) <= hi * (1 + 1e-12); e++) {
    out.push(Math.pow(10, e));
  }
  return out.length > 0 ? out : [lo];
}

class Scale {
  constructor(
    private lo: number,
    private hi: number,
    private a: number,
    private b: number,
    private log: boolean,
  ) {}

  map(v: number): number {
    const t = this.log
      ? (Math.log10(v) - Math.log10(this.lo)) / (Math.log10(this.hi) - Math.log10(this.lo))
      : (v - this.lo) / (this.hi - this.lo);
    return this.a + t * (this.b - this.a);
  }

  ticks(): number[] {
    return this.log ? logTicks(this.lo, this.hi) : niceTicks(this.lo, this.hi);
  }
}

function extent(values: number[], log: boolean): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (log && !(v > 0)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(lo <= hi)) throw new Error("no plottable data in range");
  if (lo === hi) {
    lo = log ? lo / 2 : lo - 1;
    hi = log ? hi * 2 : hi + 1;
  }
  if (!log) {
    const pad = 0.04 * (hi - lo);
    return [lo - pad, hi + pad];
  }
  return [lo, hi];
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderFigure(fig: FigureLayout): string {
  const W = fig.width ?? 760;
  const H = fig.height ?? 420;
  const x0 = MARGIN.left;
  const x1 = W - MARGIN.right;
  const y0 = H - MARGIN.bottom;
  const y1 = MARGIN.top;

  const xs = fig.series.flatMap((s) => s.x);
  const ys = fig.series.flatMap((s) => s.y);
  const [xlo, xhi] = extent(xs, fig.xAxis.log ?? false);
  const [ylo, yhi] = extent(ys, fig.yAxis.log ?? false);
  const sx = new Scale(xlo, xhi, x0, x1, fig.xAxis.log ?? false);
  const sy = new Scale(ylo, yhi, y0, y1, fig.yAxis.log ?? false);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" ` +
      `viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${W}" height="${H}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${fmt(W / 2)}" y="20" text-anchor="middle" font-size="15" fill="#222222">` +
      `${esc(fig.title)}</text>`,
  );

  for (const t of sx.ticks()) {
    const px = sx.map(t);
    parts.push(
      `<line x1="${fmt(px)}" y1="${fmt(y0)}" x2="${fmt(px)}" y2="${fmt(y1)}" ` +
        `stroke="#dddddd" stroke-width="0.6"/>`,
    );
    parts.push(
      `<text x="${fmt(px)}" y="${fmt(y0 + 16)}" text-anchor="middle" font-size="11" ` +
        `fill="#444444">${tickLabel(t)}</text>`,
    );
  }
  for (const t of sy.ticks()) {
    const py = sy.map(t);
    parts.push(
      `<line x1="${fmt(x0)}" y1="${fmt(py)}" x2="${fmt(x1)}" y2="${fmt(py)}" ` +
        `stroke="#dddddd" stroke-width="0.6"/>`,
    );
    parts.push(
      `<text x="${fmt(x0 - 6)}" y="${fmt(py + 3.5)}" text-anchor="end" font-size="11" ` +
        `fill="#444444">${tickLabel(t)}</text>`,
    );
  }
  parts.push(
    `<rect x="${fmt(x0)}" y="${fmt(y1)}" width="${fmt(x1 - x0)}" height="${fmt(y0 - y1)}" ` +
      `fill="none" stroke="#333333" stroke-width="1"/>`,
  );

  for (const s of fig.series) {
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const xv = s.x[i];
      const yv = s.y[i];
      if (fig.xAxis.log && !(xv > 0)) continue;
      if (fig.yAxis.log && !(yv > 0)) continue;
      pts.push(`${fmt(sx.map(xv))},${fmt(sy.map(yv))}`);
    }
    parts.push(
      `<polyline fill="none" stroke="${s.color}" stroke-width="${s.width ?? 1.6}"` +
        (s.dash ? ` stroke-dasharray="${s.dash}"` : "") +
        ` points="${pts.join(" ")}"/>`,
    );
  }

  // legend
  let ly = y1 + 14;
  for (const s of fig.series) {
    const lx = x1 - 170;
    parts.push(
      `<line x1="${fmt(lx)}" y1="${fmt(ly - 4)}" x2="${fmt(lx + 26)}" y2="${fmt(ly - 4)}" ` +
        `stroke="${s.color}" stroke-width="2"` +
        (s.dash ? ` stroke-dasharray="${s.dash}"` : "") +
        `/>`,
    );
    parts.push(
      `<text x="${fmt(lx + 32)}" y="${fmt(ly)}" font-size="11" fill="#222222">` +
        `${esc(s.label)}</text>`,
    );
    ly += 16;
  }

  parts.push(
    `<text x="${fmt((x0 + x1) / 2)}" y="${fmt(H - 10)}" text-anchor="middle" ` +
      `font-size="12" fill="#222222">${esc(fig.xAxis.label)}</text>`,
  );
  parts.push(
    `<text x="16" y="${fmt((y0 + y1) / 2)}" text-anchor="middle" font-size="12" ` +
      `fill="#222222" transform="rotate(-90 16 ${fmt((y0 + y1) / 2)})">` +
      `${esc(fig.yAxis.label)}</text>`,
  );
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
