export { parseCsv, requireColumns, MissingColumnError, MalformedCsvError } from "./csv.js";
export { KINDS, render } from "./figures.js";
export type { Kind, FigureOptions } from "./figures.js";
export { renderFigure } from "./svg.js";
export type { FigureLayout, Series } from "./svg.js";
