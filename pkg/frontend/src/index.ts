export { EXPECTED_HEADER, assertOverlayCompatible, parseSweepCsv } from './csv.js';
export type { SweepCurve, SweepRow } from './csv.js';
export { curveLabel, renderFigure } from './figure.js';
export type { PlotOptions } from './figure.js';
export { parseArgs, runCli } from './cli.js';
