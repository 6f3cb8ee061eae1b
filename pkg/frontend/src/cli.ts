/** Command line: plot --csv A.csv --csv B.csv --out fig.svg [--floor 1e-6] [--deterministic] */

import { readFileSync, writeFileSync, existsSync } from 'fs';

import { assertOverlayCompatible, parseSweepCsv } from './csv.js';
import { renderFigure } from './figure.js';

export interface CliArgs {
  csv: string[];
  out: string;
  floor: number;
  deterministic: boolean;
}

export function parseArgs(argv: string[]): CliArgs {
  const args: CliArgs = { csv: [], out: '', floor: 1e-6, deterministic: false };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    switch (flag) {
      case '--csv':
        args.csv.push(argv[++i] ?? '');
        break;
      case '--out':
        args.out = argv[++i] ?? '';
        break;
      case '--floor':
        args.floor = Number(argv[++i]);
        break;
      case '--deterministic':
        args.deterministic = true;
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (args.csv.length === 0) {
    throw new Error('at least one --csv input is required');
  }
  if (!args.out) {
    throw new Error('--out is required');
  }
  if (!args.out.endsWith('.svg')) {
    throw new Error('only .svg output is supported');
  }
  if (!(args.floor > 0 && args.floor < 1)) {
    throw new Error(`--floor must be in (0, 1), got ${args.floor}`);
  }
  return args;
}

interface SidecarConfig {
  n_tx?: number;
  n_users?: number;
  n_rx?: number;
}

/**
 * When every CSV has the simulator's JSON sidecar next to it, the channel
 * dimensions must agree as well (the CSV alone only carries rho).
 */
export function checkSidecars(paths: string[]): void {
  const sidecars = paths.map((p) => p.replace(/\.csv$/, '.json'));
  if (!sidecars.every((p) => p !== '' && existsSync(p))) {
    return;
  }
  const dims = sidecars.map((p) => {
    const doc = JSON.parse(readFileSync(p, 'utf8')) as { config?: SidecarConfig };
    const cfg = doc.config ?? {};
    return `${cfg.n_tx}x${cfg.n_users}x${cfg.n_rx}`;
  });
  if (new Set(dims).size > 1) {
    throw new Error(`refusing to overlay sweeps with different dimensions: ${dims.join(' vs ')}`);
  }
}

export function runCli(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const curves = args.csv.map((path) => parseSweepCsv(readFileSync(path, 'utf8'), path));
    assertOverlayCompatible(curves);
    checkSidecars(args.csv);
    const svg = renderFigure(curves, {
      floor: args.floor,
      deterministic: args.deterministic,
    });
    writeFileSync(args.out, svg);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}
