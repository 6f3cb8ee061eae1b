/** Parsing and validation of sweep result CSVs. */

export const EXPECTED_HEADER =
  'ptx_db,rho,sc_rate,ldpc_rate,ber,fer,bits,errors,blocks,seed';

export interface SweepRow {
  ptxDb: number;
  rho: number;
  scRate: number;
  ldpcRate: number;
  ber: number;
  fer: number;
  bits: number;
  errors: number;
  blocks: number;
  seed: number;
}

export interface SweepCurve {
  source: string;
  rho: number;
  scRate: number;
  ldpcRate: number;
  rows: SweepRow[];
}

function parseNumber(token: string, source: string, line: number, field: string): number {
  const value = Number(token);
  if (token.trim() === '' || Number.isNaN(value)) {
    throw new Error(`${source}: line ${line}: field ${field} is not a number (got "${token}")`);
  }
  return value;
}

export function parseSweepCsv(text: string, source = 'csv'): SweepCurve {
  const lines = text.split(/\r?\n/).filter((l) => l.trim() !== '');
  if (lines.length === 0) {
    throw new Error(`${source}: empty file`);
  }
  if (lines[0].trim() !== EXPECTED_HEADER) {
    throw new Error(
      `${source}: unexpected header "${lines[0].trim()}", expected "${EXPECTED_HEADER}"`,
    );
  }
  if (lines.length === 1) {
    throw new Error(`${source}: no data rows`);
  }
  const names = EXPECTED_HEADER.split(',');
  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(',');
    if (parts.length !== names.length) {
      throw new Error(
        `${source}: line ${i + 1}: expected ${names.length} fields, got ${parts.length}`,
      );
    }
    const get = (field: string) =>
      parseNumber(parts[names.indexOf(field)], source, i + 1, field);
    const row: SweepRow = {
      ptxDb: get('ptx_db'),
      rho: get('rho'),
      scRate: get('sc_rate'),
      ldpcRate: get('ldpc_rate'),
      ber: get('ber'),
      fer: get('fer'),
      bits: get('bits'),
      errors: get('errors'),
      blocks: get('blocks'),
      seed: get('seed'),
    };
    if (row.ber < 0 || row.ber > 1) {
      throw new Error(`${source}: line ${i + 1}: ber ${row.ber} outside [0, 1]`);
    }
    rows.push(row);
  }
  for (const field of ['rho', 'scRate', 'ldpcRate'] as const) {
    const values = new Set(rows.map((r) => r[field]));
    if (values.size !== 1) {
      throw new Error(`${source}: ${field} varies within one sweep file`);
    }
  }
  rows.sort((a, b) => a.ptxDb - b.ptxDb);
  return {
    source,
    rho: rows[0].rho,
    scRate: rows[0].scRate,
    ldpcRate: rows[0].ldpcRate,
    rows,
  };
}

/** Curves may only share a figure when they describe the same channel setup. */
export function assertOverlayCompatible(curves: SweepCurve[]): void {
  if (curves.length === 0) {
    throw new Error('nothing to plot');
  }
  const rhos = new Set(curves.map((c) => c.rho));
  if (rhos.size !== 1) {
    throw new Error(
      `refusing to overlay sweeps with different correlation factors: ${[...rhos].join(', ')}`,
    );
  }
}
