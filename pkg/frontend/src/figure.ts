/** Semilog BER-vs-power figure rendering, emitted as a standalone SVG string. */

import type { SweepCurve } from './csv.js';

export interface PlotOptions {
  /** Plot floor for zero-BER points (log axis cannot hold 0). */
  floor?: number;
  /** Omit the generation comment so output depends only on inputs. */
  deterministic?: boolean;
  width?: number;
  height?: number;
  title?: string;
}

const PALETTE = ['#1f6fb4', '#d62728', '#2ca02c', '#9467bd', '#8c564b', '#e377c2'];
const MARGIN = { top: 36, right: 24, bottom: 48, left: 64 };

function fmt(x: number): string {
  return Number(x.toFixed(3)).toString();
}

export function curveLabel(curve: SweepCurve): string {
  return `r_SC=${curve.scRate}, r_LDPC=${curve.ldpcRate}`;
}

export function renderFigure(curves: SweepCurve[], options: PlotOptions = {}): string {
  if (curves.length === 0) {
    throw new Error('nothing to plot');
  }
  const floor = options.floor ?? 1e-6;
  if (!(floor > 0 && floor < 1)) {
    throw new Error(`plot floor must be in (0, 1), got ${floor}`);
  }
  const width = options.width ?? 640;
  const height = options.height ?? 440;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs = curves.flatMap((c) => c.rows.map((r) => r.ptxDb));
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const xSpan = xMax - xMin || 1;
  const yMaxDecade = 0; // BER axis top at 1
  const yMinDecade = Math.floor(Math.log10(floor));

  const xPix = (x: number) => MARGIN.left + ((x - xMin) / xSpan) * plotW;
  const yPix = (ber: number) => {
    const clipped = Math.max(ber, floor);
    const t = (yMaxDecade - Math.log10(clipped)) / (yMaxDecade - yMinDecade);
    return MARGIN.top + t * plotH;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  if (!options.deterministic) {
    parts.push(`<!-- generated ${new Date().toISOString()} -->`);
  }
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  const title = options.title ?? `coded BER vs transmit power (rho=${curves[0].rho})`;
  parts.push(
    `<text x="${width / 2}" y="20" text-anchor="middle" font-size="14">${title}</text>`,
  );

  // decade gridlines and tick labels
  for (let d = yMaxDecade; d >= yMinDecade; d--) {
    const y = yPix(10 ** d);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${MARGIN.left + plotW}" y2="${fmt(y)}" ` +
        `stroke="#dddddd" stroke-width="1"/>`,
      `<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" text-anchor="end" font-size="11">` +
        `1e${d}</text>`,
    );
  }
  // x ticks: the union of grid powers, thinned to at most 12 labels
  const uniqueXs = [...new Set(xs)].sort((a, b) => a - b);
  const step = Math.ceil(uniqueXs.length / 12);
  uniqueXs
    .filter((_, i) => i % step === 0)
    .forEach((x) => {
      const px = xPix(x);
      parts.push(
        `<line x1="${fmt(px)}" y1="${MARGIN.top + plotH}" x2="${fmt(px)}" ` +
          `y2="${MARGIN.top + plotH + 5}" stroke="#333333"/>`,
        `<text x="${fmt(px)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" ` +
          `font-size="11">${x}</text>`,
      );
    });
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#333333"/>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 12}" text-anchor="middle" ` +
      `font-size="12">transmit power (dB)</text>`,
    `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="12" ` +
      `transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">coded BER</text>`,
  );

  curves.forEach((curve, ci) => {
    const color = PALETTE[ci % PALETTE.length];
    const pts = curve.rows.map((r) => `${fmt(xPix(r.ptxDb))},${fmt(yPix(r.ber))}`);
    parts.push(
      `<polyline points="${pts.join(' ')}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
    for (const row of curve.rows) {
      const cx = fmt(xPix(row.ptxDb));
      const cy = yPix(row.ber);
      if (row.ber < floor) {
        // clipped to the floor: open downward triangle marks "below axis"
        const size = 5;
        parts.push(
          `<path class="floored" d="M ${fmt(xPix(row.ptxDb) - size)} ${fmt(cy - size)} ` +
            `L ${fmt(xPix(row.ptxDb) + size)} ${fmt(cy - size)} L ${cx} ${fmt(cy + size)} Z" ` +
            `fill="white" stroke="${color}" stroke-width="1.5"/>`,
        );
      } else {
        parts.push(
          `<circle class="point" cx="${cx}" cy="${fmt(cy)}" r="3.2" fill="${color}"/>`,
        );
      }
    }
  });

  // legend, top right of the plot area
  curves.forEach((curve, ci) => {
    const color = PALETTE[ci % PALETTE.length];
    const lx = MARGIN.left + plotW - 190;
    const ly = MARGIN.top + 16 + ci * 18;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 24}" y2="${ly - 4}" stroke="${color}" ` +
        `stroke-width="1.8"/>`,
      `<circle cx="${lx + 12}" cy="${ly - 4}" r="3.2" fill="${color}"/>`,
      `<text x="${lx + 30}" y="${ly}" font-size="12">${curveLabel(curve)}</text>`,
    );
  });
  if (curves.some((c) => c.rows.some((r) => r.ber < floor))) {
    parts.push(
      `<text x="${MARGIN.left + 8}" y="${MARGIN.top + plotH - 8}" font-size="10" ` +
        `fill="#555555">open triangles: BER below the plot floor ${floor}</text>`,
    );
  }
  parts.push('</svg>');
  return parts.join('\n') + '\n';
}
