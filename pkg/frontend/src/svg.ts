/** Hand-rolled SVG chart builder: linear/log axes, polyline series, overlay
 * rectangles and markers. Output is deterministic (fixed precision). */

export interface Series {
  x: number[];
  y: number[];
  color: string;
  label?: string;
  width?: number;
  dash?: string;
  markers?: boolean;
}

export interface RectOverlay {
  xs: number[];
  ys: number[];
  fill: string;
  stroke: string;
}

export interface PointMarker {
  x: number;
  y: number;
  color: string;
  label?: string;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  logY?: boolean;
  rects?: RectOverlay[];
  points?: PointMarker[];
  width?: number;
  height?: number;
  equalAspect?: boolean;
}

const M = { top: 34, right: 16, bottom: 42, left: 62 };

function fmt(v: number): string {
  return v.toFixed(2);
}

function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0);
  return String(Math.round(v * 1e6) / 1e6);
}

function niceTicks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= n) ?? 10 * mag;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) ticks.push(v);
  return ticks;
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  const a = Math.ceil(lo);
  const b = Math.floor(hi);
  const stride = Math.max(1, Math.ceil((b - a) / 8));
  for (let e = a; e <= b; e += stride) ticks.push(e);
  return ticks.length ? ticks : [Math.floor(lo)];
}

export function renderChart(opts: ChartOptions): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 420;
  const plotW = width - M.left - M.right;
  const plotH = height - M.top - M.bottom;

  const xsAll: number[] = [];
  const ysAll: number[] = [];
  for (const s of opts.series) {
    for (let i = 0; i < s.x.length; i++) {
      const y = s.y[i];
      if (opts.logY && !(y > 0)) continue;
      xsAll.push(s.x[i]);
      ysAll.push(opts.logY ? Math.log10(y) : y);
    }
  }
  for (const r of opts.rects ?? []) {
    xsAll.push(...r.xs);
    ysAll.push(...(opts.logY ? r.ys.filter((v) => v > 0).map(Math.log10) : r.ys));
  }
  for (const p of opts.points ?? []) {
    xsAll.push(p.x);
    ysAll.push(opts.logY ? Math.log10(Math.max(p.y, 1e-300)) : p.y);
  }

  let x0 = Math.min(...(xsAll.length ? xsAll : [0]));
  let x1 = Math.max(...(xsAll.length ? xsAll : [1]));
  let y0 = Math.min(...(ysAll.length ? ysAll : [0]));
  let y1 = Math.max(...(ysAll.length ? ysAll : [1]));
  if (x0 === x1) { x0 -= 1; x1 += 1; }
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  if (opts.equalAspect) {
    const xc = (x0 + x1) / 2;
    const yc = (y0 + y1) / 2;
    const half = Math.max((x1 - x0) / 2, ((y1 - y0) / 2) * (plotW / plotH));
    x0 = xc - half; x1 = xc + half;
    const halfY = half * (plotH / plotW);
    y0 = yc - halfY; y1 = yc + halfY;
  } else {
    const padX = 0.04 * (x1 - x0);
    const padY = 0.06 * (y1 - y0);
    x0 -= padX; x1 += padX; y0 -= padY; y1 += padY;
  }

  const sx = (v: number) => M.left + ((v - x0) / (x1 - x0)) * plotW;
  const sy = (v: number) => M.top + plotH - ((v - y0) / (y1 - y0)) * plotH;
  const syData = (v: number) => sy(opts.logY ? Math.log10(v) : v);

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(`<text x="${width / 2}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">${opts.title}</text>`);

  const xticks = niceTicks(x0, x1);
  const yticks = opts.logY ? decadeTicks(y0, y1) : niceTicks(y0, y1);
  for (const t of xticks) {
    const px = sx(t);
    parts.push(`<line x1="${fmt(px)}" y1="${M.top}" x2="${fmt(px)}" y2="${M.top + plotH}" stroke="#e0e0e0"/>`);
    parts.push(`<text x="${fmt(px)}" y="${M.top + plotH + 16}" text-anchor="middle" font-family="sans-serif" font-size="10">${tickLabel(t)}</text>`);
  }
  for (const t of yticks) {
    const py = sy(t);
    const label = opts.logY ? `1e${t}` : tickLabel(t);
    parts.push(`<line x1="${M.left}" y1="${fmt(py)}" x2="${M.left + plotW}" y2="${fmt(py)}" stroke="#e0e0e0"/>`);
    parts.push(`<text x="${M.left - 6}" y="${fmt(py + 3)}" text-anchor="end" font-family="sans-serif" font-size="10">${label}</text>`);
  }
  parts.push(`<rect x="${M.left}" y="${M.top}" width="${plotW}" height="${plotH}" fill="none" stroke="black"/>`);
  parts.push(`<text x="${M.left + plotW / 2}" y="${height - 8}" text-anchor="middle" font-family="sans-serif" font-size="12">${opts.xLabel}</text>`);
  parts.push(`<text x="16" y="${M.top + plotH / 2}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 ${M.top + plotH / 2})">${opts.yLabel}</text>`);

  for (const r of opts.rects ?? []) {
    const pts = r.xs.map((x, i) => `${fmt(sx(x))},${fmt(syData(r.ys[i]))}`).join(" ");
    parts.push(`<polygon points="${pts}" fill="${r.fill}" stroke="${r.stroke}"/>`);
  }

  for (const s of opts.series) {
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      if (opts.logY && !(s.y[i] > 0)) continue;
      pts.push(`${fmt(sx(s.x[i]))},${fmt(syData(s.y[i]))}`);
    }
    if (pts.length === 0) continue;
    parts.push(`<polyline points="${pts.join(" ")}" fill="none" stroke="${s.color}" stroke-width="${s.width ?? 1.5}"${s.dash ? ` stroke-dasharray="${s.dash}"` : ""}/>`);
    if (s.markers) {
      for (const p of pts) {
        const [px, py] = p.split(",");
        parts.push(`<circle cx="${px}" cy="${py}" r="2.4" fill="${s.color}"/>`);
      }
    }
  }

  for (const p of opts.points ?? []) {
    parts.push(`<circle cx="${fmt(sx(p.x))}" cy="${fmt(syData(p.y))}" r="4" fill="${p.color}" stroke="black"/>`);
    if (p.label) {
      parts.push(`<text x="${fmt(sx(p.x) + 7)}" y="${fmt(syData(p.y) - 6)}" font-family="sans-serif" font-size="10">${p.label}</text>`);
    }
  }

  const legendEntries = opts.series.filter((s) => s.label);
  legendEntries.forEach((s, i) => {
    const ly = M.top + 14 + 15 * i;
    const lx = M.left + plotW - 150;
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${s.color}" stroke-width="2"${s.dash ? ` stroke-dasharray="${s.dash}"` : ""}/>`);
    parts.push(`<text x="${lx + 27}" y="${ly}" font-family="sans-serif" font-size="10">${s.label}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n");
}

/** Stack several charts vertically into one SVG document. */
export function stackCharts(charts: string[], width = 640): string {
  let yOffset = 0;
  const inner: string[] = [];
  let total = 0;
  for (const chart of charts) {
    const hMatch = chart.match(/height="(\d+)"/);
    const h = hMatch ? Number(hMatch[1]) : 420;
    const body = chart
      .replace(/^<svg[^>]*>/, `<g transform="translate(0 ${yOffset})">`)
      .replace(/<\/svg>$/, "</g>");
    inner.push(body);
    yOffset += h;
    total += h;
  }
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${total}" viewBox="0 0 ${width} ${total}">`,
    ...inner,
    "</svg>",
  ].join("\n");
}
