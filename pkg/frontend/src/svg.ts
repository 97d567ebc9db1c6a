/** Minimal hand-rolled SVG chart primitives: one <svg> string, no deps. */

export interface Extent {
  min: number;
  max: number;
}

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { left: 64, right: 24, top: 40, bottom: 48 };

export function extent(values: number[]): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (!(min < max)) {
    min -= 0.5;
    max += 0.5;
  }
  return { min, max };
}

export function pad(e: Extent, frac = 0.05): Extent {
  const span = e.max - e.min;
  return { min: e.min - frac * span, max: e.max + frac * span };
}

export class Scale {
  constructor(
    readonly domain: Extent,
    readonly range: [number, number],
  ) {}

  map(v: number): number {
    const t = (v - this.domain.min) / (this.domain.max - this.domain.min);
    return this.range[0] + t * (this.range[1] - this.range[0]);
  }

  ticks(count = 5): number[] {
    const span = this.domain.max - this.domain.min;
    const step = niceStep(span / count);
    const start = Math.ceil(this.domain.min / step) * step;
    const out: number[] = [];
    for (let v = start; v <= this.domain.max + 1e-12; v += step) {
      out.push(Number(v.toPrecision(12)));
    }
    return out;
  }
}

function niceStep(raw: number): number {
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  const unit = raw / power;
  if (unit <= 1) return power;
  if (unit <= 2) return 2 * power;
  if (unit <= 5) return 5 * power;
  return 10 * power;
}

export function xScale(domain: Extent): Scale {
  return new Scale(domain, [MARGIN.left, WIDTH - MARGIN.right]);
}

export function yScale(domain: Extent): Scale {
  return new Scale(domain, [HEIGHT - MARGIN.bottom, MARGIN.top]);
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmt(v: number): string {
  return Number(v.toPrecision(6)).toString();
}

export class Chart {
  private parts: string[] = [];

  constructor(
    readonly sx: Scale,
    readonly sy: Scale,
    title: string,
    xLabel: string,
    yLabel: string,
  ) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15">${escapeXml(title)}</text>`,
    );
    this.axes(xLabel, yLabel);
  }

  private axes(xLabel: string, yLabel: string): void {
    const x0 = MARGIN.left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;
    this.parts.push(
      `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`,
      `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`,
    );
    for (const tick of this.sx.ticks()) {
      const px = this.sx.map(tick);
      this.parts.push(
        `<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 5}" stroke="black"/>`,
        `<text x="${fmt(px)}" y="${y0 + 18}" text-anchor="middle" font-size="11">${fmt(tick)}</text>`,
      );
    }
    for (const tick of this.sy.ticks()) {
      const py = this.sy.map(tick);
      this.parts.push(
        `<line x1="${x0 - 5}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="black"/>`,
        `<text x="${x0 - 8}" y="${fmt(py + 4)}" text-anchor="end" font-size="11">${fmt(tick)}</text>`,
      );
    }
    this.parts.push(
      `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 10}" text-anchor="middle" font-size="12">${escapeXml(xLabel)}</text>`,
      `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 16 ${(y0 + y1) / 2})">${escapeXml(yLabel)}</text>`,
    );
  }

  polyline(
    xs: number[],
    ys: number[],
    color: string,
    options: { width?: number; dash?: string; cssClass?: string } = {},
  ): void {
    const pts = xs
      .map((x, i) => `${fmt(this.sx.map(x))},${fmt(this.sy.map(ys[i]))}`)
      .join(" ");
    const dash = options.dash ? ` stroke-dasharray="${options.dash}"` : "";
    const cls = options.cssClass ? ` class="${options.cssClass}"` : "";
    this.parts.push(
      `<polyline${cls} points="${pts}" fill="none" stroke="${color}" stroke-width="${options.width ?? 1.6}"${dash}/>`,
    );
  }

  scatter(xs: number[], ys: number[], color: string, r = 2.4): void {
    for (let i = 0; i < xs.length; i++) {
      this.parts.push(
        `<circle class="scatter" cx="${fmt(this.sx.map(xs[i]))}" cy="${fmt(this.sy.map(ys[i]))}" r="${r}" fill="${color}" fill-opacity="0.55"/>`,
      );
    }
  }

  circle(x: number, y: number, radiusDataUnits: number, color: string): void {
    const rx = Math.abs(this.sx.map(x + radiusDataUnits) - this.sx.map(x));
    const ry = Math.abs(this.sy.map(y + radiusDataUnits) - this.sy.map(y));
    this.parts.push(
      `<ellipse cx="${fmt(this.sx.map(x))}" cy="${fmt(this.sy.map(y))}" rx="${fmt(rx)}" ry="${fmt(ry)}" fill="${color}" fill-opacity="0.35" stroke="${color}"/>`,
    );
  }

  marker(x: number, y: number, color: string, label: string): void {
    const px = this.sx.map(x);
    const py = this.sy.map(y);
    this.parts.push(
      `<circle cx="${fmt(px)}" cy="${fmt(py)}" r="4" fill="${color}"/>`,
      `<text x="${fmt(px + 6)}" y="${fmt(py - 6)}" font-size="11">${escapeXml(label)}</text>`,
    );
  }

  legend(entries: { label: string; color: string; dash?: string }[]): void {
    const x = MARGIN.left + 10;
    let y = MARGIN.top + 8;
    for (const entry of entries) {
      const dash = entry.dash ? ` stroke-dasharray="${entry.dash}"` : "";
      this.parts.push(
        `<line x1="${x}" y1="${y}" x2="${x + 22}" y2="${y}" stroke="${entry.color}" stroke-width="2"${dash}/>`,
        `<text class="legend" x="${x + 28}" y="${y + 4}" font-size="11">${escapeXml(entry.label)}</text>`,
      );
      y += 16;
    }
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}
