import { FULL_SCALE_VOLTS } from "./types.js";

/** The few 2D-context operations the strip chart uses (mockable in tests). */
export interface StripChartContext {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
}

export interface StripChartOptions {
  width: number;
  height: number;
  color: string;
  capacity: number; // ring capacity; fixes the x scale so traces scroll
}

// The y axis is pinned to the instrument's physical input range so traces
// are visually comparable across time and channels.
export const Y_MIN_VOLTS = 0;
export const Y_MAX_VOLTS = FULL_SCALE_VOLTS;

export function voltsToY(v: number, height: number): number {
  const clamped = Math.min(Math.max(v, Y_MIN_VOLTS), Y_MAX_VOLTS);
  return height - (clamped / (Y_MAX_VOLTS - Y_MIN_VOLTS)) * height;
}

/** Draw one channel's trace, oldest to newest, right-aligned. */
export function drawStripChart(
  ctx: StripChartContext,
  values: number[],
  opts: StripChartOptions
): void {
  ctx.clearRect(0, 0, opts.width, opts.height);
  if (values.length === 0) return;
  const step = opts.width / Math.max(opts.capacity - 1, 1);
  const x0 = opts.width - (values.length - 1) * step;
  ctx.strokeStyle = opts.color;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  values.forEach((v, i) => {
    const x = x0 + i * step;
    const y = voltsToY(v, opts.height);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
}
