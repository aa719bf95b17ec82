// Pure transforms from API buckets to chart series, plus the chart seam.
// Keeping Chart.js behind a factory lets tests record what would render.

import type { BucketRow, SensorStats } from "./types.js";

export interface SeriesPoint {
  x: string; // bucket start, ISO-8601
  y: number; // the sensor's aggregate for that bucket
}

export interface ChartHandle {
  destroy(): void;
}

export type ChartFactory = (
  canvas: HTMLCanvasElement,
  sensor: string,
  unit: string,
  points: SeriesPoint[],
) => ChartHandle;

/** One series per sensor; empty buckets become gaps, never zeros. */
export function bucketsToSeries(buckets: BucketRow[], sensor: string): SeriesPoint[] {
  const points: SeriesPoint[] = [];
  for (const bucket of buckets) {
    const stats = bucket.sensors[sensor];
    if (stats) {
      points.push({ x: bucket.bucket_start, y: stats.aggregate });
    }
  }
  return points;
}

/** Whole-range min/max/mean for the single-sensor summary panel. The
 * numbers come from a one-bucket server query, not client math. */
export function summaryStats(
  wholeRange: BucketRow[],
  sensor: string,
): SensorStats | null {
  if (wholeRange.length !== 1) return null;
  return wholeRange[0].sensors[sensor] ?? null;
}

/** Interval choices never undercut the node's record interval. */
export function intervalChoices(recordIntervalS: number): { label: string; seconds: number }[] {
  const all = [
    { label: "1 minute", seconds: 60 },
    { label: "10 minutes", seconds: 600 },
    { label: "30 minutes", seconds: 1800 },
    { label: "1 hour", seconds: 3600 },
    { label: "6 hours", seconds: 21600 },
    { label: "1 day", seconds: 86400 },
  ];
  const allowed = all.filter((choice) => choice.seconds >= recordIntervalS);
  if (allowed.length && allowed[0].seconds !== recordIntervalS) {
    // always offer the native resolution itself
    allowed.unshift({ label: `${recordIntervalS} s (native)`, seconds: recordIntervalS });
  }
  return allowed.length
    ? allowed
    : [{ label: `${recordIntervalS} s (native)`, seconds: recordIntervalS }];
}
