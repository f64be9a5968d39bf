/** Spline and viewport math, kept formula-identical to the CLI renderer. */

export type Point = [number, number];

export interface BezierSegment {
  p0: Point;
  c1: Point;
  c2: Point;
  p1: Point;
}

/**
 * Catmull-Rom spline through all points as cubic Bezier segments.
 * Endpoints are clamped by repeating the first and last point; tension 0.5
 * is the classic spline, tension 0 collapses onto the polyline.
 */
export function smoothPath(points: Point[], tension = 0.5): BezierSegment[] {
  if (points.length < 2) {
    throw new Error("need at least two points");
  }
  const k = 2 * tension;
  const ext = [points[0], ...points, points[points.length - 1]];
  const segments: BezierSegment[] = [];
  for (let i = 0; i < points.length - 1; i++) {
    const p0 = ext[i];
    const p1 = ext[i + 1];
    const p2 = ext[i + 2];
    const p3 = ext[i + 3];
    segments.push({
      p0: p1,
      c1: [p1[0] + ((p2[0] - p0[0]) / 6) * k, p1[1] + ((p2[1] - p0[1]) / 6) * k],
      c2: [p2[0] - ((p3[0] - p1[0]) / 6) * k, p2[1] - ((p3[1] - p1[1]) / 6) * k],
      p1: p2,
    });
  }
  return segments;
}

export function pathD(segments: BezierSegment[], digits = 4): string {
  const f = (v: number) => v.toFixed(digits);
  const parts = [`M ${f(segments[0].p0[0])} ${f(segments[0].p0[1])}`];
  for (const s of segments) {
    parts.push(
      `C ${f(s.c1[0])} ${f(s.c1[1])}, ${f(s.c2[0])} ${f(s.c2[1])}, ${f(s.p1[0])} ${f(s.p1[1])}`,
    );
  }
  return parts.join(" ");
}

/** Map embedding coordinates into pixel space with a 5% margin (y flipped). */
export function fitViewport(
  points: Point[],
  width: number,
  height: number,
  marginFraction = 0.05,
): (p: Point) => Point {
  const xs = points.map((p) => p[0]);
  const ys = points.map((p) => p[1]);
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  const y0 = Math.min(...ys);
  const y1 = Math.max(...ys);
  const usableW = width * (1 - 2 * marginFraction);
  const usableH = height * (1 - 2 * marginFraction);
  const extent = Math.max(x1 - x0, y1 - y0);
  const scale = extent === 0 ? 1 : Math.min(usableW, usableH) / extent;
  const cx = (x0 + x1) / 2;
  const cy = (y0 + y1) / 2;
  return (p: Point): Point => [
    width / 2 + (p[0] - cx) * scale,
    height / 2 - (p[1] - cy) * scale,
  ];
}

export function pointRadiusFor(recordCount: number, base: number): number {
  return base * (1 + Math.log(recordCount + 1) / 3);
}
