/**
 * Orbit camera state in the server's own parameterization.
 *
 * alpha is the angle from +Y in [0, pi], beta the azimuth in [0, 2*pi),
 * r the distance as a multiple of the scene's bounding-sphere radius,
 * target the look-at point. Keeping the explorer's state in exactly these
 * four fields means anchoring a comment is a plain copy, with nothing to
 * lose in a conversion.
 */

import type { ViewpointJson } from "./api.js";

export interface OrbitPose {
  alpha: number;
  beta: number;
  r: number;
  target: [number, number, number];
}

const TWO_PI = Math.PI * 2;
const MIN_R = 0.05;
const MAX_R = 20;
// Same pole cutoff the renderer uses to switch its up vector.
const POLE_COS = 0.999;

export const DEFAULT_POSE: OrbitPose = {
  alpha: Math.PI / 2,
  beta: 0.8,
  r: 3.0,
  target: [0, 0, 0],
};

export function wrapBeta(beta: number): number {
  let b = beta % TWO_PI;
  if (b < 0) b += TWO_PI;
  return b === TWO_PI ? 0 : b;
}

export function clampAlpha(alpha: number): number {
  return Math.min(Math.PI, Math.max(0, alpha));
}

export function rotate(pose: OrbitPose, dx: number, dy: number, radiansPerUnit = 0.01): OrbitPose {
  return {
    ...pose,
    alpha: clampAlpha(pose.alpha - dy * radiansPerUnit),
    beta: wrapBeta(pose.beta + dx * radiansPerUnit),
    target: [...pose.target],
  };
}

export function zoom(pose: OrbitPose, factor: number): OrbitPose {
  return {
    ...pose,
    r: Math.min(MAX_R, Math.max(MIN_R, pose.r * factor)),
    target: [...pose.target],
  };
}

/** Move the target in the camera's screen plane (drag right/down in units of r). */
export function pan(pose: OrbitPose, dx: number, dy: number, unitsPerPixel = 0.002): OrbitPose {
  const sa = Math.sin(pose.alpha);
  const ca = Math.cos(pose.alpha);
  // Eye offset direction, as the renderer computes it.
  const d: [number, number, number] = [sa * Math.cos(pose.beta), ca, sa * Math.sin(pose.beta)];
  const f: [number, number, number] = [-d[0], -d[1], -d[2]]; // view direction
  const up: [number, number, number] = Math.abs(ca) > POLE_COS ? [0, 0, 1] : [0, 1, 0];
  const s = normalize(cross(f, up));
  const u = cross(s, f);
  const step = pose.r * unitsPerPixel;
  return {
    ...pose,
    target: [
      pose.target[0] - (dx * s[0] - dy * u[0]) * step,
      pose.target[1] - (dx * s[1] - dy * u[1]) * step,
      pose.target[2] - (dx * s[2] - dy * u[2]) * step,
    ],
  };
}

function cross(a: [number, number, number], b: [number, number, number]): [number, number, number] {
  return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
}

function normalize(v: [number, number, number]): [number, number, number] {
  const n = Math.hypot(v[0], v[1], v[2]);
  return [v[0] / n, v[1] / n, v[2] / n];
}

export function toAnchor(pose: OrbitPose): ViewpointJson {
  return {
    alpha: pose.alpha,
    beta: pose.beta,
    r: pose.r,
    target: [...pose.target],
  };
}

export function fromAnchor(anchor: ViewpointJson): OrbitPose {
  return {
    alpha: clampAlpha(anchor.alpha),
    beta: wrapBeta(anchor.beta),
    r: anchor.r,
    target: [anchor.target[0], anchor.target[1], anchor.target[2]],
  };
}

/** Angular distance on the beta circle, so 0 and 2*pi - 1e-9 count as close. */
function betaDistance(a: number, b: number): number {
  const d = Math.abs(wrapBeta(a) - wrapBeta(b));
  return Math.min(d, TWO_PI - d);
}

export function posesAgree(a: OrbitPose, b: OrbitPose, tol = 1e-4): boolean {
  return (
    Math.abs(a.alpha - b.alpha) <= tol &&
    betaDistance(a.beta, b.beta) <= tol &&
    Math.abs(a.r - b.r) <= tol &&
    Math.abs(a.target[0] - b.target[0]) <= tol &&
    Math.abs(a.target[1] - b.target[1]) <= tol &&
    Math.abs(a.target[2] - b.target[2]) <= tol
  );
}

export function formatPose(pose: OrbitPose): string {
  const deg = (rad: number) => ((rad * 180) / Math.PI).toFixed(1);
  const t = pose.target.map((v) => v.toFixed(2)).join(", ");
  return `α ${deg(pose.alpha)}°  β ${deg(pose.beta)}°  r ${pose.r.toFixed(2)}  → (${t})`;
}
