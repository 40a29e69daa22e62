//! Signed count of cross-tangents: ordered pairs `(s, t)` where the forward
//! tangent ray at `γ(s)` passes through `γ(t)`.
//!
//! With `(u, v)` an oriented frame of the normal plane at `s`, cross-tangents
//! are the zeros of `F(s,t) = (Φ·u, Φ·v)` with `Φ·t̂(s) > 0`. Zeros are
//! bracketed by the winding number of `F` around each grid cell (which is
//! also their summed local degree) and then located by Newton's method.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::framing::{frenet_framing, projection_framing, Framing};
use crate::geometry::{Curve, Vec3};

const GRID_OFFSETS: [f64; 8] = [0.0, 0.5, 0.25, 0.75, 0.125, 0.375, 0.625, 0.875];
/// Cells this close to the diagonal (in grid steps) are skipped: `F → 0`
/// along the whole diagonal.
const DIAGONAL_BAND: usize = 2;
const NODE_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossTangent {
    pub s: f64,
    pub t: f64,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossTangentCount {
    /// Sum of local degrees over forward cross-tangents.
    pub count: i64,
    pub zeros: Vec<CrossTangent>,
    /// `false` when some bracketed zero could not be isolated by Newton's
    /// method or had a degenerate Jacobian.
    pub reliable: bool,
    pub n_grid: usize,
    pub grid_offset: f64,
}

fn normal_plane_framing(curve: &Curve) -> Result<Framing> {
    if let Ok(f) = frenet_framing(curve) {
        return Ok(f);
    }
    for d in [Vec3::z(), Vec3::x(), Vec3::y(), Vec3::new(0.3, 0.5, 0.8)] {
        if let Ok(f) = projection_framing(curve, d) {
            return Ok(f);
        }
    }
    Err(Error::InvalidFraming("no smooth normal-plane frame found for the cross-tangent scan".into()))
}

/// `(F, Φ·t̂(s))`.
fn reduced(curve: &Curve, framing: &Framing, s: f64, t: f64) -> ([f64; 2], f64) {
    let phi = (curve.eval(t) - curve.eval(s)).normalize();
    let fr = framing.frame(s);
    ([phi.dot(&fr.e2), phi.dot(&fr.e3)], phi.dot(&fr.e1))
}

fn wrap(a: f64) -> f64 {
    let w = (a + TAU / 2.0).rem_euclid(TAU) - TAU / 2.0;
    if w == -TAU / 2.0 { TAU / 2.0 } else { w }
}

fn cyclic_distance(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

/// Counts forward cross-tangents on an `n_grid × n_grid` parameter grid.
pub fn cross_tangent_count(curve: &Curve, n_grid: usize) -> Result<CrossTangentCount> {
    if n_grid < 256 {
        return Err(Error::InvalidConfig(format!("cross-tangent grid must be >= 256, got {n_grid}")));
    }
    let framing = normal_plane_framing(curve)?;
    for &offset in &GRID_OFFSETS {
        if let Some(result) = scan(curve, &framing, n_grid, offset) {
            return Ok(result);
        }
    }
    Err(Error::ZeroOnGridLine { attempts: GRID_OFFSETS.len() })
}

fn scan(curve: &Curve, framing: &Framing, n: usize, offset: f64) -> Option<CrossTangentCount> {
    let h = 1.0 / n as f64;
    let param = |i: usize| (i as f64 + offset) * h;
    let pos: Vec<Vec3> = (0..n).map(|i| curve.eval(param(i))).collect();
    let frames: Vec<_> = (0..n).map(|i| framing.frame(param(i))).collect();

    // Node values of F; `None` on the excluded diagonal.
    let nodes: Vec<Vec<Option<[f64; 2]>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if cyclic_distance(i, j, n) == 0 {
                        return None;
                    }
                    let phi = (pos[j] - pos[i]).normalize();
                    Some([phi.dot(&frames[i].e2), phi.dot(&frames[i].e3)])
                })
                .collect()
        })
        .collect();
    let on_grid_line = nodes
        .iter()
        .enumerate()
        .any(|(i, row)| row.iter().enumerate().any(|(j, f)| {
            cyclic_distance(i, j, n) > DIAGONAL_BAND && f.is_some_and(|f| f[0].hypot(f[1]) < NODE_ZERO)
        }));
    if on_grid_line {
        return None;
    }

    let mut count = 0;
    let mut zeros = Vec::new();
    let mut reliable = true;
    for i in 0..n {
        for j in 0..n {
            let i1 = (i + 1) % n;
            let j1 = (j + 1) % n;
            let corners = [(i, j), (i1, j), (i1, j1), (i, j1)];
            if corners.iter().any(|&(a, b)| cyclic_distance(a, b, n) <= DIAGONAL_BAND) {
                continue;
            }
            let angles: Vec<f64> = corners
                .iter()
                .map(|&(a, b)| {
                    let f = nodes[a][b].expect("off-diagonal node");
                    f[1].atan2(f[0])
                })
                .collect();
            let turn: f64 = (0..4).map(|k| wrap(angles[(k + 1) % 4] - angles[k])).sum();
            let winding = (turn / TAU).round() as i64;
            if winding == 0 {
                continue;
            }
            let center = (param(i) + h / 2.0, param(j) + h / 2.0);
            let (s, t, isolated) = match newton(curve, framing, center, h) {
                Some((s, t, det)) => (s, t, det.abs() > 1e-12 && winding.abs() == 1 && det.signum() as i64 == winding),
                None => (center.0, center.1, false),
            };
            let (_, forward) = reduced(curve, framing, s, t);
            if forward <= 0.0 {
                continue;
            }
            reliable &= isolated;
            count += winding;
            zeros.push(CrossTangent { s: s.rem_euclid(1.0), t: t.rem_euclid(1.0), sign: winding.signum() as i8 });
        }
    }
    Some(CrossTangentCount { count, zeros, reliable, n_grid: n, grid_offset: offset })
}

/// Newton's method on `F` with a central-difference Jacobian. Returns the
/// zero and `det JF` when it converges within two cells of `start`.
fn newton(curve: &Curve, framing: &Framing, start: (f64, f64), cell: f64) -> Option<(f64, f64, f64)> {
    let (mut s, mut t) = start;
    let step = 1e-7;
    for _ in 0..40 {
        let (f, _) = reduced(curve, framing, s, t);
        let ds = {
            let (a, _) = reduced(curve, framing, s + step, t);
            let (b, _) = reduced(curve, framing, s - step, t);
            [(a[0] - b[0]) / (2.0 * step), (a[1] - b[1]) / (2.0 * step)]
        };
        let dt = {
            let (a, _) = reduced(curve, framing, s, t + step);
            let (b, _) = reduced(curve, framing, s, t - step);
            [(a[0] - b[0]) / (2.0 * step), (a[1] - b[1]) / (2.0 * step)]
        };
        let det = ds[0] * dt[1] - dt[0] * ds[1];
        if f[0].hypot(f[1]) < 1e-13 {
            return Some((s, t, det));
        }
        if det == 0.0 {
            return None;
        }
        let delta_s = (f[0] * dt[1] - f[1] * dt[0]) / det;
        let delta_t = (ds[0] * f[1] - ds[1] * f[0]) / det;
        s -= delta_s;
        t -= delta_t;
        if (s - start.0).abs() > 2.0 * cell || (t - start.1).abs() > 2.0 * cell {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_has_no_cross_tangents() {
        let c = Curve::circle(1.0).unwrap();
        let r = cross_tangent_count(&c, 256).unwrap();
        assert_eq!(r.count, 0);
        assert!(r.zeros.is_empty());
    }

    #[test]
    fn trefoil_count_is_grid_stable() {
        let k = Curve::torus_knot(2, 3, 2.0, 0.5).unwrap();
        let a = cross_tangent_count(&k, 256).unwrap();
        let b = cross_tangent_count(&k, 512).unwrap();
        assert!(a.reliable && b.reliable);
        assert_eq!(a.count, b.count);
        assert_eq!(a.zeros.len(), b.zeros.len());
    }

    #[test]
    fn wrap_is_principal() {
        assert!((wrap(3.0 * TAU / 4.0) + TAU / 4.0).abs() < 1e-15);
        assert!((wrap(-3.0 * TAU / 4.0) - TAU / 4.0).abs() < 1e-15);
    }
}
