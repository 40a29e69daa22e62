//! Planar knot diagrams: signed crossings of generic projections.
//!
//! Crossings are found on polylines and then refined on the exact curves, so
//! the integers produced here do not depend on the sampling resolution once
//! it resolves the diagram.

mod cross_tangent;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Curve, Vec3};

pub use cross_tangent::{cross_tangent_count, CrossTangent, CrossTangentCount};

/// Number of projection directions tried before giving up.
pub const RETRY_ATTEMPTS: usize = 32;
/// Minimum height separation at a crossing, relative to the curve diameter.
pub const HEIGHT_SEPARATION: f64 = 1e-6;
/// Minimum sine of the angle between the projected tangents at a crossing.
pub const TANGENT_ANGLE_FLOOR: f64 = 1e-9;
/// Crossings closer than this (in polyline segment parameter) to a vertex are
/// rejected.
pub const VERTEX_MARGIN: f64 = 1e-9;

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
const REFINE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Strand {
    pub points: Vec<[f64; 2]>,
    pub heights: Vec<f64>,
}

/// A crossing between the point at parameter `s` on strand `strands.0` and
/// the point at parameter `t` on strand `strands.1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub strands: (usize, usize),
    pub s: f64,
    pub t: f64,
    pub sign: i8,
    /// `0` when the `s` point passes over, `1` when the `t` point does.
    pub over: u8,
}

impl Crossing {
    pub fn is_self(&self) -> bool {
        self.strands.0 == self.strands.1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagram {
    /// Unit projection axis actually used (after any genericity retries).
    pub direction: Vec3,
    /// Directions tried, the last one being `direction`.
    pub attempted: Vec<Vec3>,
    pub strands: Vec<Strand>,
    pub crossings: Vec<Crossing>,
    curves: Vec<Curve>,
}

impl Diagram {
    /// Signed count of self-crossings.
    pub fn writhe(&self) -> i64 {
        self.crossings.iter().filter(|c| c.is_self()).map(|c| c.sign as i64).sum()
    }

    /// Signed count of crossings between different strands.
    pub fn inter_strand_sum(&self) -> i64 {
        self.crossings.iter().filter(|c| !c.is_self()).map(|c| c.sign as i64).sum()
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }
}

/// Orthonormal `(a, b)` spanning the plane normal to `d`, with `a × b = d`.
fn plane_basis(d: &Vec3) -> (Vec3, Vec3) {
    let helper = if d.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let a = (helper - d * helper.dot(d)).normalize();
    (a, d.cross(&a))
}

/// Deterministic retry schedule: small tilts at golden-angle azimuths.
fn perturbed_direction(d: &Vec3, attempt: usize) -> Vec3 {
    if attempt == 0 {
        return *d;
    }
    let (a, b) = plane_basis(d);
    let tilt = 1e-3 * attempt as f64;
    let phi = GOLDEN_ANGLE * attempt as f64;
    (d * tilt.cos() + (a * phi.cos() + b * phi.sin()) * tilt.sin()).normalize()
}

pub(crate) fn unit_direction(direction: Vec3) -> Result<Vec3> {
    let norm = direction.norm();
    if !(norm > 1e-12 && norm.is_finite()) {
        return Err(Error::InvalidConfig("projection direction must be a nonzero finite vector".into()));
    }
    Ok(direction / norm)
}

/// Projects one or two curves along `direction` and finds their crossings.
///
/// Non-generic directions are retried along a fixed schedule of small tilts.
pub fn project(curves: &[&Curve], direction: Vec3, n: usize) -> Result<Diagram> {
    if curves.is_empty() || curves.len() > 2 {
        return Err(Error::InvalidConfig("a diagram holds one or two curves".into()));
    }
    if n < 256 {
        return Err(Error::InvalidConfig(format!("diagram resolution must be >= 256, got {n}")));
    }
    let d = unit_direction(direction)?;
    let diameter = curves.iter().map(|c| c.diameter()).fold(0.0, f64::max);
    let mut attempted = Vec::new();
    for attempt in 0..RETRY_ATTEMPTS {
        let dir = perturbed_direction(&d, attempt);
        attempted.push(dir);
        if let Some(mut diagram) = try_project(curves, dir, n, diameter) {
            diagram.attempted = attempted;
            return Ok(diagram);
        }
    }
    Err(Error::NonGenericDirection { attempted: attempted.iter().map(|v| [v.x, v.y, v.z]).collect() })
}

struct Projected {
    xy: Vec<[f64; 2]>,
}

fn segment_intersection(p: [f64; 2], q: [f64; 2], r: [f64; 2], s: [f64; 2]) -> Option<(f64, f64)> {
    let e = [q[0] - p[0], q[1] - p[1]];
    let f = [s[0] - r[0], s[1] - r[1]];
    let denom = e[0] * f[1] - e[1] * f[0];
    if denom == 0.0 {
        return None;
    }
    let g = [r[0] - p[0], r[1] - p[1]];
    let u = (g[0] * f[1] - g[1] * f[0]) / denom;
    let v = (g[0] * e[1] - g[1] * e[0]) / denom;
    let lo = -VERTEX_MARGIN;
    let hi = 1.0 + VERTEX_MARGIN;
    (u >= lo && u < hi && v >= lo && v < hi).then_some((u, v))
}

fn try_project(curves: &[&Curve], d: Vec3, n: usize, diameter: f64) -> Option<Diagram> {
    let (a, b) = plane_basis(&d);
    let mut strands = Vec::new();
    let mut projected = Vec::new();
    for c in curves {
        let pts = c.samples(n);
        let xy: Vec<[f64; 2]> = pts.iter().map(|p| [p.dot(&a), p.dot(&b)]).collect();
        strands.push(Strand { points: xy.clone(), heights: pts.iter().map(|p| p.dot(&d)).collect() });
        projected.push(Projected { xy });
    }

    let mut pairs = vec![(0, 0)];
    if curves.len() == 2 {
        pairs.extend([(0, 1), (1, 1)]);
    }
    let mut crossings = Vec::new();
    for (sa, sb) in pairs {
        let (pa, pb) = (&projected[sa], &projected[sb]);
        let hits: Vec<Option<Vec<(usize, usize, f64, f64)>>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let (p, q) = (pa.xy[i], pa.xy[(i + 1) % n]);
                let (xmin, xmax) = (p[0].min(q[0]), p[0].max(q[0]));
                let (ymin, ymax) = (p[1].min(q[1]), p[1].max(q[1]));
                let start = if sa == sb { i + 2 } else { 0 };
                let mut row = Vec::new();
                for j in start..n {
                    if sa == sb && i == 0 && j == n - 1 {
                        continue;
                    }
                    let (r, s) = (pb.xy[j], pb.xy[(j + 1) % n]);
                    if r[0].max(s[0]) < xmin || r[0].min(s[0]) > xmax || r[1].max(s[1]) < ymin || r[1].min(s[1]) > ymax {
                        continue;
                    }
                    if let Some((u, v)) = segment_intersection(p, q, r, s) {
                        let near_vertex = |x: f64| x.abs() <= VERTEX_MARGIN || (1.0 - x).abs() <= VERTEX_MARGIN;
                        if near_vertex(u) || near_vertex(v) {
                            return None;
                        }
                        row.push((i, j, u, v));
                    }
                }
                Some(row)
            })
            .collect();
        for row in hits {
            for (i, j, u, v) in row? {
                let s0 = (i as f64 + u) / n as f64;
                let t0 = (j as f64 + v) / n as f64;
                let (s, t) = refine(curves[sa], curves[sb], &a, &b, s0, t0, 2.0 / n as f64)?;
                let crossing = classify(curves[sa], curves[sb], (sa, sb), s, t, &d, diameter).ok()?;
                let duplicate = crossings.iter().any(|c: &Crossing| {
                    c.strands == crossing.strands && cyclic_gap(c.s, s) < 1e-7 && cyclic_gap(c.t, t) < 1e-7
                });
                if duplicate {
                    return None;
                }
                crossings.push(crossing);
            }
        }
    }
    Some(Diagram {
        direction: d,
        attempted: Vec::new(),
        strands,
        crossings,
        curves: curves.iter().map(|c| (*c).clone()).collect(),
    })
}

fn cyclic_gap(x: f64, y: f64) -> f64 {
    let g = (x - y).rem_euclid(1.0);
    g.min(1.0 - g)
}

/// Newton iteration for `P(γ₀(s)) = P(γ₁(t))` on the exact curves, where `P`
/// is the projection onto span(a, b). Fails if the iterate leaves a window of
/// `reach` around the polyline estimate.
fn refine(c0: &Curve, c1: &Curve, a: &Vec3, b: &Vec3, s0: f64, t0: f64, reach: f64) -> Option<(f64, f64)> {
    let (mut s, mut t) = (s0, t0);
    for _ in 0..50 {
        let j0 = c0.jet(s);
        let j1 = c1.jet(t);
        let diff = j0[0] - j1[0];
        let f = [diff.dot(a), diff.dot(b)];
        let m = [[j0[1].dot(a), -j1[1].dot(a)], [j0[1].dot(b), -j1[1].dot(b)]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det == 0.0 {
            return None;
        }
        let ds = (f[0] * m[1][1] - f[1] * m[0][1]) / det;
        let dt = (m[0][0] * f[1] - m[1][0] * f[0]) / det;
        s -= ds;
        t -= dt;
        if (s - s0).abs() > reach || (t - t0).abs() > reach {
            return None;
        }
        if ds.abs() < REFINE_TOLERANCE * 1e-3 && dt.abs() < REFINE_TOLERANCE * 1e-3 {
            return Some((s.rem_euclid(1.0), t.rem_euclid(1.0)));
        }
    }
    None
}

fn classify(c0: &Curve, c1: &Curve, strands: (usize, usize), s: f64, t: f64, d: &Vec3, diameter: f64) -> Result<Crossing> {
    let (x0, x1) = (c0.eval(s), c1.eval(t));
    let (h0, h1) = (x0.dot(d), x1.dot(d));
    if (h0 - h1).abs() <= HEIGHT_SEPARATION * diameter {
        return Err(Error::NonGenericDirection { attempted: vec![[d.x, d.y, d.z]] });
    }
    let over = if h0 > h1 { 0 } else { 1 };
    let sign = tangent_sign(c0.derivative(s, 1), c1.derivative(t, 1), over, d)?;
    Ok(Crossing { strands, s, t, sign, over })
}

/// Right-handed sign: positive when the over tangent turns counterclockwise
/// onto the under tangent, seen from the `+d` side.
fn tangent_sign(ts: Vec3, tt: Vec3, over: u8, d: &Vec3) -> Result<i8> {
    let (o, u) = if over == 0 { (ts, tt) } else { (tt, ts) };
    let o_perp = o - d * o.dot(d);
    let u_perp = u - d * u.dot(d);
    let c = o.cross(&u).dot(d);
    if c.abs() <= TANGENT_ANGLE_FLOOR * o_perp.norm() * u_perp.norm() {
        return Err(Error::DegenerateCrossing);
    }
    Ok(if c > 0.0 { 1 } else { -1 })
}

/// Sign of `crossing` recomputed from the exact tangents.
pub fn crossing_sign(diagram: &Diagram, crossing: &Crossing) -> Result<i8> {
    let c0 = &diagram.curves[crossing.strands.0];
    let c1 = &diagram.curves[crossing.strands.1];
    tangent_sign(c0.derivative(crossing.s, 1), c1.derivative(crossing.t, 1), crossing.over, &diagram.direction)
}

/// Signed self-crossing count of a single curve.
pub fn diagram_writhe(curve: &Curve, direction: Vec3, n: usize) -> Result<i64> {
    Ok(project(&[curve], direction, n)?.writhe())
}

/// Half the signed inter-strand crossing count.
pub fn combinatorial_linking(c0: &Curve, c1: &Curve, direction: Vec3, n: usize) -> Result<i64> {
    let diagram = project(&[c0, c1], direction, n)?;
    let sum = diagram.inter_strand_sum();
    if sum % 2 != 0 {
        return Err(Error::OddCrossingParity { sum });
    }
    Ok(sum / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle() -> Curve {
        Curve::circle(1.0).unwrap()
    }

    fn trefoil() -> Curve {
        Curve::torus_knot(2, 3, 2.0, 0.5).unwrap()
    }

    fn hopf_partner() -> Curve {
        circle()
            .transformed(*nalgebra::Rotation3::from_axis_angle(&Vec3::x_axis(), PI / 2.0).matrix())
            .translated(Vec3::new(1.0, 0.0, 0.0))
    }

    fn z() -> Vec3 {
        Vec3::z()
    }

    // Oracle: brute-force count of polyline crossings, no refinement.
    fn brute_force_crossings(c0: &Curve, c1: Option<&Curve>, d: Vec3, n: usize) -> usize {
        let (a, b) = plane_basis(&d);
        let proj = |c: &Curve| c.samples(n).iter().map(|p| [p.dot(&a), p.dot(&b)]).collect::<Vec<_>>();
        let p0 = proj(c0);
        let p1 = c1.map(proj);
        let mut count = 0;
        for i in 0..n {
            for j in 0..n {
                let seg0 = (p0[i], p0[(i + 1) % n]);
                let seg1 = match &p1 {
                    Some(p) => (p[j], p[(j + 1) % n]),
                    None => {
                        if j <= i + 1 || (i == 0 && j == n - 1) {
                            continue;
                        }
                        (p0[j], p0[(j + 1) % n])
                    }
                };
                if segment_intersection(seg0.0, seg0.1, seg1.0, seg1.1).is_some() {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn circle_has_no_crossings() {
        let d = project(&[&circle()], z(), 256).unwrap();
        assert!(d.crossings.is_empty());
        assert_eq!(diagram_writhe(&circle(), z(), 256).unwrap(), 0);
    }

    #[test]
    fn hopf_pair_crossings() {
        let (a, b) = (circle(), hopf_partner());
        // The partner projects edge-on along z, so the diagram tilts away.
        let d = project(&[&a, &b], z(), 512).unwrap();
        assert!(d.attempted.len() > 1);
        assert_eq!(brute_force_crossings(&a, Some(&b), d.direction, 512), 2);
        let inter: Vec<_> = d.crossings.iter().filter(|c| !c.is_self()).collect();
        assert_eq!(inter.len(), 2);
        assert_eq!(inter[0].sign, inter[1].sign);
        let lk = combinatorial_linking(&a, &b, z(), 512).unwrap();
        assert_eq!(lk.abs(), 1);
        assert_eq!(combinatorial_linking(&a, &b.reversed(), z(), 512).unwrap(), -lk);
        assert_eq!(combinatorial_linking(&a.reversed(), &b.reversed(), z(), 512).unwrap(), lk);
        for c in &d.crossings {
            assert_eq!(crossing_sign(&d, c).unwrap(), c.sign);
        }
    }

    #[test]
    fn trefoil_crossings_match_brute_force() {
        let k = trefoil();
        for n in [512, 1024] {
            let d = project(&[&k], z(), n).unwrap();
            let brute = brute_force_crossings(&k, None, d.direction, n);
            assert_eq!(d.crossings.len(), brute);
            assert_eq!(brute, 3);
        }
        let w = diagram_writhe(&k, z(), 512).unwrap();
        assert_eq!(w.abs(), 3);
        assert_eq!(diagram_writhe(&k.reversed(), z(), 512).unwrap(), w);
        assert_eq!(diagram_writhe(&k.mirrored(), z(), 512).unwrap(), -w);
    }

    #[test]
    fn unlinked_circles() {
        let far = circle().translated(Vec3::new(5.0, 0.0, 0.0));
        assert_eq!(combinatorial_linking(&circle(), &far, z(), 256).unwrap(), 0);
    }

    #[test]
    fn invalid_projection_inputs() {
        assert!(project(&[&circle()], Vec3::zeros(), 256).is_err());
        assert!(project(&[&circle()], z(), 64).is_err());
    }

    #[test]
    fn retry_schedule_is_deterministic_and_small() {
        let d = Vec3::new(0.0, 0.0, 1.0);
        for k in 1..RETRY_ATTEMPTS {
            let p = perturbed_direction(&d, k);
            assert_eq!(p, perturbed_direction(&d, k));
            assert!((p.norm() - 1.0).abs() < 1e-12);
            assert!(p.dot(&d) > 0.999);
        }
    }
}
