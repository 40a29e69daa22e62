//! Gauss map, two-curve linking integral and self-writhe integral on a
//! uniform periodic grid.
//!
//! Both integrals are periodic trapezoid sums of the pullback of the unit
//! sphere's area form under the Gauss map `Φ(s,t) = (γ₁(t) − γ₀(s))/|·|`,
//!
//! ```text
//! w(s,t) = (γ₀(s) − γ₁(t)) · (γ₀′(s) × γ₁′(t)) / |γ₁(t) − γ₀(s)|³,
//! ```
//!
//! normalized by `1/4π`. For the writhe the diagonal cells are set to zero:
//! the integrand extends continuously by 0 across the diagonal.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framing::{twist_integral, Framing};
use crate::geometry::{Curve, Vec3};

/// Closer than this, two grid points count as an intersection.
pub const CONTACT_DISTANCE: f64 = 1e-6;
/// Allowed gap between the two triangular halves of the writhe sum.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalPolicy {
    #[default]
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    /// Grid points per circle factor.
    pub n: usize,
    pub diagonal_policy: DiagonalPolicy,
    /// Report `|I_n − I_{n/2}|` as the error estimate.
    pub richardson: bool,
    /// Row-parallel evaluation; `false` selects the lexicographic reference sum.
    pub parallel: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { n: 512, diagonal_policy: DiagonalPolicy::Zero, richardson: true, parallel: true }
    }
}

impl QuadratureConfig {
    pub fn with_n(n: usize) -> Self {
        QuadratureConfig { n, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 32 || self.n % 2 != 0 {
            return Err(Error::InvalidConfig(format!("quadrature grid size must be even and >= 32, got {}", self.n)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    /// Richardson-style difference to the half-resolution sum; an estimate,
    /// not a bound. Zero when disabled.
    pub error_estimate: f64,
    pub n_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Unit vector from `γ₀(s)` to `γ₁(t)`.
pub fn gauss_map(c0: &Curve, c1: &Curve, s: f64, t: f64) -> Result<Vec3> {
    let d = c1.eval(t) - c0.eval(s);
    let r = d.norm();
    if !(r > 1e-12) {
        return Err(Error::CoincidentPoints);
    }
    Ok(d / r)
}

/// Boundary value `±γ̇(s)/|γ̇(s)|` of the Gauss map on the two copies of the
/// diagonal.
pub fn gauss_map_extended(curve: &Curve, s: f64, side: Side) -> Vec3 {
    let t = curve.unit_tangent(s);
    match side {
        Side::Plus => t,
        Side::Minus => -t,
    }
}

struct Grid {
    pos: Vec<Vec3>,
    vel: Vec<Vec3>,
}

impl Grid {
    fn new(curve: &Curve, n: usize) -> Self {
        let (pos, vel) = (0..n)
            .map(|i| {
                let j = curve.jet(i as f64 / n as f64);
                (j[0], j[1])
            })
            .unzip();
        Grid { pos, vel }
    }
}

#[inline]
fn integrand(x0: &Vec3, d0: &Vec3, x1: &Vec3, d1: &Vec3) -> (f64, f64) {
    let diff = x0 - x1;
    let r = diff.norm();
    (diff.dot(&d0.cross(d1)) / (r * r * r), r)
}

/// Partial sums over one row `i` of the grid.
#[derive(Debug, Clone, Copy, Default)]
struct RowSums {
    /// Entries with `j > i` (the whole row for two distinct curves).
    upper: f64,
    /// Entries with `j < i`.
    lower: f64,
    /// Entries on the half-resolution subgrid (both indices even).
    coarse: f64,
    min_distance: f64,
}

/// `true` when `(i, j)` are cyclically adjacent or equal.
fn near_diagonal(i: usize, j: usize, n: usize) -> bool {
    let d = i.abs_diff(j);
    d <= 1 || d == n - 1
}

fn row(g0: &Grid, g1: &Grid, i: usize, same: bool) -> RowSums {
    let n = g1.pos.len();
    let (x0, d0) = (&g0.pos[i], &g0.vel[i]);
    let mut out = RowSums { min_distance: f64::INFINITY, ..Default::default() };
    for j in 0..n {
        if same && i == j {
            continue;
        }
        let (w, r) = integrand(x0, d0, &g1.pos[j], &g1.vel[j]);
        if !(same && near_diagonal(i, j, n)) {
            out.min_distance = out.min_distance.min(r);
        }
        if same && j < i {
            out.lower += w;
        } else {
            out.upper += w;
        }
        if i % 2 == 0 && j % 2 == 0 {
            out.coarse += w;
        }
    }
    out
}

/// Lexicographic single-accumulator sum; the bit-reproducible reference.
fn reference_sum(g0: &Grid, g1: &Grid, same: bool) -> RowSums {
    let n = g0.pos.len();
    let mut acc = RowSums { min_distance: f64::INFINITY, ..Default::default() };
    for i in 0..n {
        let (x0, d0) = (&g0.pos[i], &g0.vel[i]);
        for j in 0..n {
            if same && i == j {
                continue;
            }
            let (w, r) = integrand(x0, d0, &g1.pos[j], &g1.vel[j]);
            if !(same && near_diagonal(i, j, n)) {
                acc.min_distance = acc.min_distance.min(r);
            }
            if same && j < i {
                acc.lower += w;
            } else {
                acc.upper += w;
            }
            if i % 2 == 0 && j % 2 == 0 {
                acc.coarse += w;
            }
        }
    }
    acc
}

fn grid_sum(g0: &Grid, g1: &Grid, same: bool, parallel: bool) -> RowSums {
    if !parallel {
        return reference_sum(g0, g1, same);
    }
    let rows: Vec<RowSums> = (0..g0.pos.len()).into_par_iter().map(|i| row(g0, g1, i, same)).collect();
    rows.iter().fold(RowSums { min_distance: f64::INFINITY, ..Default::default() }, |a, r| RowSums {
        upper: a.upper + r.upper,
        lower: a.lower + r.lower,
        coarse: a.coarse + r.coarse,
        min_distance: a.min_distance.min(r.min_distance),
    })
}

fn finish(fine: f64, coarse: f64, cfg: &QuadratureConfig) -> IntegralResult {
    let h = 1.0 / cfg.n as f64;
    let value = fine * h * h / (4.0 * PI);
    let coarse = coarse * 4.0 * h * h / (4.0 * PI);
    IntegralResult { value, error_estimate: if cfg.richardson { (value - coarse).abs() } else { 0.0 }, n_used: cfg.n }
}

/// Gauss linking integral of two disjoint closed curves.
pub fn linking_integral(c0: &Curve, c1: &Curve, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    cfg.validate()?;
    let (g0, g1) = (Grid::new(c0, cfg.n), Grid::new(c1, cfg.n));
    let sums = grid_sum(&g0, &g1, false, cfg.parallel);
    if !(sums.min_distance > CONTACT_DISTANCE) {
        return Err(Error::CurvesIntersect { distance: sums.min_distance });
    }
    Ok(finish(sums.upper, sums.coarse, cfg))
}

/// Writhe `Wr(γ)`: the Gauss self-integral with zero diagonal cells.
pub fn writhe_integral(curve: &Curve, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    cfg.validate()?;
    let g = Grid::new(curve, cfg.n);
    let sums = grid_sum(&g, &g, true, cfg.parallel);
    if !(sums.min_distance > CONTACT_DISTANCE) {
        return Err(Error::SelfIntersection { n: cfg.n, distance: sums.min_distance });
    }
    let h = 1.0 / cfg.n as f64;
    let scale = h * h / (4.0 * PI);
    if (sums.upper - sums.lower).abs() * scale > SYMMETRY_TOLERANCE {
        return Err(Error::QuadratureAsymmetry { upper: sums.upper * scale, lower: sums.lower * scale });
    }
    Ok(finish(sums.upper + sums.lower, sums.coarse, cfg))
}

/// What a convergence study evaluates.
#[derive(Debug, Clone, Copy)]
pub enum ConvergenceTarget<'a> {
    Writhe(&'a Curve),
    Linking(&'a Curve, &'a Curve),
    Twist(&'a Framing),
}

/// Evaluates `target` at each grid size in `n_list`.
pub fn convergence_study(
    target: ConvergenceTarget<'_>,
    n_list: &[usize],
    cfg: &QuadratureConfig,
) -> Result<Vec<(usize, f64)>> {
    if n_list.is_empty() {
        return Err(Error::InvalidConfig("convergence study needs at least one grid size".into()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) || n_list.iter().any(|n| n % 2 != 0) {
        return Err(Error::InvalidConfig("grid sizes must be even and strictly increasing".into()));
    }
    n_list
        .iter()
        .map(|&n| {
            let c = QuadratureConfig { n, richardson: false, ..*cfg };
            let value = match target {
                ConvergenceTarget::Writhe(curve) => writhe_integral(curve, &c)?.value,
                ConvergenceTarget::Linking(a, b) => linking_integral(a, b, &c)?.value,
                ConvergenceTarget::Twist(f) => twist_integral(f, n)?,
            };
            Ok((n, value))
        })
        .collect()
}

/// `log₂(|I_a − I_b| / |I_b − I_c|)` for each consecutive triple; `None`
/// for the first two rows and where the ratio is undefined.
pub fn observed_orders(values: &[f64]) -> Vec<Option<f64>> {
    (0..values.len())
        .map(|k| {
            if k < 2 {
                return None;
            }
            let num = (values[k - 2] - values[k - 1]).abs();
            let den = (values[k - 1] - values[k]).abs();
            (num > 0.0 && den > 0.0).then(|| (num / den).log2())
        })
        .collect()
}
