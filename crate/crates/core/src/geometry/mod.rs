//! Closed space curves on the parameter circle `[0,1)` and their Frenet
//! apparatus.
//!
//! All derivatives are taken with respect to the curve parameter `t`, not
//! arclength. Arclength densities multiply by `|γ′(t)|` explicitly.

mod jet;
mod spline;

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::{Matrix3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use jet::{Jet, VecJet};
pub use spline::PeriodicSpline;

pub type Vec3 = Vector3<f64>;

/// Below this `|γ′×γ″|` torsion and the Frenet frame are undefined.
pub const TORSION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Circle,
    TorusKnot,
    PerturbedCircle,
    Sampled,
}

/// Serialized description of a curve.
///
/// Built-in parametrizations, with `θ = 2πt`:
///
/// * `circle`: `radius` (default 1): `radius·(cos θ, sin θ, 0)`.
/// * `torus_knot`: `p`, `q` coprime integers, `R > r > 0`:
///   `((R + r cos qθ) cos pθ, (R + r cos qθ) sin pθ, r sin qθ)`.
/// * `perturbed_circle`: `radius` (default 1), `radial` (default 0),
///   `amplitude` (default 0), `mode` (positive integer):
///   `(radius + radial cos mθ)(cos θ, sin θ, 0) + amplitude sin mθ · ẑ`.
/// * `sampled`: `samples` taken at `t_i = i/N`, interpolated by a periodic
///   cubic spline.
///
/// Every kind also accepts placement keys, applied in this order:
/// `shift` (parameter offset), `reverse` (nonzero reverses orientation),
/// `rot_x`, `rot_y`, `rot_z` (rotations in turns about the fixed axes),
/// `mirror` (nonzero negates z), `cx`, `cy`, `cz` (translation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub kind: CurveKind,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 3]>>,
}

impl CurveSpec {
    pub fn new(kind: CurveKind) -> Self {
        CurveSpec { kind, params: BTreeMap::new(), samples: None }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

/// Orthonormal right-handed frame `(e1, e2, e3)` with `e3 = e1 × e2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTriple {
    pub e1: Vec3,
    pub e2: Vec3,
    pub e3: Vec3,
}

impl FrameTriple {
    /// Checks unit length, orthogonality and handedness to `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        let units = [self.e1, self.e2, self.e3].iter().all(|e| (e.norm() - 1.0).abs() < tol);
        let orth = self.e1.dot(&self.e2).abs() < tol
            && self.e1.dot(&self.e3).abs() < tol
            && self.e2.dot(&self.e3).abs() < tol;
        units && orth && self.e1.cross(&self.e2).dot(&self.e3) > 0.0
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.e1, self.e2, self.e3])
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Circle { radius: f64 },
    TorusKnot { p: f64, q: f64, major: f64, minor: f64 },
    Perturbed { radius: f64, radial: f64, vertical: f64, mode: f64 },
    Sampled(PeriodicSpline),
    /// `base(t) + amplitude·sin(2π·mode·t + phase)·axis`
    Displaced { base: Box<Curve>, amplitude: f64, mode: f64, phase: f64, axis: Vec3 },
}

/// Rigid/linear placement of a shape plus a reparametrization `t ↦ shift ± t`.
#[derive(Debug, Clone, PartialEq)]
struct Placement {
    linear: Matrix3<f64>,
    offset: Vec3,
    shift: f64,
    reversed: bool,
}

impl Default for Placement {
    fn default() -> Self {
        Placement { linear: Matrix3::identity(), offset: Vec3::zeros(), shift: 0.0, reversed: false }
    }
}

/// A closed space curve with period 1 in its parameter.
///
/// Immutable once built; transformations return new curves.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    shape: Shape,
    placement: Placement,
}

impl Curve {
    pub fn circle(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidCurve(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Self::from_shape(Shape::Circle { radius }))
    }

    /// Torus knot winding `p` times around the z-axis and `q` times through
    /// the hole of a torus with radii `major > minor > 0`.
    pub fn torus_knot(p: i64, q: i64, major: f64, minor: f64) -> Result<Self> {
        if p == 0 || q == 0 || gcd(p.unsigned_abs(), q.unsigned_abs()) != 1 {
            return Err(Error::InvalidCurve(format!("torus knot needs coprime nonzero p, q; got ({p}, {q})")));
        }
        if !(minor > 0.0 && minor < major && major.is_finite()) {
            return Err(Error::InvalidCurve(format!("torus knot needs 0 < r < R; got R={major}, r={minor}")));
        }
        Ok(Self::from_shape(Shape::TorusKnot { p: p as f64, q: q as f64, major, minor }))
    }

    pub fn perturbed_circle(radius: f64, radial: f64, amplitude: f64, mode: i64) -> Result<Self> {
        if mode < 1 {
            return Err(Error::InvalidCurve(format!("perturbation mode must be positive, got {mode}")));
        }
        if !(radius > 0.0) || radial.abs() >= radius {
            return Err(Error::InvalidCurve(format!(
                "perturbed circle needs |radial| < radius; got radius={radius}, radial={radial}"
            )));
        }
        Ok(Self::from_shape(Shape::Perturbed { radius, radial, vertical: amplitude, mode: mode as f64 }))
    }

    /// Periodic spline through `points`, taken at `t_i = i/N`.
    pub fn sampled(points: Vec<Vec3>) -> Result<Self> {
        if points.len() < 8 {
            return Err(Error::InvalidCurve(format!("sampled curve needs at least 8 points, got {}", points.len())));
        }
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidCurve("sampled curve has non-finite coordinates".into()));
        }
        let n = points.len();
        let mut min = f64::INFINITY;
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                min = min.min((points[i] - points[j]).norm());
            }
        }
        if !(min > 0.0) {
            return Err(Error::InvalidCurve("sampled curve is not embedded: two non-adjacent samples coincide".into()));
        }
        Ok(Self::from_shape(Shape::Sampled(PeriodicSpline::new(points))))
    }

    pub fn from_spec(spec: &CurveSpec) -> Result<Self> {
        let mut params = Params::new(&spec.params);
        if spec.kind != CurveKind::Sampled && spec.samples.is_some() {
            return Err(Error::InvalidCurve("\"samples\" is only allowed for the sampled kind".into()));
        }
        let base = match spec.kind {
            CurveKind::Circle => Curve::circle(params.get_or("radius", 1.0))?,
            CurveKind::TorusKnot => Curve::torus_knot(
                params.integer("p")?,
                params.integer("q")?,
                params.required("R")?,
                params.required("r")?,
            )?,
            CurveKind::PerturbedCircle => Curve::perturbed_circle(
                params.get_or("radius", 1.0),
                params.get_or("radial", 0.0),
                params.get_or("amplitude", 0.0),
                params.integer("mode")?,
            )?,
            CurveKind::Sampled => {
                let samples = spec
                    .samples
                    .as_ref()
                    .ok_or_else(|| Error::InvalidCurve("sampled curve needs \"samples\"".into()))?;
                Curve::sampled(samples.iter().map(|p| Vec3::from(*p)).collect())?
            }
        };
        let mut curve = base;
        let shift = params.get_or("shift", 0.0);
        if shift != 0.0 {
            curve = curve.shifted(shift);
        }
        if params.get_or("reverse", 0.0) != 0.0 {
            curve = curve.reversed();
        }
        for (key, axis) in [("rot_x", Vec3::x_axis()), ("rot_y", Vec3::y_axis()), ("rot_z", Vec3::z_axis())] {
            let turns = params.get_or(key, 0.0);
            if turns != 0.0 {
                curve = curve.transformed(*Rotation3::from_axis_angle(&axis, TAU * turns).matrix());
            }
        }
        if params.get_or("mirror", 0.0) != 0.0 {
            curve = curve.mirrored();
        }
        let offset = Vec3::new(params.get_or("cx", 0.0), params.get_or("cy", 0.0), params.get_or("cz", 0.0));
        if offset != Vec3::zeros() {
            curve = curve.translated(offset);
        }
        params.finish()?;
        Ok(curve)
    }

    fn from_shape(shape: Shape) -> Self {
        Curve { shape, placement: Placement::default() }
    }

    pub fn kind(&self) -> CurveKind {
        match &self.shape {
            Shape::Circle { .. } => CurveKind::Circle,
            Shape::TorusKnot { .. } => CurveKind::TorusKnot,
            Shape::Perturbed { .. } => CurveKind::PerturbedCircle,
            Shape::Sampled(_) => CurveKind::Sampled,
            Shape::Displaced { base, .. } => base.kind(),
        }
    }

    pub fn translated(&self, offset: Vec3) -> Self {
        let mut c = self.clone();
        c.placement.offset += offset;
        c
    }

    /// Applies `x ↦ M x` after the current placement.
    pub fn transformed(&self, linear: Matrix3<f64>) -> Self {
        let mut c = self.clone();
        c.placement.linear = linear * c.placement.linear;
        c.placement.offset = linear * c.placement.offset;
        c
    }

    /// Reflection through the xy-plane.
    pub fn mirrored(&self) -> Self {
        self.transformed(Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0)))
    }

    /// Same point set traversed backwards: `t ↦ −t`.
    pub fn reversed(&self) -> Self {
        let mut c = self.clone();
        c.placement.reversed = !c.placement.reversed;
        c
    }

    /// Reparametrization `t ↦ t + c`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        if out.placement.reversed {
            out.placement.shift -= c;
        } else {
            out.placement.shift += c;
        }
        out
    }

    /// `γ(t) + amplitude·sin(2π·mode·t + phase)·axis`.
    pub fn displaced(&self, amplitude: f64, mode: i64, phase: f64, axis: Vec3) -> Self {
        Self::from_shape(Shape::Displaced {
            base: Box::new(self.clone()),
            amplitude,
            mode: mode as f64,
            phase,
            axis,
        })
    }

    /// Position and the first three `t`-derivatives.
    pub fn jet(&self, t: f64) -> VecJet {
        let pl = &self.placement;
        let (tau, dir) = if pl.reversed { (pl.shift - t, -1.0) } else { (pl.shift + t, 1.0) };
        let raw = self.shape_jet(tau);
        let mut out = [Vec3::zeros(); 4];
        let mut factor = 1.0;
        for k in 0..4 {
            out[k] = pl.linear * raw[k] * factor;
            factor *= dir;
        }
        out[0] += pl.offset;
        out
    }

    fn shape_jet(&self, t: f64) -> VecJet {
        match &self.shape {
            Shape::Circle { radius } => {
                let x = Jet::cos_linear(TAU, 0.0, t).scale(*radius);
                let y = Jet::sin_linear(TAU, 0.0, t).scale(*radius);
                jet::vec_jet(x, y, Jet::constant(0.0))
            }
            Shape::TorusKnot { p, q, major, minor } => {
                let rho = Jet::constant(*major) + Jet::cos_linear(TAU * q, 0.0, t).scale(*minor);
                let x = rho * Jet::cos_linear(TAU * p, 0.0, t);
                let y = rho * Jet::sin_linear(TAU * p, 0.0, t);
                let z = Jet::sin_linear(TAU * q, 0.0, t).scale(*minor);
                jet::vec_jet(x, y, z)
            }
            Shape::Perturbed { radius, radial, vertical, mode } => {
                let rho = Jet::constant(*radius) + Jet::cos_linear(TAU * mode, 0.0, t).scale(*radial);
                let x = rho * Jet::cos_linear(TAU, 0.0, t);
                let y = rho * Jet::sin_linear(TAU, 0.0, t);
                let z = Jet::sin_linear(TAU * mode, 0.0, t).scale(*vertical);
                jet::vec_jet(x, y, z)
            }
            Shape::Sampled(spline) => spline.jet(t),
            Shape::Displaced { base, amplitude, mode, phase, axis } => {
                let mut j = base.jet(t);
                let bump = Jet::sin_linear(TAU * mode, *phase, t).scale(*amplitude);
                for k in 0..4 {
                    j[k] += axis * bump.0[k];
                }
                j
            }
        }
    }

    /// Position `γ(t)`; `t` is taken modulo 1.
    pub fn eval(&self, t: f64) -> Vec3 {
        self.jet(t)[0]
    }

    /// `d^order γ / dt^order` for `order` in `0..=3`.
    ///
    /// Sampled curves return the spline derivative; the third derivative of a
    /// cubic spline is piecewise constant, so torsion of sampled curves is only
    /// first-order accurate.
    pub fn derivative(&self, t: f64, order: usize) -> Vec3 {
        assert!(order <= 3, "derivative order must be at most 3, got {order}");
        self.jet(t)[order]
    }

    /// `|γ′×γ″| / |γ′|³`.
    pub fn curvature(&self, t: f64) -> f64 {
        let [_, d1, d2, _] = self.jet(t);
        d1.cross(&d2).norm() / d1.norm().powi(3)
    }

    /// `((γ′×γ″)·γ‴) / |γ′×γ″|²`.
    pub fn torsion(&self, t: f64) -> Result<f64> {
        let [_, d1, d2, d3] = self.jet(t);
        let b = d1.cross(&d2);
        let b2 = b.norm_squared();
        if b2.sqrt() < TORSION_TOLERANCE {
            return Err(Error::TorsionUndefined { t });
        }
        Ok(b.dot(&d3) / b2)
    }

    pub fn unit_tangent(&self, t: f64) -> Vec3 {
        self.derivative(t, 1).normalize()
    }

    pub fn frenet_frame(&self, t: f64) -> Result<FrameTriple> {
        let [_, d1, d2, _] = self.jet(t);
        if d1.cross(&d2).norm() < TORSION_TOLERANCE {
            return Err(Error::FrameUndefined { t });
        }
        let e1 = d1.normalize();
        let e2 = (d2 - e1 * d2.dot(&e1)).normalize();
        Ok(FrameTriple { e1, e2, e3: e1.cross(&e2) })
    }

    /// Periodic trapezoid approximation of `∮|γ′| dt`.
    pub fn arclength(&self, n_samples: usize) -> Result<f64> {
        if n_samples < 16 {
            return Err(Error::InvalidConfig(format!("arclength needs n_samples >= 16, got {n_samples}")));
        }
        let h = 1.0 / n_samples as f64;
        Ok((0..n_samples).map(|i| self.derivative(i as f64 * h, 1).norm()).sum::<f64>() * h)
    }

    /// `n` points at `t_i = i/n`.
    pub fn samples(&self, n: usize) -> Vec<Vec3> {
        (0..n).map(|i| self.eval(i as f64 / n as f64)).collect()
    }

    /// Largest pairwise distance among 256 samples.
    pub fn diameter(&self) -> f64 {
        let pts = self.samples(256);
        let mut d: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                d = d.max((pts[i] - pts[j]).norm());
            }
        }
        d
    }

    /// Smallest distance between samples `i`, `j` with cyclic `|i − j| ≥ 2`.
    pub fn min_nonadjacent_distance(&self, n: usize) -> f64 {
        let pts = self.samples(n);
        let mut min = f64::INFINITY;
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                min = min.min((pts[i] - pts[j]).norm());
            }
        }
        min
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Strict accessor over a parameter map: every key must be consumed.
struct Params<'a> {
    map: &'a BTreeMap<String, f64>,
    used: Vec<&'static str>,
}

const PLACEMENT_KEYS: [&str; 9] = ["shift", "reverse", "rot_x", "rot_y", "rot_z", "mirror", "cx", "cy", "cz"];

impl<'a> Params<'a> {
    fn new(map: &'a BTreeMap<String, f64>) -> Self {
        Params { map, used: PLACEMENT_KEYS.to_vec() }
    }

    fn get_or(&mut self, key: &'static str, default: f64) -> f64 {
        self.used.push(key);
        self.map.get(key).copied().unwrap_or(default)
    }

    fn required(&mut self, key: &'static str) -> Result<f64> {
        self.used.push(key);
        self.map
            .get(key)
            .copied()
            .ok_or_else(|| Error::InvalidCurve(format!("missing parameter \"{key}\"")))
    }

    fn integer(&mut self, key: &'static str) -> Result<i64> {
        let v = self.required(key)?;
        if v.fract() != 0.0 || !v.is_finite() {
            return Err(Error::InvalidCurve(format!("parameter \"{key}\" must be an integer, got {v}")));
        }
        Ok(v as i64)
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().find(|k| !self.used.contains(&k.as_str())) {
            Some(k) => Err(Error::InvalidCurve(format!("unknown parameter \"{k}\""))),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn trefoil() -> Curve {
        Curve::torus_knot(2, 3, 2.0, 0.5).unwrap()
    }

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn builtin_positions() {
        let c = Curve::circle(1.0).unwrap();
        assert!(close(c.eval(0.0), Vec3::new(1.0, 0.0, 0.0), 1e-15));
        assert!(close(c.eval(0.25), Vec3::new(0.0, 1.0, 0.0), 1e-15));
        assert!(close(trefoil().eval(0.0), Vec3::new(2.5, 0.0, 0.0), 1e-15));
    }

    #[test]
    fn circle_derivatives() {
        let c = Curve::circle(1.0).unwrap();
        assert!(close(c.derivative(0.0, 1), Vec3::new(0.0, 2.0 * PI, 0.0), 1e-12));
        assert!(close(c.derivative(0.0, 2), Vec3::new(-4.0 * PI * PI, 0.0, 0.0), 1e-12));
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-5;
        let curves = [
            trefoil(),
            Curve::torus_knot(3, 2, 2.0, 0.5).unwrap(),
            Curve::circle(1.7).unwrap(),
            Curve::perturbed_circle(1.0, 0.2, 0.3, 3).unwrap(),
            trefoil().reversed().shifted(0.3).mirrored(),
            Curve::circle(1.0).unwrap().displaced(0.1, 2, 0.4, Vec3::new(0.0, 0.6, 0.8)),
        ];
        for c in &curves {
            for k in 0..100 {
                let t = (k as f64 * 0.618_033_988_75).fract();
                for order in 1..=3 {
                    let fd = (c.derivative(t + h, order - 1) - c.derivative(t - h, order - 1)) / (2.0 * h);
                    let exact = c.derivative(t, order);
                    assert!((fd - exact).norm() <= 1e-6 * exact.norm().max(1.0), "order {order} at t={t}");
                }
            }
        }
    }

    #[test]
    fn periodicity() {
        let pts: Vec<Vec3> = trefoil().samples(64);
        let curves = [trefoil(), Curve::circle(2.0).unwrap(), Curve::sampled(pts).unwrap()];
        for c in &curves {
            for t in [0.0, 0.1, 0.77] {
                assert!(close(c.eval(t), c.eval(t + 1.0), 1e-12));
            }
            assert!(close(c.eval(0.0), c.eval(1.0 - 1e-15), 1e-12));
        }
    }

    #[test]
    fn circle_curvature_and_torsion() {
        let c = Curve::circle(1.0).unwrap();
        let c2 = Curve::circle(2.0).unwrap();
        for t in [0.0, 0.3, 0.9] {
            assert_relative_eq!(c.curvature(t), 1.0, epsilon = 1e-12);
            assert!(c.torsion(t).unwrap().abs() < 1e-12);
            assert_relative_eq!(c2.curvature(t), 0.5, epsilon = 1e-12);
        }
    }

    // Oracle: fourth-order central differences of the position, fed into the
    // same curvature/torsion formulas.
    fn fd_kappa_tau(c: &Curve, t: f64) -> (f64, f64) {
        let h = 1e-3;
        let f = |k: f64| c.eval(t + k * h);
        let d1 = (f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * h);
        let d2 = (-f(-2.0) + 16.0 * f(-1.0) - 30.0 * f(0.0) + 16.0 * f(1.0) - f(2.0)) / (12.0 * h * h);
        let d3 = (f(-3.0) * 1.0 - 8.0 * f(-2.0) + 13.0 * f(-1.0) - 13.0 * f(1.0) + 8.0 * f(2.0) - f(3.0))
            / (8.0 * h * h * h);
        let b = d1.cross(&d2);
        (b.norm() / d1.norm().powi(3), b.dot(&d3) / b.norm_squared())
    }

    #[test]
    fn trefoil_curvature_torsion_against_finite_differences() {
        let c = trefoil();
        let (k_fd, t_fd) = fd_kappa_tau(&c, 0.2);
        assert_relative_eq!(c.curvature(0.2), k_fd, max_relative = 1e-6);
        assert_relative_eq!(c.torsion(0.2).unwrap(), t_fd, max_relative = 1e-6);
    }

    #[test]
    fn frenet_frames() {
        let c = Curve::circle(1.0).unwrap();
        let f = c.frenet_frame(0.0).unwrap();
        assert!(close(f.e1, Vec3::new(0.0, 1.0, 0.0), 1e-14));
        assert!(close(f.e2, Vec3::new(-1.0, 0.0, 0.0), 1e-14));
        assert!(close(f.e3, Vec3::new(0.0, 0.0, 1.0), 1e-14));
        let f = c.frenet_frame(0.5).unwrap();
        assert!(close(f.e1, Vec3::new(0.0, -1.0, 0.0), 1e-14));
        assert!(close(f.e2, Vec3::new(1.0, 0.0, 0.0), 1e-14));

        let k = trefoil();
        for i in 0..200 {
            let t = i as f64 / 200.0;
            let f = k.frenet_frame(t).unwrap();
            assert!(f.is_valid(1e-10));
            assert!(f.e2.dot(&k.derivative(t, 2)) > 0.0);
        }
    }

    #[test]
    fn vanishing_curvature_is_an_error() {
        // radial = -radius/(1+m²) puts an inflection exactly at t = 0.
        let c = Curve::perturbed_circle(1.0, -0.2, 0.0, 2).unwrap();
        assert!(c.curvature(0.0) < 1e-12);
        assert_eq!(c.torsion(0.0), Err(Error::TorsionUndefined { t: 0.0 }));
        assert_eq!(c.frenet_frame(0.0), Err(Error::FrameUndefined { t: 0.0 }));
    }

    #[test]
    fn planar_curves_have_zero_torsion() {
        let c = Curve::perturbed_circle(1.0, 0.05, 0.0, 3).unwrap();
        for i in 0..50 {
            assert!(c.torsion(i as f64 / 50.0).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn arclength_values() {
        assert_relative_eq!(Curve::circle(1.0).unwrap().arclength(256).unwrap(), 2.0 * PI, epsilon = 1e-10);
        assert_relative_eq!(Curve::circle(3.0).unwrap().arclength(256).unwrap(), 6.0 * PI, epsilon = 1e-9);
        let k = trefoil();
        let a = k.arclength(512).unwrap();
        let b = k.arclength(1024).unwrap();
        assert!((a - b).abs() < 1e-8);
        assert!(Curve::circle(1.0).unwrap().arclength(8).is_err());
    }

    #[test]
    fn spec_parsing_is_strict() {
        let spec = CurveSpec::new(CurveKind::TorusKnot).with("p", 2.0).with("q", 3.0).with("R", 2.0).with("r", 0.5);
        assert_eq!(Curve::from_spec(&spec).unwrap(), trefoil());
        assert!(Curve::from_spec(&spec.clone().with("radius", 1.0)).is_err());
        assert!(Curve::from_spec(&spec.clone().with("q", 4.0)).is_err());
        assert!(Curve::from_spec(&spec.clone().with("r", 3.0)).is_err());
        let hopf = CurveSpec::new(CurveKind::Circle).with("rot_x", 0.25).with("cx", 1.0);
        let c = Curve::from_spec(&hopf).unwrap();
        assert!(close(c.eval(0.25), Vec3::new(1.0, 0.0, 1.0), 1e-14));
    }

    #[test]
    fn sampled_curve_tracks_its_source() {
        let k = trefoil();
        let s = Curve::sampled(k.samples(1024)).unwrap();
        for t in [0.013, 0.4, 0.871] {
            assert!(close(s.eval(t), k.eval(t), 1e-6));
            assert!((s.derivative(t, 1) - k.derivative(t, 1)).norm() < 1e-3 * k.derivative(t, 1).norm());
        }
        assert!(Curve::sampled(vec![Vec3::zeros(); 10]).is_err());
    }

    #[test]
    fn reversal_and_shift() {
        let k = trefoil();
        let r = k.reversed();
        assert!(close(r.eval(0.3), k.eval(-0.3), 1e-14));
        assert!(close(r.derivative(0.3, 1), -k.derivative(-0.3, 1), 1e-12));
        let s = k.shifted(0.1);
        assert!(close(s.eval(0.2), k.eval(0.3), 1e-14));
        assert!(close(r.shifted(0.1).eval(0.2), k.eval(-0.3), 1e-14));
    }
}
