//! Unit normal framings along a curve, their twist, and the homotopy class of
//! the associated frame loop in SO(3).

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::{Rotation3, UnitQuaternion};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Curve, FrameTriple, PeriodicSpline, Vec3};
use crate::SCAN_POINTS;

/// Minimum curvature on the validation scan for Frenet-based operations.
pub const CURVATURE_FLOOR: f64 = 1e-6;
/// Minimum `|d × t̂|` on the validation scan for projection framings.
pub const DIRECTION_FLOOR: f64 = 1e-6;
/// Number of frame samples the SO(3) lift starts from and the cap it doubles to.
pub const LIFT_SAMPLES: usize = 1024;
pub const LIFT_SAMPLES_MAX: usize = 16384;
/// Default resolution of pushoff curves.
pub const PUSHOFF_RESOLUTION: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FramingKind {
    Frenet,
    Projection,
    Twisted,
    Sampled,
}

/// JSON form of a framing rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramingSpec {
    pub kind: FramingKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twists: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<FramingSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 3]>>,
}

/// How to build a normal field on a given curve.
#[derive(Debug, Clone, PartialEq)]
pub enum FramingRule {
    /// Principal normal of the Frenet frame.
    Frenet,
    /// Fixed direction projected onto each normal plane ("blackboard").
    Projection(Vec3),
    /// Base framing rotated `twists` full turns about the tangent.
    Twisted { base: Box<FramingRule>, twists: i64 },
    /// Normals given at `t_i = i/N`.
    Sampled(Vec<Vec3>),
}

impl FramingRule {
    pub fn from_spec(spec: &FramingSpec) -> Result<Self> {
        let reject = |field: &str| Error::InvalidFraming(format!("\"{field}\" is not allowed for {:?} framings", spec.kind));
        let only = |allowed: &[&str]| -> Result<()> {
            let present = [
                ("direction", spec.direction.is_some()),
                ("twists", spec.twists.is_some()),
                ("base", spec.base.is_some()),
                ("samples", spec.samples.is_some()),
            ];
            match present.iter().find(|(name, set)| *set && !allowed.contains(name)) {
                Some((name, _)) => Err(reject(name)),
                None => Ok(()),
            }
        };
        match spec.kind {
            FramingKind::Frenet => {
                only(&[])?;
                Ok(FramingRule::Frenet)
            }
            FramingKind::Projection => {
                only(&["direction"])?;
                let d = spec
                    .direction
                    .ok_or_else(|| Error::InvalidFraming("projection framing needs \"direction\"".into()))?;
                Ok(FramingRule::Projection(Vec3::from(d)))
            }
            FramingKind::Twisted => {
                only(&["twists", "base"])?;
                let base = spec
                    .base
                    .as_ref()
                    .ok_or_else(|| Error::InvalidFraming("twisted framing needs \"base\"".into()))?;
                let twists = spec
                    .twists
                    .ok_or_else(|| Error::InvalidFraming("twisted framing needs \"twists\"".into()))?;
                Ok(FramingRule::from_spec(base)?.twisted(twists))
            }
            FramingKind::Sampled => {
                only(&["samples"])?;
                let s = spec
                    .samples
                    .as_ref()
                    .ok_or_else(|| Error::InvalidFraming("sampled framing needs \"samples\"".into()))?;
                Ok(FramingRule::Sampled(s.iter().map(|p| Vec3::from(*p)).collect()))
            }
        }
    }

    pub fn to_spec(&self) -> FramingSpec {
        let empty = |kind| FramingSpec { kind, direction: None, twists: None, base: None, samples: None };
        match self {
            FramingRule::Frenet => empty(FramingKind::Frenet),
            FramingRule::Projection(d) => FramingSpec { direction: Some([d.x, d.y, d.z]), ..empty(FramingKind::Projection) },
            FramingRule::Twisted { base, twists } => FramingSpec {
                twists: Some(*twists),
                base: Some(Box::new(base.to_spec())),
                ..empty(FramingKind::Twisted)
            },
            FramingRule::Sampled(s) => FramingSpec {
                samples: Some(s.iter().map(|p| [p.x, p.y, p.z]).collect()),
                ..empty(FramingKind::Sampled)
            },
        }
    }

    /// Adds `k` twists, merging with an existing twist count.
    pub fn twisted(&self, k: i64) -> FramingRule {
        let (base, total) = match self {
            FramingRule::Twisted { base, twists } => ((**base).clone(), twists + k),
            other => (other.clone(), k),
        };
        if total == 0 {
            base
        } else {
            FramingRule::Twisted { base: Box::new(base), twists: total }
        }
    }

    fn is_sampled(&self) -> bool {
        match self {
            FramingRule::Sampled(_) => true,
            FramingRule::Twisted { base, .. } => base.is_sampled(),
            _ => false,
        }
    }

    /// Builds and validates the framing on `curve`.
    pub fn apply(&self, curve: &Curve) -> Result<Framing> {
        let normals = match self {
            FramingRule::Frenet => {
                check_curvature(curve)?;
                None
            }
            FramingRule::Projection(d) => {
                let norm = d.norm();
                if !(norm > 1e-12 && norm.is_finite()) {
                    return Err(Error::InvalidFraming("projection direction must be a nonzero vector".into()));
                }
                let d = d / norm;
                for i in 0..SCAN_POINTS {
                    let t = i as f64 / SCAN_POINTS as f64;
                    if d.cross(&curve.unit_tangent(t)).norm() <= DIRECTION_FLOOR {
                        return Err(Error::DirectionDegenerate { t });
                    }
                }
                return Ok(Framing { curve: curve.clone(), rule: FramingRule::Projection(d), normals: None });
            }
            FramingRule::Twisted { base, twists } => {
                let inner = base.apply(curve)?;
                return Ok(Framing {
                    curve: curve.clone(),
                    rule: FramingRule::Twisted { base: Box::new(inner.rule), twists: *twists },
                    normals: inner.normals,
                });
            }
            FramingRule::Sampled(samples) => {
                if samples.len() < 8 {
                    return Err(Error::InvalidFraming("sampled framing needs at least 8 normals".into()));
                }
                let n = samples.len();
                let mut unit = Vec::with_capacity(n);
                for (i, s) in samples.iter().enumerate() {
                    let t = i as f64 / n as f64;
                    let len = s.norm();
                    if !(len > 1e-12) {
                        return Err(Error::InvalidFraming(format!("normal sample {i} is zero")));
                    }
                    let u = s / len;
                    if u.dot(&curve.unit_tangent(t)).abs() > 1e-6 {
                        return Err(Error::InvalidFraming(format!("normal sample {i} is not orthogonal to the tangent")));
                    }
                    unit.push(u);
                }
                Some(PeriodicSpline::new(unit))
            }
        };
        Ok(Framing { curve: curve.clone(), rule: self.clone(), normals })
    }
}

fn check_curvature(curve: &Curve) -> Result<()> {
    for i in 0..SCAN_POINTS {
        let t = i as f64 / SCAN_POINTS as f64;
        if !(curve.curvature(t) > CURVATURE_FLOOR) {
            return Err(Error::CurvatureVanishes { t });
        }
    }
    Ok(())
}

/// A validated unit normal field along a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Framing {
    curve: Curve,
    rule: FramingRule,
    normals: Option<PeriodicSpline>,
}

/// Homotopy class of the frame loop in `π1(SO(3)) = ℤ/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftClass {
    Trivial,
    Nontrivial,
}

impl LiftClass {
    pub fn flipped(self) -> Self {
        match self {
            LiftClass::Trivial => LiftClass::Nontrivial,
            LiftClass::Nontrivial => LiftClass::Trivial,
        }
    }
}

/// Principal normal of the Frenet frame.
pub fn frenet_framing(curve: &Curve) -> Result<Framing> {
    FramingRule::Frenet.apply(curve)
}

/// Blackboard-style framing along `direction`.
pub fn projection_framing(curve: &Curve, direction: Vec3) -> Result<Framing> {
    FramingRule::Projection(direction).apply(curve)
}

/// Rotates the normal `k` full turns about the tangent.
pub fn add_twists(framing: &Framing, k: i64) -> Framing {
    Framing { curve: framing.curve.clone(), rule: framing.rule.twisted(k), normals: framing.normals.clone() }
}

struct TangentJet {
    tangent: Vec3,
    tangent_dot: Vec3,
}

fn tangent_jet(d: &[Vec3; 4]) -> TangentJet {
    let speed = d[1].norm();
    let tangent = d[1] / speed;
    let tangent_dot = (d[2] - tangent * d[2].dot(&tangent)) / speed;
    TangentJet { tangent, tangent_dot }
}

/// Normalizes `v` and differentiates the result given `v̇`.
fn normalized_with_derivative(v: Vec3, v_dot: Vec3) -> (Vec3, Vec3) {
    let len = v.norm();
    let n = v / len;
    (n, (v_dot - n * n.dot(&v_dot)) / len)
}

impl Framing {
    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn rule(&self) -> &FramingRule {
        &self.rule
    }

    /// `n(t)`.
    pub fn normal(&self, t: f64) -> Vec3 {
        self.normal_jet(t).0
    }

    /// `(n(t), ṅ(t))`, derivative with respect to `t`.
    pub fn normal_jet(&self, t: f64) -> (Vec3, Vec3) {
        let d = self.curve.jet(t);
        let tj = tangent_jet(&d);
        self.rule_jet(&self.rule, t, &d, &tj)
    }

    fn rule_jet(&self, rule: &FramingRule, t: f64, d: &[Vec3; 4], tj: &TangentJet) -> (Vec3, Vec3) {
        let (tan, tan_dot) = (tj.tangent, tj.tangent_dot);
        match rule {
            FramingRule::Frenet => {
                let a = d[2].dot(&tan);
                let v = d[2] - tan * a;
                let a_dot = d[3].dot(&tan) + d[2].dot(&tan_dot);
                let v_dot = d[3] - tan * a_dot - tan_dot * a;
                normalized_with_derivative(v, v_dot)
            }
            FramingRule::Projection(dir) => {
                let a = dir.dot(&tan);
                let v = dir - tan * a;
                let v_dot = -tan * dir.dot(&tan_dot) - tan_dot * a;
                normalized_with_derivative(v, v_dot)
            }
            FramingRule::Twisted { base, twists } => {
                let (n, n_dot) = self.rule_jet(base, t, d, tj);
                let b = tan.cross(&n);
                let b_dot = tan_dot.cross(&n) + tan.cross(&n_dot);
                let omega = TAU * *twists as f64;
                let (s, c) = (omega * t).sin_cos();
                let normal = n * c + b * s;
                let normal_dot = (b * c - n * s) * omega + n_dot * c + b_dot * s;
                (normal, normal_dot)
            }
            FramingRule::Sampled(_) => {
                let spline = self.normals.as_ref().expect("sampled framing carries its spline");
                let [s, s_dot, _, _] = spline.jet(t);
                let a = s.dot(&tan);
                let v = s - tan * a;
                let a_dot = s_dot.dot(&tan) + s.dot(&tan_dot);
                let v_dot = s_dot - tan * a_dot - tan_dot * a;
                normalized_with_derivative(v, v_dot)
            }
        }
    }

    /// `(t̂, n, t̂ × n)`.
    pub fn frame(&self, t: f64) -> FrameTriple {
        let tangent = self.curve.unit_tangent(t);
        let n = self.normal(t);
        FrameTriple { e1: tangent, e2: n, e3: tangent.cross(&n) }
    }
}

/// Twist `τ_φ = (1/2π) ∮ det(t̂, n, ṅ) dt` by the periodic trapezoid rule.
///
/// Framings built on sampled normals differentiate `n` spectrally on the
/// uniform grid; all other kinds use the closed-form derivative.
pub fn twist_integral(framing: &Framing, n_samples: usize) -> Result<f64> {
    if n_samples < 64 {
        return Err(Error::InvalidConfig(format!("twist integral needs n_samples >= 64, got {n_samples}")));
    }
    let h = 1.0 / n_samples as f64;
    let ts = (0..n_samples).map(|i| i as f64 * h);
    let sum: f64 = if framing.rule.is_sampled() {
        let normals: Vec<Vec3> = ts.clone().map(|t| framing.normal(t)).collect();
        let derivs = spectral_derivative(&normals);
        ts.zip(normals.iter().zip(&derivs))
            .map(|(t, (n, n_dot))| framing.curve.unit_tangent(t).cross(n).dot(n_dot))
            .sum()
    } else {
        ts.map(|t| {
            let (n, n_dot) = framing.normal_jet(t);
            framing.curve.unit_tangent(t).cross(&n).dot(&n_dot)
        })
        .sum()
    };
    Ok(sum * h / TAU)
}

/// d/dt of a periodic sequence sampled at `t_i = i/N`, via the DFT.
fn spectral_derivative(values: &[Vec3]) -> Vec<Vec3> {
    let n = values.len();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut out = vec![Vec3::zeros(); n];
    for axis in 0..3 {
        let mut buf: Vec<Complex<f64>> = values.iter().map(|v| Complex::new(v[axis], 0.0)).collect();
        forward.process(&mut buf);
        for (k, c) in buf.iter_mut().enumerate() {
            let freq = if 2 * k < n { k as f64 } else { k as f64 - n as f64 };
            *c = if 2 * k == n { Complex::new(0.0, 0.0) } else { *c * Complex::new(0.0, TAU * freq) };
        }
        inverse.process(&mut buf);
        for (o, c) in out.iter_mut().zip(&buf) {
            o[axis] = c.re / n as f64;
        }
    }
    out
}

/// `(1/2π) ∮ τ(t)|γ′(t)| dt`; needs nowhere-vanishing curvature.
pub fn total_torsion(curve: &Curve, n_samples: usize) -> Result<f64> {
    if n_samples < 16 {
        return Err(Error::InvalidConfig(format!("total torsion needs n_samples >= 16, got {n_samples}")));
    }
    check_curvature(curve)?;
    let h = 1.0 / n_samples as f64;
    let mut sum = 0.0;
    for i in 0..n_samples {
        let t = i as f64 * h;
        sum += curve.torsion(t)? * curve.derivative(t, 1).norm();
    }
    Ok(sum * h / TAU)
}

/// `γ(t) + ε·n(t)` sampled at `resolution` points.
///
/// Rejects the pushoff when any of its samples comes within `ε/2` of a base
/// sample.
pub fn pushoff(curve: &Curve, framing: &Framing, epsilon: f64, resolution: usize) -> Result<Curve> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidConfig(format!("pushoff epsilon must be positive, got {epsilon}")));
    }
    let base = curve.samples(resolution);
    let pushed: Vec<Vec3> = (0..resolution)
        .map(|i| {
            let t = i as f64 / resolution as f64;
            base[i] + framing.normal(t) * epsilon
        })
        .collect();
    let distance = pushed
        .iter()
        .map(|p| base.iter().map(|b| (p - b).norm_squared()).fold(f64::INFINITY, f64::min))
        .fold(f64::INFINITY, f64::min)
        .sqrt();
    if !(distance > epsilon / 2.0) {
        return Err(Error::PushoffCollision { epsilon, distance });
    }
    Curve::sampled(pushed).map_err(|_| Error::PushoffCollision { epsilon, distance })
}

/// Class of the loop `t ↦ (t̂, n, t̂×n)` in `π1(SO(3))`.
///
/// The loop is lifted to unit quaternions by sign continuity; it is trivial
/// when the lift closes up and nontrivial when it ends at the antipode.
pub fn so3_lift_class(framing: &Framing, n_samples: usize) -> Result<LiftClass> {
    let mut n = n_samples.max(4);
    loop {
        if let Some(class) = try_lift(framing, n) {
            return Ok(class);
        }
        if n >= LIFT_SAMPLES_MAX {
            return Err(Error::LiftAmbiguous { samples: n });
        }
        n = (n * 2).min(LIFT_SAMPLES_MAX);
    }
}

fn try_lift(framing: &Framing, n: usize) -> Option<LiftClass> {
    let frames: Vec<_> = (0..=n).map(|i| framing.frame(i as f64 / n as f64).matrix()).collect();
    // Consecutive frames must differ by less than a quarter turn: tr(RᵀS) > 1.
    if frames.windows(2).any(|w| (w[0].transpose() * w[1]).trace() <= 1.0 + 2.0 * FRAC_PI_2.cos()) {
        return None;
    }
    let quat = |m| UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(m)).into_inner();
    let first = quat(frames[0]);
    let mut q = first;
    for m in &frames[1..] {
        let next = quat(*m);
        q = if q.dot(&next) >= 0.0 { next } else { -next };
    }
    if (q - first).norm() < 0.5 {
        Some(LiftClass::Trivial)
    } else if (q + first).norm() < 0.5 {
        Some(LiftClass::Nontrivial)
    } else {
        None
    }
}
