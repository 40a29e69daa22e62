//! Self-linking number `sl = η + τ_φ`, certified against the linking number
//! of the curve with its pushoff, plus the invariance harnesses built on it.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diagram::{combinatorial_linking, diagram_writhe};
use crate::error::{Error, Result};
use crate::framing::{
    frenet_framing, pushoff, so3_lift_class, total_torsion, twist_integral, Framing, FramingRule, LiftClass,
    LIFT_SAMPLES, PUSHOFF_RESOLUTION,
};
use crate::geometry::{Curve, Vec3};
use crate::quadrature::{linking_integral, writhe_integral, IntegralResult, QuadratureConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Rounding is refused at or above this distance to the nearest integer.
pub const MAX_RESIDUAL: f64 = 0.5;
/// Gap allowed between the analytic and combinatorial self-linking numbers.
pub const CALUGAREANU_TOLERANCE: f64 = 1e-2;
/// Allowed drift of `η` and `τ_φ` under reparametrization.
pub const REPARAM_TOLERANCE: f64 = 1e-6;
/// Allowed gap between the Frenet twist and the total torsion.
pub const FRENET_TOLERANCE: f64 = 1e-6;

/// Fixed generic direction used to project the curve and its pushoff.
pub fn default_oracle_direction() -> Vec3 {
    Vec3::new(0.2113, 0.3607, 0.9085).normalize()
}

/// Pushoff distance: a fixed value, or chosen by halving from 1% of the
/// diameter until the oracle integer is stable under one more halving.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Epsilon {
    #[default]
    Auto,
    Fixed(f64),
}

impl Serialize for Epsilon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Epsilon::Auto => s.serialize_str("auto"),
            Epsilon::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Epsilon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Value(f64),
            Keyword(String),
        }
        match Raw::deserialize(d)? {
            Raw::Value(v) if v > 0.0 && v.is_finite() => Ok(Epsilon::Fixed(v)),
            Raw::Value(v) => Err(serde::de::Error::custom(format!("epsilon must be positive, got {v}"))),
            Raw::Keyword(k) if k == "auto" => Ok(Epsilon::Auto),
            Raw::Keyword(k) => Err(serde::de::Error::custom(format!("epsilon must be a number or \"auto\", got \"{k}\""))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfLinkConfig {
    pub quadrature: QuadratureConfig,
    /// Grid for the twist integral; `None` uses the quadrature grid size.
    pub twist_samples: Option<usize>,
    /// Compute the pushoff linking number as an independent check.
    pub oracle: bool,
    pub epsilon: Epsilon,
    pub oracle_direction: Vec3,
    pub diagram_resolution: usize,
}

impl Default for SelfLinkConfig {
    fn default() -> Self {
        SelfLinkConfig {
            quadrature: QuadratureConfig::default(),
            twist_samples: None,
            oracle: true,
            epsilon: Epsilon::Auto,
            oracle_direction: default_oracle_direction(),
            diagram_resolution: 1024,
        }
    }
}

impl SelfLinkConfig {
    pub fn with_n(n: usize) -> Self {
        SelfLinkConfig { quadrature: QuadratureConfig::with_n(n), ..Default::default() }
    }

    pub fn without_oracle(self) -> Self {
        SelfLinkConfig { oracle: false, ..self }
    }

    fn twist_n(&self) -> usize {
        self.twist_samples.unwrap_or(self.quadrature.n).max(64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfLinkReport {
    pub schema_version: u32,
    pub status: ReportStatus,
    pub writhe: f64,
    pub writhe_error_estimate: f64,
    pub twist: f64,
    /// Present when the curvature never vanishes.
    pub total_torsion: Option<f64>,
    pub sl_real: f64,
    pub sl: i64,
    pub residual: f64,
    pub framing_class: LiftClass,
    pub oracle_sl: Option<i64>,
    /// `null` when no oracle ran.
    pub oracle_agrees: Option<bool>,
    pub epsilon: Option<f64>,
    pub quadrature: QuadratureConfig,
}

/// Pushoff linking number: `(epsilon, Lk(γ, γ + εn))`.
pub fn pushoff_linking(curve: &Curve, framing: &Framing, cfg: &SelfLinkConfig) -> Result<(f64, i64)> {
    let at = |eps: f64| -> Result<i64> {
        let p = pushoff(curve, framing, eps, PUSHOFF_RESOLUTION)?;
        combinatorial_linking(curve, &p, cfg.oracle_direction, cfg.diagram_resolution)
    };
    match cfg.epsilon {
        Epsilon::Fixed(eps) => Ok((eps, at(eps)?)),
        Epsilon::Auto => {
            let mut eps = 0.01 * curve.diameter();
            let mut last_err = None;
            for _ in 0..12 {
                match (at(eps), at(eps / 2.0)) {
                    (Ok(a), Ok(b)) if a == b => return Ok((eps, a)),
                    (Err(e @ Error::NonGenericDirection { .. }), _) | (_, Err(e @ Error::NonGenericDirection { .. })) => {
                        return Err(e)
                    }
                    (Err(e), _) | (_, Err(e)) => last_err = Some(e),
                    _ => {}
                }
                eps /= 2.0;
            }
            Err(last_err.unwrap_or(Error::PushoffCollision { epsilon: eps, distance: 0.0 }))
        }
    }
}

/// Builds the report; a residual at or above 0.5 yields a `Failed` report
/// rather than an error.
pub fn compute_self_link(curve: &Curve, framing: &Framing, cfg: &SelfLinkConfig) -> Result<SelfLinkReport> {
    let writhe = writhe_integral(curve, &cfg.quadrature)?;
    let twist = twist_integral(framing, cfg.twist_n())?;
    let total = frenet_framing(curve).ok().map(|_| total_torsion(curve, cfg.twist_n())).transpose()?;
    let sl_real = writhe.value + twist;
    let sl = sl_real.round() as i64;
    let residual = (sl_real - sl as f64).abs();
    let framing_class = so3_lift_class(framing, LIFT_SAMPLES)?;
    let (epsilon, oracle_sl) = if cfg.oracle {
        let (eps, lk) = pushoff_linking(curve, framing, cfg)?;
        (Some(eps), Some(lk))
    } else {
        (None, None)
    };
    Ok(SelfLinkReport {
        schema_version: SCHEMA_VERSION,
        status: if residual < MAX_RESIDUAL { ReportStatus::Ok } else { ReportStatus::Failed },
        writhe: writhe.value,
        writhe_error_estimate: writhe.error_estimate,
        twist,
        total_torsion: total,
        sl_real,
        sl,
        residual,
        framing_class,
        oracle_sl,
        oracle_agrees: oracle_sl.map(|o| o == sl),
        epsilon,
        quadrature: cfg.quadrature,
    })
}

/// `sl = round(η + τ_φ)` with its residual, framing class and (optionally)
/// the pushoff oracle.
pub fn self_link(curve: &Curve, framing: &Framing, cfg: &SelfLinkConfig) -> Result<SelfLinkReport> {
    let report = compute_self_link(curve, framing, cfg)?;
    if report.status == ReportStatus::Failed {
        return Err(Error::ReportFailed { sl_real: report.sl_real, residual: report.residual });
    }
    Ok(report)
}

/// The swaddling correction of a framing in the liftable (trivial) class,
/// represented by its twist `τ_φ`.
pub fn swaddle_correction(framing: &Framing, cfg: &SelfLinkConfig) -> Result<f64> {
    match so3_lift_class(framing, LIFT_SAMPLES)? {
        LiftClass::Nontrivial => Err(Error::NontrivialClass),
        LiftClass::Trivial => twist_integral(framing, cfg.twist_n()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalugareanuVerdict {
    pub pass: bool,
    pub tolerance: f64,
    pub epsilon: f64,
    /// `η + τ_φ`.
    pub analytic: f64,
    pub linking_integral: IntegralResult,
    pub oracle: i64,
    pub gap_analytic_oracle: f64,
    pub gap_integral_oracle: f64,
    pub gap_analytic_integral: f64,
}

/// Compares `η + τ_φ`, the Gauss integral `Lk(γ, γ_ε)` and the crossing count
/// of the same pair.
///
/// Passes when the analytic value is within `tolerance` of the oracle and the
/// Gauss integral is within `max(tolerance, its error estimate)` of it.
pub fn verify_calugareanu(
    curve: &Curve,
    framing: &Framing,
    epsilon: Epsilon,
    cfg: &SelfLinkConfig,
    tolerance: f64,
) -> Result<CalugareanuVerdict> {
    let cfg = SelfLinkConfig { epsilon, ..*cfg };
    let writhe = writhe_integral(curve, &cfg.quadrature)?;
    let twist = twist_integral(framing, cfg.twist_n())?;
    let analytic = writhe.value + twist;
    let (eps, oracle) = pushoff_linking(curve, framing, &cfg)?;
    let p = pushoff(curve, framing, eps, PUSHOFF_RESOLUTION)?;
    let lk = linking_integral(curve, &p, &cfg.quadrature)?;
    let gap_analytic_oracle = (analytic - oracle as f64).abs();
    let gap_integral_oracle = (lk.value - oracle as f64).abs();
    Ok(CalugareanuVerdict {
        pass: gap_analytic_oracle < tolerance && gap_integral_oracle < tolerance.max(lk.error_estimate),
        tolerance,
        epsilon: eps,
        analytic,
        linking_integral: lk,
        oracle,
        gap_analytic_oracle,
        gap_integral_oracle,
        gap_analytic_integral: (analytic - lk.value).abs(),
    })
}

/// `γ_u(t) = γ(t) + u·amplitude·sin(2π·mode·t + phase)·axis`, `u ∈ [0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotopyFamily {
    pub base: Curve,
    pub mode: i64,
    pub amplitude: f64,
    pub axis: Vec3,
    pub phase: f64,
}

impl IsotopyFamily {
    pub fn at(&self, u: f64) -> Curve {
        self.base.displaced(u * self.amplitude, self.mode, self.phase, self.axis)
    }

    /// Checks embedding at `u ∈ {0, 1/4, 1/2, 3/4, 1}` on a grid of `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        for u in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let d = self.at(u).min_nonadjacent_distance(n);
            if !(d > 1e-6) {
                return Err(Error::InvalidCurve(format!("isotopy family is not embedded at u = {u}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotopySample {
    pub u: f64,
    pub writhe: f64,
    pub twist: f64,
    pub sl: i64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceVerdict {
    pub pass: bool,
    pub samples: Vec<IsotopySample>,
    /// `max_u |η(u) − η(0)|`.
    pub writhe_spread: f64,
    pub twist_spread: f64,
}

impl InvarianceVerdict {
    pub fn check(&self) -> Result<()> {
        if self.pass {
            return Ok(());
        }
        let sls: Vec<i64> = self.samples.iter().map(|s| s.sl).collect();
        Err(Error::InvarianceViolated(format!("sl along the family: {sls:?}")))
    }
}

/// Re-derives the framing from `rule` at each `u` and records `sl(u)`.
pub fn verify_invariance(
    family: &IsotopyFamily,
    rule: &FramingRule,
    cfg: &SelfLinkConfig,
    u_samples: &[f64],
) -> Result<InvarianceVerdict> {
    family.validate(cfg.quadrature.n)?;
    let cfg = cfg.without_oracle();
    let mut samples = Vec::with_capacity(u_samples.len());
    let mut previous: Option<Framing> = None;
    for &u in u_samples {
        let curve = family.at(u);
        let framing = rule.apply(&curve)?;
        if let Some(prev) = &previous {
            let continuous = (0..256).all(|i| {
                let t = i as f64 / 256.0;
                prev.normal(t).dot(&framing.normal(t)) > 0.0
            });
            if !continuous {
                return Err(Error::InvalidFraming(format!("framing rule jumps between isotopy samples near u = {u}")));
            }
        }
        let writhe = writhe_integral(&curve, &cfg.quadrature)?.value;
        let twist = twist_integral(&framing, cfg.twist_n())?;
        let sl_real = writhe + twist;
        samples.push(IsotopySample { u, writhe, twist, sl: sl_real.round() as i64, residual: (sl_real - sl_real.round()).abs() });
        previous = Some(framing);
    }
    let spread = |f: fn(&IsotopySample) -> f64| {
        samples.first().map_or(0.0, |first| samples.iter().map(|s| (f(s) - f(first)).abs()).fold(0.0, f64::max))
    };
    let pass = samples.windows(2).all(|w| w[0].sl == w[1].sl) && samples.iter().all(|s| s.residual < MAX_RESIDUAL);
    Ok(InvarianceVerdict { pass, writhe_spread: spread(|s| s.writhe), twist_spread: spread(|s| s.twist), samples })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReparamSample {
    pub shift: f64,
    pub writhe: f64,
    pub twist: f64,
    pub sl: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReparamVerdict {
    pub pass: bool,
    pub samples: Vec<ReparamSample>,
    pub max_writhe_gap: f64,
    pub max_twist_gap: f64,
}

/// `sl`, `η` and `τ_φ` under `t ↦ t + c`, against the unshifted curve.
pub fn reparametrization_check(
    curve: &Curve,
    rule: &FramingRule,
    shifts: &[f64],
    cfg: &SelfLinkConfig,
) -> Result<ReparamVerdict> {
    if shifts.iter().any(|c| !(0.0..1.0).contains(c)) {
        return Err(Error::InvalidConfig("shifts must lie in [0, 1)".into()));
    }
    let eval = |shift: f64| -> Result<ReparamSample> {
        let c = curve.shifted(shift);
        let f = rule.apply(&c)?;
        let writhe = writhe_integral(&c, &cfg.quadrature)?.value;
        let twist = twist_integral(&f, cfg.twist_n())?;
        Ok(ReparamSample { shift, writhe, twist, sl: (writhe + twist).round() as i64 })
    };
    let reference = eval(0.0)?;
    let samples = shifts.iter().map(|&c| eval(c)).collect::<Result<Vec<_>>>()?;
    let max_writhe_gap = samples.iter().map(|s| (s.writhe - reference.writhe).abs()).fold(0.0, f64::max);
    let max_twist_gap = samples.iter().map(|s| (s.twist - reference.twist).abs()).fold(0.0, f64::max);
    let pass = samples.iter().all(|s| s.sl == reference.sl)
        && max_writhe_gap < REPARAM_TOLERANCE
        && max_twist_gap < REPARAM_TOLERANCE;
    Ok(ReparamVerdict { pass, samples, max_writhe_gap, max_twist_gap })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistShiftEntry {
    pub twists: i64,
    pub sl: i64,
    pub shift: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistShiftVerdict {
    pub pass: bool,
    pub base_sl: i64,
    pub entries: Vec<TwistShiftEntry>,
}

/// `sl(add_twists(f, k)) − sl(f) = k` for each `k`.
pub fn verify_twist_shift(curve: &Curve, rule: &FramingRule, ks: &[i64], cfg: &SelfLinkConfig) -> Result<TwistShiftVerdict> {
    let cfg = cfg.without_oracle();
    let writhe = writhe_integral(curve, &cfg.quadrature)?.value;
    let sl_for = |r: &FramingRule| -> Result<i64> {
        let f = r.apply(curve)?;
        let sl_real = writhe + twist_integral(&f, cfg.twist_n())?;
        let sl = sl_real.round();
        if (sl_real - sl).abs() >= MAX_RESIDUAL {
            return Err(Error::ReportFailed { sl_real, residual: (sl_real - sl).abs() });
        }
        Ok(sl as i64)
    };
    let base_sl = sl_for(rule)?;
    let entries = ks
        .iter()
        .map(|&k| {
            let sl = sl_for(&rule.twisted(k))?;
            Ok(TwistShiftEntry { twists: k, sl, shift: sl - base_sl })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TwistShiftVerdict { pass: entries.iter().all(|e| e.shift == e.twists), base_sl, entries })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlackboardEntry {
    pub direction: [f64; 3],
    pub sl: i64,
    pub residual: f64,
    pub diagram_writhe: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlackboardVerdict {
    pub pass: bool,
    pub entries: Vec<BlackboardEntry>,
}

/// `sl` under the projection framing along `d` against the diagram writhe
/// along `d`, for each direction.
pub fn verify_blackboard(curve: &Curve, directions: &[Vec3], cfg: &SelfLinkConfig) -> Result<BlackboardVerdict> {
    let writhe = writhe_integral(curve, &cfg.quadrature)?.value;
    let mut entries = Vec::with_capacity(directions.len());
    for d in directions {
        let diagram = crate::diagram::project(&[curve], *d, cfg.diagram_resolution)?;
        // Use the direction the diagram settled on so both sides see the same projection.
        let used = diagram.direction;
        let f = FramingRule::Projection(used).apply(curve)?;
        let sl_real = writhe + twist_integral(&f, cfg.twist_n())?;
        entries.push(BlackboardEntry {
            direction: [used.x, used.y, used.z],
            sl: sl_real.round() as i64,
            residual: (sl_real - sl_real.round()).abs(),
            diagram_writhe: diagram_writhe(curve, used, cfg.diagram_resolution)?,
        });
    }
    let pass = entries.iter().all(|e| e.sl == e.diagram_writhe && e.residual < MAX_RESIDUAL);
    Ok(BlackboardVerdict { pass, entries })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrenetVerdict {
    pub pass: bool,
    pub twist: f64,
    pub total_torsion: f64,
    pub gap: f64,
    pub n: usize,
}

/// Twist of the Frenet framing against the total torsion.
pub fn verify_frenet(curve: &Curve, n: usize) -> Result<FrenetVerdict> {
    let twist = twist_integral(&frenet_framing(curve)?, n)?;
    let total = total_torsion(curve, n)?;
    let gap = (twist - total).abs();
    Ok(FrenetVerdict { pass: gap < FRENET_TOLERANCE, twist, total_torsion: total, gap, n })
}
