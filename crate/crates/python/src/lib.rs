//! Python bindings: curves, framings, the self-linking report and the
//! combinatorial oracle.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use selflink_core::diagram;
use selflink_core::framing::{self as fr, LIFT_SAMPLES};
use selflink_core::invariant::{self, Epsilon, SelfLinkConfig};
use selflink_core::quadrature::{linking_integral, writhe_integral};
use selflink_core::{CurveSpec, FramingRule, FramingSpec, LiftClass, QuadratureConfig, Vec3};

create_exception!(selflink, SelfLinkError, PyException);

fn err(e: selflink_core::Error) -> PyErr {
    SelfLinkError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    SelfLinkError::new_err(e.to_string())
}

fn vec3(v: [f64; 3]) -> Vec3 {
    Vec3::from(v)
}

fn arr(v: Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn class_name(c: LiftClass) -> &'static str {
    match c {
        LiftClass::Trivial => "trivial",
        LiftClass::Nontrivial => "nontrivial",
    }
}

/// A smooth closed curve parametrized over `[0, 1)`.
#[pyclass(frozen, from_py_object, module = "selflink")]
#[derive(Clone)]
struct Curve(selflink_core::Curve);

#[pymethods]
impl Curve {
    #[staticmethod]
    #[pyo3(signature = (radius = 1.0))]
    fn circle(radius: f64) -> PyResult<Self> {
        selflink_core::Curve::circle(radius).map(Curve).map_err(err)
    }

    #[staticmethod]
    fn torus_knot(p: i64, q: i64, major: f64, minor: f64) -> PyResult<Self> {
        selflink_core::Curve::torus_knot(p, q, major, minor).map(Curve).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (radius, radial, amplitude, mode))]
    fn perturbed_circle(radius: f64, radial: f64, amplitude: f64, mode: i64) -> PyResult<Self> {
        selflink_core::Curve::perturbed_circle(radius, radial, amplitude, mode).map(Curve).map_err(err)
    }

    /// Periodic cubic spline through points taken at `t_i = i/N`.
    #[staticmethod]
    fn sampled(points: Vec<[f64; 3]>) -> PyResult<Self> {
        selflink_core::Curve::sampled(points.into_iter().map(vec3).collect()).map(Curve).map_err(err)
    }

    /// Builds a curve from a JSON curve spec (`{"kind": ..., "params": {...}}`).
    #[staticmethod]
    fn from_json(spec: &str) -> PyResult<Self> {
        let spec: CurveSpec = serde_json::from_str(spec).map_err(json_err)?;
        selflink_core::Curve::from_spec(&spec).map(Curve).map_err(err)
    }

    fn eval(&self, t: f64) -> [f64; 3] {
        arr(self.0.eval(t))
    }

    fn tangent(&self, t: f64) -> [f64; 3] {
        arr(self.0.unit_tangent(t))
    }

    fn curvature(&self, t: f64) -> f64 {
        self.0.curvature(t)
    }

    fn torsion(&self, t: f64) -> PyResult<f64> {
        self.0.torsion(t).map_err(err)
    }

    fn samples(&self, n: usize) -> Vec<[f64; 3]> {
        self.0.samples(n).into_iter().map(arr).collect()
    }

    fn diameter(&self) -> f64 {
        self.0.diameter()
    }

    fn shifted(&self, c: f64) -> Self {
        Curve(self.0.shifted(c))
    }

    fn reversed(&self) -> Self {
        Curve(self.0.reversed())
    }

    fn mirrored(&self) -> Self {
        Curve(self.0.mirrored())
    }

    fn translated(&self, offset: [f64; 3]) -> Self {
        Curve(self.0.translated(vec3(offset)))
    }

    fn __repr__(&self) -> String {
        format!("Curve(kind={:?})", self.0.kind())
    }
}

/// A unit normal field along a curve.
#[pyclass(frozen, skip_from_py_object, module = "selflink")]
#[derive(Clone)]
struct Framing(fr::Framing);

#[pymethods]
impl Framing {
    #[staticmethod]
    fn frenet(curve: &Curve) -> PyResult<Self> {
        fr::frenet_framing(&curve.0).map(Framing).map_err(err)
    }

    /// Blackboard framing: `direction` projected onto each normal plane.
    #[staticmethod]
    fn projection(curve: &Curve, direction: [f64; 3]) -> PyResult<Self> {
        fr::projection_framing(&curve.0, vec3(direction)).map(Framing).map_err(err)
    }

    /// Applies a JSON framing spec (`{"kind": "twisted", ...}`) to `curve`.
    #[staticmethod]
    fn from_json(curve: &Curve, spec: &str) -> PyResult<Self> {
        let spec: FramingSpec = serde_json::from_str(spec).map_err(json_err)?;
        FramingRule::from_spec(&spec).and_then(|r| r.apply(&curve.0)).map(Framing).map_err(err)
    }

    fn add_twists(&self, k: i64) -> Self {
        Framing(fr::add_twists(&self.0, k))
    }

    fn normal(&self, t: f64) -> [f64; 3] {
        arr(self.0.normal(t))
    }

    #[pyo3(signature = (n = 512))]
    fn twist(&self, n: usize) -> PyResult<f64> {
        fr::twist_integral(&self.0, n).map_err(err)
    }

    /// `"trivial"` or `"nontrivial"`.
    fn lift_class(&self) -> PyResult<&'static str> {
        fr::so3_lift_class(&self.0, LIFT_SAMPLES).map(class_name).map_err(err)
    }

    /// `γ + ε·n` as a sampled curve.
    #[pyo3(signature = (epsilon, resolution = 1024))]
    fn pushoff(&self, epsilon: f64, resolution: usize) -> PyResult<Curve> {
        fr::pushoff(self.0.curve(), &self.0, epsilon, resolution).map(Curve).map_err(err)
    }

    fn curve(&self) -> Curve {
        Curve(self.0.curve().clone())
    }
}

#[pyclass(frozen, get_all, module = "selflink")]
struct SelfLinkReport {
    status: String,
    writhe: f64,
    twist: f64,
    total_torsion: Option<f64>,
    sl_real: f64,
    sl: i64,
    residual: f64,
    framing_class: String,
    oracle_sl: Option<i64>,
    oracle_agrees: Option<bool>,
    epsilon: Option<f64>,
    json: String,
}

#[pymethods]
impl SelfLinkReport {
    fn to_json(&self) -> String {
        self.json.clone()
    }

    fn __repr__(&self) -> String {
        format!("SelfLinkReport(sl={}, sl_real={}, residual={:.3e}, framing_class={:?})", self.sl, self.sl_real, self.residual, self.framing_class)
    }
}

fn config(n: usize, oracle: bool, epsilon: Option<f64>, parallel: bool) -> SelfLinkConfig {
    SelfLinkConfig {
        quadrature: QuadratureConfig { n, parallel, ..QuadratureConfig::default() },
        oracle,
        epsilon: epsilon.map_or(Epsilon::Auto, Epsilon::Fixed),
        ..SelfLinkConfig::default()
    }
}

/// `η + τ_φ` rounded, with the pushoff linking number as an optional check.
/// Raises when the residual is too large to round.
#[pyfunction]
#[pyo3(signature = (curve, framing, n = 512, oracle = true, epsilon = None, parallel = true))]
fn self_link(
    py: Python<'_>,
    curve: &Curve,
    framing: &Framing,
    n: usize,
    oracle: bool,
    epsilon: Option<f64>,
    parallel: bool,
) -> PyResult<SelfLinkReport> {
    let cfg = config(n, oracle, epsilon, parallel);
    let r = py.detach(|| invariant::self_link(&curve.0, &framing.0, &cfg)).map_err(err)?;
    Ok(SelfLinkReport {
        status: if r.status == invariant::ReportStatus::Ok { "ok" } else { "failed" }.into(),
        writhe: r.writhe,
        twist: r.twist,
        total_torsion: r.total_torsion,
        sl_real: r.sl_real,
        sl: r.sl,
        residual: r.residual,
        framing_class: class_name(r.framing_class).into(),
        oracle_sl: r.oracle_sl,
        oracle_agrees: r.oracle_agrees,
        epsilon: r.epsilon,
        json: serde_json::to_string(&r).map_err(json_err)?,
    })
}

/// `(value, error_estimate)` of the writhe integral.
#[pyfunction]
#[pyo3(signature = (curve, n = 512))]
fn writhe(py: Python<'_>, curve: &Curve, n: usize) -> PyResult<(f64, f64)> {
    let r = py.detach(|| writhe_integral(&curve.0, &QuadratureConfig::with_n(n))).map_err(err)?;
    Ok((r.value, r.error_estimate))
}

/// `(value, error_estimate)` of the Gauss linking integral.
#[pyfunction]
#[pyo3(signature = (a, b, n = 512))]
fn linking(py: Python<'_>, a: &Curve, b: &Curve, n: usize) -> PyResult<(f64, f64)> {
    let r = py.detach(|| linking_integral(&a.0, &b.0, &QuadratureConfig::with_n(n))).map_err(err)?;
    Ok((r.value, r.error_estimate))
}

#[pyfunction]
#[pyo3(signature = (curve, n = 2048))]
fn total_torsion(curve: &Curve, n: usize) -> PyResult<f64> {
    fr::total_torsion(&curve.0, n).map_err(err)
}

/// Twist of a framing in the liftable class; raises for the other class.
#[pyfunction]
#[pyo3(signature = (framing, n = 512))]
fn swaddle_correction(framing: &Framing, n: usize) -> PyResult<f64> {
    invariant::swaddle_correction(&framing.0, &config(n, false, None, true)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (curve, direction, n = 1024))]
fn diagram_writhe(curve: &Curve, direction: [f64; 3], n: usize) -> PyResult<i64> {
    diagram::diagram_writhe(&curve.0, vec3(direction), n).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (a, b, direction, n = 1024))]
fn combinatorial_linking(a: &Curve, b: &Curve, direction: [f64; 3], n: usize) -> PyResult<i64> {
    diagram::combinatorial_linking(&a.0, &b.0, vec3(direction), n).map_err(err)
}

/// Crossings along `direction` as `(strand_a, strand_b, s, t, sign, over)`.
#[pyfunction]
#[pyo3(signature = (curves, direction, n = 1024))]
fn crossings(curves: Vec<Curve>, direction: [f64; 3], n: usize) -> PyResult<Vec<(usize, usize, f64, f64, i8, u8)>> {
    let refs: Vec<&selflink_core::Curve> = curves.iter().map(|c| &c.0).collect();
    let d = diagram::project(&refs, vec3(direction), n).map_err(err)?;
    Ok(d.crossings.iter().map(|c| (c.strands.0, c.strands.1, c.s, c.t, c.sign, c.over)).collect())
}

#[pyfunction]
#[pyo3(signature = (curve, n = 512))]
fn cross_tangent_count(curve: &Curve, n: usize) -> PyResult<i64> {
    diagram::cross_tangent_count(&curve.0, n).map(|c| c.count).map_err(err)
}

#[pymodule]
fn selflink(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Curve>()?;
    m.add_class::<Framing>()?;
    m.add_class::<SelfLinkReport>()?;
    m.add("SelfLinkError", m.py().get_type::<SelfLinkError>())?;
    m.add_function(wrap_pyfunction!(self_link, m)?)?;
    m.add_function(wrap_pyfunction!(writhe, m)?)?;
    m.add_function(wrap_pyfunction!(linking, m)?)?;
    m.add_function(wrap_pyfunction!(total_torsion, m)?)?;
    m.add_function(wrap_pyfunction!(swaddle_correction, m)?)?;
    m.add_function(wrap_pyfunction!(diagram_writhe, m)?)?;
    m.add_function(wrap_pyfunction!(combinatorial_linking, m)?)?;
    m.add_function(wrap_pyfunction!(crossings, m)?)?;
    m.add_function(wrap_pyfunction!(cross_tangent_count, m)?)?;
    Ok(())
}
