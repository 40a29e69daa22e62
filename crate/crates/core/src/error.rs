use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid framing: {0}")]
    InvalidFraming(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("torsion undefined at t = {t}: |γ′×γ″| below 1e-9")]
    TorsionUndefined { t: f64 },
    #[error("Frenet frame undefined at t = {t}: curvature vanishes")]
    FrameUndefined { t: f64 },
    #[error("curvature vanishes at t = {t}")]
    CurvatureVanishes { t: f64 },
    #[error("projection direction is parallel to the tangent at t = {t}")]
    DirectionDegenerate { t: f64 },
    #[error("pushoff at epsilon = {epsilon} comes within {distance:.3e} of the base curve")]
    PushoffCollision { epsilon: f64, distance: f64 },
    #[error("could not lift the frame loop to unit quaternions with {samples} samples")]
    LiftAmbiguous { samples: usize },

    #[error("Gauss map undefined: the two points coincide")]
    CoincidentPoints,
    #[error("curves intersect (sample distance {distance:.3e})")]
    CurvesIntersect { distance: f64 },
    #[error("curve self-intersects at resolution {n} (sample distance {distance:.3e})")]
    SelfIntersection { n: usize, distance: f64 },
    #[error("quadrature symmetry check failed: {upper} vs {lower}")]
    QuadratureAsymmetry { upper: f64, lower: f64 },

    #[error("no generic projection direction found; tried {}", fmt_dirs(.attempted))]
    NonGenericDirection { attempted: Vec<[f64; 3]> },
    #[error("degenerate crossing: projected tangents are parallel")]
    DegenerateCrossing,
    #[error("inter-strand crossing sum {sum} is odd")]
    OddCrossingParity { sum: i64 },
    #[error("cross-tangent scan hit a zero on a grid line after {attempts} offsets")]
    ZeroOnGridLine { attempts: usize },

    #[error("self-linking residual {residual:.3e} is too large to round (sl_real = {sl_real})")]
    ReportFailed { sl_real: f64, residual: f64 },
    #[error("framing is in the nontrivial class of π1(SO(3)); no swaddling lift exists")]
    NontrivialClass,
    #[error("invariance violated: {0}")]
    InvarianceViolated(String),
}

fn fmt_dirs(dirs: &[[f64; 3]]) -> String {
    dirs.iter()
        .map(|d| format!("({:.6},{:.6},{:.6})", d[0], d[1], d[2]))
        .collect::<Vec<_>>()
        .join(" ")
}
