use std::path::{Path, PathBuf};

use serde::Deserialize;
use selflink_core::invariant::Epsilon;
use selflink_core::{Curve, CurveSpec, FramingRule, FramingSpec, IsotopyFamily, QuadratureConfig, Vec3};

pub const FIXTURES_ENV: &str = "SELFLINK_FIXTURES";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

fn schema_v1() -> u32 {
    1
}

/// One framed curve and everything needed to run it.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "schema_v1")]
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub curve: CurveSpec,
    pub framing: FramingSpec,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub epsilon: Epsilon,
    /// Output file; stdout when absent.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Second curve for linking-number convergence and two-strand diagrams.
    #[serde(default)]
    pub partner: Option<CurveSpec>,
    #[serde(default)]
    pub verify: VerifyOptions,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyOptions {
    #[serde(default)]
    pub twists: Option<Vec<i64>>,
    #[serde(default)]
    pub directions: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    pub isotopy: Option<IsotopyOptions>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsotopyOptions {
    pub mode: i64,
    pub amplitude: f64,
    pub axis: [f64; 3],
    #[serde(default)]
    pub phase: f64,
    #[serde(default = "default_u")]
    pub u: Vec<f64>,
}

fn default_u() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    schema_version: u32,
    fixtures: Vec<RunConfig>,
}

/// A fully validated fixture.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub config: RunConfig,
    pub curve: Curve,
    pub rule: FramingRule,
    pub partner: Option<Curve>,
}

impl Fixture {
    pub fn isotopy(&self) -> Result<Option<IsotopyFamily>, String> {
        let Some(iso) = &self.config.verify.isotopy else { return Ok(None) };
        let axis = Vec3::from(iso.axis);
        if !(axis.norm() > 1e-12) {
            return Err(format!("{}: isotopy axis must be nonzero", self.name));
        }
        Ok(Some(IsotopyFamily {
            base: self.curve.clone(),
            mode: iso.mode,
            amplitude: iso.amplitude,
            axis: axis.normalize(),
            phase: iso.phase,
        }))
    }
}

/// Finds `path` as given, or relative to `$SELFLINK_FIXTURES`.
pub fn resolve(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    if let Some(dir) = std::env::var_os(FIXTURES_ENV) {
        let dir = PathBuf::from(dir);
        for candidate in [dir.join(path), path.file_name().map(|f| dir.join(f)).unwrap_or_default()] {
            if candidate.is_file() {
                return candidate;
            }
        }
    }
    path.to_path_buf()
}

/// Reads a single-fixture config or a `{"fixtures": [...]}` suite.
pub fn load(path: &Path) -> Result<Vec<Fixture>, String> {
    let path = resolve(path);
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let shown = path.display();
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| format!("{shown}: {e}"))?;
    let configs = if value.get("fixtures").is_some() {
        let suite: SuiteFile = serde_json::from_str(&text).map_err(|e| format!("{shown}: {e}"))?;
        check_schema(suite.schema_version)?;
        suite.fixtures
    } else {
        vec![serde_json::from_str::<RunConfig>(&text).map_err(|e| format!("{shown}: {e}"))?]
    };
    if configs.is_empty() {
        return Err(format!("{shown}: no fixtures"));
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    configs
        .into_iter()
        .enumerate()
        .map(|(i, config)| {
            let name = config.name.clone().unwrap_or_else(|| if i == 0 { stem.clone() } else { format!("{stem}[{i}]") });
            validate(name, config).map_err(|e| format!("{shown}: {e}"))
        })
        .collect()
}

fn check_schema(version: u32) -> Result<(), String> {
    if version != 1 {
        return Err(format!("unsupported schema_version {version}, expected 1"));
    }
    Ok(())
}

fn validate(name: String, config: RunConfig) -> Result<Fixture, String> {
    check_schema(config.schema_version)?;
    config.quadrature.validate().map_err(|e| format!("{name}: {e}"))?;
    let curve = Curve::from_spec(&config.curve).map_err(|e| format!("{name}: {e}"))?;
    let rule = FramingRule::from_spec(&config.framing).map_err(|e| format!("{name}: {e}"))?;
    let partner = config.partner.as_ref().map(Curve::from_spec).transpose().map_err(|e| format!("{name}: partner: {e}"))?;
    Ok(Fixture { name, config, curve, rule, partner })
}
