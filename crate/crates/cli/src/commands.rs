use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use selflink_core::diagram::project;
use selflink_core::invariant::{
    compute_self_link, verify_blackboard, verify_calugareanu, verify_frenet, verify_invariance, verify_twist_shift,
    Epsilon, ReportStatus, SelfLinkConfig, CALUGAREANU_TOLERANCE,
};
use selflink_core::quadrature::{convergence_study, observed_orders, ConvergenceTarget};
use selflink_core::{Error, SelfLinkReport, Vec3};

use crate::config::{Fixture, Format};
use crate::output::{float, to_json};

pub const SUITES: [&str; 5] = ["calugareanu", "invariance", "frenet", "blackboard", "twist-shift"];

pub enum Failure {
    /// Bad input: exit 1.
    Input(String),
    /// The numerics could not certify a result: exit 2.
    Quality(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Quality(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Quality(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let quality = matches!(
            e,
            Error::PushoffCollision { .. }
                | Error::LiftAmbiguous { .. }
                | Error::QuadratureAsymmetry { .. }
                | Error::NonGenericDirection { .. }
                | Error::DegenerateCrossing
                | Error::OddCrossingParity { .. }
                | Error::ZeroOnGridLine { .. }
                | Error::ReportFailed { .. }
        );
        if quality {
            Failure::Quality(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

pub type Outcome = Result<u8, Failure>;

fn context(name: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{name}: {m}")),
        Failure::Quality(m) => Failure::Quality(format!("{name}: {m}")),
    }
}

fn self_link_config(fx: &Fixture) -> SelfLinkConfig {
    SelfLinkConfig { quadrature: fx.config.quadrature, epsilon: fx.config.epsilon, ..SelfLinkConfig::default() }
}

pub struct ComputeArgs {
    pub n: Option<usize>,
    pub epsilon: Option<Epsilon>,
    pub no_oracle: bool,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Serialize)]
struct NamedReport<'a> {
    name: &'a str,
    report: &'a SelfLinkReport,
}

#[derive(Serialize)]
struct ReportSet<'a> {
    schema_version: u32,
    reports: Vec<NamedReport<'a>>,
}

const CSV_HEADER: &str =
    "name,status,sl,sl_real,residual,writhe,twist,total_torsion,framing_class,oracle_sl,oracle_agrees,epsilon,n";

fn csv_row(name: &str, r: &SelfLinkReport) -> String {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let class = serde_json::to_value(r.framing_class).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let status = if r.status == ReportStatus::Ok { "ok" } else { "failed" };
    format!(
        "{name},{status},{},{},{},{},{},{},{class},{},{},{},{}",
        r.sl,
        float(r.sl_real),
        float(r.residual),
        float(r.writhe),
        float(r.twist),
        opt(r.total_torsion.map(float)),
        opt(r.oracle_sl.map(|v| v.to_string())),
        opt(r.oracle_agrees.map(|v| v.to_string())),
        opt(r.epsilon.map(float)),
        r.quadrature.n,
    )
}

pub fn compute(fixtures: &mut [Fixture], args: &ComputeArgs) -> Outcome {
    let mut reports = Vec::with_capacity(fixtures.len());
    for fx in fixtures.iter_mut() {
        if let Some(n) = args.n {
            fx.config.quadrature.n = n;
            fx.config.quadrature.validate().map_err(context(&fx.name))?;
        }
        if let Some(eps) = args.epsilon {
            fx.config.epsilon = eps;
        }
        let mut cfg = self_link_config(fx);
        cfg.oracle = !args.no_oracle;
        let framing = fx.rule.apply(&fx.curve).map_err(context(&fx.name))?;
        let report = compute_self_link(&fx.curve, &framing, &cfg).map_err(context(&fx.name))?;
        eprintln!(
            "{}: sl = {} (sl_real {:.12}, residual {:.2e}, class {:?}{})",
            fx.name,
            report.sl,
            report.sl_real,
            report.residual,
            report.framing_class,
            report.oracle_sl.map(|o| format!(", oracle {o}")).unwrap_or_default()
        );
        reports.push(report);
    }

    let format = args.format.unwrap_or(fixtures[0].config.format);
    let text = match format {
        Format::Json if reports.len() == 1 => to_json(&reports[0]),
        Format::Json => to_json(&ReportSet {
            schema_version: 1,
            reports: fixtures.iter().zip(&reports).map(|(f, r)| NamedReport { name: &f.name, report: r }).collect(),
        }),
        Format::Csv => {
            let mut s = format!("{CSV_HEADER}\n");
            for (f, r) in fixtures.iter().zip(&reports) {
                s.push_str(&csv_row(&f.name, r));
                s.push('\n');
            }
            s
        }
    };
    let output = args.output.clone().or_else(|| fixtures[0].config.output.clone());
    write_out(output.as_deref(), &text)?;

    let failed = reports.iter().any(|r| r.status == ReportStatus::Failed || r.oracle_agrees == Some(false));
    Ok(if failed { 2 } else { 0 })
}

fn write_out(path: Option<&std::path::Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

#[derive(Serialize)]
struct SuiteEntry {
    name: String,
    pass: bool,
    verdict: serde_json::Value,
}

#[derive(Serialize)]
struct SuiteResult<'a> {
    schema_version: u32,
    suite: &'a str,
    pass: bool,
    results: Vec<SuiteEntry>,
}

fn default_directions() -> Vec<Vec3> {
    vec![
        Vec3::new(0.2113, 0.3607, 0.9085),
        Vec3::new(0.83, -0.31, 0.46),
        Vec3::new(-0.42, 0.77, 0.48),
        Vec3::new(-0.58, -0.61, 0.54),
    ]
}

fn verdict<T: Serialize>(v: &T, pass: bool, name: &str) -> SuiteEntry {
    SuiteEntry { name: name.to_string(), pass, verdict: serde_json::to_value(v).expect("verdicts serialize") }
}

pub fn verify(suite: &str, fixtures: &mut [Fixture], n: Option<usize>, json: bool) -> Outcome {
    if !SUITES.contains(&suite) {
        return Err(Failure::Input(format!("unknown suite \"{suite}\"; valid suites: {}", SUITES.join(", "))));
    }
    let mut results = Vec::new();
    for fx in fixtures.iter_mut() {
        if let Some(n) = n {
            fx.config.quadrature.n = n;
            fx.config.quadrature.validate().map_err(context(&fx.name))?;
        }
        let cfg = self_link_config(fx);
        let name = fx.name.as_str();
        let ctx = context(name);
        let entry = match suite {
            "calugareanu" => {
                let framing = fx.rule.apply(&fx.curve).map_err(&ctx)?;
                let v = verify_calugareanu(&fx.curve, &framing, fx.config.epsilon, &cfg, CALUGAREANU_TOLERANCE)
                    .map_err(&ctx)?;
                eprintln!(
                    "{name}: oracle {} analytic {:.9} gap {:.2e} ({})",
                    v.oracle,
                    v.analytic,
                    v.gap_analytic_oracle,
                    pass_word(v.pass)
                );
                verdict(&v, v.pass, name)
            }
            "invariance" => {
                let Some(family) = fx.isotopy().map_err(Failure::Input)? else {
                    eprintln!("{name}: no verify.isotopy family, skipped");
                    continue;
                };
                let us = &fx.config.verify.isotopy.as_ref().expect("checked above").u;
                let v = verify_invariance(&family, &fx.rule, &cfg, us).map_err(&ctx)?;
                let sls: Vec<i64> = v.samples.iter().map(|s| s.sl).collect();
                eprintln!("{name}: sl(u) = {sls:?}, writhe spread {:.3e} ({})", v.writhe_spread, pass_word(v.pass));
                verdict(&v, v.pass, name)
            }
            "frenet" => {
                let v = verify_frenet(&fx.curve, cfg.quadrature.n).map_err(&ctx)?;
                eprintln!("{name}: twist {:.12} total torsion {:.12} gap {:.2e} ({})", v.twist, v.total_torsion, v.gap, pass_word(v.pass));
                verdict(&v, v.pass, name)
            }
            "blackboard" => {
                let dirs = match &fx.config.verify.directions {
                    Some(d) => d.iter().map(|d| Vec3::from(*d)).collect(),
                    None => default_directions(),
                };
                let v = verify_blackboard(&fx.curve, &dirs, &cfg).map_err(&ctx)?;
                for e in &v.entries {
                    eprintln!("{name}: direction {:?} sl {} diagram writhe {}", e.direction, e.sl, e.diagram_writhe);
                }
                eprintln!("{name}: {}", pass_word(v.pass));
                verdict(&v, v.pass, name)
            }
            "twist-shift" => {
                let ks = fx.config.verify.twists.clone().unwrap_or_else(|| vec![-2, -1, 1, 2]);
                let v = verify_twist_shift(&fx.curve, &fx.rule, &ks, &cfg).map_err(&ctx)?;
                let shifts: Vec<(i64, i64)> = v.entries.iter().map(|e| (e.twists, e.shift)).collect();
                eprintln!("{name}: base sl {} (twists, shift) {shifts:?} ({})", v.base_sl, pass_word(v.pass));
                verdict(&v, v.pass, name)
            }
            _ => unreachable!("suite validated above"),
        };
        results.push(entry);
    }
    if results.is_empty() {
        return Err(Failure::Input(format!("no fixture in the config can run the {suite} suite")));
    }
    let pass = results.iter().all(|r| r.pass);
    if json {
        write_out(None, &to_json(&SuiteResult { schema_version: 1, suite, pass, results }))?;
    }
    eprintln!("suite {suite}: {}", pass_word(pass));
    Ok(if pass { 0 } else { 3 })
}

fn pass_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    Writhe,
    Linking,
    Twist,
}

pub fn parse_n_list(s: &str) -> Result<Vec<usize>, Failure> {
    let list: Vec<usize> = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| Failure::Input(format!("bad grid size \"{x}\" in --n-list"))))
        .collect::<Result<_, _>>()?;
    if list.is_empty() {
        return Err(Failure::Input("--n-list is empty".into()));
    }
    Ok(list)
}

pub fn converge(target: Target, fx: &Fixture, n_list: &[usize]) -> Outcome {
    let ctx = context(&fx.name);
    let framing;
    let target = match target {
        Target::Writhe => ConvergenceTarget::Writhe(&fx.curve),
        Target::Linking => {
            let partner = fx
                .partner
                .as_ref()
                .ok_or_else(|| Failure::Input(format!("{}: linking convergence needs a \"partner\" curve", fx.name)))?;
            ConvergenceTarget::Linking(&fx.curve, partner)
        }
        Target::Twist => {
            framing = fx.rule.apply(&fx.curve).map_err(&ctx)?;
            ConvergenceTarget::Twist(&framing)
        }
    };
    let rows = convergence_study(target, n_list, &fx.config.quadrature).map_err(&ctx)?;
    let values: Vec<f64> = rows.iter().map(|(_, v)| *v).collect();
    let orders = observed_orders(&values);
    let mut text = String::from("n,value,diff_prev,observed_order\n");
    for (i, (n, v)) in rows.iter().enumerate() {
        let diff = if i > 0 { float(v - values[i - 1]) } else { String::new() };
        let order = orders[i].map(float).unwrap_or_default();
        text.push_str(&format!("{n},{},{diff},{order}\n", float(*v)));
    }
    write_out(None, &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct CrossingOut {
    strands: [usize; 2],
    s: f64,
    t: f64,
    sign: i8,
    over: u8,
}

#[derive(Serialize)]
struct DiagramOut {
    schema_version: u32,
    requested_direction: [f64; 3],
    direction: [f64; 3],
    attempts: usize,
    crossings: Vec<CrossingOut>,
    writhe: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    linking: Option<i64>,
}

pub fn parse_direction(s: &str) -> Result<Vec3, Failure> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Failure::Input(format!("bad direction component \"{x}\""))))
        .collect::<Result<_, _>>()?;
    let [x, y, z] = parts[..] else {
        return Err(Failure::Input(format!("direction needs three components, got {}", parts.len())));
    };
    let d = Vec3::new(x, y, z);
    if !(d.norm() > 1e-12 && d.norm().is_finite()) {
        return Err(Failure::Input(format!("direction {s} cannot be normalized")));
    }
    Ok(d)
}

pub fn crossings(fx: &Fixture, direction: Vec3, n: usize) -> Outcome {
    let mut curves = vec![&fx.curve];
    curves.extend(fx.partner.as_ref());
    let d = project(&curves, direction, n).map_err(|e| match e {
        Error::NonGenericDirection { attempted } => {
            let list: Vec<String> = attempted.iter().map(|a| format!("{},{},{}", a[0], a[1], a[2])).collect();
            Failure::Quality(format!("{}: no generic direction found; attempted:\n  {}", fx.name, list.join("\n  ")))
        }
        e => context(&fx.name)(e),
    })?;
    let linking = fx.partner.as_ref().map(|_| {
        let sum = d.inter_strand_sum();
        if sum % 2 != 0 {
            Err(Failure::from(Error::OddCrossingParity { sum }))
        } else {
            Ok(sum / 2)
        }
    });
    let out = DiagramOut {
        schema_version: 1,
        requested_direction: [direction.x, direction.y, direction.z],
        direction: [d.direction.x, d.direction.y, d.direction.z],
        attempts: d.attempted.len(),
        crossings: d
            .crossings
            .iter()
            .map(|c| CrossingOut { strands: [c.strands.0, c.strands.1], s: c.s, t: c.t, sign: c.sign, over: c.over })
            .collect(),
        writhe: d.writhe(),
        linking: linking.transpose()?,
    };
    eprintln!("{}: {} crossings, writhe {}", fx.name, out.crossings.len(), out.writhe);
    write_out(None, &to_json(&out))?;
    Ok(0)
}
