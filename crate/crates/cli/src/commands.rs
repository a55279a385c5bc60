use std::time::Instant;

use clap::ValueEnum;
use serde_json::{json, Value};
use spectral_lattice::harness::generate::{gen_instances, InstanceSpec};
use spectral_lattice::harness::probes::{monotone_probe, power_order_probe, ProbeVerdict};
use spectral_lattice::harness::suites::{run_suite_id, SuiteId};
use spectral_lattice::limits::{
    default_inf_delta, default_sup_delta, harmonic_pair_inf_trace, inverse_power_inf_trace,
    shifted_power_sup_trace,
};
use spectral_lattice::{
    loewner_leq, orthogonal_inf, orthogonal_sup, spectral_family_of, spectral_inf, spectral_leq, spectral_sup,
    HermitianMatrix, LatticeMode, PowerSchedule, PowerTrace, Tolerances,
};

use crate::document::{select, MatrixSetDocument, NamedMatrix};
use crate::error::CliError;
use crate::report::{matrix_value, yes_no, Report};

/// Random piecewise-linear functions tried by the monotone probe.
const RANDOM_PROBES: usize = 16;
/// Largest exponent tried by the power probe.
const POWER_PROBE_MAX: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Formula {
    /// `(sum x^n)^(1/n)` on positive inputs
    Kato,
    /// `delta + (sum (x - delta)^n)^(1/n)`
    Shifted,
    /// `-delta + (sum (x + delta)^-n)^(-1/n)`
    Inverse,
    /// `((x^-n + y^-n) / 2)^(-1/n)` for a pair
    Harmonic,
    /// Sum of positive (or negative) parts of an orthogonal family
    Orthosum,
}

pub struct Loaded {
    pub names: Vec<String>,
    pub matrices: Vec<HermitianMatrix>,
}

pub fn load(doc: &MatrixSetDocument, names: &[String], tol: &Tolerances) -> Result<Loaded, CliError> {
    let picked = select(doc.matrices(tol)?, names)?;
    if picked.is_empty() {
        return Err(CliError::Input("the document contains no matrices".into()));
    }
    let (names, matrices) = picked.into_iter().unzip();
    Ok(Loaded { names, matrices })
}

fn finish(mut report: Report, start: Instant) -> Report {
    report.timing = json!({ "wall_seconds": start.elapsed().as_secs_f64() });
    report
}

pub fn compare(set: &Loaded, seed: u64, tol: &Tolerances) -> Result<Report, CliError> {
    let start = Instant::now();
    let [x, y] = set.matrices.as_slice() else {
        return Err(CliError::Input(format!("compare needs exactly two matrices, got {}", set.matrices.len())));
    };
    let (a, b) = (&set.names[0], &set.names[1]);
    let loewner = loewner_leq(x, y, tol)?;
    let verdict = spectral_leq(x, y, tol)?;
    let probe = monotone_probe(x, y, RANDOM_PROBES, seed, tol)?;
    let positive = |h: &HermitianMatrix| -> Result<bool, CliError> {
        Ok(h.eigen()?.min() >= -tol.psd_slack(0.0, 0.0))
    };
    let power = if positive(x)? && positive(y)? {
        Some(power_order_probe(x, y, POWER_PROBE_MAX, tol)?)
    } else {
        None
    };

    let mut summary = format!("{a} ≤ {b}: {}, {a} ⪯ {b}: {}", yes_no(loewner), yes_no(verdict.holds));
    if let (Some(lambda), Some(defect)) = (verdict.witness_lambda, verdict.defect) {
        summary += &format!(" (witness λ = {lambda}, defect {defect:.3e})");
    }
    if let ProbeVerdict::Refuted { function } = &probe {
        summary += &format!("; refuted by {function}");
    }
    let mut report = Report::new("compare", summary);
    report.set("x", json!(a));
    report.set("y", json!(b));
    report.set("loewner_leq", json!(loewner));
    report.set("spectral_leq", json!(verdict));
    report.set("monotone_probe", json!(probe));
    report.set("power_probe", json!(power));
    Ok(finish(report, start))
}

/// Returns the report and the result as a one-matrix document.
pub fn lattice(set: &Loaded, mode: LatticeMode, tol: &Tolerances) -> Result<(Report, MatrixSetDocument), CliError> {
    let start = Instant::now();
    let result = mode.apply(&set.matrices, tol)?;
    let family = spectral_family_of(&result, tol)?;
    let summary = format!(
        "{mode} of {{{}}}: breakpoints {:?}, ranks {:?}",
        set.names.join(", "),
        family.breakpoints(),
        family.ranks()
    );
    let mut report = Report::new("lattice", summary);
    report.set("mode", json!(mode.name()));
    report.set("names", json!(set.names));
    report.set("result", matrix_value(&result));
    report.set(
        "spectral_family",
        json!({ "breakpoints": family.breakpoints(), "ranks": family.ranks() }),
    );
    let doc = MatrixSetDocument::new(result.dim(), vec![NamedMatrix::from_hermitian(mode.name(), &result)]);
    Ok((finish(report, start), doc))
}

pub struct LimitOptions {
    pub formula: Formula,
    pub delta: Option<f64>,
    pub normalize: bool,
    pub mode: LatticeMode,
}

fn trace_value(trace: &PowerTrace) -> Value {
    json!({
        "exponents": trace.exponents,
        "residuals": trace.residuals,
        "converged": trace.converged,
        "final_exponent": trace.final_exponent(),
    })
}

/// Returns the report and whether the iteration converged.
pub fn limits(set: &Loaded, opts: &LimitOptions, tol: &Tolerances) -> Result<(Report, bool), CliError> {
    let start = Instant::now();
    let ms = &set.matrices;
    let sched = PowerSchedule::from_tolerances(tol)?;
    let pair = || -> Result<(&HermitianMatrix, &HermitianMatrix), CliError> {
        match ms.as_slice() {
            [x, y] => Ok((x, y)),
            _ => Err(CliError::Input(format!("harmonic needs exactly two matrices, got {}", ms.len()))),
        }
    };
    let no_delta = |name: &str| -> Result<(), CliError> {
        match opts.delta {
            Some(_) => Err(CliError::Input(format!("{name} takes no --delta"))),
            None => Ok(()),
        }
    };

    let mut delta = None;
    let (trace, lattice_route, formula_mode) = match opts.formula {
        Formula::Kato => {
            no_delta("kato")?;
            delta = Some(0.0);
            let trace = shifted_power_sup_trace(ms, 0.0, &sched, opts.normalize, tol)?;
            (Some(trace), spectral_sup(ms, tol)?, LatticeMode::Sup)
        }
        Formula::Shifted => {
            let d = opts.delta.map_or_else(|| default_sup_delta(ms), Ok)?;
            delta = Some(d);
            let trace = shifted_power_sup_trace(ms, d, &sched, opts.normalize, tol)?;
            (Some(trace), spectral_sup(ms, tol)?, LatticeMode::Sup)
        }
        Formula::Inverse => {
            let d = opts.delta.map_or_else(|| default_inf_delta(ms), Ok)?;
            delta = Some(d);
            let trace = inverse_power_inf_trace(ms, d, &sched, opts.normalize)?;
            (Some(trace), spectral_inf(ms, tol)?, LatticeMode::Inf)
        }
        Formula::Harmonic => {
            no_delta("harmonic")?;
            let (x, y) = pair()?;
            let trace = harmonic_pair_inf_trace(x, y, &sched)?;
            (Some(trace), spectral_inf(ms, tol)?, LatticeMode::Inf)
        }
        Formula::Orthosum => {
            no_delta("orthosum")?;
            (None, opts.mode.apply(ms, tol)?, opts.mode)
        }
    };
    let (limit_route, converged) = match &trace {
        Some(t) => (t.result.clone(), t.converged),
        None => {
            let sum = match opts.mode {
                LatticeMode::Sup => orthogonal_sup(ms, tol)?,
                LatticeMode::Inf => orthogonal_inf(ms, tol)?,
            };
            (sum, true)
        }
    };
    let deviation = limit_route.distance(&lattice_route)?;
    let formula = opts.formula.to_possible_value().expect("no skipped variants").get_name().to_string();

    let summary = match (&trace, converged) {
        (Some(t), true) => format!(
            "{formula}: converged at n = {}; deviation from the lattice {formula_mode} {deviation:.3e}",
            t.final_exponent()
        ),
        (Some(t), false) => format!(
            "{formula}: no convergence by n = {} (last residual {:.3e}); deviation from the lattice {formula_mode} {deviation:.3e}",
            t.final_exponent(),
            t.residuals.last().copied().unwrap_or(f64::NAN)
        ),
        (None, _) => format!("{formula}: single step; deviation from the lattice {formula_mode} {deviation:.3e}"),
    };
    let mut report = Report::new("limits", summary);
    report.set("formula", json!(formula));
    report.set("mode", json!(formula_mode.name()));
    report.set("names", json!(set.names));
    report.set("delta", json!(delta));
    report.set("normalize", json!(opts.normalize || opts.formula == Formula::Harmonic));
    report.set("trace", trace.as_ref().map_or(Value::Null, trace_value));
    report.set("converged", json!(converged));
    report.set("limit_route", matrix_value(&limit_route));
    report.set("lattice_route", matrix_value(&lattice_route));
    report.set("deviation", json!(deviation));
    Ok((finish(report, start), converged))
}

/// Returns the report and whether the suite passed.
pub fn verify(suite: &str, spec: &InstanceSpec, cases: usize, tol: &Tolerances) -> Result<(Report, bool), CliError> {
    let id: SuiteId = suite.parse()?;
    let suite_report = run_suite_id(id, spec, cases, tol)?;
    let passed = suite_report.passed();
    let summary = format!(
        "{id}: {} cases, {} failures",
        suite_report.cases_run,
        suite_report.failures.len()
    );
    let mut report = Report::new("verify", summary);
    let Value::Object(mut body) = serde_json::to_value(&suite_report).expect("reports serialize") else {
        unreachable!("suite reports serialize to objects");
    };
    report.timing = body.remove("timing").unwrap_or(Value::Null);
    for (k, v) in body {
        report.set(&k, v);
    }
    report.set("passed", json!(passed));
    Ok((report, passed))
}

pub fn gen(spec: &InstanceSpec) -> Result<MatrixSetDocument, CliError> {
    let ms = gen_instances(spec)?;
    let matrices = ms
        .iter()
        .enumerate()
        .map(|(i, h)| NamedMatrix::from_hermitian(format!("m{i}"), h))
        .collect();
    Ok(MatrixSetDocument::new(spec.dim, matrices))
}
