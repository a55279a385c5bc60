//! Property suites over seeded instances.
//!
//! Case `k` of a run draws everything from stream `k` of the master seed, so a
//! failure is reproduced by `(seed, spec, case)`. Cases run in parallel and
//! are collected in index order; only the `timing` block varies between runs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::chains::{gen_monotone_chain, vigier_check, Direction};
use crate::harness::generate::{
    case_rng, commuting_family, effect, gaussian_matrix, generic, orthogonal_family, positive, positive_definite,
    projection, unit_ball, InstanceSpec,
};
use crate::harness::oracle::commuting_oracle;
use crate::harness::probes::{monotone_probe, power_order_probe, PowerVerdict};
use crate::lattice::{
    affine_image, membership_closure_check, order_bounds, spectral_inf, spectral_sup, LatticeMode, MatrixClass,
};
use crate::limits::{
    delta_floor, harmonic_pair_inf_trace, inverse_power_inf, inverse_power_inf_trace, orthogonal_inf,
    orthogonal_sup, shifted_power_sup, PowerSchedule,
};
use crate::matrix::{loewner_leq, HermitianMatrix, C64};
use crate::projection::{alternating_meet_oracle, proj_join, proj_leq, proj_meet};
use crate::spectral::spectral_leq;
use crate::tolerance::Tolerances;

/// Agreement required between the lattice route and the limit formulas.
pub const ROUTE_TOL: f64 = 1e-6;
/// Agreement required between two exact routes.
pub const EXACT_TOL: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-7;
pub const AFFINE_TOL: f64 = 1e-7;
pub const CHAIN_LENGTH: usize = 20;
const MEET_SQUARINGS: u32 = 60;
const RANDOM_PROBES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteId {
    OrderLaws,
    SupInfRoutes,
    SublatticeClosure,
    Vigier,
    MonotoneCharacterization,
    Orthogonal,
    AffineCovariance,
    ProjectionLatticeLaws,
}

impl SuiteId {
    pub const ALL: [SuiteId; 8] = [
        SuiteId::OrderLaws,
        SuiteId::SupInfRoutes,
        SuiteId::SublatticeClosure,
        SuiteId::Vigier,
        SuiteId::MonotoneCharacterization,
        SuiteId::Orthogonal,
        SuiteId::AffineCovariance,
        SuiteId::ProjectionLatticeLaws,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteId::OrderLaws => "order_laws",
            SuiteId::SupInfRoutes => "sup_inf_routes",
            SuiteId::SublatticeClosure => "sublattice_closure",
            SuiteId::Vigier => "vigier",
            SuiteId::MonotoneCharacterization => "monotone_characterization",
            SuiteId::Orthogonal => "orthogonal",
            SuiteId::AffineCovariance => "affine_covariance",
            SuiteId::ProjectionLatticeLaws => "projection_lattice_laws",
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub case: usize,
    pub seed: u64,
    pub property: String,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub max_case_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub spec: InstanceSpec,
    pub cases_run: usize,
    pub failures: Vec<Failure>,
    /// `max_*` entries are maxima over cases, `count_*` entries are sums.
    pub metrics: BTreeMap<String, f64>,
    pub timing: Timing,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    /// The report as JSON with the `timing` block removed.
    pub fn deterministic_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("reports serialize");
        if let Some(map) = value.as_object_mut() {
            map.remove("timing");
        }
        value.to_string()
    }
}

/// What one case observed.
#[derive(Default)]
struct Case {
    failures: Vec<(String, String)>,
    metrics: Vec<(String, f64)>,
}

impl Case {
    fn check(&mut self, property: &str, ok: bool, witness: impl FnOnce() -> String) {
        if !ok {
            self.failures.push((property.to_string(), witness()));
        }
    }

    /// Records `max_<property>` and fails unless `value <= limit`.
    fn deviation(&mut self, property: &str, value: f64, limit: f64) {
        self.metrics.push((format!("max_{property}"), value));
        self.check(property, value <= limit, || format!("deviation {value:e} exceeds {limit:e}"));
    }

    fn count(&mut self, key: &str, n: usize) {
        self.metrics.push((format!("count_{key}"), n as f64));
    }

    fn distance(&mut self, property: &str, a: &HermitianMatrix, b: &HermitianMatrix, limit: f64) -> Result<()> {
        let d = a.distance(b)?;
        self.deviation(property, d, limit);
        Ok(())
    }
}

pub fn run_suite(name: &str, spec: &InstanceSpec, cases: usize, tol: &Tolerances) -> Result<SuiteReport> {
    run_suite_id(name.parse()?, spec, cases, tol)
}

pub fn run_suite_id(id: SuiteId, spec: &InstanceSpec, cases: usize, tol: &Tolerances) -> Result<SuiteReport> {
    spec.validate()?;
    tol.validate()?;
    if cases == 0 {
        return Err(Error::InvalidSpec("cases must be at least 1".into()));
    }
    if matches!(id, SuiteId::Orthogonal | SuiteId::ProjectionLatticeLaws) && spec.dim < 2 {
        return Err(Error::InvalidSpec(format!("{id} needs dim >= 2")));
    }
    let sched = PowerSchedule::from_tolerances(tol)?;
    let start = Instant::now();
    let outcomes: Vec<(Case, f64)> = (0..cases)
        .into_par_iter()
        .map(|k| {
            let case_start = Instant::now();
            let mut rng = case_rng(spec.seed, k as u64);
            let mut case = Case::default();
            let env = Env { spec, tol, sched: &sched };
            if let Err(e) = run_case(id, &env, &mut rng, &mut case) {
                case.failures.push(("error".to_string(), e.to_string()));
            }
            (case, case_start.elapsed().as_secs_f64())
        })
        .collect();

    let mut failures = Vec::new();
    let mut metrics: BTreeMap<String, f64> = BTreeMap::new();
    let mut max_case_seconds: f64 = 0.0;
    for (k, (case, seconds)) in outcomes.into_iter().enumerate() {
        max_case_seconds = max_case_seconds.max(seconds);
        for (property, witness) in case.failures {
            failures.push(Failure {
                case: k,
                seed: spec.seed,
                property,
                witness,
            });
        }
        for (key, value) in case.metrics {
            let entry = metrics.entry(key.clone()).or_insert(if key.starts_with("count_") {
                0.0
            } else {
                f64::NEG_INFINITY
            });
            if key.starts_with("count_") {
                *entry += value;
            } else {
                *entry = entry.max(value);
            }
        }
    }
    Ok(SuiteReport {
        suite: id.name().to_string(),
        spec: spec.clone(),
        cases_run: cases,
        failures,
        metrics,
        timing: Timing {
            wall_seconds: start.elapsed().as_secs_f64(),
            max_case_seconds,
        },
    })
}

struct Env<'a> {
    spec: &'a InstanceSpec,
    tol: &'a Tolerances,
    sched: &'a PowerSchedule,
}

impl Env<'_> {
    fn set_size(&self) -> usize {
        self.spec.count.max(2)
    }
}

fn run_case(id: SuiteId, env: &Env<'_>, rng: &mut ChaCha8Rng, case: &mut Case) -> Result<()> {
    match id {
        SuiteId::OrderLaws => order_laws(env, rng, case),
        SuiteId::SupInfRoutes => sup_inf_routes(env, rng, case),
        SuiteId::SublatticeClosure => sublattice_closure(env, rng, case),
        SuiteId::Vigier => vigier(env, rng, case),
        SuiteId::MonotoneCharacterization => monotone_characterization(env, rng, case),
        SuiteId::Orthogonal => orthogonal(env, rng, case),
        SuiteId::AffineCovariance => affine_covariance(env, rng, case),
        SuiteId::ProjectionLatticeLaws => projection_lattice_laws(env, rng, case),
    }
}

fn order_laws(env: &Env<'_>, rng: &mut ChaCha8Rng, case: &mut Case) -> Result<()> {
    let (dim, spread, tol) = (env.spec.dim, env.spec.spectrum_spread, env.tol);
    let x = generic(rng, dim, spread);
    let y = generic(rng, dim, spread);
    let z = generic(rng, dim, spread);
    let leq = |a: &HermitianMatrix, b: &HermitianMatrix| spectral_leq(a, b, tol).map(|v| v.holds);

    case.check("reflexivity", leq(&x, &x)?, || "x ⪯ x fails".into());
    let s = spectral_sup(&[x.clone(), y.clone()], tol)?;
    let i = spectral_inf(&[x.clone(), y.clone()], tol)?;
    case.check("upper_bound", leq(&x, &s)? && leq(&y, &s)?, || "an element exceeds the supremum".into());
    case.check("lower_bound", leq(&i, &x)? && leq(&i, &y)?, || "the infimum exceeds an element".into());
    case.check(
        "order_implies_loewner",
        loewner_leq(&x, &s, tol)? && loewner_leq(&i, &x, tol)?,
        || "⪯ holds but ≤ fails".into(),
    );
    let s_swapped = spectral_sup(&[y.clone(), x.clone()], tol)?;
    case.distance("commutativity", &s, &s_swapped, EXACT_TOL)?;
    case.check("antisymmetry", leq(&s, &s_swapped)? && leq(&s_swapped, &s)?, || {
        "sup(x,y) and sup(y,x) are not mutually below each other".into()
    });
    case.distance("idempotence", &spectral_sup(&[x.clone(), x.clone()], tol)?, &x, EXACT_TOL)?;
    case.distance("absorption", &spectral_sup(&[x.clone(), i.clone()], tol)?, &x, EXACT_TOL)?;
    case.distance("absorption", &spectral_inf(&[x.clone(), s.clone()], tol)?, &x, EXACT_TOL)?;
    let all = spectral_sup(&[x.clone(), y.clone(), z.clone()], tol)?;
    case.distance("associativity", &spectral_sup(&[s.clone(), z.clone()], tol)?, &all, EXACT_TOL)?;
    case.check("transitivity", leq(&x, &all)?, || "x ⪯ sup(x,y) ⪯ sup(x,y,z) but not x ⪯ sup(x,y,z)".into());
    let dual = spectral_sup(&[x.neg(), y.neg()], tol)?.neg();
    case.distance("duality", &i, &dual, EXACT_TOL)?;
    order_bounds(&[x, y, z], tol)?;
    Ok(())
}

fn sup_inf_routes(env: &Env<'_>, rng: &mut ChaCha8Rng, case: &mut Case) -> Result<()> {
    let (dim, spread, tol, sched) = (env.spec.dim, env.spec.spectrum_spread, env.tol, env.sched);
    let m = env.set_size();

    let fs: Vec<_> = (0..m).map(|_| positive(rng, dim, spread)).collect();
    let lattice = spectral_sup(&fs, tol)?;
    let limit = shifted_power_sup(&fs, 0.0, sched, false, tol)?;
    case.distance("sup_route", &limit, &lattice, ROUTE_TOL)?;

    let ms: Vec<_> = (0..m).map(|_| positive_definite(rng, dim, spread)).collect();
    let lattice = spectral_inf(&ms, tol)?;
    let limit = inverse_power_inf(&ms, 0.0, sched, false)?;
    case.distance("inf_route", &limit, &lattice, ROUTE_TOL)?;

    let harmonic = harmonic_pair_inf_trace(&ms[0], &ms[1], sched)?;
    let normalized = inverse_power_inf_trace(&ms[..2], 0.0, sched, true)?;
    case.distance("harmonic_route", &harmonic.result, &normalized.result, 0.0)?;

    let fam = commuting_family(rng, dim, m);
    let oracle = commuting_oracle(&fam, LatticeMode::Sup)?;
    case.distance("commuting_sup_oracle", &spectral_sup(&fam, tol)?, &oracle, EXACT_TOL)?;
    let delta = delta_floor(&fam)?;
    case.distance("commuting_sup_limit", &shifted_power_sup(&fam, delta, sched, false, tol)?, &oracle, ROUTE_TOL)?;
    Ok(())
}

fn class_member(class: MatrixClass, rng: &mut ChaCha8Rng, dim: usize, spread: f64) -> HermitianMatrix {
    match class {
        MatrixClass::Positive => positive(rng, dim, spread),
        MatrixClass::UnitBall => unit_ball(rng, dim, spread),
        MatrixClass::Effect => effect(rng, dim, spread),
        MatrixClass::Projection => projection(rng, dim).into_matrix(),
    }
}

fn sublattice_closure(env: &Env<'_>, rng: &mut ChaCha8Rng, case: &mut Case) -> Result<()> {
    for class in MatrixClass::ALL {
        let set: Vec<_> = (0..env.set_size())
            .map(|_| class_member(class, rng, env.spec.dim, env.spec.spectrum_spread))
            .collect();
        let report = membership_closure_check(&set, class, env.tol)?;
        case.check(&format!("closure_{class}"), report.passed, || {
            format!("sup: {:?}, inf: {:?}", report.sup_violation, report.inf_violation)
        });
    }
    Ok(())
}

fn vigier(env: &Env<'_>, rng: &mut ChaCha8Rng, case: &mut Case) -> Result<()> {
    for direction in [Direction::Decreasing, Direction::Increasing] {
        let chain = gen_monotone_chain(rng.random(), env.spec.dim, CHAIN_LENGTH, direction, env.tol)?;
        let report = vigier_check(&chain, env.tol)?;
        case.metrics.push(("max_chain_last_deviation".into(), report.last_deviation));
        case.check(&format!("vigier_{direction}"), report.passed, || {
            format!(
                "bound holds: {}, last deviation {:e}, distances monotone: {}",
                report.bound_holds, report.last_deviation, report.distances_monotone
            )
        });
    }
    Ok(())
}

fn monotone_characterization(env: &Env<'_>, rng: &mut ChaCha8Rng, case: &mut Case) -> Result<()> {
    let (dim, spread, tol) = (env.spec.dim, env.spec.spectrum_spread, env.tol);
    let x = generic(rng, dim, spread);
    let r = generic(rng, dim, spread);
    let y = spectral_sup(&[x.clone(), r], tol)?;
    case.check("constructed_pair_ordered", spectral_leq(&x, &y, tol)?.holds, || "x ⪯ sup(x, r) fails".into());
    case.check("order_implies_loewner", loewner_leq(&x, &y, tol)?, || "x ⪯ y but not x ≤ y".into());
    let probe = monotone_probe(&x, &y, RANDOM_PROBES, rng.random(), tol)?;
    case.count("refutations", probe.is_refuted() as usize);
    case.check("probe_soundness", !probe.is_refuted(), || format!("{probe:?} on an ordered pair"));

    // x <= x + v v*, which is frequently not ⪯.
    let a = positive(rng, dim, spread);
    let v = gaussian_matrix(rng, dim, 1);
    let b = HermitianMatrix::from_matrix_unchecked(a.as_matrix() + &v * v.adjoint() * C64::new(0.5, 0.0));
    let loewner = loewner_leq(&a, &b, tol)?;
    let spectral = spectral_leq(&a, &b, tol)?.holds;
    case.check("gap_pair_loewner", loewner, || "a ≤ a + v v* fails".into());
    case.count("gap_pairs", (loewner && !spectral) as usize);
    let refuted = monotone_probe(&a, &b, RANDOM_PROBES, rng.random(), tol)?.is_refuted()
        || matches!(power_order_probe(&a, &b, 4, tol)?, PowerVerdict::Refuted { .. });
    case.check("refutation_implies_not_ordered", !(refuted && spectral), || {
        "a probe refuted a pair that spectral_leq accepts".into()
    });
    Ok(())
}

fn orthogonal(env: &Env<'_>, rng: &mut ChaCha8Rng, case: &mut Case) -> Result<()> {
    let blocks = env.set_size().min(env.spec.dim);
    let fam = orthogonal_family(rng, env.spec.dim, blocks);
    case.distance("orthogonal_sup", &orthogonal_sup(&fam, env.tol)?, &spectral_sup(&fam, env.tol)?, EXACT_TOL)?;
    case.distance("orthogonal_inf", &orthogonal_inf(&fam, env.tol)?, &spectral_inf(&fam, env.tol)?, EXACT_TOL)?;
    Ok(())
}

fn affine_covariance(env: &Env<'_>, rng: &mut ChaCha8Rng, case: &mut Case) -> Result<()> {
    let tol = env.tol;
    let set: Vec<_> = (0..env.set_size())
        .map(|_| generic(rng, env.spec.dim, env.spec.spectrum_spread))
        .collect();
    let sup = spectral_sup(&set, tol)?;
    let inf = spectral_inf(&set, tol)?;
    for alpha in [0.5, 2.0] {
        for beta in [-1.0, 3.0] {
            let mapped = affine_image(&set, alpha, beta)?;
            case.distance("affine_sup", &spectral_sup(&mapped, tol)?, &sup.affine(alpha, beta), AFFINE_TOL)?;
            case.distance("affine_inf", &spectral_inf(&mapped, tol)?, &inf.affine(alpha, beta), AFFINE_TOL)?;
        }
    }
    Ok(())
}

fn projection_lattice_laws(env: &Env<'_>, rng: &mut ChaCha8Rng, case: &mut Case) -> Result<()> {
    let tol = env.tol;
    let p = projection(rng, env.spec.dim);
    let q = projection(rng, env.spec.dim);
    let pair = [p.clone(), q.clone()];
    let matrices = [p.matrix().clone(), q.matrix().clone()];
    let join = proj_join(&pair, tol)?;
    let meet = proj_meet(&pair, tol)?;
    case.distance("sup_is_join", &spectral_sup(&matrices, tol)?, join.matrix(), EXACT_TOL)?;
    case.distance("inf_is_meet", &spectral_inf(&matrices, tol)?, meet.matrix(), EXACT_TOL)?;
    let oracle = alternating_meet_oracle(&p, &q, MEET_SQUARINGS, tol)?;
    case.distance("meet_oracle", &oracle, meet.matrix(), ORACLE_TOL)?;
    let bounds = proj_leq(&meet, &p, tol)? && proj_leq(&meet, &q, tol)? && proj_leq(&p, &join, tol)?;
    case.check("meet_join_bounds", bounds && proj_leq(&q, &join, tol)?, || "meet/join is not a bound".into());
    let orders_agree = proj_leq(&p, &q, tol)? == spectral_leq(p.matrix(), q.matrix(), tol)?.holds;
    case.check("orders_agree_on_projections", orders_agree, || "≤ and ⪯ disagree on projections".into());
    let complement_join = proj_join(&[p.complement(), q.complement()], tol)?;
    case.distance("de_morgan", complement_join.matrix(), meet.complement().matrix(), EXACT_TOL)?;
    Ok(())
}
