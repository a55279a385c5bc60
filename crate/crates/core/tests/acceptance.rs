//! Acceptance criteria. Runs as a plain binary so that every criterion prints
//! one PASS/FAIL line; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use spectral_lattice::harness::chains::{gen_monotone_chain, vigier_check, Direction};
use spectral_lattice::harness::generate::{
    case_rng, commuting_family, effect, gaussian_matrix, generic, orthogonal_family, positive, projection,
    unit_ball, InstanceKind, InstanceSpec,
};
use spectral_lattice::harness::oracle::commuting_oracle;
use spectral_lattice::harness::probes::{monotone_probe, power_order_probe, PowerVerdict};
use spectral_lattice::harness::suites::{run_suite_id, SuiteId};
use spectral_lattice::limits::{harmonic_pair_inf_trace, inverse_power_inf_trace};
use spectral_lattice::{
    affine_image, alternating_meet_oracle, delta_floor, functional_calculus, inverse_power_inf, loewner_leq, make_hermitian,
    membership_closure_check, orthogonal_inf, orthogonal_sup, proj_join, proj_meet, shifted_power_sup,
    spectral_inf, spectral_leq, spectral_sup, HermitianMatrix, LatticeMode, MatrixClass, PowerSchedule, Result,
    Tolerances, C64,
};

const ROUTE_TOL: f64 = 1e-6;
const EXACT_TOL: f64 = 1e-8;
const ORACLE_TOL: f64 = 1e-7;
const AFFINE_TOL: f64 = 1e-7;
const CASE_SECONDS: f64 = 2.0;
const RUN_SECONDS: f64 = 300.0;

type Criterion = fn(&Tolerances) -> Result<Outcome>;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn dist(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    a.distance(b)
}

/// 2-4 positive matrices of dimension 2-8 with eigenvalue gaps >= 0.1.
fn psd_set(rng: &mut ChaCha8Rng) -> Vec<HermitianMatrix> {
    let dim = rng.random_range(2..=8);
    let count = rng.random_range(2..=4);
    (0..count).map(|_| positive(rng, dim, 0.1)).collect()
}

fn generic_set(rng: &mut ChaCha8Rng) -> Vec<HermitianMatrix> {
    let dim = rng.random_range(2..=8);
    let count = rng.random_range(2..=4);
    (0..count).map(|_| generic(rng, dim, 0.1)).collect()
}

fn route_sup(t: &Tolerances) -> Result<Outcome> {
    let sched = PowerSchedule::from_tolerances(t)?;
    let start = Instant::now();
    let runs = (0..200u64)
        .into_par_iter()
        .map(|k| {
            let case_start = Instant::now();
            let set = psd_set(&mut case_rng(101, k));
            let d = dist(&shifted_power_sup(&set, 0.0, &sched, false, t)?, &spectral_sup(&set, t)?)?;
            Ok((d, case_start.elapsed().as_secs_f64()))
        })
        .collect::<Result<Vec<_>>>()?;
    let total = start.elapsed().as_secs_f64();
    let worst = max(runs.iter().map(|r| r.0));
    let slowest = max(runs.iter().map(|r| r.1));
    Ok(outcome(
        worst < ROUTE_TOL && slowest < CASE_SECONDS && total < RUN_SECONDS,
        format!("200 sets: max |power route - lattice| = {worst:.2e} (< {ROUTE_TOL:e}); slowest case {slowest:.3} s; total {total:.2} s"),
    ))
}

fn route_inf(t: &Tolerances) -> Result<Outcome> {
    let sched = PowerSchedule::from_tolerances(t)?;
    let runs = (0..200u64)
        .into_par_iter()
        .map(|k| {
            let set: Vec<_> = psd_set(&mut case_rng(101, k)).iter().map(|x| x.shift(0.1)).collect();
            let d = dist(&inverse_power_inf(&set, 0.0, &sched, false)?, &spectral_inf(&set, t)?)?;
            let harmonic = harmonic_pair_inf_trace(&set[0], &set[1], &sched)?;
            let normalized = inverse_power_inf_trace(&set[..2], 0.0, &sched, true)?;
            Ok((d, dist(&harmonic.result, &normalized.result)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = max(runs.iter().map(|r| r.0));
    let harmonic = max(runs.iter().map(|r| r.1));
    Ok(outcome(
        worst < ROUTE_TOL && harmonic <= f64::EPSILON,
        format!("200 sets: max |inverse route - lattice| = {worst:.2e} (< {ROUTE_TOL:e}); harmonic vs normalized inverse = {harmonic:.1e}"),
    ))
}

fn delta_invariance(t: &Tolerances) -> Result<Outcome> {
    let sched = PowerSchedule::from_tolerances(t)?;
    let runs = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let set = generic_set(&mut case_rng(103, k));
            let floor = delta_floor(&set)?;
            let results = [floor, floor - 1.0, floor - 10.0]
                .iter()
                .map(|&delta| shifted_power_sup(&set, delta, &sched, false, t))
                .collect::<Result<Vec<_>>>()?;
            Ok(max([
                dist(&results[0], &results[1])?,
                dist(&results[0], &results[2])?,
                dist(&results[1], &results[2])?,
            ]))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = max(runs);
    Ok(outcome(
        worst < ROUTE_TOL,
        format!("100 sets, delta in {{D, D-1, D-10}}: max pairwise deviation {worst:.2e} (< {ROUTE_TOL:e})"),
    ))
}

fn order_implication(t: &Tolerances) -> Result<Outcome> {
    let runs = (0..1000u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = case_rng(104, k);
            let dim = rng.random_range(2..=6);
            let x = generic(&mut rng, dim, 0.1);
            let r = generic(&mut rng, dim, 0.1);
            let y = spectral_sup(&[x.clone(), r], t)?;
            let ordered = spectral_leq(&x, &y, t)?.holds;
            let loewner = loewner_leq(&x, &y, t)?;
            let refuted = monotone_probe(&x, &y, 8, rng.random(), t)?.is_refuted();
            Ok((ordered, loewner, refuted))
        })
        .collect::<Result<Vec<_>>>()?;
    let ordered = runs.iter().filter(|r| r.0).count();
    let loewner = runs.iter().filter(|r| r.1).count();
    let refuted = runs.iter().filter(|r| r.2).count();
    Ok(outcome(
        ordered == 1000 && loewner == 1000 && refuted == 0,
        format!("1000 pairs (x, sup{{x,r}}): ⪯ {ordered}/1000, ≤ {loewner}/1000, probe refutations {refuted}"),
    ))
}

fn order_gap(t: &Tolerances) -> Result<Outcome> {
    let x = HermitianMatrix::diag(&[1.0, 0.0]);
    let y = HermitianMatrix::from_real(&[[1.5, 0.5], [0.5, 0.5]])?;
    let fixture_loewner = loewner_leq(&x, &y, t)?;
    let fixture_spectral = spectral_leq(&x, &y, t)?.holds;
    let fixture_probe = power_order_probe(&x, &y, 2, t)?;

    let square = |s: f64| s * s;
    let runs = (0..10_000u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = case_rng(105, k);
            let dim = rng.random_range(2..=4);
            let a = positive(&mut rng, dim, 0.1);
            let v = gaussian_matrix(&mut rng, dim, 1);
            let b = make_hermitian(&(a.as_matrix() + &v * v.adjoint() * C64::new(0.5, 0.0)), t)?;
            let gap = loewner_leq(&a, &b, t)? && !spectral_leq(&a, &b, t)?.holds;
            // Independent confirmation: b - a >= 0 but b^2 - a^2 is not.
            let confirmed = gap && {
                let a2 = functional_calculus(&a, square)?;
                let b2 = functional_calculus(&b, square)?;
                b.sub(&a)?.eigen()?.min() >= -1e-12 && b2.sub(&a2)?.eigen()?.min() < -1e-12
            };
            Ok((gap, confirmed))
        })
        .collect::<Result<Vec<_>>>()?;
    let gaps = runs.iter().filter(|r| r.0).count();
    let confirmed = runs.iter().filter(|r| r.1).count();
    Ok(outcome(
        fixture_loewner && !fixture_spectral && fixture_probe == PowerVerdict::Refuted { exponent: 2 } && confirmed >= 1,
        format!(
            "fixture: ≤ {fixture_loewner}, ⪯ {fixture_spectral}, power probe {fixture_probe:?}; \
             random search: {gaps}/10000 gap pairs, {confirmed} confirmed by the squares test"
        ),
    ))
}

fn commuting(t: &Tolerances) -> Result<Outcome> {
    let runs = (0..200u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = case_rng(106, k);
            let dim = rng.random_range(2..=8);
            let count = rng.random_range(2..=4);
            let fam = commuting_family(&mut rng, dim, count);
            Ok(max([
                dist(&spectral_sup(&fam, t)?, &commuting_oracle(&fam, LatticeMode::Sup)?)?,
                dist(&spectral_inf(&fam, t)?, &commuting_oracle(&fam, LatticeMode::Inf)?)?,
            ]))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = max(runs);
    Ok(outcome(
        worst < EXACT_TOL,
        format!("200 commuting families: max |lattice - joint-eigenbasis oracle| = {worst:.2e} (< {EXACT_TOL:e})"),
    ))
}

fn projections(t: &Tolerances) -> Result<Outcome> {
    let runs = (0..500u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = case_rng(107, k);
            let dim = rng.random_range(2..=8);
            let p = projection(&mut rng, dim);
            let q = projection(&mut rng, dim);
            let pair = [p.clone(), q.clone()];
            let matrices = [p.matrix().clone(), q.matrix().clone()];
            let meet = proj_meet(&pair, t)?;
            let lattice = max([
                dist(&spectral_sup(&matrices, t)?, proj_join(&pair, t)?.matrix())?,
                dist(&spectral_inf(&matrices, t)?, meet.matrix())?,
            ]);
            let oracle = dist(&alternating_meet_oracle(&p, &q, 60, t)?, meet.matrix())?;
            Ok((lattice, oracle))
        })
        .collect::<Result<Vec<_>>>()?;
    let lattice = max(runs.iter().map(|r| r.0));
    let oracle = max(runs.iter().map(|r| r.1));

    let mut closure = Vec::new();
    for (class_index, class) in MatrixClass::ALL.into_iter().enumerate() {
        let passed = (0..200u64)
            .into_par_iter()
            .map(|k| {
                let mut rng = case_rng(1070 + class_index as u64, k);
                let dim = rng.random_range(2..=6);
                let count = rng.random_range(2..=4);
                let set: Vec<_> = (0..count)
                    .map(|_| match class {
                        MatrixClass::Positive => positive(&mut rng, dim, 0.1),
                        MatrixClass::UnitBall => unit_ball(&mut rng, dim, 0.1),
                        MatrixClass::Effect => effect(&mut rng, dim, 0.1),
                        MatrixClass::Projection => projection(&mut rng, dim).into_matrix(),
                    })
                    .collect();
                Ok(membership_closure_check(&set, class, t)?.passed)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|&p| p)
            .count();
        closure.push((class, passed));
    }
    let closure_ok = closure.iter().all(|&(_, n)| n == 200);
    let summary: Vec<String> = closure.iter().map(|(c, n)| format!("{c} {n}/200")).collect();
    Ok(outcome(
        lattice < EXACT_TOL && oracle < ORACLE_TOL && closure_ok,
        format!(
            "500 pairs: max |lattice - join/meet| = {lattice:.2e} (< {EXACT_TOL:e}), \
             |alternating oracle - meet| = {oracle:.2e} (< {ORACLE_TOL:e}); closure: {}",
            summary.join(", ")
        ),
    ))
}

fn vigier(t: &Tolerances) -> Result<Outcome> {
    let runs = (0..50u64)
        .into_par_iter()
        .map(|k| {
            [Direction::Decreasing, Direction::Increasing]
                .into_iter()
                .map(|direction| {
                    let chain = gen_monotone_chain(1080 + k, 4, 20, direction, t)?;
                    let report = vigier_check(&chain, t)?;
                    Ok((report.passed, report.last_deviation))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let flat: Vec<_> = runs.into_iter().flatten().collect();
    let passed = flat.iter().filter(|r| r.0).count();
    let worst = max(flat.iter().map(|r| r.1));
    Ok(outcome(
        passed == 100,
        format!("50 chains x 2 directions (length 20, dim 4): {passed}/100 pass; max |bound - last| = {worst:.2e} (< {EXACT_TOL:e})"),
    ))
}

fn orthogonal(t: &Tolerances) -> Result<Outcome> {
    let runs = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = case_rng(109, k);
            let blocks = rng.random_range(2..=4);
            let dim = rng.random_range(blocks..=12);
            let fam = orthogonal_family(&mut rng, dim, blocks);
            Ok(max([
                dist(&orthogonal_sup(&fam, t)?, &spectral_sup(&fam, t)?)?,
                dist(&orthogonal_inf(&fam, t)?, &spectral_inf(&fam, t)?)?,
            ]))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = max(runs);
    Ok(outcome(
        worst < EXACT_TOL,
        format!("100 orthogonal families (2-4 blocks, dim <= 12): max deviation {worst:.2e} (< {EXACT_TOL:e})"),
    ))
}

fn affine(t: &Tolerances) -> Result<Outcome> {
    let runs = (0..200u64)
        .into_par_iter()
        .map(|k| {
            let set = generic_set(&mut case_rng(110, k));
            let sup = spectral_sup(&set, t)?;
            let inf = spectral_inf(&set, t)?;
            let mut worst: f64 = 0.0;
            for alpha in [0.5, 2.0] {
                for beta in [-1.0, 3.0] {
                    let mapped = affine_image(&set, alpha, beta)?;
                    worst = worst.max(dist(&spectral_sup(&mapped, t)?, &sup.affine(alpha, beta))?);
                    worst = worst.max(dist(&spectral_inf(&mapped, t)?, &inf.affine(alpha, beta))?);
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = max(runs);
    Ok(outcome(
        worst < AFFINE_TOL,
        format!("200 sets, alpha in {{0.5, 2}}, beta in {{-1, 3}}: max deviation {worst:.2e} (< {AFFINE_TOL:e})"),
    ))
}

fn determinism(t: &Tolerances) -> Result<Outcome> {
    let spec = InstanceSpec::new(3, 2024, InstanceKind::Generic, 3, 0.1);
    let mut identical = Vec::new();
    for id in SuiteId::ALL {
        let first = run_suite_id(id, &spec, 16, t)?.deterministic_json();
        let second = run_suite_id(id, &spec, 16, t)?.deterministic_json();
        identical.push((id, first == second));
    }
    let differing: Vec<String> = identical.iter().filter(|r| !r.1).map(|r| r.0.to_string()).collect();
    Ok(outcome(
        differing.is_empty(),
        format!(
            "{}/{} suites byte-identical across reruns{}",
            identical.len() - differing.len(),
            identical.len(),
            if differing.is_empty() { String::new() } else { format!(" (differ: {})", differing.join(", ")) }
        ),
    ))
}

fn main() -> ExitCode {
    let t = Tolerances::default();
    let criteria: [(&str, Criterion); 11] = [
        ("route agreement (sup)", route_sup),
        ("route agreement (inf)", route_inf),
        ("delta invariance", delta_invariance),
        ("order implication", order_implication),
        ("order gap", order_gap),
        ("commuting equivalence", commuting),
        ("projection lattice", projections),
        ("monotone chains", vigier),
        ("orthogonal formulas", orthogonal),
        ("affine covariance", affine),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run(&t).unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        if !result.passed {
            failed += 1;
        }
        println!(
            "[{}] {:>2}. {name}: {} [{:.1} s]",
            if result.passed { "PASS" } else { "FAIL" },
            i + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
