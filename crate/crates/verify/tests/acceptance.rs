//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the terminal.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lcstar::random::derive_seed;
use lcstar::{eig_hermitian, SampleRng, DEFAULT_TOL};
use lcstar_verify::{run_suite, run_suite_with_workers, InstanceSpec, Suite, SuiteReport};

struct Outcome {
    ok: bool,
    detail: String,
}

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn spec(seed: u64, trials: u64, blocks: usize, max_dim: usize, depth: usize) -> InstanceSpec {
    InstanceSpec {
        seed,
        block_count: blocks,
        max_block_dim: max_dim,
        chain_depth: depth,
        trials,
        tol: DEFAULT_TOL,
    }
}

/// Every listed property ran at least `min_checks` times with no failure and
/// a worst residual within `bound`.
fn properties_hold(report: &SuiteReport, names: &[&str], min_checks: u64, bound: f64) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for name in names {
        match report.property(name) {
            Some(p) => {
                let good = p.failed == 0 && p.checked >= min_checks && p.worst_residual <= bound;
                ok &= good;
                notes.push(format!(
                    "{name} {}/{} worst {:.1e}",
                    p.passed, p.checked, p.worst_residual
                ));
            }
            None => {
                ok = false;
                notes.push(format!("{name} missing"));
            }
        }
    }
    outcome(ok, notes.join("; "))
}

fn eigensolver() -> Outcome {
    let start = Instant::now();
    let (mut worst_rec, mut worst_unit) = (0.0f64, 0.0f64);
    let mut ok = true;
    for t in 0..500u64 {
        let mut rng = SampleRng::new(derive_seed(1, t));
        let dim = 1 + (t % 8) as usize;
        let scale = 10f64.powi(rng.range(0, 6) as i32 - 3);
        let m = rng.hermitian(dim).scale(lcstar::C64::new(scale, 0.0));
        let r = eig_hermitian(&m, DEFAULT_TOL).expect("hermitian input");
        let rec = r.reconstruct().sub(&m).unwrap().frobenius_norm() / m.frobenius_norm().max(1.0);
        let unit = r.unitarity_residual() / dim as f64;
        ok &= rec <= 1e-10 && unit <= 1e-10;
        worst_rec = worst_rec.max(rec);
        worst_unit = worst_unit.max(unit);
    }
    let elapsed = start.elapsed();
    outcome(
        ok && elapsed < Duration::from_secs(10),
        format!("500 matrices, reconstruction {worst_rec:.1e}, unitarity {worst_unit:.1e}, {elapsed:.2?}"),
    )
}

fn cstar_identity() -> Outcome {
    let mut worst = 0.0f64;
    for t in 0..500u64 {
        let mut rng = SampleRng::new(derive_seed(2, t));
        let blocks = rng.range(1, 4);
        let a = rng.algebra(blocks, 8);
        let x = rng.element(&a);
        let n = x.norm().unwrap();
        let r = (x.star_square().norm().unwrap() - n * n).abs() / (n * n).max(1.0);
        worst = worst.max(r);
    }
    outcome(
        worst <= 1e-8,
        format!("500 elements, worst relative residual {worst:.1e}"),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let calculus = run_suite(Suite::Calculus, &spec(3, 500, 4, 8, 1)).unwrap();
    let cone = run_suite(Suite::Cone, &spec(4, 500, 4, 8, 1)).unwrap();
    let lemmas = run_suite(Suite::Lemmas, &spec(6, 100, 4, 6, 3)).unwrap();
    let one_level = run_suite(Suite::Theorem, &spec(7, 200, 4, 6, 1)).unwrap();
    let limit = run_suite(Suite::Theorem, &spec(8, 100, 4, 6, 3)).unwrap();
    let limit_systems = run_suite(Suite::System, &spec(8, 100, 4, 6, 3)).unwrap();

    let criteria: Vec<(&str, Criterion)> = vec![
        ("1 eigensolver oracle", Box::new(eigensolver)),
        ("2 C*-identity", Box::new(cstar_identity)),
        (
            "3 decomposition identities and square root",
            Box::new(|| {
                properties_hold(
                    &calculus,
                    &["calculus.pos_neg_identities", "calculus.sqrt_contract"],
                    500,
                    1e-9,
                )
            }),
        ),
        (
            "4 positivity routes agree",
            Box::new(|| {
                properties_hold(
                    &cone,
                    &[
                        "cone.routes_agree",
                        "cone.star_squares_positive",
                        "cone.positive_is_star_square",
                        "cone.negatives_rejected",
                    ],
                    500,
                    1e-9,
                )
            }),
        ),
        (
            "5 cone properties",
            Box::new(|| {
                properties_hold(
                    &cone,
                    &[
                        "cone.sum",
                        "cone.scaling",
                        "cone.convex",
                        "cone.closed",
                        "cone.pointed",
                    ],
                    500,
                    1e-9,
                )
            }),
        ),
        (
            "6 lemma suite",
            Box::new(|| {
                let names: Vec<String> = lcstar::lemmas::LAW_NAMES
                    .iter()
                    .map(|n| format!("lemmas.{n}"))
                    .collect();
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                let o = properties_hold(&lemmas, &names, 100, 1e-9);
                outcome(o.ok && lemmas.instances.len() == 100, o.detail)
            }),
        ),
        (
            "7 ideal decomposition at one level",
            Box::new(|| {
                let o = properties_hold(&one_level, &["theorem.one_level"], 200, 1e-10);
                outcome(o.ok && one_level.passed(), o.detail)
            }),
        ),
        (
            "8 ideal decomposition in the limit",
            Box::new(|| {
                let o = properties_hold(
                    &limit,
                    &[
                        "theorem.limit.membership",
                        "theorem.limit.sum",
                        "theorem.limit.coherence",
                        "theorem.limit.naturality",
                        "theorem.levelwise.forward",
                        "theorem.levelwise.backward",
                    ],
                    100,
                    1e-10,
                );
                outcome(o.ok && limit.passed() && limit_systems.passed(), o.detail)
            }),
        ),
        (
            "9 determinism",
            Box::new(|| {
                let s = InstanceSpec {
                    trials: 20,
                    ..InstanceSpec::default()
                };
                let mut ok = true;
                for suite in Suite::All.parts() {
                    let a = run_suite(suite, &s).unwrap().to_json().unwrap();
                    let b = run_suite(suite, &s).unwrap().to_json().unwrap();
                    let c = run_suite_with_workers(suite, &s, 3)
                        .unwrap()
                        .to_json()
                        .unwrap();
                    ok &= a == b && a == c;
                }
                outcome(ok, "every suite, rerun and 3 workers, byte-identical JSON")
            }),
        ),
        (
            "runtime of the default full run",
            Box::new(|| {
                let start = Instant::now();
                let r = run_suite(Suite::All, &InstanceSpec::default()).unwrap();
                let elapsed = start.elapsed();
                outcome(
                    r.passed() && elapsed < Duration::from_secs(120),
                    format!(
                        "{} checks, {} failures, {elapsed:.2?}",
                        r.checks, r.failures
                    ),
                )
            }),
        ),
    ];

    let mut all = true;
    for (name, run) in &criteria {
        let o = run();
        all &= o.ok;
        println!(
            "{} criterion {name}: {}",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance finished in {:.2?}", started.elapsed());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
