use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use lcstar::ideals::{decompose_positive, split_in_sum};
use lcstar::limit::limit_decompose_positive;
use lcstar::random::{derive_seed, RNG_NAME};
use lcstar::{eig_hermitian, AlgElement, LawOutcome, LawTally, SampleRng};
use serde::{Deserialize, Serialize};

use crate::instance::{gen_instance, random_morphism, Instance, InstanceSpec};
use crate::{Error, Result};

/// Fixed thresholds for identities that do not depend on the user tolerance.
const EIG_TOL: f64 = 1e-10;
const CSTAR_TOL: f64 = 1e-8;
const EXACT_TOL: f64 = 1e-10;
/// Lemma samples drawn per generated instance.
const LEMMA_SAMPLES: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Calculus,
    Cone,
    Lemmas,
    Theorem,
    System,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["calculus", "cone", "lemmas", "theorem", "system", "all"];

    /// The concrete suites `self` expands to.
    pub fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Calculus,
                Suite::Cone,
                Suite::Lemmas,
                Suite::Theorem,
                Suite::System,
            ],
            s => vec![s],
        }
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(Suite::NAMES[*self as usize])
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = [
            Suite::Calculus,
            Suite::Cone,
            Suite::Lemmas,
            Suite::Theorem,
            Suite::System,
            Suite::All,
        ];
        all.into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub trial: u64,
    pub seed: u64,
    pub digest: String,
}

/// One failing property on one trial, with what it takes to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: u64,
    pub seed: u64,
    pub digest: String,
    pub property: String,
    pub failed: u64,
    pub worst_residual: f64,
    pub detail: String,
    pub replay: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub rng: String,
    pub config: InstanceSpec,
    pub checks: u64,
    pub failures: u64,
    pub properties: Vec<LawOutcome>,
    pub instances: Vec<InstanceRecord>,
    pub failed_trials: Vec<TrialFailure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn property(&self, name: &str) -> Option<&LawOutcome> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(lcstar::json::to_json(self)?)
    }

    pub fn from_json(text: &str) -> Result<SuiteReport> {
        Ok(lcstar::json::from_json(text)?)
    }
}

/// Result of the checks on one instance.
#[derive(Clone, Debug, Default)]
pub struct InstanceOutcome {
    pub tally: LawTally,
    /// First failure note per property.
    pub notes: BTreeMap<String, String>,
}

impl InstanceOutcome {
    fn check(&mut self, law: &str, f: impl FnOnce() -> lcstar::Result<(bool, f64)>) {
        let (ok, residual, note) = match f() {
            Ok((ok, r)) => (ok, r, format!("residual {r:e}")),
            Err(e) => (false, f64::INFINITY, e.to_string()),
        };
        if !self.tally.record(law, ok, residual) {
            self.notes.entry(law.to_string()).or_insert(note);
        }
    }

    fn absorb(&mut self, prefix: &str, tally: &LawTally) {
        for law in &tally.laws {
            let name = format!("{prefix}.{}", law.name);
            self.tally.law(&name).merge(law);
            if law.failed > 0 {
                self.notes
                    .entry(name)
                    .or_insert(format!("{} of {} checks failed", law.failed, law.checked));
            }
        }
    }
}

fn rel(x: &AlgElement, y: &AlgElement) -> f64 {
    x.relative_distance(y)
}

/// Norm of `x` relative to `max(1, ‖scale‖_F)`.
fn small(x: &AlgElement, scale: &AlgElement) -> f64 {
    x.frobenius_norm() / scale.frobenius_norm().max(1.0)
}

/// Runs the property set of `suite` on one instance. Sampling is seeded from
/// the instance seed, so a stored instance replays exactly.
pub fn run_on_instance(suite: Suite, inst: &Instance, tol: f64) -> InstanceOutcome {
    let mut out = InstanceOutcome::default();
    for s in suite.parts() {
        let mut rng = SampleRng::new(derive_seed(inst.seed, s.stream()));
        match s {
            Suite::Calculus => calculus(inst, &mut rng, tol, &mut out),
            Suite::Cone => cone(inst, &mut rng, tol, &mut out),
            Suite::Lemmas => lemmas(inst, &mut rng, tol, &mut out),
            Suite::Theorem => theorem(inst, &mut rng, tol, &mut out),
            Suite::System => system(inst, &mut rng, tol, &mut out),
            Suite::All => unreachable!("expanded by parts()"),
        }
    }
    out
}

fn calculus(inst: &Instance, rng: &mut SampleRng, tol: f64, out: &mut InstanceOutcome) {
    let a = inst.top_algebra();
    let h = rng.hermitian_element(a);
    for m in h.parts() {
        let eig = match eig_hermitian(m, tol) {
            Ok(eig) => eig,
            Err(e) => {
                out.check("calculus.eig_reconstruction", || Err(e));
                continue;
            }
        };
        let scale = m.frobenius_norm().max(1.0);
        out.check("calculus.eig_reconstruction", || {
            let r = eig.reconstruct().sub(m)?.frobenius_norm() / scale;
            Ok((r <= EIG_TOL, r))
        });
        let r = eig.unitarity_residual() / m.dim() as f64;
        out.check("calculus.eig_unitarity", || Ok((r <= EIG_TOL, r)));
    }

    let (x, y) = (rng.element(a), rng.element(a));
    out.check("calculus.cstar_identity", || {
        let n = x.norm()?;
        let r = (x.star_square().norm()? - n * n).abs() / (n * n).max(1.0);
        Ok((r <= CSTAR_TOL, r))
    });
    out.check("calculus.involution", || {
        let r = rel(&x.mul(&y)?.star(), &y.star().mul(&x.star())?).max(rel(&x.star().star(), &x));
        Ok((r <= EXACT_TOL, r))
    });

    out.check("calculus.pos_neg_identities", || {
        let p = h.pos_neg_parts(tol)?;
        let r = rel(&p.pos.sub(&p.neg)?, &h)
            .max(small(&p.pos.mul(&p.neg)?, &h))
            .max(small(&p.neg.mul(&p.pos)?, &h))
            .max(rel(&p.pos.add(&p.neg)?, &p.abs));
        let positive =
            p.pos.is_positive(tol)? && p.neg.is_positive(tol)? && p.abs.is_positive(tol)?;
        Ok((positive && r <= tol, r))
    });

    let p = rng.element(a).star_square();
    out.check("calculus.sqrt_contract", || {
        let b = p.sqrt_positive(tol)?;
        let r = rel(&b.mul(&b)?, &p).max(small(&b.mul(&p)?.sub(&p.mul(&b)?)?, &p));
        Ok((b.is_positive(tol)? && r <= tol, r))
    });
}

fn cone(inst: &Instance, rng: &mut SampleRng, tol: f64, out: &mut InstanceOutcome) {
    let a = inst.top_algebra();
    let b = rng.element(a);
    let negative = rng.non_positive_element(a, 1e-3);
    let samples = [
        b.star_square(),
        negative.clone(),
        rng.hermitian_element(a),
        rng.element(a),
        a.zero(),
    ];
    for x in &samples {
        out.check("cone.routes_agree", || {
            Ok((x.positivity_witness_check(tol)?, 0.0))
        });
    }
    out.check("cone.star_squares_positive", || {
        Ok((
            samples[0].is_positive(tol)?,
            samples[0].positivity_defect()?,
        ))
    });
    out.check("cone.negatives_rejected", || {
        Ok((!negative.is_positive(tol)?, 0.0))
    });
    let p = rng.positive_element(a);
    out.check("cone.positive_is_star_square", || {
        let s = p.sqrt_positive(tol)?;
        let r = rel(&s.star_square(), &p);
        Ok((r <= tol, r))
    });

    let q = rng.positive_element(a);
    out.check("cone.sum", || Ok((p.add(&q)?.is_positive(tol)?, 0.0)));
    for lambda in [0.0, 0.5, 2.0, 7.0] {
        out.check("cone.scaling", || {
            Ok((p.scale_real(lambda).is_positive(tol)?, 0.0))
        });
    }
    out.check("cone.convex", || {
        let t = rng.unit();
        Ok((
            p.scale_real(t)
                .add(&q.scale_real(1.0 - t))?
                .is_positive(tol)?,
            0.0,
        ))
    });

    // Boundary point: positive with some blocks masked to zero.
    let boundary = rng.ideal(a).mask(&p).expect("same algebra");
    out.check("cone.closed", || {
        let mut ok = boundary.is_positive(tol)?;
        for k in 1..=20 {
            let approx = boundary.add(&a.unit().scale_real(0.5f64.powi(k)))?;
            ok &= approx.is_positive(tol)?;
        }
        Ok((ok, 0.0))
    });
    out.check("cone.pointed", || {
        let mut ok = a.zero().scale_real(-1.0).is_positive(tol)?;
        for x in [&p, &boundary] {
            if x.scale_real(-1.0).is_positive(tol)? {
                ok &= x.norm()? <= tol;
            }
        }
        Ok((ok, 0.0))
    });
}

fn lemmas(inst: &Instance, rng: &mut SampleRng, tol: f64, out: &mut InstanceOutcome) {
    let top = inst.top_algebra();
    let i = &inst.ideal_i.supports[&inst.top];
    let j = &inst.ideal_j.supports[&inst.top];
    // The deepest connector out of the top, or a fresh surjection for one level.
    let phi = inst
        .system
        .strict_pairs()
        .find(|(_, b)| b == &inst.top)
        .map(|(a, b)| inst.system.connector(a, b).expect("listed pair"))
        .unwrap_or_else(|| random_morphism(rng, top));
    let seed = rng.next_u64();
    match lcstar::lemma_suite(&phi, i, j, LEMMA_SAMPLES, seed, tol) {
        Ok(tally) => out.absorb("lemmas", &tally),
        Err(e) => out.check("lemmas.setup", || Err(e)),
    }
}

fn theorem(inst: &Instance, rng: &mut SampleRng, tol: f64, out: &mut InstanceOutcome) {
    let top = &inst.top;
    let i = &inst.ideal_i.supports[top];
    let j = &inst.ideal_j.supports[top];
    let s = rng.member(i).add(&rng.member(j)).expect("same algebra");
    let c = s.star_square();

    out.check("theorem.one_level", || {
        let (a, b) = decompose_positive(&c, i, j, tol)?;
        let scale = c.norm()?.max(1.0);
        let r = a.add(&b)?.sub(&c)?.norm()? / scale;
        let ok = a.is_positive(tol)?
            && b.is_positive(tol)?
            && i.contains(&a, tol)
            && j.contains(&b, tol);
        Ok((ok && r <= EXACT_TOL, r))
    });

    let sys = &inst.system;
    let (ci, cj) = (&inst.ideal_i, &inst.ideal_j);
    let limit = sys
        .coherent_from_top(top, &c)
        .and_then(|cc| Ok((limit_decompose_positive(sys, &cc, ci, cj, tol)?, cc)));
    match limit {
        Ok(((a, b), cc)) => {
            out.check("theorem.limit.membership", || {
                let ok = ci.contains(&a, tol)
                    && cj.contains(&b, tol)
                    && sys.limit_is_positive(&a, tol)?
                    && sys.limit_is_positive(&b, tol)?;
                Ok((ok, 0.0))
            });
            out.check("theorem.limit.sum", || {
                let r = a.add(&b)?.relative_distance(&cc);
                Ok((r <= EXACT_TOL, r))
            });
            out.check("theorem.limit.coherence", || {
                let r = sys.coherence_residual(&a)?.max(sys.coherence_residual(&b)?);
                Ok((r <= EXACT_TOL, r))
            });
            out.check("theorem.limit.naturality", || {
                let r = sys.naturality_residual(&cc, ci, cj, tol)?;
                Ok((r <= EXACT_TOL, r))
            });
        }
        Err(e) => out.check("theorem.limit.membership", || Err(e)),
    }

    for (id, ia) in &ci.supports {
        let ja = &cj.supports[id];
        let sum = ia.sum(ja).expect("same algebra");
        // I_α⁺ + J_α⁺ ⊆ (I_α + J_α)⁺
        let (p, q) = (rng.positive_member(ia), rng.positive_member(ja));
        out.check("theorem.levelwise.forward", || {
            let x = p.add(&q)?;
            Ok((x.is_positive(tol)? && sum.contains(&x, tol), 0.0))
        });
        // (I_α + J_α)⁺ ⊆ I_α⁺ + J_α⁺
        let x = rng.positive_member(&sum);
        out.check("theorem.levelwise.backward", || {
            let (a, b) = decompose_positive(&x, ia, ja, tol)?;
            let r = rel(&a.add(&b)?, &x);
            let ok = a.is_positive(tol)?
                && b.is_positive(tol)?
                && ia.contains(&a, tol)
                && ja.contains(&b, tol);
            Ok((ok && r <= EXACT_TOL, r))
        });
        // Outside I_α + J_α there is nothing to split.
        if sum.support().len() < ia.algebra().block_count() {
            let y = rng.positive_element(ia.algebra());
            out.check("theorem.levelwise.outside_rejected", || {
                Ok((split_in_sum(&y, ia, ja, tol).is_err(), 0.0))
            });
        }
    }
}

fn system(inst: &Instance, rng: &mut SampleRng, tol: f64, out: &mut InstanceOutcome) {
    let sys = &inst.system;
    let tally = sys.validate(2, rng.next_u64(), EXACT_TOL);
    out.absorb("system", &tally);
    out.check("system.ideals_compatible", || {
        Ok((
            inst.ideal_i.is_compatible(sys)? && inst.ideal_j.is_compatible(sys)?,
            0.0,
        ))
    });

    let top = inst.top_algebra();
    let x = rng.element(top);
    out.check("system.coherence", || {
        let r = sys.coherence_residual(&sys.coherent_from_top(&inst.top, &x)?)?;
        Ok((r <= EXACT_TOL, r))
    });
    out.check("system.seminorm_monotone", || {
        let cx = sys.coherent_from_top(&inst.top, &x)?;
        let mut ok = true;
        for (a, b) in sys.strict_pairs() {
            ok &= sys.seminorm(&cx, a)? <= sys.seminorm(&cx, b)? * (1.0 + 1e-12) + 1e-15;
        }
        Ok((ok, 0.0))
    });
    for y in [
        rng.positive_element(top),
        rng.non_positive_element(top, 1e-3),
    ] {
        out.check("system.limit_positivity", || {
            let cy = sys.coherent_from_top(&inst.top, &y)?;
            Ok((sys.limit_is_positive(&cy, tol)? == y.is_positive(tol)?, 0.0))
        });
    }
    out.check("system.json_roundtrip", || {
        let text = inst
            .to_json()
            .map_err(|e| lcstar::Error::Rejected(e.to_string()))?;
        let back =
            Instance::from_json(&text).map_err(|e| lcstar::Error::Rejected(e.to_string()))?;
        Ok((&back == inst, 0.0))
    });
}

/// Result of one trial of a suite run.
#[derive(Clone, Debug)]
struct TrialResult {
    record: InstanceRecord,
    outcome: std::result::Result<InstanceOutcome, String>,
}

fn run_trial(suite: Suite, spec: &InstanceSpec, t: u64) -> TrialResult {
    let tspec = spec.for_trial(t);
    match gen_instance(&tspec) {
        Ok(inst) => TrialResult {
            record: InstanceRecord {
                trial: t,
                seed: tspec.seed,
                digest: inst.digest(),
            },
            outcome: Ok(run_on_instance(suite, &inst, spec.tol)),
        },
        Err(e) => TrialResult {
            record: InstanceRecord {
                trial: t,
                seed: tspec.seed,
                digest: String::new(),
            },
            outcome: Err(e.to_string()),
        },
    }
}

/// CLI invocation that reruns the checks of `suite` on one instance.
pub fn replay_command(suite: Suite, spec: &InstanceSpec) -> String {
    format!(
        "lcstar check --suite {suite} --seed {} --blocks {} --max-dim {} --depth {} --tol {:e}",
        spec.seed, spec.block_count, spec.max_block_dim, spec.chain_depth, spec.tol
    )
}

pub fn run_suite(suite: Suite, spec: &InstanceSpec) -> Result<SuiteReport> {
    run_suite_with_workers(suite, spec, 1)
}

/// Runs `spec.trials` generated instances. Trials are split across `workers`
/// threads; results are merged in trial order, so the report does not depend
/// on the worker count.
pub fn run_suite_with_workers(
    suite: Suite,
    spec: &InstanceSpec,
    workers: usize,
) -> Result<SuiteReport> {
    spec.validate()?;
    if workers == 0 {
        return Err(Error::Spec("workers must be positive".into()));
    }
    let workers = workers.min(spec.trials as usize);
    let mut results: Vec<Option<TrialResult>> = vec![None; spec.trials as usize];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w as u64..spec.trials)
                        .step_by(workers)
                        .map(|t| run_trial(suite, spec, t))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for r in h.join().expect("worker panicked") {
                let t = r.record.trial as usize;
                results[t] = Some(r);
            }
        }
    });

    let results = results.into_iter().map(|r| r.expect("every trial ran"));
    Ok(assemble(suite, *spec, results, |t| spec.for_trial(t)))
}

/// Runs `suite` on a single (possibly stored) instance.
pub fn check_instance(suite: Suite, inst: &Instance, tol: f64) -> SuiteReport {
    let spec = inst.spec(1, tol);
    let result = TrialResult {
        record: InstanceRecord {
            trial: 0,
            seed: inst.seed,
            digest: inst.digest(),
        },
        outcome: Ok(run_on_instance(suite, inst, tol)),
    };
    assemble(suite, spec, std::iter::once(result), |_| spec)
}

/// Merges trial results in the order given.
fn assemble(
    suite: Suite,
    config: InstanceSpec,
    results: impl Iterator<Item = TrialResult>,
    replay_spec: impl Fn(u64) -> InstanceSpec,
) -> SuiteReport {
    let mut tally = LawTally::default();
    let mut instances = Vec::new();
    let mut failed_trials = Vec::new();
    for r in results {
        let replay = replay_command(suite, &replay_spec(r.record.trial));
        let failure = |property: String, failed, worst_residual, detail| TrialFailure {
            trial: r.record.trial,
            seed: r.record.seed,
            digest: r.record.digest.clone(),
            property,
            failed,
            worst_residual,
            detail,
            replay: replay.clone(),
        };
        match &r.outcome {
            Ok(o) => {
                tally.merge(&o.tally);
                for law in o.tally.laws.iter().filter(|l| l.failed > 0) {
                    let detail = o.notes.get(&law.name).cloned().unwrap_or_default();
                    failed_trials.push(failure(
                        law.name.clone(),
                        law.failed,
                        law.worst_residual,
                        detail,
                    ));
                }
            }
            Err(e) => {
                tally.record("generation", false, f64::INFINITY);
                failed_trials.push(failure("generation".into(), 1, f64::MAX, e.clone()));
            }
        }
        instances.push(r.record);
    }

    SuiteReport {
        suite,
        rng: RNG_NAME.to_string(),
        config,
        checks: tally.laws.iter().map(|l| l.checked).sum(),
        failures: tally.failures(),
        properties: tally.laws,
        instances,
        failed_trials,
    }
}
