use std::collections::BTreeMap;

use lcstar::json::CoherentIdealWire;
use lcstar::random::derive_seed;
use lcstar::{CoherentIdeal, DirectedSystem, FdAlgebra, LevelId, SampleRng, StarMorphism};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Parameters of a verification run. Everything except `trials` and `tol`
/// also shapes the generated instances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceSpec {
    pub seed: u64,
    pub block_count: usize,
    pub max_block_dim: usize,
    pub chain_depth: usize,
    pub trials: u64,
    pub tol: f64,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec {
            seed: 42,
            block_count: 3,
            max_block_dim: 4,
            chain_depth: 3,
            trials: 100,
            tol: lcstar::DEFAULT_TOL,
        }
    }
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Spec(msg));
        if !(1..=4).contains(&self.block_count) {
            return bad(format!(
                "block_count must be in 1..=4, got {}",
                self.block_count
            ));
        }
        if !(1..=8).contains(&self.max_block_dim) {
            return bad(format!(
                "max_block_dim must be in 1..=8, got {}",
                self.max_block_dim
            ));
        }
        if !(1..=3).contains(&self.chain_depth) {
            return bad(format!(
                "chain_depth must be in 1..=3, got {}",
                self.chain_depth
            ));
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad(format!(
                "tol must be a positive finite number, got {}",
                self.tol
            ));
        }
        Ok(())
    }

    /// The spec of trial `t`: same shape, seed `derive_seed(seed, t)`.
    pub fn for_trial(&self, t: u64) -> InstanceSpec {
        InstanceSpec {
            seed: derive_seed(self.seed, t),
            ..*self
        }
    }
}

/// A generated directed system with two compatible ideals pushed down from
/// the top level.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub seed: u64,
    pub block_count: usize,
    pub max_block_dim: usize,
    pub chain_depth: usize,
    pub system: DirectedSystem,
    pub top: LevelId,
    pub ideal_i: CoherentIdeal,
    pub ideal_j: CoherentIdeal,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceWire {
    seed: u64,
    block_count: usize,
    max_block_dim: usize,
    chain_depth: usize,
    system: DirectedSystem,
    top: LevelId,
    ideal_i: CoherentIdealWire,
    ideal_j: CoherentIdealWire,
}

pub fn level(name: &str) -> LevelId {
    LevelId::new(name).expect("static level id")
}

/// Surjection keeping a random nonempty ordered subset of `source`'s blocks,
/// each twisted by a random unitary with probability ½.
pub fn random_morphism(rng: &mut SampleRng, source: &FdAlgebra) -> StarMorphism {
    let mut kept: Vec<usize> = (0..source.block_count()).collect();
    rng.shuffle(&mut kept);
    kept.truncate(rng.range(1, kept.len()));
    let twists = kept
        .iter()
        .map(|&k| rng.coin().then(|| rng.unitary(source.blocks()[k])))
        .collect();
    StarMorphism::new(source.clone(), kept, twists).expect("valid selection")
}

/// Chain `L0 < … < L{d-1}` whose top carries `block_count` blocks; each lower
/// level is a random twisted selection of the one above. For depth ≥ 2 a coin
/// decides whether a side level `S0` hangs directly below the top, making
/// the order non-total. Ideals are random top supports pushed down.
pub fn gen_instance(spec: &InstanceSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = SampleRng::new(spec.seed);
    let d = spec.chain_depth;
    let ids: Vec<LevelId> = (0..d).map(|k| level(&format!("L{k}"))).collect();
    let top = ids[d - 1].clone();

    // algebras[k] and step[k]: A_{L(k+1)} → A_{Lk}
    let mut algebras = vec![rng.algebra(spec.block_count, spec.max_block_dim)];
    let mut steps = Vec::new();
    for _ in 1..d {
        let g = random_morphism(&mut rng, &algebras[0]);
        algebras.insert(0, g.target().clone());
        steps.insert(0, g);
    }

    let mut levels: BTreeMap<LevelId, FdAlgebra> =
        ids.iter().cloned().zip(algebras.iter().cloned()).collect();
    let mut order = Vec::new();
    let mut connectors = BTreeMap::new();
    for a in 0..d {
        let mut g: Option<StarMorphism> = None;
        for b in a + 1..d {
            let next = match g {
                None => steps[a].clone(),
                Some(prev) => prev.compose(&steps[b - 1])?,
            };
            order.push((ids[a].clone(), ids[b].clone()));
            connectors.insert((ids[a].clone(), ids[b].clone()), next.clone());
            g = Some(next);
        }
    }
    if d >= 2 && rng.coin() {
        let side = level("S0");
        let g = random_morphism(&mut rng, &algebras[d - 1]);
        levels.insert(side.clone(), g.target().clone());
        order.push((side.clone(), top.clone()));
        connectors.insert((side, top.clone()), g);
    }
    let system = DirectedSystem::new(levels, order, connectors)?;

    let top_algebra = system.algebra(&top)?.clone();
    let (i, j) = (rng.ideal(&top_algebra), rng.ideal(&top_algebra));
    Ok(Instance {
        seed: spec.seed,
        block_count: spec.block_count,
        max_block_dim: spec.max_block_dim,
        chain_depth: spec.chain_depth,
        ideal_i: CoherentIdeal::from_top(&system, &top, &i)?,
        ideal_j: CoherentIdeal::from_top(&system, &top, &j)?,
        system,
        top,
    })
}

impl Instance {
    fn to_wire(&self) -> InstanceWire {
        InstanceWire {
            seed: self.seed,
            block_count: self.block_count,
            max_block_dim: self.max_block_dim,
            chain_depth: self.chain_depth,
            system: self.system.clone(),
            top: self.top.clone(),
            ideal_i: self.ideal_i.to_wire(),
            ideal_j: self.ideal_j.to_wire(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(lcstar::json::to_json(&self.to_wire())?)
    }

    pub fn from_json(text: &str) -> Result<Instance> {
        let w: InstanceWire = lcstar::json::from_json(text)?;
        if !w.system.is_upper_bound(&w.top) {
            return Err(Error::Spec(format!(
                "level {} is not above every level",
                w.top
            )));
        }
        Ok(Instance {
            ideal_i: CoherentIdeal::from_wire(&w.system, &w.ideal_i)?,
            ideal_j: CoherentIdeal::from_wire(&w.system, &w.ideal_j)?,
            seed: w.seed,
            block_count: w.block_count,
            max_block_dim: w.max_block_dim,
            chain_depth: w.chain_depth,
            system: w.system,
            top: w.top,
        })
    }

    /// SHA-256 of the compact JSON encoding, hex.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(&self.to_wire()).expect("instance encodes");
        hex::encode(Sha256::digest(bytes))
    }

    /// The spec that regenerates this instance, with the given run settings.
    pub fn spec(&self, trials: u64, tol: f64) -> InstanceSpec {
        InstanceSpec {
            seed: self.seed,
            block_count: self.block_count,
            max_block_dim: self.max_block_dim,
            chain_depth: self.chain_depth,
            trials,
            tol,
        }
    }

    pub fn top_algebra(&self) -> &FdAlgebra {
        self.system.algebra(&self.top).expect("top level exists")
    }
}
