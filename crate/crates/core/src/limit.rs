//! Finite projective systems `{A_α, g_α^β}` and their coherent elements.
//!
//! Levels are indexed by a finite directed poset. For every comparable pair
//! `α ≤ β` there is a connecting surjection `g_α^β: A_β → A_α`; the
//! projective limit is the set of tuples `(x_α)` with `x_α = g_α^β(x_β)`.
//! Seminorms on the limit are the level norms `‖x‖_α = ‖x_α‖`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{reject, Error, Result};
use crate::fdalg::{AlgElement, FdAlgebra};
use crate::ideals::{split_in_sum, BlockIdeal, StarMorphism};
use crate::random::{derive_seed, SampleRng};
use crate::report::LawTally;

/// Name of a level. Nonempty and free of `<`, which separates pairs in JSON keys.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LevelId(String);

impl LevelId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() || id.contains('<') {
            return reject(format!("invalid level id {id:?}"));
        }
        Ok(LevelId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for LevelId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        LevelId::new(s)
    }
}

impl From<LevelId> for String {
    fn from(id: LevelId) -> String {
        id.0
    }
}

impl fmt::Display for LevelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite projective family of finite-dimensional C*-algebras.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectedSystem {
    levels: BTreeMap<LevelId, FdAlgebra>,
    /// Pairs `(α, β)` with `α ≤ β`, including every `(α, α)`.
    order: BTreeSet<(LevelId, LevelId)>,
    /// `g_α^β`, keyed by `(α, β)`; identities may be omitted.
    connectors: BTreeMap<(LevelId, LevelId), StarMorphism>,
}

impl DirectedSystem {
    /// Checks referential integrity only: ids exist, every strict pair has a
    /// connector `A_β → A_α`. Order axioms and connector laws are checked by
    /// [`DirectedSystem::validate`].
    pub fn new(
        levels: BTreeMap<LevelId, FdAlgebra>,
        order: impl IntoIterator<Item = (LevelId, LevelId)>,
        connectors: BTreeMap<(LevelId, LevelId), StarMorphism>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return reject("a directed system needs at least one level");
        }
        let mut pairs: BTreeSet<(LevelId, LevelId)> =
            levels.keys().map(|a| (a.clone(), a.clone())).collect();
        for (a, b) in order {
            for id in [&a, &b] {
                if !levels.contains_key(id) {
                    return reject(format!("order mentions unknown level {id}"));
                }
            }
            pairs.insert((a, b));
        }
        for ((a, b), g) in &connectors {
            if !pairs.contains(&(a.clone(), b.clone())) {
                return reject(format!("connector {a}<{b} for an incomparable pair"));
            }
            if g.source() != &levels[b] || g.target() != &levels[a] {
                return reject(format!("connector {a}<{b} does not map A_{b} onto A_{a}"));
            }
        }
        for (a, b) in &pairs {
            if a != b && !connectors.contains_key(&(a.clone(), b.clone())) {
                return reject(format!("missing connector {a}<{b}"));
            }
        }
        Ok(DirectedSystem {
            levels,
            order: pairs,
            connectors,
        })
    }

    /// A one-level system.
    pub fn single(id: LevelId, algebra: FdAlgebra) -> Self {
        let mut levels = BTreeMap::new();
        levels.insert(id, algebra);
        DirectedSystem::new(levels, [], BTreeMap::new()).expect("single level")
    }

    pub fn levels(&self) -> &BTreeMap<LevelId, FdAlgebra> {
        &self.levels
    }

    pub fn level_ids(&self) -> impl Iterator<Item = &LevelId> {
        self.levels.keys()
    }

    pub fn algebra(&self, id: &LevelId) -> Result<&FdAlgebra> {
        self.levels
            .get(id)
            .ok_or_else(|| Error::Rejected(format!("unknown level {id}")))
    }

    pub fn order(&self) -> &BTreeSet<(LevelId, LevelId)> {
        &self.order
    }

    /// Explicitly stored connectors (identities only if they were supplied).
    pub fn connectors(&self) -> &BTreeMap<(LevelId, LevelId), StarMorphism> {
        &self.connectors
    }

    pub fn leq(&self, a: &LevelId, b: &LevelId) -> bool {
        self.order.contains(&(a.clone(), b.clone()))
    }

    /// `g_a^b`; the identity when `a = b` and none was stored.
    pub fn connector(&self, a: &LevelId, b: &LevelId) -> Result<StarMorphism> {
        if let Some(g) = self.connectors.get(&(a.clone(), b.clone())) {
            return Ok(g.clone());
        }
        if a == b {
            return Ok(StarMorphism::identity(self.algebra(a)?));
        }
        reject(format!(
            "levels {a} and {b} are not comparable as {a} ≤ {b}"
        ))
    }

    /// Pairs `α < β`.
    pub fn strict_pairs(&self) -> impl Iterator<Item = &(LevelId, LevelId)> {
        self.order.iter().filter(|(a, b)| a != b)
    }

    pub fn upper_bounds(&self, a: &LevelId, b: &LevelId) -> Vec<LevelId> {
        self.levels
            .keys()
            .filter(|u| self.leq(a, u) && self.leq(b, u))
            .cloned()
            .collect()
    }

    /// Least upper bound when one exists, otherwise the first minimal upper
    /// bound in id order; `None` only when the pair has no upper bound.
    pub fn join(&self, a: &LevelId, b: &LevelId) -> Option<LevelId> {
        let ubs = self.upper_bounds(a, b);
        if let Some(least) = ubs.iter().find(|u| ubs.iter().all(|v| self.leq(u, v))) {
            return Some(least.clone());
        }
        ubs.iter()
            .find(|u| ubs.iter().all(|v| *v == **u || !self.leq(v, u)))
            .cloned()
    }

    pub fn is_upper_bound(&self, top: &LevelId) -> bool {
        self.levels.keys().all(|a| self.leq(a, top))
    }

    /// The level above every other one, if any.
    pub fn top(&self) -> Option<LevelId> {
        self.levels.keys().find(|t| self.is_upper_bound(t)).cloned()
    }

    /// Order axioms, directedness, and the connector laws `g_α^α = id` and
    /// `g_α^β ∘ g_β^γ = g_α^γ` on `trials` random elements per law instance.
    pub fn validate(&self, trials: u64, seed: u64, tol: f64) -> LawTally {
        let mut report = LawTally::default();
        let ids: Vec<&LevelId> = self.levels.keys().collect();

        for a in &ids {
            for b in &ids {
                if a < b {
                    let ok = !(self.leq(a, b) && self.leq(b, a));
                    report.record("order.antisymmetric", ok, 0.0);
                    report.record("order.directed", self.join(a, b).is_some(), 0.0);
                }
            }
        }
        if ids.len() == 1 {
            report.record("order.antisymmetric", true, 0.0);
            report.record("order.directed", true, 0.0);
        }

        let mut stream = 0u64;
        let mut next_rng = || {
            stream += 1;
            SampleRng::new(derive_seed(seed, stream))
        };

        for a in &ids {
            let mut rng = next_rng();
            let check = self.connector(a, a).and_then(|g| {
                let mut worst = 0.0f64;
                for _ in 0..trials {
                    let x = rng.element(&self.levels[*a]);
                    worst = worst.max(g.apply(&x)?.relative_distance(&x));
                }
                Ok(worst)
            });
            match check {
                Ok(r) => report.record("connector.identity", r <= tol, r),
                Err(_) => report.record("connector.identity", false, f64::INFINITY),
            };
        }

        for (a, b) in self.strict_pairs() {
            for (b2, c) in self.strict_pairs() {
                if b != b2 {
                    continue;
                }
                if !self.leq(a, c) {
                    report.record("order.transitive", false, f64::INFINITY);
                    continue;
                }
                report.record("order.transitive", true, 0.0);
                let mut rng = next_rng();
                let check = (|| -> Result<f64> {
                    let (g_ab, g_bc, g_ac) = (
                        self.connector(a, b)?,
                        self.connector(b, c)?,
                        self.connector(a, c)?,
                    );
                    let mut worst = 0.0f64;
                    for _ in 0..trials {
                        let x = rng.element(&self.levels[c]);
                        let two_step = g_ab.apply(&g_bc.apply(&x)?)?;
                        worst = worst.max(two_step.relative_distance(&g_ac.apply(&x)?));
                    }
                    Ok(worst)
                })();
                match check {
                    Ok(r) => report.record("connector.composition", r <= tol, r),
                    Err(_) => report.record("connector.composition", false, f64::INFINITY),
                };
            }
        }
        if report.get("order.transitive").is_none() {
            report.law("order.transitive");
            report.law("connector.composition");
        }
        report
    }

    /// Coherent tuple generated by `x ∈ A_top`: `x_α = g_α^top(x)`.
    pub fn coherent_from_top(&self, top: &LevelId, x: &AlgElement) -> Result<CoherentElement> {
        if !self.levels.contains_key(top) || !self.is_upper_bound(top) {
            return reject(format!("level {top} is not above every level"));
        }
        if x.algebra() != &self.levels[top] {
            return reject(format!("element does not live in A_{top}"));
        }
        let parts = self
            .levels
            .keys()
            .map(|a| Ok((a.clone(), self.connector(a, top)?.apply(x)?)))
            .collect::<Result<_>>()?;
        Ok(CoherentElement { parts })
    }

    fn check_cover(&self, x: &CoherentElement) -> Result<()> {
        for (id, alg) in &self.levels {
            match x.parts.get(id) {
                None => return reject(format!("tuple is missing level {id}")),
                Some(p) if p.algebra() != alg => {
                    return reject(format!("part at level {id} lives in the wrong algebra"))
                }
                Some(_) => {}
            }
        }
        if let Some(extra) = x.parts.keys().find(|k| !self.levels.contains_key(*k)) {
            return reject(format!("tuple has unknown level {extra}"));
        }
        Ok(())
    }

    /// Worst `‖x_α - g_α^β(x_β)‖` (relative) over comparable pairs.
    pub fn coherence_residual(&self, x: &CoherentElement) -> Result<f64> {
        self.check_cover(x)?;
        let mut worst = 0.0f64;
        for (a, b) in self.strict_pairs() {
            let pushed = self.connector(a, b)?.apply(&x.parts[b])?;
            worst = worst.max(pushed.relative_distance(&x.parts[a]));
        }
        Ok(worst)
    }

    pub fn coherence_check(&self, x: &CoherentElement, tol: f64) -> Result<bool> {
        Ok(self.coherence_residual(x)? <= tol)
    }

    /// `‖x‖_α = ‖x_α‖`.
    pub fn seminorm(&self, x: &CoherentElement, level: &LevelId) -> Result<f64> {
        self.check_cover(x)?;
        x.parts
            .get(level)
            .ok_or_else(|| Error::Rejected(format!("unknown level {level}")))?
            .norm()
    }

    /// `sup_α ‖x‖_α`; always finite for finite systems.
    pub fn bound_norm(&self, x: &CoherentElement) -> Result<BoundNorm> {
        self.check_cover(x)?;
        let mut best = 0.0f64;
        for p in x.parts.values() {
            best = best.max(p.norm()?);
        }
        Ok(BoundNorm::Finite(best))
    }

    /// Positive in the limit iff positive at every level.
    pub fn limit_is_positive(&self, x: &CoherentElement, tol: f64) -> Result<bool> {
        self.check_cover(x)?;
        for p in x.parts.values() {
            if !p.is_positive(tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Worst relative residual of the square
    /// `g_α^β(decompose_β(c_β)) = decompose_α(g_α^β(c_β))` over comparable pairs,
    /// for both summands.
    pub fn naturality_residual(
        &self,
        c: &CoherentElement,
        i: &CoherentIdeal,
        j: &CoherentIdeal,
        tol: f64,
    ) -> Result<f64> {
        self.check_cover(c)?;
        i.check_cover(self)?;
        j.check_cover(self)?;
        let mut worst = 0.0f64;
        for (a, b) in self.strict_pairs() {
            let g = self.connector(a, b)?;
            let (ab, bb) = split_in_sum(&c.parts[b], &i.supports[b], &j.supports[b], tol)?;
            let pushed = g.apply(&c.parts[b])?;
            let (aa, ba) = split_in_sum(&pushed, &i.supports[a], &j.supports[a], tol)?;
            worst = worst
                .max(g.apply(&ab)?.relative_distance(&aa))
                .max(g.apply(&bb)?.relative_distance(&ba));
        }
        Ok(worst)
    }
}

/// Value of `sup_α ‖x‖_α`. `Unbounded` is reserved for infinite families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundNorm {
    Finite(f64),
    Unbounded,
}

impl BoundNorm {
    pub fn value(&self) -> Option<f64> {
        match self {
            BoundNorm::Finite(v) => Some(*v),
            BoundNorm::Unbounded => None,
        }
    }
}

/// Element of the projective limit, one part per level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoherentElement {
    pub parts: BTreeMap<LevelId, AlgElement>,
}

impl CoherentElement {
    pub fn part(&self, id: &LevelId) -> Option<&AlgElement> {
        self.parts.get(id)
    }

    pub fn zero(system: &DirectedSystem) -> Self {
        CoherentElement {
            parts: system
                .levels
                .iter()
                .map(|(k, a)| (k.clone(), a.zero()))
                .collect(),
        }
    }

    pub fn unit(system: &DirectedSystem) -> Self {
        CoherentElement {
            parts: system
                .levels
                .iter()
                .map(|(k, a)| (k.clone(), a.unit()))
                .collect(),
        }
    }

    /// Levelwise binary operation; level sets must match.
    pub fn zip_with(
        &self,
        other: &CoherentElement,
        f: impl Fn(&AlgElement, &AlgElement) -> Result<AlgElement>,
    ) -> Result<CoherentElement> {
        if self.parts.len() != other.parts.len() {
            return reject("tuples cover different levels");
        }
        let parts = self
            .parts
            .iter()
            .map(|(k, x)| {
                let y = other
                    .parts
                    .get(k)
                    .ok_or_else(|| Error::Rejected(format!("tuple is missing level {k}")))?;
                Ok((k.clone(), f(x, y)?))
            })
            .collect::<Result<_>>()?;
        Ok(CoherentElement { parts })
    }

    pub fn add(&self, other: &CoherentElement) -> Result<CoherentElement> {
        self.zip_with(other, AlgElement::add)
    }

    pub fn sub(&self, other: &CoherentElement) -> Result<CoherentElement> {
        self.zip_with(other, AlgElement::sub)
    }

    /// Worst levelwise relative distance.
    pub fn relative_distance(&self, other: &CoherentElement) -> f64 {
        if self.parts.len() != other.parts.len() {
            return f64::INFINITY;
        }
        self.parts
            .iter()
            .map(|(k, x)| {
                other
                    .parts
                    .get(k)
                    .map_or(f64::INFINITY, |y| x.relative_distance(y))
            })
            .fold(0.0, f64::max)
    }
}

/// Levelwise block ideals `I_α = π_α(I)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentIdeal {
    pub supports: BTreeMap<LevelId, BlockIdeal>,
}

impl CoherentIdeal {
    /// `I_α = g_α^top(I)`.
    pub fn from_top(system: &DirectedSystem, top: &LevelId, ideal: &BlockIdeal) -> Result<Self> {
        if !system.levels.contains_key(top) || !system.is_upper_bound(top) {
            return reject(format!("level {top} is not above every level"));
        }
        let supports = system
            .levels
            .keys()
            .map(|a| Ok((a.clone(), system.connector(a, top)?.image_ideal(ideal)?)))
            .collect::<Result<_>>()?;
        Ok(CoherentIdeal { supports })
    }

    fn check_cover(&self, system: &DirectedSystem) -> Result<()> {
        if self.supports.len() != system.levels.len() {
            return reject("ideal does not cover the system's levels");
        }
        for (id, alg) in &system.levels {
            match self.supports.get(id) {
                Some(i) if i.algebra() == alg => {}
                Some(_) => {
                    return reject(format!("ideal at level {id} lives in the wrong algebra"))
                }
                None => return reject(format!("ideal is missing level {id}")),
            }
        }
        Ok(())
    }

    /// `g_α^β(I_β) = I_α` for every comparable pair.
    pub fn is_compatible(&self, system: &DirectedSystem) -> Result<bool> {
        self.check_cover(system)?;
        for (a, b) in system.strict_pairs() {
            if system.connector(a, b)?.image_ideal(&self.supports[b])? != self.supports[a] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `(I+J)_α = I_α + J_α`.
    pub fn sum(&self, other: &CoherentIdeal) -> Result<CoherentIdeal> {
        if self.supports.len() != other.supports.len() {
            return reject("ideals cover different levels");
        }
        let supports = self
            .supports
            .iter()
            .map(|(k, i)| {
                let j = other
                    .supports
                    .get(k)
                    .ok_or_else(|| Error::Rejected(format!("ideal is missing level {k}")))?;
                Ok((k.clone(), i.sum(j)?))
            })
            .collect::<Result<_>>()?;
        Ok(CoherentIdeal { supports })
    }

    pub fn contains(&self, x: &CoherentElement, tol: f64) -> bool {
        self.supports.len() == x.parts.len()
            && self
                .supports
                .iter()
                .all(|(k, i)| x.parts.get(k).is_some_and(|p| i.contains(p, tol)))
    }
}

/// Levelwise [`crate::decompose_positive`]: `ĉ = â + b̂` with `â ∈ Î⁺`, `b̂ ∈ Ĵ⁺`.
/// The halving rule commutes with block selections and twists, so the outputs
/// are coherent whenever `ĉ` is and the ideals are compatible.
pub fn limit_decompose_positive(
    system: &DirectedSystem,
    c: &CoherentElement,
    i: &CoherentIdeal,
    j: &CoherentIdeal,
    tol: f64,
) -> Result<(CoherentElement, CoherentElement)> {
    system.check_cover(c)?;
    i.check_cover(system)?;
    j.check_cover(system)?;
    let mut a_parts = BTreeMap::new();
    let mut b_parts = BTreeMap::new();
    for (id, part) in &c.parts {
        if !part.is_positive(tol)? {
            return reject(format!("element is not positive at level {id}"));
        }
        let (a, b) =
            split_in_sum(part, &i.supports[id], &j.supports[id], tol).map_err(|e| match e {
                Error::OutsideIdeal { block, mass } => Error::OutsideIdealAtLevel {
                    level: id.to_string(),
                    block,
                    mass,
                },
                other => other,
            })?;
        a_parts.insert(id.clone(), a);
        b_parts.insert(id.clone(), b);
    }
    Ok((
        CoherentElement { parts: a_parts },
        CoherentElement { parts: b_parts },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_TOL;

    fn id(s: &str) -> LevelId {
        LevelId::new(s).unwrap()
    }

    fn alg(blocks: &[usize]) -> FdAlgebra {
        FdAlgebra::new(blocks.to_vec()).unwrap()
    }

    /// `lo ≤ hi` with `hi = M₂ ⊕ M₃`, `lo = M₂` keeping block 0.
    fn two_chain() -> DirectedSystem {
        let hi = alg(&[2, 3]);
        let g = StarMorphism::selection(&hi, vec![0]).unwrap();
        let levels = [(id("hi"), hi), (id("lo"), alg(&[2]))]
            .into_iter()
            .collect();
        let connectors = [((id("lo"), id("hi")), g)].into_iter().collect();
        DirectedSystem::new(levels, [(id("lo"), id("hi"))], connectors).unwrap()
    }

    #[test]
    fn level_ids_validated() {
        assert!(LevelId::new("").is_err());
        assert!(LevelId::new("a<b").is_err());
        assert!(LevelId::new("α").is_ok());
    }

    #[test]
    fn construction_rejects_bad_references() {
        let a = alg(&[2]);
        let levels: BTreeMap<_, _> = [(id("x"), a.clone()), (id("y"), a.clone())]
            .into_iter()
            .collect();
        // missing connector
        assert!(
            DirectedSystem::new(levels.clone(), [(id("x"), id("y"))], BTreeMap::new()).is_err()
        );
        // unknown level
        assert!(
            DirectedSystem::new(levels.clone(), [(id("x"), id("z"))], BTreeMap::new()).is_err()
        );
        // wrong algebras
        let g = StarMorphism::identity(&alg(&[3]));
        let conn = [((id("x"), id("y")), g)].into_iter().collect();
        assert!(DirectedSystem::new(levels, [(id("x"), id("y"))], conn).is_err());
    }

    #[test]
    fn single_level_is_valid() {
        let s = DirectedSystem::single(id("only"), alg(&[3, 1]));
        assert_eq!(s.validate(3, 0, DEFAULT_TOL).failures(), 0);
        assert_eq!(s.top(), Some(id("only")));
    }

    #[test]
    fn two_chain_is_valid() {
        let s = two_chain();
        let r = s.validate(5, 0, DEFAULT_TOL);
        assert_eq!(r.failures(), 0, "{r:#?}");
        assert_eq!(s.top(), Some(id("hi")));
        assert_eq!(s.join(&id("lo"), &id("hi")), Some(id("hi")));
    }

    #[test]
    fn incomparable_pair_fails_directedness() {
        let a = alg(&[1]);
        let levels = [(id("p"), a.clone()), (id("q"), a)].into_iter().collect();
        let s = DirectedSystem::new(levels, [], BTreeMap::new()).unwrap();
        assert!(s.top().is_none());
        let r = s.validate(1, 0, DEFAULT_TOL);
        assert_eq!(r.get("order.directed").unwrap().failed, 1);
    }

    #[test]
    fn coherent_from_top_two_chain() {
        let s = two_chain();
        let mut rng = SampleRng::new(3);
        let x = rng.element(s.algebra(&id("hi")).unwrap());
        let xs = s.coherent_from_top(&id("hi"), &x).unwrap();
        assert_eq!(xs.part(&id("lo")).unwrap().part(0), x.part(0));
        assert!(s.coherence_check(&xs, DEFAULT_TOL).unwrap());
        assert!(s
            .coherent_from_top(&id("lo"), &rng.element(&alg(&[2])))
            .is_err());
    }

    #[test]
    fn coherence_detects_perturbation_and_missing_levels() {
        let s = two_chain();
        assert!(s
            .coherence_check(&CoherentElement::zero(&s), DEFAULT_TOL)
            .unwrap());
        let mut rng = SampleRng::new(5);
        let x = rng.element(s.algebra(&id("hi")).unwrap());
        let mut xs = s.coherent_from_top(&id("hi"), &x).unwrap();
        let lo = xs.parts[&id("lo")].clone();
        let bump = lo.algebra().unit().scale_real(1e-3);
        xs.parts.insert(id("lo"), lo.add(&bump).unwrap());
        assert!(!s.coherence_check(&xs, DEFAULT_TOL).unwrap());
        xs.parts.remove(&id("lo"));
        assert!(s.coherence_check(&xs, DEFAULT_TOL).is_err());
    }

    #[test]
    fn seminorms_of_unit_and_diagonal() {
        let s = two_chain();
        let u = CoherentElement::unit(&s);
        for l in s.level_ids() {
            assert!((s.seminorm(&u, l).unwrap() - 1.0).abs() < 1e-15);
        }
        assert_eq!(
            s.bound_norm(&u)
                .unwrap()
                .value()
                .map(|v| (v - 1.0).abs() < 1e-15),
            Some(true)
        );

        let hi = s.algebra(&id("hi")).unwrap().clone();
        let x = AlgElement::new(
            hi,
            vec![crate::CMatrix::diag(&[5.0, 0.0]), crate::CMatrix::zeros(3)],
        )
        .unwrap();
        let xs = s.coherent_from_top(&id("hi"), &x).unwrap();
        assert!(s.seminorm(&xs, &id("hi")).unwrap() >= 5.0 - 1e-12);
        assert!(s.seminorm(&xs, &id("lo")).unwrap() >= 5.0 - 1e-12);
        assert!(s.seminorm(&xs, &id("nope")).is_err());
    }

    #[test]
    fn limit_positivity() {
        let s = two_chain();
        assert!(s
            .limit_is_positive(&CoherentElement::unit(&s), DEFAULT_TOL)
            .unwrap());
        let hi = s.algebra(&id("hi")).unwrap().clone();
        let neg = AlgElement::new(
            hi,
            vec![
                crate::CMatrix::diag(&[1.0, -2.0]),
                crate::CMatrix::identity(3),
            ],
        )
        .unwrap();
        let xs = s.coherent_from_top(&id("hi"), &neg).unwrap();
        assert!(!s.limit_is_positive(&xs, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn single_level_decomposition_matches_one_level() {
        let a = alg(&[2, 1, 2]);
        let s = DirectedSystem::single(id("t"), a.clone());
        let mut rng = SampleRng::new(7);
        let c = rng.positive_element(&a);
        let (i, j) = (
            rng.ideal(&a).sum(&rng.ideal(&a)).unwrap(),
            BlockIdeal::full(&a),
        );
        let ci = CoherentIdeal::from_top(&s, &id("t"), &i).unwrap();
        let cj = CoherentIdeal::from_top(&s, &id("t"), &j).unwrap();
        let cc = s.coherent_from_top(&id("t"), &c).unwrap();
        let (la, lb) = limit_decompose_positive(&s, &cc, &ci, &cj, DEFAULT_TOL).unwrap();
        let (a1, b1) = crate::decompose_positive(&c, &i, &j, DEFAULT_TOL).unwrap();
        assert_eq!(la.parts[&id("t")], a1);
        assert_eq!(lb.parts[&id("t")], b1);
    }

    #[test]
    fn limit_decomposition_reports_level_and_block() {
        let s = two_chain();
        let hi = s.algebra(&id("hi")).unwrap().clone();
        let c = s.coherent_from_top(&id("hi"), &hi.unit()).unwrap();
        let only0 = BlockIdeal::new(hi.clone(), [0].into_iter().collect()).unwrap();
        let ci = CoherentIdeal::from_top(&s, &id("hi"), &only0).unwrap();
        match limit_decompose_positive(&s, &c, &ci, &ci, DEFAULT_TOL) {
            Err(Error::OutsideIdealAtLevel { level, block, .. }) => {
                assert_eq!(level, "hi");
                assert_eq!(block, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
