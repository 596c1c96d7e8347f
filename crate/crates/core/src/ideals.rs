//! Surjective *-homomorphisms and closed two-sided *-ideals.
//!
//! In `M_{n₁} ⊕ … ⊕ M_{n_k}` the closed two-sided *-ideals are exactly the
//! sums of whole blocks, so an ideal is its block support. A surjection onto
//! another such algebra is, up to *-isomorphism, a choice of which source
//! blocks survive followed by unitary conjugation of each survivor; the
//! dropped blocks form its kernel.

use std::collections::BTreeSet;

use crate::error::{reject, Error, Result};
use crate::fdalg::{AlgElement, FdAlgebra};
use crate::kernel::{CMatrix, C64};
use crate::random::SampleRng;

/// Unitarity tolerance for twists, `‖U*U - I‖_F ≤ UNITARY_TOL·n`.
pub const UNITARY_TOL: f64 = 1e-10;

/// Surjection `source → target`: target block `j` is
/// `twist_j · x[kept_blocks[j]] · twist_j*`.
#[derive(Clone, Debug, PartialEq)]
pub struct StarMorphism {
    source: FdAlgebra,
    target: FdAlgebra,
    kept_blocks: Vec<usize>,
    twists: Vec<Option<CMatrix>>,
}

impl StarMorphism {
    /// `twists` may be empty (no conjugation) or have one entry per kept block.
    pub fn new(
        source: FdAlgebra,
        kept_blocks: Vec<usize>,
        twists: Vec<Option<CMatrix>>,
    ) -> Result<Self> {
        if kept_blocks.is_empty() {
            return reject("a morphism must keep at least one block");
        }
        let mut seen = BTreeSet::new();
        for &k in &kept_blocks {
            if k >= source.block_count() {
                return reject(format!("kept block {k} out of range"));
            }
            if !seen.insert(k) {
                return reject(format!("kept block {k} listed twice"));
            }
        }
        let twists = if twists.is_empty() {
            vec![None; kept_blocks.len()]
        } else {
            twists
        };
        if twists.len() != kept_blocks.len() {
            return reject(format!(
                "{} twists for {} kept blocks",
                twists.len(),
                kept_blocks.len()
            ));
        }
        for (j, (t, &k)) in twists.iter().zip(&kept_blocks).enumerate() {
            if let Some(u) = t {
                let n = source.blocks()[k];
                if u.dim() != n {
                    return reject(format!("twist {j} has dim {}, block is {n}", u.dim()));
                }
                let defect = u
                    .adjoint()
                    .mul(u)?
                    .sub(&CMatrix::identity(n))?
                    .frobenius_norm();
                if defect > UNITARY_TOL * n as f64 {
                    return reject(format!("twist {j} is not unitary (defect {defect:e})"));
                }
            }
        }
        let target = FdAlgebra::new(kept_blocks.iter().map(|&k| source.blocks()[k]).collect())?;
        Ok(StarMorphism {
            source,
            target,
            kept_blocks,
            twists,
        })
    }

    pub fn identity(algebra: &FdAlgebra) -> Self {
        Self::selection(algebra, (0..algebra.block_count()).collect()).expect("all blocks")
    }

    /// Untwisted block selection.
    pub fn selection(source: &FdAlgebra, kept_blocks: Vec<usize>) -> Result<Self> {
        Self::new(source.clone(), kept_blocks, Vec::new())
    }

    pub fn source(&self) -> &FdAlgebra {
        &self.source
    }

    pub fn target(&self) -> &FdAlgebra {
        &self.target
    }

    pub fn kept_blocks(&self) -> &[usize] {
        &self.kept_blocks
    }

    pub fn twists(&self) -> &[Option<CMatrix>] {
        &self.twists
    }

    /// Source blocks that do not survive, in increasing order.
    pub fn dropped_blocks(&self) -> Vec<usize> {
        (0..self.source.block_count())
            .filter(|k| !self.kept_blocks.contains(k))
            .collect()
    }

    /// The kernel, a block ideal of the source.
    pub fn kernel(&self) -> BlockIdeal {
        BlockIdeal {
            algebra: self.source.clone(),
            support: self.dropped_blocks().into_iter().collect(),
        }
    }

    pub fn apply(&self, x: &AlgElement) -> Result<AlgElement> {
        if x.algebra() != &self.source {
            return reject("element does not belong to the morphism's source");
        }
        let parts = self
            .kept_blocks
            .iter()
            .zip(&self.twists)
            .map(|(&k, t)| conjugate(t.as_ref(), x.part(k)))
            .collect::<Result<_>>()?;
        AlgElement::new(self.target.clone(), parts)
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &StarMorphism) -> Result<StarMorphism> {
        if self.source != inner.target {
            return reject("composition needs outer.source = inner.target");
        }
        let mut kept = Vec::with_capacity(self.kept_blocks.len());
        let mut twists = Vec::with_capacity(self.kept_blocks.len());
        for (&mid, outer_twist) in self.kept_blocks.iter().zip(&self.twists) {
            kept.push(inner.kept_blocks[mid]);
            let twist = match (outer_twist, &inner.twists[mid]) {
                (None, None) => None,
                (Some(u), None) => Some(u.clone()),
                (None, Some(v)) => Some(v.clone()),
                (Some(u), Some(v)) => Some(u.mul(v)?),
            };
            twists.push(twist);
        }
        StarMorphism::new(inner.source.clone(), kept, twists)
    }

    /// The canonical preimage of `y`: undo each twist and extend by zero on
    /// dropped blocks. This is a (non-unital) *-homomorphism target → source.
    pub fn lift(&self, y: &AlgElement) -> Result<AlgElement> {
        self.lift_with(y, &self.source.zero())
    }

    /// Preimage of `y` that agrees with `filler` on the dropped blocks.
    pub fn lift_with(&self, y: &AlgElement, filler: &AlgElement) -> Result<AlgElement> {
        if y.algebra() != &self.target {
            return reject("element does not belong to the morphism's target");
        }
        if filler.algebra() != &self.source {
            return reject("filler does not belong to the morphism's source");
        }
        let mut parts = filler.clone().into_parts();
        for (j, (&k, t)) in self.kept_blocks.iter().zip(&self.twists).enumerate() {
            let undo = t.as_ref().map(CMatrix::adjoint);
            parts[k] = conjugate(undo.as_ref(), y.part(j))?;
        }
        AlgElement::new(self.source.clone(), parts)
    }

    /// `φ(I)`: the target blocks whose source block lies in `I`.
    pub fn image_ideal(&self, ideal: &BlockIdeal) -> Result<BlockIdeal> {
        if ideal.algebra != self.source {
            return reject("ideal does not live in the morphism's source");
        }
        let support = self
            .kept_blocks
            .iter()
            .enumerate()
            .filter(|(_, k)| ideal.support.contains(k))
            .map(|(j, _)| j)
            .collect();
        Ok(BlockIdeal {
            algebra: self.target.clone(),
            support,
        })
    }
}

fn conjugate(twist: Option<&CMatrix>, m: &CMatrix) -> Result<CMatrix> {
    match twist {
        None => Ok(m.clone()),
        Some(u) => u.mul(m)?.mul(&u.adjoint()),
    }
}

/// Free-function form of [`StarMorphism::apply`].
pub fn morphism_apply(phi: &StarMorphism, x: &AlgElement) -> Result<AlgElement> {
    phi.apply(x)
}

/// `f ∘ g`.
pub fn morphism_compose(f: &StarMorphism, g: &StarMorphism) -> Result<StarMorphism> {
    f.compose(g)
}

/// Closed two-sided *-ideal given by the set of blocks it contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockIdeal {
    algebra: FdAlgebra,
    support: BTreeSet<usize>,
}

impl BlockIdeal {
    pub fn new(algebra: FdAlgebra, support: BTreeSet<usize>) -> Result<Self> {
        if let Some(&k) = support.iter().find(|&&k| k >= algebra.block_count()) {
            return reject(format!("support index {k} out of range"));
        }
        Ok(BlockIdeal { algebra, support })
    }

    pub fn zero(algebra: &FdAlgebra) -> Self {
        BlockIdeal {
            algebra: algebra.clone(),
            support: BTreeSet::new(),
        }
    }

    pub fn full(algebra: &FdAlgebra) -> Self {
        BlockIdeal {
            algebra: algebra.clone(),
            support: (0..algebra.block_count()).collect(),
        }
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn support(&self) -> &BTreeSet<usize> {
        &self.support
    }

    pub fn contains_block(&self, k: usize) -> bool {
        self.support.contains(&k)
    }

    pub fn is_subset(&self, other: &BlockIdeal) -> bool {
        self.algebra == other.algebra && self.support.is_subset(&other.support)
    }

    /// `I + J`.
    pub fn sum(&self, other: &BlockIdeal) -> Result<BlockIdeal> {
        self.same_parent(other)?;
        Ok(BlockIdeal {
            algebra: self.algebra.clone(),
            support: self.support.union(&other.support).copied().collect(),
        })
    }

    pub fn intersection(&self, other: &BlockIdeal) -> Result<BlockIdeal> {
        self.same_parent(other)?;
        Ok(BlockIdeal {
            algebra: self.algebra.clone(),
            support: self.support.intersection(&other.support).copied().collect(),
        })
    }

    fn same_parent(&self, other: &BlockIdeal) -> Result<()> {
        if self.algebra != other.algebra {
            return reject("ideals live in different algebras");
        }
        Ok(())
    }

    /// First block outside the support carrying more than `tol·max(1, ‖x‖_F)`,
    /// with its Frobenius mass.
    pub fn first_violation(&self, x: &AlgElement, tol: f64) -> Option<(usize, f64)> {
        let bound = tol * x.frobenius_norm().max(1.0);
        (0..self.algebra.block_count())
            .filter(|k| !self.support.contains(k))
            .map(|k| (k, x.part(k).frobenius_norm()))
            .find(|&(_, mass)| mass > bound)
    }

    /// `x ∈ I`: every block outside the support is negligible. False across parents.
    pub fn contains(&self, x: &AlgElement, tol: f64) -> bool {
        x.algebra() == &self.algebra && self.first_violation(x, tol).is_none()
    }

    /// Multiplies by the central projection of the ideal (zeroes other blocks).
    pub fn mask(&self, x: &AlgElement) -> Result<AlgElement> {
        if x.algebra() != &self.algebra {
            return reject("element does not live in the ideal's algebra");
        }
        let parts = x
            .parts()
            .iter()
            .enumerate()
            .map(|(k, p)| {
                if self.support.contains(&k) {
                    p.clone()
                } else {
                    CMatrix::zeros(p.dim())
                }
            })
            .collect();
        AlgElement::new(self.algebra.clone(), parts)
    }
}

/// Free-function form of [`BlockIdeal::sum`].
pub fn ideal_sum(i: &BlockIdeal, j: &BlockIdeal) -> Result<BlockIdeal> {
    i.sum(j)
}

pub fn ideal_membership(x: &AlgElement, ideal: &BlockIdeal, tol: f64) -> bool {
    ideal.contains(x, tol)
}

/// `y* y` for a seeded random `y ∈ I`.
pub fn positive_ideal_sample(ideal: &BlockIdeal, seed: u64) -> AlgElement {
    SampleRng::new(seed).positive_member(ideal)
}

/// Splits `c ∈ I + J` as `a + b` with `a ∈ I`, `b ∈ J`, block by block:
/// `I`-only blocks go to `a`, `J`-only blocks to `b`, shared blocks are halved.
/// Blocks outside both supports must already be negligible.
pub fn split_in_sum(
    c: &AlgElement,
    i: &BlockIdeal,
    j: &BlockIdeal,
    tol: f64,
) -> Result<(AlgElement, AlgElement)> {
    i.same_parent(j)?;
    if c.algebra() != &i.algebra {
        return reject("element does not live in the ideals' algebra");
    }
    let sum = i.sum(j)?;
    if let Some((block, mass)) = sum.first_violation(c, tol) {
        return Err(Error::OutsideIdeal { block, mass });
    }
    let half = C64::new(0.5, 0.0);
    let mut a = Vec::with_capacity(c.parts().len());
    let mut b = Vec::with_capacity(c.parts().len());
    for (k, p) in c.parts().iter().enumerate() {
        let zero = CMatrix::zeros(p.dim());
        let (pa, pb) = match (i.contains_block(k), j.contains_block(k)) {
            (true, true) => (p.scale(half), p.scale(half)),
            (true, false) => (p.clone(), zero),
            (false, true) => (zero, p.clone()),
            (false, false) => (zero.clone(), zero),
        };
        a.push(pa);
        b.push(pb);
    }
    Ok((
        AlgElement::new(c.algebra().clone(), a)?,
        AlgElement::new(c.algebra().clone(), b)?,
    ))
}

/// Writes a positive `c ∈ (I+J)⁺` as `a + b` with `a ∈ I⁺` and `b ∈ J⁺`.
pub fn decompose_positive(
    c: &AlgElement,
    i: &BlockIdeal,
    j: &BlockIdeal,
    tol: f64,
) -> Result<(AlgElement, AlgElement)> {
    if !c.is_positive(tol)? {
        return reject("decomposition needs a positive element");
    }
    split_in_sum(c, i, j, tol)
}
