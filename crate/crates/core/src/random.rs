//! Portable seeded sampling.
//!
//! The generator is PCG-XSL-RR 128/64 (`rand_pcg::Pcg64`, LCG multiplier
//! `0x2360ed051fc65da44385df649fccf645`). A `u64` seed is expanded to the
//! 128-bit state with SplitMix64 (increment `0x9e3779b97f4a7c15`) and the
//! stream is fixed at [`PCG_STREAM`]. Floats use the top 53 bits of each
//! output, so a seed reproduces the same samples on every platform.

use rand_core::Rng;
use rand_pcg::Pcg64;

use crate::fdalg::{AlgElement, FdAlgebra};
use crate::ideals::BlockIdeal;
use crate::kernel::{CMatrix, C64};

pub const RNG_NAME: &str =
    "pcg64 (xsl-rr 128/64), state from splitmix64(seed), stream 0xa02bdbf7bb3c0a7ac28fa16a64abf96f";
pub const PCG_STREAM: u128 = 0xa02b_dbf7_bb3c_0a7a_c28f_a16a_64ab_f96f;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// One SplitMix64 output step.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent seed for item `index` of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut s = seed ^ index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA);
    splitmix64(&mut s)
}

/// Deterministic sampler for matrices, elements and ideal members.
#[derive(Clone, Debug)]
pub struct SampleRng {
    inner: Pcg64,
}

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        let mut s = seed;
        let hi = splitmix64(&mut s) as u128;
        let lo = splitmix64(&mut s) as u128;
        SampleRng {
            inner: Pcg64::new((hi << 64) | lo, PCG_STREAM),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[-1, 1)`.
    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        assert!(lo <= hi);
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    pub fn complex(&mut self) -> C64 {
        let re = self.symmetric();
        let im = self.symmetric();
        C64::new(re, im)
    }

    /// Fisher–Yates.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.range(0, i);
            items.swap(i, j);
        }
    }

    /// Entries uniform on `[-1,1]²`.
    pub fn matrix(&mut self, dim: usize) -> CMatrix {
        CMatrix::from_fn(dim, |_, _| self.complex())
    }

    /// `(m + m*)/2` of a uniform matrix.
    pub fn hermitian(&mut self, dim: usize) -> CMatrix {
        self.matrix(dim).hermitian_part()
    }

    /// `m* m` of a uniform matrix.
    pub fn positive(&mut self, dim: usize) -> CMatrix {
        let m = self.matrix(dim);
        m.adjoint().mul(&m).expect("square").hermitian_part()
    }

    /// Haar-ish unitary: Gram–Schmidt (twice) on a uniform matrix.
    pub fn unitary(&mut self, dim: usize) -> CMatrix {
        loop {
            let m = self.matrix(dim);
            if let Some(q) = orthonormalize(&m) {
                return q;
            }
        }
    }

    pub fn element(&mut self, algebra: &FdAlgebra) -> AlgElement {
        AlgElement::from_blocks(algebra, |_, n| self.matrix(n))
    }

    pub fn hermitian_element(&mut self, algebra: &FdAlgebra) -> AlgElement {
        AlgElement::from_blocks(algebra, |_, n| self.hermitian(n))
    }

    pub fn positive_element(&mut self, algebra: &FdAlgebra) -> AlgElement {
        AlgElement::from_blocks(algebra, |_, n| self.positive(n))
    }

    /// Uniform element masked to the ideal's support.
    pub fn member(&mut self, ideal: &BlockIdeal) -> AlgElement {
        ideal
            .mask(&self.element(ideal.algebra()))
            .expect("same algebra")
    }

    pub fn hermitian_member(&mut self, ideal: &BlockIdeal) -> AlgElement {
        ideal
            .mask(&self.hermitian_element(ideal.algebra()))
            .expect("same algebra")
    }

    /// `y* y` for a uniform `y` in the ideal.
    pub fn positive_member(&mut self, ideal: &BlockIdeal) -> AlgElement {
        self.member(ideal).star_square().hermitian_part()
    }

    /// Random support: each block kept with probability ½.
    pub fn ideal(&mut self, algebra: &FdAlgebra) -> BlockIdeal {
        let support = (0..algebra.block_count()).filter(|_| self.coin()).collect();
        BlockIdeal::new(algebra.clone(), support).expect("indices in range")
    }

    /// Random block dimensions in `1..=max_dim`.
    pub fn algebra(&mut self, blocks: usize, max_dim: usize) -> FdAlgebra {
        FdAlgebra::new((0..blocks).map(|_| self.range(1, max_dim)).collect()).expect("valid blocks")
    }

    /// Hermitian element with at least one eigenvalue at or below `-margin`
    /// in a random block.
    pub fn non_positive_element(&mut self, algebra: &FdAlgebra, margin: f64) -> AlgElement {
        let x = self.positive_element(algebra);
        let k = self.range(0, algebra.block_count() - 1);
        let n = algebra.blocks()[k];
        let v = self.unitary(n);
        // Push one direction negative: x_k - (‖x_k‖ + margin + |u|)·v₀v₀*.
        let shift = x.part(k).frobenius_norm() + margin + self.unit();
        let mut parts = x.into_parts();
        let proj = CMatrix::from_fn(n, |i, j| v[(i, 0)] * v[(j, 0)].conj() * shift);
        parts[k] = parts[k].sub(&proj).expect("same dim").hermitian_part();
        AlgElement::new(algebra.clone(), parts).expect("same shape")
    }
}

/// Second pass reorthogonalizes; returns `None` for (numerically) singular input.
fn orthonormalize(m: &CMatrix) -> Option<CMatrix> {
    let n = m.dim();
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)]).collect())
        .collect();
    for _pass in 0..2 {
        for j in 0..n {
            let (done, rest) = cols.split_at_mut(j);
            for prev in done.iter() {
                let proj: C64 = prev.iter().zip(&rest[0]).map(|(p, c)| p.conj() * c).sum();
                for (c, p) in rest[0].iter_mut().zip(prev) {
                    *c -= proj * p;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                return None;
            }
            for z in cols[j].iter_mut() {
                *z /= norm;
            }
        }
    }
    Some(CMatrix::from_fn(n, |i, j| cols[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SampleRng::new(7);
        let mut b = SampleRng::new(7);
        for _ in 0..32 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn different_seeds_differ() {
        assert_ne!(SampleRng::new(1).next_u64(), SampleRng::new(2).next_u64());
        assert_ne!(derive_seed(5, 0), derive_seed(5, 1));
    }

    #[test]
    fn splitmix_reference_values() {
        // Published SplitMix64 outputs for state 0.
        let mut s = 0u64;
        assert_eq!(splitmix64(&mut s), 0xe220_a839_7b1d_cdaf);
        assert_eq!(splitmix64(&mut s), 0x6e78_9e6a_a1b9_65f4);
    }

    #[test]
    fn floats_in_range() {
        let mut r = SampleRng::new(3);
        for _ in 0..1000 {
            let u = r.unit();
            assert!((0.0..1.0).contains(&u));
            let s = r.symmetric();
            assert!((-1.0..1.0).contains(&s));
            let k = r.range(2, 5);
            assert!((2..=5).contains(&k));
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let mut r = SampleRng::new(11);
        for n in 1..=8 {
            let u = r.unitary(n);
            let g = u
                .adjoint()
                .mul(&u)
                .unwrap()
                .sub(&CMatrix::identity(n))
                .unwrap();
            assert!(g.frobenius_norm() < 1e-13 * n as f64);
        }
    }

    #[test]
    fn non_positive_has_negative_eigenvalue() {
        let mut r = SampleRng::new(19);
        let a = FdAlgebra::new(vec![3, 1, 2]).unwrap();
        for _ in 0..20 {
            let x = r.non_positive_element(&a, 0.1);
            assert!(x.is_hermitian(1e-12));
            assert!(!x.is_positive(crate::DEFAULT_TOL).unwrap());
        }
    }
}
