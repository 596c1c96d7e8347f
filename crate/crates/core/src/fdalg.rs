//! Finite-dimensional C*-algebras `M_{n₁} ⊕ … ⊕ M_{n_k}` and their elements.

use crate::error::{reject, Error, Result};
use crate::kernel::{
    eig_hermitian, min_singular_value, operator_norm, CMatrix, EigResult, MatrixOp, C64,
};

/// Direct sum of full matrix algebras, listed by block dimension. Always unital.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FdAlgebra {
    blocks: Vec<usize>,
}

impl FdAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return reject("algebra needs at least one block");
        }
        if blocks.contains(&0) {
            return reject("block dimensions must be positive");
        }
        Ok(FdAlgebra { blocks })
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn zero(&self) -> AlgElement {
        AlgElement {
            algebra: self.clone(),
            parts: self.blocks.iter().map(|&n| CMatrix::zeros(n)).collect(),
        }
    }

    pub fn unit(&self) -> AlgElement {
        AlgElement {
            algebra: self.clone(),
            parts: self.blocks.iter().map(|&n| CMatrix::identity(n)).collect(),
        }
    }

    /// Complex dimension of the algebra.
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }
}

/// Element of an [`FdAlgebra`]: one matrix per block.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgElement {
    algebra: FdAlgebra,
    parts: Vec<CMatrix>,
}

/// Spectrum of a normal element, deduplicated within tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    /// Sorted by real part, then imaginary part.
    pub values: Vec<C64>,
    pub is_real: bool,
}

impl SpectrumReport {
    pub fn contains(&self, z: C64, tol: f64) -> bool {
        self.values.iter().any(|w| (w - z).norm() <= tol)
    }
}

/// `x = pos - neg`, `|x| = pos + neg`, `pos·neg = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PosNegParts {
    pub pos: AlgElement,
    pub neg: AlgElement,
    pub abs: AlgElement,
}

/// The three characterizations of positivity, each computed independently.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PositivityRoutes {
    /// Hermitian with spectrum in `[0, ∞)`.
    pub by_spectrum: bool,
    /// `x = b* b` with `b` the nonnegative spectral square root.
    pub by_square_witness: bool,
    /// `x = c²` for some Hermitian `c`.
    pub by_hermitian_root: bool,
}

impl PositivityRoutes {
    pub fn agree(&self) -> bool {
        self.by_spectrum == self.by_square_witness
            && self.by_square_witness == self.by_hermitian_root
    }
}

impl AlgElement {
    pub fn new(algebra: FdAlgebra, parts: Vec<CMatrix>) -> Result<Self> {
        if parts.len() != algebra.block_count() {
            return reject(format!(
                "algebra has {} blocks, element has {} parts",
                algebra.block_count(),
                parts.len()
            ));
        }
        for (k, (part, &n)) in parts.iter().zip(algebra.blocks()).enumerate() {
            if part.dim() != n {
                return reject(format!("part {k} has dim {}, block is {n}", part.dim()));
            }
        }
        Ok(AlgElement { algebra, parts })
    }

    /// Builds an element block by block; panics if `f` returns a wrong dimension.
    pub fn from_blocks(algebra: &FdAlgebra, f: impl FnMut(usize, usize) -> CMatrix) -> Self {
        let mut f = f;
        let parts = algebra
            .blocks()
            .iter()
            .enumerate()
            .map(|(k, &n)| f(k, n))
            .collect();
        AlgElement::new(algebra.clone(), parts).expect("block dimensions")
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn parts(&self) -> &[CMatrix] {
        &self.parts
    }

    pub fn part(&self, k: usize) -> &CMatrix {
        &self.parts[k]
    }

    pub fn into_parts(self) -> Vec<CMatrix> {
        self.parts
    }

    fn same_parent(&self, other: &AlgElement) -> Result<()> {
        if self.algebra != other.algebra {
            return reject(format!(
                "parent mismatch: {:?} vs {:?}",
                self.algebra.blocks(),
                other.algebra.blocks()
            ));
        }
        Ok(())
    }

    fn zip(
        &self,
        other: &AlgElement,
        f: impl Fn(&CMatrix, &CMatrix) -> Result<CMatrix>,
    ) -> Result<Self> {
        self.same_parent(other)?;
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| f(a, b))
            .collect::<Result<_>>()?;
        Ok(AlgElement {
            algebra: self.algebra.clone(),
            parts,
        })
    }

    fn map_parts(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        AlgElement {
            algebra: self.algebra.clone(),
            parts: self.parts.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &AlgElement) -> Result<Self> {
        self.zip(other, CMatrix::add)
    }

    pub fn sub(&self, other: &AlgElement) -> Result<Self> {
        self.zip(other, CMatrix::sub)
    }

    pub fn mul(&self, other: &AlgElement) -> Result<Self> {
        self.zip(other, CMatrix::mul)
    }

    pub fn scale(&self, lambda: C64) -> Self {
        self.map_parts(|m| m.scale(lambda))
    }

    pub fn scale_real(&self, lambda: f64) -> Self {
        self.scale(C64::new(lambda, 0.0))
    }

    /// The involution.
    pub fn star(&self) -> Self {
        self.map_parts(CMatrix::adjoint)
    }

    /// `x* x`.
    pub fn star_square(&self) -> Self {
        self.star().mul(self).expect("same parent")
    }

    /// `(x + x*)/2`.
    pub fn hermitian_part(&self) -> Self {
        self.map_parts(CMatrix::hermitian_part)
    }

    /// C*-norm: the largest block operator norm.
    pub fn norm(&self) -> Result<f64> {
        let mut best = 0.0f64;
        for p in &self.parts {
            best = best.max(operator_norm(p)?);
        }
        Ok(best)
    }

    /// Frobenius norm over all blocks.
    pub fn frobenius_norm(&self) -> f64 {
        self.parts
            .iter()
            .map(|p| p.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `max_k ‖x_k - y_k‖_F / max(1, ‖x‖_F, ‖y‖_F)`; infinite across parents.
    pub fn relative_distance(&self, other: &AlgElement) -> f64 {
        if self.algebra != other.algebra {
            return f64::INFINITY;
        }
        let scale = self.frobenius_norm().max(other.frobenius_norm()).max(1.0);
        let worst = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| a.sub(b).expect("same dims").frobenius_norm())
            .fold(0.0, f64::max);
        worst / scale
    }

    /// Element equality: blockwise distance within `tol·max(1, larger norm)`.
    pub fn approx_eq(&self, other: &AlgElement, tol: f64) -> bool {
        self.relative_distance(other) <= tol
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.parts
            .iter()
            .map(CMatrix::hermitian_defect)
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.frobenius_norm().max(1.0)
    }

    /// Per-block eigendecompositions of a Hermitian element.
    fn block_eigs(&self, tol: f64) -> Result<Vec<EigResult>> {
        if !self.is_hermitian(tol) {
            return reject(format!(
                "element is not Hermitian (defect {:e})",
                self.hermitian_defect()
            ));
        }
        // Hermitian-ness was checked at element scale; blocks only need symmetrizing.
        self.parts
            .iter()
            .map(|p| eig_hermitian(p, f64::INFINITY))
            .collect()
    }

    fn spectral_map(&self, eigs: &[EigResult], f: impl Fn(f64) -> f64) -> Self {
        AlgElement {
            algebra: self.algebra.clone(),
            parts: eigs.iter().map(|e| e.map(&f)).collect(),
        }
    }

    /// Spectrum of a normal element: the union of block eigenvalues.
    pub fn spectrum(&self, tol: f64) -> Result<SpectrumReport> {
        let mut raw: Vec<C64> = Vec::new();
        if self.is_hermitian(tol) {
            for e in self.block_eigs(tol)? {
                raw.extend(e.eigenvalues.iter().map(|&l| C64::new(l, 0.0)));
            }
        } else {
            let scale = self.frobenius_norm().max(1.0);
            for (k, p) in self.parts.iter().enumerate() {
                let defect = p.normality_defect();
                if defect > tol * scale * scale {
                    return Err(Error::Unsupported(format!(
                        "block {k} is not normal (defect {defect:e})"
                    )));
                }
                raw.extend(normal_eigenvalues(p)?);
            }
        }

        let radius = raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let eps = tol * radius.max(1.0);
        let mut values: Vec<C64> = Vec::new();
        for z in raw {
            if !values.iter().any(|w| (w - z).norm() <= eps) {
                values.push(z);
            }
        }
        values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let is_real = values.iter().all(|z| z.im.abs() <= eps);
        Ok(SpectrumReport { values, is_real })
    }

    /// Whether `z·1 - x` has a two-sided inverse, judged by its smallest singular value.
    pub fn is_invertible(&self, tol: f64) -> Result<bool> {
        let scale = self.frobenius_norm().max(1.0);
        for p in &self.parts {
            if min_singular_value(p)? <= tol * scale {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `z·1 - x`.
    pub fn shifted(&self, z: C64) -> Self {
        self.map_parts(|p| {
            let mut m = p.scale(C64::new(-1.0, 0.0));
            for i in 0..m.dim() {
                m[(i, i)] += z;
            }
            m
        })
    }

    /// Hermitian with every eigenvalue `≥ -tol·max(1, ‖x‖)`.
    pub fn is_positive(&self, tol: f64) -> Result<bool> {
        if !self.is_hermitian(tol) {
            return Ok(false);
        }
        let eigs = self.block_eigs(tol)?;
        Ok(eigs_positive(&eigs, tol))
    }

    /// Distance from the positive cone as seen by [`Self::is_positive`]: the
    /// larger of the relative Hermitian defect and the relative most negative
    /// eigenvalue of the Hermitian part. Zero for positive elements.
    pub fn positivity_defect(&self) -> Result<f64> {
        let herm = self.hermitian_defect() / self.frobenius_norm().max(1.0);
        let eigs = self.hermitian_part().block_eigs(f64::INFINITY)?;
        let norm = eigs
            .iter()
            .flat_map(|e| e.eigenvalues.iter())
            .map(|l| l.abs())
            .fold(0.0, f64::max);
        let lowest = eigs
            .iter()
            .map(EigResult::min_eigenvalue)
            .fold(f64::INFINITY, f64::min);
        Ok(herm.max((-lowest).max(0.0) / norm.max(1.0)))
    }

    /// The unique positive square root. Eigenvalues within tolerance below zero are clamped.
    pub fn sqrt_positive(&self, tol: f64) -> Result<Self> {
        if !self.is_hermitian(tol) {
            return reject("square root needs a positive element; input is not Hermitian");
        }
        let eigs = self.block_eigs(tol)?;
        if !eigs_positive(&eigs, tol) {
            return reject("square root needs a positive element; spectrum has negative values");
        }
        Ok(self.spectral_map(&eigs, |t| t.max(0.0).sqrt()))
    }

    /// Positive part, negative part and absolute value of a Hermitian element.
    pub fn pos_neg_parts(&self, tol: f64) -> Result<PosNegParts> {
        let eigs = self.block_eigs(tol)?;
        Ok(PosNegParts {
            pos: self.spectral_map(&eigs, |t| t.max(0.0)),
            neg: self.spectral_map(&eigs, |t| (-t).max(0.0)),
            abs: self.spectral_map(&eigs, f64::abs),
        })
    }

    /// Runs the three positivity tests side by side.
    pub fn positivity_routes(&self, tol: f64) -> Result<PositivityRoutes> {
        let by_spectrum = self.is_positive(tol)?;
        if !self.is_hermitian(tol) {
            // b*b and c² are Hermitian, so neither witness can reproduce x.
            return Ok(PositivityRoutes {
                by_spectrum,
                by_square_witness: false,
                by_hermitian_root: false,
            });
        }
        let eigs = self.block_eigs(tol)?;
        let scale = self.norm()?.max(1.0);

        let b = self.spectral_map(&eigs, |t| t.max(0.0).sqrt());
        let witness = b.star_square();
        let by_square_witness = witness.sub(self)?.frobenius_norm() <= tol * scale;

        // A Hermitian root on the other branch: c = -sqrt|x|.
        let c = self.spectral_map(&eigs, |t| -t.abs().sqrt());
        let square = c.mul(&c)?;
        let by_hermitian_root = square.sub(self)?.frobenius_norm() <= tol * scale;

        Ok(PositivityRoutes {
            by_spectrum,
            by_square_witness,
            by_hermitian_root,
        })
    }

    /// True iff all three positivity characterizations agree on `self`.
    pub fn positivity_witness_check(&self, tol: f64) -> Result<bool> {
        Ok(self.positivity_routes(tol)?.agree())
    }
}

fn eigs_positive(eigs: &[EigResult], tol: f64) -> bool {
    let norm = eigs
        .iter()
        .flat_map(|e| e.eigenvalues.iter())
        .map(|l| l.abs())
        .fold(0.0, f64::max);
    let floor = -tol * norm.max(1.0);
    eigs.iter().all(|e| e.min_eigenvalue() >= floor)
}

/// Golden-ratio mixing weight for the commuting pair `(Re x, Im x)`; any
/// irrational weight separates joint eigenspaces generically.
const NORMAL_MIX: f64 = 0.618_033_988_749_894_9;

/// Eigenvalues of a normal matrix by diagonalizing `Re x + γ·Im x` and reading
/// Rayleigh quotients of `x` on the resulting basis.
fn normal_eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let n = m.dim();
    let re = m.hermitian_part();
    let adj = m.adjoint();
    let im = CMatrix::from_fn(n, |i, j| (m[(i, j)] - adj[(i, j)]) * C64::new(0.0, -0.5));
    let mix = re.add(&im.scale(C64::new(NORMAL_MIX, 0.0)))?;
    let eig = eig_hermitian(&mix, f64::INFINITY)?;
    let v = &eig.basis;
    Ok((0..n)
        .map(|k| {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    acc += v[(i, k)].conj() * m[(i, j)] * v[(j, k)];
                }
            }
            acc
        })
        .collect())
}

/// Blockwise arithmetic dispatch; `Adjoint` is the involution and ignores `y`.
pub fn elem_star_ops(x: &AlgElement, y: &AlgElement, kind: MatrixOp) -> Result<AlgElement> {
    match kind {
        MatrixOp::Add => x.add(y),
        MatrixOp::Sub => x.sub(y),
        MatrixOp::Mul => x.mul(y),
        MatrixOp::Scale(lambda) => Ok(x.scale(lambda)),
        MatrixOp::Adjoint => Ok(x.star()),
    }
}
