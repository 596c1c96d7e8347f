//! Dense complex square matrices and the Hermitian eigensolver.
//!
//! Everything above this module (element norms, spectra, positivity and the
//! functional calculus) reduces to [`eig_hermitian`]. The solver is a cyclic
//! complex Jacobi iteration: deterministic, dependency free and accurate to
//! a few ulps for the small blocks used here.

use num_complex::Complex64;

use crate::error::{reject, Error, Result};

pub type C64 = Complex64;

/// Off-diagonal Frobenius mass, relative to `‖m‖_F`, at which Jacobi stops.
pub const JACOBI_OFF_TOL: f64 = 1e-13;
/// Sweep cap for the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    entries: Vec<C64>,
}

/// The operations accepted by [`matrix_ops`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatrixOp {
    Add,
    Sub,
    Mul,
    Scale(C64),
    Adjoint,
}

impl CMatrix {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return reject("matrix dimension must be positive");
        }
        if entries.len() != dim * dim {
            return reject(format!(
                "matrix of dim {dim} needs {} entries, got {}",
                dim * dim,
                entries.len()
            ));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return reject("matrix entries must be finite");
        }
        Ok(CMatrix { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        CMatrix {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        CMatrix { dim, entries }
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Builds from real rows; panics on ragged or empty input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "rows must be square");
        Self::from_fn(dim, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "rows must be square");
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    fn check_dims(&self, other: &CMatrix) -> Result<()> {
        if self.dim != other.dim {
            return reject(format!("dimension mismatch: {} vs {}", self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_dims(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_dims(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn mul(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_dims(other)?;
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, lambda: C64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * lambda).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    fn zip_with(&self, other: &CMatrix, f: impl Fn(C64, C64) -> C64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Entrywise Hermitian test at scale `tol·max(1, ‖m‖_F)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.frobenius_norm().max(1.0)
    }

    /// `(m + m*)/2`, exactly Hermitian.
    pub fn hermitian_part(&self) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            out[(i, i)] = C64::new(self[(i, i)].re, 0.0);
            for j in i + 1..n {
                let z = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        out
    }

    /// `‖m* m - m m*‖_F`.
    pub fn normality_defect(&self) -> f64 {
        let a = self.adjoint();
        let left = a.mul(self).expect("same dim");
        let right = self.mul(&a).expect("same dim");
        left.sub(&right).expect("same dim").frobenius_norm()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Single entry point over the basic arithmetic; `b` is ignored by the unary kinds.
pub fn matrix_ops(a: &CMatrix, b: &CMatrix, kind: MatrixOp) -> Result<CMatrix> {
    match kind {
        MatrixOp::Add => a.add(b),
        MatrixOp::Sub => a.sub(b),
        MatrixOp::Mul => a.mul(b),
        MatrixOp::Scale(lambda) => Ok(a.scale(lambda)),
        MatrixOp::Adjoint => Ok(a.adjoint()),
    }
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct EigResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub basis: CMatrix,
}

impl EigResult {
    /// `basis · diag(f(λ)) · basis*`, assembled so the result is exactly Hermitian.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let values: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.basis;
        let n = v.dim();
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = C64::new(0.0, 0.0);
                for (k, &fk) in values.iter().enumerate() {
                    acc += v[(i, k)] * v[(j, k)].conj() * fk;
                }
                if i == j {
                    out[(i, i)] = C64::new(acc.re, 0.0);
                } else {
                    out[(i, j)] = acc;
                    out[(j, i)] = acc.conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|l| l)
    }

    /// `‖basis* · basis - I‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.basis.dim();
        self.basis
            .adjoint()
            .mul(&self.basis)
            .and_then(|g| g.sub(&CMatrix::identity(n)))
            .map(|d| d.frobenius_norm())
            .unwrap_or(f64::INFINITY)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi sweeps.
///
/// The input must be Hermitian to `tol·max(1, ‖m‖_F)` entrywise; the solver
/// then works on the exact Hermitian part. Pivots run over the upper triangle
/// in row-major order.
pub fn eig_hermitian(m: &CMatrix, tol: f64) -> Result<EigResult> {
    if !m.is_hermitian(tol) {
        return reject(format!(
            "matrix is not Hermitian (defect {:e})",
            m.hermitian_defect()
        ));
    }
    let n = m.dim();
    if n == 1 {
        return Ok(EigResult {
            eigenvalues: vec![m[(0, 0)].re],
            basis: CMatrix::identity(1),
        });
    }

    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = JACOBI_OFF_TOL * scale;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_mass(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_mass(&a);
        if off > target {
            return Err(Error::Numerical {
                routine: "eig_hermitian",
                residual: off,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable, so ties keep the original column order.
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let basis = CMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(EigResult { eigenvalues, basis })
}

fn off_diagonal_mass(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation zeroing `a[p][q]`; accumulates the unitary into `v`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Phase e turns the pivot real: with D = diag(1, conj(e)) on (p, q),
    // (D* A D)_pq = |a_pq|. A real rotation then finishes the 2×2 block.
    let e = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U restricted to (p, q) = [[c, s], [-s·conj(e), c·conj(e)]].
    let u00 = C64::new(c, 0.0);
    let u01 = C64::new(s, 0.0);
    let u10 = -e.conj() * s;
    let u11 = e.conj() * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u00 + akq * u10;
        a[(k, q)] = akp * u01 + akq * u11;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u00.conj() * apk + u10.conj() * aqk;
        a[(q, k)] = u01.conj() * apk + u11.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u00 + vkq * u10;
        v[(k, q)] = vkp * u01 + vkq * u11;
    }
}

/// Operator (spectral) norm: `sqrt(λ_max(m* m))`.
pub fn operator_norm(m: &CMatrix) -> Result<f64> {
    let gram = m.adjoint().mul(m)?;
    let eig = eig_hermitian(&gram, f64::INFINITY)?;
    Ok(eig.max_eigenvalue().max(0.0).sqrt())
}

/// Smallest singular value; zero exactly when `m` is singular.
pub fn min_singular_value(m: &CMatrix) -> Result<f64> {
    let gram = m.adjoint().mul(m)?;
    let eig = eig_hermitian(&gram, f64::INFINITY)?;
    Ok(eig.min_eigenvalue().max(0.0).sqrt())
}

/// Real functional calculus on a Hermitian matrix.
pub fn apply_spectral(m: &CMatrix, f: impl Fn(f64) -> f64, tol: f64) -> Result<CMatrix> {
    Ok(eig_hermitian(m, tol)?.map(f))
}
