use lcstar::kernel::{apply_spectral, eig_hermitian, matrix_ops, operator_norm, CMatrix, MatrixOp};
use lcstar::{SampleRng, DEFAULT_TOL};
use proptest::prelude::*;

fn frob_dist(a: &CMatrix, b: &CMatrix) -> f64 {
    a.sub(b).unwrap().frobenius_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn eig_reconstructs_and_is_unitary(seed in any::<u64>(), dim in 1usize..=8, scale in -3i32..=3) {
        let mut rng = SampleRng::new(seed);
        let m = rng.hermitian(dim).scale(lcstar::C64::new(10f64.powi(scale), 0.0));
        let r = eig_hermitian(&m, DEFAULT_TOL).unwrap();
        let residual = frob_dist(&r.reconstruct(), &m);
        prop_assert!(residual <= 1e-10 * m.frobenius_norm().max(1.0), "residual {residual:e}");
        prop_assert!(r.unitarity_residual() <= 1e-10 * dim as f64);
        prop_assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eig_is_bit_deterministic(seed in any::<u64>(), dim in 1usize..=8) {
        let m = SampleRng::new(seed).hermitian(dim);
        prop_assert_eq!(eig_hermitian(&m, DEFAULT_TOL).unwrap(), eig_hermitian(&m, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn cstar_identity(seed in any::<u64>(), dim in 1usize..=8) {
        let m = SampleRng::new(seed).matrix(dim);
        let n = operator_norm(&m).unwrap();
        let nn = operator_norm(&m.adjoint().mul(&m).unwrap()).unwrap();
        prop_assert!((nn - n * n).abs() <= 1e-8 * (n * n).max(1.0));
    }

    #[test]
    fn adjoint_reverses_products(seed in any::<u64>()) {
        let mut rng = SampleRng::new(seed);
        let (a, b) = (rng.matrix(3), rng.matrix(3));
        let lhs = matrix_ops(&matrix_ops(&a, &b, MatrixOp::Mul).unwrap(), &a, MatrixOp::Adjoint).unwrap();
        let rhs = matrix_ops(&b.adjoint(), &a.adjoint(), MatrixOp::Mul).unwrap();
        prop_assert!(frob_dist(&lhs, &rhs) <= 1e-14);
    }

    #[test]
    fn spectral_calculus_composes(seed in any::<u64>(), dim in 1usize..=8) {
        let m = SampleRng::new(seed).hermitian(dim);
        let g = |t: f64| t * t - 0.5 * t;
        let f = |t: f64| (0.3 * t).sin();
        let direct = apply_spectral(&m, |t| f(g(t)), DEFAULT_TOL).unwrap();
        let nested = apply_spectral(&apply_spectral(&m, g, DEFAULT_TOL).unwrap(), f, DEFAULT_TOL).unwrap();
        prop_assert!(frob_dist(&direct, &nested) <= 1e-8);
    }

    #[test]
    fn operator_norm_bounds_every_vector(seed in any::<u64>(), dim in 1usize..=6) {
        let mut rng = SampleRng::new(seed);
        let m = rng.matrix(dim);
        let n = operator_norm(&m).unwrap();
        for _ in 0..16 {
            let x: Vec<_> = (0..dim).map(|_| rng.complex()).collect();
            let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let mx = (0..dim)
                .map(|i| (0..dim).map(|j| m[(i, j)] * x[j]).sum::<lcstar::C64>().norm_sqr())
                .sum::<f64>()
                .sqrt();
            prop_assert!(mx <= n * nx * (1.0 + 1e-12) + 1e-14);
        }
    }
}

#[test]
fn scalar_fast_path() {
    let m = CMatrix::from_real_rows(&[&[-4.5]]);
    let r = eig_hermitian(&m, DEFAULT_TOL).unwrap();
    assert_eq!(r.eigenvalues, vec![-4.5]);
    assert_eq!(r.basis, CMatrix::identity(1));
}

#[test]
fn clustered_spectrum_converges() {
    // Nearly degenerate eigenvalues: U diag(1, 1+1e-12, 1+2e-12, 5) U*.
    let mut rng = SampleRng::new(404);
    let u = rng.unitary(4);
    let d = CMatrix::diag(&[1.0, 1.0 + 1e-12, 1.0 + 2e-12, 5.0]);
    let m = u
        .mul(&d)
        .unwrap()
        .mul(&u.adjoint())
        .unwrap()
        .hermitian_part();
    let r = eig_hermitian(&m, DEFAULT_TOL).unwrap();
    assert!((r.eigenvalues[3] - 5.0).abs() < 1e-13);
    assert!(frob_dist(&r.reconstruct(), &m) < 1e-13);
}
