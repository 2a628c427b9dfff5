use epbeam::linalg::ComplexMatrix;
use epbeam::model::{fock_state, hamiltonian, hamiltonian_su2, j_minus, j_plus, j_x, j_y, j_z, ModelParams};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn su2_commutators() {
    for n in 1..=12 {
        let (jp, jm, jz) = (j_plus(n), j_minus(n), j_z(n));
        assert!(jp.commutator(&jm).max_abs_diff(&jz.scale(Complex64::new(2.0, 0.0))) <= 1e-12);
        assert!(jz.commutator(&jp).max_abs_diff(&jp) <= 1e-12);
        assert!(jz.commutator(&jm).max_abs_diff(&jm.scale(Complex64::new(-1.0, 0.0))) <= 1e-12);
    }
}

#[test]
fn casimir_is_scalar() {
    for n in 1..=12 {
        let (x, y, z) = (j_x(n), j_y(n), j_z(n));
        let c = x.matmul(&x).add(&y.matmul(&y)).add(&z.matmul(&z));
        let j = n as f64 / 2.0;
        let expected = ComplexMatrix::identity(n + 1).scale(Complex64::new(j * (j + 1.0), 0.0));
        assert!(c.max_abs_diff(&expected) <= 1e-12, "N = {n}");
    }
}

#[test]
fn fock_states_are_orthonormal() {
    for n in 1..=6 {
        for a in 0..=n {
            for b in 0..=n {
                let d = fock_state(a, n).unwrap().dot(&fock_state(b, n).unwrap());
                assert_eq!(d, Complex64::new(if a == b { 1.0 } else { 0.0 }, 0.0));
            }
        }
    }
}

fn params() -> impl Strategy<Value = ModelParams> {
    (-3.0..3.0f64, 0.05..3.0f64, 0.0..=1.0f64, 0.0..5.0f64, 1usize..=10)
        .prop_map(|(w, nu, eta, g, n)| ModelParams::new(w, nu, eta, g, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha, ..ProptestConfig::default() })]

    #[test]
    fn ladder_and_su2_constructions_agree(p in params()) {
        prop_assert!(hamiltonian(&p).max_abs_diff(&hamiltonian_su2(&p)) <= 1e-14 * (1.0 + p.n_photons as f64 * (p.omega0.abs() + p.nu0 + p.gamma)));
    }

    #[test]
    fn hamiltonian_is_tridiagonal(p in params()) {
        let h = hamiltonian(&p);
        for r in 0..p.dim() {
            for c in 0..p.dim() {
                if r.abs_diff(c) > 1 {
                    prop_assert_eq!(h[(r, c)], Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn hermitian_exactly_when_lossless_and_reciprocal(p in params(), lossless in any::<bool>(), reciprocal in any::<bool>()) {
        let mut q = p;
        if lossless { q.gamma = 0.0; }
        if reciprocal { q.eta = 0.0; }
        let h = hamiltonian(&q);
        let hermitian = h.max_abs_diff(&h.adjoint()) == 0.0;
        prop_assert_eq!(hermitian, q.gamma == 0.0 && q.eta == 0.0);
    }
}
