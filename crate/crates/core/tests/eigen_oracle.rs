//! The Jacobi eigensolver against an independent LAPACK-style solver.

use anticonc::linalg::{sym_eigen, Matrix};
use anticonc::tensorspec::cov_matrix_ball;
use proptest::prelude::*;

fn reference(m: &Matrix) -> Vec<f64> {
    let n = m.dim();
    let a = nalgebra::DMatrix::from_fn(n, n, |i, j| m.row(i)[j]);
    let mut v: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_symmetric_matrices(n in 1usize..12, entries in prop::collection::vec(-3.0f64..3.0, 144)) {
        let m = Matrix::from_fn(n, |i, j| entries[i.min(j) * 12 + i.max(j)]);
        let ours = sym_eigen(&m).unwrap();
        let theirs = reference(&m);
        let scale = m.frobenius().max(1.0);
        for (a, b) in ours.values.iter().zip(&theirs) {
            prop_assert!((a - b).abs() <= 1e-11 * scale, "{:?} vs {:?}", ours.values, theirs);
        }
        prop_assert!(ours.residual(&m) <= 1e-10 * scale);
    }
}

#[test]
fn ball_covariance_spectra() {
    for (n, d) in [(4, 2), (5, 3), (6, 4)] {
        let bundle = cov_matrix_ball(n, d).unwrap();
        let theirs = reference(&bundle.s);
        for (a, b) in bundle.eig_s.values.iter().zip(&theirs) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "n={n} d={d}: {a} vs {b}");
        }
    }
}
