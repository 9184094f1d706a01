use kmrep::chain::{truncated_power, TransitionRows};
use kmrep::families::{
    BernoulliLaplaceFamily, ChebyshevBlockFamily, ChebyshevWalkFamily, EhrenfestFamily, JacobiBlockFamily,
};
use kmrep::DenseMatrix;
use nalgebra::DMatrix;
use proptest::prelude::*;

#[test]
fn small_urn_examples() {
    let sys = EhrenfestFamily::new(1).unwrap().km_system().unwrap();
    assert!((sys.km_entry(2, 0, 0).unwrap() - 0.5).abs() < 1e-15);
    assert!((sys.km_entry(1, 0, 1).unwrap() - 1.0).abs() < 1e-15);
    assert!((sys.km_entry(0, 1, 1).unwrap() - 1.0).abs() < 1e-15);
    assert!(sys.km_entry(1, 0, 3).is_err());
}

#[test]
fn chebyshev_block_examples() {
    let sys = ChebyshevBlockFamily::new().unwrap().km_system(4).unwrap();
    let b = sys.km_block_entry(1, 0, 0).unwrap();
    assert!(
        b.max_abs_diff(&DenseMatrix::from_rows(&[[0.0, 0.5], [0.5, 0.0]])) < 1e-12,
        "{b:?}"
    );
    let b = sys.km_block_entry(1, 0, 1).unwrap();
    assert!(b.max_abs_diff(&DenseMatrix::identity(2)) < 1e-12, "{b:?}");
    let b = sys.km_block_entry(1, 1, 0).unwrap();
    assert!(b.max_abs_diff(&DenseMatrix::identity(2).scale(0.25)) < 1e-12, "{b:?}");
    let b = sys.km_block_entry(0, 2, 2).unwrap();
    assert!(b.max_abs_diff(&DenseMatrix::identity(2)) < 1e-12);
}

fn dense_block_power(rows: &dyn TransitionRows, n_scalar: usize, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n_scalar, n_scalar);
    for s in 0..n_scalar {
        for (c, v) in rows.row_entries(s).unwrap() {
            if c < n_scalar {
                m[(s, c)] = v;
            }
        }
    }
    let mut p = DMatrix::identity(n_scalar, n_scalar);
    for _ in 0..n {
        p = &p * &m;
    }
    p
}

#[test]
fn jacobi_block_entry_against_dense_power() {
    let f = JacobiBlockFamily::new(1.0, 2.0).unwrap();
    let sys = f.km_system(6).unwrap();
    let km = sys.km_block_entry(3, 0, 1).unwrap();
    let p = dense_block_power(f.chain(), 20, 3);
    for a in 0..2 {
        for b in 0..2 {
            assert!(
                (km[(a, b)] - p[(a, 2 + b)]).abs() <= 1e-9,
                "({a},{b}): {} vs {}",
                km[(a, b)],
                p[(a, 2 + b)]
            );
        }
    }
}

#[test]
fn block_verifications() {
    for (a, b) in [(1.0, 2.0), (0.5, 0.0)] {
        let sys = JacobiBlockFamily::new(a, b).unwrap().km_system(18).unwrap();
        let rep = sys.verify_representation(12, 6).unwrap();
        assert!(rep.max_error <= 1e-9, "jacobi ({a},{b}): {rep:?}");
    }
    let sys = ChebyshevBlockFamily::new().unwrap().km_system(18).unwrap();
    let rep = sys.verify_representation(12, 6).unwrap();
    assert!(rep.max_error <= 1e-9, "{rep:?}");
}

#[test]
fn scalar_verifications() {
    for p in [0.3, 0.5, 0.7] {
        let sys = ChebyshevWalkFamily::new(p).unwrap().km_system().unwrap();
        let rep = sys.verify_representation(20, 10).unwrap();
        assert!(rep.max_error <= 1e-9, "walk {p}: {rep:?}");
    }
    for (w, b) in [(2, 2), (5, 5), (3, 8)] {
        let sys = BernoulliLaplaceFamily::new(w, b).unwrap().km_system().unwrap();
        let rep = sys.verify_representation(30, 10).unwrap();
        assert!(rep.max_error <= 1e-9, "urn {w} {b}: {rep:?}");
    }
    let sys = EhrenfestFamily::new(3).unwrap().km_system().unwrap();
    let rep = sys.verify_representation(40, 6).unwrap();
    assert!(rep.max_error <= 1e-9, "{rep:?}");
    assert_eq!(rep.per_step.len(), 41);
}

#[test]
fn entries_match_single_entry_calls() {
    let sys = ChebyshevWalkFamily::new(0.3).unwrap().km_system().unwrap();
    let all = sys.km_entries(2, 3, 9).unwrap();
    for (n, v) in all.iter().enumerate() {
        assert!((v - sys.km_entry(n, 2, 3).unwrap()).abs() < 1e-15);
        assert!((v - truncated_power(sys.chain(), n, 2, 3).unwrap()).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn detailed_balance_symmetry(n in 0usize..25, i in 0usize..7, j in 0usize..7, family in 0usize..3) {
        let sys = match family {
            0 => EhrenfestFamily::new(3).unwrap().km_system().unwrap(),
            1 => ChebyshevWalkFamily::new(0.3).unwrap().km_system().unwrap(),
            _ => BernoulliLaplaceFamily::new(6, 9).unwrap().km_system().unwrap(),
        };
        let a = sys.km_entry(n, i, j).unwrap() / sys.pi(j);
        let b = sys.km_entry(n, j, i).unwrap() / sys.pi(i);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-3));
    }

    #[test]
    fn km_matches_power(p in 0.1f64..0.9, n in 0usize..16, i in 0usize..5, j in 0usize..5) {
        let sys = ChebyshevWalkFamily::new(p).unwrap().km_system().unwrap();
        let km = sys.km_entry(n, i, j).unwrap();
        let power = truncated_power(sys.chain(), n, i, j).unwrap();
        prop_assert!((km - power).abs() <= 1e-9, "{} vs {}", km, power);
    }
}
