use std::f64::consts::PI;

use kmrep::families::{
    BernoulliLaplaceFamily, ChebyshevBlockFamily, ChebyshevWalkFamily, EhrenfestFamily, JacobiBlockFamily,
};
use kmrep::{DiscreteMeasure, KmSystem, Measure};
use proptest::prelude::*;

fn scalar_systems() -> Vec<(String, KmSystem)> {
    let mut out = Vec::new();
    for n in [1, 3, 5, 8] {
        out.push((
            format!("ehrenfest {n}"),
            EhrenfestFamily::new(n).unwrap().km_system().unwrap(),
        ));
    }
    for p in [0.3, 0.5, 0.7] {
        out.push((
            format!("walk {p}"),
            ChebyshevWalkFamily::new(p).unwrap().km_system().unwrap(),
        ));
    }
    for (w, b) in [(2, 2), (5, 5), (4, 7)] {
        out.push((
            format!("urn {w} {b}"),
            BernoulliLaplaceFamily::new(w, b).unwrap().km_system().unwrap(),
        ));
    }
    out
}

#[test]
fn stieltjes_examples() {
    let e: Measure = EhrenfestFamily::new(1).unwrap().measure().clone().into();
    assert!((e.stieltjes(2.0).unwrap() - 7.0 / 12.0).abs() < 1e-15);
    let atom: Measure = DiscreteMeasure::new(vec![0.0], vec![1.0]).unwrap().into();
    assert_eq!(atom.stieltjes(2.0).unwrap(), 0.5);
    assert!(atom.stieltjes(0.0).is_err());
    let walk: Measure = ChebyshevWalkFamily::new(0.5).unwrap().measure().clone().into();
    assert!(walk.stieltjes(0.5).is_err());
    // ∫ (1 − x²)^{-1/2} / (2 − x) dx = π/√3
    assert!((walk.stieltjes(2.0).unwrap() - PI / 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn orthogonality_every_scalar_family() {
    for (name, sys) in scalar_systems() {
        let idx = sys.clamp_index(10);
        let d = sys.orthogonality_defects(idx).unwrap();
        let worst = d.max_abs();
        assert!(worst <= 1e-8, "{name}: {worst}");
    }
}

#[test]
fn orthogonality_block_families() {
    for (a, b) in [(1.0, 2.0), (0.0, 0.0), (0.5, 1.5)] {
        let sys = JacobiBlockFamily::new(a, b).unwrap().km_system(10).unwrap();
        let table = sys.gram_table(10).unwrap();
        for i in 0..=10 {
            for j in 0..=10 {
                if i != j {
                    let rel = table[i][j].max_abs() / table[j][j].max_abs();
                    assert!(rel <= 1e-8, "jacobi ({a},{b}) ({i},{j}): {rel}");
                }
            }
        }
    }
    let f = ChebyshevBlockFamily::new().unwrap();
    let scaled = f.scaled_gram_table(10).unwrap();
    for (i, row) in scaled.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            let target = if i == j {
                kmrep::DenseMatrix::identity(2)
            } else {
                kmrep::DenseMatrix::zeros(2, 2)
            };
            assert!(g.max_abs_diff(&target) <= 1e-8, "({i},{j})");
        }
    }
}

#[test]
fn walk_atoms_iff_p_below_half() {
    for p in [0.05, 0.2, 0.3, 0.45, 0.5, 0.55, 0.7, 0.95] {
        let f = ChebyshevWalkFamily::new(p).unwrap();
        let m: Measure = f.measure().clone().into();
        let (plus, minus) = (m.atom_mass_at(1.0), m.atom_mass_at(-1.0));
        if p < 0.5 {
            assert!((plus - (1.0 - 2.0 * p) * PI).abs() < 1e-14);
            assert_eq!(plus, minus);
            assert!((f.total_atom_mass() - (2.0 - 4.0 * p) * PI).abs() < 1e-14);
        } else {
            assert_eq!(plus, 0.0);
            assert_eq!(minus, 0.0);
            assert_eq!(f.total_atom_mass(), 0.0);
        }
        let r = f.support_radius();
        assert!((r - (4.0 * p * (1.0 - p)).sqrt()).abs() < 1e-15 && r <= 1.0);
    }
}

#[test]
fn total_masses() {
    // π_0 = 1 makes the measure a probability for the discrete families.
    for (name, sys) in scalar_systems() {
        let mass = sys.measure().total_mass().unwrap();
        assert!((mass * sys.pi(0) - 1.0).abs() < 1e-9, "{name}: {mass}");
    }
}

#[test]
fn ratio_limit_proportional_to_stieltjes() {
    for (name, sys) in scalar_systems() {
        let mut constants = Vec::new();
        for x in [1.5, 2.0, 3.0] {
            let r = sys.sequence().ratio_sequence(x, 200).unwrap();
            let last = *r.last().unwrap();
            let tail = r[r.len().saturating_sub(10)..]
                .iter()
                .map(|v| (v - last).abs())
                .fold(0.0, f64::max);
            assert!(tail < 1e-8, "{name} x={x}: tail {tail}");
            constants.push(last / sys.measure().stieltjes(x).unwrap());
        }
        let spread = constants.iter().map(|c| (c - constants[0]).abs()).fold(0.0, f64::max);
        assert!(spread < 1e-6 * constants[0].abs(), "{name}: {constants:?}");
        println!("{name}: ratio / stieltjes = {:.12}", constants[0]);
    }
}

#[test]
fn jacobi_weight_positive_on_grid() {
    let points: Vec<f64> = (0..101).map(|k| k as f64 / 100.0).collect();
    let interior = &points[1..100];
    for a in [0.0, 0.5, 1.0, 2.0] {
        for b in [0.0, 0.5, 1.0, 2.0] {
            let f = JacobiBlockFamily::new(a, b).unwrap();
            let rep = f.weight().positivity(interior);
            assert!(
                rep.min_eigenvalue > 0.0,
                "({a},{b}) at {}: {}",
                rep.at,
                rep.min_eigenvalue
            );
            assert!(rep.max_asymmetry < 1e-14);
            let ends = f.weight().positivity(&points);
            assert!(ends.min_eigenvalue >= -1e-14, "({a},{b}): {}", ends.min_eigenvalue);
        }
    }
}

#[test]
fn chebyshev_block_weight_semidefinite() {
    let f = ChebyshevBlockFamily::new().unwrap();
    let pts: Vec<f64> = (1..100).map(|k| -1.0 + k as f64 / 50.0).collect();
    let rep = f.weight().positivity(&pts);
    assert!(rep.min_eigenvalue >= 0.0);
}

proptest! {
    #[test]
    fn discrete_stieltjes_is_a_weighted_sum(
        raw in prop::collection::vec((-1.0f64..1.0, 0.01f64..1.0), 1..12),
        x in 1.01f64..10.0,
    ) {
        let (nodes, weights): (Vec<f64>, Vec<f64>) = raw.into_iter().unzip();
        let Ok(m) = DiscreteMeasure::new(nodes.clone(), weights.clone()) else {
            return Ok(());
        };
        let m: Measure = m.into();
        let s = m.stieltjes(x).unwrap();
        let direct: f64 = nodes.iter().zip(&weights).map(|(n, w)| w / (x - n)).sum();
        prop_assert!((s - direct).abs() <= 1e-13 * direct.abs());
        prop_assert!(s > 0.0);
        let mass = m.total_mass().unwrap();
        prop_assert!(s <= mass / (x - 1.0) + 1e-12 && s >= mass / (x + 1.0) - 1e-12);
    }

    #[test]
    fn walk_orthogonality(p in 0.1f64..0.9) {
        let sys = ChebyshevWalkFamily::new(p).unwrap().km_system().unwrap();
        let d = sys.orthogonality_defects(6).unwrap();
        prop_assert!(d.max_abs() <= 1e-8, "p={}: {}", p, d.max_abs());
    }
}
