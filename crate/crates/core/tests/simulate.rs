use kmrep::analysis::{classify, recurrence, Recurrence};
use kmrep::families::{ChebyshevBlockFamily, ChebyshevWalkFamily, EhrenfestFamily, JacobiBlockFamily};
use kmrep::simulate::{frequency_z_score, mean_z_score, run, SimConfig, ALGORITHM};
use proptest::prelude::*;

fn config(seed: u64, n_trajectories: u64, horizon: usize, start: usize) -> SimConfig {
    SimConfig {
        seed,
        n_trajectories,
        horizon,
        start,
    }
}

#[test]
fn frequencies_agree_with_km() {
    let f = EhrenfestFamily::new(3).unwrap();
    let sys = f.km_system().unwrap();
    let checkpoints = [1, 2, 5, 10, 25];
    let rep = run(f.chain(), config(7, 200_000, 25, 2), &checkpoints).unwrap();
    assert_eq!(rep.algorithm, ALGORITHM);
    for n in checkpoints {
        let h = rep.histogram(n).unwrap();
        assert_eq!(h.total, 200_000);
        for j in 0..=6 {
            let expected = sys.km_entry(n, 2, j).unwrap();
            let z = frequency_z_score(h.frequency(j), expected, h.total);
            assert!(z.abs() < 4.0, "n={n} j={j}: z={z}");
        }
    }
    // Long enough that censoring (geometric in the horizon) is negligible.
    let long = run(f.chain(), config(8, 100_000, 400, 2), &[]).unwrap();
    assert_eq!(long.return_time.censored, 0);
    let t = mean_z_score(&long.return_time, 64.0 / 15.0).unwrap();
    assert!(t.abs() < 4.0, "{:?}", long.return_time);
}

#[test]
fn block_chain_simulation_matches_power() {
    let f = JacobiBlockFamily::new(1.0, 2.0).unwrap();
    let sys = f.km_system(8).unwrap();
    let rep = run(f.chain(), config(11, 100_000, 3, 0), &[3]).unwrap();
    let h = rep.histogram(3).unwrap();
    for j in 0..3 {
        let block = sys.km_block_entry(3, 0, j).unwrap();
        for b in 0..2 {
            let expected = block[(0, b)];
            let z = frequency_z_score(h.frequency(2 * j + b), expected, h.total);
            assert!(z.abs() < 4.0, "block {j} col {b}: z={z}");
        }
    }
}

#[test]
fn null_recurrent_walk_returns_within_binomial_tail() {
    let sys = ChebyshevWalkFamily::new(0.5).unwrap().km_system().unwrap();
    assert_eq!(recurrence(&sys, 0).unwrap(), Recurrence::NullRecurrent);
    assert_eq!(classify(&sys, 0, 0).unwrap().limit_value, Some(0.0));
    let horizon = 2000;
    let trajectories = 20_000;
    let rep = run(sys.chain(), config(3, trajectories, horizon, 0), &[]).unwrap();
    // Return after the horizon means the symmetric walk from 1 avoids 0 for
    // horizon − 1 steps: probability C(m, ⌊m/2⌋)/2^m with m = horizon − 1.
    let m = horizon - 1;
    let log_tail = (1..=m).map(|k| (k as f64).ln()).sum::<f64>()
        - (1..=m / 2).map(|k| (k as f64).ln()).sum::<f64>()
        - (1..=m - m / 2).map(|k| (k as f64).ln()).sum::<f64>()
        - m as f64 * 2f64.ln();
    let tail = log_tail.exp();
    let censored = rep.return_time.censored as f64 / trajectories as f64;
    let z = frequency_z_score(censored, tail, trajectories);
    assert!(z.abs() < 4.0, "censored {censored} vs {tail}: z={z}");
    assert_eq!(rep.return_time.returned + rep.return_time.censored, trajectories);
}

#[test]
fn refusals() {
    let block = ChebyshevBlockFamily::new().unwrap();
    assert!(run(block.chain(), config(0, 10, 5, 0), &[]).is_err());
    let e = EhrenfestFamily::new(2).unwrap();
    assert!(run(e.chain(), config(0, 0, 5, 0), &[]).is_err());
    assert!(run(e.chain(), config(0, 10, 5, 0), &[6]).is_err());
    assert!(run(e.chain(), config(0, 10, 5, 5), &[]).is_err());
}

#[test]
fn thread_count_does_not_matter() {
    let f = EhrenfestFamily::new(4).unwrap();
    let cfg = config(99, 5_000, 40, 4);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| run(f.chain(), cfg, &[10, 40]).unwrap());
    let b = four.install(|| run(f.chain(), cfg, &[10, 40]).unwrap());
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn seeded_runs_are_reproducible(seed in any::<u64>(), n in 1u64..500, horizon in 1usize..40) {
        let f = ChebyshevWalkFamily::new(0.4).unwrap();
        let cfg = config(seed, n, horizon, 1);
        let a = run(f.chain(), cfg, &[horizon]).unwrap();
        let b = run(f.chain(), cfg, &[horizon]).unwrap();
        prop_assert_eq!(&a, &b);
        let h = a.histogram(horizon).unwrap();
        prop_assert_eq!(h.counts.iter().map(|(_, c)| c).sum::<u64>(), n);
        prop_assert!(h.counts.windows(2).all(|w| w[0].0 < w[1].0));
    }
}
