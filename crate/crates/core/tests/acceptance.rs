//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use kmrep::analysis::expected_return_time;
use kmrep::chain::truncated_power;
use kmrep::families::{
    B0Reading, BernoulliLaplaceFamily, ChebyshevBlockFamily, ChebyshevWalkFamily, EhrenfestFamily, JacobiBlockFamily,
};
use kmrep::poly::chebyshev_u;
use kmrep::simulate::{self, frequency_z_score, mean_z_score, SimConfig};
use kmrep::{DenseMatrix, KmSystem, Measure, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn within(limit: Duration, t: Duration) -> bool {
    t <= limit
}

/// Independent Ehrenfest matrix power from the dense 0..2N matrix.
fn dense_ehrenfest_powers(half: usize, n_max: usize) -> Vec<Vec<Vec<f64>>> {
    let m = 2 * half + 1;
    let mut p = vec![vec![0.0; m]; m];
    for (j, row) in p.iter_mut().enumerate() {
        if j > 0 {
            row[j - 1] = j as f64 / (2 * half) as f64;
        }
        if j + 1 < m {
            row[j + 1] = (2 * half - j) as f64 / (2 * half) as f64;
        }
    }
    let mut out = Vec::with_capacity(n_max + 1);
    let mut cur: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| (i == j) as u8 as f64).collect())
        .collect();
    out.push(cur.clone());
    for _ in 0..n_max {
        let next: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| (0..m).map(|k| cur[i][k] * p[k][j]).sum()).collect())
            .collect();
        out.push(next.clone());
        cur = next;
    }
    out
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for half in [1, 3, 5] {
        let f = EhrenfestFamily::new(half)?;
        let sys = f.km_system()?;
        let dense = dense_ehrenfest_powers(half, 40);
        for i in 0..=2 * half {
            for j in 0..=2 * half {
                let km = sys.km_entries(i, j, 40)?;
                for (n, v) in km.iter().enumerate() {
                    let oracle = truncated_power(f.chain(), n, i, j)?;
                    worst = worst.max((v - oracle).abs()).max((v - dense[n][i][j]).abs());
                }
            }
        }
    }
    let t = start.elapsed();
    Ok(Outcome {
        pass: worst < 1e-10 && within(Duration::from_secs(10), t),
        detail: format!("max |km − power| = {worst:.3e}, {:.2?}", t),
    })
}

fn criterion_2() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for half in [1u64, 3, 5] {
        let sys = EhrenfestFamily::new(half as usize)?.km_system()?;
        let target = 2f64.powi(2 * half as i32);
        for i in 0..=2 * half {
            let t = expected_return_time(&sys, i as usize)?;
            let rel = (t.value * binomial(2 * half, i) - target).abs() / target;
            worst = worst.max(rel);
        }
    }
    Ok(Outcome {
        pass: worst < 1e-9,
        detail: format!("max relative defect of F'(1)·C(2N,i) vs 2^(2N) = {worst:.3e}"),
    })
}

fn criterion_3() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut atom_check = f64::NAN;
    for p in [0.3, 0.5, 0.7] {
        let f = ChebyshevWalkFamily::new(p)?;
        let measure = Measure::Continuous(f.measure().clone());
        for n in 0..=10 {
            let (v, _) = measure.integrate(|x| f.closed_form(n, x).powi(2))?;
            let scaled = (p / (1.0 - p)).powi(n as i32) * v;
            let target = if n == 0 {
                2.0 * (1.0 - p) * PI
            } else {
                2.0 * p * (1.0 - p) * PI
            };
            worst = worst.max((scaled - target).abs() / target);
        }
        if p < 0.5 {
            atom_check = (f.measure().atoms().iter().map(|a| a.mass).sum::<f64>() - (2.0 - 4.0 * p) * PI).abs();
        }
    }
    let t = start.elapsed();
    Ok(Outcome {
        pass: worst < 1e-7 && atom_check < 1e-14 && within(Duration::from_secs(30), t),
        detail: format!(
            "max relative defect {worst:.3e}; |atom mass − (2−4p)π| = {atom_check:.1e} at p = 0.3; {:.2?}",
            t
        ),
    })
}

fn criterion_4() -> Result<Outcome> {
    let mut spec_err: f64 = 0.0;
    let mut km_err: f64 = 0.0;
    for w in [2, 5] {
        let f = BernoulliLaplaceFamily::new(w, w)?;
        let got = f.chain().spectrum()?;
        let (wf, bf) = (w as f64, w as f64);
        let mut expected: Vec<f64> = (0..=w)
            .map(|x| {
                let x = x as f64;
                1.0 - x * (bf + wf - x + 1.0) / (bf * wf)
            })
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&expected) {
            spec_err = spec_err.max((a - b).abs());
        }
        if got.len() != expected.len() {
            spec_err = f64::INFINITY;
        }
        let rep = f.km_system()?.verify_representation(30, w)?;
        km_err = km_err.max(rep.max_error);
    }
    Ok(Outcome {
        pass: spec_err < 1e-10 && km_err < 1e-9,
        detail: format!("spectrum defect {spec_err:.3e}; max |km − power| = {km_err:.3e}"),
    })
}

fn criterion_5() -> Result<Outcome> {
    let mut defect: f64 = 0.0;
    let mut min_entry = f64::INFINITY;
    for (a, b) in [(1.0, 2.0), (0.5, 0.5), (0.0, 0.0)] {
        let f = JacobiBlockFamily::new(a, b)?;
        let m = f.chain().realize(7)?;
        for r in 0..12 {
            let row = m.row(r);
            defect = defect.max((row.iter().sum::<f64>() - 1.0).abs());
            min_entry = row.iter().copied().fold(min_entry, f64::min);
        }
    }
    Ok(Outcome {
        pass: defect < 1e-12 && min_entry >= -1e-14,
        detail: format!("max row-sum defect {defect:.3e}; smallest entry {min_entry:.3e}"),
    })
}

fn criterion_6() -> Result<Outcome> {
    let mut off: f64 = 0.0;
    let mut op: f64 = 0.0;
    let mut op_abs: f64 = 0.0;
    for (a, b) in [(1.0, 2.0), (0.5, 0.5)] {
        let f = JacobiBlockFamily::new(a, b)?;
        let sys = f.km_system(6)?;
        let table = sys.gram_table(6)?;
        for (i, row) in table.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                if i != j {
                    off = off.max(g.frobenius_norm());
                }
            }
        }
        for n in 0..=10 {
            let r = f.apply_operator_f(n)?;
            op = op.max(r.relative());
            op_abs = op_abs.max(r.residual);
        }
    }
    Ok(Outcome {
        pass: off < 1e-8 && op < 1e-8,
        detail: format!(
            "max off-diagonal Gram norm {off:.3e}; operator residual {op:.3e} relative ({op_abs:.3e} absolute)"
        ),
    })
}

fn criterion_7() -> Result<Outcome> {
    let f = ChebyshevBlockFamily::new()?;
    let mut closed: f64 = 0.0;
    for k in 0..=40 {
        let x = -1.0 + k as f64 / 20.0;
        closed = closed.max(f.closed_form_deviation(x, 20)?);
    }
    let mut ortho: f64 = 0.0;
    for (i, row) in f.scaled_gram_table(8)?.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            let target = if i == j {
                DenseMatrix::identity(2)
            } else {
                DenseMatrix::zeros(2, 2)
            };
            ortho = ortho.max(g.max_abs_diff(&target));
        }
    }
    let km = f.km_system(8)?.verify_representation(12, 8)?;
    Ok(Outcome {
        pass: closed < 1e-12 && ortho < 1e-9 && km.max_error < 1e-8,
        detail: format!(
            "closed form {closed:.3e}; scaled orthonormality {ortho:.3e}; max |km − power| = {:.3e}",
            km.max_error
        ),
    })
}

fn criterion_8() -> Result<Outcome> {
    let exchange = ChebyshevBlockFamily::with_b0(B0Reading::Exchange)?;
    let identity = ChebyshevBlockFamily::with_b0(B0Reading::Identity)?;
    let mut exact = true;
    for k in 0..=20 {
        let x = -1.0 + k as f64 / 10.0;
        let p1 = &exchange.recursion(x, 1)?[1];
        let u1 = chebyshev_u(1, x);
        let u0 = chebyshev_u(0, x);
        let expected = DenseMatrix::from_rows(&[[u1, -u0], [-u0, u1]]).scale(0.5);
        exact &= *p1 == expected;
    }
    let dev = identity.closed_form_deviation(0.0, 1)?;
    Ok(Outcome {
        pass: exact && dev >= 0.5,
        detail: format!("exchange reading exact: {exact}; identity reading deviation at x = 0: {dev}"),
    })
}

fn criterion_9() -> Result<Outcome> {
    let start = Instant::now();
    let f = EhrenfestFamily::new(1)?;
    let config = SimConfig {
        seed: 20_240_601,
        n_trajectories: 1_000_000,
        horizon: 64,
        start: 0,
    };
    let report = simulate::run(f.chain(), config, &[2])?;
    let h = report.histogram(2).expect("checkpoint 2");
    let z_p = frequency_z_score(h.frequency(0), 0.5, config.n_trajectories);
    let z_t = mean_z_score(&report.return_time, 4.0).unwrap_or(f64::INFINITY);
    let t = start.elapsed();
    Ok(Outcome {
        pass: z_p.abs() < 4.0 && z_t.abs() < 4.0 && within(Duration::from_secs(60), t),
        detail: format!(
            "(P²)₀₀ ≈ {:.5} (z = {z_p:.2}); mean return {:.5} ± {:.5} (z = {z_t:.2}, censored {}); {:.2?}",
            h.frequency(0),
            report.return_time.mean.unwrap_or(f64::NAN),
            report.return_time.std_error.unwrap_or(f64::NAN),
            report.return_time.censored,
            t
        ),
    })
}

fn ratio_constants(sys: &KmSystem) -> Result<(f64, f64)> {
    let mut tail: f64 = 0.0;
    let mut consts = Vec::new();
    for x in [1.5, 2.0, 3.0] {
        let r = sys.sequence().ratio_sequence(x, 200)?;
        let n = r.len();
        tail = tail.max((r[n - 1] - r[n - 2]).abs());
        consts.push(r[n - 1] / sys.measure().stieltjes(x)?);
    }
    let lo = consts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = consts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((tail, (hi - lo) / hi.abs()))
}

fn criterion_10() -> Result<Outcome> {
    let (tail_e, spread_e) = ratio_constants(&EhrenfestFamily::new(3)?.km_system()?)?;
    let (tail_w, spread_w) = ratio_constants(&ChebyshevWalkFamily::new(0.5)?.km_system()?)?;
    let tail = tail_e.max(tail_w);
    let spread = spread_e.max(spread_w);
    Ok(Outcome {
        pass: tail < 1e-8 && spread < 1e-6,
        detail: format!("tail {tail:.3e}; relative spread of ratio/stieltjes {spread:.3e}"),
    })
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("1 Ehrenfest KM identity", criterion_1),
        ("2 Ehrenfest return times", criterion_2),
        ("3 Chebyshev walk orthogonality constants", criterion_3),
        ("4 Bernoulli-Laplace spectrum and KM", criterion_4),
        ("5 Jacobi block stochasticity", criterion_5),
        ("6 Jacobi block orthogonality and operator", criterion_6),
        ("7 Chebyshev block closed form and KM", criterion_7),
        ("8 Chebyshev block B0 reading", criterion_8),
        ("9 Monte Carlo consistency", criterion_9),
        ("10 Ratio limit", criterion_10),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        match run() {
            Ok(o) => {
                println!(
                    "{} criterion {name}: {}",
                    if o.pass { "PASS" } else { "FAIL" },
                    o.detail
                );
                failures += usize::from(!o.pass);
            }
            Err(e) => {
                println!("FAIL criterion {name}: error {e}");
                failures += 1;
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
