use anyhow::{bail, Context, Result};
use kmrep::analysis::{self, Recurrence};
use kmrep::chain::truncated_power;
use kmrep::families::FamilySystem;
use kmrep::km::ORTHOGONALITY_TOL;
use kmrep::simulate::{self, frequency_z_score, SimConfig};
use kmrep::{BlockKmSystem, DenseMatrix, KmSystem, VerifyReport};
use serde_json::{json, Map, Value};

use crate::output::{emit, float_json, Cell, Report};
use crate::select::{quadrature, ChainArgs, Selected};
use crate::OutputArgs;

pub const VERIFY_TOL: f64 = 1e-8;

pub enum Outcome {
    Success,
    VerificationFailed,
}

fn meta(sel: &Selected, tolerances: Value, seed: Option<u64>) -> Value {
    json!({
        "family": sel.name,
        "params": sel.params,
        "tolerances": tolerances,
        "seed": seed,
    })
}

fn finish(report: &Report, out: &OutputArgs, meta: Value) -> Result<Outcome> {
    emit(&report.render(out.format, meta)?, out.output.as_deref())?;
    Ok(Outcome::Success)
}

fn system(sel: &Selected, max_index: usize) -> Result<FamilySystem> {
    let family = sel
        .chain
        .family()
        .context("custom chains carry no spectral measure; use `power` or `simulate`")?;
    Ok(family.km_system(max_index, quadrature()?)?)
}

fn scalar_system(sel: &Selected) -> Result<KmSystem> {
    match system(sel, 0)? {
        FamilySystem::Scalar(s) => Ok(s),
        FamilySystem::Block(_) => bail!("`{}` is a block family; this command needs a scalar chain", sel.name),
    }
}

fn matrix_json(m: &DenseMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array(m.row(r).iter().map(|&v| float_json(v)).collect()))
            .collect(),
    )
}

fn block_dim(sel: &Selected) -> usize {
    sel.chain.family().and_then(|f| f.block_chain()).map_or(1, |b| b.dim())
}

pub fn info(args: &ChainArgs, out: &OutputArgs) -> Result<Outcome> {
    let sel = args.select()?;
    let rows = sel.chain.rows();
    let mut r = Report::new(&["key", "value"]);
    let states = rows.scalar_size();
    r.field("family", sel.name.as_str());
    r.field("states", states.map_or(Value::from("unbounded"), Value::from));
    r.field("block_dim", block_dim(&sel));
    r.field("bandwidth", rows.bandwidth());
    r.field("stochastic", rows.is_stochastic());
    r.field("has_measure", sel.chain.family().is_some());
    r.row(vec!["family".into(), sel.name.as_str().into()]);
    r.row(vec![
        "states".into(),
        states.map_or(Cell::from("unbounded"), Cell::from),
    ]);
    r.row(vec!["block_dim".into(), block_dim(&sel).into()]);
    r.row(vec!["bandwidth".into(), rows.bandwidth().into()]);
    r.row(vec!["stochastic".into(), rows.is_stochastic().into()]);
    r.row(vec!["has_measure".into(), sel.chain.family().is_some().into()]);
    if let (Some(chain), Some(_)) = (sel.chain.scalar_chain(), states) {
        let spectrum = chain.spectrum()?;
        r.field(
            "spectrum",
            Value::Array(spectrum.iter().map(|&v| float_json(v)).collect()),
        );
        for (k, v) in spectrum.iter().enumerate() {
            r.row(vec![Cell::Text(format!("eigenvalue_{k}")), (*v).into()]);
        }
    }
    finish(&r, out, meta(&sel, json!({}), None))
}

fn power_block(sel: &Selected, n: usize, i: usize, j: usize) -> Result<Option<DenseMatrix>> {
    match sel.chain.family().and_then(|f| f.block_chain()) {
        Some(b) => Ok(Some(b.block_power(n, i, j)?)),
        None => Ok(None),
    }
}

pub fn power(args: &ChainArgs, n: usize, i: usize, j: usize, out: &OutputArgs) -> Result<Outcome> {
    let sel = args.select()?;
    let mut r = Report::new(&["n", "i", "j", "a", "b", "value"]);
    r.field("n", n).field("i", i).field("j", j);
    match power_block(&sel, n, i, j)? {
        Some(block) => {
            r.field("value", matrix_json(&block));
            for a in 0..block.rows() {
                for b in 0..block.cols() {
                    r.row(vec![
                        n.into(),
                        i.into(),
                        j.into(),
                        a.into(),
                        b.into(),
                        block[(a, b)].into(),
                    ]);
                }
            }
        }
        None => {
            let v = truncated_power(sel.chain.rows(), n, i, j)?;
            r.float("value", v);
            r.row(vec![
                n.into(),
                i.into(),
                j.into(),
                0usize.into(),
                0usize.into(),
                v.into(),
            ]);
        }
    }
    finish(&r, out, meta(&sel, json!({}), None))
}

pub fn km(args: &ChainArgs, n: usize, i: usize, j: usize, out: &OutputArgs) -> Result<Outcome> {
    let sel = args.select()?;
    let mut r = Report::new(&["n", "i", "j", "a", "b", "value", "oracle", "abs_err"]);
    r.field("n", n).field("i", i).field("j", j);
    let err = match system(&sel, i.max(j))? {
        FamilySystem::Scalar(sys) => {
            let value = sys.km_entry(n, i, j)?;
            let oracle = truncated_power(sys.chain(), n, i, j)?;
            let err = (value - oracle).abs();
            r.float("value", value).float("oracle", oracle).float("abs_err", err);
            r.row(vec![
                n.into(),
                i.into(),
                j.into(),
                0usize.into(),
                0usize.into(),
                value.into(),
                oracle.into(),
                err.into(),
            ]);
            err
        }
        FamilySystem::Block(sys) => {
            let value = sys.km_block_entry(n, i, j)?;
            let oracle = sys.chain().block_power(n, i, j)?;
            let err = value.max_abs_diff(&oracle);
            r.field("value", matrix_json(&value))
                .field("oracle", matrix_json(&oracle))
                .float("abs_err", err);
            for a in 0..value.rows() {
                for b in 0..value.cols() {
                    let (v, o) = (value[(a, b)], oracle[(a, b)]);
                    r.row(vec![
                        n.into(),
                        i.into(),
                        j.into(),
                        a.into(),
                        b.into(),
                        v.into(),
                        o.into(),
                        (v - o).abs().into(),
                    ]);
                }
            }
            err
        }
    };
    r.field("within_tolerance", err <= VERIFY_TOL);
    finish(&r, out, meta(&sel, json!({ "abs_err": VERIFY_TOL }), None))
}

pub fn verify(args: &ChainArgs, n_max: usize, index_max: usize, tol: f64, out: &OutputArgs) -> Result<Outcome> {
    let sel = args.select()?;
    let rep: VerifyReport = match system(&sel, index_max)? {
        FamilySystem::Scalar(sys) => sys.verify_representation(n_max, index_max)?,
        FamilySystem::Block(sys) => sys.verify_representation(n_max, index_max)?,
    };
    let pass = rep.max_error <= tol;
    let mut r = Report::new(&["n", "max_abs_err"]);
    r.field("n_max", rep.n_max).field("index_max", rep.index_max);
    r.float("max_error", rep.max_error);
    r.field("worst_n", rep.worst.0)
        .field("worst_i", rep.worst.1)
        .field("worst_j", rep.worst.2);
    r.float("worst_km", rep.worst_km).float("worst_power", rep.worst_power);
    r.field(
        "per_step",
        Value::Array(rep.per_step.iter().map(|&e| float_json(e)).collect()),
    );
    r.field("pass", pass);
    for (n, e) in rep.per_step.iter().enumerate() {
        r.row(vec![n.into(), (*e).into()]);
    }
    finish(&r, out, meta(&sel, json!({ "max_error": tol }), None))?;
    if pass {
        Ok(Outcome::Success)
    } else {
        eprintln!(
            "verification failed: max error {:e} at (n, i, j) = {:?} exceeds {tol:e}",
            rep.max_error, rep.worst
        );
        Ok(Outcome::VerificationFailed)
    }
}

fn recurrence_name(r: Recurrence) -> &'static str {
    match r {
        Recurrence::PositiveRecurrent => "positive_recurrent",
        Recurrence::NullRecurrent => "null_recurrent",
        Recurrence::Transient => "transient",
    }
}

fn opt_cell(v: Option<f64>) -> Cell {
    v.map_or(Cell::Text(String::new()), Cell::Float)
}

pub fn analyze(args: &ChainArgs, state: usize, j: Option<usize>, out: &OutputArgs) -> Result<Outcome> {
    let sel = args.select()?;
    let sys = scalar_system(&sel)?;
    let j = j.unwrap_or(state);
    let kind = analysis::recurrence(&sys, state)?;
    let f1 = analysis::return_probability(&sys, state)?;
    let time = match kind {
        Recurrence::Transient => None,
        _ => Some(analysis::expected_return_time(&sys, state)?),
    };
    let class = analysis::classify(&sys, state, j)?;
    let (even, odd) = class.oscillation.unzip();

    let mut r = Report::new(&[
        "state",
        "j",
        "recurrence",
        "return_probability",
        "expected_return_time",
        "limit_exists",
        "limit",
        "even_limit",
        "odd_limit",
    ]);
    r.field("state", state)
        .field("j", j)
        .field("recurrence", recurrence_name(kind));
    r.float("return_probability", f1);
    match time {
        Some(t) => {
            r.float("expected_return_time", t.value);
            r.field("expected_return_time_finite", t.value.is_finite());
            r.float("atom_mass_at_one", t.atom_mass);
            r.float("return_time_diagnostic", t.diagnostic);
        }
        None => {
            r.field("expected_return_time", Value::Null);
            r.field("expected_return_time_finite", false);
        }
    }
    r.field("limit_exists", class.limit_exists);
    r.field("limit", class.limit_value.map_or(Value::Null, float_json));
    r.field("even_limit", even.map_or(Value::Null, float_json));
    r.field("odd_limit", odd.map_or(Value::Null, float_json));
    r.row(vec![
        state.into(),
        j.into(),
        recurrence_name(kind).into(),
        f1.into(),
        time.map_or(Cell::Text("none".into()), |t| t.value.into()),
        class.limit_exists.into(),
        opt_cell(class.limit_value),
        opt_cell(even),
        opt_cell(odd),
    ]);
    finish(&r, out, meta(&sel, json!({}), None))
}

pub fn simulate(
    args: &ChainArgs,
    seed: u64,
    trajectories: u64,
    horizon: usize,
    state: usize,
    n: Option<usize>,
    out: &OutputArgs,
) -> Result<Outcome> {
    let sel = args.select()?;
    let rows = sel.chain.rows();
    let n = n.unwrap_or(horizon);
    let config = SimConfig {
        seed,
        n_trajectories: trajectories,
        horizon,
        start: state,
    };
    let rep = simulate::run(rows, config, &[n])?;
    let h = rep.histogram(n).context("histogram missing")?;

    let reach = state + n * rows.bandwidth();
    let last = rows.scalar_size().map_or(reach, |m| reach.min(m - 1));
    let mut r = Report::new(&["n", "state", "count", "frequency", "exact", "z"]);
    let mut hist = Vec::new();
    for s in 0..=last {
        let count = h.count(s);
        let exact = truncated_power(rows, n, state, s)?;
        if count == 0 && exact.abs() < 1e-300 {
            continue;
        }
        let freq = h.frequency(s);
        let z = frequency_z_score(freq, exact, h.total);
        r.row(vec![
            n.into(),
            s.into(),
            count.into(),
            freq.into(),
            exact.into(),
            z.into(),
        ]);
        let mut o = Map::new();
        o.insert("state".into(), s.into());
        o.insert("count".into(), count.into());
        o.insert("frequency".into(), float_json(freq));
        o.insert("exact".into(), float_json(exact));
        o.insert("z".into(), float_json(z));
        hist.push(Value::Object(o));
    }
    r.field("algorithm", rep.algorithm)
        .field("trajectories", trajectories)
        .field("horizon", horizon)
        .field("start", state)
        .field("n", n)
        .field("histogram", Value::Array(hist));
    let rt = &rep.return_time;
    r.field("returned", rt.returned).field("censored", rt.censored);
    r.float("mean_return_time", rt.mean.unwrap_or(f64::NAN))
        .float("mean_return_time_std_error", rt.std_error.unwrap_or(f64::NAN));
    finish(&r, out, meta(&sel, json!({}), Some(seed)))
}

fn block_residuals(sys: &BlockKmSystem, index: usize) -> Result<Vec<Vec<f64>>> {
    let table = sys.gram_table(index)?;
    let scale: Vec<f64> = (0..=index).map(|k| table[k][k].max_abs()).collect();
    Ok((0..=index)
        .map(|i| {
            (0..=index)
                .map(|j| {
                    let g = &table[i][j];
                    if i == j {
                        g.max_abs_diff(&g.transpose()) / scale[i]
                    } else {
                        g.max_abs() / (scale[i] * scale[j]).sqrt()
                    }
                })
                .collect()
        })
        .collect())
}

pub fn orthogonality(args: &ChainArgs, index: usize, out: &OutputArgs) -> Result<Outcome> {
    let sel = args.select()?;
    let residuals: Vec<Vec<f64>> = match system(&sel, index)? {
        FamilySystem::Scalar(sys) => {
            let top = sys.clamp_index(index);
            let d = sys.orthogonality_defects(top)?;
            (0..=top)
                .map(|i| (0..=top).map(|j| d[(i, j)].abs()).collect())
                .collect()
        }
        FamilySystem::Block(sys) => block_residuals(&sys, index)?,
    };
    let mut r = Report::new(&["i", "j", "residual"]);
    let worst = residuals.iter().flatten().fold(
        0.0f64,
        |a, &b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) },
    );
    for (i, row) in residuals.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            r.row(vec![i.into(), j.into(), v.into()]);
        }
    }
    r.field("index_max", residuals.len() - 1);
    r.float("max_residual", worst);
    r.field("within_tolerance", worst <= ORTHOGONALITY_TOL);
    r.field(
        "residuals",
        Value::Array(
            residuals
                .iter()
                .map(|row| Value::Array(row.iter().map(|&v| float_json(v)).collect()))
                .collect(),
        ),
    );
    finish(&r, out, meta(&sel, json!({ "residual": ORTHOGONALITY_TOL }), None))
}
