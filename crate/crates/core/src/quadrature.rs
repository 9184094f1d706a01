//! Adaptive Gauss–Kronrod (10/21-point) quadrature for vector-valued integrands.
//!
//! Panels are bisected globally, worst estimated error first, until the summed
//! error estimate drops below `tolerance · scale` (scale = largest `∫|f_k|`),
//! or the worst panel sits at `max_depth` bisection levels. Panel results are
//! always summed in ascending panel order so results are reproducible.

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Default bisection depth; the CLI lets `KM_MAX_PANELS` override it.
pub const DEFAULT_MAX_DEPTH: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    /// Target relative error; refinement stops once reached.
    pub tolerance: f64,
    /// Results whose relative error estimate exceeds this are rejected.
    pub accept: f64,
    pub max_depth: usize,
    pub initial_panels: usize,
    /// Hard cap on panel count.
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            accept: 1e-10,
            max_depth: DEFAULT_MAX_DEPTH,
            initial_panels: 4,
            max_panels: 4096,
        }
    }
}

impl QuadConfig {
    pub fn with_max_depth(self, max_depth: usize) -> Self {
        Self { max_depth, ..self }
    }
}

/// Integral value(s) with the absolute error estimate and the integrand scale.
#[derive(Clone, Debug, PartialEq)]
pub struct Integral {
    pub values: Vec<f64>,
    pub error: f64,
    pub scale: f64,
}

struct Panel {
    a: f64,
    b: f64,
    depth: usize,
    values: Vec<f64>,
    abs: Vec<f64>,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let s = (200.0 * e / res_asc).powf(1.5);
        e = if s < 1.0 { res_asc * s } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

fn gk21<F>(f: &F, dim: usize, a: f64, b: f64, depth: usize) -> Panel
where
    F: Fn(f64, &mut [f64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fc = vec![0.0; dim];
    f(center, &mut fc);
    let mut kron: Vec<f64> = fc.iter().map(|v| v * WGK[10]).collect();
    let mut gauss = vec![0.0; dim];
    let mut abs: Vec<f64> = fc.iter().map(|v| v.abs() * WGK[10]).collect();
    let mut samples: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::with_capacity(10);
    let mut lo = vec![0.0; dim];
    let mut hi = vec![0.0; dim];
    for (j, &xk) in XGK.iter().enumerate().take(10) {
        let dx = half * xk;
        f(center - dx, &mut lo);
        f(center + dx, &mut hi);
        for k in 0..dim {
            let s = lo[k] + hi[k];
            kron[k] += WGK[j] * s;
            abs[k] += WGK[j] * (lo[k].abs() + hi[k].abs());
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
        samples.push((WGK[j], lo.clone(), hi.clone()));
    }
    let mut error: f64 = 0.0;
    let mut values = Vec::with_capacity(dim);
    let mut abs_out = Vec::with_capacity(dim);
    for k in 0..dim {
        let mean = 0.5 * kron[k];
        let mut asc = WGK[10] * (fc[k] - mean).abs();
        for (w, l, h) in &samples {
            asc += w * ((l[k] - mean).abs() + (h[k] - mean).abs());
        }
        let (rk, ra, rs) = (kron[k] * half, abs[k] * half.abs(), asc * half.abs());
        let e = rescale_error((kron[k] - gauss[k]) * half, ra, rs);
        error = error.max(e);
        values.push(rk);
        abs_out.push(ra);
    }
    Panel {
        a,
        b,
        depth,
        values,
        abs: abs_out,
        error,
    }
}

/// `∫_a^b f(x) dx` for a `dim`-component integrand.
pub fn integrate_vec<F>(f: F, dim: usize, a: f64, b: f64, cfg: &QuadConfig) -> Result<Integral>
where
    F: Fn(f64, &mut [f64]),
{
    if a == b {
        return Ok(Integral {
            values: vec![0.0; dim],
            error: 0.0,
            scale: 0.0,
        });
    }
    let n0 = cfg.initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut panels: Vec<Panel> = (0..n0)
        .map(|k| {
            let lo = a + width * k as f64;
            let hi = if k + 1 == n0 { b } else { lo + width };
            gk21(&f, dim, lo, hi, 0)
        })
        .collect();
    let summarize = |panels: &[Panel]| -> (f64, f64) {
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let scale = (0..dim)
            .map(|k| panels.iter().map(|p| p.abs[k]).sum::<f64>())
            .fold(0.0, f64::max);
        (err, scale)
    };
    loop {
        let (err, scale) = summarize(&panels);
        let floor = scale.max(f64::MIN_POSITIVE);
        if err <= cfg.tolerance * floor || err == 0.0 {
            break;
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.depth < cfg.max_depth)
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(worst) = worst else { break };
        if panels.len() >= cfg.max_panels {
            break;
        }
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(gk21(&f, dim, p.a, mid, p.depth + 1));
        panels.push(gk21(&f, dim, mid, p.b, p.depth + 1));
    }
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let (err, scale) = summarize(&panels);
    if err > cfg.accept * scale.max(f64::MIN_POSITIVE) && err > 0.0 {
        return Err(Error::Quadrature {
            estimate: err,
            tolerance: cfg.accept * scale,
        });
    }
    let mut values = vec![0.0; dim];
    for p in &panels {
        for (v, pv) in values.iter_mut().zip(&p.values) {
            *v += pv;
        }
    }
    Ok(Integral {
        values,
        error: err,
        scale,
    })
}

pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let r = integrate_vec(|x, out: &mut [f64]| out[0] = f(x), 1, a, b, cfg)?;
    Ok((r.values[0], r.error))
}

/// `∫_a^b f(x) (x−a)^α (b−x)^β dx` with `α, β > −1`.
///
/// Substitutes `x = a + (b−a) sin²(θ/2)`, which turns the endpoint factors
/// into `sin^{2α+1}(θ/2) cos^{2β+1}(θ/2)`: smooth whenever `2α` and `2β` are
/// integers, and a much milder singularity otherwise.
pub fn integrate_jacobi_vec<F>(
    f: F,
    dim: usize,
    a: f64,
    b: f64,
    alpha: f64,
    beta: f64,
    cfg: &QuadConfig,
) -> Result<Integral>
where
    F: Fn(f64, &mut [f64]),
{
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Parameter {
            name: "endpoint exponent".into(),
            reason: format!("need α, β > −1, got ({alpha}, {beta})"),
        });
    }
    let len = b - a;
    let prefactor = len.powf(alpha + beta + 1.0);
    let g = |theta: f64, out: &mut [f64]| {
        let s = (0.5 * theta).sin();
        let c = (0.5 * theta).cos();
        let x = a + len * s * s;
        f(x, out);
        let w = prefactor * s.powf(2.0 * alpha + 1.0) * c.powf(2.0 * beta + 1.0);
        for v in out.iter_mut() {
            *v *= w;
        }
    };
    integrate_vec(g, dim, 0.0, std::f64::consts::PI, cfg)
}
