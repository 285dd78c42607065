//! Empirical distribution functions, confidence bands and density estimators.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Right-continuous empirical CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    /// Accepts `±∞` (e.g. an unconstrained component) but not NaN.
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("samples"));
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::Domain("NaN sample".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// `#{samples ≤ x} / N`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.sorted.len() as f64
    }

    /// `#{samples < x} / N`.
    pub fn eval_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s < x) as f64 / self.sorted.len() as f64
    }

    /// `#{samples > x} / N`.
    pub fn survival(&self, x: f64) -> f64 {
        1.0 - self.eval(x)
    }

    /// Distinct sample values, ascending.
    pub fn jump_points(&self) -> Vec<f64> {
        let mut pts = self.sorted.clone();
        pts.dedup();
        pts
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }
}

/// `sup_x |F(x) - G(x)|`, attained at one of the jump points of either function.
pub fn ks_distance(f: &Ecdf, g: &Ecdf) -> f64 {
    let mut pts = f.jump_points();
    pts.extend(g.jump_points());
    pts.iter()
        .map(|&x| (f.eval(x) - g.eval(x)).abs())
        .fold(0.0, f64::max)
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(f: &Ecdf, cdf: F) -> f64 {
    f.jump_points()
        .iter()
        .map(|&x| {
            let c = cdf(x);
            (f.eval(x) - c).abs().max((c - f.eval_left(x)).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of the one-sample KS statistic `d` at sample size `n`
/// (Kolmogorov series with the usual small-sample correction).
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("confidence level {level} must lie in (0, 1)")))
    }
}

/// Two-sided standard normal quantile for the given coverage.
pub fn normal_quantile(level: f64) -> Result<f64> {
    check_level(level)?;
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(std.inverse_cdf(1.0 - (1.0 - level) / 2.0))
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_ci(k: u64, n: u64, level: f64) -> Result<(f64, f64)> {
    if n == 0 || k > n {
        return Err(Error::Domain(format!("invalid counts k = {k}, n = {n}")));
    }
    let z = normal_quantile(level)?;
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    Ok((lo, hi))
}

/// Dvoretzky–Kiefer–Wolfowitz half-width `sqrt(ln(2/δ) / (2n))` with `δ = 1 - level`.
pub fn dkw_band(n: usize, level: f64) -> Result<f64> {
    check_level(level)?;
    if n == 0 {
        return Err(Error::Empty("samples"));
    }
    Ok(((2.0 / (1.0 - level)).ln() / (2.0 * n as f64)).sqrt())
}

pub fn intervals_overlap(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

/// One bin of an empirical density curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityBin {
    /// First site of the bin.
    pub lo: i64,
    /// Last site of the bin.
    pub hi: i64,
    pub density: f64,
}

impl DensityBin {
    pub fn centre(&self) -> f64 {
        (self.lo + self.hi) as f64 / 2.0
    }
}

/// Fraction of occupied sites per bin of `bin_width` sites covering `[lo, hi]`,
/// averaged over the ensemble. A trailing partial bin is dropped.
pub fn empirical_density(
    configs: &[Vec<i64>],
    bin_width: u64,
    region: (i64, i64),
) -> Result<Vec<DensityBin>> {
    if configs.is_empty() {
        return Err(Error::Empty("ensemble"));
    }
    if bin_width == 0 {
        return Err(Error::Domain("bin width must be at least 1".into()));
    }
    let (lo, hi) = region;
    if hi < lo {
        return Err(Error::Domain(format!("empty region [{lo}, {hi}]")));
    }
    let w = bin_width as i64;
    let nbins = ((hi - lo + 1) / w) as usize;
    let mut counts = vec![0u64; nbins];
    for cfg in configs {
        for &x in cfg {
            if x >= lo {
                let b = ((x - lo) / w) as usize;
                if b < nbins {
                    counts[b] += 1;
                }
            }
        }
    }
    let norm = (w as f64) * configs.len() as f64;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(b, &c)| DensityBin {
            lo: lo + b as i64 * w,
            hi: lo + (b as i64 + 1) * w - 1,
            density: c as f64 / norm,
        })
        .collect())
}

/// `sup_{s ∈ grid} |S_lhs(s) - S_1(s) S_2(s)|` with `S(s) = P(X > s)` estimated empirically.
pub fn decoupling_check(lhs: &[f64], comp1: &[f64], comp2: &[f64], grid: &[f64]) -> Result<f64> {
    let (l, a, b) = (Ecdf::new(lhs)?, Ecdf::new(comp1)?, Ecdf::new(comp2)?);
    Ok(grid
        .iter()
        .map(|&s| (l.survival(s) - a.survival(s) * b.survival(s)).abs())
        .fold(0.0, f64::max))
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
