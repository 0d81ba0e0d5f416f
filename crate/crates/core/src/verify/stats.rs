//! Goodness-of-fit and summary statistics used by the checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Two-sided Kolmogorov–Smirnov distance between the empirical CDF of
/// `sorted` and `cdf`.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::param("KS statistic needs at least one sample"));
    }
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// Asymptotic KS critical value `c(α)/√N`, `c(α) = sqrt(−ln(α/2)/2)`.
pub fn ks_critical(alpha: f64, n: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) || n == 0 {
        return Err(Error::param(format!("KS critical value needs 0 < alpha < 1 and N >= 1, got ({alpha}, {n})")));
    }
    Ok((-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt())
}

/// Sorts in place (NaN-free input assumed) and returns the KS statistic.
pub fn ks_unsorted(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> Result<f64> {
    samples.sort_by(f64::total_cmp);
    ks_statistic(&samples, cdf)
}

/// `P(X ≤ x)` for `X ~ Gamma(shape, scale)` with integer shape:
/// `1 − e^{−y} Σ_{i<k} y^i / i!`, `y = x/scale`.
pub fn gamma_cdf_integer(shape: u32, scale: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let y = x / scale;
    let mut term = 1.0;
    let mut sum = 1.0;
    for i in 1..shape {
        term *= y / i as f64;
        sum += term;
    }
    (1.0 - (-y).exp() * sum).clamp(0.0, 1.0)
}

/// `P(X = k)` for `X ~ Poisson(mean)`.
pub fn poisson_pmf(mean: f64, k: usize) -> f64 {
    let ln = k as f64 * mean.ln() - mean - statrs::function::gamma::ln_gamma(k as f64 + 1.0);
    ln.exp()
}

/// Outcome of a chi-square goodness-of-fit test.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub critical: f64,
    pub p_value: f64,
}

/// Chi-square test of count data against a Poisson law: bins `0..=max_bin`
/// plus a pooled upper tail, with adjacent bins merged until each expects at
/// least five observations.
pub fn chi_square_poisson(counts: &[usize], mean: f64, max_bin: usize, alpha: f64) -> Result<ChiSquare> {
    if counts.is_empty() || !(mean > 0.0) {
        return Err(Error::param("chi-square needs samples and a positive mean"));
    }
    let total = counts.len() as f64;
    let mut observed = vec![0.0; max_bin + 2];
    for &c in counts {
        observed[c.min(max_bin + 1)] += 1.0;
    }
    let mut expected: Vec<f64> = (0..=max_bin).map(|k| total * poisson_pmf(mean, k)).collect();
    let head: f64 = expected.iter().sum();
    expected.push((total - head).max(0.0));

    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (ok, ek) in observed.iter().zip(&expected) {
        o += ok;
        e += ek;
        if e >= 5.0 {
            bins.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => bins.push((o, e)),
        }
    }
    if bins.len() < 2 {
        return Err(Error::param("chi-square needs at least two bins after merging"));
    }
    let statistic = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = bins.len() - 1;
    let law = ChiSquared::new(dof as f64).map_err(|e| Error::param(e.to_string()))?;
    Ok(ChiSquare {
        statistic,
        dof,
        critical: law.inverse_cdf(1.0 - alpha),
        p_value: 1.0 - law.cdf(statistic),
    })
}

/// Pearson correlation; 0 when either sample is constant.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Sample mean and unbiased variance.
pub fn mean_variance(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Least-squares line `y = intercept + slope·x`; needs at least three points.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::param("regression needs at least three (x, y) points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::param("regression needs at least two distinct x values"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}
