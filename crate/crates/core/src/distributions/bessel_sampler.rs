//! Inverse-CDF sampler for the radial jump law ("Bessel" distribution).
//!
//! The table is built once per dimension for unit scale and shared; other
//! scales are obtained by multiplying the draw by `β`.
//!
//! Construction:
//! 1. the support is truncated at the smallest grid point `x_max` where an
//!    analytic tail bound drops below [`TAIL_MASS`];
//! 2. the CDF is tabulated on a fine cell grid with 8-point Gauss–Legendre
//!    (cells near zero are graded geometrically);
//! 3. the quantile is tabulated at [`QUANTILE_KNOTS`] uniformly spaced
//!    probabilities and interpolated linearly between them.
//!
//! Knot intervals where linear interpolation would leave a CDF error above
//! [`INTERP_TOLERANCE`] (the few intervals at the head and the tail, where the
//! quantile is steep) are flagged; draws landing in them are inverted
//! exactly against the tabulated CDF instead.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use statrs::function::gamma::ln_gamma;

use super::bessel::{ln_bessel_k_unchecked, BesselOrder};
use crate::error::{Error, Result};
use crate::rng::RandomStream;

pub const TAIL_MASS: f64 = 1e-12;
pub const QUANTILE_KNOTS: usize = 1 << 14;
pub const INTERP_TOLERANCE: f64 = 1e-7;

const CELLS: usize = 4096;
const GRADED_LEVELS: i32 = 48;

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Parameters of the radial jump law: dimension `n` and scale `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselParams {
    n: u32,
    beta: f64,
}

impl BesselParams {
    pub fn new(n: u32, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("Bessel dimension n must be >= 1"));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::param(format!("Bessel scale must be finite and > 0, got {beta}")));
        }
        Ok(Self { n, beta })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Density `4 / (Γ(n/2) (2β)^{n/2+1}) x^{n/2} K_{n/2-1}(x/β)`.
pub fn bessel_density(params: BesselParams, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("Bessel density needs finite x > 0, got {x}")));
    }
    Ok(ln_density(params.n, params.beta, x).exp())
}

fn ln_density(n: u32, beta: f64, x: f64) -> f64 {
    let half = n as f64 / 2.0;
    4f64.ln() - ln_gamma(half) - (half + 1.0) * (2.0 * beta).ln()
        + half * x.ln()
        + ln_bessel_k_unchecked(BesselOrder::for_dimension(n), x / beta)
}

/// Unit-scale density, continuous at 0.
fn unit_density(n: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return if n == 1 { 1.0 } else { 0.0 };
    }
    ln_density(n, 1.0, x).exp()
}

/// Tabulated inverse-CDF sampler for one dimension at unit scale.
#[derive(Debug)]
pub struct BesselSampler {
    n: u32,
    x_max: f64,
    /// Cell boundaries of the CDF table.
    nodes: Vec<f64>,
    /// Normalized CDF at each node.
    cdf: Vec<f64>,
    norm: f64,
    quantiles: Vec<f64>,
    exact: Vec<bool>,
}

impl BesselSampler {
    /// Shared sampler for dimension `n`, built on first use.
    pub fn for_dimension(n: u32) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::param("Bessel dimension n must be >= 1"));
        }
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<BesselSampler>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|p| p.into_inner());
        Ok(guard
            .entry(n)
            .or_insert_with(|| Arc::new(BesselSampler::build(n)))
            .clone())
    }

    fn build(n: u32) -> Self {
        let x_max = truncation_point(n);
        let h = x_max / CELLS as f64;
        let mut nodes = Vec::with_capacity(CELLS + GRADED_LEVELS as usize + 1);
        nodes.push(0.0);
        for level in (1..=GRADED_LEVELS).rev() {
            nodes.push(h * 2f64.powi(-level));
        }
        for i in 1..=CELLS {
            nodes.push(if i == CELLS { x_max } else { h * i as f64 });
        }
        let mut cdf = Vec::with_capacity(nodes.len());
        cdf.push(0.0);
        let mut acc = 0.0;
        for w in nodes.windows(2) {
            acc += gauss_legendre(n, w[0], w[1]);
            cdf.push(acc);
        }
        let norm = acc;
        for c in &mut cdf {
            *c /= norm;
        }
        let last = cdf.len() - 1;
        cdf[last] = 1.0;

        let mut sampler = Self {
            n,
            x_max,
            nodes,
            cdf,
            norm,
            quantiles: Vec::new(),
            exact: Vec::new(),
        };
        let m = QUANTILE_KNOTS;
        let mut quantiles = Vec::with_capacity(m + 1);
        quantiles.push(0.0);
        for k in 1..m {
            quantiles.push(sampler.invert(k as f64 / m as f64, None));
        }
        quantiles.push(x_max);
        let mut exact = Vec::with_capacity(m);
        for k in 0..m {
            let p_mid = (k as f64 + 0.5) / m as f64;
            let x_mid = 0.5 * (quantiles[k] + quantiles[k + 1]);
            exact.push((sampler.cdf_at(x_mid) - p_mid).abs() > INTERP_TOLERANCE);
        }
        sampler.quantiles = quantiles;
        sampler.exact = exact;
        sampler
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Upper end of the truncated support at unit scale.
    pub fn support_max(&self) -> f64 {
        self.x_max
    }

    /// Number of knot intervals that use exact inversion.
    pub fn exact_intervals(&self) -> usize {
        self.exact.iter().filter(|&&e| e).count()
    }

    /// Tabulated CDF of the truncated unit-scale law.
    pub fn cdf_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.x_max {
            return 1.0;
        }
        let i = self.nodes.partition_point(|&v| v <= x) - 1;
        (self.cdf[i] + gauss_legendre(self.n, self.nodes[i], x) / self.norm).min(1.0)
    }

    /// Unit-scale quantile as the sampler evaluates it.
    pub fn quantile(&self, p: f64) -> f64 {
        let m = QUANTILE_KNOTS as f64;
        let t = (p * m).clamp(0.0, m);
        let k = (t as usize).min(QUANTILE_KNOTS - 1);
        let frac = t - k as f64;
        let guess = self.quantiles[k] + frac * (self.quantiles[k + 1] - self.quantiles[k]);
        if self.exact[k] {
            self.invert(p, Some(guess))
        } else {
            guess
        }
    }

    /// Draw at scale `beta` (no validation; callers hold a valid `β`).
    pub(crate) fn sample_scaled(&self, beta: f64, stream: &mut RandomStream) -> f64 {
        beta * self.quantile(stream.open01())
    }

    /// Solves `cdf_at(x) = p` by safeguarded Newton iteration inside the
    /// CDF cell that contains `p`.
    fn invert(&self, p: f64, guess: Option<f64>) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return self.x_max;
        }
        let i = (self.cdf.partition_point(|&c| c <= p) - 1).min(self.nodes.len() - 2);
        let (mut lo, mut hi) = (self.nodes[i], self.nodes[i + 1]);
        let base = self.cdf[i];
        let span = self.cdf[i + 1] - base;
        let mut x = match guess {
            Some(g) if g > lo && g < hi => g,
            _ => {
                let w = if span > 0.0 { (p - base) / span } else { 0.5 };
                lo + w * (hi - lo)
            }
        };
        for _ in 0..100 {
            let f = base + gauss_legendre(self.n, self.nodes[i], x) / self.norm - p;
            if f == 0.0 {
                break;
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = unit_density(self.n, x) / self.norm;
            let newton = x - f / d;
            let next = if d > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - x).abs() <= 1e-15 * x.max(1e-300) || hi - lo <= 1e-15 * hi {
                x = next;
                break;
            }
            x = next;
        }
        x
    }
}

fn gauss_legendre(n: u32, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for (node, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        s += w * (unit_density(n, mid - half * node) + unit_density(n, mid + half * node));
    }
    s * half
}

/// Smallest grid point (step 0.01) where the analytic upper bound on the
/// unit-scale tail mass falls below [`TAIL_MASS`].
///
/// With `a = (n-1)/2` and `g(t) = sqrt(t) e^t K_ν(t)`, the density is
/// `c t^a g(t) e^{-t}`. `g` is decreasing for `ν ≥ 1/2` and bounded by
/// `sqrt(π/2)` for `ν ≤ 0`, and `t^a e^{-t} ≤ x^a e^{-x} e^{-(t-x)(1-a/x)}`
/// for `t ≥ x > a`, giving `S(x) ≤ c M x^a e^{-x} / (1 - a/x)`.
fn truncation_point(n: u32) -> f64 {
    let a = (n as f64 - 1.0) / 2.0;
    let half = n as f64 / 2.0;
    let ln_c = 4f64.ln() - ln_gamma(half) - (half + 1.0) * 2f64.ln();
    let order = BesselOrder::for_dimension(n);
    let envelope = (std::f64::consts::PI / 2.0).sqrt().ln();
    let bound = |x: f64| {
        let ln_g = 0.5 * x.ln() + x + ln_bessel_k_unchecked(order, x);
        ln_c + ln_g.max(envelope) + a * x.ln() - x - (1.0 - a / x).ln()
    };
    let target = TAIL_MASS.ln();
    let mut x = ((a + 1.0) * 100.0).ceil() / 100.0;
    while bound(x) >= target {
        x += 0.01;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_density_is_exponential() {
        for &beta in &[0.1, 1.0, 2.0, 10.0] {
            let p = BesselParams::new(1, beta).unwrap();
            for &x in &[1e-6, 0.3, 1.0, 2.0, 7.5, 40.0] {
                let want = (-x / beta).exp() / beta;
                let got = bessel_density(p, x).unwrap();
                assert!(((got - want) / want).abs() < 1e-9, "beta={beta} x={x}");
            }
        }
        let p = BesselParams::new(1, 2.0).unwrap();
        assert!((bessel_density(p, 2.0).unwrap() - 0.5 * (-1f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn param_validation() {
        assert!(BesselParams::new(0, 1.0).is_err());
        assert!(BesselParams::new(2, 0.0).is_err());
        assert!(BesselParams::new(2, f64::NAN).is_err());
        let p = BesselParams::new(2, 1.0).unwrap();
        assert!(matches!(bessel_density(p, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn table_reaches_unit_mass() {
        for n in [1, 2, 3, 5, 20] {
            let s = BesselSampler::for_dimension(n).unwrap();
            assert!((s.norm - 1.0).abs() < 1e-9, "n={n} norm={}", s.norm);
        }
    }

    #[test]
    fn sampler_cdf_error_below_one_in_a_million() {
        for n in [1, 2, 3, 20] {
            let s = BesselSampler::for_dimension(n).unwrap();
            let mut worst: f64 = 0.0;
            let probes = 200_000;
            for i in 0..probes {
                let p = (i as f64 + 0.37) / probes as f64;
                worst = worst.max((s.cdf_at(s.quantile(p)) - p).abs());
            }
            for i in 1..2000 {
                let p = 1.0 - i as f64 * 1e-7;
                worst = worst.max((s.cdf_at(s.quantile(p)) - p).abs());
                let p = i as f64 * 1e-7;
                worst = worst.max((s.cdf_at(s.quantile(p)) - p).abs());
            }
            assert!(worst < 1e-6, "n={n} worst={worst}");
        }
    }

    #[test]
    fn n1_quantile_matches_exponential() {
        let s = BesselSampler::for_dimension(1).unwrap();
        for &p in &[1e-5, 0.1, 0.5, 0.9, 0.999, 0.999_99] {
            let want = -(1.0 - p as f64).ln();
            assert!((s.quantile(p) - want).abs() < 1e-6 * want.max(1.0), "p={p}");
        }
    }

    #[test]
    fn density_integrates_to_one_by_direct_quadrature() {
        // Simpson on a log-spaced grid, independent of the sampler tables.
        for (n, beta) in [1u32, 2, 3, 5, 20].into_iter().flat_map(|n| [0.1, 1.0, 10.0].map(|b| (n, b))) {
            let p = BesselParams::new(n, beta).unwrap();
            let (lo, hi) = ((1e-9 * beta).ln(), (200.0 * beta).ln());
            let steps = 40_000;
            let h = (hi - lo) / steps as f64;
            let f = |u: f64| bessel_density(p, u.exp()).unwrap() * u.exp();
            let mut acc = f(lo) + f(hi);
            for i in 1..steps {
                acc += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            let mass = acc * h / 3.0;
            assert!((mass - 1.0).abs() < 1e-6, "n={n} beta={beta} mass={mass}");
        }
    }

    #[test]
    fn matches_gaussian_scale_mixture() {
        // The jump vector is sqrt(2W)·β·Z with W ~ Exp(1), Z ~ N(0, I_n), so the
        // radius is sqrt(2W)·β·‖Z‖; compare its empirical CDF with the sampler's.
        use rand_distr::{Distribution, StandardNormal};
        let draws = 400_000;
        let critical = 1.95 / (draws as f64).sqrt();
        for n in [1u32, 2, 3, 8] {
            let s = BesselSampler::for_dimension(n).unwrap();
            let mut rng = RandomStream::new(900 + n as u64);
            let mut xs: Vec<f64> = (0..draws)
                .map(|_| {
                    let w = -rng.open01().ln();
                    let z2: f64 = (0..n)
                        .map(|_| {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            z * z
                        })
                        .sum();
                    (2.0 * w * z2).sqrt()
                })
                .collect();
            xs.sort_by(f64::total_cmp);
            let d = xs
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let c = s.cdf_at(x);
                    (c - i as f64 / draws as f64).abs().max((c - (i + 1) as f64 / draws as f64).abs())
                })
                .fold(0.0, f64::max);
            assert!(d < critical, "n={n} D={d}");
        }
    }
}
