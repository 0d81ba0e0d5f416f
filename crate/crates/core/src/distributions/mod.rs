//! Exact samplers and densities for the building blocks of the jump process:
//! exponential, integer-shape gamma, uniform directions, the `n`-dimensional
//! Laplace law `∝ e^{-ε‖v‖₂}`, and the radial jump law built on `K_ν`.

mod bessel;
mod bessel_sampler;

use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::ln_gamma;

pub use bessel::{bessel_k, ln_bessel_k, BesselOrder};
pub use bessel_sampler::{
    bessel_density, BesselParams, BesselSampler, INTERP_TOLERANCE, QUANTILE_KNOTS, TAIL_MASS,
};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::param("dimension n must be >= 1"))
    } else {
        Ok(())
    }
}

/// Exponential draw with density `λ e^{-λx}`, by inversion.
pub fn sample_exponential(rate: f64, stream: &mut RandomStream) -> Result<f64> {
    check_positive("exponential rate", rate)?;
    Ok(exponential(rate, stream))
}

#[inline]
pub(crate) fn exponential(rate: f64, stream: &mut RandomStream) -> f64 {
    -stream.open01().ln() / rate
}

/// Gamma(`shape`, `scale`) for integer shape, as a sum of `shape`
/// exponential draws with mean `scale`.
pub fn sample_gamma_integer(shape: u32, scale: f64, stream: &mut RandomStream) -> Result<f64> {
    if shape < 1 {
        return Err(Error::param("gamma shape must be >= 1"));
    }
    check_positive("gamma scale", scale)?;
    Ok(gamma_integer(shape, scale, stream))
}

#[inline]
pub(crate) fn gamma_integer(shape: u32, scale: f64, stream: &mut RandomStream) -> f64 {
    let mut s = 0.0;
    for _ in 0..shape {
        s += exponential(1.0, stream);
    }
    s * scale
}

/// Uniform point on the unit sphere `S^{n-1}` (normalized Gaussian vector).
pub fn sample_unit_direction(n: usize, stream: &mut RandomStream) -> Result<Vec<f64>> {
    check_dimension(n)?;
    let mut v = vec![0.0; n];
    fill_unit_direction(&mut v, stream);
    Ok(v)
}

pub(crate) fn fill_unit_direction(v: &mut [f64], stream: &mut RandomStream) {
    loop {
        let mut norm2 = 0.0;
        for x in v.iter_mut() {
            *x = StandardNormal.sample(stream);
            norm2 += *x * *x;
        }
        if norm2 > 0.0 {
            let norm = norm2.sqrt();
            for x in v.iter_mut() {
                *x /= norm;
            }
            return;
        }
    }
}

/// Jump-radius draw from the "Bessel" law with the given dimension and scale.
pub fn sample_bessel(params: BesselParams, stream: &mut RandomStream) -> Result<f64> {
    let sampler = BesselSampler::for_dimension(params.n())?;
    Ok(sampler.sample_scaled(params.beta(), stream))
}

/// `n`-dimensional Laplace vector with density `∝ e^{-ε‖v‖₂}`: a
/// Gamma(`n`, `1/ε`) radius along a uniform direction.
pub fn sample_laplace_nd(n: usize, eps: f64, stream: &mut RandomStream) -> Result<Vec<f64>> {
    check_dimension(n)?;
    check_positive("privacy level", eps)?;
    let mut v = vec![0.0; n];
    fill_laplace_nd(&mut v, eps, stream);
    Ok(v)
}

pub(crate) fn fill_laplace_nd(v: &mut [f64], eps: f64, stream: &mut RandomStream) {
    let r = gamma_integer(v.len() as u32, 1.0 / eps, stream);
    fill_unit_direction(v, stream);
    for x in v.iter_mut() {
        *x *= r;
    }
}

/// Normalizing constant `Γ(n/2+1) / (π^{n/2} Γ(n+1))` of `e^{-‖x‖₂}` on `R^n`.
pub fn laplace_norm_constant(n: usize) -> f64 {
    let nf = n as f64;
    (ln_gamma(nf / 2.0 + 1.0) - nf / 2.0 * std::f64::consts::PI.ln() - ln_gamma(nf + 1.0)).exp()
}

/// Density `ε^n C₁ e^{-ε‖x‖₂}` of the `n`-dimensional Laplace law.
pub fn laplace_density_nd(eps: f64, x: &[f64]) -> Result<f64> {
    check_dimension(x.len())?;
    check_positive("privacy level", eps)?;
    let n = x.len();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok((n as f64 * eps.ln() - eps * norm).exp() * laplace_norm_constant(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn exponential_moments() {
        let mut s = RandomStream::new(1);
        let xs: Vec<f64> = (0..1_000_000).map(|_| sample_exponential(1.0, &mut s).unwrap()).collect();
        assert!((mean_var(&xs).0 - 1.0).abs() < 0.005);
        let xs: Vec<f64> = (0..1_000_000).map(|_| sample_exponential(2.0, &mut s).unwrap()).collect();
        assert!((mean_var(&xs).0 - 0.5).abs() < 0.003);
        let xs: Vec<f64> = (0..1_000_000).map(|_| sample_exponential(3.0, &mut s).unwrap()).collect();
        let v = mean_var(&xs).1;
        assert!((v / (1.0 / 9.0) - 1.0).abs() < 0.02, "var {v}");
    }

    #[test]
    fn exponential_rejects_non_positive_rate() {
        let mut s = RandomStream::new(1);
        assert!(matches!(sample_exponential(0.0, &mut s), Err(Error::Parameter(_))));
        assert!(sample_exponential(-1.0, &mut s).is_err());
    }

    #[test]
    fn gamma_moments() {
        let mut s = RandomStream::new(2);
        let xs: Vec<f64> = (0..1_000_000).map(|_| sample_gamma_integer(3, 1.0, &mut s).unwrap()).collect();
        assert!((mean_var(&xs).0 / 3.0 - 1.0).abs() < 0.01);
        let xs: Vec<f64> = (0..1_000_000).map(|_| sample_gamma_integer(2, 0.5, &mut s).unwrap()).collect();
        assert!((mean_var(&xs).1 / 0.5 - 1.0).abs() < 0.02);
        assert!(sample_gamma_integer(0, 1.0, &mut s).is_err());
    }

    #[test]
    fn direction_n1_is_a_sign() {
        let mut s = RandomStream::new(3);
        let mut plus = 0;
        for _ in 0..100_000 {
            let v = sample_unit_direction(1, &mut s).unwrap();
            assert!(v[0] == 1.0 || v[0] == -1.0);
            if v[0] > 0.0 {
                plus += 1;
            }
        }
        assert!((plus as f64 / 1e5 - 0.5).abs() < 0.01);
    }

    #[test]
    fn direction_moments() {
        let mut s = RandomStream::new(4);
        let (mut m0, mut m1) = (0.0, 0.0);
        for _ in 0..1_000_000 {
            let v = sample_unit_direction(2, &mut s).unwrap();
            assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-12);
            m0 += v[0];
            m1 += v[1];
        }
        assert!((m0 / 1e6).abs() < 0.005 && (m1 / 1e6).abs() < 0.005);
        let mut sq = 0.0;
        for _ in 0..1_000_000 {
            let v = sample_unit_direction(3, &mut s).unwrap();
            sq += v[0] * v[0];
        }
        assert!((sq / 1e6 * 3.0 - 1.0).abs() < 0.02);
        assert!(sample_unit_direction(0, &mut s).is_err());
    }

    #[test]
    fn laplace_density_values() {
        assert!((laplace_density_nd(1.0, &[0.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!((laplace_density_nd(2.0, &[1.0]).unwrap() - (-2f64).exp()).abs() < 1e-15);
        assert!(laplace_density_nd(0.0, &[1.0]).is_err());
        assert!(laplace_density_nd(1.0, &[]).is_err());
    }

    #[test]
    fn laplace_nd_second_moment() {
        let mut s = RandomStream::new(5);
        for (n, eps) in [(1usize, 1.0), (2, 1.0), (20, 1.0)] {
            let trials = 1_000_000;
            let mut acc = 0.0;
            let mut v = vec![0.0; n];
            for _ in 0..trials {
                fill_laplace_nd(&mut v, eps, &mut s);
                acc += v.iter().map(|x| x * x).sum::<f64>();
            }
            let want = (n * (n + 1)) as f64 / (eps * eps);
            assert!((acc / trials as f64 / want - 1.0).abs() < 0.02, "n={n}");
        }
    }

    #[test]
    fn laplace_1d_mean_abs() {
        let mut s = RandomStream::new(6);
        let m: f64 = (0..1_000_000)
            .map(|_| sample_laplace_nd(1, 1.0, &mut s).unwrap()[0].abs())
            .sum::<f64>()
            / 1e6;
        assert!((m - 1.0).abs() < 0.01);
    }

    #[test]
    fn deterministic_given_seed() {
        let draw = |seed| {
            let mut s = RandomStream::new(seed);
            (
                sample_laplace_nd(3, 1.5, &mut s).unwrap(),
                sample_bessel(BesselParams::new(4, 0.7).unwrap(), &mut s).unwrap(),
            )
        };
        assert_eq!(draw(77), draw(77));
    }

    #[test]
    fn laplace_density_normalizes_radially() {
        // ∫ f = S_{n-1} ∫₀^∞ f(r) r^{n-1} dr with S_{n-1} = 2π^{n/2}/Γ(n/2).
        for n in [1usize, 2, 3, 7, 20] {
            for eps in [0.5, 2.0] {
                let surface = (std::f64::consts::LN_2 + n as f64 / 2.0 * std::f64::consts::PI.ln()
                    - ln_gamma(n as f64 / 2.0))
                .exp();
                let upper = (n as f64 + 60.0) / eps;
                let steps = 100_000;
                let h = upper / steps as f64;
                let f = |r: f64| {
                    let mut x = vec![0.0; n];
                    x[0] = r;
                    laplace_density_nd(eps, &x).unwrap() * r.powi(n as i32 - 1)
                };
                let mut acc = f(0.0) + f(upper);
                for i in 1..steps {
                    acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                let mass = surface * acc * h / 3.0;
                assert!((mass - 1.0).abs() < 1e-6, "n={n} eps={eps} mass={mass}");
            }
        }
    }

    #[test]
    fn gamma_shape_one_is_exponential() {
        let mut s = RandomStream::new(7);
        let mut xs: Vec<f64> = (0..100_000).map(|_| sample_gamma_integer(1, 2.0, &mut s).unwrap()).collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let c = 1.0 - (-x / 2.0).exp();
                (c - i as f64 / n).abs().max((c - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.63 / n.sqrt(), "D={d}");
    }
}
