//! Modified Bessel functions of the second kind, `K_ν(x)`, for the orders
//! the jump-size law needs: integers and half-integers `ν ≥ -1/2`.
//!
//! Half-integer orders start from the closed form
//! `K_{±1/2}(x) = sqrt(π / 2x) e^{-x}`. Integer orders start from `K_0` and
//! `K_1`, computed with the power series for `x ≤ 2` and Steed's continued
//! fraction above. Both then climb with the upward recurrence
//! `K_{ν+1} = K_{ν-1} + (2ν/x) K_ν`, carried out on the ratio
//! `K_{ν+1}/K_ν` and accumulated in log space so large orders at small `x`
//! do not overflow.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 2.0;
const CF_EPS: f64 = 1e-16;
const CF_MAX_ITER: usize = 10_000;

/// A Bessel order `ν` restricted to multiples of 1/2 no smaller than -1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BesselOrder {
    twice: i32,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        let twice = (2.0 * nu).round();
        if !nu.is_finite() || (2.0 * nu - twice).abs() > 1e-12 || twice < -1.0 {
            return Err(Error::param(format!(
                "Bessel order must be an integer or half-integer >= -1/2, got {nu}"
            )));
        }
        Ok(Self { twice: twice as i32 })
    }

    /// Order `n/2 - 1` used by the `n`-dimensional jump law.
    pub fn for_dimension(n: u32) -> Self {
        Self {
            twice: n as i32 - 2,
        }
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }
}

/// `K_ν(x)`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    Ok(ln_bessel_k(nu, x)?.exp())
}

/// `ln K_ν(x)`.
pub fn ln_bessel_k(nu: f64, x: f64) -> Result<f64> {
    let order = BesselOrder::new(nu)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("K_nu(x) requires finite x > 0, got {x}")));
    }
    Ok(ln_bessel_k_unchecked(order, x))
}

pub(crate) fn ln_bessel_k_unchecked(order: BesselOrder, x: f64) -> f64 {
    let target = order.twice.abs();
    if target % 2 == 1 {
        // K_{-1/2} = K_{1/2}; climb from 1/2 with ratio K_{3/2}/K_{1/2} = 1 + 1/x.
        let mut ln_k = 0.5 * (PI / (2.0 * x)).ln() - x;
        let mut ratio = 1.0;
        let mut twice_nu = 1;
        while twice_nu < target {
            ratio = 1.0 / ratio + twice_nu as f64 / x;
            ln_k += ratio.ln();
            twice_nu += 2;
        }
        ln_k
    } else {
        let (k0, k1) = scaled_k0_k1(x);
        if target == 0 {
            return k0.ln() - x;
        }
        let mut ln_k = k1.ln() - x;
        let mut ratio = k1 / k0;
        let mut nu = 1;
        while 2 * nu < target {
            ratio = 1.0 / ratio + 2.0 * nu as f64 / x;
            ln_k += ratio.ln();
            nu += 1;
        }
        ln_k
    }
}

/// `(e^x K_0(x), e^x K_1(x))`.
pub(crate) fn scaled_k0_k1(x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT {
        let (k0, k1) = series_k0_k1(x);
        let scale = x.exp();
        (k0 * scale, k1 * scale)
    } else {
        steed_scaled(0.0, x)
    }
}

/// Power series for `K_0` and `K_1`, accurate for small `x`.
fn series_k0_k1(x: f64) -> (f64, f64) {
    let t = 0.25 * x * x;
    let log_half = (0.5 * x).ln();
    // term0 = t^k / (k!)^2, term1 = t^k / (k! (k+1)!), psi = ψ(k+1)
    let mut term0 = 1.0;
    let mut term1 = 1.0;
    let mut psi = -EULER_GAMMA;
    let mut i0 = 0.0;
    let mut i1_sum = 0.0;
    let mut k0_sum = 0.0;
    let mut k1_sum = 0.0;
    for k in 0..100 {
        let kf = k as f64;
        let psi_next = psi + 1.0 / (kf + 1.0);
        i0 += term0;
        i1_sum += term1;
        k0_sum += psi * term0;
        k1_sum += (psi + psi_next) * term1;
        if term0 < 1e-18 * i0 {
            break;
        }
        term0 *= t / ((kf + 1.0) * (kf + 1.0));
        term1 *= t / ((kf + 1.0) * (kf + 2.0));
        psi = psi_next;
    }
    let i1 = 0.5 * x * i1_sum;
    let k0 = -log_half * i0 + k0_sum;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1_sum;
    (k0, k1)
}

/// Steed's continued fraction (Temme's CF2 form) for `|μ| ≤ 1/2`, `x ≥ 2`.
/// Returns `(e^x K_μ(x), e^x K_{μ+1}(x))`.
pub(crate) fn steed_scaled(mu: f64, x: f64) -> (f64, f64) {
    let a1 = 0.25 - mu * mu;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..CF_MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < CF_EPS {
            break;
        }
    }
    h *= a1;
    let kmu = (PI / (2.0 * x)).sqrt() / s;
    let kmu1 = kmu * (mu + x + 0.5 - h) / x;
    (kmu, kmu1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn half_order_closed_form() {
        let k = bessel_k(0.5, 1.0).unwrap();
        assert!((k - 0.461_068_504_447_894).abs() < 1e-14);
        assert_eq!(bessel_k(-0.5, 1.0).unwrap(), k);
        let k32 = bessel_k(1.5, 1.0).unwrap();
        assert!((k32 - 0.922_137_008_895_789).abs() < 1e-14);
    }

    #[test]
    fn series_and_continued_fraction_meet_at_the_split() {
        let (s0, s1) = series_k0_k1(SERIES_LIMIT);
        let e = SERIES_LIMIT.exp();
        let (c0, c1) = steed_scaled(0.0, SERIES_LIMIT);
        assert!(rel(s0 * e, c0) < 1e-13, "{} vs {}", s0 * e, c0);
        assert!(rel(s1 * e, c1) < 1e-13);
    }

    #[test]
    fn continued_fraction_reproduces_half_order() {
        for &x in &[2.0, 3.7, 10.0, 55.0] {
            let (k12, k32) = steed_scaled(0.5, x);
            let exact = (PI / (2.0 * x)).sqrt();
            assert!(rel(k12, exact) < 1e-14);
            assert!(rel(k32, exact * (1.0 + 1.0 / x)) < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(bessel_k(0.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_k(0.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_k(0.3, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(bessel_k(-1.0, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn large_order_small_argument_stays_finite_in_log_space() {
        let l = ln_bessel_k(40.0, 1e-3).unwrap();
        assert!(l.is_finite() && l > 300.0);
    }

    /// `K_ν(x) = ∫₀^∞ e^{-x cosh t} cosh(νt) dt`, composite Simpson.
    fn integral_oracle(nu: f64, x: f64) -> f64 {
        let ln_f = |t: f64| {
            let y = nu * t;
            -x * t.cosh() + y + (0.5 * (1.0 + (-2.0 * y).exp())).ln()
        };
        // Integrate out to where the integrand has decayed by e^-50 past its peak.
        let mut upper = 0.0;
        let mut peak = ln_f(0.0);
        while ln_f(upper) > peak - 50.0 {
            upper += 0.01;
            peak = peak.max(ln_f(upper));
        }
        let steps = 200_000;
        let h = upper / steps as f64;
        let f = |t: f64| (ln_f(t) - peak).exp();
        let mut acc = f(0.0) + f(upper);
        for i in 1..steps {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0 * peak.exp()
    }

    #[test]
    fn reference_values() {
        for (nu, x, want) in [
            (0.0, 1.0, 0.421_024_438_240_708_34),
            (1.0, 1.0, 0.601_907_230_197_234_6),
            (0.0, 5.0, 0.003_691_098_334_042_594_2),
            (9.0, 3.0, 397.958_800_326_601_93),
        ] {
            let k = bessel_k(nu, x).unwrap();
            assert!(rel(k, want) < 1e-12, "K_{nu}({x}) = {k}, want {want}");
        }
    }

    #[test]
    fn agrees_with_integral_representation() {
        for &nu in &[0.0, 0.5, 1.0, 1.5, 2.0, 4.5, 9.0] {
            for &x in &[0.05, 0.5, 1.9, 2.0, 2.1, 7.0, 30.0] {
                let k = bessel_k(nu, x).unwrap();
                let o = integral_oracle(nu, x);
                assert!(rel(k, o) < 1e-10, "nu={nu} x={x}: {k} vs {o}");
            }
        }
    }

    #[test]
    fn satisfies_three_term_recurrence() {
        for twice in 1..30 {
            let nu = twice as f64 / 2.0;
            for &x in &[0.1, 0.7, 2.0, 2.5, 9.0, 40.0] {
                let lhs = bessel_k(nu + 1.0, x).unwrap();
                let rhs = bessel_k(nu - 1.0, x).unwrap() + 2.0 * nu / x * bessel_k(nu, x).unwrap();
                assert!(rel(lhs, rhs) < 1e-9, "nu={nu} x={x}");
            }
        }
    }
}
