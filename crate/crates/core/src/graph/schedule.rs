use crate::error::{Error, Result};

/// Level assigned to unreachable nodes.
pub const DEFAULT_EPS_FLOOR: f64 = 1e-6;

/// Exponential privacy schedule `ε(d) = exp(a·d + b)` with `a < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacySchedule {
    a: f64,
    b: f64,
    floor: f64,
}

impl PrivacySchedule {
    pub fn exponential(a: f64, b: f64) -> Result<Self> {
        if !(a < 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::param(format!(
                "schedule needs finite a < 0 and finite b, got a={a}, b={b}"
            )));
        }
        Ok(Self {
            a,
            b,
            floor: DEFAULT_EPS_FLOOR,
        })
    }

    /// The exponential schedule through `(d_min, eps_max)` and `(d_max, eps_min)`.
    pub fn fit(d_min: f64, eps_max: f64, d_max: f64, eps_min: f64) -> Result<Self> {
        let all_positive = [d_min, eps_max, d_max, eps_min].iter().all(|v| *v > 0.0 && v.is_finite());
        if !all_positive || !(d_min < d_max) || !(eps_min < eps_max) {
            return Err(Error::param(format!(
                "fit needs 0 < d_min < d_max and 0 < eps_min < eps_max, got ({d_min}, {eps_max}, {d_max}, {eps_min})"
            )));
        }
        let a = (eps_min / eps_max).ln() / (d_max - d_min);
        let b = eps_max.ln() - a * d_min;
        Self::exponential(a, b)
    }

    /// Hop distances 1..9 mapped onto levels 15..0.5.
    pub fn synthetic() -> Self {
        Self::fit(1.0, 15.0, 9.0, 0.5).expect("preset is valid")
    }

    /// `exp(-3.3 d + 4)`, used with resistance distances on ego networks.
    pub fn ego_network() -> Self {
        Self::exponential(-3.3, 4.0).expect("preset is valid")
    }

    pub fn with_floor(mut self, floor: f64) -> Result<Self> {
        if !(floor > 0.0) || !floor.is_finite() {
            return Err(Error::param(format!("level floor must be finite and > 0, got {floor}")));
        }
        self.floor = floor;
        Ok(self)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn level(&self, d: f64) -> f64 {
        (self.a * d + self.b).exp()
    }

    /// Level for a possibly unreachable node (`None` maps to the floor).
    pub fn level_for(&self, d: Option<f64>) -> f64 {
        d.map_or(self.floor, |d| self.level(d).max(self.floor))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ego_preset_values() {
        let s = PrivacySchedule::ego_network();
        assert!((s.level(0.0) - 54.598_150_033_144_236).abs() < 1e-9);
        assert!((s.level(1.0) - 0.7f64.exp()).abs() < 1e-12);
        assert!((s.level(1.0) - 2.0138).abs() < 1e-4);
    }

    #[test]
    fn synthetic_fit() {
        let s = PrivacySchedule::synthetic();
        assert!((s.a() - (-0.425_149_67)).abs() < 1e-7, "a={}", s.a());
        assert!((s.b() - 3.133_199_87).abs() < 1e-7, "b={}", s.b());
        assert!((s.level(1.0) - 15.0).abs() < 1e-9);
        assert!((s.level(9.0) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn fit_rejects_degenerate_inputs() {
        assert!(PrivacySchedule::fit(2.0, 10.0, 2.0, 1.0).is_err());
        assert!(PrivacySchedule::fit(1.0, 1.0, 3.0, 1.0).is_err());
        assert!(PrivacySchedule::fit(1.0, 1.0, 3.0, 2.0).is_err());
        assert!(PrivacySchedule::fit(0.0, 2.0, 3.0, 1.0).is_err());
        assert!(PrivacySchedule::exponential(0.0, 1.0).is_err());
    }

    #[test]
    fn unreachable_maps_to_floor() {
        let s = PrivacySchedule::synthetic();
        assert_eq!(s.level_for(None), DEFAULT_EPS_FLOOR);
        let s = s.with_floor(1e-3).unwrap();
        assert_eq!(s.level_for(None), 1e-3);
        assert_eq!(s.level_for(Some(1.0)), s.level(1.0));
    }

    proptest! {
        #[test]
        fn fit_hits_both_endpoints(d0 in 0.01f64..5.0, span in 0.1f64..10.0, lo in 0.01f64..5.0, ratio in 1.01f64..100.0) {
            let s = PrivacySchedule::fit(d0, lo * ratio, d0 + span, lo).unwrap();
            prop_assert!((s.level(d0) / (lo * ratio) - 1.0).abs() < 1e-12);
            prop_assert!((s.level(d0 + span) / lo - 1.0).abs() < 1e-12);
        }

        #[test]
        fn strictly_decreasing(a in -10.0f64..-1e-3, b in -5.0f64..5.0, d in 0.0f64..10.0, step in 1e-3f64..5.0) {
            let s = PrivacySchedule::exponential(a, b).unwrap();
            prop_assert!(s.level(d) > s.level(d + step));
        }
    }
}
