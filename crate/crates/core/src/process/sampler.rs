use std::sync::Arc;

use super::{check_interval, ProcessTrace};
use crate::distributions::{exponential, fill_laplace_nd, fill_unit_direction, BesselSampler};
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// A jump as seen during sampling: the level and the values on either side.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpRecord {
    pub level: f64,
    /// Value just above `level`.
    pub pre: Vec<f64>,
    /// Value at and below `level`.
    pub post: Vec<f64>,
}

impl JumpRecord {
    pub fn magnitude(&self) -> f64 {
        self.pre
            .iter()
            .zip(&self.post)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }
}

/// Exact sampler for traces of dimension `n`.
///
/// Starting from a Laplace anchor at `eps_hi`, it walks down in level: gaps
/// in `ln ε` are Exponential(`n+1`), and each jump at level `ε'` adds a
/// radial-law displacement with scale `1/ε'` in a uniform direction.
#[derive(Debug, Clone)]
pub struct TraceSampler {
    n: usize,
    radius: Arc<BesselSampler>,
    jump_bias: f64,
}

impl TraceSampler {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("dimension n must be >= 1"));
        }
        let n32 = u32::try_from(n).map_err(|_| Error::param("dimension too large"))?;
        Ok(Self {
            n,
            radius: BesselSampler::for_dimension(n32)?,
            jump_bias: 0.0,
        })
    }

    /// Adds `bias` to every jump radius. Exists only as a negative control
    /// for the verification suite.
    pub fn with_jump_bias(mut self, bias: f64) -> Self {
        self.jump_bias = bias;
        self
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn sample(&self, eps_lo: f64, eps_hi: f64, stream: &mut RandomStream) -> Result<ProcessTrace> {
        check_interval(eps_lo, eps_hi)?;
        Ok(self.run(eps_lo, eps_hi, stream, None))
    }

    /// Like [`sample`](Self::sample), also returning every jump.
    pub fn sample_recorded(
        &self,
        eps_lo: f64,
        eps_hi: f64,
        stream: &mut RandomStream,
    ) -> Result<(ProcessTrace, Vec<JumpRecord>)> {
        check_interval(eps_lo, eps_hi)?;
        let mut jumps = Vec::new();
        let trace = self.run(eps_lo, eps_hi, stream, Some(&mut jumps));
        Ok((trace, jumps))
    }

    fn run(
        &self,
        eps_lo: f64,
        eps_hi: f64,
        stream: &mut RandomStream,
        mut record: Option<&mut Vec<JumpRecord>>,
    ) -> ProcessTrace {
        let n = self.n;
        let rate = (n + 1) as f64;
        let mut levels = vec![eps_hi];
        let mut values = vec![0.0; n];
        fill_laplace_nd(&mut values, eps_hi, stream);
        let mut dir = vec![0.0; n];
        let mut level = eps_hi;
        loop {
            let next = level * (-exponential(rate, stream)).exp();
            if next < eps_lo {
                break;
            }
            let r = self.radius.sample_scaled(1.0 / next, stream) + self.jump_bias;
            fill_unit_direction(&mut dir, stream);
            let start = values.len() - n;
            let pre = values[start..].to_vec();
            let post: Vec<f64> = pre.iter().zip(&dir).map(|(v, d)| v + r * d).collect();
            if let Some(jumps) = record.as_deref_mut() {
                jumps.push(JumpRecord {
                    level: next,
                    pre,
                    post: post.clone(),
                });
            }
            if next < level {
                levels.push(next);
                values.extend(post);
            } else {
                // Gap below float resolution: both jumps land on one level.
                values[start..].copy_from_slice(&post);
            }
            level = next;
        }
        ProcessTrace::from_parts_unchecked(n, eps_lo, eps_hi, levels, values)
    }
}

/// One trace of dimension `n` on `[eps_lo, eps_hi]`.
pub fn sample_trace(n: usize, eps_lo: f64, eps_hi: f64, stream: &mut RandomStream) -> Result<ProcessTrace> {
    TraceSampler::new(n)?.sample(eps_lo, eps_hi, stream)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_interval_has_only_the_anchor() {
        let mut s = RandomStream::new(1);
        for _ in 0..100 {
            let t = sample_trace(2, 2.0, 2.0, &mut s).unwrap();
            assert_eq!(t.segment_count(), 1);
            assert_eq!(t.levels(), &[2.0]);
        }
    }

    #[test]
    fn rejects_bad_intervals() {
        let mut s = RandomStream::new(1);
        assert!(matches!(sample_trace(1, 2.0, 1.0, &mut s), Err(Error::Parameter(_))));
        assert!(sample_trace(1, 0.0, 1.0, &mut s).is_err());
        assert!(sample_trace(1, -1.0, 1.0, &mut s).is_err());
        assert!(sample_trace(0, 1.0, 2.0, &mut s).is_err());
    }

    #[test]
    fn traces_are_well_formed() {
        let mut s = RandomStream::new(2);
        let sampler = TraceSampler::new(3).unwrap();
        for _ in 0..500 {
            let (t, jumps) = sampler.sample_recorded(0.5, 15.0, &mut s).unwrap();
            assert_eq!(jumps.len(), t.total_jumps());
            assert_eq!(t.levels()[0], 15.0);
            assert!(t.levels().windows(2).all(|w| w[1] < w[0]));
            assert!(t.levels().iter().all(|&l| l >= 0.5));
            for (i, j) in jumps.iter().enumerate() {
                assert_eq!(j.level, t.levels()[i + 1]);
                assert_eq!(&j.pre[..], t.segment(i).value);
                assert_eq!(&j.post[..], t.segment(i + 1).value);
            }
        }
    }

    #[test]
    fn same_seed_same_trace() {
        let a = sample_trace(2, 0.5, 15.0, &mut RandomStream::new(7)).unwrap();
        let b = sample_trace(2, 0.5, 15.0, &mut RandomStream::new(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mean_jumps_per_doubling() {
        let sampler = TraceSampler::new(1).unwrap();
        let mut s = RandomStream::new(3);
        let trials = 100_000;
        let total: usize = (0..trials)
            .map(|_| sampler.sample(1.0, 2.0, &mut s).unwrap().total_jumps())
            .sum();
        let mean = total as f64 / trials as f64;
        let want = 2.0 * 2f64.ln();
        assert!((mean / want - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn zero_jump_probabilities() {
        let sampler = TraceSampler::new(1).unwrap();
        let mut s = RandomStream::new(4);
        let trials = 100_000;
        for (hi, want) in [(std::f64::consts::E, (-2f64).exp()), (1.2, (1.0f64 / 1.2).powi(2))] {
            let zeros = (0..trials)
                .filter(|_| sampler.sample(1.0, hi, &mut s).unwrap().total_jumps() == 0)
                .count();
            let p = zeros as f64 / trials as f64;
            assert!((p - want).abs() < 0.005, "hi={hi} p={p} want={want}");
        }
    }
}
