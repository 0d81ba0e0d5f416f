//! Sampled traces of the private jump process `{V_ε}` on a bounded
//! interval of privacy levels.
//!
//! A trace is piecewise constant. Segment `i` starts at level `ε⁽ⁱ⁾` and holds
//! its value on `(ε⁽ⁱ⁺¹⁾, ε⁽ⁱ⁾]`; the last segment extends down to `ε_lo`.
//! The value is therefore continuous from above: querying exactly at a jump
//! level returns the post-jump (lower-level) value.

mod document;
mod sampler;

pub use document::TraceDocument;
pub use sampler::{sample_trace, JumpRecord, TraceSampler};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessTrace {
    n: usize,
    eps_lo: f64,
    eps_hi: f64,
    /// Segment start levels, strictly decreasing, `levels[0] == eps_hi`.
    levels: Vec<f64>,
    /// Row-major segment values, `levels.len() * n` entries.
    values: Vec<f64>,
}

/// Borrowed view of one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<'a> {
    pub level: f64,
    pub value: &'a [f64],
}

pub(crate) fn check_interval(eps_lo: f64, eps_hi: f64) -> Result<()> {
    if !(eps_lo > 0.0) || !eps_lo.is_finite() {
        return Err(Error::param(format!("eps_lo must be finite and > 0, got {eps_lo}")));
    }
    if !eps_hi.is_finite() || eps_lo > eps_hi {
        return Err(Error::param(format!(
            "level interval must satisfy 0 < eps_lo <= eps_hi, got [{eps_lo}, {eps_hi}]"
        )));
    }
    Ok(())
}

impl ProcessTrace {
    /// Builds a trace from `(level, value)` segments, checking every invariant.
    pub fn new(eps_lo: f64, eps_hi: f64, segments: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        check_interval(eps_lo, eps_hi)?;
        let n = segments
            .first()
            .map(|(_, v)| v.len())
            .ok_or_else(|| Error::Invariant("segments: trace needs at least one segment".into()))?;
        if n == 0 {
            return Err(Error::Invariant("segments[0].v: dimension must be >= 1".into()));
        }
        let mut levels = Vec::with_capacity(segments.len());
        let mut values = Vec::with_capacity(segments.len() * n);
        for (i, (level, value)) in segments.into_iter().enumerate() {
            if i == 0 && level != eps_hi {
                return Err(Error::Invariant(format!(
                    "segments[0].eps: first level must equal eps_hi ({eps_hi}), got {level}"
                )));
            }
            if let Some(&prev) = levels.last() {
                if !(level < prev) {
                    return Err(Error::Invariant(format!(
                        "segments[{i}].eps: levels must be strictly decreasing ({level} after {prev})"
                    )));
                }
            }
            if !(level >= eps_lo) {
                return Err(Error::Invariant(format!(
                    "segments[{i}].eps: level {level} below eps_lo {eps_lo}"
                )));
            }
            if value.len() != n {
                return Err(Error::Invariant(format!(
                    "segments[{i}].v: expected {n} components, got {}",
                    value.len()
                )));
            }
            if value.iter().any(|x| !x.is_finite()) {
                return Err(Error::Invariant(format!("segments[{i}].v: non-finite component")));
            }
            levels.push(level);
            values.extend(value);
        }
        Ok(Self {
            n,
            eps_lo,
            eps_hi,
            levels,
            values,
        })
    }

    /// Trace with no jumps.
    pub fn constant(eps_lo: f64, eps_hi: f64, value: Vec<f64>) -> Result<Self> {
        Self::new(eps_lo, eps_hi, vec![(eps_hi, value)])
    }

    pub(crate) fn from_parts_unchecked(n: usize, eps_lo: f64, eps_hi: f64, levels: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert_eq!(levels.len() * n, values.len());
        Self {
            n,
            eps_lo,
            eps_hi,
            levels,
            values,
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn eps_lo(&self) -> f64 {
        self.eps_lo
    }

    pub fn eps_hi(&self) -> f64 {
        self.eps_hi
    }

    pub fn contains(&self, eps: f64) -> bool {
        eps >= self.eps_lo && eps <= self.eps_hi
    }

    pub fn segment_count(&self) -> usize {
        self.levels.len()
    }

    /// Number of jumps in the whole trace.
    pub fn total_jumps(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn segment(&self, i: usize) -> Segment<'_> {
        Segment {
            level: self.levels[i],
            value: &self.values[i * self.n..(i + 1) * self.n],
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment<'_>> + '_ {
        (0..self.levels.len()).map(move |i| self.segment(i))
    }

    fn segment_index(&self, eps: f64) -> usize {
        // Number of levels >= eps; at least one because eps <= eps_hi.
        self.levels.partition_point(|&l| l >= eps) - 1
    }

    /// `V_ε`: the value of the segment whose interval contains `eps`.
    pub fn evaluate(&self, eps: f64) -> Result<&[f64]> {
        if !self.contains(eps) {
            return Err(Error::domain(format!(
                "level {eps} outside trace domain [{}, {}]",
                self.eps_lo, self.eps_hi
            )));
        }
        Ok(self.segment(self.segment_index(eps)).value)
    }

    /// Restricts the trace to `[eps_lo, cap]`.
    ///
    /// The segment containing `cap` is re-anchored at `cap`, so evaluation
    /// at every level `≤ cap` is unchanged.
    pub fn trim(&self, cap: f64) -> Result<ProcessTrace> {
        if !self.contains(cap) {
            return Err(Error::param(format!(
                "trim cap {cap} outside trace domain [{}, {}]",
                self.eps_lo, self.eps_hi
            )));
        }
        let i = self.segment_index(cap);
        let mut levels = Vec::with_capacity(self.levels.len() - i);
        levels.push(cap);
        levels.extend_from_slice(&self.levels[i + 1..]);
        Ok(Self {
            n: self.n,
            eps_lo: self.eps_lo,
            eps_hi: cap,
            levels,
            values: self.values[i * self.n..].to_vec(),
        })
    }

    /// Jumps with level in `(a, b]`.
    pub fn jump_count(&self, a: f64, b: f64) -> Result<usize> {
        if !(a <= b) || !self.contains(a) || !self.contains(b) {
            return Err(Error::param(format!(
                "interval [{a}, {b}] is not a sub-interval of [{}, {}]",
                self.eps_lo, self.eps_hi
            )));
        }
        Ok(self.levels[1..].iter().filter(|&&l| l > a && l <= b).count())
    }

    /// Same jump structure with every value translated by `offset`.
    pub fn shifted(&self, offset: &[f64]) -> Result<ProcessTrace> {
        if offset.len() != self.n {
            return Err(Error::param(format!(
                "offset has {} components, trace has dimension {}",
                offset.len(),
                self.n
            )));
        }
        let values = self
            .values
            .chunks(self.n)
            .flat_map(|v| offset.iter().zip(v).map(|(u, x)| u + x))
            .collect();
        Ok(Self {
            values,
            levels: self.levels.clone(),
            ..*self
        })
    }
}
