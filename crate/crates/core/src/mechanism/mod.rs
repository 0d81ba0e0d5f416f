//! The composite mechanism: every recipient's response is read off one
//! shared trace at the recipient's own privacy level, so pooling responses
//! never beats the best-placed member of a coalition.

mod two_level;

use std::collections::HashSet;
use std::fmt::Write as _;

pub use two_level::TwoLevelJoint;

use crate::error::{Error, Result};
use crate::graph::PrivacySchedule;
use crate::process::ProcessTrace;

/// A user's private vector `u` together with the adjacency bound `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivateDatum {
    owner: usize,
    value: Vec<f64>,
    alpha: f64,
}

impl PrivateDatum {
    pub fn new(owner: usize, value: Vec<f64>) -> Result<Self> {
        if value.is_empty() {
            return Err(Error::param("private value must have at least one component"));
        }
        if value.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("private value has a non-finite component"));
        }
        Ok(Self {
            owner,
            value,
            alpha: 1.0,
        })
    }

    /// Sets the adjacency bound; noise is scaled by `α`.
    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::param(format!("alpha must be finite and > 0, got {alpha}")));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn value(&self) -> &[f64] {
        &self.value
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dimension(&self) -> usize {
        self.value.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub recipient: usize,
    pub y: Vec<f64>,
    pub level: f64,
    pub distance: f64,
}

/// Responses released by one owner, at most one per recipient.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseSet {
    owner: usize,
    responses: Vec<Response>,
}

impl ResponseSet {
    pub fn new(owner: usize, responses: Vec<Response>) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &responses {
            if !seen.insert(r.recipient) {
                return Err(Error::param(format!("duplicate response for recipient {}", r.recipient)));
            }
        }
        Ok(Self { owner, responses })
    }

    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn responses(&self) -> &[Response] {
        &self.responses
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }

    pub fn get(&self, recipient: usize) -> Option<&Response> {
        self.responses.iter().find(|r| r.recipient == recipient)
    }

    /// The responses of `group`, in group order. Every member must be present.
    pub fn restrict(&self, group: &[usize]) -> Result<Vec<Response>> {
        group
            .iter()
            .map(|&j| {
                self.get(j)
                    .cloned()
                    .ok_or_else(|| Error::param(format!("recipient {j} has no response")))
            })
            .collect()
    }

    /// Applies the binary projection to every component.
    pub fn project_binary(&self) -> Result<ResponseSet> {
        let responses = self
            .responses
            .iter()
            .map(|r| {
                Ok(Response {
                    y: r.y.iter().map(|&v| project_binary(v).map(f64::from)).collect::<Result<_>>()?,
                    ..r.clone()
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            owner: self.owner,
            responses,
        })
    }

    /// `recipient,distance,epsilon,y_0,...,y_{n-1}`.
    pub fn to_csv(&self) -> String {
        let n = self.responses.first().map_or(0, |r| r.y.len());
        let mut out = String::from("recipient,distance,epsilon");
        for k in 0..n {
            let _ = write!(out, ",y_{k}");
        }
        out.push('\n');
        for r in &self.responses {
            let _ = write!(out, "{},{},{}", r.recipient, r.distance, r.level);
            for v in &r.y {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// `y_j = u + α V_{ε(d_j)}` for every `(recipient, distance)` pair, all read
/// from the same trace.
pub fn diffuse(
    datum: &PrivateDatum,
    trace: &ProcessTrace,
    schedule: &PrivacySchedule,
    recipients: &[(usize, f64)],
) -> Result<ResponseSet> {
    if trace.dimension() != datum.dimension() {
        return Err(Error::param(format!(
            "trace dimension {} does not match datum dimension {}",
            trace.dimension(),
            datum.dimension()
        )));
    }
    let levels: Vec<f64> = recipients.iter().map(|&(_, d)| schedule.level(d)).collect();
    let outside: Vec<String> = recipients
        .iter()
        .zip(&levels)
        .filter(|(_, &eps)| !trace.contains(eps))
        .map(|(&(j, _), eps)| format!("{j} (eps {eps})"))
        .collect();
    if !outside.is_empty() {
        return Err(Error::domain(format!(
            "levels outside trace domain [{}, {}] for recipients: {}",
            trace.eps_lo(),
            trace.eps_hi(),
            outside.join(", ")
        )));
    }
    let responses = recipients
        .iter()
        .zip(levels)
        .map(|(&(recipient, distance), level)| {
            let v = trace.evaluate(level)?;
            Ok(Response {
                recipient,
                y: datum.value.iter().zip(v).map(|(u, x)| u + datum.alpha * x).collect(),
                level,
                distance,
            })
        })
        .collect::<Result<_>>()?;
    ResponseSet::new(datum.owner, responses)
}

/// Expected squared error `n(n+1)/ε²` of a response at level `ε` (`n ≥ 1`, `ε > 0`).
pub fn response_mse_theoretical(n: usize, eps: f64) -> f64 {
    (n * (n + 1)) as f64 / (eps * eps)
}

/// Nearest point of `{0, 1}`; exactly 0.5 maps to 1.
pub fn project_binary(y: f64) -> Result<u8> {
    if !y.is_finite() {
        return Err(Error::domain(format!("cannot project non-finite value {y}")));
    }
    Ok(u8::from(y >= 0.5))
}

/// The response of the closest member (smallest recipient id on ties).
pub fn coalition_best_estimate(group: &[Response]) -> Result<&Response> {
    group
        .iter()
        .min_by(|a, b| a.distance.total_cmp(&b.distance).then(a.recipient.cmp(&b.recipient)))
        .ok_or_else(|| Error::param("coalition must have at least one member"))
}

/// `Σ w_j y_j` with weights summing to 1.
pub fn coalition_average(group: &[Response], weights: &[f64]) -> Result<Vec<f64>> {
    if group.is_empty() {
        return Err(Error::param("coalition must have at least one member"));
    }
    if weights.len() != group.len() {
        return Err(Error::param(format!(
            "{} weights for {} responses",
            weights.len(),
            group.len()
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::param(format!("weights must sum to 1, got {total}")));
    }
    let n = group[0].y.len();
    if group.iter().any(|r| r.y.len() != n) {
        return Err(Error::param("responses have mismatched dimensions"));
    }
    let mut out = vec![0.0; n];
    for (r, w) in group.iter().zip(weights) {
        for (o, y) in out.iter_mut().zip(&r.y) {
            *o += w * y;
        }
    }
    Ok(out)
}
