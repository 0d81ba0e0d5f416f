//! End-to-end scenarios on networks: centralized diffusion, the
//! trim-and-forward gossip protocol, coalition experiments and the
//! independent-noise baseline.

mod coalition;
mod gossip;
mod scenario;

use std::fmt::Write as _;

pub use coalition::{run_coalition_experiment, weight_grid, CoalitionReport, NoiseModel};
pub use gossip::{run_gossip, GossipState, MessageRecord};
pub use scenario::{NetworkSource, Scenario, ScenarioConfig, PRESET_NODES, PRESET_RADIUS};

use crate::distributions::fill_laplace_nd;
use crate::error::{Error, Result};
use crate::mechanism::{diffuse, Response, ResponseSet};
use crate::process::{ProcessTrace, TraceSampler};
use crate::rng::RandomStream;
use crate::trials::fold_trials;

/// Relative padding applied to both ends of the trace domain.
pub const DOMAIN_PADDING: f64 = 1.01;

/// One node's realized error `‖y_j − u‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeError {
    pub node: usize,
    pub distance: f64,
    pub epsilon: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone)]
pub struct DiffusionOutcome {
    pub trace: ProcessTrace,
    pub responses: ResponseSet,
    pub errors: Vec<NodeError>,
}

impl DiffusionOutcome {
    /// `node,distance,epsilon,abs_error`.
    pub fn errors_csv(&self) -> String {
        let mut out = String::from("node,distance,epsilon,abs_error\n");
        for e in &self.errors {
            let _ = writeln!(out, "{},{},{},{}", e.node, e.distance, e.epsilon, e.abs_error);
        }
        out
    }
}

/// Mean squared error of one node's response over many traces.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMse {
    pub node: usize,
    pub distance: f64,
    pub epsilon: f64,
    pub mse: f64,
}

impl Scenario {
    pub fn owner(&self) -> usize {
        self.datum.owner()
    }

    /// Every node reachable from the owner, except the owner, with its distance.
    pub fn recipients(&self) -> Result<Vec<(usize, f64)>> {
        let owner = self.owner();
        let recipients: Vec<(usize, f64)> = self
            .network
            .distances(owner, self.metric)?
            .into_iter()
            .enumerate()
            .filter_map(|(j, d)| d.filter(|_| j != owner).map(|d| (j, d)))
            .collect();
        if recipients.is_empty() {
            return Err(Error::Disconnected(format!("owner {owner} has no reachable recipients")));
        }
        Ok(recipients)
    }

    /// `[min ε / 1.01, max ε · 1.01]` over the given recipients.
    pub fn trace_domain(&self, recipients: &[(usize, f64)]) -> (f64, f64) {
        let (lo, hi) = recipients
            .iter()
            .map(|&(_, d)| self.schedule.level(d))
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), e| (lo.min(e), hi.max(e)));
        (lo / DOMAIN_PADDING, hi * DOMAIN_PADDING)
    }

    fn sampler(&self) -> Result<TraceSampler> {
        TraceSampler::new(self.datum.dimension())
    }
}

/// Samples one trace from the scenario seed and diffuses it to every
/// reachable node.
pub fn run_diffusion(scenario: &Scenario) -> Result<DiffusionOutcome> {
    let recipients = scenario.recipients()?;
    let (lo, hi) = scenario.trace_domain(&recipients);
    let trace = scenario.sampler()?.sample(lo, hi, &mut RandomStream::new(scenario.seed))?;
    let responses = diffuse(&scenario.datum, &trace, &scenario.schedule, &recipients)?;
    let u = scenario.datum.value();
    let errors = responses
        .responses()
        .iter()
        .map(|r| NodeError {
            node: r.recipient,
            distance: r.distance,
            epsilon: r.level,
            abs_error: r.y.iter().zip(u).map(|(y, u)| (y - u) * (y - u)).sum::<f64>().sqrt(),
        })
        .collect();
    Ok(DiffusionOutcome {
        trace,
        responses,
        errors,
    })
}

/// Per-node mean squared error over `trials` independent traces.
pub fn diffusion_mse(scenario: &Scenario, trials: usize) -> Result<Vec<NodeMse>> {
    if trials == 0 {
        return Err(Error::param("trials must be >= 1"));
    }
    let recipients = scenario.recipients()?;
    let (lo, hi) = scenario.trace_domain(&recipients);
    let sampler = scenario.sampler()?;
    let levels: Vec<f64> = recipients.iter().map(|&(_, d)| scenario.schedule.level(d)).collect();
    let alpha2 = scenario.datum.alpha().powi(2);
    let sums = fold_trials(
        &RandomStream::new(scenario.seed),
        trials,
        vec![0.0; recipients.len()],
        |acc: &mut Vec<f64>, s| {
            let trace = sampler.sample(lo, hi, s).expect("domain is valid");
            for (a, &eps) in acc.iter_mut().zip(&levels) {
                let v = trace.evaluate(eps).expect("level inside domain");
                *a += alpha2 * v.iter().map(|x| x * x).sum::<f64>();
            }
        },
        |a, b| a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
    );
    Ok(recipients
        .iter()
        .zip(levels)
        .zip(sums)
        .map(|((&(node, distance), epsilon), s)| NodeMse {
            node,
            distance,
            epsilon,
            mse: s / trials as f64,
        })
        .collect())
}

/// The control arm: independent Laplace noise at each recipient's level.
pub fn run_independent_baseline(scenario: &Scenario) -> Result<ResponseSet> {
    let recipients = scenario.recipients()?;
    let mut stream = RandomStream::new(scenario.seed);
    let n = scenario.datum.dimension();
    let responses = recipients
        .iter()
        .map(|&(recipient, distance)| {
            let level = scenario.schedule.level(distance);
            let mut noise = vec![0.0; n];
            fill_laplace_nd(&mut noise, level, &mut stream);
            Response {
                recipient,
                y: scenario
                    .datum
                    .value()
                    .iter()
                    .zip(&noise)
                    .map(|(u, x)| u + scenario.datum.alpha() * x)
                    .collect(),
                level,
                distance,
            }
        })
        .collect();
    ResponseSet::new(scenario.owner(), responses)
}
