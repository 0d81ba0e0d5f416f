//! Coalition experiments: can members pool their responses to beat the
//! best-placed member? Run against the coupled mechanism and against the
//! independent-noise baseline.

use serde::Serialize;

use super::Scenario;
use crate::distributions::fill_laplace_nd;
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::trials::fold_trials;

/// Largest weight grid an experiment will enumerate.
const MAX_GRID: usize = 100_000;
/// Relative slack allowed before a coalition is said to gain.
pub const COALITION_SLACK: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    /// Every response read from one shared trace.
    Coupled,
    /// Fresh Laplace noise per recipient.
    Independent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoalitionReport {
    pub mechanism: NoiseModel,
    pub group: Vec<usize>,
    pub distances: Vec<f64>,
    pub levels: Vec<f64>,
    pub trials: usize,
    pub member_mse: Vec<f64>,
    /// Member chosen by the closest-member rule.
    pub closest_member: usize,
    /// Smallest single-member MSE.
    pub best_single_mse: f64,
    pub equal_weight_mse: f64,
    pub weights: Vec<Vec<f64>>,
    pub weight_mse: Vec<f64>,
    pub min_weight_mse: f64,
    pub best_weights: Vec<f64>,
    /// `best_single_mse / min_weight_mse`.
    pub gain: f64,
    pub slack: f64,
    /// `min_weight_mse ≥ (1 − slack) · best_single_mse`.
    pub no_gain: bool,
    pub verdict: String,
}

impl CoalitionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// All weight vectors on the simplex whose entries are multiples of `1/steps`.
pub fn weight_grid(members: usize, steps: usize) -> Result<Vec<Vec<f64>>> {
    if members == 0 || steps == 0 {
        return Err(Error::param("weight grid needs members >= 1 and steps >= 1"));
    }
    // C(steps + members - 1, members - 1), checked before enumerating.
    let mut size: f64 = 1.0;
    for i in 1..members {
        size *= (steps + i) as f64 / i as f64;
    }
    if size > MAX_GRID as f64 {
        return Err(Error::param(format!(
            "weight grid for {members} members at {steps} steps has {size:.0} points (limit {MAX_GRID})"
        )));
    }
    let mut out = Vec::new();
    let mut current = vec![0usize; members];
    compositions(&mut current, 0, steps, &mut out, steps);
    Ok(out)
}

fn compositions(current: &mut Vec<usize>, i: usize, left: usize, out: &mut Vec<Vec<f64>>, steps: usize) {
    if i + 1 == current.len() {
        current[i] = left;
        out.push(current.iter().map(|&k| k as f64 / steps as f64).collect());
        return;
    }
    for k in (0..=left).rev() {
        current[i] = k;
        compositions(current, i + 1, left - k, out, steps);
    }
}

/// Empirical MSE of every weighted average over `group`, against the best
/// single member, from `scenario.trials` independent releases.
pub fn run_coalition_experiment(scenario: &Scenario, group: &[usize], model: NoiseModel) -> Result<CoalitionReport> {
    if group.is_empty() {
        return Err(Error::param("coalition must have at least one member"));
    }
    let recipients = scenario.recipients()?;
    let mut distances = Vec::with_capacity(group.len());
    for (k, &j) in group.iter().enumerate() {
        if group[..k].contains(&j) {
            return Err(Error::param(format!("coalition member {j} listed twice")));
        }
        let d = recipients
            .iter()
            .find(|&&(r, _)| r == j)
            .map(|&(_, d)| d)
            .ok_or_else(|| Error::param(format!("coalition member {j} is the owner or unreachable")))?;
        distances.push(d);
    }
    let levels: Vec<f64> = distances.iter().map(|&d| scenario.schedule.level(d)).collect();
    let weights = weight_grid(group.len(), scenario.weight_steps)?;
    let members = group.len();
    let n = scenario.datum.dimension();
    let alpha = scenario.datum.alpha();
    let (lo, hi) = {
        let (lo, hi) = levels.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &e| (a.min(e), b.max(e)));
        (lo / super::DOMAIN_PADDING, hi * super::DOMAIN_PADDING)
    };
    let sampler = scenario.sampler()?;
    // Accumulator layout: member MSEs, equal-weight MSE, then one per grid point.
    let slots = members + 1 + weights.len();
    let sums = fold_trials(
        &RandomStream::new(scenario.seed),
        scenario.trials,
        vec![0.0; slots],
        |acc: &mut Vec<f64>, s| {
            let mut errors = vec![0.0; members * n];
            match model {
                NoiseModel::Coupled => {
                    let trace = sampler.sample(lo, hi, s).expect("domain is valid");
                    for (e, &eps) in errors.chunks_mut(n).zip(&levels) {
                        let v = trace.evaluate(eps).expect("level inside domain");
                        e.iter_mut().zip(v).for_each(|(e, x)| *e = alpha * x);
                    }
                }
                NoiseModel::Independent => {
                    for (e, &eps) in errors.chunks_mut(n).zip(&levels) {
                        fill_laplace_nd(e, eps, s);
                        e.iter_mut().for_each(|x| *x *= alpha);
                    }
                }
            }
            let mut mix = vec![0.0; n];
            let mut add = |slot: usize, w: &dyn Fn(usize) -> f64| {
                mix.iter_mut().for_each(|m| *m = 0.0);
                for (k, e) in errors.chunks(n).enumerate() {
                    let wk = w(k);
                    if wk != 0.0 {
                        mix.iter_mut().zip(e).for_each(|(m, x)| *m += wk * x);
                    }
                }
                acc[slot] += mix.iter().map(|x| x * x).sum::<f64>();
            };
            for j in 0..members {
                add(j, &|k| if k == j { 1.0 } else { 0.0 });
            }
            add(members, &|_| 1.0 / members as f64);
            for (i, w) in weights.iter().enumerate() {
                add(members + 1 + i, &|k| w[k]);
            }
        },
        |a, b| a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
    );
    let mse: Vec<f64> = sums.iter().map(|s| s / scenario.trials as f64).collect();
    let member_mse = mse[..members].to_vec();
    let weight_mse = mse[members + 1..].to_vec();
    let closest = (0..members)
        .min_by(|&a, &b| distances[a].total_cmp(&distances[b]).then(group[a].cmp(&group[b])))
        .expect("group is non-empty");
    let best_single_mse = member_mse.iter().copied().fold(f64::INFINITY, f64::min);
    let (argmin, &min_weight_mse) = weight_mse
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let gain = best_single_mse / min_weight_mse;
    let no_gain = min_weight_mse >= (1.0 - COALITION_SLACK) * best_single_mse;
    let verdict = if no_gain {
        "no gain".to_string()
    } else {
        format!("gain {gain:.2}x")
    };
    Ok(CoalitionReport {
        mechanism: model,
        group: group.to_vec(),
        distances,
        levels,
        trials: scenario.trials,
        member_mse,
        closest_member: group[closest],
        best_single_mse,
        equal_weight_mse: mse[members],
        best_weights: weights[argmin].clone(),
        weights,
        weight_mse,
        min_weight_mse,
        gain,
        slack: COALITION_SLACK,
        no_gain,
        verdict,
    })
}
