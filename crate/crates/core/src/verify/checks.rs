//! The individual checks. Each draws from its own substream of the verifier
//! seed, keyed by check name and parameters, so results do not depend on
//! which other checks ran.

use serde_json::json;

use super::report::{Comparison, Statistic, VerificationReport};
use super::stats::{
    chi_square_poisson, gamma_cdf_integer, ks_critical, ks_unsorted, linear_regression, mean_variance,
};
use crate::distributions::{sample_bessel, BesselParams};
use crate::error::{Error, Result};
use crate::graph::{generate_geometric_network, resistance_matrix_pinv, Network};
use crate::mechanism::TwoLevelJoint;
use crate::process::{check_interval, TraceSampler};
use crate::rng::RandomStream;
use crate::simulator::{run_coalition_experiment, run_diffusion, run_gossip, NoiseModel, Scenario, ScenarioConfig};
use crate::trials::{collect_trials, fold_trials};

/// Significance level for every goodness-of-fit test.
pub const ALPHA: f64 = 0.01;
/// Level interval used when a check needs a trace around a fixed level.
pub const MARGINAL_DOMAIN: (f64, f64) = (0.5, 15.0);
/// Largest chi-square bin before the pooled tail.
const CHI_MAX_BIN: usize = 15;

/// Runs checks from one seed, optionally with biased jump radii (a negative
/// control that should make the distributional checks fail).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verifier {
    seed: u64,
    jump_bias: f64,
}

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn check_trials(trials: usize, min: usize) -> Result<()> {
    if trials < min {
        Err(Error::param(format!("check needs at least {min} trials, got {trials}")))
    } else {
        Ok(())
    }
}

fn check_levels(eps1: f64, eps2: f64) -> Result<()> {
    if !(eps1 > 0.0) || !eps2.is_finite() || !(eps1 <= eps2) {
        return Err(Error::param(format!("need 0 < eps1 <= eps2, got ({eps1}, {eps2})")));
    }
    Ok(())
}

impl Verifier {
    pub fn new(seed: u64) -> Self {
        Self { seed, jump_bias: 0.0 }
    }

    pub fn with_jump_bias(mut self, bias: f64) -> Self {
        self.jump_bias = bias;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn jump_bias(&self) -> f64 {
        self.jump_bias
    }

    fn stream(&self, check: &str, params: &[f64]) -> RandomStream {
        let key = fnv1a(check.bytes().chain(params.iter().flat_map(|p| p.to_bits().to_le_bytes())));
        RandomStream::new(self.seed).split(key)
    }

    fn sampler(&self, n: usize) -> Result<TraceSampler> {
        Ok(TraceSampler::new(n)?.with_jump_bias(self.jump_bias))
    }

    /// Jump counts over `[ε₁, ε₂]` against Poisson((n+1) ln(ε₂/ε₁)).
    pub fn check_jump_poisson(&self, n: usize, eps1: f64, eps2: f64, trials: usize) -> Result<VerificationReport> {
        check_trials(trials, 10_000)?;
        check_levels(eps1, eps2)?;
        let params = [n as f64, eps1, eps2];
        let mut report = VerificationReport::new("jump_poisson", trials)
            .param("n", n)
            .param("eps1", eps1)
            .param("eps2", eps2);
        let sampler = self.sampler(n)?;
        let counts: Vec<usize> = collect_trials(&self.stream("jump_poisson", &params), trials, |s| {
            sampler.sample(eps1, eps2, s).expect("interval validated").total_jumps()
        });
        let target = (n + 1) as f64 * (eps2 / eps1).ln();
        let xs: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        let (mean, var) = mean_variance(&xs);
        report.push(Statistic::new("mean", mean, target, 0.01, Comparison::Relative));
        report.push(Statistic::new("variance", var, target, 0.03, Comparison::Relative));
        let chi = chi_square_poisson(&counts, target, CHI_MAX_BIN, ALPHA)?;
        report.push(Statistic::new("chi_square", chi.statistic, chi.critical, 0.0, Comparison::AtMost));
        report.note(format!("chi-square dof {} p-value {:.4}", chi.dof, chi.p_value));
        Ok(report.finish())
    }

    /// `‖V_ε‖` against the Gamma(n, 1/ε) radius law (plus the signed value
    /// against the scalar Laplace CDF when n = 1).
    pub fn check_marginal(&self, n: usize, eps: f64, trials: usize) -> Result<VerificationReport> {
        check_trials(trials, 10_000)?;
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::param(format!("level must be finite and > 0, got {eps}")));
        }
        let (lo, hi) = if eps >= MARGINAL_DOMAIN.0 && eps <= MARGINAL_DOMAIN.1 {
            MARGINAL_DOMAIN
        } else {
            (eps / 2.0, eps * 2.0)
        };
        let params = [n as f64, eps];
        let mut report = VerificationReport::new("marginal", trials)
            .param("n", n)
            .param("eps", eps)
            .param("domain", json!([lo, hi]));
        let sampler = self.sampler(n)?;
        check_interval(lo, hi)?;
        let values: Vec<Vec<f64>> = collect_trials(&self.stream("marginal", &params), trials, |s| {
            sampler.sample(lo, hi, s).expect("interval validated").evaluate(eps).expect("eps in domain").to_vec()
        });
        let radii: Vec<f64> = values.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
        let critical = ks_critical(ALPHA, trials)?;
        let mean_sq = radii.iter().map(|r| r * r).sum::<f64>() / trials as f64;
        let ks = ks_unsorted(radii, |r| gamma_cdf_integer(n as u32, 1.0 / eps, r))?;
        report.push(Statistic::new("ks_radius", ks, critical, 0.0, Comparison::AtMost));
        if n == 1 {
            let signed: Vec<f64> = values.iter().map(|v| v[0]).collect();
            let ks = ks_unsorted(signed, |x| {
                if x < 0.0 {
                    0.5 * (eps * x).exp()
                } else {
                    1.0 - 0.5 * (-eps * x).exp()
                }
            })?;
            report.push(Statistic::new("ks_signed_laplace", ks, critical, 0.0, Comparison::AtMost));
        }
        let target = (n * (n + 1)) as f64 / (eps * eps);
        report.push(Statistic::new("mean_squared_radius", mean_sq, target, 0.02, Comparison::Relative));
        Ok(report.finish())
    }

    /// `E‖V_ε‖² = n(n+1)/ε²` from a trace on `[ε/2, 2ε]`.
    pub fn check_variance_law(&self, n: usize, eps: f64, trials: usize) -> Result<VerificationReport> {
        check_trials(trials, 10_000)?;
        let params = [n as f64, eps];
        let mut report = VerificationReport::new("variance_law", trials)
            .param("n", n)
            .param("eps", eps);
        let sampler = self.sampler(n)?;
        let (lo, hi) = (eps / 2.0, eps * 2.0);
        check_interval(lo, hi)?;
        let sum = fold_trials(
            &self.stream("variance_law", &params),
            trials,
            0.0,
            |acc: &mut f64, s| {
                let t = sampler.sample(lo, hi, s).expect("interval validated");
                *acc += t.evaluate(eps).expect("eps in domain").iter().map(|x| x * x).sum::<f64>();
            },
            |a, b| *a += b,
        );
        let target = (n * (n + 1)) as f64 / (eps * eps);
        report.push(Statistic::new("mean_squared_norm", sum / trials as f64, target, 0.02, Comparison::Relative));
        Ok(report.finish())
    }

    /// Frequency of traces without a jump against `(ε₁/ε₂)^{n+1}`.
    pub fn check_no_jump(&self, n: usize, eps1: f64, eps2: f64, trials: usize) -> Result<VerificationReport> {
        check_trials(trials, 10_000)?;
        check_levels(eps1, eps2)?;
        let params = [n as f64, eps1, eps2];
        let mut report = VerificationReport::new("no_jump", trials)
            .param("n", n)
            .param("eps1", eps1)
            .param("eps2", eps2);
        let sampler = self.sampler(n)?;
        let zero = fold_trials(
            &self.stream("no_jump", &params),
            trials,
            0usize,
            |acc: &mut usize, s| {
                if sampler.sample(eps1, eps2, s).expect("interval validated").total_jumps() == 0 {
                    *acc += 1;
                }
            },
            |a, b| *a += b,
        );
        let target = (eps1 / eps2).powi(n as i32 + 1);
        report.push(Statistic::new(
            "zero_jump_frequency",
            zero as f64 / trials as f64,
            target,
            0.005,
            Comparison::Absolute,
        ));
        Ok(report.finish())
    }

    /// Correlations between every component of `V_{ε₁} − V_{ε₂}` and of `V_{ε₂}`.
    pub fn check_increment_independence(
        &self,
        n: usize,
        eps1: f64,
        eps2: f64,
        trials: usize,
    ) -> Result<VerificationReport> {
        check_trials(trials, 10_000)?;
        check_levels(eps1, eps2)?;
        let params = [n as f64, eps1, eps2];
        let mut report = VerificationReport::new("increment_independence", trials)
            .param("n", n)
            .param("eps1", eps1)
            .param("eps2", eps2);
        if eps1 == eps2 {
            report.note("degenerate interval: the increment is identically zero");
            for a in 0..n {
                for b in 0..n {
                    report.push(Statistic::new(format!("rho[{a}][{b}]"), 0.0, 0.0, 0.01, Comparison::Absolute));
                }
            }
            return Ok(report.finish());
        }
        let sampler = self.sampler(n)?;
        // Per pair: Σx, Σy, Σxy, Σx², Σy².
        let sums = fold_trials(
            &self.stream("increment_independence", &params),
            trials,
            vec![0.0; n * n * 5],
            |acc: &mut Vec<f64>, s| {
                let t = sampler.sample(eps1, eps2, s).expect("interval validated");
                let hi = t.evaluate(eps2).expect("in domain");
                let lo = t.evaluate(eps1).expect("in domain");
                for a in 0..n {
                    let x = lo[a] - hi[a];
                    for b in 0..n {
                        let y = hi[b];
                        let k = (a * n + b) * 5;
                        acc[k] += x;
                        acc[k + 1] += y;
                        acc[k + 2] += x * y;
                        acc[k + 3] += x * x;
                        acc[k + 4] += y * y;
                    }
                }
            },
            |a, b| a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
        );
        let m = trials as f64;
        for a in 0..n {
            for b in 0..n {
                let k = (a * n + b) * 5;
                let (sx, sy, sxy, sxx, syy) = (sums[k], sums[k + 1], sums[k + 2], sums[k + 3], sums[k + 4]);
                let cov = sxy / m - sx * sy / (m * m);
                let vx = sxx / m - (sx / m).powi(2);
                let vy = syy / m - (sy / m).powi(2);
                let rho = if vx > 0.0 && vy > 0.0 { cov / (vx * vy).sqrt() } else { 0.0 };
                report.push(Statistic::new(format!("rho[{a}][{b}]"), rho, 0.0, 0.01, Comparison::Absolute));
            }
        }
        Ok(report.finish())
    }

    /// Density-level privacy of the closed-form one-dimensional joint law.
    ///
    /// Shifting the input by `δ` must change the log density of the released
    /// pair by at most `ε₂|δ|` everywhere on a 400×400 grid over `[−10, 10]²`,
    /// for `|δ| ≤ 1` in steps of 0.1; the diagonal atom is compared with the
    /// shifted atom. The joint's first marginal is also checked by quadrature.
    pub fn check_privacy_ratio_1d(&self, eps1: f64, eps2: f64) -> Result<VerificationReport> {
        let joint = TwoLevelJoint::new(eps1, eps2)?;
        let mut report = VerificationReport::new("privacy_ratio_1d", 0)
            .param("eps1", eps1)
            .param("eps2", eps2);
        let grid: Vec<f64> = (0..400).map(|i| -10.0 + 20.0 * i as f64 / 399.0).collect();
        let shifts: Vec<f64> = (-10..=10).map(|k| k as f64 / 10.0).collect();
        let continuous = joint.atom_weight() < 1.0;
        let mut excess = f64::NEG_INFINITY;
        for &delta in &shifts {
            let bound = eps2 * delta.abs();
            for &y in &grid {
                let atom = joint.diagonal_density(y).ln() - joint.diagonal_density(y - delta).ln();
                excess = excess.max(atom - bound);
                if continuous {
                    for &x in &grid {
                        let r = joint.joint_density(x, y).ln() - joint.joint_density(x - delta, y - delta).ln();
                        excess = excess.max(r - bound);
                    }
                }
            }
        }
        report.push(Statistic::new("max_log_ratio_excess", excess, 0.0, 1e-6, Comparison::AtMost));

        let mut marginal_error: f64 = 0.0;
        for &x in &[-6.0, -2.5, -0.3, 0.0, 0.8, 4.0] {
            let mut total = joint.diagonal_density(x);
            if continuous {
                let mut knots = vec![-60.0, 0.0f64.min(x), 0.0f64.max(x), 60.0];
                knots.dedup();
                for w in knots.windows(2) {
                    let steps = ((w[1] - w[0]) / 2e-4).ceil() as usize;
                    let h = (w[1] - w[0]) / steps as f64;
                    total += (0..steps).map(|k| joint.joint_density(x, w[0] + (k as f64 + 0.5) * h) * h).sum::<f64>();
                }
            }
            marginal_error = marginal_error.max((total - joint.lower_marginal(x)).abs());
        }
        report.push(Statistic::new("lower_marginal_error", marginal_error, 0.0, 1e-6, Comparison::AtMost));
        Ok(report.finish())
    }

    /// Mean iteration count (segments sampled) regressed on `ln(ε₂/ε₁)`.
    pub fn check_complexity_scaling(&self, n: usize, ratios: &[f64], trials: usize) -> Result<VerificationReport> {
        if ratios.len() < 3 {
            return Err(Error::param("complexity regression needs at least three ratios"));
        }
        check_trials(trials, 1_000)?;
        let mut report = VerificationReport::new("complexity_scaling", trials)
            .param("n", n)
            .param("ratios", json!(ratios));
        let sampler = self.sampler(n)?;
        let mut x = Vec::new();
        let mut y = Vec::new();
        for &r in ratios {
            if !(r >= 1.0) || !r.is_finite() {
                return Err(Error::param(format!("ratio must be finite and >= 1, got {r}")));
            }
            let total = fold_trials(
                &self.stream("complexity_scaling", &[n as f64, r]),
                trials,
                0usize,
                |acc: &mut usize, s| *acc += sampler.sample(1.0, r, s).expect("interval validated").segment_count(),
                |a, b| *a += b,
            );
            x.push(r.ln());
            y.push(total as f64 / trials as f64);
        }
        let (slope, intercept) = linear_regression(&x, &y)?;
        report.push(Statistic::new("slope", slope, (n + 1) as f64, 0.05, Comparison::Relative));
        report.push(Statistic::new("intercept", intercept, 1.0, 0.5, Comparison::Absolute));
        Ok(report.finish())
    }

    /// One-dimensional jump sizes: `|post − pre|·ε'` is Exponential(1) for a
    /// jump at `ε'`, tested overall and in three level bands; and the radial
    /// sampler at `n = 1` is tested against the exponential law directly.
    pub fn check_jump_magnitude_n1(&self, traces: usize, samples: usize) -> Result<VerificationReport> {
        check_trials(traces, 1_000)?;
        check_trials(samples, 10_000)?;
        let (lo, hi) = MARGINAL_DOMAIN;
        let mut report = VerificationReport::new("jump_magnitude_n1", traces)
            .param("domain", json!([lo, hi]))
            .param("bessel_samples", samples);
        let sampler = self.sampler(1)?;
        let records: Vec<Vec<(f64, f64)>> = collect_trials(&self.stream("jump_magnitude_n1", &[]), traces, |s| {
            let (_, jumps) = sampler.sample_recorded(lo, hi, s).expect("interval validated");
            jumps.iter().map(|j| (j.level, j.magnitude() * j.level)).collect()
        });
        let all: Vec<(f64, f64)> = records.into_iter().flatten().collect();
        let exp_cdf = |x: f64| 1.0 - (-x).exp();
        let bands = [("all", lo, hi), ("low", lo, 2.0), ("mid", 2.0, 6.0), ("high", 6.0, hi)];
        for (name, a, b) in bands {
            let scaled: Vec<f64> = all.iter().filter(|(l, _)| *l >= a && *l <= b).map(|&(_, m)| m).collect();
            if scaled.is_empty() {
                return Err(Error::param(format!("no jumps harvested in band {name}")));
            }
            let critical = ks_critical(ALPHA, scaled.len())?;
            report.push(Statistic::new(format!("ks_scaled_{name}"), ks_unsorted(scaled, exp_cdf)?, critical, 0.0, Comparison::AtMost));
        }
        let beta = 0.7;
        let params = BesselParams::new(1, beta)?;
        let mut s = self.stream("bessel_n1", &[beta]);
        let draws = (0..samples).map(|_| sample_bessel(params, &mut s)).collect::<Result<Vec<f64>>>()?;
        let ks = ks_unsorted(draws.into_iter().map(|x| x + self.jump_bias).collect(), |x| 1.0 - (-x / beta).exp())?;
        report.push(Statistic::new("ks_bessel_n1", ks, ks_critical(ALPHA, samples)?, 0.0, Comparison::AtMost));
        report.note(format!("{} jumps harvested", all.len()));
        Ok(report.finish())
    }

    /// Resistance distances: closed-form small cases, then the grounded
    /// solver against the pseudo-inverse on random connected graphs.
    pub fn check_resistance(&self, graphs: usize) -> Result<VerificationReport> {
        let mut report = VerificationReport::new("resistance", graphs).param("graphs", graphs);
        let edge = Network::from_edges(2, [(0, 1)])?;
        let path = Network::from_edges(3, [(0, 1), (1, 2)])?;
        let tri = Network::from_edges(3, [(0, 1), (1, 2), (0, 2)])?;
        report.push(Statistic::new("single_edge", edge.resistance_distances(0)?[1], 1.0, 1e-9, Comparison::Absolute));
        report.push(Statistic::new("path_endpoints", path.resistance_distances(0)?[2], 2.0, 1e-9, Comparison::Absolute));
        report.push(Statistic::new("triangle", tri.resistance_distances(0)?[1], 2.0 / 3.0, 1e-9, Comparison::Absolute));
        let root = self.stream("resistance", &[]);
        let mut worst: f64 = 0.0;
        let mut found = 0;
        let mut k = 0u64;
        while found < graphs {
            let mut s = root.split(k);
            k += 1;
            let nodes = 5 + (s.open01() * 46.0) as usize;
            let g = generate_geometric_network(nodes.min(50), 0.45, &mut s)?.network;
            if !g.is_connected() {
                continue;
            }
            found += 1;
            let pinv = resistance_matrix_pinv(&g)?;
            for i in 0..g.node_count() {
                let r = g.resistance_distances(i)?;
                for (a, b) in r.iter().zip(&pinv[i]) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        report.push(Statistic::new("max_grounded_vs_pinv", worst, 0.0, 1e-9, Comparison::AtMost));
        Ok(report.finish())
    }

    /// Gossip outputs against centralized diffusion on a path, a star and
    /// the 150-node preset, plus the exact message count.
    pub fn check_gossip(&self) -> Result<VerificationReport> {
        let mut report = VerificationReport::new("gossip", 0);
        let schedule = crate::graph::PrivacySchedule::synthetic();
        let seed = self.seed;
        let cases: Vec<(&str, Scenario)> = vec![
            (
                "path",
                ScenarioConfig::inline(Network::from_edges(6, (1..6).map(|i| (i - 1, i)))?, 0, vec![0.4, -1.0], schedule, seed)
                    .materialize()?,
            ),
            (
                "star",
                ScenarioConfig::inline(Network::from_edges(8, (1..8).map(|i| (0, i)))?, 0, vec![0.4, -1.0], schedule, seed)
                    .materialize()?,
            ),
            ("preset_n150", ScenarioConfig::preset_n150(seed).materialize()?),
        ];
        for (name, scenario) in cases {
            let state = run_gossip(&scenario)?;
            let central = run_diffusion(&scenario)?;
            let outputs = state.outputs();
            let mismatched = outputs
                .iter()
                .filter(|(j, y)| central.responses.get(*j).map_or(true, |r| r.y != *y))
                .count()
                + central.responses.len().abs_diff(outputs.len());
            report.push(Statistic::new(format!("{name}_mismatched_nodes"), mismatched as f64, 0.0, 0.0, Comparison::AtMost));
            let d = scenario.network.shortest_path_distances(scenario.owner())?;
            let between_layers = scenario
                .network
                .edges()
                .filter(|&(a, b)| matches!((d[a], d[b]), (Some(x), Some(y)) if x.abs_diff(y) == 1))
                .count();
            report.push(Statistic::new(
                format!("{name}_messages"),
                state.messages().len() as f64,
                between_layers as f64,
                0.0,
                Comparison::Absolute,
            ));
        }
        Ok(report.finish())
    }

    /// Coalition experiment on the 150-node preset: a mixed-distance group
    /// and a 4-member equal-distance group against the coupled mechanism,
    /// and the equal-distance group against independent noise.
    pub fn check_coalition(&self, trials: usize) -> Result<VerificationReport> {
        check_trials(trials, 1_000)?;
        let mut config = ScenarioConfig::preset_n150(self.seed);
        config.trials = trials;
        let scenario = config.materialize()?;
        let (mixed, equal) = preset_groups(&scenario)?;
        let mut report = VerificationReport::new("coalition", trials)
            .param("mixed_group", json!(mixed))
            .param("equal_distance_group", json!(equal));
        let coupled_mixed = run_coalition_experiment(&scenario, &mixed, NoiseModel::Coupled)?;
        let coupled_equal = run_coalition_experiment(&scenario, &equal, NoiseModel::Coupled)?;
        let baseline = run_coalition_experiment(&scenario, &equal, NoiseModel::Independent)?;
        for (name, r) in [("coupled_mixed", &coupled_mixed), ("coupled_equal", &coupled_equal)] {
            report.push(Statistic::new(
                format!("{name}_min_over_best_single"),
                r.min_weight_mse / r.best_single_mse,
                1.0,
                r.slack,
                Comparison::AtLeast,
            ));
        }
        report.push(Statistic::new(
            "baseline_gain",
            baseline.best_single_mse / baseline.min_weight_mse,
            3.0,
            0.0,
            Comparison::AtLeast,
        ));
        report.note(format!(
            "coupled mixed: {}; coupled equal: {}; baseline: {}",
            coupled_mixed.verdict, coupled_equal.verdict, baseline.verdict
        ));
        Ok(report.finish())
    }
}

/// Coalitions on a scenario: one member at each of the first four hop
/// distances, and four members sharing one hop distance (smallest ids).
pub fn preset_groups(scenario: &Scenario) -> Result<(Vec<usize>, Vec<usize>)> {
    let d = scenario.network.shortest_path_distances(scenario.owner())?;
    let at = |h: u32| -> Vec<usize> { (0..d.len()).filter(|&j| d[j] == Some(h)).collect() };
    let mixed: Vec<usize> = (1..=4).filter_map(|h| at(h).first().copied()).collect();
    let equal = (1..=8)
        .map(|h| at(h))
        .find(|nodes| nodes.len() >= 4)
        .map(|nodes| nodes[..4].to_vec())
        .ok_or_else(|| Error::param("no hop distance with four members"))?;
    if mixed.len() < 2 {
        return Err(Error::param("scenario has fewer than two hop layers"));
    }
    Ok((mixed, equal))
}
