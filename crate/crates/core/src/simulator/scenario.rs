//! Scenario files: flat TOML documents naming the network, the owner, the
//! private value, the distance metric and the schedule.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::{generate_geometric_network, GeometricNetwork, Metric, Network, PrivacySchedule};
use crate::mechanism::PrivateDatum;
use crate::rng::RandomStream;

/// Radius that gives ≈1256 expected edges on 150 uniform points.
pub const PRESET_RADIUS: f64 = 0.2075;
pub const PRESET_NODES: usize = 150;

/// Where the network comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSource {
    /// Random geometric network in the unit square, drawn from the scenario seed.
    Generated { nodes: usize, radius: f64 },
    /// Edge-list file.
    EdgeList(PathBuf),
    /// A network built in code.
    Inline(Network),
}

impl NetworkSource {
    /// Generated networks draw from their own substream of `seed`, so trace
    /// draws from the same seed do not depend on the network.
    pub fn generate(nodes: usize, radius: f64, seed: u64) -> Result<GeometricNetwork> {
        generate_geometric_network(nodes, radius, &mut RandomStream::new(seed).split(u64::MAX))
    }

    pub fn build(&self, seed: u64) -> Result<Network> {
        match self {
            NetworkSource::Generated { nodes, radius } => Ok(Self::generate(*nodes, *radius, seed)?.network),
            NetworkSource::EdgeList(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::param(format!("cannot read edge list {}: {e}", path.display())))?;
                Network::parse_edge_list(&text)
            }
            NetworkSource::Inline(g) => Ok(g.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub network: NetworkSource,
    /// Append an ego node adjacent to every node and make it the owner.
    pub ego: bool,
    pub owner: usize,
    pub value: Vec<f64>,
    pub metric: Metric,
    pub schedule: PrivacySchedule,
    pub seed: u64,
    pub trials: usize,
    /// Coalition members for coalition experiments.
    pub coalition: Vec<usize>,
    /// Weight-grid resolution: weights are multiples of `1/weight_steps`.
    pub weight_steps: usize,
}

/// A scenario with its network materialized.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub network: Network,
    pub datum: PrivateDatum,
    pub metric: Metric,
    pub schedule: PrivacySchedule,
    pub seed: u64,
    pub trials: usize,
    pub coalition: Vec<usize>,
    pub weight_steps: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    network: String,
    nodes: Option<usize>,
    radius: Option<f64>,
    edge_list: Option<PathBuf>,
    #[serde(default)]
    ego: bool,
    #[serde(default)]
    owner: usize,
    u: Vec<f64>,
    #[serde(default = "default_metric")]
    metric: String,
    #[serde(default = "default_schedule")]
    schedule: String,
    schedule_a: Option<f64>,
    schedule_b: Option<f64>,
    eps_floor: Option<f64>,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default)]
    coalition: Vec<usize>,
    #[serde(default = "default_weight_steps")]
    weight_steps: usize,
}

fn default_metric() -> String {
    "hops".into()
}

fn default_schedule() -> String {
    "synthetic".into()
}

fn default_trials() -> usize {
    10_000
}

fn default_weight_steps() -> usize {
    10
}

impl ScenarioConfig {
    /// The 150-node geometric network with the fitted hop schedule, `n = 2`.
    pub fn preset_n150(seed: u64) -> Self {
        Self {
            network: NetworkSource::Generated {
                nodes: PRESET_NODES,
                radius: PRESET_RADIUS,
            },
            ego: false,
            owner: 0,
            value: vec![0.0, 0.0],
            metric: Metric::Hops,
            schedule: PrivacySchedule::synthetic(),
            seed,
            trials: 10_000,
            coalition: Vec::new(),
            weight_steps: 10,
        }
    }

    pub fn inline(network: Network, owner: usize, value: Vec<f64>, schedule: PrivacySchedule, seed: u64) -> Self {
        Self {
            network: NetworkSource::Inline(network),
            ego: false,
            owner,
            value,
            metric: Metric::Hops,
            schedule,
            seed,
            trials: 10_000,
            coalition: Vec::new(),
            weight_steps: 10,
        }
    }

    /// Parses a scenario document; relative edge-list paths resolve against `base`.
    pub fn from_toml(text: &str, base: Option<&Path>) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let location = e
                .span()
                .map(|s| {
                    let line = text[..s.start.min(text.len())].matches('\n').count() + 1;
                    format!("line {line}")
                })
                .unwrap_or_else(|| "scenario".into());
            Error::parse(location, e.message().to_string())
        })?;
        let network = match raw.network.as_str() {
            "generated" => NetworkSource::Generated {
                nodes: raw.nodes.unwrap_or(PRESET_NODES),
                radius: raw.radius.unwrap_or(PRESET_RADIUS),
            },
            "edge-list" => {
                let path = raw
                    .edge_list
                    .ok_or_else(|| Error::param("network = \"edge-list\" requires an edge_list path"))?;
                NetworkSource::EdgeList(match base {
                    Some(b) if path.is_relative() => b.join(path),
                    _ => path,
                })
            }
            other => {
                return Err(Error::param(format!(
                    "unknown network source {other:?} (expected generated|edge-list)"
                )))
            }
        };
        let mut schedule = match (raw.schedule.as_str(), raw.schedule_a, raw.schedule_b) {
            ("synthetic", None, None) => PrivacySchedule::synthetic(),
            ("ego", None, None) => PrivacySchedule::ego_network(),
            ("exponential", Some(a), Some(b)) => PrivacySchedule::exponential(a, b)?,
            ("exponential", _, _) => {
                return Err(Error::param("schedule = \"exponential\" requires schedule_a and schedule_b"))
            }
            (name @ ("synthetic" | "ego"), _, _) => {
                return Err(Error::param(format!(
                    "schedule_a/schedule_b only apply to schedule = \"exponential\", not {name:?}"
                )))
            }
            (other, _, _) => {
                return Err(Error::param(format!(
                    "unknown schedule {other:?} (expected synthetic|ego|exponential)"
                )))
            }
        };
        if let Some(floor) = raw.eps_floor {
            schedule = schedule.with_floor(floor)?;
        }
        let config = Self {
            network,
            ego: raw.ego,
            owner: raw.owner,
            value: raw.u,
            metric: raw.metric.parse()?,
            schedule,
            seed: raw.seed,
            trials: raw.trials,
            coalition: raw.coalition,
            weight_steps: raw.weight_steps,
        };
        if config.trials == 0 {
            return Err(Error::param("trials must be >= 1"));
        }
        if config.weight_steps == 0 {
            return Err(Error::param("weight_steps must be >= 1"));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::param(format!("cannot read scenario {}: {e}", path.display())))?;
        Self::from_toml(&text, path.parent())
    }

    /// Builds the network and validates the owner and trial count.
    pub fn materialize(&self) -> Result<Scenario> {
        if self.trials == 0 {
            return Err(Error::param("trials must be >= 1"));
        }
        let base = self.network.build(self.seed)?;
        let (network, owner) = if self.ego {
            base.with_ego()
        } else {
            (base, self.owner)
        };
        if owner >= network.node_count() {
            return Err(Error::param(format!(
                "owner {owner} outside network of {} nodes",
                network.node_count()
            )));
        }
        for &j in &self.coalition {
            if j >= network.node_count() {
                return Err(Error::param(format!("coalition member {j} outside network")));
            }
        }
        Ok(Scenario {
            network,
            datum: PrivateDatum::new(owner, self.value.clone())?,
            metric: self.metric,
            schedule: self.schedule,
            seed: self.seed,
            trials: self.trials,
            coalition: self.coalition.clone(),
            weight_steps: self.weight_steps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_document() {
        let text = r#"
network = "generated"
nodes = 40
radius = 0.3
owner = 2
u = [1.0, -1.0]
metric = "resistance"
schedule = "exponential"
schedule_a = -1.0
schedule_b = 2.0
seed = 9
trials = 500
coalition = [3, 4]
"#;
        let c = ScenarioConfig::from_toml(text, None).unwrap();
        assert_eq!(c.network, NetworkSource::Generated { nodes: 40, radius: 0.3 });
        assert_eq!(c.metric, Metric::Resistance);
        assert_eq!(c.schedule.a(), -1.0);
        assert_eq!(c.coalition, vec![3, 4]);
        let s = c.materialize().unwrap();
        assert_eq!(s.network.node_count(), 40);
        assert_eq!(s.datum.owner(), 2);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            ScenarioConfig::from_toml("network = \"generated\"\nu = [0.0]\nbogus = 1\n", None),
            Err(Error::Parse { .. })
        ));
        assert!(ScenarioConfig::from_toml("network = \"moon\"\nu = [0.0]\n", None).is_err());
        assert!(ScenarioConfig::from_toml("network = \"generated\"\nu = [0.0]\ntrials = 0\n", None).is_err());
        assert!(ScenarioConfig::from_toml("network = \"edge-list\"\nu = [0.0]\n", None).is_err());
        assert!(ScenarioConfig::from_toml("network = \"generated\"\nu = [0.0]\nschedule = \"exponential\"\n", None).is_err());
        let c = ScenarioConfig::from_toml("network = \"generated\"\nnodes = 5\nu = [0.0]\nowner = 9\n", None).unwrap();
        assert!(c.materialize().is_err());
    }

    #[test]
    fn edge_list_resolves_relative_to_base() {
        let dir = std::env::temp_dir().join(format!("privdiffuse-scenario-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("g.txt"), "0 1\n1 2\n").unwrap();
        let c = ScenarioConfig::from_toml("network = \"edge-list\"\nedge_list = \"g.txt\"\nu = [0.0]\nego = true\n", Some(&dir))
            .unwrap();
        let s = c.materialize().unwrap();
        assert_eq!(s.network.node_count(), 4);
        assert_eq!(s.datum.owner(), 3);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn preset_is_deterministic() {
        let a = ScenarioConfig::preset_n150(5).materialize().unwrap();
        let b = ScenarioConfig::preset_n150(5).materialize().unwrap();
        assert_eq!(a.network, b.network);
        assert_eq!(a.network.node_count(), 150);
    }
}
