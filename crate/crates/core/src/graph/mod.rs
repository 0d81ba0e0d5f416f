//! Undirected simple networks, the two graph distances (hop count and
//! effective resistance), privacy schedules `ε(d)`, random geometric network
//! generation, and the edge-list text format.

mod edge_list;
mod resistance;
mod schedule;

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::str::FromStr;

pub use resistance::resistance_matrix_pinv;
pub use schedule::{PrivacySchedule, DEFAULT_EPS_FLOOR};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Undirected, unweighted graph without self-loops or parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

/// Which graph distance drives the privacy schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Hops,
    Resistance,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hops" => Ok(Metric::Hops),
            "resistance" => Ok(Metric::Resistance),
            other => Err(Error::param(format!("unknown metric {other:?} (expected hops|resistance)"))),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Metric::Hops => "hops",
            Metric::Resistance => "resistance",
        })
    }
}

impl Network {
    pub fn empty(node_count: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); node_count],
            edge_count: 0,
        }
    }

    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(node_count);
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Adds `{a, b}`; returns `false` if it was already present.
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<bool> {
        let n = self.node_count();
        if a >= n || b >= n {
            return Err(Error::param(format!("edge ({a}, {b}) references a node outside [0, {n})")));
        }
        if a == b {
            return Err(Error::param(format!("self-loop at node {a}")));
        }
        match self.adjacency[a].binary_search(&b) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adjacency[a].insert(pos, b);
                let pos = self.adjacency[b].binary_search(&a).unwrap_err();
                self.adjacency[b].insert(pos, a);
                self.edge_count += 1;
                Ok(true)
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.node_count() && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Each edge once, as `(lo, hi)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(Error::param(format!(
                "node {node} outside [0, {})",
                self.node_count()
            )))
        }
    }

    /// Breadth-first hop counts from `source`; `None` marks unreachable nodes.
    pub fn shortest_path_distances(&self, source: usize) -> Result<Vec<Option<u32>>> {
        self.check_node(source)?;
        let mut dist = vec![None; self.node_count()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0) + 1;
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() == 0
            || self
                .shortest_path_distances(0)
                .map(|d| d.iter().all(Option::is_some))
                .unwrap_or(false)
    }

    /// Effective resistance from `source` to every node, with a unit resistor
    /// on each edge.
    ///
    /// The Laplacian is grounded at `source` and factored once; the
    /// resistance to `j` is the potential at `j` when unit current is
    /// injected there.
    pub fn resistance_distances(&self, source: usize) -> Result<Vec<f64>> {
        self.check_node(source)?;
        resistance::grounded_resistances(self, source)
    }

    /// Distances from `source` under `metric`; `None` marks unreachable nodes.
    pub fn distances(&self, source: usize, metric: Metric) -> Result<Vec<Option<f64>>> {
        match metric {
            Metric::Hops => Ok(self
                .shortest_path_distances(source)?
                .into_iter()
                .map(|d| d.map(f64::from))
                .collect()),
            Metric::Resistance => Ok(self.resistance_distances(source)?.into_iter().map(Some).collect()),
        }
    }

    /// Copy of the network with one extra node adjacent to every existing
    /// node, for ego networks whose ego edges are left out of the file.
    /// Returns the new network and the ego's id.
    pub fn with_ego(&self) -> (Network, usize) {
        let ego = self.node_count();
        let mut g = self.clone();
        g.adjacency.push(Vec::new());
        for v in 0..ego {
            g.add_edge(ego, v).expect("ego edges are valid");
        }
        (g, ego)
    }

    /// Edge-list text: a `# nodes: N` header followed by one `a b` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# nodes: {}\n", self.node_count());
        for (a, b) in self.edges() {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        edge_list::parse(text)
    }
}

/// A network generated from points in the unit square, with the points kept
/// for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricNetwork {
    pub network: Network,
    pub positions: Vec<(f64, f64)>,
}

impl GeometricNetwork {
    /// `node,x,y` CSV.
    pub fn positions_csv(&self) -> String {
        let mut out = String::from("node,x,y\n");
        for (i, (x, y)) in self.positions.iter().enumerate() {
            let _ = writeln!(out, "{i},{x},{y}");
        }
        out
    }
}

/// `node_count` uniform points in the unit square, joined when their
/// Euclidean distance is at most `radius`.
pub fn generate_geometric_network(
    node_count: usize,
    radius: f64,
    stream: &mut RandomStream,
) -> Result<GeometricNetwork> {
    if node_count == 0 {
        return Err(Error::param("node count must be >= 1"));
    }
    if !(radius > 0.0) || radius > std::f64::consts::SQRT_2 {
        return Err(Error::param(format!("radius must lie in (0, sqrt 2], got {radius}")));
    }
    let positions: Vec<(f64, f64)> = (0..node_count).map(|_| (stream.open01(), stream.open01())).collect();
    let r2 = radius * radius;
    let mut network = Network::empty(node_count);
    for i in 0..node_count {
        for j in i + 1..node_count {
            let dx = positions[i].0 - positions[j].0;
            let dy = positions[i].1 - positions[j].1;
            if dx * dx + dy * dy <= r2 {
                network.add_edge(i, j)?;
            }
        }
    }
    Ok(GeometricNetwork { network, positions })
}

/// Probability that two uniform points in the unit square lie within `r`
/// of each other (`r ≤ 1`): `πr² − 8r³/3 + r⁴/2`.
pub fn unit_square_pair_probability(r: f64) -> f64 {
    std::f64::consts::PI * r * r - 8.0 / 3.0 * r.powi(3) + 0.5 * r.powi(4)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn path(n: usize) -> Network {
        Network::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub(crate) fn triangle() -> Network {
        Network::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn hop_distances() {
        assert_eq!(path(3).shortest_path_distances(0).unwrap(), vec![Some(0), Some(1), Some(2)]);
        assert_eq!(triangle().shortest_path_distances(0).unwrap(), vec![Some(0), Some(1), Some(1)]);
        let two = Network::empty(2);
        assert_eq!(two.shortest_path_distances(0).unwrap(), vec![Some(0), None]);
        assert!(matches!(two.shortest_path_distances(5), Err(Error::Parameter(_))));
    }

    #[test]
    fn edges_are_deduplicated_and_validated() {
        let mut g = Network::empty(3);
        assert!(g.add_edge(0, 1).unwrap());
        assert!(!g.add_edge(1, 0).unwrap());
        assert_eq!(g.edge_count(), 1);
        assert!(g.add_edge(2, 2).is_err());
        assert!(g.add_edge(0, 3).is_err());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn ego_is_adjacent_to_everyone() {
        let (g, ego) = path(4).with_ego();
        assert_eq!(ego, 4);
        assert_eq!(g.degree(ego), 4);
        assert_eq!(g.edge_count(), 3 + 4);
    }

    #[test]
    fn geometric_extremes() {
        let mut s = RandomStream::new(1);
        let g = generate_geometric_network(2, std::f64::consts::SQRT_2, &mut s).unwrap();
        assert_eq!(g.network.edge_count(), 1);
        let g = generate_geometric_network(1, 0.3, &mut s).unwrap();
        assert_eq!(g.network.edge_count(), 0);
        assert!(generate_geometric_network(0, 0.3, &mut s).is_err());
        assert!(generate_geometric_network(5, 0.0, &mut s).is_err());
        assert!(generate_geometric_network(5, 1.5, &mut s).is_err());
    }

    #[test]
    fn geometric_edge_count_matches_pair_probability() {
        let n = 150;
        let r = 0.2075;
        let root = RandomStream::new(2024);
        let seeds = 100;
        let mean = (0..seeds)
            .map(|k| {
                generate_geometric_network(n, r, &mut root.split(k))
                    .unwrap()
                    .network
                    .edge_count() as f64
            })
            .sum::<f64>()
            / seeds as f64;
        let expected = unit_square_pair_probability(r) * (n * (n - 1) / 2) as f64;
        assert!((mean / expected - 1.0).abs() < 0.02, "mean {mean} expected {expected}");
        assert!((mean / 1256.0 - 1.0).abs() < 0.15, "mean {mean}");
    }

    #[test]
    fn positions_csv_layout() {
        let g = generate_geometric_network(3, 0.5, &mut RandomStream::new(9)).unwrap();
        let csv = g.positions_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "node,x,y");
        assert_eq!(lines.len(), 4);
        let x: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(x, g.positions[0].0);
    }

    #[test]
    fn metric_parsing() {
        assert_eq!("hops".parse::<Metric>().unwrap(), Metric::Hops);
        assert_eq!("resistance".parse::<Metric>().unwrap(), Metric::Resistance);
        assert!("euclid".parse::<Metric>().is_err());
    }
}
