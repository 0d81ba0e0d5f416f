//! Trim-and-forward flooding in synchronous rounds.
//!
//! The owner hands each neighbor the value-shifted trace trimmed to `ε(1)`.
//! A node at hop distance `d` consumes its trace at `ε(d)` and forwards a
//! copy trimmed to `ε(d + 1)`, but only to neighbors whose held cap that copy
//! strictly improves. Every node ends up holding a trace capped at exactly
//! its own level, and reading it there reproduces the centralized response.

use std::fmt::Write as _;

use super::Scenario;
use crate::error::{Error, Result};
use crate::graph::Metric;
use crate::process::ProcessTrace;
use crate::rng::RandomStream;

#[derive(Debug, Clone, PartialEq)]
pub struct MessageRecord {
    pub round: usize,
    pub from: usize,
    pub to: usize,
    pub cap: f64,
    pub segments: usize,
}

#[derive(Debug, Clone)]
pub struct GossipState {
    owner: usize,
    held: Vec<Option<ProcessTrace>>,
    hops: Vec<Option<u32>>,
    rounds: usize,
    messages: Vec<MessageRecord>,
}

impl GossipState {
    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn held(&self, node: usize) -> Option<&ProcessTrace> {
        self.held[node].as_ref()
    }

    /// Upper end of the trace a node holds.
    pub fn cap(&self, node: usize) -> Option<f64> {
        self.held[node].as_ref().map(ProcessTrace::eps_hi)
    }

    /// Hop distance learned from the first delivery.
    pub fn hops(&self, node: usize) -> Option<u32> {
        self.hops[node]
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn messages(&self) -> &[MessageRecord] {
        &self.messages
    }

    /// Each non-owner node's response: its held trace read at its cap.
    pub fn outputs(&self) -> Vec<(usize, Vec<f64>)> {
        self.held
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != self.owner)
            .filter_map(|(j, t)| {
                t.as_ref()
                    .map(|t| (j, t.evaluate(t.eps_hi()).expect("cap is in domain").to_vec()))
            })
            .collect()
    }

    /// `round,from,to,cap,segments`.
    pub fn message_log_csv(&self) -> String {
        let mut out = String::from("round,from,to,cap,segments\n");
        for m in &self.messages {
            let _ = writeln!(out, "{},{},{},{},{}", m.round, m.from, m.to, m.cap, m.segments);
        }
        out
    }
}

/// Runs the protocol from the scenario seed. The owner samples the same
/// trace as [`super::run_diffusion`], so outputs match it node for node.
pub fn run_gossip(scenario: &Scenario) -> Result<GossipState> {
    if scenario.metric != Metric::Hops {
        return Err(Error::Unsupported(format!(
            "gossip trims by hop count; metric {} is not supported",
            scenario.metric
        )));
    }
    let recipients = scenario.recipients()?;
    let (lo, hi) = scenario.trace_domain(&recipients);
    let raw = scenario.sampler()?.sample(lo, hi, &mut RandomStream::new(scenario.seed))?;
    let (u, alpha) = (scenario.datum.value(), scenario.datum.alpha());
    let values = raw
        .segments()
        .flat_map(|s| u.iter().zip(s.value).map(move |(u, x)| u + alpha * x))
        .collect();
    let signal = ProcessTrace::from_parts_unchecked(raw.dimension(), lo, hi, raw.levels().to_vec(), values);

    let g = &scenario.network;
    let owner = scenario.owner();
    let mut held: Vec<Option<ProcessTrace>> = vec![None; g.node_count()];
    let mut hops: Vec<Option<u32>> = vec![None; g.node_count()];
    held[owner] = Some(signal);
    hops[owner] = Some(0);
    let mut active = vec![owner];
    let mut messages = Vec::new();
    let mut round = 0;
    while !active.is_empty() {
        round += 1;
        let mut deliveries: Vec<(usize, usize, u32, ProcessTrace)> = Vec::new();
        for &v in &active {
            let d = hops[v].expect("active nodes hold a trace");
            let trace = held[v].as_ref().expect("active nodes hold a trace");
            let cap = scenario.schedule.level(f64::from(d + 1)).max(trace.eps_lo());
            if cap > trace.eps_hi() {
                continue;
            }
            for &w in g.neighbors(v) {
                // Decided from the state at the start of the round: senders in
                // the same round do not see each other's deliveries.
                if held[w].as_ref().map_or(true, |t| t.eps_hi() < cap) {
                    deliveries.push((v, w, d + 1, trace.trim(cap)?));
                }
            }
        }
        let mut next = Vec::new();
        for (from, to, d, trace) in deliveries {
            messages.push(MessageRecord {
                round,
                from,
                to,
                cap: trace.eps_hi(),
                segments: trace.segment_count(),
            });
            if held[to].as_ref().map_or(true, |t| t.eps_hi() < trace.eps_hi()) {
                held[to] = Some(trace);
                hops[to] = Some(d);
                if !next.contains(&to) {
                    next.push(to);
                }
            }
        }
        active = next;
    }
    Ok(GossipState {
        owner,
        held,
        hops,
        rounds: round,
        messages,
    })
}
