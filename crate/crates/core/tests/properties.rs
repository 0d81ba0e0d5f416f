//! Cross-module properties exercised through the public API only.

use privdiffuse::graph::{Metric, Network, PrivacySchedule};
use privdiffuse::mechanism::{diffuse, PrivateDatum};
use privdiffuse::process::{sample_trace, ProcessTrace};
use privdiffuse::simulator::{run_diffusion, run_gossip, ScenarioConfig};
use privdiffuse::trials::{collect_trials_with, Execution};
use privdiffuse::RandomStream;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn trim_preserves_values_below_the_cap(seed in any::<u64>(), n in 1usize..5, frac in 0.0f64..1.0) {
        let trace = sample_trace(n, 0.5, 15.0, &mut RandomStream::new(seed)).unwrap();
        let cap = 0.5 + frac * 14.5;
        let trimmed = trace.trim(cap).unwrap();
        prop_assert_eq!(trimmed.eps_hi(), cap);
        for k in 0..=40 {
            let eps = (0.5 + (cap - 0.5) * k as f64 / 40.0).min(cap);
            prop_assert_eq!(trimmed.evaluate(eps).unwrap(), trace.evaluate(eps).unwrap());
        }
        prop_assert!(trimmed.total_jumps() <= trace.total_jumps());
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>(), n in 1usize..4) {
        let trace = sample_trace(n, 1.0, 8.0, &mut RandomStream::new(seed)).unwrap();
        let text = trace.to_document();
        let back = ProcessTrace::from_document(&text).unwrap();
        prop_assert_eq!(&back, &trace);
        prop_assert_eq!(back.to_document(), text);
    }

    #[test]
    fn jump_counts_add_over_adjacent_intervals(seed in any::<u64>(), mid in 1.0f64..10.0) {
        let trace = sample_trace(2, 1.0, 10.0, &mut RandomStream::new(seed)).unwrap();
        let total = trace.jump_count(1.0, 10.0).unwrap();
        prop_assert_eq!(total, trace.jump_count(1.0, mid).unwrap() + trace.jump_count(mid, 10.0).unwrap());
        prop_assert_eq!(total, trace.total_jumps());
    }
}

#[test]
fn execution_mode_does_not_change_results() {
    let stream = RandomStream::new(42);
    let draw = |s: &mut RandomStream| sample_trace(3, 0.5, 15.0, s).unwrap().evaluate(2.0).unwrap().to_vec();
    let seq = collect_trials_with(Execution::Sequential, &stream, 5000, draw);
    let default = collect_trials_with(Execution::default(), &stream, 5000, draw);
    assert_eq!(seq, default);
}

#[test]
fn closer_recipients_get_less_noise_on_every_trace() {
    // Along a path the level is non-increasing with distance, so a closer
    // recipient never reads a coarser level than a farther one.
    let g = Network::from_edges(8, (1..8).map(|i| (i - 1, i))).unwrap();
    let d: Vec<(usize, f64)> = g
        .distances(0, Metric::Hops)
        .unwrap()
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(j, d)| (j, d.unwrap()))
        .collect();
    let schedule = PrivacySchedule::synthetic();
    let datum = PrivateDatum::new(0, vec![0.2, 0.8]).unwrap();
    for seed in 0..50 {
        let trace = sample_trace(2, 0.4, 16.0, &mut RandomStream::new(seed)).unwrap();
        let responses = diffuse(&datum, &trace, &schedule, &d).unwrap();
        let levels: Vec<f64> = responses.responses().iter().map(|r| r.level).collect();
        assert!(levels.windows(2).all(|w| w[0] >= w[1]), "{levels:?}");
    }
}

#[test]
fn gossip_agrees_with_centralized_on_a_grid() {
    let side = 6;
    let id = |r: usize, c: usize| r * side + c;
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < side {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    let g = Network::from_edges(side * side, edges).unwrap();
    for seed in [1, 2, 3] {
        let scenario = ScenarioConfig::inline(g.clone(), 14, vec![1.0, -2.0], PrivacySchedule::synthetic(), seed)
            .materialize()
            .unwrap();
        let gossip = run_gossip(&scenario).unwrap();
        let central = run_diffusion(&scenario).unwrap();
        assert_eq!(gossip.outputs().len(), central.responses.len());
        for (j, y) in gossip.outputs() {
            assert_eq!(central.responses.get(j).unwrap().y, y);
        }
    }
}
