use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use privdiffuse::graph::{Metric, Network, PrivacySchedule};
use privdiffuse::mechanism::{Response, ResponseSet};
use privdiffuse::process::TraceSampler;
use privdiffuse::simulator::{
    run_coalition_experiment, run_diffusion, run_gossip, run_independent_baseline, NetworkSource, ScenarioConfig,
    NoiseModel,
};
use privdiffuse::verify::{preset_groups, run_suite, SuiteKind, Verifier};
use privdiffuse::RandomStream;

use crate::args::{
    DiffuseArgs, DistancesArgs, GenNetworkArgs, MetricArg, Mode, NetworkArgs, SampleArgs, ScheduleArg, SimulateArgs,
    SuiteArg, VerifyArgs,
};
use crate::Failure;

type CmdResult = Result<(), Failure>;

/// Writes to `path`, or to stdout when there is none.
fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn metric(m: MetricArg) -> Metric {
    match m {
        MetricArg::Hops => Metric::Hops,
        MetricArg::Resistance => Metric::Resistance,
    }
}

/// The network and the node acting as source/owner (`None` unless `--ego`).
fn load_network(args: &NetworkArgs, seed: u64) -> anyhow::Result<(Network, Option<usize>)> {
    if !args.include_ego {
        bail!(
            "--include-ego false is not supported: an ego left out of the Laplacian has no distance to its friends"
        );
    }
    let source = match (&args.edge_list, args.generate) {
        (Some(path), None) => NetworkSource::EdgeList(path.clone()),
        (None, Some(nodes)) => NetworkSource::Generated {
            nodes,
            radius: args.radius,
        },
        (None, None) => bail!("one of --edge-list or --generate is required"),
        (Some(_), Some(_)) => bail!("--edge-list and --generate are mutually exclusive"),
    };
    let network = source.build(seed)?;
    if args.ego {
        let (g, ego) = network.with_ego();
        Ok((g, Some(ego)))
    } else {
        Ok((network, None))
    }
}

pub fn sample(a: SampleArgs) -> CmdResult {
    let trace = TraceSampler::new(a.n)?.sample(a.eps_lo, a.eps_hi, &mut RandomStream::new(a.seed))?;
    emit(a.out.as_deref(), &trace.to_document())?;
    if let Some(path) = &a.norm_csv {
        let mut csv = String::from("epsilon,norm\n");
        let levels = trace.levels();
        for (i, seg) in trace.segments().enumerate() {
            let norm = seg.value.iter().map(|x| x * x).sum::<f64>().sqrt();
            let end = levels.get(i + 1).copied().unwrap_or(trace.eps_lo());
            let _ = writeln!(csv, "{},{norm}", seg.level);
            let _ = writeln!(csv, "{end},{norm}");
        }
        write_file(path, &csv)?;
    }
    eprintln!("sampled {} jumps on [{}, {}]", trace.total_jumps(), a.eps_lo, a.eps_hi);
    Ok(())
}

pub fn distances(a: DistancesArgs) -> CmdResult {
    let (g, ego) = load_network(&a.network, a.seed)?;
    let source = ego.unwrap_or(a.source);
    let d = g.distances(source, metric(a.metric))?;
    let mut csv = String::from("node,distance\n");
    for (j, d) in d.iter().enumerate() {
        match d {
            Some(d) => writeln!(csv, "{j},{d}"),
            None => writeln!(csv, "{j},inf"),
        }
        .expect("writing to a string");
    }
    emit(a.out.as_deref(), &csv)?;
    Ok(())
}

fn schedule(kind: ScheduleArg, a: Option<f64>, b: Option<f64>) -> anyhow::Result<PrivacySchedule> {
    Ok(match (kind, a, b) {
        (ScheduleArg::Synthetic, None, None) => PrivacySchedule::synthetic(),
        (ScheduleArg::Ego, None, None) => PrivacySchedule::ego_network(),
        (ScheduleArg::Exponential, Some(a), Some(b)) => PrivacySchedule::exponential(a, b)?,
        (ScheduleArg::Exponential, _, _) => bail!("--schedule exponential requires --a and --b"),
        _ => bail!("--a/--b only apply to --schedule exponential"),
    })
}

pub fn diffuse(a: DiffuseArgs) -> CmdResult {
    let (g, ego) = load_network(&a.network, a.seed)?;
    let value = match (a.u, a.n) {
        (Some(u), Some(n)) if u.len() != n => {
            return Err(anyhow!("--u has {} components but --n is {n}", u.len()).into())
        }
        (Some(u), _) => u,
        (None, Some(n)) => vec![0.0; n],
        (None, None) => return Err(anyhow!("one of --u or --n is required").into()),
    };
    let mut config = ScenarioConfig::inline(g, ego.unwrap_or(a.owner), value, schedule(a.schedule, a.a, a.b)?, a.seed);
    config.metric = metric(a.metric);
    let outcome = run_diffusion(&config.materialize()?)?;
    let responses = if a.binary {
        outcome.responses.project_binary()?
    } else {
        outcome.responses.clone()
    };
    emit(a.responses.as_deref(), &responses.to_csv())?;
    if let Some(path) = &a.errors {
        write_file(path, &outcome.errors_csv())?;
    }
    eprintln!(
        "diffused to {} nodes with {} jumps on [{}, {}]",
        responses.len(),
        outcome.trace.total_jumps(),
        outcome.trace.eps_lo(),
        outcome.trace.eps_hi()
    );
    Ok(())
}

pub fn simulate(a: SimulateArgs) -> CmdResult {
    let config = ScenarioConfig::load(&a.scenario)?;
    let scenario = config.materialize()?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("cannot create {}", a.out_dir.display()))?;
    let out = |name: &str| -> PathBuf { a.out_dir.join(name) };
    match a.mode {
        Mode::Centralized => {
            let outcome = run_diffusion(&scenario)?;
            write_file(&out("responses.csv"), &outcome.responses.to_csv())?;
            write_file(&out("errors.csv"), &outcome.errors_csv())?;
            println!("centralized: {} responses, {} jumps", outcome.responses.len(), outcome.trace.total_jumps());
        }
        Mode::Gossip => {
            let state = run_gossip(&scenario)?;
            let central = run_diffusion(&scenario)?;
            let outputs = state.outputs();
            let identical = outputs.len() == central.responses.len()
                && outputs.iter().all(|(j, y)| central.responses.get(*j).is_some_and(|r| &r.y == y));
            // The responses as the gossip nodes computed them, with the
            // centralized distance and level columns.
            let responses = ResponseSet::new(
                state.owner(),
                outputs
                    .into_iter()
                    .filter_map(|(j, y)| central.responses.get(j).map(|r| Response { y, ..r.clone() }))
                    .collect(),
            )?;
            write_file(&out("responses.csv"), &responses.to_csv())?;
            write_file(&out("messages.csv"), &state.message_log_csv())?;
            println!(
                "gossip: {} rounds, {} messages, outputs {} centralized diffusion",
                state.rounds(),
                state.messages().len(),
                if identical { "identical to" } else { "DIFFER from" }
            );
            if !identical {
                return Err(Failure::Check("gossip outputs differ from centralized diffusion".into()));
            }
        }
        Mode::Coalition | Mode::Baseline => {
            let group = if scenario.coalition.is_empty() {
                preset_groups(&scenario)?.1
            } else {
                scenario.coalition.clone()
            };
            let model = if a.mode == Mode::Coalition {
                NoiseModel::Coupled
            } else {
                let baseline = run_independent_baseline(&scenario)?;
                write_file(&out("responses.csv"), &baseline.to_csv())?;
                NoiseModel::Independent
            };
            let report = run_coalition_experiment(&scenario, &group, model)?;
            let name = if model == NoiseModel::Coupled {
                "coalition.json"
            } else {
                "coalition_baseline.json"
            };
            write_file(&out(name), &report.to_json())?;
            println!(
                "{}: group {:?}, best single MSE {}, best coalition MSE {}, verdict: {}",
                if model == NoiseModel::Coupled { "coalition" } else { "baseline" },
                group,
                report.best_single_mse,
                report.min_weight_mse,
                report.verdict
            );
        }
    }
    Ok(())
}

pub fn verify(a: VerifyArgs) -> CmdResult {
    let kind = match a.suite {
        SuiteArg::Default => SuiteKind::Default,
        SuiteArg::Full => SuiteKind::Full,
    };
    let mut verifier = Verifier::new(a.seed);
    if a.inject_bias {
        verifier = verifier.with_jump_bias(0.1);
    }
    let report = run_suite(kind, &verifier, |r| println!("{}", r.summary()))?;
    if let Some(path) = &a.out {
        write_file(path, &report.to_json())?;
    }
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    println!(
        "{} checks, {} failed, {:.1}s (seed {})",
        report.checks.len(),
        failed,
        report.wall_time_s,
        report.seed
    );
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Check(format!("{failed} verification checks failed")))
    }
}

pub fn gen_network(a: GenNetworkArgs) -> CmdResult {
    let g = NetworkSource::generate(a.nodes, a.radius, a.seed)?;
    emit(a.out.as_deref(), &g.network.to_edge_list())?;
    if let Some(path) = &a.positions {
        write_file(path, &g.positions_csv())?;
    }
    eprintln!(
        "generated {} nodes, {} edges, {}",
        g.network.node_count(),
        g.network.edge_count(),
        if g.network.is_connected() { "connected" } else { "disconnected" }
    );
    Ok(())
}
