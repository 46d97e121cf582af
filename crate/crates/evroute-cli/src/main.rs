//! Command-line front end for the evroute engine.
//!
//! Exit codes: 0 success, 1 malformed input, 2 unreachable, 3 energy
//! infeasible, 4 deadline infeasible.

mod render;
mod scenario;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use evroute_core::battery::{BatteryState, ChargingPolicy};
use evroute_core::network::{parse_network, Network, NodeId};
use evroute_core::oracle::{
    brute_force_forward, brute_force_waited, monte_carlo_reliability_partitioned, WaitRule,
};
use evroute_core::routing::{
    enumerate_paths, path_metrics, rank_routes, route_dot, route_fifo, route_wsdot,
    DriverPreference, Itinerary, RankedRoute, RouteError,
};
use evroute_core::time::network_is_fifo;

const BUNDLED_NETWORK: &str = include_str!("../../../fixtures/central-arkansas.json");

const EXIT_MALFORMED: u8 = 1;
const EXIT_UNREACHABLE: u8 = 2;
const EXIT_ENERGY: u8 = 3;
const EXIT_DEADLINE: u8 = 4;

#[derive(Parser)]
#[command(name = "evroute", version, about = "Electric-vehicle routing in a stochastic time-dependent network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one trip with the selected algorithm.
    Route(RouteArgs),
    /// List all simple routes between two nodes, ranked by preference.
    Paths(PathsArgs),
    /// Report each edge's FIFO violations and classify the network.
    CheckFifo(NetworkArg),
    /// Compare an algorithm against its brute-force oracle and a Monte
    /// Carlo reliability estimate.
    Verify(VerifyArgs),
    /// Replay a scripted sequence of traffic updates, replanning after each.
    Replan(ReplanArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Alg {
    Fifo,
    Dot,
    Wsdot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct NetworkArg {
    /// Network file; defaults to the bundled Central Arkansas data.
    #[arg(long)]
    network: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct RouteArgs {
    #[command(flatten)]
    network: NetworkArg,
    #[arg(long, value_enum)]
    alg: Alg,
    #[arg(long)]
    from: NodeId,
    #[arg(long)]
    to: NodeId,
    /// Departure time (fifo only).
    #[arg(long, conflicts_with = "deadline")]
    depart: Option<f64>,
    /// Latest arrival time (dot/wsdot only).
    #[arg(long)]
    deadline: Option<f64>,
    /// Initial state of charge, percent.
    #[arg(long, default_value_t = 100.0)]
    soc: f64,
    /// Reserve floor, percent.
    #[arg(long, default_value_t = 0.0)]
    reserve: f64,
    /// Charging policy: minimal | duration:<rate> | target:<pct>.
    #[arg(long, default_value = "minimal", value_parser = parse_policy)]
    charge_policy: ChargingPolicy,
    /// Route-ranking preference: time | reliability | weighted:<wt>,<wr>,<we>.
    #[arg(long, default_value = "time", value_parser = parse_pref)]
    pref: DriverPreference,
    /// Cap on any single wait (wsdot); 0 forbids waiting.
    #[arg(long)]
    max_wait: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct PathsArgs {
    #[command(flatten)]
    network: NetworkArg,
    #[arg(long)]
    from: NodeId,
    #[arg(long)]
    to: NodeId,
    /// Departure time the metrics are quoted at.
    #[arg(long, default_value_t = 0.0)]
    depart: f64,
    #[arg(long, default_value = "time", value_parser = parse_pref)]
    pref: DriverPreference,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    route: RouteArgs,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Monte Carlo seed; fixed default keeps verification reproducible.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Monte Carlo worker partitions.
    #[arg(long, default_value_t = 1)]
    partitions: u64,
}

#[derive(Args)]
struct ReplanArgs {
    #[command(flatten)]
    route: RouteArgs,
    /// Scenario file: a JSON list of timed edge-time overrides with the
    /// vehicle's position at each step.
    #[arg(long)]
    scenario: std::path::PathBuf,
}

fn parse_policy(s: &str) -> Result<ChargingPolicy, String> {
    if s == "minimal" {
        return Ok(ChargingPolicy::MinimalNeed);
    }
    if let Some(rate) = s.strip_prefix("duration:") {
        let rate: f64 = rate.parse().map_err(|_| format!("bad charge rate in {s:?}"))?;
        return Ok(ChargingPolicy::DurationLimited { rate });
    }
    if let Some(target) = s.strip_prefix("target:") {
        let target: f64 = target.parse().map_err(|_| format!("bad charge target in {s:?}"))?;
        return Ok(ChargingPolicy::FixedTarget { target });
    }
    Err(format!("unknown charge policy {s:?}; expected minimal, duration:<rate> or target:<pct>"))
}

fn parse_pref(s: &str) -> Result<DriverPreference, String> {
    match s {
        "time" => return Ok(DriverPreference::TimeFirst),
        "reliability" => return Ok(DriverPreference::ReliabilityFirst),
        _ => {}
    }
    if let Some(weights) = s.strip_prefix("weighted:") {
        let parts: Vec<&str> = weights.split(',').collect();
        if let [wt, wr, we] = parts.as_slice() {
            let parse = |w: &str| w.parse::<f64>().map_err(|_| format!("bad weight in {s:?}"));
            return Ok(DriverPreference::Weighted {
                w_time: parse(wt)?,
                w_rel: parse(wr)?,
                w_energy: parse(we)?,
            });
        }
        return Err(format!("weighted preference needs three weights, got {s:?}"));
    }
    Err(format!("unknown preference {s:?}; expected time, reliability or weighted:<wt>,<wr>,<we>"))
}

fn load_network(arg: &NetworkArg) -> Result<Network, Failure> {
    let text = match &arg.network {
        None => BUNDLED_NETWORK.to_string(),
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::malformed(format!("cannot read {}: {e}", path.display())))?,
    };
    parse_network(&text).map_err(|e| Failure::malformed(e.to_string()))
}

/// A failed command with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn malformed(message: String) -> Self {
        Failure { code: EXIT_MALFORMED, message }
    }
}

impl From<RouteError> for Failure {
    fn from(err: RouteError) -> Self {
        let code = match &err {
            RouteError::BadQuery(_) | RouteError::Network(_) => EXIT_MALFORMED,
            RouteError::Unreachable | RouteError::Trapped { .. } => EXIT_UNREACHABLE,
            RouteError::NoFeasibleSolution | RouteError::EnergyInfeasible | RouteError::Battery(_) => {
                EXIT_ENERGY
            }
            RouteError::DeadlineInfeasible => EXIT_DEADLINE,
        };
        Failure { code, message: err.to_string() }
    }
}

struct Query {
    battery: BatteryState,
    pref: DriverPreference,
}

fn query_of(args: &RouteArgs) -> Result<Query, Failure> {
    let battery = BatteryState::new(args.soc, args.reserve)
        .map_err(|e| Failure::malformed(e.to_string()))?;
    Ok(Query { battery, pref: args.pref })
}

fn run_route(net: &Network, args: &RouteArgs) -> Result<Itinerary, Failure> {
    let q = query_of(args)?;
    match args.alg {
        Alg::Fifo => {
            let depart = args.depart.unwrap_or(0.0);
            if args.deadline.is_some() {
                return Err(Failure::malformed("fifo takes --depart, not --deadline".into()));
            }
            Ok(route_fifo(net, args.from, args.to, depart, q.battery, args.charge_policy, q.pref)?)
        }
        Alg::Dot => {
            let deadline = args
                .deadline
                .ok_or_else(|| Failure::malformed("dot needs --deadline".into()))?;
            Ok(route_dot(net, args.from, args.to, deadline, q.battery, args.charge_policy, q.pref)?)
        }
        Alg::Wsdot => {
            let deadline = args
                .deadline
                .ok_or_else(|| Failure::malformed("wsdot needs --deadline".into()))?;
            Ok(route_wsdot(
                net,
                args.from,
                args.to,
                deadline,
                q.battery,
                args.charge_policy,
                q.pref,
                args.max_wait,
            )?)
        }
    }
}

fn cmd_route(args: &RouteArgs) -> Result<(), Failure> {
    let net = load_network(&args.network)?;
    let itinerary = run_route(&net, args)?;
    match args.format {
        Format::Table => print!("{}", render::itinerary_table(&itinerary, &net)),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&itinerary).expect("itinerary serializes")
        ),
    }
    Ok(())
}

fn cmd_paths(args: &PathsArgs) -> Result<(), Failure> {
    let net = load_network(&args.network)?;
    let routes = enumerate_paths(&net, args.from, args.to)
        .into_iter()
        .map(|path| {
            let metrics = path_metrics(&path, &net, args.depart)?;
            Ok(RankedRoute { path, metrics })
        })
        .collect::<Result<Vec<_>, RouteError>>()?;
    if routes.is_empty() {
        return Err(Failure {
            code: EXIT_UNREACHABLE,
            message: format!("no route from {} to {}", args.from, args.to),
        });
    }
    let ranked = rank_routes(routes, args.pref)?;
    match args.format {
        Format::Table => print!("{}", render::paths_table(&ranked, &net)),
        Format::Json => {
            let rows: Vec<serde_json::Value> = ranked
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "nodes": r.path.nodes(&net).expect("enumerated path is a walk"),
                        "edges": r.path.edge_ids().collect::<Vec<_>>(),
                        "travel_time": r.metrics.travel_time,
                        "energy": r.metrics.energy,
                        "reliability": r.metrics.reliability,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows).expect("rows serialize"));
        }
    }
    Ok(())
}

fn cmd_check_fifo(args: &NetworkArg) -> Result<(), Failure> {
    let net = load_network(args)?;
    let report = network_is_fifo(&net);
    println!("{}", if report.is_fifo { "FIFO" } else { "NON-FIFO" });
    for (edge, violations) in &report.edges {
        if violations.is_empty() {
            continue;
        }
        let pairs: Vec<String> = violations
            .iter()
            .map(|v| format!("({}, {})", v.interval, v.next_interval))
            .collect();
        println!("edge {edge}: violates at interval pairs {}", pairs.join(", "));
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let net = load_network(&args.route.network)?;
    let q = query_of(&args.route)?;
    let itinerary = run_route(&net, &args.route)?;

    match args.route.alg {
        Alg::Fifo => {
            let oracle = brute_force_forward(
                &net,
                args.route.from,
                args.route.to,
                args.route.depart.unwrap_or(0.0),
                q.battery,
                args.route.charge_policy,
            )
            .map_err(|e| Failure::malformed(e.to_string()))?;
            match oracle.objective {
                Some(best) if (best - itinerary.destination_arrival).abs() <= 1e-9 => {
                    println!(
                        "arrival: greedy {:.4} == oracle {best:.4} (agrees, {} candidates)",
                        itinerary.destination_arrival, oracle.candidates_examined
                    );
                }
                Some(best) => {
                    println!(
                        "arrival: greedy {:.4} vs oracle {best:.4} — greedy suboptimal (known)",
                        itinerary.destination_arrival
                    );
                }
                None => println!("oracle found no feasible itinerary while greedy did"),
            }
        }
        Alg::Dot | Alg::Wsdot => {
            let rule = if args.route.alg == Alg::Dot { WaitRule::None } else { WaitRule::BoundaryWaits };
            let oracle = brute_force_waited(
                &net,
                args.route.from,
                args.route.to,
                args.route.deadline.expect("run_route enforced the deadline"),
                q.battery,
                args.route.charge_policy,
                rule,
                q.pref,
                0.0,
            )
            .map_err(|e| Failure::malformed(e.to_string()))?;
            let best = oracle
                .best
                .as_ref()
                .ok_or_else(|| Failure::malformed("oracle found no feasible itinerary".into()))?;
            match args.route.alg {
                Alg::Dot => {
                    let agree = (best.origin_departure - itinerary.origin_departure).abs() <= 0.015;
                    println!(
                        "departure: algorithm {:.4} vs oracle {:.4} — {}",
                        itinerary.origin_departure,
                        best.origin_departure,
                        if agree { "AGREE" } else { "DISAGREE" }
                    );
                }
                Alg::Wsdot => {
                    let agree = (best.travel_time - itinerary.travel_time).abs() <= 1e-9;
                    println!(
                        "travel time: algorithm {:.4} vs oracle {:.4} — {}",
                        itinerary.travel_time,
                        best.travel_time,
                        if agree { "AGREE" } else { "DISAGREE" }
                    );
                }
                Alg::Fifo => unreachable!(),
            }
        }
    }

    let mc = monte_carlo_reliability_partitioned(&itinerary, &net, args.samples, args.seed, args.partitions)?;
    let sigma = if mc.stderr > 0.0 {
        (mc.estimate - itinerary.reliability).abs() / mc.stderr
    } else {
        0.0
    };
    println!(
        "reliability: analytic {:.6}, monte carlo {:.6} ± {:.6} ({} samples, {:.2}σ, {})",
        itinerary.reliability,
        mc.estimate,
        mc.stderr,
        mc.samples,
        sigma,
        if sigma <= 3.0 { "within 3σ" } else { "OUTSIDE 3σ" }
    );
    Ok(())
}

fn cmd_replan(args: &ReplanArgs) -> Result<(), Failure> {
    let net = load_network(&args.route.network)?;
    let text = std::fs::read_to_string(&args.scenario)
        .map_err(|e| Failure::malformed(format!("cannot read {}: {e}", args.scenario.display())))?;
    let records = scenario::parse_scenario(&text).map_err(Failure::malformed)?;
    let outputs = scenario::run_scenario(&net, args, &records)?;
    for (i, itinerary) in outputs.iter().enumerate() {
        match args.route.format {
            Format::Table => {
                println!("after update {}:", i + 1);
                print!("{}", render::itinerary_table(itinerary, &net));
            }
            Format::Json => println!(
                "{}",
                serde_json::to_string(&itinerary).expect("itinerary serializes")
            ),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Route(args) => cmd_route(args),
        Command::Paths(args) => cmd_paths(args),
        Command::CheckFifo(args) => cmd_check_fifo(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Replan(args) => cmd_replan(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
