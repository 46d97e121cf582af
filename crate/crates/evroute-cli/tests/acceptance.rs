//! Acceptance suite: every criterion the artifact must meet, each as one
//! test that prints a pass line with the measured values.
//!
//! Criteria 1-4 drive the compiled binary over the bundled subgraph
//! fixture and parse its JSON output; criteria 5-8 exercise the library
//! against independent oracles, seeded random instances, and Monte Carlo
//! estimates. Tolerances are pinned here and nowhere else.

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use evroute_core::battery::{BatteryState, ChargingPolicy};
use evroute_core::network::{Edge, Network, TimeGrid};
use evroute_core::oracle::{
    brute_force_waited, monte_carlo_reliability_partitioned, WaitRule,
};
use evroute_core::routing::{route_dot, route_fifo, route_wsdot, DriverPreference, Itinerary};
use evroute_core::time::check_fifo;

const TIME_TOL: f64 = 0.015;
const RELIABILITY_TOL: f64 = 0.0005;
const ELAPSED_TOL: f64 = 0.02;

fn subgraph_path() -> String {
    format!("{}/../../fixtures/central-arkansas-subgraph.json", env!("CARGO_MANIFEST_DIR"))
}

fn subgraph() -> Network {
    evroute_core::network::parse_network(
        &std::fs::read_to_string(subgraph_path()).expect("fixture readable"),
    )
    .expect("fixture parses")
}

fn run_json(args: &[&str]) -> Itinerary {
    let out = Command::new(env!("CARGO_BIN_EXE_evroute"))
        .args(args)
        .args(["--format", "json"])
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "command failed: {:?}\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("itinerary JSON")
}

fn assert_within(name: &str, actual: f64, expected: f64, tol: f64) {
    assert!(
        (actual - expected).abs() <= tol,
        "{name}: expected {expected} ± {tol}, got {actual}"
    );
}

#[test]
fn criterion_1_fifo_baseline_trip() {
    let started = Instant::now();
    let net_arg = subgraph_path();
    let it = run_json(&[
        "route", "--network", &net_arg,
        "--alg", "fifo", "--from", "10", "--to", "6", "--depart", "0", "--soc", "100",
    ]);
    let runtime = started.elapsed();

    assert_eq!(it.route_nodes(), vec![10, 9, 8, 7, 6]);
    let durations: Vec<f64> = it.legs.iter().map(|l| l.duration).collect();
    for (actual, expected) in durations.iter().zip([1.48, 1.62, 1.13, 1.52]) {
        assert_within("leg time", *actual, expected, TIME_TOL);
    }
    assert_within("arrival", it.destination_arrival, 5.75, TIME_TOL);
    assert_eq!(it.final_soc, 23.0, "final SOC is exact");
    assert_within("reliability", it.reliability, 0.8806, RELIABILITY_TOL);
    assert!(runtime.as_secs_f64() < 1.0, "runtime {runtime:?} under a second");
    println!(
        "[criterion 1] PASS: route 10-9-8-7-6, legs {durations:?}, arrival {:.4}, soc {}%, reliability {:.4}, {runtime:?}",
        it.destination_arrival, it.final_soc, it.reliability
    );
}

#[test]
fn criterion_2_dot_latest_departure() {
    let net_arg = subgraph_path();
    let it = run_json(&[
        "route", "--network", &net_arg,
        "--alg", "dot", "--from", "10", "--to", "6", "--deadline", "16",
    ]);

    assert_eq!(it.route_nodes(), vec![10, 9, 8, 7, 6]);
    // backward leg order 6-7, 7-8, 8-9, 9-10
    let backward: Vec<f64> = it.legs.iter().rev().map(|l| l.duration).collect();
    assert_within("backward leg 6-7", backward[0], 1.20, TIME_TOL);
    assert_within("backward leg 7-8", backward[1], 0.73, TIME_TOL);
    assert_within("backward leg 8-9", backward[2], 0.82, TIME_TOL);
    // 1.33 and 1.34 are both acceptable for the final backward leg
    assert!(
        (1.33 - TIME_TOL..=1.34 + TIME_TOL).contains(&backward[3]),
        "backward leg 9-10 within 1.33-1.34, got {}",
        backward[3]
    );
    assert_within("origin departure", it.origin_departure, 11.91, TIME_TOL);
    assert_within("reliability", it.reliability, 0.8806, RELIABILITY_TOL);
    // elapsed follows from the deadline minus the departure
    assert_within("elapsed", it.elapsed, 4.08, ELAPSED_TOL);
    println!(
        "[criterion 2] PASS: route 10-9-8-7-6, backward legs {backward:?}, departure {:.4}, elapsed {:.4}, reliability {:.4}",
        it.origin_departure, it.elapsed, it.reliability
    );
}

#[test]
fn criterion_3_wsdot_waited_trip() {
    let net_arg = subgraph_path();
    let it = run_json(&[
        "route", "--network", &net_arg,
        "--alg", "wsdot", "--from", "10", "--to", "6", "--deadline", "16",
        "--charge-policy", "target:74",
    ]);

    assert_eq!(it.route_nodes(), vec![10, 1, 3, 7, 6]);
    let wait_at = |node: u32| {
        it.legs
            .iter()
            .find(|l| l.from == node)
            .map(|l| l.wait_before)
            .expect("leg departing the node")
    };
    assert_within("wait at node 7", wait_at(7), 2.8, TIME_TOL);
    assert_within("wait at node 3", wait_at(3), 1.31, TIME_TOL);
    assert_within("origin departure", it.origin_departure, 7.83, TIME_TOL);
    assert_within("travel time", it.travel_time, 4.06, TIME_TOL);
    assert_within("total wait", it.total_wait, 4.11, ELAPSED_TOL);
    assert_within("elapsed", it.elapsed, 8.17, ELAPSED_TOL);
    assert_within("reliability", it.reliability, 0.9129, RELIABILITY_TOL);
    assert_eq!(it.final_soc, 34.0, "fixed-target(74) at node 3 ends at 34%");

    // under minimal-need the SOC trace must match the independent oracle
    let minimal = run_json(&[
        "route", "--network", &net_arg,
        "--alg", "wsdot", "--from", "10", "--to", "6", "--deadline", "16",
        "--charge-policy", "minimal",
    ]);
    let net = subgraph();
    let oracle = brute_force_waited(
        &net, 10, 6, 16.0,
        BatteryState::full(),
        ChargingPolicy::MinimalNeed,
        WaitRule::BoundaryWaits,
        DriverPreference::TimeFirst,
        0.0,
    )
    .unwrap()
    .best
    .unwrap();
    let trace = |it: &Itinerary| -> Vec<(f64, f64)> {
        it.legs.iter().map(|l| (l.soc_before, l.soc_after)).collect()
    };
    assert_eq!(trace(&minimal), trace(&oracle), "minimal-need SOC trace matches the oracle");

    println!(
        "[criterion 3] PASS: route 10-1-3-7-6, waits 7:{:.3} 3:{:.3}, departure {:.4}, travel {:.4}, wait {:.4}, elapsed {:.4}, reliability {:.4}, soc {}%",
        wait_at(7), wait_at(3), it.origin_departure, it.travel_time, it.total_wait, it.elapsed, it.reliability, it.final_soc
    );
}

#[test]
fn criterion_4_check_fifo_flags_edge_6() {
    let out = Command::new(env!("CARGO_BIN_EXE_evroute"))
        .args(["check-fifo", "--network", &subgraph_path()])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("NON-FIFO"), "fixture classified non-FIFO: {text}");
    assert!(text.contains("edge 6") && text.contains("(4, 5)"), "edge 6 pair (4,5) listed: {text}");

    let net = subgraph();
    let e6 = net.edge(6).unwrap();
    assert!(e6.times[3] > net.grid.delta + e6.times[4], "5.76 > 2 + 0.69");
    let violations = check_fifo(&net, 6).unwrap();
    assert!(violations.iter().any(|v| v.interval == 4 && v.next_interval == 5));
    println!(
        "[criterion 4] PASS: NON-FIFO, edge 6 pair (4,5): t4 {} > delta {} + t5 {}",
        e6.times[3], net.grid.delta, e6.times[4]
    );
}

#[test]
fn criterion_5_non_fifo_behavioral_witness() {
    let net = subgraph();
    let fifo = route_fifo(
        &net, 10, 6, 0.0,
        BatteryState::full(),
        ChargingPolicy::MinimalNeed,
        DriverPreference::TimeFirst,
    )
    .unwrap();
    let wsdot = route_wsdot(
        &net, 10, 6, 16.0,
        BatteryState::full(),
        ChargingPolicy::MinimalNeed,
        DriverPreference::TimeFirst,
        None,
    )
    .unwrap();
    assert_within("fifo arrival", fifo.destination_arrival, 5.75, TIME_TOL);
    assert_within("fifo departure", fifo.origin_departure, 0.0, 1e-12);
    assert_within("wsdot departure", wsdot.origin_departure, 7.83, TIME_TOL);
    assert_within("wsdot travel", wsdot.travel_time, 4.06, TIME_TOL);
    assert!(wsdot.origin_departure > fifo.origin_departure);
    assert!(wsdot.travel_time < fifo.travel_time);
    println!(
        "[criterion 5] PASS: departing {:.2} travels {:.2}; departing {:.2} travels {:.2} — later departure, shorter travel",
        fifo.origin_departure, fifo.travel_time, wsdot.origin_departure, wsdot.travel_time
    );
}

// --- random instances shared by criteria 6 and 7 ----------------------------

fn random_network(rng: &mut ChaCha8Rng) -> Network {
    let nodes = rng.gen_range(2..=8u32);
    let edge_count = rng.gen_range(1..=12usize);
    let grid = TimeGrid::new(2.0, 8).unwrap();
    let edges: Vec<Edge> = (0..edge_count)
        .map(|i| {
            let u = rng.gen_range(0..nodes);
            let offset = rng.gen_range(1..nodes.max(2));
            Edge {
                id: i as u32 + 1,
                u,
                v: (u + offset) % nodes,
                energy: rng.gen_range(0..=40) as f64,
                reliability: rng.gen_range(80..=100) as f64 / 100.0,
                times: (0..8).map(|_| rng.gen_range(1..=600) as f64 / 100.0).collect(),
                unverified: false,
            }
        })
        .collect();
    let flags: Vec<(u32, bool)> = (0..nodes).map(|n| (n, rng.gen_bool(0.3))).collect();
    Network::new(grid, flags, edges).unwrap()
}

struct Instance {
    net: Network,
    origin: u32,
    dest: u32,
    depart: f64,
    deadline: f64,
    battery: BatteryState,
}

fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let net = random_network(rng);
    let nodes: Vec<u32> = net.nodes().collect();
    let origin = nodes[rng.gen_range(0..nodes.len())];
    let dest = loop {
        let d = nodes[rng.gen_range(0..nodes.len())];
        if d != origin {
            break d;
        }
    };
    let reserve = if rng.gen_bool(0.5) { 5.0 } else { 0.0 };
    let soc = rng.gen_range(30..=100) as f64;
    Instance {
        net,
        origin,
        dest,
        depart: rng.gen_range(0..=100) as f64 / 10.0,
        deadline: rng.gen_range(10..=200) as f64 / 10.0,
        battery: BatteryState::new(soc, reserve).unwrap(),
    }
}

fn assert_itinerary_invariants(it: &Itinerary, net: &Network, reserve: f64) {
    let mut at = it.origin;
    let mut prev_arrive: Option<f64> = None;
    let mut prev_soc: Option<f64> = None;
    let mut segment_start = it.legs.first().map(|l| l.soc_before).unwrap_or(100.0);
    let mut segment_sum = 0.0;
    for leg in &it.legs {
        assert_eq!(leg.from, at);
        at = leg.to;
        let edge = net.edge(leg.edge).unwrap();
        assert!((leg.arrive - leg.depart - leg.duration).abs() < 1e-9);
        if let Some(pa) = prev_arrive {
            assert!((leg.depart - pa - leg.wait_before).abs() < 1e-9);
        }
        if let Some(ps) = prev_soc {
            assert!((leg.soc_before - ps - leg.charge_amount).abs() < 1e-9);
        }
        assert!((leg.soc_after - (leg.soc_before - edge.energy)).abs() < 1e-9);
        assert!(leg.soc_after >= reserve - 1e-6, "SOC stays above the reserve");
        assert!(leg.soc_before <= 100.0 + 1e-9 && leg.soc_after >= -1e-9, "SOC within [0, 100]");
        if leg.charge_amount > 0.0 {
            segment_start = leg.soc_before;
            segment_sum = 0.0;
        }
        segment_sum += edge.energy;
        assert!(segment_sum <= segment_start + 1e-9, "segment energy within charge at segment start");
        prev_arrive = Some(leg.arrive);
        prev_soc = Some(leg.soc_after);
    }
    assert_eq!(at, it.destination);
    assert!((it.elapsed - (it.travel_time + it.total_wait)).abs() < 1e-9);
}

#[test]
fn criterion_6_energy_invariants_over_1000_random_instances() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let policy = ChargingPolicy::MinimalNeed;
    let pref = DriverPreference::TimeFirst;
    let mut emitted = 0usize;
    for _ in 0..1000 {
        let inst = random_instance(&mut rng);
        let reserve = inst.battery.reserve;
        if let Ok(it) = route_fifo(&inst.net, inst.origin, inst.dest, inst.depart, inst.battery, policy, pref) {
            assert_itinerary_invariants(&it, &inst.net, reserve);
            emitted += 1;
        }
        if let Ok(it) = route_dot(&inst.net, inst.origin, inst.dest, inst.deadline, inst.battery, policy, pref) {
            assert_itinerary_invariants(&it, &inst.net, reserve);
            emitted += 1;
        }
        if let Ok(it) =
            route_wsdot(&inst.net, inst.origin, inst.dest, inst.deadline, inst.battery, policy, pref, None)
        {
            assert_itinerary_invariants(&it, &inst.net, reserve);
            emitted += 1;
        }
    }
    let runtime = started.elapsed();
    assert!(runtime.as_secs_f64() < 30.0, "runtime {runtime:?} under 30 s");
    assert!(emitted > 100, "enough feasible itineraries to be meaningful: {emitted}");
    println!("[criterion 6] PASS: 1000 instances, {emitted} itineraries, all invariants hold, {runtime:?}");
}

#[test]
fn criterion_7_oracle_equivalence_on_the_same_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let policy = ChargingPolicy::MinimalNeed;
    let pref = DriverPreference::TimeFirst;
    let mut dot_checked = 0usize;
    let mut ws_checked = 0usize;
    for _ in 0..1000 {
        let inst = random_instance(&mut rng);

        let dot = route_dot(&inst.net, inst.origin, inst.dest, inst.deadline, inst.battery, policy, pref);
        let dot_oracle = brute_force_waited(
            &inst.net, inst.origin, inst.dest, inst.deadline, inst.battery, policy,
            WaitRule::None, pref, 0.0,
        )
        .unwrap();
        match (&dot, &dot_oracle.best) {
            (Ok(it), Some(best)) => {
                assert_eq!(it.origin_departure, best.origin_departure, "departure matches exactly");
                assert_eq!(it.route_nodes(), best.route_nodes(), "same tie-breaking");
                dot_checked += 1;
            }
            (Err(_), None) => {}
            (a, b) => panic!("dot/oracle feasibility split: alg {:?} oracle {:?}", a.is_ok(), b.is_some()),
        }

        let wsdot = route_wsdot(
            &inst.net, inst.origin, inst.dest, inst.deadline, inst.battery, policy, pref, None,
        );
        let ws_oracle = brute_force_waited(
            &inst.net, inst.origin, inst.dest, inst.deadline, inst.battery, policy,
            WaitRule::BoundaryWaits, pref, 0.0,
        )
        .unwrap();
        match (&wsdot, &ws_oracle.best) {
            (Ok(it), Some(best)) => {
                assert_eq!(it.travel_time, best.travel_time, "travel time matches exactly");
                assert_eq!(it.route_nodes(), best.route_nodes(), "same tie-breaking");
                ws_checked += 1;
            }
            (Err(_), None) => {}
            (a, b) => panic!("wsdot/oracle feasibility split: alg {:?} oracle {:?}", a.is_ok(), b.is_some()),
        }
    }
    assert!(dot_checked > 100 && ws_checked > 100, "coverage: dot {dot_checked}, wsdot {ws_checked}");
    println!("[criterion 7] PASS: exact oracle agreement on {dot_checked} dot and {ws_checked} wsdot instances");
}

#[test]
fn criterion_8_monte_carlo_convergence() {
    let started = Instant::now();
    let net = subgraph();
    let battery = BatteryState::full();
    let pref = DriverPreference::TimeFirst;
    let fifo = route_fifo(&net, 10, 6, 0.0, battery, ChargingPolicy::MinimalNeed, pref).unwrap();
    let wsdot =
        route_wsdot(&net, 10, 6, 16.0, battery, ChargingPolicy::MinimalNeed, pref, None).unwrap();

    let mut reports = Vec::new();
    for (name, it) in [("fifo-trip", &fifo), ("wsdot-trip", &wsdot)] {
        let mc = monte_carlo_reliability_partitioned(it, &net, 100_000, 2024, 1).unwrap();
        let again = monte_carlo_reliability_partitioned(it, &net, 100_000, 2024, 1).unwrap();
        assert_eq!(mc, again, "fixed seed makes the estimate deterministic");
        let gap = (mc.estimate - it.reliability).abs();
        assert!(
            gap <= 4.0 * mc.stderr,
            "{name}: |{} - {}| = {gap} exceeds 4·stderr = {}",
            mc.estimate,
            it.reliability,
            4.0 * mc.stderr
        );
        reports.push(format!(
            "{name} estimate {:.5} vs analytic {:.5} ({:.2}σ)",
            mc.estimate,
            it.reliability,
            gap / mc.stderr
        ));
    }
    let runtime = started.elapsed();
    assert!(runtime.as_secs_f64() < 5.0, "runtime {runtime:?} under 5 s");
    println!("[criterion 8] PASS: {}; {runtime:?}", reports.join("; "));
}
