//! The three routing algorithms and their shared initialization.
//!
//! All planners begin with the same initialization: enumerate the simple
//! paths between origin and destination, evaluate each path's forward
//! metrics at the start time, and rank them by the driver's preference.
//!
//! - [`route_fifo`] then ignores the ranking and walks greedily node by
//!   node, moving to the neighbor with the fastest quote whose battery
//!   state still covers a retreat to a charging station, charging at
//!   stations along the way. It never waits, and being greedy it is not
//!   guaranteed optimal.
//! - [`route_dot`] schedules the best-ranked feasible path backward from
//!   the destination deadline, pricing each arc by its arrival interval.
//!   No waits are inserted; the result departs the origin as late as the
//!   chosen path allows.
//! - [`route_wsdot`] schedules every candidate path backward, but at each
//!   node traverses the incoming arc at its cheapest reachable arrival
//!   interval, waiting out the gap to that interval boundary when the
//!   cheaper interval is strictly better. Among the per-path schedules it
//!   returns the one with the smallest pure travel time (ties: least
//!   waiting, then preference rank). Charging happens during waits.
//!
//! Backward battery accounting follows the deadline algorithms: the level
//! starts at the reserve at the destination, grows by each arc's energy,
//! resets to the reserve at charging stations, and a level above 100 prunes
//! the path. Every result is replayed forward to fix the state-of-charge
//! trace and verify timing closure.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::battery::{apply_traversal, charge, BatteryError, BatteryState, ChargeContext, ChargingPolicy};
use crate::network::{Direction, EdgeId, Network, NetworkError, NodeId, PathSelection};
use crate::time::forward_quote;

/// One driven arc of an itinerary. `wait_before` and `charge_amount` happen
/// at the `from` node, before departing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub edge: EdgeId,
    pub from: NodeId,
    pub to: NodeId,
    /// Deliberate wait at `from` before this departure (0 for FIFO/DOT).
    pub wait_before: f64,
    pub depart: f64,
    pub arrive: f64,
    pub duration: f64,
    /// 1-based interval that priced this traversal.
    pub interval_used: usize,
    /// State of charge at departure, after any charging at `from`.
    pub soc_before: f64,
    pub soc_after: f64,
    /// Percent charged at `from` before departing.
    pub charge_amount: f64,
}

/// A complete planned trip. Aggregates are derived from the legs on
/// construction; see [`Itinerary::from_legs`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Itinerary {
    pub origin: NodeId,
    pub destination: NodeId,
    pub legs: Vec<Leg>,
    pub origin_departure: f64,
    pub destination_arrival: f64,
    /// Sum of leg durations, excluding waits.
    pub travel_time: f64,
    pub total_wait: f64,
    /// `destination_arrival - origin_departure == travel_time + total_wait`.
    pub elapsed: f64,
    /// Product of leg reliabilities, in (0, 1].
    pub reliability: f64,
    pub final_soc: f64,
}

impl Itinerary {
    /// An empty itinerary for a vehicle already at its destination.
    pub fn empty(node: NodeId, now: f64, soc: f64) -> Self {
        Itinerary {
            origin: node,
            destination: node,
            legs: Vec::new(),
            origin_departure: now,
            destination_arrival: now,
            travel_time: 0.0,
            total_wait: 0.0,
            elapsed: 0.0,
            reliability: 1.0,
            final_soc: soc,
        }
    }

    /// Builds an itinerary from legs, recomputing every aggregate.
    pub fn from_legs(
        net: &Network,
        origin: NodeId,
        destination: NodeId,
        legs: Vec<Leg>,
        fallback_time: f64,
        fallback_soc: f64,
    ) -> Result<Self, RouteError> {
        if legs.is_empty() {
            return Ok(Itinerary::empty(origin, fallback_time, fallback_soc));
        }
        let mut travel_time = 0.0;
        let mut total_wait = 0.0;
        let mut reliability = 1.0;
        for leg in &legs {
            travel_time += leg.duration;
            total_wait += leg.wait_before;
            reliability *= net.edge(leg.edge)?.reliability;
        }
        let origin_departure = legs.first().unwrap().depart - legs.first().unwrap().wait_before;
        let destination_arrival = legs.last().unwrap().arrive;
        let final_soc = legs.last().unwrap().soc_after;
        Ok(Itinerary {
            origin,
            destination,
            legs,
            origin_departure,
            destination_arrival,
            travel_time,
            total_wait,
            elapsed: destination_arrival - origin_departure,
            reliability,
            final_soc,
        })
    }

    pub fn route_nodes(&self) -> Vec<NodeId> {
        let mut nodes = vec![self.origin];
        nodes.extend(self.legs.iter().map(|l| l.to));
        nodes
    }
}

/// Ranking rule over (time, reliability, energy) used by the shared
/// initialization step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub enum DriverPreference {
    /// Ascending travel time, ties by descending reliability, then energy.
    #[default]
    TimeFirst,
    /// Descending reliability, ties by ascending travel time, then energy.
    ReliabilityFirst,
    /// Ascending `w_time * time_norm - w_rel * reliability + w_energy * energy_norm`,
    /// where the norms divide by the list maximum.
    Weighted { w_time: f64, w_rel: f64, w_energy: f64 },
}

/// Forward metrics of one candidate path at a given departure time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathMetrics {
    pub travel_time: f64,
    pub energy: f64,
    pub reliability: f64,
}

/// A candidate path with its initialization metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedRoute {
    pub path: PathSelection,
    pub metrics: PathMetrics,
}

/// All simple paths from `origin` to `dest`, in lexicographic order of
/// their node sequences. Empty when unreachable.
pub fn enumerate_paths(net: &Network, origin: NodeId, dest: NodeId) -> Vec<PathSelection> {
    enumerate_paths_avoiding(net, origin, dest, &BTreeSet::new())
}

/// Like [`enumerate_paths`] but never entering the `avoid` set (used by
/// replanning to keep the walk simple across the already-driven prefix).
pub fn enumerate_paths_avoiding(
    net: &Network,
    origin: NodeId,
    dest: NodeId,
    avoid: &BTreeSet<NodeId>,
) -> Vec<PathSelection> {
    let mut paths = Vec::new();
    if origin == dest {
        return paths;
    }
    let mut visited: BTreeSet<NodeId> = avoid.iter().copied().filter(|&n| n != origin && n != dest).collect();
    visited.insert(origin);
    let mut steps: Vec<(EdgeId, Direction)> = Vec::new();
    dfs_paths(net, origin, origin, dest, &mut visited, &mut steps, &mut paths);
    paths
}

fn dfs_paths(
    net: &Network,
    origin: NodeId,
    at: NodeId,
    dest: NodeId,
    visited: &mut BTreeSet<NodeId>,
    steps: &mut Vec<(EdgeId, Direction)>,
    out: &mut Vec<PathSelection>,
) {
    for &(next, eid) in net.neighbors(at) {
        let dir = if net.edge(eid).unwrap().u == at { Direction::Forward } else { Direction::Reverse };
        if next == dest {
            let mut path = steps.clone();
            path.push((eid, dir));
            out.push(PathSelection { start: origin, steps: path });
        } else if !visited.contains(&next) {
            visited.insert(next);
            steps.push((eid, dir));
            dfs_paths(net, origin, next, dest, visited, steps, out);
            steps.pop();
            visited.remove(&next);
        }
    }
}

/// Travel time (chained forward quotes from `depart`), total energy, and
/// reliability product of a path.
pub fn path_metrics(path: &PathSelection, net: &Network, depart: f64) -> Result<PathMetrics, RouteError> {
    let mut t = depart;
    let mut travel_time = 0.0;
    let mut energy = 0.0;
    let mut reliability = 1.0;
    for eid in path.edge_ids() {
        let quote = forward_quote(net, eid, t)?;
        travel_time += quote.duration;
        t = quote.arrive;
        let e = net.edge(eid)?;
        energy += e.energy;
        reliability *= e.reliability;
    }
    Ok(PathMetrics { travel_time, energy, reliability })
}

/// Orders candidate routes by the driver's preference. Ties fall back to
/// the incoming (lexicographic) order. Errors on an empty list.
pub fn rank_routes(
    mut routes: Vec<RankedRoute>,
    pref: DriverPreference,
) -> Result<Vec<RankedRoute>, RouteError> {
    if routes.is_empty() {
        return Err(RouteError::Unreachable);
    }
    if let DriverPreference::Weighted { w_time, w_rel, w_energy } = pref {
        if w_time < 0.0 || w_rel < 0.0 || w_energy < 0.0 || (w_time == 0.0 && w_rel == 0.0 && w_energy == 0.0)
        {
            return Err(RouteError::BadQuery("weighted preference needs nonnegative, not-all-zero weights".into()));
        }
    }
    match pref {
        DriverPreference::TimeFirst => routes.sort_by(|a, b| {
            a.metrics
                .travel_time
                .total_cmp(&b.metrics.travel_time)
                .then(b.metrics.reliability.total_cmp(&a.metrics.reliability))
                .then(a.metrics.energy.total_cmp(&b.metrics.energy))
        }),
        DriverPreference::ReliabilityFirst => routes.sort_by(|a, b| {
            b.metrics
                .reliability
                .total_cmp(&a.metrics.reliability)
                .then(a.metrics.travel_time.total_cmp(&b.metrics.travel_time))
                .then(a.metrics.energy.total_cmp(&b.metrics.energy))
        }),
        DriverPreference::Weighted { w_time, w_rel, w_energy } => {
            let max_time = routes.iter().map(|r| r.metrics.travel_time).fold(0.0, f64::max);
            let max_energy = routes.iter().map(|r| r.metrics.energy).fold(0.0, f64::max);
            let score = |m: &PathMetrics| {
                let tn = if max_time > 0.0 { m.travel_time / max_time } else { 0.0 };
                let en = if max_energy > 0.0 { m.energy / max_energy } else { 0.0 };
                w_time * tn - w_rel * m.reliability + w_energy * en
            };
            routes.sort_by(|a, b| score(&a.metrics).total_cmp(&score(&b.metrics)));
        }
    }
    Ok(routes)
}

fn ranked_routes_for(
    net: &Network,
    origin: NodeId,
    dest: NodeId,
    depart: f64,
    pref: DriverPreference,
    avoid: &BTreeSet<NodeId>,
) -> Result<Vec<RankedRoute>, RouteError> {
    let routes = enumerate_paths_avoiding(net, origin, dest, avoid)
        .into_iter()
        .map(|path| {
            let metrics = path_metrics(&path, net, depart)?;
            Ok(RankedRoute { path, metrics })
        })
        .collect::<Result<Vec<_>, RouteError>>()?;
    rank_routes(routes, pref)
}

// --- minimum-cost helpers ---------------------------------------------------

/// Least total edge energy from `from` to any node in `targets`, ignoring
/// time. `None` when no target is reachable.
fn min_energy_to(net: &Network, from: NodeId, targets: &BTreeSet<NodeId>) -> Option<f64> {
    min_cost_to(net, from, targets, |e| e.energy)
}

/// Least total travel time from `from` to any target with every edge frozen
/// at the given interval.
fn frozen_time_to(net: &Network, from: NodeId, targets: &BTreeSet<NodeId>, interval: usize) -> Option<f64> {
    min_cost_to(net, from, targets, |e| e.times[interval - 1])
}

/// Shortest-path cost by iterative relaxation; the networks this library
/// targets are small enough that a heap buys nothing.
fn min_cost_to(
    net: &Network,
    from: NodeId,
    targets: &BTreeSet<NodeId>,
    weight: impl Fn(&crate::network::Edge) -> f64,
) -> Option<f64> {
    if targets.contains(&from) {
        return Some(0.0);
    }
    let mut dist: std::collections::BTreeMap<NodeId, f64> =
        net.nodes().map(|n| (n, f64::INFINITY)).collect();
    *dist.get_mut(&from)? = 0.0;
    let mut changed = true;
    while changed {
        changed = false;
        for e in net.edges() {
            let w = weight(e);
            let du = dist[&e.u];
            let dv = dist[&e.v];
            if du + w < dv {
                dist.insert(e.v, du + w);
                changed = true;
            }
            if dv + w < du {
                dist.insert(e.u, dv + w);
                changed = true;
            }
        }
    }
    let best = targets.iter().map(|t| dist[t]).fold(f64::INFINITY, f64::min);
    best.is_finite().then_some(best)
}

/// Nodes from which `dest` is reachable without entering `blocked`.
fn reaches_dest_avoiding(net: &Network, from: NodeId, dest: NodeId, blocked: &BTreeSet<NodeId>) -> bool {
    if from == dest {
        return true;
    }
    if blocked.contains(&from) {
        return false;
    }
    let mut seen = BTreeSet::from([from]);
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(n) = queue.pop_front() {
        for &(m, _) in net.neighbors(n) {
            if m == dest {
                return true;
            }
            if !blocked.contains(&m) && seen.insert(m) {
                queue.push_back(m);
            }
        }
    }
    false
}

// --- algorithm 1: greedy forward walk ---------------------------------------

/// Greedy forward routing for a driver who departs at `depart` and never
/// waits. At each node the walk quotes every unvisited neighbor, keeps those
/// whose post-move charge still covers the cheapest retreat to a charging
/// station (or the destination) and that can still reach the destination
/// through unvisited nodes, then moves to the fastest. Stations en route
/// charge per `policy` with the remaining trip energy as the need.
pub fn route_fifo(
    net: &Network,
    origin: NodeId,
    dest: NodeId,
    depart: f64,
    battery: BatteryState,
    policy: ChargingPolicy,
    pref: DriverPreference,
) -> Result<Itinerary, RouteError> {
    route_fifo_from(net, origin, dest, depart, battery, policy, pref, &BTreeSet::new())
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn route_fifo_from(
    net: &Network,
    origin: NodeId,
    dest: NodeId,
    depart: f64,
    battery: BatteryState,
    policy: ChargingPolicy,
    _pref: DriverPreference,
    already_visited: &BTreeSet<NodeId>,
) -> Result<Itinerary, RouteError> {
    check_query(net, origin, dest, depart)?;
    policy.validate(battery.reserve).map_err(RouteError::Battery)?;
    if !reaches_dest_avoiding(net, origin, dest, already_visited) {
        return Err(RouteError::Unreachable);
    }

    let rescue_targets: BTreeSet<NodeId> = net.stations().chain([dest]).collect();
    let station_targets: BTreeSet<NodeId> = net.stations().collect();

    let mut visited: BTreeSet<NodeId> = already_visited.clone();
    visited.insert(origin);
    let mut at = origin;
    let mut now = depart;
    let mut state = battery;
    let mut pending_charge = 0.0;
    let mut legs: Vec<Leg> = Vec::new();

    while at != dest {
        struct Candidate {
            node: NodeId,
            edge: EdgeId,
            quote: crate::time::TraversalQuote,
            station_time: f64,
        }
        let mut feasible: Vec<Candidate> = Vec::new();
        let mut any_unvisited = false;
        let mut any_reaching = false;
        for &(next, eid) in net.neighbors(at) {
            if visited.contains(&next) {
                continue;
            }
            any_unvisited = true;
            if !reaches_dest_avoiding(net, next, dest, &visited) {
                continue;
            }
            any_reaching = true;
            let quote = forward_quote(net, eid, now)?;
            let energy = net.edge(eid)?.energy;
            let rescue = min_energy_to(net, next, &rescue_targets).unwrap_or(f64::INFINITY);
            if state.soc - energy < state.reserve + rescue {
                continue;
            }
            let frozen = net.grid.forward_index(quote.arrive);
            let station_time =
                frozen_time_to(net, next, &station_targets, frozen).unwrap_or(f64::INFINITY);
            feasible.push(Candidate { node: next, edge: eid, quote, station_time });
        }
        if !any_unvisited {
            return Err(RouteError::Trapped { at });
        }
        if !any_reaching {
            return Err(RouteError::Trapped { at });
        }
        if feasible.is_empty() {
            return Err(RouteError::NoFeasibleSolution);
        }
        feasible.sort_by(|a, b| {
            a.quote
                .duration
                .total_cmp(&b.quote.duration)
                .then(a.station_time.total_cmp(&b.station_time))
                .then(a.node.cmp(&b.node))
        });
        let best = &feasible[0];
        let soc_before = state.soc;
        state = apply_traversal(state, best.edge, net).map_err(RouteError::Battery)?;
        legs.push(Leg {
            edge: best.edge,
            from: at,
            to: best.node,
            wait_before: 0.0,
            depart: now,
            arrive: best.quote.arrive,
            duration: best.quote.duration,
            interval_used: best.quote.index_used,
            soc_before,
            soc_after: state.soc,
            charge_amount: pending_charge,
        });
        pending_charge = 0.0;
        now = best.quote.arrive;
        at = best.node;
        visited.insert(at);
        if at != dest && net.is_station(at) {
            let need = min_energy_to(net, at, &BTreeSet::from([dest])).unwrap_or(f64::INFINITY);
            if need.is_finite() {
                let (next_state, amount) =
                    charge(state, policy, ChargeContext { remaining_need: need, wait: 0.0 });
                state = next_state;
                pending_charge = amount;
            }
        }
    }
    Itinerary::from_legs(net, origin, dest, legs, depart, battery.soc)
}

// --- backward scheduling shared by DOT and WSDOT ----------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
enum WaitRule {
    /// Arrive exactly when the next departure requires; never wait.
    None,
    /// Traverse each arc at its cheapest reachable arrival interval, waiting
    /// to that interval's boundary when strictly cheaper; waits capped by
    /// `max_wait` when given.
    BestReachableInterval { max_wait: Option<f64> },
}

#[derive(Debug, Clone)]
struct ScheduledLeg {
    edge: EdgeId,
    from: NodeId,
    to: NodeId,
    wait_before: f64,
    depart: f64,
    arrive: f64,
    duration: f64,
    interval_used: usize,
}

#[derive(Debug)]
enum ScheduleFailure {
    /// Origin departure earlier than allowed.
    Deadline,
    /// Backward battery requirement impossible or forward replay stranded.
    Energy,
}

/// Backward-schedules a fixed path to arrive by `deadline`, returning legs
/// in forward order. Under the waiting rule the destination arrival itself
/// may shift to an earlier boundary when that prices the final arc cheaper.
fn backward_schedule(
    net: &Network,
    path: &PathSelection,
    deadline: f64,
    rule: WaitRule,
) -> Result<Vec<ScheduledLeg>, RouteError> {
    let nodes = path.nodes(net)?;
    let mut legs_rev: Vec<ScheduledLeg> = Vec::new();
    let mut arrival_target = deadline;
    for (i, &(eid, _)) in path.steps.iter().enumerate().rev() {
        let from = nodes[i];
        let to = nodes[i + 1];
        let times = &net.edge(eid)?.times;
        let k0 = net.grid.backward_index(arrival_target);
        let (k, wait) = match rule {
            WaitRule::None => (k0, 0.0),
            WaitRule::BestReachableInterval { max_wait } => {
                let mut best = (k0, 0.0);
                for candidate in (1..k0).rev() {
                    let w = arrival_target - net.grid.interval_end(candidate);
                    if let Some(cap) = max_wait {
                        if w > cap {
                            break;
                        }
                    }
                    if times[candidate - 1] < times[best.0 - 1] {
                        best = (candidate, w);
                    }
                }
                best
            }
        };
        // land exactly on the boundary when waiting, avoiding float dust
        let arrive = if k < k0 { net.grid.interval_end(k) } else { arrival_target };
        let wait = if k < k0 { wait } else { 0.0 };
        let duration = times[k - 1];
        let depart = arrive - duration;
        if to != nodes[nodes.len() - 1] {
            // the wait happens at `to` before the dest-ward leg already built
            legs_rev.last_mut().expect("dest-ward leg exists").wait_before = wait;
        }
        legs_rev.push(ScheduledLeg {
            edge: eid,
            from,
            to,
            wait_before: 0.0,
            depart,
            arrive,
            duration,
            interval_used: k,
        });
        arrival_target = depart;
    }
    legs_rev.reverse();
    Ok(legs_rev)
}

/// Minimum charge (including reserve) required at each path position going
/// forward, assuming a full recharge is available at stations. Fails when a
/// station-free segment needs more than a full battery.
fn backward_battery_requirement(
    net: &Network,
    path: &PathSelection,
    reserve: f64,
) -> Result<f64, ScheduleFailure> {
    let nodes = path.nodes(net).map_err(|_| ScheduleFailure::Energy)?;
    let mut level = reserve;
    for (i, &(eid, _)) in path.steps.iter().enumerate().rev() {
        let edge = net.edge(eid).map_err(|_| ScheduleFailure::Energy)?;
        level += edge.energy;
        if level > 100.0 {
            return Err(ScheduleFailure::Energy);
        }
        let upstream = nodes[i];
        let is_origin = i == 0;
        if !is_origin && net.is_station(upstream) {
            level = reserve;
        }
    }
    Ok(level)
}

/// Drives a schedule forward, fixing the state-of-charge trace. Charging
/// happens at intermediate stations before departure, with the chargeless
/// energy need up to the next station (or the destination) as context and
/// the leg's wait as the available duration.
fn replay_forward(
    net: &Network,
    schedule: &[ScheduledLeg],
    battery: BatteryState,
    policy: ChargingPolicy,
) -> Result<Vec<Leg>, ScheduleFailure> {
    let mut state = battery;
    let mut legs = Vec::with_capacity(schedule.len());
    for (i, s) in schedule.iter().enumerate() {
        let mut charge_amount = 0.0;
        if i > 0 && net.is_station(s.from) {
            let mut need = 0.0;
            for upcoming in &schedule[i..] {
                need += net.edge(upcoming.edge).map_err(|_| ScheduleFailure::Energy)?.energy;
                if net.is_station(upcoming.to) {
                    break;
                }
            }
            let (next, amount) =
                charge(state, policy, ChargeContext { remaining_need: need, wait: s.wait_before });
            state = next;
            charge_amount = amount;
        }
        let soc_before = state.soc;
        state = apply_traversal(state, s.edge, net).map_err(|_| ScheduleFailure::Energy)?;
        if state.soc < state.reserve - 1e-9 {
            return Err(ScheduleFailure::Energy);
        }
        legs.push(Leg {
            edge: s.edge,
            from: s.from,
            to: s.to,
            wait_before: s.wait_before,
            depart: s.depart,
            arrive: s.arrive,
            duration: s.duration,
            interval_used: s.interval_used,
            soc_before,
            soc_after: state.soc,
            charge_amount,
        });
    }
    Ok(legs)
}

fn schedule_path(
    net: &Network,
    path: &PathSelection,
    deadline: f64,
    earliest_departure: f64,
    battery: BatteryState,
    policy: ChargingPolicy,
    rule: WaitRule,
) -> Result<Vec<Leg>, ScheduleFailure> {
    let required = backward_battery_requirement(net, path, battery.reserve)?;
    if battery.soc + 1e-9 < required {
        return Err(ScheduleFailure::Energy);
    }
    let schedule = backward_schedule(net, path, deadline, rule).map_err(|_| ScheduleFailure::Energy)?;
    let departure = schedule.first().map(|l| l.depart).unwrap_or(deadline);
    if departure < earliest_departure {
        return Err(ScheduleFailure::Deadline);
    }
    replay_forward(net, &schedule, battery, policy)
}

fn classify_failures(failures: &[ScheduleFailure]) -> RouteError {
    if failures.iter().all(|f| matches!(f, ScheduleFailure::Deadline)) {
        RouteError::DeadlineInfeasible
    } else {
        RouteError::EnergyInfeasible
    }
}

// --- algorithm 2: decreasing order of time ----------------------------------

/// Deadline routing without waiting: candidate paths are ranked by the
/// driver's preference on their forward metrics, and the best-ranked path
/// with a feasible backward schedule (arrival-indexed pricing, battery
/// requirement within a full charge, departure not before `earliest`) wins.
pub fn route_dot(
    net: &Network,
    origin: NodeId,
    dest: NodeId,
    deadline: f64,
    battery: BatteryState,
    policy: ChargingPolicy,
    pref: DriverPreference,
) -> Result<Itinerary, RouteError> {
    route_dot_from(net, origin, dest, deadline, 0.0, battery, policy, pref, &BTreeSet::new())
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn route_dot_from(
    net: &Network,
    origin: NodeId,
    dest: NodeId,
    deadline: f64,
    earliest_departure: f64,
    battery: BatteryState,
    policy: ChargingPolicy,
    pref: DriverPreference,
    avoid: &BTreeSet<NodeId>,
) -> Result<Itinerary, RouteError> {
    check_query(net, origin, dest, deadline)?;
    policy.validate(battery.reserve).map_err(RouteError::Battery)?;
    let ranked = ranked_routes_for(net, origin, dest, earliest_departure, pref, avoid)?;
    let mut failures = Vec::new();
    for route in &ranked {
        match schedule_path(net, &route.path, deadline, earliest_departure, battery, policy, WaitRule::None)
        {
            Ok(legs) => return Itinerary::from_legs(net, origin, dest, legs, deadline, battery.soc),
            Err(f) => failures.push(f),
        }
    }
    Err(classify_failures(&failures))
}

// --- algorithm 3: waited-search DOT ------------------------------------------

/// Deadline routing with deliberate waiting. Every candidate path is
/// backward-scheduled with each arc priced at its cheapest reachable
/// arrival interval (waiting to the boundary when strictly cheaper, within
/// `max_wait`); the feasible schedule with the least pure travel time wins,
/// ties broken by least total wait, then preference rank. A zero `max_wait`
/// forbids waiting entirely, which is the DOT regime, so the call delegates
/// to [`route_dot`].
#[allow(clippy::too_many_arguments)]
pub fn route_wsdot(
    net: &Network,
    origin: NodeId,
    dest: NodeId,
    deadline: f64,
    battery: BatteryState,
    policy: ChargingPolicy,
    pref: DriverPreference,
    max_wait: Option<f64>,
) -> Result<Itinerary, RouteError> {
    route_wsdot_from(net, origin, dest, deadline, 0.0, battery, policy, pref, max_wait, &BTreeSet::new())
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn route_wsdot_from(
    net: &Network,
    origin: NodeId,
    dest: NodeId,
    deadline: f64,
    earliest_departure: f64,
    battery: BatteryState,
    policy: ChargingPolicy,
    pref: DriverPreference,
    max_wait: Option<f64>,
    avoid: &BTreeSet<NodeId>,
) -> Result<Itinerary, RouteError> {
    if max_wait.is_some_and(|w| w <= 0.0) {
        return route_dot_from(net, origin, dest, deadline, earliest_departure, battery, policy, pref, avoid);
    }
    check_query(net, origin, dest, deadline)?;
    policy.validate(battery.reserve).map_err(RouteError::Battery)?;
    let ranked = ranked_routes_for(net, origin, dest, earliest_departure, pref, avoid)?;
    let rule = WaitRule::BestReachableInterval { max_wait };
    let mut best: Option<(f64, f64, usize, Vec<Leg>)> = None;
    let mut failures = Vec::new();
    for (rank, route) in ranked.iter().enumerate() {
        match schedule_path(net, &route.path, deadline, earliest_departure, battery, policy, rule) {
            Ok(legs) => {
                let travel: f64 = legs.iter().map(|l| l.duration).sum();
                let wait: f64 = legs.iter().map(|l| l.wait_before).sum();
                let better = match &best {
                    None => true,
                    Some((bt, bw, br, _)) => match travel.total_cmp(bt) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Greater => false,
                        std::cmp::Ordering::Equal => match wait.total_cmp(bw) {
                            std::cmp::Ordering::Less => true,
                            std::cmp::Ordering::Greater => false,
                            std::cmp::Ordering::Equal => rank < *br,
                        },
                    },
                };
                if better {
                    best = Some((travel, wait, rank, legs));
                }
            }
            Err(f) => failures.push(f),
        }
    }
    match best {
        Some((_, _, _, legs)) => Itinerary::from_legs(net, origin, dest, legs, deadline, battery.soc),
        None => Err(classify_failures(&failures)),
    }
}

// --- replanning ---------------------------------------------------------------

/// Which planner a replan should re-run, with its deadline parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    Fifo,
    Dot { deadline: f64 },
    Wsdot { deadline: f64, max_wait: Option<f64> },
}

/// Re-plans from the vehicle's current position and time against a (possibly
/// updated) network. `visited` holds the nodes already driven so the new
/// plan keeps the overall trip simple; a vehicle already at the destination
/// gets an empty itinerary.
#[allow(clippy::too_many_arguments)]
pub fn replan(
    net: &Network,
    visited: &BTreeSet<NodeId>,
    position: NodeId,
    now: f64,
    battery: BatteryState,
    dest: NodeId,
    alg: Algorithm,
    policy: ChargingPolicy,
    pref: DriverPreference,
) -> Result<Itinerary, RouteError> {
    if position == dest {
        return Ok(Itinerary::empty(position, now, battery.soc));
    }
    match alg {
        Algorithm::Fifo => route_fifo_from(net, position, dest, now, battery, policy, pref, visited),
        Algorithm::Dot { deadline } => {
            route_dot_from(net, position, dest, deadline, now, battery, policy, pref, visited)
        }
        Algorithm::Wsdot { deadline, max_wait } => route_wsdot_from(
            net, position, dest, deadline, now, battery, policy, pref, max_wait, visited,
        ),
    }
}

fn check_query(net: &Network, origin: NodeId, dest: NodeId, time: f64) -> Result<(), RouteError> {
    if !net.has_node(origin) {
        return Err(RouteError::BadQuery(format!("unknown origin node {origin}")));
    }
    if !net.has_node(dest) {
        return Err(RouteError::BadQuery(format!("unknown destination node {dest}")));
    }
    if origin == dest {
        return Err(RouteError::BadQuery("origin equals destination".into()));
    }
    if time < 0.0 {
        return Err(RouteError::BadQuery(format!("negative time {time}")));
    }
    Ok(())
}

#[derive(Debug, Error)]
pub enum RouteError {
    #[error("bad query: {0}")]
    BadQuery(String),
    #[error("destination unreachable")]
    Unreachable,
    #[error("no feasible solution")]
    NoFeasibleSolution,
    #[error("trapped at node {at}: every continuation is already visited")]
    Trapped { at: NodeId },
    #[error("deadline infeasible")]
    DeadlineInfeasible,
    #[error("energy infeasible")]
    EnergyInfeasible,
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Battery(BatteryError),
}
