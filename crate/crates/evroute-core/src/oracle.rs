//! Independent brute-force and stochastic oracles for the routing
//! algorithms.
//!
//! The brute-force oracles re-enumerate every simple path with their own
//! walker, re-derive each candidate's schedule and battery trace from the
//! time-grid definitions alone, and replay everything forward before
//! judging it. They share the planners' *selection* rules (which path wins,
//! and on what tie-breaking) so that agreement is required to be exact, but
//! none of the planners' search code.
//!
//! [`brute_force_forward`] is the ground truth for earliest-arrival forward
//! trips; the greedy forward walk is allowed to lose to it (that gap is a
//! property of the greedy heuristic, not a bug). [`brute_force_waited`]
//! covers the deadline planners, with and without boundary waiting.
//! [`monte_carlo_reliability`] estimates itinerary reliability by sampling
//! per-leg incidents; it is deterministic for a fixed seed and partition
//! count, and the merged estimate does not depend on partition order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::battery::{charge, BatteryState, ChargeContext, ChargingPolicy};
use crate::network::{EdgeId, Network, NodeId};
use crate::routing::{DriverPreference, Itinerary, Leg, RouteError};

/// Outcome of a brute-force search. `best` is `None` when no candidate was
/// feasible; `objective` mirrors the optimized quantity (arrival time for
/// forward search, pure travel time for waited search).
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best: Option<Itinerary>,
    pub objective: Option<f64>,
    pub candidates_examined: usize,
}

/// Per-node waiting regime for [`brute_force_waited`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaitRule {
    /// No waiting anywhere; mirrors the deadline planner without waits,
    /// including its preference-first path selection.
    None,
    /// Each arc priced at its cheapest reachable arrival interval with the
    /// wait pinned to that interval's boundary; the least-travel-time
    /// schedule wins, ties by least wait, then preference rank.
    BoundaryWaits,
}

const NODE_GUARD: usize = 12;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("network too large for brute force: {nodes} nodes > {limit}")]
    TooLarge { nodes: usize, limit: usize },
    #[error(transparent)]
    Route(#[from] RouteError),
}

// own simple-path walker, kept separate from the routing module's
fn all_simple_paths(
    net: &Network,
    origin: NodeId,
    dest: NodeId,
) -> Vec<Vec<(EdgeId, NodeId, NodeId)>> {
    fn go(
        net: &Network,
        at: NodeId,
        dest: NodeId,
        seen: &mut Vec<NodeId>,
        walk: &mut Vec<(EdgeId, NodeId, NodeId)>,
        out: &mut Vec<Vec<(EdgeId, NodeId, NodeId)>>,
    ) {
        for &(next, eid) in net.neighbors(at) {
            if next == dest {
                let mut done = walk.clone();
                done.push((eid, at, next));
                out.push(done);
            } else if !seen.contains(&next) {
                seen.push(next);
                walk.push((eid, at, next));
                go(net, next, dest, seen, walk, out);
                walk.pop();
                seen.pop();
            }
        }
    }
    let mut out = Vec::new();
    if origin != dest {
        go(net, origin, dest, &mut vec![origin], &mut Vec::new(), &mut out);
    }
    out
}

fn guard(net: &Network) -> Result<(), OracleError> {
    let nodes = net.node_count();
    if nodes > NODE_GUARD {
        return Err(OracleError::TooLarge { nodes, limit: NODE_GUARD });
    }
    Ok(())
}

/// Energy needed from position `i` of a walk to the next charging station
/// on it (or to the end).
fn need_to_next_station(net: &Network, walk: &[(EdgeId, NodeId, NodeId)], i: usize) -> f64 {
    let mut need = 0.0;
    for &(eid, _, to) in &walk[i..] {
        need += net.edge(eid).unwrap().energy;
        if net.is_station(to) {
            break;
        }
    }
    need
}

/// Replays a timed walk forward, producing legs or `None` when the battery
/// cannot support it. `timings[i] = (wait_before, depart, arrive, interval)`.
fn replay(
    net: &Network,
    walk: &[(EdgeId, NodeId, NodeId)],
    timings: &[LegTiming],
    battery: BatteryState,
    policy: ChargingPolicy,
) -> Option<Vec<Leg>> {
    let mut soc = battery.soc;
    let mut legs = Vec::with_capacity(walk.len());
    for (i, (&(eid, from, to), &(wait_before, depart, arrive, interval_used))) in
        walk.iter().zip(timings).enumerate()
    {
        let mut charge_amount = 0.0;
        if i > 0 && net.is_station(from) {
            let (next, amount) = charge(
                BatteryState { soc, reserve: battery.reserve },
                policy,
                ChargeContext { remaining_need: need_to_next_station(net, walk, i), wait: wait_before },
            );
            soc = next.soc;
            charge_amount = amount;
        }
        let soc_before = soc;
        let edge = net.edge(eid).unwrap();
        soc -= edge.energy;
        if soc < battery.reserve - 1e-9 {
            return None;
        }
        legs.push(Leg {
            edge: eid,
            from,
            to,
            wait_before,
            depart,
            arrive,
            duration: edge.times[interval_used - 1],
            interval_used,
            soc_before,
            soc_after: soc,
            charge_amount,
        });
    }
    Some(legs)
}

/// Exhaustive earliest-arrival search over simple paths with chained
/// forward quotes and battery replay. Ground truth for forward planning on
/// small networks.
pub fn brute_force_forward(
    net: &Network,
    origin: NodeId,
    dest: NodeId,
    depart: f64,
    battery: BatteryState,
    policy: ChargingPolicy,
) -> Result<OracleResult, OracleError> {
    guard(net)?;
    let mut best: Option<(f64, usize, Vec<Leg>)> = None;
    let walks = all_simple_paths(net, origin, dest);
    let examined = walks.len();
    for walk in walks {
        let mut t = depart;
        let mut timings = Vec::with_capacity(walk.len());
        for &(eid, _, _) in &walk {
            let k = net.grid.forward_index(t);
            let dur = net.edge(eid).unwrap().times[k - 1];
            timings.push((0.0, t, t + dur, k));
            t += dur;
        }
        let Some(legs) = replay(net, &walk, &timings, battery, policy) else {
            continue;
        };
        let arrival = t;
        let better = match &best {
            None => true,
            Some((a, n, _)) => {
                arrival < *a || (arrival == *a && walk.len() < *n)
            }
        };
        if better {
            best = Some((arrival, walk.len(), legs));
        }
    }
    match best {
        Some((arrival, _, legs)) => {
            let it = Itinerary::from_legs(net, origin, dest, legs, depart, battery.soc)?;
            Ok(OracleResult { objective: Some(arrival), best: Some(it), candidates_examined: examined })
        }
        None => Ok(OracleResult { best: None, objective: None, candidates_examined: examined }),
    }
}

/// `(wait_before, depart, arrive, interval)` of one scheduled traversal.
type LegTiming = (f64, f64, f64, usize);

/// Backward-derives one walk's schedule under a wait rule. Returns the
/// timings, the origin departure, and the charge the origin must hold, or
/// `None` when a station-free stretch needs more than a full battery.
fn derive_schedule(
    net: &Network,
    walk: &[(EdgeId, NodeId, NodeId)],
    deadline: f64,
    rule: WaitRule,
    reserve: f64,
) -> Option<(Vec<LegTiming>, f64, f64)> {
    // battery requirement: grows backward, resets at stations, capped at 100
    let mut level = reserve;
    for (i, &(eid, from, _)) in walk.iter().enumerate().rev() {
        level += net.edge(eid).unwrap().energy;
        if level > 100.0 {
            return None;
        }
        if i > 0 && net.is_station(from) {
            level = reserve;
        }
    }
    let required_soc = level;

    let mut rev: Vec<LegTiming> = Vec::with_capacity(walk.len());
    let mut waits_rev: Vec<f64> = Vec::with_capacity(walk.len());
    let mut target = deadline;
    for &(eid, _, _) in walk.iter().rev() {
        let times = &net.edge(eid).unwrap().times;
        let k0 = net.grid.backward_index(target);
        let mut k = k0;
        if rule == WaitRule::BoundaryWaits {
            for cand in 1..k0 {
                if times[cand - 1] < times[k - 1] || (times[cand - 1] == times[k - 1] && k < k0 && cand > k) {
                    k = cand;
                }
            }
        }
        let (arrive, wait) = if k < k0 {
            (net.grid.interval_end(k), target - net.grid.interval_end(k))
        } else {
            (target, 0.0)
        };
        let dur = times[k - 1];
        rev.push((0.0, arrive - dur, arrive, k));
        waits_rev.push(wait);
        target = arrive - dur;
    }
    rev.reverse();
    waits_rev.reverse();
    // waits_rev[i] is the wait at walk[i]'s head = wait_before of walk[i+1];
    // a wait computed at the destination is an early-arrival shift, already
    // folded into the final arc's timing.
    let mut timings = rev;
    for i in 0..timings.len() {
        if i + 1 < timings.len() {
            timings[i + 1].0 = waits_rev[i];
        }
    }
    let departure = timings.first().map(|t| t.1).unwrap_or(deadline);
    Some((timings, departure, required_soc))
}

fn metric_key(net: &Network, walk: &[(EdgeId, NodeId, NodeId)], depart: f64) -> (f64, f64, f64) {
    let mut t = depart;
    let mut travel = 0.0;
    let mut energy = 0.0;
    let mut rel = 1.0;
    for &(eid, _, _) in walk {
        let k = net.grid.forward_index(t);
        let e = net.edge(eid).unwrap();
        travel += e.times[k - 1];
        t += e.times[k - 1];
        energy += e.energy;
        rel *= e.reliability;
    }
    (travel, energy, rel)
}

fn preference_order(
    net: &Network,
    walks: &mut Vec<Vec<(EdgeId, NodeId, NodeId)>>,
    depart: f64,
    pref: DriverPreference,
) {
    let keys: Vec<(f64, f64, f64)> = walks.iter().map(|w| metric_key(net, w, depart)).collect();
    let mut order: Vec<usize> = (0..walks.len()).collect();
    order.sort_by(|&a, &b| {
        let (ta, ea, ra) = keys[a];
        let (tb, eb, rb) = keys[b];
        let cmp = match pref {
            DriverPreference::TimeFirst => {
                ta.total_cmp(&tb).then(rb.total_cmp(&ra)).then(ea.total_cmp(&eb))
            }
            DriverPreference::ReliabilityFirst => {
                rb.total_cmp(&ra).then(ta.total_cmp(&tb)).then(ea.total_cmp(&eb))
            }
            DriverPreference::Weighted { w_time, w_rel, w_energy } => {
                let max_t = keys.iter().map(|k| k.0).fold(0.0, f64::max);
                let max_e = keys.iter().map(|k| k.1).fold(0.0, f64::max);
                let score = |(t, e, r): (f64, f64, f64)| {
                    let tn = if max_t > 0.0 { t / max_t } else { 0.0 };
                    let en = if max_e > 0.0 { e / max_e } else { 0.0 };
                    w_time * tn - w_rel * r + w_energy * en
                };
                score(keys[a]).total_cmp(&score(keys[b]))
            }
        };
        cmp.then(a.cmp(&b))
    });
    let reordered: Vec<_> = order.iter().map(|&i| walks[i].clone()).collect();
    *walks = reordered;
}

/// Exhaustive deadline search over `(path, wait schedule)` candidates.
/// With [`WaitRule::None`] it mirrors the no-wait planner's selection
/// (best preference rank that is feasible); with [`WaitRule::BoundaryWaits`]
/// it selects the least pure travel time. `earliest` bounds the origin
/// departure from below (0 for a fresh trip).
#[allow(clippy::too_many_arguments)]
pub fn brute_force_waited(
    net: &Network,
    origin: NodeId,
    dest: NodeId,
    deadline: f64,
    battery: BatteryState,
    policy: ChargingPolicy,
    rule: WaitRule,
    pref: DriverPreference,
    earliest: f64,
) -> Result<OracleResult, OracleError> {
    guard(net)?;
    let mut walks = all_simple_paths(net, origin, dest);
    preference_order(net, &mut walks, earliest, pref);
    let examined = walks.len();
    let mut best: Option<(f64, f64, usize, Vec<Leg>)> = None;
    for (rank, walk) in walks.iter().enumerate() {
        let Some((timings, departure, required_soc)) =
            derive_schedule(net, walk, deadline, rule, battery.reserve)
        else {
            continue;
        };
        if departure < earliest || battery.soc + 1e-9 < required_soc {
            continue;
        }
        let Some(legs) = replay(net, walk, &timings, battery, policy) else {
            continue;
        };
        let travel: f64 = legs.iter().map(|l| l.duration).sum();
        let wait: f64 = legs.iter().map(|l| l.wait_before).sum();
        match rule {
            WaitRule::None => {
                // preference order: first feasible wins
                best = Some((travel, wait, rank, legs));
                break;
            }
            WaitRule::BoundaryWaits => {
                let better = match &best {
                    None => true,
                    Some((bt, bw, br, _)) => {
                        travel < *bt
                            || (travel == *bt && (wait < *bw || (wait == *bw && rank < *br)))
                    }
                };
                if better {
                    best = Some((travel, wait, rank, legs));
                }
            }
        }
    }
    match best {
        Some((travel, _, _, legs)) => {
            let it = Itinerary::from_legs(net, origin, dest, legs, deadline, battery.soc)?;
            Ok(OracleResult { objective: Some(travel), best: Some(it), candidates_examined: examined })
        }
        None => Ok(OracleResult { best: None, objective: None, candidates_examined: examined }),
    }
}

/// Monte Carlo reliability estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Samples each leg's incident independently (failure probability
/// `1 - reliability`) and returns the trip success fraction. Bitwise
/// reproducible for a fixed `(seed, samples, partitions)` triple; the
/// merged estimate is a sum, so partition order cannot matter.
pub fn monte_carlo_reliability(
    itinerary: &Itinerary,
    net: &Network,
    samples: u64,
    seed: u64,
) -> Result<McEstimate, RouteError> {
    monte_carlo_reliability_partitioned(itinerary, net, samples, seed, 1)
}

pub fn monte_carlo_reliability_partitioned(
    itinerary: &Itinerary,
    net: &Network,
    samples: u64,
    seed: u64,
    partitions: u64,
) -> Result<McEstimate, RouteError> {
    assert!(samples >= 1, "samples must be at least 1");
    let partitions = partitions.clamp(1, samples);
    let rels: Vec<f64> = itinerary
        .legs
        .iter()
        .map(|l| net.edge(l.edge).map(|e| e.reliability))
        .collect::<Result<_, _>>()?;
    let mut successes: u64 = 0;
    let base = samples / partitions;
    let rem = samples % partitions;
    for p in 0..partitions {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(p);
        let count = base + u64::from(p < rem);
        for _ in 0..count {
            if rels.iter().all(|&r| rng.gen::<f64>() < r) {
                successes += 1;
            }
        }
    }
    let estimate = successes as f64 / samples as f64;
    let stderr = (estimate * (1.0 - estimate) / samples as f64).sqrt();
    Ok(McEstimate { estimate, stderr, samples })
}
