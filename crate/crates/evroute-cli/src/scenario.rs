//! Scripted update/replan emulation.
//!
//! A scenario file is a JSON list of records, each a timed edge-time
//! override together with the vehicle's position when the update lands:
//!
//! ```json
//! [{"at_time": 1.48, "edge_id": 3, "new_times": [..8 values..],
//!   "vehicle": {"node": 9, "soc": 80.0}}]
//! ```
//!
//! Updates apply cumulatively. After each one the trip is replanned from
//! the vehicle's position; nodes the current plan visits strictly before
//! that position count as already driven, so the new plan will not double
//! back through them.

use std::collections::BTreeSet;

use serde::Deserialize;

use evroute_core::battery::BatteryState;
use evroute_core::network::{EdgeId, Network, NodeId};
use evroute_core::routing::{replan, Algorithm, Itinerary};

use crate::{run_route, Alg, Failure, ReplanArgs};

#[derive(Debug, Deserialize)]
pub struct UpdateRecord {
    pub at_time: f64,
    pub edge_id: EdgeId,
    pub new_times: Vec<f64>,
    pub vehicle: VehicleState,
}

#[derive(Debug, Deserialize)]
pub struct VehicleState {
    pub node: NodeId,
    pub soc: f64,
}

pub fn parse_scenario(text: &str) -> Result<Vec<UpdateRecord>, String> {
    serde_json::from_str(text).map_err(|e| format!("malformed scenario: {e}"))
}

/// Nodes the plan visits strictly before `position`. Empty when the
/// position is not on the plan (the replan then starts fresh).
fn visited_before(plan: &Itinerary, position: NodeId) -> BTreeSet<NodeId> {
    let nodes = plan.route_nodes();
    match nodes.iter().position(|&n| n == position) {
        Some(idx) => nodes[..idx].iter().copied().collect(),
        None => BTreeSet::new(),
    }
}

pub fn run_scenario(
    net: &Network,
    args: &ReplanArgs,
    records: &[UpdateRecord],
) -> Result<Vec<Itinerary>, Failure> {
    if records.is_empty() {
        return Ok(Vec::new());
    }
    let mut current_net = net.clone();
    let mut plan = run_route(&current_net, &args.route)?;
    let q = crate::query_of(&args.route)?;
    let alg = match args.route.alg {
        Alg::Fifo => Algorithm::Fifo,
        Alg::Dot => Algorithm::Dot {
            deadline: args.route.deadline.expect("run_route enforced the deadline"),
        },
        Alg::Wsdot => Algorithm::Wsdot {
            deadline: args.route.deadline.expect("run_route enforced the deadline"),
            max_wait: args.route.max_wait,
        },
    };
    let mut outputs = Vec::with_capacity(records.len());
    for record in records {
        current_net = current_net
            .with_edge_times(record.edge_id, record.new_times.clone())
            .map_err(|e| Failure::malformed(e.to_string()))?;
        let battery = BatteryState::new(record.vehicle.soc, args.route.reserve)
            .map_err(|e| Failure::malformed(e.to_string()))?;
        let visited = visited_before(&plan, record.vehicle.node);
        let new_plan = replan(
            &current_net,
            &visited,
            record.vehicle.node,
            record.at_time,
            battery,
            args.route.to,
            alg,
            args.route.charge_policy,
            q.pref,
        )?;
        outputs.push(new_plan.clone());
        plan = new_plan;
    }
    Ok(outputs)
}
