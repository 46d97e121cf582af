//! State-of-charge bookkeeping, the path energy constraint, and charging
//! policies.
//!
//! The battery is measured in percent of a homogeneous capacity; every arc's
//! energy attribute is a percent of that same capacity. A traversal that
//! would push the charge below zero is an error ("stranded"), never a clamp.
//! Charging is instantaneous under the minimal-need and fixed-target
//! policies and time-proportional under duration-limited; the caller supplies
//! the wait duration and the outstanding energy need as context.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{Network, NetworkError, PathSelection};

/// Remaining charge as a percent of capacity, plus a reserve floor the
/// planner must not dip under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryState {
    /// State of charge in [0, 100].
    pub soc: f64,
    /// Percent floor >= 0; defaults to 0.
    pub reserve: f64,
}

impl BatteryState {
    pub fn new(soc: f64, reserve: f64) -> Result<Self, BatteryError> {
        if !(0.0..=100.0).contains(&soc) || reserve < 0.0 || reserve > soc {
            return Err(BatteryError::BadState { soc, reserve });
        }
        Ok(BatteryState { soc, reserve })
    }

    pub fn full() -> Self {
        BatteryState { soc: 100.0, reserve: 0.0 }
    }

    /// Charge usable before hitting the reserve floor.
    pub fn headroom(&self) -> f64 {
        self.soc - self.reserve
    }
}

/// How much to charge when stopped at a station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChargingPolicy {
    /// Charge just enough to cover the outstanding need (plus reserve),
    /// instantaneously. Never discharges.
    MinimalNeed,
    /// Charge at `rate` percent per time unit for the duration of the wait.
    DurationLimited { rate: f64 },
    /// Charge up to `target` percent, instantaneously. Never discharges.
    FixedTarget { target: f64 },
}

impl ChargingPolicy {
    pub fn validate(&self, reserve: f64) -> Result<(), BatteryError> {
        match *self {
            ChargingPolicy::MinimalNeed => Ok(()),
            ChargingPolicy::DurationLimited { rate } if rate > 0.0 => Ok(()),
            ChargingPolicy::DurationLimited { rate } => Err(BatteryError::BadRate(rate)),
            ChargingPolicy::FixedTarget { target } if target >= reserve && target <= 100.0 => Ok(()),
            ChargingPolicy::FixedTarget { target } => Err(BatteryError::BadTarget(target)),
        }
    }
}

/// Caller-supplied situation at a charging stop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeContext {
    /// Energy (percent) still required to complete the trip from here.
    pub remaining_need: f64,
    /// Time the vehicle will spend stopped here.
    pub wait: f64,
}

/// Whether a walk can be driven on the given battery without charging.
///
/// Evaluates the energy constraint directly: charge is decremented leg by
/// leg and must never dip below the reserve. For a chargeless path this is
/// exactly "total consumed energy <= usable charge".
pub fn energy_feasible(
    path: &PathSelection,
    net: &Network,
    battery: BatteryState,
) -> Result<bool, NetworkError> {
    let mut soc = battery.soc;
    for eid in path.edge_ids() {
        soc -= net.edge(eid)?.energy;
        if soc < battery.reserve {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Drives one edge: the charge drops by the edge's energy. Dropping below
/// zero means the vehicle stops mid-arc and is an error; reserve checks are
/// the caller's planning concern.
pub fn apply_traversal(
    battery: BatteryState,
    edge: crate::network::EdgeId,
    net: &Network,
) -> Result<BatteryState, BatteryError> {
    let energy = net.edge(edge).map_err(BatteryError::Network)?.energy;
    let soc = battery.soc - energy;
    if soc < 0.0 {
        return Err(BatteryError::Stranded { edge, soc: battery.soc, energy });
    }
    Ok(BatteryState { soc, reserve: battery.reserve })
}

/// Charges at a station per policy. Returns the new state and the amount
/// charged (>= 0; policies never discharge). Minimal-need and fixed-target
/// are idempotent for a fixed context.
pub fn charge(
    battery: BatteryState,
    policy: ChargingPolicy,
    context: ChargeContext,
) -> (BatteryState, f64) {
    let old = battery.soc;
    let new = match policy {
        ChargingPolicy::MinimalNeed => {
            old.max((context.remaining_need + battery.reserve).min(100.0))
        }
        ChargingPolicy::DurationLimited { rate } => (old + rate * context.wait).min(100.0),
        ChargingPolicy::FixedTarget { target } => old.max(target),
    };
    (BatteryState { soc: new, reserve: battery.reserve }, new - old)
}

#[derive(Debug, Error)]
pub enum BatteryError {
    #[error("invalid battery state: soc {soc}, reserve {reserve}")]
    BadState { soc: f64, reserve: f64 },
    #[error("charging rate must be positive, got {0}")]
    BadRate(f64),
    #[error("charging target {0} outside [reserve, 100]")]
    BadTarget(f64),
    #[error("stranded on edge {edge}: soc {soc} cannot cover energy {energy}")]
    Stranded { edge: crate::network::EdgeId, soc: f64, energy: f64 },
    #[error(transparent)]
    Network(NetworkError),
}
