//! Routing engine for electric vehicles on stochastic, time-dependent road
//! networks with charging stations.
//!
//! The network model is an undirected graph whose arcs carry an energy cost
//! (percent of battery), an incident-free traversal probability, and a
//! piecewise-constant travel-time profile over a fixed grid of time
//! intervals. Three planners are provided:
//!
//! - [`routing::route_fifo`] — greedy forward walk for a driver who departs
//!   immediately and never waits en route.
//! - [`routing::route_dot`] — decreasing-order-of-time backward scheduling
//!   from a destination deadline (no waiting).
//! - [`routing::route_wsdot`] — waited-search DOT, which inserts deliberate
//!   waits at interval boundaries whenever doing so strictly shortens the
//!   incoming arc's travel time, charging at stations during waits.
//!
//! Forward planning indexes arc times by the departure interval; backward
//! planning indexes by the arrival interval. The asymmetry is deliberate and
//! load-bearing: it is what makes waiting (and even departing later) able to
//! shorten a trip on non-FIFO arcs. See [`time`] for the conventions and
//! [`oracle`] for independent brute-force and Monte Carlo validators.

pub mod battery;
pub mod network;
pub mod oracle;
pub mod routing;
pub mod time;

pub use battery::{BatteryState, ChargeContext, ChargingPolicy};
pub use network::{Edge, Network, NodeId, EdgeId, PathSelection, TimeGrid};
pub use routing::{DriverPreference, Itinerary, Leg};
