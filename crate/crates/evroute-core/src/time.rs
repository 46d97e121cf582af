//! Interval indexing, travel-time evaluation, and FIFO-property analysis.
//!
//! Two indexing senses coexist on purpose. Forward planning quotes an arc by
//! the interval of the *departure* instant (`floor(t/delta) + 1`); backward
//! planning quotes by the interval of the *arrival* instant (`ceil(a/delta)`).
//! The same physical trip therefore evaluates differently in the two senses,
//! and the backward sense is what lets a later arrival interval carry a
//! cheaper time. We reproduce the asymmetry rather than unify it.
//!
//! Quotes beyond the horizon clamp to interval K; before the horizon to
//! interval 1, so quoting is total.

use serde::{Deserialize, Serialize};

use crate::network::{EdgeId, Network, NetworkError};

/// One evaluated traversal of an edge: which interval priced it and the
/// resulting departure/arrival pair. `arrive - depart == duration` always;
/// a backward quote may have `depart < 0`, which signals "before horizon
/// start" to callers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraversalQuote {
    pub edge: EdgeId,
    /// 1-based interval that priced the traversal.
    pub index_used: usize,
    pub duration: f64,
    pub depart: f64,
    pub arrive: f64,
}

/// Quote an edge for a departure at time `depart` (departure-indexed).
pub fn forward_quote(net: &Network, edge: EdgeId, depart: f64) -> Result<TraversalQuote, NetworkError> {
    let e = net.edge(edge)?;
    let index_used = net.grid.forward_index(depart);
    let duration = e.times[index_used - 1];
    Ok(TraversalQuote { edge, index_used, duration, depart, arrive: depart + duration })
}

/// Quote an edge for an arrival at time `arrive` (arrival-indexed), deriving
/// the departure as `arrive - duration`.
pub fn backward_quote(net: &Network, edge: EdgeId, arrive: f64) -> Result<TraversalQuote, NetworkError> {
    let e = net.edge(edge)?;
    let index_used = net.grid.backward_index(arrive);
    let duration = e.times[index_used - 1];
    Ok(TraversalQuote { edge, index_used, duration, depart: arrive - duration, arrive })
}

/// Adjacent interval pair `(k, k+1)` on which an edge violates the FIFO
/// property at interval granularity: departing a full interval earlier
/// arrives strictly later, i.e. `times[k] > delta + times[k+1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FifoViolation {
    pub interval: usize,
    pub next_interval: usize,
}

/// All adjacent-interval FIFO violations of one edge. An edge whose times
/// decrease by at most `delta` per step is FIFO at this granularity.
pub fn check_fifo(net: &Network, edge: EdgeId) -> Result<Vec<FifoViolation>, NetworkError> {
    let e = net.edge(edge)?;
    let delta = net.grid.delta;
    Ok(e.times
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] > delta + w[1])
        .map(|(i, _)| FifoViolation { interval: i + 1, next_interval: i + 2 })
        .collect())
}

/// Per-edge FIFO report for a whole network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FifoReport {
    pub is_fifo: bool,
    /// `(edge, violations)` for every edge, in edge-id order; the violation
    /// list is empty for FIFO edges.
    pub edges: Vec<(EdgeId, Vec<FifoViolation>)>,
}

/// Conjunction of [`check_fifo`] over all edges.
pub fn network_is_fifo(net: &Network) -> FifoReport {
    let edges: Vec<(EdgeId, Vec<FifoViolation>)> = net
        .edges()
        .map(|e| (e.id, check_fifo(net, e.id).expect("edge came from this network")))
        .collect();
    let is_fifo = edges.iter().all(|(_, v)| v.is_empty());
    FifoReport { is_fifo, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_network;

    const SUBGRAPH: &str = include_str!("../../../fixtures/central-arkansas-subgraph.json");
    const FIXTURE: &str = include_str!("../../../fixtures/central-arkansas.json");

    fn subgraph() -> Network {
        parse_network(SUBGRAPH).unwrap()
    }

    #[test]
    fn forward_quotes_match_fixture_trips() {
        let net = subgraph();
        let q = forward_quote(&net, 1, 0.0).unwrap();
        assert_eq!((q.index_used, q.duration), (1, 1.48));
        let q = forward_quote(&net, 3, 3.10).unwrap();
        assert_eq!((q.index_used, q.duration), (2, 1.13));
        // beyond the horizon clamps to interval K
        let q = forward_quote(&net, 1, 1000.0).unwrap();
        assert_eq!((q.index_used, q.duration), (8, 1.08));
    }

    #[test]
    fn forward_boundary_belongs_to_later_interval() {
        let net = subgraph();
        assert_eq!(forward_quote(&net, 1, 2.0).unwrap().index_used, 2);
        assert_eq!(forward_quote(&net, 1, 1.9999).unwrap().index_used, 1);
    }

    #[test]
    fn backward_quotes_match_fixture_trips() {
        let net = subgraph();
        let q = backward_quote(&net, 4, 16.0).unwrap();
        assert_eq!((q.index_used, q.duration), (8, 1.20));
        assert!((q.depart - 14.8).abs() < 1e-12);

        let q = backward_quote(&net, 2, 14.07).unwrap();
        assert_eq!((q.index_used, q.duration), (8, 0.82));
        assert!((q.depart - 13.25).abs() < 1e-12);

        let q = backward_quote(&net, 1, 13.25).unwrap();
        assert_eq!((q.index_used, q.duration), (7, 1.34));
        assert!((q.depart - 11.91).abs() < 1e-12);

        // an arrival exactly on a boundary maps down via ceil
        let q = backward_quote(&net, 7, 12.0).unwrap();
        assert_eq!((q.index_used, q.duration), (6, 0.69));
    }

    #[test]
    fn forward_and_backward_senses_disagree_by_design() {
        // a backward quote's departure instant can sit in a different
        // interval than the one that priced the traversal
        let net = subgraph();
        let q = backward_quote(&net, 2, 14.07).unwrap();
        assert_eq!(q.index_used, 8);
        assert_eq!(net.grid.forward_index(q.depart), 7);
        assert!((q.arrive - q.depart - q.duration).abs() < 1e-12);
    }

    #[test]
    fn backward_depart_may_go_negative() {
        let net = subgraph();
        let q = backward_quote(&net, 1, 1.0).unwrap();
        assert_eq!(q.index_used, 1);
        assert!(q.depart < 0.0);
        assert!((q.arrive - q.depart - q.duration).abs() < 1e-12);
    }

    #[test]
    fn unknown_edge_is_an_error() {
        let net = subgraph();
        assert!(forward_quote(&net, 99, 0.0).is_err());
        assert!(backward_quote(&net, 99, 1.0).is_err());
        assert!(check_fifo(&net, 99).is_err());
    }

    #[test]
    fn edge_6_violates_fifo_at_pair_4_5() {
        let net = subgraph();
        let violations = check_fifo(&net, 6).unwrap();
        assert_eq!(violations, vec![FifoViolation { interval: 4, next_interval: 5 }]);
        // behavioral witness: departing at 7.99 arrives later than at 8.01
        let early = forward_quote(&net, 6, 7.99).unwrap();
        let late = forward_quote(&net, 6, 8.01).unwrap();
        assert!((early.arrive - 13.75).abs() < 1e-9);
        assert!((late.arrive - 8.70).abs() < 1e-9);
        assert!(early.arrive > late.arrive);
    }

    #[test]
    fn constant_times_are_fifo() {
        let text = r#"{
            "time_grid": {"delta": 2.0, "intervals": 4},
            "nodes": [{"id": 0}, {"id": 1}],
            "edges": [{"id": 1, "u": 0, "v": 1, "energy": 1, "reliability_pct": 99,
                       "times": [1.5, 1.5, 1.5, 1.5]}]
        }"#;
        let net = parse_network(text).unwrap();
        assert!(check_fifo(&net, 1).unwrap().is_empty());
        assert!(network_is_fifo(&net).is_fifo);
    }

    #[test]
    fn increasing_times_are_not_flagged() {
        let net = subgraph();
        // edge 1: t1 = 1.48 < t2 = 1.88, no overtaking across that boundary
        assert!(!check_fifo(&net, 1)
            .unwrap()
            .iter()
            .any(|v| v.interval == 1 && v.next_interval == 2));
    }

    #[test]
    fn fixture_is_non_fifo_because_of_edge_6() {
        let report = network_is_fifo(&parse_network(FIXTURE).unwrap());
        assert!(!report.is_fifo);
        let offenders: Vec<EdgeId> = report
            .edges
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|&(e, _)| e)
            .collect();
        assert_eq!(offenders, vec![6]);
    }

    #[test]
    fn edges_1_to_4_report_no_violations() {
        let net = subgraph().induced_subgraph(&[1, 2, 3, 4]).unwrap();
        let report = network_is_fifo(&net);
        assert!(report.is_fifo);
        assert_eq!(report.edges.len(), 4);
        for (_, violations) in report.edges {
            assert!(violations.is_empty());
        }
    }
}
