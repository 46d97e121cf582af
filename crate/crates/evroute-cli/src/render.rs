//! Plain-text tables for itineraries and ranked route listings.
//!
//! Itinerary tables follow the row layout of the engine's result reports:
//! one column per leg plus a totals column, with rows for the route, leg
//! times, waiting (when any), cumulative clock, consumption, state of
//! charge, and reliability. Totals are recomputed from the legs at print
//! time, never read from cached aggregates.

use evroute_core::network::Network;
use evroute_core::routing::{Itinerary, RankedRoute};

fn fmt(x: f64) -> String {
    // two decimals, trimming a trailing zero pair like "16.00" -> "16"
    let s = format!("{x:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn row(cells: &[String], widths: &[usize]) -> String {
    let mut line = String::new();
    for (i, cell) in cells.iter().enumerate() {
        if i > 0 {
            line.push_str("  ");
        }
        line.push_str(&format!("{:<width$}", cell, width = widths[i]));
    }
    line.trim_end().to_string()
}

pub fn itinerary_table(it: &Itinerary, net: &Network) -> String {
    if it.legs.is_empty() {
        return format!("already at destination {} (soc {}%)\n", it.destination, fmt(it.final_soc));
    }
    let has_waits = it.legs.iter().any(|l| l.wait_before > 0.0);

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["Route".to_string()];
    header.extend(it.legs.iter().map(|l| format!("{}-{}", l.from, l.to)));
    header.push("Total".to_string());
    rows.push(header);

    let travel_time: f64 = it.legs.iter().map(|l| l.duration).sum();
    let total_wait: f64 = it.legs.iter().map(|l| l.wait_before).sum();
    let elapsed = it.legs.last().unwrap().arrive - (it.legs.first().unwrap().depart - it.legs.first().unwrap().wait_before);
    let reliability: f64 = it
        .legs
        .iter()
        .map(|l| net.edge(l.edge).map(|e| e.reliability).unwrap_or(1.0))
        .product();
    let consumption: f64 = it
        .legs
        .iter()
        .map(|l| net.edge(l.edge).map(|e| e.energy).unwrap_or(0.0))
        .sum();

    let mut time_row = vec!["Time".to_string()];
    time_row.extend(it.legs.iter().map(|l| fmt(l.duration)));
    time_row.push(fmt(travel_time));
    rows.push(time_row);

    if has_waits {
        let mut wait_row = vec!["Waiting time".to_string()];
        wait_row.extend(it.legs.iter().map(|l| fmt(l.wait_before)));
        wait_row.push(fmt(total_wait));
        rows.push(wait_row);
    }

    let mut clock_row = vec!["Travel time".to_string()];
    clock_row.extend(it.legs.iter().map(|l| fmt(l.arrive)));
    clock_row.push(if has_waits {
        format!("{}, {}", fmt(elapsed), fmt(travel_time))
    } else {
        fmt(elapsed)
    });
    rows.push(clock_row);

    let mut consumption_row = vec!["Consumption".to_string()];
    consumption_row.extend(
        it.legs
            .iter()
            .map(|l| format!("{}%", fmt(net.edge(l.edge).map(|e| e.energy).unwrap_or(0.0)))),
    );
    consumption_row.push(format!("{}%", fmt(consumption)));
    rows.push(consumption_row);

    let mut soc_row = vec!["SOC".to_string()];
    soc_row.extend(it.legs.iter().map(|l| format!("{}%", fmt(l.soc_before))));
    soc_row.push(format!("{}%", fmt(it.legs.last().unwrap().soc_after)));
    rows.push(soc_row);

    let mut rel_row = vec!["Reliability".to_string()];
    rel_row.extend(
        it.legs
            .iter()
            .map(|l| format!("{}%", fmt(net.edge(l.edge).map(|e| e.reliability).unwrap_or(1.0) * 100.0))),
    );
    rel_row.push(format!("{}%", fmt(reliability * 100.0)));
    rows.push(rel_row);

    let columns = rows[0].len();
    let widths: Vec<usize> = (0..columns)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in &rows {
        out.push_str(&row(r, &widths));
        out.push('\n');
    }
    out.push_str(&format!(
        "departs {} at {}, arrives {} at {}\n",
        it.origin,
        fmt(it.legs.first().unwrap().depart - it.legs.first().unwrap().wait_before),
        it.destination,
        fmt(it.legs.last().unwrap().arrive),
    ));
    out
}

pub fn paths_table(ranked: &[RankedRoute], net: &Network) -> String {
    let mut rows: Vec<Vec<String>> = vec![vec![
        "#".into(),
        "Route".into(),
        "Travel time".into(),
        "Energy".into(),
        "Reliability".into(),
    ]];
    for (i, r) in ranked.iter().enumerate() {
        let nodes = r.path.nodes(net).expect("ranked path is a walk");
        let route = nodes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("-");
        rows.push(vec![
            (i + 1).to_string(),
            route,
            fmt(r.metrics.travel_time),
            format!("{}%", fmt(r.metrics.energy)),
            format!("{}%", fmt(r.metrics.reliability * 100.0)),
        ]);
    }
    let columns = rows[0].len();
    let widths: Vec<usize> = (0..columns)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in &rows {
        out.push_str(&row(r, &widths));
        out.push('\n');
    }
    out
}
