//! Serializable run summaries and the side-by-side query table.

use serde::{Deserialize, Serialize};

use crate::outcome::{CheckOutcome, Event, Verdict};
use crate::trace::TraceStep;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub engine: String,
    /// `safe`, `unsafe` or `bound_reached`.
    pub verdict: String,
    /// Bound at termination.
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    pub sat_queries: usize,
    pub interpolants: usize,
    pub restarts: usize,
    /// Seconds.
    pub wall_time: f64,
    pub trace: Option<Vec<TraceStep>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariant: Option<String>,
    pub iterations: Vec<Event>,
}

impl RunReport {
    pub fn from_outcome(engine: &str, out: &CheckOutcome) -> Self {
        let (verdict, method) = match &out.verdict {
            Verdict::Safe { method, .. } => ("safe", Some(method.clone())),
            Verdict::Unsafe { .. } => ("unsafe", None),
            Verdict::BoundReached { .. } => ("bound_reached", None),
        };
        RunReport {
            engine: engine.to_string(),
            verdict: verdict.to_string(),
            k: out.verdict.k(),
            method,
            sat_queries: out.stats.sat_queries,
            interpolants: out.stats.interpolants,
            restarts: out.stats.restarts,
            wall_time: out.stats.wall_time.as_secs_f64(),
            trace: out.verdict.trace().map(|t| t.0.clone()),
            invariant: out.invariant.as_ref().map(ToString::to_string),
            iterations: out.events.clone(),
        }
    }
}

const HEADER: [&str; 7] = ["engine", "k", "i", "query", "result", "interpolant", "Q"];

/// One row per logged query of every report, in a plain aligned table.
pub fn render_compare(reports: &[RunReport]) -> String {
    let mut rows: Vec<[String; 7]> = vec![HEADER.map(String::from)];
    for r in reports {
        for e in &r.iterations {
            rows.push([
                r.engine.clone(),
                e.k.to_string(),
                e.iteration
                    .map(|i| i.to_string())
                    .unwrap_or_else(|| "-".into()),
                e.query.to_string(),
                e.result.to_string(),
                e.interpolant.clone().unwrap_or_else(|| "-".into()),
                e.q.clone().unwrap_or_else(|| "-".into()),
            ]);
        }
    }
    let mut width = [0; 7];
    for row in &rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for (n, row) in rows.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(width)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join(" | ").trim_end());
        out.push('\n');
        if n == 0 {
            let rule: Vec<String> = width.iter().map(|&w| "-".repeat(w)).collect();
            out.push_str(&rule.join("-+-"));
            out.push('\n');
        }
    }
    out
}
