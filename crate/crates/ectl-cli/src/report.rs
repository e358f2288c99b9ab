//! Report rendering: the human-readable layout and the stable JSON
//! schema `{formula, states: [{name, verdict, witness?}], diagnostics}`.

use ectl::checker::{CheckResult, Witness};
use serde::Serialize;

pub struct StateVerdict {
    pub name: String,
    pub verdict: bool,
    pub witness: Option<Witness>,
}

#[derive(Serialize)]
pub struct JsonReport {
    pub formula: String,
    pub states: Vec<JsonState>,
    pub diagnostics: JsonDiagnostics,
}

#[derive(Serialize)]
pub struct JsonState {
    pub name: String,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<JsonWitness>,
}

#[derive(Serialize)]
pub struct JsonWitness {
    pub actions: Vec<String>,
    pub states: Vec<String>,
}

#[derive(Serialize)]
pub struct JsonDiagnostics {
    pub wall_ms: u128,
    pub nodes: Vec<JsonNode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
}

#[derive(Serialize)]
pub struct JsonNode {
    pub subformula: String,
    pub engine: String,
    pub kind: String,
    pub det_states_before: Option<usize>,
    pub det_states_after: Option<usize>,
    pub product_controls: usize,
    pub product_rules: usize,
    pub saturation_edges: usize,
    pub wall_ms: u128,
}

#[derive(Serialize)]
pub struct OracleSummary {
    pub depth: usize,
    pub agreed: usize,
    pub unknown: usize,
    pub disagreements: Vec<String>,
}

pub fn build_json(
    formula: &str,
    rows: &[StateVerdict],
    result: &CheckResult,
    oracle: Option<OracleSummary>,
) -> JsonReport {
    JsonReport {
        formula: formula.to_string(),
        states: rows
            .iter()
            .map(|r| JsonState {
                name: r.name.clone(),
                verdict: r.verdict,
                witness: r.witness.as_ref().map(|w| JsonWitness {
                    actions: w.actions.clone(),
                    states: w.states.clone(),
                }),
            })
            .collect(),
        diagnostics: JsonDiagnostics {
            wall_ms: result.wall_ms,
            nodes: result
                .nodes
                .iter()
                .map(|n| JsonNode {
                    subformula: n.subformula.clone(),
                    engine: n.engine.to_string(),
                    kind: n.kind.to_string(),
                    det_states_before: n.det_states_before,
                    det_states_after: n.det_states_after,
                    product_controls: n.product_controls,
                    product_rules: n.product_rules,
                    saturation_edges: n.saturation_edges,
                    wall_ms: n.wall_ms,
                })
                .collect(),
            oracle,
        },
    }
}

pub fn render_witness(w: &Witness) -> String {
    let mut out = String::new();
    for (i, s) in w.states.iter().enumerate() {
        if i > 0 {
            out.push_str(&format!(" -{}-> ", w.actions[i - 1]));
        }
        out.push_str(s);
    }
    out
}

/// One top-level conjunct with its verdict at every queried state, shown
/// when the root formula is a conjunction and a table was requested.
pub struct ConjunctRow {
    pub formula: String,
    pub verdicts: Vec<(String, bool)>,
}

pub fn render_text(
    formula: &str,
    rows: &[StateVerdict],
    result: &CheckResult,
    table: bool,
    conjuncts: &[ConjunctRow],
) -> String {
    let mut out = String::new();
    out.push_str(&format!("formula: {formula}\n"));
    for r in rows {
        out.push_str(&format!("{}: {}\n", r.name, if r.verdict { "holds" } else { "fails" }));
        if let Some(w) = &r.witness {
            out.push_str(&format!("  witness: {}\n", render_witness(w)));
        }
    }
    if !conjuncts.is_empty() {
        out.push_str("\nconjuncts:\n");
        for (i, c) in conjuncts.iter().enumerate() {
            out.push_str(&format!("  ({}) {}\n", i + 1, c.formula));
            for (state, holds) in &c.verdicts {
                out.push_str(&format!(
                    "      {state}: {}\n",
                    if *holds { "holds" } else { "fails" }
                ));
            }
        }
    }
    if table {
        out.push('\n');
        out.push_str(&format!(
            "{:<40} {:<18} {:<5} {:>9} {:>13} {:>9} {:>6}\n",
            "subformula", "engine", "kind", "det", "product", "edges", "ms"
        ));
        for n in &result.nodes {
            let det = match (n.det_states_before, n.det_states_after) {
                (Some(b), Some(a)) => format!("{b}->{a}"),
                _ => "-".to_string(),
            };
            out.push_str(&format!(
                "{:<40} {:<18} {:<5} {:>9} {:>13} {:>9} {:>6}\n",
                n.subformula,
                n.engine,
                n.kind.to_string(),
                det,
                format!("{}x{}", n.product_controls, n.product_rules),
                n.saturation_edges,
                n.wall_ms
            ));
        }
        out.push_str(&format!("total wall time: {} ms\n", result.wall_ms));
    }
    out
}
