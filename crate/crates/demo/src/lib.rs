//! Browser front end for the reduction checkers. Each export takes plain
//! text and returns a JSON string for the page to render.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use mimred::formula::{brute_force_nae_capped, parse_nae_dimacs};
use mimred::graph::Graph;
use mimred::red1::{build_h_scaled, decode_assignment, witness_order, Constants};
use mimred::wgraph::check_balancing_order;
use mimred::widths::{exact_width, WidthKind};

const FORMULA_CAP: usize = 20;
const WIDTH_BUDGET: u64 = 20_000_000;

#[derive(Serialize)]
struct Solved {
    variables: usize,
    clauses: usize,
    strict: bool,
    assignment: Option<String>,
}

#[derive(Serialize)]
struct Reduced {
    tau: u64,
    vertices: usize,
    edges: usize,
    total_weight: u64,
    assignment: String,
    balancing_at_tau: bool,
    /// The vertex whose weight first exceeds `τ − 1`, if any.
    violation_below_tau: Option<usize>,
    decoded: String,
}

#[derive(Serialize)]
struct Width {
    kind: WidthKind,
    linear: bool,
    value: usize,
    layouts_examined: u64,
    order: Option<Vec<usize>>,
}

fn text<T: Serialize>(x: &T) -> String {
    serde_json::to_string(x).expect("serializable")
}

/// Parses positive NAE-3-SAT in DIMACS form and finds the first satisfying
/// assignment in brute-force order.
pub fn solve_text(cnf: &str) -> Result<String, String> {
    let f = parse_nae_dimacs(cnf, false).map_err(|e| e.to_string())?;
    let a = brute_force_nae_capped(&f, FORMULA_CAP).map_err(|e| e.to_string())?;
    Ok(text(&Solved {
        variables: f.num_vars(),
        clauses: f.clauses().len(),
        strict: f.is_strict(),
        assignment: a.map(|a| a.to_letters()),
    }))
}

/// Builds the weighted graph for a strict formula, places the witness order
/// of a satisfying assignment, checks it, and decodes it back.
pub fn reduce_text(cnf: &str, profile: &str) -> Result<String, String> {
    let c: Constants = profile.parse().map_err(|e: mimred::Error| e.to_string())?;
    let f = parse_nae_dimacs(cnf, true).map_err(|e| e.to_string())?;
    let a = brute_force_nae_capped(&f, FORMULA_CAP)
        .map_err(|e| e.to_string())?
        .ok_or("the formula has no NAE-satisfying assignment")?;
    let h = build_h_scaled(&f, &c).map_err(|e| e.to_string())?;
    let ord = witness_order(&f, &h, &a).map_err(|e| e.to_string())?;
    let at = check_balancing_order(&h.graph, &ord, c.tau).map_err(|e| e.to_string())?;
    let below = check_balancing_order(&h.graph, &ord, c.tau - 1).map_err(|e| e.to_string())?;
    let decoded = decode_assignment(&f, &h, &ord).map_err(|e| e.to_string())?;
    Ok(text(&Reduced {
        tau: c.tau,
        vertices: h.graph.vertex_count(),
        edges: h.graph.edge_count(),
        total_weight: h.graph.total_weight(),
        assignment: a.to_letters(),
        balancing_at_tau: at.is_none(),
        violation_below_tau: below.map(|v| v.vertex),
        decoded: decoded.to_letters(),
    }))
}

/// Edges as `u-v` tokens separated by spaces, commas or newlines.
fn parse_edges(n: usize, edges: &str) -> Result<Graph, String> {
    let mut g = Graph::new(n);
    for tok in edges.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
        let (u, v) = tok.split_once('-').ok_or_else(|| format!("expected u-v, got {tok:?}"))?;
        let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad vertex in {tok:?}"));
        g.add_edge(parse(u)?, parse(v)?).map_err(|e| e.to_string())?;
    }
    Ok(g)
}

/// Exact mim/sim/omim-width (linear or general) of a small graph.
pub fn width_text(n: usize, edges: &str, kind: &str, linear: bool) -> Result<String, String> {
    let g = parse_edges(n, edges)?;
    let kind: WidthKind = kind.parse().map_err(|e: mimred::Error| e.to_string())?;
    let cap = if linear { 12 } else { 8 };
    let r = exact_width(&g, kind, linear, cap, WIDTH_BUDGET).map_err(|e| e.to_string())?;
    // Caterpillar leaves are numbered along the spine.
    let order = linear.then(|| {
        let mut vs: Vec<usize> = (0..n).collect();
        vs.sort_by_key(|&v| r.witness.leaf_of[v]);
        vs
    });
    Ok(text(&Width { kind, linear, value: r.value, layouts_examined: r.explored, order }))
}

#[wasm_bindgen]
pub fn solve(cnf: &str) -> Result<String, JsError> {
    solve_text(cnf).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn reduce(cnf: &str, profile: &str) -> Result<String, JsError> {
    reduce_text(cnf, profile).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn width(n: usize, edges: &str, kind: &str, linear: bool) -> Result<String, JsError> {
    width_text(n, edges, kind, linear).map_err(|e| JsError::new(&e))
}
