use std::fs;
use std::path::Path;

use serde_json::Value;

use mimred::cli::run_with;
use mimred::doc::{to_json, GraphDocument};
use mimred::graph::Graph;
use mimred::wgraph::WeightedGraph;

const FOUR_COPIES: &str = "p cnf 3 4\n1 2 3 0\n1 2 3 0\n1 2 3 0\n1 2 3 0\n";

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn mimred(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("mimred").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn diagnostic(r: &Run) -> Value {
    serde_json::from_str(r.err.trim()).unwrap_or_else(|e| panic!("{e}: {}", r.err))
}

#[test]
fn nae_solve_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    fs::write(&cnf, FOUR_COPIES).unwrap();
    let r = mimred(&["nae", "solve", p(&cnf)]);
    assert_eq!((r.code, r.out.as_str()), (0, "FFT\n"));
    assert_eq!(mimred(&["nae", "check", p(&cnf), "--assignment", "TFT"]).out, "true\n");
    let r = mimred(&["nae", "check", p(&cnf), "--assignment", "TTT"]);
    assert_eq!((r.code, r.out.as_str()), (1, "false\n"));

    let fano = dir.path().join("fano.cnf");
    fs::write(&fano, "p cnf 7 7\n1 2 3 0\n1 4 5 0\n1 6 7 0\n2 4 6 0\n2 5 7 0\n3 4 7 0\n3 5 6 0\n").unwrap();
    let r = mimred(&["nae", "solve", p(&fano), "--lax"]);
    assert_eq!((r.code, r.out.as_str()), (1, "unsatisfiable\n"));
    let r = mimred(&["nae", "solve", p(&fano)]);
    assert_eq!(r.code, 3);
    assert_eq!(diagnostic(&r)["exit_code"], 3);
}

#[test]
fn step_one_witness_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    fs::write(&cnf, FOUR_COPIES).unwrap();
    let h = dir.path().join("H.json");
    let ord = dir.path().join("order.json");
    assert_eq!(mimred(&["reduce", "step1", "-i", p(&cnf), "-o", p(&h)]).code, 0);
    assert_eq!(mimred(&["witness", "order", "-i", p(&h), "-o", p(&ord)]).code, 0);
    let r = mimred(&["balance", "check", "-i", p(&h), "--threshold", "36", "--order", p(&ord)]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["balancing"], true);
    let r = mimred(&["balance", "check", "-i", p(&h), "--threshold", "35", "--order", p(&ord)]);
    assert_eq!(r.code, 1);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert!(v["violation"].is_object());
    assert_eq!(mimred(&["witness", "decode", "-i", p(&h), "--order", p(&ord)]).out, "FFT\n");

    let pm = dir.path().join("pm.json");
    assert_eq!(mimred(&["witness", "path-mapping", "--order", p(&ord), "-o", p(&pm)]).code, 0);
    let r = mimred(&["balance", "check", "-i", p(&h), "--threshold", "36", "--mapping", p(&pm)]);
    assert_eq!(r.code, 0, "{}", r.err);
}

#[test]
fn layout_pipeline_on_a_single_edge() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("H.json");
    fs::write(&h, to_json(&GraphDocument::from_weighted(&WeightedGraph::from_edges(2, &[(0, 1, 3)]).unwrap())))
        .unwrap();
    let g = dir.path().join("G.json");
    let gs = dir.path().join("Gstar.json");
    let ord = dir.path().join("order.json");
    let cat = dir.path().join("cat.json");
    let grouped = dir.path().join("grouped.json");
    let mapping = dir.path().join("mapping.json");
    let projected = dir.path().join("projected.json");
    fs::write(&ord, "[1, 0]").unwrap();
    for args in [
        vec!["reduce", "step2", "-i", p(&h), "-o", p(&g)],
        vec!["reduce", "step3", "--profile", "small", "-i", p(&g), "-o", p(&gs)],
        vec!["witness", "caterpillar", "-i", p(&gs), "--order", p(&ord), "-o", p(&cat)],
        vec!["layout", "group", "-i", p(&gs), "--layout", p(&cat), "-o", p(&grouped)],
        vec!["layout", "to-mapping", "-i", p(&gs), "--hybrid", p(&grouped), "-o", p(&mapping)],
        vec!["layout", "project", "-i", p(&g), "--mapping", p(&mapping), "-o", p(&projected)],
    ] {
        let r = mimred(&args);
        assert_eq!(r.code, 0, "{args:?}: {}", r.err);
    }
    let r = mimred(&["width", "value", "-i", p(&gs), "--layout", p(&cat), "--kind", "mim"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert!(v["value"].as_u64().unwrap() >= 1);
    let m: Value = serde_json::from_str(&fs::read_to_string(&projected).unwrap()).unwrap();
    assert_eq!(m["placement"].as_array().unwrap().len(), 2);
}

#[test]
fn widths_and_cuts() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = dir.path().join("c5.json");
    fs::write(&c5, to_json(&GraphDocument::from_plain(&Graph::cycle(5)))).unwrap();
    let r = mimred(&["width", "exact", "-i", p(&c5), "--kind", "mim", "--linear"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["value"], 2);
    let r = mimred(&["width", "exact", "-i", p(&c5), "--kind", "sim", "--cap", "3"]);
    assert_eq!(r.code, 3);
    assert_eq!(diagnostic(&r)["error"], "validation");

    let cut = dir.path().join("cut.json");
    fs::write(&cut, r#"{"a": [0, 1], "b": [2, 3, 4]}"#).unwrap();
    let r = mimred(&["cutval", "-i", p(&c5), "--kind", "mim", "--cut", p(&cut)]);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!((r.code, v["value"].as_u64()), (0, Some(2)));
    let r = mimred(&["cutval", "-i", p(&c5), "--kind", "sim", "--cut", p(&cut), "--budget", "0"]);
    assert_eq!(r.code, 4);
    assert_eq!(diagnostic(&r)["error"], "budget");
}

#[test]
fn gen_is_deterministic_and_strict() {
    let a = mimred(&["gen", "--n", "6", "--seed", "5"]);
    let b = mimred(&["gen", "--n", "6", "--seed", "5"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.out, b.out);
    mimred::formula::parse_nae_dimacs(&a.out, true).unwrap();
}

#[test]
fn usage_errors() {
    assert_eq!(mimred(&["frobnicate"]).code, 2);
    assert_eq!(mimred(&["nae", "solve", "/nonexistent/f.cnf"]).code, 2);
    assert_eq!(mimred(&["reduce", "all", "-i", "/nonexistent/f.cnf"]).code, 2);
    let r = mimred(&["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("reduce"));
}
