use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn expander(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expander"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("expander-cli-test-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_graph(name: &str, gen_args: &[&str]) -> String {
    let out = expander(&[&["gen"], gen_args].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let path = scratch(name);
    fs::write(&path, &out.stdout).unwrap();
    path.to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn gen_then_spectrum() {
    let c6 = write_graph("c6.txt", &["cycle", "6"]);
    let report = json(&expander(&["spectrum", &c6]));
    assert_eq!(report["command"], "spectrum");
    assert_eq!(report["config"]["global"]["seed"], 0);
    assert!((report["result"]["lambda"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(report["result"]["bipartite"], true);
}

#[test]
fn edge_list_output_round_trips() {
    let pet = write_graph("petersen.txt", &["petersen"]);
    let text = fs::read_to_string(&pet).unwrap();
    let again = expander(&["gen", "petersen"]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
    let dot = expander(&["gen", "petersen", "--format", "dot"]);
    assert!(String::from_utf8(dot.stdout).unwrap().contains("graph"));
}

#[test]
fn exit_codes() {
    // clap usage error
    assert_eq!(expander(&["spectrum"]).status.code(), Some(2));
    // validation: a cycle needs three vertices
    assert_eq!(expander(&["gen", "cycle", "2"]).status.code(), Some(2));
    // missing file
    assert_eq!(expander(&["spectrum", "/nonexistent/graph.txt"]).status.code(), Some(1));
    // exact Cheeger beyond the exhaustive cap is a resource error, not a silent fallback
    let c30 = write_graph("c30.txt", &["cycle", "30"]);
    let out = expander(&["cheeger", &c30]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    let heuristic = json(&expander(&["cheeger", &c30, "--heuristic"]));
    assert!(heuristic["result"]["h"].as_f64().unwrap() > 0.0);
    // DOT needs a graph payload
    assert_eq!(expander(&["spectrum", &c30, "--format", "dot"]).status.code(), Some(2));
}

#[test]
fn cover_verify_and_deck_from_files() {
    let c6 = write_graph("cov-c6.txt", &["cycle", "6"]);
    let c3 = write_graph("cov-c3.txt", &["cycle", "3"]);
    let vmap = scratch("vmap.txt");
    fs::write(&vmap, "0 1 2 0 1 2\n").unwrap();
    let vmap = vmap.to_string_lossy().into_owned();
    let v = json(&expander(&["cover", "verify", &c6, &c3, &vmap]));
    assert_eq!(v["result"]["verified"], true);
    assert_eq!(v["result"]["fiber_size"], 2);
    let d = json(&expander(&["cover", "deck", &c6, &c3, &vmap]));
    assert_eq!(d["result"]["cover"]["deck_order"], 2);
    assert_eq!(d["result"]["free"], true);

    let bad = scratch("bad-vmap.txt");
    fs::write(&bad, "0 0 0 0 0 0").unwrap();
    let v = json(&expander(&["cover", "verify", &c6, &c3, &bad.to_string_lossy()]));
    assert_eq!(v["result"]["verified"], false);
    assert_eq!(v["result"]["violation"]["kind"], "edge_not_preserved");
}

#[test]
fn quotient_by_left_translation_subgroup_action_file() {
    let c6 = write_graph("q-c6.txt", &["cycle", "6"]);
    let action = scratch("rot3.json");
    fs::write(&action, r#"{"generators": [[3, 4, 5, 0, 1, 2]]}"#).unwrap();
    let q = json(&expander(&["cover", "quotient", &c6, "--action", &action.to_string_lossy()]));
    assert_eq!(q["result"]["is_cover"], true);
    let dot = expander(&["cover", "quotient", &c6, "--action", &action.to_string_lossy(), "--format", "dot"]);
    assert!(dot.status.success());
}

#[test]
fn kernel_commands() {
    let c4 = write_graph("k-c4.txt", &["cycle", "4"]);
    let cnd = json(&expander(&["kernel", "cnd", "--graph", &c4, "--exponent", "2"]));
    assert_eq!(cnd["result"]["is_cnd"], false);
    let cnd = json(&expander(&["kernel", "cnd", "--graph", &c4]));
    assert_eq!(cnd["result"]["is_cnd"], true);

    let c6 = write_graph("k-c6.txt", &["cayley", "cyclic:6"]);
    let cert = json(&expander(&["kernel", "bound-cert", "--graph", &c6, "--left-translation", "cyclic:6"]));
    assert_eq!(cert["result"]["holds"], true);
    let inv = json(&expander(&["kernel", "invariance", "--graph", &c6, "--left-translation", "cyclic:6"]));
    assert_eq!(inv["result"]["invariant"], true);

    let kernel = scratch("kernel.txt");
    fs::write(&kernel, "0 1 4\n1 0 1\n4 1 0\n").unwrap();
    let q = json(&expander(&["kernel", "quasi-triangle", "--kernel", &kernel.to_string_lossy()]));
    assert_eq!(q["result"]["holds"], true);

    let p3 = write_graph("k-p3.txt", &["path", "3"]);
    let r = json(&expander(&["kernel", "roundness", &p3]));
    assert!((r["result"]["q_upper"].as_f64().unwrap() - 2.0).abs() < 1e-3);
}

#[test]
fn replacement_and_automorphisms() {
    let out = scratch("k33.txt");
    let r = json(&expander(&[
        "replace-kpq",
        "--group",
        "cyclic:7",
        "--gens",
        "1,-1,2,-2,3,-3",
        "-p",
        "3",
        "-q",
        "3",
        "--graph-out",
        &out.to_string_lossy(),
    ]));
    assert_eq!(r["result"]["n"], 21);
    assert_eq!(r["result"]["translation_action"]["free"], true);
    let t = json(&expander(&["aut", "transitive", &out.to_string_lossy(), "--cap-aut", "32"]));
    assert_eq!(t["result"]["orbits"].as_array().unwrap().len(), 3);

    let k23 = write_graph("k23.txt", &["kpq", "2", "3"]);
    let g = json(&expander(&["aut", "group", &k23]));
    assert_eq!(g["result"]["order"], 12);
}

#[test]
fn family_csv_and_manifest() {
    let out = expander(&["family", "primes", "--dim", "2", "--primes", "3,5", "--format", "csv"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("name,n,k,lambda,gap,h_lo,h_hi,c,cover_verified"));
    assert_eq!(csv.lines().count(), 3);

    write_graph("m-c5.txt", &["cycle", "5"]);
    write_graph("m-k4.txt", &["complete", "4"]);
    let manifest = scratch("family.json");
    fs::write(&manifest, r#"{"paths": ["m-c5.txt", "m-k4.txt"]}"#).unwrap();
    let r = json(&expander(&["family", "manifest", &manifest.to_string_lossy()]));
    assert_eq!(r["result"]["rows"].as_array().unwrap().len(), 2);
    // no covers, so only the uniform-gap verdict is issued
    assert!(r["result"]["tau_verdict"].is_null());
    assert_eq!(r["result"]["uniform_gap_verdict"], true);
}

#[test]
fn folner_and_text_output() {
    let t = write_graph("torus4.txt", &["torus", "4", "4"]);
    let out = expander(&["folner", &t, "--max-size", "8", "--mode", "greedy", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("result.ratio = "));
    assert!(text.contains("config.global.seed = 0"));
}
