use std::process::{Command, Output};

use serde_json::{json as j, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubic-brauer")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn temp_file(name: &str, contents: &str) -> String {
    let path = std::env::temp_dir().join(format!("cubic-brauer-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn census_counts_and_determinism() {
    let v = json(&["census"]);
    assert_eq!(v["lines"], 27);
    assert_eq!(v["tritangent_planes"], 45);
    assert_eq!(v["steiner_pair_types"], j!([20, 10, 90]));
    assert_eq!(v["enneahedra_first_kind"], 40);
    assert_eq!(v["weyl_order"], 51840);
    assert_eq!(run(&["census"]).stdout, run(&["census"]).stdout);
    assert_eq!(json(&["census", "--object", "steiner_pairs", "--type", "II"])["count"], 10);
    assert_eq!(run(&["census", "--object", "planes"]).status.code(), Some(2));
}

#[test]
fn h1_of_named_groups() {
    assert_eq!(json(&["h1", "--named", "U_t"])["h1_invariant_factors"], j!([3]));
    let utt = json(&["h1", "--named", "U_tt"]);
    assert_eq!(utt["h1_invariant_factors"], j!([3, 3]));
    let table = utt["class_map"].as_array().unwrap();
    assert_eq!(table.len(), 8);
    let classes: std::collections::BTreeSet<String> = table.iter().map(|r| r["class"].to_string()).collect();
    assert_eq!(classes.len(), 8);
    assert!(!classes.contains("[0,0]"));
}

#[test]
fn h1_from_generator_file() {
    let identity: Vec<usize> = (0..27).collect();
    let ok = temp_file("id.json", &serde_json::to_string(&[identity.clone()]).unwrap());
    let v = json(&["h1", "--generators", &ok]);
    assert_eq!(v["h1_invariant_factors"], j!([]));
    assert_eq!(v["pic_fixed_rank"], 7);
    // swapping a1 and c12 alone breaks the intersection pairing
    let mut bad = identity;
    bad.swap(0, 12);
    let bad = temp_file("bad.json", &serde_json::to_string(&[bad]).unwrap());
    assert_eq!(run(&["h1", "--generators", &bad]).status.code(), Some(2));
}

#[test]
fn classmap_for_u_tt() {
    let v = json(&["classmap", "--named", "U_tt"]);
    assert_eq!(v["bijective_on_nonzero"], true);
    assert_eq!(v["invariant_decompositions"].as_array().unwrap().len(), 4);
    assert_eq!(run(&["classmap", "--named", "U_t"]).status.code(), Some(2));
}

#[test]
fn descent_auxiliary_polynomial() {
    let v = json(&["descent", "--data", "example1"]);
    assert_eq!(v["auxiliary_polynomial"], "-V^3 - 3*V^2 + 1");
    assert_eq!(v["galois_type"], "A3");
}

#[test]
fn fp_report_from_file() {
    let form = temp_file("ex3.json", &cubic_brauer::fpgeom::forms::example3().to_json());
    let v = json(&["fp-report", "--form", &form, "--p", "7", "--kmax", "3"]);
    assert_eq!(v["points"]["1"], 57);
    assert_eq!(v["smooth"], false);
    let census = v["singular"]["points"].as_array().unwrap();
    assert_eq!(census.len(), 3);
    assert!(census.iter().all(|p| p["degree"] == 3));
}

#[test]
fn search_output() {
    let v = json(&["search", "--form", "example1", "--height", "10", "--oracle", "--samples", "2"]);
    assert_eq!(v["oracle_agrees"], true);
    assert!(v["count"].as_u64().unwrap() >= 2);
    assert_eq!(v["sample_points"].as_array().unwrap().len(), 2);
    assert_eq!(json(&["search", "--form", "cassels_guy", "--height", "50"])["count"], 0);
}

#[test]
fn evaluate_synthetic_instance() {
    let (s, p) = (data("synthetic_surface.json"), data("synthetic_psi.json"));
    let v = json(&["evaluate", "--surface", &s, "--psi", &p, "--point", "2:-4:-1:-4", "--primes", "2,7,13"]);
    assert_eq!(v["adelic_sum"], "0");
    assert_eq!(v["local_values"]["13"], "0");
    assert_ne!(v["local_values"]["7"], "0");
    let partial = run(&["evaluate", "--surface", &s, "--psi", &p, "--point", "2:-4:-1:-4", "--primes", "7"]);
    assert_eq!(partial.status.code(), Some(1));
    let off = run(&["evaluate", "--surface", &s, "--psi", &p, "--point", "1:1:1:1"]);
    assert_eq!(off.status.code(), Some(2));
}

#[test]
fn paper_suite_filter() {
    let v = json(&["--parallel", "1", "paper-suite", "--filter", "lines27"]);
    assert_eq!(v["all_pass"], true);
    let ids: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(ids, vec!["1", "7"]);
    assert_eq!(run(&["paper-suite", "--filter", "nope"]).status.code(), Some(2));
}
