use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use comblab::comb::{compile, Circuit, Comb};
use comblab::constructions::{example_w_comb, ghz_state};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_comblab"))
}

fn workdir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("comblab-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_w_comb_passes_with_zero_residual() {
    let d = workdir("verify");
    let file = d.join("w-comb.json");
    std::fs::write(&file, example_w_comb().to_json()).unwrap();
    let rep = d.join("report.json");
    let o = run(&["--json", s(&rep), "verify", s(&file)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
    let r = report(&rep);
    assert_eq!(r["schema"], "comblab-report/1");
    assert_eq!(r["exit_code"], 0);
    assert!(r["results"]["max_residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn doubled_ghz_state_is_not_a_comb() {
    let d = workdir("ghz2");
    let plain = d.join("ghz-state-times-2.json");
    let op = ghz_state(&["A", "B", "C"]).scale(2.0);
    std::fs::write(&plain, op.to_json()).unwrap();
    // without legs the directions must be given
    assert_eq!(code(&run(&["verify", s(&plain)])), 4);
    let o = run(&["verify", s(&plain), "--legs", "out,in,out"]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
    let with_legs = d.join("with-legs.json");
    let comb = Comb::new(op, comblab::comb::alternating_legs(&["A", "B", "C"], &[comblab::Dir::Out, comblab::Dir::In, comblab::Dir::Out])).unwrap();
    std::fs::write(&with_legs, comb.to_json()).unwrap();
    assert_eq!(code(&run(&["verify", s(&with_legs)])), 2);
}

#[test]
fn gme_runs_on_a_plain_state() {
    let d = workdir("gme");
    let file = d.join("ghz-state.json");
    std::fs::write(&file, ghz_state(&["A", "B", "C"]).to_json()).unwrap();
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/gme_reference.json");
    let witness = d.join("witness.json");
    let rep = d.join("report.json");
    let o = run(&["--json", s(&rep), "gme", s(&file), "--fixture", fixture, "--key", "ghz_state_3", "-o", s(&witness)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r = report(&rep);
    assert!(r["results"]["value"].as_f64().unwrap() < -0.1);
    assert_eq!(r["results"]["fixture"]["match"], true);
    let w = comblab::Operator::from_json(&std::fs::read_to_string(&witness).unwrap()).unwrap();
    assert!((w.real_trace() - 1.0).abs() < 1e-9);

    let wrong = d.join("wrong.json");
    std::fs::write(&wrong, r#"{"value": 0.5, "tolerance": 1e-5}"#).unwrap();
    assert_eq!(code(&run(&["gme", s(&file), "--fixture", s(&wrong)])), 2);
    // a multi-value fixture needs a key
    assert_eq!(code(&run(&["gme", s(&file), "--fixture", fixture])), 4);
}

#[test]
fn every_example_round_trips_through_verify() {
    let d = workdir("examples");
    let cases: &[(&str, &[&str])] = &[
        ("w-comb", &[]),
        ("ghz-comb", &["--n", "3"]),
        ("ghz-comb", &["--n", "4"]),
        ("ghz-comb", &["--n", "6"]),
        ("bisep", &[]),
        ("bisep-cond", &[]),
        ("sqrt-swap", &[]),
        ("ppt-conditionals", &[]),
        ("bob-controls", &[]),
        ("alice-cz", &[]),
        ("teleport", &[]),
    ];
    for (i, (name, extra)) in cases.iter().enumerate() {
        let file = d.join(format!("{i}-{name}.json"));
        let mut args = vec!["example", name, "-o", s(&file)];
        args.extend_from_slice(extra);
        assert_eq!(code(&run(&args)), 0, "{name}");
        // the shipped rounded comb is checked in the loose mode
        let tol = if *name == "ppt-conditionals" { "0.02" } else { "1e-9" };
        let o = run(&["verify", s(&file), "--tol", tol]);
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
    }
    let circ = d.join("teleport-circuit.json");
    assert_eq!(code(&run(&["example", "teleport", "--circuit", "-o", s(&circ)])), 0);
    let c = Circuit::from_json(&std::fs::read_to_string(&circ).unwrap()).unwrap();
    let comb = compile(&c).unwrap();
    assert!(comblab::comb::verify_causality(&comb).unwrap().is_proper_comb());
    assert_eq!(code(&run(&["example", "w-comb", "--circuit"])), 4);
    assert_eq!(code(&run(&["example", "bisep", "--p", "1.5"])), 4);
}

#[test]
fn ppt_and_scan() {
    let d = workdir("scan");
    let w = d.join("w.json");
    let g = d.join("g.json");
    assert_eq!(code(&run(&["example", "w-comb", "-o", s(&w)])), 0);
    assert_eq!(code(&run(&["example", "ppt-conditionals", "-o", s(&g)])), 0);
    let o = run(&["ppt", s(&w), "--cut", "A:BC"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("NPT"));
    assert_eq!(code(&run(&["ppt", s(&w), "--cut", "A:Q"])), 4);

    let rep = d.join("scan.json");
    let o = run(&["--json", s(&rep), "scan", s(&g), "--samples", "5000", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r = report(&rep);
    assert_eq!(r["seeds"][0], 7);
    assert_eq!(r["results"]["parties"].as_array().unwrap().len(), 3);
    assert_eq!(code(&run(&["scan", s(&w), "--samples", "5000", "--party", "A"])), 2);
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let d = workdir("determinism");
    let g = d.join("g.json");
    assert_eq!(code(&run(&["example", "ppt-conditionals", "-o", s(&g)])), 0);
    let mut seen = Vec::new();
    for k in 0..2 {
        let rep = d.join("r.json");
        assert_eq!(code(&run(&["--json", s(&rep), "scan", s(&g), "--samples", "3000"])), 0, "run {k}");
        let mut r = report(&rep);
        r["timing"] = Value::Null;
        seen.push(serde_json::to_string(&r).unwrap());
    }
    assert_eq!(seen[0], seen[1]);
}

#[test]
fn dilate_writes_a_circuit_for_the_same_comb() {
    let d = workdir("dilate");
    let w = d.join("w.json");
    let out = d.join("circuit.json");
    std::fs::write(&w, example_w_comb().to_json()).unwrap();
    let rep = d.join("r.json");
    let o = run(&["--json", s(&rep), "dilate", s(&w), "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(report(&rep)["results"]["all_entangled"], true);
    let c = Circuit::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let back = compile(&c).unwrap();
    let back = comblab::tensor::permute_subsystems(back.op(), &["A", "B", "C"]).unwrap();
    assert!(back.distance(example_w_comb().op()).unwrap() < 1e-8);
}

#[test]
fn seesaw_writes_its_audit() {
    let d = workdir("seesaw");
    let audit = d.join("audit.json");
    // a single iteration never checks a candidate
    let o = run(&["seesaw", "--seed", "1", "--iters", "1", "--effects", "20", "--audit", s(&audit)]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    let a = report(&audit);
    assert_eq!(a["seed"], 1);
    assert_eq!(a["stop"], "iteration cap");
    assert_eq!(a["constraints"].as_array().unwrap().len(), 60);
    assert_eq!(code(&run(&["seesaw", "--eps", "0.3"])), 4);
}

#[test]
fn usage_errors_and_malformed_input() {
    let d = workdir("errors");
    assert_eq!(code(&run(&["frobnicate"])), 4);
    assert_eq!(code(&run(&[])), 4);
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("verify"));
    let bad = d.join("bad.json");
    std::fs::write(&bad, r#"{"dims":[2],"labels":["A"],"matrix":[[[1,0]]]}"#).unwrap();
    assert_eq!(code(&run(&["gme", s(&bad)])), 4);
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&run(&["verify", s(&bad)])), 4);
    assert_eq!(code(&run(&["verify", s(&d.join("missing.json"))])), 4);
}

#[test]
fn short_example_names_are_aliases() {
    let d = workdir("aliases");
    for (long, short) in [("ppt-conditionals", "app-g"), ("bob-controls", "fig4"), ("alice-cz", "fig5"), ("teleport", "fig6")] {
        let a = d.join(format!("{long}.json"));
        let b = d.join(format!("{short}.json"));
        assert_eq!(code(&run(&["example", long, "-o", s(&a)])), 0);
        assert_eq!(code(&run(&["example", short, "-o", s(&b)])), 0);
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{short}");
    }
}

#[test]
fn gme_reports_both_normalisations() {
    let d = workdir("gme-scale");
    let file = d.join("w-comb.json");
    std::fs::write(&file, example_w_comb().to_json()).unwrap();
    let rep = d.join("report.json");
    assert_eq!(code(&run(&["--json", s(&rep), "gme", s(&file)])), 0);
    let r = report(&rep);
    let unit = r["results"]["value"].as_f64().unwrap();
    let given = r["results"]["value_as_given"].as_f64().unwrap();
    assert!(unit < 0.0);
    // the W-type comb has trace 2
    assert!((given - 2.0 * unit).abs() < 1e-9, "{given} vs {unit}");
}
