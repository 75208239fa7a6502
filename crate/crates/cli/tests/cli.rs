use std::fs;
use std::process::{Command, Output};

use eventpos::poly::parse;
use eventpos_cli::corpus::Corpus;
use eventpos_cli::format::PolyJson;
use serde_json::Value;

fn eventpos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eventpos"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--json", "-"]);
    let out = eventpos(&all);
    let doc = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({}): {}", e, String::from_utf8_lossy(&out.stderr))
    });
    (doc, code(&out))
}

#[test]
fn exit_codes_follow_verdicts() {
    assert_eq!(code(&eventpos(&["check", "x1+x2"])), 0);
    assert_eq!(code(&eventpos(&["check", "(x1+x2)^3 - x1^3"])), 2);
    assert_eq!(code(&eventpos(&["check", "(x1+x2)^2", "--mode", "falsify"])), 3);
    assert_eq!(code(&eventpos(&["check", "x1+"])), 1);
    assert_eq!(code(&eventpos(&["check", "x1+1"])), 1);
    assert_eq!(code(&eventpos(&["polya", "--g=-x1", "--nvars", "2"])), 3);
    assert_eq!(code(&eventpos(&["polya", "--g", "x1^2-x1*x2+x2^2"])), 0);
}

#[test]
fn check_reports_one_based_witnesses() {
    let (doc, c) = json(&["check", "x1^2*(x1+x2+x3) + (x2+x3)^3"]);
    assert_eq!(c, 2);
    let reports = doc["result"]["reports"].as_array().unwrap();
    assert_eq!(reports[0]["verdict"], "Holds");
    assert_eq!(reports[1]["verdict"], "Fails");
    assert_eq!(reports[1]["witness"]["kind"], "facet_point");
    assert_eq!(reports[1]["witness"]["facet"], 1);
    assert_eq!(reports[1]["witness"]["value"], "0");
    assert_eq!(doc["metadata"]["command"], "check");

    let (doc, _) = json(&["check", "(x1+x2)^4 - 8*x1^2*x2^2"]);
    let w = &doc["result"]["reports"][2]["witness"];
    assert_eq!(w["kind"], "exact_complex");
    assert_eq!(w["z"], serde_json::json!([["-1", "0"], ["1", "0"]]));
}

#[test]
fn json_results_are_deterministic() {
    let args = ["check", "(x1+x2+x3)^2 + x1*x2", "--seed", "5"];
    let (a, _) = json(&args);
    let (b, _) = json(&args);
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["budgets"], b["budgets"]);
    let args = ["beta", "certificate", "--p", "x1+x2", "--seed", "9"];
    let (a, ca) = json(&args);
    let (b, _) = json(&args);
    assert_eq!(ca, 0);
    assert_eq!(
        serde_json::to_string(&a["result"]).unwrap(),
        serde_json::to_string(&b["result"]).unwrap()
    );
}

#[test]
fn power_scan_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let out = eventpos(&[
        "power-scan", "--p", "x1+x2", "--q", "x1^2-x1*x2+x2^2", "--max-m", "5",
        "--csv", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,all_positive,num_terms,min_coef");
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[3], "2,false,4,0");
    assert_eq!(lines[4], "3,true,6,1");
    assert!(String::from_utf8_lossy(&out.stdout).contains("window onset: 3"));
}

#[test]
fn beta_verify_reads_matrix_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("a.json");
    fs::write(&good, r#"{"dim":2,"nvars":2,"entries":[["x1","x2"],["x2","x1"]]}"#).unwrap();
    assert_eq!(code(&eventpos(&["beta", "verify", "--matrix", good.to_str().unwrap(), "--p", "x1+x2"])), 0);
    let cyclic = dir.path().join("c.json");
    fs::write(&cyclic, r#"{"dim":2,"nvars":2,"entries":[["0","x1"],["x2","0"]]}"#).unwrap();
    let (doc, c) = json(&["beta", "verify", "--matrix", cyclic.to_str().unwrap(), "--p", "x1"]);
    assert_eq!(c, 2);
    assert_eq!(doc["result"]["verdict"], "Refuted");
    assert_eq!(doc["result"]["exact_charpoly_zero"], false);
    let bad = dir.path().join("b.json");
    fs::write(&bad, r#"{"dim":1,"nvars":2,"entries":[["x1-x2"]]}"#).unwrap();
    assert_eq!(code(&eventpos(&["beta", "verify", "--matrix", bad.to_str().unwrap(), "--p", "x1"])), 1);
}

#[test]
fn sweep_emits_csv_and_warnings() {
    let out = eventpos(&["sweep", "--k", "2", "--lambda", "8,7,9", "--max-m", "20"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "k,lambda,pos1,pos2,pos3,onset,max_m");
    assert_eq!(rows[1], "2,7,Holds,Holds,Holds,4,20");
    assert_eq!(rows[2], "2,8,Holds,Holds,Fails,,20");
    assert!(rows[3].starts_with("2,9,"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda = 9 lies outside"));
}

#[test]
fn config_file_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "profile = \"fast\"\nseed = 4\n[budgets.pos3]\nmax_boxes = 1234\ngrid = 12\n").unwrap();
    let (doc, _) = json(&["--config", cfg.to_str().unwrap(), "check", "x1+x2", "--grid", "10"]);
    assert_eq!(doc["metadata"]["profile"], "fast");
    assert_eq!(doc["metadata"]["seed"], 4);
    assert_eq!(doc["budgets"]["pos3"]["max_boxes"], 1234);
    assert_eq!(doc["budgets"]["pos3"]["grid"], 10);
    fs::write(&cfg, "[budgets.pos3]\nmax_box = 1\n").unwrap();
    assert_eq!(code(&eventpos(&["--config", cfg.to_str().unwrap(), "check", "x1+x2"])), 1);
    assert_eq!(code(&eventpos(&["--budget-profile", "nope", "check", "x1+x2"])), 1);
}

#[test]
fn geometry_reports_invariant_factors() {
    let (doc, c) = json(&["geometry", "--f", "1+s1^2+s2^2", "--point", "1,2"]);
    assert_eq!(c, 0);
    let r = &doc["result"];
    assert_eq!(r["affine_dim"], 2);
    assert_eq!(r["lattice"]["invariant_factors"], serde_json::json!(["2", "2"]));
    assert_eq!(r["lattice"]["full"], false);
    assert_eq!(r["jf_positive_definite"], true);
    assert!(r["hessian_max_gap"].as_f64().unwrap() < 1e-5);
}

#[test]
fn examples_list_and_run() {
    let out = eventpos(&["examples", "--list"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("polya_classic"));
    assert_eq!(code(&eventpos(&["examples", "pos3_violator"])), 0);
    assert_eq!(code(&eventpos(&["examples", "nope"])), 1);
}

#[test]
fn corpus_round_trips_through_both_forms() {
    for inst in Corpus::builtin().select("all").unwrap() {
        let p = &inst.polynomial;
        assert_eq!(&parse(&p.serialize(), p.nvars()).unwrap(), p, "{}", inst.name);
        let doc = serde_json::to_string(&PolyJson::from_polynomial(p)).unwrap();
        let back: PolyJson = serde_json::from_str(&doc).unwrap();
        assert_eq!(&back.to_polynomial().unwrap(), p, "{}", inst.name);
    }
}

#[test]
fn polynomial_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let p = parse("(x1+x2)^4 - 7*x1^2*x2^2", 2).unwrap();
    let path = dir.path().join("p.json");
    fs::write(&path, serde_json::to_string(&PolyJson::from_polynomial(&p)).unwrap()).unwrap();
    assert_eq!(code(&eventpos(&["check", path.to_str().unwrap()])), 0);
    let text = dir.path().join("p.txt");
    fs::write(&text, "(x1+x2)^4 - 8*x1^2*x2^2\n").unwrap();
    assert_eq!(code(&eventpos(&["check", text.to_str().unwrap()])), 2);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&eventpos(&["check"])), 1);
    assert_eq!(code(&eventpos(&["polya", "--g", "-x1"])), 1);
    assert_eq!(code(&eventpos(&["--help"])), 0);
}
