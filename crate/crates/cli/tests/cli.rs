mod common;

use std::fs;

use common::*;
use serde_json::Value;

fn entries(dir: &std::path::Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn malformed_json_exits_two_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.json", r#"{"measure": {"family": "stable_asymmetric","#);
    let out = tmp.path().join("out");
    let run = cli(&["run", "verify-hardy-stein", s(&bad), "--out", s(&out)]);
    assert_eq!(run.code(), 2, "{}", run.stderr());
    assert_eq!(entries(tmp.path()), ["bad.json"]);

    let unknown = write(tmp.path(), "unknown.json", &format!(r#"{{"measure":{ASYM},"p":3,"colour":"red"}}"#));
    let run = cli(&["run", "verify-hardy-stein", s(&unknown), "--out", s(&out)]);
    assert_eq!(run.code(), 2);
    assert!(run.stderr().contains("colour"));
    assert!(!out.exists());
}

#[test]
fn unknown_verbs_exit_sixty_four() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", "{}");
    let run = cli(&["run", "integrate-everything", s(&cfg)]);
    assert_eq!(run.code(), 64);
    assert!(run.stderr().contains("verify-hardy-stein"));
    assert_eq!(cli(&["integrate-everything"]).code(), 64);
    assert_eq!(cli(&[]).code(), 64);
    assert_eq!(cli(&["--help"]).code(), 0);
}

#[test]
fn parameter_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write(tmp.path(), "m.json", ASYM);
    let run = cli(&["verify-hardy-stein", "--measure", s(&m), "--p", "0.5", "--grid-n", "256"]);
    assert_eq!(run.code(), 2, "{}", run.stderr());
    let run = cli(&["verify-hardy-stein", "--measure", s(&m), "--p", "2", "--grid-n", "100"]);
    assert_eq!(run.code(), 2, "{}", run.stderr());
    // hw-profile has no grid to apply the flag to
    assert_eq!(cli(&["hw-profile", "--measure", s(&m), "--grid-n", "256"]).code(), 2);
    assert_eq!(cli(&["symmetrize", "--measure", s(&m), "--points", "1,x"]).code(), 2);
    let missing = tmp.path().join("nope.json");
    assert_eq!(cli(&["symmetrize", "--measure", s(&missing)]).code(), 2);
}

#[test]
fn divergence_exits_three_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write(tmp.path(), "m.json", ASYM);
    let out = tmp.path().join("out");
    // a Gaussian has nonzero mean, so the symmetrized semigroup never drains it
    let cfg = write(tmp.path(), "c.json", r#"{"zero_mean":false,"f":{"kind":"gaussian","s":1.0}}"#);
    let run = cli(&[
        "square-function", "--config", s(&cfg), "--measure", s(&m), "--grid-n", "256", "--out", s(&out),
    ]);
    assert_eq!(run.code(), 3, "{}", run.stderr());
    assert!(!out.exists());
}

#[test]
fn report_envelope_and_stdout() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write(tmp.path(), "m.json", ASYM);
    let run = cli(&["symmetrize", "--measure", s(&m), "--points", "-2,2"]);
    assert_eq!(run.code(), 0);
    let r: Value = serde_json::from_slice(&run.out.stdout).unwrap();
    assert_eq!(r["tool"], "hardy-stein");
    assert_eq!(r["verb"], "symmetrize");
    assert!(r["input_hash"].as_str().unwrap().starts_with("sha256:"));
    assert_eq!(r["config"]["measure"]["c_plus"], 2.0);
    assert_eq!(r["config"]["points"], serde_json::json!([-2.0, 2.0]));
    assert!(r.get("timing").is_none() && r.get("threads").is_none());
    assert_eq!(entries(tmp.path()), ["m.json"]);

    // the embedded config reproduces the report
    let cfg = write(tmp.path(), "again.json", &r["config"].to_string());
    let again = cli(&["run", "symmetrize", s(&cfg)]);
    assert_eq!(again.out.stdout, run.out.stdout);
}

#[test]
fn csv_outputs_and_binary_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write(tmp.path(), "m.json", ASYM);
    let a = tmp.path().join("a");
    let run = cli(&[
        "apply-multiplier", "--measure", s(&m), "--phi", r#"{"kind":"const","value":1.0}"#, "--function",
        r#"{"kind":"family","index":1}"#, "--grid-n", "256", "--out", s(&a),
    ]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    let bytes = fs::read(a.join("output.bin")).unwrap();
    assert_eq!(bytes.len(), 24 + 16 * 256);
    assert_eq!(u64::from_le_bytes(bytes[..8].try_into().unwrap()), 1);
    assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 256);
    assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), 40.0);
    // zero-mean input, and m = 1 away from the origin
    assert!((f(&report(&a), "/result/l2_ratio") - 1.0).abs() < 1e-6);

    // the output feeds back in, and its bytes enter the hash
    let b = tmp.path().join("b");
    let phi = r#"{"kind":"exp_decay_t","rate":1.0}"#;
    let input = a.join("output.bin");
    assert_eq!(
        cli(&["apply-multiplier", "--measure", s(&m), "--phi", phi, "--input", s(&input), "--out", s(&b)]).code(),
        0
    );
    let copy = tmp.path().join("copy.bin");
    let mut altered = bytes.clone();
    altered[30] ^= 1;
    fs::write(&copy, &altered).unwrap();
    let c = tmp.path().join("c");
    assert_eq!(
        cli(&["apply-multiplier", "--measure", s(&m), "--phi", phi, "--input", s(&copy), "--out", s(&c)]).code(),
        0
    );
    assert_ne!(report(&b)["input_hash"], report(&c)["input_hash"]);
    let clash = cli(&[
        "apply-multiplier", "--measure", s(&m), "--phi", phi, "--input", s(&copy), "--grid-n", "512",
    ]);
    assert_eq!(clash.code(), 2);

    let sym = tmp.path().join("sym");
    assert_eq!(cli(&["compute-symbol", "--measure", s(&m), "--phi", phi, "--grid-n", "64", "--out", s(&sym)]).code(), 0);
    let text = fs::read_to_string(sym.join("m_phi.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# "));
    assert_eq!(lines[1], "xi,re_m,im_m");
    assert_eq!(lines.len(), 2 + 64);
    let xi: Vec<f64> = lines[2..].iter().map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(xi.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn output_directory_replacement() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write(tmp.path(), "m.json", ASYM);
    let out = tmp.path().join("out");
    for points in ["1", "2"] {
        assert_eq!(cli(&["symmetrize", "--measure", s(&m), "--points", points, "--out", s(&out)]).code(), 0);
    }
    assert_eq!(report(&out)["config"]["points"], serde_json::json!([2.0]));
    assert_eq!(entries(&out), ["report.json", "symmetrize.csv", "timing.json"]);
    assert_eq!(entries(tmp.path()), ["m.json", "out"]);

    let mine = tmp.path().join("mine");
    fs::create_dir(&mine).unwrap();
    fs::write(mine.join("notes.txt"), "keep").unwrap();
    assert_eq!(cli(&["symmetrize", "--measure", s(&m), "--out", s(&mine)]).code(), 1);
    assert_eq!(entries(&mine), ["notes.txt"]);
}

#[test]
fn campaign_runs_sweeps_atomically() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "sym.json", &format!(r#"{{"measure":{ASYM},"points":[-1,1]}}"#));
    let camp = write(
        tmp.path(),
        "campaign.json",
        &format!(
            r#"{{"output_dir":"unused","seed":42,"refine_levels":0,"commands":[
                {{"verb":"symmetrize","config":"sym.json"}},
                {{"verb":"verify-hardy-stein","config":{{"measure":{ASYM},"grid":{{"n":256,"l":20.0}}}},
                  "sweep":{{"field":"p","values":[1.5,3.0]}}}},
                {{"verb":"simulate","config":{{"measure":{POISSON},"spec":{{"h":{{"kind":"y_up_to_time","t1":1.0}}}},"p":2,"paths":500}}}}
            ]}}"#
        ),
    );
    let out = tmp.path().join("camp");
    let run = cli(&["campaign", s(&camp), "--out", s(&out)]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    assert_eq!(
        entries(&out),
        ["00-symmetrize", "01-verify-hardy-stein", "02-verify-hardy-stein", "03-simulate", "report.json", "timing.json"]
    );
    let top = report(&out);
    assert_eq!(top["verb"], "campaign");
    assert_eq!(top["result"]["commands"].as_array().unwrap().len(), 4);
    let v = report(&out.join("02-verify-hardy-stein"));
    assert_eq!(v["config"]["p"], 3.0);
    assert_eq!(v["config"]["quad"]["refine_levels"], 0);
    assert_eq!(report(&out.join("03-simulate"))["config"]["seed"], 42);

    // one failing command leaves nothing behind
    let broken = write(
        tmp.path(),
        "broken.json",
        r#"{"output_dir":"x","commands":[{"verb":"symmetrize","config":"sym.json"},{"verb":"symmetrize","config":{"points":[1]}}]}"#,
    );
    let out2 = tmp.path().join("camp2");
    assert_eq!(cli(&["campaign", s(&broken), "--out", s(&out2)]).code(), 2);
    assert!(!out2.exists());
    let unknown = write(tmp.path(), "u.json", r#"{"output_dir":"x","commands":[{"verb":"nope","config":{}}]}"#);
    assert_eq!(cli(&["campaign", s(&unknown), "--out", s(&out2)]).code(), 2);
}
