use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cdlab"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn single_point_lemma_grid_has_no_counterexamples() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "schema_version = 1\n[lemmas]\ndimensions = [2]\nlayers = [1]\nks = [1]\nmax_extra_degree = 3\n",
    );
    let out = tmp.path().join("out");
    let o = run(&["verify-lemmas", "-c", s(&cfg), "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(&out.join("lemmas.json"));
    assert_eq!(doc["report"]["total_counterexamples"], 0);
    assert!(doc["report"]["total_checked"].as_u64().unwrap() > 0);
    let table = std::fs::read_to_string(out.join("lemmas.csv")).unwrap();
    assert!(table.starts_with("kind,m,l,k,eta,checked,counterexamples\n"));
    assert!(!out.join("counterexamples.csv").exists());
}

#[test]
fn malformed_and_unknown_keys_exit_two_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    for text in [
        "schema_version = 1\n[model\n",
        "schema_version = 1\n[model]\ndimenson = 2\n",
        "schema_version = 2\n",
        "schema_version = 1\n[model]\nradii = [0.5]\n",
        "schema_version = 1\n[model]\nradii = [0.5, 1.5]\n",
    ] {
        let cfg = write_config(tmp.path(), text);
        let out = tmp.path().join("out");
        let o = run(&["certify", "-c", s(&cfg), "-o", s(&out)]);
        assert_eq!(
            code(&o),
            2,
            "{text}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!out.exists(), "{text}: partial outputs written");
    }
}

#[test]
fn missing_config_file_exits_six() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["certify", "-c", s(&tmp.path().join("absent.toml"))]);
    assert_eq!(code(&o), 6);
}

#[test]
fn hardy_bundle_certifies_and_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("hardy");
    let o = run(&[
        "certify",
        "-c",
        s(&config("hardy_bidisc.toml")),
        "-o",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "effective_config.toml",
        "structure.json",
        "synthesis.json",
        "plot_data.csv",
        "extraction.csv",
        "certificate.json",
        "krylov_certificate.json",
        "run.json",
    ] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let cert = json(&out.join("certificate.json"));
    assert_eq!(cert["schema"], "cdlab.certificate/v1");
    assert_eq!(cert["verdict"], "pass");
    assert_eq!(cert["seed"], 7);
    assert_eq!(cert["evidence"]["method"], "extraction");
    let k = json(&out.join("krylov_certificate.json"));
    assert_eq!(k["evidence"]["numerical_rank"], 45);

    let plot = std::fs::read_to_string(out.join("plot_data.csv")).unwrap();
    let mut lines = plot.lines();
    assert_eq!(lines.next(), Some("layer,k,log10_error,log10_bound"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    // Four layers, k = 1..6, every error below its bound.
    assert_eq!(rows.len(), 24);
    assert!(rows.iter().all(|r| r[2] <= r[3]));

    // Re-running from the echoed configuration reproduces the certificate.
    let again = tmp.path().join("again");
    let o = run(&[
        "certify",
        "-c",
        s(&out.join("effective_config.toml")),
        "-o",
        s(&again),
    ]);
    assert_eq!(code(&o), 0);
    for f in [
        "certificate.json",
        "krylov_certificate.json",
        "extraction.csv",
        "run.json",
    ] {
        assert_eq!(
            std::fs::read(out.join(f)).unwrap(),
            std::fs::read(again.join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn rank_two_bundle_certifies_whole_support() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("rank2");
    let o = run(&["certify", "-c", s(&config("rank2.toml")), "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cert = json(&out.join("certificate.json"));
    assert_eq!(cert["ambient_dimension"], 20);
    assert_eq!(cert["evidence"]["covers_support"], true);
    assert_eq!(cert["evidence"]["recovered_family_rank"], 20);
    let spanning = json(&out.join("spanning.json"));
    assert_eq!(spanning["accepted"], "spanning");
}

#[test]
fn non_spanning_sections_fall_back_to_seeded_random_sections() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "schema_version = 1\nseed = 3\n[model]\ntruncation_degree = 2\nrank = 2\n\
                sections = { kind = \"monomial\" }\n[extraction]\ntarget_degree = 2\n\
                [krylov]\nenabled = false\n";
    let cfg = write_config(tmp.path(), text);
    let out = tmp.path().join("out");
    let o = run(&["certify", "-c", s(&cfg), "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let spanning = json(&out.join("spanning.json"));
    let attempts = spanning["attempts"].as_array().unwrap();
    assert_eq!(attempts[0]["label"], "monomial");
    assert_eq!(attempts[0]["rank"], 9);
    assert_eq!(spanning["accepted"], "random-1");
    assert_eq!(spanning["ambient_dimension"], 12);

    let o = run(&[
        "build-model",
        "-c",
        s(&cfg),
        "-o",
        s(&tmp.path().join("again")),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        std::fs::read(out.join("spanning.json")).unwrap(),
        std::fs::read(tmp.path().join("again/spanning.json")).unwrap()
    );
}

#[test]
fn naive_bundle_exits_with_bound_violation_and_explains() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("naive");
    let o = run(&[
        "certify",
        "-c",
        s(&config("naive_demo.toml")),
        "-o",
        s(&out),
    ]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(&out.join("naive.json"));
    assert_eq!(doc["selected_k"], 3);
    assert!(doc["explanation"].as_str().unwrap().contains("underflows"));
    assert_eq!(doc["rows"][2]["violated"], true);
    assert_eq!(json(&out.join("run.json"))["exit_code"], 4);
    assert!(!out.join("certificate.json").exists());
}

#[test]
fn truncated_reach_makes_the_schedule_infeasible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "schema_version = 1\n[synthesis]\nreach = { truncated = 8 }\n[krylov]\nenabled = false\n",
    );
    let out = tmp.path().join("out");
    let o = run(&["certify", "-c", s(&cfg), "-o", s(&out)]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let msg = json(&out.join("run.json"))["message"]
        .as_str()
        .unwrap()
        .to_string();
    assert!(msg.contains("truncated at degree 8"), "{msg}");
}

#[test]
fn enforced_bound_with_recovered_constant_schedule_exits_four() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "schema_version = 1\n[extraction]\nmode = \"recovered\"\n[krylov]\nenabled = false\n",
    );
    let o = run(&["certify", "-c", s(&cfg), "-o", s(&tmp.path().join("out"))]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn overrides_reach_the_certificate_and_the_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config("hardy_bidisc.toml");
    let base = ["build-model", "-c", s(&cfg)];
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(code(&run(&[&base[..], &["-o", s(&a)]].concat())), 0);
    assert_eq!(
        code(&run(&[
            &base[..],
            &["-o", s(&b), "--seed", "99", "--precision", "320"]
        ]
        .concat())),
        0
    );
    let ra = json(&a.join("run.json"));
    let rb = json(&b.join("run.json"));
    assert_eq!(rb["seed"], 99);
    assert_ne!(ra["config_hash"], rb["config_hash"]);
    let echo = std::fs::read_to_string(b.join("effective_config.toml")).unwrap();
    assert!(echo.contains("precision = 320"));
    assert!(a.join("model.json").exists());
}

#[test]
fn synthesize_reports_norm_against_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    let o = run(&[
        "synthesize",
        "-c",
        s(&config("hardy_bidisc.toml")),
        "-o",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    let doc = json(&out.join("synthesis.json"));
    assert!(doc["log10_norm"].as_f64().unwrap() <= doc["log10_norm_bound"].as_f64().unwrap());
    assert_eq!(doc["terms"].as_array().unwrap().len(), 45);
}

#[test]
fn report_merges_runs_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "schema_version = 1\nseed = 5\n[model]\ntruncation_degree = 4\n[krylov]\nenabled = false\n",
    );
    for run_dir in ["first", "second"] {
        let out = tmp.path().join(run_dir).join("run");
        assert_eq!(code(&run(&["certify", "-c", s(&cfg), "-o", s(&out)])), 0);
    }
    let one = tmp.path().join("first");
    let o = run(&["report", s(&one)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = std::fs::read_to_string(one.join("summary.md")).unwrap();
    assert_eq!(summary.matches("\n## ").count(), 1);
    assert!(summary.contains("verdict: pass"));

    // Idempotent, and identical across two identical runs.
    assert_eq!(code(&run(&["report", s(&one)])), 0);
    assert_eq!(
        std::fs::read_to_string(one.join("summary.md")).unwrap(),
        summary
    );
    let two = tmp.path().join("second");
    assert_eq!(code(&run(&["report", s(&two)])), 0);
    assert_eq!(
        std::fs::read(one.join("summary.md")).unwrap(),
        std::fs::read(two.join("summary.md")).unwrap()
    );
    assert_eq!(
        std::fs::read(one.join("summary.csv")).unwrap(),
        std::fs::read(two.join("summary.csv")).unwrap()
    );

    let empty = tmp.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    assert_eq!(code(&run(&["report", s(&empty)])), 6);
    assert_eq!(code(&run(&["report", s(&tmp.path().join("nowhere"))])), 6);
}
