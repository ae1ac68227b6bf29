use std::io::Cursor;
use std::path::PathBuf;
use std::process::Command;

use hornlab_cli::{run, Output};
use serde_json::Value;
use tempfile::TempDir;

const K2: &str = r#"{"format":"khs-1","kind":"hypergraph","vertices":["a","b"],"edges":[["a","b"]]}"#;
const K3: &str = r#"{"format":"khs-1","kind":"hypergraph","vertices":["a","b","c"],"edges":[["a","b"],["b","c"],["a","c"]]}"#;
const P3: &str =
    r#"{"format":"khs-1","kind":"hypergraph","vertices":["x","y","z"],"edges":[["x","y"],["y","z"]]}"#;
const TWO_K2: &str =
    r#"{"format":"khs-1","kind":"hypergraph","vertices":["p","q","r","s"],"edges":[["p","q"],["r","s"]]}"#;
const E3: &str = r#"{"format":"khs-1","kind":"hypergraph","vertices":["0","1","2"],"edges":[["0","1","2"]]}"#;
const C5: &str = r#"{"format":"khs-1","kind":"hypergraph","vertices":["0","1","2","3","4"],"edges":[["0","1"],["1","2"],["2","3"],["3","4"],["0","4"]]}"#;
const K4: &str = r#"{"format":"khs-1","kind":"hypergraph","vertices":["a","b","c","d"],"edges":[["a","b"],["a","c"],["a","d"],["b","c"],["b","d"],["c","d"]]}"#;

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        for (name, text) in [
            ("k2.json", K2),
            ("k3.json", K3),
            ("p3.json", P3),
            ("2k2.json", TWO_K2),
            ("e3.json", E3),
            ("c5.json", C5),
            ("k4.json", K4),
        ] {
            std::fs::write(dir.path().join(name), text).unwrap();
        }
        Files { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }
}

fn call(args: &[String]) -> Output {
    run(args, &mut Cursor::new(Vec::new()))
}

fn call_with_input(args: &[String], input: &str) -> Output {
    run(args, &mut Cursor::new(input.as_bytes().to_vec()))
}

fn args(parts: &[&str]) -> Vec<String> {
    parts.iter().map(|s| s.to_string()).collect()
}

fn s(x: &str) -> String {
    x.to_string()
}

fn report(out: &Output) -> Value {
    let v: Value = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout));
    assert_eq!(v["schema"], "hornlab-report-1");
    assert_eq!(v["exit_code"], out.code);
    v
}

fn replay(files: &Files, out: &Output) -> Output {
    let path = files.path("report.json");
    std::fs::write(&path, &out.stdout).unwrap();
    call(&args(&["--replay", path.to_str().unwrap()]))
}

#[test]
fn triangle_does_not_map_to_an_edge() {
    let f = Files::new();
    let out = call(&[s("hom"), f.arg("k3.json"), f.arg("k2.json")]);
    assert_eq!(out.code, 1);
    assert_eq!(report(&out)["result"], serde_json::json!({"hom": false}));

    let out = call(&[s("hom"), f.arg("k2.json"), f.arg("k3.json")]);
    assert_eq!(out.code, 0);
    let map = &report(&out)["result"]["map"];
    assert_ne!(map["a"], map["b"]);
}

#[test]
fn enumeration_lists_every_map() {
    let f = Files::new();
    let out = call(&[
        s("hom"),
        f.arg("k2.json"),
        f.arg("k3.json"),
        s("--enumerate"),
        s("100"),
        s("--deterministic"),
    ]);
    assert_eq!(out.code, 0);
    let r = report(&out);
    assert_eq!(r["result"]["count"], 6);
    assert_eq!(r["result"]["complete"], true);
}

#[test]
fn exhausted_budget_exits_with_three() {
    let f = Files::new();
    let out = call(&[
        s("hom"),
        f.arg("k4.json"),
        f.arg("k3.json"),
        s("--max-nodes"),
        s("1"),
    ]);
    assert_eq!(out.code, 3, "{}", out.stderr);
    assert_eq!(report(&out)["error"]["kind"], "budget");

    let out = call(&args(&[
        "generate",
        "sparse",
        "--k",
        "3",
        "--girth",
        "2",
        "--colours",
        "2",
        "--budget",
        "0",
    ]));
    assert_eq!(out.code, 3);
}

#[test]
fn classify_reports_the_derived_graph_evidence() {
    let f = Files::new();
    let out = call(&[s("classify"), f.arg("e3.json")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let c = &report(&out)["result"]["classification"];
    assert_eq!(c["verdict"], "np_complete");
    assert_eq!(c["evidence"], "sim_non_bipartite");

    let out = call(&[s("classify"), f.arg("k2.json"), s("--k"), s("3")]);
    let c = &report(&out)["result"]["classification"];
    assert_eq!(c["evidence"], "no_cyclic_polymorphism");
    assert_eq!(c["mode"], "exhaustive_search");
    assert_eq!(c["p"], 3);

    let out = call(&[s("classify"), f.arg("k2.json")]);
    assert_eq!(report(&out)["result"]["classification"]["verdict"], "tractable");
}

#[test]
fn convert_produces_the_six_tuple_relation_and_round_trips() {
    let f = Files::new();
    let out = call(&[
        s("convert"),
        s("--to"),
        s("kstructure"),
        s("--k"),
        s("3"),
        f.arg("k2.json"),
    ]);
    assert_eq!(out.code, 0);
    let doc: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(doc["kind"], "kstructure");
    assert_eq!(doc["tuples"].as_array().unwrap().len(), 6);

    for name in ["k2.json", "k3.json", "p3.json", "e3.json", "c5.json"] {
        let ks = f.path("ks.json");
        let out = call(&[
            s("convert"),
            s("--to"),
            s("kstructure"),
            f.arg(name),
            s("--out"),
            ks.display().to_string(),
        ]);
        assert_eq!(out.code, 0);
        let back = call(&[s("convert"), s("--to"), s("hypergraph"), ks.display().to_string()]);
        assert_eq!(back.code, 0);
        let original =
            hornlab::io::parse_hypergraph(&std::fs::read_to_string(f.path(name)).unwrap()).unwrap();
        assert_eq!(back.stdout.trim_end(), hornlab::io::hypergraph_to_json(&original));
    }
}

#[test]
fn malformed_input_gets_a_positioned_diagnostic() {
    let f = Files::new();
    let bad = f.path("bad.json");
    std::fs::write(
        &bad,
        "{\"format\":\"khs-1\",\n\"kind\":\"hypergraph\",\n\"vertices\":[\"a\" \"b\"]}",
    )
    .unwrap();
    let out = call(&[s("analyze"), bad.display().to_string()]);
    assert_eq!(out.code, 2);
    let e = &report(&out)["error"];
    assert_eq!(e["kind"], "format");
    assert_eq!(e["line"], 3);
    assert!(out.stderr.contains("line 3"));

    std::fs::write(
        &bad,
        r#"{"format":"khs-1","kind":"hypergraph","vertices":["a"],"edges":[["a","z"]]}"#,
    )
    .unwrap();
    let out = call(&[s("analyze"), bad.display().to_string()]);
    assert_eq!(out.code, 2);
    assert!(report(&out)["error"]["field"].is_string());
}

#[test]
fn replay_rejects_foreign_and_recursive_reports() {
    let f = Files::new();
    let path = f.path("r.json");
    std::fs::write(&path, r#"{"schema":"other","command":{"args":["analyze"]}}"#).unwrap();
    assert_eq!(call(&[s("--replay"), path.display().to_string()]).code, 2);
    let looping = format!(
        r#"{{"schema":"hornlab-report-1","command":{{"args":["--replay",{:?}]}}}}"#,
        path.display().to_string()
    );
    std::fs::write(&path, looping).unwrap();
    let out = call(&[s("--replay"), path.display().to_string()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--replay"));
    assert_eq!(
        call(&[s("--replay"), path.display().to_string(), s("analyze")]).code,
        2
    );
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(call(&args(&["hom"])).code, 2);
    assert_eq!(call(&args(&["frobnicate"])).code, 2);
    assert_eq!(call(&[]).code, 2);
    let v = call(&args(&["--version"]));
    assert_eq!(v.code, 0);
    assert!(v.stdout.contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn membership_verdicts_and_certificates() {
    let f = Files::new();
    let out = call(&[s("member"), f.arg("p3.json"), s("--template"), f.arg("k2.json")]);
    assert_eq!(out.code, 1);
    let failure = &report(&out)["result"]["failure"];
    assert_eq!(failure["condition"], "SEP2");
    assert_eq!(failure["pair"], serde_json::json!(["x", "z"]));

    let cert = f.path("cert.json");
    let out = call(&[
        s("member"),
        f.arg("2k2.json"),
        s("--template"),
        f.arg("k2.json"),
        s("--certificate"),
        cert.display().to_string(),
    ]);
    assert_eq!(out.code, 0);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(written["certificate"]["member"], true);

    let out = call(&[s("member"), f.arg("k3.json"), s("--template"), f.arg("k2.json")]);
    assert_eq!(report(&out)["result"]["failure"]["condition"], "SEP1");
}

#[test]
fn analysis_and_colouring() {
    let f = Files::new();
    let out = call(&[s("analyze"), f.arg("c5.json")]);
    let r = &report(&out)["result"];
    assert_eq!(r["girth"], 5);
    assert_eq!(r["hyperforest"], false);
    assert_eq!(r["chromatic"], 3);
    assert_eq!(r["uniform"], true);
    assert_eq!(r["loop_free"], true);
    assert_eq!(r["components"], 1);

    let out = call(&[s("colour"), f.arg("c5.json"), s("--colours"), s("2")]);
    assert_eq!(out.code, 1);
    let out = call(&[s("colour"), f.arg("k4.json")]);
    assert_eq!(report(&out)["result"]["chromatic"], 4);
}

#[test]
fn polymorphism_search_outcomes() {
    let f = Files::new();
    let out = call(&[
        s("polymorphism"),
        f.arg("k2.json"),
        s("--arity"),
        s("3"),
        s("--idempotent"),
    ]);
    assert_eq!(out.code, 0);
    let r = &report(&out)["result"];
    assert_eq!(r["validated"], true);
    assert_eq!(r["classes"], 4);
    let out = call(&[
        s("polymorphism"),
        f.arg("k2.json"),
        s("--k"),
        s("3"),
        s("--arity"),
        s("3"),
    ]);
    assert_eq!(out.code, 1);
}

#[test]
fn generated_structures_are_written_and_reproducible() {
    let f = Files::new();
    let out_path = f.path("forest.json");
    let cmd = [
        s("generate"),
        s("forest"),
        s("--k"),
        s("3"),
        s("--edges"),
        s("4"),
        s("--seed"),
        s("9"),
        s("--out"),
        out_path.display().to_string(),
    ];
    let first = call(&cmd);
    assert_eq!(first.code, 0);
    let written = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(
        report(&first)["result"]["structure"],
        serde_json::from_str::<Value>(&written).unwrap()
    );
    assert_eq!(call(&cmd).stdout, first.stdout);

    let out = call(&[
        s("generate"),
        s("density"),
        s("--g1"),
        f.arg("k2.json"),
        s("--g2"),
        f.arg("k3.json"),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let checks = &report(&out)["result"]["checks"];
    assert!(checks.as_object().unwrap().values().all(|v| v == true));
}

#[test]
fn reports_replay_identically() {
    let f = Files::new();
    let runs = [
        vec![s("hom"), f.arg("k3.json"), f.arg("k2.json")],
        vec![s("classify"), f.arg("e3.json")],
        vec![s("member"), f.arg("2k2.json"), s("--template"), f.arg("k2.json")],
        vec![
            s("generate"),
            s("sparse"),
            s("--k"),
            s("2"),
            s("--girth"),
            s("3"),
            s("--colours"),
            s("2"),
            s("--seed"),
            s("4"),
        ],
        vec![
            s("efgame"),
            s("--base"),
            f.arg("c5.json"),
            s("--rounds"),
            s("2"),
            s("--radius"),
            s("2"),
            s("--non-strict"),
            s("--spoiler"),
            s("random"),
            s("--trials"),
            s("200"),
            s("--seed"),
            s("3"),
        ],
        vec![s("analyze"), f.arg("k4.json"), s("--jobs"), s("2")],
    ];
    for cmd in runs {
        let out = call(&cmd);
        let again = replay(&f, &out);
        assert_eq!(again.code, out.code);
        assert_eq!(again.stdout, out.stdout, "{cmd:?}");
    }
}

#[test]
fn efgame_strict_exhaustive_is_clean() {
    let f = Files::new();
    let out = call(&[
        s("efgame"),
        s("--base"),
        f.arg("c5.json"),
        s("--rounds"),
        s("1"),
        s("--radius"),
        s("5"),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r = &report(&out)["result"];
    assert_eq!(r["violation_count"], 0);
    assert_eq!(r["strict"], true);

    let out = call(&[
        s("efgame"),
        s("--base"),
        f.arg("c5.json"),
        s("--rounds"),
        s("2"),
        s("--radius"),
        s("5"),
    ]);
    assert_eq!(out.code, 2);
}

#[test]
fn violation_transcripts_replay_as_scripts() {
    let f = Files::new();
    let out = call(&[
        s("efgame"),
        s("--base"),
        f.arg("c5.json"),
        s("--rounds"),
        s("2"),
        s("--radius"),
        s("1"),
        s("--non-strict"),
    ]);
    assert_eq!(out.code, 1);
    let first = report(&out)["result"]["violations"][0].clone();
    let moves = first["moves"].as_str().unwrap().to_string();
    let scripted = call(&[
        s("efgame"),
        s("--base"),
        f.arg("c5.json"),
        s("--rounds"),
        s("2"),
        s("--radius"),
        s("1"),
        s("--non-strict"),
        s("--spoiler"),
        s("scripted"),
        s("--moves"),
        moves,
    ]);
    assert_eq!(scripted.code, 1);
    let again = report(&scripted)["result"]["violations"][0].clone();
    assert_eq!(again["failures"], first["failures"]);
    assert_eq!(again["transcript"], first["transcript"]);
}

#[test]
fn interactive_spoiler_reads_moves_and_replays() {
    let f = Files::new();
    let cmd = [
        s("efgame"),
        s("--base"),
        f.arg("c5.json"),
        s("--rounds"),
        s("1"),
        s("--radius"),
        s("5"),
        s("--spoiler"),
        s("stdin"),
    ];
    let out = call_with_input(&cmd, "nonsense\nG 26\n");
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stderr.contains("rejected"));
    let r = report(&out);
    assert_eq!(r["result"]["rounds_played"], 1);
    assert_eq!(r["command"]["stdin"], serde_json::json!(["nonsense", "G 26"]));
    let again = replay(&f, &out);
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn binary_prints_report_and_sets_exit_code() {
    let f = Files::new();
    let out = Command::new(env!("CARGO_BIN_EXE_hornlab"))
        .args(["hom", &f.arg("k3.json"), &f.arg("k2.json")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["hom"], false);
}

#[test]
fn replay_report_seeds_parse_without_recursion() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/replay_report");
    let mut accepted = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        if let Ok((args, _)) = hornlab_cli::parse_replay(&text) {
            accepted += 1;
            assert!(!args.iter().any(|a| a == "--replay"));
        }
    }
    assert_eq!(accepted, 2);
}
