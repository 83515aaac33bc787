use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn bifil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bifil")).args(args).output().expect("bifil runs")
}

fn bifil_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_bifil"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("bifil runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

const SHIPPED: &[(&str, &str)] = &[
    ("sum_map.json", "sum-map"),
    ("sum_sequence.json", "sum-sequence"),
    ("mgon3.json", "m-gon:3"),
    ("mgon5.json", "m-gon:5"),
    ("mgon8.json", "m-gon:8"),
    ("zeroed_gysin4.json", "zeroed-gysin:4"),
    ("key_lemma_violation.json", "key-lemma-violation"),
];

#[test]
fn ring_only_document_is_an_empty_model() {
    let o = bifil_stdin(&["normalize", "-"], r#"{ "ring": "fp:3" }"#);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "{\n  \"ring\": \"fp:3\"\n}\n");
}

#[test]
fn shipped_fixtures_round_trip() {
    for (file, name) in SHIPPED {
        let path = fixture(file);
        let text = std::fs::read_to_string(&path).unwrap();
        let o = bifil(&["normalize", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{file}: {}", stderr(&o));
        assert_eq!(stdout(&o), text, "{file} is not in normal form");
        let o = bifil(&["fixture", name]);
        assert_eq!(stdout(&o), text, "{file} differs from the built-in {name}");
    }
}

/// Defaults, unreduced scalars and unsorted strata all normalize, and
/// normalizing again changes nothing.
#[test]
fn normalization_is_idempotent() {
    let loose = r#"{
        "ring": "zmod:l=2,n=2",
        "modules": { "E": { "ambient": 2 }, "M": { "ambient": 1 } },
        "filtrations": {
            "E1": { "module": "E", "steps": [ { "at": 0, "gens": { "rows": 1, "cols": 2, "entries": [["-2", 4]] } } ] },
            "E2": { "module": "E", "steps": [ { "at": 0, "gens": { "rows": 1, "cols": 2, "entries": [[0, "6"]] } } ] },
            "N":  { "module": "M", "steps": [ { "at": 0, "gens": { "rows": 1, "cols": 1, "entries": [[2]] } } ] }
        },
        "complexes": {
            "A": { "lo": 0, "terms": [ { "module": "E", "p1": "E1", "p2": "E2" } ] },
            "B": { "lo": 0, "terms": [ { "module": "M", "p1": "N", "p2": "N" } ] }
        },
        "morphisms": { "sum": { "source": "A", "target": "B", "maps": [ { "rows": 2, "cols": 1, "entries": [[5], [-3]] } ] } },
        "commands": [ { "op": "strict-check", "morphism": "sum" } ]
    }"#;
    let first = bifil_stdin(&["normalize", "-"], loose);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let again = bifil_stdin(&["normalize", "-"], &stdout(&first));
    assert_eq!(stdout(&first), stdout(&again));
    let doc: Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(doc["morphisms"]["sum"]["maps"][0]["entries"], serde_json::json!([[1], [1]]));
    assert_eq!(doc["filtrations"]["E1"]["ceiling"]["rows"], 2);

    let run = bifil_stdin(&["run", "-"], loose);
    assert_eq!(run.status.code(), Some(1));
    assert!(stdout(&run).contains("bifiltered strictness fails at (0,0)"));
}

#[test]
fn strict_check_on_the_sum_map() {
    let path = fixture("sum_map.json");
    let o = bifil(&["strict-check", path.to_str().unwrap(), "--morphism", "sum"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["status"], "fail");
    assert_eq!(r["degrees"][0]["first"], true);
    assert_eq!(r["degrees"][0]["second"], true);
    assert_eq!(r["degrees"][0]["bifiltered"], false);
    assert!(r["message"].as_str().unwrap().contains("bifiltered strictness fails at (0,0)"));
    let o = bifil(&["--format", "text", "strict-check", path.to_str().unwrap(), "--morphism", "sum"]);
    assert!(stdout(&o).contains("bifiltered strictness fails at (0,0)"));
}

#[test]
fn sum_sequence_cohomology() {
    let path = fixture("sum_sequence.json");
    let o = bifil(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    let all_zero = |v: &Value| v.as_array().unwrap().iter().all(|c| c["invariants"] == "0");
    assert!(all_zero(&r[0]["cohomology"]), "the sequence is exact");
    assert!(!all_zero(&r[1]["cohomology"]), "its (0,0) graded piece is not");
}

#[test]
fn non_monotone_filtration_names_the_index() {
    let doc = r#"{
        "ring": "fp:3",
        "modules": { "A": { "ambient": 2 } },
        "filtrations": { "F": { "module": "A", "steps": [
            { "at": 0, "gens": { "rows": 2, "cols": 2, "entries": [[1, 0], [0, 1]] } },
            { "at": 1, "gens": { "rows": 1, "cols": 2, "entries": [[1, 0]] } }
        ] } }
    }"#;
    let o = bifil_stdin(&["normalize", "-"], doc);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("filtrations.F.steps") && err.contains("index 1"), "{err}");
}

#[test]
fn input_errors_exit_with_two() {
    let o = bifil_stdin(&["normalize", "-"], r#"{ "ring": "fp:3", "extra": 1 }"#);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("extra"));
    let o = bifil_stdin(&["normalize", "-"], r#"{ "ring": "fp:4" }"#);
    assert_eq!(o.status.code(), Some(2));
    let o = bifil_stdin(&["normalize", "-"], r#"{ "ring": "rat", "modules": { "A": { "ambient": 1, "gens": { "rows": 2, "cols": 1, "entries": [[1]] } } } }"#);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("modules.A.gens"));
    let path = fixture("sum_map.json");
    let o = bifil(&["--ring", "fp:2", "run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ring mismatch"));
    let o = bifil(&["--ring", "zmod:l=2,n=2", "strict-check", path.to_str().unwrap(), "--morphism", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mgon_spectral_grid() {
    let path = fixture("mgon5.json");
    let o = bifil(&["spectral", path.to_str().unwrap(), "--filtration", "P", "--pages", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    let cells = |r_: usize| -> Vec<(i64, i64, String)> {
        r["pages"][r_ - 1]["cells"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| (c["p"].as_i64().unwrap(), c["q"].as_i64().unwrap(), c["invariants"].as_str().unwrap().to_string()))
            .collect()
    };
    let q = |s: &str| s.to_string();
    assert_eq!(cells(1), vec![(-1, 2, q("Q^5")), (0, 0, q("Q^5")), (0, 2, q("Q^5")), (1, 0, q("Q^5"))]);
    assert_eq!(cells(2), vec![(-1, 2, q("Q^1")), (0, 0, q("Q^1")), (0, 2, q("Q^1")), (1, 0, q("Q^1"))]);
    assert_eq!(r["degeneration"]["at"], 2);
    let o = bifil(&["--format", "text", "spectral", path.to_str().unwrap(), "--pages", "2"]);
    let text = stdout(&o);
    assert!(text.contains("E_1") && text.contains("    2 | Q^5 Q^5   ."), "{text}");
}

#[test]
fn weight_check_and_edges() {
    for m in [3, 5, 8] {
        let path = fixture(&format!("mgon{m}.json"));
        let o = bifil(&["run", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "m = {m}: {}", stdout(&o));
        let r = json(&o);
        for rep in r.as_array().unwrap() {
            if rep["op"] == "edge-compare" {
                assert_eq!(rep["sign"], 1);
            }
        }
    }
    let path = fixture("zeroed_gysin4.json");
    let o = bifil(&["mw-check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["degrees"][1]["passes"], false);
    let o = bifil(&["mw-check", path.to_str().unwrap(), "--degree", "0"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn key_lemma_violation() {
    let path = fixture("key_lemma_violation.json");
    let o = bifil(&["key-lemma", path.to_str().unwrap(), "--u", "NU", "--v", "NV", "--w", "NW", "--f", "f", "--g", "g"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["second_strict"], false);
    assert_eq!(r["conclusion"], false);
}

#[test]
fn monodromy_of_a_jordan_block() {
    let doc = r#"{
        "ring": "fp:2",
        "modules": { "V": { "ambient": 3 } },
        "complexes": { "C": { "lo": 0, "terms": [ { "module": "V" } ] } },
        "morphisms": { "N": { "source": "C", "target": "C", "maps": [
            { "rows": 3, "cols": 3, "entries": [[0, 1, 0], [0, 0, 1], [0, 0, 0]] }
        ] } },
        "commands": [ { "op": "monodromy", "operator": "N" } ]
    }"#;
    let o = bifil_stdin(&["run", "-"], doc);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)[0]["filtration"]["jumps"], serde_json::json!([-2, 0, 2]));
    let o = bifil_stdin(&["--format", "text", "run", "-"], doc);
    assert!(stdout(&o).contains("gr_2 = Z/2^1"));
}

#[test]
fn relative_monodromy_over_a_trivial_base() {
    let doc = r#"{
        "ring": "rat",
        "modules": { "V": { "ambient": 2 } },
        "filtrations": { "W": { "module": "V", "steps": [ { "at": 1, "gens": { "rows": 2, "cols": 2, "entries": [[1, 0], [0, 1]] } } ] } },
        "complexes": { "C": { "lo": 0, "terms": [ { "module": "V" } ] } },
        "morphisms": { "N": { "source": "C", "target": "C", "maps": [ { "rows": 2, "cols": 2, "entries": [[0, 1], [0, 0]] } ] } },
        "commands": [ { "op": "relative-monodromy", "operator": "N", "filtration": "W" } ]
    }"#;
    let o = bifil_stdin(&["run", "-"], doc);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)[0]["filtration"]["jumps"], serde_json::json!([0, 2]));
}

#[test]
fn seeded_samples_are_reproducible_and_run() {
    for kind in ["nerve", "complex", "morphism", "operator", "explicit"] {
        for seed in ["1", "2", "3"] {
            let ring = if kind == "nerve" || kind == "explicit" { "rat" } else { "fp:3" };
            let a = bifil(&["--ring", ring, "--seed", seed, "sample", "--kind", kind]);
            let b = bifil(&["--ring", ring, "--seed", seed, "sample", "--kind", kind]);
            assert_eq!(a.status.code(), Some(0), "{kind} {seed}: {}", stderr(&a));
            assert_eq!(a.stdout, b.stdout);
            let first = bifil_stdin(&["run", "-"], &stdout(&a));
            let second = bifil_stdin(&["run", "-"], &stdout(&a));
            assert_ne!(first.status.code(), Some(2), "{kind} {seed}: {}", stderr(&first));
            assert_eq!(first.stdout, second.stdout, "{kind} {seed}: output is not deterministic");
            for rep in json(&first).as_array().unwrap() {
                if rep["op"] == "qis-check" {
                    assert_eq!(rep["bifiltered_qis"], rep["gr_gr_qis"]);
                }
                if kind == "nerve" || kind == "explicit" {
                    assert_eq!(rep["status"], "ok", "{kind} {seed}: {rep}");
                }
            }
        }
    }
}
