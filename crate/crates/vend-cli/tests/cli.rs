//! End to end runs of the `vend` binary against the shipped configs,
//! pinning exit codes and the report lines the interface promises.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_vend")
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn run_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(bin()).args(args).env(key, value).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn cfg(name: &str) -> String {
    configs().join(format!("{name}.json")).to_string_lossy().into_owned()
}

fn write_tmp(name: &str, text: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).expect("tmp dir");
    let path = dir.join(name);
    std::fs::write(&path, text).expect("tmp config written");
    path.to_string_lossy().into_owned()
}

#[test]
fn adding_machine_verify_reports_level8_order() {
    let out = run(&["example", "adding-machine", "--verify"]);
    let text = stdout(&out);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(text.contains("order of level-8 action = 256"), "report: {text}");
}

#[test]
fn sec54_n6_verify_reports_theta() {
    let out = run(&["example", "sec54", "--params", "n=6", "--verify"]);
    let text = stdout(&out);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(text.contains("theta_6 = (384, 1152, 256, 0, 0)"), "report: {text}");
}

#[test]
fn report_fields_keep_stable_order() {
    let out = run(&["check", &cfg("adding-machine")]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let pos = |needle: &str| text.find(needle).unwrap_or_else(|| panic!("missing {needle}"));
    assert!(pos("\"command\"") < pos("\"inputs_digest\""));
    assert!(pos("\"inputs_digest\"") < pos("\"verdicts\""));
    assert!(pos("\"verdicts\"") < pos("\"witnesses\""));
    assert!(pos("\"witnesses\"") < pos("\"timings\""));
}

#[test]
fn digest_is_stable_across_runs() {
    let grab = || {
        let out = run(&["check", &cfg("example4")]);
        assert_eq!(code(&out), 0);
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json report");
        v["inputs_digest"].as_str().expect("digest string").to_string()
    };
    let a = grab();
    let b = grab();
    assert_eq!(a, b);
    assert!(a.starts_with("fnv1a64:"), "digest: {a}");
}

#[test]
fn check_passes_on_every_shipped_config() {
    for entry in std::fs::read_dir(configs()).expect("configs dir") {
        let path = entry.expect("entry").path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let out = run(&["check", path.to_str().expect("utf8 path")]);
        assert_eq!(code(&out), 0, "{}: {}", path.display(), stderr(&out));
    }
}

#[test]
fn check_fails_with_witness_on_violating_config() {
    let bad = r#"{
  "group": {
    "type": "free-abelian",
    "rank": 1
  },
  "subgroup": {
    "lattice": [
      [
        2
      ]
    ]
  },
  "f": {
    "matrix": [
      [
        "1/3"
      ]
    ]
  }
}
"#;
    let path = write_tmp("violating.json", bad);
    let out = run(&["check", &path]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json report");
    let verdicts = v["verdicts"].as_array().expect("verdicts");
    assert!(verdicts.iter().any(|c| c["ok"] == serde_json::json!(false)));
    let witnesses = v["witnesses"].as_array().expect("witnesses");
    assert!(!witnesses.is_empty(), "failing check should carry a witness");
}

#[test]
fn unknown_example_name_is_an_input_error() {
    let out = run(&["example", "no-such-example", "--verify"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("no-such-example"), "stderr: {}", stderr(&out));
}

#[test]
fn malformed_config_reports_position() {
    let path = write_tmp("malformed.json", "{\n  \"group\": }\n");
    let out = run(&["check", &path]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("line"), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_field_is_named_in_the_diagnostic() {
    let path = write_tmp(
        "unknown-field.json",
        r#"{"group": {"type": "free-abelian", "rank": 1, "bogus": 1}, "subgroup": {"lattice": [[2]]}, "f": {"matrix": [["1/2"]]}}"#,
    );
    let out = run(&["check", &path]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("bogus"), "stderr: {}", stderr(&out));
}

#[test]
fn repr_prints_children_and_permutation() {
    let out = run(&["repr", &cfg("adding-machine"), "--element", "e1", "--depth", "3"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("root permutation"));
    assert!(text.contains("child 0"));
    assert!(text.contains("child 1"));
}

#[test]
fn repr_accepts_atom_words() {
    let out = run(&["repr", &cfg("sec21-atoms"), "--element", "alpha*beta^-1", "--depth", "2"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
}

#[test]
fn states_finite_and_exceeded() {
    let out = run(&["states", &cfg("adding-machine"), "--element", "e1", "--max", "50"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let out = run(&["states", &cfg("example1"), "--element", "e1", "--max", "100"]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
}

#[test]
fn states_cap_can_come_from_the_environment() {
    let out = run_env(&["states", &cfg("example1"), "--element", "e1"], "VEND_MAX_STATES", "10");
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
}

#[test]
fn core_reports_example33_kernel() {
    let out = run(&["core", &cfg("example33")]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("core"), "report: {text}");
    assert!(text.contains("[0, 6]"), "core lattice should appear: {text}");
}

#[test]
fn simple_exit_codes_split_by_verdict() {
    let out = run(&["simple", &cfg("heisenberg-intro")]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let out = run(&["simple", &cfg("example33")]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("invariant core"));
}

#[test]
fn strong_exit_codes_split_by_outcome() {
    let out = run(&["strong", &cfg("example5"), "--bound", "3"]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("witness subgroup"));

    let out = run(&["strong", &cfg("heisenberg-intro"), "--bound", "3"]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
}

#[test]
fn chain_walks_example1() {
    let out = run(&["chain", &cfg("example1"), "--steps", "4"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("G(1)"));
    assert!(text.contains("G(4)"));
}

#[test]
fn predict_exit_codes() {
    let out = run(&["predict", &cfg("adding-machine")]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let out = run(&["predict", &cfg("example1")]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
}

#[test]
fn equal_exit_codes() {
    let out = run(&["equal", &cfg("sec21-atoms"), "alpha", "alpha"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let out = run(&["equal", &cfg("sec21-atoms"), "alpha", "beta"]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("separating vertex"));
}

#[test]
fn indices_reports_the_divisor_pair() {
    let out = run(&["indices", &cfg("power-f22"), "--subgroup", "0,16"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("divisor pair"), "report: {text}");
    assert!(text.contains("(4, 1)"), "report: {text}");
}

#[test]
fn bounds_smoke() {
    let out = run(&["bounds", &cfg("sec54")]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("degree m"));
    assert!(text.contains("derived length s"));
}

#[test]
fn example_without_name_lists_registry() {
    let out = run(&["example"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("registered examples"));
}

#[test]
fn verify_all_runs_every_example() {
    let out = run(&["example", "--verify-all"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json report");
    let verdicts = v["verdicts"].as_array().expect("verdicts");
    let names = [
        "adding-machine",
        "eight-templates",
        "example1",
        "example2",
        "example33",
        "example4",
        "example5",
        "heisenberg-intro",
        "power-f22",
        "sec21-atoms",
        "sec54",
    ];
    for name in names {
        assert!(
            verdicts.iter().any(|c| {
                c["check"].as_str().is_some_and(|s| s.starts_with(&format!("{name}: ")))
            }),
            "no verdicts for {name}"
        );
    }
    let labels: Vec<&str> = verdicts.iter().filter_map(|c| c["check"].as_str()).collect();
    let mut prefixes: Vec<&str> = labels
        .iter()
        .map(|l| l.split(": ").next().expect("prefixed label"))
        .collect();
    prefixes.dedup();
    let mut sorted = prefixes.clone();
    sorted.sort_unstable();
    assert_eq!(prefixes, sorted, "verdicts should be merged in name order");
}

#[test]
fn explicit_transversal_is_accepted() {
    let text = r#"{
  "group": {
    "type": "free-abelian",
    "rank": 1
  },
  "subgroup": {
    "lattice": [
      [
        2
      ]
    ]
  },
  "f": {
    "matrix": [
      [
        "1/2"
      ]
    ]
  },
  "transversal": [
    {
      "k": 0,
      "v": [
        0
      ]
    },
    {
      "k": 0,
      "v": [
        3
      ]
    }
  ]
}
"#;
    let path = write_tmp("explicit-transversal.json", text);
    let out = run(&["check", &path]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let out = run(&["repr", &path, "--element", "e1", "--depth", "2"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
}

#[test]
fn bad_transversal_is_rejected() {
    let text = r#"{
  "group": {
    "type": "free-abelian",
    "rank": 1
  },
  "subgroup": {
    "lattice": [
      [
        2
      ]
    ]
  },
  "f": {
    "matrix": [
      [
        "1/2"
      ]
    ]
  },
  "transversal": [
    {
      "k": 0,
      "v": [
        0
      ]
    },
    {
      "k": 0,
      "v": [
        2
      ]
    }
  ]
}
"#;
    let path = write_tmp("bad-transversal.json", text);
    let out = run(&["check", &path]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
}

#[test]
fn word_errors_are_input_errors() {
    let out = run(&["repr", &cfg("adding-machine"), "--element", "q7"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("unknown generator"), "stderr: {}", stderr(&out));
}

fn shipped_config_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(configs())
        .expect("configs dir")
        .filter_map(|e| {
            let p = e.expect("entry").path();
            let is_json = p.extension().and_then(|x| x.to_str()) == Some("json");
            is_json.then(|| p.file_stem().expect("stem").to_string_lossy().into_owned())
        })
        .collect();
    names.sort_unstable();
    names
}

#[test]
fn one_config_is_shipped_per_registered_example() {
    let names = shipped_config_names();
    assert_eq!(
        names,
        vec![
            "adding-machine",
            "eight-templates",
            "example1",
            "example2",
            "example33",
            "example4",
            "example5",
            "heisenberg-intro",
            "power-f22",
            "sec21-atoms",
            "sec54",
        ]
    );
    assert!(Path::new(&cfg("adding-machine")).exists());
}

#[test]
fn reports_are_byte_stable_except_timings() {
    let strip = |text: String| -> String {
        text.lines().filter(|l| !l.contains("total_ms")).collect::<Vec<_>>().join("\n")
    };
    for args in [
        vec!["check", &cfg("example33")],
        vec!["bounds", &cfg("power-f22")],
        vec!["example", "example4", "--verify"],
    ] {
        let a = strip(stdout(&run(&args)));
        let b = strip(stdout(&run(&args)));
        assert_eq!(a, b, "nondeterministic report for {args:?}");
        assert!(!a.is_empty());
    }
}
