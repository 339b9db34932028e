use std::path::PathBuf;
use std::process::{Command, Output};

use fdslab::fds::{FdsFile, LoadedFds};
use fdslab::report::Report;
use fdslab::Digraph;

fn fdslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdslab")).args(args).env_remove("FDSLAB_CAP_STATES").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fdslab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json_report(args: &[&str]) -> (i32, Report) {
    let mut all = args.to_vec();
    all.push("--json");
    let o = fdslab(&all);
    (code(&o), Report::from_json(&stdout(&o)).unwrap())
}

fn value(r: &Report, name: &str) -> u128 {
    r.quantities.iter().find(|e| e.name == name).unwrap().value.unwrap()
}

#[test]
fn params_examples() {
    let (c, r) = json_report(&["params", "power:Cdir:3^2"]);
    assert_eq!((c, value(&r, "tau")), (0, 5));
    let (_, r) = json_report(&["params", "K:4"]);
    assert_eq!((value(&r, "tau"), value(&r, "nu")), (3, 2));
    let (_, r) = json_report(&["params", "Cund:5"]);
    assert_eq!((value(&r, "girth"), value(&r, "tau")), (2, 3));
    let path = scratch("path.txt");
    std::fs::write(&path, Digraph::new(3, [(0, 1), (1, 2)]).unwrap().to_text()).unwrap();
    let (_, r) = json_report(&["params", path.to_str().unwrap()]);
    assert_eq!(r.quantities.iter().find(|e| e.name == "girth").unwrap().value, None);
}

#[test]
fn compute_examples() {
    let (c, r) = json_report(&["compute", "g", "K:3", "-q", "2"]);
    assert_eq!((c, value(&r, "g")), (0, 4));
    let (_, r) = json_report(&["compute", "i", "Cdir:4", "-q", "2", "--exhaustive"]);
    let e = r.quantities.iter().find(|e| e.name == "i").unwrap();
    assert_eq!((e.value, e.certified.label()), (Some(1), "exact"));
    let (_, r) = json_report(&["compute", "iaff", "paley:7", "-q", "2"]);
    assert_eq!(value(&r, "iaff"), 3);
    assert!(r.passed && !r.bounds.is_empty());
}

#[test]
fn graph_files_are_accepted() {
    let path = scratch("tri.txt");
    std::fs::write(&path, Digraph::family("Cdir:3").unwrap().to_text()).unwrap();
    let (c, r) = json_report(&["compute", "s", path.to_str().unwrap(), "-q", "2", "--exhaustive"]);
    assert_eq!((c, value(&r, "s")), (0, 1));
}

#[test]
fn witness_files_load() {
    let w = scratch("w.json");
    let o = fdslab(&["compute", "i", "Cund:5", "-q", "2", "--witness", w.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let LoadedFds::Table(f) = FdsFile::from_json(&std::fs::read_to_string(&w).unwrap()).unwrap().load().unwrap() else {
        panic!("table witness expected")
    };
    assert_eq!(f.metrics().i, 2);
    assert!(f.belongs_to(&Digraph::family("Cund:5").unwrap()));
}

#[test]
fn reports_are_byte_identical() {
    let (a, b) = (scratch("a.json"), scratch("b.json"));
    for (path, threads) in [(&a, "1"), (&b, "2")] {
        let o = fdslab(&[
            "compute", "s", "Cund:5", "-q", "3", "--random", "--trials", "500", "--seed", "7", "--threads", threads, "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (c, d) = (scratch("c.json"), scratch("d.json"));
    for (path, threads) in [(&c, "1"), (&d, "3")] {
        fdslab(&["compute", "i", "Cdir:5", "-q", "2", "--exhaustive", "--threads", threads, "--out", path.to_str().unwrap()]);
    }
    assert_eq!(std::fs::read(&c).unwrap(), std::fs::read(&d).unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(code(&fdslab(&["compute", "i", "X:3", "-q", "2"])), 2);
    assert_eq!(code(&fdslab(&["compute", "glin", "K:3", "-q", "6"])), 2);
    assert_eq!(code(&fdslab(&["compute", "i", "Cund:5", "-q", "3", "--exhaustive"])), 3);
    assert_eq!(code(&fdslab(&["compute", "g", "K:3", "-q", "2", "--cap-states", "4"])), 3);
    let capped = Command::new(env!("CARGO_BIN_EXE_fdslab"))
        .args(["compute", "s", "Cund:5", "-q", "3"])
        .env("FDSLAB_CAP_STATES", "100")
        .output()
        .unwrap();
    assert_eq!(code(&capped), 3);
    assert_eq!(code(&fdslab(&["compute", "i", "K:3"])), 2);
}

#[test]
fn verify_suites() {
    for suite in ["small-exhaustive", "constructions", "bounds", "equivalences"] {
        let (c, r) = json_report(&["verify", suite]);
        assert_eq!(c, 0, "{suite}");
        assert!(r.passed && r.counterexample.is_none());
    }
}

#[test]
fn fabricated_failure_exits_one() {
    let (c, r) = json_report(&["verify", "fabricated-failure"]);
    assert_eq!(c, 1);
    assert!(!r.passed);
    let ce = r.counterexample.unwrap();
    assert_eq!((ce.expected.as_str(), ce.actual.as_str()), ("2", "1"));
    let o = fdslab(&["verify", "fabricated-failure"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"holds\":false"));
}

#[test]
fn construct_command() {
    let (c, r) = json_report(&["construct", "simplex", "-r", "3"]);
    assert_eq!((c, value(&r, "s")), (0, 3));
    let (_, r) = json_report(&["construct", "chordless-cover", "--graph", "Cund:5"]);
    assert_eq!(value(&r, "i"), 3);
    assert_eq!(code(&fdslab(&["construct", "winkler"])), 2);
}
