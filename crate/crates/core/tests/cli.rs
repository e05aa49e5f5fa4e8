mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{plain_sets, travel_dir};
use vdatalog::oracle::{plain_infer, PlainDatabase};
use vdatalog::syntax::parse_program;
use vdatalog::workload::random_suite;

fn vdatalog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdatalog"))
        .args(args)
        .output()
        .unwrap()
}

fn travel_args(out: &Path) -> Vec<String> {
    let d = travel_dir();
    vec![
        d.join("program.dl").display().to_string(),
        "-F".into(),
        d.join("facts").display().to_string(),
        "-D".into(),
        out.display().to_string(),
        "--fm".into(),
        d.join("fm.pc").display().to_string(),
    ]
}

fn run(args: &[String]) -> Output {
    vdatalog(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn travel_bundle_writes_five_paths() {
    let out = tempfile::tempdir().unwrap();
    let r = run(&travel_args(out.path()));
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(out.path().join("Path.csv")).unwrap();
    assert_eq!(
        text,
        "Athens\tRome\t@Sea\nNYC\tAthens\t@!Land\nNYC\tRome\t@!Land /\\ Sea\nRome\tToronto\t@Air\nToronto\tNYC\t@Land\n"
    );
}

#[test]
fn ignoring_conditions_gives_the_full_closure() {
    let out = tempfile::tempdir().unwrap();
    let mut args = travel_args(out.path());
    args.push("--ignore-pcs".into());
    let r = run(&args);
    assert!(r.status.success());
    let text = fs::read_to_string(out.path().join("Path.csv")).unwrap();
    assert_eq!(text.lines().count(), 16);
    assert!(!text.contains('@'));
}

#[test]
fn check_mode_passes() {
    let out = tempfile::tempdir().unwrap();
    let mut args = travel_args(out.path());
    args.push("--check".into());
    let r = run(&args);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&r.stdout),
        "pass: 3 configurations checked\n"
    );
    assert!(!out.path().join("Path.csv").exists());
}

#[test]
fn stats_line_format() {
    let out = tempfile::tempdir().unwrap();
    let mut args = travel_args(out.path());
    args.push("--stats".into());
    let r = run(&args);
    let err = String::from_utf8_lossy(&r.stderr);
    let first = err.lines().next().unwrap();
    let keys: Vec<&str> = first
        .split(' ')
        .map(|kv| kv.split('=').next().unwrap())
        .collect();
    assert_eq!(keys, ["time_ms", "db_bytes", "iterations", "sat_checks"]);
    for kv in first.split(' ') {
        kv.split('=').nth(1).unwrap().parse::<u64>().unwrap();
    }
    assert!(
        first.contains("db_bytes=94 iterations=3 sat_checks=11"),
        "{first}"
    );
    assert!(err.contains("relation=Path tuples=5"));
    assert!(err.contains("bdd_nodes="));
}

#[test]
fn false_feature_model_empties_output() {
    let tmp = tempfile::tempdir().unwrap();
    let fm = tmp.path().join("fm.pc");
    fs::write(&fm, "False\n").unwrap();
    let out = tmp.path().join("out");
    let mut args = travel_args(&out);
    args[6] = fm.display().to_string();
    assert!(run(&args).status.success());
    assert_eq!(fs::read_to_string(out.join("Path.csv")).unwrap(), "");
}

#[test]
fn no_sat_check_prunes_before_output_unless_told_not_to() {
    let out = tempfile::tempdir().unwrap();
    let mut args = travel_args(out.path());
    args.push("--no-sat-check".into());
    assert!(run(&args).status.success());
    let pruned = fs::read_to_string(out.path().join("Path.csv")).unwrap();
    assert_eq!(pruned.lines().count(), 5);
    args.push("--no-post-prune".into());
    assert!(run(&args).status.success());
    let raw = fs::read_to_string(out.path().join("Path.csv")).unwrap();
    assert!(raw.lines().count() > 5);
}

#[test]
fn output_is_deterministic_and_dumps_bdd() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let dump = a.path().join("bdd.txt");
    let mut args = travel_args(a.path());
    args.extend(["--dump-bdd".to_string(), dump.display().to_string()]);
    assert!(run(&args).status.success());
    assert!(run(&travel_args(b.path())).status.success());
    assert_eq!(
        fs::read(a.path().join("Path.csv")).unwrap(),
        fs::read(b.path().join("Path.csv")).unwrap()
    );
    let dump = fs::read_to_string(dump).unwrap();
    for line in dump.lines() {
        assert_eq!(line.split(' ').count(), 4, "{line}");
    }
}

#[test]
fn errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    // missing program
    let r = vdatalog(&[tmp.path().join("nope.dl").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));

    // missing input file
    let prog = tmp.path().join("p.dl");
    fs::write(&prog, ".decl E(a: symbol)\n.input E\n").unwrap();
    let r = vdatalog(&[
        prog.to_str().unwrap(),
        "-F",
        tmp.path().to_str().unwrap(),
        "-D",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("missing fact file"));

    // arity error with line number
    fs::write(tmp.path().join("E.facts"), "a\nb\tc\n").unwrap();
    let r = vdatalog(&[
        prog.to_str().unwrap(),
        "-F",
        tmp.path().to_str().unwrap(),
        "-D",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("E.facts:2"));

    // same directory
    fs::write(tmp.path().join("E.facts"), "a\n").unwrap();
    let d = tmp.path().to_str().unwrap();
    let r = vdatalog(&[prog.to_str().unwrap(), "-F", d, "-D", d]);
    assert_eq!(r.status.code(), Some(2));
    let r = vdatalog(&[prog.to_str().unwrap(), "-F", d, "-D", d, "--allow-same-dir"]);
    assert_eq!(r.status.code(), Some(0));

    // bad feature model
    let fm = tmp.path().join("bad.pc");
    fs::write(&fm, "A /\\").unwrap();
    let r = vdatalog(&[
        prog.to_str().unwrap(),
        "-F",
        d,
        "-D",
        tmp.path().join("o").to_str().unwrap(),
        "--fm",
        fm.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("bad.pc:1:"));
}

#[test]
fn custom_delimiter() {
    let tmp = tempfile::tempdir().unwrap();
    let prog = tmp.path().join("p.dl");
    fs::write(&prog, ".decl E(a: symbol, b: symbol)\n.input E\n.decl P(a: symbol, b: symbol)\n.output P\nP(x, y) :- E(x, y).\n").unwrap();
    let facts = tmp.path().join("in");
    fs::create_dir(&facts).unwrap();
    fs::write(facts.join("E.facts"), "a,b,@X\n\"c,d\",e\n").unwrap();
    let out = tmp.path().join("out");
    let r = vdatalog(&[
        prog.to_str().unwrap(),
        "-F",
        facts.to_str().unwrap(),
        "-D",
        out.to_str().unwrap(),
        "--delimiter",
        ",",
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(
        fs::read_to_string(out.join("P.csv")).unwrap(),
        "a,b,@X\n\"c,d\",e\n"
    );
}

#[test]
fn ignore_pcs_matches_plain_inference_on_random_bundles() {
    for bundle in random_suite(5, 10) {
        let tmp = tempfile::tempdir().unwrap();
        bundle.write_to_dir(tmp.path()).unwrap();
        let out = tmp.path().join("out");
        let r = vdatalog(&[
            tmp.path().join("program.dl").to_str().unwrap(),
            "-F",
            tmp.path().join("facts").to_str().unwrap(),
            "-D",
            out.to_str().unwrap(),
            "--ignore-pcs",
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        let program = parse_program(&bundle.program_text).unwrap().without_pcs();
        let mut input = PlainDatabase::new();
        for (rel, recs) in &bundle.facts {
            for f in recs {
                input.insert(rel, &f.values);
            }
        }
        let expected = plain_sets(&plain_infer(&program, &input));
        for decl in program.outputs() {
            let text = fs::read_to_string(out.join(format!("{}.csv", decl.name))).unwrap();
            let got: std::collections::BTreeSet<Vec<String>> = text
                .lines()
                .map(|l| {
                    if l == "()" {
                        Vec::new()
                    } else {
                        l.split('\t').map(str::to_owned).collect()
                    }
                })
                .collect();
            assert_eq!(got, expected[&decl.name], "{}", decl.name);
        }
    }
}
