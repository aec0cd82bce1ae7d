use std::fs;
use std::process::{Command, Output};

fn texcas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_texcas")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data(path: &str) -> String {
    format!("{}/{path}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn forward_prints_only_the_translation() {
    let o = texcas(&["translate", "--forward", "--dialect", "maple", "\\sin@@{z}"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "sin(z)\n");
    assert!(stderr(&o).lines().all(|l| l.starts_with("info:") || l.starts_with("warn:")));
    assert!(stderr(&o).contains("dlmf.nist.gov/4.14"));
}

#[test]
fn backward_identity() {
    let o = texcas(&["translate", "--backward", "x"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x\n");
}

#[test]
fn bessel_carries_branch_cut_warning() {
    let o = texcas(&["translate", "--forward", "--dialect", "maple", "\\BesselK{\\frac{1}{4}}@{\\frac{1}{4}z^2}"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "BesselK((1)/(4),(1)/(4)*z^2)\n");
    assert!(stderr(&o).lines().any(|l| l.starts_with("warn: branch-cut")));
}

#[test]
fn exit_codes() {
    assert_eq!(texcas(&["translate", "\\qhyperg{a}{b}"]).status.code(), Some(2));
    assert_eq!(texcas(&["translate", "\\frac{a}{b"]).status.code(), Some(3));
    assert_eq!(texcas(&["translate", "--backward", "a+"]).status.code(), Some(3));
    assert_eq!(texcas(&["translate", "--backward", "Zeta(s)"]).status.code(), Some(2));
    let o = texcas(&["translate", "\\qhyperg{a}{b}"]);
    assert!(stdout(&o).is_empty());
}

#[test]
fn reads_input_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.tex");
    fs::write(&path, "\\cos@{x}\n").unwrap();
    let o = texcas(&["translate", "--dialect", "mathematica", "--file", path.to_str().unwrap()]);
    assert_eq!(stdout(&o), "Cos[x]\n");
}

#[test]
fn compile_lexicon() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lexicon.json");
    let out_s = out.to_str().unwrap();
    let o = texcas(&[
        "compile-lexicon",
        "--macros",
        &data("data/macros.csv"),
        "--constants",
        &data("data/constants.json"),
        "--greek",
        &data("data/greek.json"),
        "--builtins",
        &data("data/builtins.json"),
        "--out",
        out_s,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = texcas(&["translate", "--lexicon", out_s, "\\JacobiP{\\alpha}{\\beta}{n}@{\\cos@{a\\Theta}}"]);
    assert_eq!(stdout(&o), "JacobiP(n,alpha,beta,cos(a*Theta))\n");

    let header = fs::read_to_string(data("data/macros.csv")).unwrap().lines().next().unwrap().to_string();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, format!("{header}\n")).unwrap();
    let o = texcas(&["compile-lexicon", "--macros", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let lex = texcas_core::Lexicon::from_json(&stdout(&o)).unwrap();
    assert_eq!(lex.len(), 0);

    let dup = dir.path().join("dup.csv");
    let row = "\\foo,0,1,1,,foo($0),Foo[$0],";
    fs::write(&dup, format!("{header}\n{row}\n{row}\n")).unwrap();
    let o = texcas(&["compile-lexicon", "--macros", dup.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains(":3:"), "{}", stderr(&o));
}

#[test]
fn corpus_runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let log = dir.path().join(name);
        let report = dir.path().join(format!("{name}.report"));
        let o = texcas(&[
            "corpus",
            &data("tests/data/classification.tsv"),
            "--log",
            log.to_str().unwrap(),
            "--report",
            report.to_str().unwrap(),
            "--seed",
            "7",
        ]);
        assert_eq!(o.status.code(), Some(0));
        (stdout(&o), fs::read_to_string(log).unwrap(), fs::read_to_string(report).unwrap())
    };
    let (stats, log, report) = run("a");
    assert_eq!(run("b"), (stats.clone(), log.clone(), report.clone()));
    let stats: serde_json::Value = serde_json::from_str(&stats).unwrap();
    assert_eq!(stats["verified"], 8);
    assert!(report.starts_with('#') && report.contains("pre-conversion"));
    let ids: Vec<String> = log
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["id"].as_str().unwrap().to_string())
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    for line in log.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["id", "outcome", "steps", "max_difference"] {
            assert!(v.get(key).is_some(), "{key} missing in {line}");
        }
    }
}

#[test]
fn empty_corpus_has_zero_stats() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.tsv");
    fs::write(&path, "# nothing\n").unwrap();
    let o = texcas(&["corpus", path.to_str().unwrap()]);
    let stats: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(stats.as_object().unwrap().values().all(|v| v == 0));
}

#[test]
fn roundtrip_and_inert() {
    let o = texcas(&["roundtrip", "\\frac{\\cos@{a\\Theta}}{2}"]);
    assert_eq!(stdout(&o).lines().count(), 5);
    assert!(stderr(&o).contains("after 1 cycles, Maple after 1½"));

    let o = texcas(&["inert", "--compat-prefix", "x=0..infinity"]);
    assert_eq!(
        stdout(&o),
        "[_Inert_EQUATION, [_Inert_NAME, \"x\"], [_Inert_RANGE, [_Inert_INTPOS, 0], [_Inert_NAME, \"infinity\"]]]\n"
    );
}
