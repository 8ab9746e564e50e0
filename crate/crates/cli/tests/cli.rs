use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use redundex::failure::Polynomial;

fn redundex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_redundex"))
        .args(args)
        .env_remove("REDUNDEX_WORKERS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const BIPLANE: &str = "n=7\n1 5 6 7\n2 4 6 7\n3 4 5 7\n1 2 4 5\n1 3 4 6\n2 3 5 6\n1 2 3 7\n";
const FANO: &str = "n=7\n1 2 3\n1 4 5\n1 6 7\n2 4 6\n2 5 7\n3 4 7\n3 5 6\n";

#[test]
fn codes_lists_tags() {
    let o = redundex(&["codes"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("protocol,tag,measurements,alphabet,cost\n"));
    assert!(out.contains("steane_minimal,[[7,1,3,0]],3,x,3\n"));
    assert!(out.contains("steane_dbr,[[7,1,3,1]],7,x,7\n"));
    assert!(out.contains("steane_ft,[[7,1,3,1]],3,x,6 + 6 pm - 6 pm^2\n"));
}

#[test]
fn failure_polynomials_parse_back() {
    let o = redundex(&["failure", "bitflip", "dbr", "--degree", "2"]);
    assert_eq!(code(&o), 0);
    let got: Polynomial = stdout(&o).parse().unwrap();
    let expected: Polynomial = "3 pq^2\n9 pq pm\n3 pm^2".parse().unwrap();
    assert_eq!(got, expected);

    let o = redundex(&["failure", "steane", "dbr", "--degree", "2", "--pretty"]);
    assert_eq!(stdout(&o).trim(), "21 pq^2");

    let o = redundex(&["failure", "bitflip", "dbr", "--degree", "0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).is_empty());
}

#[test]
fn exact_failure_matches_truncation_for_small_codes() {
    let exact: Polynomial = stdout(&redundex(&["failure", "bitflip", "ft", "--exact"]))
        .parse()
        .unwrap();
    let t: Polynomial = stdout(&redundex(&["failure", "bitflip", "ft", "--degree", "3"]))
        .parse()
        .unwrap();
    assert_eq!(exact.truncate(3), t);
}

#[test]
fn failure_on_a_design_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "biplane.txt", BIPLANE);
    let from_file: Polynomial = stdout(&redundex(&[
        "failure",
        path.to_str().unwrap(),
        "design",
        "--degree",
        "3",
    ]))
    .parse()
    .unwrap();
    let steane: Polynomial = stdout(&redundex(&["failure", "steane", "dbr", "--degree", "3"]))
        .parse()
        .unwrap();
    assert_eq!(from_file, steane);
}

#[test]
fn budget_refusal_exits_4() {
    let o = redundex(&["failure", "perfect5", "dbr", "--exact", "--budget", "10"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn design_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let biplane = write(dir.path(), "biplane.txt", BIPLANE);
    let o = redundex(&["design-check", biplane.to_str().unwrap(), "--css", "true"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("n=7 m=7 w=4 rho=4 lambda=2"));
    assert!(out.contains("constraint 1 (w even): pass"));
    assert!(out.contains("constraint 2 (even block intersections): pass"));
    assert!(out.contains("signature distance: 4"));

    let fano = write(dir.path(), "fano.txt", FANO);
    let o = redundex(&["design-check", fano.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("constraint 1 (w even): fail"));

    let not_design = write(dir.path(), "pairs.txt", "n=4\n1 2\n3 4\n");
    assert_eq!(code(&redundex(&["design-check", not_design.to_str().unwrap()])), 3);

    let malformed = write(dir.path(), "bad.txt", "nonsense\n");
    assert_eq!(code(&redundex(&["design-check", malformed.to_str().unwrap()])), 2);

    let missing = dir.path().join("missing.txt");
    assert_eq!(code(&redundex(&["design-check", missing.to_str().unwrap()])), 5);
}

#[test]
fn compare_grid_and_footer() {
    let o = redundex(&["compare", "--grid", "0:0.1:3,0:0.1:3"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "pq,pm,F_bitflip_minimal,F_bitflip_ft,F_bitflip_dbr,\
         diff_bitflip_minimal-bitflip_ft,diff_bitflip_minimal-bitflip_dbr,diff_bitflip_ft-bitflip_dbr"
    );
    assert_eq!(lines.next().unwrap(), "0,0,0,0,0,0,0,0");
    let rows: Vec<_> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 1 + 9);
    assert!(out.contains("# crossover bitflip_ft vs bitflip_dbr: c = 3 "));

    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("no/such/dir/out.csv");
    let o = redundex(&["compare", "--out", target.to_str().unwrap()]);
    assert_eq!(code(&o), 5);
}

#[test]
fn compare_rejects_bad_grids() {
    assert_eq!(code(&redundex(&["compare", "--grid", "0:2:3,0:0.1:3"])), 2);
    assert_eq!(code(&redundex(&["compare", "--grid", "nonsense"])), 2);
}

#[test]
fn simulate_is_reproducible() {
    let args = [
        "simulate", "steane", "dbr", "--pq", "0.05", "--pm", "0.05", "--trials", "20000", "--seed", "5",
    ];
    let a = redundex(&args);
    let b = redundex(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let z: f64 = stdout(&a)
        .lines()
        .find_map(|l| l.strip_prefix("z: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(z.abs() < 3.0);

    let mut with_workers = Command::new(env!("CARGO_BIN_EXE_redundex"));
    with_workers.args(args).env("REDUNDEX_WORKERS", "3");
    let c = with_workers.output().unwrap();
    assert!(stdout(&c).contains("workers: 3"));
}

#[test]
fn simulate_rejects_bad_probabilities() {
    let o = redundex(&["simulate", "bitflip", "dbr", "--pq", "1.5", "--pm", "0.05"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--pq"));
}

#[test]
fn unknown_code_and_protocol() {
    assert_eq!(code(&redundex(&["failure", "golay", "dbr", "--degree", "2"])), 2);
    assert_eq!(code(&redundex(&["failure", "bitflip", "mr", "--degree", "2"])), 2);
    assert_eq!(
        code(&redundex(&["failure", "bitflip", "dbr", "--alphabet", "depolarizing"])),
        2
    );
}

#[test]
fn golden_archive_is_current() {
    let archive = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden");
    let o = redundex(&["golden", "--check", "--dir", archive.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let dir = tempfile::tempdir().unwrap();
    let fresh = dir.path().join("golden");
    assert_eq!(code(&redundex(&["golden", "--dir", fresh.to_str().unwrap()])), 0);
    for entry in std::fs::read_dir(&archive).unwrap() {
        let name = entry.unwrap().file_name();
        let a = std::fs::read_to_string(archive.join(&name)).unwrap();
        let b = std::fs::read_to_string(fresh.join(&name)).unwrap();
        assert_eq!(a, b, "{name:?}");
    }
    std::fs::write(fresh.join("bitflip_dbr.poly"), "1 pq\n").unwrap();
    assert_eq!(
        code(&redundex(&["golden", "--check", "--dir", fresh.to_str().unwrap()])),
        3
    );
}

#[test]
fn table_csv() {
    let o = redundex(&["table", "bitflip", "dbr"]);
    let out = stdout(&o);
    assert!(out.starts_with("syndrome,correction\n"));
    assert_eq!(out.lines().count(), 9);
    assert!(out.contains("101,XII\n") && out.contains("111,AMBIG\n"));
}

#[test]
fn search_finds_biplanes() {
    let o = redundex(&[
        "search",
        "7",
        "4",
        "7",
        "--constraint1",
        "--constraint2",
        "--limit",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("# 3 designs"));
    assert_eq!(code(&redundex(&["search", "7", "3", "14", "--budget", "10"])), 4);
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "r.toml", "seed = 1\ntrials = 300\n[simulate]\nseed = 4\n");
    let run = |extra: &[&str]| {
        let mut args = vec![
            "--config",
            cfg.to_str().unwrap(),
            "-v",
            "simulate",
            "bitflip",
            "ft",
            "--pq",
            "0.1",
            "--pm",
            "0.1",
        ];
        args.extend_from_slice(extra);
        redundex(&args)
    };
    let o = run(&[]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("# seed = 4\n"));
    assert!(stderr(&o).contains("# trials = 300\n"));
    let o = run(&["--seed", "9"]);
    assert!(stderr(&o).contains("# seed = 9\n"));
    assert!(stdout(&o).contains("seed: 9\n"));

    let bad = write(dir.path(), "bad.toml", "[simulate]\ntrials = \"many\"\n");
    let o = redundex(&[
        "--config",
        bad.to_str().unwrap(),
        "simulate",
        "bitflip",
        "ft",
        "--pq",
        "0.1",
        "--pm",
        "0.1",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn every_command_has_help() {
    for cmd in [
        "codes",
        "design-check",
        "failure",
        "compare",
        "simulate",
        "golden",
        "table",
        "search",
    ] {
        let o = redundex(&[cmd, "--help"]);
        assert_eq!(code(&o), 0, "{cmd}");
        assert!(stdout(&o).contains("Usage"), "{cmd}");
    }
}
