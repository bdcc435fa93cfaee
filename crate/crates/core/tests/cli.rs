use std::path::{Path, PathBuf};

use galcheck::cli::run;
use galcheck::extensive::{ExtensiveGame, Tree};
use galcheck::textio::{dump_game, load_bimatrix, load_structure};
use galcheck::Rational;
use serde_json::Value;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

struct Run {
    code: i32,
    out: String,
    err: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.out).unwrap()
    }
}

fn galcheck(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("galcheck").chain(args.iter().copied()), &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn temp(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn check_player_atom_on_example_structure() {
    let r = galcheck(&["check", "--model", &fixture("example2.json"), "--formula", "@1"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let json = r.json();
    assert_eq!(json["sat"], serde_json::json!(["∅"]));
    assert_eq!(json["initial_sat"], serde_json::json!(["∅"]));
    assert_eq!(json["stats"]["states"], 5);
}

#[test]
fn check_exit_one_when_initial_state_fails() {
    let r = galcheck(&["check", "--model", &fixture("example2.json"), "--formula", "@2"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["sat"], serde_json::json!(["(A)"]));
}

#[test]
fn check_bindings_and_formula_files() {
    let model = fixture("example2.json");
    let formula = "exists w2:S2 . !geq(u1(Oh(h, v1:S1, v2:S2)), u1(Oh(h, v1:S1, w2)))";
    let unbound = galcheck(&["check", "--model", &model, "--formula", formula]);
    assert_eq!(unbound.code, 2);
    assert!(unbound.err.contains("--bind"), "{}", unbound.err);

    let bound = galcheck(&["check", "--model", &model, "--formula", formula, "--bind", "v1=⟨A⟩", "--bind", "v2=#S2:1"]);
    assert_eq!(bound.code, 1, "{}", bound.err);
    // at (A) player 1's payoff under ⟨A⟩,⟨R⟩ is already the best available
    assert!(!bound.json()["sat"].as_array().unwrap().iter().any(|s| s == "(A)"));

    let dir = tempfile::tempdir().unwrap();
    let file = temp(&dir, "f.gal");
    std::fs::write(&file, "AG (!@1 | EX @2)\n").unwrap();
    let r = galcheck(&["check", "--model", &model, "--formula-file", &file]);
    assert_eq!(r.code, 0, "{}", r.err);

    let declared = galcheck(&["check", "--model", &model, "--formula", "geq(u1(Oh(h, v, #S2:1)), u1(#T:0))", "--bind", "v:S1=⟨A⟩"]);
    assert_eq!(declared.code, 0, "{}", declared.err);
}

#[test]
fn check_errors_exit_two() {
    let model = fixture("example2.json");
    for args in [
        vec!["check", "--model", &model, "--formula", "nosuch"],
        vec!["check", "--model", &model, "--formula", "@1 &"],
        vec!["check", "--model", "/nonexistent.json", "--formula", "true"],
        vec!["check", "--model", &model, "--formula", "true", "--bind", "x=1"],
        vec!["check", "--model", &model],
        vec!["frobnicate"],
    ] {
        let r = galcheck(&args);
        assert_eq!(r.code, 2, "{args:?}");
        assert!(!r.err.is_empty());
    }
}

#[test]
fn eq_on_example_game() {
    let ne = galcheck(&["eq", "--game", &fixture("example1.json"), "--concept", "ne"]);
    assert_eq!(ne.code, 0, "{}", ne.err);
    assert_eq!(ne.json()["profiles"], serde_json::json!(["⟨⟨A⟩,⟨R⟩⟩", "⟨⟨B⟩,⟨L⟩⟩"]));
    assert_eq!(ne.json()["oracle_agrees"], true);
    let spe = galcheck(&["eq", "--game", &fixture("example1.json"), "--concept", "spe"]);
    assert_eq!(spe.json()["profiles"], serde_json::json!(["⟨⟨A⟩,⟨R⟩⟩"]));
    assert_eq!(spe.json()["profile_count"], 4);
    assert_eq!(galcheck(&["eq", "--game", &fixture("example1.json"), "--concept", "xyz"]).code, 2);
}

fn wide_game() -> ExtensiveGame<Rational> {
    let labels: Vec<String> = (0..13).map(|i| format!("m{i}")).collect();
    let leaf = |x: i64| Tree::leaf(vec![("1", Rational::from_integer(x))]);
    let moves = labels
        .iter()
        .map(|l| (l.as_str(), Tree::node("1", vec![("a", leaf(0)), ("b", leaf(1)), ("c", leaf(2))])))
        .collect();
    ExtensiveGame::new(vec!["1".into()], Tree::node("1", moves))
}

#[test]
fn eq_refuses_oversized_games() {
    let game = wide_game();
    assert!(game.profile_count() > galcheck::cli::PROFILE_LIMIT);
    let dir = tempfile::tempdir().unwrap();
    let path = temp(&dir, "wide.json");
    std::fs::write(&path, dump_game(&game)).unwrap();
    let r = galcheck(&["eq", "--game", &path, "--concept", "spe"]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("20726199"), "{}", r.err);
    assert!(r.out.is_empty());
}

#[test]
fn eq_rejects_malformed_games() {
    let dir = tempfile::tempdir().unwrap();
    let path = temp(&dir, "bad.json");
    std::fs::write(&path, r#"{"players": ["1"], "root": {"player": "9", "moves": {"a": {"utilities": {"1": 0}}}}}"#).unwrap();
    let r = galcheck(&["eq", "--game", &path, "--concept", "ne"]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("/root"), "{}", r.err);
}

#[test]
fn gen_tictactoe_spread_all() {
    let dir = tempfile::tempdir().unwrap();
    let out = temp(&dir, "ttt.json");
    let r = galcheck(&["gen", "tictactoe", "--playerX", "all", "--playerO", "all", "-o", &out]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.json()["states"], 5478);
    assert!(r.err.contains("ms"));
    let g = load_structure(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(g.state_count(), 5478);
}

#[test]
fn gen_rejects_bad_policies() {
    let dir = tempfile::tempdir().unwrap();
    let out = temp(&dir, "ttt.json");
    for p in ["minimax:0", "minimax", "random", "minimax:x"] {
        let r = galcheck(&["gen", "tictactoe", "--playerX", p, "--playerO", "all", "-o", &out]);
        assert_eq!(r.code, 2, "{p}");
    }
    assert!(!PathBuf::from(&out).exists());
}

#[test]
fn gen_random_bimatrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = temp(&dir, "b.json");
    let r = galcheck(&["gen", "random-2p", "--m", "2", "--n", "2", "--bound", "1", "--seed", "7", "-o", &out]);
    assert_eq!(r.code, 0, "{}", r.err);
    let b = load_bimatrix(&std::fs::read(&out).unwrap()).unwrap();
    assert!(b.u1.iter().chain(&b.u2).flatten().all(|&x| x == 0));

    let r = galcheck(&["gen", "random-2p", "--m", "2", "--n", "2", "--bound", "10", "--seed", "42", "-o", &out]);
    assert_eq!(r.code, 0);
    let written: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let golden: Value = serde_json::from_slice(&std::fs::read(fixture("bimatrix_2x2_b10_s42.json")).unwrap()).unwrap();
    assert_eq!(written, golden);

    let r = galcheck(&["gen", "random-2p", "--m", "0", "--n", "2", "--bound", "10", "--seed", "1", "-o", &out]);
    assert_eq!(r.code, 2);
}

fn without_millis(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
}

#[test]
fn bench_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = temp(&dir, "a.csv");
    let b = temp(&dir, "b.csv");
    for out in [&a, &b] {
        let r = galcheck(&["bench", "random-2p", "--sizes", "2..4", "--trials", "1", "--bound", "10", "--seed", "3", "-o", out]);
        assert_eq!(r.code, 0, "{}", r.err);
    }
    let a = std::fs::read_to_string(a).unwrap();
    let b = std::fs::read_to_string(b).unwrap();
    assert_eq!(a.lines().count(), 4);
    assert_eq!(a.lines().next().unwrap(), "experiment,m,n,payoff_bound,seed,equilibria,millis");
    assert_eq!(without_millis(&a), without_millis(&b));

    let r = galcheck(&["bench", "random-2p", "--sizes", "2..3", "--trials", "2", "--compare-constant"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.out.lines().count(), 1 + 2 * 2 * 2);
    assert!(r.err.contains("size 3"), "{}", r.err);

    for sizes in ["4..2", "0..3", "x..3", "3"] {
        assert_eq!(galcheck(&["bench", "random-2p", "--sizes", sizes]).code, 2, "{sizes}");
    }
}

#[test]
fn real_binary_exit_codes() {
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_galcheck"))
        .args(["check", "--model", &fixture("example2.json"), "--formula", "@2"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    let help = std::process::Command::new(env!("CARGO_BIN_EXE_galcheck")).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("check"));
}
