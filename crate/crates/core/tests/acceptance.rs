//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use galcheck::checker::{check, Checker};
use galcheck::extensive::{
    backward_induction, enumerate_equilibria, ne_formula, oracle_equilibria, profile_valuation, spe_formula,
    to_gal_structure, Concept, ExtensiveGame,
};
use galcheck::gamegen::{bench_random_2p, size_ratios, BenchConfig};
use galcheck::logic::{Formula, Literal, Term};
use galcheck::structure::{GalStructure, Valuation};
use galcheck::Rational;
use rand::Rng;

const CORPUS_SEED: u64 = 2024;
const CORPUS_SIZE: usize = 200;
const STRUCTURE_SEED: u64 = 77;
const STRUCTURE_SUITE: usize = 200;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn galcheck(args: &[&str]) -> (i32, serde_json::Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_galcheck")).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&stdout).unwrap_or(serde_json::Value::Null);
    (out.status.code().unwrap_or(-1), json, String::from_utf8(out.stderr).unwrap())
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    if took > limit {
        return Err(format!("took {took:?}, limit {limit:?}"));
    }
    Ok(())
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let game = fixture("example1.json");
    let game = game.to_str().unwrap();
    let mut found = Vec::new();
    for concept in ["ne", "spe"] {
        let (code, json, err) = galcheck(&["eq", "--game", game, "--concept", concept]);
        ensure(code == 0, || format!("eq --concept {concept} exited {code}: {err}"))?;
        ensure(json["oracle_agrees"] == true, || format!("oracle disagreement for {concept}"))?;
        let profiles: BTreeSet<String> = json["profiles"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| p.as_str().unwrap().to_string())
            .collect();
        found.push(profiles);
    }
    let ne: BTreeSet<String> = ["⟨⟨A⟩,⟨R⟩⟩", "⟨⟨B⟩,⟨L⟩⟩"].iter().map(|s| s.to_string()).collect();
    let spe: BTreeSet<String> = ["⟨⟨A⟩,⟨R⟩⟩"].iter().map(|s| s.to_string()).collect();
    ensure(found[0] == ne, || format!("NE = {:?}", found[0]))?;
    ensure(found[1] == spe, || format!("SPE = {:?}", found[1]))?;
    within(Duration::from_secs(1), start)?;
    Ok("NE = {⟨⟨A⟩,⟨R⟩⟩, ⟨⟨B⟩,⟨L⟩⟩}, SPE = {⟨⟨A⟩,⟨R⟩⟩}".into())
}

fn equivalence_audit(corpus: &[ExtensiveGame<Rational>]) -> Outcome {
    let start = Instant::now();
    let mut profiles = 0usize;
    for (gi, game) in corpus.iter().enumerate() {
        let g = to_gal_structure(game).unwrap();
        let checker = Checker::new(&g).unwrap();
        for (concept, formula) in [(Concept::SubgamePerfect, spe_formula(game)), (Concept::Nash, ne_formula(game))] {
            let oracle: BTreeSet<String> = oracle_equilibria(game, concept)
                .unwrap()
                .iter()
                .map(|p| game.profile_label(p))
                .collect();
            for ix in 0..game.profile_count() as usize {
                let p = game.profile_at(ix);
                let by_logic = checker.check(&formula, &profile_valuation(game, &p)).unwrap().holds_initially();
                let label = game.profile_label(&p);
                ensure(by_logic == oracle.contains(&label), || {
                    format!("game {gi}, {concept}, profile {label}: logic says {by_logic}")
                })?;
                profiles += 1;
            }
        }
    }
    within(Duration::from_secs(300), start)?;
    Ok(format!("{} games, {profiles} profile checks agree", corpus.len()))
}

fn structure_suite() -> Vec<GalStructure> {
    let mut r = rng(STRUCTURE_SEED);
    (0..STRUCTURE_SUITE).map(|_| RandomModel::random(&mut r, 20).build()).collect()
}

fn sat(g: &GalStructure, f: &Formula, v: &Valuation) -> BTreeSet<String> {
    check(g, f, v).unwrap().ids(g).into_iter().collect()
}

fn complement(g: &GalStructure, s: &BTreeSet<String>) -> BTreeSet<String> {
    g.state_ids().iter().filter(|x| !s.contains(*x)).cloned().collect()
}

fn identity_suite(suite: &[GalStructure]) -> Outcome {
    let start = Instant::now();
    let mut r = rng(STRUCTURE_SEED + 1);
    let mut checks = 0usize;
    for (si, g) in suite.iter().enumerate() {
        for _ in 0..3 {
            let v = random_valuation(&mut r, g);
            let a = random_formula(&mut r, 3);
            let b = random_formula(&mut r, 3);
            let pairs = [
                (Formula::False, Formula::True.not()),
                (a.clone().and(b.clone()), a.clone().implies(b.clone().not()).not()),
                (a.clone().or(b.clone()), a.clone().not().implies(b.clone())),
                (a.clone().ex(), a.clone().not().ax().not()),
                (a.clone().af(), Formula::True.au(a.clone())),
                (a.clone().ef(), Formula::True.eu(a.clone())),
                (a.clone().ag(), a.clone().not().ef().not()),
                (a.clone().eg(), a.clone().not().af().not()),
                (Formula::forall(x0(), a.clone()), Formula::exists(x0(), a.clone().not()).not()),
            ];
            for (lhs, rhs) in pairs {
                ensure(sat(g, &lhs, &v) == sat(g, &rhs, &v), || format!("structure {si}: {lhs} vs {rhs}"))?;
                checks += 1;
            }
            let duals = [
                (a.clone().ex(), a.clone().not().ax()),
                (a.clone().eg(), Formula::True.au(a.clone().not())),
                (a.clone().ag(), Formula::True.eu(a.clone().not())),
            ];
            for (lhs, rhs) in duals {
                ensure(sat(g, &lhs, &v) == complement(g, &sat(g, &rhs, &v)), || {
                    format!("structure {si}: {lhs} is not the complement of {rhs}")
                })?;
                checks += 1;
            }
            let x = if r.gen_bool(0.5) { x0() } else { y0() };
            let size = g.domain(g.signature().sort_id(&x.sort).unwrap()).len();
            let instances: Vec<BTreeSet<String>> = (0..size)
                .map(|i| sat(g, &a.substitute(&x, &Literal::new(x.sort.clone(), i)), &v))
                .collect();
            let union: BTreeSet<String> = instances.iter().flatten().cloned().collect();
            let inter: BTreeSet<String> = instances
                .iter()
                .skip(1)
                .fold(instances[0].clone(), |acc, s| acc.intersection(s).cloned().collect());
            ensure(sat(g, &Formula::exists(x.clone(), a.clone()), &v) == union, || {
                format!("structure {si}: ∃{} {a} differs from the union of instances", x.name)
            })?;
            ensure(sat(g, &Formula::forall(x.clone(), a.clone()), &v) == inter, || {
                format!("structure {si}: ∀{} {a} differs from the intersection of instances", x.name)
            })?;
            checks += 2;
        }
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!("{} structures, {checks} set equalities", suite.len()))
}

fn path_oracle(suite: &[GalStructure]) -> Outcome {
    let start = Instant::now();
    let mut r = rng(STRUCTURE_SEED + 2);
    let small: Vec<&GalStructure> = suite.iter().filter(|g| g.state_count() <= 8).collect();
    ensure(!small.is_empty(), || "no structure with at most 8 states".into())?;
    let mut checks = 0usize;
    for g in &small {
        let paths = PathOracle::new(g);
        for _ in 0..4 {
            let v = random_valuation(&mut r, g);
            let a = random_formula(&mut r, 2);
            let b = random_formula(&mut r, 2);
            for f in [a.clone().eu(b.clone()), a.clone().au(b.clone()), a.clone().ax(), random_formula(&mut r, 3)] {
                let naive: BTreeSet<String> = g
                    .states()
                    .filter(|e| naive_sat(g, &paths, &f, &v)[e.index()])
                    .map(|e| g.state_name(e).to_string())
                    .collect();
                ensure(sat(g, &f, &v) == naive, || format!("{f}: fixpoint and path enumeration differ"))?;
                checks += 1;
            }
        }
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!("{} structures, {checks} formulas", small.len()))
}

fn tictactoe() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (minimax, first) = (path("minimax.json"), path("first.json"));
    for (x, out) in [("minimax:9", &minimax), ("first", &first)] {
        let (code, _, err) = galcheck(&["gen", "tictactoe", "--playerX", x, "--playerO", "all", "-o", out]);
        ensure(code == 0, || format!("gen with --playerX {x} exited {code}: {err}"))?;
    }
    let runs = [
        (&minimax, "AF (winX | Draw)", 0),
        (&minimax, "AG !winO", 0),
        (&first, "AF (winX | Draw)", 1),
    ];
    for (model, formula, expected) in runs {
        let (code, _, err) = galcheck(&["check", "--model", model, "--formula", formula]);
        ensure(code == expected, || format!("check {formula:?} exited {code}, expected {expected}: {err}"))?;
    }
    within(Duration::from_secs(300), start)?;
    Ok("minimax: AF (winX | Draw) and AG !winO hold; first-available: AF (winX | Draw) fails".into())
}

fn fig3() -> Outcome {
    let start = Instant::now();
    let cfg = BenchConfig { sizes: 2..=10, trials: 5, bound: 100, seed: 1 };
    let random = bench_random_2p(&cfg);
    let constant = bench_random_2p(&BenchConfig { bound: 0, ..cfg });
    for rec in &constant {
        ensure(rec.equilibria == rec.m * rec.n, || {
            format!("constant {}x{} has {} equilibria", rec.m, rec.n, rec.equilibria)
        })?;
    }
    let ratios = size_ratios(&constant, &random);
    let mut worst = 1.0f64;
    for (size, ratio) in &ratios {
        ensure(*ratio <= 5.0 && *ratio >= 0.2, || format!("size {size}: constant/random ratio {ratio:.2}"))?;
        worst = worst.max(ratio.max(1.0 / ratio));
    }
    ensure(ratios.len() == 9, || format!("{} sizes measured", ratios.len()))?;
    within(Duration::from_secs(300), start)?;
    Ok(format!("constant counts are n², worst time ratio {worst:.2}"))
}

fn mapping_audit(corpus: &[ExtensiveGame<Rational>]) -> Outcome {
    for (gi, game) in corpus.iter().enumerate() {
        let g = to_gal_structure(game).unwrap();
        let n = game.history_count();
        ensure(g.state_count() == n, || format!("game {gi}: {} states for {n} histories", g.state_count()))?;
        ensure(g.actions().len() == n - 1, || format!("game {gi}: {} actions", g.actions().len()))?;
        for h in 0..n {
            let label = game.history_label(h);
            let e = g.state(&label).ok_or_else(|| format!("game {gi}: no state {label}"))?;
            let terminal = game.node(h).is_terminal();
            let deadlock = g.succ(e).is_empty();
            let idle = g.players_at(e).is_empty();
            ensure(terminal == deadlock && deadlock == idle, || {
                format!("game {gi}, {label}: terminal {terminal}, deadlock {deadlock}, no players {idle}")
            })?;
            let value = g.eval_term_at(e, &Term::constant("h"), &Valuation::new()).unwrap();
            ensure(g.element_label(value) == label, || format!("game {gi}: h at {label} is {}", g.element_label(value)))?;
        }
    }
    Ok(format!("{} games", corpus.len()))
}

fn spe_sanity(corpus: &[ExtensiveGame<Rational>]) -> Outcome {
    for (gi, game) in corpus.iter().enumerate() {
        let spe = enumerate_equilibria(game, Concept::SubgamePerfect).unwrap();
        let ne = enumerate_equilibria(game, Concept::Nash).unwrap();
        let bi = backward_induction(game).unwrap();
        ensure(!spe.is_empty(), || format!("game {gi}: no SPE"))?;
        ensure(spe.contains(&bi), || format!("game {gi}: backward induction profile missing"))?;
        ensure(spe.iter().all(|p| ne.contains(p)), || format!("game {gi}: an SPE is not an NE"))?;
    }
    Ok(format!("{} games", corpus.len()))
}

fn main() {
    let corpus = game_corpus(CORPUS_SEED, CORPUS_SIZE);
    let suite = structure_suite();
    let criteria: Vec<Criterion> = vec![
        ("worked example exactness", Box::new(worked_example)),
        ("equilibrium formulas agree with the oracle", Box::new(|| equivalence_audit(&corpus))),
        ("semantic identities, dualities, extensionality", Box::new(|| identity_suite(&suite))),
        ("fixpoints agree with path enumeration", Box::new(|| path_oracle(&suite))),
        ("tic-tac-toe properties", Box::new(tictactoe)),
        ("constant vs random payoff bench", Box::new(fig3)),
        ("game-to-structure mapping", Box::new(|| mapping_audit(&corpus))),
        ("subgame perfect sanity", Box::new(|| spe_sanity(&corpus))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
