//! Command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::checker::{CheckError, Checker};
use crate::extensive::{enumerate_equilibria, oracle_equilibria, Concept};
use crate::gamegen::{bench_random_2p, random_bimatrix, size_ratios, tictactoe_structure, BenchConfig, Policy, GENERATOR};
use crate::logic::{parse_formula_in, Var};
use crate::structure::{GalStructure, Valuation};
use crate::textio::{check_result_json, dump_bimatrix, dump_structure, load_game, load_structure, write_bench_csv};
use crate::Rational;

/// Games with more strategy profiles than this need `--force`.
pub const PROFILE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "galcheck", version, about = "Model checking for Game Analysis Logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a formula against a structure file.
    Check(CheckArgs),
    /// Enumerate the equilibria of an extensive game.
    Eq(EqArgs),
    /// Generate experiment inputs.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Time pure-equilibrium enumeration.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, conflicts_with = "formula_file", required_unless_present = "formula_file")]
    formula: Option<String>,
    #[arg(long)]
    formula_file: Option<PathBuf>,
    /// `VAR=ELEM` or `VAR:SORT=ELEM`; ELEM is a domain label or `#SORT:INDEX`.
    #[arg(long = "bind", value_name = "VAR=ELEM")]
    binds: Vec<String>,
}

#[derive(Debug, Args)]
struct EqArgs {
    #[arg(long)]
    game: PathBuf,
    #[arg(long, value_parser = parse_concept)]
    concept: Concept,
    /// Enumerate even when the profile count exceeds the safety limit.
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Tic-Tac-Toe transition system.
    Tictactoe {
        #[arg(long = "playerX", value_parser = parse_policy)]
        player_x: Policy<Rational>,
        #[arg(long = "playerO", value_parser = parse_policy)]
        player_o: Policy<Rational>,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Random two-player bimatrix game.
    #[command(name = "random-2p")]
    Random2p {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum BenchCommand {
    /// Square random games of each size; `--bound 0` selects constant payoffs.
    #[command(name = "random-2p")]
    Random2p {
        #[arg(long, value_name = "A..B")]
        sizes: String,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 10)]
        bound: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also run the constant-payoff family and report per-size time ratios.
        #[arg(long)]
        compare_constant: bool,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

fn parse_concept(s: &str) -> Result<Concept, String> {
    s.parse()
}

fn parse_policy(s: &str) -> Result<Policy<Rational>, String> {
    s.parse()
}

fn parse_sizes(s: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let (a, b) = s.split_once("..").ok_or_else(|| anyhow!("sizes must look like A..B, got `{s}`"))?;
    let a: usize = a.trim().parse().with_context(|| format!("bad lower size in `{s}`"))?;
    let b: usize = b.trim().trim_start_matches('=').parse().with_context(|| format!("bad upper size in `{s}`"))?;
    if a == 0 || a > b {
        bail!("size range `{s}` must satisfy 1 ≤ A ≤ B");
    }
    Ok(a..=b)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Failure with a specific exit code.
#[derive(Debug)]
struct Exit(i32, anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Exit {
    fn from(e: E) -> Self {
        Exit(2, e.into())
    }
}

fn configure_threads(err: &mut dyn Write) {
    let Ok(v) = std::env::var("GALCHECK_THREADS") else { return };
    match v.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            // a pool may already exist when running in-process more than once
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Err(_) => {
            let _ = writeln!(err, "warning: ignoring GALCHECK_THREADS={v:?}, expected a positive integer");
        }
    }
}

/// Runs the command line `args` and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    configure_threads(err);
    let result = match cli.command {
        Command::Check(a) => cmd_check(a, out),
        Command::Eq(a) => cmd_eq(a, out),
        Command::Gen(g) => cmd_gen(g, out, err),
        Command::Bench(b) => cmd_bench(b, out, err),
    };
    match result {
        Ok(code) => code,
        Err(Exit(code, e)) => {
            let _ = writeln!(err, "error: {e:#}");
            code
        }
    }
}

fn resolve_element(g: &GalStructure, var: &Var, text: &str) -> Result<crate::structure::Elem> {
    if let Some(lit) = text.strip_prefix('#') {
        let (sort, ix) = lit.split_once(':').ok_or_else(|| anyhow!("bad literal `{text}`"))?;
        if sort != var.sort {
            bail!("`{text}` has sort {sort}, but `{}` has sort {}", var.name, var.sort);
        }
        let ix: usize = ix.parse().with_context(|| format!("bad index in `{text}`"))?;
        return Ok(g.literal(sort, ix)?);
    }
    let sort = g
        .signature()
        .sort_id(&var.sort)
        .ok_or_else(|| anyhow!("unknown sort `{}`", var.sort))?;
    g.element(sort, text)
        .ok_or_else(|| anyhow!("`{text}` is not an element of sort `{}`", var.sort))
}

fn cmd_check(a: CheckArgs, out: &mut dyn Write) -> Result<i32, Exit> {
    let g = load_structure(&read(&a.model)?)?;
    let text = match (&a.formula, &a.formula_file) {
        (Some(f), _) => f.clone(),
        (None, Some(p)) => String::from_utf8(read(p)?).context("formula file is not UTF-8")?,
        (None, None) => return Err(anyhow!("give --formula or --formula-file").into()),
    };
    let mut declared = Vec::new();
    let mut pending = Vec::new();
    for b in &a.binds {
        let (lhs, elem) = b.split_once('=').ok_or_else(|| anyhow!("binding `{b}` must look like VAR=ELEM"))?;
        if let Some((name, sort)) = lhs.split_once(':') {
            declared.push(Var::new(name.trim(), sort.trim()));
        }
        pending.push((lhs.split(':').next().unwrap_or(lhs).trim().to_string(), elem.trim().to_string()));
    }
    let f = parse_formula_in(text.trim(), g.signature(), &declared).map_err(|e| anyhow!("formula: {e}"))?;
    let free = f.free_variables();
    let mut v = Valuation::new();
    for (name, elem) in pending {
        let var = free
            .iter()
            .find(|x| x.name == name)
            .ok_or_else(|| anyhow!("`{name}` is not a free variable of the formula"))?;
        v.bind(var.clone(), resolve_element(&g, var, &elem)?);
    }
    let checker = Checker::new(&g)?;
    let sat = checker.check(&f, &v).map_err(|e| match e {
        CheckError::Unassigned(x) => anyhow!("free variable `{}:{}` needs --bind", x.name, x.sort),
        other => other.into(),
    })?;
    let json = check_result_json(&g, &sat);
    writeln!(out, "{}", serde_json::to_string_pretty(&json)?)?;
    Ok(if sat.holds_initially() { 0 } else { 1 })
}

fn cmd_eq(a: EqArgs, out: &mut dyn Write) -> Result<i32, Exit> {
    let game = load_game(&read(&a.game)?)?;
    let total = game.profile_count();
    if total > PROFILE_LIMIT && !a.force {
        return Err(anyhow!("the game has {total} strategy profiles, more than {PROFILE_LIMIT}; pass --force to enumerate anyway").into());
    }
    let start = Instant::now();
    let found = enumerate_equilibria(&game, a.concept)?;
    let millis = start.elapsed().as_secs_f64() * 1e3;
    let oracle = oracle_equilibria(&game, a.concept)?;
    let agree = oracle == found;
    let json = json!({
        "concept": a.concept.to_string(),
        "profiles": found.iter().map(|p| game.profile_label(p)).collect::<Vec<_>>(),
        "profile_count": u64::try_from(total).unwrap_or(u64::MAX),
        "oracle_agrees": agree,
        "millis": millis,
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&json)?)?;
    if !agree {
        let extra: Vec<String> = oracle.iter().map(|p| game.profile_label(p)).collect();
        return Err(Exit(3, anyhow!("model checking and the direct oracle disagree; oracle found {extra:?}")));
    }
    Ok(0)
}

fn cmd_gen(g: GenCommand, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Exit> {
    match g {
        GenCommand::Tictactoe { player_x, player_o, output } => {
            let start = Instant::now();
            let s = tictactoe_structure(&player_x, &player_o);
            let millis = start.elapsed().as_secs_f64() * 1e3;
            write(&output, dump_structure(&s)?.as_bytes())?;
            writeln!(err, "generated in {millis:.1} ms")?;
            writeln!(out, "{}", json!({"states": s.state_count(), "actions": s.actions().len()}))?;
        }
        GenCommand::Random2p { m, n, bound, seed, output } => {
            if m == 0 || n == 0 || bound == 0 {
                return Err(anyhow!("--m, --n and --bound must be at least 1").into());
            }
            let b = random_bimatrix(m, n, bound, seed);
            write(&output, dump_bimatrix(&b).as_bytes())?;
            writeln!(out, "{}", json!({"m": m, "n": n, "bound": bound, "seed": seed, "generator": GENERATOR}))?;
        }
    }
    Ok(0)
}

fn cmd_bench(b: BenchCommand, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Exit> {
    let BenchCommand::Random2p { sizes, trials, bound, seed, compare_constant, output } = b;
    if trials == 0 {
        return Err(anyhow!("--trials must be at least 1").into());
    }
    let cfg = BenchConfig { sizes: parse_sizes(&sizes)?, trials, bound, seed };
    let mut records = bench_random_2p(&cfg);
    if compare_constant && bound != 0 {
        let constant = bench_random_2p(&BenchConfig { bound: 0, ..cfg.clone() });
        for (size, ratio) in size_ratios(&constant, &records) {
            writeln!(err, "size {size}: constant/random time ratio {ratio:.2}")?;
        }
        records.extend(constant);
    }
    let csv = write_bench_csv(&records);
    match output {
        Some(p) => write(&p, &csv)?,
        None => out.write_all(&csv)?,
    }
    Ok(0)
}
