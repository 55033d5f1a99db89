//! Command-line front end: one binary, one subcommand per experiment.
//!
//! Exit codes: 0 on success, 2 on argument problems (with usage text on
//! stderr), 1 on runtime failures. Every run prints its fully resolved
//! configuration, including the master seed, to stderr so results stay
//! attributable after the fact.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use crate::condorcet::TieRule;
use crate::error::{Error, Result};
use crate::experiments::{
    parse_config_file, preset, run_experiment, CondorcetConfig, DddConfig, ExperimentConfig,
    ExperimentKind, Figure, MarketConfig,
};
use crate::market::{
    environment, market_distance_error, scripted_walkthrough, DistanceVariant,
};

#[derive(Parser)]
#[command(
    name = "demosim",
    version,
    about = "Deterministic simulations of collective decision mechanisms",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Majority-vote probability surface over voter count and competence
    Condorcet(CondorcetArgs),
    /// Participation sweep: vote-power weighting vs. the direct baseline
    Ddd(DddArgs),
    /// Decision-market sweep: incentive-free vs. incentive markets
    Market(MarketArgs),
    /// Fixed three-citizen market walkthrough with both error variants
    MarketExample(MarketExampleArgs),
    /// Run a named full-scale configuration
    Preset(PresetArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TieRuleArg {
    /// Even splits count half; defined for every voter count
    FairCoin,
    /// Reject even voter counts outright
    OddOnly,
}

impl From<TieRuleArg> for TieRule {
    fn from(value: TieRuleArg) -> Self {
        match value {
            TieRuleArg::FairCoin => TieRule::FairCoin,
            TieRuleArg::OddOnly => TieRule::OddOnly,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Mean squared gap to the environment
    MeanSquared,
    /// Euclidean distance divided by sqrt(d)
    RootNormalized,
}

impl From<VariantArg> for DistanceVariant {
    fn from(value: VariantArg) -> Self {
        match value {
            VariantArg::MeanSquared => DistanceVariant::MeanSquared,
            VariantArg::RootNormalized => DistanceVariant::RootNormalized,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FigureArg {
    /// Probability surface: n 1..100, p step 0.01
    Fig2,
    /// Participation sweep, tendency error: 1000 networks of 100 citizens
    Fig4,
    /// Participation sweep, vote agreement: same run as fig4
    Fig5,
    /// Market sweep, distance error: 1000 reps, 1000 citizens, 50 dimensions
    Fig7,
    /// Market sweep, decision correctness: same run as fig7
    Fig8,
}

impl From<FigureArg> for Figure {
    fn from(value: FigureArg) -> Self {
        match value {
            FigureArg::Fig2 => Figure::Fig2,
            FigureArg::Fig4 => Figure::Fig4,
            FigureArg::Fig5 => Figure::Fig5,
            FigureArg::Fig7 => Figure::Fig7,
            FigureArg::Fig8 => Figure::Fig8,
        }
    }
}

#[derive(Args)]
struct CondorcetArgs {
    /// Smallest voter count
    #[arg(long)]
    n_min: Option<u64>,
    /// Largest voter count
    #[arg(long)]
    n_max: Option<u64>,
    /// Competence grid step over p in [0, 1]
    #[arg(long)]
    p_step: Option<f64>,
    /// Even-split handling
    #[arg(long, value_enum)]
    tie_rule: Option<TieRuleArg>,
    /// Start from this named configuration (fig2)
    #[arg(long, value_enum)]
    preset: Option<FigureArg>,
    /// Optional key = value defaults file (flags override it)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (default: machine parallelism)
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DddArgs {
    /// Population size per network
    #[arg(long)]
    citizens: Option<usize>,
    /// Generated networks (replications)
    #[arg(long)]
    networks: Option<u64>,
    /// Outgoing trust links per citizen
    #[arg(long)]
    m: Option<usize>,
    /// Assortativity strength (0 = pure preferential attachment)
    #[arg(long)]
    beta: Option<f64>,
    /// Smallest participation percentage
    #[arg(long)]
    k_min: Option<f64>,
    /// Largest participation percentage
    #[arg(long)]
    k_max: Option<f64>,
    /// Participation grid step
    #[arg(long)]
    k_step: Option<f64>,
    /// Absorption target in (0, 1)
    #[arg(long)]
    epsilon: Option<f64>,
    /// Master seed (random and printed when omitted)
    #[arg(long)]
    seed: Option<u64>,
    /// Replication divisor for desk-scale runs
    #[arg(long)]
    scale: Option<u32>,
    /// Start from this named configuration (fig4 or fig5)
    #[arg(long, value_enum)]
    preset: Option<FigureArg>,
    /// Optional key = value defaults file (flags override it)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (default: machine parallelism)
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MarketArgs {
    /// Citizens per market
    #[arg(long)]
    citizens: Option<usize>,
    /// Knowledge-space dimensions
    #[arg(long)]
    dims: Option<usize>,
    /// Replications per grid point
    #[arg(long)]
    reps: Option<u64>,
    /// Smallest population quality p
    #[arg(long)]
    p_min: Option<f64>,
    /// Largest population quality p
    #[arg(long)]
    p_max: Option<f64>,
    /// Quality grid step
    #[arg(long)]
    p_step: Option<f64>,
    /// Distance measure emitted in the CSV
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Master seed (random and printed when omitted)
    #[arg(long)]
    seed: Option<u64>,
    /// Replication divisor for desk-scale runs
    #[arg(long)]
    scale: Option<u32>,
    /// Start from this named configuration (fig7 or fig8)
    #[arg(long, value_enum)]
    preset: Option<FigureArg>,
    /// Optional key = value defaults file (flags override it)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (default: machine parallelism)
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MarketExampleArgs {
    /// Optional CSV path for the walkthrough table
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PresetArgs {
    /// Which configuration to run
    #[arg(value_enum)]
    figure: FigureArg,
    /// Master seed (random and printed when omitted)
    #[arg(long)]
    seed: Option<u64>,
    /// Replication divisor for desk-scale runs
    #[arg(long)]
    scale: Option<u32>,
    /// Worker threads (default: machine parallelism)
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

/// Parses `argv` and runs the selected experiment; returns the process exit
/// code instead of exiting, so the dispatcher itself stays testable.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let _ = err.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(Error::InvalidParameter(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `demosim <subcommand> --help` for usage");
            2
        }
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Condorcet(args) => run_condorcet(args),
        Command::Ddd(args) => run_ddd(args),
        Command::Market(args) => run_market(args),
        Command::MarketExample(args) => run_market_example(args),
        Command::Preset(args) => run_preset(args),
    }
}

/// Values loaded from a `key = value` file; every key must be consumed.
#[derive(Default)]
struct FileConfig {
    values: HashMap<String, String>,
}

impl FileConfig {
    fn load(path: Option<&PathBuf>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| Error::param(format!("cannot read config {}: {e}", path.display())))?;
        let values = parse_config_file(&text)?.into_iter().collect();
        Ok(FileConfig { values })
    }

    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.values.remove(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| Error::param(format!("config key `{key}`: bad value {raw:?}: {e}"))),
        }
    }

    fn take_enum<T: ValueEnum>(&mut self, key: &str) -> Result<Option<T>> {
        match self.values.remove(key) {
            None => Ok(None),
            Some(raw) => T::from_str(&raw, true)
                .map(Some)
                .map_err(|e| Error::param(format!("config key `{key}`: bad value {raw:?}: {e}"))),
        }
    }

    fn finish(self) -> Result<()> {
        if let Some(key) = self.values.keys().next() {
            return Err(Error::param(format!("unknown config key `{key}`")));
        }
        Ok(())
    }
}

fn check_preset(given: Option<FigureArg>, allowed: &[FigureArg], subcommand: &str) -> Result<()> {
    if let Some(figure) = given {
        if !allowed.contains(&figure) {
            return Err(Error::param(format!(
                "preset {} does not belong to the `{subcommand}` subcommand",
                figure
                    .to_possible_value()
                    .map(|v| v.get_name().to_string())
                    .unwrap_or_default()
            )));
        }
    }
    Ok(())
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| rand::rng().random())
}

fn threads_label(threads: Option<usize>) -> String {
    threads.map_or_else(|| "default".to_string(), |t| t.to_string())
}

fn run_condorcet(args: CondorcetArgs) -> Result<()> {
    check_preset(args.preset, &[FigureArg::Fig2], "condorcet")?;
    let mut file = FileConfig::load(args.config.as_ref())?;
    let defaults = CondorcetConfig::default();
    let cfg = CondorcetConfig {
        n_min: args.n_min.or(file.take("n-min")?).unwrap_or(defaults.n_min),
        n_max: args.n_max.or(file.take("n-max")?).unwrap_or(defaults.n_max),
        p_step: args.p_step.or(file.take("p-step")?).unwrap_or(defaults.p_step),
        tie_rule: args
            .tie_rule
            .or(file.take_enum::<TieRuleArg>("tie-rule")?)
            .map_or(defaults.tie_rule, TieRule::from),
    };
    file.finish()?;

    eprintln!(
        "# demosim condorcet: n={}..{} p-step={} tie-rule={} threads={} out={}",
        cfg.n_min,
        cfg.n_max,
        cfg.p_step,
        match cfg.tie_rule {
            TieRule::FairCoin => "fair-coin",
            TieRule::OddOnly => "odd-only",
        },
        threads_label(args.threads),
        args.out.display()
    );
    run_experiment(&ExperimentConfig {
        kind: ExperimentKind::CondorcetSurface(cfg),
        master_seed: 0,
        scale: 1,
        threads: args.threads,
        out: Some(args.out),
    })?;
    Ok(())
}

fn run_ddd(args: DddArgs) -> Result<()> {
    check_preset(args.preset, &[FigureArg::Fig4, FigureArg::Fig5], "ddd")?;
    let mut file = FileConfig::load(args.config.as_ref())?;
    let defaults = DddConfig::default();
    let cfg = DddConfig {
        citizens: args.citizens.or(file.take("citizens")?).unwrap_or(defaults.citizens),
        networks: args.networks.or(file.take("networks")?).unwrap_or(defaults.networks),
        m: args.m.or(file.take("m")?).unwrap_or(defaults.m),
        beta: args.beta.or(file.take("beta")?).unwrap_or(defaults.beta),
        k_min: args.k_min.or(file.take("k-min")?).unwrap_or(defaults.k_min),
        k_max: args.k_max.or(file.take("k-max")?).unwrap_or(defaults.k_max),
        k_step: args.k_step.or(file.take("k-step")?).unwrap_or(defaults.k_step),
        epsilon: args.epsilon.or(file.take("epsilon")?).unwrap_or(defaults.epsilon),
    };
    let seed = resolve_seed(args.seed.or(file.take("seed")?));
    let scale = args.scale.or(file.take("scale")?).unwrap_or(1);
    let threads = args.threads.or(file.take("threads")?);
    file.finish()?;

    eprintln!(
        "# demosim ddd: citizens={} networks={} (effective {}) m={} beta={} k={}..{} step={} \
         epsilon={} seed={} scale={} threads={} out={}",
        cfg.citizens,
        cfg.networks,
        (cfg.networks / scale.max(1) as u64).max(1),
        cfg.m,
        cfg.beta,
        cfg.k_min,
        cfg.k_max,
        cfg.k_step,
        cfg.epsilon,
        seed,
        scale,
        threads_label(threads),
        args.out.display()
    );
    run_experiment(&ExperimentConfig {
        kind: ExperimentKind::DddSweep(cfg),
        master_seed: seed,
        scale,
        threads,
        out: Some(args.out),
    })?;
    Ok(())
}

fn run_market(args: MarketArgs) -> Result<()> {
    check_preset(args.preset, &[FigureArg::Fig7, FigureArg::Fig8], "market")?;
    let mut file = FileConfig::load(args.config.as_ref())?;
    let defaults = MarketConfig::default();
    let cfg = MarketConfig {
        citizens: args.citizens.or(file.take("citizens")?).unwrap_or(defaults.citizens),
        dims: args.dims.or(file.take("dims")?).unwrap_or(defaults.dims),
        reps: args.reps.or(file.take("reps")?).unwrap_or(defaults.reps),
        p_min: args.p_min.or(file.take("p-min")?).unwrap_or(defaults.p_min),
        p_max: args.p_max.or(file.take("p-max")?).unwrap_or(defaults.p_max),
        p_step: args.p_step.or(file.take("p-step")?).unwrap_or(defaults.p_step),
        variant: args
            .variant
            .or(file.take_enum::<VariantArg>("variant")?)
            .map_or(defaults.variant, DistanceVariant::from),
    };
    let seed = resolve_seed(args.seed.or(file.take("seed")?));
    let scale = args.scale.or(file.take("scale")?).unwrap_or(1);
    let threads = args.threads.or(file.take("threads")?);
    file.finish()?;

    eprintln!(
        "# demosim market: citizens={} dims={} reps={} (effective {}) p={}..{} step={} \
         variant={} seed={} scale={} threads={} out={}",
        cfg.citizens,
        cfg.dims,
        cfg.reps,
        (cfg.reps / scale.max(1) as u64).max(1),
        cfg.p_min,
        cfg.p_max,
        cfg.p_step,
        match cfg.variant {
            DistanceVariant::MeanSquared => "mean-squared",
            DistanceVariant::RootNormalized => "root-normalized",
        },
        seed,
        scale,
        threads_label(threads),
        args.out.display()
    );
    run_experiment(&ExperimentConfig {
        kind: ExperimentKind::MarketSweep(cfg),
        master_seed: seed,
        scale,
        threads,
        out: Some(args.out),
    })?;
    Ok(())
}

fn run_market_example(args: MarketExampleArgs) -> Result<()> {
    eprintln!(
        "# demosim market-example: fixed walkthrough out={}",
        args.out
            .as_ref()
            .map_or_else(|| "-".to_string(), |p| p.display().to_string())
    );
    let w = scripted_walkthrough();
    let env = environment(3);
    let fmt_point =
        |m: &[f64]| format!("[{}, {}, {}]", m[0], m[1], m[2]);
    println!("incentive-free market: {}", fmt_point(&w.free.m));
    println!("incentive market:      {}", fmt_point(&w.incentive.m));
    for (label, variant) in [
        ("mean-squared", DistanceVariant::MeanSquared),
        ("root-normalized", DistanceVariant::RootNormalized),
    ] {
        let free = market_distance_error(&w.free.m, &env, variant)?;
        let inc = market_distance_error(&w.incentive.m, &env, variant)?;
        println!("e_dist {label}: incentive-free {free:.6}, incentive {inc:.6}");
    }
    run_experiment(&ExperimentConfig {
        kind: ExperimentKind::MarketExample,
        master_seed: 0,
        scale: 1,
        threads: None,
        out: args.out,
    })?;
    Ok(())
}

fn run_preset(args: PresetArgs) -> Result<()> {
    let kind = preset(args.figure.into());
    let seed = resolve_seed(args.seed);
    let scale = args.scale.unwrap_or(1);
    eprintln!(
        "# demosim preset {}: seed={} scale={} threads={} out={}",
        args.figure
            .to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default(),
        seed,
        scale,
        threads_label(args.threads),
        args.out.display()
    );
    run_experiment(&ExperimentConfig {
        kind,
        master_seed: seed,
        scale,
        threads: args.threads,
        out: Some(args.out),
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(parts: &[&str]) -> Vec<String> {
        std::iter::once("demosim")
            .chain(parts.iter().copied())
            .map(String::from)
            .collect()
    }

    #[test]
    fn help_exits_cleanly() {
        assert_eq!(parse_and_dispatch(argv(&["--help"])), 0);
        assert_eq!(parse_and_dispatch(argv(&["ddd", "--help"])), 0);
    }

    #[test]
    fn unknown_flags_are_usage_errors() {
        assert_eq!(parse_and_dispatch(argv(&["condorcet", "--bogus", "1"])), 2);
        assert_eq!(parse_and_dispatch(argv(&["nonsense"])), 2);
    }

    #[test]
    fn invalid_grid_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x.csv");
        let code = parse_and_dispatch(argv(&[
            "ddd",
            "--k-step",
            "0",
            "--out",
            out.to_str().unwrap(),
        ]));
        assert_eq!(code, 2);
    }

    #[test]
    fn mismatched_preset_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x.csv");
        let code = parse_and_dispatch(argv(&[
            "ddd",
            "--preset",
            "fig7",
            "--out",
            out.to_str().unwrap(),
        ]));
        assert_eq!(code, 2);
    }

    #[test]
    fn runtime_io_failure_is_exit_one() {
        let code = parse_and_dispatch(argv(&[
            "market-example",
            "--out",
            "/nonexistent-dir/x.csv",
        ]));
        assert_eq!(code, 1);
    }

    #[test]
    fn market_example_succeeds_and_writes() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("walkthrough.csv");
        let code = parse_and_dispatch(argv(&["market-example", "--out", out.to_str().unwrap()]));
        assert_eq!(code, 0);
        let text = fs::read_to_string(&out).unwrap();
        assert!(text.starts_with("market,m1,m2,m3,"));
    }

    #[test]
    fn config_file_values_fill_gaps_and_flags_win() {
        let dir = tempfile::tempdir().unwrap();
        let conf = dir.path().join("run.conf");
        fs::write(&conf, "citizens = 20\nnetworks = 2\nk-min = 50\nk-max = 100\nk-step = 50\nseed = 7\n").unwrap();
        let out_a = dir.path().join("a.csv");
        let out_b = dir.path().join("b.csv");

        let code = parse_and_dispatch(argv(&[
            "ddd",
            "--config",
            conf.to_str().unwrap(),
            "--out",
            out_a.to_str().unwrap(),
        ]));
        assert_eq!(code, 0);

        // Same file, but the flag overrides networks down to 1.
        let code = parse_and_dispatch(argv(&[
            "ddd",
            "--config",
            conf.to_str().unwrap(),
            "--networks",
            "1",
            "--out",
            out_b.to_str().unwrap(),
        ]));
        assert_eq!(code, 0);
        let a = fs::read_to_string(&out_a).unwrap();
        let b = fs::read_to_string(&out_b).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn unknown_config_key_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let conf = dir.path().join("run.conf");
        fs::write(&conf, "citizen = 20\n").unwrap();
        let out = dir.path().join("x.csv");
        let code = parse_and_dispatch(argv(&[
            "ddd",
            "--config",
            conf.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]));
        assert_eq!(code, 2);
    }
}
