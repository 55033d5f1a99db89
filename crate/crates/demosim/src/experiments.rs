//! Parameter-sweep harness: derived seeds, replication scheduling, CSV
//! emission, and full-scale presets for the standard figures.
//!
//! Replications are independent and may run on any number of threads; every
//! seed is derived from the master seed and the replication coordinates (see
//! [`crate::rng::derive_seed`]), and aggregation always folds replication
//! results in index order, so output bytes never depend on scheduling.

use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::condorcet::{condorcet_surface, SurfaceGrid, SurfaceSpec, TieRule};
use crate::ddd::{
    default_max_iter, direct_baseline, full_population_reference, propagate_vote_power,
    sample_activity, tendency_error, weighted_outcome,
};
use crate::error::{Error, Result};
use crate::market::{
    environment, generate_knowledge, market_decision, market_distance_error,
    run_incentive_free_market, run_incentive_market, scripted_walkthrough, DistanceVariant,
};
use crate::rng::derive_seed;
use crate::trustnet::{generate_network, generate_tendencies, NetworkGenParams};

// Experiment tags for seed derivation (documented reproducibility contract).
const TAG_DDD: u64 = 2;
const TAG_MARKET: u64 = 3;
// Purpose tags within an experiment.
const PURPOSE_TENDENCIES: u64 = 1;
const PURPOSE_NETWORK: u64 = 2;
const PURPOSE_VOTE: u64 = 3;
const PURPOSE_ACTIVITY: u64 = 4;
const PURPOSE_KNOWLEDGE: u64 = 1;
const PURPOSE_ORDER: u64 = 2;
const PURPOSE_COINS: u64 = 3;

/// Majority-vote surface sweep parameters.
#[derive(Debug, Clone, Copy)]
pub struct CondorcetConfig {
    pub n_min: u64,
    pub n_max: u64,
    pub p_step: f64,
    pub tie_rule: TieRule,
}

impl Default for CondorcetConfig {
    fn default() -> Self {
        CondorcetConfig {
            n_min: 1,
            n_max: 100,
            p_step: 0.01,
            tie_rule: TieRule::FairCoin,
        }
    }
}

/// Participation sweep parameters.
#[derive(Debug, Clone, Copy)]
pub struct DddConfig {
    pub citizens: usize,
    pub networks: u64,
    pub m: usize,
    pub beta: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub k_step: f64,
    pub epsilon: f64,
}

impl Default for DddConfig {
    fn default() -> Self {
        DddConfig {
            citizens: 100,
            networks: 1000,
            m: 3,
            beta: 24.0,
            k_min: 1.0,
            k_max: 100.0,
            k_step: 1.0,
            epsilon: crate::ddd::DEFAULT_EPSILON,
        }
    }
}

/// Market sweep parameters.
#[derive(Debug, Clone, Copy)]
pub struct MarketConfig {
    pub citizens: usize,
    pub dims: usize,
    pub reps: u64,
    pub p_min: f64,
    pub p_max: f64,
    pub p_step: f64,
    pub variant: DistanceVariant,
}

impl Default for MarketConfig {
    fn default() -> Self {
        MarketConfig {
            citizens: 1000,
            dims: 50,
            reps: 1000,
            p_min: 0.05,
            p_max: 0.95,
            p_step: 0.05,
            variant: DistanceVariant::MeanSquared,
        }
    }
}

/// What to run.
#[derive(Debug, Clone)]
pub enum ExperimentKind {
    CondorcetSurface(CondorcetConfig),
    DddSweep(DddConfig),
    MarketSweep(MarketConfig),
    MarketExample,
}

/// A fully resolved run: experiment, master seed, scheduling, output.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub master_seed: u64,
    /// Replication-count divisor for desk-scale runs; grid shape never
    /// changes.
    pub scale: u32,
    /// Worker threads; `None` uses the machine default.
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

/// The standard full-scale figure configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig4,
    Fig5,
    Fig7,
    Fig8,
}

/// Full-scale configuration behind each figure preset. Figures 4/5 share one
/// sweep (two columns of the same CSV), as do figures 7/8.
pub fn preset(figure: Figure) -> ExperimentKind {
    match figure {
        Figure::Fig2 => ExperimentKind::CondorcetSurface(CondorcetConfig::default()),
        Figure::Fig4 | Figure::Fig5 => ExperimentKind::DddSweep(DddConfig::default()),
        Figure::Fig7 | Figure::Fig8 => ExperimentKind::MarketSweep(MarketConfig::default()),
    }
}

/// One aggregated grid point of the participation sweep.
#[derive(Debug, Clone, Copy)]
pub struct DddRow {
    pub k: f64,
    pub e_tend_ddd: f64,
    pub e_tend_direct: f64,
    pub vote_agree_ddd: f64,
    pub vote_agree_direct: f64,
    pub mean_residual: f64,
    pub resamples: u64,
    pub se_e_tend_ddd: f64,
    pub se_e_tend_direct: f64,
    pub se_vote_agree_ddd: f64,
    pub se_vote_agree_direct: f64,
}

/// One aggregated grid point of the market sweep, carrying both distance
/// variants.
#[derive(Debug, Clone, Copy)]
pub struct MarketRow {
    pub p: f64,
    pub e_dist_free_ms: f64,
    pub e_dist_incentive_ms: f64,
    pub e_dist_free_rn: f64,
    pub e_dist_incentive_rn: f64,
    pub e_deci_free: f64,
    pub e_deci_incentive: f64,
    pub se_e_dist_free_ms: f64,
    pub se_e_dist_incentive_ms: f64,
    pub se_e_dist_free_rn: f64,
    pub se_e_dist_incentive_rn: f64,
    pub se_e_deci_free: f64,
    pub se_e_deci_incentive: f64,
}

impl MarketRow {
    pub fn e_dist_free(&self, variant: DistanceVariant) -> f64 {
        match variant {
            DistanceVariant::MeanSquared => self.e_dist_free_ms,
            DistanceVariant::RootNormalized => self.e_dist_free_rn,
        }
    }

    pub fn e_dist_incentive(&self, variant: DistanceVariant) -> f64 {
        match variant {
            DistanceVariant::MeanSquared => self.e_dist_incentive_ms,
            DistanceVariant::RootNormalized => self.e_dist_incentive_rn,
        }
    }
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn grid_values(min: f64, max: f64, step: f64) -> Vec<f64> {
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| min + i as f64 * step).collect()
}

fn scaled_reps(reps: u64, scale: u32) -> u64 {
    (reps / scale as u64).max(1)
}

struct DddRepPoint {
    e_tend_ddd: f64,
    e_tend_direct: f64,
    agree_ddd: f64,
    agree_direct: f64,
    residual: f64,
    resamples: u64,
}

/// Runs the participation sweep: `networks / scale` generated populations and
/// networks, each evaluated at every k against the full-population outcome.
pub fn run_ddd_sweep(cfg: &DddConfig, master_seed: u64, scale: u32) -> Result<Vec<DddRow>> {
    if !cfg.k_step.is_finite() || cfg.k_step <= 0.0 {
        return Err(Error::param("k-step must be positive"));
    }
    if !(cfg.k_min > 0.0 && cfg.k_max <= 100.0 && cfg.k_min <= cfg.k_max) {
        return Err(Error::param("k range must satisfy 0 < k-min <= k-max <= 100"));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(Error::param("epsilon must lie strictly between 0 and 1"));
    }
    let ks = grid_values(cfg.k_min, cfg.k_max, cfg.k_step);
    let reps = scaled_reps(cfg.networks, scale);
    let max_iter = default_max_iter(cfg.citizens);

    // First replication runs eagerly so parameter errors surface as errors
    // instead of panics inside the parallel loop.
    let run_rep = |rep: u64| -> Result<Vec<DddRepPoint>> {
        let pop = generate_tendencies(
            cfg.citizens,
            derive_seed(master_seed, &[TAG_DDD, rep, PURPOSE_TENDENCIES]),
        )?;
        let net = generate_network(
            &pop,
            &NetworkGenParams {
                m: cfg.m,
                beta: cfg.beta,
                seed: derive_seed(master_seed, &[TAG_DDD, rep, PURPOSE_NETWORK]),
            },
        )?;
        let vote_seed = derive_seed(master_seed, &[TAG_DDD, rep, PURPOSE_VOTE]);
        let reference = full_population_reference(&pop, vote_seed);

        ks.iter()
            .enumerate()
            .map(|(kq, &k)| {
                let mask = sample_activity(
                    cfg.citizens,
                    k,
                    derive_seed(master_seed, &[TAG_DDD, rep, PURPOSE_ACTIVITY, kq as u64]),
                )?;
                let state = propagate_vote_power(&net, &mask, cfg.epsilon, max_iter)?;
                let ddd = weighted_outcome(&pop, &state.y, vote_seed)?;
                let direct = direct_baseline(&pop, &mask, vote_seed)?;
                Ok(DddRepPoint {
                    e_tend_ddd: tendency_error(reference.tendency, ddd.tendency),
                    e_tend_direct: tendency_error(reference.tendency, direct.tendency),
                    agree_ddd: f64::from(ddd.vote == reference.vote),
                    agree_direct: f64::from(direct.vote == reference.vote),
                    residual: state.residual,
                    resamples: mask.resamples() as u64,
                })
            })
            .collect()
    };

    let mut per_rep: Vec<Vec<DddRepPoint>> = Vec::with_capacity(reps as usize);
    per_rep.push(run_rep(0)?);
    let rest: Result<Vec<Vec<DddRepPoint>>> = (1..reps).into_par_iter().map(run_rep).collect();
    per_rep.extend(rest?);

    Ok(ks
        .iter()
        .enumerate()
        .map(|(kq, &k)| {
            let col = |f: &dyn Fn(&DddRepPoint) -> f64| -> Vec<f64> {
                per_rep.iter().map(|rep| f(&rep[kq])).collect()
            };
            let (e_tend_ddd, se_e_tend_ddd) = mean_and_se(&col(&|p| p.e_tend_ddd));
            let (e_tend_direct, se_e_tend_direct) = mean_and_se(&col(&|p| p.e_tend_direct));
            let (vote_agree_ddd, se_vote_agree_ddd) = mean_and_se(&col(&|p| p.agree_ddd));
            let (vote_agree_direct, se_vote_agree_direct) =
                mean_and_se(&col(&|p| p.agree_direct));
            let (mean_residual, _) = mean_and_se(&col(&|p| p.residual));
            let resamples = per_rep.iter().map(|rep| rep[kq].resamples).sum();
            DddRow {
                k,
                e_tend_ddd,
                e_tend_direct,
                vote_agree_ddd,
                vote_agree_direct,
                mean_residual,
                resamples,
                se_e_tend_ddd,
                se_e_tend_direct,
                se_vote_agree_ddd,
                se_vote_agree_direct,
            }
        })
        .collect())
}

struct MarketRepPoint {
    free_ms: f64,
    inc_ms: f64,
    free_rn: f64,
    inc_rn: f64,
    deci_free: f64,
    deci_inc: f64,
}

/// Runs the market sweep: for each p on the grid, `reps / scale` paired
/// incentive-free and incentive market runs over freshly drawn knowledge.
pub fn run_market_sweep(cfg: &MarketConfig, master_seed: u64, scale: u32) -> Result<Vec<MarketRow>> {
    if !cfg.p_step.is_finite() || cfg.p_step <= 0.0 {
        return Err(Error::param("p-step must be positive"));
    }
    if !(0.0..=1.0).contains(&cfg.p_min)
        || !(0.0..=1.0).contains(&cfg.p_max)
        || cfg.p_min > cfg.p_max
    {
        return Err(Error::param("p range must satisfy 0 <= p-min <= p-max <= 1"));
    }
    if cfg.citizens < 1 || cfg.dims < 1 {
        return Err(Error::param("market sweep needs citizens >= 1 and dims >= 1"));
    }
    let ps = grid_values(cfg.p_min, cfg.p_max, cfg.p_step);
    let reps = scaled_reps(cfg.reps, scale);
    let env = environment(cfg.dims);

    let run_rep = |p_index: usize, p: f64, rep: u64| -> Result<MarketRepPoint> {
        let know = generate_knowledge(
            cfg.citizens,
            cfg.dims,
            p.min(1.0),
            derive_seed(master_seed, &[TAG_MARKET, p_index as u64, rep, PURPOSE_KNOWLEDGE]),
        )?;
        let order_seed =
            derive_seed(master_seed, &[TAG_MARKET, p_index as u64, rep, PURPOSE_ORDER]);
        let coin_seed =
            derive_seed(master_seed, &[TAG_MARKET, p_index as u64, rep, PURPOSE_COINS]);
        let free = run_incentive_free_market(&know, order_seed);
        let incentive = run_incentive_market(&know, order_seed, coin_seed);
        Ok(MarketRepPoint {
            free_ms: market_distance_error(&free.m, &env, DistanceVariant::MeanSquared)?,
            inc_ms: market_distance_error(&incentive.m, &env, DistanceVariant::MeanSquared)?,
            free_rn: market_distance_error(&free.m, &env, DistanceVariant::RootNormalized)?,
            inc_rn: market_distance_error(&incentive.m, &env, DistanceVariant::RootNormalized)?,
            deci_free: f64::from(market_decision(&free.m).correct),
            deci_inc: f64::from(market_decision(&incentive.m).correct),
        })
    };

    ps.iter()
        .enumerate()
        .map(|(p_index, &p)| {
            let mut points: Vec<MarketRepPoint> = Vec::with_capacity(reps as usize);
            points.push(run_rep(p_index, p, 0)?);
            let rest: Result<Vec<MarketRepPoint>> = (1..reps)
                .into_par_iter()
                .map(|rep| run_rep(p_index, p, rep))
                .collect();
            points.extend(rest?);

            let col = |f: &dyn Fn(&MarketRepPoint) -> f64| -> Vec<f64> {
                points.iter().map(f).collect()
            };
            let (e_dist_free_ms, se_e_dist_free_ms) = mean_and_se(&col(&|x| x.free_ms));
            let (e_dist_incentive_ms, se_e_dist_incentive_ms) = mean_and_se(&col(&|x| x.inc_ms));
            let (e_dist_free_rn, se_e_dist_free_rn) = mean_and_se(&col(&|x| x.free_rn));
            let (e_dist_incentive_rn, se_e_dist_incentive_rn) = mean_and_se(&col(&|x| x.inc_rn));
            let (e_deci_free, se_e_deci_free) = mean_and_se(&col(&|x| x.deci_free));
            let (e_deci_incentive, se_e_deci_incentive) = mean_and_se(&col(&|x| x.deci_inc));
            Ok(MarketRow {
                p,
                e_dist_free_ms,
                e_dist_incentive_ms,
                e_dist_free_rn,
                e_dist_incentive_rn,
                e_deci_free,
                e_deci_incentive,
                se_e_dist_free_ms,
                se_e_dist_incentive_ms,
                se_e_dist_free_rn,
                se_e_dist_incentive_rn,
                se_e_deci_free,
                se_e_deci_incentive,
            })
        })
        .collect()
}

/// Grid coordinates print as plain decimals, trimmed to at most six places.
pub(crate) fn fmt_grid(x: f64) -> String {
    let mut s = format!("{x:.6}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Probabilities print at 12 significant digits.
pub(crate) fn fmt_prob(x: f64) -> String {
    format!("{x:.11e}")
}

/// Renders the majority-vote surface as `p,n,probability` rows.
pub fn surface_csv(grid: &SurfaceGrid) -> String {
    let mut out = String::from("p,n,probability\n");
    for (i, &p) in grid.p_values.iter().enumerate() {
        for (j, &n) in grid.n_values.iter().enumerate() {
            out.push_str(&fmt_grid(p));
            out.push(',');
            out.push_str(&n.to_string());
            out.push(',');
            out.push_str(&fmt_prob(grid.cells[i][j]));
            out.push('\n');
        }
    }
    out
}

/// Renders the participation sweep; statistics print with full round-trip
/// precision.
pub fn ddd_csv(rows: &[DddRow]) -> String {
    let mut out = String::from(
        "k,e_tend_ddd,e_tend_direct,vote_agree_ddd,vote_agree_direct,mean_residual,resamples,\
         se_e_tend_ddd,se_e_tend_direct,se_vote_agree_ddd,se_vote_agree_direct\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt_grid(r.k),
            r.e_tend_ddd,
            r.e_tend_direct,
            r.vote_agree_ddd,
            r.vote_agree_direct,
            r.mean_residual,
            r.resamples,
            r.se_e_tend_ddd,
            r.se_e_tend_direct,
            r.se_vote_agree_ddd,
            r.se_vote_agree_direct
        ));
    }
    out
}

/// Renders the market sweep under the chosen distance variant.
pub fn market_csv(rows: &[MarketRow], variant: DistanceVariant) -> String {
    let mut out = String::from(
        "p,e_dist_free,e_dist_incentive,e_deci_free,e_deci_incentive,\
         se_e_dist_free,se_e_dist_incentive,se_e_deci_free,se_e_deci_incentive\n",
    );
    for r in rows {
        let (f, i, sf, si) = match variant {
            DistanceVariant::MeanSquared => (
                r.e_dist_free_ms,
                r.e_dist_incentive_ms,
                r.se_e_dist_free_ms,
                r.se_e_dist_incentive_ms,
            ),
            DistanceVariant::RootNormalized => (
                r.e_dist_free_rn,
                r.e_dist_incentive_rn,
                r.se_e_dist_free_rn,
                r.se_e_dist_incentive_rn,
            ),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt_grid(r.p),
            f,
            i,
            r.e_deci_free,
            r.e_deci_incentive,
            sf,
            si,
            r.se_e_deci_free,
            r.se_e_deci_incentive
        ));
    }
    out
}

/// Renders the fixed market walkthrough: both final markets and both error
/// variants.
pub fn market_example_csv() -> String {
    let w = scripted_walkthrough();
    let env = environment(3);
    let mut out = String::from("market,m1,m2,m3,e_mean_squared,e_root_normalized\n");
    for (name, state) in [("incentive_free", &w.free), ("incentive", &w.incentive)] {
        let ms = market_distance_error(&state.m, &env, DistanceVariant::MeanSquared)
            .expect("fixed dimensions");
        let rn = market_distance_error(&state.m, &env, DistanceVariant::RootNormalized)
            .expect("fixed dimensions");
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            name, state.m[0], state.m[1], state.m[2], ms, rn
        ));
    }
    out
}

/// Everything a run produces: the CSV body (already written to `out` when a
/// path was configured).
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub csv: String,
}

/// Executes a resolved experiment configuration on the configured number of
/// threads and writes the CSV when an output path is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    if config.scale < 1 {
        return Err(Error::param("scale must be at least 1"));
    }
    let csv = match config.threads {
        None => run_kind(config)?,
        Some(threads) => {
            if threads < 1 {
                return Err(Error::param("threads must be at least 1"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::param(format!("cannot build thread pool: {e}")))?;
            pool.install(|| run_kind(config))?
        }
    };
    if let Some(path) = &config.out {
        fs::write(path, &csv).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("writing {}: {e}", path.display()),
            ))
        })?;
    }
    Ok(ExperimentOutput { csv })
}

fn run_kind(config: &ExperimentConfig) -> Result<String> {
    match &config.kind {
        ExperimentKind::CondorcetSurface(cfg) => {
            let grid = condorcet_surface(&SurfaceSpec {
                p_min: 0.0,
                p_max: 1.0,
                p_step: cfg.p_step,
                n_min: cfg.n_min,
                n_max: cfg.n_max,
                tie_rule: cfg.tie_rule,
            })?;
            Ok(surface_csv(&grid))
        }
        ExperimentKind::DddSweep(cfg) => {
            let rows = run_ddd_sweep(cfg, config.master_seed, config.scale)?;
            Ok(ddd_csv(&rows))
        }
        ExperimentKind::MarketSweep(cfg) => {
            let rows = run_market_sweep(cfg, config.master_seed, config.scale)?;
            Ok(market_csv(&rows, cfg.variant))
        }
        ExperimentKind::MarketExample => Ok(market_example_csv()),
    }
}

/// Parses a plain-text `key = value` configuration file. Blank lines and
/// `#` comments are skipped; later duplicates win.
pub fn parse_config_file(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::param(format!(
                "config line {} is not `key = value`: {raw:?}",
                lineno + 1
            )));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk_ddd() -> DddConfig {
        DddConfig {
            citizens: 30,
            networks: 8,
            k_min: 20.0,
            k_max: 100.0,
            k_step: 40.0,
            ..DddConfig::default()
        }
    }

    fn desk_market() -> MarketConfig {
        MarketConfig {
            citizens: 60,
            dims: 8,
            reps: 12,
            p_min: 0.2,
            p_max: 0.8,
            p_step: 0.3,
            ..MarketConfig::default()
        }
    }

    #[test]
    fn full_participation_grid_point_has_zero_error() {
        let cfg = DddConfig {
            citizens: 40,
            networks: 3,
            k_min: 100.0,
            k_max: 100.0,
            k_step: 1.0,
            ..DddConfig::default()
        };
        let rows = run_ddd_sweep(&cfg, 5, 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].e_tend_ddd, 0.0);
        assert_eq!(rows[0].vote_agree_ddd, 1.0);
    }

    #[test]
    fn surface_preset_has_expected_cardinality() {
        let out = run_experiment(&ExperimentConfig {
            kind: preset(Figure::Fig2),
            master_seed: 0,
            scale: 1,
            threads: Some(2),
            out: None,
        })
        .unwrap();
        assert_eq!(out.csv.lines().count(), 1 + 101 * 100);
        assert!(out.csv.starts_with("p,n,probability\n"));
    }

    #[test]
    fn presets_match_the_published_protocols() {
        match preset(Figure::Fig4) {
            ExperimentKind::DddSweep(cfg) => {
                assert_eq!(cfg.citizens, 100);
                assert_eq!(cfg.networks, 1000);
                assert_eq!((cfg.k_min, cfg.k_max, cfg.k_step), (1.0, 100.0, 1.0));
            }
            other => panic!("unexpected preset {other:?}"),
        }
        match preset(Figure::Fig7) {
            ExperimentKind::MarketSweep(cfg) => {
                assert_eq!(cfg.citizens, 1000);
                assert_eq!(cfg.dims, 50);
                assert_eq!(cfg.reps, 1000);
            }
            other => panic!("unexpected preset {other:?}"),
        }
        match preset(Figure::Fig2) {
            ExperimentKind::CondorcetSurface(cfg) => {
                assert_eq!((cfg.n_min, cfg.n_max), (1, 100));
                assert_eq!(cfg.p_step, 0.01);
            }
            other => panic!("unexpected preset {other:?}"),
        }
    }

    #[test]
    fn identical_configs_give_identical_bytes_across_thread_counts() {
        for kind in [
            ExperimentKind::DddSweep(desk_ddd()),
            ExperimentKind::MarketSweep(desk_market()),
        ] {
            let run = |threads: usize| {
                run_experiment(&ExperimentConfig {
                    kind: kind.clone(),
                    master_seed: 99,
                    scale: 1,
                    threads: Some(threads),
                    out: None,
                })
                .unwrap()
                .csv
            };
            let single = run(1);
            let quad = run(4);
            assert_eq!(single, quad);
            assert_eq!(single, run(1));
        }
    }

    #[test]
    fn scale_divides_replications_only() {
        let cfg = desk_market();
        let full = run_market_sweep(&cfg, 1, 1).unwrap();
        let scaled = run_market_sweep(&cfg, 1, 4).unwrap();
        assert_eq!(full.len(), scaled.len());
        let full_ps: Vec<f64> = full.iter().map(|r| r.p).collect();
        let scaled_ps: Vec<f64> = scaled.iter().map(|r| r.p).collect();
        assert_eq!(full_ps, scaled_ps);
        // 12 / 4 = 3 reps leave a different (but valid) mean.
        assert!(scaled.iter().all(|r| (0.0..=1.0).contains(&r.e_dist_free_ms)));
    }

    #[test]
    fn desk_scale_market_sweep_orders_the_curves() {
        let rows = run_market_sweep(
            &MarketConfig {
                citizens: 100,
                dims: 10,
                reps: 20,
                p_min: 0.2,
                p_max: 0.8,
                p_step: 0.2,
                ..MarketConfig::default()
            },
            7,
            1,
        )
        .unwrap();
        for r in &rows {
            assert!(
                r.e_dist_incentive_ms <= r.e_dist_free_ms,
                "p={}: {} > {}",
                r.p,
                r.e_dist_incentive_ms,
                r.e_dist_free_ms
            );
        }
    }

    #[test]
    fn sweeps_reject_bad_grids() {
        let mut cfg = desk_ddd();
        cfg.k_step = 0.0;
        assert!(run_ddd_sweep(&cfg, 1, 1).is_err());
        let mut cfg = desk_ddd();
        cfg.k_max = 120.0;
        assert!(run_ddd_sweep(&cfg, 1, 1).is_err());
        let mut cfg = desk_market();
        cfg.p_step = -0.1;
        assert!(run_market_sweep(&cfg, 1, 1).is_err());
    }

    #[test]
    fn market_csv_respects_the_variant_choice() {
        let rows = run_market_sweep(&desk_market(), 3, 1).unwrap();
        let ms = market_csv(&rows, DistanceVariant::MeanSquared);
        let rn = market_csv(&rows, DistanceVariant::RootNormalized);
        assert_ne!(ms, rn);
        let first_ms: f64 = ms.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        let first_rn: f64 = rn.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert!((first_ms - rows[0].e_dist_free_ms).abs() < 1e-15);
        assert!((first_rn - rows[0].e_dist_free_rn).abs() < 1e-15);
        // The two variants are algebraically linked per replication, not at
        // the mean level; both must still be positive and ordered.
        assert!(first_rn > first_ms.sqrt() - 0.2 && first_rn < 1.0);
    }

    #[test]
    fn market_example_csv_has_both_rows() {
        let csv = market_example_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("incentive_free,0.5,0.5,0.4,"));
        assert!(lines[2].starts_with("incentive,0.7,0.6,0.7,"));
    }

    #[test]
    fn config_file_parsing_and_errors() {
        let pairs = parse_config_file("# comment\n\ncitizens = 100\nk-step=5\n").unwrap();
        assert_eq!(
            pairs,
            vec![
                ("citizens".to_string(), "100".to_string()),
                ("k-step".to_string(), "5".to_string())
            ]
        );
        assert!(parse_config_file("citizens 100").is_err());
    }

    #[test]
    fn grid_formatting_is_tidy() {
        assert_eq!(fmt_grid(10.0), "10");
        assert_eq!(fmt_grid(0.05), "0.05");
        assert_eq!(fmt_grid(0.30000000000000004), "0.3");
        assert_eq!(fmt_prob(0.648).len(), "6.48000000000e-1".len());
    }

    #[test]
    fn writes_csv_to_the_output_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("example.csv");
        let out = run_experiment(&ExperimentConfig {
            kind: ExperimentKind::MarketExample,
            master_seed: 0,
            scale: 1,
            threads: None,
            out: Some(path.clone()),
        })
        .unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), out.csv);
    }

    #[test]
    fn missing_directory_is_an_io_error() {
        let err = run_experiment(&ExperimentConfig {
            kind: ExperimentKind::MarketExample,
            master_seed: 0,
            scale: 1,
            threads: None,
            out: Some(PathBuf::from("/nonexistent-dir/x.csv")),
        })
        .unwrap_err();
        match err {
            Error::Io(_) => {}
            other => panic!("expected io error, got {other:?}"),
        }
    }
}
