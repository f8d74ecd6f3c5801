//! The operations behind each CLI subcommand. Flags override `--config`
//! file values; every run writes its outputs plus a `manifest.txt` echoing
//! the fully resolved configuration, and re-running from that manifest
//! reproduces the outputs byte for byte.

use std::path::{Path, PathBuf};

use clap::Args;

use blackjack_core::basic_strategy::{chart, compare_charts, ChartVariant, StrategyChart};
use blackjack_core::counting::CountingSystem;
use blackjack_core::learn::{
    backtest, base_backtest, extract_strategy_base, extract_strategy_ext, qtable_from_csv,
    qtable_to_csv, train_q_base, train_q_ext, EnvKind, EpsilonSchedule, Hyperparams,
};
use blackjack_core::rules::RulesConfig;
use blackjack_core::tablesim::{run_table, TableConfig};
use blackjack_core::{Currency, Error};

use crate::config::{resolve, KvConfig};
use crate::emit;
use crate::sweep::{run_sweep, SweepSpec};

fn load_file_config(path: &Option<PathBuf>) -> Result<KvConfig, Error> {
    match path {
        Some(p) => KvConfig::load(p),
        None => Ok(KvConfig::new()),
    }
}

fn ensure_out(out: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(out)?;
    Ok(())
}

fn write(out: &Path, name: &str, content: &str) -> Result<(), Error> {
    std::fs::write(out.join(name), content)?;
    Ok(())
}

#[derive(Args, Clone, Debug, Default)]
pub struct TrainArgs {
    /// Learning environment: `base` (hit/stand, infinite deck) or `ext`
    /// (all actions, finite shoe).
    #[arg(long)]
    pub env: Option<String>,
    /// Training episodes.
    #[arg(long)]
    pub episodes: Option<u64>,
    /// Greedy backtest episodes after training (0 skips the backtest).
    #[arg(long)]
    pub backtest_episodes: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Discount factor; defaults to 0.1 for `base` and 1.0 for `ext`.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shoe size for the extended environment.
    #[arg(long)]
    pub decks: Option<u32>,
    /// Counting system: ten_count|hi_lo|zen|uston_apc|none.
    #[arg(long)]
    pub system: Option<String>,
    /// Dealer hits soft 17.
    #[arg(long)]
    pub h17: bool,
    /// Betting unit for count-driven backtest bets.
    #[arg(long)]
    pub unit: Option<Currency>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn cmd_train(args: &TrainArgs) -> Result<(), Error> {
    let file = load_file_config(&args.config)?;
    let env = resolve(args.env.clone(), &file, "env", "base".to_string())?;
    let h17 = args.h17 || file.get_parsed::<bool>("h17")?.unwrap_or(false);
    let default_gamma = if env == "ext" { 1.0 } else { 0.1 };
    let hp = Hyperparams {
        alpha: resolve(args.alpha, &file, "alpha", 0.05)?,
        gamma: resolve(args.gamma, &file, "gamma", default_gamma)?,
        train_episodes: resolve(args.episodes, &file, "episodes", 50_000)?,
        backtest_episodes: resolve(args.backtest_episodes, &file, "backtest_episodes", 10_000)?,
        seed: resolve(args.seed, &file, "seed", 0)?,
    };
    let decks = resolve(args.decks, &file, "decks", 6)?;
    let system_name = resolve(args.system.clone(), &file, "system", "hi_lo".to_string())?;
    let system = CountingSystem::parse(&system_name)?;
    let unit = resolve(args.unit, &file, "unit", 100)?;
    let schedule = EpsilonSchedule::default();

    let mut manifest = KvConfig::new();
    manifest.set("command", "train");
    manifest.set("env", &env);
    manifest.set("episodes", hp.train_episodes);
    manifest.set("backtest_episodes", hp.backtest_episodes);
    manifest.set("alpha", hp.alpha);
    manifest.set("gamma", hp.gamma);
    manifest.set("seed", hp.seed);
    manifest.set("decks", decks);
    manifest.set("system", &system_name);
    manifest.set("h17", h17);
    manifest.set("unit", unit);

    ensure_out(&args.out)?;
    match env.as_str() {
        "base" => {
            let (q, train_metrics) = train_q_base(&hp, &schedule)?;
            write(
                &args.out,
                "curve.csv",
                &emit::learning_curve_csv(&train_metrics),
            )?;
            write(&args.out, "qtable.csv", &qtable_to_csv(&q, EnvKind::Base))?;
            write(&args.out, "chart.csv", &extract_strategy_base(&q).to_csv())?;
            let metrics = if hp.backtest_episodes > 0 {
                base_backtest(&q, hp.backtest_episodes, hp.seed)?
            } else {
                train_metrics
            };
            write(&args.out, "metrics.csv", &emit::metrics_csv(&metrics))?;
        }
        "ext" => {
            let rules = RulesConfig {
                num_decks: decks,
                dealer_hits_soft17: h17,
                ..RulesConfig::default()
            };
            let (q, train_metrics) = train_q_ext(&rules, system, &hp, &schedule)?;
            write(
                &args.out,
                "curve.csv",
                &emit::learning_curve_csv(&train_metrics),
            )?;
            write(&args.out, "qtable.csv", &qtable_to_csv(&q, EnvKind::Ext))?;
            let variant = ChartVariant::for_rules(h17);
            write(
                &args.out,
                "chart.csv",
                &extract_strategy_ext(&q, variant).to_csv(),
            )?;
            let metrics = if hp.backtest_episodes > 0 {
                backtest(&q, &rules, system, hp.backtest_episodes, unit, hp.seed)?
            } else {
                train_metrics
            };
            write(&args.out, "metrics.csv", &emit::metrics_csv(&metrics))?;
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "env must be `base` or `ext`, got `{other}`"
            )))
        }
    }
    manifest.write_manifest(&args.out.join("manifest.txt"))?;
    Ok(())
}

#[derive(Args, Clone, Debug, Default)]
pub struct BacktestArgs {
    /// Path to a qtable.csv produced by `train`.
    #[arg(long)]
    pub qtable: Option<PathBuf>,
    #[arg(long)]
    pub episodes: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub decks: Option<u32>,
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long)]
    pub h17: bool,
    #[arg(long)]
    pub unit: Option<Currency>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn cmd_backtest(args: &BacktestArgs) -> Result<(), Error> {
    let file = load_file_config(&args.config)?;
    let qtable_path = match (&args.qtable, file.get("qtable")) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => PathBuf::from(p),
        (None, None) => return Err(Error::InvalidConfig("missing --qtable".into())),
    };
    let episodes = resolve(args.episodes, &file, "episodes", 10_000)?;
    let seed = resolve(args.seed, &file, "seed", 0)?;
    let decks = resolve(args.decks, &file, "decks", 6)?;
    let h17 = args.h17 || file.get_parsed::<bool>("h17")?.unwrap_or(false);
    let system_name = resolve(args.system.clone(), &file, "system", "hi_lo".to_string())?;
    let system = CountingSystem::parse(&system_name)?;
    let unit = resolve(args.unit, &file, "unit", 100)?;

    let (q, env) = qtable_from_csv(&std::fs::read_to_string(&qtable_path)?)?;
    let metrics = match env {
        EnvKind::Base => base_backtest(&q, episodes, seed)?,
        EnvKind::Ext => {
            let rules = RulesConfig {
                num_decks: decks,
                dealer_hits_soft17: h17,
                ..RulesConfig::default()
            };
            backtest(&q, &rules, system, episodes, unit, seed)?
        }
    };

    let mut manifest = KvConfig::new();
    manifest.set("command", "backtest");
    manifest.set("qtable", qtable_path.display());
    manifest.set("episodes", episodes);
    manifest.set("seed", seed);
    manifest.set("decks", decks);
    manifest.set("system", &system_name);
    manifest.set("h17", h17);
    manifest.set("unit", unit);

    ensure_out(&args.out)?;
    write(&args.out, "metrics.csv", &emit::metrics_csv(&metrics))?;
    manifest.write_manifest(&args.out.join("manifest.txt"))?;
    Ok(())
}

#[derive(Args, Clone, Debug, Default)]
pub struct TablesimArgs {
    /// Players at the table (1-7); seat 0 is the card counter.
    #[arg(long)]
    pub players: Option<u32>,
    #[arg(long)]
    pub decks: Option<u32>,
    /// Dealer stands on soft 17 (the default).
    #[arg(long)]
    pub s17: bool,
    /// Dealer hits soft 17.
    #[arg(long)]
    pub h17: bool,
    #[arg(long)]
    pub sims: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub bankroll: Option<Currency>,
    #[arg(long)]
    pub dealer_ratio: Option<f64>,
    #[arg(long)]
    pub unit: Option<Currency>,
    #[arg(long)]
    pub min_bet: Option<Currency>,
    #[arg(long)]
    pub max_bet: Option<Currency>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn cmd_tablesim(args: &TablesimArgs) -> Result<(), Error> {
    let file = load_file_config(&args.config)?;
    let defaults = TableConfig::default();
    let h17 = if args.h17 {
        true
    } else if args.s17 {
        false
    } else {
        file.get_parsed::<bool>("h17")?.unwrap_or(false)
    };
    let cfg = TableConfig {
        num_players: resolve(args.players, &file, "players", defaults.num_players)?,
        num_decks: resolve(args.decks, &file, "decks", defaults.num_decks)?,
        dealer_hits_soft17: h17,
        num_simulations: resolve(args.sims, &file, "sims", defaults.num_simulations)?,
        player_bankroll: resolve(args.bankroll, &file, "bankroll", defaults.player_bankroll)?,
        dealer_bankroll_ratio: resolve(
            args.dealer_ratio,
            &file,
            "dealer_ratio",
            defaults.dealer_bankroll_ratio,
        )?,
        betting_unit: resolve(args.unit, &file, "unit", defaults.betting_unit)?,
        random_bet_fraction: defaults.random_bet_fraction,
        table_min_bet: resolve(args.min_bet, &file, "min_bet", defaults.table_min_bet)?,
        table_max_bet: resolve(args.max_bet, &file, "max_bet", defaults.table_max_bet)?,
        seed: resolve(args.seed, &file, "seed", defaults.seed)?,
    };
    let report = run_table(&cfg)?;

    let mut manifest = KvConfig::new();
    manifest.set("command", "tablesim");
    manifest.set("players", cfg.num_players);
    manifest.set("decks", cfg.num_decks);
    manifest.set("h17", cfg.dealer_hits_soft17);
    manifest.set("sims", cfg.num_simulations);
    manifest.set("bankroll", cfg.player_bankroll);
    manifest.set("dealer_ratio", cfg.dealer_bankroll_ratio);
    manifest.set("unit", cfg.betting_unit);
    manifest.set("min_bet", cfg.table_min_bet);
    manifest.set("max_bet", cfg.table_max_bet);
    manifest.set("seed", cfg.seed);

    ensure_out(&args.out)?;
    write(&args.out, "tablesim.csv", &emit::tablesim_csv(&report))?;
    manifest.write_manifest(&args.out.join("manifest.txt"))?;
    Ok(())
}

#[derive(Args, Clone, Debug, Default)]
pub struct SweepArgs {
    /// Inclusive deck range, e.g. `4..8`, or a single count.
    #[arg(long)]
    pub decks: Option<String>,
    /// Comma-separated counting systems.
    #[arg(long)]
    pub systems: Option<String>,
    #[arg(long)]
    pub train_episodes: Option<u64>,
    #[arg(long)]
    pub backtest_episodes: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub h17: bool,
    #[arg(long)]
    pub unit: Option<Currency>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn parse_deck_range(text: &str) -> Result<Vec<u32>, Error> {
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u32 = lo
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad deck range `{text}`")))?;
        let hi: u32 = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| Error::Parse(format!("bad deck range `{text}`")))?;
        if lo == 0 || hi < lo {
            return Err(Error::Parse(format!("bad deck range `{text}`")));
        }
        Ok((lo..=hi).collect())
    } else {
        let d: u32 = text
            .parse()
            .map_err(|_| Error::Parse(format!("bad deck count `{text}`")))?;
        Ok(vec![d])
    }
}

pub fn parse_systems(text: &str) -> Result<Vec<CountingSystem>, Error> {
    text.split(',')
        .map(|s| CountingSystem::parse(s.trim()))
        .collect()
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), Error> {
    let file = load_file_config(&args.config)?;
    let decks_text = resolve(args.decks.clone(), &file, "decks", "4..8".to_string())?;
    let systems_text = resolve(
        args.systems.clone(),
        &file,
        "systems",
        "hi_lo,zen,uston_apc".to_string(),
    )?;
    let h17 = args.h17 || file.get_parsed::<bool>("h17")?.unwrap_or(false);
    let spec = SweepSpec {
        decks: parse_deck_range(&decks_text)?,
        systems: parse_systems(&systems_text)?,
        hp: Hyperparams {
            alpha: resolve(args.alpha, &file, "alpha", 0.05)?,
            gamma: resolve(args.gamma, &file, "gamma", 1.0)?,
            train_episodes: resolve(args.train_episodes, &file, "train_episodes", 50_000)?,
            backtest_episodes: resolve(args.backtest_episodes, &file, "backtest_episodes", 10_000)?,
            seed: resolve(args.seed, &file, "seed", 0)?,
        },
        dealer_hits_soft17: h17,
        bet_unit: resolve(args.unit, &file, "unit", 100)?,
        workers: resolve(args.workers, &file, "workers", 2)?,
    };

    let mut manifest = KvConfig::new();
    manifest.set("command", "sweep");
    manifest.set("decks", &decks_text);
    manifest.set("systems", &systems_text);
    manifest.set("train_episodes", spec.hp.train_episodes);
    manifest.set("backtest_episodes", spec.hp.backtest_episodes);
    manifest.set("alpha", spec.hp.alpha);
    manifest.set("gamma", spec.hp.gamma);
    manifest.set("seed", spec.hp.seed);
    manifest.set("h17", h17);
    manifest.set("unit", spec.bet_unit);
    manifest.set("workers", spec.workers);

    ensure_out(&args.out)?;
    match run_sweep(&spec) {
        Ok(rows) => {
            write(&args.out, "metrics.csv", &emit::sweep_csv(&rows))?;
            manifest.write_manifest(&args.out.join("manifest.txt"))?;
            Ok(())
        }
        Err(abort) => {
            // Preserve the partial table, marked as aborted.
            let mut csv = emit::sweep_csv(&abort.completed);
            csv.push_str(&format!("# aborted: {}\n", abort.error));
            write(&args.out, "metrics.csv", &csv)?;
            manifest.write_manifest(&args.out.join("manifest.txt"))?;
            Err(abort.error)
        }
    }
}

#[derive(Args, Clone, Debug, Default)]
pub struct ChartArgs {
    /// Chart variant to emit: s17 or h17.
    #[arg(long)]
    pub variant: Option<String>,
    /// Compare two chart CSV files and print their agreement.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub compare: Option<Vec<PathBuf>>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn cmd_chart(args: &ChartArgs) -> Result<(), Error> {
    if let Some(paths) = &args.compare {
        let a = StrategyChart::load(&paths[0], ChartVariant::S17)?;
        let b = StrategyChart::load(&paths[1], ChartVariant::S17)?;
        let agreement = compare_charts(&a, &b)?;
        println!(
            "agreement: {:.2}% ({} of {} cells, {} skipped)",
            agreement.agreement_pct,
            agreement.matched_cells,
            agreement.total_cells,
            agreement.skipped_cells
        );
        return Ok(());
    }
    let file = load_file_config(&args.config)?;
    let variant_name = resolve(args.variant.clone(), &file, "variant", "s17".to_string())?;
    let variant = ChartVariant::parse(&variant_name)?;
    let mut manifest = KvConfig::new();
    manifest.set("command", "chart");
    manifest.set("variant", &variant_name);
    ensure_out(&args.out)?;
    write(&args.out, "chart.csv", &chart(variant).to_csv())?;
    manifest.write_manifest(&args.out.join("manifest.txt"))?;
    Ok(())
}
