use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use trade_core::evaluation::{evaluation_report, read_ratings, RatingStore};
use trade_core::importance::diversity_report;
use trade_core::sheet::{read_sheets, to_fixed_json, write_sheets};
use trade_core::synthetic::{synthetic_league, SyntheticSpec};
use trade_core::{
    batch_valuate, generate_trades, BatchConfig, ComputeMode, League, PersonalizationRequest, SmeWeights, TradePackage,
    ValuationSheet,
};
use trade_server::inputs::{read_json, read_league_or_players, read_profiles};
use trade_server::{router, AppState, ServiceConfig, SnapshotStore};

#[derive(Parser)]
#[command(name = "fftrade", version, about = "Fantasy-football trade recommender")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Value every player under each compute mode and write one sheet per mode.
    Valuate(ValuateArgs),
    /// Generate trades for one team and print them as JSON.
    Trade(TradeArgs),
    /// Print opponents ranked by dissimilarity for each mode.
    Pair(PairArgs),
    /// Evaluation metrics from a ratings log plus the model diversity report.
    Report(ReportArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Write a seeded synthetic league file.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ValuateArgs {
    /// League file, or a bare JSON array of players.
    #[arg(long)]
    players: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Expert-rule weights (JSON).
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long, default_value_t = trade_core::sheet::DEFAULT_TOP_N)]
    top_n: usize,
    /// Comma-separated compute modes.
    #[arg(long, value_delimiter = ',')]
    modes: Vec<ComputeMode>,
    /// Overrides the league's current week.
    #[arg(long)]
    week: Option<u32>,
    /// Timestamp recorded in the sheets; defaults to SOURCE_DATE_EPOCH, then the epoch.
    #[arg(long)]
    generated_at: Option<String>,
}

#[derive(Args)]
struct LeagueSource {
    #[arg(long)]
    league: PathBuf,
    /// Sheet directory; without it the league is valued on the fly.
    #[arg(long)]
    sheets: Option<PathBuf>,
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Service config (JSON) supplying engine and expert-rule settings.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TradeArgs {
    #[command(flatten)]
    source: LeagueSource,
    #[arg(long)]
    team: String,
    #[arg(long)]
    risk: Option<f64>,
    /// Personalization request (JSON).
    #[arg(long)]
    personalization: Option<PathBuf>,
    #[arg(long)]
    max_results: Option<usize>,
    /// Print filter rejections to stderr.
    #[arg(long)]
    show_rejections: bool,
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    source: LeagueSource,
    #[arg(long)]
    team: String,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    ratings: Option<PathBuf>,
    /// Trades JSON (as printed by `trade`) for the uniqueness metric.
    #[arg(long)]
    trades: Vec<PathBuf>,
    #[arg(long)]
    profiles: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long)]
    sheets: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    refresh_secs: Option<u64>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    teams: usize,
    #[arg(long, default_value_t = 40)]
    free_agents: usize,
    #[arg(long, default_value_t = 8)]
    week: u32,
    #[arg(long, default_value_t = 2021)]
    seed: u64,
}

fn generated_at(flag: Option<String>) -> String {
    if let Some(ts) = flag {
        return ts;
    }
    let epoch = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse::<i64>().ok()).unwrap_or(0);
    chrono::DateTime::from_timestamp(epoch, 0)
        .unwrap_or_default()
        .format("%Y-%m-%dT%H:%M:%SZ")
        .to_string()
}

fn valuate(args: ValuateArgs) -> anyhow::Result<()> {
    let mut league = read_league_or_players(&args.players)?;
    if let Some(week) = args.week {
        league.rules.current_week = week;
    }
    let profiles = read_profiles(args.profiles.as_deref())?;
    let weights: SmeWeights = match &args.weights {
        Some(p) => read_json(p)?,
        None => SmeWeights::default(),
    };
    let config = BatchConfig {
        modes: if args.modes.is_empty() { ComputeMode::ALL.to_vec() } else { args.modes },
        top_n: args.top_n,
        generated_at: generated_at(args.generated_at),
    };
    let out = batch_valuate(&league, &profiles, &weights, &config)?;
    for w in &out.warnings {
        tracing::warn!("{w}");
    }
    for path in write_sheets(&args.out, &out.sheets)? {
        println!("{}", path.display());
    }
    Ok(())
}

struct Loaded {
    league: League,
    sheets: Vec<ValuationSheet>,
    config: ServiceConfig,
}

fn load_source(src: &LeagueSource) -> anyhow::Result<Loaded> {
    let league: League = read_json(&src.league)?;
    let config = match &src.config {
        Some(p) => ServiceConfig::load(p)?,
        None => ServiceConfig::default(),
    };
    let sheets = match &src.sheets {
        Some(dir) => {
            let sheets = read_sheets(dir).with_context(|| format!("reading sheets from {}", dir.display()))?;
            if sheets.is_empty() {
                bail!("no sheet files in {}", dir.display());
            }
            sheets
        }
        None => {
            let profiles_path = src.profiles.as_deref().or(config.profiles_path.as_deref());
            let profiles = read_profiles(profiles_path)?;
            batch_valuate(&league, &profiles, &config.sme_weights, &BatchConfig::default())?.sheets
        }
    };
    Ok(Loaded { league, sheets, config })
}

fn trade(args: TradeArgs) -> anyhow::Result<()> {
    let Loaded { league, sheets, config } = load_source(&args.source)?;
    let mut request: PersonalizationRequest = match &args.personalization {
        Some(p) => read_json(p)?,
        None => PersonalizationRequest::default(),
    };
    if let Some(risk) = args.risk {
        request.risk = risk;
    }
    let mut engine = config.engine;
    if let Some(n) = args.max_results {
        engine.max_results = n;
    }
    let out = generate_trades(&league, &args.team, &request, &sheets, &engine)?;
    if args.show_rejections {
        for r in &out.rejections {
            eprintln!("{}", r.log_line());
        }
    }
    println!("{}", to_fixed_json(&out.trades));
    Ok(())
}

fn pair(args: PairArgs) -> anyhow::Result<()> {
    let Loaded { league, sheets, .. } = load_source(&args.source)?;
    let ctx = trade_core::engine::TradeContext::new(&league)?;
    let mut out = BTreeMap::new();
    for sheet in &sheets {
        let view = trade_core::engine::ModeView::new(sheet);
        out.insert(sheet.compute_mode, trade_core::engine::pairings_for(&ctx, &view, &args.team)?);
    }
    println!("{}", to_fixed_json(&out));
    Ok(())
}

fn report(args: ReportArgs) -> anyhow::Result<()> {
    let ratings = match &args.ratings {
        Some(p) => read_ratings(p).with_context(|| format!("reading {}", p.display()))?,
        None => Vec::new(),
    };
    let mut per_mode: BTreeMap<ComputeMode, Vec<String>> = BTreeMap::new();
    for path in &args.trades {
        let trades: Vec<TradePackage> = read_json(path)?;
        for t in trades {
            per_mode.entry(t.compute_mode).or_default().push(t.fingerprint);
        }
    }
    let evaluation = evaluation_report(&ratings, Some(&per_mode));
    let profiles = read_profiles(args.profiles.as_deref())?;
    let diversity = diversity_report(&profiles)?;
    let body = serde_json::json!({ "evaluation": evaluation, "diversity": diversity });
    println!("{}", to_fixed_json(&body));
    Ok(())
}

async fn serve(args: ServeArgs) -> anyhow::Result<()> {
    let config = match &args.config {
        Some(p) => ServiceConfig::load(p)?,
        None => ServiceConfig::default(),
    };
    let store = Arc::new(match &args.sheets {
        Some(dir) => SnapshotStore::open(dir).with_context(|| format!("loading sheets from {}", dir.display()))?,
        None => SnapshotStore::empty(),
    });
    if let Some(secs) = args.refresh_secs.filter(|&s| s > 0) {
        if store.dir().is_some() {
            store.spawn_refresh(Duration::from_secs(secs));
        }
    }
    let ratings = match &config.ratings_path {
        Some(p) => RatingStore::open(p).with_context(|| format!("opening {}", p.display()))?,
        None => RatingStore::in_memory(),
    };
    let profiles = read_profiles(config.profiles_path.as_deref())?;
    let state = Arc::new(AppState::new(Arc::clone(&store), config, profiles, ratings));
    let addr = SocketAddr::from(([0, 0, 0, 0], args.port));
    let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
    tracing::info!(%addr, sheets = store.load().sheets.len(), "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

fn synth(args: SynthArgs) -> anyhow::Result<()> {
    let spec = SyntheticSpec {
        teams: args.teams,
        free_agents: args.free_agents,
        week: args.week,
        seed: args.seed,
        ..SyntheticSpec::default()
    };
    write_json(&args.out, &synthetic_league(&spec))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, to_fixed_json(value) + "\n").with_context(|| format!("writing {}", path.display()))
}

fn main() -> std::process::ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Valuate(a) => valuate(a),
        Command::Trade(a) => trade(a),
        Command::Pair(a) => pair(a),
        Command::Report(a) => report(a),
        Command::Synth(a) => synth(a),
        Command::Serve(a) => tokio::runtime::Runtime::new()
            .context("starting runtime")
            .and_then(|rt| rt.block_on(serve(a))),
    };
    match result {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
