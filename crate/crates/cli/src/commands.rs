//! Subcommands. Each returns a [`Failure`] carrying the process exit code.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rallyforge_core::behavior::{fit_models, ConditionalModel, ModelFile, OpponentFilter};
use rallyforge_core::clipdb::{
    generate_synthetic_db, load_db, save_db, ArchetypeSpec, ClipDatabase,
};
use rallyforge_core::config::EngineConfig;
use rallyforge_core::physics::{fit_trajectory, ContactPoint};
use rallyforge_core::rally::{stats, Engine, RallyLog};
use rallyforge_core::{Error, Handedness, Vec3};
use serde::Deserialize;

use crate::server;
use crate::session::SessionHub;

#[derive(Debug, Parser)]
#[command(
    name = "rallyforge",
    version,
    about = "Data-driven tennis rally simulation"
)]
pub struct Cli {
    /// Engine config (TOML). Falls back to $RALLYFORGE_CONFIG, then defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate points and write logs, heatmaps and a summary.
    Simulate(SimulateArgs),
    /// Fit ball flights between consecutive contacts of a clip database.
    FitTrajectory(FitArgs),
    /// Fit behavior models and save them.
    BuildModel(BuildModelArgs),
    /// Describe a saved model file.
    InspectModel(InspectArgs),
    /// Generate a synthetic clip database from player archetypes.
    GenData(GenDataArgs),
    /// Database statistics, or a summary of simulated rally logs.
    Stats(StatsArgs),
    /// Run the interactive session service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub db: PathBuf,
    /// Saved models; without it models are fitted on load.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// The two players, comma separated. Defaults to the first two in the database.
    #[arg(long, value_delimiter = ',')]
    pub players: Vec<String>,
    #[arg(long, default_value_t = 200)]
    pub points: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Heatmap cell size, m.
    #[arg(long, default_value_t = 1.0)]
    pub cell: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub db: PathBuf,
    /// Only this clip.
    #[arg(long)]
    pub clip: Option<u64>,
    /// At most this many clips.
    #[arg(long)]
    pub points: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildModelArgs {
    #[arg(long)]
    pub db: PathBuf,
    /// Players to fit, comma separated. Defaults to all.
    #[arg(long, value_delimiter = ',')]
    pub players: Vec<String>,
    /// Restrict to clips against one opponent id, or `left`/`right` for a handedness.
    #[arg(long)]
    pub opponent: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Also list every populated cell.
    #[arg(long)]
    pub cells: bool,
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// Player ids with default archetypes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub players: Vec<String>,
    /// TOML file with `[[archetype]]` tables; overrides `--players`.
    #[arg(long)]
    pub archetypes: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub points: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Rally log (JSON lines) to summarize.
    #[arg(long)]
    pub logs: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub db: PathBuf,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:7878")]
    pub bind: SocketAddr,
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Data(String),
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Data(_) => 3,
            Failure::Runtime(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Data(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Config(m),
            e if e.is_data_error() => Failure::Data(e.to_string()),
            e => Failure::Runtime(e.to_string()),
        }
    }
}

/// Errors while reading inputs are data errors, except config errors.
fn input(what: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| match e {
        Error::Config(m) => Failure::Config(m),
        e => Failure::Data(format!("{}: {e}", what.display())),
    }
}

fn io(what: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Runtime(format!("{}: {e}", what.display()))
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    let (config, _) = EngineConfig::resolve(cli.config.as_deref())?;
    match cli.command {
        Command::Simulate(a) => simulate(&config, a, stdout),
        Command::FitTrajectory(a) => fit(&config, a, stdout),
        Command::BuildModel(a) => build_model(&config, a, stdout),
        Command::InspectModel(a) => inspect(a, stdout),
        Command::GenData(a) => gen_data(&config, a, stdout),
        Command::Stats(a) => stats_cmd(a, stdout),
        Command::Serve(a) => serve(&config, a, stdout),
    }
}

fn load_engine(config: &EngineConfig, db: &Path, model: Option<&Path>) -> Result<Engine, Failure> {
    let database = load_db(db).map_err(input(db))?;
    let engine = match model {
        Some(m) => {
            let models = ModelFile::load(m)
                .and_then(ModelFile::into_models)
                .map_err(input(m))?;
            Engine::new(database, models, config.engine_params())?
        }
        None => Engine::fit(database, &config.model_config(), config.engine_params())
            .map_err(input(db))?,
    };
    Ok(engine)
}

fn pick_players(db: &ClipDatabase, given: &[String]) -> Result<[String; 2], Failure> {
    let ids: Vec<String> = if given.is_empty() {
        db.players().iter().take(2).map(|p| p.id.clone()).collect()
    } else {
        given.to_vec()
    };
    match <[String; 2]>::try_from(ids) {
        Ok(pair) if pair[0] != pair[1] => Ok(pair),
        _ => Err(Failure::Config(
            "--players needs exactly two distinct players".into(),
        )),
    }
}

fn simulate(config: &EngineConfig, a: SimulateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let engine = load_engine(config, &a.db, a.model.as_deref())?;
    let pair = pick_players(engine.db(), &a.players)?;
    let started = Instant::now();
    let logs = engine.run_batch([&pair[0], &pair[1]], a.points, a.seed)?;
    let elapsed = started.elapsed();
    fs::create_dir_all(&a.out).map_err(io(&a.out))?;

    let log_path = a.out.join("logs.jsonl");
    let mut w = BufWriter::new(fs::File::create(&log_path).map_err(io(&log_path))?);
    for l in &logs {
        l.write_jsonl(&mut w)?;
    }
    w.flush().map_err(io(&log_path))?;

    let court = *engine.court();
    let summary = stats::summarize(&logs, &court);
    let summary_path = a.out.join("summary.tsv");
    fs::write(&summary_path, summary.to_tsv()).map_err(io(&summary_path))?;

    let mut grids = String::new();
    for mut h in stats::heatmaps(&logs, &court, a.cell) {
        if let Some(m) = engine.model(&h.player) {
            let b = m.bandwidths();
            h.bandwidth = Some(match h.kind {
                stats::HeatmapKind::Placement => b.placement,
                stats::HeatmapKind::Recovery => b.recovery,
            });
        }
        grids.push_str(&h.to_tsv());
    }
    let grid_path = a.out.join("heatmaps.tsv");
    fs::write(&grid_path, grids).map_err(io(&grid_path))?;

    let _ = write!(out, "{}", summary.to_tsv());
    let _ = writeln!(out, "elapsed_s\t{:.3}", elapsed.as_secs_f64());
    Ok(())
}

fn fit(config: &EngineConfig, a: FitArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let db = load_db(&a.db).map_err(input(&a.db))?;
    let mut report =
        String::from("clip_id\tstatus\tresidual\tgrid_residual\tevaluations\tend_error_m\tms\n");
    let mut done = 0usize;
    for (i, clip) in db.clips().iter().enumerate() {
        if a.clip.is_some_and(|id| id != clip.id) {
            continue;
        }
        if a.points.is_some_and(|n| done >= n) {
            break;
        }
        let (Some(prev), Some(t_c), Some(x_c)) =
            (db.previous(i).map(|p| db.clip(p)), clip.t_c, clip.x_c)
        else {
            continue;
        };
        let Some(start) = prev.x_c.map(Vec3::half_turn) else {
            continue;
        };
        done += 1;
        let a_pt = ContactPoint {
            time: 0.0,
            pos: start,
        };
        let b_pt = ContactPoint {
            time: t_c,
            pos: x_c,
        };
        let volley = clip.shot_type.is_some_and(|t| t.is_volley());
        let t = Instant::now();
        let r = fit_trajectory(&a_pt, &b_pt, &db.flight, &db.court, &config.grid, volley);
        let ms = t.elapsed().as_secs_f64() * 1e3;
        let _ = match r {
            Ok(f) => writeln!(
                report,
                "{}\tok\t{:.4}\t{:.4}\t{}\t{:.4}\t{ms:.2}",
                clip.id,
                f.residual,
                f.grid_residual,
                f.evaluations,
                (f.trajectory.end_pos - x_c).norm()
            ),
            Err(e) => writeln!(report, "{}\tfailed: {e}\t\t\t\t\t{ms:.2}", clip.id),
        };
    }
    if a.clip.is_some() && done == 0 {
        return Err(Failure::Data(
            "clip not found or has no linked incoming contact".into(),
        ));
    }
    match a.out {
        Some(p) => fs::write(&p, report).map_err(io(&p))?,
        None => {
            let _ = out.write_all(report.as_bytes());
        }
    }
    Ok(())
}

fn opponent_filter(s: Option<&str>) -> OpponentFilter {
    match s {
        None | Some("any") => OpponentFilter::Any,
        Some("left") => OpponentFilter::Handedness(Handedness::Left),
        Some("right") => OpponentFilter::Handedness(Handedness::Right),
        Some(id) => OpponentFilter::Only(id.to_string()),
    }
}

fn build_model(
    config: &EngineConfig,
    a: BuildModelArgs,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let db = load_db(&a.db).map_err(input(&a.db))?;
    let players: Vec<String> = if a.players.is_empty() {
        db.players().iter().map(|p| p.id.clone()).collect()
    } else {
        a.players.clone()
    };
    let filter = opponent_filter(a.opponent.as_deref());
    let cfg = config.model_config();
    let models = players
        .iter()
        .map(|p| fit_models(&db, p, &filter, &cfg))
        .collect::<Result<Vec<ConditionalModel>, _>>()
        .map_err(input(&a.db))?;
    ModelFile::new(&models)
        .save(&a.out)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", a.out.display())))?;
    for m in &models {
        let _ = writeln!(
            out,
            "{}\t{} samples\t{} cells",
            m.player_id(),
            m.samples().len(),
            m.cells().len()
        );
    }
    Ok(())
}

fn inspect(a: InspectArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let file = ModelFile::load(&a.model).map_err(input(&a.model))?;
    let _ = writeln!(out, "format\t{}\nversion\t{}", file.format, file.version);
    let models = file.into_models().map_err(input(&a.model))?;
    let _ = writeln!(
        out,
        "player\topponents\tsamples\tcells\tbw_velocity\tbw_placement\tbw_recovery"
    );
    for m in &models {
        let b = m.bandwidths();
        let _ = writeln!(
            out,
            "{}\t{:?}\t{}\t{}\t{}\t{}\t{}",
            m.player_id(),
            m.data().opponent_filter,
            m.samples().len(),
            m.cells().len(),
            b.velocity,
            b.placement,
            b.recovery
        );
    }
    if a.cells {
        let _ = writeln!(out, "player\tcell\tcounts(S,FH-T,FH-U,BH-T,BH-U,FH-V,BH-V)");
        for m in &models {
            for (key, cat) in m.cells() {
                let counts: Vec<String> = cat.counts.iter().map(|c| c.to_string()).collect();
                let _ = writeln!(out, "{}\t{:?}\t{}", m.player_id(), key.0, counts.join(","));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArchetypeFile {
    archetype: Vec<ArchetypeSpec>,
}

fn gen_data(config: &EngineConfig, a: GenDataArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let archetypes = match &a.archetypes {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            toml::from_str::<ArchetypeFile>(&text)
                .map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?
                .archetype
        }
        None if a.players.is_empty() => {
            vec![ArchetypeSpec::named("p1"), ArchetypeSpec::named("p2")]
        }
        None => a.players.iter().map(|p| ArchetypeSpec::named(p)).collect(),
    };
    let db = generate_synthetic_db(&archetypes, a.points, a.seed, &config.generator_settings())
        .map_err(|e| match e {
            Error::Config(m) => Failure::Config(m),
            Error::InvalidInput(m) => Failure::Config(m),
            e => Failure::Runtime(e.to_string()),
        })?;
    save_db(&db, &a.out).map_err(|e| Failure::Runtime(format!("{}: {e}", a.out.display())))?;
    let _ = write!(out, "{}", db.stats().to_tsv());
    Ok(())
}

fn stats_cmd(a: StatsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    if a.db.is_none() && a.logs.is_none() {
        return Err(Failure::Config("stats needs --db or --logs".into()));
    }
    let mut court = None;
    if let Some(p) = &a.db {
        let db = load_db(p).map_err(input(p))?;
        let _ = write!(out, "{}", db.stats().to_tsv());
        court = Some(db.court);
    }
    if let Some(p) = &a.logs {
        let f = fs::File::open(p).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?;
        let logs = RallyLog::read_jsonl(BufReader::new(f)).map_err(input(p))?;
        let court = court.unwrap_or_default();
        let _ = write!(out, "{}", stats::summarize(&logs, &court).to_tsv());
    }
    Ok(())
}

fn serve(config: &EngineConfig, a: ServeArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let engine = load_engine(config, &a.db, a.model.as_deref())?;
    let hub = Arc::new(SessionHub::new(Arc::new(engine)));
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    rt.block_on(server::serve(hub, a.bind, |addr| {
        let _ = writeln!(out, "listening on ws://{addr}/ws");
        let _ = out.flush();
    }))
    .map_err(|e| Failure::Runtime(format!("{}: {e}", a.bind)))
}
