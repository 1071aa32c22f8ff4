//! Command-line interface: corpus ingestion, graph export, experiments and
//! the HTTP server.

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use showfinder::artist_space::{EmbeddingIndex, DEFAULT_RANK};
use showfinder::eval::{
    footprint_experiment, fusion_sweep, long_tail_stats, report, simulate_users, FootprintExperimentConfig,
    PreferenceSource, SimulationConfig,
};
use showfinder::event_graph::{build_graph, GraphConfig};
use showfinder::fusion::FusionConfig;
use showfinder::ingest::{
    build_tag_vocabulary, generate_synthetic_corpus, load_corpus, load_corpus_dir, mine_biography_tags, CorpusBundle,
    CorpusPaths, GeneratorConfig,
};
use showfinder::linalg::SvdOptions;

use crate::api::{router, AppState, Settings};
use crate::engine::{graph_for_corpus, CorpusSource, EngineConfig};
use crate::sessions::SessionStore;

#[derive(Debug, Parser)]
#[command(name = "showfinder", version, about = "Local music event recommendations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load, generate or check corpora.
    #[command(subcommand)]
    Ingest(IngestCommand),
    /// Build the Music Event Graph and write it as JSON.
    Graph(GraphArgs),
    /// Run the evaluation experiments.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Serve the onboarding API.
    Serve(ServeArgs),
}

#[derive(Debug, Subcommand)]
pub enum IngestCommand {
    /// Read NDJSON files and write a corpus directory.
    Load {
        #[arg(long)]
        artists: PathBuf,
        #[arg(long)]
        tags: PathBuf,
        #[arg(long)]
        affinities: PathBuf,
        /// One file per event source. Repeatable.
        #[arg(long)]
        events: Vec<PathBuf>,
        /// Keep tags carried by at least this many artists, then label
        /// artists with vocabulary tags found in their biographies.
        #[arg(long)]
        min_support: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic corpus directory.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON generator settings; missing fields take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Load a corpus directory and print its size.
    Validate { dir: PathBuf },
}

/// A corpus directory, or the synthetic corpus for `--seed`.
#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl CorpusArgs {
    fn source(&self) -> CorpusSource {
        match &self.corpus {
            Some(dir) => CorpusSource::Dir(dir.clone()),
            None => CorpusSource::Synthetic(self.seed),
        }
    }

    fn load(&self) -> anyhow::Result<CorpusBundle> {
        Ok(match &self.corpus {
            Some(dir) => load_corpus_dir(dir).with_context(|| format!("loading {}", dir.display()))?,
            None => generate_synthetic_corpus(&GeneratorConfig::with_seed(self.seed))?,
        })
    }
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, default_value_t = DEFAULT_RANK)]
    pub rank: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Mean AUC of raw and LSA similarity as test footprints shrink.
    Footprint {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Comma-separated LSA ranks.
        #[arg(long, value_delimiter = ',', default_values_t = [32, 64, 128, 256])]
        ranks: Vec<usize>,
        /// Iterate the SVD to convergence instead of a fixed number of passes.
        #[arg(long)]
        converged_svd: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Popularity and footprint statistics.
    LongTail {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fusion strategies and baselines over simulated users.
    Sweep {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, default_value_t = DEFAULT_RANK)]
        rank: usize,
        #[arg(long, default_value_t = 200)]
        users: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Serve this serialized graph instead of building one.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_RANK)]
    pub rank: usize,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Default fusion strategy as `early/late`.
    #[arg(long, default_value = "none/average_cosine")]
    pub fusion: FusionConfig,
    #[arg(long, default_value_t = 3)]
    pub max_genres: usize,
    #[arg(long, default_value_t = 3)]
    pub max_artists_per_genre: usize,
    /// Directory of static UI assets served under `/`.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
    /// File the sessions are kept in between restarts.
    #[arg(long)]
    pub sessions: Option<PathBuf>,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Ingest(cmd) => ingest(cmd),
        Command::Graph(args) => {
            let bundle = args.corpus.load()?;
            let graph = graph_for_corpus(&bundle, args.rank, args.corpus.seed, &GraphConfig::default())?;
            write_file(&args.out, &(graph.to_json()? + "\n"))?;
            println!(
                "{} genres, {} popular artists, {} event artists, {} events -> {}",
                graph.levels.genre_tags.len(),
                graph.levels.popular_artists.len(),
                graph.levels.event_artists.len(),
                graph.levels.events.len(),
                args.out.display()
            );
            Ok(())
        }
        Command::Eval(cmd) => eval(cmd),
        Command::Serve(args) => tokio::runtime::Runtime::new()?.block_on(serve(args)),
    }
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn summary(bundle: &CorpusBundle) -> String {
    format!(
        "{} artists ({} with events), {} tags, {} affinities, {} events",
        bundle.artists.len(),
        bundle.artists.iter().filter(|a| a.is_event_artist).count(),
        bundle.tags.len(),
        bundle.affinities.len(),
        bundle.events.len()
    )
}

fn ingest(cmd: IngestCommand) -> anyhow::Result<()> {
    match cmd {
        IngestCommand::Load { artists, tags, affinities, events, min_support, out } => {
            let paths = CorpusPaths { manifest: None, artists, tags, affinities, events };
            let mut bundle = load_corpus(&paths)?;
            if let Some(n) = min_support {
                let vocabulary = build_tag_vocabulary(&bundle.tags, &bundle.affinities, n);
                bundle.retain_tags(&vocabulary);
                let mined = mine_biography_tags(&bundle.artists, &vocabulary);
                bundle.affinities.extend(mined);
                bundle.finalize()?;
            }
            bundle.save(&out)?;
            println!("{} -> {}", summary(&bundle), out.display());
        }
        IngestCommand::Generate { seed, config, out } => {
            let mut generator = match config {
                Some(path) => serde_json::from_str(&fs::read_to_string(&path)?)
                    .with_context(|| format!("reading {}", path.display()))?,
                None => GeneratorConfig::default(),
            };
            generator.seed = seed;
            let bundle = generate_synthetic_corpus(&generator)?;
            bundle.save(&out)?;
            println!("{} -> {}", summary(&bundle), out.display());
        }
        IngestCommand::Validate { dir } => {
            let bundle = load_corpus_dir(&dir).with_context(|| format!("loading {}", dir.display()))?;
            println!("{}: {}", dir.display(), summary(&bundle));
        }
    }
    Ok(())
}

fn eval(cmd: EvalCommand) -> anyhow::Result<()> {
    match cmd {
        EvalCommand::Footprint { corpus, ranks, converged_svd, out } => {
            let bundle = corpus.load()?;
            let mut config = FootprintExperimentConfig::for_corpus(bundle.artists.len(), corpus.seed);
            config.ranks = ranks;
            if converged_svd {
                config.svd = SvdOptions::default();
            }
            let result = footprint_experiment(&bundle, &config)?;
            print!("{}", report::footprint_csv(&result));
            report::write_footprint(&out, "footprint", &result)?;
        }
        EvalCommand::LongTail { corpus, out } => {
            let result = long_tail_stats(&corpus.load()?)?;
            println!("coverage fraction           {:.3}", result.coverage_fraction);
            println!("footprint/rank correlation  {:.3}", result.footprint_rank_correlation);
            println!("bottom-three-decile share   {:.3}", result.bottom_three_decile_share);
            println!("event artists per decile    {:?}", result.event_artist_deciles);
            report::write_long_tail(&out, "long_tail", &result)?;
        }
        EvalCommand::Sweep { corpus, rank, users, out } => {
            let bundle = corpus.load()?;
            let raw = bundle.raw_matrix()?;
            let index = EmbeddingIndex::fit(&raw, rank, corpus.seed)?;
            let graph = build_graph(&bundle, &index, &GraphConfig::default())?;
            let sim = SimulationConfig { n_users: users, seed: corpus.seed, ..SimulationConfig::default() };
            let truth = simulate_users(&graph, &index, &sim)?;
            let result =
                fusion_sweep(&graph, &index, &truth, &FusionConfig::sweep(), &PreferenceSource::ALL, corpus.seed)?;
            print!("{}", report::sweep_csv(&result));
            report::write_sweep(&out, "fusion_sweep", &result)?;
        }
    }
    Ok(())
}

async fn serve(args: ServeArgs) -> anyhow::Result<()> {
    if args.max_genres == 0 || args.max_artists_per_genre == 0 {
        bail!("selection bounds must be positive");
    }
    let settings = Settings {
        max_genres: args.max_genres,
        max_artists_per_genre: args.max_artists_per_genre,
        fusion: args.fusion,
        seed: args.corpus.seed,
        static_dir: args.static_dir.clone(),
        ..Settings::default()
    };
    let sessions = match &args.sessions {
        Some(path) => SessionStore::persistent(path)?,
        None => SessionStore::in_memory(),
    };
    let loader = EngineConfig {
        corpus: args.corpus.source(),
        graph_file: args.graph.clone(),
        rank: args.rank,
        seed: args.corpus.seed,
        graph: GraphConfig::default(),
    };
    let state = AppState::new(settings, sessions, Some(loader));

    let addr: SocketAddr = format!("{}:{}", args.host, args.port).parse().context("parsing listen address")?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);

    let loading = state.clone();
    tokio::spawn(async move {
        match loading.reload().await {
            Ok(engine) => tracing::info!(events = engine.graph.levels.events.len(), "engine ready"),
            Err(e) => tracing::error!(?e, "engine failed to load"),
        }
    });

    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
