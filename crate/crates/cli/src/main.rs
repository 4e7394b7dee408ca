use std::path::PathBuf;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use coordplan_core::harness::{emit_results, run_experiment, ExperimentSpec, NamedMaze, PairSpec, Summary};
use coordplan_core::maze_io::{read_maze, write_maze};
use coordplan_core::{
    derive_seed, generate_maze_pair, AgentKind, AgentParams, GameConfig, GridPos, PlayerId, RewardScheme,
};

use coordplan_service::{load_fixtures, ServiceConfig};
use tracing_subscriber::EnvFilter;

mod parse;

use parse::{parse_agents, parse_configs, parse_schemes, MazeSource};

#[derive(Parser)]
#[command(name = "coordplan", version, about = "Shared-control maze experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run agent-vs-agent episodes and write records.csv and summary.json.
    Simulate(SimulateArgs),
    /// Generate maze pairs and write them as JSON maze files.
    Generate(GenerateArgs),
    /// Print the optimal episode length for one configuration.
    Oracle(OracleArgs),
    /// Serve human-vs-agent sessions over HTTP and WebSocket.
    Serve(ServeArgs),
}

#[derive(Args)]
struct GenShape {
    #[arg(long, default_value_t = 9)]
    width: u32,
    #[arg(long, default_value_t = 9)]
    height: u32,
    /// Probability that a non-tree edge is walled on a side.
    #[arg(long, default_value_t = 0.45)]
    density: f64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Maze files, or `gen:SEED,COUNT` for generated pairs.
    #[arg(long, num_args = 1.., required = true)]
    mazes: Vec<String>,
    #[command(flatten)]
    shape: GenShape,
    /// `E=<kind> H=<kind>`; kinds: heuristic, mcts-none, mcts-single, mcts-intent.
    /// A single kind applies to both players.
    #[arg(long, num_args = 1..=2, default_values_t = ["mcts-intent".to_string()])]
    agents: Vec<String>,
    /// Comma-separated bonus schemes: discounted, fixed, fso, linv.
    #[arg(long, default_value = "discounted")]
    scheme: String,
    #[arg(long, default_value_t = 10)]
    trials: u32,
    /// `all` or `sample:K`.
    #[arg(long, default_value = "all")]
    configs: String,
    /// Player in control at the start of every episode.
    #[arg(long, default_value = "E")]
    start: PlayerId,
    #[arg(long, default_value_t = coordplan_core::DEFAULT_STEP_CAP)]
    cap: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads, 0 for all cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 100)]
    iterations: u32,
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    exploration: f64,
    #[arg(long, default_value_t = 0.99)]
    gamma: f64,
    #[arg(long, default_value_t = 100)]
    horizon: u32,
    /// Intent discount factor.
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 2.0)]
    c_plus: f64,
    #[arg(long, default_value_t = 0.5)]
    c_minus: f64,
    /// Heuristic agent's random action probability.
    #[arg(long, default_value_t = 0.2)]
    random_action_prob: f64,
}

impl ParamArgs {
    fn build(&self) -> AgentParams {
        let mut p = AgentParams::default();
        p.planner.iterations = self.iterations;
        p.planner.exploration = self.exploration;
        p.planner.gamma = self.gamma;
        p.planner.horizon = self.horizon;
        p.planner.intent_discount = self.lambda;
        p.factors.c_plus = self.c_plus;
        p.factors.c_minus = self.c_minus;
        p.heuristic.random_action_prob = self.random_action_prob;
        p
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: u32,
    #[command(flatten)]
    shape: GenShape,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    maze: PathBuf,
    /// `col,row`
    #[arg(long)]
    init: GridPos,
    #[arg(long)]
    goal: GridPos,
    #[arg(long, default_value = "E")]
    start: PlayerId,
    /// Minimum over both starting controllers instead of `--start`.
    #[arg(long)]
    any_start: bool,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: String,
    /// Directory of maze fixtures offered under their file stems.
    #[arg(long)]
    mazes: Option<PathBuf>,
    /// Append each session's pushes to `<dir>/<session_id>.jsonl`.
    #[arg(long)]
    log_dir: Option<PathBuf>,
    /// Pause between streamed agent moves, in milliseconds.
    #[arg(long, default_value_t = 250)]
    move_delay_ms: u64,
    /// Default bonus scheme for mcts-intent agents.
    #[arg(long, default_value = "discounted")]
    scheme: RewardScheme,
    #[arg(long, default_value_t = coordplan_core::DEFAULT_STEP_CAP)]
    cap: u32,
    #[command(flatten)]
    params: ParamArgs,
}

fn load_mazes(sources: &[String], shape: &GenShape) -> anyhow::Result<Vec<NamedMaze>> {
    let mut mazes = Vec::new();
    for s in sources {
        match s.parse::<MazeSource>()? {
            MazeSource::Generated { seed, count } => {
                for i in 0..count {
                    let pair = generate_maze_pair(derive_seed(seed, &[i]), shape.width, shape.height, shape.density)?;
                    mazes.push(NamedMaze {
                        id: format!("gen-{seed}-{i}"),
                        pair,
                    });
                }
            }
            MazeSource::File(path) => {
                let pair = read_maze(&path)?;
                let id = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
                mazes.push(NamedMaze { id, pair });
            }
        }
    }
    Ok(mazes)
}

fn simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let mazes = load_mazes(&args.mazes, &args.shape)?;
    let (agent_e, agent_h) = parse_agents(&args.agents)?;
    let schemes = parse_schemes(&args.scheme)?;
    let uses_intent = agent_e == AgentKind::IntentMcts || agent_h == AgentKind::IntentMcts;
    // Scheme only matters for mcts-intent; other pairs run once.
    let schemes = if uses_intent { schemes } else { vec![RewardScheme::None] };
    let mut records = Vec::new();
    for scheme in schemes {
        let mut params = args.params.build();
        params.planner.scheme = scheme;
        let mut spec = ExperimentSpec::new(mazes.clone(), PairSpec { agent_e, agent_h, params });
        spec.configs = parse_configs(&args.configs)?;
        spec.start = args.start;
        spec.trials = args.trials;
        spec.cap = args.cap;
        spec.base_seed = args.seed;
        spec.workers = args.workers;
        let result = run_experiment(&spec).with_context(|| format!("scheme {scheme}"))?;
        let o = &result.stats.overall;
        eprintln!(
            "{agent_e}/{agent_h} {scheme}: n={} success={:.4} steps={:.2}x{:.2} switches={:.2}x{:.2}",
            o.count, o.success_rate, o.steps.geo_mean, o.steps.geo_std, o.switches.geo_mean, o.switches.geo_std
        );
        records.extend(result.records);
    }
    let summary = Summary::from_records(&records)?;
    emit_results(&records, &summary, &args.out)?;
    println!("{}", args.out.display());
    Ok(())
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for i in 0..args.count as u64 {
        let pair = generate_maze_pair(derive_seed(args.seed, &[i]), args.shape.width, args.shape.height, args.shape.density)?;
        let path = args.out.join(format!("gen-{}-{i}.json", args.seed));
        write_maze(&path, &pair)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> anyhow::Result<()> {
    let pair = read_maze(&args.maze)?;
    let config = GameConfig {
        init: args.init,
        goal: args.goal,
        initial_controller: args.start,
    };
    let len = if args.any_start {
        coordplan_core::game::oracle_episode_length_any_start(&pair, &config)?
    } else {
        coordplan_core::game::oracle_episode_length(&pair, &config)?
    };
    println!("{len}");
    Ok(())
}

fn serve(args: ServeArgs) -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    let fixtures = match &args.mazes {
        Some(dir) => load_fixtures(dir)?,
        None => Default::default(),
    };
    if let Some(dir) = &args.log_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut params = args.params.build();
    params.planner.scheme = args.scheme;
    params.validate()?;
    let config = ServiceConfig {
        fixtures,
        log_dir: args.log_dir,
        params,
        cap: args.cap,
        move_delay: Duration::from_millis(args.move_delay_ms),
    };
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&args.addr)
            .await
            .with_context(|| format!("binding {}", args.addr))?;
        // Printed so scripts binding port 0 can find the server.
        println!("listening on {}", listener.local_addr()?);
        coordplan_service::serve(listener, config).await?;
        Ok(())
    })
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Generate(a) => generate(a),
        Command::Oracle(a) => oracle(a),
        Command::Serve(a) => serve(a),
    }
}

