use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use walkless::io::{
    distribution_svg, distributions_to_csv, parse_coin_spec, program_to_json, schedule_to_json,
    state_to_csv, state_to_json,
};
use walkless::random::random_graph;
use walkless::{
    build_coin_set, compile_coin_set, cost_report, parse_graph, run, verify_equivalence,
    CoinFamily, CoinSet, CoinSpec, Error, Graph, Mode, StateSpace, WalkRun,
};

const ABSTRACT_TOL: f64 = 1e-10;
const LATTICE_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "walkless",
    version,
    about = "Coined quantum walks without a translation operator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a walk and write distributions, the final state and plots.
    Run(RunArgs),
    /// Check that every mode pair produces the same evolution.
    Verify(VerifyArgs),
    /// Compile each node coin into pulse stages.
    Compile(CompileArgs),
    /// Compare stage counts with a generic circuit.
    Cost(CostArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Graph JSON file: {"nodes": N, "edges": [[j, k], ...]}.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["complete", "random_graph"])]
    graph: Option<PathBuf>,
    /// Use the complete graph on N nodes.
    #[arg(long, value_name = "N", conflicts_with = "random_graph")]
    complete: Option<usize>,
    /// Use a seeded random graph on N nodes.
    #[arg(long, value_name = "N")]
    random_graph: Option<usize>,
    /// Fraction of edges removed from a random graph.
    #[arg(long, default_value_t = 0.3, value_name = "F")]
    removal_fraction: f64,
    /// Seed for every randomized fixture.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CoinArgs {
    /// Coin spec JSON file.
    #[arg(long, value_name = "PATH", conflicts_with = "coin_family")]
    coins: Option<PathBuf>,
    /// Coin family for every node: hadamard, grover or dft.
    #[arg(long, value_name = "NAME")]
    coin_family: Option<String>,
}

#[derive(Args)]
struct WalkArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    coins: CoinArgs,
    /// Initial state: "localized:j,k" or "uniform".
    #[arg(long, default_value = "uniform")]
    init: String,
    #[arg(long, default_value_t = 10)]
    steps: usize,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    walk: WalkArgs,
    /// explicit, walkless, compiled or lattice.
    #[arg(long, default_value = "walkless")]
    mode: String,
    /// Key-site spacing of the lattice (lattice mode only).
    #[arg(long)]
    spacing: Option<usize>,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Also write an SVG bar chart of the final distribution.
    #[arg(long)]
    svg: bool,
    /// Also write the state after every step.
    #[arg(long)]
    trajectory: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    walk: WalkArgs,
    #[arg(long, default_value_t = 2)]
    spacing: usize,
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    coins: CoinArgs,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct CostArgs {
    #[arg(long, value_name = "N")]
    nodes: usize,
    #[arg(long, default_value_t = 1)]
    steps: u64,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
}

enum Failure {
    Input(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn lib<E: Into<Error>>(e: E) -> Failure {
    Failure::from(e.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))
}

fn load_graph(a: &GraphArgs) -> Result<Graph, Failure> {
    if let Some(path) = &a.graph {
        let text = read(path)?;
        return parse_graph(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())));
    }
    if let Some(n) = a.complete {
        if n == 0 {
            return Err(Failure::Input("--complete needs at least one node".into()));
        }
        return Ok(Graph::complete(n));
    }
    if let Some(n) = a.random_graph {
        if n == 0 {
            return Err(Failure::Input(
                "--random-graph needs at least one node".into(),
            ));
        }
        if !(0.0..=1.0).contains(&a.removal_fraction) {
            return Err(Failure::Input(
                "--removal-fraction must lie in [0, 1]".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        return Ok(random_graph(n, a.removal_fraction, &mut rng));
    }
    Err(Failure::Input(
        "one of --graph, --complete or --random-graph is required".into(),
    ))
}

fn load_coins(a: &CoinArgs, g: &Graph) -> Result<CoinSet, Failure> {
    let spec = if let Some(path) = &a.coins {
        parse_coin_spec(&read(path)?).map_err(|e| {
            let f = lib(e);
            match f {
                Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
                Failure::Numerical(m) => Failure::Numerical(format!("{}: {m}", path.display())),
            }
        })?
    } else if let Some(name) = &a.coin_family {
        CoinSpec::uniform(
            CoinFamily::from_name(name)
                .ok_or_else(|| Failure::Input(format!("unknown coin family {name:?}")))?,
        )
    } else {
        CoinSpec::default()
    };
    build_coin_set(g, &spec).map_err(lib)
}

fn parse_init(spec: &str, g: &Graph) -> Result<StateSpace, Failure> {
    if spec == "uniform" {
        return StateSpace::uniform(g).map_err(lib);
    }
    let bad = || {
        Failure::Input(format!(
            "--init must be \"uniform\" or \"localized:j,k\", got {spec:?}"
        ))
    };
    let rest = spec.strip_prefix("localized:").ok_or_else(bad)?;
    let (j, k) = rest.split_once(',').ok_or_else(bad)?;
    let j: usize = j.trim().parse().map_err(|_| bad())?;
    let k: usize = k.trim().parse().map_err(|_| bad())?;
    StateSpace::localized(g.n_nodes(), j, k).map_err(lib)
}

fn build_walk(a: &WalkArgs, mode: Mode) -> Result<WalkRun, Failure> {
    let g = load_graph(&a.graph)?;
    let coins = load_coins(&a.coins, &g)?;
    let initial = parse_init(&a.init, &g)?;
    if let Some(from) = g.padded_from() {
        log::info!("graph padded from {from} to {} nodes", g.n_nodes());
    }
    Ok(WalkRun::new(g, coins, initial, a.steps, mode))
}

fn cmd_run(a: &RunArgs) -> Result<(), Failure> {
    let mode = Mode::from_name(&a.mode)
        .ok_or_else(|| Failure::Input(format!("unknown mode {:?}", a.mode)))?;
    if a.spacing.is_some() && mode != Mode::Lattice {
        return Err(Failure::Input(
            "--spacing applies to lattice mode only".into(),
        ));
    }
    let mut walk = build_walk(&a.walk, mode)?;
    if let Some(l) = a.spacing {
        walk = walk.with_spacing(l);
    }
    if a.trajectory {
        walk = walk.with_trajectory();
    }
    let outcome = run(&walk).map_err(lib)?;

    create_dir(&a.out)?;
    write(
        &a.out,
        "distributions.csv",
        &distributions_to_csv(&outcome.distributions),
    )?;
    write(
        &a.out,
        "final_state.json",
        &state_to_json(&outcome.final_state),
    )?;
    write(
        &a.out,
        "final_state.csv",
        &state_to_csv(&outcome.final_state),
    )?;
    let last = outcome
        .distributions
        .last()
        .expect("initial distribution is recorded");
    if a.svg {
        let title = format!(
            "{} walk, N = {}, {} steps",
            a.mode,
            walk.graph.n_nodes(),
            walk.n_steps
        );
        write(
            &a.out,
            "final_distribution.svg",
            &distribution_svg(last, &title),
        )?;
    }
    if let Some(states) = &outcome.trajectory {
        let dir = a.out.join("trajectory");
        create_dir(&dir)?;
        for (step, s) in states.iter().enumerate() {
            write(&dir, &format!("step_{step:04}.json"), &state_to_json(s))?;
        }
    }
    if let Some(h) = outcome.lattice_hygiene {
        log::info!(
            "lattice: max |1> population {:.3e}, max intermediate population {:.3e}",
            h.max_spin_one,
            h.max_intermediate
        );
    }
    println!(
        "{} steps, {} coin applications, {} transpositions, final norm {:.12}",
        walk.n_steps,
        outcome.coin_applications,
        outcome.transpositions,
        outcome.final_state.norm()
    );
    let probs: Vec<String> = last.probs.iter().map(|p| format!("{p:.6}")).collect();
    println!("final distribution: {}", probs.join(" "));
    Ok(())
}

fn trajectory_deviation(a: &[StateSpace], b: &[StateSpace]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.max_deviation(y))
        .fold(0.0, f64::max)
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), Failure> {
    let walk = build_walk(&a.walk, Mode::Walkless)?
        .with_spacing(a.spacing)
        .with_trajectory();
    let mut results = Vec::new();

    let report = verify_equivalence(&walk, f64::INFINITY).map_err(lib)?;
    results.push(("explicit-walkless", report.max_deviation(), ABSTRACT_TOL));

    let walkless = run(&walk).map_err(lib)?;
    let compiled = run(&walk.with_mode(Mode::Compiled)).map_err(lib)?;
    let lattice = run(&walk.with_mode(Mode::Lattice)).map_err(lib)?;
    let traj = |o: &walkless::WalkOutcome| o.trajectory.clone().expect("recorded");
    results.push((
        "walkless-compiled",
        trajectory_deviation(&traj(&walkless), &traj(&compiled)),
        ABSTRACT_TOL,
    ));
    let dist_dev = compiled
        .distributions
        .iter()
        .zip(&lattice.distributions)
        .map(|(x, y)| x.max_deviation(y))
        .fold(0.0, f64::max);
    let state_dev = trajectory_deviation(&traj(&compiled), &traj(&lattice));
    results.push(("compiled-lattice", dist_dev.max(state_dev), LATTICE_TOL));

    let mut first_failure = None;
    for (name, dev, tol) in &results {
        let ok = *dev <= *tol;
        println!(
            "{name:<18} max deviation {dev:.3e}  tolerance {tol:.0e}  {}",
            if ok { "ok" } else { "FAIL" }
        );
        if !ok && first_failure.is_none() {
            first_failure = Some(format!(
                "{name} deviates by {dev:.3e} (tolerance {tol:.0e})"
            ));
        }
    }
    match first_failure {
        Some(m) => Err(Failure::Numerical(m)),
        None => Ok(()),
    }
}

fn cmd_compile(a: &CompileArgs) -> Result<(), Failure> {
    let g = load_graph(&a.graph)?;
    let coins = load_coins(&a.coins, &g)?;
    let compiled = compile_coin_set(&coins).map_err(lib)?;
    let n = g.n_nodes();
    let expected = cost_report(n, 1).map_err(lib)?.walkless_stages_per_step as usize;
    if compiled.stage_count() != expected {
        return Err(Failure::Numerical(format!(
            "compiled {} stages but {expected} are expected for N = {n}",
            compiled.stage_count()
        )));
    }

    create_dir(&a.out)?;
    let mut nodes = Vec::new();
    for (j, (p, s)) in compiled
        .programs
        .iter()
        .zip(&compiled.schedules)
        .enumerate()
    {
        write(
            &a.out,
            &format!("node_{}_program.json", j + 1),
            &program_to_json(p),
        )?;
        write(
            &a.out,
            &format!("node_{}_schedule.json", j + 1),
            &schedule_to_json(s),
        )?;
        nodes.push(serde_json::json!({
            "node": j + 1,
            "stages": s.stage_count(),
            "rotations": s.rotation_count(),
        }));
    }
    let intervals = compiled.schedules[0].intervals();
    let summary = serde_json::json!({
        "n": n,
        "stages_per_step": compiled.stage_count(),
        "intervals": intervals,
        "nodes": nodes,
    });
    write(
        &a.out,
        "summary.json",
        &serde_json::to_string_pretty(&summary).expect("json"),
    )?;
    let shown: Vec<String> = intervals.iter().map(|i| i.to_string()).collect();
    println!(
        "N = {n}: {} stages per step, intervals ({})",
        compiled.stage_count(),
        shown.join(",")
    );
    Ok(())
}

fn cmd_cost(a: &CostArgs) -> Result<(), Failure> {
    let r = cost_report(a.nodes, a.steps).map_err(lib)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&r).expect("json"));
    } else {
        print!("{}", r.table());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Compile(a) => cmd_compile(a),
        Command::Cost(a) => cmd_cost(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical contract violated: {m}");
            ExitCode::from(3)
        }
    }
}
