use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use macroplace::cluster::{apply_vacuous_placement, cluster_by_grid, ClusteredNetlist, VacuousMode};
use macroplace::error::{Error, Result};
use macroplace::fd::{fd_place, fd_repulsive_only, FdParams, FdStart};
use macroplace::grid::{build_grid, Grid};
use macroplace::io::{load_design, write_native, write_placement, write_svg, Design};
use macroplace::netlist::NodeKind;
use macroplace::placement::Placement;
use macroplace::proxy::{proxy_cost, total_hpwl, ProxyBreakdown, ProxyConfig, ProxyWeights};
use macroplace::sa::{run_parallel, shuffle_same_size, ActionWeights, InitMethod, SaConfig, Temperature};
use macroplace::study::{
    derive_seed, kendall_table, stability_study, weight_sweep, MetricTable, RunManifest, RunSeeding, StudyGroup,
};

#[derive(Parser, Debug)]
#[command(name = "macroplace", version, about = "Grid-based macro placement and proxy-cost evaluation")]
struct Cli {
    /// Plain-text `key = value` file; entries act as flags, explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 32)]
    grid_cols: usize,
    #[arg(long, global = true, default_value_t = 32)]
    grid_rows: usize,
    /// Horizontal routing capacity per cell [default: 10 x cell height].
    #[arg(long, global = true)]
    h_cap: Option<f64>,
    /// Vertical routing capacity per cell [default: 10 x cell width].
    #[arg(long, global = true)]
    v_cap: Option<f64>,
    #[arg(long, global = true, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, global = true, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 2)]
    smooth_radius: usize,
    #[arg(long, global = true, default_value_t = 1.0)]
    macro_h_usage: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    macro_v_usage: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a design and print its statistics.
    Parse {
        #[command(flatten)]
        input: Input,
        /// Write the netlist in native format.
        #[arg(long)]
        out_native: Option<PathBuf>,
    },
    /// Group std cells into grid clusters.
    Cluster {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out_native: Option<PathBuf>,
        #[arg(long)]
        out_pl: Option<PathBuf>,
    },
    /// Run force-directed placement on the clusters.
    Fd {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        fd: FdArgs,
        /// Attraction off (k_a = 0).
        #[arg(long)]
        repulsive_only: bool,
        #[arg(long)]
        out_pl: Option<PathBuf>,
    },
    /// Print the proxy-cost breakdown of a placement.
    Evaluate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        fd: FdArgs,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Anneal macro locations.
    #[command(visible_alias = "place")]
    Sa {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        fd: FdArgs,
        #[command(flatten)]
        sa: SaArgs,
        #[arg(long, default_value = "sa_out")]
        out_dir: PathBuf,
    },
    /// Repeat annealing runs per seed group and tabulate mean and std-dev.
    Stability {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        fd: FdArgs,
        #[command(flatten)]
        sa: SaArgs,
        /// Seed groups; each group's seeds split its workers, e.g. `0:1,2:3`.
        #[arg(long, default_value = "0:1,2:3,4:5")]
        seed_groups: String,
        #[arg(long, default_value_t = 6)]
        runs: usize,
        #[arg(long, value_enum, default_value_t = Seeding::Derive)]
        seeding: Seeding,
        #[arg(long, default_value = "stability_out")]
        out_dir: PathBuf,
    },
    /// Evaluate one placement under several (gamma, lambda) pairs.
    Sweep {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        fd: FdArgs,
        #[arg(long, default_value = "0.5:0.5,1:0.5,0.01:0.01")]
        combos: String,
    },
    /// Randomly permute same-size macros and evaluate each permutation.
    Shuffle {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        fd: FdArgs,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value = "shuffle_out")]
        out_dir: PathBuf,
        /// Also write each shuffled placement.
        #[arg(long)]
        write_pl: bool,
    },
    /// Kendall tau-b between metric columns.
    Kendall {
        /// CSV with a `run_id` column.
        #[arg(long)]
        metrics: PathBuf,
        /// Second CSV joined on `run_id`.
        #[arg(long)]
        external_metrics: Option<PathBuf>,
        /// Comma-separated x columns [default: all columns of --metrics].
        #[arg(long)]
        x: Option<String>,
        /// Comma-separated y columns [default: all external columns, else all].
        #[arg(long)]
        y: Option<String>,
    },
    /// Render a placement as SVG.
    Plot {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "placement.svg")]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Bookshelf `.aux` or native netlist.
    design: PathBuf,
    /// Placement file merged over the design's own.
    #[arg(long)]
    pl: Option<PathBuf>,
    /// Put all movable nodes at one point: lower-left, upper-right or point:X,Y.
    #[arg(long)]
    vacuous: Option<VacuousMode>,
    #[arg(long, value_enum, default_value_t = ClusterMode::Grid)]
    cluster: ClusterMode,
    /// FD pass applied to clusters before the command runs.
    #[arg(long, value_enum, default_value_t = PreFd::None)]
    pre_fd: PreFd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClusterMode {
    Grid,
    None,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PreFd {
    None,
    Repulsive,
    Full,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Seeding {
    Repeat,
    Derive,
}

#[derive(Args, Debug)]
struct FdArgs {
    #[arg(long, default_value_t = 100)]
    iters: usize,
    #[arg(long, default_value_t = 1.0)]
    ka: f64,
    #[arg(long, default_value_t = 1.0)]
    kr: f64,
    #[arg(long, default_value_t = 1.0)]
    io_factor: f64,
    /// center or current.
    #[arg(long, default_value = "center")]
    fd_start: FdStart,
}

#[derive(Args, Debug)]
struct SaArgs {
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Comma-separated seeds split across workers [default: --seed].
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    budget_seconds: Option<f64>,
    #[arg(long, default_value = "spiral")]
    init: InitMethod,
    /// Five weights (swap,shift,mirror,move,shuffle) or name=value pairs.
    #[arg(long, default_value = "0.2,0.2,0.2,0.2,0.2")]
    action_weights: ActionWeights,
    /// Number or `auto`.
    #[arg(long, default_value = "auto")]
    t_init: Temperature,
    #[arg(long, default_value_t = 0.95)]
    cooling: f64,
    #[arg(long)]
    epoch_len: Option<usize>,
    /// FD every k*n steps; cycles 2..5 across workers when unset.
    #[arg(long)]
    fd_every: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    max_steps: usize,
}

const SUBCOMMANDS: [&str; 11] = [
    "parse",
    "cluster",
    "fd",
    "evaluate",
    "sa",
    "place",
    "stability",
    "sweep",
    "shuffle",
    "kendall",
    "plot",
];

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args: Vec<String> = std::env::args().collect();
    let cli = match expand_config(args) {
        Ok(args) => Cli::parse_from(args),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            return ExitCode::FAILURE;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::FAILURE
        }
    }
}

/// Splices `--config` entries into the argument list right after the
/// subcommand, skipping keys also given explicitly.
fn expand_config(mut args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(args.get(pos + 1).cloned().unwrap_or_default()),
    };
    let text = fs::read_to_string(&path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.clone()),
        _ => Error::InvalidConfig(format!("{}: {e}", path.display())),
    })?;
    let given: Vec<String> = args
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap().to_string())
        .collect();
    let mut extra = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::MalformedLine {
                file: path.display().to_string(),
                line: n + 1,
                reason: "expected key = value".into(),
            })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if given.contains(&key) {
            continue;
        }
        match value {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            v => {
                extra.push(format!("--{key}"));
                extra.push(v.to_string());
            }
        }
    }
    let sub = args
        .iter()
        .skip(1)
        .position(|a| SUBCOMMANDS.contains(&a.as_str()))
        .map(|i| i + 2)
        .unwrap_or(args.len());
    args.splice(sub..sub, extra);
    Ok(args)
}

struct Ctx {
    grid_cols: usize,
    grid_rows: usize,
    h_cap: Option<f64>,
    v_cap: Option<f64>,
    proxy: ProxyConfig,
    seed: u64,
}

impl Ctx {
    fn grid(&self, design: &Design) -> Result<Grid> {
        let canvas = design.netlist.canvas;
        let d = Grid::with_default_capacity(canvas, self.grid_cols.max(1), self.grid_rows.max(1))?;
        build_grid(
            canvas,
            self.grid_cols,
            self.grid_rows,
            self.h_cap.unwrap_or(d.h_capacity),
            self.v_cap.unwrap_or(d.v_capacity),
        )
    }

    fn manifest(&self, command: &str, input: Option<&Input>) -> RunManifest {
        let mut m = RunManifest::new(command);
        if let Some(i) = input {
            m.push("design", i.design.display());
            if let Some(pl) = &i.pl {
                m.push("pl", pl.display());
            }
            if let Some(v) = &i.vacuous {
                m.push("vacuous", format!("{v:?}"));
            }
            m.push("cluster", format!("{:?}", i.cluster).to_lowercase());
            m.push("pre_fd", format!("{:?}", i.pre_fd).to_lowercase());
        }
        m.push("grid_cols", self.grid_cols);
        m.push("grid_rows", self.grid_rows);
        m.push("h_cap", self.h_cap.map_or("default".into(), |v| v.to_string()));
        m.push("v_cap", self.v_cap.map_or("default".into(), |v| v.to_string()));
        m.push("gamma", self.proxy.weights.gamma);
        m.push("lambda", self.proxy.weights.lambda);
        m.push("smooth_radius", self.proxy.smooth_radius);
        m.push("macro_h_usage", self.proxy.macro_h_usage);
        m.push("macro_v_usage", self.proxy.macro_v_usage);
        m.push("seed", self.seed);
        m
    }
}

impl FdArgs {
    fn params(&self, seed: u64) -> FdParams {
        FdParams {
            num_iters: self.iters,
            k_a: self.ka,
            k_r: self.kr,
            io_factor: self.io_factor,
            seed,
            start: self.fd_start,
        }
    }

    fn record(&self, m: &mut RunManifest) {
        m.push("fd_iters", self.iters);
        m.push("fd_ka", self.ka);
        m.push("fd_kr", self.kr);
        m.push("fd_io_factor", self.io_factor);
        m.push("fd_start", format!("{:?}", self.fd_start).to_lowercase());
    }
}

impl SaArgs {
    fn seeds(&self, default: u64) -> Result<Vec<u64>> {
        match &self.seeds {
            None => Ok(vec![default]),
            Some(s) => parse_seed_list(s, ','),
        }
    }

    fn config(&self, ctx: &Ctx, fd: FdParams) -> SaConfig {
        SaConfig {
            seed: ctx.seed,
            init: self.init,
            action_weights: self.action_weights,
            max_steps: self.max_steps,
            t_init: self.t_init,
            cooling_ratio: self.cooling,
            epoch_len: self.epoch_len,
            fd_interval_multiplier: self.fd_every,
            fd_params: fd,
            proxy: ctx.proxy,
            budget: self.budget(),
        }
    }

    fn budget(&self) -> Option<Duration> {
        self.budget_seconds.map(Duration::from_secs_f64)
    }

    fn record(&self, m: &mut RunManifest) {
        m.push("workers", self.workers);
        m.push("init", format!("{:?}", self.init));
        let w: Vec<String> = self.action_weights.0.iter().map(f64::to_string).collect();
        m.push("action_weights", w.join(","));
        m.push("t_init", format!("{:?}", self.t_init));
        m.push("cooling", self.cooling);
        m.push("epoch_len", self.epoch_len.map_or("auto".into(), |v| v.to_string()));
        m.push("fd_every", self.fd_every.map_or("cycle".into(), |v| v.to_string()));
        m.push("max_steps", self.max_steps);
        m.push(
            "budget_seconds",
            self.budget_seconds.map_or("none".into(), |v| v.to_string()),
        );
    }
}

fn parse_seed_list(s: &str, sep: char) -> Result<Vec<u64>> {
    let seeds = s
        .split(sep)
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|e| Error::InvalidConfig(format!("seed `{t}`: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if seeds.is_empty() {
        return Err(Error::InvalidConfig(format!("empty seed list `{s}`")));
    }
    Ok(seeds)
}

fn parse_combos(s: &str) -> Result<Vec<ProxyWeights>> {
    s.split(',')
        .map(|c| c.trim().parse::<ProxyWeights>().map_err(Error::InvalidConfig))
        .collect()
}

fn load(input: &Input) -> Result<Design> {
    let mut design = load_design(&input.design, input.pl.as_deref())?;
    if let Some(mode) = input.vacuous {
        let moved = apply_vacuous_placement(&design.netlist, mode)?;
        for (i, node) in design.netlist.nodes.iter().enumerate() {
            if let Some(loc) = moved.get(i).filter(|_| node.movable) {
                design.placement.set(i, loc);
            }
        }
    }
    Ok(design)
}

fn clustered(input: &Input, design: &Design, grid: &Grid, fd: Option<&FdArgs>, seed: u64) -> Result<ClusteredNetlist> {
    let mut cnl = match input.cluster {
        ClusterMode::Grid => cluster_by_grid(&design.netlist, &design.placement, grid)?,
        ClusterMode::None => ClusteredNetlist::unclustered(design.netlist.clone(), design.placement.clone()),
    };
    let params = fd.map(|f| f.params(seed)).unwrap_or_default();
    cnl.initial = match input.pre_fd {
        PreFd::None => cnl.initial,
        PreFd::Repulsive => fd_repulsive_only(&cnl, &cnl.initial, &params)?,
        PreFd::Full => fd_place(&cnl, &cnl.initial, &params)?,
    };
    Ok(cnl)
}

fn print_breakdown(b: &ProxyBreakdown, w: ProxyWeights, hpwl: f64) -> String {
    format!(
        "wirelength={}\ndensity={}\ncongestion={}\ntotal={}\ngamma={}\nlambda={}\nhpwl={}\n",
        b.wirelength, b.density, b.congestion, b.total, w.gamma, w.lambda, hpwl
    )
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        grid_cols: cli.grid_cols,
        grid_rows: cli.grid_rows,
        h_cap: cli.h_cap,
        v_cap: cli.v_cap,
        proxy: ProxyConfig {
            weights: ProxyWeights::new(cli.gamma, cli.lambda)?,
            smooth_radius: cli.smooth_radius,
            macro_h_usage: cli.macro_h_usage,
            macro_v_usage: cli.macro_v_usage,
        },
        seed: cli.seed,
    };
    match cli.command {
        Command::Parse { input, out_native } => {
            let design = load(&input)?;
            let nl = &design.netlist;
            let s = &design.stats;
            println!("nodes={}", nl.nodes.len());
            println!("macros={}", nl.count_kind(NodeKind::Macro));
            println!("movable_macros={}", nl.movable_macros().len());
            println!("stdcells={}", nl.count_kind(NodeKind::StdCell));
            println!("ports={}", nl.count_kind(NodeKind::Port));
            println!("nets={}", nl.nets.len());
            println!("pins={}", nl.num_pins());
            println!("canvas={}x{}", nl.canvas.width, nl.canvas.height);
            println!("declared_nodes={}", s.declared_nodes);
            println!("declared_terminals={}", s.declared_terminals);
            println!("declared_nets={}", s.declared_nets);
            println!("declared_pins={}", s.declared_pins);
            println!("dropped_nets={}", s.dropped_nets);
            println!("clamped_locations={}", s.clamped_locations);
            if let Some(path) = out_native {
                write_native(nl, &path)?;
            }
        }
        Command::Cluster {
            input,
            out_native,
            out_pl,
        } => {
            let design = load(&input)?;
            let grid = ctx.grid(&design)?;
            let cnl = clustered(&input, &design, &grid, None, ctx.seed)?;
            println!("clusters={}", cnl.num_clusters());
            println!("nodes={}", cnl.netlist.nodes.len());
            println!("nets={}", cnl.netlist.nets.len());
            println!("internal_nets={}", cnl.internal_nets);
            if let Some(path) = out_native {
                write_native(&cnl.netlist, &path)?;
            }
            if let Some(path) = out_pl {
                write_placement(&cnl.netlist, &cnl.initial, &path)?;
            }
        }
        Command::Fd {
            input,
            fd,
            repulsive_only,
            out_pl,
        } => {
            let design = load(&input)?;
            let grid = ctx.grid(&design)?;
            let cnl = clustered(&input, &design, &grid, Some(&fd), ctx.seed)?;
            let params = fd.params(ctx.seed);
            let placed = if repulsive_only {
                fd_repulsive_only(&cnl, &cnl.initial, &params)?
            } else {
                fd_place(&cnl, &cnl.initial, &params)?
            };
            if placed.ensure_complete(&cnl.netlist).is_ok() && !cnl.netlist.nets.is_empty() {
                let before = proxy_cost(&cnl.netlist, &cnl.initial, &grid, &ctx.proxy);
                let after = proxy_cost(&cnl.netlist, &placed, &grid, &ctx.proxy)?;
                if let Ok(b) = before {
                    println!("total_before={}", b.total);
                }
                println!("total_after={}", after.total);
            }
            if let Some(path) = out_pl {
                write_placement(&cnl.netlist, &placed, &path)?;
            }
        }
        Command::Evaluate { input, fd, manifest } => {
            let design = load(&input)?;
            let grid = ctx.grid(&design)?;
            let cnl = clustered(&input, &design, &grid, Some(&fd), ctx.seed)?;
            let b = proxy_cost(&cnl.netlist, &cnl.initial, &grid, &ctx.proxy)?;
            let hpwl = total_hpwl(&cnl.netlist, &cnl.initial)?;
            print!("{}", print_breakdown(&b, ctx.proxy.weights, hpwl));
            if let Some(path) = manifest {
                let mut m = ctx.manifest("evaluate", Some(&input));
                fd.record(&mut m);
                m.write(&path)?;
            }
        }
        Command::Sa { input, fd, sa, out_dir } => {
            let design = load(&input)?;
            let grid = ctx.grid(&design)?;
            let cnl = clustered(&input, &design, &grid, Some(&fd), ctx.seed)?;
            let config = sa.config(&ctx, fd.params(ctx.seed));
            let seeds = sa.seeds(ctx.seed)?;
            let result = run_parallel(&cnl, &grid, &config, sa.workers, &seeds, sa.budget())?;
            create_dir(&out_dir)?;
            let best = &result.best;
            write_placement(&cnl.netlist, &best.best_placement, &out_dir.join("clustered.pl"))?;
            let lifted = cnl.lift(&design.netlist, &design.placement, &best.best_placement);
            write_placement(&design.netlist, &lifted, &out_dir.join("placement.pl"))?;
            let hpwl = total_hpwl(&cnl.netlist, &best.best_placement)?;
            let mut text = print_breakdown(&best.best_cost, ctx.proxy.weights, hpwl);
            text.push_str(&format!(
                "initial_total={}\nbest_worker={}\n",
                best.initial_cost.total, result.best_worker
            ));
            write_file(&out_dir.join("breakdown.txt"), &text)?;
            print!("{text}");
            for (w, r) in result.workers.iter().enumerate() {
                match r {
                    Ok(r) => write_file(&out_dir.join(format!("trace_w{w}.csv")), &r.trace_csv())?,
                    Err(e) => log::warn!("worker {w} failed: {e}"),
                }
            }
            let mut m = ctx.manifest("sa", Some(&input));
            fd.record(&mut m);
            sa.record(&mut m);
            let s: Vec<String> = seeds.iter().map(u64::to_string).collect();
            m.push("seeds", s.join(","));
            m.write(&out_dir.join("manifest.txt"))?;
        }
        Command::Stability {
            input,
            fd,
            sa,
            seed_groups,
            runs,
            seeding,
            out_dir,
        } => {
            let design = load(&input)?;
            let grid = ctx.grid(&design)?;
            let cnl = clustered(&input, &design, &grid, Some(&fd), ctx.seed)?;
            let config = sa.config(&ctx, fd.params(ctx.seed));
            let groups = seed_groups
                .split(',')
                .map(|g| {
                    Ok(StudyGroup {
                        label: g.trim().to_string(),
                        seeds: parse_seed_list(g, ':')?,
                        config: config.clone(),
                        workers: sa.workers,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let seeding = match seeding {
                Seeding::Repeat => RunSeeding::Repeat,
                Seeding::Derive => RunSeeding::Derive,
            };
            let report = stability_study(&cnl, &grid, &groups, runs, seeding)?;
            create_dir(&out_dir)?;
            let table = report.to_text_table();
            print!("{table}");
            write_file(&out_dir.join("stability.txt"), &table)?;
            write_file(&out_dir.join("stability.csv"), &report.to_csv())?;
            write_file(&out_dir.join("runs.csv"), &report.runs_csv())?;
            let mut m = ctx.manifest("stability", Some(&input));
            fd.record(&mut m);
            sa.record(&mut m);
            m.push("seed_groups", &seed_groups);
            m.push("runs", runs);
            m.push("seeding", format!("{seeding:?}").to_lowercase());
            m.write(&out_dir.join("manifest.txt"))?;
        }
        Command::Sweep { input, fd, combos } => {
            let design = load(&input)?;
            let grid = ctx.grid(&design)?;
            let cnl = clustered(&input, &design, &grid, Some(&fd), ctx.seed)?;
            let combos = parse_combos(&combos)?;
            let rows = weight_sweep(&cnl.netlist, &cnl.initial, &grid, &ctx.proxy, &combos)?;
            println!("gamma,lambda,wirelength,density,congestion,total");
            for r in rows {
                let b = r.breakdown;
                println!(
                    "{},{},{},{},{},{}",
                    r.weights.gamma, r.weights.lambda, b.wirelength, b.density, b.congestion, b.total
                );
            }
        }
        Command::Shuffle {
            input,
            fd,
            count,
            out_dir,
            write_pl,
        } => {
            let design = load(&input)?;
            let grid = ctx.grid(&design)?;
            let cnl = clustered(&input, &design, &grid, Some(&fd), ctx.seed)?;
            create_dir(&out_dir)?;
            let mut csv = String::from("run_id,seed,total,wirelength,density,congestion,hpwl\n");
            let mut row = |id: &str, seed: &str, p: &Placement| -> Result<()> {
                let b = proxy_cost(&cnl.netlist, p, &grid, &ctx.proxy)?;
                let h = total_hpwl(&cnl.netlist, p)?;
                csv.push_str(&format!(
                    "{id},{seed},{},{},{},{},{h}\n",
                    b.total, b.wirelength, b.density, b.congestion
                ));
                Ok(())
            };
            row("original", "", &cnl.initial)?;
            for k in 1..=count {
                let seed = derive_seed(ctx.seed, k);
                let p = shuffle_same_size(&cnl.netlist, &cnl.initial, seed);
                row(&format!("shuffle{k}"), &seed.to_string(), &p)?;
                if write_pl {
                    write_placement(&cnl.netlist, &p, &out_dir.join(format!("shuffle{k}.pl")))?;
                }
            }
            print!("{csv}");
            write_file(&out_dir.join("shuffle.csv"), &csv)?;
            let mut m = ctx.manifest("shuffle", Some(&input));
            fd.record(&mut m);
            m.push("count", count);
            m.write(&out_dir.join("manifest.txt"))?;
        }
        Command::Kendall {
            metrics,
            external_metrics,
            x,
            y,
        } => {
            let base = MetricTable::read_csv(&metrics)?;
            let split = |s: &str| s.split(',').map(|c| c.trim().to_string()).collect::<Vec<_>>();
            let (table, default_y) = match &external_metrics {
                Some(path) => {
                    let ext = MetricTable::read_csv(path)?;
                    let joined = base.join(&ext);
                    let ys = joined.columns[base.columns.len()..].to_vec();
                    (joined, ys)
                }
                None => (base.clone(), base.columns.clone()),
            };
            let xs = x.as_deref().map(split).unwrap_or(base.columns.clone());
            let ys = y.as_deref().map(split).unwrap_or(default_y);
            println!("x,y,n,tau");
            for (a, b, tau) in kendall_table(&table, &xs, &ys) {
                match tau {
                    Ok(t) => println!("{a},{b},{},{t}", table.run_ids.len()),
                    Err(Error::InvalidConfig(msg)) => return Err(Error::InvalidConfig(msg)),
                    Err(e) => {
                        log::warn!("{a} vs {b}: {e}");
                        println!("{a},{b},{},nan", table.run_ids.len());
                    }
                }
            }
        }
        Command::Plot { input, out } => {
            let design = load(&input)?;
            let grid = ctx.grid(&design)?;
            let cnl = clustered(&input, &design, &grid, None, ctx.seed)?;
            write_svg(&cnl.netlist, &cnl.initial, &grid, &out)?;
        }
    }
    Ok(())
}
