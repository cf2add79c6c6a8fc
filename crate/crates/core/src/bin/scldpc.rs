use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sc_ldpc::alist::write_alist_file;
use sc_ldpc::protograph::ScCodeParams;
use sc_ldpc::report::{write_results, RunManifest};
use sc_ldpc::sim::{SimConfig, Simulator, Variant};
use sc_ldpc::Error;

#[derive(Parser, Debug)]
#[command(name = "scldpc", version, about = "SC-LDPC construction and windowed bit-flipping simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a lifted SC-LDPC parity-check matrix and write it as alist.
    Construct(ConstructArgs),
    /// Simulate the decoder variant named in the configuration.
    Simulate(RunArgs),
    /// Simulate several decoder variants over the same sweep.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct ConstructArgs {
    /// Column weight J of the (J, cJ)-regular protograph.
    #[arg(long = "J", visible_alias = "base-J")]
    j: u32,
    /// Protograph columns c.
    #[arg(long = "c", visible_alias = "base-c")]
    c: usize,
    /// Termination length L.
    #[arg(long = "L")]
    l: usize,
    /// Lifting size M.
    #[arg(long = "M")]
    m: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Redraw circulant shifts that close 4-cycles.
    #[arg(long)]
    avoid_four_cycles: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML configuration (or a JSON results sidecar).
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory for results.csv, positions.csv and run.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the decoder variant.
    #[arg(long)]
    variant: Option<Variant>,
    /// Override the window size W.
    #[arg(long)]
    window: Option<usize>,
    /// Override the sweep points (comma separated, dB).
    #[arg(long, value_delimiter = ',')]
    ebno: Option<Vec<f64>>,
    #[arg(long)]
    max_frames: Option<u64>,
    #[arg(long)]
    max_frame_errors: Option<u64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Variants to compare (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "rbwd,sbf-pmr,mbf-pmr,sbf-wbf,fbd")]
    variants: Vec<Variant>,
}

enum Failure {
    Config(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::WindowTooSmall { .. } | Error::InvalidParameter(_) => {
                Failure::Config(e)
            }
            other => Failure::Runtime(other),
        }
    }
}

fn load(args: &RunArgs) -> Result<SimConfig, Failure> {
    let mut cfg = SimConfig::from_path(&args.config).map_err(|e| match e {
        Error::Io { .. } => Failure::Config(e),
        other => Failure::from(other),
    })?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(v) = args.variant {
        cfg.decoder.variant = v;
    }
    if let Some(w) = args.window {
        cfg.decoder.window = w;
    }
    if let Some(e) = &args.ebno {
        cfg.sweep.ebno_db = e.clone();
    }
    if let Some(n) = args.max_frames {
        cfg.stopping.max_frames = n;
    }
    if let Some(n) = args.max_frame_errors {
        cfg.stopping.max_frame_errors = n;
    }
    Ok(cfg)
}

fn run(cfg: SimConfig, variants: Vec<Variant>) -> Result<(), Failure> {
    cfg.validate(&variants).map_err(Failure::Config)?;
    let out = cfg.out.clone();
    let sim = Simulator::new(cfg)?;
    let h = sim.matrix();
    eprintln!(
        "code: n = {}, m = {}, design rate = {:.4}",
        h.n_cols(),
        h.n_rows(),
        sim.rate()
    );
    let mut stats = Vec::new();
    for &v in &variants {
        for &ebno in &sim.config().sweep.ebno_db {
            let s = sim.run_point(v, ebno).map_err(Failure::Runtime)?;
            eprintln!(
                "{:>8} {:6.2} dB  frames {:>8}  ber {:.3e}  fer {:.3e}  i_avg {:.2}",
                v.name(),
                ebno,
                s.frames,
                s.ber(),
                s.fer(),
                s.i_avg()
            );
            stats.push(s);
        }
    }
    let manifest = RunManifest::new(
        sim.config().clone(),
        variants,
        sim.matrix().n_cols(),
        sim.matrix().n_rows(),
        sim.rate(),
    );
    let files = write_results(&stats, &manifest, &out).map_err(Failure::Runtime)?;
    eprintln!("wrote {}", files.summary.display());
    Ok(())
}

fn construct(args: ConstructArgs) -> Result<(), Failure> {
    let params = ScCodeParams {
        j: args.j,
        c: args.c,
        l: args.l,
        m: args.m,
        seed: args.seed,
        avoid_four_cycles: args.avoid_four_cycles,
    };
    let h = params.build().map_err(|e| match e {
        Error::Io { .. } => Failure::Runtime(e),
        other => Failure::Config(other),
    })?;
    write_alist_file(&h, &args.out).map_err(Failure::Runtime)?;
    eprintln!("wrote {} ({} x {})", args.out.display(), h.n_rows(), h.n_cols());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Construct(args) => construct(args),
        Command::Simulate(args) => load(&args).and_then(|cfg| {
            let v = cfg.decoder.variant;
            run(cfg, vec![v])
        }),
        Command::Sweep(args) => load(&args.run).and_then(|cfg| run(cfg, args.variants)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
