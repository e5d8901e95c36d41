use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fermion_split::scenario::{self, PGrid, RunRecord, Scenario, ScenarioConfig};

/// Directory used for output files when `--out` is not given.
const OUT_DIR_ENV: &str = "FERMION_SPLIT_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "fermion-split",
    version,
    about = "Fermionic entanglement by splitting and detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two electrons split across a double well, then projected onto one per well.
    TwoElectron(CommonArgs),
    /// Second split of the projected state and its coincidence statistics.
    Certify(CommonArgs),
    /// Particle-bipartition spectrum of the N-fermion projected state.
    NFermion(CommonArgs),
    /// Which-well detector coupling and readout.
    Detector(CommonArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonArgs {
    /// Single splitting probability.
    #[arg(long, conflicts_with = "p_grid")]
    p: Option<f64>,
    /// Inclusive grid start:stop:count.
    #[arg(long)]
    p_grid: Option<PGrid>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    internal_dim: Option<usize>,
    #[arg(long, default_value_t = 3)]
    detector_levels: usize,
    /// Overrides every residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Output file; defaults to `$FERMION_SPLIT_OUT_DIR/<verb>.<format>`, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl CommonArgs {
    fn config(&self, scenario: Scenario) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::new(scenario);
        if let Some(p) = self.p {
            cfg.p_grid = PGrid::single(p);
        }
        if let Some(g) = self.p_grid {
            cfg.p_grid = g;
        }
        if let Some(n) = self.n {
            cfg.n = n;
            cfg.internal_dim = cfg.internal_dim.max(n);
        }
        if let Some(m) = self.m {
            cfg.m = m;
        }
        if let Some(d) = self.internal_dim {
            cfg.internal_dim = d;
        }
        cfg.detector_levels = self.detector_levels;
        cfg.tol = self.tol;
        cfg
    }
}

fn render(record: &RunRecord, format: Format) -> String {
    match format {
        Format::Json => record.to_json() + "\n",
        Format::Csv => record.to_csv(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (scenario, args) = match &cli.command {
        Command::TwoElectron(a) => (Scenario::TwoElectron, a),
        Command::Certify(a) => (Scenario::Certify, a),
        Command::NFermion(a) => (Scenario::NFermion, a),
        Command::Detector(a) => (Scenario::Detector, a),
    };
    let cfg = args.config(scenario);
    let record = match scenario::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = render(&record, args.format);
    let ext = match args.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let target = args.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .map(|d| PathBuf::from(d).join(format!("{}.{ext}", scenario.name())))
    });
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                if let Err(e) = std::fs::create_dir_all(parent) {
                    eprintln!("error: cannot create {}: {e}", parent.display());
                    return ExitCode::from(2);
                }
            }
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    let failures = record.failures();
    for (p, s) in &failures {
        eprintln!(
            "residual above tolerance at p={p}: {} = {} (expected {}, tol {})",
            s.name,
            s.value,
            s.expected.unwrap_or(f64::NAN),
            s.tolerance.unwrap_or(f64::NAN)
        );
    }
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
