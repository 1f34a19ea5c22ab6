use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use qlsi::cli::{self, emit_plot_data, plot_csv, rows_from_csv, ExperimentConfig};
use qlsi::converse::{beta_lower_bound, np_oracle, InstanceDoc};
use qlsi::entropy::{ent_p, norm_derivative_p};
use qlsi::lsi::{lsi_constant_estimate, LsiOptions};
use qlsi::operator::{Density, MatrixDoc};
use qlsi::semigroup::GeneratorDoc;
use qlsi::weighted::{weighted_norm, WeightedSpace};
use qlsi::{Error, Result};

#[derive(Parser)]
#[command(name = "qlsi", version, about = "Quantum log-Sobolev and strong-converse toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suite named in an experiment config (TOML or JSON).
    Run {
        config: PathBuf,
        /// Output prefix; overrides the config's `output`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Weighted norm, entropy and norm derivative of X under σ.
    Norms {
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        p: f64,
    },
    /// Optimal type-II error next to its strong-converse lower bound.
    Qht {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        eps: f64,
    },
    /// Log-Sobolev constants.
    Lsi {
        #[command(subcommand)]
        command: LsiCommand,
    },
    /// Reshape a report CSV into (x, y, series) rows.
    Plot {
        report: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LsiCommand {
    Estimate {
        #[arg(long)]
        gen: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 32)]
        starts: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        max_iter: usize,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Run { config, output } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = cli::run(&cfg)?;
            let prefix = output.or_else(|| cfg.output.as_ref().map(|o| cfg.base_dir.join(o)));
            match prefix {
                Some(prefix) => {
                    report.write(&prefix)?;
                    print_json(&report.summary())?;
                }
                None => print!("{}", report.to_csv()?),
            }
            if !report.pass() {
                eprintln!("{}", serde_json::to_string(&report.summary())?);
            }
            Ok(ExitCode::from(report.exit_code()))
        }
        Command::Norms { sigma, x, p } => {
            let w = WeightedSpace::new(Density::new(MatrixDoc::parse(&read(&sigma)?)?)?)?;
            let x = MatrixDoc::parse(&read(&x)?)?;
            let norm = weighted_norm(&w, &x, p)?;
            let ent = ent_p(&w, &x, p).ok().map(|e| e.value);
            let deriv = norm_derivative_p(&w, &x, p).ok();
            print_json(&json!({ "p": p, "norm": norm, "entropy": ent, "norm_derivative": deriv }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Qht { instance, n, eps } => {
            let mut inst = InstanceDoc::parse(&read(&instance)?)?;
            if let Some(n) = n {
                inst = inst.with_n(n)?;
            }
            let (beta, test) = np_oracle(&inst, eps)?;
            let bound = beta_lower_bound(&inst, eps)?;
            print_json(&json!({
                "n": inst.n,
                "eps": eps,
                "gamma": inst.gamma,
                "relative_entropy": inst.rel_ent,
                "alpha": test.alpha,
                "beta": beta,
                "beta_lower_bound": bound,
                "pass": beta >= bound,
            }))?;
            Ok(if beta >= bound { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Lsi { command: LsiCommand::Estimate { gen, p, starts, seed, max_iter } } => {
            let l = GeneratorDoc::parse(&read(&gen)?)?;
            let opts = LsiOptions { starts, seed, max_iter, ..LsiOptions::default() };
            let est = lsi_constant_estimate(&l, p, &opts)?;
            print_json(&json!({
                "p": est.p,
                "estimate": est.value,
                "sampled_floor": est.sampled_floor,
                "diagonal_value": est.diagonal_value,
                "starts": est.starts,
                "converged": est.converged,
                "witness": MatrixDoc::from_matrix(est.witness.matrix()),
            }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot { report, output } => {
            let points = emit_plot_data(&rows_from_csv(&read(&report)?)?)?;
            let csv = plot_csv(&points)?;
            match output {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("QLSI_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Parameter(format!("QLSI_THREADS must be a positive integer, got {v:?}")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Resource(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors exit with 1; 2 is reserved for contract violations.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match configure_threads().and_then(|_| run(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(1)
        }
    }
}
