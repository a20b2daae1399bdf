use clap::{Parser, Subcommand};
use kdv_scatter::scenario::Scenario;
use scatter_cli::error::{CliError, EXIT_INVALID, EXIT_PASS};
use scatter_cli::{export, run_pipeline, Stage};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Parent of run directories when `--out` is not given.
const OUT_ENV: &str = "SCATTER_OUT";

#[derive(Parser)]
#[command(name = "scatter", version, about = "Forward scattering for KdV with step-like one-gap backgrounds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run pipeline stages on a scenario and write tables and report.json.
    Run {
        scenario: PathBuf,
        /// Comma-separated; every stage's prerequisite must be listed too.
        #[arg(long, value_delimiter = ',', default_value = "background,jost,scattering,reflection,verification")]
        stages: Vec<Stage>,
        /// Run directory; defaults to $SCATTER_OUT/<scenario hash>, or runs/<hash>.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Load and validate a scenario, then print it with defaults filled in.
    Validate { scenario: PathBuf },
    /// Write plot tables into <run-dir>/plots.
    ExportPlots { run_dir: PathBuf },
}

fn load(path: &Path) -> Result<Scenario, CliError> {
    Scenario::load(path).map_err(CliError::Scenario)
}

fn exec(cmd: Cmd) -> Result<i32, CliError> {
    match cmd {
        Cmd::Run { scenario, stages, out, threads } => {
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
            }
            let scn = load(&scenario)?;
            let out = out.unwrap_or_else(|| {
                let base = std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from);
                base.join(scn.hash())
            });
            let report = run_pipeline(&scn, &stages, &out)?;
            for t in &report.timing {
                let mine: Vec<_> = report.checks.iter().filter(|c| c.stage == t.stage).collect();
                let ok = mine.iter().filter(|c| c.check.passed).count();
                println!("{:<13} {ok}/{} checks passed ({:.2} s)", t.stage.name(), mine.len(), t.seconds);
            }
            for c in report.failed_checks() {
                println!("FAIL [{}] {}: {:.3e} (tolerance {:.1e}) {}", c.stage, c.check.name, c.check.residual, c.check.tolerance, c.check.note);
            }
            if let Some(f) = &report.failure {
                eprintln!("error in {} stage: {}", f.stage, f.message);
            }
            println!("scenario {} (pattern {}), report in {}", report.scenario_hash, report.pattern, out.display());
            Ok(report.exit_code())
        }
        Cmd::Validate { scenario } => {
            let scn = load(&scenario)?;
            eprintln!("pattern {}, hash {}", scn.geometry().pattern.label(), scn.hash());
            println!("{}", serde_json::to_string_pretty(&scn).expect("scenario serializes"));
            Ok(EXIT_PASS)
        }
        Cmd::ExportPlots { run_dir } => {
            for name in export::export_plots(&run_dir)? {
                println!("{}", run_dir.join(export::PLOTS).join(name).display());
            }
            Ok(EXIT_PASS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID as u8 } else { EXIT_PASS as u8 });
        }
    };
    let code = match exec(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
