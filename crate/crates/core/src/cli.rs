//! Command-line front end: `validate`, `simulate`, `analyze`, `montecarlo`.
//!
//! Exit codes: 0 success, 1 domain validation failure, 2 I/O or parse
//! failure, 3 numerical failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::campaign::run_campaign;
use crate::detector::evaluate_trace;
use crate::error::Result;
use crate::io::{self, DetectionSummary};
use crate::scenario::Scenario;
use crate::sim;

#[derive(Debug, Parser)]
#[command(name = "consensus-guard", version, about = "Secure privacy-preserving average consensus toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check weight assumptions, connectivity and detector parameters.
    Validate { scenario: PathBuf },
    /// Run the protocol and every detector; write CSV/JSON outputs.
    Simulate {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        zero_noise: bool,
    },
    /// Privacy, detectability, false-alarm, convergence and error-interval report.
    Analyze {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long = "p-max")]
        p_max: Option<usize>,
    },
    /// Attack-free Monte-Carlo estimate of the false-alarm rate.
    Montecarlo {
        scenario: PathBuf,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        horizon: Option<usize>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn execute<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.class().exit_code()
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Validate { scenario } => cmd_validate(&scenario, stdout),
        Command::Simulate {
            scenario,
            out,
            seed,
            zero_noise,
        } => {
            let mut s = io::load_scenario(&scenario)?;
            if let Some(seed) = seed {
                s.seed = seed;
            }
            s.zero_noise |= zero_noise;
            cmd_simulate(&s, &out, stdout, stderr).map(|_| 0)
        }
        Command::Analyze {
            scenario,
            out,
            beta,
            p_max,
        } => {
            let mut s = io::load_scenario(&scenario)?;
            if let Some(beta) = beta {
                s.analysis.beta = beta;
            }
            if let Some(p) = p_max {
                s.analysis.p_max = p;
            }
            let report = crate::analysis::analyze(&s)?;
            emit_json(&report, out.as_deref(), stdout)?;
            Ok(0)
        }
        Command::Montecarlo {
            scenario,
            trials,
            seed,
            horizon,
            threads,
            out,
        } => {
            let mut s = io::load_scenario(&scenario)?;
            if let Some(seed) = seed {
                s.seed = seed;
            }
            if let Some(h) = horizon {
                s.horizon = h;
            }
            let results = run_campaign(&s, trials, threads)?;
            emit_json(&results, out.as_deref(), stdout)?;
            Ok(0)
        }
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => writeln!(stdout, "{text}")?,
    }
    Ok(())
}

/// Prints one line per check; returns exit code 0 when all pass, 1 otherwise.
pub fn cmd_validate(path: &Path, stdout: &mut dyn Write) -> Result<i32> {
    let scenario = io::load_scenario(path)?;
    let check = scenario.check()?;
    let mark = |ok: bool| if ok { "ok  " } else { "FAIL" };
    let w = &check.weights;
    writeln!(stdout, "{} connected", mark(check.connected))?;
    writeln!(stdout, "{} weights symmetric", mark(w.symmetric))?;
    writeln!(stdout, "{} weights row-stochastic", mark(w.row_stochastic))?;
    writeln!(stdout, "{} weights follow graph", mark(w.sparsity_matches_graph))?;
    writeln!(stdout, "{} spectrum (lambda_1 = 1, |lambda_i| < 1)", mark(w.spectrum_ok))?;
    if let Some(ev) = &w.eigenvalues {
        writeln!(stdout, "     eigenvalues {ev:?}")?;
    }
    for p in &check.problems {
        writeln!(stdout, "FAIL {p}")?;
    }
    for warning in &check.warnings {
        writeln!(stdout, "warn {warning}")?;
    }
    let passed = check.passed();
    writeln!(stdout, "{}", if passed { "valid" } else { "invalid" })?;
    Ok(if passed { 0 } else { 1 })
}

#[derive(Debug, Serialize)]
struct SimulationSummary {
    scenario_hash: String,
    seed: u64,
    horizon: usize,
    zero_noise: bool,
    final_state: Vec<f64>,
    detectors: Vec<DetectionSummary>,
}

/// Writes `trace.csv` plus `detection_agent<i>.csv` and `.json` per detector.
pub fn cmd_simulate(
    scenario: &Scenario,
    out_dir: &Path,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<Vec<DetectionSummary>> {
    let trace = sim::run(scenario)?;
    let reports = evaluate_trace(scenario, &trace)?;
    fs::create_dir_all(out_dir)?;
    io::write_trace_csv(&trace, fs::File::create(out_dir.join("trace.csv"))?)?;
    let mut summaries = Vec::new();
    for report in &reports {
        let stem = format!("detection_agent{}", report.agent);
        io::write_detection_csv(report, fs::File::create(out_dir.join(format!("{stem}.csv")))?)?;
        let summary = DetectionSummary::from(report);
        fs::write(
            out_dir.join(format!("{stem}.json")),
            serde_json::to_string_pretty(&summary)? + "\n",
        )?;
        if report.degenerate {
            writeln!(stderr, "warning: detector at agent {} has a vanishing projector", report.agent)?;
        }
        if report.evaluable_steps == 0 {
            writeln!(stderr, "warning: horizon too short for detector at agent {}", report.agent)?;
        }
        summaries.push(summary);
    }
    let summary = SimulationSummary {
        scenario_hash: trace.scenario_hash.clone(),
        seed: trace.seed,
        horizon: trace.horizon(),
        zero_noise: trace.zero_noise,
        final_state: trace.x.last().map(|x| x.iter().copied().collect()).unwrap_or_default(),
        detectors: summaries.clone(),
    };
    writeln!(stdout, "{}", serde_json::to_string_pretty(&summary)?)?;
    Ok(summaries)
}
