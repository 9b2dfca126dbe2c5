//! Command-line front end. Exit status: 0 success, 1 failed check or solve, 2 usage error.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use resource_weight::harness::{run_experiment, ExperimentConfig, ExperimentName, DEFAULT_TOL};
use resource_weight::measures::{evaluate, MeasureKind, MeasureReport, WeightOptions};
use resource_weight::states::{RepSpec, StateSpec};
use resource_weight::Error;

#[derive(Parser)]
#[command(
    name = "rw",
    version,
    about = "Weight and robustness quantifiers of coherence and asymmetry"
)]
#[command(after_help = "Set RW_LOG (error, warn, info, debug, trace) for diagnostics on stderr.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one quantifier on one state.
    Measure {
        /// werner:d=,alpha= | gisin:lambda=,theta= | haar-mixed:d=,denv=,seed= |
        /// haar-pure:d=,seed= | max-coherent:d= | basis:d=,k= | file:PATH
        #[arg(long)]
        state: StateSpec,
        /// cw | aw | cr | cl1 | crel | ar | arel | hsbound
        #[arg(long)]
        measure: MeasureKind,
        /// swap:d | cyclic:d,n | trivial:d; required by aw, ar, arel, optional for hsbound
        #[arg(long)]
        rep: Option<RepSpec>,
        /// Print the full report (certificates included) as JSON.
        #[arg(long)]
        json: bool,
        /// Report relative entropies in bits instead of nats.
        #[arg(long)]
        bits: bool,
        /// Write the solver iterate log as JSON lines to this file ("-" for stderr).
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
        /// Solve pure states by SDP instead of returning 1 directly.
        #[arg(long)]
        no_shortcut: bool,
    },
    /// Run a named experiment and write its CSV.
    Experiment {
        /// scatter | violation | closed-forms | properties
        #[arg(long)]
        name: ExperimentName,
        /// State dimension (scatter).
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Sample count; each experiment has its own default.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Environment dimension of the violation search (1 samples pure states).
        #[arg(long, default_value_t = 4)]
        env_dim: usize,
        /// Tolerance of the asserted inequalities and closed forms.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Solver { .. } => 1,
        _ => 2,
    }
}

fn print_human(report: &MeasureReport) {
    print!("{} = {:.12}", report.measure.name(), report.value);
    if report.iterations > 0 {
        print!(
            "  (gap {:.2e}, {} iterations)",
            report.gap, report.iterations
        );
    }
    println!();
}

fn measure(
    state: &StateSpec,
    kind: MeasureKind,
    rep: Option<RepSpec>,
    json: bool,
    bits: bool,
    trace: Option<PathBuf>,
    no_shortcut: bool,
) -> Result<(), Error> {
    if rep.is_some() && !kind.needs_rep() && kind != MeasureKind::HsBound {
        return Err(Error::Domain(format!(
            "measure '{}' takes no --rep",
            kind.name()
        )));
    }
    let rho = state.build()?;
    let rep = rep.map(|r| r.build()).transpose()?;
    let mut opts = WeightOptions {
        pure_shortcut: !no_shortcut,
        ..WeightOptions::default()
    };
    opts.solver.record_trace = trace.is_some();
    let mut report = evaluate(kind, &rho, rep.as_ref(), &opts)?;
    if bits
        && matches!(
            kind,
            MeasureKind::RelEntropyCoherence | MeasureKind::RelEntropyAsymmetry
        )
    {
        report.value /= std::f64::consts::LN_2;
    }
    if let Some(path) = trace {
        let lines: String = report
            .trace
            .iter()
            .map(|r| serde_json::to_string(r).map(|s| s + "\n"))
            .collect::<Result<_, _>>()?;
        if path.as_os_str() == "-" {
            eprint!("{lines}");
        } else {
            File::create(path)?.write_all(lines.as_bytes())?;
        }
        report.trace.clear();
    }
    if json {
        println!("{}", report.to_json());
    } else {
        print_human(&report);
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("RW_LOG")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Measure {
            state,
            measure: kind,
            rep,
            json,
            bits,
            trace,
            no_shortcut,
        } => measure(&state, kind, rep, json, bits, trace, no_shortcut).map(|()| true),
        Command::Experiment {
            name,
            dim,
            samples,
            seed,
            out,
            env_dim,
            tol,
        } => {
            let config = ExperimentConfig {
                dim,
                samples,
                seed,
                out,
                env_dim,
                tolerance: tol,
                ..ExperimentConfig::new(name)
            };
            config
                .validate()
                .and_then(|()| run_experiment(&config))
                .map(|outcome| {
                    eprint!("{}", outcome.summary);
                    outcome.passed
                })
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("rw: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
