//! Command-line front end: parse, compile, execute, integrate, analyze.
//!
//! Summaries are single machine-readable lines on stdout; diagnostics go to
//! stderr. Exit codes: 0 success, 1 parse or validation error, 2 fuel or
//! segment budget exhausted, 3 nondeterministic configuration reached.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::compile::compile;
use crate::exec::{run_to_static, ExecOutcome};
use crate::net::{Configuration, Icrn, Species};
use crate::ode::{integrate, OdeSettings, SampledTrajectory};
use crate::regmachine::{RegisterMachine, RmOutcome};

#[derive(Parser)]
#[command(
    name = "icrn",
    about = "Compile register machines to inhibitory chemical reaction networks and run them",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a register machine program to a self-describing .icrn file.
    Compile {
        /// Register machine program (.rm).
        program: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Interpret a register machine program directly.
    RunRm {
        /// Register machine program (.rm).
        program: PathBuf,
        /// Initial value of the input register.
        #[arg(long)]
        input: u64,
        /// Maximum number of executed instructions.
        #[arg(long, default_value_t = 1_000_000)]
        fuel: u64,
        /// Print every visited state to stdout.
        #[arg(long)]
        trace: bool,
    },
    /// Run a net under the exact rate-independent semantics.
    Exec {
        /// Reaction network file (.icrn).
        net: PathBuf,
        /// Initial configuration, e.g. "A_1=1,R_in=3" (rationals allowed).
        #[arg(long, default_value = "")]
        init: String,
        /// Segment budget.
        #[arg(long, default_value_t = 1_000_000)]
        max_segments: usize,
        /// Write the transition log CSV here.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Integrate the mass-action model with Hill inhibition, writing CSV.
    Ode {
        /// Reaction network file (.icrn).
        net: PathBuf,
        /// Initial configuration, e.g. "A_1=1,R_in=3".
        #[arg(long, default_value = "")]
        init: String,
        /// Integration end time.
        #[arg(long = "t-end", default_value_t = 2000.0)]
        t_end: f64,
        /// Integrator step.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Hill inhibition constant K in 1/(1 + K[I]).
        #[arg(long = "hill-k", default_value_t = 1e5)]
        hill_k: f64,
        /// Sampling interval for the output.
        #[arg(long = "sample", default_value_t = 1.0)]
        sample_every: f64,
        /// Output CSV file.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Emit the n-species ring oscillator net.
    Oscillator {
        /// Number of species (at least 3).
        #[arg(long)]
        n: usize,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Count oscillation periods of an ordered species family in a
    /// trajectory CSV (integrator output or executor transition log).
    CheckOscillation {
        /// Trajectory CSV file.
        trajectory: PathBuf,
        /// Comma-separated ordered species list, e.g. "X_1,X_3".
        #[arg(long)]
        species: String,
        /// Tolerance for the =0 and =1 tests.
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
    },
}

struct Failure {
    message: String,
}

impl Failure {
    fn new(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
        }
    }

    fn in_file(path: &Path, err: impl Display) -> Self {
        Failure::new(format!("{}: {}", path.display(), err))
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::in_file(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::in_file(path, e))
}

fn load_machine(path: &Path, stderr: &mut dyn Write) -> Result<RegisterMachine, Failure> {
    let machine =
        RegisterMachine::parse(&read_file(path)?).map_err(|e| Failure::in_file(path, e))?;
    for warning in machine.warnings() {
        let _ = writeln!(stderr, "warning: {}: {}", path.display(), warning);
    }
    Ok(machine)
}

/// Loads a net file. Files carrying `#@` pragmas are compiled nets; loading
/// them through [`crate::compile::CompiledNet`] keeps pragma-only species
/// (an input register no reaction mentions) in the species list.
fn load_net(path: &Path) -> Result<Icrn, Failure> {
    let text = read_file(path)?;
    let result = if text.lines().any(|l| l.trim_start().starts_with("#@")) {
        crate::compile::CompiledNet::parse(&text).map(|cn| cn.net().clone())
    } else {
        Icrn::parse(&text)
    };
    result.map_err(|e| Failure::in_file(path, e))
}

fn parse_init(init: &str) -> Result<Configuration, Failure> {
    init.parse()
        .map_err(|e| Failure::new(format!("--init: {}", e)))
}

fn check_species_known(net: &Icrn, c: &Configuration) -> Result<(), Failure> {
    for (s, _) in c.iter() {
        if !net.contains_species(s) {
            return Err(Failure::new(format!(
                "--init: species `{}` is not in the net",
                s
            )));
        }
    }
    Ok(())
}

fn emit(text: &str, output: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(path) => write_file(path, text),
        None => {
            let _ = write!(stdout, "{}", text);
            Ok(())
        }
    }
}

fn config_or_dash(c: &Configuration) -> String {
    if c.is_empty() {
        "-".to_string()
    } else {
        c.to_string()
    }
}

/// Runs the CLI against explicit streams; `main` passes the real ones.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", rendered);
                0
            } else {
                let _ = write!(stderr, "{}", rendered);
                1
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(stderr, "error: {}", failure.message);
            1
        }
    }
}

fn dispatch(
    command: Command,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    match command {
        Command::Compile { program, output } => {
            let machine = load_machine(&program, stderr)?;
            let compiled = compile(&machine).map_err(|e| Failure::in_file(&program, e))?;
            emit(&compiled.to_text(), output.as_ref(), stdout)?;
            Ok(0)
        }
        Command::RunRm {
            program,
            input,
            fuel,
            trace,
        } => {
            let machine = load_machine(&program, stderr)?;
            if trace {
                let (outcome, states) = machine.run_traced(input, fuel);
                for state in &states {
                    let line = match state.line {
                        crate::regmachine::RmLoc::Line(l) => l,
                        crate::regmachine::RmLoc::Halted => continue,
                    };
                    let regs: Vec<String> = state
                        .registers
                        .iter()
                        .map(|(r, v)| format!("{}={}", r, v))
                        .collect();
                    let _ = writeln!(stdout, "TRACE {} {}", line, regs.join(","));
                }
                finish_run_rm(outcome, &machine, stdout)
            } else {
                finish_run_rm(machine.run(input, fuel), &machine, stdout)
            }
        }
        Command::Exec {
            net,
            init,
            max_segments,
            log,
        } => {
            let parsed = load_net(&net)?;
            let c0 = parse_init(&init)?;
            check_species_known(&parsed, &c0)?;
            let result = run_to_static(&parsed, &c0, max_segments);
            if let Some(path) = log {
                write_file(&path, &result.trajectory.to_transition_log(&parsed))?;
            }
            let segments = result.trajectory.segments();
            match result.outcome {
                ExecOutcome::Static(final_config) => {
                    let _ = writeln!(
                        stdout,
                        "STATIC {} segments={}",
                        config_or_dash(&final_config),
                        segments
                    );
                    Ok(0)
                }
                ExecOutcome::FuelExhausted => {
                    let _ = writeln!(stdout, "FUEL segments={}", segments);
                    Ok(2)
                }
                ExecOutcome::Nondeterministic { at, applicable } => {
                    let indices: Vec<String> =
                        applicable.iter().map(ToString::to_string).collect();
                    let _ = writeln!(
                        stdout,
                        "NONDET {} segments={} applicable={}",
                        config_or_dash(&at),
                        segments,
                        indices.join(",")
                    );
                    Ok(3)
                }
            }
        }
        Command::Ode {
            net,
            init,
            t_end,
            dt,
            hill_k,
            sample_every,
            output,
        } => {
            let parsed = load_net(&net)?;
            let c0 = parse_init(&init)?;
            let settings = OdeSettings {
                t_end,
                dt,
                hill_k,
                sample_every,
                ..OdeSettings::default()
            };
            let traj =
                integrate(&parsed, &c0, &settings).map_err(|e| Failure::new(e.to_string()))?;
            write_file(&output, &traj.to_csv())?;
            let _ = writeln!(
                stdout,
                "ODE samples={} t_end={} file={}",
                traj.len(),
                t_end,
                output.display()
            );
            Ok(0)
        }
        Command::Oscillator { n, output } => {
            let ring =
                crate::exec::build_ring_oscillator(n).map_err(|e| Failure::new(e.to_string()))?;
            emit(&ring.to_string(), output.as_ref(), stdout)?;
            Ok(0)
        }
        Command::CheckOscillation {
            trajectory,
            species,
            eps,
        } => {
            let traj = SampledTrajectory::from_csv(&read_file(&trajectory)?)
                .map_err(|e| Failure::in_file(&trajectory, e))?;
            let ordered = species
                .split(',')
                .map(|name| Species::new(name.trim()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::new(format!("--species: {}", e)))?;
            let periods = crate::exec::waves::count_periods_sampled(&traj, &ordered, eps);
            let _ = writeln!(stdout, "periods={}", periods);
            Ok(0)
        }
    }
}

fn finish_run_rm(
    outcome: RmOutcome,
    machine: &RegisterMachine,
    stdout: &mut dyn Write,
) -> Result<i32, Failure> {
    match outcome {
        RmOutcome::Halted { registers, steps } => {
            let output = machine.output_register();
            let _ = writeln!(
                stdout,
                "HALT {}={} steps={}",
                output,
                registers.get(output).copied().unwrap_or(0),
                steps
            );
            Ok(0)
        }
        RmOutcome::FuelExhausted { .. } => {
            let _ = writeln!(stdout, "FUEL");
            Ok(2)
        }
    }
}
