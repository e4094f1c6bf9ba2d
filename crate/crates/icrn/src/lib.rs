//! Inhibitory chemical reaction networks (iCRNs): reactions that fire only
//! when every reactant is present and every inhibitor is absent.
//!
//! The crate has three layers:
//!
//! * an exact, rate-independent core ([`net`], [`exec`]): configurations are
//!   arbitrary-precision rationals, execution advances one maximal straight
//!   line segment at a time, and presence/absence tests are exact;
//! * a register-machine front end ([`regmachine`], [`compile`]): an assembly
//!   parser and reference interpreter, plus a compiler that turns a program
//!   into an iCRN driven by a three-phase oscillator per program line;
//! * an approximate mass-action model ([`ode`]): fixed-step RK4 integration
//!   where each inhibitor `I` scales a reaction rate by `1/(1 + K·[I])`.
//!
//! Trajectory analysis ([`exec::waves`]) detects waves (a species rising from
//! 0 to exactly 1 and back) and counts oscillation periods, both on exact
//! executor trajectories and, with a tolerance, on sampled ODE output.
//!
//! Start with the runnable examples:
//!
//! ```bash
//! cargo run --example multiply_by_two   # compile + execute a program
//! cargo run --example ring_oscillator   # stable oscillation and wave counts
//! cargo run --example mass_action       # numerical simulation to CSV
//! cargo run --example custom_network    # the reaction text format
//! ```
//!
//! The `icrn` binary exposes the same pipeline as subcommands (`compile`,
//! `run-rm`, `exec`, `ode`, `oscillator`, `check-oscillation`).

pub mod cli;
pub mod compile;
pub mod exec;
pub mod net;
pub mod ode;
pub mod parse;
pub mod regmachine;

pub use compile::{compile, predecessors, CompileError, CompiledNet, Phase, TransitionPoint};
pub use exec::waves::{count_periods, count_periods_sampled, find_waves, find_waves_sampled, Wave};
pub use exec::{
    build_ring_oscillator, next_transition, run_to_static, run_to_static_with, simulate_function,
    ExecError, ExecOutcome, ExecResult, FunctionOutcome, SimulateError, TieBreak, Trajectory,
    Transition,
};
pub use net::{
    Configuration, FluxVector, Icrn, NetError, Reaction, Species, StoichMatrix, MAX_COEFFICIENT,
};
pub use num_rational::BigRational;
pub use ode::{OdeError, OdeSettings, SampledTrajectory};
pub use parse::ParseError;
pub use regmachine::{Instruction, RegisterMachine, RmError, RmLoc, RmOutcome, RmState};
