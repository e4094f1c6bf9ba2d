//! Register machine assembly: parser, validator, and reference interpreter.
//!
//! Programs are one instruction per line (`inc r`, `dec r, k`, `goto k`,
//! `halt`), 1-indexed. `@input`/`@output` directives pick the input and
//! output registers; they default to `r_in` and `r_out`. The interpreter is
//! the correctness oracle for compiled nets: decrementing a zero register
//! jumps instead of going negative, and non-halting programs are cut off by
//! an explicit fuel budget rather than a timeout.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::net::is_identifier;
use crate::parse::{strip_comment, ParseError};

pub const DEFAULT_INPUT_REGISTER: &str = "r_in";
pub const DEFAULT_OUTPUT_REGISTER: &str = "r_out";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RmError {
    #[error("invalid register name `{0}`")]
    InvalidRegisterName(String),
    #[error("instruction {line} jumps to {target}, outside 1..={len}")]
    TargetOutOfRange { line: usize, target: usize, len: usize },
    #[error("cannot step a halted machine")]
    StepAfterHalt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    /// Increment the register, fall through to the next line.
    Inc(String),
    /// Decrement the register and fall through; if it is zero, jump instead.
    Dec(String, usize),
    Goto(usize),
    Halt,
}

impl Instruction {
    fn register(&self) -> Option<&str> {
        match self {
            Instruction::Inc(r) | Instruction::Dec(r, _) => Some(r),
            _ => None,
        }
    }

    /// Lines this instruction can transfer control to, given its own line.
    pub fn targets(&self, line: usize) -> Vec<usize> {
        match self {
            Instruction::Inc(_) => vec![line + 1],
            Instruction::Dec(_, k) => vec![line + 1, *k],
            Instruction::Goto(k) => vec![*k],
            Instruction::Halt => vec![],
        }
    }
}

/// Either a concrete 1-indexed line or the halted marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmLoc {
    Line(usize),
    Halted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RmState {
    pub line: RmLoc,
    pub registers: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RmOutcome {
    Halted {
        registers: BTreeMap<String, u64>,
        steps: u64,
    },
    FuelExhausted {
        state: RmState,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterMachine {
    instructions: Vec<Instruction>,
    registers: BTreeSet<String>,
    input_register: String,
    output_register: String,
}

impl RegisterMachine {
    /// The register set is every mentioned register plus the input and output
    /// registers. Jump targets must lie in `1..=len`.
    pub fn new(
        instructions: Vec<Instruction>,
        input_register: impl Into<String>,
        output_register: impl Into<String>,
    ) -> Result<Self, RmError> {
        let input_register = input_register.into();
        let output_register = output_register.into();
        let mut registers = BTreeSet::new();
        for name in [&input_register, &output_register] {
            if !is_identifier(name) {
                return Err(RmError::InvalidRegisterName(name.clone()));
            }
            registers.insert(name.clone());
        }
        let len = instructions.len();
        for (i, instr) in instructions.iter().enumerate() {
            if let Some(r) = instr.register() {
                if !is_identifier(r) {
                    return Err(RmError::InvalidRegisterName(r.to_string()));
                }
                registers.insert(r.to_string());
            }
            let jump_targets: &[usize] = match instr {
                Instruction::Dec(_, k) | Instruction::Goto(k) => std::slice::from_ref(k),
                _ => &[],
            };
            for &t in jump_targets {
                if t == 0 || t > len {
                    return Err(RmError::TargetOutOfRange {
                        line: i + 1,
                        target: t,
                        len,
                    });
                }
            }
        }
        Ok(RegisterMachine {
            instructions,
            registers,
            input_register,
            output_register,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut instructions = Vec::new();
        let mut source_lines = Vec::new();
        let mut input = None;
        let mut output = None;
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ParseError::Line { line: lineno, message: msg };
            if let Some(rest) = line.strip_prefix('@') {
                let (kind, arg) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| err(format!("directive `@{}` needs an argument", rest)))?;
                let arg = arg.trim();
                if !is_identifier(arg) {
                    return Err(err(format!("invalid register name `{}`", arg)));
                }
                let slot = match kind {
                    "input" => &mut input,
                    "output" => &mut output,
                    other => return Err(err(format!("unknown directive `@{}`", other))),
                };
                if slot.replace(arg.to_string()).is_some() {
                    return Err(err(format!("duplicate `@{}` directive", kind)));
                }
                continue;
            }
            let (mnemonic, rest) = match line.split_once(char::is_whitespace) {
                Some((m, r)) => (m, r.trim()),
                None => (line, ""),
            };
            let instr = match mnemonic {
                "inc" => {
                    if !is_identifier(rest) {
                        return Err(err(format!("inc: invalid register `{}`", rest)));
                    }
                    Instruction::Inc(rest.to_string())
                }
                "dec" => {
                    let (reg, target) = rest
                        .split_once(',')
                        .ok_or_else(|| err("dec: expected `dec <reg>, <line>`".into()))?;
                    let reg = reg.trim();
                    if !is_identifier(reg) {
                        return Err(err(format!("dec: invalid register `{}`", reg)));
                    }
                    let target: usize = target
                        .trim()
                        .parse()
                        .map_err(|_| err(format!("dec: invalid line number `{}`", target.trim())))?;
                    Instruction::Dec(reg.to_string(), target)
                }
                "goto" => {
                    let target: usize = rest
                        .parse()
                        .map_err(|_| err(format!("goto: invalid line number `{}`", rest)))?;
                    Instruction::Goto(target)
                }
                "halt" => {
                    if !rest.is_empty() {
                        return Err(err("halt takes no argument".into()));
                    }
                    Instruction::Halt
                }
                other => return Err(err(format!("unknown instruction `{}`", other))),
            };
            instructions.push(instr);
            source_lines.push(lineno);
        }
        let len = instructions.len();
        for (instr, &src) in instructions.iter().zip(&source_lines) {
            for t in match instr {
                Instruction::Dec(_, k) | Instruction::Goto(k) => vec![*k],
                _ => vec![],
            } {
                if t == 0 || t > len {
                    return Err(ParseError::Line {
                        line: src,
                        message: format!("jump target {} outside 1..={}", t, len),
                    });
                }
            }
        }
        RegisterMachine::new(
            instructions,
            input.unwrap_or_else(|| DEFAULT_INPUT_REGISTER.to_string()),
            output.unwrap_or_else(|| DEFAULT_OUTPUT_REGISTER.to_string()),
        )
        .map_err(|e| ParseError::Literal { message: e.to_string() })
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// The instruction at a 1-indexed line.
    pub fn instruction(&self, line: usize) -> Option<&Instruction> {
        line.checked_sub(1).and_then(|i| self.instructions.get(i))
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn registers(&self) -> &BTreeSet<String> {
        &self.registers
    }

    pub fn input_register(&self) -> &str {
        &self.input_register
    }

    pub fn output_register(&self) -> &str {
        &self.output_register
    }

    /// True when control can run past the last line (an `inc` or `dec` at the
    /// end of the program). Falling off is treated as an implicit halt.
    pub fn can_fall_off(&self) -> bool {
        matches!(
            self.instructions.last(),
            Some(Instruction::Inc(_)) | Some(Instruction::Dec(_, _))
        ) || self.instructions.is_empty()
    }

    /// Validation warnings that do not block execution.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.can_fall_off() && !self.is_empty() {
            out.push(format!(
                "control can fall past line {}; this is treated as an implicit halt",
                self.len()
            ));
        }
        out
    }

    pub fn initial_state(&self, input: u64) -> RmState {
        let mut registers: BTreeMap<String, u64> =
            self.registers.iter().map(|r| (r.clone(), 0)).collect();
        registers.insert(self.input_register.clone(), input);
        RmState {
            line: RmLoc::Line(1),
            registers,
        }
    }

    /// One small step. A line past the end of the program halts, like `halt`.
    pub fn step(&self, s: &RmState) -> Result<RmState, RmError> {
        let line = match s.line {
            RmLoc::Halted => return Err(RmError::StepAfterHalt),
            RmLoc::Line(line) => line,
        };
        let mut next = s.clone();
        match self.instruction(line) {
            None | Some(Instruction::Halt) => next.line = RmLoc::Halted,
            Some(Instruction::Inc(r)) => {
                *next.registers.entry(r.clone()).or_insert(0) += 1;
                next.line = RmLoc::Line(line + 1);
            }
            Some(Instruction::Dec(r, k)) => {
                let v = next.registers.entry(r.clone()).or_insert(0);
                if *v > 0 {
                    *v -= 1;
                    next.line = RmLoc::Line(line + 1);
                } else {
                    next.line = RmLoc::Line(*k);
                }
            }
            Some(Instruction::Goto(k)) => next.line = RmLoc::Line(*k),
        }
        Ok(next)
    }

    /// Runs from line 1 with the input register set to `input` and every
    /// other register zero. `steps` counts executed `inc`/`dec`/`goto`
    /// instructions; reaching a `halt` (or running off the end) is free, so a
    /// program that halts within the fuel budget reports the same result for
    /// every larger budget.
    pub fn run(&self, input: u64, fuel: u64) -> RmOutcome {
        self.run_inner(input, fuel, None)
    }

    /// Like [`run`](Self::run), also returning every state visited (each with
    /// a concrete line, ending at the halt line when the machine halts).
    pub fn run_traced(&self, input: u64, fuel: u64) -> (RmOutcome, Vec<RmState>) {
        let mut trace = Vec::new();
        let outcome = self.run_inner(input, fuel, Some(&mut trace));
        (outcome, trace)
    }

    fn run_inner(&self, input: u64, fuel: u64, mut trace: Option<&mut Vec<RmState>>) -> RmOutcome {
        let mut state = self.initial_state(input);
        let mut steps = 0u64;
        loop {
            if let Some(t) = trace.as_deref_mut() {
                t.push(state.clone());
            }
            let line = match state.line {
                RmLoc::Line(line) => line,
                RmLoc::Halted => unreachable!("run never stores a halted state"),
            };
            match self.instruction(line) {
                None | Some(Instruction::Halt) => {
                    return RmOutcome::Halted {
                        registers: state.registers,
                        steps,
                    };
                }
                Some(_) => {
                    if steps == fuel {
                        return RmOutcome::FuelExhausted { state };
                    }
                    state = self.step(&state).expect("state is not halted");
                    steps += 1;
                }
            }
        }
    }
}
