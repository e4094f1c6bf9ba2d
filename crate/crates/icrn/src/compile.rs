//! Translates a register machine into an iCRN.
//!
//! Every non-halt line `i` becomes three oscillator phases `A_i -> B_i ->
//! C_i`; the `C_i` reaction performs the instruction (producing or consuming
//! a register species and handing control to the next `A` species), while
//! `A_i`'s reaction is inhibited by the `C_j` of every potential predecessor
//! state `j` so a fresh `A_i` cannot fire before the previous phase has fully
//! drained. Halt lines contribute no reactions, so reaching their `A`
//! species leaves the net static. One unit of `A_1` drives the whole
//! machine, and register values ride along as integer concentrations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::net::{Configuration, Icrn, NetError, Reaction, Species};
use crate::parse::{parse_configuration, ParseError};
use crate::regmachine::{Instruction, RegisterMachine};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("registers `{first}` and `{second}` both map to species `{species}`")]
    RegisterSpeciesCollision {
        first: String,
        second: String,
        species: String,
    },
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Oscillator phase of a state species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    A,
    B,
    C,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::A => "A",
            Phase::B => "B",
            Phase::C => "C",
        })
    }
}

/// A configuration with exactly one oscillator species present, at
/// concentration exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionPoint {
    pub state: usize,
    pub phase: Phase,
    pub species: Species,
}

/// The `(A_i, B_i, C_i)` species names for a state.
pub fn state_species(state: usize) -> (Species, Species, Species) {
    let make = |prefix: &str| {
        Species::new(format!("{}_{}", prefix, state)).expect("state species names are identifiers")
    };
    (make("A"), make("B"), make("C"))
}

fn parse_state_species(name: &str) -> Option<(usize, Phase)> {
    let (prefix, digits) = name.split_once('_')?;
    let phase = match prefix {
        "A" => Phase::A,
        "B" => Phase::B,
        "C" => Phase::C,
        _ => return None,
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().map(|state| (state, phase))
}

/// Species name for a register: `R_` plus the register name with a leading
/// `r_` stripped, so `r_in` maps to `R_in`. Distinct registers that collide
/// under this rule are a compile error.
pub fn register_species(register: &str) -> Result<Species, NetError> {
    let stripped = register.strip_prefix("r_").unwrap_or(register);
    Species::new(format!("R_{}", stripped))
}

/// The states that can transfer control to `state`: the previous line when
/// it falls through (an `inc`, or a `dec` whose decrement succeeded), plus
/// every `dec` that jumps here on zero and every `goto` here.
pub fn predecessors(machine: &RegisterMachine, state: usize) -> BTreeSet<usize> {
    let mut preds = BTreeSet::new();
    for j in 1..=machine.len() {
        let falls_through = matches!(
            machine.instruction(j),
            Some(Instruction::Inc(_)) | Some(Instruction::Dec(_, _))
        );
        if falls_through && j + 1 == state {
            preds.insert(j);
        }
        match machine.instruction(j) {
            Some(Instruction::Dec(_, k)) | Some(Instruction::Goto(k)) if *k == state => {
                preds.insert(j);
            }
            _ => {}
        }
    }
    preds
}

fn one(s: Species) -> BTreeMap<Species, u32> {
    BTreeMap::from([(s, 1)])
}

/// A register machine compiled to an iCRN, with the species bookkeeping
/// needed to read the simulation back out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledNet {
    net: Icrn,
    states: usize,
    halt_states: BTreeSet<usize>,
    oscillator: BTreeMap<Species, (usize, Phase)>,
    register_species: BTreeMap<String, Species>,
    context_species: Species,
    input_species: Species,
    output_species: Species,
}

/// Compiles a validated machine. States are compiled independently, including
/// unreachable ones; when control can fall past the last line, the virtual
/// state `m+1` acts as a halt state.
pub fn compile(machine: &RegisterMachine) -> Result<CompiledNet, CompileError> {
    let mut registers = BTreeMap::new();
    let mut owners: BTreeMap<Species, String> = BTreeMap::new();
    for reg in machine.registers() {
        let species = register_species(reg)?;
        if let Some(first) = owners.insert(species.clone(), reg.clone()) {
            return Err(CompileError::RegisterSpeciesCollision {
                first,
                second: reg.clone(),
                species: species.name().to_string(),
            });
        }
        registers.insert(reg.clone(), species);
    }

    let mut reactions = Vec::new();
    for i in 1..=machine.len() {
        let instr = machine.instruction(i).expect("line in range");
        if matches!(instr, Instruction::Halt) {
            continue;
        }
        let (a_i, b_i, c_i) = state_species(i);
        let inhibitors: BTreeSet<Species> = predecessors(machine, i)
            .into_iter()
            .map(|j| state_species(j).2)
            .collect();
        reactions.push(Reaction::new(one(a_i.clone()), inhibitors, one(b_i.clone()))?);
        reactions.push(Reaction::new(
            one(b_i.clone()),
            BTreeSet::from([a_i]),
            one(c_i.clone()),
        )?);
        match instr {
            Instruction::Inc(r) => {
                let next = state_species(i + 1).0;
                let reg = registers[r].clone();
                reactions.push(Reaction::new(
                    one(c_i),
                    BTreeSet::from([b_i]),
                    BTreeMap::from([(next, 1), (reg, 1)]),
                )?);
            }
            Instruction::Dec(r, k) => {
                let next = state_species(i + 1).0;
                let jump = state_species(*k).0;
                let reg = registers[r].clone();
                reactions.push(Reaction::new(
                    BTreeMap::from([(c_i.clone(), 1), (reg.clone(), 1)]),
                    BTreeSet::from([b_i.clone()]),
                    one(next),
                )?);
                reactions.push(Reaction::new(
                    one(c_i),
                    BTreeSet::from([b_i, reg]),
                    one(jump),
                )?);
            }
            Instruction::Goto(k) => {
                let jump = state_species(*k).0;
                reactions.push(Reaction::new(one(c_i), BTreeSet::from([b_i]), one(jump))?);
            }
            Instruction::Halt => unreachable!(),
        }
    }

    let context_species = state_species(1).0;
    let input_species = registers[machine.input_register()].clone();
    let output_species = registers[machine.output_register()].clone();
    let net = net_with_appended(
        reactions,
        &[&input_species, &output_species, &context_species],
    )?;

    let mut halt_states: BTreeSet<usize> = (1..=machine.len())
        .filter(|&i| matches!(machine.instruction(i), Some(Instruction::Halt)))
        .collect();
    if machine.can_fall_off() {
        halt_states.insert(machine.len() + 1);
    }
    // A halt state nothing jumps to has no A species and can never be
    // reached; dropping it keeps serialization round trips exact.
    halt_states.retain(|&i| net.contains_species(&state_species(i).0));

    Ok(CompiledNet::assemble(
        net,
        machine.len(),
        halt_states,
        registers,
        context_species,
        input_species,
        output_species,
    ))
}

/// Species order is first appearance over the reactions, then any of the
/// pragma-recoverable species not already present, so serialized nets
/// re-parse with identical species order.
fn net_with_appended(reactions: Vec<Reaction>, extra: &[&Species]) -> Result<Icrn, NetError> {
    let mut species = Vec::new();
    let mut seen = BTreeSet::new();
    for rx in &reactions {
        for s in rx.species() {
            if seen.insert(s.clone()) {
                species.push(s.clone());
            }
        }
    }
    for &s in extra {
        if seen.insert(s.clone()) {
            species.push(s.clone());
        }
    }
    Icrn::new(species, reactions)
}

impl CompiledNet {
    fn assemble(
        net: Icrn,
        states: usize,
        halt_states: BTreeSet<usize>,
        register_species: BTreeMap<String, Species>,
        context_species: Species,
        input_species: Species,
        output_species: Species,
    ) -> Self {
        let oscillator = net
            .species()
            .iter()
            .filter_map(|s| parse_state_species(s.name()).map(|sp| (s.clone(), sp)))
            .collect();
        CompiledNet {
            net,
            states,
            halt_states,
            oscillator,
            register_species,
            context_species,
            input_species,
            output_species,
        }
    }

    pub fn net(&self) -> &Icrn {
        &self.net
    }

    /// Number of program lines compiled. For re-parsed nets this is the
    /// largest state index mentioned by any species.
    pub fn states(&self) -> usize {
        self.states
    }

    pub fn input_species(&self) -> &Species {
        &self.input_species
    }

    pub fn output_species(&self) -> &Species {
        &self.output_species
    }

    pub fn register_species(&self) -> &BTreeMap<String, Species> {
        &self.register_species
    }

    pub fn is_halt_state(&self, state: usize) -> bool {
        self.halt_states.contains(&state)
    }

    pub fn halt_states(&self) -> &BTreeSet<usize> {
        &self.halt_states
    }

    /// Oscillator species present in the net, with their state and phase.
    pub fn oscillator(&self) -> &BTreeMap<Species, (usize, Phase)> {
        &self.oscillator
    }

    /// `{1 A_1}`: the initial context.
    pub fn initial_context(&self) -> Configuration {
        let mut c = Configuration::new();
        c.set(self.context_species.clone(), BigRational::from_integer(1.into()))
            .expect("1 is nonnegative");
        c
    }

    /// `{1 A_1, n R_in}`.
    pub fn initial_configuration(&self, input: u64) -> Configuration {
        let mut c = self.initial_context();
        c.set(
            self.input_species.clone(),
            BigRational::from_integer(BigInt::from(input)),
        )
        .expect("input is nonnegative");
        c
    }

    /// Classifies `c` as a transition point: exactly one oscillator species
    /// present, at concentration exactly 1.
    pub fn transition_point(&self, c: &Configuration) -> Option<TransitionPoint> {
        let mut found = None;
        for (species, &(state, phase)) in &self.oscillator {
            if let Some(v) = c.get(species) {
                if found.is_some() || !v.is_integer() || v.to_integer() != BigInt::from(1) {
                    return None;
                }
                found = Some(TransitionPoint {
                    state,
                    phase,
                    species: species.clone(),
                });
            }
        }
        found
    }

    /// Register values in `c` when every one of them is a natural number.
    pub fn registers_as_naturals(&self, c: &Configuration) -> Option<BTreeMap<String, u64>> {
        let mut out = BTreeMap::new();
        for (name, species) in &self.register_species {
            let v = c.concentration(species);
            if !v.is_integer() {
                return None;
            }
            out.insert(name.clone(), v.to_integer().to_u64()?);
        }
        Some(out)
    }

    /// Serializes the net preceded by `#@input`, `#@output` and `#@context`
    /// pragmas, so the file is self-describing and re-loadable.
    pub fn to_text(&self) -> String {
        format!(
            "#@input {}\n#@output {}\n#@context {}\n{}",
            self.input_species,
            self.output_species,
            self.initial_context(),
            self.net
        )
    }

    /// Re-loads a serialized compiled net. The reaction net and species order
    /// round-trip exactly; register names are reconstructed from species
    /// names, so `R_in` reads back as register `in`.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut input = None;
        let mut output = None;
        let mut context = None;
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let Some(rest) = raw.trim().strip_prefix("#@") else {
                continue;
            };
            let err = |msg: String| ParseError::Line { line: lineno, message: msg };
            let (kind, arg) = rest
                .split_once(char::is_whitespace)
                .ok_or_else(|| err(format!("pragma `#@{}` needs an argument", rest)))?;
            let arg = arg.trim();
            match kind {
                "input" => {
                    input = Some(Species::new(arg).map_err(|e| err(e.to_string()))?);
                }
                "output" => {
                    output = Some(Species::new(arg).map_err(|e| err(e.to_string()))?);
                }
                "context" => {
                    context = Some(parse_configuration(arg).map_err(|e| err(e.to_string()))?);
                }
                other => return Err(err(format!("unknown pragma `#@{}`", other))),
            }
        }
        let missing = |what: &str| ParseError::Literal {
            message: format!("missing `#@{}` pragma", what),
        };
        let input = input.ok_or_else(|| missing("input"))?;
        let output = output.ok_or_else(|| missing("output"))?;
        let context = context.ok_or_else(|| missing("context"))?;
        let context_species = match context.iter().collect::<Vec<_>>().as_slice() {
            [(s, v)] if v.is_integer() && v.to_integer() == BigInt::from(1) => (*s).clone(),
            _ => {
                return Err(ParseError::Literal {
                    message: "`#@context` must name a single species at concentration 1".into(),
                })
            }
        };

        let parsed = Icrn::parse(text)?;
        let net = net_with_appended(
            parsed.reactions().to_vec(),
            &[&input, &output, &context_species],
        )
        .map_err(|e| ParseError::Literal { message: e.to_string() })?;

        let registers: BTreeMap<String, Species> = net
            .species()
            .iter()
            .filter(|s| parse_state_species(s.name()).is_none())
            .filter_map(|s| {
                s.name()
                    .strip_prefix("R_")
                    .map(|reg| (reg.to_string(), s.clone()))
            })
            .collect();
        let states = net
            .species()
            .iter()
            .filter_map(|s| parse_state_species(s.name()))
            .map(|(state, _)| state)
            .max()
            .unwrap_or(0);
        let consumed: BTreeSet<&Species> = net
            .reactions()
            .iter()
            .flat_map(|rx| rx.reactants().keys())
            .collect();
        let halt_states = (1..=states + 1)
            .filter(|&i| {
                let a = state_species(i).0;
                net.contains_species(&a) && !consumed.contains(&a)
            })
            .collect();

        Ok(CompiledNet::assemble(
            net,
            states,
            halt_states,
            registers,
            context_species,
            input,
            output,
        ))
    }
}
