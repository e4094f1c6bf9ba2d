//! Rate-independent execution by maximal straight-line segments.
//!
//! When exactly one reaction is applicable, running it at any positive rate
//! leaves the applicable set unchanged until some reactant hits zero, so the
//! canonical move is one segment at the maximal feasible flux. Consecutive
//! segments therefore always fire different reactions, and on compiled nets
//! every segment endpoint is a transition point of the state oscillator.
//! Nets where several reactions are applicable at once are reported rather
//! than silently tie-broken; an explicit lowest-index policy is available
//! for exploration.

pub mod waves;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::compile::CompiledNet;
use crate::net::{fmt_rational, Configuration, FluxVector, Icrn, NetError, Reaction, Species};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExecError {
    #[error("no reaction is applicable: the configuration is static")]
    NoApplicable,
    #[error("reactions {applicable:?} are all applicable; the net is nondeterministic here")]
    Nondeterministic { applicable: Vec<usize> },
    #[error("a ring oscillator needs at least 3 species, got {n}")]
    RingTooSmall { n: usize },
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// One maximal segment: the configuration it reaches, the reaction fired,
/// and the flux spent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub next: Configuration,
    pub reaction: usize,
    pub flux: BigRational,
}

fn maximal_flux(rx: &Reaction, c: &Configuration) -> BigRational {
    rx.reactants()
        .iter()
        .map(|(s, &coef)| c.concentration(s) / BigInt::from(coef))
        .min()
        .expect("reactions have at least one reactant")
}

fn fire(net: &Icrn, c: &Configuration, index: usize) -> Transition {
    let rx = &net.reactions()[index];
    let flux = maximal_flux(rx, c);
    let u = FluxVector::single(index, flux.clone()).expect("maximal flux is nonnegative");
    let next = net
        .apply_segment(c, &u)
        .expect("maximal flux keeps the segment inside the nonnegative orthant");
    Transition {
        next,
        reaction: index,
        flux,
    }
}

/// Runs the unique applicable reaction to its maximal flux (the least
/// `c(S)/r(S)` over its reactants), reaching the next transition point.
pub fn next_transition(net: &Icrn, c: &Configuration) -> Result<Transition, ExecError> {
    let applicable = net.applicable(c);
    match applicable.as_slice() {
        [] => Err(ExecError::NoApplicable),
        [index] => Ok(fire(net, c, *index)),
        _ => Err(ExecError::Nondeterministic { applicable }),
    }
}

/// A path through configuration space: segment endpoints plus the reaction
/// and flux fired along each segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    points: Vec<Configuration>,
    fired: Vec<(usize, BigRational)>,
}

impl Trajectory {
    pub fn new(
        points: Vec<Configuration>,
        fired: Vec<(usize, BigRational)>,
    ) -> Result<Self, ExecError> {
        if points.len() != fired.len() + 1 {
            return Err(ExecError::InvalidTrajectory(format!(
                "{} points need {} fired segments, got {}",
                points.len(),
                points.len().saturating_sub(1),
                fired.len()
            )));
        }
        Ok(Trajectory { points, fired })
    }

    pub fn points(&self) -> &[Configuration] {
        &self.points
    }

    pub fn fired(&self) -> &[(usize, BigRational)] {
        &self.fired
    }

    pub fn segments(&self) -> usize {
        self.fired.len()
    }

    pub fn initial(&self) -> &Configuration {
        self.points.first().expect("trajectories are nonempty")
    }

    pub fn final_configuration(&self) -> &Configuration {
        self.points.last().expect("trajectories are nonempty")
    }

    /// Concentrations of one species at every trajectory point.
    pub fn series(&self, species: &Species) -> Vec<BigRational> {
        self.points
            .iter()
            .map(|p| p.concentration(species))
            .collect()
    }

    /// Checks the trajectory against a net: each consecutive pair of points
    /// must be one recorded segment apart, and consecutive segments must fire
    /// different reactions (parallel segments would concatenate).
    pub fn validate_against(&self, net: &Icrn) -> Result<(), ExecError> {
        for (i, (index, flux)) in self.fired.iter().enumerate() {
            let u = FluxVector::single(*index, flux.clone())?;
            let next = net.apply_segment(&self.points[i], &u)?;
            if next != self.points[i + 1] {
                return Err(ExecError::InvalidTrajectory(format!(
                    "segment {} does not connect its endpoints",
                    i
                )));
            }
            if i > 0 && self.fired[i - 1].0 == *index {
                return Err(ExecError::InvalidTrajectory(format!(
                    "segments {} and {} fire the same reaction",
                    i - 1,
                    i
                )));
            }
        }
        Ok(())
    }

    /// Transition log CSV: `segment,fired_reaction,flux,<species...>` with
    /// one row per trajectory point. Rationals print as `p/q` when
    /// non-integral.
    pub fn to_transition_log(&self, net: &Icrn) -> String {
        let mut out = String::from("segment,fired_reaction,flux");
        for s in net.species() {
            out.push(',');
            out.push_str(s.name());
        }
        out.push('\n');
        for (i, point) in self.points.iter().enumerate() {
            match i.checked_sub(1).map(|j| &self.fired[j]) {
                Some((rx, flux)) => {
                    out.push_str(&format!("{},{},{}", i, rx, fmt_rational(flux)));
                }
                None => out.push_str("0,,"),
            }
            for s in net.species() {
                out.push(',');
                out.push_str(&fmt_rational(&point.concentration(s)));
            }
            out.push('\n');
        }
        out
    }
}

/// How to treat configurations with more than one applicable reaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Stop and report the applicable set (the default; ties on a compiled
    /// net mean a compiler bug).
    Report,
    /// Fire the lowest-index applicable reaction. Exploratory use only.
    LowestIndex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExecOutcome {
    /// No reaction applicable at the final configuration.
    Static(Configuration),
    /// The segment budget ran out first.
    FuelExhausted,
    /// Several reactions were applicable and the policy was [`TieBreak::Report`].
    Nondeterministic {
        at: Configuration,
        applicable: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecResult {
    pub outcome: ExecOutcome,
    pub trajectory: Trajectory,
}

pub fn run_to_static(net: &Icrn, c0: &Configuration, max_segments: usize) -> ExecResult {
    run_to_static_with(net, c0, max_segments, TieBreak::Report)
}

/// Repeatedly applies [`next_transition`] until the configuration is static,
/// the segment budget is exhausted, or a nondeterministic choice is hit.
pub fn run_to_static_with(
    net: &Icrn,
    c0: &Configuration,
    max_segments: usize,
    tie: TieBreak,
) -> ExecResult {
    let mut points = vec![c0.clone()];
    let mut fired = Vec::new();
    let mut current = c0.clone();
    loop {
        let applicable = net.applicable(&current);
        let outcome = match (applicable.len(), tie) {
            (0, _) => Some(ExecOutcome::Static(current.clone())),
            _ if fired.len() == max_segments => Some(ExecOutcome::FuelExhausted),
            (1, _) | (_, TieBreak::LowestIndex) => None,
            (_, TieBreak::Report) => Some(ExecOutcome::Nondeterministic {
                at: current.clone(),
                applicable: applicable.clone(),
            }),
        };
        if let Some(outcome) = outcome {
            return ExecResult {
                outcome,
                trajectory: Trajectory { points, fired },
            };
        }
        let t = fire(net, &current, applicable[0]);
        points.push(t.next.clone());
        fired.push((t.reaction, t.flux));
        current = t.next;
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimulateError {
    #[error("nondeterministic configuration reached: reactions {applicable:?} all applicable")]
    Nondeterministic { applicable: Vec<usize> },
    #[error("output species `{species}` settled at non-natural value {value}")]
    NonIntegerOutput { species: String, value: String },
    #[error("output value {0} does not fit in a u64")]
    OutputTooLarge(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionOutcome {
    /// The net went static; the output species held this natural number.
    Output { value: u64, segments: usize },
    FuelExhausted,
}

/// Runs a compiled net from `{1 A_1, n R_in}` to a static configuration and
/// reads the output register species. A non-natural output or a
/// nondeterministic configuration signals a bug in the executor or compiler
/// and is reported as an error, not a value.
pub fn simulate_function(
    cn: &CompiledNet,
    input: u64,
    max_segments: usize,
) -> Result<FunctionOutcome, SimulateError> {
    let c0 = cn.initial_configuration(input);
    let result = run_to_static(cn.net(), &c0, max_segments);
    match result.outcome {
        ExecOutcome::FuelExhausted => Ok(FunctionOutcome::FuelExhausted),
        ExecOutcome::Nondeterministic { applicable, .. } => {
            Err(SimulateError::Nondeterministic { applicable })
        }
        ExecOutcome::Static(final_config) => {
            let v = final_config.concentration(cn.output_species());
            if !v.is_integer() {
                return Err(SimulateError::NonIntegerOutput {
                    species: cn.output_species().name().to_string(),
                    value: fmt_rational(&v),
                });
            }
            let value = v
                .to_integer()
                .to_u64()
                .ok_or_else(|| SimulateError::OutputTooLarge(fmt_rational(&v)))?;
            Ok(FunctionOutcome::Output {
                value,
                segments: result.trajectory.segments(),
            })
        }
    }
}

/// The ring oscillator: species `X_0..X_{n-1}` with reactions
/// `X_i -[X_{i-1}]-> X_{i+1}`, indices mod `n`. Needs `n >= 3`; with fewer
/// species each reaction would inhibit or feed itself and the ring
/// degenerates.
pub fn build_ring_oscillator(n: usize) -> Result<Icrn, ExecError> {
    if n < 3 {
        return Err(ExecError::RingTooSmall { n });
    }
    let species: Vec<Species> = (0..n)
        .map(|i| Species::new(format!("X_{}", i)).expect("ring species names are identifiers"))
        .collect();
    let reactions = (0..n)
        .map(|i| {
            Reaction::new(
                std::collections::BTreeMap::from([(species[i].clone(), 1)]),
                std::collections::BTreeSet::from([species[(i + n - 1) % n].clone()]),
                std::collections::BTreeMap::from([(species[(i + 1) % n].clone(), 1)]),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Icrn::new(species, reactions)?)
}

/// The species of a ring oscillator the paper's lemma oscillates on: odd
/// indices, in order.
pub fn ring_odd_species(n: usize) -> Vec<Species> {
    (0..n)
        .filter(|i| i % 2 == 1)
        .map(|i| Species::new(format!("X_{}", i)).expect("ring species names are identifiers"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::compile;
    use crate::regmachine::{RegisterMachine, RmLoc, RmOutcome};
    use num_traits::{One, Zero};

    const MUL2: &str = "dec r_in,5\ninc r_out\ninc r_out\ngoto 1\nhalt\n";

    fn mul2_net() -> CompiledNet {
        compile(&RegisterMachine::parse(MUL2).unwrap()).unwrap()
    }

    fn conf(text: &str) -> Configuration {
        text.parse().unwrap()
    }

    #[test]
    fn next_transition_from_the_initial_configuration() {
        let cn = mul2_net();
        let t = next_transition(cn.net(), &conf("A_1=1,R_in=3")).unwrap();
        assert_eq!(t.next, conf("B_1=1,R_in=3"));
        assert!(t.flux.is_one());
        assert_eq!(
            cn.net().reactions()[t.reaction].to_string(),
            "A_1 -[C_4]-> B_1"
        );
    }

    #[test]
    fn decrement_consumes_one_unit_of_the_register() {
        let cn = mul2_net();
        let t = next_transition(cn.net(), &conf("C_1=1,R_in=3")).unwrap();
        assert_eq!(t.next, conf("A_2=1,R_in=2"));
        assert!(t.flux.is_one());
    }

    #[test]
    fn absent_register_takes_the_zero_branch() {
        let cn = mul2_net();
        let t = next_transition(cn.net(), &conf("C_1=1")).unwrap();
        assert_eq!(t.next, conf("A_5=1"));
    }

    #[test]
    fn static_and_nondeterministic_configurations_are_reported() {
        let cn = mul2_net();
        assert_eq!(
            next_transition(cn.net(), &conf("A_5=1,R_out=6")),
            Err(ExecError::NoApplicable)
        );
        let forked: Icrn = "A -> B\nA -> C\n".parse().unwrap();
        assert_eq!(
            next_transition(&forked, &conf("A=1")),
            Err(ExecError::Nondeterministic {
                applicable: vec![0, 1]
            })
        );
    }

    #[test]
    fn runs_mul2_of_three_in_thirty_nine_segments() {
        let cn = mul2_net();
        let res = run_to_static(cn.net(), &conf("A_1=1,R_in=3"), 1000);
        assert_eq!(res.trajectory.segments(), 39);
        match res.outcome {
            ExecOutcome::Static(c) => assert_eq!(c, conf("A_5=1,R_out=6")),
            other => panic!("unexpected {:?}", other),
        }
        res.trajectory.validate_against(cn.net()).unwrap();
    }

    #[test]
    fn zero_input_still_walks_one_oscillation() {
        let cn = mul2_net();
        let res = run_to_static(cn.net(), &conf("A_1=1"), 1000);
        assert_eq!(res.trajectory.segments(), 3);
        assert!(matches!(res.outcome, ExecOutcome::Static(c) if c == conf("A_5=1")));
    }

    #[test]
    fn ring_oscillator_never_goes_static() {
        let ring = build_ring_oscillator(3).unwrap();
        let res = run_to_static(&ring, &conf("X_0=1"), 10);
        assert_eq!(res.outcome, ExecOutcome::FuelExhausted);
        assert_eq!(res.trajectory.segments(), 10);
    }

    #[test]
    fn lowest_index_policy_resolves_ties() {
        let forked: Icrn = "A -> B\nA -> C\n".parse().unwrap();
        let reported = run_to_static(&forked, &conf("A=1"), 10);
        assert!(matches!(
            reported.outcome,
            ExecOutcome::Nondeterministic { ref applicable, .. } if applicable == &vec![0, 1]
        ));
        let forced = run_to_static_with(&forked, &conf("A=1"), 10, TieBreak::LowestIndex);
        assert!(matches!(forced.outcome, ExecOutcome::Static(c) if c == conf("B=1")));
    }

    #[test]
    fn simulate_function_matches_the_interpreter() {
        let machine = RegisterMachine::parse(MUL2).unwrap();
        let cn = compile(&machine).unwrap();
        assert_eq!(
            simulate_function(&cn, 3, 10_000).unwrap(),
            FunctionOutcome::Output { value: 6, segments: 39 }
        );
        assert!(matches!(
            simulate_function(&cn, 0, 10_000).unwrap(),
            FunctionOutcome::Output { value: 0, .. }
        ));
        // The interpreter is the oracle for an input the table never shows.
        let expected = match machine.run(7, 100_000) {
            RmOutcome::Halted { registers, .. } => registers["r_out"],
            other => panic!("unexpected {:?}", other),
        };
        assert_eq!(expected, 14);
        assert!(matches!(
            simulate_function(&cn, 7, 10_000).unwrap(),
            FunctionOutcome::Output { value, .. } if value == expected
        ));
    }

    #[test]
    fn simulate_function_reports_fuel() {
        let cn = mul2_net();
        assert_eq!(
            simulate_function(&cn, 3, 5).unwrap(),
            FunctionOutcome::FuelExhausted
        );
    }

    #[test]
    fn ring_oscillator_shapes() {
        let ring = build_ring_oscillator(3).unwrap();
        assert_eq!(ring.to_string(), "X_0 -[X_2]-> X_1\nX_1 -[X_0]-> X_2\nX_2 -[X_1]-> X_0\n");
        let ring5 = build_ring_oscillator(5).unwrap();
        assert_eq!(ring5.reactions().len(), 5);
        assert_eq!(build_ring_oscillator(2), Err(ExecError::RingTooSmall { n: 2 }));
    }

    #[test]
    fn compiled_runs_have_normal_form_segments() {
        let cn = mul2_net();
        let res = run_to_static(cn.net(), &cn.initial_configuration(4), 10_000);
        let fired = res.trajectory.fired();
        for pair in fired.windows(2) {
            assert_ne!(pair[0].0, pair[1].0, "consecutive segments fired the same reaction");
        }
        for (_, flux) in fired {
            assert!(flux.is_one(), "compiled nets always run unit segments");
        }
    }

    #[test]
    fn oscillator_sum_is_one_at_every_point() {
        let cn = mul2_net();
        let res = run_to_static(cn.net(), &cn.initial_configuration(5), 10_000);
        for point in res.trajectory.points() {
            let sum = cn
                .oscillator()
                .keys()
                .fold(BigRational::zero(), |acc, s| acc + point.concentration(s));
            assert!(sum.is_one());
        }
    }

    #[test]
    fn projected_trace_equals_the_interpreter_trace() {
        let machine = RegisterMachine::parse(MUL2).unwrap();
        let cn = compile(&machine).unwrap();
        let res = run_to_static(cn.net(), &cn.initial_configuration(3), 10_000);
        let mut projected = Vec::new();
        for point in res.trajectory.points() {
            let tp = cn.transition_point(point).expect("every endpoint is a transition point");
            if tp.phase == crate::compile::Phase::A {
                projected.push((tp.state, cn.registers_as_naturals(point).unwrap()));
            }
        }
        let (outcome, trace) = machine.run_traced(3, 10_000);
        assert!(matches!(outcome, RmOutcome::Halted { .. }));
        let expected: Vec<_> = trace
            .into_iter()
            .map(|s| {
                let line = match s.line {
                    RmLoc::Line(l) => l,
                    RmLoc::Halted => unreachable!(),
                };
                (line, s.registers)
            })
            .collect();
        assert_eq!(projected, expected);
    }

    #[test]
    fn ring_trajectories_extend_to_whole_periods() {
        use super::waves::count_periods;
        for n in [3usize, 5] {
            let ring = build_ring_oscillator(n).unwrap();
            let start = conf("X_0=1");
            for extra in [1usize, 2, n - 1, n + 2] {
                // Run some segments, then extend until {1 X_0} recurs.
                let mut segments = n * 2 + extra;
                loop {
                    let res = run_to_static(&ring, &start, segments);
                    if res.trajectory.final_configuration() == &start {
                        let cycles = segments / n;
                        assert_eq!(segments % n, 0);
                        assert!(cycles >= 1);
                        assert_eq!(
                            count_periods(&res.trajectory, &ring_odd_species(n)),
                            cycles
                        );
                        break;
                    }
                    segments += 1;
                }
            }
        }
    }

    #[test]
    fn transition_log_format() {
        let ring = build_ring_oscillator(3).unwrap();
        let res = run_to_static(&ring, &conf("X_0=1"), 2);
        let log = res.trajectory.to_transition_log(&ring);
        let lines: Vec<&str> = log.lines().collect();
        assert_eq!(lines[0], "segment,fired_reaction,flux,X_0,X_1,X_2");
        assert_eq!(lines[1], "0,,,1,0,0");
        assert_eq!(lines[2], "1,0,1,0,1,0");
        assert_eq!(lines[3], "2,1,1,0,0,1");
    }

    #[test]
    fn fractional_values_log_as_rationals() {
        let net: Icrn = "A -> B\n".parse().unwrap();
        let half = Trajectory::new(
            vec![conf("A=1"), conf("A=1/2,B=1/2")],
            vec![(0, BigRational::new(1.into(), 2.into()))],
        )
        .unwrap();
        let log = half.to_transition_log(&net);
        assert!(log.contains("1,0,1/2,1/2,1/2"));
    }
}
