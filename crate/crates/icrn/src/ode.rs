//! Mass-action numerics with Hill-style inhibition.
//!
//! A reaction proceeds at `k · Π [S]^r(S)`, and each inhibitor `I`
//! contributes a factor `1/(1 + K·[I])`: at the default `K = 1e5` any
//! noticeable inhibitor concentration effectively switches the reaction off,
//! approximating the exact model's absolute inhibition. Integration is
//! classic fixed-step fourth-order Runge-Kutta with post-step clamping at
//! zero; a fixed step keeps output byte-reproducible for fixed settings.
//! The exact executor in [`crate::exec`] is the ground truth this module is
//! compared against.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::net::{Configuration, Icrn, Reaction, Species};
use crate::parse::{parse_float_cell, ParseError};

#[derive(Debug, Error, PartialEq)]
pub enum OdeError {
    #[error("invalid settings: {0}")]
    InvalidSettings(String),
    #[error("species `{0}` is not in the net")]
    UnknownSpecies(String),
    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },
}

/// Integrator settings. Rate constants default to 1.0 per reaction; the
/// paper's model is rate-independent, so the constants only shape timing.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSettings {
    pub rate_constants: BTreeMap<usize, f64>,
    pub hill_k: f64,
    pub t_end: f64,
    pub dt: f64,
    pub sample_every: f64,
}

impl Default for OdeSettings {
    fn default() -> Self {
        OdeSettings {
            rate_constants: BTreeMap::new(),
            hill_k: 1e5,
            t_end: 2000.0,
            dt: 1e-3,
            sample_every: 1.0,
        }
    }
}

impl OdeSettings {
    pub fn rate_constant(&self, reaction: usize) -> f64 {
        self.rate_constants.get(&reaction).copied().unwrap_or(1.0)
    }

    fn validate(&self, n_reactions: usize) -> Result<(), OdeError> {
        let bad = |msg: String| Err(OdeError::InvalidSettings(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be positive and finite", self.dt));
        }
        if !(self.dt < self.sample_every && self.sample_every <= self.t_end) {
            return bad(format!(
                "need dt < sample_every <= t_end, got {} / {} / {}",
                self.dt, self.sample_every, self.t_end
            ));
        }
        if !(self.hill_k > 0.0 && self.hill_k.is_finite()) {
            return bad(format!("hill_k = {} must be positive and finite", self.hill_k));
        }
        for (&i, &k) in &self.rate_constants {
            if !(k > 0.0 && k.is_finite()) {
                return bad(format!("rate constant {} for reaction {} must be positive", k, i));
            }
            if i >= n_reactions {
                return bad(format!("rate constant for reaction {} but the net has {}", i, n_reactions));
            }
        }
        Ok(())
    }
}

/// `k · Π [S]^r(S) · Π 1/(1 + hill_k·[I])`; absent species have
/// concentration zero.
pub fn reaction_rate(
    rx: &Reaction,
    conc: &BTreeMap<Species, f64>,
    k: f64,
    hill_k: f64,
) -> f64 {
    let c = |s: &Species| conc.get(s).copied().unwrap_or(0.0);
    let mut rate = k;
    for (s, &coef) in rx.reactants() {
        rate *= c(s).powi(coef as i32);
    }
    for s in rx.inhibitors() {
        rate /= 1.0 + hill_k * c(s);
    }
    rate
}

/// `d[S]/dt` per species, in net species order: the stoichiometry matrix
/// applied to the reaction rate vector.
pub fn derivatives(net: &Icrn, conc: &BTreeMap<Species, f64>, settings: &OdeSettings) -> Vec<f64> {
    let mut out = vec![0.0; net.species().len()];
    for (i, rx) in net.reactions().iter().enumerate() {
        let rate = reaction_rate(rx, conc, settings.rate_constant(i), settings.hill_k);
        for (s, &coef) in rx.reactants() {
            out[net.species_index(s).expect("net species")] -= rate * f64::from(coef);
        }
        for (s, &coef) in rx.products() {
            out[net.species_index(s).expect("net species")] += rate * f64::from(coef);
        }
    }
    out
}

/// Index-based view of the net used in the integration hot loop.
struct DenseReaction {
    k: f64,
    reactants: Vec<(usize, i32)>,
    inhibitors: Vec<usize>,
    delta: Vec<(usize, f64)>,
}

fn densify(net: &Icrn, settings: &OdeSettings) -> Vec<DenseReaction> {
    net.reactions()
        .iter()
        .enumerate()
        .map(|(i, rx)| {
            let idx = |s: &Species| net.species_index(s).expect("net species");
            let mut delta: BTreeMap<usize, f64> = BTreeMap::new();
            for (s, &coef) in rx.reactants() {
                *delta.entry(idx(s)).or_insert(0.0) -= f64::from(coef);
            }
            for (s, &coef) in rx.products() {
                *delta.entry(idx(s)).or_insert(0.0) += f64::from(coef);
            }
            DenseReaction {
                k: settings.rate_constant(i),
                reactants: rx.reactants().iter().map(|(s, &c)| (idx(s), c as i32)).collect(),
                inhibitors: rx.inhibitors().iter().map(idx).collect(),
                delta: delta.into_iter().filter(|(_, d)| *d != 0.0).collect(),
            }
        })
        .collect()
}

fn derivatives_dense(reactions: &[DenseReaction], hill_k: f64, y: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for rx in reactions {
        let mut rate = rx.k;
        for &(i, coef) in &rx.reactants {
            rate *= y[i].powi(coef);
        }
        for &i in &rx.inhibitors {
            rate /= 1.0 + hill_k * y[i];
        }
        for &(i, d) in &rx.delta {
            out[i] += rate * d;
        }
    }
}

/// Time-stamped concentration samples, species in net order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTrajectory {
    species: Vec<Species>,
    times: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl SampledTrajectory {
    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The sampled series of one species; `None` when it is not a column.
    pub fn series(&self, species: &Species) -> Option<Vec<f64>> {
        let col = self.species.iter().position(|s| s == species)?;
        Some(self.rows.iter().map(|r| r[col]).collect())
    }

    pub fn final_sample(&self) -> Option<(f64, &[f64])> {
        Some((*self.times.last()?, self.rows.last()?.as_slice()))
    }

    pub fn value_at(&self, row: usize, species: &Species) -> Option<f64> {
        let col = self.species.iter().position(|s| s == species)?;
        self.rows.get(row).map(|r| r[col])
    }

    /// CSV with header `t,<species...>`; every float carries 9 significant
    /// digits, so output is byte-stable for fixed settings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for s in &self.species {
            out.push(',');
            out.push_str(s.name());
        }
        out.push('\n');
        for (t, row) in self.times.iter().zip(&self.rows) {
            out.push_str(&format!("{:.8e}", t));
            for v in row {
                out.push_str(&format!(",{:.8e}", v));
            }
            out.push('\n');
        }
        out
    }

    /// Reads trajectory CSV: either integrator output (`t,...`) or an
    /// executor transition log (`segment,fired_reaction,flux,...`, with the
    /// segment index as the time axis and `p/q` cells accepted).
    pub fn from_csv(text: &str) -> Result<Self, ParseError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| ParseError::Literal { message: "empty trajectory file".into() })?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let meta = if cols.first() == Some(&"t") {
            1
        } else if cols.starts_with(&["segment", "fired_reaction", "flux"]) {
            3
        } else {
            return Err(ParseError::Literal {
                message: "expected a `t,...` or `segment,fired_reaction,flux,...` header".into(),
            });
        };
        let species = cols[meta..]
            .iter()
            .map(|name| Species::new(*name))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ParseError::Literal { message: e.to_string() })?;
        let mut times = Vec::new();
        let mut rows = Vec::new();
        for (lineno, line) in lines {
            let lineno = lineno + 1;
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != cols.len() {
                return Err(ParseError::Line {
                    line: lineno,
                    message: format!("expected {} cells, got {}", cols.len(), cells.len()),
                });
            }
            let at = |e: ParseError| ParseError::Line { line: lineno, message: e.to_string() };
            times.push(parse_float_cell(cells[0]).map_err(at)?);
            rows.push(
                cells[meta..]
                    .iter()
                    .map(|c| parse_float_cell(c).map_err(|e| ParseError::Line {
                        line: lineno,
                        message: e.to_string(),
                    }))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ParseError::Literal { message: "time column must be increasing".into() });
        }
        Ok(SampledTrajectory { species, times, rows })
    }
}

/// Integrates the mass-action model from `c0` with fixed-step RK4, clamping
/// negative concentrations to zero after each step. Samples are recorded
/// every `sample_every` time units, plus the final state.
pub fn integrate(
    net: &Icrn,
    c0: &Configuration,
    settings: &OdeSettings,
) -> Result<SampledTrajectory, OdeError> {
    settings.validate(net.reactions().len())?;
    for (s, _) in c0.iter() {
        if !net.contains_species(s) {
            return Err(OdeError::UnknownSpecies(s.name().to_string()));
        }
    }
    let n = net.species().len();
    let mut y: Vec<f64> = net
        .species()
        .iter()
        .map(|s| c0.concentration(s).to_f64().unwrap_or(f64::NAN))
        .collect();
    if !y.iter().all(|v| v.is_finite()) {
        return Err(OdeError::NonFiniteState { t: 0.0 });
    }

    let reactions = densify(net, settings);
    let hill_k = settings.hill_k;
    let dt = settings.dt;
    let n_steps = (settings.t_end / dt).round().max(1.0) as u64;
    let stride = (settings.sample_every / dt).round().max(1.0) as u64;

    let mut times = vec![0.0];
    let mut rows = vec![y.clone()];
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];

    for step in 1..=n_steps {
        derivatives_dense(&reactions, hill_k, &y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * dt * k1[i];
        }
        derivatives_dense(&reactions, hill_k, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * dt * k2[i];
        }
        derivatives_dense(&reactions, hill_k, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + dt * k3[i];
        }
        derivatives_dense(&reactions, hill_k, &tmp, &mut k4);
        for i in 0..n {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if y[i] < 0.0 {
                y[i] = 0.0;
            }
        }
        let t = step as f64 * dt;
        if !y.iter().all(|v| v.is_finite()) {
            return Err(OdeError::NonFiniteState { t });
        }
        if step % stride == 0 || step == n_steps {
            times.push(t);
            rows.push(y.clone());
        }
    }

    Ok(SampledTrajectory {
        species: net.species().to_vec(),
        times,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::compile;
    use crate::exec::build_ring_oscillator;
    use crate::regmachine::RegisterMachine;
    use std::collections::BTreeSet;

    fn sp(name: &str) -> Species {
        Species::new(name).unwrap()
    }

    fn rx(text: &str) -> Reaction {
        let net: Icrn = text.parse().unwrap();
        net.reactions()[0].clone()
    }

    #[test]
    fn uninhibited_rate_is_plain_mass_action() {
        let rate = reaction_rate(
            &rx("A -[C]-> B"),
            &BTreeMap::from([(sp("A"), 1.0), (sp("C"), 0.0)]),
            1.0,
            1e5,
        );
        assert_eq!(rate, 1.0);
    }

    #[test]
    fn hill_factor_halves_the_rate_at_one_over_k() {
        let rate = reaction_rate(
            &rx("A -[C]-> B"),
            &BTreeMap::from([(sp("A"), 1.0), (sp("C"), 1e-5)]),
            1.0,
            1e5,
        );
        assert!((rate - 0.5).abs() < 1e-12, "rate = {}", rate);
    }

    #[test]
    fn stoichiometric_powers_multiply() {
        let rate = reaction_rate(
            &rx("A + 2 B -> X"),
            &BTreeMap::from([(sp("A"), 2.0), (sp("B"), 3.0)]),
            1.0,
            1e5,
        );
        assert_eq!(rate, 18.0);
    }

    #[test]
    fn oscillator_derivatives_at_pure_a() {
        let net: Icrn = "A -[C]-> B\nB -[A]-> C\nC -[B]-> A\n".parse().unwrap();
        let d = derivatives(&net, &BTreeMap::from([(sp("A"), 1.0)]), &OdeSettings::default());
        let at = |name: &str| d[net.species_index(&sp(name)).unwrap()];
        assert_eq!(at("A"), -1.0);
        assert_eq!(at("B"), 1.0);
        assert_eq!(at("C"), 0.0);
    }

    #[test]
    fn all_zero_state_is_a_fixed_point() {
        let net: Icrn = "A -[C]-> B\nB -[A]-> C\nC -[B]-> A\n".parse().unwrap();
        let d = derivatives(&net, &BTreeMap::new(), &OdeSettings::default());
        assert_eq!(d, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn decrement_state_consumes_the_register_at_mass_action_rate() {
        let machine = RegisterMachine::parse("dec r_in,5\ninc r_out\ninc r_out\ngoto 1\nhalt\n").unwrap();
        let cn = compile(&machine).unwrap();
        let conc = BTreeMap::from([(sp("C_1"), 1.0), (sp("R_in"), 3.0)]);
        let d = derivatives(cn.net(), &conc, &OdeSettings::default());
        let at = |name: &str| d[cn.net().species_index(&sp(name)).unwrap()];
        assert_eq!(at("R_in"), -3.0);
        assert_eq!(at("A_2"), 3.0);
    }

    #[test]
    fn all_zero_initial_state_stays_constant() {
        let net: Icrn = "A -[C]-> B\nB -[A]-> C\nC -[B]-> A\n".parse().unwrap();
        let settings = OdeSettings {
            t_end: 5.0,
            dt: 0.01,
            sample_every: 1.0,
            ..OdeSettings::default()
        };
        let traj = integrate(&net, &Configuration::new(), &settings).unwrap();
        for row in traj.rows() {
            assert!(row.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn exponential_growth_blows_up_to_non_finite() {
        let net: Icrn = "X -> 2 X\n".parse().unwrap();
        let settings = OdeSettings {
            t_end: 2000.0,
            dt: 0.5,
            sample_every: 1.0,
            ..OdeSettings::default()
        };
        let err = integrate(&net, &"X=1".parse().unwrap(), &settings).unwrap_err();
        assert!(matches!(err, OdeError::NonFiniteState { t } if t > 0.0));
    }

    #[test]
    fn samples_stay_nonnegative_and_conserve_the_oscillator_sum() {
        let machine = RegisterMachine::parse("dec r_in,5\ninc r_out\ninc r_out\ngoto 1\nhalt\n").unwrap();
        let cn = compile(&machine).unwrap();
        let settings = OdeSettings {
            t_end: 50.0,
            dt: 1e-3,
            ..OdeSettings::default()
        };
        let traj = integrate(cn.net(), &cn.initial_configuration(3), &settings).unwrap();
        let osc: BTreeSet<usize> = cn
            .oscillator()
            .keys()
            .map(|s| cn.net().species_index(s).unwrap())
            .collect();
        for row in traj.rows() {
            assert!(row.iter().all(|&v| v >= 0.0));
            let sum: f64 = osc.iter().map(|&i| row[i]).sum();
            assert!((sum - 1.0).abs() <= 1e-4, "oscillator sum {}", sum);
        }
    }

    #[test]
    fn rejects_inconsistent_settings() {
        let net: Icrn = "A -> B\n".parse().unwrap();
        let settings = OdeSettings {
            dt: 2.0,
            sample_every: 1.0,
            t_end: 10.0,
            ..OdeSettings::default()
        };
        assert!(matches!(
            integrate(&net, &"A=1".parse().unwrap(), &settings),
            Err(OdeError::InvalidSettings(_))
        ));
    }

    #[test]
    fn csv_round_trips() {
        let ring = build_ring_oscillator(3).unwrap();
        let settings = OdeSettings {
            t_end: 10.0,
            dt: 0.01,
            sample_every: 2.0,
            ..OdeSettings::default()
        };
        let traj = integrate(&ring, &"X_0=1".parse().unwrap(), &settings).unwrap();
        let parsed = SampledTrajectory::from_csv(&traj.to_csv()).unwrap();
        assert_eq!(parsed.species(), traj.species());
        assert_eq!(parsed.len(), traj.len());
        for (a, b) in parsed.rows().iter().flatten().zip(traj.rows().iter().flatten()) {
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0));
        }
    }

    #[test]
    fn reads_transition_logs_as_float_trajectories() {
        let text = "segment,fired_reaction,flux,A,B\n0,,,1,0\n1,0,1/2,1/2,1/2\n";
        let traj = SampledTrajectory::from_csv(text).unwrap();
        assert_eq!(traj.species(), &[sp("A"), sp("B")]);
        assert_eq!(traj.times(), &[0.0, 1.0]);
        assert_eq!(traj.rows()[1], vec![0.5, 0.5]);
    }
}
