//! Core iCRN types: species, reactions with inhibitors, configurations, flux
//! vectors, and the stoichiometry matrix.
//!
//! Concentrations are exact arbitrary-precision rationals. Applicability and
//! inhibition hinge on exact zero tests, so this module never touches floating
//! point; the approximate semantics lives in [`crate::ode`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::parse::ParseError;

/// Stoichiometric coefficients are capped as a sanity bound; concentrations
/// themselves are unbounded rationals.
pub const MAX_COEFFICIENT: u32 = i32::MAX as u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetError {
    #[error("invalid species name `{0}`: expected a letter or `_` followed by letters, digits or `_`")]
    InvalidSpeciesName(String),
    #[error("duplicate species `{0}`")]
    DuplicateSpecies(String),
    #[error("reaction {index} mentions species `{species}` not in the net")]
    UnknownSpecies { index: usize, species: String },
    #[error("reaction has no net effect: reactant and product vectors are equal")]
    ZeroNetEffect,
    #[error("reaction needs at least one reactant")]
    EmptyReactants,
    #[error("reaction needs at least one product")]
    EmptyProducts,
    #[error("stoichiometric coefficient {0} outside 1..={MAX_COEFFICIENT}")]
    CoefficientOutOfRange(u64),
    #[error("negative concentration {value} for species `{species}`")]
    NegativeConcentration { species: String, value: String },
    #[error("negative flux {value} on reaction {index}")]
    NegativeFlux { index: usize, value: String },
    #[error("flux vector names reaction {0} but the net has {1} reactions")]
    NoSuchReaction(usize, usize),
    #[error("positive flux on reaction {0}, which is not applicable here")]
    InapplicableFlux(usize),
    #[error("segment drives species `{0}` below zero")]
    NegativeResult(String),
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Renders a rational as `p/q`, or a bare integer when the denominator is 1.
pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A species name: ASCII letters, digits and underscores, not starting with a
/// digit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Species(String);

impl Species {
    pub fn new(name: impl Into<String>) -> Result<Self, NetError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(Species(name))
        } else {
            Err(NetError::InvalidSpeciesName(name))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Species {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, NetError> {
        Species::new(s)
    }
}

/// A reaction `(r, Δ, p)`: reactant stoichiometry, inhibitor set, product
/// stoichiometry.
///
/// Both sides are nonempty and the net effect is nonzero (`r ≠ p`). The text
/// grammar cannot express an empty side, and rejecting empty reactant vectors
/// at the type level keeps every applicable reaction's maximal flux finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reaction {
    reactants: BTreeMap<Species, u32>,
    inhibitors: BTreeSet<Species>,
    products: BTreeMap<Species, u32>,
}

fn check_side(side: &BTreeMap<Species, u32>) -> Result<(), NetError> {
    for &coef in side.values() {
        if coef == 0 || coef > MAX_COEFFICIENT {
            return Err(NetError::CoefficientOutOfRange(u64::from(coef)));
        }
    }
    Ok(())
}

impl Reaction {
    pub fn new(
        reactants: BTreeMap<Species, u32>,
        inhibitors: BTreeSet<Species>,
        products: BTreeMap<Species, u32>,
    ) -> Result<Self, NetError> {
        if reactants.is_empty() {
            return Err(NetError::EmptyReactants);
        }
        if products.is_empty() {
            return Err(NetError::EmptyProducts);
        }
        check_side(&reactants)?;
        check_side(&products)?;
        if reactants == products {
            return Err(NetError::ZeroNetEffect);
        }
        Ok(Reaction {
            reactants,
            inhibitors,
            products,
        })
    }

    pub fn reactants(&self) -> &BTreeMap<Species, u32> {
        &self.reactants
    }

    pub fn inhibitors(&self) -> &BTreeSet<Species> {
        &self.inhibitors
    }

    pub fn products(&self) -> &BTreeMap<Species, u32> {
        &self.products
    }

    /// Net amount of `s` produced per unit flux: `p(s) - r(s)`.
    pub fn net_change(&self, s: &Species) -> i64 {
        let p = self.products.get(s).copied().unwrap_or(0) as i64;
        let r = self.reactants.get(s).copied().unwrap_or(0) as i64;
        p - r
    }

    /// Every species mentioned by the reaction, reactants first.
    pub fn species(&self) -> impl Iterator<Item = &Species> {
        self.reactants
            .keys()
            .chain(self.inhibitors.iter())
            .chain(self.products.keys())
    }

    /// True iff every reactant is present and no inhibitor is present in `c`.
    pub fn is_applicable_in(&self, c: &Configuration) -> bool {
        self.reactants.keys().all(|s| c.is_present(s))
            && !self.inhibitors.iter().any(|s| c.is_present(s))
    }
}

fn write_side(f: &mut fmt::Formatter<'_>, side: &BTreeMap<Species, u32>) -> fmt::Result {
    for (i, (s, &coef)) in side.iter().enumerate() {
        if i > 0 {
            f.write_str(" + ")?;
        }
        if coef != 1 {
            write!(f, "{} ", coef)?;
        }
        write!(f, "{}", s)?;
    }
    Ok(())
}

impl fmt::Display for Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_side(f, &self.reactants)?;
        if self.inhibitors.is_empty() {
            f.write_str(" -> ")?;
        } else {
            f.write_str(" -[")?;
            for (i, s) in self.inhibitors.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", s)?;
            }
            f.write_str("]-> ")?;
        }
        write_side(f, &self.products)
    }
}

/// An iCRN: an ordered species list and an ordered reaction list.
///
/// Both orders are stable; they fix the rows and columns of the stoichiometry
/// matrix and break ties deterministically everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Icrn {
    species: Vec<Species>,
    reactions: Vec<Reaction>,
    index: BTreeMap<Species, usize>,
}

impl Icrn {
    pub fn new(species: Vec<Species>, reactions: Vec<Reaction>) -> Result<Self, NetError> {
        let mut index = BTreeMap::new();
        for (i, s) in species.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(NetError::DuplicateSpecies(s.name().to_string()));
            }
        }
        for (i, rx) in reactions.iter().enumerate() {
            for s in rx.species() {
                if !index.contains_key(s) {
                    return Err(NetError::UnknownSpecies {
                        index: i,
                        species: s.name().to_string(),
                    });
                }
            }
        }
        Ok(Icrn {
            species,
            reactions,
            index,
        })
    }

    /// Builds a net whose species list is every species mentioned by the
    /// reactions, in first-appearance order (reactants, then inhibitors, then
    /// products, per reaction). This is the canonical form produced by the
    /// parser, and the form on which `parse ∘ format` is the identity.
    pub fn from_reactions(reactions: Vec<Reaction>) -> Result<Self, NetError> {
        let mut species = Vec::new();
        let mut seen = BTreeSet::new();
        for rx in &reactions {
            for s in rx.species() {
                if seen.insert(s.clone()) {
                    species.push(s.clone());
                }
            }
        }
        Icrn::new(species, reactions)
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    /// Row index of `s` in the stoichiometry matrix.
    pub fn species_index(&self, s: &Species) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains_species(&self, s: &Species) -> bool {
        self.index.contains_key(s)
    }

    /// Indices of the reactions applicable in `c`, in reaction order.
    pub fn applicable(&self, c: &Configuration) -> Vec<usize> {
        self.reactions
            .iter()
            .enumerate()
            .filter(|(_, rx)| rx.is_applicable_in(c))
            .map(|(i, _)| i)
            .collect()
    }

    /// True iff no reaction is applicable in `c`.
    pub fn is_static(&self, c: &Configuration) -> bool {
        !self.reactions.iter().any(|rx| rx.is_applicable_in(c))
    }

    /// The `|Λ| × |R|` matrix with entry `p(S) - r(S)`; inhibitors and
    /// catalysts contribute zero.
    pub fn stoichiometry_matrix(&self) -> StoichMatrix {
        let rows = self
            .species
            .iter()
            .map(|s| self.reactions.iter().map(|rx| rx.net_change(s)).collect())
            .collect();
        StoichMatrix { rows }
    }

    /// One straight-line segment: returns `d = c + M·u` exactly.
    ///
    /// Requires positive flux only on reactions applicable at `c`; the result
    /// must be componentwise nonnegative (intermediate points along the
    /// segment are then nonnegative too, by convexity).
    pub fn apply_segment(
        &self,
        c: &Configuration,
        u: &FluxVector,
    ) -> Result<Configuration, NetError> {
        let mut delta: BTreeMap<Species, BigRational> = BTreeMap::new();
        for (&i, flux) in u.iter() {
            let rx = self
                .reactions
                .get(i)
                .ok_or(NetError::NoSuchReaction(i, self.reactions.len()))?;
            if !rx.is_applicable_in(c) {
                return Err(NetError::InapplicableFlux(i));
            }
            for (s, &coef) in rx.reactants() {
                *delta.entry(s.clone()).or_insert_with(BigRational::zero) -=
                    flux * BigInt::from(coef);
            }
            for (s, &coef) in rx.products() {
                *delta.entry(s.clone()).or_insert_with(BigRational::zero) +=
                    flux * BigInt::from(coef);
            }
        }
        let mut out = c.clone();
        for (s, d) in delta {
            if d.is_zero() {
                continue;
            }
            let v = out.concentration(&s) + d;
            if v.is_negative() {
                return Err(NetError::NegativeResult(s.name().to_string()));
            }
            out.set_unchecked(s, v);
        }
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        crate::parse::parse_icrn(text)
    }
}

/// Emits one reaction per line; parsing the output of a net in canonical
/// form (see [`Icrn::from_reactions`]) yields an identical net. An empty
/// reaction list renders as the empty string.
impl fmt::Display for Icrn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rx in &self.reactions {
            writeln!(f, "{}", rx)?;
        }
        Ok(())
    }
}

impl FromStr for Icrn {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        Icrn::parse(s)
    }
}

/// A configuration: exact nonnegative concentration per species. Species
/// absent from the map have concentration zero; zero entries are never
/// stored, so equal configurations compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Configuration {
    conc: BTreeMap<Species, BigRational>,
}

impl Configuration {
    pub fn new() -> Self {
        Configuration::default()
    }

    /// Later pairs replace earlier ones; negative values are rejected and
    /// zeros dropped.
    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (Species, BigRational)>,
    ) -> Result<Self, NetError> {
        let mut c = Configuration::new();
        for (s, v) in pairs {
            c.set(s, v)?;
        }
        Ok(c)
    }

    pub fn set(&mut self, s: Species, v: BigRational) -> Result<(), NetError> {
        if v.is_negative() {
            return Err(NetError::NegativeConcentration {
                species: s.name().to_string(),
                value: fmt_rational(&v),
            });
        }
        self.set_unchecked(s, v);
        Ok(())
    }

    fn set_unchecked(&mut self, s: Species, v: BigRational) {
        if v.is_zero() {
            self.conc.remove(&s);
        } else {
            self.conc.insert(s, v);
        }
    }

    pub fn get(&self, s: &Species) -> Option<&BigRational> {
        self.conc.get(s)
    }

    /// The concentration of `s`, zero when absent.
    pub fn concentration(&self, s: &Species) -> BigRational {
        self.conc.get(s).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_present(&self, s: &Species) -> bool {
        self.conc.contains_key(s)
    }

    /// The support: species with positive concentration.
    pub fn support(&self) -> impl Iterator<Item = &Species> {
        self.conc.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Species, &BigRational)> {
        self.conc.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.conc.is_empty()
    }

    pub fn len(&self) -> usize {
        self.conc.len()
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        crate::parse::parse_configuration(text)
    }
}

/// `species=value` pairs, comma separated, in species name order; values
/// render as integers or `p/q`.
impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, v)) in self.conc.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}={}", s, fmt_rational(v))?;
        }
        Ok(())
    }
}

impl FromStr for Configuration {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        Configuration::parse(s)
    }
}

/// Nonnegative flux per reaction index; zero entries are not stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FluxVector {
    flux: BTreeMap<usize, BigRational>,
}

impl FluxVector {
    pub fn new() -> Self {
        FluxVector::default()
    }

    /// Unit flux on a single reaction.
    pub fn unit(index: usize) -> Self {
        FluxVector::single(index, BigRational::from_integer(BigInt::from(1)))
            .expect("unit flux is nonnegative")
    }

    pub fn single(index: usize, flux: BigRational) -> Result<Self, NetError> {
        let mut u = FluxVector::new();
        u.set(index, flux)?;
        Ok(u)
    }

    pub fn set(&mut self, index: usize, flux: BigRational) -> Result<(), NetError> {
        if flux.is_negative() {
            return Err(NetError::NegativeFlux {
                index,
                value: fmt_rational(&flux),
            });
        }
        if flux.is_zero() {
            self.flux.remove(&index);
        } else {
            self.flux.insert(index, flux);
        }
        Ok(())
    }

    pub fn get(&self, index: usize) -> Option<&BigRational> {
        self.flux.get(&index)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&usize, &BigRational)> {
        self.flux.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.flux.is_empty()
    }
}

/// Integer stoichiometry matrix, rows in species order, columns in reaction
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoichMatrix {
    rows: Vec<Vec<i64>>,
}

impl StoichMatrix {
    pub fn entry(&self, species_row: usize, reaction_col: usize) -> i64 {
        self.rows[species_row][reaction_col]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn n_species(&self) -> usize {
        self.rows.len()
    }

    pub fn n_reactions(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sp(name: &str) -> Species {
        Species::new(name).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn net(text: &str) -> Icrn {
        Icrn::parse(text).unwrap()
    }

    fn conf(text: &str) -> Configuration {
        Configuration::parse(text).unwrap()
    }

    #[test]
    fn species_name_validation() {
        assert!(Species::new("A").is_ok());
        assert!(Species::new("R_in").is_ok());
        assert!(Species::new("_x1").is_ok());
        assert_eq!(
            Species::new("1A"),
            Err(NetError::InvalidSpeciesName("1A".into()))
        );
        assert!(Species::new("").is_err());
        assert!(Species::new("a-b").is_err());
        assert!(Species::new("a b").is_err());
    }

    #[test]
    fn reaction_rejects_zero_net_effect() {
        let r = BTreeMap::from([(sp("A"), 1)]);
        let err = Reaction::new(r.clone(), BTreeSet::from([sp("I")]), r).unwrap_err();
        assert_eq!(err, NetError::ZeroNetEffect);
    }

    #[test]
    fn reaction_rejects_empty_sides() {
        let side = BTreeMap::from([(sp("A"), 1)]);
        assert_eq!(
            Reaction::new(BTreeMap::new(), BTreeSet::new(), side.clone()),
            Err(NetError::EmptyReactants)
        );
        assert_eq!(
            Reaction::new(side, BTreeSet::new(), BTreeMap::new()),
            Err(NetError::EmptyProducts)
        );
    }

    #[test]
    fn reaction_rejects_out_of_range_coefficients() {
        let r = BTreeMap::from([(sp("A"), 0)]);
        let p = BTreeMap::from([(sp("B"), 1)]);
        assert_eq!(
            Reaction::new(r, BTreeSet::new(), p),
            Err(NetError::CoefficientOutOfRange(0))
        );
    }

    #[test]
    fn stoichiometry_matrix_example() {
        // X -> Y and X + A -> 2X + 3Y with species order (A, X, Y).
        let reactions = vec![
            Reaction::new(
                BTreeMap::from([(sp("X"), 1)]),
                BTreeSet::new(),
                BTreeMap::from([(sp("Y"), 1)]),
            )
            .unwrap(),
            Reaction::new(
                BTreeMap::from([(sp("X"), 1), (sp("A"), 1)]),
                BTreeSet::new(),
                BTreeMap::from([(sp("X"), 2), (sp("Y"), 3)]),
            )
            .unwrap(),
        ];
        let net = Icrn::new(vec![sp("A"), sp("X"), sp("Y")], reactions).unwrap();
        let m = net.stoichiometry_matrix();
        assert_eq!(m.rows(), &[vec![0, -1], vec![-1, 1], vec![1, 3]]);
    }

    #[test]
    fn stoichiometry_ignores_catalysts_and_inhibitors() {
        // A + B -[C]-> A + D has column (0, -1, 0, 1) over (A, B, C, D).
        let rx = Reaction::new(
            BTreeMap::from([(sp("A"), 1), (sp("B"), 1)]),
            BTreeSet::from([sp("C")]),
            BTreeMap::from([(sp("A"), 1), (sp("D"), 1)]),
        )
        .unwrap();
        let net = Icrn::new(vec![sp("A"), sp("B"), sp("C"), sp("D")], vec![rx]).unwrap();
        let m = net.stoichiometry_matrix();
        assert_eq!(m.rows(), &[vec![0], vec![-1], vec![0], vec![1]]);
    }

    #[test]
    fn stoichiometry_of_empty_reaction_list() {
        let net = Icrn::new(vec![sp("A"), sp("B")], vec![]).unwrap();
        let m = net.stoichiometry_matrix();
        assert_eq!(m.n_species(), 2);
        assert_eq!(m.n_reactions(), 0);
    }

    const OSCILLATOR: &str = "A -[C]-> B\nB -[A]-> C\nC -[B]-> A\n";

    #[test]
    fn applicable_on_three_species_oscillator() {
        let net = net(OSCILLATOR);
        assert_eq!(net.applicable(&conf("A=1")), vec![0]);
        // B -> C stays blocked by its inhibitor A while A is present.
        assert_eq!(net.applicable(&conf("A=1/2,B=1/2")), vec![0]);
        assert_eq!(net.applicable(&conf("B=1")), vec![1]);
    }

    #[test]
    fn applicable_empty_when_inhibited() {
        let net = net("B -[I]-> C\n");
        assert_eq!(net.applicable(&conf("B=1,I=1")), Vec::<usize>::new());
    }

    #[test]
    fn all_zero_configuration_is_static() {
        let net = net(OSCILLATOR);
        assert!(net.is_static(&Configuration::new()));
        assert!(!net.is_static(&conf("A=1")));
    }

    #[test]
    fn apply_segment_unit_flux() {
        let net = net(OSCILLATOR);
        let d = net.apply_segment(&conf("A=1"), &FluxVector::unit(0)).unwrap();
        assert_eq!(d, conf("B=1"));
    }

    #[test]
    fn apply_segment_half_flux() {
        let net = net(OSCILLATOR);
        let u = FluxVector::single(0, rat(1, 2)).unwrap();
        let d = net.apply_segment(&conf("A=1"), &u).unwrap();
        assert_eq!(d, conf("A=1/2,B=1/2"));
    }

    #[test]
    fn apply_segment_rejects_inapplicable_flux() {
        let net = net("B -[I]-> C\n");
        let err = net
            .apply_segment(&conf("B=1,I=1"), &FluxVector::unit(0))
            .unwrap_err();
        assert_eq!(err, NetError::InapplicableFlux(0));
    }

    #[test]
    fn apply_segment_rejects_negative_result() {
        let net = net(OSCILLATOR);
        let u = FluxVector::single(0, rat(2, 1)).unwrap();
        let err = net.apply_segment(&conf("A=1"), &u).unwrap_err();
        assert_eq!(err, NetError::NegativeResult("A".into()));
    }

    #[test]
    fn apply_segment_nets_fluxes_before_checking_sign() {
        // Reaction 1 consumes the A that reaction 0 produces; only the summed
        // delta must be nonnegative.
        let net = net("X -> A\nA + X -> B\n");
        let mut u = FluxVector::new();
        u.set(0, rat(1, 2)).unwrap();
        u.set(1, rat(1, 2)).unwrap();
        let d = net.apply_segment(&conf("X=1,A=1/4"), &u).unwrap();
        assert_eq!(d, conf("A=1/4,B=1/2"));
    }

    #[test]
    fn apply_segment_conserves_left_null_vectors() {
        // v = (1,1,1) has v^T M = 0 for the oscillator; the species sum is
        // preserved exactly.
        let net = net(OSCILLATOR);
        let u = FluxVector::single(2, rat(1, 3)).unwrap();
        let c = conf("A=1/3,C=2/3");
        let d = net.apply_segment(&c, &u).unwrap();
        let total = |c: &Configuration| {
            c.iter().fold(BigRational::zero(), |acc, (_, v)| acc + v)
        };
        assert_eq!(total(&c), total(&d));
    }

    #[test]
    fn inhibitors_break_additivity() {
        let net = net("A -[I]-> B\n");
        let from_a = net.apply_segment(&conf("A=1"), &FluxVector::unit(0)).unwrap();
        assert_eq!(from_a, conf("B=1"));
        let err = net
            .apply_segment(&conf("A=1,I=1"), &FluxVector::unit(0))
            .unwrap_err();
        assert_eq!(err, NetError::InapplicableFlux(0));
    }

    #[test]
    fn uninhibited_applicability_is_monotone() {
        let net = net("X -> Y\n");
        let c = conf("X=1");
        let bigger = conf("X=1,Y=5,Z=7");
        assert_eq!(net.applicable(&c), net.applicable(&bigger));
    }

    #[test]
    fn configuration_drops_zeros_and_rejects_negatives() {
        let mut c = conf("A=1");
        c.set(sp("A"), BigRational::zero()).unwrap();
        assert!(c.is_empty());
        assert!(c.set(sp("A"), rat(-1, 2)).is_err());
    }

    proptest! {
        // Applicability depends only on the support of the configuration.
        #[test]
        fn applicability_depends_only_on_support(scale_num in 1i64..50, scale_den in 1i64..50) {
            let net = net("A + 2 B -[I]-> A + 3 C\nB -> D\nC -[A]-> B\n");
            let base = conf("A=1,B=2,C=3");
            let mut scaled = Configuration::new();
            for (s, v) in base.iter() {
                scaled.set(s.clone(), v * rat(scale_num, scale_den)).unwrap();
            }
            prop_assert_eq!(net.applicable(&base), net.applicable(&scaled));
        }
    }
}
