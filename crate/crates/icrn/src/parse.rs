//! Text formats: the reaction grammar, and configuration and number
//! literals.
//!
//! Reaction files hold one reaction per line; `#` starts a comment and blank
//! lines are ignored:
//!
//! ```text
//! reaction := side arrow side
//! arrow    := "->" | "-[" species ("," species)* "]->"
//! side     := term ("+" term)* ;  term := [nat] species
//! ```
//!
//! Configurations are comma-separated `species=value` pairs where `value` is
//! a decimal (`1`, `0.5`) or rational (`2/3`) literal.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::net::{is_identifier, Configuration, Icrn, Reaction, Species, MAX_COEFFICIENT};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{message}")]
    Literal { message: String },
}

impl ParseError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ParseError::Line {
            line,
            message: message.into(),
        }
    }

    fn literal(message: impl Into<String>) -> Self {
        ParseError::Literal {
            message: message.into(),
        }
    }
}

/// Strips a trailing `#` comment and surrounding whitespace.
pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

fn parse_species_token(tok: &str) -> Result<Species, String> {
    let tok = tok.trim();
    if is_identifier(tok) {
        Ok(Species::new(tok).expect("validated identifier"))
    } else if tok.is_empty() {
        Err("missing species name".into())
    } else {
        Err(format!("invalid species name `{}`", tok))
    }
}

/// Parses one side of a reaction, keeping the source order of first mentions.
fn parse_side(text: &str) -> Result<(BTreeMap<Species, u32>, Vec<Species>), String> {
    let mut side = BTreeMap::new();
    let mut order = Vec::new();
    for term in text.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err("empty term".into());
        }
        let digits: String = term.chars().take_while(|c| c.is_ascii_digit()).collect();
        let rest = term[digits.len()..].trim();
        let coef = if digits.is_empty() {
            1
        } else {
            let n: u64 = digits
                .parse()
                .map_err(|_| format!("coefficient `{}` is out of range", digits))?;
            if n == 0 || n > u64::from(MAX_COEFFICIENT) {
                return Err(format!(
                    "coefficient {} outside 1..={}",
                    n, MAX_COEFFICIENT
                ));
            }
            n as u32
        };
        let species = parse_species_token(rest)?;
        if !side.contains_key(&species) {
            order.push(species.clone());
        }
        let slot = side.entry(species).or_insert(0u32);
        *slot = slot
            .checked_add(coef)
            .filter(|&c| c <= MAX_COEFFICIENT)
            .ok_or_else(|| format!("accumulated coefficient exceeds {}", MAX_COEFFICIENT))?;
    }
    Ok((side, order))
}

/// Parses a single reaction line, returning the reaction and all mentioned
/// species in source order. Errors are plain messages; the caller adds the
/// line number.
fn parse_reaction_line(text: &str) -> Result<(Reaction, Vec<Species>), String> {
    let (lhs, inhibitors_text, rhs) = if let Some(open) = text.find("-[") {
        let rest = &text[open + 2..];
        let close = rest
            .find("]->")
            .ok_or("expected `]->` to close the inhibitor list")?;
        (&text[..open], Some(&rest[..close]), &rest[close + 3..])
    } else if let Some(arrow) = text.find("->") {
        (&text[..arrow], None, &text[arrow + 2..])
    } else {
        return Err("expected `->` or `-[...]->`".into());
    };
    if rhs.contains("->") {
        return Err("more than one arrow".into());
    }

    let (reactants, mut order) = parse_side(lhs).map_err(|e| format!("reactant side: {}", e))?;
    let mut inhibitors = BTreeSet::new();
    if let Some(list) = inhibitors_text {
        for tok in list.split(',') {
            let s = parse_species_token(tok).map_err(|e| format!("inhibitor list: {}", e))?;
            // Duplicates are accepted and deduplicated.
            if inhibitors.insert(s.clone()) && !order.contains(&s) {
                order.push(s);
            }
        }
    }
    let (products, porder) = parse_side(rhs).map_err(|e| format!("product side: {}", e))?;
    for s in porder {
        if !order.contains(&s) {
            order.push(s);
        }
    }
    let rx = Reaction::new(reactants, inhibitors, products).map_err(|e| e.to_string())?;
    Ok((rx, order))
}

/// Parses a reaction file. The species list is the union of all mentioned
/// species in first-appearance order.
pub fn parse_icrn(text: &str) -> Result<Icrn, ParseError> {
    let mut reactions = Vec::new();
    let mut species = Vec::new();
    let mut seen = BTreeSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (rx, order) = parse_reaction_line(line).map_err(|e| ParseError::at(lineno, e))?;
        for s in order {
            if seen.insert(s.clone()) {
                species.push(s);
            }
        }
        reactions.push(rx);
    }
    Icrn::new(species, reactions)
        .map_err(|e| ParseError::literal(format!("invalid net: {}", e)))
}

/// Parses a decimal (`3`, `0.25`) or rational (`5/4`) literal exactly.
pub fn parse_rational(text: &str) -> Result<BigRational, ParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseError::literal("empty number"));
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| ParseError::literal(format!("invalid numerator `{}`", num.trim())))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| ParseError::literal(format!("invalid denominator `{}`", den.trim())))?;
        if den.is_zero() {
            return Err(ParseError::literal("zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    let digits = format!("{}{}", int_part, frac_part);
    let body = digits.strip_prefix(['+', '-']).unwrap_or(&digits);
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit()) {
        return Err(ParseError::literal(format!("invalid number `{}`", text)));
    }
    let mantissa: BigInt = digits
        .parse()
        .map_err(|_| ParseError::literal(format!("invalid number `{}`", text)))?;
    let mut scale = BigInt::one();
    for _ in 0..frac_part.len() {
        scale *= 10;
    }
    Ok(BigRational::new(mantissa, scale))
}

/// Parses `species=value` pairs, comma separated. The empty string is the
/// all-zero configuration.
pub fn parse_configuration(text: &str) -> Result<Configuration, ParseError> {
    let mut c = Configuration::new();
    let mut seen = BTreeSet::new();
    let text = text.trim();
    if text.is_empty() {
        return Ok(c);
    }
    for entry in text.split(',') {
        let entry = entry.trim();
        let (name, value) = entry
            .split_once('=')
            .ok_or_else(|| ParseError::literal(format!("expected `species=value`, got `{}`", entry)))?;
        let species = parse_species_token(name).map_err(ParseError::literal)?;
        if !seen.insert(species.clone()) {
            return Err(ParseError::literal(format!(
                "species `{}` listed twice",
                species
            )));
        }
        let value = parse_rational(value)?;
        c.set(species, value)
            .map_err(|e| ParseError::literal(e.to_string()))?;
    }
    Ok(c)
}

/// Parses a CSV cell as a float, accepting `p/q` rationals from executor
/// transition logs.
pub(crate) fn parse_float_cell(text: &str) -> Result<f64, ParseError> {
    let text = text.trim();
    if let Ok(v) = text.parse::<f64>() {
        return Ok(v);
    }
    if let Some((num, den)) = text.split_once('/') {
        if let (Ok(n), Ok(d)) = (num.trim().parse::<f64>(), den.trim().parse::<f64>()) {
            if d != 0.0 {
                return Ok(n / d);
            }
        }
    }
    Err(ParseError::literal(format!("invalid numeric cell `{}`", text)))
}
