//! Mini-grammar for class expressions: signed integer/rational combinations
//! of generator names, whitespace-insensitive. Examples the grammar accepts:
//! `H2-L2-L3`, `3H-2E0-2E1-2E2-2E3`, `-1/2*H + L0`, `0`.

use super::{CohomologyClass, CohomologyModel};
use crate::error::{CoreError, Result};
use crate::{Int, Rat};
use num_traits::{One, Zero};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Slash,
    Number(Int),
    Name(String),
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token::Number(
                    s.parse()
                        .map_err(|_| CoreError::Parse(format!("bad integer {s:?}")))?,
                ));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Name(chars[start..i].iter().collect()));
            }
            other => {
                return Err(CoreError::Parse(format!(
                    "unexpected character {other:?} in class expression"
                )))
            }
        }
    }
    Ok(out)
}

/// Parse a class expression against a model. All named generators must live
/// in the same degree; `expected_p` is required only for the bare `0`
/// expression (and is checked against the inferred degree otherwise).
pub fn parse_class(
    model: &Arc<CohomologyModel>,
    input: &str,
    expected_p: Option<usize>,
) -> Result<CohomologyClass> {
    let tokens = tokenize(input)?;
    if tokens.is_empty() {
        return Err(CoreError::Parse("empty class expression".into()));
    }
    // special case: a bare rational that is zero
    if let Some(p) = expected_p {
        if tokens
            .iter()
            .all(|t| matches!(t, Token::Number(n) if n.is_zero()))
            && tokens.len() == 1
        {
            return CohomologyClass::zero(model, p);
        }
    }

    let mut terms: Vec<(Rat, String)> = Vec::new();
    let mut i = 0;
    let mut first = true;
    while i < tokens.len() {
        // sign
        let mut sign = Rat::one();
        match &tokens[i] {
            Token::Plus => {
                i += 1;
            }
            Token::Minus => {
                sign = -sign;
                i += 1;
            }
            _ if first => {}
            other => {
                return Err(CoreError::Parse(format!(
                    "expected + or - between terms, found {other:?}"
                )))
            }
        }
        first = false;
        // optional coefficient
        let mut coeff = Rat::one();
        let mut have_coeff = false;
        if let Some(Token::Number(n)) = tokens.get(i) {
            let mut c = Rat::from(n.clone());
            i += 1;
            if let Some(Token::Slash) = tokens.get(i) {
                let Some(Token::Number(d)) = tokens.get(i + 1) else {
                    return Err(CoreError::Parse("expected denominator after /".into()));
                };
                if d.is_zero() {
                    return Err(CoreError::Parse("zero denominator".into()));
                }
                c /= Rat::from(d.clone());
                i += 2;
            }
            coeff = c;
            have_coeff = true;
            if let Some(Token::Star) = tokens.get(i) {
                i += 1;
            }
        }
        // generator name (optional only for a pure-number zero term)
        match tokens.get(i) {
            Some(Token::Name(name)) => {
                terms.push((sign * coeff, name.clone()));
                i += 1;
            }
            _ if have_coeff && coeff.is_zero() => {}
            other => {
                return Err(CoreError::Parse(format!(
                    "expected generator name, found {other:?}"
                )))
            }
        }
    }

    let mut degree: Option<usize> = expected_p;
    let mut resolved: Vec<(Rat, usize)> = Vec::new();
    for (coeff, name) in terms {
        let (p, idx) = model.find_generator(&name).ok_or_else(|| {
            CoreError::Lookup(format!("no generator {name:?} on {}", model.name()))
        })?;
        match degree {
            None => degree = Some(p),
            Some(d) if d == p => {}
            Some(d) => {
                return Err(CoreError::Degree(format!(
                    "mixed degrees in class expression: {name} has degree {p}, expected {d}"
                )))
            }
        }
        resolved.push((coeff, idx));
    }
    let p = degree.ok_or_else(|| {
        CoreError::Parse("cannot infer bidegree of an all-zero expression; pass the degree".into())
    })?;
    let mut coeffs = vec![Rat::zero(); model.basis_len(p)];
    for (c, idx) in resolved {
        coeffs[idx] += c;
    }
    CohomologyClass::new(model.clone(), p, coeffs)
}
