//! Parsing of unit-suffixed physical quantities.
//!
//! Everything is stored in SI internally. Lengths accept `nm`, `um`/`µm`, `mm`,
//! `cm` and `m`; inverse lengths accept `/nm`, `/um`, `/mm`, `/cm`, `/m` (and the
//! `mm^-1` spelling). A bare number is taken as already SI.

use crate::error::{Error, Result};

const LENGTH_UNITS: &[(&str, f64)] = &[
    ("nm", 1e-9),
    ("um", 1e-6),
    ("µm", 1e-6),
    ("mm", 1e-3),
    ("cm", 1e-2),
    ("m", 1.0),
];

fn split_number(input: &str) -> Result<(f64, &str)> {
    let s = input.trim();
    let end = s
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit()
                || c == '.'
                || c == '+'
                || c == '-'
                || ((c == 'e' || c == 'E') && looks_like_exponent(s, i)))
        })
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    let (num, unit) = s.split_at(end);
    let value: f64 = num.parse().map_err(|_| Error::Parse {
        input: input.to_string(),
        reason: format!("`{num}` is not a number"),
    })?;
    Ok((value, unit.trim()))
}

// `5e-3mm` has an exponent, `5em` does not exist, but `5e` followed by a digit
// or sign is always an exponent.
fn looks_like_exponent(s: &str, i: usize) -> bool {
    matches!(s[i + 1..].chars().next(), Some(c) if c.is_ascii_digit() || c == '-' || c == '+')
}

fn length_scale(unit: &str) -> Option<f64> {
    LENGTH_UNITS
        .iter()
        .find(|(name, _)| *name == unit)
        .map(|&(_, s)| s)
}

/// Parses a length such as `702.2nm` or `0.6 m` into meters.
pub fn parse_length(input: &str) -> Result<f64> {
    let (value, unit) = split_number(input)?;
    if unit.is_empty() {
        return Ok(value);
    }
    length_scale(unit)
        .map(|s| value * s)
        .ok_or_else(|| Error::Parse {
            input: input.to_string(),
            reason: format!("unknown length unit `{unit}`"),
        })
}

/// Parses an inverse length such as `5.0/mm` or `5 mm^-1` into 1/m.
pub fn parse_inverse_length(input: &str) -> Result<f64> {
    let (value, unit) = split_number(input)?;
    if unit.is_empty() {
        return Ok(value);
    }
    let base = unit
        .strip_prefix('/')
        .or_else(|| unit.strip_suffix("^-1"))
        .or_else(|| unit.strip_suffix("⁻¹"))
        .map(str::trim);
    base.and_then(length_scale)
        .map(|s| value / s)
        .ok_or_else(|| Error::Parse {
            input: input.to_string(),
            reason: format!("unknown inverse-length unit `{unit}`"),
        })
}
