//! Plain-text matrix format: one row per line, entries `p/q` or integers,
//! `#` starts a comment. Columns are generators.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

use super::basis::{LatticeBasis, Rat};

fn parse_rational(tok: &str, line: usize) -> Result<Rat> {
    let bad = |m: String| Error::Parse { line, message: m };
    let (n, d) = match tok.split_once('/') {
        Some((n, d)) => (n, d),
        None => (tok, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad(format!("bad numerator in {tok:?}")))?;
    let d: BigInt = d.parse().map_err(|_| bad(format!("bad denominator in {tok:?}")))?;
    if d.is_zero() {
        return Err(bad(format!("zero denominator in {tok:?}")));
    }
    Ok(Rat::new(n, d))
}

/// Parses a square rational matrix.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<Rat>>> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| parse_rational(t, idx + 1))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            let first: &Vec<Rat> = first;
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("row has {} entries, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 0, message: "no matrix rows".into() });
    }
    if rows.len() != rows[0].len() {
        return Err(Error::Parse {
            line: 0,
            message: format!("matrix is {}x{}, not square", rows.len(), rows[0].len()),
        });
    }
    Ok(rows)
}

pub fn parse_basis(text: &str, scale: f64) -> Result<LatticeBasis> {
    LatticeBasis::new(parse_matrix(text)?, scale)
}

fn format_rational(v: &Rat) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Inverse of [`parse_matrix`] (without comments).
pub fn format_matrix(m: &[Vec<Rat>]) -> String {
    let mut out = String::new();
    for row in m {
        let cells: Vec<String> = row.iter().map(format_rational).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}
