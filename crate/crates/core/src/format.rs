//! Text (`.trn`) and compact (`<n>:<hex>`) tournament encodings.
//!
//! Text: first line `n`, then `n` rows of `n` characters; character `j` of
//! row `i` is `-` on the diagonal, `1` if `i` beats `j`, `0` otherwise.
//!
//! Compact: the C(n,2) pair bits in upper-triangle order, packed four per hex
//! digit with the first digit holding bits 0..=3 (bit 0 as its least
//! significant bit). At least one digit is always written.

use crate::tournament::{pair_count, Tournament, TournamentError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    At {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("compact form {input:?}: {message}")]
    Compact { input: String, message: String },
    #[error(transparent)]
    Tournament(#[from] TournamentError),
}

fn at(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::At {
        line,
        column,
        message: message.into(),
    }
}

pub fn to_text(t: &Tournament) -> String {
    let n = t.n();
    let mut out = format!("{n}\n");
    for i in 0..n {
        for j in 0..n {
            out.push(if i == j {
                '-'
            } else if t.beats(i, j) {
                '1'
            } else {
                '0'
            });
        }
        out.push('\n');
    }
    out
}

pub fn parse_text(input: &str) -> Result<Tournament, ParseError> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim_end_matches('\r')));
    let (_, header) = lines.next().ok_or_else(|| at(1, 1, "empty input"))?;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| at(1, 1, format!("expected team count, found {header:?}")))?;
    if n == 0 {
        return Err(at(1, 1, "team count must be positive"));
    }
    let mut matrix = vec![vec![false; n]; n];
    #[allow(clippy::needless_range_loop)] // checks matrix[j][i] too
    for i in 0..n {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| at(i + 2, 1, format!("expected {n} rows, found {i}")))?;
        let chars: Vec<char> = line.chars().collect();
        if chars.len() != n {
            return Err(at(
                line_no,
                chars.len().min(n) + 1,
                format!("row {i} has {} characters, expected {n}", chars.len()),
            ));
        }
        for (j, &c) in chars.iter().enumerate() {
            let column = j + 1;
            match (i == j, c) {
                (true, '-') => {}
                (true, other) => {
                    return Err(at(
                        line_no,
                        column,
                        format!("diagonal must be '-', found {other:?}"),
                    ))
                }
                (false, '1') => matrix[i][j] = true,
                (false, '0') => {}
                (false, other) => {
                    return Err(at(
                        line_no,
                        column,
                        format!("expected '0' or '1', found {other:?}"),
                    ))
                }
            }
            if j < i && matrix[i][j] == matrix[j][i] {
                return Err(at(
                    line_no,
                    column,
                    format!(
                        "asymmetric pair ({j},{i}): entries [{j}][{i}] and [{i}][{j}] must differ"
                    ),
                ));
            }
        }
    }
    for (line_no, rest) in lines {
        if !rest.trim().is_empty() {
            return Err(at(line_no, 1, format!("trailing content after {n} rows")));
        }
    }
    Ok(Tournament::from_matrix(&matrix)?)
}

fn hex_digits(n: usize) -> usize {
    pair_count(n).div_ceil(4).max(1)
}

pub fn to_compact(t: &Tournament) -> String {
    let bits = t.pair_bits();
    let mut out = format!("{}:", t.n());
    for digit in 0..hex_digits(t.n()) {
        let nibble = (0..4)
            .filter(|b| bits.get(digit * 4 + b).copied().unwrap_or(false))
            .fold(0u32, |acc, b| acc | 1 << b);
        out.push(char::from_digit(nibble, 16).expect("nibble"));
    }
    out
}

pub fn parse_compact(input: &str) -> Result<Tournament, ParseError> {
    let err = |message: String| ParseError::Compact {
        input: input.to_string(),
        message,
    };
    let trimmed = input.trim();
    let (n_part, hex) = trimmed
        .split_once(':')
        .ok_or_else(|| err("expected \"<n>:<hex>\"".into()))?;
    let n: usize = n_part
        .parse()
        .map_err(|_| err(format!("bad team count {n_part:?}")))?;
    if n == 0 {
        return Err(err("team count must be positive".into()));
    }
    let expected = hex_digits(n);
    if hex.len() != expected {
        return Err(err(format!(
            "{n} teams need {expected} hex digits, found {}",
            hex.len()
        )));
    }
    let pairs = pair_count(n);
    let mut bits = Vec::with_capacity(expected * 4);
    for (k, c) in hex.chars().enumerate() {
        let nibble = c
            .to_digit(16)
            .ok_or_else(|| err(format!("invalid hex digit {c:?} at position {}", k + 1)))?;
        for b in 0..4 {
            bits.push(nibble >> b & 1 == 1);
        }
    }
    if bits[pairs..].iter().any(|&b| b) {
        return Err(err(format!("bits beyond the {pairs} match bits are set")));
    }
    let mut it = bits.into_iter();
    Ok(Tournament::from_fn(n, |_, _| it.next().expect("bit"))?)
}

/// Accepts either encoding; compact when the input contains `':'`.
pub fn parse_any(input: &str) -> Result<Tournament, ParseError> {
    if input.trim().contains(':') {
        parse_compact(input)
    } else {
        parse_text(input)
    }
}
