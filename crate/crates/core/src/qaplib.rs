//! QAPLIB text format: an integer `n`, then `n*n` numbers for the first
//! matrix and `n*n` for the second, separated by any whitespace.
//!
//! By default the first matrix is read as distances `r` and the second as
//! flows `w`. Files in the wild disagree on the order, so `flow_first` swaps
//! them.

use std::fmt::Write as _;

use crate::instance::{Landscape, QapInstance};
use crate::permutation::MIN_SIZE;
use crate::scalar::{Literal, Scalar};
use crate::{Error, Result};

/// Parsed matrices, each entry kept exactly and as `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedQap {
    pub n: usize,
    pub r: Vec<Literal>,
    pub w: Vec<Literal>,
}

impl ParsedQap {
    /// All entries are integers, so exact arithmetic is the natural mode.
    pub fn is_integral(&self) -> bool {
        self.r.iter().chain(&self.w).all(Literal::is_integer)
    }

    pub fn to_instance<S: Scalar>(&self) -> Result<QapInstance<S>> {
        QapInstance::new(
            self.n,
            self.r.iter().map(S::from_literal).collect(),
            self.w.iter().map(S::from_literal).collect(),
        )
    }
}

/// Whitespace-separated tokens with their byte offsets.
fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let base = text.as_ptr() as usize;
    text.split_whitespace()
        .map(move |tok| (tok.as_ptr() as usize - base, tok))
}

pub fn parse_qaplib(text: &str, flow_first: bool) -> Result<ParsedQap> {
    let mut toks = tokens(text);
    let (offset, head) = toks.next().ok_or_else(|| Error::Parse {
        offset: 0,
        message: "empty input, expected problem size".into(),
    })?;
    let n: usize = head.parse().map_err(|_| Error::Parse {
        offset,
        message: format!("problem size {head:?} is not a non-negative integer"),
    })?;
    if n < MIN_SIZE {
        return Err(Error::Parse {
            offset,
            message: format!("problem size {n} below minimum {MIN_SIZE}"),
        });
    }
    let expected = n.checked_mul(n).and_then(|sq| sq.checked_mul(2)).ok_or(Error::Parse {
        offset,
        message: format!("problem size {n} too large"),
    })?;

    let mut values = Vec::new();
    for (offset, tok) in toks {
        if values.len() == expected {
            return Err(Error::Parse {
                offset,
                message: format!("unexpected extra token {tok:?} after {} values", expected),
            });
        }
        let lit: Literal = tok.parse().map_err(|message| Error::Parse { offset, message })?;
        values.push(lit);
    }
    if values.len() != expected {
        return Err(Error::Parse {
            offset: text.len(),
            message: format!(
                "expected {} tokens (1 + 2n^2 with n = {n}), found {}",
                expected + 1,
                values.len() + 1
            ),
        });
    }
    let second = values.split_off(n * n);
    let first = values;
    let (r, w) = if flow_first { (second, first) } else { (first, second) };
    Ok(ParsedQap { n, r, w })
}

/// Parses directly into an instance of the requested arithmetic.
pub fn parse_qaplib_as<S: Scalar>(text: &str, flow_first: bool) -> Result<QapInstance<S>> {
    parse_qaplib(text, flow_first)?.to_instance()
}

/// Writes `n`, a blank line, the distance matrix, a blank line, the flow matrix.
pub fn write_qaplib<S: Scalar>(inst: &QapInstance<S>) -> Result<String> {
    let n = inst.n();
    let mut out = format!("{n}\n");
    for matrix in [inst.distances(), inst.flows()] {
        out.push('\n');
        for row in matrix.chunks(n) {
            let cells = row.iter().map(Scalar::qaplib_token).collect::<Result<Vec<_>>>()?;
            let _ = writeln!(out, "{}", cells.join(" "));
        }
    }
    Ok(out)
}
