//! Plain-text tactic and strategy files.
//!
//! Tactic file: one tactic per line, `n` whitespace-separated 1-based locations.
//!
//! Strategy file:
//!
//! ```text
//! n=4
//! 1/2 : 1 1 1 1
//! 1/2 : 1 2 3 4
//! ```
//!
//! Blank lines and lines starting with `#` are ignored in both formats.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::Tactic;
use crate::rational::{parse_fraction, to_fraction, Q};
use crate::strategy::Strategy;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses one itinerary of `n` locations; `n` is the token count when `None`.
pub fn parse_tactic(text: &str, n: Option<usize>) -> Result<Tactic> {
    let locations = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("not a location: '{tok}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    Tactic::new(n.unwrap_or(locations.len()), &locations)
}

pub fn parse_tactics(text: &str) -> Result<Vec<Tactic>> {
    let mut out: Vec<Tactic> = Vec::new();
    for (line, body) in content_lines(text) {
        let n = out.first().map(Tactic::n);
        let tactic = parse_tactic(body, n).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        out.push(tactic);
    }
    Ok(out)
}

pub fn write_tactics(tactics: &[Tactic]) -> String {
    tactics.iter().map(|t| format!("{t}\n")).collect()
}

pub fn parse_strategy(text: &str, name: &str) -> Result<Strategy> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing 'n=<int>' header".into(),
    })?;
    let n = header
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse::<usize>().ok())
        .ok_or_else(|| Error::Parse {
            line: header_line,
            message: format!("expected 'n=<int>', found '{header}'"),
        })?;
    let mut support = Vec::new();
    for (line, body) in lines {
        let wrap = |e: Error| Error::Parse {
            line,
            message: e.to_string(),
        };
        let (weight, itinerary) = body.split_once(':').ok_or_else(|| Error::Parse {
            line,
            message: "expected '<p>/<q> : <itinerary>'".into(),
        })?;
        let weight: Q = parse_fraction(weight).map_err(wrap)?;
        let tactic = parse_tactic(itinerary, Some(n)).map_err(wrap)?;
        support.push((tactic, weight));
    }
    Strategy::from_table(n, name, support)
}

pub fn write_strategy(strategy: &Strategy) -> Result<String> {
    let support = strategy.require_support()?;
    let mut out = format!("n={}\n", strategy.n());
    for (tactic, weight) in support {
        writeln!(out, "{} : {}", to_fraction(weight), tactic).expect("writing to a String");
    }
    Ok(out)
}
