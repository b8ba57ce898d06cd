//! OR-Library capacitated/uncapacitated facility location files (`cap*.txt`).
//!
//! Layout, whitespace separated with free line breaks:
//!
//! ```text
//! <locations m> <zones n>
//! m times:  <capacity> <fixed cost>          (ignored)
//! n times:  <demand> <cost to location 1> ... <cost to location m>
//! ```
//!
//! The files carry no competitor set, so the caller names it.

use std::io::Read;

use crate::error::{Error, Result};
use crate::instance::{Instance, LocationId, Meta};

struct Tokens<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    current: std::str::SplitWhitespace<'a>,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens {
            lines: text.lines().enumerate(),
            current: "".split_whitespace(),
            line: 0,
        }
    }

    fn next_token(&mut self) -> Option<&'a str> {
        loop {
            if let Some(tok) = self.current.next() {
                return Some(tok);
            }
            let (k, line) = self.lines.next()?;
            self.line = k + 1;
            self.current = line.split_whitespace();
        }
    }

    fn real(&mut self, what: &dyn Fn() -> String) -> Result<f64> {
        let line = self.line;
        let tok = self.next_token().ok_or_else(|| Error::Parse {
            line: line.max(1),
            message: format!("unexpected end of input while reading {}", what()),
        })?;
        tok.parse().map_err(|_| Error::Parse {
            line: self.line,
            message: format!("non-numeric token `{tok}` in {}", what()),
        })
    }

    fn count(&mut self, what: &str) -> Result<usize> {
        let line = self.line;
        let tok = self.next_token().ok_or_else(|| Error::Parse {
            line: line.max(1),
            message: format!("missing header field {what}"),
        })?;
        tok.parse().map_err(|_| Error::Parse {
            line: self.line,
            message: format!("malformed header: {what} `{tok}` is not a count"),
        })
    }
}

/// Parses an OR-Library facility file. `competitors` lists the location ids
/// (0-based) already held by competitors; all others become candidates.
pub fn parse_orlib(mut input: impl Read, competitors: &[usize]) -> Result<Instance> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut tokens = Tokens::new(&text);

    let n_loc = tokens.count("location count")?;
    let n_zones = tokens.count("zone count")?;
    if n_loc == 0 || n_zones == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "malformed header: counts must be positive".into(),
        });
    }

    for j in 0..n_loc {
        tokens.real(&|| format!("capacity of location {}", j + 1))?;
        tokens.real(&|| format!("fixed cost of location {}", j + 1))?;
    }

    let mut demands = Vec::with_capacity(n_zones);
    let mut distances = Vec::with_capacity(n_zones * n_loc);
    for i in 0..n_zones {
        demands.push(tokens.real(&|| format!("demand of zone {}", i + 1))?);
        for j in 0..n_loc {
            distances.push(tokens.real(&|| {
                format!("cost row of zone {} (entry {} of {n_loc})", i + 1, j + 1)
            })?);
        }
    }
    if let Some(tok) = tokens.next_token() {
        return Err(Error::Parse {
            line: tokens.line,
            message: format!("trailing token `{tok}` after {n_zones} zone rows"),
        });
    }

    let mut comp: Vec<usize> = competitors.to_vec();
    comp.sort_unstable();
    comp.dedup();
    if let Some(&bad) = comp.iter().find(|&&c| c >= n_loc) {
        return Err(Error::InvalidArgument(format!(
            "competitor location {bad} outside 0..{n_loc}"
        )));
    }
    let candidates = (0..n_loc)
        .filter(|j| comp.binary_search(j).is_err())
        .map(LocationId)
        .collect();
    let instance = Instance {
        demands,
        candidates,
        competitors: comp.into_iter().map(LocationId).collect(),
        distances,
        meta: Meta {
            generator: Some("orlib".into()),
            ..Meta::default()
        },
        coordinates: None,
    };
    instance.check()?;
    Ok(instance)
}

impl Instance {
    /// Divides every distance by the largest one so the matrix lies in `[0, 1]`.
    /// Raw OR-Library costs are in the thousands and would underflow `exp(-βc)`.
    pub fn normalized(mut self) -> Instance {
        let max = self.distances.iter().copied().fold(0.0_f64, f64::max);
        if max > 0.0 {
            for c in &mut self.distances {
                *c /= max;
            }
        }
        self
    }
}
