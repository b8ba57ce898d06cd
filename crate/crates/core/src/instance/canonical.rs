//! Self-describing text format for instances.
//!
//! ```text
//! maxcap-instance v1
//! [zones]
//! <zone id> <demand>
//! [locations]
//! <location id> candidate|competitor
//! [distances]
//! <one row per zone, one value per location>
//! [meta]
//! name <text>
//! generator <text>
//! seed <u64>
//! zone_xy <zone id> <x> <y>
//! location_xy <location id> <x> <y>
//! ```
//!
//! Sections appear exactly in this order. Ids are dense and start at zero.
//! Every `meta` key is optional but, when present, keeps the order above.
//! Reals are written in shortest round-trip form, so `load(save(x)) == x`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{Coordinates, Instance, LocationId, Meta, Role};

pub const FORMAT_HEADER: &str = "maxcap-instance v1";

const SECTIONS: [&str; 4] = ["zones", "locations", "distances", "meta"];

pub fn save_canonical(instance: &Instance) -> String {
    let n_loc = instance.n_locations();
    let mut out = String::with_capacity(instance.distances.len() * 20 + 64);
    out.push_str(FORMAT_HEADER);
    out.push('\n');

    out.push_str("[zones]\n");
    for (zone, q) in instance.demands.iter().enumerate() {
        let _ = writeln!(out, "{zone} {q}");
    }

    out.push_str("[locations]\n");
    for loc in 0..n_loc {
        let role = instance.role(LocationId(loc)).unwrap_or(Role::Candidate);
        let _ = writeln!(out, "{loc} {}", role.as_str());
    }

    out.push_str("[distances]\n");
    for row in instance.distances.chunks(n_loc.max(1)) {
        for (k, c) in row.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{c}");
        }
        out.push('\n');
    }

    out.push_str("[meta]\n");
    let meta = &instance.meta;
    if let Some(name) = &meta.name {
        let _ = writeln!(out, "name {name}");
    }
    if let Some(generator) = &meta.generator {
        let _ = writeln!(out, "generator {generator}");
    }
    if let Some(seed) = meta.seed {
        let _ = writeln!(out, "seed {seed}");
    }
    if let Some(coords) = &instance.coordinates {
        for (i, (x, y)) in coords.zones.iter().enumerate() {
            let _ = writeln!(out, "zone_xy {i} {x} {y}");
        }
        for (j, (x, y)) in coords.locations.iter().enumerate() {
            let _ = writeln!(out, "location_xy {j} {x} {y}");
        }
    }
    out
}

struct Cursor<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            lines: text.lines().enumerate().peekable(),
        }
    }

    /// Next non-blank line as (1-based line number, trimmed text).
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (k, line) in self.lines.by_ref() {
            let line = line.trim();
            if !line.is_empty() {
                return Some((k + 1, line));
            }
        }
        None
    }

    fn peek_is_section(&mut self) -> bool {
        while let Some((_, line)) = self.lines.peek() {
            if line.trim().is_empty() {
                self.lines.next();
            } else {
                return line.trim_start().starts_with('[');
            }
        }
        true
    }
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(token: &str, line: usize, path: &str) -> Result<T> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("{path}: cannot parse `{token}`"),
    })
}

fn expect_section(cur: &mut Cursor, name: &str) -> Result<()> {
    match cur.next() {
        None => Err(schema(name, "section missing")),
        Some((line, text)) => {
            let Some(found) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) else {
                return Err(Error::Parse {
                    line,
                    message: format!("expected section header [{name}], found `{text}`"),
                });
            };
            if found == name {
                Ok(())
            } else if SECTIONS.contains(&found) {
                Err(schema(name, format!("section missing (found [{found}] instead)")))
            } else {
                Err(schema(found, "unknown section"))
            }
        }
    }
}

fn expect_id(token: Option<&str>, expected: usize, line: usize, path: &str) -> Result<()> {
    let token = token.ok_or_else(|| schema(path, format!("line {line}: missing id")))?;
    let id: usize = parse_num(token, line, path)?;
    if id != expected {
        return Err(schema(path, format!("line {line}: id {id} out of sequence, expected {expected}")));
    }
    Ok(())
}

pub fn load_canonical(text: &str) -> Result<Instance> {
    let mut cur = Cursor::new(text);
    match cur.next() {
        Some((_, FORMAT_HEADER)) => {}
        Some((line, other)) => {
            return Err(Error::Parse {
                line,
                message: format!("expected `{FORMAT_HEADER}`, found `{other}`"),
            })
        }
        None => return Err(schema("header", "empty document")),
    }

    expect_section(&mut cur, "zones")?;
    let mut demands = Vec::new();
    while !cur.peek_is_section() {
        let (line, text) = cur.next().expect("peeked");
        let path = format!("zones[{}]", demands.len());
        let mut tokens = text.split_whitespace();
        expect_id(tokens.next(), demands.len(), line, &path)?;
        let demand = tokens
            .next()
            .ok_or_else(|| schema(format!("{path}.demand"), format!("line {line}: missing")))?;
        demands.push(parse_num::<f64>(demand, line, &format!("{path}.demand"))?);
        if tokens.next().is_some() {
            return Err(schema(path, format!("line {line}: trailing fields")));
        }
    }

    expect_section(&mut cur, "locations")?;
    let mut candidates = Vec::new();
    let mut competitors = Vec::new();
    let mut n_loc = 0;
    while !cur.peek_is_section() {
        let (line, text) = cur.next().expect("peeked");
        let path = format!("locations[{n_loc}]");
        let mut tokens = text.split_whitespace();
        expect_id(tokens.next(), n_loc, line, &path)?;
        match tokens.next() {
            Some("candidate") => candidates.push(LocationId(n_loc)),
            Some("competitor") => competitors.push(LocationId(n_loc)),
            Some(other) => {
                return Err(schema(format!("{path}.role"), format!("line {line}: unknown role `{other}`")))
            }
            None => return Err(schema(format!("{path}.role"), format!("line {line}: missing"))),
        }
        if tokens.next().is_some() {
            return Err(schema(path, format!("line {line}: trailing fields")));
        }
        n_loc += 1;
    }
    if competitors.is_empty() {
        return Err(schema("locations", "no competitor locations"));
    }

    expect_section(&mut cur, "distances")?;
    let mut distances = Vec::with_capacity(demands.len() * n_loc);
    let mut row = 0;
    while !cur.peek_is_section() {
        let (line, text) = cur.next().expect("peeked");
        let path = format!("distances[{row}]");
        let before = distances.len();
        for token in text.split_whitespace() {
            distances.push(parse_num::<f64>(token, line, &path)?);
        }
        if distances.len() - before != n_loc {
            return Err(schema(
                path,
                format!("line {line}: {} values, expected {n_loc}", distances.len() - before),
            ));
        }
        row += 1;
    }
    if row != demands.len() {
        return Err(schema("distances", format!("{row} rows, expected {}", demands.len())));
    }

    expect_section(&mut cur, "meta")?;
    let mut meta = Meta::default();
    let mut zone_xy = Vec::new();
    let mut location_xy = Vec::new();
    let keys = ["name", "generator", "seed", "zone_xy", "location_xy"];
    let mut last_key = 0;
    let mut seen = [false; 3];
    while let Some((line, text)) = cur.next() {
        if text.starts_with('[') {
            let name = text.trim_matches(|c| c == '[' || c == ']');
            return Err(schema(name, format!("line {line}: unknown or repeated section")));
        }
        let (key, rest) = text.split_once(' ').unwrap_or((text, ""));
        let rank = keys
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| schema(format!("meta.{key}"), format!("line {line}: unknown key")))?;
        let repeated = rank < 3 && std::mem::replace(&mut seen[rank], true);
        if rank < last_key || repeated {
            return Err(schema(format!("meta.{key}"), format!("line {line}: out of order or repeated")));
        }
        last_key = rank;
        let path = format!("meta.{key}");
        match key {
            "name" => meta.name = Some(rest.to_string()),
            "generator" => meta.generator = Some(rest.to_string()),
            "seed" => meta.seed = Some(parse_num(rest.trim(), line, &path)?),
            _ => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(schema(path, format!("line {line}: expected `<id> <x> <y>`")));
                }
                let target = if key == "zone_xy" { &mut zone_xy } else { &mut location_xy };
                expect_id(Some(parts[0]), target.len(), line, &path)?;
                let x = parse_num(parts[1], line, &path)?;
                let y = parse_num(parts[2], line, &path)?;
                target.push((x, y));
            }
        }
    }

    let coordinates = match (zone_xy.is_empty(), location_xy.is_empty()) {
        (true, true) => None,
        _ => {
            if zone_xy.len() != demands.len() || location_xy.len() != n_loc {
                return Err(schema("meta", "coordinates must cover every zone and location"));
            }
            Some(Coordinates {
                zones: zone_xy,
                locations: location_xy,
            })
        }
    };

    let instance = Instance {
        demands,
        candidates,
        competitors,
        distances,
        meta,
        coordinates,
    };
    instance.check()?;
    Ok(instance)
}
