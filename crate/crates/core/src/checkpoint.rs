//! Plain-text checkpoints of materialized structures.
//!
//! ```text
//! heightlab v1 <rule-name> <mode>
//! <h>;<N_h>;<pi_h>;<e1>,<e2>,...
//! ...
//! end;<height>
//! ```
//!
//! Elements are decimal; primes are recovered on load by primality testing.
//! The `end` line lets a loader tell a complete file from a cut-off one.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_bigint::BigUint;
use thiserror::Error;

use crate::enumeration::{AnyStructure, HeightStructure, Level};
use crate::rules::{builtin_rule, HeightRule, Mode, RuleError};
use crate::scalar::Natural;

pub const FORMAT_VERSION: &str = "v1";
const MAGIC: &str = "heightlab";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint i/o: {0}")]
    Io(#[from] io::Error),
    #[error("unsupported checkpoint version `{found}` (expected {FORMAT_VERSION})")]
    Version { found: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("checkpoint is truncated after line {line}")]
    Truncated { line: usize },
    #[error("checkpoint was written for rule `{found}`, not `{expected}`")]
    RuleMismatch { found: String, expected: String },
    #[error(transparent)]
    Rule(#[from] RuleError),
}

fn parse_err(line: usize, message: impl Into<String>) -> CheckpointError {
    CheckpointError::Parse { line, message: message.into() }
}

pub fn write_structure<N: Natural, W: Write>(s: &HeightStructure<N>, out: W) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "{MAGIC} {FORMAT_VERSION} {} {}", s.rule().name(), s.rule().mode)?;
    for level in s.levels() {
        write!(out, "{};{};{};", level.h, level.count(), level.prime_count())?;
        for (i, e) in level.elements.iter().enumerate() {
            if i > 0 {
                out.write_all(b",")?;
            }
            write!(out, "{e}")?;
        }
        out.write_all(b"\n")?;
    }
    writeln!(out, "end;{}", s.height())?;
    out.flush()
}

pub fn save<N: Natural>(s: &HeightStructure<N>, path: impl AsRef<Path>) -> Result<(), CheckpointError> {
    write_structure(s, File::create(path)?)?;
    Ok(())
}

pub fn save_any(s: &AnyStructure, path: impl AsRef<Path>) -> Result<(), CheckpointError> {
    match s {
        AnyStructure::Word(s) => save(s, path),
        AnyStructure::Big(s) => save(s, path),
    }
}

/// Loads a checkpoint of a catalog rule.
pub fn load(path: impl AsRef<Path>) -> Result<AnyStructure, CheckpointError> {
    read_structure(BufReader::new(File::open(path)?), None)
}

/// Loads a checkpoint written for `rule`, which need not be in the catalog.
pub fn load_for(path: impl AsRef<Path>, rule: &HeightRule) -> Result<AnyStructure, CheckpointError> {
    read_structure(BufReader::new(File::open(path)?), Some(rule))
}

pub fn read_structure<R: BufRead>(input: R, rule: Option<&HeightRule>) -> Result<AnyStructure, CheckpointError> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or(CheckpointError::Truncated { line: 0 })?;
    let header = header?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.first() != Some(&MAGIC) {
        return Err(parse_err(1, "missing `heightlab` header"));
    }
    if fields.get(1) != Some(&FORMAT_VERSION) {
        return Err(CheckpointError::Version { found: fields.get(1).unwrap_or(&"").to_string() });
    }
    let [_, _, name, mode] = fields[..] else {
        return Err(parse_err(1, "header must be `heightlab v1 <rule> <mode>`"));
    };
    let mode: Mode = mode.parse().map_err(|e: RuleError| parse_err(1, e.to_string()))?;
    let rule = match rule {
        Some(r) if r.name() == name && r.mode == mode => r.clone(),
        Some(r) => {
            return Err(CheckpointError::RuleMismatch { found: format!("{name} {mode}"), expected: format!("{} {}", r.name(), r.mode) })
        }
        None => builtin_rule(name, mode)?,
    };

    let mut raw: Vec<(usize, Vec<BigUint>)> = Vec::new();
    let mut last_line = 1;
    let mut finished = false;
    for (no, line) in lines {
        let line = line?;
        last_line = no;
        if line.is_empty() {
            continue;
        }
        if finished {
            return Err(parse_err(no, "content after `end` line"));
        }
        if let Some(h) = line.strip_prefix("end;") {
            let h: usize = h.trim().parse().map_err(|_| parse_err(no, "bad `end` height"))?;
            if raw.len() != h + 1 {
                return Err(parse_err(no, format!("`end` claims height {h} but {} levels were read", raw.len())));
            }
            finished = true;
            continue;
        }
        let mut parts = line.splitn(4, ';');
        let mut field = |what: &str| -> Result<u64, CheckpointError> {
            parts
                .next()
                .ok_or_else(|| parse_err(no, format!("missing {what}")))?
                .parse()
                .map_err(|_| parse_err(no, format!("bad {what}")))
        };
        let h = field("height")? as usize;
        let n = field("count")? as usize;
        let pi = field("prime count")? as usize;
        let body = parts.next().ok_or_else(|| parse_err(no, "missing element list"))?;
        if h != raw.len() {
            return Err(parse_err(no, format!("expected level {}, found {h}", raw.len())));
        }
        let elements: Vec<BigUint> = if body.is_empty() {
            Vec::new()
        } else {
            body.split(',')
                .map(|v| v.parse().map_err(|_| parse_err(no, format!("bad element `{v}`"))))
                .collect::<Result<_, _>>()?
        };
        if elements.len() != n {
            return Err(CheckpointError::Truncated { line: no });
        }
        raw.push((pi, elements));
    }
    if !finished {
        return Err(CheckpointError::Truncated { line: last_line });
    }

    let fits = raw.iter().all(|(_, es)| es.iter().all(|e| e.bits() <= 64));
    if fits {
        let levels = rebuild(&raw, |e| u64::try_from(e).expect("checked width"))?;
        Ok(AnyStructure::Word(finish(rule, levels)?))
    } else {
        let levels = rebuild(&raw, BigUint::clone)?;
        Ok(AnyStructure::Big(finish(rule, levels)?))
    }
}

fn rebuild<N: Natural>(raw: &[(usize, Vec<BigUint>)], conv: impl Fn(&BigUint) -> N) -> Result<Vec<Level<N>>, CheckpointError> {
    use rayon::prelude::*;
    raw.iter()
        .enumerate()
        .map(|(h, (pi, es))| {
            let elements: Vec<N> = es.iter().map(&conv).collect();
            let primes: Vec<N> = elements.par_iter().filter(|e| e.is_prime()).cloned().collect();
            if primes.len() != *pi {
                // line 1 is the header, level h is on line h + 2
                return Err(parse_err(h + 2, format!("recorded {pi} primes, found {}", primes.len())));
            }
            Ok(Level { h, elements, primes, provisional: false })
        })
        .collect()
}

fn finish<N: Natural>(rule: HeightRule, mut levels: Vec<Level<N>>) -> Result<HeightStructure<N>, CheckpointError> {
    if rule.is_provisional() {
        for l in levels.iter_mut().skip(1) {
            l.provisional = true;
        }
    }
    HeightStructure::from_levels(rule, levels).map_err(|m| parse_err(0, m))
}
