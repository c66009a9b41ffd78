//! Getting a materialized structure: from a checkpoint, by enumeration, or both.

use std::env;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use heightlab::checkpoint;
use heightlab::enumeration::Enumerator;
use heightlab::primality::DEFAULT_SIEVE_CAP;
use heightlab::{builtin_rule, with_structure, AnyStructure, Budget, HeightRule, HeightStructure};

use crate::error::CliError;
use crate::{Global, StructureArgs};

pub const CACHE_ENV: &str = "HEIGHTLAB_CACHE";

pub fn budget(g: &Global) -> Budget {
    let d = Budget::default();
    Budget {
        mem_bytes: g.mem_budget.unwrap_or(d.mem_bytes),
        sieve_cap: g.sieve_cap.unwrap_or(DEFAULT_SIEVE_CAP),
        workers: g.workers.map(usize::from),
    }
}

/// Explicit path (relative ones under the cache directory), else a file
/// named after the rule inside the cache directory, else none.
fn checkpoint_path(explicit: Option<&Path>, rule: &HeightRule) -> Option<PathBuf> {
    let cache = env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    match (explicit, cache) {
        (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(dir)) => {
            let stem: String =
                rule.name().chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
            Some(dir.join(format!("{stem}-{}.hlc", rule.mode)))
        }
        (None, None) => None,
    }
}

/// Structure holding exactly heights 0..=h_max.
pub fn obtain(args: &StructureArgs, h_max: usize, g: &Global) -> Result<AnyStructure, CliError> {
    let rule = builtin_rule(&args.rule, args.mode)?;
    let path = checkpoint_path(args.checkpoint.as_deref(), &rule);
    let mut s = match &path {
        Some(p) if p.exists() => checkpoint::load_for(p, &rule)?,
        _ => AnyStructure::Word(HeightStructure::new(rule)),
    };
    if s.height() < h_max {
        let deadline = g.time_budget.map(|secs| Instant::now() + Duration::from_secs_f64(secs.max(0.0)));
        let result = grow(&mut s, h_max, &budget(g), deadline);
        if let Some(p) = &path {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            checkpoint::save_any(&s, p)?;
        }
        result?;
    }
    with_structure!(&mut s, st => st.truncate(h_max));
    Ok(s)
}

fn grow(s: &mut AnyStructure, h_max: usize, budget: &Budget, deadline: Option<Instant>) -> Result<(), CliError> {
    let mut enumerator = Enumerator::new(*budget)?;
    for h in s.height() + 1..=h_max {
        s.extend(&mut enumerator, h).map_err(|e| {
            CliError::from(e).with_context(format!("kept heights 0..={}", s.height()))
        })?;
        if deadline.is_some_and(|d| Instant::now() > d) && h < h_max {
            return Err(CliError::Resource(format!("time budget exhausted after height {h} of {h_max}")));
        }
    }
    Ok(())
}
