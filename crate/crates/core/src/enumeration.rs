//! Level-by-level materialization of the partition structure induced by a rule.
//!
//! Level n is assembled from lower levels: every composite at height n is a
//! prime of height a times an element of height n - a, then the primes placed
//! at height n are added.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;

use rayon::prelude::*;
use thiserror::Error;

use crate::factor;
use crate::primality::{PrimeError, PrimeTable, DEFAULT_SIEVE_CAP};
use crate::rules::{primes_at_height, HeightRule, PlacementContext, RuleError};
use crate::scalar::{Natural, Regime};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("memory budget of {budget} bytes exhausted while building height {height} (last complete level {last_complete})")]
    Budget { height: usize, last_complete: usize, budget: u64 },
    #[error("values at height {height} overflow the machine-word regime")]
    Overflow { height: usize },
    #[error("height {height} is not materialized (structure reaches {available})")]
    NotMaterialized { height: usize, available: usize },
    #[error("prime {prime} is not placed in the materialized structure")]
    NotPlaced { prime: String },
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Prime(#[from] PrimeError),
}

/// Resource limits for an enumeration run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub mem_bytes: u64,
    pub sieve_cap: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { mem_bytes: 8 << 30, sieve_cap: DEFAULT_SIEVE_CAP, workers: None }
    }
}

/// One height class `{m : H(m) = h}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level<N> {
    pub h: usize,
    /// Strictly increasing.
    pub elements: Vec<N>,
    /// The primes among `elements`, ascending.
    pub primes: Vec<N>,
    /// Prime list rests on a scan cap.
    pub provisional: bool,
}

impl<N: Natural> Level<N> {
    /// N_h
    pub fn count(&self) -> usize {
        self.elements.len()
    }

    /// π_h
    pub fn prime_count(&self) -> usize {
        self.primes.len()
    }

    pub fn min(&self) -> Option<&N> {
        self.elements.first()
    }

    pub fn max(&self) -> Option<&N> {
        self.elements.last()
    }

    pub fn contains(&self, m: &N) -> bool {
        self.elements.binary_search(m).is_ok()
    }

    fn approx_bytes(&self) -> u64 {
        self.elements.iter().map(|e| e.approx_bytes() as u64).sum::<u64>()
            + self.primes.iter().map(|e| e.approx_bytes() as u64).sum::<u64>()
    }

    fn convert<M: Natural>(&self, f: impl Fn(&N) -> M) -> Level<M> {
        Level {
            h: self.h,
            elements: self.elements.iter().map(&f).collect(),
            primes: self.primes.iter().map(&f).collect(),
            provisional: self.provisional,
        }
    }
}

/// `(h, N_h, π_h)` row of a structure profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LevelCount {
    pub h: usize,
    pub n: u64,
    pub pi: u64,
}

/// The materialized partition structure of a rule: levels 0..=height.
pub struct HeightStructure<N> {
    rule: HeightRule,
    levels: Vec<Level<N>>,
    placed: OnceLock<HashMap<N, usize>>,
}

impl<N: Natural> Clone for HeightStructure<N> {
    fn clone(&self) -> Self {
        HeightStructure { rule: self.rule.clone(), levels: self.levels.clone(), placed: OnceLock::new() }
    }
}

impl<N: Natural> PartialEq for HeightStructure<N> {
    fn eq(&self, other: &Self) -> bool {
        self.rule == other.rule && self.levels == other.levels
    }
}

impl<N: Natural> fmt::Debug for HeightStructure<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeightStructure")
            .field("rule", &self.rule.name())
            .field("mode", &self.rule.mode)
            .field("height", &self.height())
            .field("regime", &N::REGIME)
            .finish()
    }
}

impl<N: Natural> HeightStructure<N> {
    /// Structure holding only level 0 = {1}.
    pub fn new(rule: HeightRule) -> Self {
        let zero = Level { h: 0, elements: vec![N::one()], primes: Vec::new(), provisional: false };
        HeightStructure { rule, levels: vec![zero], placed: OnceLock::new() }
    }

    /// Reassembles a structure from levels, checking every structural invariant.
    pub fn from_levels(rule: HeightRule, levels: Vec<Level<N>>) -> Result<Self, String> {
        let s = HeightStructure { rule, levels, placed: OnceLock::new() };
        s.check_invariants()?;
        Ok(s)
    }

    pub fn rule(&self) -> &HeightRule {
        &self.rule
    }

    /// Highest materialized height.
    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn regime(&self) -> Regime {
        N::REGIME
    }

    pub fn levels(&self) -> &[Level<N>] {
        &self.levels
    }

    pub fn level(&self, h: usize) -> Result<&Level<N>, EnumError> {
        self.levels.get(h).ok_or(EnumError::NotMaterialized { height: h, available: self.height() })
    }

    /// Full `(h, N_h, π_h)` profile.
    pub fn counts(&self) -> Vec<LevelCount> {
        self.levels
            .iter()
            .map(|l| LevelCount { h: l.h, n: l.count() as u64, pi: l.prime_count() as u64 })
            .collect()
    }

    /// π_1..π_height, the generator profile.
    pub fn pi_profile(&self) -> Vec<u64> {
        self.levels.iter().skip(1).map(|l| l.prime_count() as u64).collect()
    }

    /// All placed primes with their heights, sorted by (height, value).
    pub fn prime_sequence(&self) -> Vec<(N, usize)> {
        self.levels.iter().flat_map(|l| l.primes.iter().map(move |p| (p.clone(), l.h))).collect()
    }

    pub fn approx_bytes(&self) -> u64 {
        self.levels.iter().map(Level::approx_bytes).sum()
    }

    fn placed(&self) -> &HashMap<N, usize> {
        self.placed.get_or_init(|| self.prime_sequence().into_iter().collect())
    }

    /// Height of a placed prime.
    pub fn prime_height(&self, p: &N) -> Option<usize> {
        self.placed().get(p).copied()
    }

    /// H(m) from the materialized prime placement.
    ///
    /// Every prime factor of m must already be placed; squarefree structures
    /// collapse exponents to 1.
    pub fn eval_height(&self, m: &N) -> Result<u64, EnumError> {
        let sf = self.rule.is_squarefree();
        let factors = self.factor_over_placed(m)?;
        let mut total = 0u64;
        for (p, e) in factors {
            let h = self.prime_height(&p).ok_or_else(|| EnumError::NotPlaced { prime: p.to_string() })? as u64;
            total += if sf { h } else { h * e as u64 };
        }
        Ok(total)
    }

    /// a·H(m) + b·Ω(m).
    pub fn eval_scaled(&self, a: u64, b: u64, m: &N) -> Result<u64, EnumError> {
        let h = self.eval_height(m)?;
        let omega: u64 = self.factor_over_placed(m)?.iter().map(|&(_, e)| e as u64).sum();
        Ok(a * h + b * omega)
    }

    fn factor_over_placed(&self, m: &N) -> Result<Vec<(N, u32)>, EnumError> {
        if m.is_zero() {
            return Err(EnumError::Rule(RuleError::InvalidParameter("height is defined for m >= 1".into())));
        }
        if let Some(w) = m.to_u64() {
            return Ok(factor::factorize(w).into_iter().map(|(p, e)| (N::from_word(p), e)).collect());
        }
        // beyond machine words: peel off placed primes in ascending order
        let mut placed: Vec<&N> = self.placed().keys().collect();
        placed.sort_unstable();
        let mut rest = m.clone();
        let mut out = Vec::new();
        for p in placed {
            if rest.is_one() {
                break;
            }
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest = rest / p.clone();
                e += 1;
            }
            if e > 0 {
                out.push((p.clone(), e));
            }
        }
        if !rest.is_one() {
            return Err(EnumError::NotPlaced { prime: rest.to_string() });
        }
        Ok(out)
    }

    /// Checks level-0, ordering, prime-list and squarefree invariants.
    pub fn check_invariants(&self) -> Result<(), String> {
        let first = self.levels.first().ok_or("missing level 0")?;
        if first.elements != [N::one()] || !first.primes.is_empty() {
            return Err("level 0 must be exactly {1}".into());
        }
        for (h, l) in self.levels.iter().enumerate() {
            if l.h != h {
                return Err(format!("level at position {h} is labelled {}", l.h));
            }
            if l.elements.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("level {h} is not strictly increasing"));
            }
            if l.primes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("prime list of level {h} is not strictly increasing"));
            }
            if l.primes.iter().any(|p| !l.contains(p)) {
                return Err(format!("level {h} lists a prime outside its elements"));
            }
        }
        Ok(())
    }

    fn invalidate(&mut self) {
        self.placed = OnceLock::new();
    }

    fn push_level(&mut self, level: Level<N>) {
        self.levels.push(level);
        self.invalidate();
    }

    /// Drops levels above `h`.
    pub fn truncate(&mut self, h: usize) {
        self.levels.truncate(h + 1);
        self.invalidate();
    }

    pub fn to_big(&self) -> HeightStructure<BigUint> {
        HeightStructure {
            rule: self.rule.clone(),
            levels: self.levels.iter().map(|l| l.convert(Natural::to_biguint)).collect(),
            placed: OnceLock::new(),
        }
    }
}

/// Drives level construction; owns the prime table shared across levels.
pub struct Enumerator {
    ctx: PlacementContext,
    budget: Budget,
    pool: Option<rayon::ThreadPool>,
}

impl Enumerator {
    pub fn new(budget: Budget) -> Result<Self, EnumError> {
        let table = PrimeTable::sieve_with_cap(1 << 16, budget.sieve_cap.max(1 << 16))?;
        let pool = match budget.workers {
            Some(n) => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| EnumError::Rule(RuleError::InvalidParameter(e.to_string())))?,
            ),
            None => None,
        };
        Ok(Enumerator { ctx: PlacementContext::new(table), budget, pool })
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    pub fn prime_table(&self) -> &PrimeTable {
        &self.ctx.table
    }

    /// Materializes levels up to `h_max`. On error the structure keeps every
    /// level that was completed.
    pub fn extend<N: Natural>(&mut self, s: &mut HeightStructure<N>, h_max: usize) -> Result<(), EnumError> {
        let pool = self.pool.take();
        let result = match &pool {
            Some(p) => p.install(|| self.extend_inner(s, h_max)),
            None => self.extend_inner(s, h_max),
        };
        self.pool = pool;
        result
    }

    fn extend_inner<N: Natural>(&mut self, s: &mut HeightStructure<N>, h_max: usize) -> Result<(), EnumError> {
        let mut used = s.approx_bytes();
        for n in s.height() + 1..=h_max {
            let level = self.build_level(s, n, used)?;
            used += level.approx_bytes();
            if used > self.budget.mem_bytes {
                return Err(EnumError::Budget { height: n, last_complete: n - 1, budget: self.budget.mem_bytes });
            }
            s.push_level(level);
        }
        Ok(())
    }

    fn build_level<N: Natural>(&mut self, s: &HeightStructure<N>, n: usize, used: u64) -> Result<Level<N>, EnumError> {
        let levels = &s.levels;
        let sf = s.rule.is_squarefree();

        // A composite at height n has a least-height prime factor q with
        // H(q) = a and cofactor at height n - a >= a, so a <= n/2 suffices.
        let estimate: u64 = (1..=n / 2)
            .map(|a| {
                let per = levels[n - a].elements.last().map_or(8, |e| e.approx_bytes() as u64 + 8);
                levels[a].primes.len() as u64 * levels[n - a].elements.len() as u64 * per
            })
            .sum();
        if used.saturating_add(estimate) > self.budget.mem_bytes {
            return Err(EnumError::Budget { height: n, last_complete: n - 1, budget: self.budget.mem_bytes });
        }

        let streams: Result<Vec<Vec<N>>, EnumError> = (1..=n / 2)
            .into_par_iter()
            .map(|a| {
                let primes = &levels[a].primes;
                let cofactors = &levels[n - a].elements;
                let mut out = Vec::with_capacity(primes.len() * cofactors.len());
                for p in primes {
                    for e in cofactors {
                        if sf && e.is_multiple_of(p) {
                            continue;
                        }
                        out.push(p.checked_mul(e).ok_or(EnumError::Overflow { height: n })?);
                    }
                }
                Ok(out)
            })
            .collect();
        let mut composites: Vec<N> = streams?.into_iter().flatten().collect();
        composites.par_sort_unstable();
        composites.dedup();

        let batch = primes_at_height(&s.rule, n, levels, &mut self.ctx).map_err(|e| match e {
            RuleError::Overflow(_) => EnumError::Overflow { height: n },
            other => EnumError::Rule(other),
        })?;

        let mut elements = Vec::with_capacity(composites.len() + batch.primes.len());
        let (mut i, mut j) = (0, 0);
        while i < composites.len() || j < batch.primes.len() {
            let take_prime = j < batch.primes.len() && (i == composites.len() || batch.primes[j] < composites[i]);
            if take_prime {
                elements.push(batch.primes[j].clone());
                j += 1;
            } else {
                elements.push(composites[i].clone());
                i += 1;
            }
        }
        Ok(Level { h: n, elements, primes: batch.primes, provisional: batch.provisional })
    }
}

/// A structure in whichever integer regime it needed.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyStructure {
    Word(HeightStructure<u64>),
    Big(HeightStructure<BigUint>),
}

/// Dispatches a generic expression over both regimes.
#[macro_export]
macro_rules! with_structure {
    ($any:expr, $s:ident => $body:expr) => {
        match $any {
            $crate::enumeration::AnyStructure::Word($s) => $body,
            $crate::enumeration::AnyStructure::Big($s) => $body,
        }
    };
}

impl AnyStructure {
    pub fn rule(&self) -> &HeightRule {
        with_structure!(self, s => s.rule())
    }

    pub fn height(&self) -> usize {
        with_structure!(self, s => s.height())
    }

    pub fn regime(&self) -> Regime {
        with_structure!(self, s => s.regime())
    }

    pub fn counts(&self) -> Vec<LevelCount> {
        with_structure!(self, s => s.counts())
    }

    pub fn pi_profile(&self) -> Vec<u64> {
        with_structure!(self, s => s.pi_profile())
    }

    /// Elements of level h rendered in decimal.
    pub fn level_strings(&self, h: usize) -> Result<Vec<String>, EnumError> {
        with_structure!(self, s => Ok(s.level(h)?.elements.iter().map(|e| e.to_string()).collect()))
    }

    pub fn prime_strings(&self, h: usize) -> Result<Vec<String>, EnumError> {
        with_structure!(self, s => Ok(s.level(h)?.primes.iter().map(|e| e.to_string()).collect()))
    }

    /// Converts to the arbitrary-precision regime.
    pub fn into_big(self) -> HeightStructure<BigUint> {
        match self {
            AnyStructure::Word(s) => s.to_big(),
            AnyStructure::Big(s) => s,
        }
    }

    pub fn as_word(&self) -> Option<&HeightStructure<u64>> {
        match self {
            AnyStructure::Word(s) => Some(s),
            AnyStructure::Big(_) => None,
        }
    }

    /// Extends in place, promoting to big integers when words overflow.
    pub fn extend(&mut self, enumerator: &mut Enumerator, h_max: usize) -> Result<(), EnumError> {
        loop {
            let result = match self {
                AnyStructure::Word(s) => enumerator.extend(s, h_max),
                AnyStructure::Big(s) => enumerator.extend(s, h_max),
            };
            match (result, &*self) {
                (Err(EnumError::Overflow { .. }), AnyStructure::Word(s)) => {
                    *self = AnyStructure::Big(s.to_big());
                }
                (other, _) => return other,
            }
        }
    }
}

/// Enumeration that ended early, keeping the last complete level.
#[derive(Debug)]
pub struct Partial {
    pub structure: AnyStructure,
    pub error: EnumError,
}

impl fmt::Display for Partial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (kept heights 0..={})", self.error, self.structure.height())
    }
}

impl std::error::Error for Partial {}

/// Materializes `rule` to `h_max`, choosing the integer regime automatically.
pub fn extend_to(rule: &HeightRule, h_max: usize, budget: &Budget) -> Result<AnyStructure, Partial> {
    let mut structure = AnyStructure::Word(HeightStructure::new(rule.clone()));
    let mut enumerator = match Enumerator::new(*budget) {
        Ok(e) => e,
        Err(error) => return Err(Partial { structure, error }),
    };
    match structure.extend(&mut enumerator, h_max) {
        Ok(()) => Ok(structure),
        Err(error) => Err(Partial { structure, error }),
    }
}

/// Word-regime enumeration; fails on overflow instead of promoting.
pub fn extend_words(rule: &HeightRule, h_max: usize, budget: &Budget) -> Result<HeightStructure<u64>, EnumError> {
    let mut s = HeightStructure::new(rule.clone());
    Enumerator::new(*budget)?.extend(&mut s, h_max)?;
    Ok(s)
}
