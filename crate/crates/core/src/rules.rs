//! Catalog of height functions.
//!
//! A height function is completely additive, sends no prime to 0 and only
//! finitely many primes to each positive height. It is fixed by its values on
//! primes, described here declaratively by a [`HeightRule`]:
//!
//! - closed forms `H(p_i) = f(i)` (or `f(p_i)`),
//! - index recursion `H(p_i) = H(f(i)) + j`,
//! - successor recursion: primes at height h are the primes `μ·a + ε` with
//!   `a` at height h-1 (`H(p) = H(p-1)` is `μ = 2, ε = +1`).
//!
//! In squarefree mode the function lives on classes `Π p^α ~ Π p` and every
//! API speaks the radical representative.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use thiserror::Error;

use rayon::prelude::*;

use crate::enumeration::Level;
use crate::factor;
use crate::scalar::Natural;
use crate::primality::{is_prime_u64, PrimeError, PrimeTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("invalid rule parameter: {0}")]
    InvalidParameter(String),
    #[error("prime {prime} has no height under this rule")]
    NotPlaced { prime: String },
    #[error("height of {0} overflows")]
    Overflow(String),
    #[error(transparent)]
    Prime(#[from] PrimeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Plain,
    Squarefree,
}

impl Mode {
    pub fn is_squarefree(self) -> bool {
        self == Mode::Squarefree
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Plain => "plain",
            Mode::Squarefree => "squarefree",
        })
    }
}

impl FromStr for Mode {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Mode::Plain),
            "squarefree" => Ok(Mode::Squarefree),
            other => Err(RuleError::InvalidParameter(format!("mode `{other}`"))),
        }
    }
}

pub const DEFAULT_FLOOR_RATIO_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosedForm {
    /// `H(p_i) = i`
    Index,
    /// `H(p) = p`
    PrimeValue,
    /// `H(p_i) = ⌈i/k⌉`, k generators per height.
    CeilDiv(u64),
    /// `H(p_i) = n` for `n(n-1)/2 < i <= n(n+1)/2`, n generators at height n.
    BlockTriangular,
    /// `H(p_i) = ⌊p_i / i⌋`; only indices up to the cap are scanned.
    FloorRatio { index_cap: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexMap {
    Identity,
    Square,
}

impl IndexMap {
    pub fn apply(self, i: u64) -> Option<u64> {
        match self {
            IndexMap::Identity => Some(i),
            IndexMap::Square => i.checked_mul(i),
        }
    }

    /// All i with f(i) = a.
    pub fn invert(self, a: u64) -> Option<u64> {
        match self {
            IndexMap::Identity => (a >= 1).then_some(a),
            IndexMap::Square => {
                let r = (a as f64).sqrt().round() as u64;
                (r >= 1 && r.checked_mul(r) == Some(a)).then_some(r)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    ClosedForm(ClosedForm),
    IndexRecursive { map: IndexMap, shift: u64 },
    SuccessorRecursive { multiplier: u64, offset: i64 },
}

/// Primes whose heights are fixed up front, anchoring a recursion.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BaseAssignment {
    entries: Vec<(u64, u64)>,
}

impl BaseAssignment {
    pub fn new(mut entries: Vec<(u64, u64)>) -> Result<Self, RuleError> {
        entries.sort_unstable();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(RuleError::InvalidParameter(format!("base prime {} listed twice", w[0].0)));
            }
        }
        for &(p, h) in &entries {
            if !is_prime_u64(p) {
                return Err(RuleError::InvalidParameter(format!("base value {p} is not prime")));
            }
            if h == 0 {
                return Err(RuleError::InvalidParameter(format!("base prime {p} mapped to height 0")));
            }
        }
        Ok(BaseAssignment { entries })
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    pub fn height_of(&self, p: u64) -> Option<u64> {
        self.entries.iter().find(|&&(q, _)| q == p).map(|&(_, h)| h)
    }

    pub fn contains(&self, p: u64) -> bool {
        self.height_of(p).is_some()
    }

    pub fn primes_at(&self, h: u64) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().filter(move |&&(_, g)| g == h).map(|&(p, _)| p)
    }
}

/// Declarative description of a completely additive height function.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeightRule {
    pub kind: RuleKind,
    pub mode: Mode,
    pub base: BaseAssignment,
}

pub const BUILTIN_NAMES: &[&str] = &[
    "partition",
    "prime_partition",
    "ceil_div(k)",
    "plane_partition",
    "floor_ratio",
    "matula",
    "matula_square",
    "shapiro",
    "a064097",
    "dedekind",
];

/// Looks up a catalog rule by name, e.g. `shapiro`, `ceil_div(3)` or `floor_ratio(100000)`.
///
/// Custom recursions are spelled `successor(μ,ε,p:h/p:h...)` and
/// `index_recursive(identity|square,j)`; [`HeightRule::name`] produces the same text.
pub fn builtin_rule(name: &str, mode: Mode) -> Result<HeightRule, RuleError> {
    let name = name.trim();
    let (head, inner) = match name.split_once('(') {
        Some((head, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| RuleError::InvalidParameter(format!("unbalanced parameters in `{name}`")))?;
            (head.trim(), Some(inner.trim()))
        }
        None => (name, None),
    };
    let natural = |v: &str| -> Result<u64, RuleError> {
        v.trim().parse().map_err(|_| RuleError::InvalidParameter(format!("`{v}` is not a natural")))
    };
    let rule = |kind, base| HeightRule { kind, mode, base };
    match head {
        "successor" => return parse_successor(inner.unwrap_or(""), mode),
        "index_recursive" => {
            let inner = inner.ok_or_else(|| RuleError::InvalidParameter("index_recursive(map,shift)".into()))?;
            let (map, shift) = inner
                .split_once(',')
                .ok_or_else(|| RuleError::InvalidParameter("index_recursive(map,shift)".into()))?;
            let map = match map.trim() {
                "identity" => IndexMap::Identity,
                "square" => IndexMap::Square,
                other => return Err(RuleError::InvalidParameter(format!("index map `{other}`"))),
            };
            let shift = natural(shift)?;
            if shift == 0 {
                return Err(RuleError::InvalidParameter("index recursion needs shift >= 1".into()));
            }
            return Ok(rule(RuleKind::IndexRecursive { map, shift }, BaseAssignment::default()));
        }
        _ => {}
    }
    let arg = inner.map(natural).transpose()?;
    let base_two = || BaseAssignment::new(vec![(2, 1)]);
    let no_arg = |r: HeightRule| match arg {
        None => Ok(r),
        Some(_) => Err(RuleError::InvalidParameter(format!("`{head}` takes no parameter"))),
    };
    match head {
        "partition" => no_arg(rule(RuleKind::ClosedForm(ClosedForm::Index), BaseAssignment::default())),
        "prime_partition" => {
            no_arg(rule(RuleKind::ClosedForm(ClosedForm::PrimeValue), BaseAssignment::default()))
        }
        "plane_partition" => {
            no_arg(rule(RuleKind::ClosedForm(ClosedForm::BlockTriangular), BaseAssignment::default()))
        }
        "ceil_div" => match arg {
            Some(k) if k >= 1 => Ok(rule(RuleKind::ClosedForm(ClosedForm::CeilDiv(k)), BaseAssignment::default())),
            Some(_) => Err(RuleError::InvalidParameter("ceil_div needs k >= 1".into())),
            None => Err(RuleError::InvalidParameter("ceil_div needs a parameter, e.g. ceil_div(3)".into())),
        },
        "floor_ratio" => {
            let index_cap = arg.unwrap_or(DEFAULT_FLOOR_RATIO_CAP);
            if index_cap == 0 {
                return Err(RuleError::InvalidParameter("floor_ratio cap must be positive".into()));
            }
            Ok(rule(RuleKind::ClosedForm(ClosedForm::FloorRatio { index_cap }), BaseAssignment::default()))
        }
        "matula" => no_arg(rule(
            RuleKind::IndexRecursive { map: IndexMap::Identity, shift: 1 },
            BaseAssignment::default(),
        )),
        "matula_square" => no_arg(rule(
            RuleKind::IndexRecursive { map: IndexMap::Square, shift: 1 },
            BaseAssignment::default(),
        )),
        "shapiro" => no_arg(rule(RuleKind::SuccessorRecursive { multiplier: 2, offset: 1 }, base_two()?)),
        "a064097" => no_arg(rule(RuleKind::SuccessorRecursive { multiplier: 1, offset: 1 }, base_two()?)),
        "dedekind" => {
            let base = match mode {
                Mode::Plain => base_two()?,
                Mode::Squarefree => BaseAssignment::new(vec![(2, 1), (3, 1)])?,
            };
            no_arg(rule(RuleKind::SuccessorRecursive { multiplier: 2, offset: -1 }, base))
        }
        _ => Err(RuleError::UnknownRule(name.to_string())),
    }
}

fn parse_successor(inner: &str, mode: Mode) -> Result<HeightRule, RuleError> {
    let bad = || RuleError::InvalidParameter(format!("expected successor(mu,eps,p:h/...), got `successor({inner})`"));
    let fields: Vec<&str> = inner.split(',').map(str::trim).collect();
    let [mu, eps, base] = fields[..] else { return Err(bad()) };
    let multiplier: u64 = mu.parse().map_err(|_| bad())?;
    let offset: i64 = eps.trim_start_matches('+').parse().map_err(|_| bad())?;
    if multiplier == 0 || offset.unsigned_abs() != 1 {
        return Err(RuleError::InvalidParameter("successor needs mu >= 1 and eps = +1 or -1".into()));
    }
    let entries = base
        .split('/')
        .filter(|e| !e.is_empty())
        .map(|e| {
            let (p, h) = e.split_once(':').ok_or_else(bad)?;
            Ok((p.trim().parse().map_err(|_| bad())?, h.trim().parse().map_err(|_| bad())?))
        })
        .collect::<Result<Vec<(u64, u64)>, RuleError>>()?;
    Ok(HeightRule { kind: RuleKind::SuccessorRecursive { multiplier, offset }, mode, base: BaseAssignment::new(entries)? })
}

impl HeightRule {
    /// Canonical name; catalog rules round-trip through [`builtin_rule`].
    pub fn name(&self) -> String {
        let base2 = self.base.entries() == [(2, 1)];
        match self.kind {
            RuleKind::ClosedForm(ClosedForm::Index) => "partition".into(),
            RuleKind::ClosedForm(ClosedForm::PrimeValue) => "prime_partition".into(),
            RuleKind::ClosedForm(ClosedForm::BlockTriangular) => "plane_partition".into(),
            RuleKind::ClosedForm(ClosedForm::CeilDiv(k)) => format!("ceil_div({k})"),
            RuleKind::ClosedForm(ClosedForm::FloorRatio { index_cap }) if index_cap == DEFAULT_FLOOR_RATIO_CAP => {
                "floor_ratio".into()
            }
            RuleKind::ClosedForm(ClosedForm::FloorRatio { index_cap }) => format!("floor_ratio({index_cap})"),
            RuleKind::IndexRecursive { map: IndexMap::Identity, shift: 1 } => "matula".into(),
            RuleKind::IndexRecursive { map: IndexMap::Square, shift: 1 } => "matula_square".into(),
            RuleKind::SuccessorRecursive { multiplier: 2, offset: 1 } if base2 => "shapiro".into(),
            RuleKind::SuccessorRecursive { multiplier: 1, offset: 1 } if base2 => "a064097".into(),
            RuleKind::SuccessorRecursive { multiplier: 2, offset: -1 }
                if base2 || self.base.entries() == [(2, 1), (3, 1)] =>
            {
                "dedekind".into()
            }
            RuleKind::IndexRecursive { map, shift } => {
                let map = match map {
                    IndexMap::Identity => "identity",
                    IndexMap::Square => "square",
                };
                format!("index_recursive({map},{shift})")
            }
            RuleKind::SuccessorRecursive { multiplier, offset } => {
                let base: Vec<String> = self.base.entries().iter().map(|(p, h)| format!("{p}:{h}")).collect();
                format!("successor({multiplier},{offset:+},{})", base.join("/"))
            }
        }
    }

    pub fn is_squarefree(&self) -> bool {
        self.mode.is_squarefree()
    }

    /// Levels of this rule can only be listed up to a scan cap.
    pub fn is_provisional(&self) -> bool {
        matches!(self.kind, RuleKind::ClosedForm(ClosedForm::FloorRatio { .. }))
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Prime-index range `(lo, hi]` placed at height h by a closed-form index rule.
    pub(crate) fn closed_index_range(&self, h: u64) -> Option<(u64, u64)> {
        match self.kind {
            RuleKind::ClosedForm(ClosedForm::Index) => Some((h.saturating_sub(1), h)),
            RuleKind::ClosedForm(ClosedForm::CeilDiv(k)) => Some((k * h.saturating_sub(1), k * h)),
            RuleKind::ClosedForm(ClosedForm::BlockTriangular) => {
                Some((h * h.saturating_sub(1) / 2, h * (h + 1) / 2))
            }
            _ => None,
        }
    }
}

impl fmt::Display for HeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.name(), self.mode)
    }
}

/// Memoized point evaluation of a rule on machine words, by factorization.
///
/// Recursive rules are resolved by walking the recursion downward, so no
/// materialized structure is needed.
pub struct Evaluator {
    rule: HeightRule,
    table: RwLock<PrimeTable>,
    memo: RwLock<HashMap<u64, Option<u64>>>,
}

impl Evaluator {
    pub fn new(rule: HeightRule) -> Self {
        Self::with_table(rule, PrimeTable::sieve_to(1 << 16).expect("static limit"))
    }

    pub fn with_table(rule: HeightRule, table: PrimeTable) -> Self {
        Evaluator { rule, table: RwLock::new(table), memo: RwLock::new(HashMap::new()) }
    }

    pub fn rule(&self) -> &HeightRule {
        &self.rule
    }

    fn prime_index(&self, p: u64) -> Result<u64, RuleError> {
        {
            let t = self.table.read().expect("table lock");
            if p <= t.limit() {
                return t.index_of(p)?.ok_or_else(|| RuleError::InvalidParameter(format!("{p} is not prime")));
            }
        }
        let mut t = self.table.write().expect("table lock");
        t.index_of_extending(p)?.ok_or_else(|| RuleError::InvalidParameter(format!("{p} is not prime")))
    }

    /// Height of a prime, or `None` when the prime is never placed (squarefree recursions).
    pub fn prime_height(&self, p: u64) -> Result<Option<u64>, RuleError> {
        if let Some(&h) = self.memo.read().expect("memo lock").get(&p) {
            return Ok(h);
        }
        let h = self.compute_prime_height(p)?;
        self.memo.write().expect("memo lock").insert(p, h);
        Ok(h)
    }

    fn compute_prime_height(&self, p: u64) -> Result<Option<u64>, RuleError> {
        if let Some(h) = self.rule.base.height_of(p) {
            return Ok(Some(h));
        }
        let sf = self.rule.is_squarefree();
        match self.rule.kind {
            RuleKind::ClosedForm(form) => {
                let h = match form {
                    ClosedForm::PrimeValue => p,
                    ClosedForm::Index => self.prime_index(p)?,
                    ClosedForm::CeilDiv(k) => self.prime_index(p)?.div_ceil(k),
                    ClosedForm::BlockTriangular => {
                        let i = self.prime_index(p)?;
                        let mut n = ((2.0 * i as f64).sqrt() as u64).max(1);
                        while n * (n + 1) / 2 < i {
                            n += 1;
                        }
                        while n > 1 && (n - 1) * n / 2 >= i {
                            n -= 1;
                        }
                        n
                    }
                    ClosedForm::FloorRatio { .. } => p / self.prime_index(p)?,
                };
                Ok(Some(h))
            }
            RuleKind::IndexRecursive { map, shift } => {
                let i = self.prime_index(p)?;
                let a = map.apply(i).ok_or_else(|| RuleError::Overflow(p.to_string()))?;
                if sf && !factor::is_squarefree(a) {
                    return Ok(None);
                }
                Ok(self.height_opt(a)?.map(|h| h + shift))
            }
            RuleKind::SuccessorRecursive { multiplier, offset } => {
                let shifted = if offset >= 0 { p.checked_sub(offset as u64) } else { p.checked_add(offset.unsigned_abs()) };
                let Some(shifted) = shifted else { return Ok(None) };
                if shifted == 0 || shifted % multiplier != 0 {
                    return Ok(None);
                }
                let a = shifted / multiplier;
                if sf && (!factor::is_squarefree(a) || (multiplier > 1 && a % multiplier == 0)) {
                    return Ok(None);
                }
                Ok(self.height_opt(a)?.map(|h| h + 1))
            }
        }
    }

    fn height_opt(&self, m: u64) -> Result<Option<u64>, RuleError> {
        let mut total = 0u64;
        for (p, e) in factor::factorize(m) {
            let Some(h) = self.prime_height(p)? else { return Ok(None) };
            let e = if self.rule.is_squarefree() { 1 } else { e as u64 };
            total = h
                .checked_mul(e)
                .and_then(|v| total.checked_add(v))
                .ok_or_else(|| RuleError::Overflow(m.to_string()))?;
        }
        Ok(Some(total))
    }

    /// H(m) = Σ α_p H(p); squarefree mode collapses exponents to 1.
    pub fn height(&self, m: u64) -> Result<u64, RuleError> {
        if m == 0 {
            return Err(RuleError::InvalidParameter("height is defined for m >= 1".into()));
        }
        let mut total = 0u64;
        for (p, e) in factor::factorize(m) {
            let h = self.prime_height(p)?.ok_or_else(|| RuleError::NotPlaced { prime: p.to_string() })?;
            let e = if self.rule.is_squarefree() { 1 } else { e as u64 };
            total += h * e;
        }
        Ok(total)
    }

    /// a·H(m) + b·Ω(m).
    pub fn scaled(&self, a: u64, b: u64, m: u64) -> Result<u64, RuleError> {
        let h = self.height(m)?;
        let omega = factor::big_omega(m) as u64;
        a.checked_mul(h)
            .zip(b.checked_mul(omega))
            .and_then(|(x, y)| x.checked_add(y))
            .ok_or_else(|| RuleError::Overflow(m.to_string()))
    }
}

/// Prime table plus per-rule scan caches shared across levels of one enumeration.
pub struct PlacementContext {
    pub table: PrimeTable,
    floor_ratio: Option<(u64, BTreeMap<u64, Vec<u64>>)>,
}

impl PlacementContext {
    pub fn new(table: PrimeTable) -> Self {
        PlacementContext { table, floor_ratio: None }
    }

    fn floor_ratio_levels(&mut self, index_cap: u64) -> Result<&BTreeMap<u64, Vec<u64>>, RuleError> {
        if self.floor_ratio.as_ref().map(|(c, _)| *c) != Some(index_cap) {
            self.table.ensure_index(index_cap)?;
            let mut by_height: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
            for (i, &p) in self.table.primes()[..index_cap as usize].iter().enumerate() {
                by_height.entry(p as u64 / (i as u64 + 1)).or_default().push(p as u64);
            }
            self.floor_ratio = Some((index_cap, by_height));
        }
        Ok(&self.floor_ratio.as_ref().expect("just filled").1)
    }
}

/// Generators placed at one height.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeBatch<N> {
    pub primes: Vec<N>,
    /// Set when completeness rests on a scan cap rather than a proof.
    pub provisional: bool,
}

/// The complete ascending list of primes with `H(p) = h`.
///
/// `levels` must hold every level below h (index = height).
pub fn primes_at_height<N: Natural>(
    rule: &HeightRule,
    h: usize,
    levels: &[Level<N>],
    ctx: &mut PlacementContext,
) -> Result<PrimeBatch<N>, RuleError> {
    debug_assert!(levels.len() >= h);
    let hu = h as u64;
    let mut provisional = false;
    let mut primes: Vec<N> = Vec::new();
    if h == 0 {
        return Ok(PrimeBatch { primes, provisional });
    }
    match rule.kind {
        RuleKind::ClosedForm(ClosedForm::PrimeValue) => {
            if is_prime_u64(hu) {
                primes.push(N::from_word(hu));
            }
        }
        RuleKind::ClosedForm(ClosedForm::FloorRatio { index_cap }) => {
            provisional = true;
            if let Some(ps) = ctx.floor_ratio_levels(index_cap)?.get(&hu) {
                primes.extend(ps.iter().map(|&p| N::from_word(p)));
            }
        }
        RuleKind::ClosedForm(_) => {
            let (lo, hi) = rule.closed_index_range(hu).expect("index-range closed form");
            if hi > lo {
                ctx.table.ensure_index(hi)?;
                for i in lo + 1..=hi {
                    primes.push(N::from_word(ctx.table.nth(i)?));
                }
            }
        }
        RuleKind::IndexRecursive { map, shift } => {
            if hu >= shift {
                let source = &levels[(hu - shift) as usize].elements;
                let mut indices = Vec::new();
                for a in source {
                    let a = a.to_u64().ok_or_else(|| RuleError::Overflow(a.to_string()))?;
                    if let Some(i) = map.invert(a) {
                        indices.push(i);
                    }
                }
                if let Some(&max) = indices.iter().max() {
                    ctx.table.ensure_index(max)?;
                }
                for i in indices {
                    primes.push(N::from_word(ctx.table.nth(i)?));
                }
            }
        }
        RuleKind::SuccessorRecursive { multiplier, offset } => {
            let mu = N::from_word(multiplier);
            let eps = N::from_word(offset.unsigned_abs());
            let sf = rule.is_squarefree();
            let base = &rule.base;
            let found: Result<Vec<Option<N>>, RuleError> = levels[h - 1]
                .elements
                .par_iter()
                .map(|a| {
                    if sf && multiplier > 1 && a.is_multiple_of(&mu) {
                        return Ok(None);
                    }
                    let scaled = a.checked_mul(&mu).ok_or_else(|| RuleError::Overflow(a.to_string()))?;
                    let c = if offset >= 0 {
                        scaled.checked_add(&eps).ok_or_else(|| RuleError::Overflow(a.to_string()))?
                    } else {
                        match scaled.checked_sub(&eps) {
                            Some(c) => c,
                            None => return Ok(None),
                        }
                    };
                    if c.to_u64().is_some_and(|w| base.contains(w)) || !c.is_prime() {
                        return Ok(None);
                    }
                    Ok(Some(c))
                })
                .collect();
            primes = found?.into_iter().flatten().collect();
            primes.extend(base.primes_at(hu).map(N::from_word));
            primes.sort_unstable();
            primes.dedup();
        }
    }
    if !matches!(rule.kind, RuleKind::SuccessorRecursive { .. }) {
        primes.extend(rule.base.primes_at(hu).map(N::from_word));
        primes.sort_unstable();
        primes.dedup();
    }
    Ok(PrimeBatch { primes, provisional })
}

/// Outcome of [`validate_rule`].
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub rule: String,
    pub probe_height: usize,
    /// π_h for h = 1..=probe_height.
    pub primes_per_height: BTreeMap<usize, usize>,
    pub provisional: bool,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the height-function axioms up to `probe_height`.
///
/// Structural problems are report content; only resource failures are errors.
pub fn validate_rule(rule: &HeightRule, probe_height: usize) -> Result<ValidationReport, crate::enumeration::EnumError> {
    let mut violations = Vec::new();
    for &(p, h) in rule.base.entries() {
        if h == 0 {
            violations.push(format!("base prime {p} mapped to height 0"));
        }
    }
    match rule.kind {
        RuleKind::ClosedForm(ClosedForm::CeilDiv(0)) => violations.push("ceil_div(0) is undefined".into()),
        RuleKind::IndexRecursive { shift: 0, .. } => violations.push("index recursion needs shift >= 1".into()),
        RuleKind::SuccessorRecursive { multiplier: 0, .. } => violations.push("successor multiplier must be positive".into()),
        _ => {}
    }
    let mut primes_per_height = BTreeMap::new();
    if violations.is_empty() {
        let structure = crate::enumeration::extend_to(rule, probe_height, &crate::enumeration::Budget::default())
            .map_err(|partial| partial.error)?;
        let counts = structure.counts();
        if counts[0].pi != 0 {
            violations.push("a prime was placed at height 0".into());
        }
        for c in counts.iter().skip(1) {
            primes_per_height.insert(c.h, c.pi as usize);
        }
    }
    Ok(ValidationReport {
        rule: rule.name(),
        probe_height,
        primes_per_height,
        provisional: rule.is_provisional(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(name: &str, mode: Mode) -> Evaluator {
        Evaluator::new(builtin_rule(name, mode).unwrap())
    }

    #[test]
    fn catalog_names_round_trip() {
        for name in ["partition", "prime_partition", "ceil_div(3)", "plane_partition", "floor_ratio", "floor_ratio(500)", "matula", "matula_square", "shapiro", "a064097", "dedekind"] {
            for mode in [Mode::Plain, Mode::Squarefree] {
                let r = builtin_rule(name, mode).unwrap();
                assert_eq!(r.name(), name);
                assert_eq!(builtin_rule(&r.name(), mode).unwrap(), r);
            }
        }
        assert!(matches!(builtin_rule("nope", Mode::Plain), Err(RuleError::UnknownRule(_))));
        assert!(builtin_rule("ceil_div", Mode::Plain).is_err());
        assert!(builtin_rule("ceil_div(0)", Mode::Plain).is_err());
        assert!(builtin_rule("shapiro(3)", Mode::Plain).is_err());
    }

    #[test]
    fn custom_names_round_trip() {
        for name in ["successor(2,+1,3:1)", "successor(2,-1,2:1/5:2)", "index_recursive(square,2)", "index_recursive(identity,3)"] {
            let r = builtin_rule(name, Mode::Plain).unwrap();
            assert_eq!(r.name(), name);
        }
        // the catalog rules are recognised by shape
        assert_eq!(builtin_rule("successor(2,+1,2:1)", Mode::Plain).unwrap().name(), "shapiro");
        assert_eq!(builtin_rule("index_recursive(identity,1)", Mode::Plain).unwrap().name(), "matula");
        assert!(builtin_rule("successor(2,3,2:1)", Mode::Plain).is_err());
        assert!(builtin_rule("successor(2,+1,4:1)", Mode::Plain).is_err());
        assert!(builtin_rule("index_recursive(cube,1)", Mode::Plain).is_err());
    }

    #[test]
    fn builtin_shapes() {
        let s = builtin_rule("shapiro", Mode::Plain).unwrap();
        assert_eq!(s.kind, RuleKind::SuccessorRecursive { multiplier: 2, offset: 1 });
        assert_eq!(s.base.entries(), &[(2, 1)]);
        let d = builtin_rule("dedekind", Mode::Squarefree).unwrap();
        assert_eq!(d.base.entries(), &[(2, 1), (3, 1)]);
        assert_eq!(builtin_rule("dedekind", Mode::Plain).unwrap().base.entries(), &[(2, 1)]);
    }

    #[test]
    fn base_assignment_rejects_bad_input() {
        assert!(BaseAssignment::new(vec![(2, 0)]).is_err());
        assert!(BaseAssignment::new(vec![(4, 1)]).is_err());
        assert!(BaseAssignment::new(vec![(2, 1), (2, 2)]).is_err());
    }

    #[test]
    fn shapiro_semantics() {
        let e = eval("shapiro", Mode::Plain);
        assert_eq!(e.height(1).unwrap(), 0);
        assert_eq!(e.height(243).unwrap(), 5);
        assert_eq!(e.height(4).unwrap(), 2);
        // H(p) = H(p - 1)
        for p in [3u64, 5, 7, 11, 13, 163, 1009] {
            assert_eq!(e.height(p).unwrap(), e.height(p - 1).unwrap(), "p = {p}");
        }
        assert_eq!(e.scaled(1, 1, 4).unwrap(), 4);
        assert_eq!(e.scaled(2, 0, 2).unwrap(), 2);
        assert_eq!(e.scaled(1, 0, 360).unwrap(), e.height(360).unwrap());
    }

    #[test]
    fn matula_semantics() {
        // H(p_i) = H(i) + 1 = H(2i)
        let e = eval("matula", Mode::Plain);
        assert_eq!(e.height(11).unwrap(), 4);
        assert_eq!(e.height(37).unwrap(), 5);
        assert_eq!(e.height(67).unwrap(), 5);
        for (i, p) in [(4u64, 7u64), (12, 37), (19, 67)] {
            assert_eq!(e.height(p).unwrap(), e.height(2 * i).unwrap());
        }
    }

    #[test]
    fn closed_forms() {
        let part = eval("partition", Mode::Plain);
        assert_eq!(part.height(18).unwrap(), 5);
        assert_eq!(part.height(13).unwrap(), 6);
        let pp = eval("prime_partition", Mode::Plain);
        assert_eq!(pp.height(12).unwrap(), 7);
        let plane = eval("plane_partition", Mode::Plain);
        // primes 2 | 3 5 | 7 11 13 | 17 19 23 29
        let heights: Vec<u64> = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31].iter().map(|&p| plane.height(p).unwrap()).collect();
        assert_eq!(heights, vec![1, 2, 2, 3, 3, 3, 4, 4, 4, 4, 5]);
        let c3 = eval("ceil_div(3)", Mode::Plain);
        assert_eq!(c3.height(5).unwrap(), 1);
        assert_eq!(c3.height(7).unwrap(), 2);
        let fr = eval("floor_ratio", Mode::Plain);
        assert_eq!(fr.height(2).unwrap(), 2);
        assert_eq!(fr.height(3).unwrap(), 1);
        assert_eq!(fr.height(11).unwrap(), 2);
    }

    #[test]
    fn squarefree_unplaced_primes() {
        let e = eval("shapiro", Mode::Squarefree);
        assert_eq!(e.prime_height(43).unwrap(), Some(4));
        assert_eq!(e.prime_height(7).unwrap(), Some(2));
        // 5 - 1 = 4 is not squarefree, so 5 never enters the structure
        assert_eq!(e.prime_height(5).unwrap(), None);
        assert!(matches!(e.height(10), Err(RuleError::NotPlaced { .. })));
        let d = eval("dedekind", Mode::Squarefree);
        assert_eq!(d.prime_height(29).unwrap(), Some(4));
        assert_eq!(d.prime_height(173).unwrap(), Some(6));
        assert_eq!(d.prime_height(11).unwrap(), None);
        assert_eq!(d.height(8).unwrap(), 1);
    }

    #[test]
    fn index_map_inverse() {
        assert_eq!(IndexMap::Square.invert(49), Some(7));
        assert_eq!(IndexMap::Square.invert(50), None);
        assert_eq!(IndexMap::Identity.invert(0), None);
        assert_eq!(IndexMap::Square.apply(7), Some(49));
    }
}
