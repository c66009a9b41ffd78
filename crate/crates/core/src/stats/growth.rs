//! Average order F(x) = Σ_{n<=x} H(n) and growth-ratio tables.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::enumeration::LevelCount;
use crate::primality::{PrimeTable, DEFAULT_SIEVE_CAP};
use crate::rules::{Evaluator, HeightRule, RuleError};

use super::StatsError;

/// F(x) = Σ_{p^k <= x} H(p)·⌊x/p^k⌋: every prime power dividing n adds one
/// H(p). In squarefree mode only k = 1 contributes.
pub fn avg_order(rule: &HeightRule, x: u64) -> Result<BigUint, StatsError> {
    avg_order_with_cap(rule, x, DEFAULT_SIEVE_CAP)
}

pub fn avg_order_with_cap(rule: &HeightRule, x: u64, sieve_cap: u64) -> Result<BigUint, StatsError> {
    if x < 2 {
        return Ok(BigUint::default());
    }
    let table = PrimeTable::sieve_with_cap(x, sieve_cap).map_err(|e| StatsError::Budget(e.to_string()))?;
    let ev = Evaluator::with_table(rule.clone(), table.clone());
    let squarefree = rule.is_squarefree();
    let partial: Result<Vec<u128>, StatsError> = table
        .primes()
        .par_chunks(4096)
        .map(|chunk| {
            let mut acc = 0u128;
            for &p in chunk {
                let p = p as u64;
                let h = ev.prime_height(p)?.ok_or_else(|| RuleError::NotPlaced { prime: p.to_string() })?;
                let mut multiples = 0u128;
                let mut q = p;
                loop {
                    multiples += (x / q) as u128;
                    if squarefree {
                        break;
                    }
                    match q.checked_mul(p) {
                        Some(next) if next <= x => q = next,
                        _ => break,
                    }
                }
                acc += h as u128 * multiples;
            }
            Ok(acc)
        })
        .collect();
    Ok(partial?.into_iter().map(BigUint::from).sum())
}

/// `F(x)·c·(ln x)^log_power / x^alpha`; rows should drift toward a constant
/// when the guessed order is right.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normalizer {
    pub constant: f64,
    pub alpha: f64,
    pub log_power: f64,
}

impl Normalizer {
    pub fn apply(&self, f: &BigUint, x: u64) -> f64 {
        let xf = x as f64;
        f.to_f64().unwrap_or(f64::INFINITY) * self.constant * xf.ln().powf(self.log_power) / xf.powf(self.alpha)
    }

    /// Orders quoted for catalog rules.
    pub fn for_rule(name: &str) -> Normalizer {
        let n = |constant, alpha, log_power| Normalizer { constant, alpha, log_power };
        match name {
            "prime_partition" => n(12.0 / (std::f64::consts::PI * std::f64::consts::PI), 2.0, 1.0),
            "partition" => n(1.0, 2.0, 2.0),
            "plane_partition" => n(1.0, 1.5, 1.5),
            "matula" | "matula_square" => n(1.0, 1.0, -1.0),
            _ => n(1.0, 1.0, 0.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AverageOrderRow {
    pub x: u64,
    pub f: BigUint,
    pub normalized: f64,
}

pub fn average_order_trend(rule: &HeightRule, xs: &[u64], norm: Normalizer) -> Result<Vec<AverageOrderRow>, StatsError> {
    xs.iter()
        .map(|&x| {
            let f = avg_order(rule, x)?;
            Ok(AverageOrderRow { x, normalized: norm.apply(&f, x), f })
        })
        .collect()
}

/// One row of the level-growth table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthRow {
    pub h: usize,
    pub n: u64,
    pub pi: u64,
    /// N_h / N_(h-1)
    pub n_ratio: Option<f64>,
    /// B^h / ln 3
    pub n_fit: f64,
    /// π_h·h / (π_(h-1)·(h-1))
    pub pi_ratio: Option<f64>,
    /// B^h / h
    pub pi_fit: f64,
    /// h·π_h / N_h
    pub prime_density: f64,
}

pub fn growth_report(counts: &[LevelCount], base: f64) -> Vec<GrowthRow> {
    let mut rows = Vec::new();
    for (i, c) in counts.iter().enumerate().filter(|(_, c)| c.h >= 1) {
        let prev = i.checked_sub(1).map(|j| counts[j]);
        let hf = c.h as f64;
        let n_ratio = prev.filter(|p| p.n > 0).map(|p| c.n as f64 / p.n as f64);
        let pi_ratio = prev.filter(|p| p.pi > 0 && p.h > 0).map(|p| (c.pi as f64 * hf) / (p.pi as f64 * p.h as f64));
        rows.push(GrowthRow {
            h: c.h,
            n: c.n,
            pi: c.pi,
            n_ratio,
            n_fit: base.powi(c.h as i32) / 3f64.ln(),
            pi_ratio,
            pi_fit: base.powi(c.h as i32) / hf,
            prime_density: if c.n == 0 { 0.0 } else { hf * c.pi as f64 / c.n as f64 },
        });
    }
    rows
}
