//! Segmented odd-only sieve of Eratosthenes.

use std::ops::ControlFlow;

/// Odd numbers covered by one segment (the segment spans twice this many integers).
const SEGMENT_ODDS: u64 = 1 << 18;

/// Plain sieve returning all primes `<= limit`. Used for base primes.
pub(crate) fn simple_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Visits every prime in `[lo, hi]` in ascending order; the visitor may stop early.
pub(crate) fn visit_primes<F>(lo: u64, hi: u64, mut visit: F) -> ControlFlow<()>
where
    F: FnMut(u64) -> ControlFlow<()>,
{
    if hi < 2 || lo > hi {
        return ControlFlow::Continue(());
    }
    if lo <= 2 {
        visit(2)?;
    }
    let base = simple_primes(isqrt(hi));
    let odd_base: Vec<u64> = base.into_iter().filter(|&p| p > 2).collect();

    // odd numbers only: index k represents seg_start + 2k
    let mut seg_start = if lo <= 3 { 3 } else { lo | 1 };
    let mut flags = vec![false; SEGMENT_ODDS as usize];
    while seg_start <= hi {
        let seg_end = (seg_start + 2 * (SEGMENT_ODDS - 1)).min(if hi % 2 == 0 { hi - 1 } else { hi });
        if seg_end < seg_start {
            break;
        }
        let len = ((seg_end - seg_start) / 2 + 1) as usize;
        flags[..len].fill(false);
        for &p in &odd_base {
            let sq = p * p;
            if sq > seg_end {
                break;
            }
            // first odd multiple of p that is >= max(p^2, seg_start)
            let mut m = if sq >= seg_start { sq } else { seg_start.div_ceil(p) * p };
            if m % 2 == 0 {
                m += p;
            }
            let mut k = ((m - seg_start) / 2) as usize;
            while k < len {
                flags[k] = true;
                k += p as usize;
            }
        }
        for (k, &c) in flags[..len].iter().enumerate() {
            if !c {
                visit(seg_start + 2 * k as u64)?;
            }
        }
        seg_start = seg_end + 2;
    }
    ControlFlow::Continue(())
}

/// Counts primes in `[0, limit]` without storing them.
pub(crate) fn count_primes(limit: u64) -> u64 {
    let mut count = 0u64;
    let _ = visit_primes(0, limit, |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    count
}
