//! Primality testing: deterministic Miller-Rabin below 2^64, Baillie-PSW plus
//! extra seeded Miller-Rabin rounds above.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SMALL_PRIMES: [u64; 46] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199,
];

// Sinclair's basis: exact for every n < 2^64.
const WORD_BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// How many random-base Miller-Rabin rounds follow BPSW for n >= 2^64.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessPolicy {
    pub extra_rounds: u32,
    pub seed: u64,
}

impl Default for WitnessPolicy {
    /// 64 rounds bound the Miller-Rabin error by 4^-64 = 2^-128.
    fn default() -> Self {
        WitnessPolicy { extra_rounds: 64, seed: 0x6865_6967_6874_6c61 }
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        a * b % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime_u64(n: u64, base: u64) -> bool {
    let a = base % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality for machine words.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < 199 * 199 {
        return true;
    }
    WORD_BASES.iter().all(|&b| strong_probable_prime_u64(n, b))
}

/// Primality of an arbitrary-precision natural with the default witness policy.
pub fn is_prime(n: &BigUint) -> bool {
    is_prime_with(n, &WitnessPolicy::default())
}

pub fn is_prime_with(n: &BigUint, policy: &WitnessPolicy) -> bool {
    if let Some(w) = n.to_u64() {
        return is_prime_u64(w);
    }
    for &p in &SMALL_PRIMES {
        if (n % p).is_zero() {
            return false;
        }
    }
    if !strong_probable_prime(n, &BigUint::from(2u32)) {
        return false;
    }
    if !strong_lucas_probable_prime(n) {
        return false;
    }
    random_rounds(n, policy)
}

fn strong_probable_prime(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = base.modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

fn random_rounds(n: &BigUint, policy: &WitnessPolicy) -> bool {
    // seed mixes the policy seed with n so every input gets its own witnesses
    let low = n.iter_u64_digits().next().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed ^ low.rotate_left(17) ^ n.bits());
    let three = BigUint::from(3u32);
    let span = n - &three; // witnesses in [2, n-2]
    let words = n.bits().div_ceil(64) as usize + 1;
    for _ in 0..policy.extra_rounds {
        let raw: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
        let mut digits = Vec::with_capacity(words * 2);
        for w in raw {
            digits.push(w as u32);
            digits.push((w >> 32) as u32);
        }
        let witness = BigUint::new(digits) % &span + 2u32;
        if !strong_probable_prime(n, &witness) {
            return false;
        }
    }
    true
}

/// Jacobi symbol (a / n) for odd positive n.
fn jacobi(a: &BigUint, n: &BigUint) -> i32 {
    let mut a = a % n;
    let mut n = n.clone();
    let mut sign = 1;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            a >>= tz;
            let r8 = (&n % 8u32).to_u32().unwrap_or(0);
            if tz % 2 == 1 && (r8 == 3 || r8 == 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            sign = -sign;
        }
        a %= &n;
    }
    if n.is_one() { sign } else { 0 }
}

/// Reduces a signed small integer modulo n.
fn signed_mod(v: i64, n: &BigUint) -> BigUint {
    let m = BigUint::from(v.unsigned_abs()) % n;
    if v < 0 && !m.is_zero() { n - m } else { m }
}

fn half_mod(x: BigUint, n: &BigUint) -> BigUint {
    if x.is_odd() { (x + n) >> 1u32 } else { x >> 1u32 }
}

/// Strong Lucas probable-prime test with Selfridge's parameter choice (P = 1).
fn strong_lucas_probable_prime(n: &BigUint) -> bool {
    let root = n.sqrt();
    if &root * &root == *n {
        return false;
    }
    let mut d: i64 = 5;
    loop {
        let j = jacobi(&signed_mod(d, n), n);
        if j == -1 {
            break;
        }
        if j == 0 && BigUint::from(d.unsigned_abs()) != *n {
            return false;
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let q = (1 - d) / 4;
    let d_mod = signed_mod(d, n);
    let q_mod = signed_mod(q, n);

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let odd = &n_plus_1 >> s;

    // binary ladder from the top bit: U_1 = 1, V_1 = P = 1, Q^1 = q
    let mut u = BigUint::one();
    let mut v = BigUint::one();
    let mut qk = q_mod.clone();
    let two = BigUint::from(2u32);
    for i in (0..odd.bits() - 1).rev() {
        // doubling
        u = &u * &v % n;
        v = (&v * &v + n * &two - (&qk * &two) % n) % n;
        qk = &qk * &qk % n;
        if odd.bit(i) {
            let nu = half_mod(&u + &v, n);
            let nv = half_mod(&d_mod * &u + &v, n);
            u = nu % n;
            v = nv % n;
            qk = &qk * &q_mod % n;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v + n * &two - (&qk * &two) % n) % n;
        if v.is_zero() {
            return true;
        }
        qk = &qk * &qk % n;
    }
    false
}
