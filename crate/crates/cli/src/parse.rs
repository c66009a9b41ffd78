//! Value parsers for command-line numbers.

/// Decimal natural, optionally in scientific form (`1e5`, `2.5e3`).
pub fn natural(s: &str) -> Result<u128, String> {
    let s = s.trim().replace('_', "");
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m.to_string(), e.trim_start_matches('+').parse::<u32>().map_err(|_| format!("bad exponent in `{s}`"))?),
        None => (s.clone(), 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((&mantissa, ""));
    let frac = frac.trim_end_matches('0');
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(format!("`{s}` is not a natural number"));
    }
    let shift = exp.checked_sub(frac.len() as u32).ok_or_else(|| format!("`{s}` is not an integer"))?;
    let digits: u128 = format!("{int}{frac}").parse().map_err(|_| format!("`{s}` is too large"))?;
    10u128
        .checked_pow(shift)
        .and_then(|p| digits.checked_mul(p))
        .ok_or_else(|| format!("`{s}` is too large"))
}

pub fn natural_u64(s: &str) -> Result<u64, String> {
    u64::try_from(natural(s)?).map_err(|_| format!("`{s}` exceeds 64 bits"))
}

/// Byte count with an optional K/M/G/T suffix (powers of 1024).
pub fn bytes(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let (num, shift) = match t.char_indices().last() {
        Some((i, c)) if c.is_ascii_alphabetic() => {
            let shift = match c.to_ascii_uppercase() {
                'K' => 10,
                'M' => 20,
                'G' => 30,
                'T' => 40,
                _ => return Err(format!("unknown size suffix in `{s}`")),
            };
            (&t[..i], shift)
        }
        _ => (t, 0),
    };
    let v = natural_u64(num)?;
    if v == 0 {
        return Err("budget must be positive".into());
    }
    v.checked_mul(1 << shift).ok_or_else(|| format!("`{s}` is too large"))
}
