//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Run with `cargo test -p heightlab-core --test acceptance`.

use std::collections::{BTreeMap, HashMap};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use heightlab::bounds::check_extremes;
use heightlab::genfunc::{brute_force_count, distinct_counts, multipartition_counts, recursive_counts};
use heightlab::matula::{all_trees, Codec};
use heightlab::primality::DEFAULT_SIEVE_CAP;
use heightlab::stats::{
    avg_order, growth_report, level_stats, pi_compare_table, pi_hat, reference_at, table_xs, EstimatorParams,
    PiSource, PI_HAT_REFERENCE, PI_REFERENCE, X_OVER_LN_REFERENCE,
};
use heightlab::{builtin_rule, extend_to, AnyStructure, Budget, Evaluator, HeightRule, Mode, WordStructure};

// Tolerances, pinned.
const GOLDEN_SECONDS: f64 = 5.0;
const SHAPIRO_SECONDS: f64 = 300.0;
const SHAPIRO_BYTES: u64 = 2 << 30;
const DEDEKIND_SECONDS: f64 = 3600.0;
const GROWTH_TOL_SHAPIRO: f64 = 0.005;
const GROWTH_TOL_DEDEKIND: f64 = 0.002;
const MEAN_TOL: f64 = 0.0005;
const SD_TOL: f64 = 0.002;
const PI_HAT_REL_TOL: f64 = 1e-6;
const X_OVER_LN_REL_TOL: f64 = 1e-12;
const ESTIMATOR_SECONDS: f64 = 10.0;
const RANDOM_PROFILES: usize = 50;
const BRUTE_N: usize = 30;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

/// Collects sub-check failures for one criterion.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self, summary: &str) -> Outcome {
        let mut detail = summary.to_string();
        for n in &self.notes {
            detail.push_str(&format!("\n      note: {n}"));
        }
        for f in self.failures.iter().take(20) {
            detail.push_str(&format!("\n      fail: {f}"));
        }
        Outcome::new(self.failures.is_empty(), detail)
    }
}

fn rule(name: &str, mode: Mode) -> HeightRule {
    builtin_rule(name, mode).expect("catalog rule")
}

fn words(name: &str, mode: Mode, h: usize) -> WordStructure {
    match extend_to(&rule(name, mode), h, &Budget::default()).expect("enumeration within budget") {
        AnyStructure::Word(s) => s,
        AnyStructure::Big(_) => panic!("{name} left the word regime below height {h}"),
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Peak resident set size of this process, where the platform reports it.
fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

// ---------------------------------------------------------------- oracles

fn is_prime_td(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn sieve(limit: usize) -> Vec<u64> {
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn factor_td(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Heights computed straight from the defining recursion by trial division,
/// sharing nothing with the library's evaluator.
struct OracleHeights {
    name: &'static str,
    squarefree: bool,
    primes: Vec<u64>,
    memo: HashMap<u64, Option<u64>>,
}

impl OracleHeights {
    fn new(name: &'static str, squarefree: bool) -> Self {
        OracleHeights { name, squarefree, primes: sieve(2_000_000), memo: HashMap::new() }
    }

    fn index(&self, p: u64) -> u64 {
        self.primes.binary_search(&p).expect("prime within oracle sieve") as u64 + 1
    }

    fn prime(&mut self, p: u64) -> Option<u64> {
        if let Some(&v) = self.memo.get(&p) {
            return v;
        }
        let v = match self.name {
            "partition" => Some(self.index(p)),
            "prime_partition" => Some(p),
            "matula" => self.height(self.index(p)).map(|h| h + 1),
            "shapiro" | "a064097" | "dedekind" => {
                let base = if self.squarefree && self.name == "dedekind" { p == 2 || p == 3 } else { p == 2 };
                if base {
                    Some(1)
                } else {
                    let (q, mu) = match self.name {
                        "shapiro" => (p - 1, 2),
                        "a064097" => (p - 1, 1),
                        _ => (p + 1, 2),
                    };
                    let a = q / mu;
                    let ok = !self.squarefree || (factor_td(a).iter().all(|&(_, e)| e == 1) && (mu == 1 || a % mu != 0));
                    if ok {
                        self.height(a).map(|h| h + 1)
                    } else {
                        None
                    }
                }
            }
            other => panic!("no oracle for {other}"),
        };
        self.memo.insert(p, v);
        v
    }

    /// `None` when some prime factor never receives a height.
    fn height(&mut self, n: u64) -> Option<u64> {
        let mut total = 0;
        for (p, e) in factor_td(n) {
            let e = if self.squarefree { 1 } else { e as u64 };
            total += e * self.prime(p)?;
        }
        Some(total)
    }
}

// ---------------------------------------------------------------- criterion 1

fn golden(list: &[(usize, &[u64])]) -> Vec<(usize, Vec<u64>)> {
    list.iter().map(|&(h, v)| (h, v.to_vec())).collect()
}

fn compare_levels(c: &mut Checks, label: &str, s: &WordStructure, expected: &[(usize, Vec<u64>)]) {
    for (h, want) in expected {
        let got = &s.level(*h).expect("materialized").elements;
        c.check(got == want, || format!("{label} h={h}: enumerated {got:?}, table {want:?}"));
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let plain = Mode::Plain;
    let sf = Mode::Squarefree;

    let partition = golden(&[
        (0, &[1]),
        (1, &[2]),
        (2, &[3, 4]),
        (3, &[5, 6, 8]),
        (4, &[7, 9, 10, 12, 16]),
        (5, &[11, 14, 15, 18, 20, 24, 32]),
        (6, &[13, 21, 22, 25, 27, 28, 30, 36, 40, 48, 64]),
    ]);
    compare_levels(&mut c, "partition", &words("partition", plain, 6), &partition);

    let prime_partition = golden(&[
        (0, &[1]),
        (1, &[]),
        (2, &[2]),
        (3, &[3]),
        (4, &[4]),
        (5, &[5, 6]),
        (6, &[8, 9]),
        (7, &[7, 10, 12]),
        (8, &[15, 16, 18]),
    ]);
    compare_levels(&mut c, "prime_partition", &words("prime_partition", plain, 8), &prime_partition);

    let plane = golden(&[
        (0, &[1]),
        (1, &[2]),
        (2, &[3, 4, 5]),
        (3, &[6, 7, 8, 10, 11, 13]),
        (4, &[9, 12, 14, 15, 16, 17, 19, 20, 22, 23, 25, 26, 29]),
        (5, &[18, 21, 24, 28, 30, 31, 32, 33, 34, 35, 37, 38, 39, 40, 41, 43, 44, 46, 47, 50, 52, 55, 58, 65]),
    ]);
    compare_levels(&mut c, "plane_partition", &words("plane_partition", plain, 5), &plane);

    // The published height-5 row lists 51 (= 3·17, height 2 + 4 = 6) in bold
    // where the prime p_16 = 53 belongs.
    let printed_h5: Vec<u64> = vec![15, 18, 20, 21, 22, 23, 24, 26, 28, 29, 31, 32, 34, 37, 38, 41, 43, 51, 59, 67];
    let corrected_h5: Vec<u64> = {
        let mut v: Vec<u64> = printed_h5.iter().map(|&m| if m == 51 { 53 } else { m }).collect();
        v.sort_unstable();
        v
    };
    let matula = golden(&[
        (0, &[1]),
        (1, &[2]),
        (2, &[3, 4]),
        (3, &[5, 6, 7, 8]),
        (4, &[9, 10, 11, 12, 13, 14, 16, 17, 19]),
        (5, &corrected_h5),
    ]);
    let m = words("matula", plain, 6);
    compare_levels(&mut c, "matula", &m, &matula);
    c.check(m.prime_height(&53) == Some(5) && m.level(6).unwrap().contains(&51), || "matula erratum premise".into());
    c.note("matula h=5: table prints 51 where enumeration (and p_16 = 53) gives 53; 51 = 3·17 is at height 6");

    let shapiro = golden(&[
        (0, &[1]),
        (1, &[2, 3]),
        (2, &[4, 5, 6, 7, 9]),
        (3, &[8, 10, 11, 12, 13, 14, 15, 18, 19, 21, 27]),
        (
            4,
            &[16, 17, 20, 22, 23, 24, 25, 26, 28, 29, 30, 31, 33, 35, 36, 37, 38, 39, 42, 43, 45, 49, 54, 57, 63, 81],
        ),
        (
            5,
            &[
                32, 34, 40, 41, 44, 46, 47, 48, 50, 51, 52, 53, 55, 56, 58, 59, 60, 61, 62, 65, 66, 67, 69, 70, 71, 72,
                73, 74, 75, 76, 77, 78, 79, 84, 86, 87, 90, 91, 93, 95, 98, 99, 105, 108, 109, 111, 114, 117, 126, 127,
                129, 133, 135, 147, 162, 163, 171, 189, 243,
            ],
        ),
    ]);
    compare_levels(&mut c, "shapiro", &words("shapiro", plain, 5), &shapiro);

    let dedekind = golden(&[
        (0, &[1]),
        (1, &[2]),
        (2, &[3, 4]),
        (3, &[5, 6, 7, 8]),
        (4, &[9, 10, 11, 12, 13, 14, 16]),
        (5, &[15, 17, 18, 19, 20, 21, 22, 23, 24, 26, 28, 31, 32]),
        (
            6,
            &[
                25, 27, 29, 30, 33, 34, 35, 36, 37, 38, 39, 40, 41, 42, 43, 44, 46, 47, 48, 49, 52, 56, 61, 62, 64,
            ],
        ),
    ]);
    compare_levels(&mut c, "dedekind", &words("dedekind", plain, 6), &dedekind);

    let distinct = golden(&[
        (0, &[1]),
        (1, &[2]),
        (2, &[3]),
        (3, &[5, 6]),
        (4, &[7, 10]),
        (5, &[11, 14, 15]),
        (6, &[13, 21, 22, 30]),
    ]);
    compare_levels(&mut c, "partition/squarefree", &words("partition", sf, 6), &distinct);

    let identity = golden(&[
        (0, &[1]),
        (1, &[2]),
        (2, &[3]),
        (3, &[5, 6]),
        (4, &[10, 11, 13]),
        (5, &[15, 22, 26, 29, 31, 41]),
    ]);
    compare_levels(&mut c, "matula/squarefree", &words("matula", sf, 5), &identity);

    // No printed table: derived from the recursion by the trial-division oracle
    // over squarefree n below 2·10^5.
    let sf_shapiro = words("shapiro", sf, 12);
    let mut oracle = OracleHeights::new("shapiro", true);
    let mut derived: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for n in 1..200_000u64 {
        if factor_td(n).iter().all(|&(_, e)| e == 1) {
            if let Some(h) = oracle.height(n) {
                derived.entry(h).or_default().push(n);
            }
        }
    }
    for h in 0..=12usize {
        let want = derived.get(&(h as u64)).cloned().unwrap_or_default();
        let got = &sf_shapiro.level(h).unwrap().elements;
        c.check(*got == want, || format!("shapiro/squarefree h={h}: enumerated {got:?}, oracle {want:?}"));
        if h > 8 {
            c.check(got.is_empty(), || format!("shapiro/squarefree h={h} should be empty"));
        }
    }
    c.check(
        sf_shapiro.prime_sequence().iter().map(|(p, _)| *p).collect::<Vec<_>>() == [2, 3, 7, 43],
        || "shapiro/squarefree primes are not exactly 2, 3, 7, 43".into(),
    );

    let sf_dedekind = golden(&[
        (0, &[1]),
        (1, &[2, 3]),
        (2, &[5, 6]),
        (3, &[10, 15]),
        (4, &[29, 30]),
        (5, &[58, 87]),
        (6, &[145, 173, 174]),
    ]);
    compare_levels(&mut c, "dedekind/squarefree", &words("dedekind", sf, 6), &sf_dedekind);

    let t = secs(start.elapsed());
    c.check(t < GOLDEN_SECONDS, || format!("runtime {t:.2}s exceeds {GOLDEN_SECONDS}s"));
    c.finish(&format!("golden class tables for ten structures ({t:.2}s, limit {GOLDEN_SECONDS}s)"))
}

// ---------------------------------------------------------------- criterion 2

const SHAPIRO_PROFILE: [(u64, u64); 17] = [
    (2, 2),
    (5, 2),
    (11, 3),
    (26, 6),
    (59, 12),
    (137, 23),
    (312, 46),
    (719, 94),
    (1651, 198),
    (3816, 424),
    (8757, 854),
    (20202, 1859),
    (46440, 3884),
    (106957, 8362),
    (245989, 17837),
    (566561, 38977),
    (1303968, 84188),
];

fn criterion_2(shapiro17: &WordStructure, elapsed: f64) -> Outcome {
    let mut c = Checks::default();
    let counts = shapiro17.counts();
    for (i, &(n, pi)) in SHAPIRO_PROFILE.iter().enumerate() {
        let h = i + 1;
        c.check(counts[h].n == n && counts[h].pi == pi, || {
            format!("h={h}: N={} pi={}, table N={n} pi={pi}", counts[h].n, counts[h].pi)
        });
    }
    let growth = growth_report(&counts, 2.3);
    let r17 = growth.iter().find(|r| r.h == 17).and_then(|r| r.n_ratio).unwrap_or(f64::NAN);
    c.check((r17 - 2.30).abs() <= GROWTH_TOL_SHAPIRO, || format!("N_17/N_16 = {r17}"));
    c.check(elapsed <= SHAPIRO_SECONDS, || format!("runtime {elapsed:.1}s over {SHAPIRO_SECONDS}s"));
    let bytes = shapiro17.approx_bytes();
    c.check(bytes <= SHAPIRO_BYTES, || format!("structure holds {bytes} bytes"));
    let rss = peak_rss_bytes();
    if let Some(rss) = rss {
        c.check(rss <= SHAPIRO_BYTES, || format!("peak RSS {rss} bytes"));
    }
    c.finish(&format!(
        "shapiro N_h, pi_h for h=1..17 (N_17={}, pi_17={}, N_17/N_16={r17:.4}; {elapsed:.2}s, structure {:.1} MiB, peak RSS {})",
        counts[17].n,
        counts[17].pi,
        bytes as f64 / (1 << 20) as f64,
        rss.map_or("n/a".into(), |b| format!("{:.1} MiB", b as f64 / (1 << 20) as f64)),
    ))
}

// ---------------------------------------------------------------- criterion 3

const TABLE_1: [(usize, u64, u64); 10] = [
    (91, 71402, 972),
    (92, 80784, 1046),
    (93, 91684, 1286),
    (94, 104037, 1305),
    (95, 117784, 1519),
    (96, 133461, 1751),
    (97, 151302, 1901),
    (98, 171567, 2154),
    (99, 194421, 2308),
    (100, 220134, 2742),
];

fn criterion_3() -> Outcome {
    let mut c = Checks::default();
    let start = Instant::now();
    let s = extend_to(&rule("dedekind", Mode::Squarefree), 100, &Budget::default()).expect("within budget");
    let elapsed = secs(start.elapsed());
    let big = s.into_big();

    let mut seq: Vec<(BigUint, usize)> = big.prime_sequence();
    seq.sort();
    let first: Vec<(u64, usize)> = seq.iter().take(10).map(|(p, h)| (u64::try_from(p).unwrap(), *h)).collect();
    let expected = [
        (2, 1),
        (3, 1),
        (5, 2),
        (29, 4),
        (173, 6),
        (5189, 10),
        (300961, 15),
        (4514429, 18),
        (5386181, 18),
        (161585429, 22),
    ];
    c.check(first == expected, || format!("first ten primes {first:?}"));
    let below_1e9 = seq.iter().filter(|(p, _)| *p < BigUint::from(1_000_000_000u64)).count();
    c.check(below_1e9 == 11, || format!("{below_1e9} primes below 10^9, expected 11"));

    let counts = big.counts();
    for &(h, n, pi) in &TABLE_1 {
        c.check(counts[h].n == n && counts[h].pi == pi, || {
            format!("h={h}: N={} pi={}, table N={n} pi={pi}", counts[h].n, counts[h].pi)
        });
    }
    let smallest_91 = big.level(91).unwrap().primes.first().cloned();
    let want_91: BigUint = "859445547898845285802803723399409".parse().unwrap();
    c.check(smallest_91.as_ref() == Some(&want_91), || format!("smallest prime at 91: {smallest_91:?}"));
    let ratio = counts[100].n as f64 / counts[99].n as f64;
    c.check((ratio - 1.132).abs() <= GROWTH_TOL_DEDEKIND, || format!("N(100)/N(99) = {ratio}"));
    c.check(elapsed <= DEDEKIND_SECONDS, || format!("runtime {elapsed:.0}s"));
    c.finish(&format!(
        "squarefree dedekind: first ten primes, N(n) and pi_n for n=91..100, {below_1e9} primes below 10^9 ({elapsed:.1}s, N(100)/N(99)={ratio:.4})"
    ))
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Outcome {
    let mut c = Checks::default();
    let cases: [(&str, usize); 10] = [
        ("partition", 24),
        ("prime_partition", 40),
        ("ceil_div(3)", 12),
        ("plane_partition", 12),
        ("floor_ratio", 10),
        ("matula", 12),
        ("matula_square", 12),
        ("shapiro", 14),
        ("a064097", 16),
        ("dedekind", 16),
    ];
    let mut checked = 0;
    for (name, h) in cases {
        for mode in [Mode::Plain, Mode::Squarefree] {
            let s = words(name, mode, h);
            let pi = s.pi_profile();
            let series = if mode.is_squarefree() { distinct_counts(&pi, h) } else { multipartition_counts(&pi, h) };
            let got: Vec<u64> = s.counts().iter().map(|x| x.n).collect();
            let want = series.to_u64().expect("small coefficients");
            c.check(got == want, || format!("{name} {mode}: enumeration {got:?} vs genfunc {want:?}"));
            checked += 1;
        }
    }
    // generator profiles known without enumeration
    let independent: [(&str, Vec<u64>); 4] = [
        ("partition", vec![1; 24]),
        ("prime_partition", (1..=40).map(|k| is_prime_td(k) as u64).collect()),
        ("ceil_div(3)", vec![3; 12]),
        ("plane_partition", (1..=12).collect()),
    ];
    for (name, pi) in independent {
        let h = pi.len();
        let want = multipartition_counts(&pi, h).to_u64().unwrap();
        let got: Vec<u64> = words(name, Mode::Plain, h).counts().iter().map(|x| x.n).collect();
        c.check(got == want, || format!("{name}: enumeration {got:?} vs closed-form profile {want:?}"));
    }
    let trees = recursive_counts(12, |n, prev| prev[n - 1].clone());
    let got: Vec<u64> = words("matula", Mode::Plain, 12).counts().iter().map(|x| x.n).collect();
    let want: Vec<u64> = trees.iter().map(|v| u64::try_from(v).unwrap()).collect();
    c.check(got == want, || format!("matula vs fixed point pi_n = N_(n-1): {got:?} / {want:?}"));

    let mut rng = ChaCha8Rng::seed_from_u64(0x4845_4947_4854);
    for k in 0..RANDOM_PROFILES {
        let len = 1 + (rng.next_u64() % BRUTE_N as u64) as usize;
        let pi: Vec<u64> = (0..len).map(|_| rng.next_u64() % 6).collect();
        let series = multipartition_counts(&pi, BRUTE_N);
        for n in 0..=BRUTE_N {
            let brute = brute_force_count(&pi, n).unwrap();
            c.check(series.coeffs[n] == brute, || format!("profile {k} {pi:?} n={n}"));
        }
    }
    c.finish(&format!(
        "enumeration = generating function for {checked} rule/mode pairs; recurrence = brute force on {RANDOM_PROFILES} random profiles, n <= {BRUTE_N}"
    ))
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5(shapiro17: &WordStructure) -> Outcome {
    let mut c = Checks::default();
    let mut shapiro15 = shapiro17.clone();
    shapiro15.truncate(15);
    let runs: [(&str, WordStructure, usize); 4] = [
        ("shapiro", shapiro15, 15),
        ("prime_partition", words("prime_partition", Mode::Plain, 30), 30),
        ("dedekind", words("dedekind", Mode::Plain, 15), 15),
        ("matula", words("matula", Mode::Plain, 9), 9),
    ];
    for (name, s, h) in &runs {
        let report = check_extremes(s, *h);
        match *name {
            "prime_partition" => {
                c.check(report.passes_for("max"), || "prime_partition max formula fails".into());
                c.check(report.passes_for("min >="), || "prime_partition lower bound fails".into());
            }
            "matula" => {
                c.check(report.passes_for("max"), || format!("matula max fails at {:?}", report.failing_heights("max = P(h)")));
                c.check(report.corrected_passes(), || "matula corrected min fails".into());
                let label = "min as printed (5^((h-3)/3) for h = 0 mod 3)";
                let all = report.failing_heights(label);
                let upto8: Vec<usize> = all.iter().copied().filter(|&h| h <= 8).collect();
                c.check(upto8 == [3, 6], || format!("printed min fails at {upto8:?} for h <= 8, expected [3, 6]"));
                c.check(all == [3, 6, 9], || format!("printed min fails at {all:?} for h <= 9"));
                for r in report.failures() {
                    c.note(format!("matula h={}: printed min gives {:?}, enumerated {:?}", r.h, r.predicted, r.enumerated));
                }
                let max7 = s.level(7).unwrap().max().copied();
                c.check(max7 == Some(2221), || format!("largest Matula number at height 7 is {max7:?}"));
            }
            _ => c.check(report.passes(), || format!("{name}: {:?}", report.failures().collect::<Vec<_>>())),
        }
    }
    let m9 = runs[3].1.level(9).unwrap().max().copied();
    c.finish(&format!("closed-form extremes: shapiro h<=15, prime_partition h<=30, dedekind h<=15, matula h<=9 (P(9)={})", m9.unwrap_or(0)))
}

// ---------------------------------------------------------------- criterion 6

const TABLE_2: [(usize, f64, f64); 6] =
    [(12, 0.8487, 0.1764), (13, 0.8486, 0.1771), (14, 0.8486, 0.1779), (15, 0.8486, 0.1763), (16, 0.8486, 0.1774), (17, 0.8486, 0.1772)];

fn truncate(v: f64, places: i32) -> f64 {
    let s = 10f64.powi(places);
    (v * s).floor() / s
}

fn criterion_6(shapiro17: &WordStructure) -> Outcome {
    let mut c = Checks::default();
    for &(h, mean, sd) in &TABLE_2 {
        let st = level_stats(shapiro17, h, false).unwrap().primes;
        c.check((st.mean_log_over_h - mean).abs() <= MEAN_TOL, || format!("h={h}: mean/h {} vs {mean}", st.mean_log_over_h));
        c.check((st.sd_log_over_sqrt_h - sd).abs() <= SD_TOL, || format!("h={h}: sd/sqrt(h) {} vs {sd}", st.sd_log_over_sqrt_h));
    }
    let one = level_stats(shapiro17, 1, false).unwrap().primes;
    let (mean1, sd1) = (truncate(one.mean_log_over_h, 2), truncate(one.sd_log_over_sqrt_h, 1));
    c.check((mean1 - 0.89).abs() < 1e-9 && (sd1 - 0.2).abs() < 1e-9, || format!("h=1 gives ({}, {})", one.mean_log_over_h, one.sd_log_over_sqrt_h));
    c.note(format!(
        "h=1: mean/h = {:.4}, sd = {:.4}; printed .89/.2 match when truncated to the printed digits",
        one.mean_log_over_h, one.sd_log_over_sqrt_h
    ));
    let small: Vec<String> = (2..=5)
        .map(|h| {
            let st = level_stats(shapiro17, h, false).unwrap().primes;
            format!("h={h}: {:.4}/{:.4}", st.mean_log_over_h, st.sd_log_over_sqrt_h)
        })
        .collect();
    c.note(format!("excluded small-height rows, computed: {}", small.join(", ")));
    c.finish("shapiro level statistics, h=12..17 (mean/h +-0.0005, sd/sqrt(h) +-0.002) and h=1")
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7() -> Outcome {
    let mut c = Checks::default();
    let start = Instant::now();
    let params = EstimatorParams::<f64>::shapiro();
    let rows = pi_compare_table(&table_xs(), &params);
    let mut worst = 0f64;
    for row in &rows {
        let k = (row.x as f64).log10().round() as u32;
        let want_hat = reference_at(PI_HAT_REFERENCE, k).unwrap() as f64;
        // the printed column holds integers
        let rel = (row.pi_hat.rounded as f64 - want_hat).abs() / want_hat;
        worst = worst.max(rel);
        c.check(rel <= PI_HAT_REL_TOL, || format!("10^{k}: pi_hat {} vs {want_hat} (rel {rel:.2e})", row.pi_hat.rounded));
        let want_x = reference_at(X_OVER_LN_REFERENCE, k).unwrap() as f64;
        let rel_x = (row.x_over_ln_x_floor() as f64 - want_x).abs() / want_x;
        c.check(rel_x <= X_OVER_LN_REL_TOL, || format!("10^{k}: floor(x/ln x) {} vs {want_x}", row.x_over_ln_x_floor()));
        match (&row.pi, k) {
            (PiSource::Exact(v), 5) => c.check(*v == 9592, || format!("pi(10^5) = {v}")),
            (PiSource::Exact(v), 8) => c.check(*v == 5_761_455, || format!("pi(10^8) = {v}")),
            (PiSource::Reference(v), k) if k >= 11 => {
                c.check(Some(*v) == reference_at(PI_REFERENCE, k), || format!("10^{k}: reference echo {v}"))
            }
            (other, k) => c.check(false, || format!("10^{k}: unexpected pi source {other:?}")),
        }
    }
    let e5 = pi_hat(1e5, &params);
    c.check(e5.rounded == 9626, || format!("pi_hat(10^5) rounds to {}", e5.rounded));
    let e8 = rows[1].pi_hat.raw;
    c.note(format!("pi_hat(10^8) = {e8:.2}; the table's 5761142 is the floor, nearest is {}", e8.round()));
    let dedekind = pi_hat(1e5, &EstimatorParams::<f64>::dedekind());
    c.note(format!("dedekind preset at 10^5: {:.2} (reported only)", dedekind.raw));
    let t = secs(start.elapsed());
    c.check(t < ESTIMATOR_SECONDS, || format!("runtime {t:.2}s"));
    c.finish(&format!("pi_hat column for 10^5..10^29 (worst rel err {worst:.2e}, limit {PI_HAT_REL_TOL:.0e}), pi(x) exact to 10^8 ({t:.2}s)"))
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8() -> Outcome {
    let mut c = Checks::default();
    let codec = Codec::new(DEFAULT_SIEVE_CAP).unwrap();
    let mut oracle = OracleHeights::new("matula", false);
    for m in 1..=100_000u64 {
        let t = codec.decode(m).unwrap();
        let back = codec.encode(&t).unwrap();
        c.check(back == m, || format!("encode(decode({m})) = {back}"));
        let h = oracle.height(m).unwrap();
        c.check(t.edge_count() as u64 == h, || format!("m={m}: {} edges, height {h}", t.edge_count()));
    }
    let sf = words("matula", Mode::Squarefree, 12);
    let trees = all_trees(13);
    for h in 0..=12 {
        let mut numbers: Vec<u64> =
            trees[h + 1].iter().filter(|t| t.is_identity()).map(|t| codec.encode(t).unwrap()).collect();
        numbers.sort_unstable();
        let level = &sf.level(h).unwrap().elements;
        c.check(numbers.len() == level.len(), || format!("h={h}: {} identity trees, level size {}", numbers.len(), level.len()));
        c.check(numbers == *level, || format!("h={h}: identity-tree numbers differ from the level"));
    }
    let sizes: Vec<usize> = (0..=12).map(|h| sf.level(h).unwrap().count()).collect();
    c.finish(&format!("matula codec on [1, 10^5]; identity trees by edge count = squarefree levels {sizes:?}"))
}

// ---------------------------------------------------------------- criterion 9

fn criterion_9(shapiro17: &WordStructure) -> Outcome {
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    // complete additivity
    for name in ["partition", "prime_partition", "plane_partition", "matula", "matula_square", "shapiro", "a064097", "dedekind"] {
        let ev = Evaluator::new(rule(name, Mode::Plain));
        for _ in 0..2000 {
            let a = 1 + rng.next_u64() % 100_000;
            let b = 1 + rng.next_u64() % 100_000;
            let (ha, hb, hab) = (ev.height(a).unwrap(), ev.height(b).unwrap(), ev.height(a * b).unwrap());
            c.check(hab == ha + hb, || format!("{name}: H({a}·{b}) = {hab} != {ha} + {hb}"));
        }
    }
    // squarefree classes
    let ev = Evaluator::new(rule("shapiro", Mode::Squarefree));
    for p in [2u64, 3, 7, 43] {
        for k in 1..=5 {
            c.check(ev.height(p.pow(k)).unwrap() == ev.height(p).unwrap(), || format!("H({p}^{k}) != H({p})"));
        }
    }

    // A064097: steps of n -> n - d, d the largest proper divisor
    let ev = Evaluator::new(rule("a064097", Mode::Plain));
    for n in 1..=10_000u64 {
        let (mut m, mut steps) = (n, 0);
        while m > 1 {
            let spf = factor_td(m)[0].0;
            m -= m / spf;
            steps += 1;
        }
        c.check(ev.height(n).unwrap() == steps, || format!("a064097 n={n}: H={} steps={steps}", ev.height(n).unwrap()));
    }

    // Sophie Germain shift: 2p+1 prime at h+1 for p prime at h
    let mut sg_total = 0;
    for h in 1..=12 {
        let next = shapiro17.level(h + 1).unwrap();
        for &p in &shapiro17.level(h).unwrap().primes {
            if is_prime_td(2 * p + 1) {
                sg_total += 1;
                c.check(next.primes.binary_search(&(2 * p + 1)).is_ok(), || format!("2·{p}+1 not at height {}", h + 1));
            }
        }
    }

    // partial sums of the partition counts
    let primes = sieve(1_500_000);
    let part = words("partition", Mode::Plain, 20);
    let n_at = |i: usize| part.level(i).unwrap().count() as u64;
    let mut printed_fails = Vec::new();
    for n in 1..=20usize {
        let below: u64 = (1..n).map(n_at).sum();
        let upto: u64 = (1..=n).map(n_at).sum();
        let p_n = primes[n - 1];
        // every m < p_n sits below height n, and 1 is at height 0
        c.check(below + 1 >= p_n - 1, || format!("n={n}: sum below {below}, p_n {p_n}"));
        if below <= p_n {
            printed_fails.push(n);
        }
        c.check(upto <= 1 << n, || format!("n={n}: sum {upto} > 2^n"));
        c.check(n <= 2 || upto < 1 << n, || format!("n={n}: sum {upto} not below 2^n"));
        let elements_below: usize = (0..n).map(|i| part.level(i).unwrap().elements.iter().filter(|&&m| m < p_n).count()).sum();
        c.check(elements_below as u64 == p_n - 1, || format!("n={n}: numbers below p_n not all below height n"));
    }
    c.check(printed_fails == [1, 2, 3, 4, 5], || format!("strict form fails at {printed_fails:?}"));
    c.note(format!("sum_(i<n) p(i) > p_n holds for 6 <= n <= 20, fails at n = {printed_fails:?}; sum_(i<n) p(i) >= p_n - 2 holds throughout"));

    // prime bracket k ln k <= p_k <= k (ln k + ln ln k), upper side from k = 6
    for k in 1..=100_000usize {
        let p = primes[k - 1] as f64;
        let kf = k as f64;
        c.check(kf * kf.ln() <= p, || format!("lower bracket fails at k={k}"));
        if k >= 6 {
            c.check(p <= kf * (kf.ln() + kf.ln().ln()), || format!("upper bracket fails at k={k}"));
        }
    }

    // average order: sieve pass vs the oracle's direct sum
    let mut xs: Vec<u64> = (1..=300).collect();
    xs.extend([500, 1000, 2500, 5000, 7500, 10_000]);
    for (name, mode) in [
        ("partition", Mode::Plain),
        ("prime_partition", Mode::Plain),
        ("matula", Mode::Plain),
        ("shapiro", Mode::Plain),
        ("a064097", Mode::Plain),
        ("dedekind", Mode::Plain),
        ("partition", Mode::Squarefree),
        ("prime_partition", Mode::Squarefree),
    ] {
        let mut oracle = OracleHeights::new(name, mode.is_squarefree());
        let mut prefix = vec![0u64];
        for n in 1..=10_000u64 {
            let h = oracle.height(n).expect("plain and partition-type rules place every prime");
            prefix.push(prefix[n as usize - 1] + h);
        }
        let r = rule(name, mode);
        for &x in &xs {
            let f = avg_order(&r, x).unwrap();
            c.check(f == BigUint::from(prefix[x as usize]), || format!("{name} {mode} x={x}: sieve {f}, direct {}", prefix[x as usize]));
        }
    }

    // trend table, reported only
    let pp = rule("prime_partition", Mode::Plain);
    let trend: Vec<String> = [10_000u64, 100_000, 1_000_000]
        .iter()
        .map(|&x| {
            let f = avg_order(&pp, x).unwrap();
            let v = heightlab::stats::Normalizer::for_rule("prime_partition").apply(&f, x);
            format!("x={x}: {v:.4}")
        })
        .collect();
    // squarefree index rules leave primes such as p_4 = 7 without a height
    let unplaced = avg_order(&rule("matula", Mode::Squarefree), 100);
    c.check(unplaced.is_err(), || "squarefree matula average order should report an unplaced prime".into());
    c.note(format!("prime_partition F(x)·12 ln x/(pi^2 x^2): {}", trend.join(", ")));
    c.finish(&format!("invariant suites: additivity, A064097 iteration, {sg_total} Sophie Germain shifts, partial sums, prime bracket, average order"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut run = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let outcome = f();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{status} criterion {id} [{name}] {} ({:.2}s)", outcome.detail, secs(t.elapsed()));
        results.push((id, name, outcome));
    };

    run(1, "golden tables", &mut criterion_1);
    let t = Instant::now();
    let shapiro17 = words("shapiro", Mode::Plain, 17);
    let shapiro_time = secs(t.elapsed());
    run(2, "shapiro profile", &mut || criterion_2(&shapiro17, shapiro_time));
    run(3, "squarefree dedekind", &mut criterion_3);
    run(4, "oracle equivalence", &mut criterion_4);
    run(5, "extremal bounds", &mut || criterion_5(&shapiro17));
    run(6, "statistics", &mut || criterion_6(&shapiro17));
    run(7, "estimator", &mut criterion_7);
    run(8, "matula codec", &mut criterion_8);
    run(9, "invariant suites", &mut || criterion_9(&shapiro17));

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        results.len() - failed.len(),
        results.len(),
        secs(start.elapsed())
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
