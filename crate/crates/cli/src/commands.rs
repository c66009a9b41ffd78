use std::fs::File;
use std::io::{self, BufWriter, Write};

use num_bigint::BigUint;

use heightlab::bounds::{check_extremes_with_cap, PRINTED_MARKER};
use heightlab::genfunc::{distinct_counts, multipartition_counts};
use heightlab::matula::{Codec, RootedTree};
use heightlab::primality::DEFAULT_SIEVE_CAP;
use heightlab::rules::{IndexMap, RuleKind};
use heightlab::stats::{
    average_order_trend, growth_report, histogram, level_stats, pi_compare_table, pi_hat, table_xs, EstimatorParams,
    Normalizer, PiSource, Series,
};
use heightlab::{builtin_rule, with_structure, AnyStructure};

use crate::error::CliError;
use crate::output::{Cell, Table};
use crate::source::obtain;
use crate::{Cli, Command, Global, MatulaAction, Preset, SeriesArg};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Enumerate { structure, hmax, elements } => {
            let s = obtain(structure, *hmax, g)?;
            let table = if *elements { element_table(&s) } else { count_table(&s) };
            let last = s.counts()[s.height()];
            eprintln!("{}: heights 0..={}, N = {}, pi = {} at the top, {:?} integers", s.rule(), s.height(), last.n, last.pi, s.regime());
            emit(g, &table)
        }
        Command::Gfcheck { structure, hmax } => gfcheck(g, &obtain(structure, *hmax, g)?),
        Command::Stats { structure, hmax, all } => stats(g, &obtain(structure, *hmax, g)?, *all),
        Command::Growth { structure, hmax, base } => {
            if !(*base > 1.0) {
                return Err(CliError::Usage("growth base must exceed 1".into()));
            }
            let s = obtain(structure, *hmax, g)?;
            let mut t = Table::new("growth", &["h", "N", "pi", "n_ratio", "n_fit", "pi_ratio", "pi_fit", "prime_density"]);
            for r in growth_report(&s.counts(), *base) {
                t.push(vec![
                    Cell::int(r.h),
                    Cell::int(r.n),
                    Cell::int(r.pi),
                    Cell::opt_real(r.n_ratio),
                    Cell::Real(r.n_fit),
                    Cell::opt_real(r.pi_ratio),
                    Cell::Real(r.pi_fit),
                    Cell::Real(r.prime_density),
                ]);
            }
            emit(g, &t)
        }
        Command::Histogram { structure, height, width, series, origin } => {
            let series = match series {
                SeriesArg::All => Series::All,
                SeriesArg::Primes => Series::Primes,
                SeriesArg::SophieGermain => Series::SophieGermain,
            };
            let origin = origin
                .as_deref()
                .map(|o| o.parse::<BigUint>().map_err(|_| CliError::Usage(format!("origin `{o}` is not a natural"))))
                .transpose()?;
            // Sophie Germain membership is confirmed one level up
            let need = height + usize::from(series == Series::SophieGermain);
            let s = obtain(structure, need, g)?;
            let hist = with_structure!(&s, st => histogram(st, *height, *width, series, origin))?;
            let mut t = Table::new("histogram", &["bin_start", "bin_end", "count"]);
            for (k, &c) in hist.bins.iter().enumerate() {
                t.push(vec![Cell::int(hist.bin_start(k)), Cell::int(hist.bin_start(k + 1)), Cell::int(c)]);
            }
            eprintln!("{} values of series {} at height {} ({} below the origin)", hist.total(), hist.series, hist.h, hist.below_origin);
            emit(g, &t)
        }
        Command::Pihat { x, table, preset, first_height } => pihat(g, x, *table, *preset, *first_height),
        Command::Matula { action } => matula(g, action),
        Command::Bounds { structure, hmax } => {
            let s = obtain(structure, *hmax, g)?;
            let cap = g.sieve_cap.unwrap_or(DEFAULT_SIEVE_CAP);
            let report = with_structure!(&s, st => check_extremes_with_cap(st, *hmax, cap));
            if report.rows.is_empty() {
                return Err(CliError::Usage(format!("no closed-form extremes are known for {}", s.rule())));
            }
            let mut t = Table::new("bounds", &["h", "formula", "extreme", "enumerated", "predicted", "in_range", "holds"]);
            for r in &report.rows {
                t.push(vec![
                    Cell::int(r.h),
                    Cell::text(r.formula.clone()),
                    Cell::text(r.extreme.to_string()),
                    Cell::opt_int(r.enumerated.as_ref()),
                    Cell::opt_int(r.predicted.as_ref()),
                    Cell::Bool(r.in_range),
                    Cell::Bool(r.holds),
                ]);
            }
            emit(g, &t)?;
            for r in report.failures() {
                let kind = if r.formula.contains(PRINTED_MARKER) { "reported" } else { "FAILED" };
                eprintln!("{kind}: h = {} `{}` predicts {:?}, enumerated {:?}", r.h, r.formula, r.predicted, r.enumerated);
            }
            if report.corrected_passes() {
                Ok(())
            } else {
                Err(CliError::Mismatch(format!("closed-form extremes of {} do not hold", s.rule())))
            }
        }
        Command::Avgorder { rule, x } => {
            let r = builtin_rule(&rule.rule, rule.mode)?;
            let norm = Normalizer::for_rule(&r.name());
            let rows = average_order_trend(&r, x, norm)?;
            let mut t = Table::new("avgorder", &["x", "F", "normalized"]);
            for row in rows {
                t.push(vec![Cell::int(row.x), Cell::int(row.f), Cell::Real(row.normalized)]);
            }
            eprintln!(
                "normalized = F(x) * {} * (ln x)^{} / x^{}",
                crate::output::sig10(norm.constant),
                norm.log_power,
                norm.alpha
            );
            emit(g, &t)
        }
    }
}

fn emit(g: &Global, table: &Table) -> Result<(), CliError> {
    let header = !g.no_header;
    match &g.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(g.format, header, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            table.write(g.format, header, stdout.lock())?;
        }
    }
    Ok(())
}

fn count_table(s: &AnyStructure) -> Table {
    let mut t = Table::new("enumerate", &["h", "N", "pi", "min", "max"]);
    with_structure!(s, st => {
        for l in st.levels() {
            t.push(vec![
                Cell::int(l.h),
                Cell::int(l.count()),
                Cell::int(l.prime_count()),
                Cell::opt_int(l.min()),
                Cell::opt_int(l.max()),
            ]);
        }
    });
    t
}

fn element_table(s: &AnyStructure) -> Table {
    let mut t = Table::new("enumerate", &["h", "n", "prime"]);
    with_structure!(s, st => {
        for l in st.levels() {
            for e in &l.elements {
                t.push(vec![Cell::int(l.h), Cell::int(e), Cell::Bool(l.primes.binary_search(e).is_ok())]);
            }
        }
    });
    t
}

fn gfcheck(g: &Global, s: &AnyStructure) -> Result<(), CliError> {
    let counts = s.counts();
    let h = s.height();
    let pi = s.pi_profile();
    let series = if s.rule().is_squarefree() { distinct_counts(&pi, h) } else { multipartition_counts(&pi, h) };
    // Matula-type rules place one prime per element one level down
    let echo = matches!(s.rule().kind, RuleKind::IndexRecursive { map: IndexMap::Identity, shift: 1 });
    let columns: &[&str] = if echo { &["h", "N", "genfunc", "pi", "N_prev", "match"] } else { &["h", "N", "genfunc", "pi", "match"] };
    let mut t = Table::new("gfcheck", columns);
    let mut first_bad = None;
    for c in &counts {
        let coef = &series.coeffs[c.h];
        let mut ok = *coef == BigUint::from(c.n);
        let mut row = vec![Cell::int(c.h), Cell::int(c.n), Cell::int(coef), Cell::int(c.pi)];
        if echo {
            let prev = c.h.checked_sub(1).map(|j| counts[j].n);
            ok &= prev.is_none_or(|p| p == c.pi);
            row.push(Cell::opt_int(prev));
        }
        row.push(Cell::Bool(ok));
        t.push(row);
        if !ok && first_bad.is_none() {
            first_bad = Some(c.h);
        }
    }
    emit(g, &t)?;
    match first_bad {
        None => {
            eprintln!("{}: enumeration matches the generating function for h <= {h}", s.rule());
            Ok(())
        }
        Some(bad) => Err(CliError::Mismatch(format!("{}: first mismatch at h = {bad}", s.rule()))),
    }
}

fn stats(g: &Global, s: &AnyStructure, all: bool) -> Result<(), CliError> {
    let mut columns = vec!["h", "N", "pi", "mean_log_over_h", "sd_log_over_sqrt_h"];
    if all {
        columns.extend(["all_mean_log_over_h", "all_sd_log_over_sqrt_h"]);
    }
    let mut t = Table::new("stats", &columns);
    let mut top = None;
    for c in s.counts().into_iter().skip(1) {
        let mut row = vec![Cell::int(c.h), Cell::int(c.n), Cell::int(c.pi)];
        if c.pi == 0 {
            row.extend([Cell::Empty, Cell::Empty]);
            if all {
                row.extend([Cell::Empty, Cell::Empty]);
            }
        } else {
            let st = with_structure!(s, st => level_stats(st, c.h, all))?;
            row.extend([Cell::Real(st.primes.mean_log_over_h), Cell::Real(st.primes.sd_log_over_sqrt_h)]);
            if let Some(a) = st.all {
                row.extend([Cell::Real(a.mean_log_over_h), Cell::Real(a.sd_log_over_sqrt_h)]);
            }
            top = Some(st);
        }
        t.push(row);
    }
    emit(g, &t)?;
    if let Some(st) = top {
        let counts = s.counts();
        let growth = st.h.checked_sub(1).map(|j| counts[st.h].n as f64 / counts[j].n as f64);
        eprintln!(
            "fitted at h = {}: B = {}, mu = {}, sigma = {} (shapiro constants 2.3, 0.8486, 0.1771; dedekind 1.855, 0.6225, 0.0958)",
            st.h,
            growth.map_or("-".into(), crate::output::sig10),
            crate::output::sig10(st.primes.mean_log_over_h),
            crate::output::sig10(st.primes.sd_log_over_sqrt_h),
        );
    }
    Ok(())
}

fn pihat(g: &Global, xs: &[u128], table: bool, preset: Preset, first_height: Option<usize>) -> Result<(), CliError> {
    let mut params = match preset {
        Preset::Shapiro => EstimatorParams::<f64>::shapiro(),
        Preset::Dedekind => EstimatorParams::<f64>::dedekind(),
    };
    if let Some(h) = first_height {
        params = params.with_first_height(h);
    }
    if !params.is_valid() {
        return Err(CliError::Usage("estimator parameters are invalid (first height must be at least 1)".into()));
    }
    if let Some(x) = xs.iter().find(|&&x| x < 2) {
        return Err(CliError::Usage(format!("x must be at least 2, got {x}")));
    }
    if table {
        let xs = if xs.is_empty() { table_xs() } else { xs.to_vec() };
        let mut t = Table::new("pihat", &["x", "pi", "pi_source", "pi_hat", "x_over_ln_x"]);
        for row in pi_compare_table(&xs, &params) {
            let source = match row.pi {
                PiSource::Exact(_) => "sieve",
                PiSource::Reference(_) => "reference",
                PiSource::Unavailable => "unavailable",
            };
            t.push(vec![
                Cell::int(row.x),
                Cell::opt_int(row.pi.value()),
                Cell::text(source),
                Cell::int(row.pi_hat.rounded),
                Cell::int(row.x_over_ln_x_floor()),
            ]);
        }
        return emit(g, &t);
    }
    if xs.is_empty() {
        return Err(CliError::Usage("pihat needs --x or --table".into()));
    }
    let mut t = Table::new("pihat", &["x", "pi_hat_raw", "pi_hat"]);
    for &x in xs {
        let e = pi_hat(x as f64, &params);
        t.push(vec![Cell::int(x), Cell::Real(e.raw), Cell::int(e.rounded)]);
    }
    emit(g, &t)
}

fn matula(g: &Global, action: &MatulaAction) -> Result<(), CliError> {
    let codec = Codec::new(g.sieve_cap.unwrap_or(DEFAULT_SIEVE_CAP))?;
    let mut t = Table::new("matula", &["m", "tree", "nodes", "edges", "identity"]);
    let mut push = |m: u64, tree: &RootedTree| {
        t.push(vec![
            Cell::int(m),
            Cell::text(tree.to_string()),
            Cell::int(tree.node_count()),
            Cell::int(tree.edge_count()),
            Cell::Bool(tree.is_identity()),
        ])
    };
    match action {
        MatulaAction::Encode { trees } => {
            if trees.is_empty() {
                return Err(CliError::Usage("give at least one tree".into()));
            }
            for text in trees {
                let tree: RootedTree = text.parse()?;
                let m = codec.encode(&tree)?;
                push(m, &codec.decode(m)?);
            }
        }
        MatulaAction::Decode { numbers } => {
            if numbers.is_empty() {
                return Err(CliError::Usage("give at least one number".into()));
            }
            for &m in numbers {
                push(m, &codec.decode(m)?);
            }
        }
    }
    emit(g, &t)
}
