//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line with its runtime budget.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use oracle_scan::analytics::{
    fit_thresholds, pearson, student_t_two_sided, summarize, CorpusCounts, Denominator, Level,
    ProjectRecord,
};
use oracle_scan::cfg::{build_cfg, cyclomatic, decision_point_count, CfgOptions};
use oracle_scan::detector::{
    classify_strategies, match_names, usage_counts, Category, KeywordList, StrategyLabel,
};
use oracle_scan::names::build_index;
use oracle_scan::scan::{emit, scan, Format, ScanOptions};
use oracle_scan::{parse_source, SourceFile};
use rand::Rng;

type Check = fn() -> Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn listings_suite() -> Result<(), String> {
    let captions = [
        StrategyLabel::CentralizedOracle,
        StrategyLabel::DecentralizedOracle,
        StrategyLabel::Sidechain,
        StrategyLabel::CrossChainBridge,
        StrategyLabel::Zkp,
    ];
    let mut asts = Vec::new();
    for (i, path) in common::listing_paths().iter().enumerate() {
        let source = SourceFile::read(path).map_err(|e| e.to_string())?;
        let (ast, diags) = parse_source(&source);
        ensure(diags.is_empty(), || {
            format!("listing {} has diagnostics: {diags:?}", i + 1)
        })?;
        let labels: BTreeSet<_> = ast
            .children
            .iter()
            .filter(|c| c.kind.is_contract_like())
            .flat_map(classify_strategies)
            .collect();
        ensure(labels == BTreeSet::from([captions[i]]), || {
            format!("listing {} labels {labels:?}", i + 1)
        })?;
        asts.push((ast, format!("listing{}.sol", i + 1)));
    }
    let index = build_index(asts.iter().map(|(a, f)| (a, f.as_str())));
    let counts = usage_counts(&match_names(&index, &KeywordList::default()));
    let expected = [
        ("oracle", Category::OracleServices, 3),
        ("bridge", Category::CrossChain, 1),
        ("crosschain", Category::CrossChain, 1),
        ("api", Category::CrossChain, 0),
        ("chainlink", Category::OracleServices, 0),
        ("dydx", Category::OracleServices, 0),
        ("external", Category::OracleServices, 0),
    ];
    for (k, c, n) in expected {
        let got = counts.get(&(k.to_string(), c)).copied().unwrap_or(0);
        ensure(got == n, || format!("{k}: {got} != {n}"))?;
    }
    Ok(())
}

fn cyclomatic_equivalence() -> Result<(), String> {
    let opts = CfgOptions::default();
    let mut units: Vec<String> = common::listing_paths()
        .iter()
        .map(|p| fs::read_to_string(p).unwrap())
        .collect();
    units.extend((0..250).map(|s| common::render(&common::Generator::new(s, 5).unit())));
    for (i, text) in units.iter().enumerate() {
        let (ast, _) = parse_source(&SourceFile::new("u.sol", text.as_str()));
        let v = cyclomatic(&build_cfg(&ast, opts));
        let d = decision_point_count(&ast, opts);
        ensure(v == d, || format!("unit {i}: V={v}, decision count={d}"))?;
    }
    let mut trials = 0;
    let mut seed = 10_000;
    while trials < 50 {
        seed += 1;
        let mut g = common::Generator::new(seed, 5);
        let mut unit = g.unit();
        let before = parse_source(&SourceFile::new("m.sol", common::render(&unit))).0;
        if !g.insert_if(&mut unit) {
            continue;
        }
        let after = parse_source(&SourceFile::new("m.sol", common::render(&unit))).0;
        let (b, a) = (
            cyclomatic(&build_cfg(&before, opts)),
            cyclomatic(&build_cfg(&after, opts)),
        );
        ensure(a == b + 1, || format!("seed {seed}: {b} -> {a}"))?;
        trials += 1;
    }
    Ok(())
}

/// Minimum-SSE split by exact rational comparison.
fn brute_force(freqs: &[u64]) -> (f64, f64) {
    let mut v = freqs.to_vec();
    v.sort_unstable();
    v.dedup();
    let d = v.len();
    let group = |lo: u64, hi: u64| {
        let m: Vec<u128> = freqs
            .iter()
            .filter(|&&f| f >= lo && f <= hi)
            .map(|&f| f as u128)
            .collect();
        let s: u128 = m.iter().sum();
        (s * s, m.len() as u128)
    };
    let mut best: Option<(u128, u128, (f64, f64))> = None;
    for a in 0..d - 2 {
        for b in a + 1..d - 1 {
            let (p1, n1) = group(v[0], v[a]);
            let (p2, n2) = group(v[a + 1], v[b]);
            let (p3, n3) = group(v[b + 1], v[d - 1]);
            let (num, den) = (p1 * n2 * n3 + p2 * n1 * n3 + p3 * n1 * n2, n1 * n2 * n3);
            let t = (
                (v[a] + v[a + 1]) as f64 / 2.0,
                (v[b] + v[b + 1]) as f64 / 2.0,
            );
            let take = best
                .is_none_or(|(bn, bd, bt)| num * bd > bn * den || (num * bd == bn * den && t < bt));
            if take {
                best = Some((num, den, t));
            }
        }
    }
    best.unwrap().2
}

fn sse(groups: &[Vec<u64>]) -> f64 {
    groups
        .iter()
        .map(|g| {
            let m = g.iter().sum::<u64>() as f64 / g.len() as f64;
            g.iter().map(|&f| (f as f64 - m).powi(2)).sum::<f64>()
        })
        .sum()
}

fn sse_of_split(all: &[u64], t1: f64, t2: f64) -> f64 {
    let pick = |lo: f64, hi: f64| {
        all.iter()
            .copied()
            .filter(|&f| f as f64 > lo && f as f64 <= hi)
            .collect()
    };
    sse(&[pick(-1.0, t1), pick(t1, t2), pick(t2, f64::INFINITY)])
}

fn threshold_fitting() -> Result<(), String> {
    const UNIVERSE: [u64; 12] = [0, 1, 2, 4, 7, 12, 20, 33, 54, 88, 143, 232];
    let mut rng = common::rng(99);
    for mask in 0u32..(1 << 12) {
        if mask.count_ones() < 3 {
            continue;
        }
        let freqs: Vec<u64> = UNIVERSE
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .flat_map(|(_, &v)| std::iter::repeat_n(v, rng.gen_range(1..4)))
            .collect();
        let th = fit_thresholds(&freqs).map_err(|e| e.to_string())?;
        let want = brute_force(&freqs);
        ensure((th.t1, th.t2) == want, || {
            format!("{freqs:?}: {:?} vs {want:?}", (th.t1, th.t2))
        })?;
    }
    let mut recovered = 0;
    let mut first_miss = None;
    for seed in 0..100u64 {
        let mut rng = common::rng(seed);
        let mut clusters: [Vec<u64>; 3] = Default::default();
        for (k, centre) in [5.0f64, 100.0, 5000.0].into_iter().enumerate() {
            for _ in 0..10 {
                let noise = rng.gen_range(-0.1..=0.1);
                clusters[k].push((centre * (1.0 + noise)).round() as u64);
            }
        }
        let all: Vec<u64> = clusters.iter().flatten().copied().collect();
        let th = fit_thresholds(&all).map_err(|e| e.to_string())?;
        let ok = clusters[0].iter().all(|&f| th.level(f) == Level::Low)
            && clusters[1].iter().all(|&f| th.level(f) == Level::Medium)
            && clusters[2].iter().all(|&f| th.level(f) == Level::High);
        recovered += usize::from(ok);
        if !ok && first_miss.is_none() {
            first_miss = Some((
                seed,
                th.t1,
                th.t2,
                sse(&clusters),
                sse_of_split(&all, th.t1, th.t2),
            ));
        }
    }
    ensure(recovered >= 95, || {
        let (seed, t1, t2, planted, fitted) = first_miss.unwrap();
        format!(
            "recovered {recovered}/100; seed {seed} fitted t1={t1} t2={t2} with SSE {fitted:.0} \
             below the planted partition's SSE {planted:.0}"
        )
    })?;
    Ok(())
}

/// Two-sided p-values for Pearson r with n points, tabulated from the t
/// distribution with n - 2 degrees of freedom.
const P_TABLE: [(usize, f64, f64); 12] = [
    (10, 0.632, 0.049_951_112_184_977),
    (5, 0.5, 0.391_002_218_955_771),
    (20, 0.3, 0.198_757_717_344_554),
    (30, -0.45, 0.012_591_071_275_197),
    (100, 0.2, 0.046_036_286_460_054),
    (4, 0.8, 0.2),
    (3, 0.9, 0.287_132_586_257_412),
    (12, 0.0, 1.0),
    (50, 0.7, 1.538_206_628_399e-8),
    (8, 0.95, 0.000_300_898_437_5),
    (1000, 0.05, 0.114_072_595_551_073),
    (15, -0.1, 0.722_897_325_279_118),
];

fn pearson_checks() -> Result<(), String> {
    let mut rng = common::rng(4);
    for i in 0..100 {
        let n = rng.gen_range(3..=1000);
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| 0.5 * x + rng.gen_range(-40.0..40.0))
            .collect();
        let nf = n as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / nf, ys.iter().sum::<f64>() / nf);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        let direct = sxy / (sxx * syy).sqrt();
        let c = pearson(&xs, &ys).map_err(|e| e.to_string())?;
        ensure((c.r - direct).abs() < 1e-12, || {
            format!("vector {i}: {} vs {direct}", c.r)
        })?;
        let moved: Vec<f64> = xs.iter().map(|x| 3.5 * x - 17.0).collect();
        let r2 = pearson(&moved, &ys).map_err(|e| e.to_string())?.r;
        ensure((c.r - r2).abs() < 1e-12, || {
            format!("vector {i}: shift/scale {} vs {r2}", c.r)
        })?;
    }
    for (n, r, p) in P_TABLE {
        let df = (n - 2) as f64;
        let got = student_t_two_sided(r * (df / (1.0 - r * r)).sqrt(), df);
        ensure((got - p).abs() < 1e-6, || {
            format!("n={n} r={r}: {got} vs {p}")
        })?;
    }
    let headline = student_t_two_sided(0.632 * (8.0f64 / (1.0 - 0.632 * 0.632)).sqrt(), 8.0);
    ensure((headline - 0.050).abs() < 1e-3, || {
        format!("n=10 r=0.632: {headline}")
    })
}

fn arithmetic_identities() -> Result<(), String> {
    let counts = CorpusCounts {
        scanned: 10_000,
        parsed_ok: 10_000,
        interacting: 286,
        ..Default::default()
    };
    let s = summarize(counts, Denominator::Scanned, &[], None, None, vec![]);
    ensure((s.proportion_percent - 2.86).abs() <= 0.005, || {
        format!("{}%", s.proportion_percent)
    })?;
    ensure(
        s.interacting <= s.parsed_ok && s.parsed_ok <= s.scanned,
        || "count ordering".into(),
    )?;

    let mut rng = common::rng(286);
    for _ in 0..100 {
        let n = rng.gen_range(10..200);
        let spread = rng.gen_range(100..5000);
        let mut freqs: Vec<u64> = (0..n).map(|_| rng.gen_range(0..spread)).collect();
        freqs.push(11_724);
        let th = fit_thresholds(&freqs).map_err(|e| e.to_string())?;
        ensure(th.level(11_724) == Level::High, || {
            format!("11724 not High under {th:?}")
        })?;
    }

    let records: Vec<ProjectRecord> = {
        let mut freqs: Vec<u64> = (0..73).map(|_| rng.gen_range(0..230)).collect();
        let total: u64 = 117 * 74;
        let rest: u64 = freqs.iter().sum();
        freqs.push(
            total
                .checked_sub(rest)
                .ok_or("synthetic vector overshoots")?,
        );
        freqs
            .into_iter()
            .enumerate()
            .map(|(i, f)| ProjectRecord {
                project_id: format!("p{i}"),
                access_frequency: f,
                complexity: 1,
                domain: None,
                strategies: BTreeSet::new(),
            })
            .collect()
    };
    let s = summarize(
        CorpusCounts::default(),
        Denominator::Parsed,
        &records,
        None,
        None,
        vec![],
    );
    ensure(s.mean_frequency == 117.0, || {
        format!("mean {}", s.mean_frequency)
    })
}

fn pipeline() -> Result<(), String> {
    let corpus = tempfile::tempdir().map_err(|e| e.to_string())?;
    let files = common::write_corpus(corpus.path(), 55, 2024);
    for p in common::listing_paths() {
        fs::copy(&p, corpus.path().join(p.file_name().unwrap())).map_err(|e| e.to_string())?;
    }
    let cache = tempfile::tempdir().map_err(|e| e.to_string())?;
    let base = ScanOptions {
        timestamp: Some("1970-01-01T00:00:00Z".into()),
        ..Default::default()
    };
    let cached = ScanOptions {
        cache_dir: Some(cache.path().to_path_buf()),
        ..base.clone()
    };
    let run = |o: &ScanOptions| scan(corpus.path(), o).map_err(|e| e.to_string());

    let first = run(&base)?;
    ensure(first.report.findings.len() >= 50, || {
        "corpus too small".into()
    })?;
    let again = run(&base)?;
    for format in [Format::Json, Format::Csv] {
        ensure(
            emit(&first.report, format) == emit(&again.report, format),
            || format!("{format:?} output differs between identical runs"),
        )?;
    }
    let warm = run(&cached)?;
    let hot = run(&cached)?;
    ensure(hot.cache_hits == hot.report.findings.len(), || {
        format!("{} cache hits", hot.cache_hits)
    })?;
    let json = emit(&first.report, Format::Json);
    ensure(
        emit(&warm.report, Format::Json) == json && emit(&hot.report, Format::Json) == json,
        || "cache changed the report".into(),
    )?;

    fs::write(&files[13], "contract Oops { function ( § ;\n").map_err(|e| e.to_string())?;
    let broken = run(&base)?;
    let changed: Vec<_> = first
        .report
        .findings
        .iter()
        .zip(&broken.report.findings)
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.file.clone())
        .collect();
    ensure(changed.len() == 1, || {
        format!("changed findings: {changed:?}")
    })?;
    ensure(
        broken.report.summary.parsed_ok + 1 == first.report.summary.parsed_ok,
        || "parsed-ok count did not drop by one".into(),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Duration); 6] = [
        (
            "1 listings fixture suite",
            listings_suite,
            Duration::from_secs(1),
        ),
        (
            "2 cyclomatic oracle equivalence",
            cyclomatic_equivalence,
            Duration::from_secs(10),
        ),
        (
            "3 threshold fitting",
            threshold_fitting,
            Duration::from_secs(5),
        ),
        (
            "4 pearson correlation",
            pearson_checks,
            Duration::from_secs(10),
        ),
        (
            "5 arithmetic identities",
            arithmetic_identities,
            Duration::from_secs(5),
        ),
        (
            "6 pipeline determinism and fault isolation",
            pipeline,
            Duration::from_secs(10),
        ),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let verdict = match outcome {
            Ok(()) if elapsed <= budget => Ok(()),
            Ok(()) => Err(format!("over budget ({elapsed:.2?} > {budget:?})")),
            Err(e) => Err(e),
        };
        match verdict {
            Ok(()) => println!("PASS  {name}  ({elapsed:.2?}, limit {budget:?})"),
            Err(e) => {
                failed += 1;
                println!("FAIL  {name}  ({elapsed:.2?}, limit {budget:?}): {e}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
