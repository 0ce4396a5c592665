//! Acceptance criteria 1 to 9, one PASS/FAIL line each.
//! Run with `cargo test --release -p monosched --test acceptance`.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use monosched::report::suite_lines;
use monosched::suites::{self, property_suites, thread_pool, Suite};
use monosched_core::numerics::{format_rational, to_f64};
use monosched_core::verify::{Check, TrialRecord};

const SEED: u64 = 1;

fn counts(records: &[TrialRecord]) -> BTreeMap<&'static str, usize> {
    let mut out = BTreeMap::new();
    for r in records {
        let mut seen: Vec<Check> = r.failures.iter().map(|f| f.check).collect();
        seen.sort();
        seen.dedup();
        for c in seen {
            *out.entry(c.name()).or_insert(0) += 1;
        }
    }
    out
}

fn failing(records: &[TrialRecord], checks: &[Check]) -> usize {
    records.iter().filter(|r| checks.iter().any(|&c| r.fails(c))).count()
}

fn first_failure(records: &[TrialRecord], checks: &[Check]) -> String {
    records
        .iter()
        .find(|r| checks.iter().any(|&c| r.fails(c)))
        .map(|r| {
            let f = r.failures.iter().find(|f| checks.contains(&f.check)).expect("failure");
            format!(
                "; first: trial {} seed {:?} jobs {:?} speeds {:?} t={} ({}: {})",
                r.index,
                r.seed,
                r.sample.sizes.iter().map(format_rational).collect::<Vec<_>>(),
                r.sample.speeds.iter().map(format_rational).collect::<Vec<_>>(),
                r.sample.t,
                f.check.name(),
                f.detail
            )
        })
        .unwrap_or_default()
}

struct Verdicts {
    all_pass: bool,
}

impl Verdicts {
    fn line(&mut self, n: u32, name: &str, pass: bool, detail: String) {
        self.all_pass &= pass;
        println!("criterion {n} [{name}]: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut v = Verdicts { all_pass: true };
    let shape = suites::shape(None, None);
    let one = thread_pool(1);
    let eight = thread_pool(8);

    // Suites 1 and 2 run twice, with 1 and with 8 threads.
    let t0 = Instant::now();
    let mono = suites::run(Suite::Monotonicity, &shape, SEED, Some(1000), &eight, None);
    let mono_secs = t0.elapsed().as_secs_f64();
    let mono_single = suites::run(Suite::Monotonicity, &shape, SEED, Some(1000), &one, None);
    let t0 = Instant::now();
    let exhaustive = suites::exhaustive(&eight, None);
    let exhaustive_secs = t0.elapsed().as_secs_f64();
    let exhaustive_single = suites::exhaustive(&one, None);

    let violations = failing(&mono, &[Check::Monotonicity]);
    let unsolved = failing(&mono, &[Check::Solve]);
    v.line(
        1,
        "monotonicity",
        violations == 0 && unsolved == 0,
        format!(
            "{} trials, {violations} monotonicity violations, {unsolved} trials without a schedule, {mono_secs:.1}s{}",
            mono.len(),
            first_failure(&mono, &[Check::Monotonicity, Check::Solve])
        ),
    );

    let max_ratio = exhaustive.iter().filter_map(|r| r.metric.clone()).max();
    let over = failing(&exhaustive, &[Check::Approximation]);
    let unsolved = failing(&exhaustive, &[Check::Solve]);
    v.line(
        2,
        "approximation",
        over == 0 && unsolved == 0,
        format!(
            "{} instances, {over} above 1+3eps, {unsolved} without a schedule, max ratio {} ~ {:.4}, {exhaustive_secs:.1}s{}",
            exhaustive.len(),
            max_ratio.as_ref().map_or("none".into(), format_rational),
            max_ratio.as_ref().map_or(f64::NAN, to_f64),
            first_failure(&exhaustive, &[Check::Approximation, Check::Solve])
        ),
    );

    let both: Vec<TrialRecord> = mono.iter().chain(&exhaustive).cloned().collect();
    let solved = both.len() - failing(&both, &[Check::Solve]);
    let canon = failing(&both, &[Check::Canonical]);
    v.line(
        3,
        "canonicality",
        canon == 0,
        format!("{solved} outputs checked in suites 1-2, {canon} violations{}", first_failure(&both, &[Check::Canonical])),
    );
    let bounds = failing(&both, &[Check::Bounds]);
    v.line(
        4,
        "workload bounds",
        bounds == 0,
        format!("{solved} outputs checked in suites 1-2, {bounds} violations{}", first_failure(&both, &[Check::Bounds])),
    );

    let t0 = Instant::now();
    let truth = suites::run(Suite::Truthfulness, &shape, SEED, Some(100), &eight, None);
    let lies = failing(&truth, &[Check::Truthfulness]);
    let unsolved = failing(&truth, &[Check::Solve]);
    v.line(
        5,
        "truthfulness",
        lies == 0 && unsolved == 0,
        format!(
            "{} instances, {lies} with a profitable grid bid, {unsolved} with a bid lacking a schedule, {:.1}s{}",
            truth.len(),
            t0.elapsed().as_secs_f64(),
            first_failure(&truth, &[Check::Truthfulness, Check::Solve])
        ),
    );

    let t0 = Instant::now();
    let construction = suites::run(Suite::Construction, &shape, SEED, Some(200), &eight, None);
    let bad = failing(&construction, &[Check::Construction]);
    v.line(
        6,
        "rounded optimum",
        bad == 0,
        format!(
            "{} instances, {bad} violations, {:.1}s{}",
            construction.len(),
            t0.elapsed().as_secs_f64(),
            first_failure(&construction, &[Check::Construction])
        ),
    );

    let t0 = Instant::now();
    let fine = suites::run(Suite::Fine, &shape, SEED, Some(20), &eight, None);
    let encoding = failing(&construction, &[Check::Encoding]);
    let worse = failing(&construction, &[Check::PathOptimum]);
    let no_path = failing(&construction, &[Check::Solve]);
    let fine_bad = fine.iter().filter(|r| !r.passed()).count();
    let fine_max = fine.iter().filter_map(|r| r.metric.clone()).max();
    v.line(
        7,
        "graph completeness",
        encoding == 0 && worse == 0 && no_path == 0 && fine_bad == 0,
        format!(
            "suite 6: {encoding} encoding failures, {no_path} without an optimal path, {worse} with optpath above the encoding; \
             t=22: {} instances, {fine_bad} failures, max M/OPT {}, {:.1}s{}{}",
            fine.len(),
            fine_max.as_ref().map_or("none".into(), format_rational),
            t0.elapsed().as_secs_f64(),
            first_failure(&construction, &[Check::Encoding, Check::Solve, Check::PathOptimum]),
            first_failure(&fine, &[Check::PathOptimum, Check::Solve])
        ),
    );

    let t0 = Instant::now();
    let props = property_suites(SEED, 10_000, &eight);
    let props_ok = props.iter().all(|l| l.failures.is_empty() && l.calls == 10_000);
    let summary: Vec<String> = props.iter().map(|l| format!("{} {}/{}", l.name, l.calls - l.failures.len(), l.calls)).collect();
    let first = props
        .iter()
        .find_map(|l| l.failures.first().map(|f| format!("; first: {}: {f}", l.name)))
        .unwrap_or_default();
    v.line(8, "structural properties", props_ok, format!("{}, {:.1}s{first}", summary.join(", "), t0.elapsed().as_secs_f64()));

    let same_mono = suite_lines("monotonicity", &mono, false) == suite_lines("monotonicity", &mono_single, false);
    let same_exh = suite_lines("exhaustive", &exhaustive, false) == suite_lines("exhaustive", &exhaustive_single, false);
    v.line(
        9,
        "determinism",
        same_mono && same_exh,
        format!("1 vs 8 threads: suite 1 identical {same_mono}, suite 2 identical {same_exh}"),
    );

    println!("failure kinds: suite 1 {:?}; suite 2 {:?}; suite 5 {:?}; suite 6 {:?}; t=22 {:?}",
        counts(&mono), counts(&exhaustive), counts(&truth), counts(&construction), counts(&fine));
    println!("total {:.1}s", started.elapsed().as_secs_f64());
    if v.all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
