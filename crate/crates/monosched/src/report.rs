//! JSON reports. Numbers are rational strings; `--float` adds decimal copies.

use monosched_core::config::dump;
use monosched_core::graph::{Case, Finish, Level};
use monosched_core::instance::JobPool;
use monosched_core::numerics::{format_rational, to_f64, Rational};
use monosched_core::solver::Schedule;
use monosched_core::verify::TrialRecord;
use serde::Serialize;

use crate::io::{InstanceFile, Parsed};

fn finish_str(f: &Finish) -> String {
    match f {
        Finish::Finite(r) => format_rational(r),
        Finish::Infinite => "inf".into(),
    }
}

#[derive(Serialize)]
pub struct MachineRow {
    pub machine: usize,
    pub speed: String,
    pub jobs: Vec<usize>,
    pub workload: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workload_float: Option<f64>,
}

#[derive(Serialize)]
pub struct TraceLayer {
    pub machine: usize,
    pub level: &'static str,
    pub config: Vec<String>,
}

#[derive(Serialize)]
pub struct Trace {
    /// Visited vertices per layer.
    pub visited: Vec<usize>,
    pub path: Vec<TraceLayer>,
}

#[derive(Serialize)]
pub struct SolveReport {
    pub epsilon: String,
    pub t: u32,
    /// Makespan of the returned allocation on the input speeds.
    pub makespan: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub makespan_float: Option<f64>,
    /// Makespan the configuration path accounts for, tiny-job blocks included.
    pub path_makespan: String,
    pub switch_index: usize,
    pub case: Option<&'static str>,
    pub low: Option<bool>,
    pub machines: Vec<MachineRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Trace>,
}

fn float_if(float: bool, r: &Rational) -> Option<f64> {
    float.then(|| to_f64(r))
}

pub fn solve_report(input: &Parsed, sched: &Schedule, pool: &JobPool, float: bool, trace: bool) -> SolveReport {
    let machines = sched
        .assignment
        .iter()
        .enumerate()
        .map(|(i, jobs)| MachineRow {
            machine: i,
            speed: format_rational(&input.speeds[i]),
            jobs: jobs.clone(),
            workload: format_rational(&sched.workloads[i]),
            workload_float: float_if(float, &sched.workloads[i]),
        })
        .collect();
    let trace = trace.then(|| Trace {
        visited: sched.visited.clone(),
        path: sched
            .path
            .configs
            .iter()
            .zip(&sched.path.levels)
            .enumerate()
            .map(|(i, (c, level))| TraceLayer {
                machine: i,
                level: match level {
                    Level::I => "I",
                    Level::II => "II",
                },
                config: dump(c, pool).lines().map(str::to_owned).collect(),
            })
            .collect(),
    });
    SolveReport {
        epsilon: format_rational(&input.epsilon),
        t: input.t,
        makespan: format_rational(&sched.achieved),
        makespan_float: float_if(float, &sched.achieved),
        path_makespan: finish_str(sched.makespan()),
        switch_index: sched.path.k,
        case: sched.path.case.map(|c| match c {
            Case::A => "A",
            Case::B => "B",
        }),
        low: sched.partition.low,
        machines,
        trace,
    }
}

#[derive(Serialize)]
pub struct PaymentRow {
    pub machine: usize,
    pub speed: String,
    pub work: String,
    pub payment: String,
    pub utility: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub float: Option<[f64; 3]>,
}

impl PaymentRow {
    pub fn new(machine: usize, speed: &Rational, work: &Rational, payment: &Rational, utility: &Rational, float: bool) -> Self {
        PaymentRow {
            machine,
            speed: format_rational(speed),
            work: format_rational(work),
            payment: format_rational(payment),
            utility: format_rational(utility),
            float: float.then(|| [to_f64(work), to_f64(payment), to_f64(utility)]),
        }
    }
}

#[derive(Serialize)]
pub struct PaymentsReport {
    pub epsilon: String,
    pub t: u32,
    pub machines: Vec<PaymentRow>,
}

#[derive(Serialize)]
pub struct FailureLine<'a> {
    pub check: &'static str,
    pub detail: &'a str,
}

/// One JSON line of a suite report.
#[derive(Serialize)]
pub struct TrialLine<'a> {
    pub suite: &'a str,
    pub index: u64,
    pub seed: Option<u64>,
    pub verdict: &'static str,
    pub instance: InstanceFile,
    pub failures: Vec<FailureLine<'a>>,
    pub metric: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric_float: Option<f64>,
}

pub fn trial_line<'a>(suite: &'a str, rec: &'a TrialRecord, float: bool) -> TrialLine<'a> {
    TrialLine {
        suite,
        index: rec.index,
        seed: rec.seed,
        verdict: if rec.passed() { "pass" } else { "fail" },
        instance: Parsed::from(&rec.sample).to_file(),
        failures: rec
            .failures
            .iter()
            .map(|f| FailureLine {
                check: f.check.name(),
                detail: &f.detail,
            })
            .collect(),
        metric: rec.metric.as_ref().map(format_rational),
        metric_float: rec.metric.as_ref().filter(|_| float).map(to_f64),
    }
}

/// Suite report text: one JSON object per line, in trial order.
pub fn suite_lines(suite: &str, records: &[TrialRecord], float: bool) -> String {
    let mut out = String::new();
    for rec in records {
        out.push_str(&serde_json::to_string(&trial_line(suite, rec, float)).expect("report serializes"));
        out.push('\n');
    }
    out
}
