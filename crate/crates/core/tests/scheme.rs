use std::sync::Arc;

use monosched_core::canonical::{canonicalize, check_canonical};
use monosched_core::graph::{Finish, Graph};
use monosched_core::instance::{Instance, JobPool, Params};
use monosched_core::mechanism::{graph_for, payment, payment_at, utility, DEFAULT_MAX_STEPS};
use monosched_core::numerics::{int, rat, Rational};
use monosched_core::solver::ptas;
use monosched_core::verify::oracle::brute_force_rounded;
use monosched_core::verify::suites::{approx_group, monotonicity_trial};
use monosched_core::verify::generate::Shape;
use monosched_core::verify::{brute_force_opt, check_approx, check_monotonicity, encode_path, Check};

fn ints(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| int(x)).collect()
}

#[test]
fn oracle_small_examples() {
    assert_eq!(brute_force_opt(&ints(&[4, 4, 4]), &ints(&[1, 1, 1])).unwrap().opt_makespan, int(4));
    assert_eq!(brute_force_opt(&ints(&[2, 2]), &ints(&[1, 2])).unwrap().opt_makespan, int(2));
    assert_eq!(brute_force_opt(&[], &ints(&[1, 2])).unwrap().opt_makespan, int(0));
}

#[test]
fn padded_instance_matches_optimum() {
    let inst = Instance::new(&ints(&[2, 2]), &ints(&[0, 1, 2]), int(1), 1).unwrap();
    let s = ptas(&inst).unwrap();
    assert_eq!(s.achieved, int(2));
    assert_eq!(*s.makespan(), Finish::Finite(int(2)));
    assert_eq!(s.workloads[0], int(0));
}

#[test]
fn equal_jobs_on_equal_machines_have_ratio_one() {
    let sizes = ints(&[4, 4, 4]);
    let speeds = ints(&[1, 1, 1]);
    let inst = Instance::new(&sizes, &speeds, int(1), 1).unwrap();
    let s = ptas(&inst).unwrap();
    let a = check_approx(&s, &sizes, &speeds, &int(1)).unwrap();
    assert_eq!(a.ratio, Some(int(1)));
}

#[test]
fn outputs_within_bound_on_one_group() {
    let recs = approx_group(&ints(&[1, 2, 4]), 3, 0);
    assert_eq!(recs.len(), 10);
    for r in &recs {
        assert!(!r.fails(Check::Approximation) && !r.fails(Check::Canonical) && !r.fails(Check::Bounds), "{r:?}");
    }
}

#[test]
fn symmetric_payments_agree() {
    let pool = Arc::new(JobPool::new(&ints(&[4, 4, 4]), Params::new(int(1), 1).unwrap()).unwrap());
    let speeds = ints(&[1, 1, 1]);
    let g = graph_for(&pool, 3);
    let rows: Vec<_> = (0..3).map(|i| payment(&pool, &speeds, i, &g, DEFAULT_MAX_STEPS).unwrap()).collect();
    assert!(rows.iter().all(|r| r == &rows[0]));
    // individually rational at the truth
    assert!(rows[0].payment >= &rows[0].work_at_bid / int(1));
}

#[test]
fn truth_beats_neighbouring_bids() {
    let pool = Arc::new(JobPool::new(&ints(&[4, 4, 4]), Params::new(int(1), 1).unwrap()).unwrap());
    let speeds = ints(&[1, 2, 2]);
    let g = graph_for(&pool, 3);
    for i in 0..3 {
        let truth = &speeds[i];
        let honest = utility(&pool, &speeds, i, truth, truth, &g, DEFAULT_MAX_STEPS).unwrap();
        for bid in [truth / int(2), truth * int(2), truth * rat(3, 2)] {
            let u = utility(&pool, &speeds, i, &bid, truth, &g, DEFAULT_MAX_STEPS).unwrap();
            assert!(honest >= u, "machine {i} bid {bid}: {u} > {honest}");
        }
    }
    // a zero bid is paid nothing
    assert_eq!(payment_at(&pool, &speeds, 0, &int(0), &g, DEFAULT_MAX_STEPS).unwrap().payment, int(0));
}

#[test]
fn lowering_a_machine_never_adds_work() {
    let pool = Arc::new(JobPool::new(&ints(&[4, 2, 2, 1]), Params::new(int(1), 1).unwrap()).unwrap());
    let speeds = ints(&[1, 2, 4, 4]);
    let g = Graph::new(pool.clone(), 4);
    for i in 0..4 {
        if let Some(c) = check_monotonicity(&pool, &speeds, i, &g).unwrap() {
            assert!(c.holds(), "{c:?}");
        }
    }
}

#[test]
fn random_trials_report_no_monotonicity_violation() {
    let shape = Shape::small();
    for i in 0..20 {
        let r = monotonicity_trial(9, i, &shape);
        assert!(!r.fails(Check::Monotonicity), "{r:?}");
        assert!(!r.fails(Check::Canonical) && !r.fails(Check::Bounds), "{r:?}");
    }
}

#[test]
fn rounded_optimum_encodes_to_a_path_no_better_than_optpath() {
    let pool = JobPool::new(&ints(&[4, 4, 2, 2]), Params::new(int(1), 1).unwrap()).unwrap();
    let speeds = ints(&[1, 2, 2]);
    let r = brute_force_rounded(&pool, &speeds).unwrap();
    let c = canonicalize(&r.parts, &speeds, &pool).unwrap();
    assert!(check_canonical(&c.parts, &pool).violations.is_empty());
    let e = encode_path(&c.parts, &speeds, &pool).unwrap();
    let inst = Instance::new(&ints(&[4, 4, 2, 2]), &speeds, int(1), 1).unwrap();
    let s = ptas(&inst).unwrap();
    assert!(*s.makespan() <= e.path.makespan);
}
