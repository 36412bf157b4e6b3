use qlax_core::exactfield::{GaussianRational, RationalExpr};
use qlax_core::lattice4d::{LatticeBox, LatticePoint, Pair, PAIRS};
use qlax_core::parallel::Execution;
use qlax_core::reduction::*;

fn g(n: i64) -> GaussianRational {
    GaussianRational::from_integer(n)
}

#[test]
fn equivalence_on_the_unit_cell() {
    let report = reduction_equivalence(Execution::Parallel).unwrap();
    for p in &report.pairs {
        assert_eq!(p.agreeing_points, 16, "{}", p.pair);
        assert!(p.periodic, "{}", p.pair);
    }
    assert!(report.cocycle);
    assert!(report.k_forced);
    assert!(report.verified());
}

#[test]
fn gauge_is_a_path_product() {
    let rp = ReducedParameters::symbolic();
    assert!(cocycle_holds(&rp).unwrap());
    assert_eq!(gauge(&LatticePoint::ORIGIN, &rp).unwrap(), RationalExpr::one());
    let l = LatticePoint::new(-1, 2, 0, 1);
    for dir in 1..=4 {
        let ratio = gauge(&l.shifted(dir, 1), &rp).unwrap().checked_div(&gauge(&l, &rp).unwrap()).unwrap();
        assert_eq!(ratio, gauge_ratio(dir, &l, &rp).unwrap(), "{dir}");
    }
}

#[test]
fn d4_equation_shifts_lambda_with_l4() {
    let rp = ReducedParameters::symbolic();
    let w = ["w", "wi", "wj", "wij"].map(RationalExpr::var);
    let q = RationalExpr::var("q");
    for pair in [Pair { i: 1, j: 4 }, Pair { i: 2, j: 4 }, Pair { i: 3, j: 4 }] {
        let at0 = reduced_residual(pair, &w, &LatticePoint::ORIGIN, &rp).unwrap();
        let at1 = reduced_residual(pair, &w, &LatticePoint::new(0, 0, 0, 1), &rp).unwrap();
        let shifted = at0.subs(&[("lambda", &q * &RationalExpr::var("lambda"))]).unwrap();
        assert_eq!(at1, shifted, "{pair}");
    }
}

#[test]
fn evolved_omega_is_consistent() {
    let (rp, init) = random_reduced_instance(7, 0);
    let (lat, audit) = OmegaLattice::evolve(rp, init, 3, 2).unwrap();
    assert!(audit.consistent);
    assert!(audit.faces_checked > 0);
    assert!(audit.singular_steps.is_empty());
    assert!(lat.patch.check_periodicity().is_ok());
    let (f0, f1, f2) = lat.f_at_level(1).unwrap();
    let lambda = &lat.rp.q * &lat.rp.lambda;
    assert_eq!(&(&f0 * &f1) * &f2, &lambda * &lambda);
}

#[test]
fn lifts_satisfy_the_z4_system() {
    let summary = lift_random(20, 99, Execution::Parallel).unwrap();
    assert_eq!(summary.lifted, 20);
    assert!(summary.faces_checked >= 20 * 16);
    assert!(summary.broken_periodicity_rejected);
    assert!(summary.verified());
}

#[test]
fn lift_of_unreduced_patch_is_refused() {
    let bx = LatticeBox::at_origin([2; 4]);
    let init = qlax_core::lattice4d::random_instance(1, 0, &bx);
    assert!(matches!(lift_check(&init, &bx), Err(ReductionError::NotReduced)));
}

#[test]
fn omega_evolution_is_the_iv_map() {
    let report = bridge_random(10, 5, 31, Execution::Parallel).unwrap();
    assert_eq!(report.matching_instances, 10);
    assert!(report.verified());
}

#[test]
fn bridge_on_a_fixed_instance() {
    let rp = ReducedParameters { alpha: g(2), beta: g(3), gamma: g(5), lambda: GaussianRational::from_ratio(1, 3), q: g(7) };
    let steps = bridge_instance(rp, [g(1), g(2), g(4)], 4).unwrap();
    assert!(steps.iter().all(|&b| b));
}

#[test]
fn hat_actions_preserve_the_constraint() {
    let p = ReducedParameters::symbolic();
    let q = RationalExpr::var("q");
    for a in HatAction::ALL {
        for inv in [false, true] {
            let r = p.act(a, inv).unwrap();
            let prod = &(&r.a0().unwrap() * &r.a1().unwrap()) * &r.a2().unwrap();
            assert_eq!(prod, q, "{a:?}");
        }
    }
    let t123 = p.act(HatAction::T3, false).unwrap().act(HatAction::T2, false).unwrap().act(HatAction::T1, false).unwrap();
    assert_eq!(t123.a0().unwrap(), p.a0().unwrap());
    assert_eq!(t123.a1().unwrap(), p.a1().unwrap());
    assert_eq!(t123.a2().unwrap(), p.a2().unwrap());
    assert_eq!(t123.lambda, p.lambda);
    let r1 = p.act(HatAction::R1, false).unwrap();
    let (a0, a1, a2) = (p.a0().unwrap(), p.a1().unwrap(), p.a2().unwrap());
    assert_eq!(r1.a0().unwrap(), &a0 * &a2);
    assert_eq!(r1.a1().unwrap(), (&a1 * &a2).checked_div(&q).unwrap());
    assert_eq!(r1.a2().unwrap(), q.checked_div(&a2).unwrap());
}

#[test]
fn hat_actions_on_expressions() {
    let v = RationalExpr::var;
    let word = [(HatAction::T1, false), (HatAction::T2, false), (HatAction::T3, false)];
    for s in ["a0", "a1", "lambda", "q"] {
        assert_eq!(act_word(&word, &v(s)).unwrap(), v(s));
    }
    let e = &v("a0") * &v("a1");
    for a in HatAction::ALL {
        let there = act_on_expr(a, false, &e).unwrap();
        assert_eq!(act_on_expr(a, true, &there).unwrap(), e, "{a:?}");
    }
}

#[test]
fn every_pair_has_a_reduced_equation() {
    let (rp, init) = random_reduced_instance(3, 1);
    for pair in PAIRS {
        let v = reduced_step(pair, &init, &LatticePoint::ORIGIN, &rp).unwrap();
        let [a, b, c] = init.clone();
        assert!(reduced_residual(pair, &[a, b, c, v], &LatticePoint::ORIGIN, &rp).unwrap().is_zero());
    }
}
