use qlax_core::exactfield::RationalExpr;
use qlax_core::lattice4d::{LatticePoint, ParameterSequences, PAIRS};
use qlax_core::laxbuild::*;
use qlax_core::parallel::Execution;

#[test]
fn lax4d_verified_at_origin() {
    let report = verify_lax4d(&LatticePoint::ORIGIN, Execution::Parallel).unwrap();
    for p in &report.pairs {
        assert!(p.residual_zero, "{}", p.pair);
        assert!(p.delta_constraint, "{}", p.pair);
        assert!(p.free_solve_matches, "{}", p.pair);
    }
    for d in &report.directions {
        assert_eq!(d.mu_degree, 1);
        assert!(d.riccati_matches, "{}", d.direction);
        assert_eq!(d.leading_invertible, d.direction != 4);
    }
    assert!(report.perturbed_rejected);
    assert!(report.reduced_defaults_match);
    assert!(report.verified());
}

#[test]
fn lax4d_verified_off_origin() {
    let report = verify_lax4d(&LatticePoint::new(2, -1, 1, 3), Execution::Sequential).unwrap();
    assert!(report.verified());
}

#[test]
fn residual_is_antisymmetric_in_the_pair() {
    let params = ParameterSequences::free();
    let l = LatticePoint::ORIGIN;
    let cell = symbolic_cell(&l, &params, None).unwrap();
    let mu = RationalExpr::var(MU);
    let mut delta = DecouplingFactors::standard();
    delta.rules[0] = DeltaRule::Tilted { along: 2, ratio: RationalExpr::var("c") };
    let a = lax_residual_4d(1, 2, &l, &cell, &mu, &delta).unwrap();
    let b = lax_residual_4d(2, 1, &l, &cell, &mu, &delta).unwrap();
    assert!(!a.is_zero());
    assert!(a.add(&b).is_zero());
}

#[test]
fn wrong_corner_breaks_compatibility() {
    let params = ParameterSequences::free();
    let l = LatticePoint::ORIGIN;
    let mu = RationalExpr::var(MU);
    for pair in PAIRS {
        let mut cell = symbolic_cell(&l, &params, None).unwrap();
        let corner = l.shifted(pair.i, 1).shifted(pair.j, 1);
        let v = cell.require(&corner).unwrap().clone();
        cell.insert(corner, &v + &RationalExpr::one());
        let r = lax_residual_4d(pair.i, pair.j, &l, &cell, &mu, &DecouplingFactors::standard()).unwrap();
        assert!(!r.is_zero(), "{pair}");
    }
}
