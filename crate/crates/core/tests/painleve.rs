use num_complex::Complex64;
use qlax_core::exactfield::{ExactSampler, GaussianRational, RationalExpr};
use qlax_core::painleve::*;

fn g(n: i64, d: i64) -> GaussianRational {
    GaussianRational::from_ratio(n, d)
}

fn opts() -> StepOptions {
    StepOptions::default()
}

fn random_config(seed: u64) -> PainleveConfig<GaussianRational> {
    let mut s = ExactSampler::new(seed);
    PainleveConfig::new(
        s.nonzero_rational(),
        s.nonzero_rational(),
        s.nonzero_rational(),
        s.nonzero_rational(),
        s.nonzero_rational(),
        s.nonzero_rational(),
    )
    .unwrap()
}

#[test]
fn constraints_are_preserved_symbolically() {
    let c = PainleveConfig::<RationalExpr>::symbolic();
    for map in MapId::ALL {
        let next = step(map, &c, &opts()).unwrap();
        assert!(check_invariants(&next).holds_exactly(), "{map:?}");
        let product = &(&next.f0 * &next.f1) * &next.f2;
        let lambda = match map {
            MapId::IV => &c.q * &c.lambda,
            _ => c.lambda.clone(),
        };
        // checked against the explicit formulas, not the stored f2
        let f2 = (&lambda * &lambda).checked_div(&(&next.f0 * &next.f1)).unwrap();
        assert_eq!(next.f2, f2);
        assert_eq!(product, &lambda * &lambda, "{map:?}");
    }
}

#[test]
fn classical_iv_matches() {
    // (f, g, h, t, a, b, c) = (f0, f1, f2, λ, a0, a1, a2)
    let c = PainleveConfig::<RationalExpr>::symbolic();
    let next = step(MapId::IV, &c, &opts()).unwrap();
    let (f, gg, h) = classic::qp4(&c.f0, &c.f1, &c.f2, &c.a0, &c.a1, &c.a2).unwrap();
    assert_eq!((next.f0, next.f1, next.f2), (f, gg, h));
}

#[test]
fn classical_iii_matches() {
    // (a, b, t) = (λ², a2, a0)
    let c = PainleveConfig::<RationalExpr>::symbolic();
    let next = step(MapId::III, &c, &opts()).unwrap();
    let lam2 = &c.lambda * &c.lambda;
    let (f, gg) = classic::qp3(&c.f0, &c.f1, &lam2, &c.a2, &c.a0).unwrap();
    assert_eq!((next.f0, next.f1), (f, gg));
}

#[test]
fn classical_ii_matches() {
    // t = a0, f = f0, f̰ = f1
    let c = PainleveConfig::<RationalExpr>::symbolic();
    let next = step(MapId::SIII, &c, &opts()).unwrap();
    let lam2 = &c.lambda * &c.lambda;
    assert_eq!(next.f0, classic::qp2(&c.f0, &c.f1, &lam2, &c.a0).unwrap());
}

#[test]
fn exact_iv_orbit_keeps_its_invariants() {
    let c = PainleveConfig::new(g(1, 2), g(2, 3), g(3, 2), g(-1, 3), g(2, 5), g(5, 4)).unwrap();
    let recs = orbit(MapId::IV, &c, 20, &opts());
    assert_eq!(recs.len(), 21);
    let mut lambda = c.lambda.clone();
    for r in &recs {
        assert!(r.singular.is_none());
        assert_eq!(r.config.lambda, lambda);
        assert!(check_invariants(&r.config).holds_exactly());
        lambda = &lambda * &c.q;
    }
}

#[test]
fn float_drift_over_a_hundred_steps() {
    // |q| = 1 keeps λ bounded
    let c = PainleveConfig::new(
        GaussianRational::from_parts((1, 2), (1, 3)),
        g(2, 3),
        g(3, 2),
        GaussianRational::from_parts((0, 1), (1, 2)),
        g(2, 5),
        GaussianRational::from_parts((3, 5), (4, 5)),
    )
    .unwrap()
    .to_float();
    for map in MapId::ALL {
        let recs = orbit(map, &c, 100, &opts());
        assert_eq!(recs.len(), 101, "{map:?}");
        assert!(max_relative_drift(&recs) <= 1e-9, "{map:?}");
    }
}

#[test]
fn float_tracks_exact() {
    for map in MapId::ALL {
        let c = random_config(17);
        let exact = orbit(map, &c, 10, &opts());
        let float = orbit(map, &c.to_float(), 10, &opts());
        assert_eq!(exact.len(), float.len());
        for (e, f) in exact.iter().zip(&float) {
            let pairs: [(&GaussianRational, &Complex64); 3] =
                [(&e.config.f0, &f.config.f0), (&e.config.f1, &f.config.f1), (&e.config.f2, &f.config.f2)];
            for (a, b) in pairs {
                let a = a.to_complex();
                assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0), "{map:?} step {}", e.n);
            }
        }
    }
}

#[test]
fn singular_guard_is_configurable() {
    // 1 + a0 f0 (a1 f1 + 1) = 1e-13 for the float backend
    let c = PainleveConfig::new(g(1, 1), g(1, 1), g(1, 1), g(1, 1), g(1, 1), g(1, 1)).unwrap().to_float();
    let mut near = c.clone();
    near.f0 = Complex64::new(-0.5 + 5e-14, 0.0);
    assert!(step(MapId::IV, &near, &StepOptions { singular_guard: 1e-12 }).is_err());
    assert!(step(MapId::IV, &near, &StepOptions { singular_guard: 1e-16 }).is_ok());
}

#[test]
fn projective_mode_matches_iii() {
    let p = g(3, 2);
    let c = PainleveConfig::projective(g(2, 1), g(1, 3), g(5, 7), p.clone(), g(2, 3)).unwrap();
    assert_eq!(c.q, &p * &p);
    assert_eq!(c.a2, p);
    let report = projective_reduction_compare(&c, 5);
    assert_eq!(report.steps_compared, 6);
    assert!(report.verified(), "{report:?}");
}

#[test]
fn siii_twice_is_iii() {
    assert_eq!(siii_squared_is_iii().unwrap(), (true, true));
}

#[test]
fn parameter_actions_keep_the_product() {
    let c = PainleveConfig::<RationalExpr>::symbolic();
    for map in MapId::ALL {
        let (a0, a1, a2, _) = parameter_action(map, &c).unwrap();
        assert_eq!(&(&a0 * &a1) * &a2, c.q, "{map:?}");
    }
}
