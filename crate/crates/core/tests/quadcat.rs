use proptest::prelude::*;
use qlax_core::exactfield::{GaussianRational, RationalExpr};
use qlax_core::lattice4d::{cube_at, LatticePoint, ParameterSequences, Z4System};
use qlax_core::laxverify::VerifyMode;
use qlax_core::parallel::Execution;
use qlax_core::quadcat::*;

fn gaussian() -> impl Strategy<Value = GaussianRational> {
    (-12i64..=12, 1i64..=9, -3i64..=3, 1i64..=5).prop_map(|(a, b, c, d)| GaussianRational::from_parts((a, b), (c, d)))
}

fn nonzero() -> impl Strategy<Value = GaussianRational> {
    gaussian().prop_filter("nonzero", |g| !g.is_zero())
}

fn kind() -> impl Strategy<Value = QuadKind<GaussianRational>> {
    (0u8..4, nonzero(), nonzero(), gaussian(), any::<bool>(), any::<bool>()).prop_map(|(tag, a1, a2, d3, eps, delta)| {
        match tag {
            0 => QuadKind::Q1 { alpha1: a1, alpha2: a2, eps },
            1 => QuadKind::H3 { alpha1: a1, alpha2: a2, delta, eps },
            2 => QuadKind::H1 { alpha1: a1, alpha2: a2, eps },
            _ => QuadKind::D4 { d1: a1, d2: a2, d3 },
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn solved_vertex_satisfies_the_quad(k in kind(), x in proptest::array::uniform4(gaussian()), target in 0usize..4) {
        match solve_vertex(&k, &x, target) {
            Ok(v) => {
                let mut y = x.clone();
                y[target] = v;
                prop_assert!(k.eval(&y).unwrap().is_zero());
            }
            Err(QuadError::SingularSolve { .. }) => {
                // the target coefficient vanishes: the value is irrelevant
                let mut y = x.clone();
                y[target] = GaussianRational::zero();
                let b = k.eval(&y).unwrap();
                y[target] = GaussianRational::one();
                prop_assert_eq!(k.eval(&y).unwrap(), b);
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

#[test]
fn catalog_is_multiaffine() {
    let cat = catalog();
    assert_eq!(cat.len(), 16);
    for k in &cat {
        assert!(check_multiaffine(k), "{k:?}");
    }
}

#[test]
fn named_equations_hold() {
    let named = named_equations().unwrap();
    assert_eq!(named.len(), 4);
    for n in named {
        assert!(n.holds, "{}", n.name);
    }
}

#[test]
fn standard_cubes_of_each_kind() {
    let v = RationalExpr::var;
    let alphas = [v("a1"), v("a2"), v("a3")];
    let makers: Vec<Box<dyn Fn(RationalExpr, RationalExpr) -> QuadKind<RationalExpr>>> = vec![
        Box::new(|a, b| QuadKind::Q1 { alpha1: a, alpha2: b, eps: false }),
        Box::new(|a, b| QuadKind::H1 { alpha1: a, alpha2: b, eps: false }),
        Box::new(|a, b| QuadKind::H3 { alpha1: a, alpha2: b, delta: false, eps: false }),
    ];
    for make in makers {
        let cube = standard_cube(make, alphas.clone()).unwrap();
        let r = check_cube_consistency(&cube, &VerifyMode::Symbolic, Execution::Parallel).unwrap();
        assert!(r.verified(), "{:?}", r.routes);
        assert!(!r.tetrahedron_parameters.is_empty());
    }
}

#[test]
fn h3_d4_cubes_sampled() {
    let system = Z4System::new(ParameterSequences::free());
    let mode = VerifyMode::Sampled { samples: 20, seed: 7 };
    for dirs in [[1, 2, 3], [1, 2, 4], [2, 3, 4], [3, 1, 4]] {
        let cube = cube_at(&system, &LatticePoint::ORIGIN, dirs).unwrap();
        let r = check_cube_consistency(&cube, &mode, Execution::Parallel).unwrap();
        assert!(r.consistent, "{dirs:?}");
        assert_eq!(r.samples_checked, 20);
        assert!(r.tetrahedron_parameters.is_empty());
    }
}

#[test]
fn sampled_reports_are_deterministic() {
    let v = RationalExpr::var;
    let cube = standard_cube(|a, b| QuadKind::Q1 { alpha1: a, alpha2: b, eps: true }, [v("a1"), v("a2"), v("a3")]).unwrap();
    let mode = VerifyMode::Sampled { samples: 8, seed: 3 };
    let a = check_cube_consistency(&cube, &mode, Execution::Parallel).unwrap();
    let b = check_cube_consistency(&cube, &mode, Execution::Sequential).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
