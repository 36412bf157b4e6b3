use qlax_core::exactfield::{GaussianRational, RationalExpr};
use qlax_core::lattice4d::*;
use qlax_core::laxverify::VerifyMode;
use qlax_core::parallel::Execution;

fn free_system() -> Z4System<RationalExpr> {
    Z4System::new(ParameterSequences::free())
}

#[test]
fn random_instances_are_consistent() {
    let bx = LatticeBox::at_origin([3, 3, 3, 2]);
    let summary = audit_random_instances(50, 2024, &bx, Execution::Parallel).unwrap();
    assert_eq!(summary.consistent_instances, 50);
    assert!(summary.compared_points >= 50 * 20);
    assert!(summary.corrupted_detected);
    assert!(summary.verified());
}

#[test]
fn sequence_wide_k_shift_stays_consistent() {
    // shifting a whole sequence entry is just another parameter choice
    let bx = LatticeBox::at_origin([3, 3, 3, 2]);
    let mut init = random_instance(5, 0, &bx);
    if let ParameterBase::Table(t) = &mut init.params.base {
        let k0 = t[3][&0].clone();
        t[3].insert(0, k0 + GaussianRational::one());
    }
    let system = Z4System::new(init.params.clone());
    let (_, report) = evolve_patch(&init, &bx, &system).unwrap();
    assert!(report.consistent);
}

#[test]
fn constant_symbolic_data() {
    let bx = LatticeBox::at_origin([2, 2, 2, 2]);
    let c = RationalExpr::var("c");
    let init = bx.axes_initial(PatchKind::UnreducedU, ParameterSequences::free(), |_| c.clone());
    let (patch, report) = evolve_patch(&init, &bx, &free_system()).unwrap();
    assert!(report.consistent);
    assert!(report.undefined.is_empty());
    assert_eq!(patch.len(), 16);
    // a 4-cube has routes into every point of height >= 3
    assert_eq!(report.entries.len(), 5);
    // every H3 face on constant data flips the sign
    assert_eq!(patch.get(&LatticePoint::new(1, 1, 0, 0)).unwrap(), &-c);
}

#[test]
fn symbolic_step_satisfies_its_face() {
    let system = free_system();
    let l = LatticePoint::new(1, -2, 0, 3);
    for pair in PAIRS {
        let u = [RationalExpr::var("u"), RationalExpr::var("ui"), RationalExpr::var("uj")];
        let v = system.step(pair, &l, &u).unwrap();
        let face = system.face(pair, &l).unwrap();
        let mut patch = LatticePatch::new(PatchKind::UnreducedU, ParameterSequences::free());
        patch.insert(l, u[0].clone());
        patch.insert(l.shifted(pair.i, 1), u[1].clone());
        patch.insert(l.shifted(pair.j, 1), u[2].clone());
        patch.insert(l.shifted(pair.i, 1).shifted(pair.j, 1), v);
        assert!(face.residual(&patch).unwrap().is_zero(), "{pair}");
    }
}

#[test]
fn displayed_quotients() {
    // (2,3) and (3,1) in their solved forms
    let p = ParameterSequences::free();
    let l = LatticePoint::ORIGIN;
    let [u, ua, ub] = ["u", "ua", "ub"].map(RationalExpr::var);
    let (beta, gamma, alpha) = (p.beta(0).unwrap(), p.gamma(0).unwrap(), p.alpha(0).unwrap());
    let r = gamma.checked_div(&beta).unwrap();
    let want = &u * &(&ua - &(&r * &ub)).checked_div(&(&(&r * &ua) - &ub)).unwrap();
    let got = step_equation(Pair::new(2, 3).unwrap(), &[u.clone(), ua.clone(), ub.clone()], &l, &p).unwrap();
    assert_eq!(got, want);
    let r = alpha.checked_div(&gamma).unwrap();
    let want = &u * &(&ua - &(&r * &ub)).checked_div(&(&(&r * &ua) - &ub)).unwrap();
    let got = step_equation(Pair::new(3, 1).unwrap(), &[u, ua, ub], &l, &p).unwrap();
    assert_eq!(got, want);
}

#[test]
fn unit_cubes_are_consistent() {
    let reports = check_cubes(&free_system(), &LatticePoint::ORIGIN, &VerifyMode::Symbolic, Execution::Sequential).unwrap();
    for (dirs, r) in reports {
        assert!(r.consistent, "{dirs:?}");
    }
}

#[test]
fn translations_commute() {
    let bx = LatticeBox::at_origin([2, 2, 2, 2]);
    let init = random_instance(9, 0, &bx);
    let p = ParameterSequences::<RationalExpr>::free();
    let l = LatticePoint::new(3, -1, 2, 0);
    let gens = [Generator::T1, Generator::T2, Generator::T3, Generator::T4];
    for a in gens {
        for b in gens {
            let ab = TransformWord(vec![Letter::new(a), Letter::new(b)]);
            let ba = TransformWord(vec![Letter::new(b), Letter::new(a)]);
            assert_eq!(apply_transform(&ab, &l).unwrap(), apply_transform(&ba, &l).unwrap());
            assert_eq!(apply_transform(&ab, &p).unwrap(), apply_transform(&ba, &p).unwrap());
            assert_eq!(apply_transform(&ab, &init).unwrap(), apply_transform(&ba, &init).unwrap());
        }
    }
}

#[test]
fn translation_reads_shifted_values() {
    let bx = LatticeBox::at_origin([2, 1, 1, 1]);
    let init = random_instance(3, 0, &bx);
    let t1 = TransformWord::letter(Generator::T1);
    let moved = apply_transform(&t1, &init).unwrap();
    assert_eq!(moved.get(&LatticePoint::ORIGIN), init.get(&LatticePoint::new(1, 0, 0, 0)));
    assert_eq!(moved.params.alpha(0).unwrap(), init.params.alpha(1).unwrap());
}

#[test]
fn r1_on_parameters() {
    let p = ParameterSequences::<RationalExpr>::free();
    let r = apply_transform(&TransformWord::letter(Generator::R1), &p).unwrap();
    for l in -2..3 {
        assert_eq!(r.alpha(l).unwrap(), p.alpha(l).unwrap());
        assert_eq!(r.beta(l).unwrap(), p.gamma(l - 1).unwrap());
        assert_eq!(r.gamma(l).unwrap(), p.beta(l).unwrap());
        assert_eq!(r.k(l).unwrap(), p.k(l).unwrap());
    }
}

#[test]
fn r1_squared() {
    let r2 = TransformWord::parse("R1 R1").unwrap();
    let t = TransformWord::parse("T2^-1 T3^-1").unwrap();
    let p = ParameterSequences::<RationalExpr>::free();
    let (a, b) = (apply_transform(&r2, &p).unwrap(), apply_transform(&t, &p).unwrap());
    for l in -3..4 {
        for seq in Seq::ALL {
            assert_eq!(a.value(seq, l).unwrap(), b.value(seq, l).unwrap());
        }
    }
    let r1 = TransformWord::letter(Generator::R1);
    for l2 in -2..3 {
        for (l1, l4) in [(0, 0), (2, -1)] {
            let on_r2 = LatticePoint::new(l1, l2, l2, l4);
            let on_r1 = LatticePoint::new(l1, l2, l2 - 1, l4);
            assert!(r1.apply_point(&on_r2).unwrap().in_r1());
            assert!(r1.apply_point(&on_r1).unwrap().in_r2());
            for l in [on_r1, on_r2] {
                assert_eq!(r2.apply_point(&l).unwrap(), l.shifted(2, -1).shifted(3, -1));
                let back = r1.inverse().apply_point(&r1.apply_point(&l).unwrap()).unwrap();
                assert_eq!(back, l);
            }
        }
    }
}

#[test]
fn r1_on_patches_keeps_the_region() {
    let bx = LatticeBox::at_origin([1, 3, 3, 1]);
    let init = random_instance(4, 0, &bx);
    let moved = apply_transform(&TransformWord::letter(Generator::R1), &init).unwrap();
    assert!(moved.values().keys().all(|l| l.in_region()));
    // u(R1(l)) at l: (0,1,1,0) in r2 reads (0,1,0,0)
    assert_eq!(moved.get(&LatticePoint::new(0, 1, 1, 0)), init.get(&LatticePoint::new(0, 1, 0, 0)));
}

#[test]
fn reduced_parameters_follow_the_closed_form() {
    let q = RationalExpr::var("q");
    let lambda = RationalExpr::var("lambda");
    let p = ParameterSequences::reduced(
        RationalExpr::var("ah"),
        RationalExpr::var("bh"),
        RationalExpr::var("gh"),
        lambda.clone(),
        q.clone(),
    );
    assert_eq!(p.beta(2).unwrap(), &(&q * &q) * &RationalExpr::var("bh"));
    let k = p.k(-1).unwrap();
    let want = (&(&lambda * &lambda).checked_div(&q).unwrap() - &RationalExpr::one())
        .checked_div(&lambda.checked_div(&q).unwrap())
        .unwrap();
    assert_eq!(k, want);
}

#[test]
fn patch_json_round_trip() {
    let bx = LatticeBox::at_origin([2, 2, 2, 2]);
    let init = random_instance(11, 0, &bx);
    let system = Z4System::new(init.params.clone());
    let (patch, _) = evolve_patch(&init, &bx, &system).unwrap();
    let text = serde_json::to_string(&patch.to_file()).unwrap();
    let back = LatticePatch::from_file(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, patch);
    let file: PatchFile = serde_json::from_str(&text).unwrap();
    assert!(file.values.contains_key("1,1,1,1"));
}

#[test]
fn missing_parameter_is_reported() {
    let p = ParameterSequences::<GaussianRational>::table(Default::default());
    let err = p.alpha(0).unwrap_err();
    assert!(matches!(err, LatticeError::MissingParameter { seq: Seq::Alpha, index: 0 }));
    let free = ParameterSequences::<GaussianRational>::new(ParameterBase::Free);
    assert!(free.k(0).is_err());
}
