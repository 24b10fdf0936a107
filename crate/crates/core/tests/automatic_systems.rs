use mahler_core::exactalg::{left_kernel, FieldElem, Matrix, NumberField, Poly, RatFunc, SubspaceBasis};
use mahler_core::fixtures::{four_state, golden_field, pole_system, thue3};
use mahler_core::relations::{
    certify, decide_independence, find_relations, reduce_by_relation, select_components, Independence, SColumns,
    SearchOptions, Status, WitnessKind,
};
use mahler_core::values::{evaluate_at, numeric_check, value_relation_basis, verdict, weighted_verdict, PointOptions, Verdict};
use mahler_core::{inner_valuation, Classification, CoefficientStream, Valuation};
use num_bigint::BigInt;
use num_rational::BigRational;

fn ints(k: &std::sync::Arc<NumberField>, v: &[i64]) -> Vec<FieldElem> {
    v.iter().map(|&x| FieldElem::from_int(k, x)).collect()
}

#[test]
fn thue3_matrix_and_columns() {
    let k = NumberField::rationals();
    let (s, f) = thue3(&k).unwrap();
    let p = |c: &[i64]| RatFunc::from_poly(Poly::from_ints(&k, c));
    let expected = Matrix::from_rows(vec![vec![p(&[1, 1]), p(&[0, 0, 1])], vec![p(&[0, 0, 1]), p(&[1, 1])]]).unwrap();
    assert_eq!(s.q(), 3);
    assert_eq!(s.matrix(), &expected);
    let cols = SColumns::new(&f, 1);
    let want = [[0, 1, 0, 0], [0, 1, 0, 1], [1, 0, 0, 1], [0, 1, 1, 0]];
    for (i, w) in want.iter().enumerate() {
        assert_eq!(cols.column(i), ints(&k, w));
    }
}

#[test]
fn independence_of_both_examples() {
    let k = NumberField::rationals();
    let (s, f) = thue3(&k).unwrap();
    match decide_independence(&s, &f).unwrap() {
        Independence::Independent { columns_used } => assert!(columns_used <= 16, "{columns_used}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn four_state_indicators_are_dependent() {
    // digit sum and n have the same parity in base 3, so the parity of the
    // number of ones alternates with n: z (g1 + g4) = g2 + g3
    let k = NumberField::rationals();
    let (s, f) = four_state(&k).unwrap();
    let w = [Poly::from_ints(&k, &[0, 1]), Poly::from_ints(&k, &[-1]), Poly::from_ints(&k, &[-1]), Poly::from_ints(&k, &[0, 1])];
    let v = s.matrix().map(|e| e.clone()).left_apply(&w.iter().map(|p| RatFunc::from_poly(p.clone())).collect::<Vec<_>>());
    let wq: Vec<RatFunc> = w.iter().map(|p| RatFunc::from_poly(p.compose_power(3))).collect();
    assert_eq!(v, wq);
    match decide_independence(&s, &f).unwrap() {
        Independence::Dependent { relation, certificate, columns_used } => {
            assert!(columns_used <= 64);
            assert_eq!(relation, w.iter().map(|p| p.scale(&FieldElem::from_int(&k, 1))).collect::<Vec<_>>());
            assert!(certificate.verify(&s, &f));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn augmented_thue3_relation() {
    let k = NumberField::rationals();
    let (s, f) = thue3(&k).unwrap();
    let (s, f) = (s.augment_constant(), f.augment_constant());
    let rb = find_relations(&s, &f, &SearchOptions::default()).unwrap();
    assert_eq!(rb.height, 128);
    assert_eq!(rb.status, Status::Certified);
    assert_eq!(rb.rank, 1);
    let w = &rb.generators[0].w;
    assert_eq!(w, &vec![Poly::from_ints(&k, &[1, -1]), Poly::from_ints(&k, &[1, -1]), Poly::from_ints(&k, &[-1])]);
    let cert = rb.generators[0].certificate.as_ref().unwrap();
    assert!(cert.verify(&s, &f));
    assert!(cert.closure.len() <= 3);
    assert_eq!(inner_valuation(w, &f, 10_000), Valuation::AtLeast(10_000));
}

#[test]
fn failing_certificate_for_non_relation() {
    let k = NumberField::rationals();
    let (s, f) = thue3(&k).unwrap();
    let w = vec![Poly::one(&k), Poly::zero(&k)];
    let c = certify(&w, &s, &f, None).unwrap();
    match c {
        mahler_core::relations::Certification::Failed(wit) => {
            assert_eq!(wit.kind, WitnessKind::NonVanishing);
            assert_eq!(wit.index, 2);
        }
        _ => panic!("certified a non-relation"),
    }
}

#[test]
fn reduction_of_augmented_thue3() {
    let k = NumberField::rationals();
    let (s, f) = thue3(&k).unwrap();
    let (sa, fa) = (s.augment_constant(), f.augment_constant());
    let w = vec![Poly::from_ints(&k, &[1, -1]), Poly::from_ints(&k, &[1, -1]), Poly::from_ints(&k, &[-1])];
    let (r, keep) = reduce_by_relation(&sa, &w).unwrap();
    assert_eq!(keep, vec![0, 1]);
    let sub = select_components(&fa, &keep);
    assert!(matches!(decide_independence(&r, &sub).unwrap(), Independence::Independent { .. }));
}

#[test]
fn kernels_at_phi() {
    let k = golden_field();
    let t = FieldElem::generator(&k);
    let (s, _) = thue3(&k).unwrap();
    let ker = left_kernel(&s.iterate_at(1, &t).unwrap(), &k);
    assert_eq!(ker, SubspaceBasis::span(&k, 2, vec![ints(&k, &[1, -1])]).unwrap());
    let (s, _) = four_state(&k).unwrap();
    let ker = left_kernel(&s.iterate_at(1, &t).unwrap(), &k);
    assert_eq!(ker, SubspaceBasis::span(&k, 4, vec![ints(&k, &[1, 1, -1, -1])]).unwrap());
}

#[test]
fn thue3_verdicts() {
    let k = golden_field();
    let t = FieldElem::generator(&k);
    let (s, f) = thue3(&k).unwrap();
    let opts = PointOptions::default();
    let vr = verdict(&s, &f, &t, &opts).unwrap();
    let half_t = t.scale(&BigRational::new(BigInt::from(-1), BigInt::from(2)));
    assert_eq!(vr.verdicts, vec![Verdict::Algebraic(half_t.clone()), Verdict::Algebraic(half_t)]);
    let check = numeric_check(&vr.report, &f.augment_constant(), &vr.verdicts, 2000, 256, Some(&BigRational::from_integer(1.into()))).unwrap();
    assert!(check.all_contain_zero(), "{check:?}");

    let half = FieldElem::from_rational(&k, BigRational::new(1.into(), 2.into()));
    let vr = verdict(&s, &f, &half, &opts).unwrap();
    assert_eq!(vr.report.l, 0);
    assert_eq!(vr.verdicts, vec![Verdict::Transcendental, Verdict::Transcendental]);
}

#[test]
fn four_state_verdicts() {
    let k = golden_field();
    let t = FieldElem::generator(&k);
    let (s, f) = four_state(&k).unwrap();
    let opts = PointOptions::default();
    let vr = verdict(&s, &f, &t, &opts).unwrap();
    assert_eq!(vr.verdicts, vec![Verdict::Transcendental; 4]);
    let wv = weighted_verdict(&s, &f, &t, &ints(&k, &[1, 1, 1, 1]), &opts).unwrap();
    assert_eq!(wv.verdict, Verdict::Algebraic(-t.clone()));
    let wv = weighted_verdict(&s, &f, &t, &ints(&k, &[1, 1, -1, -1]), &opts).unwrap();
    assert_eq!(wv.verdict, Verdict::Algebraic(FieldElem::zero(&k)));
    let (kp, fp) = wv.decomposition.unwrap();
    assert_eq!(kp, ints(&k, &[1, 1, -1, -1, 0]));
    assert!(fp.iter().all(FieldElem::is_zero));
    let wv = weighted_verdict(&s, &f, &t, &ints(&k, &[1, 0, 0, 0]), &opts).unwrap();
    assert_eq!(wv.verdict, Verdict::Transcendental);
}

#[test]
fn pipeline_agrees_with_direct_route() {
    let k = golden_field();
    let t = FieldElem::generator(&k);
    let (s, f) = thue3(&k).unwrap();
    let direct = value_relation_basis(&s, &f, &t, &PointOptions::default()).unwrap();
    let forced = value_relation_basis(&s, &f, &t, &PointOptions { force_pipeline: true, ..Default::default() }).unwrap();
    assert_eq!(forced.pipeline.as_ref().unwrap().doublings, 1);
    assert_eq!(direct.value_relations, forced.value_relations);
}

#[test]
fn pole_on_orbit_goes_through_embedding() {
    let k = NumberField::rationals();
    let (s, f) = pole_system(&k);
    let half = FieldElem::from_rational(&k, BigRational::new(1.into(), 2.into()));
    assert_eq!(s.classify_point(&half).unwrap().classification, Classification::SingularPole(0));
    let vr = verdict(&s, &f, &half, &PointOptions::default()).unwrap();
    assert_eq!(vr.verdicts, vec![Verdict::Algebraic(half.clone())]);
    assert!(vr.report.pipeline.as_ref().unwrap().bbc);
}

#[test]
fn embedding_scales_values_by_lambda() {
    let k = NumberField::rationals();
    let (s, f) = pole_system(&k);
    let half = FieldElem::from_rational(&k, BigRational::new(1.into(), 2.into()));
    let t = s.transform_bbc(&half).unwrap();
    assert!(t.system.first_pole_on_orbit(&half).unwrap().is_none());
    let g = f.bbc(&s, &t);
    let rec = CoefficientStream::from_recursion(&t.system, g.prefix(t.system.seed_len())).unwrap();
    assert_eq!(rec.denormalize(&t.system).prefix(200), g.prefix(200));
    let (fb, _, _) = evaluate_at(&f, &half, 500, 128, None).unwrap();
    let (gb, _, _) = evaluate_at(&g, &half, 500, 128, None).unwrap();
    for (i, lam) in t.lambda.iter().enumerate() {
        let diff = gb[t.index[i]].sub(&lam.embed_ball(144).unwrap().mul(&fb[i]));
        assert!(diff.contains_zero(), "component {i}");
    }
}

#[test]
fn embedding_is_identity_for_polynomial_systems() {
    let k = golden_field();
    let (s, _) = thue3(&k).unwrap();
    let t = s.transform_bbc(&FieldElem::generator(&k)).unwrap();
    assert_eq!(t.system, s);
    assert!(t.lambda.iter().all(FieldElem::is_one));
}
