mod common;

use common::*;
use proptest::prelude::*;
use superpot::exactmath::{dual_cone, nonneg_combination};
use superpot::mori::{
    classify_all, contract_divisorial, decompose_in_rays, distinct_wall_classes, fibration_base, is_nef,
    mori_cone_rays, wall_curve_classes, BundleKind, ContractionOutcome,
};
use superpot::toric::validate_fan;
use superpot::{ContractionKind, DivisorClass, DivisorialType, LatticeVector, PolyCone, ToricVariety};

fn mori_cone(v: &ToricVariety) -> PolyCone {
    let rays = mori_cone_rays(v).unwrap();
    PolyCone::new(rays.into_iter().map(|r| LatticeVector::new(r.class.pairing)).collect(), v.ray_count()).unwrap()
}

#[test]
fn wall_classes_satisfy_the_relation_and_decompose() {
    for (sym, v) in builtins() {
        for w in wall_curve_classes(&v) {
            assert!(w.class.relation_residue(&v).is_zero(), "{sym} wall {:?}", w.wall);
        }
        let rays = mori_cone_rays(&v).unwrap();
        for c in distinct_wall_classes(&v) {
            let coeffs = decompose_in_rays(&c, &rays).unwrap_or_else(|| panic!("{sym}: {:?} not in the cone", c.pairing));
            assert!(coeffs.iter().all(|x| *x >= 0.into()));
        }
    }
}

#[test]
fn fano_extremal_rays_are_negative() {
    for (sym, v) in builtins() {
        let rays = mori_cone_rays(&v).unwrap();
        assert!(!rays.is_empty());
        assert!(rays.iter().all(|r| r.k_degree < 0), "{sym}");
    }
}

#[test]
fn nef_cone_is_the_exact_dual() {
    for (sym, v) in builtins() {
        let mori = mori_cone(&v);
        let nef = dual_cone(&mori);
        assert_eq!(dual_cone(&nef), mori, "{sym}");
        // The anticanonical class is interior: strictly positive on every ray.
        let k = LatticeVector::new(v.anticanonical_class().coeffs);
        assert!(nef.contains(&k), "{sym}");
    }
}

#[test]
fn contraction_classification_invariants() {
    for (sym, v) in builtins() {
        for info in classify_all(&v).unwrap() {
            let negatives: Vec<usize> = (0..v.ray_count()).filter(|&i| info.ray.pairing[i] < 0).collect();
            match &info.kind {
                ContractionKind::FiberType { target_dim, bundle_kind } => {
                    assert!(negatives.is_empty(), "{sym}");
                    if *target_dim == 2 {
                        let base = fibration_base(&v, &info).unwrap().unwrap();
                        let d = validate_fan(&base).unwrap();
                        assert!(d.smooth && d.complete, "{sym}");
                        assert_ne!(*bundle_kind, BundleKind::Other);
                    }
                }
                ContractionKind::Divisorial { exceptional_ray, div_type, center_genus, .. } => {
                    assert_eq!(negatives, vec![*exceptional_ray], "{sym}");
                    if *div_type == DivisorialType::ToCurve {
                        let e = DivisorClass::prime(v.ray_count(), *exceptional_ray);
                        let kee = v.triple_intersection(&v.canonical_class(), &e, &e).unwrap();
                        assert_eq!(*center_genus, Some(0), "{sym}");
                        assert_eq!(1 - kee / 2, 0, "{sym}");
                    }
                    match contract_divisorial(&v, &info).unwrap() {
                        ContractionOutcome::Smooth(target) => {
                            assert!(div_type.target_smooth());
                            let t = ToricVariety::new(target).unwrap();
                            assert_eq!(t.picard_rank() + 1, v.picard_rank(), "{sym}");
                            assert_eq!(t.c1c2(), 24);
                        }
                        ContractionOutcome::Singular(_) => assert!(!div_type.target_smooth()),
                    }
                }
                ContractionKind::Small => assert!(negatives.len() >= 2, "{sym}"),
            }
        }
    }
}

#[test]
fn blow_up_contracts_back_to_its_base() {
    let v = blown_up_p3();
    let infos = classify_all(&v).unwrap();
    let plane = infos
        .iter()
        .find(|i| matches!(i.kind, ContractionKind::Divisorial { div_type: DivisorialType::PlaneMinusOne, .. }))
        .unwrap();
    let ContractionOutcome::Smooth(target) = contract_divisorial(&v, plane).unwrap() else {
        panic!("blow-down of a (−1)-plane is smooth");
    };
    assert!(target.is_isomorphic(&superpot::Fan::projective_space(3)));
}

fn nef_fans() -> Vec<ToricVariety> {
    vec![p3(), p1_cubed(), blown_up_p3(), variety("F_2"), variety("F_4"), variety("F_5"), p1_times_hirzebruch(2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kleiman_nef_test_matches_dual_cone(which in 0usize..7, a in prop::collection::vec(-2i64..=2, 6)) {
        let v = nef_fans().swap_remove(which);
        let n = v.ray_count();
        let l = DivisorClass::new(a[..n].to_vec());
        let nef = dual_cone(&mori_cone(&v));
        let lv = LatticeVector::new(l.coeffs.clone());
        prop_assert_eq!(is_nef(&v, &l).unwrap(), nonneg_combination(&lv, nef.generators()).is_some());
    }
}
