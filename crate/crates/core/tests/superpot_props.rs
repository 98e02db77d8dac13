mod common;

use common::*;
use superpot::mori::{is_nef, mori_cone_rays};
use superpot::superpot::{
    analyze_base, candidate_non_nef_divisors, chi_of_pullback, contribution_verdict, h_vector_of_pullback,
    type_rule_predicts,
};
use superpot::{DivisorClass, Error, ToricVariety, Verdict};

fn all_bases() -> Vec<(String, ToricVariety)> {
    let mut out: Vec<(String, ToricVariety)> = builtins().into_iter().map(|(s, v)| (s.to_string(), v)).collect();
    for n in 0..=3 {
        out.push((format!("P1xF{n}"), p1_times_hirzebruch(n)));
    }
    out
}

#[test]
fn two_formula_agreement_everywhere() {
    for (name, v) in all_bases() {
        for rho in 0..v.ray_count() {
            let c = DivisorClass::prime(v.ray_count(), rho);
            let kcc = v.triple_intersection(&v.canonical_class(), &c, &c).unwrap();
            assert_eq!(chi_of_pullback(&v, rho).unwrap() * 2, kcc, "{name} D{rho}");
            let h = h_vector_of_pullback(&v, rho).unwrap();
            assert_eq!(alternating(&h), kcc / 2, "{name} D{rho}");
        }
    }
}

#[test]
fn reports_are_internally_consistent() {
    for (name, v) in all_bases() {
        let report = analyze_base(&v).unwrap();
        let rays = mori_cone_rays(&v).unwrap();
        for d in &report.candidates {
            assert_eq!(alternating(&d.h_vector), d.chi, "{name} D{}", d.ray);
            assert!(rays.iter().any(|r| r.class == d.violating_ray), "{name}");
            assert!(d.violating_ray.pairing[d.ray] < 0);
            if d.verdict == Verdict::Contributes {
                assert_eq!(d.chi, 1);
                assert_eq!(d.h_vector, [1, 0, 0, 0]);
            }
        }
        assert!(report.contributing().count() <= report.candidates.len());
    }
}

#[test]
fn fano_dichotomy_and_type_rule() {
    for (sym, v) in builtins() {
        let report = analyze_base(&v).unwrap();
        assert!(report.fano);
        for d in &report.candidates {
            assert!(d.chi != 1 || d.h_vector == [1, 0, 0, 0], "{sym} D{}", d.ray);
            let t = d.div_type.expect("Fano candidates sit on divisorial rays");
            assert_eq!(type_rule_predicts(t, d.center_genus), d.verdict == Verdict::Contributes, "{sym} D{}", d.ray);
        }
    }
}

#[test]
fn nef_divisors_are_never_candidates() {
    for (name, v) in all_bases() {
        let cands = candidate_non_nef_divisors(&v).unwrap();
        for rho in 0..v.ray_count() {
            let nef = is_nef(&v, &DivisorClass::prime(v.ray_count(), rho)).unwrap();
            if nef {
                assert!(cands.iter().all(|c| c.ray != rho), "{name} D{rho}");
                let any_ray = &mori_cone_rays(&v).unwrap()[0].class;
                assert!(matches!(contribution_verdict(&v, rho, any_ray), Err(Error::DivisorIsNef(r)) if r == rho));
            } else {
                assert!(cands.iter().any(|c| c.ray == rho), "{name} D{rho}");
            }
        }
    }
}

#[test]
fn nontrivial_discriminant_restriction_kills_h2() {
    for (name, v) in all_bases() {
        for rho in 0..v.ray_count() {
            if !v.restriction_is_trivial(&v.anticanonical_class(), rho).unwrap() {
                let h = v.line_bundle_cohomology(&DivisorClass::prime(v.ray_count(), rho)).unwrap();
                assert_eq!(h[2], 0, "{name} D{rho}");
            }
        }
    }
}

#[test]
fn p1_times_hirzebruch_family() {
    for n in 1..=5 {
        let v = p1_times_hirzebruch(n);
        assert_eq!(chi_of_pullback(&v, 1).unwrap(), n);
        let report = analyze_base(&v).unwrap();
        let sigma: Vec<_> = report.candidates.iter().filter(|d| d.ray == 1).collect();
        assert_eq!(sigma.len(), 1);
        assert_eq!(sigma[0].verdict == Verdict::Contributes, n == 1);
        assert_eq!(report.fano, n == 1);
    }
}
