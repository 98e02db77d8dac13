//! Vertical divisors `D = π*(C)` over a toric base and their contribution verdicts.

use serde::{Serialize, Serializer};

use crate::cy4::{self, Cy4Report};
use crate::error::{Error, Result};
use crate::exactmath::Rational;
use crate::mori::{
    self, BundleKind, ContractionInfo, ContractionKind, ContractionOutcome, CurveClass, DivisorialType,
};
use crate::toric::{DivisorClass, Fan, ToricVariety};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub ray: usize,
    pub violating_ray: CurveClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Contributes,
    DoesNotContribute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Reason {
    Chi1AndVanishing,
    ChiNot1,
    HigherCohomology,
    /// `Δ|_C` is trivial, forcing `χ(O_D) = 0`.
    DeltaTrivial,
}

/// Where the contraction of `C` lands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// A smooth toric threefold; `label` is its catalog id once identified.
    Smooth { fan: Fan, label: Option<String> },
    Singular { singularity: String },
}

impl Target {
    pub fn label(&self) -> Option<&str> {
        match self {
            Target::Smooth { label, .. } => label.as_deref(),
            Target::Singular { .. } => None,
        }
    }
}

impl Serialize for Target {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Target::Smooth { label: Some(l), .. } => s.serialize_str(l),
            Target::Smooth { fan, label: None } => s.serialize_str(&format!("smooth ({} rays)", fan.rays.len())),
            Target::Singular { singularity } => s.serialize_str(&format!("singular ({singularity})")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorReport {
    pub ray: usize,
    pub violating_ray: CurveClass,
    pub chi: i64,
    pub h_vector: [i64; 4],
    pub verdict: Verdict,
    pub reason: Reason,
    pub div_type: Option<DivisorialType>,
    pub center_genus: Option<i64>,
    pub target: Option<Target>,
    /// `K · R < 0`.
    pub negative_ray: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fibration {
    pub kind: BundleKind,
    pub target: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BaseReport {
    pub name: String,
    pub b2: usize,
    pub fano: bool,
    pub extremal_rays: Vec<ContractionInfo>,
    pub candidates: Vec<DivisorReport>,
    pub fibrations: Vec<Fibration>,
    pub minus_k_cubed: i64,
    pub c1c2: i64,
    pub chi_x: i64,
    pub very_ample: bool,
    /// `12Δ = −12 K_B`.
    pub discriminant_class: DivisorClass,
    pub cy4: Cy4Report,
    pub note: &'static str,
}

impl BaseReport {
    pub fn contributing(&self) -> impl Iterator<Item = &DivisorReport> {
        self.candidates.iter().filter(|d| d.verdict == Verdict::Contributes)
    }
}

pub const SCOPE_NOTE: &str =
    "only divisors pulled back from prime invariant divisors of the base are analyzed";

/// Pairs `(ρ, R)` with `R` extremal and `D_ρ · R < 0`, ordered by ray index.
pub fn candidate_non_nef_divisors(v: &ToricVariety) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    for r in mori::mori_cone_rays(v)? {
        let neg: Vec<usize> = (0..v.ray_count()).filter(|&i| r.class.pairing[i] < 0).collect();
        if neg.len() > 1 {
            return Err(Error::Consistency(format!(
                "extremal ray {:?} is negative on {} divisors",
                r.class.pairing,
                neg.len()
            )));
        }
        out.extend(neg.into_iter().map(|ray| Candidate {
            ray,
            violating_ray: r.class.clone(),
        }));
    }
    out.sort_by(|a, b| (a.ray, &a.violating_ray).cmp(&(b.ray, &b.violating_ray)));
    Ok(out)
}

fn integral(x: Rational, what: &str) -> Result<i64> {
    if !x.is_integer() {
        return Err(Error::Consistency(format!("{what} = {x} is not an integer")));
    }
    Ok(x.to_integer() as i64)
}

/// `χ(O_D) = ½ K·C²`, checked against `2 − χ(O(C)) − χ(O(−C))` from cohomology.
pub fn chi_of_pullback(v: &ToricVariety, rho: usize) -> Result<i64> {
    let n = v.ray_count();
    if rho >= n {
        return Err(Error::Validation(format!("ray index {rho} out of range")));
    }
    let c = DivisorClass::prime(n, rho);
    let kcc = v.triple_intersection(&v.canonical_class(), &c, &c)?;
    let by_intersection = integral(Rational::new(kcc as i128, 2), "K·C²/2")?;
    let alt = |h: Vec<i64>| h.iter().enumerate().map(|(i, x)| if i % 2 == 0 { *x } else { -x }).sum::<i64>();
    let by_cohomology =
        2 - alt(v.line_bundle_cohomology(&c)?) - alt(v.line_bundle_cohomology(&c.neg())?);
    if by_intersection != by_cohomology {
        return Err(Error::Consistency(format!(
            "χ(O_D) for ray {rho}: {by_intersection} from K·C² but {by_cohomology} from cohomology"
        )));
    }
    Ok(by_intersection)
}

/// `h^i(C, O_C)` from `0 → O(−C) → O → O_C → 0`.
pub fn surface_structure_cohomology(v: &ToricVariety, rho: usize) -> Result<[i64; 3]> {
    let c = DivisorClass::prime(v.ray_count(), rho);
    let h = v.line_bundle_cohomology(&c.neg())?;
    if h[0] != 0 {
        return Err(Error::Consistency(format!("h⁰(O(−D{rho})) = {} ≠ 0", h[0])));
    }
    Ok([1 + h[1], h[2], h[3]])
}

/// `(h⁰, h¹, h², h³)` of `O_D` for `D = π*(D_ρ)`.
pub fn h_vector_of_pullback(v: &ToricVariety, rho: usize) -> Result<[i64; 4]> {
    if rho >= v.ray_count() {
        return Err(Error::Validation(format!("ray index {rho} out of range")));
    }
    let oc = surface_structure_cohomology(v, rho)?;
    let bc = v.line_bundle_cohomology(&DivisorClass::prime(v.ray_count(), rho))?;
    Ok([oc[0], oc[1] + bc[2], oc[2] + bc[1], bc[0] - 1])
}

/// Verdict for a candidate pair from `candidate_non_nef_divisors`.
pub fn contribution_verdict(v: &ToricVariety, rho: usize, r: &CurveClass) -> Result<DivisorReport> {
    let r = r.primitive();
    let candidates = candidate_non_nef_divisors(v)?;
    if !candidates.iter().any(|c| c.ray == rho && c.violating_ray == r) {
        return Err(Error::DivisorIsNef(rho));
    }
    let info = mori::classify_contraction(v, &r)?;
    verdict_from_parts(v, rho, &info)
}

fn verdict_from_parts(v: &ToricVariety, rho: usize, info: &ContractionInfo) -> Result<DivisorReport> {
    let chi = chi_of_pullback(v, rho)?;
    let h = h_vector_of_pullback(v, rho)?;
    let alt = h[0] - h[1] + h[2] - h[3];
    if alt != chi {
        return Err(Error::Consistency(format!(
            "h-vector {h:?} of ray {rho} has alternating sum {alt}, χ = {chi}"
        )));
    }
    let delta_trivial = v.restriction_is_trivial(&v.anticanonical_class(), rho)?;
    let (verdict, reason) = if delta_trivial {
        (Verdict::DoesNotContribute, Reason::DeltaTrivial)
    } else if chi != 1 {
        (Verdict::DoesNotContribute, Reason::ChiNot1)
    } else if h != [1, 0, 0, 0] {
        (Verdict::DoesNotContribute, Reason::HigherCohomology)
    } else {
        (Verdict::Contributes, Reason::Chi1AndVanishing)
    };
    let (div_type, center_genus, target) = match &info.kind {
        ContractionKind::Divisorial {
            div_type,
            center_genus,
            ..
        } if info.negative => {
            let target = match mori::contract_divisorial(v, info)? {
                ContractionOutcome::Smooth(fan) => Target::Smooth { fan, label: None },
                ContractionOutcome::Singular(r) => Target::Singular {
                    singularity: r.singularity,
                },
            };
            (Some(*div_type), *center_genus, Some(target))
        }
        ContractionKind::Divisorial { div_type, center_genus, .. } => (Some(*div_type), *center_genus, None),
        _ => (None, None, None),
    };
    Ok(DivisorReport {
        ray: rho,
        violating_ray: info.ray.clone(),
        chi,
        h_vector: h,
        verdict,
        reason,
        div_type,
        center_genus,
        target,
        negative_ray: info.negative,
    })
}

/// Contribution predicted from the contraction type alone: 2.9.2–2.9.4
/// always, 2.9.1 iff the center is rational.
pub fn type_rule_predicts(div_type: DivisorialType, center_genus: Option<i64>) -> bool {
    match div_type {
        DivisorialType::ToCurve => center_genus == Some(0),
        DivisorialType::PlaneMinusOne | DivisorialType::PlaneMinusTwo | DivisorialType::QuadricToPoint => true,
        DivisorialType::QuadricCone => false,
    }
}

/// Full dossier for a smooth complete toric threefold.
pub fn analyze_base(v: &ToricVariety) -> Result<BaseReport> {
    if v.dim() != 3 {
        return Err(Error::Validation("bases must be 3-dimensional".into()));
    }
    let infos = mori::classify_all(v)?;
    let fano = mori::is_fano(v)?;
    let mut candidates = Vec::new();
    for c in candidate_non_nef_divisors(v)? {
        let info = infos
            .iter()
            .find(|i| i.ray == c.violating_ray)
            .expect("candidate ray is extremal");
        let report = verdict_from_parts(v, c.ray, info)?;
        if fano {
            if let Some(t) = report.div_type {
                let predicted = type_rule_predicts(t, report.center_genus);
                if predicted != (report.verdict == Verdict::Contributes) {
                    return Err(Error::Consistency(format!(
                        "ray {}: type {} predicts {predicted} but the cohomology verdict is {:?}",
                        c.ray,
                        t.label(),
                        report.verdict
                    )));
                }
            }
        }
        candidates.push(report);
    }
    let mut fibrations = Vec::new();
    for info in &infos {
        if let ContractionKind::FiberType { target_dim: 2, bundle_kind } = info.kind {
            let target = mori::fibration_target_label(v, info)?.unwrap_or_default();
            fibrations.push(Fibration {
                kind: bundle_kind,
                target,
            });
        }
    }
    let cy4 = cy4::cy4_report(v)?;
    Ok(BaseReport {
        name: v.name().to_string(),
        b2: v.picard_rank(),
        fano,
        extremal_rays: infos,
        candidates,
        fibrations,
        minus_k_cubed: v.anticanonical_degree(),
        c1c2: v.c1c2(),
        chi_x: cy4.chi_x,
        very_ample: cy4.weierstrass_smooth,
        discriminant_class: v.anticanonical_class().scale(12),
        cy4,
        note: SCOPE_NOTE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(f: Fan) -> ToricVariety {
        ToricVariety::new(f).unwrap()
    }

    fn p1_fn(n: i64) -> ToricVariety {
        var(Fan::hirzebruch(n).product(&Fan::projective_space(1)))
    }

    #[test]
    fn candidates_examples() {
        assert!(candidate_non_nef_divisors(&var(Fan::projective_space(3))).unwrap().is_empty());
        let p1 = Fan::projective_space(1);
        assert!(candidate_non_nef_divisors(&var(p1.product(&p1).product(&p1))).unwrap().is_empty());
        let c = candidate_non_nef_divisors(&p1_fn(2)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].ray, 1);
    }

    #[test]
    fn chi_examples() {
        let bl = var(Fan::projective_space(3).star_subdivide(&[0, 1, 2]).unwrap());
        assert_eq!(chi_of_pullback(&bl, 4).unwrap(), 1);
        for n in 1..=4 {
            assert_eq!(chi_of_pullback(&p1_fn(n), 1).unwrap(), n);
        }
    }

    #[test]
    fn h_vector_examples() {
        let bl = var(Fan::projective_space(3).star_subdivide(&[0, 1, 2]).unwrap());
        assert_eq!(h_vector_of_pullback(&bl, 4).unwrap(), [1, 0, 0, 0]);
        assert_eq!(h_vector_of_pullback(&p1_fn(2), 1).unwrap(), [1, 0, 1, 0]);
        assert_eq!(h_vector_of_pullback(&p1_fn(1), 1).unwrap(), [1, 0, 0, 0]);
    }

    #[test]
    fn verdict_examples() {
        let line = var(Fan::projective_space(3).star_subdivide(&[0, 1]).unwrap());
        let c = &candidate_non_nef_divisors(&line).unwrap()[0];
        let r = contribution_verdict(&line, c.ray, &c.violating_ray).unwrap();
        assert_eq!(r.verdict, Verdict::Contributes);
        assert_eq!(r.div_type, Some(DivisorialType::ToCurve));

        let pf2 = p1_fn(2);
        let c = &candidate_non_nef_divisors(&pf2).unwrap()[0];
        let r = contribution_verdict(&pf2, c.ray, &c.violating_ray).unwrap();
        assert_eq!((r.verdict, r.reason, r.chi), (Verdict::DoesNotContribute, Reason::ChiNot1, 2));

        let ver = var(Fan::p1_bundle_over_surface(&Fan::projective_space(2), &[0, 0, 2]));
        let c = &candidate_non_nef_divisors(&ver).unwrap()[0];
        let r = contribution_verdict(&ver, c.ray, &c.violating_ray).unwrap();
        assert_eq!(r.verdict, Verdict::Contributes);
        assert_eq!(r.div_type, Some(DivisorialType::PlaneMinusTwo));
    }

    #[test]
    fn nef_divisor_is_rejected() {
        let p3 = var(Fan::projective_space(3));
        let ray = mori::mori_cone_rays(&p3).unwrap()[0].class.clone();
        assert!(matches!(contribution_verdict(&p3, 0, &ray), Err(Error::DivisorIsNef(0))));
    }

    #[test]
    fn analyze_examples() {
        let p1 = Fan::projective_space(1);
        let cube = analyze_base(&var(p1.product(&p1).product(&p1))).unwrap();
        assert_eq!(cube.contributing().count(), 0);
        assert_eq!(cube.fibrations.len(), 3);
        assert!(cube.fibrations.iter().all(|f| f.target == "P1xP1" && f.kind == BundleKind::P1Bundle));
        assert_eq!(cube.chi_x, 17568);

        let bl = analyze_base(&var(Fan::projective_space(3).star_subdivide(&[0, 1, 2]).unwrap())).unwrap();
        let contributing: Vec<_> = bl.contributing().collect();
        assert_eq!(contributing.len(), 1);
        assert_eq!(contributing[0].div_type, Some(DivisorialType::PlaneMinusOne));
        assert_eq!(bl.fibrations, vec![Fibration { kind: BundleKind::P1Bundle, target: "P2".into() }]);
        assert_eq!(bl.chi_x, 20448);

        let p1p2 = analyze_base(&var(p1.product(&Fan::projective_space(2)))).unwrap();
        assert_eq!(p1p2.contributing().count(), 0);
        assert_eq!(p1p2.chi_x, 19728);
    }
}
