//! Mori cone, Kleiman tests and extremal contractions of smooth toric threefolds.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{self, rank, LatticeVector, Rational};
use crate::toric::{surface_label, DivisorClass, Fan, SurfaceKind, ToricVariety};

/// Numerical class of a curve, stored as the intersection numbers `D_ρ · Γ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurveClass {
    pub pairing: Vec<i64>,
}

impl CurveClass {
    pub fn new(pairing: Vec<i64>) -> Self {
        Self { pairing }
    }

    /// Divides out the gcd of the entries.
    pub fn primitive(&self) -> CurveClass {
        let g = self.pairing.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g <= 1 {
            return self.clone();
        }
        Self::new(self.pairing.iter().map(|x| x / g).collect())
    }

    /// `Σ (D_ρ · Γ) v_ρ`, which vanishes for every genuine curve class.
    pub fn relation_residue(&self, v: &ToricVariety) -> LatticeVector {
        (0..v.ray_count()).fold(LatticeVector::zero(v.dim()), |acc, i| {
            acc.add(&v.ray(i).scale(self.pairing[i]))
        })
    }

    /// `K_B · Γ`.
    pub fn k_degree(&self) -> i64 {
        -self.pairing.iter().sum::<i64>()
    }

    fn as_vector(&self) -> LatticeVector {
        LatticeVector(self.pairing.clone())
    }
}

/// The invariant curve of a wall, with its raw intersection numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallCurve {
    pub wall: Vec<usize>,
    pub class: CurveClass,
}

/// One class per wall; `D_ρ · C_τ` read from the wall relation
/// `v_ρ + v_ρ' + Σ b_i v_{τ_i} = 0`.
pub fn wall_curve_classes(v: &ToricVariety) -> Vec<WallCurve> {
    let n = v.ray_count();
    v.walls()
        .iter()
        .map(|w| {
            let mut pairing = vec![0i64; n];
            for x in 0..n {
                let mut idx = w.rays.clone();
                idx.push(x);
                pairing[x] = v.prime_intersection(&idx);
            }
            WallCurve {
                wall: w.rays.clone(),
                class: CurveClass::new(pairing),
            }
        })
        .collect()
}

/// Distinct primitive wall classes in canonical order.
pub fn distinct_wall_classes(v: &ToricVariety) -> Vec<CurveClass> {
    let set: BTreeSet<CurveClass> = wall_curve_classes(v)
        .into_iter()
        .map(|w| w.class.primitive())
        .collect();
    set.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalRay {
    pub class: CurveClass,
    /// `K_B · A` for the primitive generator `A`.
    pub k_degree: i64,
}

/// Extremal rays of the cone generated by the wall classes.
pub fn mori_cone_rays(v: &ToricVariety) -> Result<Vec<ExtremalRay>> {
    let gens: Vec<LatticeVector> = distinct_wall_classes(v).iter().map(|c| c.as_vector()).collect();
    let rays = exactmath::extremal_rays(&gens)?;
    Ok(rays
        .into_iter()
        .map(|r| {
            let class = CurveClass::new(r.0);
            ExtremalRay {
                k_degree: class.k_degree(),
                class,
            }
        })
        .collect())
}

pub fn is_nef(v: &ToricVariety, l: &DivisorClass) -> Result<bool> {
    check_len(v, l)?;
    Ok(mori_cone_rays(v)?
        .iter()
        .all(|r| l.dot_curve(&r.class.pairing) >= 0))
}

pub fn is_ample(v: &ToricVariety, l: &DivisorClass) -> Result<bool> {
    check_len(v, l)?;
    Ok(mori_cone_rays(v)?
        .iter()
        .all(|r| l.dot_curve(&r.class.pairing) > 0))
}

/// `−K` ample.
pub fn is_fano(v: &ToricVariety) -> Result<bool> {
    is_ample(v, &v.anticanonical_class())
}

fn check_len(v: &ToricVariety, l: &DivisorClass) -> Result<()> {
    if l.len() != v.ray_count() {
        return Err(Error::Validation(format!(
            "divisor has {} coefficients but the fan has {} rays",
            l.len(),
            v.ray_count()
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DivisorialType {
    /// Exceptional divisor is a P¹-bundle over a smooth curve.
    #[serde(rename = "2.9.1")]
    ToCurve,
    /// `P²` with normal bundle `O(−1)`.
    #[serde(rename = "2.9.2")]
    PlaneMinusOne,
    /// `P²` with normal bundle `O(−2)`.
    #[serde(rename = "2.9.3")]
    PlaneMinusTwo,
    /// `P¹×P¹` with normal bundle `O(−1,−1)`.
    #[serde(rename = "2.9.4")]
    QuadricToPoint,
    /// Quadric cone; detected only.
    #[serde(rename = "2.9.5")]
    QuadricCone,
}

impl DivisorialType {
    pub fn label(self) -> &'static str {
        match self {
            Self::ToCurve => "2.9.1",
            Self::PlaneMinusOne => "2.9.2",
            Self::PlaneMinusTwo => "2.9.3",
            Self::QuadricToPoint => "2.9.4",
            Self::QuadricCone => "2.9.5",
        }
    }

    /// The `j` in the table notation `D_j`.
    pub fn index(self) -> u8 {
        match self {
            Self::ToCurve => 1,
            Self::PlaneMinusOne => 2,
            Self::PlaneMinusTwo => 3,
            Self::QuadricToPoint => 4,
            Self::QuadricCone => 5,
        }
    }

    pub fn from_index(j: u8) -> Option<Self> {
        Some(match j {
            1 => Self::ToCurve,
            2 => Self::PlaneMinusOne,
            3 => Self::PlaneMinusTwo,
            4 => Self::QuadricToPoint,
            5 => Self::QuadricCone,
            _ => return None,
        })
    }

    /// Whether the contraction target is smooth.
    pub fn target_smooth(self) -> bool {
        matches!(self, Self::ToCurve | Self::PlaneMinusOne)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BundleKind {
    P1Bundle,
    ConicBundle,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum ContractionKind {
    FiberType {
        target_dim: usize,
        bundle_kind: BundleKind,
    },
    Divisorial {
        exceptional_ray: usize,
        #[serde(rename = "type")]
        div_type: DivisorialType,
        /// Genus of the image curve; present for 2.9.1.
        center_genus: Option<i64>,
        surface: SurfaceKind,
        normal_data: Vec<i64>,
        target_smooth: bool,
    },
    Small,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionInfo {
    pub ray: CurveClass,
    pub k_degree: i64,
    /// `false` flags a ray with `K · A >= 0`, outside the contraction theorem.
    pub negative: bool,
    pub kind: ContractionKind,
}

/// Classifies the contraction of an extremal ray of a 3-dimensional fan.
pub fn classify_contraction(v: &ToricVariety, r: &CurveClass) -> Result<ContractionInfo> {
    if v.dim() != 3 {
        return Err(Error::Validation("contractions are classified on threefolds only".into()));
    }
    let r = r.primitive();
    if !mori_cone_rays(v)?.iter().any(|x| x.class == r) {
        return Err(Error::NotExtremal(format!("{:?}", r.pairing)));
    }
    let k_degree = r.k_degree();
    let negative_rays: Vec<usize> = (0..v.ray_count()).filter(|&i| r.pairing[i] < 0).collect();
    let walls = wall_curve_classes(v);
    let kind = match negative_rays.len() {
        0 => {
            let positive: Vec<Vec<i128>> = (0..v.ray_count())
                .filter(|&i| r.pairing[i] > 0)
                .map(|i| v.ray(i).to_wide())
                .collect();
            let target_dim = 3 - rank(&positive);
            let bundle_kind = if target_dim == 2 {
                let split = walls
                    .iter()
                    .filter(|w| w.class.primitive() == r)
                    .any(|w| w.wall.iter().any(|&t| w.class.pairing[t] != 0));
                if split {
                    BundleKind::ConicBundle
                } else {
                    BundleKind::P1Bundle
                }
            } else {
                BundleKind::Other
            };
            ContractionKind::FiberType {
                target_dim,
                bundle_kind,
            }
        }
        1 => {
            let e = negative_rays[0];
            let surface = v.star_surface(e)?;
            let to_point = walls
                .iter()
                .filter(|w| w.wall.contains(&e))
                .all(|w| w.class.primitive() == r);
            let (div_type, center_genus) = if to_point {
                let t = match (surface.kind, surface.normal_data.as_slice()) {
                    (SurfaceKind::ProjectivePlane, [-1]) => DivisorialType::PlaneMinusOne,
                    (SurfaceKind::ProjectivePlane, [-2]) => DivisorialType::PlaneMinusTwo,
                    (SurfaceKind::Quadric, [-1, -1]) => DivisorialType::QuadricToPoint,
                    _ => DivisorialType::QuadricCone,
                };
                (t, None)
            } else {
                let de = DivisorClass::prime(v.ray_count(), e);
                let kee = v.triple_intersection(&v.canonical_class(), &de, &de)?;
                if kee % 2 != 0 {
                    return Err(Error::Consistency(format!("K·E² = {kee} is odd for ray {e}")));
                }
                (DivisorialType::ToCurve, Some(1 - kee / 2))
            };
            ContractionKind::Divisorial {
                exceptional_ray: e,
                div_type,
                center_genus,
                surface: surface.kind,
                normal_data: surface.normal_data,
                target_smooth: div_type.target_smooth(),
            }
        }
        _ => ContractionKind::Small,
    };
    Ok(ContractionInfo {
        ray: r,
        k_degree,
        negative: k_degree < 0,
        kind,
    })
}

/// All extremal rays with their classifications, in ray order.
pub fn classify_all(v: &ToricVariety) -> Result<Vec<ContractionInfo>> {
    mori_cone_rays(v)?
        .iter()
        .map(|r| classify_contraction(v, &r.class))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularTargetReport {
    #[serde(rename = "type")]
    pub div_type: DivisorialType,
    pub exceptional_ray: usize,
    pub singularity: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ContractionOutcome {
    Smooth(Fan),
    Singular(SingularTargetReport),
}

/// Blows down the exceptional divisor of a divisorial contraction. Smooth
/// targets (2.9.1, 2.9.2) are returned as validated fans.
pub fn contract_divisorial(v: &ToricVariety, info: &ContractionInfo) -> Result<ContractionOutcome> {
    let ContractionKind::Divisorial {
        exceptional_ray: e,
        div_type,
        ..
    } = info.kind
    else {
        return Err(Error::Validation("contraction is not divisorial".into()));
    };
    match div_type {
        DivisorialType::PlaneMinusTwo => {
            return Ok(ContractionOutcome::Singular(SingularTargetReport {
                div_type,
                exceptional_ray: e,
                singularity: "quadruple point".into(),
            }))
        }
        DivisorialType::QuadricToPoint | DivisorialType::QuadricCone => {
            return Ok(ContractionOutcome::Singular(SingularTargetReport {
                div_type,
                exceptional_ray: e,
                singularity: "double point".into(),
            }))
        }
        _ => {}
    }
    let positive: Vec<usize> = (0..v.ray_count()).filter(|&i| info.ray.pairing[i] > 0).collect();
    let mut cones: BTreeSet<Vec<usize>> = BTreeSet::new();
    for c in v.max_cones() {
        let merged: BTreeSet<usize> = if c.contains(&e) {
            c.iter().copied().filter(|&i| i != e).chain(positive.iter().copied()).collect()
        } else {
            c.iter().copied().collect()
        };
        cones.insert(merged.into_iter().map(|i| if i > e { i - 1 } else { i }).collect());
    }
    let fan = v.fan();
    let rays: Vec<Vec<i64>> = fan
        .rays
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != e)
        .map(|(_, r)| r.0.clone())
        .collect();
    let target = Fan::new(
        format!("{} / D{}", fan.name, e),
        rays,
        cones.into_iter().collect(),
    );
    let ok = target.max_cones.iter().all(|c| c.len() == 3)
        && crate::toric::validate_fan(&target)
            .map(|d| d.smooth && d.complete)
            .unwrap_or(false);
    if !ok {
        return Err(Error::Consistency(format!(
            "blowing down D{e} of `{}` did not give a smooth complete fan",
            fan.name
        )));
    }
    Ok(ContractionOutcome::Smooth(target))
}

/// Target surface of a fiber-type contraction onto a surface, as a 2-dimensional fan.
pub fn fibration_base(v: &ToricVariety, info: &ContractionInfo) -> Result<Option<Fan>> {
    let ContractionKind::FiberType { target_dim: 2, .. } = info.kind else {
        return Ok(None);
    };
    let fiber_ray = (0..v.ray_count())
        .find(|&i| info.ray.pairing[i] > 0)
        .expect("fiber class meets some divisor");
    let u = v.ray(fiber_ray);
    let sigma = v
        .max_cones()
        .iter()
        .find(|c| c.contains(&fiber_ray))
        .expect("max cone");
    let mut basis = vec![u.clone()];
    basis.extend(sigma.iter().filter(|&&i| i != fiber_ray).map(|&i| v.ray(i).clone()));
    let inv = exactmath::unimodular_inverse(&basis)?;
    let project = |w: &LatticeVector| -> Option<LatticeVector> {
        let c: Vec<i64> = (1..3).map(|k| (0..3).map(|t| w.0[t] * inv[t][k]).sum()).collect();
        LatticeVector(c).primitive()
    };
    let mut rays: Vec<LatticeVector> = Vec::new();
    let mut image = vec![None; v.ray_count()];
    for (i, slot) in image.iter_mut().enumerate() {
        if let Some(p) = project(v.ray(i)) {
            let idx = match rays.iter().position(|r| *r == p) {
                Some(j) => j,
                None => {
                    rays.push(p);
                    rays.len() - 1
                }
            };
            *slot = Some(idx);
        }
    }
    let mut cones: BTreeSet<Vec<usize>> = BTreeSet::new();
    for c in v.max_cones() {
        let img: BTreeSet<usize> = c.iter().filter_map(|&i| image[i]).collect();
        let rows: Vec<Vec<i128>> = img.iter().map(|&j| rays[j].to_wide()).collect();
        if img.len() == 2 && rank(&rows) == 2 {
            cones.insert(img.into_iter().collect());
        }
    }
    // Degenerate fibers can produce cones subdivided by an extra ray; keep minimal ones.
    let base = Fan {
        name: format!("base of {}", v.name()),
        rays,
        max_cones: cones.into_iter().collect(),
    };
    Ok(Some(base))
}

/// Short name of a fibration target surface (`P2`, `P1xP1`, `F1`, `S7`, …).
pub fn fibration_target_label(v: &ToricVariety, info: &ContractionInfo) -> Result<Option<String>> {
    match fibration_base(v, info)? {
        Some(f) => {
            let s = ToricVariety::new(f)?;
            Ok(Some(surface_label(&s)))
        }
        None => Ok(None),
    }
}

/// Non-negative rational coefficients expressing `c` in the given rays, if any.
pub fn decompose_in_rays(c: &CurveClass, rays: &[ExtremalRay]) -> Option<Vec<Rational>> {
    let gens: Vec<LatticeVector> = rays.iter().map(|r| r.class.as_vector()).collect();
    exactmath::nonneg_combination(&c.as_vector(), &gens)
}
