//! Fans of smooth complete toric varieties of dimension 2 and 3.
//!
//! [`Fan`] is the raw combinatorial data as read from disk. [`ToricVariety`]
//! wraps a fan that passed validation (smooth and complete) together with the
//! precomputed wall list, the face poset and the full table of top-degree
//! intersection numbers; every geometric query goes through it.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{
    self, determinant, rank, snf_rank, unimodular_inverse, LatticeVector, PolyCone, Rational,
    RationalMatrix,
};

/// Ray count ceiling; faces are stored as `u64` bitmasks.
pub const MAX_RAYS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub name: String,
    pub rays: Vec<LatticeVector>,
    pub max_cones: Vec<Vec<usize>>,
}

/// `Σ a_ρ D_ρ`, coefficients aligned with the fan's ray order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivisorClass {
    pub coeffs: Vec<i64>,
}

impl DivisorClass {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Self { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![0; n] }
    }

    /// The prime invariant divisor `D_ρ`.
    pub fn prime(n: usize, ray: usize) -> Self {
        let mut coeffs = vec![0; n];
        coeffs[ray] = 1;
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &DivisorClass) -> DivisorClass {
        Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &DivisorClass) -> DivisorClass {
        Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> DivisorClass {
        Self::new(self.coeffs.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> DivisorClass {
        self.scale(-1)
    }

    /// Pairing with a curve given by its intersection numbers `D_ρ · Γ`.
    pub fn dot_curve(&self, pairing: &[i64]) -> i64 {
        self.coeffs.iter().zip(pairing).map(|(a, b)| a * b).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanDiagnostics {
    pub smooth: bool,
    pub complete: bool,
    pub simplicial: bool,
    /// Codimension-one faces of full-dimensional max cones, as sorted ray index sets.
    pub walls: Vec<Vec<usize>>,
}

impl Fan {
    pub fn new(name: impl Into<String>, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Self {
        Self {
            name: name.into(),
            rays: rays.into_iter().map(LatticeVector).collect(),
            max_cones,
        }
    }

    pub fn from_json(text: &str) -> Result<Fan> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fan serializes")
    }

    pub fn dim(&self) -> usize {
        self.rays.first().map_or(0, |r| r.dim())
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The fan of `P^d`: rays `e_1, …, e_d, -Σ e_i`.
    pub fn projective_space(d: usize) -> Fan {
        let mut rays: Vec<Vec<i64>> = (0..d)
            .map(|i| LatticeVector::unit(d, i).0)
            .collect();
        rays.push(vec![-1; d]);
        let cones = (0..=d)
            .map(|skip| (0..=d).filter(|&i| i != skip).collect())
            .collect();
        Fan::new(format!("P{d}"), rays, cones)
    }

    /// Hirzebruch surface `F_a` with rays `(1,0), (0,1), (-1,a), (0,-1)`;
    /// `D_1` (ray `(0,1)`) is the negative section.
    pub fn hirzebruch(a: i64) -> Fan {
        Fan::new(
            format!("F{a}"),
            vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
    }

    /// Cartesian product; rays of `self` first, then rays of `other`.
    pub fn product(&self, other: &Fan) -> Fan {
        let (d1, d2) = (self.dim(), other.dim());
        let mut rays = Vec::new();
        for r in &self.rays {
            let mut v = r.0.clone();
            v.extend(std::iter::repeat_n(0, d2));
            rays.push(v);
        }
        for r in &other.rays {
            let mut v = vec![0; d1];
            v.extend(r.0.iter().copied());
            rays.push(v);
        }
        let off = self.rays.len();
        let mut cones = Vec::new();
        for a in &self.max_cones {
            for b in &other.max_cones {
                let mut c = a.clone();
                c.extend(b.iter().map(|i| i + off));
                cones.push(c);
            }
        }
        Fan::new(format!("{}x{}", self.name, other.name), rays, cones)
    }

    /// `P(O ⊕ O(Σ t_ρ D_ρ))` over a complete surface fan: each base ray `u`
    /// lifts to `(u, t_ρ)`, plus the fiber rays `±e_3`.
    pub fn p1_bundle_over_surface(base: &Fan, twist: &[i64]) -> Fan {
        assert_eq!(base.dim(), 2);
        assert_eq!(twist.len(), base.rays.len());
        let mut rays: Vec<Vec<i64>> = base
            .rays
            .iter()
            .zip(twist)
            .map(|(u, &t)| vec![u.0[0], u.0[1], t])
            .collect();
        let top = rays.len();
        rays.push(vec![0, 0, 1]);
        rays.push(vec![0, 0, -1]);
        let mut cones = Vec::new();
        for c in &base.max_cones {
            for fiber in [top, top + 1] {
                let mut k = c.clone();
                k.push(fiber);
                cones.push(k);
            }
        }
        Fan::new(format!("P(O+O({twist:?}))/{}", base.name), rays, cones)
    }

    /// Star subdivision of the cone spanned by `cone` (the toric blow-up of
    /// the corresponding orbit closure). The new ray is appended last.
    pub fn star_subdivide(&self, cone: &[usize]) -> Result<Fan> {
        let set: BTreeSet<usize> = cone.iter().copied().collect();
        if set.is_empty() || set.iter().any(|&i| i >= self.rays.len()) {
            return Err(Error::Validation(format!("bad cone {cone:?} for subdivision")));
        }
        let d = self.dim();
        let new_ray = set
            .iter()
            .fold(LatticeVector::zero(d), |acc, &i| acc.add(&self.rays[i]));
        let new_idx = self.rays.len();
        let mut cones = Vec::new();
        let mut touched = false;
        for c in &self.max_cones {
            if set.iter().all(|i| c.contains(i)) {
                touched = true;
                for &drop in &set {
                    let mut k: Vec<usize> = c.iter().copied().filter(|&i| i != drop).collect();
                    k.push(new_idx);
                    cones.push(k);
                }
            } else {
                cones.push(c.clone());
            }
        }
        if !touched {
            return Err(Error::Validation(format!("{cone:?} is not a cone of the fan")));
        }
        let mut rays = self.rays.clone();
        rays.push(new_ray);
        Ok(Fan {
            name: format!("Bl{:?}({})", cone, self.name),
            rays,
            max_cones: cones,
        })
    }
}

impl Fan {
    /// Lattice isomorphism of fans: some `GL(N)` element maps rays onto rays
    /// and max cones onto max cones. Requires a full-dimensional first cone.
    pub fn is_isomorphic(&self, other: &Fan) -> bool {
        let d = self.dim();
        if d != other.dim()
            || self.rays.len() != other.rays.len()
            || self.max_cones.len() != other.max_cones.len()
        {
            return false;
        }
        let Some(first) = self.max_cones.first() else {
            return other.max_cones.is_empty();
        };
        if first.len() != d {
            return false;
        }
        let a_rows: Vec<LatticeVector> = first.iter().map(|&i| self.rays[i].clone()).collect();
        let Some(a_inv) = RationalMatrix::from_lattice_rows(&a_rows).inverse() else {
            return false;
        };
        let target_index: HashMap<&LatticeVector, usize> =
            other.rays.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let target_cones: BTreeSet<Vec<usize>> = other.max_cones.iter().map(|c| sorted(c)).collect();
        for cone in other.max_cones.iter().filter(|c| c.len() == d) {
            'perm: for perm in permutations(cone) {
                // x = c·A, T(x) = c·B with c = x·A^{-1}
                let mut mapping = vec![usize::MAX; self.rays.len()];
                let mut used = vec![false; other.rays.len()];
                for (i, r) in self.rays.iter().enumerate() {
                    let mut image = vec![0i64; d];
                    for (k, &b) in perm.iter().enumerate() {
                        let c = (0..d).fold(Rational::zero(), |acc, t| {
                            acc + Rational::from_integer(r.0[t] as i128) * a_inv.get(t, k)
                        });
                        if !c.is_integer() {
                            continue 'perm;
                        }
                        let c = c.to_integer() as i64;
                        for (t, x) in image.iter_mut().enumerate() {
                            *x += c * other.rays[b].0[t];
                        }
                    }
                    match target_index.get(&LatticeVector(image)) {
                        Some(&j) if !used[j] => {
                            used[j] = true;
                            mapping[i] = j;
                        }
                        _ => continue 'perm,
                    }
                }
                let all = self.max_cones.iter().all(|c| {
                    let img: Vec<usize> = c.iter().map(|&i| mapping[i]).collect();
                    target_cones.contains(&sorted(&img))
                });
                if all {
                    return true;
                }
            }
        }
        false
    }
}

fn mask_of(indices: &[usize]) -> u64 {
    indices.iter().fold(0u64, |m, &i| m | (1u64 << i))
}

fn indices_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1u64 << i) != 0).collect()
}

/// Syntactic checks, smoothness, completeness and overlap detection.
pub fn validate_fan(fan: &Fan) -> Result<FanDiagnostics> {
    let d = fan.dim();
    let n = fan.rays.len();
    if n == 0 || d == 0 {
        return Err(Error::Validation(format!("fan `{}` has no rays", fan.name)));
    }
    if n > MAX_RAYS {
        return Err(Error::Validation(format!("at most {MAX_RAYS} rays supported, got {n}")));
    }
    for r in &fan.rays {
        if r.dim() != d {
            return Err(Error::Validation(format!("ray {r} does not have dimension {d}")));
        }
        if r.is_zero() {
            return Err(Error::Validation("zero ray".into()));
        }
        if !r.is_primitive() {
            return Err(Error::NonPrimitiveRay(r.to_string()));
        }
    }
    let mut seen = BTreeSet::new();
    for r in &fan.rays {
        if !seen.insert(r.clone()) {
            return Err(Error::DuplicateRay(r.to_string()));
        }
    }
    let mut cone_masks = Vec::with_capacity(fan.max_cones.len());
    for c in &fan.max_cones {
        if c.is_empty() {
            return Err(Error::Validation("empty max cone".into()));
        }
        if let Some(&i) = c.iter().find(|&&i| i >= n) {
            return Err(Error::Validation(format!("ray index {i} out of range in cone {c:?}")));
        }
        let m = mask_of(c);
        if m.count_ones() as usize != c.len() {
            return Err(Error::Validation(format!("cone {c:?} repeats a ray")));
        }
        cone_masks.push(m);
    }
    for i in 0..cone_masks.len() {
        for j in 0..i {
            if cone_masks[i] == cone_masks[j] {
                return Err(Error::OverlappingCones(
                    sorted(&fan.max_cones[j]),
                    sorted(&fan.max_cones[i]),
                ));
            }
        }
    }

    let simplicial = fan.max_cones.iter().all(|c| {
        let rows: Vec<Vec<i128>> = c.iter().map(|&i| fan.rays[i].to_wide()).collect();
        rank(&rows) == c.len()
    });
    let smooth = simplicial
        && fan.max_cones.iter().all(|c| {
            let rows: Vec<Vec<i128>> = c.iter().map(|&i| fan.rays[i].to_wide()).collect();
            exactmath::smith_invariant_factors(&rows).iter().all(|&f| f == 1)
        });

    // pairwise intersections must be common faces
    let cones: Vec<PolyCone> = fan
        .max_cones
        .iter()
        .map(|c| PolyCone::new(c.iter().map(|&i| fan.rays[i].clone()).collect(), d))
        .collect::<Result<_>>()?;
    let duals: Vec<PolyCone> = cones.iter().map(exactmath::dual_cone).collect();
    for i in 0..cones.len() {
        for j in 0..i {
            if !intersect_properly(fan, i, j, &duals, d) {
                return Err(Error::OverlappingCones(
                    sorted(&fan.max_cones[j]),
                    sorted(&fan.max_cones[i]),
                ));
            }
        }
    }

    // walls of full-dimensional cones and their pairing
    let full: Vec<bool> = fan
        .max_cones
        .iter()
        .map(|c| c.len() == d && simplicial_cone(fan, c))
        .collect();
    let mut wall_map: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (ci, c) in fan.max_cones.iter().enumerate() {
        if !full[ci] {
            continue;
        }
        for &drop in c {
            let w: Vec<usize> = sorted(&c.iter().copied().filter(|&i| i != drop).collect::<Vec<_>>());
            wall_map.entry(w).or_default().push(ci);
        }
    }
    let mut walls: Vec<Vec<usize>> = wall_map.keys().cloned().collect();
    walls.sort();
    let mut complete = simplicial && full.iter().all(|&f| f);
    if complete {
        for (w, owners) in &wall_map {
            if owners.len() != 2 || !opposite_sides(fan, w, owners[0], owners[1]) {
                complete = false;
                break;
            }
        }
    }
    if complete {
        complete = spot_check_cover(fan, d)?;
    }
    Ok(FanDiagnostics {
        smooth,
        complete,
        simplicial,
        walls,
    })
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

fn simplicial_cone(fan: &Fan, c: &[usize]) -> bool {
    let rows: Vec<Vec<i128>> = c.iter().map(|&i| fan.rays[i].to_wide()).collect();
    rank(&rows) == c.len()
}

fn intersect_properly(fan: &Fan, i: usize, j: usize, duals: &[PolyCone], d: usize) -> bool {
    let constraints: Vec<Vec<i128>> = duals[i]
        .generators()
        .iter()
        .chain(duals[j].generators())
        .map(|u| u.to_wide())
        .collect();
    let hc = exactmath::double_description(&constraints, d);
    if !hc.lineality.is_empty() {
        return false;
    }
    let common: BTreeSet<usize> = fan.max_cones[i]
        .iter()
        .copied()
        .filter(|x| fan.max_cones[j].contains(x))
        .collect();
    let common_rays: Vec<LatticeVector> = common.iter().map(|&k| fan.rays[k].clone()).collect();
    hc.rays.iter().all(|r| {
        let v = LatticeVector::from_wide(&exactmath::primitive_wide(r));
        common_rays.contains(&v)
    })
}

fn opposite_sides(fan: &Fan, wall: &[usize], a: usize, b: usize) -> bool {
    let rows: Vec<LatticeVector> = wall.iter().map(|&i| fan.rays[i].clone()).collect();
    let d = fan.dim();
    let normal = if rows.is_empty() {
        // d = 1: the wall is the origin
        vec![1i128]
    } else {
        let k = RationalMatrix::from_lattice_rows(&rows).kernel_basis();
        if k.len() != 1 {
            return false;
        }
        k[0].clone()
    };
    let extra = |c: usize| {
        fan.max_cones[c]
            .iter()
            .copied()
            .find(|i| !wall.contains(i))
            .expect("max cone has one ray off the wall")
    };
    let sa = exactmath::dot_wide(&normal, &fan.rays[extra(a)].to_wide());
    let sb = exactmath::dot_wide(&normal, &fan.rays[extra(b)].to_wide());
    debug_assert_eq!(normal.len(), d);
    sa != 0 && sb != 0 && (sa > 0) != (sb > 0)
}

/// Every sampled generic direction must land in the interior of exactly one
/// max cone. Errors when a direction lies in two cones.
fn spot_check_cover(fan: &Fan, d: usize) -> Result<bool> {
    let inverses: Vec<RationalMatrix> = fan
        .max_cones
        .iter()
        .map(|c| {
            let rows: Vec<LatticeVector> = c.iter().map(|&i| fan.rays[i].clone()).collect();
            RationalMatrix::from_lattice_rows(&rows)
                .inverse()
                .expect("full simplicial cone")
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_fa11);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < 16 && attempts < 1000 {
        attempts += 1;
        let v: Vec<Rational> = (0..d)
            .map(|_| Rational::from_integer(rng.gen_range(-997i128..=997)))
            .collect();
        let mut hits = Vec::new();
        let mut degenerate = false;
        for (ci, inv) in inverses.iter().enumerate() {
            // v = Σ c_k r_k  <=>  c = v · M^{-1}
            let coeffs: Vec<Rational> = (0..d)
                .map(|k| {
                    (0..d).fold(Rational::zero(), |acc, t| acc + v[t] * inv.get(t, k))
                })
                .collect();
            if coeffs.iter().all(|c| *c >= Rational::zero()) {
                if coeffs.iter().any(|c| c.is_zero()) {
                    degenerate = true;
                }
                hits.push(ci);
            }
        }
        if degenerate {
            continue;
        }
        accepted += 1;
        match hits.len() {
            1 => {}
            0 => return Ok(false),
            _ => {
                return Err(Error::OverlappingCones(
                    sorted(&fan.max_cones[hits[0]]),
                    sorted(&fan.max_cones[hits[1]]),
                ))
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "a")]
pub enum SurfaceKind {
    ProjectivePlane,
    /// `P^1 × P^1`.
    Quadric,
    /// `F_a` with `a >= 1`.
    Hirzebruch(u32),
    Other { rays: usize },
}

/// Isomorphism type of an invariant surface `D_ρ` and its normal bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceDescriptor {
    pub ray: usize,
    pub kind: SurfaceKind,
    /// `[d]` for `O(d)` on `P^2`; the two ruling degrees sorted ascending on
    /// `P^1 × P^1`; `[N·f, N·σ_neg]` on `F_a`; otherwise `normal_degrees`.
    pub normal_data: Vec<i64>,
    /// Rays adjacent to `ρ`, in ascending index order.
    pub star_rays: Vec<usize>,
    /// `D_ρ² · D_σ` for each adjacent `σ`.
    pub normal_degrees: Vec<i64>,
    /// Self-intersection on the surface of each curve `D_ρ ∩ D_σ`.
    pub curve_self_intersections: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Wall {
    /// Sorted ray indices spanning the wall.
    pub rays: Vec<usize>,
    /// The two rays completing the wall to a max cone on either side.
    pub opposite: (usize, usize),
}

#[derive(Debug)]
pub struct ToricVariety {
    fan: Fan,
    dim: usize,
    walls: Vec<Wall>,
    faces_by_size: Vec<Vec<u64>>,
    face_set: std::collections::HashSet<u64>,
    top_numbers: Vec<i64>,
    complex_cache: Mutex<HashMap<u64, Vec<i64>>>,
}

impl Clone for ToricVariety {
    fn clone(&self) -> Self {
        Self {
            fan: self.fan.clone(),
            dim: self.dim,
            walls: self.walls.clone(),
            faces_by_size: self.faces_by_size.clone(),
            face_set: self.face_set.clone(),
            top_numbers: self.top_numbers.clone(),
            complex_cache: Mutex::new(HashMap::new()),
        }
    }
}

impl ToricVariety {
    /// Validates the fan and precomputes intersection data. Only smooth
    /// complete fans of dimension 2 or 3 are accepted.
    pub fn new(fan: Fan) -> Result<ToricVariety> {
        let diag = validate_fan(&fan)?;
        let dim = fan.dim();
        let refuse = |reason: &str| Error::UnsupportedFan {
            name: fan.name.clone(),
            reason: reason.to_string(),
        };
        if !(2..=3).contains(&dim) {
            return Err(refuse("only dimensions 2 and 3 are supported"));
        }
        if !diag.smooth {
            return Err(refuse("fan is not smooth"));
        }
        if !diag.complete {
            return Err(refuse("fan is not complete"));
        }

        let mut face_set = std::collections::HashSet::new();
        for c in &fan.max_cones {
            let m = mask_of(c);
            // all subsets of a max cone
            let mut sub = m;
            loop {
                face_set.insert(sub);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & m;
            }
        }
        let mut faces_by_size = vec![Vec::new(); dim + 1];
        for &f in &face_set {
            faces_by_size[f.count_ones() as usize].push(f);
        }
        faces_by_size.iter_mut().for_each(|v| v.sort_unstable());

        let mut walls = Vec::new();
        for w in &diag.walls {
            let wm = mask_of(w);
            let owners: Vec<usize> = fan
                .max_cones
                .iter()
                .filter(|c| mask_of(c) & wm == wm)
                .map(|c| *c.iter().find(|i| !w.contains(i)).expect("off-wall ray"))
                .collect();
            walls.push(Wall {
                rays: w.clone(),
                opposite: (owners[0].min(owners[1]), owners[0].max(owners[1])),
            });
        }

        let mut v = ToricVariety {
            fan,
            dim,
            walls,
            faces_by_size,
            face_set,
            top_numbers: Vec::new(),
            complex_cache: Mutex::new(HashMap::new()),
        };
        v.top_numbers = v.compute_top_numbers()?;
        Ok(v)
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn name(&self) -> &str {
        &self.fan.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ray_count(&self) -> usize {
        self.fan.rays.len()
    }

    pub fn ray(&self, i: usize) -> &LatticeVector {
        &self.fan.rays[i]
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    /// Picard rank `n - d`.
    pub fn picard_rank(&self) -> usize {
        self.ray_count() - self.dim
    }

    pub fn is_cone(&self, rays: &[usize]) -> bool {
        self.face_set.contains(&mask_of(rays))
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.fan.max_cones
    }

    /// Rays `σ` such that `{ρ, σ}` is a cone.
    pub fn adjacent_rays(&self, rho: usize) -> Vec<usize> {
        (0..self.ray_count())
            .filter(|&s| s != rho && self.is_cone(&[rho, s]))
            .collect()
    }

    fn check_len(&self, l: &DivisorClass) -> Result<()> {
        if l.len() != self.ray_count() {
            return Err(Error::Validation(format!(
                "divisor has {} coefficients but the fan has {} rays",
                l.len(),
                self.ray_count()
            )));
        }
        Ok(())
    }

    /// `K = -Σ D_ρ`.
    pub fn canonical_class(&self) -> DivisorClass {
        DivisorClass::new(vec![-1; self.ray_count()])
    }

    pub fn anticanonical_class(&self) -> DivisorClass {
        DivisorClass::new(vec![1; self.ray_count()])
    }

    /// The principal divisor `div(m) = Σ <m, v_ρ> D_ρ`.
    pub fn principal_divisor(&self, m: &LatticeVector) -> DivisorClass {
        DivisorClass::new(self.fan.rays.iter().map(|v| v.dot(m)).collect())
    }

    /// A character `m` with `a - b = div(m)`, if the classes are linearly equivalent.
    pub fn linear_equivalence_witness(&self, a: &DivisorClass, b: &DivisorClass) -> Option<LatticeVector> {
        let diff = a.sub(b);
        let rows: Vec<Vec<Rational>> = self
            .fan
            .rays
            .iter()
            .map(|v| v.0.iter().map(|&x| Rational::from_integer(x as i128)).collect())
            .collect();
        // pick d independent rays and solve, then verify all equations
        let (_, piv) = RationalMatrix::from_rows(transpose(&rows)).rref();
        let sq = RationalMatrix::from_rows(piv.iter().map(|&i| rows[i].clone()).collect());
        let rhs: Vec<Rational> = piv
            .iter()
            .map(|&i| Rational::from_integer(diff.coeffs[i] as i128))
            .collect();
        let m = sq.solve(&rhs)?;
        if m.iter().any(|x| !x.is_integer()) {
            return None;
        }
        let m = LatticeVector(m.iter().map(|x| x.to_integer() as i64).collect());
        (self.principal_divisor(&m) == diff).then_some(m)
    }

    // -- intersection numbers ------------------------------------------------

    fn tensor_index(&self, idx: &[usize]) -> usize {
        let n = self.ray_count();
        idx.iter().fold(0, |acc, &i| acc * n + i)
    }

    fn compute_top_numbers(&self) -> Result<Vec<i64>> {
        let n = self.ray_count();
        let d = self.dim;
        let mut memo: HashMap<Vec<usize>, i64> = HashMap::new();
        let mut table = vec![0i64; n.pow(d as u32)];
        let mut idx = vec![0usize; d];
        loop {
            if idx.windows(2).all(|w| w[0] <= w[1]) {
                let val = self.monomial(idx.clone(), &mut memo)?;
                for perm in permutations(&idx) {
                    let t = self.tensor_index(&perm);
                    table[t] = val;
                }
            }
            // odometer
            let mut k = d;
            loop {
                if k == 0 {
                    return Ok(table);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    /// `D_{i_1} ⋯ D_{i_d}` by relation reduction: a repeated factor `D_i` is
    /// replaced by `-Σ <m, v_ρ> D_ρ` for a character dual to `v_i` on a max
    /// cone containing the support, which strictly grows the support.
    fn monomial(&self, mut mono: Vec<usize>, memo: &mut HashMap<Vec<usize>, i64>) -> Result<i64> {
        mono.sort_unstable();
        if let Some(&v) = memo.get(&mono) {
            return Ok(v);
        }
        let mut support = mono.clone();
        support.dedup();
        let val = if !self.is_cone(&support) {
            0
        } else if support.len() == self.dim {
            1
        } else {
            let rep = mono
                .windows(2)
                .find(|w| w[0] == w[1])
                .map(|w| w[0])
                .expect("repeated factor");
            let sm = mask_of(&support);
            let sigma = self
                .fan
                .max_cones
                .iter()
                .find(|c| mask_of(c) & sm == sm)
                .expect("support lies in a max cone");
            let basis: Vec<LatticeVector> = sigma.iter().map(|&i| self.fan.rays[i].clone()).collect();
            let inv = unimodular_inverse(&basis)?;
            let pos = sigma.iter().position(|&i| i == rep).expect("rep in sigma");
            let m = LatticeVector((0..self.dim).map(|r| inv[r][pos]).collect());
            let mut total = 0i64;
            let k = mono.iter().position(|&i| i == rep).expect("rep present");
            for rho in 0..self.ray_count() {
                if support.contains(&rho) {
                    continue;
                }
                let c = m.dot(&self.fan.rays[rho]);
                if c == 0 {
                    continue;
                }
                let mut next = mono.clone();
                next[k] = rho;
                total -= c * self.monomial(next, memo)?;
            }
            total
        };
        memo.insert(mono, val);
        Ok(val)
    }

    /// `D_{i_1} ⋯ D_{i_d}` for prime divisors.
    pub fn prime_intersection(&self, idx: &[usize]) -> i64 {
        assert_eq!(idx.len(), self.dim);
        self.top_numbers[self.tensor_index(idx)]
    }

    /// Top-degree intersection of `dim` divisor classes.
    pub fn intersect(&self, divisors: &[&DivisorClass]) -> Result<i64> {
        if divisors.len() != self.dim {
            return Err(Error::Validation(format!(
                "need {} divisors for a top intersection, got {}",
                self.dim,
                divisors.len()
            )));
        }
        for d in divisors {
            self.check_len(d)?;
        }
        let n = self.ray_count();
        let mut total = 0i64;
        match self.dim {
            2 => {
                for i in 0..n {
                    let a = divisors[0].coeffs[i];
                    if a == 0 {
                        continue;
                    }
                    for j in 0..n {
                        let b = divisors[1].coeffs[j];
                        if b != 0 {
                            total += a * b * self.top_numbers[i * n + j];
                        }
                    }
                }
            }
            3 => {
                for i in 0..n {
                    let a = divisors[0].coeffs[i];
                    if a == 0 {
                        continue;
                    }
                    for j in 0..n {
                        let b = divisors[1].coeffs[j];
                        if b == 0 {
                            continue;
                        }
                        for k in 0..n {
                            let c = divisors[2].coeffs[k];
                            if c != 0 {
                                total += a * b * c * self.top_numbers[(i * n + j) * n + k];
                            }
                        }
                    }
                }
            }
            _ => unreachable!("dimension checked at construction"),
        }
        Ok(total)
    }

    pub fn triple_intersection(&self, a: &DivisorClass, b: &DivisorClass, c: &DivisorClass) -> Result<i64> {
        if self.dim != 3 {
            return Err(Error::Validation("triple intersection needs a 3-dimensional fan".into()));
        }
        self.intersect(&[a, b, c])
    }

    pub fn pair_intersection(&self, a: &DivisorClass, b: &DivisorClass) -> Result<i64> {
        if self.dim != 2 {
            return Err(Error::Validation("pair intersection needs a 2-dimensional fan".into()));
        }
        self.intersect(&[a, b])
    }

    /// `L · c_2`, with `c_2 = Σ_{2-cones {ρ,σ}} D_ρ D_σ`.
    pub fn c2_pairing(&self, l: &DivisorClass) -> Result<i64> {
        if self.dim != 3 {
            return Err(Error::Validation("c2 pairing needs a 3-dimensional fan".into()));
        }
        self.check_len(l)?;
        let mut total = 0;
        for &f in &self.faces_by_size[2] {
            let ij = indices_of(f);
            for (k, &a) in l.coeffs.iter().enumerate() {
                if a != 0 {
                    total += a * self.prime_intersection(&[ij[0], ij[1], k]);
                }
            }
        }
        Ok(total)
    }

    /// `c_1 · c_2` (dim 3) or `c_2` = number of fixed points (dim 2).
    pub fn c1c2(&self) -> i64 {
        match self.dim {
            3 => self.c2_pairing(&self.anticanonical_class()).expect("dim 3"),
            _ => self.faces_by_size[self.dim].len() as i64,
        }
    }

    /// `(-K)^d`.
    pub fn anticanonical_degree(&self) -> i64 {
        let k = self.anticanonical_class();
        let refs: Vec<&DivisorClass> = (0..self.dim).map(|_| &k).collect();
        self.intersect(&refs).expect("lengths match")
    }

    /// `χ(O)` by Todd: `c_1 c_2 / 24` in dimension 3, `(K² + c_2)/12` in dimension 2.
    pub fn chi_structure_sheaf(&self) -> Rational {
        match self.dim {
            3 => Rational::new(self.c1c2() as i128, 24),
            _ => Rational::new((self.anticanonical_degree() + self.c1c2()) as i128, 12),
        }
    }

    /// Hirzebruch–Riemann–Roch for a line bundle.
    pub fn riemann_roch(&self, l: &DivisorClass) -> Result<Rational> {
        self.check_len(l)?;
        let k = self.canonical_class();
        let r = |x: i64| Rational::from_integer(x as i128);
        match self.dim {
            3 => {
                let l3 = self.intersect(&[l, l, l])?;
                let l2k = self.intersect(&[l, l, &k])?;
                let lkk = self.intersect(&[l, &k, &k])?;
                let lc2 = self.c2_pairing(l)?;
                Ok(self.chi_structure_sheaf() + r(l3) / r(6) - r(l2k) / r(4) + (r(lkk) + r(lc2)) / r(12))
            }
            _ => {
                let lmk = l.sub(&k);
                Ok(self.chi_structure_sheaf() + r(self.intersect(&[&lmk, l])?) / r(2))
            }
        }
    }

    // -- cohomology ------------------------------------------------------------

    /// `(h^0, …, h^dim)` of `O(L)` by the chamber method: `h^i` sums the
    /// reduced cohomology `H̃^{i-1}` of the full subcomplex on the rays with
    /// `<m, v_ρ> < -a_ρ`, over the lattice points `m` that can lie in a
    /// bounded chamber of the arrangement.
    pub fn line_bundle_cohomology(&self, l: &DivisorClass) -> Result<Vec<i64>> {
        self.check_len(l)?;
        let d = self.dim;
        let n = self.ray_count();
        // Shifting every hyperplane by 1/2 puts each lattice point in an open
        // chamber; bounded chambers lie inside the hull of the vertices.
        let half = Rational::new(1, 2);
        let mut lo: Vec<Option<i64>> = vec![None; d];
        let mut hi: Vec<Option<i64>> = vec![None; d];
        for subset in combinations(n, d) {
            let rows: Vec<LatticeVector> = subset.iter().map(|&i| self.fan.rays[i].clone()).collect();
            let raw: Vec<Vec<i64>> = rows.iter().map(|r| r.0.clone()).collect();
            if determinant(&raw) == 0 {
                continue;
            }
            let rhs: Vec<Rational> = subset
                .iter()
                .map(|&i| Rational::from_integer(-(l.coeffs[i] as i128)) - half)
                .collect();
            let m = RationalMatrix::from_lattice_rows(&rows)
                .solve(&rhs)
                .expect("independent rows");
            for t in 0..d {
                let f = m[t].floor().to_integer() as i64;
                let c = m[t].ceil().to_integer() as i64;
                lo[t] = Some(lo[t].map_or(f, |x| x.min(f)));
                hi[t] = Some(hi[t].map_or(c, |x| x.max(c)));
            }
        }
        let lo: Vec<i64> = lo.into_iter().map(|x| x.unwrap_or(0)).collect();
        let hi: Vec<i64> = hi.into_iter().map(|x| x.unwrap_or(0)).collect();

        let mut h = vec![0i64; d + 1];
        let mut m = lo.clone();
        loop {
            let mut mask = 0u64;
            for (rho, v) in self.fan.rays.iter().enumerate() {
                let pairing: i64 = v.0.iter().zip(&m).map(|(a, b)| a * b).sum();
                if pairing < -l.coeffs[rho] {
                    mask |= 1u64 << rho;
                }
            }
            let red = self.reduced_cohomology(mask);
            for (i, x) in red.iter().enumerate() {
                h[i] += x;
            }
            // odometer
            let mut k = 0;
            loop {
                if k == d {
                    return Ok(h);
                }
                m[k] += 1;
                if m[k] <= hi[k] {
                    break;
                }
                m[k] = lo[k];
                k += 1;
            }
        }
    }

    /// Reduced rational cohomology of the full subcomplex on `vertices`,
    /// indexed from degree -1: entry `k` is `dim H̃^{k-1}`.
    pub fn reduced_cohomology(&self, vertices: u64) -> Vec<i64> {
        if let Some(v) = self.complex_cache.lock().expect("cache").get(&vertices) {
            return v.clone();
        }
        let d = self.dim;
        let faces: Vec<Vec<u64>> = self
            .faces_by_size
            .iter()
            .map(|fs| fs.iter().copied().filter(|f| f & !vertices == 0).collect())
            .collect();
        // rank of the coboundary from size s to size s+1
        let mut ranks = vec![0usize; d + 1];
        for s in 0..d {
            let src = &faces[s];
            let dst = &faces[s + 1];
            if src.is_empty() || dst.is_empty() {
                continue;
            }
            let pos: HashMap<u64, usize> = src.iter().enumerate().map(|(i, &f)| (f, i)).collect();
            let mat: Vec<Vec<i128>> = dst
                .iter()
                .map(|&f| {
                    let mut row = vec![0i128; src.len()];
                    for (j, v) in indices_of(f).into_iter().enumerate() {
                        let g = f & !(1u64 << v);
                        row[pos[&g]] = if j % 2 == 0 { 1 } else { -1 };
                    }
                    row
                })
                .collect();
            ranks[s] = snf_rank(&mat);
        }
        let out: Vec<i64> = (0..=d)
            .map(|s| {
                let prev = if s == 0 { 0 } else { ranks[s - 1] };
                faces[s].len() as i64 - ranks[s] as i64 - prev as i64
            })
            .collect();
        self.complex_cache
            .lock()
            .expect("cache")
            .insert(vertices, out.clone());
        out
    }

    // -- invariant surfaces ----------------------------------------------------

    /// Star fan of `ρ` as a 2-dimensional fan in `N / Z v_ρ`, with rays listed
    /// in the order of `adjacent_rays(ρ)`.
    pub fn star_fan(&self, rho: usize) -> Result<Fan> {
        if self.dim != 3 {
            return Err(Error::Validation("star surfaces need a 3-dimensional fan".into()));
        }
        let sigma = self
            .fan
            .max_cones
            .iter()
            .find(|c| c.contains(&rho))
            .expect("every ray lies in a max cone");
        let mut basis = vec![self.fan.rays[rho].clone()];
        basis.extend(sigma.iter().filter(|&&i| i != rho).map(|&i| self.fan.rays[i].clone()));
        let inv = unimodular_inverse(&basis)?;
        let project = |u: &LatticeVector| -> Vec<i64> {
            // coordinates c with u = Σ c_k basis_k, i.e. c = u · M^{-1}
            (1..3)
                .map(|k| (0..3).map(|t| u.0[t] * inv[t][k]).sum())
                .collect()
        };
        let adj = self.adjacent_rays(rho);
        let rays: Vec<Vec<i64>> = adj.iter().map(|&s| project(&self.fan.rays[s])).collect();
        let cones: Vec<Vec<usize>> = self
            .fan
            .max_cones
            .iter()
            .filter(|c| c.contains(&rho))
            .map(|c| {
                c.iter()
                    .filter(|&&i| i != rho)
                    .map(|i| adj.iter().position(|a| a == i).expect("adjacent"))
                    .collect()
            })
            .collect();
        Ok(Fan::new(format!("star({rho}) in {}", self.fan.name), rays, cones))
    }

    /// Identifies `D_ρ` from its star fan and reads off its normal bundle.
    pub fn star_surface(&self, rho: usize) -> Result<SurfaceDescriptor> {
        if rho >= self.ray_count() {
            return Err(Error::Validation(format!("ray index {rho} out of range")));
        }
        let star = ToricVariety::new(self.star_fan(rho)?)?;
        let adj = self.adjacent_rays(rho);
        let normal_degrees: Vec<i64> = adj
            .iter()
            .map(|&s| self.prime_intersection(&[rho, rho, s]))
            .collect();
        let selfint: Vec<i64> = (0..adj.len())
            .map(|i| star.prime_intersection(&[i, i]))
            .collect();

        // Second route: D_ρ|_{D_ρ} = -Σ <m, v_σ> E_σ with <m, v_ρ> = 1.
        let sigma = self
            .fan
            .max_cones
            .iter()
            .find(|c| c.contains(&rho))
            .expect("max cone");
        let basis: Vec<LatticeVector> = sigma.iter().map(|&i| self.fan.rays[i].clone()).collect();
        let inv = unimodular_inverse(&basis)?;
        let pos = sigma.iter().position(|&i| i == rho).expect("rho");
        let m = LatticeVector((0..3).map(|r| inv[r][pos]).collect());
        let restricted = DivisorClass::new(adj.iter().map(|&s| -m.dot(&self.fan.rays[s])).collect());
        for (i, &deg) in normal_degrees.iter().enumerate() {
            let via_star = star.intersect(&[&restricted, &DivisorClass::prime(adj.len(), i)])?;
            if via_star != deg {
                return Err(Error::Consistency(format!(
                    "normal degree of D_{rho} on curve {i}: {via_star} on the star fan vs {deg} from triple intersections"
                )));
            }
        }

        let kind = classify_surface(&star);
        let normal_data = match kind {
            SurfaceKind::ProjectivePlane => {
                if normal_degrees.windows(2).any(|w| w[0] != w[1]) {
                    return Err(Error::Consistency(format!(
                        "D_{rho} is a projective plane but its normal degrees differ: {normal_degrees:?}"
                    )));
                }
                vec![normal_degrees[0]]
            }
            SurfaceKind::Quadric => {
                // curves come in two rulings; opposite star rays are linearly equivalent
                let star_rays = &star.fan().rays;
                let first = 0;
                let other = (1..4)
                    .find(|&j| star_rays[j] != star_rays[first].neg())
                    .expect("second ruling");
                let mut v = vec![normal_degrees[first], normal_degrees[other]];
                v.sort_unstable();
                v
            }
            SurfaceKind::Hirzebruch(a) => {
                let fiber = selfint.iter().position(|&s| s == 0).expect("fiber curve");
                let neg = selfint
                    .iter()
                    .position(|&s| s == -(a as i64))
                    .expect("negative section");
                vec![normal_degrees[fiber], normal_degrees[neg]]
            }
            SurfaceKind::Other { .. } => normal_degrees.clone(),
        };
        Ok(SurfaceDescriptor {
            ray: rho,
            kind,
            normal_data,
            star_rays: adj,
            normal_degrees,
            curve_self_intersections: selfint,
        })
    }

    /// `true` iff `L|_{D_ρ}` is the trivial class (all degrees on invariant curves vanish).
    pub fn restriction_is_trivial(&self, l: &DivisorClass, rho: usize) -> Result<bool> {
        let d = DivisorClass::prime(self.ray_count(), rho);
        for s in self.adjacent_rays(rho) {
            let ds = DivisorClass::prime(self.ray_count(), s);
            if self.triple_intersection(l, &d, &ds)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Isomorphism type of a smooth complete toric surface.
pub fn classify_surface(surface: &ToricVariety) -> SurfaceKind {
    let n = surface.ray_count();
    match n {
        3 => SurfaceKind::ProjectivePlane,
        4 => {
            let a = (0..4)
                .map(|i| surface.prime_intersection(&[i, i]).abs())
                .max()
                .unwrap_or(0);
            if a == 0 {
                SurfaceKind::Quadric
            } else {
                SurfaceKind::Hirzebruch(a as u32)
            }
        }
        _ => SurfaceKind::Other { rays: n },
    }
}

/// Short human-readable name of a smooth complete toric surface: `P2`,
/// `P1xP1`, `F<a>`, `S<k>` for a del Pezzo surface of degree `k`.
pub fn surface_label(surface: &ToricVariety) -> String {
    match classify_surface(surface) {
        SurfaceKind::ProjectivePlane => "P2".into(),
        SurfaceKind::Quadric => "P1xP1".into(),
        SurfaceKind::Hirzebruch(a) => format!("F{a}"),
        SurfaceKind::Other { rays } => {
            let del_pezzo = (0..rays).all(|i| surface.prime_intersection(&[i, i]) >= -1);
            if del_pezzo {
                format!("S{}", 12 - rays)
            } else {
                format!("toric surface ({rays} rays)")
            }
        }
    }
}

fn transpose(rows: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let c = rows.first().map_or(0, |r| r.len());
    (0..c).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn permutations(v: &[usize]) -> Vec<Vec<usize>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}
