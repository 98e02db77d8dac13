//! Exact integer and rational linear algebra, plus polyhedral cone primitives.
//!
//! Nothing in here touches floating point. Lattice data is stored as `i64`;
//! elimination and the double-description iteration run on `i128` with gcd
//! normalization after every combination step, which keeps entries tiny for
//! the dimensions this crate works in (at most a few dozen rays).

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// An integer vector in a lattice `Z^d`.
///
/// Ordering is lexicographic on the coordinates, which is the canonical
/// order used for every set-valued output in the crate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        Self(coords)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn dot(&self, other: &LatticeVector) -> i64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &x| g.gcd(&x))
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// Divides out the content. `None` for the zero vector.
    pub fn primitive(&self) -> Option<LatticeVector> {
        let g = self.content();
        if g == 0 {
            return None;
        }
        Some(Self(self.0.iter().map(|x| x / g).collect()))
    }

    pub fn add(&self, other: &LatticeVector) -> LatticeVector {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LatticeVector) -> LatticeVector {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> LatticeVector {
        Self(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> LatticeVector {
        self.scale(-1)
    }

    pub(crate) fn to_wide(&self) -> Vec<i128> {
        self.0.iter().map(|&x| x as i128).collect()
    }

    pub(crate) fn from_wide(v: &[i128]) -> LatticeVector {
        Self(
            v.iter()
                .map(|&x| i64::try_from(x).expect("lattice coordinate overflows i64"))
                .collect(),
        )
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

// ---------------------------------------------------------------------------
// wide-integer helpers

pub(crate) fn dot_wide(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn primitive_wide(v: &[i128]) -> Vec<i128> {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

/// Determinant of a square integer matrix by fraction-free (Bareiss) elimination.
pub fn determinant(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// `true` iff the `d` vectors of dimension `d` form a lattice basis.
pub fn is_unimodular(vectors: &[LatticeVector]) -> Result<bool> {
    let d = vectors.len();
    if let Some(v) = vectors.iter().find(|v| v.dim() != d) {
        return Err(Error::Validation(format!(
            "expected {d} vectors of dimension {d}, found one of dimension {}",
            v.dim()
        )));
    }
    let rows: Vec<Vec<i64>> = vectors.iter().map(|v| v.0.clone()).collect();
    Ok(determinant(&rows).abs() == 1)
}

/// Rank over Q of a list of integer rows.
pub fn rank(rows: &[Vec<i128>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| primitive_wide(r)).collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r].clone();
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                let row: Vec<i128> = m[i]
                    .iter()
                    .zip(&pivot)
                    .map(|(a, b)| a * pivot[c] - b * f)
                    .collect();
                m[i] = primitive_wide(&row);
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Inverse of a unimodular integer matrix (rows are the basis vectors).
pub fn unimodular_inverse(rows: &[LatticeVector]) -> Result<Vec<Vec<i64>>> {
    let n = rows.len();
    let m = RationalMatrix::from_lattice_rows(rows);
    let inv = m
        .inverse()
        .ok_or_else(|| Error::Validation("matrix is singular".into()))?;
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let x = inv.get(i, j);
            if !x.is_integer() {
                return Err(Error::Validation("matrix is not unimodular".into()));
            }
            out[i][j] = *x.numer() as i64;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// rational matrices

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data = rows.into_iter().flatten().collect::<Vec<_>>();
        assert_eq!(data.len(), r * c, "ragged matrix");
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_lattice_rows(rows: &[LatticeVector]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|v| v.0.iter().map(|&x| Rational::from_integer(x as i128)).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Rational) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip();
            for j in 0..m.cols {
                let x = *m.get(r, j) * inv;
                m.set(r, j, x);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = *m.get(i, c);
                    for j in 0..m.cols {
                        let x = *m.get(i, j) - f * *m.get(r, j);
                        m.set(i, j, x);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn inverse(&self) -> Option<RationalMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = RationalMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, *self.get(i, j));
            }
            aug.set(i, n + i, Rational::one());
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, *red.get(i, n + j));
            }
        }
        Some(out)
    }

    /// Solves `self * x = b` for square nonsingular `self`.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        let inv = self.inverse()?;
        Some(
            (0..self.rows)
                .map(|i| {
                    inv.row(i)
                        .iter()
                        .zip(b)
                        .fold(Rational::zero(), |acc, (a, y)| acc + a * y)
                })
                .collect(),
        )
    }

    /// Basis of the right kernel, each vector scaled to a primitive integer vector.
    pub fn kernel_basis(&self) -> Vec<Vec<i128>> {
        let (red, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -*red.get(r, f);
                }
                clear_denominators(&v)
            })
            .collect()
    }
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn clear_denominators(v: &[Rational]) -> Vec<i128> {
    let l = v.iter().fold(1i128, |l, x| l.lcm(x.denom()));
    let ints: Vec<i128> = v.iter().map(|x| (x * Rational::from_integer(l)).to_integer()).collect();
    primitive_wide(&ints)
}

// ---------------------------------------------------------------------------
// Smith normal form

/// Invariant factors (nonzero diagonal of the Smith normal form) of an integer matrix.
pub fn smith_invariant_factors(mat: &[Vec<i128>]) -> Vec<i128> {
    let mut m: Vec<Vec<i128>> = mat.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = m[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = m[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                if m[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = m[t][j] / p;
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if m[t][j] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // divisibility condition on the rest of the block
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| m[i][j] % p != 0);
                match bad {
                    Some((i, _)) => {
                        for j in t..cols {
                            m[t][j] += m[i][j];
                        }
                        continue;
                    }
                    None => break,
                }
            }
            // move the new smallest entry of row/column t to the pivot
            let mut best = (t, t);
            for i in t..rows {
                if m[i][t] != 0 && m[i][t].abs() < m[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if m[t][j] != 0 && m[t][j].abs() < m[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            m.swap(t, best.0);
            for row in m.iter_mut() {
                row.swap(t, best.1);
            }
        }
        out.push(m[t][t].abs());
        t += 1;
    }
    out
}

/// Rank of an integer matrix read off its Smith normal form.
pub fn snf_rank(mat: &[Vec<i128>]) -> usize {
    if mat.is_empty() || mat[0].is_empty() {
        return 0;
    }
    smith_invariant_factors(mat).len()
}

// ---------------------------------------------------------------------------
// double description

/// The cone `{x : <a, x> >= 0 for every constraint a}` as extreme rays plus a
/// lineality basis. Rays are only meaningful modulo the lineality space.
#[derive(Clone, Debug)]
pub(crate) struct HalfspaceCone {
    pub rays: Vec<Vec<i128>>,
    pub lineality: Vec<Vec<i128>>,
}

pub(crate) fn double_description(constraints: &[Vec<i128>], dim: usize) -> HalfspaceCone {
    let mut lineality: Vec<Vec<i128>> = (0..dim)
        .map(|i| {
            let mut e = vec![0; dim];
            e[i] = 1;
            e
        })
        .collect();
    let mut rays: Vec<Vec<i128>> = Vec::new();
    let mut processed: Vec<Vec<i128>> = Vec::new();

    for a in constraints {
        if a.iter().all(|&x| x == 0) {
            continue;
        }
        if let Some(pos) = lineality.iter().position(|l| dot_wide(a, l) != 0) {
            let mut l0 = lineality.remove(pos);
            if dot_wide(a, &l0) < 0 {
                l0.iter_mut().for_each(|x| *x = -*x);
            }
            let s0 = dot_wide(a, &l0);
            let project = |v: &mut Vec<i128>| {
                let s = dot_wide(a, v);
                if s != 0 {
                    let w: Vec<i128> = v.iter().zip(&l0).map(|(x, y)| s0 * x - s * y).collect();
                    *v = primitive_wide(&w);
                }
            };
            lineality.iter_mut().for_each(project);
            rays.iter_mut().for_each(project);
            rays.push(l0);
        } else {
            let signs: Vec<i128> = rays.iter().map(|r| dot_wide(a, r)).collect();
            let mut next: Vec<Vec<i128>> = rays
                .iter()
                .zip(&signs)
                .filter(|(_, &s)| s >= 0)
                .map(|(r, _)| r.clone())
                .collect();
            let target_rank = dim.saturating_sub(lineality.len() + 2);
            for (p, &sp) in rays.iter().zip(&signs).filter(|(_, &s)| s > 0) {
                for (n, &sn) in rays.iter().zip(&signs).filter(|(_, &s)| s < 0) {
                    let common: Vec<Vec<i128>> = processed
                        .iter()
                        .filter(|c| dot_wide(c, p) == 0 && dot_wide(c, n) == 0)
                        .cloned()
                        .collect();
                    if rank(&common) != target_rank {
                        continue;
                    }
                    let w: Vec<i128> = n.iter().zip(p).map(|(x, y)| sp * x - sn * y).collect();
                    next.push(primitive_wide(&w));
                }
            }
            next.sort();
            next.dedup();
            rays = next;
        }
        processed.push(a.clone());
    }
    rays.sort();
    rays.dedup();
    HalfspaceCone { rays, lineality }
}

// ---------------------------------------------------------------------------
// cones

/// A rational polyhedral cone given by primitive generators in canonical
/// (lexicographic) order. The zero cone has no generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyCone {
    generators: Vec<LatticeVector>,
    ambient_dim: usize,
}

impl PolyCone {
    /// Primitivizes, drops zero vectors and duplicates, and sorts.
    pub fn new(generators: Vec<LatticeVector>, ambient_dim: usize) -> Result<Self> {
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            if g.dim() != ambient_dim {
                return Err(Error::Validation(format!(
                    "generator {g} does not live in dimension {ambient_dim}"
                )));
            }
            if let Some(p) = g.primitive() {
                gens.push(p);
            }
        }
        gens.sort();
        gens.dedup();
        Ok(Self {
            generators: gens,
            ambient_dim,
        })
    }

    pub fn generators(&self) -> &[LatticeVector] {
        &self.generators
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        let rows: Vec<Vec<i128>> = self.generators.iter().map(|g| g.to_wide()).collect();
        rank(&rows)
    }

    /// Membership by the dual inequalities.
    pub fn contains(&self, v: &LatticeVector) -> bool {
        dual_cone(self)
            .generators
            .iter()
            .all(|u| u.dot(v) >= 0)
    }
}

/// Generators of `{u : <u, v> >= 0 for all v in cone}`.
///
/// When the cone is not full-dimensional the dual contains the orthogonal
/// complement of its span; that subspace is returned as `+l` and `-l` for a
/// canonical kernel basis `l`, and the pointed part is projected onto the span.
pub fn dual_cone(cone: &PolyCone) -> PolyCone {
    let d = cone.ambient_dim;
    let constraints: Vec<Vec<i128>> = cone.generators.iter().map(|g| g.to_wide()).collect();
    let hc = double_description(&constraints, d);

    let lineality = if constraints.is_empty() {
        (0..d)
            .map(|i| {
                let mut e = vec![0i128; d];
                e[i] = 1;
                e
            })
            .collect()
    } else {
        let rows: Vec<Vec<Rational>> = constraints
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect())
            .collect();
        RationalMatrix::from_rows(rows).kernel_basis()
    };

    let mut gens: Vec<LatticeVector> = Vec::new();
    for r in &hc.rays {
        let p = project_off(r, &lineality);
        if p.iter().any(|&x| x != 0) {
            gens.push(LatticeVector::from_wide(&p));
        }
    }
    for l in &lineality {
        let lv = LatticeVector::from_wide(l);
        gens.push(lv.neg());
        gens.push(lv);
    }
    PolyCone::new(gens, d).expect("dual generators have the ambient dimension")
}

/// Orthogonal projection onto the complement of `span(basis)`, rescaled to a
/// primitive integer vector.
fn project_off(v: &[i128], basis: &[Vec<i128>]) -> Vec<i128> {
    if basis.is_empty() {
        return primitive_wide(v);
    }
    let k = basis.len();
    // Gram system G c = B v
    let mut gram = RationalMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram.set(i, j, Rational::from_integer(dot_wide(&basis[i], &basis[j])));
        }
    }
    let rhs: Vec<Rational> = basis
        .iter()
        .map(|b| Rational::from_integer(dot_wide(b, v)))
        .collect();
    let coeffs = gram.solve(&rhs).expect("kernel basis is independent");
    let proj: Vec<Rational> = (0..v.len())
        .map(|t| {
            let mut x = Rational::from_integer(v[t]);
            for (c, b) in coeffs.iter().zip(basis) {
                x -= c * Rational::from_integer(b[t]);
            }
            x
        })
        .collect();
    clear_denominators(&proj)
}

/// Minimal generating set of the cone spanned by `generators`.
///
/// A generator survives iff it spans a one-dimensional face, tested by the
/// rank of the facet normals it lies on. Errors if the cone contains a line.
pub fn extremal_rays(generators: &[LatticeVector]) -> Result<Vec<LatticeVector>> {
    let Some(first) = generators.first() else {
        return Err(Error::Validation("extremal_rays needs at least one generator".into()));
    };
    let d = first.dim();
    if generators.iter().any(|g| g.dim() != d) {
        return Err(Error::Validation("generators have mixed dimensions".into()));
    }
    let mut prims: Vec<LatticeVector> = generators.iter().filter_map(|g| g.primitive()).collect();
    prims.sort();
    prims.dedup();
    if prims.is_empty() {
        return Ok(Vec::new());
    }
    let constraints: Vec<Vec<i128>> = prims.iter().map(|g| g.to_wide()).collect();
    let hc = double_description(&constraints, d);

    let mut all = hc.rays.clone();
    all.extend(hc.lineality.iter().cloned());
    if rank(&all) < d {
        return Err(Error::NotStrictlyConvex);
    }

    let mut out = Vec::new();
    for g in &prims {
        let gw = g.to_wide();
        let mut tight: Vec<Vec<i128>> = hc
            .rays
            .iter()
            .filter(|f| dot_wide(f, &gw) == 0)
            .cloned()
            .collect();
        tight.extend(hc.lineality.iter().cloned());
        if rank(&tight) == d - 1 {
            out.push(g.clone());
        }
    }
    Ok(out)
}

/// Non-negative rational coefficients expressing `target` over `gens`, if any.
///
/// Exhaustive Caratheodory search over linearly independent subsets; exact and
/// fine for the handful of generators that show up in curve cones.
pub fn nonneg_combination(target: &LatticeVector, gens: &[LatticeVector]) -> Option<Vec<Rational>> {
    let n = gens.len();
    if target.is_zero() {
        return Some(vec![Rational::zero(); n]);
    }
    let r = rank(&gens.iter().map(|g| g.to_wide()).collect::<Vec<_>>());
    let mut subset = Vec::new();
    search_subsets(target, gens, 0, r, &mut subset)
}

fn search_subsets(
    target: &LatticeVector,
    gens: &[LatticeVector],
    start: usize,
    max: usize,
    chosen: &mut Vec<usize>,
) -> Option<Vec<Rational>> {
    if !chosen.is_empty() {
        if let Some(c) = solve_nonneg(target, gens, chosen) {
            return Some(c);
        }
    }
    if chosen.len() == max {
        return None;
    }
    for i in start..gens.len() {
        chosen.push(i);
        let rows: Vec<Vec<i128>> = chosen.iter().map(|&j| gens[j].to_wide()).collect();
        if rank(&rows) == chosen.len() {
            if let Some(c) = search_subsets(target, gens, i + 1, max, chosen) {
                return Some(c);
            }
        }
        chosen.pop();
    }
    None
}

fn solve_nonneg(target: &LatticeVector, gens: &[LatticeVector], idx: &[usize]) -> Option<Vec<Rational>> {
    // least-squares style: pick rows to make a square nonsingular system,
    // then verify the full equation.
    let k = idx.len();
    let d = target.dim();
    let cols: Vec<&LatticeVector> = idx.iter().map(|&i| &gens[i]).collect();
    let full: Vec<Vec<Rational>> = (0..d)
        .map(|t| cols.iter().map(|c| Rational::from_integer(c.0[t] as i128)).collect())
        .collect();
    let (_, pivots) = RationalMatrix::from_rows(
        (0..k)
            .map(|j| (0..d).map(|t| full[t][j]).collect())
            .collect(),
    )
    .rref();
    if pivots.len() < k {
        return None;
    }
    let square = RationalMatrix::from_rows(pivots.iter().map(|&t| full[t].clone()).collect());
    let rhs: Vec<Rational> = pivots
        .iter()
        .map(|&t| Rational::from_integer(target.0[t] as i128))
        .collect();
    let x = square.solve(&rhs)?;
    if x.iter().any(|c| c.is_negative()) {
        return None;
    }
    for t in 0..d {
        let lhs = full[t].iter().zip(&x).fold(Rational::zero(), |a, (m, c)| a + m * c);
        if lhs != Rational::from_integer(target.0[t] as i128) {
            return None;
        }
    }
    let mut out = vec![Rational::zero(); gens.len()];
    for (&i, c) in idx.iter().zip(x) {
        out[i] = c;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(v: &[i64]) -> LatticeVector {
        LatticeVector(v.to_vec())
    }

    #[test]
    fn unimodular_examples() {
        assert!(is_unimodular(&[lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[0, 0, 1])]).unwrap());
        assert!(!is_unimodular(&[lv(&[1, 0, 0]), lv(&[1, 2, 0]), lv(&[0, 0, 1])]).unwrap());
        assert!(is_unimodular(&[lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[-1, -1, -1])]).unwrap());
        assert!(is_unimodular(&[lv(&[1, 0]), lv(&[0, 1]), lv(&[1, 1])]).is_err());
    }

    #[test]
    fn determinant_cofactor_agrees() {
        let m = vec![vec![2, -1, 3], vec![0, 4, 1], vec![5, 2, -2]];
        // cofactor expansion along the first row: 2·(−10) + 1·(−5) + 3·(−20)
        assert_eq!(determinant(&m), -85);
    }

    #[test]
    fn dual_cone_examples() {
        let octant = PolyCone::new(vec![lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[0, 0, 1])], 3).unwrap();
        assert_eq!(dual_cone(&octant), octant);

        let c = PolyCone::new(vec![lv(&[1, 0]), lv(&[1, 2])], 2).unwrap();
        let expect = PolyCone::new(vec![lv(&[0, 1]), lv(&[2, -1])], 2).unwrap();
        assert_eq!(dual_cone(&c), expect);

        let plane = PolyCone::new(vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])], 2).unwrap();
        assert!(dual_cone(&plane).generators().is_empty());
    }

    #[test]
    fn dual_of_lower_dimensional_cone_has_lineality() {
        let ray = PolyCone::new(vec![lv(&[1, 1, 0])], 3).unwrap();
        let d = dual_cone(&ray);
        // half-space: one pointed direction plus a 2-dim lineality space
        assert_eq!(d.generators().len(), 5);
        assert!(d.generators().iter().all(|u| u.dot(&lv(&[1, 1, 0])) >= 0));
    }

    #[test]
    fn extremal_rays_examples() {
        let r = extremal_rays(&[lv(&[1, 0]), lv(&[0, 1]), lv(&[1, 1])]).unwrap();
        assert_eq!(r, vec![lv(&[0, 1]), lv(&[1, 0])]);
        let r = extremal_rays(&[lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[0, 0, 1]), lv(&[1, 1, 1])]).unwrap();
        assert_eq!(r, vec![lv(&[0, 0, 1]), lv(&[0, 1, 0]), lv(&[1, 0, 0])]);
        assert!(matches!(
            extremal_rays(&[lv(&[1, 0]), lv(&[-1, 0])]),
            Err(Error::NotStrictlyConvex)
        ));
        assert!(extremal_rays(&[]).is_err());
    }

    #[test]
    fn extremal_rays_in_a_proper_subspace() {
        // a 2-dim cone inside R^4
        let g = [lv(&[1, 0, 1, 0]), lv(&[0, 1, 0, 1]), lv(&[1, 1, 1, 1]), lv(&[2, 1, 2, 1])];
        let r = extremal_rays(&g).unwrap();
        assert_eq!(r, vec![lv(&[0, 1, 0, 1]), lv(&[1, 0, 1, 0])]);
    }

    #[test]
    fn smith_form_small() {
        let m = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        assert_eq!(smith_invariant_factors(&m), vec![2, 6, 12]);
        assert_eq!(snf_rank(&[vec![1, 2], vec![2, 4]]), 1);
    }

    #[test]
    fn kernel_and_inverse() {
        let m = RationalMatrix::from_lattice_rows(&[lv(&[1, 1, 1])]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v.iter().sum::<i128>(), 0);
        }
        let inv = unimodular_inverse(&[lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[-1, -1, -1])]).unwrap();
        assert_eq!(inv, vec![vec![1, 0, 0], vec![0, 1, 0], vec![-1, -1, -1]]);
    }

    #[test]
    fn nonneg_combination_basic() {
        let gens = [lv(&[1, 0]), lv(&[0, 1])];
        assert!(nonneg_combination(&lv(&[2, 3]), &gens).is_some());
        assert!(nonneg_combination(&lv(&[-1, 3]), &gens).is_none());
    }
}
