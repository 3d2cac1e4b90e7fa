//! Geometry of E8/2E8: an 8-dimensional GF(2) space with the quadratic form
//! `q(x mod 2) = norm(x)/2 mod 2` and its polar bilinear form.
//!
//! Vectors are bytes (bit `i` is coordinate `i` mod 2). Subspaces are kept in
//! reduced row echelon form so that equal subspaces compare equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeVector, Shells};
use crate::linalg::RANK;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct F2Vector(pub u8);

impl F2Vector {
    pub const ZERO: F2Vector = F2Vector(0);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// The 0/1 lift as a lattice vector.
    pub fn lift(self) -> LatticeVector {
        let mut c = [0; RANK];
        for (i, x) in c.iter_mut().enumerate() {
            *x = i64::from((self.0 >> i) & 1);
        }
        LatticeVector(c)
    }

    pub fn all() -> impl Iterator<Item = F2Vector> {
        (0..=255u8).map(F2Vector)
    }
}

impl std::ops::Add for F2Vector {
    type Output = F2Vector;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: F2Vector) -> F2Vector {
        F2Vector(self.0 ^ rhs.0)
    }
}

impl fmt::Display for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02x}", self.0)
    }
}

pub fn reduce_mod2(v: &LatticeVector) -> F2Vector {
    let mut bits = 0u8;
    for (i, x) in v.0.iter().enumerate() {
        if x.rem_euclid(2) == 1 {
            bits |= 1 << i;
        }
    }
    F2Vector(bits)
}

/// A subset of the 256 vectors of GF(2)^8.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PointSet([u64; 4]);

impl PointSet {
    pub fn insert(&mut self, x: F2Vector) {
        self.0[(x.0 >> 6) as usize] |= 1 << (x.0 & 63);
    }

    pub fn contains(&self, x: F2Vector) -> bool {
        self.0[(x.0 >> 6) as usize] >> (x.0 & 63) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet(std::array::from_fn(|i| self.0[i] & other.0[i]))
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet(std::array::from_fn(|i| self.0[i] | other.0[i]))
    }

    pub fn iter(&self) -> impl Iterator<Item = F2Vector> + '_ {
        F2Vector::all().filter(|x| self.contains(*x))
    }
}

impl FromIterator<F2Vector> for PointSet {
    fn from_iter<I: IntoIterator<Item = F2Vector>>(iter: I) -> PointSet {
        let mut s = PointSet::default();
        for x in iter {
            s.insert(x);
        }
        s
    }
}

/// A subspace of GF(2)^8 in canonical reduced row echelon form: each row's
/// pivot is its lowest set bit, pivots increase down the rows, and pivot
/// columns are clear in every other row.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct F2Subspace {
    rows: Vec<F2Vector>,
}

impl F2Subspace {
    pub fn span<I: IntoIterator<Item = F2Vector>>(vectors: I) -> F2Subspace {
        let mut rows: Vec<u8> = vectors.into_iter().map(|v| v.0).filter(|&v| v != 0).collect();
        let mut out: Vec<u8> = Vec::new();
        for bit in 0..8u8 {
            let mask = 1u8 << bit;
            let Some(p) = rows.iter().position(|r| r & mask != 0) else { continue };
            let pivot = rows.swap_remove(p);
            for r in rows.iter_mut().chain(out.iter_mut()) {
                if *r & mask != 0 {
                    *r ^= pivot;
                }
            }
            out.push(pivot);
            rows.retain(|&r| r != 0);
        }
        F2Subspace { rows: out.into_iter().map(F2Vector).collect() }
    }

    /// Rebuilds from explicit basis rows, rejecting rows that are dependent.
    pub fn from_basis(rows: &[F2Vector]) -> Option<F2Subspace> {
        let s = F2Subspace::span(rows.iter().copied());
        (s.dim() == rows.len()).then_some(s)
    }

    pub fn rows(&self) -> &[F2Vector] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// All `2^dim` elements, zero included, in increasing order.
    pub fn elements(&self) -> Vec<F2Vector> {
        let mut out: Vec<F2Vector> = (0u32..1 << self.dim())
            .map(|mask| {
                self.rows
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .fold(F2Vector::ZERO, |acc, (_, r)| acc + *r)
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Nonzero elements in increasing order.
    pub fn points(&self) -> Vec<F2Vector> {
        self.elements().into_iter().filter(|x| !x.is_zero()).collect()
    }

    /// Element set, zero included.
    pub fn point_set(&self) -> PointSet {
        self.elements().into_iter().collect()
    }

    pub fn contains(&self, x: F2Vector) -> bool {
        self.dim() == F2Subspace::span(self.rows.iter().copied().chain([x])).dim()
    }

    pub fn contains_subspace(&self, other: &F2Subspace) -> bool {
        other.rows.iter().all(|r| self.contains(*r))
    }

    pub fn intersection_dim(&self, other: &F2Subspace) -> usize {
        let n = self.point_set().intersection(&other.point_set()).len();
        n.trailing_zeros() as usize
    }
}

impl fmt::Display for F2Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str(">")
    }
}

/// The mod-2 quadratic form and its polarization, tabulated.
#[derive(Clone, Debug)]
pub struct QuadraticFormTable {
    q: [bool; 256],
    // polar[x] is the vector y -> b(x, y) written as a mask
    polar: [u8; 256],
}

impl QuadraticFormTable {
    pub fn q(&self, x: F2Vector) -> bool {
        self.q[x.0 as usize]
    }

    pub fn b(&self, x: F2Vector, y: F2Vector) -> bool {
        (self.polar[x.0 as usize] & y.0).count_ones() % 2 == 1
    }

    pub fn is_isotropic_point(&self, x: F2Vector) -> bool {
        !x.is_zero() && !self.q(x)
    }

    pub fn isotropic_points(&self) -> Vec<F2Vector> {
        F2Vector::all().filter(|x| self.is_isotropic_point(*x)).collect()
    }

    pub fn anisotropic_points(&self) -> Vec<F2Vector> {
        F2Vector::all().filter(|x| self.q(*x)).collect()
    }

    pub fn is_totally_isotropic(&self, s: &F2Subspace) -> bool {
        s.points().into_iter().all(|x| !self.q(x))
    }

    /// `{x : b(x, s) = 0 for all s in S}`.
    pub fn perp(&self, s: &F2Subspace) -> F2Subspace {
        F2Subspace::span(F2Vector::all().filter(|x| s.rows().iter().all(|r| !self.b(*x, *r))))
    }
}

/// Tabulates `q` and `b` from lifts. Fails on an odd lattice, where
/// `norm/2` is not an integer.
pub fn build_forms(lattice: &Lattice) -> Result<QuadraticFormTable> {
    let g = lattice.gram();
    if (0..RANK).any(|i| g[i][i] % 2 != 0) {
        return Err(Error::NotEven);
    }
    let mut q = [false; 256];
    let mut polar = [0u8; 256];
    for x in F2Vector::all() {
        let lx = x.lift();
        q[x.0 as usize] = (lattice.norm(&lx) / 2).rem_euclid(2) == 1;
        let mut mask = 0u8;
        for i in 0..RANK {
            let mut e = [0; RANK];
            e[i] = 1;
            if lattice.inner(&lx, &LatticeVector(e)).rem_euclid(2) == 1 {
                mask |= 1 << i;
            }
        }
        polar[x.0 as usize] = mask;
    }
    Ok(QuadraticFormTable { q, polar })
}

/// All totally isotropic 4-spaces, sorted, each once.
///
/// Grows isotropic flags one point at a time; each new point must be
/// isotropic, orthogonal to the partial span and outside it.
pub fn enumerate_isotropic_4spaces(forms: &QuadraticFormTable) -> Vec<F2Subspace> {
    let points = forms.isotropic_points();
    let mut found = BTreeSet::new();
    let mut basis = Vec::with_capacity(4);
    grow_flag(forms, &points, 0, &mut basis, &mut found);
    found.into_iter().collect()
}

fn grow_flag(
    forms: &QuadraticFormTable,
    points: &[F2Vector],
    start: usize,
    basis: &mut Vec<F2Vector>,
    found: &mut BTreeSet<F2Subspace>,
) {
    if basis.len() == 4 {
        found.insert(F2Subspace::span(basis.iter().copied()));
        return;
    }
    let current = F2Subspace::span(basis.iter().copied());
    for (i, &p) in points.iter().enumerate().skip(start) {
        if basis.iter().any(|&r| forms.b(p, r)) || current.contains(p) {
            continue;
        }
        basis.push(p);
        grow_flag(forms, points, i + 1, basis, found);
        basis.pop();
    }
}

/// The two families of totally isotropic 4-spaces. `A` is the family that
/// contains the lexicographically first space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SpaceClass {
    A,
    B,
}

impl SpaceClass {
    pub fn other(self) -> SpaceClass {
        match self {
            SpaceClass::A => SpaceClass::B,
            SpaceClass::B => SpaceClass::A,
        }
    }
}

impl fmt::Display for SpaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceClass::A => "A",
            SpaceClass::B => "B",
        })
    }
}

impl std::str::FromStr for SpaceClass {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<SpaceClass, String> {
        match s {
            "A" | "a" => Ok(SpaceClass::A),
            "B" | "b" => Ok(SpaceClass::B),
            _ => Err(format!("unknown class {s:?}, expected A or B")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    class_of: BTreeMap<F2Subspace, SpaceClass>,
}

impl Classification {
    pub fn class_of(&self, s: &F2Subspace) -> Option<SpaceClass> {
        self.class_of.get(s).copied()
    }

    /// Members of one class in sorted order.
    pub fn members(&self, class: SpaceClass) -> Vec<F2Subspace> {
        self.class_of.iter().filter(|(_, c)| **c == class).map(|(s, _)| s.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }
}

/// Splits 4-spaces into two classes by the parity of intersection
/// dimension, and checks that parity really is an equivalence with at most
/// two classes on this input.
pub fn classify(spaces: &[F2Subspace]) -> Result<Classification> {
    let mut sorted: Vec<&F2Subspace> = spaces.iter().collect();
    sorted.sort();
    sorted.dedup();
    let Some(first) = sorted.first() else {
        return Ok(Classification { class_of: BTreeMap::new() });
    };
    let sets: Vec<PointSet> = sorted.iter().map(|s| s.point_set()).collect();
    let even = |i: usize, j: usize| sets[i].intersection(&sets[j]).len().trailing_zeros().is_multiple_of(2);
    let labels: Vec<SpaceClass> = (0..sorted.len())
        .map(|i| if even(0, i) { SpaceClass::A } else { SpaceClass::B })
        .collect();
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            if even(i, j) != (labels[i] == labels[j]) {
                return Err(Error::NotEquivalence(format!(
                    "{} and {} meet in dimension {} but {} is {} relative to {}",
                    sorted[i],
                    sorted[j],
                    sorted[i].intersection_dim(sorted[j]),
                    sorted[i],
                    labels[i],
                    first
                )));
            }
        }
    }
    Ok(Classification {
        class_of: sorted.into_iter().cloned().zip(labels).collect(),
    })
}

/// Histogram of `dim(v1 ∩ u)` over `members`, skipping `v1` itself.
pub fn intersection_profile(v1: &F2Subspace, members: &[F2Subspace]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for u in members.iter().filter(|u| *u != v1) {
        *h.entry(v1.intersection_dim(u)).or_default() += 1;
    }
    h
}

/// Histogram of `(dim(v1 ∩ u), dim(v2 ∩ u))` over `others`, skipping `v1`
/// and `v2`.
pub fn double_profile(
    v1: &F2Subspace,
    v2: &F2Subspace,
    others: &[F2Subspace],
) -> Result<BTreeMap<(usize, usize), usize>> {
    if v1.intersection_dim(v2) != 0 {
        return Err(Error::NotDisjoint(format!(
            "{v1} and {v2} meet in dimension {}",
            v1.intersection_dim(v2)
        )));
    }
    let mut h = BTreeMap::new();
    for u in others.iter().filter(|u| *u != v1 && *u != v2) {
        *h.entry((v1.intersection_dim(u), v2.intersection_dim(u))).or_default() += 1;
    }
    Ok(h)
}

/// The forms plus everything derived from them that later stages look up:
/// the 270 isotropic 4-spaces, their classes, and the lattice vectors lying
/// over each residue class.
#[derive(Clone, Debug)]
pub struct F2Geometry {
    pub forms: QuadraticFormTable,
    pub spaces: Vec<F2Subspace>,
    pub classes: Classification,
    roots_over: Vec<Vec<usize>>,
    norm4_over: Vec<Vec<usize>>,
    pair_over: [Option<usize>; 256],
}

impl F2Geometry {
    pub fn new(shells: &Shells) -> Result<F2Geometry> {
        let forms = build_forms(&shells.lattice)?;
        let spaces = enumerate_isotropic_4spaces(&forms);
        let classes = classify(&spaces)?;
        let mut roots_over = vec![Vec::new(); 256];
        for (i, r) in shells.roots.iter().enumerate() {
            roots_over[reduce_mod2(r).0 as usize].push(i);
        }
        let mut norm4_over = vec![Vec::new(); 256];
        for (i, v) in shells.norm4.iter().enumerate() {
            norm4_over[reduce_mod2(v).0 as usize].push(i);
        }
        let mut pair_over = [None; 256];
        for (x, roots) in roots_over.iter().enumerate() {
            let pairs: BTreeSet<usize> = roots.iter().filter_map(|&i| shells.pair_of(&shells.roots[i])).collect();
            if pairs.len() == 1 && roots.len() == 2 {
                pair_over[x] = pairs.into_iter().next();
            }
        }
        Ok(F2Geometry { forms, spaces, classes, roots_over, norm4_over, pair_over })
    }

    /// Indices into `Shells::roots` of the roots reducing to `x`.
    pub fn roots_over(&self, x: F2Vector) -> &[usize] {
        &self.roots_over[x.0 as usize]
    }

    /// Indices into `Shells::norm4` of the norm-4 vectors reducing to `x`.
    pub fn norm4_over(&self, x: F2Vector) -> &[usize] {
        &self.norm4_over[x.0 as usize]
    }

    /// The root pair lying over an anisotropic class, when the class holds
    /// exactly one antipodal pair.
    pub fn pair_over(&self, x: F2Vector) -> Option<usize> {
        self.pair_over[x.0 as usize]
    }

    pub fn members(&self, class: SpaceClass) -> Vec<F2Subspace> {
        self.classes.members(class)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forms() -> QuadraticFormTable {
        build_forms(&Lattice::e8()).unwrap()
    }

    #[test]
    fn span_is_canonical() {
        let a = F2Subspace::span([F2Vector(0b011), F2Vector(0b110)]);
        let b = F2Subspace::span([F2Vector(0b101), F2Vector(0b011), F2Vector(0b110)]);
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
        assert_eq!(a.rows(), &[F2Vector(0b101), F2Vector(0b110)]);
    }

    #[test]
    fn reduce_mod2_handles_negatives() {
        let v = LatticeVector([-1, 2, -3, 0, 0, 0, 0, 1]);
        assert_eq!(reduce_mod2(&v), F2Vector(0b1000_0101));
        assert_eq!(reduce_mod2(&LatticeVector::ZERO), F2Vector::ZERO);
    }

    #[test]
    fn polarization_identity_everywhere() {
        let f = forms();
        for x in F2Vector::all() {
            for y in F2Vector::all() {
                assert_eq!(f.q(x + y), f.q(x) ^ f.q(y) ^ f.b(x, y));
            }
        }
    }

    #[test]
    fn point_counts_of_plus_type_form() {
        let f = forms();
        assert_eq!(f.isotropic_points().len(), 135);
        assert_eq!(f.anisotropic_points().len(), 120);
    }

    #[test]
    fn perp_of_a_three_space_has_dimension_five() {
        let f = forms();
        let v = &enumerate_isotropic_4spaces(&f)[0];
        let w = F2Subspace::span(v.rows()[..3].iter().copied());
        let p = f.perp(&w);
        assert_eq!(p.dim(), 5);
        assert!(p.contains_subspace(v));
    }

    #[test]
    fn odd_lattice_has_no_quadratic_form() {
        let l = Lattice::from_gram(crate::linalg::identity()).unwrap();
        assert!(matches!(build_forms(&l), Err(Error::NotEven)));
    }

    #[test]
    fn classify_rejects_three_way_mix() {
        // three 4-spaces pairwise meeting in odd dimension cannot be split
        // into two parity classes
        let v1 = F2Subspace::span([1, 2, 4, 8].map(F2Vector));
        let v2 = F2Subspace::span([1, 2, 4, 16].map(F2Vector));
        let v3 = F2Subspace::span([1, 2, 4, 32].map(F2Vector));
        let err = classify(&[v1, v2, v3]).unwrap_err();
        assert!(matches!(err, Error::NotEquivalence(_)));
    }

    #[test]
    fn double_profile_requires_disjoint_pair() {
        let v1 = F2Subspace::span([1, 2, 4, 8].map(F2Vector));
        let v2 = F2Subspace::span([1, 2, 16, 32].map(F2Vector));
        assert!(matches!(double_profile(&v1, &v2, &[]), Err(Error::NotDisjoint(_))));
    }
}
