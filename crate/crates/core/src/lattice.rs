//! The E8 lattice in a fixed simple-root basis.
//!
//! Every lattice element is an integer coordinate vector relative to the
//! basis, and every inner product goes through the Gram matrix, so all
//! arithmetic is exact.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat8, Vec8, RANK};

/// Cartan matrix of E8 (Bourbaki numbering: chain 1-3-4-5-6-7-8, node 2
/// attached to node 4).
pub const E8_GRAM: Mat8 = [
    [2, 0, -1, 0, 0, 0, 0, 0],
    [0, 2, 0, -1, 0, 0, 0, 0],
    [-1, 0, 2, -1, 0, 0, 0, 0],
    [0, -1, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, -1],
    [0, 0, 0, 0, 0, 0, -1, 2],
];

/// Cartan matrix of D8 (chain 1-...-6 with nodes 7 and 8 both attached to
/// node 6). Determinant 4.
pub const D8_GRAM: Mat8 = [
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, 0],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, -1],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, 0, 0, 0, -1, 0, 2],
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticeVector(pub Vec8);

impl LatticeVector {
    pub const ZERO: LatticeVector = LatticeVector([0; RANK]);

    pub fn coords(&self) -> &Vec8 {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.map(|x| -x))
    }
}

impl Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: LatticeVector) -> LatticeVector {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        LatticeVector(out)
    }
}

impl Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: LatticeVector) -> LatticeVector {
        self + (-rhs)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// A rank-8 positive-definite integral lattice given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    gram: Mat8,
}

impl Lattice {
    /// The fixed E8 basis used throughout the crate.
    pub fn e8() -> Lattice {
        Lattice { gram: E8_GRAM }
    }

    /// Any symmetric positive-definite integer Gram matrix. Used to feed
    /// deliberately wrong lattices through the pipeline.
    pub fn from_gram(gram: Mat8) -> Result<Lattice> {
        if !linalg::is_symmetric(&gram) {
            return Err(Error::NotSymmetric);
        }
        if !linalg::is_positive_definite(&gram) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Lattice { gram })
    }

    pub fn gram(&self) -> &Mat8 {
        &self.gram
    }

    pub fn determinant(&self) -> i128 {
        linalg::determinant(&self.gram)
    }

    pub fn inner(&self, u: &LatticeVector, v: &LatticeVector) -> i64 {
        linalg::bilinear(&self.gram, &u.0, &v.0)
    }

    pub fn norm(&self, v: &LatticeVector) -> i64 {
        self.inner(v, v)
    }

    /// All vectors of norm 2 or 4, sorted by coordinate tuple.
    pub fn enumerate_shell(&self, norm: i64) -> Result<Vec<LatticeVector>> {
        if norm != 2 && norm != 4 {
            return Err(Error::UnsupportedNorm(norm));
        }
        Ok(linalg::vectors_of_norm(&self.gram, norm).into_iter().map(LatticeVector).collect())
    }

    /// The 240 roots grouped into antipodal pairs. Each representative is the
    /// lexicographically larger sign; ids follow representative order.
    pub fn root_pairs(&self) -> Result<Vec<RootPair>> {
        let mut reps: Vec<LatticeVector> = self
            .enumerate_shell(2)?
            .into_iter()
            .filter(|r| *r > -*r)
            .collect();
        reps.sort_unstable();
        Ok(reps
            .into_iter()
            .enumerate()
            .map(|(id, representative)| RootPair { id, representative })
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootPair {
    pub id: usize,
    pub representative: LatticeVector,
}

fn check_symmetric(gram: &Mat8) -> Result<()> {
    if linalg::is_symmetric(gram) {
        Ok(())
    } else {
        Err(Error::NotSymmetric)
    }
}

fn is_even_positive(gram: &Mat8) -> bool {
    gram.iter().enumerate().all(|(i, row)| row[i] % 2 == 0) && linalg::is_positive_definite(gram)
}

/// True iff `gram` is even, positive definite, unimodular and has exactly
/// 240 vectors of norm 2.
pub fn recognize_even_unimodular_e8(gram: &Mat8) -> Result<bool> {
    check_symmetric(gram)?;
    if !is_even_positive(gram) || linalg::determinant(gram) != 1 {
        return Ok(false);
    }
    Ok(linalg::vectors_of_norm(gram, 2).len() == 240)
}

/// True iff `gram` is even, positive definite, of determinant 4, with
/// exactly 112 vectors of the minimal norm 2.
pub fn recognize_d8(gram: &Mat8) -> Result<bool> {
    check_symmetric(gram)?;
    if !is_even_positive(gram) || linalg::determinant(gram) != 4 {
        return Ok(false);
    }
    Ok(linalg::vectors_of_norm(gram, 2).len() == 112)
}

/// Precomputed shells of a lattice with index lookups. Built once and
/// shared by every later stage.
#[derive(Clone, Debug)]
pub struct Shells {
    pub lattice: Lattice,
    pub roots: Vec<LatticeVector>,
    pub pairs: Vec<RootPair>,
    pub norm4: Vec<LatticeVector>,
    pair_of_root: HashMap<LatticeVector, usize>,
    norm4_index: HashMap<LatticeVector, usize>,
}

impl Shells {
    pub fn new(lattice: Lattice) -> Result<Shells> {
        let roots = lattice.enumerate_shell(2)?;
        let norm4 = lattice.enumerate_shell(4)?;
        let pairs = lattice.root_pairs()?;
        let mut pair_of_root = HashMap::with_capacity(roots.len());
        for p in &pairs {
            pair_of_root.insert(p.representative, p.id);
            pair_of_root.insert(-p.representative, p.id);
        }
        let norm4_index = norm4.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        Ok(Shells { lattice, roots, pairs, norm4, pair_of_root, norm4_index })
    }

    pub fn e8() -> Shells {
        Shells::new(Lattice::e8()).expect("the built-in E8 Gram matrix is valid")
    }

    pub fn pair_of(&self, root: &LatticeVector) -> Option<usize> {
        self.pair_of_root.get(root).copied()
    }

    pub fn norm4_index(&self, v: &LatticeVector) -> Option<usize> {
        self.norm4_index.get(v).copied()
    }

    pub fn representative(&self, pair: usize) -> LatticeVector {
        self.pairs[pair].representative
    }

    /// Whether this looks like E8: the shell sizes every later stage relies on.
    pub fn has_e8_shells(&self) -> bool {
        self.roots.len() == 240 && self.pairs.len() == 120 && self.norm4.len() == 2160
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e8_gram_is_symmetric_even_unimodular() {
        let l = Lattice::e8();
        assert!(linalg::is_symmetric(l.gram()));
        assert!((0..RANK).all(|i| l.gram()[i][i] == 2));
        assert_eq!(l.determinant(), 1);
    }

    #[test]
    fn d8_gram_has_determinant_four() {
        assert_eq!(linalg::determinant(&D8_GRAM), 4);
    }

    #[test]
    fn inner_on_basis_and_zero() {
        let l = Lattice::e8();
        let mut e = [0; RANK];
        e[3] = 1;
        let v = LatticeVector(e);
        assert_eq!(l.norm(&v), 2);
        assert_eq!(l.inner(&v, &LatticeVector::ZERO), 0);
    }

    #[test]
    fn unsupported_norm_is_rejected() {
        let l = Lattice::e8();
        assert!(matches!(l.enumerate_shell(6), Err(Error::UnsupportedNorm(6))));
        assert!(matches!(l.enumerate_shell(3), Err(Error::UnsupportedNorm(3))));
    }

    #[test]
    fn recognizers_on_reference_forms() {
        assert!(recognize_even_unimodular_e8(&E8_GRAM).unwrap());
        assert!(!recognize_even_unimodular_e8(&linalg::identity()).unwrap());
        assert!(!recognize_even_unimodular_e8(&D8_GRAM).unwrap());
        assert!(recognize_d8(&D8_GRAM).unwrap());
        assert!(!recognize_d8(&E8_GRAM).unwrap());
    }

    #[test]
    fn recognizers_reject_asymmetric_input() {
        let mut g = E8_GRAM;
        g[0][1] = 1;
        assert!(matches!(recognize_even_unimodular_e8(&g), Err(Error::NotSymmetric)));
        assert!(matches!(recognize_d8(&g), Err(Error::NotSymmetric)));
    }

    #[test]
    fn root_pair_representatives_are_larger_sign() {
        let l = Lattice::e8();
        let pairs = l.root_pairs().unwrap();
        assert_eq!(pairs.len(), 120);
        for p in &pairs {
            assert!(p.representative > -p.representative);
            assert_eq!(l.inner(&p.representative, &-p.representative), -2);
        }
    }
}
