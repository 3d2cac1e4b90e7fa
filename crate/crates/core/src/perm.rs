//! Permutations and stabilizer chains.
//!
//! Points are `u16`, which is plenty for the 2160 norm-4 vectors. The chain
//! is built with the deterministic Schreier–Sims algorithm: every Schreier
//! generator at every level is sifted, so the resulting base and strong
//! generating set is exact and the order is the product of the basic orbit
//! lengths.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Perm(Vec<u16>);

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm((0..degree as u16).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        if n > u16::MAX as usize {
            return Err(Error::NotPermutation(format!("degree {n} is too large")));
        }
        let mut seen = vec![false; n];
        for (i, &x) in images.iter().enumerate() {
            if x >= n {
                return Err(Error::NotPermutation(format!("image of {i} is {x}, outside 0..{n}")));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::NotPermutation(format!("{x} is the image of two points")));
            }
        }
        Ok(Perm(images.into_iter().map(|x| x as u16).collect()))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&x| x as usize)
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u16; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u16;
        }
        Perm(inv)
    }

    pub fn pow(&self, mut e: u64) -> Perm {
        let mut base = self.clone();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// Cycle lengths, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable();
        out
    }

    pub fn is_even(&self) -> bool {
        self.cycle_type().iter().map(|l| l - 1).sum::<usize>() % 2 == 0
    }

    pub fn order(&self) -> u64 {
        self.cycle_type().into_iter().fold(1u64, |acc, l| num_integer::lcm(acc, l as u64))
    }

    pub fn first_moved(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(i, &x)| *i != x as usize).map(|(i, _)| i)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

/// Orbit of `point` under the group generated by `gens`, in discovery order.
pub fn orbit(gens: &[Perm], point: usize, degree: usize) -> Vec<usize> {
    let mut seen = vec![false; degree];
    let mut out = vec![point];
    seen[point] = true;
    let mut i = 0;
    while i < out.len() {
        let p = out[i];
        for g in gens {
            let q = g.apply(p);
            if !seen[q] {
                seen[q] = true;
                out.push(q);
            }
        }
        i += 1;
    }
    out
}

const NOT_IN_ORBIT: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Level {
    base: usize,
    /// Indices into `StabChain::gens` forming `S^(i)`.
    gens: Vec<usize>,
    orbit: Vec<usize>,
    /// Position of each point in `orbit`.
    pos: Vec<u32>,
    /// `inv[k]` maps `orbit[k]` back to the base point.
    inv: Vec<Perm>,
    /// For each local generator, how many orbit points have had their
    /// Schreier generator sifted.
    checked: Vec<usize>,
}

impl Level {
    fn new(base: usize, degree: usize) -> Level {
        let mut pos = vec![NOT_IN_ORBIT; degree];
        pos[base] = 0;
        Level { base, gens: Vec::new(), orbit: vec![base], pos, inv: vec![Perm::identity(degree)], checked: Vec::new() }
    }

    fn close_orbit(&mut self, pool: &[Perm]) {
        let mut i = 0;
        while i < self.orbit.len() {
            let p = self.orbit[i];
            for &g in &self.gens {
                let q = pool[g].apply(p);
                if self.pos[q] == NOT_IN_ORBIT {
                    // u_q = u_p * g, so u_q^-1 = g^-1 * u_p^-1
                    let inv_q = pool[g].inverse().then(&self.inv[i]);
                    self.pos[q] = self.orbit.len() as u32;
                    self.orbit.push(q);
                    self.inv.push(inv_q);
                }
            }
            i += 1;
        }
    }

    fn transversal(&self, k: usize) -> Perm {
        self.inv[k].inverse()
    }
}

/// A base and strong generating set.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    gens: Vec<Perm>,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn trivial(degree: usize) -> StabChain {
        StabChain { degree, gens: Vec::new(), levels: Vec::new() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.gens
    }

    /// Sifts `g` through levels `from..`; returns the residue and the level
    /// at which sifting stopped (`levels.len()` if it passed every level).
    fn strip_from(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(from) {
            let p = g.apply(level.base);
            let k = level.pos[p];
            if k == NOT_IN_ORBIT {
                return (g, i);
            }
            g = g.then(&level.inv[k as usize]);
        }
        (g, self.levels.len())
    }

    pub fn sift(&self, g: &Perm) -> (Perm, usize) {
        self.strip_from(g.clone(), 0)
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (h, j) = self.sift(g);
        j == self.levels.len() && h.is_identity()
    }

    fn push_level_for(&mut self, h: &Perm) {
        let base = h.first_moved().expect("non-identity residue");
        self.levels.push(Level::new(base, self.degree));
    }

    /// Adds `g` to the generating set and restores the chain. Returns false
    /// (and leaves the chain alone) if `g` was already a member.
    pub fn add_generator(&mut self, g: Perm) -> Result<bool> {
        if g.degree() != self.degree {
            return Err(Error::NotPermutation(format!(
                "degree {} does not match the chain's degree {}",
                g.degree(),
                self.degree
            )));
        }
        if self.contains(&g) {
            return Ok(false);
        }
        // g lies in S^(l) for every l whose earlier base points it fixes
        let mut deepest = 0;
        while deepest < self.levels.len() && g.apply(self.levels[deepest].base) == self.levels[deepest].base {
            deepest += 1;
        }
        if deepest == self.levels.len() {
            self.push_level_for(&g);
        }
        let idx = self.gens.len();
        self.gens.push(g);
        for l in 0..=deepest {
            self.levels[l].gens.push(idx);
            self.levels[l].checked.push(0);
        }
        self.complete(deepest);
        Ok(true)
    }

    fn complete(&mut self, start: usize) {
        let mut i = start as isize;
        'outer: while i >= 0 {
            let li = i as usize;
            self.levels[li].close_orbit(&self.gens);
            let n_gens = self.levels[li].gens.len();
            for gi in 0..n_gens {
                while self.levels[li].checked[gi] < self.levels[li].orbit.len() {
                    let k = self.levels[li].checked[gi];
                    self.levels[li].checked[gi] += 1;
                    let level = &self.levels[li];
                    let s = &self.gens[level.gens[gi]];
                    let q = s.apply(level.orbit[k]);
                    let t = level.transversal(k).then(s).then(&level.inv[level.pos[q] as usize]);
                    let (h, j) = self.strip_from(t, li + 1);
                    if j < self.levels.len() || !h.is_identity() {
                        if j == self.levels.len() {
                            self.push_level_for(&h);
                        }
                        let idx = self.gens.len();
                        self.gens.push(h);
                        for l in li + 1..=j {
                            self.levels[l].gens.push(idx);
                            self.levels[l].checked.push(0);
                        }
                        i = j as isize;
                        continue 'outer;
                    }
                }
            }
            i -= 1;
        }
    }
}

/// Builds a stabilizer chain for the group generated by `gens`, all of
/// which must have degree `degree`.
pub fn schreier_sims(gens: &[Perm], degree: usize) -> Result<StabChain> {
    let mut chain = StabChain::trivial(degree);
    for g in gens {
        chain.add_generator(g.clone())?;
    }
    Ok(chain)
}

/// Same as [`schreier_sims`] but from raw image lists, validating each.
pub fn schreier_sims_from_images(gens: &[Vec<usize>], degree: usize) -> Result<StabChain> {
    let perms = gens.iter().cloned().map(Perm::from_images).collect::<Result<Vec<_>>>()?;
    schreier_sims(&perms, degree)
}
