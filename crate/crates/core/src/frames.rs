//! Coordinate frames from the 3-spaces of spread members.
//!
//! For a 3-space `W` of an isotropic 4-space `V`, `W⊥/W` is a 2-space with
//! three nonzero cosets: `V` itself, a second isotropic coset, and one
//! anisotropic coset `r + W`. The eight classes of `r + W` each hold one
//! root pair, and those eight pairs are mutually orthogonal.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::cert::Certificate;
use crate::error::{Error, Result};
use crate::f2::{F2Geometry, F2Subspace, F2Vector};
use crate::lattice::Shells;
use crate::spread::Spread;

pub const FRAMES_PER_ROW: usize = 15;

/// Eight mutually orthogonal root pairs, as sorted root-pair ids, with the
/// (spread member, 3-space) position it came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    pub roots: [usize; 8],
    pub source: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameArray {
    pub rows: Vec<Vec<Frame>>,
}

impl FrameArray {
    pub fn frames(&self) -> impl Iterator<Item = &Frame> {
        self.rows.iter().flatten()
    }

    /// Position of a frame given its (unsorted) root pairs.
    pub fn index(&self) -> HashMap<[usize; 8], (usize, usize)> {
        self.frames().map(|f| (f.roots, f.source)).collect()
    }

    pub fn get(&self, pos: (usize, usize)) -> &Frame {
        &self.rows[pos.0][pos.1]
    }
}

/// The 15 hyperplanes of a 4-space, sorted.
pub fn three_spaces(v: &F2Subspace) -> Result<Vec<F2Subspace>> {
    if v.dim() != 4 {
        return Err(Error::WrongDimension { expected: 4, actual: v.dim() });
    }
    let rows = v.rows();
    let mut out: Vec<F2Subspace> = (1u8..16)
        .map(|functional| {
            F2Subspace::span((1u8..16).filter(|c| (c & functional).count_ones() % 2 == 0).map(|c| {
                (0..4).filter(|i| c >> i & 1 == 1).fold(F2Vector::ZERO, |acc, i| acc + rows[i])
            }))
        })
        .collect();
    out.sort();
    Ok(out)
}

/// The three nonzero cosets of `W⊥/W`, each as its sorted list of elements.
pub fn perp_cosets(geom: &F2Geometry, w: &F2Subspace) -> Vec<Vec<F2Vector>> {
    let perp = geom.forms.perp(w);
    let wset = w.elements();
    let mut cosets: BTreeMap<F2Vector, Vec<F2Vector>> = BTreeMap::new();
    for x in perp.elements() {
        if w.contains(x) {
            continue;
        }
        let key = wset.iter().map(|&y| x + y).min().expect("nonempty subspace");
        cosets.entry(key).or_default().push(x);
    }
    cosets.into_values().collect()
}

pub fn frame_from_3space(
    geom: &F2Geometry,
    v: &F2Subspace,
    w: &F2Subspace,
    source: (usize, usize),
) -> Result<Frame> {
    const STAGE: &str = "frames";
    if w.dim() != 3 {
        return Err(Error::WrongDimension { expected: 3, actual: w.dim() });
    }
    if !v.contains_subspace(w) {
        return Err(Error::verify(STAGE, format!("{w} is not contained in {v}")));
    }
    let perp = geom.forms.perp(w);
    if perp.dim() != 5 {
        return Err(Error::verify(STAGE, format!("perp of {w} has dimension {}", perp.dim())));
    }
    let cosets = perp_cosets(geom, w);
    let mut anisotropic = Vec::new();
    let mut completes_v = 0;
    for c in &cosets {
        let values: HashSet<bool> = c.iter().map(|x| geom.forms.q(*x)).collect();
        if values.len() != 1 {
            return Err(Error::verify(STAGE, format!("q is not constant on a coset of {w} in its perp")));
        }
        if values.contains(&true) {
            anisotropic.push(c);
        }
        if c.iter().all(|x| v.contains(*x)) {
            completes_v += 1;
        }
    }
    if completes_v != 1 {
        return Err(Error::verify(STAGE, format!("{completes_v} cosets of {w} complete it to {v}")));
    }
    if anisotropic.len() != 1 {
        return Err(Error::verify(
            STAGE,
            format!("{} of the 3 nonzero cosets of {w} are anisotropic, expected exactly 1", anisotropic.len()),
        ));
    }
    let mut roots = [0usize; 8];
    for (slot, x) in roots.iter_mut().zip(anisotropic[0]) {
        *slot = geom
            .pair_over(*x)
            .ok_or_else(|| Error::verify(STAGE, format!("class {x} does not hold exactly one root pair")))?;
    }
    roots.sort_unstable();
    Ok(Frame { roots, source })
}

/// Builds the 9 × 15 array (rows in spread order, frames in `three_spaces`
/// order) and certifies it.
pub fn build_frame_array(spread: &Spread, geom: &F2Geometry, shells: &Shells) -> Result<FrameArray> {
    let mut rows = Vec::with_capacity(spread.spaces.len());
    for (i, v) in spread.spaces.iter().enumerate() {
        let row = three_spaces(v)?
            .iter()
            .enumerate()
            .map(|(j, w)| frame_from_3space(geom, v, w, (i, j)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let arr = FrameArray { rows };
    verify_frame_array(&arr, shells)?;
    Ok(arr)
}

/// All orthogonal pairs `{a, b}` of root pairs, `a < b`.
pub fn orthogonal_pairs(shells: &Shells) -> Vec<(usize, usize)> {
    let n = shells.pairs.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if shells.lattice.inner(&shells.representative(a), &shells.representative(b)) == 0 {
                out.push((a, b));
            }
        }
    }
    out
}

/// Checks the frame array's shape, frame orthogonality, the once-per-row
/// property and the once-overall property for orthogonal pairs.
pub fn verify_frame_array(arr: &FrameArray, shells: &Shells) -> Result<Certificate> {
    const STAGE: &str = "frames";
    let mut cert = Certificate::new(STAGE);
    let fail = |msg: String| Err(Error::verify(STAGE, msg));
    let n_pairs = shells.pairs.len();

    if !cert.check("rows", 9, arr.rows.len()) {
        return fail(format!("expected 9 rows, found {}", arr.rows.len()));
    }
    for (r, row) in arr.rows.iter().enumerate() {
        if row.len() != FRAMES_PER_ROW {
            return fail(format!("row {r} has {} frames, expected {FRAMES_PER_ROW}", row.len()));
        }
        for (c, f) in row.iter().enumerate() {
            if f.roots.iter().any(|&id| id >= n_pairs) {
                return fail(format!("frame ({r}, {c}) names a root pair outside 0..{n_pairs}"));
            }
            for i in 0..8 {
                for j in i + 1..8 {
                    let (a, b) = (shells.representative(f.roots[i]), shells.representative(f.roots[j]));
                    if f.roots[i] == f.roots[j] || shells.lattice.inner(&a, &b) != 0 {
                        return fail(format!(
                            "frame ({r}, {c}): root pairs {} and {} are not orthogonal",
                            f.roots[i], f.roots[j]
                        ));
                    }
                }
            }
        }
    }
    cert.check_true("every frame consists of 8 mutually orthogonal root pairs", true);

    for (r, row) in arr.rows.iter().enumerate() {
        let mut seen = vec![None; n_pairs];
        for (c, f) in row.iter().enumerate() {
            for &id in &f.roots {
                if let Some(prev) = seen[id] {
                    return fail(format!("row {r}: root pair {id} appears in frames {prev} and {c}"));
                }
                seen[id] = Some(c);
            }
        }
        if let Some(id) = seen.iter().position(Option::is_none) {
            return fail(format!("row {r}: root pair {id} does not appear"));
        }
    }
    cert.check("rows in which each root pair appears exactly once", 9, arr.rows.len());

    let mut covered: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for f in arr.frames() {
        for i in 0..8 {
            for j in i + 1..8 {
                if let Some(prev) = covered.insert((f.roots[i], f.roots[j]), f.source) {
                    return fail(format!(
                        "root pairs {} and {} lie together in frames {:?} and {:?}",
                        f.roots[i], f.roots[j], prev, f.source
                    ));
                }
            }
        }
    }
    let orthogonal = orthogonal_pairs(shells);
    if let Some(&(a, b)) = orthogonal.iter().find(|p| !covered.contains_key(p)) {
        return fail(format!("orthogonal root pairs {a} and {b} lie in no frame"));
    }
    cert.check("orthogonal pairs covered exactly once", orthogonal.len(), covered.len());
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCensus {
    /// Orthogonal pairs of root pairs, counted directly from inner products.
    pub orthogonal_pairs: usize,
    /// For each root pair, how many root pairs are orthogonal to it.
    pub orthogonal_per_root: Vec<usize>,
    /// Pairs of root pairs that share a frame of the array.
    pub covered_pairs: usize,
    /// Indexed like `Shells::norm4`: the number of ways the vector arises as
    /// `±a ± b` with `{a, b}` sharing a frame.
    pub norm4_multiplicity: Vec<usize>,
}

pub fn orthogonal_pair_census(arr: &FrameArray, shells: &Shells) -> PairCensus {
    let orthogonal = orthogonal_pairs(shells);
    let mut per_root = vec![0; shells.pairs.len()];
    for &(a, b) in &orthogonal {
        per_root[a] += 1;
        per_root[b] += 1;
    }
    let mut covered = HashSet::new();
    let mut mult = vec![0; shells.norm4.len()];
    for f in arr.frames() {
        for i in 0..8 {
            for j in i + 1..8 {
                covered.insert((f.roots[i], f.roots[j]));
                let (a, b) = (shells.representative(f.roots[i]), shells.representative(f.roots[j]));
                for v in [a + b, a - b, -a + b, -a - b] {
                    if let Some(k) = shells.norm4_index(&v) {
                        mult[k] += 1;
                    }
                }
            }
        }
    }
    PairCensus {
        orthogonal_pairs: orthogonal.len(),
        orthogonal_per_root: per_root,
        covered_pairs: covered.len(),
        norm4_multiplicity: mult,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::SpaceClass;
    use crate::spread::find_spread;

    #[test]
    fn three_spaces_rejects_wrong_dimension() {
        let w = F2Subspace::span([1, 2, 4].map(F2Vector));
        assert!(matches!(three_spaces(&w), Err(Error::WrongDimension { expected: 4, actual: 3 })));
    }

    #[test]
    fn every_point_lies_in_seven_hyperplanes() {
        let v = F2Subspace::span([1, 2, 4, 8].map(F2Vector));
        let ws = three_spaces(&v).unwrap();
        assert_eq!(ws.len(), 15);
        for w in &ws {
            assert_eq!(w.points().len(), 7);
        }
        for p in v.points() {
            assert_eq!(ws.iter().filter(|w| w.contains(p)).count(), 7);
        }
    }

    #[test]
    fn frame_requires_a_contained_three_space() {
        let shells = Shells::e8();
        let geom = F2Geometry::new(&shells).unwrap();
        let s = find_spread(SpaceClass::A, &geom.members(SpaceClass::A)).unwrap();
        let w = three_spaces(&s.spaces[1]).unwrap().remove(0);
        assert!(frame_from_3space(&geom, &s.spaces[0], &w, (0, 0)).is_err());
        let w2 = F2Subspace::span(s.spaces[0].rows()[..2].iter().copied());
        assert!(matches!(
            frame_from_3space(&geom, &s.spaces[0], &w2, (0, 0)),
            Err(Error::WrongDimension { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn swapped_root_breaks_row_property() {
        let shells = Shells::e8();
        let geom = F2Geometry::new(&shells).unwrap();
        let s = find_spread(SpaceClass::A, &geom.members(SpaceClass::A)).unwrap();
        let mut arr = build_frame_array(&s, &geom, &shells).unwrap();
        arr.rows[2].swap(3, 4);
        // order within a row does not matter
        assert!(verify_frame_array(&arr, &shells).is_ok());
        arr.rows[2][3] = arr.rows[1][0].clone();
        assert!(verify_frame_array(&arr, &shells).is_err());
    }
}
