//! Blocks of norm-4 vectors, one per frame-array row, and their
//! certification as half-scale copies of E8.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::cert::Certificate;
use crate::error::{Error, Result};
use crate::f2::{reduce_mod2, F2Geometry, F2Subspace, F2Vector};
use crate::frames::{Frame, FrameArray};
use crate::lattice::{self, Lattice, LatticeVector, Shells};
use crate::linalg::{self, Mat8, Vec8, RANK};
use crate::spread::Spread;

pub const BLOCK_SIZE: usize = 240;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Norm4Block {
    pub row_index: usize,
    /// Sorted.
    pub vectors: Vec<LatticeVector>,
    /// Hermite basis of the lattice the vectors generate.
    pub basis: Vec<Vec8>,
    /// Gram matrix of `basis` under half the E8 inner product.
    pub half_gram: Mat8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Norm4Partition {
    pub blocks: Vec<Norm4Block>,
}

impl Norm4Partition {
    /// Block number of each norm-4 vector, indexed like `Shells::norm4`.
    pub fn block_of(&self, shells: &Shells) -> Vec<Option<usize>> {
        let mut out = vec![None; shells.norm4.len()];
        for (b, block) in self.blocks.iter().enumerate() {
            for v in &block.vectors {
                if let Some(i) = shells.norm4_index(v) {
                    out[i] = Some(b);
                }
            }
        }
        out
    }
}

/// `inner(u, v) / 2`, failing if the inner product is odd.
pub fn half_inner(lattice: &Lattice, u: &LatticeVector, v: &LatticeVector) -> Result<i64> {
    let x = lattice.inner(u, v);
    if x % 2 != 0 {
        return Err(Error::verify("norm4", format!("inner product of {u} and {v} is odd ({x})")));
    }
    Ok(x / 2)
}

fn half_gram_of(lattice: &Lattice, basis: &[Vec8]) -> Result<Mat8> {
    let full = linalg::gram_of(basis, lattice.gram());
    let mut out = [[0; RANK]; RANK];
    for i in 0..RANK {
        for j in 0..RANK {
            if full[i][j] % 2 != 0 {
                return Err(Error::verify("norm4", format!("basis inner product ({i}, {j}) is odd")));
            }
            out[i][j] = full[i][j] / 2;
        }
    }
    Ok(out)
}

/// Basis of the lattice spanned by `vectors`: greedily pick vectors that
/// raise the rank, then fold in any vector the current basis misses.
pub fn generated_basis(vectors: &[LatticeVector]) -> Vec<Vec8> {
    let mut basis: Vec<Vec8> = Vec::with_capacity(RANK);
    for v in vectors {
        if basis.len() == RANK {
            break;
        }
        basis.push(v.0);
        if linalg::rank(&basis) < basis.len() {
            basis.pop();
        }
    }
    if basis.len() < RANK {
        return linalg::hermite_basis(&basis);
    }
    for v in vectors {
        if linalg::lattice_coefficients(&basis, &v.0).is_none() {
            basis.push(v.0);
            basis = linalg::hermite_basis(&basis);
        }
    }
    linalg::hermite_basis(&basis)
}

impl Norm4Block {
    pub fn from_vectors(row_index: usize, mut vectors: Vec<LatticeVector>, lattice: &Lattice) -> Result<Norm4Block> {
        vectors.sort_unstable();
        vectors.dedup();
        let basis = generated_basis(&vectors);
        if basis.len() != RANK {
            return Err(Error::verify("norm4", format!("block {row_index} spans rank {} only", basis.len())));
        }
        let half_gram = half_gram_of(lattice, &basis)?;
        Ok(Norm4Block { row_index, vectors, basis, half_gram })
    }

    pub fn contains(&self, v: &LatticeVector) -> bool {
        self.vectors.binary_search(v).is_ok()
    }
}

/// `{±a ± b}` over distinct members `a, b` of a frame.
pub fn frame_vectors(frame: &Frame, shells: &Shells) -> Vec<LatticeVector> {
    let reps: Vec<LatticeVector> = frame.roots.iter().map(|&id| shells.representative(id)).collect();
    let mut out = Vec::with_capacity(112);
    for i in 0..8 {
        for j in i + 1..8 {
            let (a, b) = (reps[i], reps[j]);
            out.extend([a + b, a - b, -a + b, -a - b]);
        }
    }
    out
}

pub fn row_to_block(row_index: usize, row: &[Frame], shells: &Shells) -> Result<Norm4Block> {
    let set: BTreeSet<LatticeVector> = row.iter().flat_map(|f| frame_vectors(f, shells)).collect();
    if set.len() != BLOCK_SIZE {
        return Err(Error::verify(
            "norm4",
            format!("row {row_index} yields {} norm-4 vectors, expected {BLOCK_SIZE}", set.len()),
        ));
    }
    Norm4Block::from_vectors(row_index, set.into_iter().collect(), &shells.lattice)
}

/// Certifies that a block, under half the inner product, is a copy of E8
/// generated by its 240 vectors of (halved) norm 2.
pub fn certify_scaled_e8(b: &Norm4Block, lattice: &Lattice) -> Result<Certificate> {
    let stage = "scaled-e8";
    let mut cert = Certificate::new(format!("{stage} block {}", b.row_index));
    let fail = |msg: String| Err(Error::verify(stage, format!("block {}: {msg}", b.row_index)));

    if !cert.check("block size", BLOCK_SIZE, b.vectors.len()) {
        return fail(format!("{} vectors, expected {BLOCK_SIZE}", b.vectors.len()));
    }
    for v in &b.vectors {
        if half_inner(lattice, v, v)? != 2 {
            return fail(format!("{v} has norm {}, expected 4", lattice.norm(v)));
        }
        if !b.contains(&-*v) {
            return fail(format!("{v} is present but its negative is not"));
        }
    }
    cert.check_true("all halved norms equal 2 and the block is closed under negation", true);
    for (i, u) in b.vectors.iter().enumerate() {
        for v in &b.vectors[i + 1..] {
            if lattice.inner(u, v) % 2 != 0 {
                return fail(format!("{u} and {v} have odd inner product"));
            }
        }
    }
    cert.check_true("pairwise halved inner products are integers", true);
    let recomputed = half_gram_of(lattice, &b.basis)?;
    if recomputed != b.half_gram {
        return fail("stored half-scale Gram does not match its basis".into());
    }
    cert.check("halved Gram determinant", 1, linalg::determinant(&b.half_gram));
    if !cert.check_true("halved Gram is even unimodular with 240 roots", lattice::recognize_even_unimodular_e8(&b.half_gram)?) {
        return fail("half-scale Gram is not recognized as E8".into());
    }
    if let Some(v) = b.vectors.iter().find(|v| linalg::lattice_coefficients(&b.basis, &v.0).is_none()) {
        return fail(format!("{v} is not in the lattice spanned by the basis"));
    }
    let spanned = linalg::hermite_basis(&b.vectors.iter().map(|v| v.0).collect::<Vec<_>>());
    if b.basis.iter().any(|row| linalg::lattice_coefficients(&spanned, row).is_none()) {
        return fail("basis row lies outside the lattice generated by the block".into());
    }
    cert.check_true("basis and block generate the same lattice", true);
    if !cert.passed() {
        let c = cert.first_failure().expect("failed check").description.clone();
        return fail(c);
    }
    Ok(cert)
}

/// Certifies the D8-plus-glue picture for one frame of a block's row: the
/// frame's roots are orthonormal at half scale, its 112 vectors span a D8,
/// and each of the other 128 block vectors is a glue vector that completes
/// the D8 to an E8.
pub fn certify_d8_glue(b: &Norm4Block, f: &Frame, shells: &Shells) -> Result<Certificate> {
    let stage = "d8-glue";
    let lattice = &shells.lattice;
    let mut cert = Certificate::new(format!("{stage} block {} frame {:?}", b.row_index, f.source));
    let fail = |msg: String| Err(Error::verify(stage, format!("block {} frame {:?}: {msg}", b.row_index, f.source)));

    let reps: Vec<LatticeVector> = f.roots.iter().map(|&id| shells.representative(id)).collect();
    for i in 0..8 {
        for j in 0..8 {
            let expect = if i == j { 2 } else { 0 };
            if lattice.inner(&reps[i], &reps[j]) != expect {
                return fail(format!("roots {} and {} are not orthonormal at half scale", f.roots[i], f.roots[j]));
            }
        }
    }
    cert.check_true("frame roots are orthonormal under the halved inner product", true);

    let fv = frame_vectors(f, shells);
    if let Some(v) = fv.iter().find(|v| !b.contains(v)) {
        return fail(format!("frame vector {v} is not in the block"));
    }
    let d8: Vec<Vec8> = linalg::hermite_basis(&fv.iter().map(|v| v.0).collect::<Vec<_>>());
    if d8.len() != RANK {
        return fail(format!("frame vectors span rank {}", d8.len()));
    }
    let d8_gram = half_gram_of(lattice, &d8)?;
    if !cert.check_true("frame vectors generate D8", lattice::recognize_d8(&d8_gram)?) {
        return fail("the 112 frame vectors do not generate a D8".into());
    }

    let fset: BTreeSet<LatticeVector> = fv.into_iter().collect();
    let glue: Vec<&LatticeVector> = b.vectors.iter().filter(|v| !fset.contains(v)).collect();
    if !cert.check("vectors outside the frame", 128, glue.len()) {
        return fail(format!("{} vectors outside the frame, expected 128", glue.len()));
    }
    let mut recognized: HashMap<Vec<Vec8>, bool> = HashMap::new();
    for v in glue {
        if half_inner(lattice, v, v)? != 2 {
            return fail(format!("glue vector {v} does not have halved norm 2"));
        }
        if linalg::lattice_coefficients(&d8, &v.0).is_some() {
            return fail(format!("glue vector {v} already lies in the D8"));
        }
        let mut gens = d8.clone();
        gens.push(v.0);
        let extended = linalg::hermite_basis(&gens);
        let ok = match recognized.get(&extended) {
            Some(&ok) => ok,
            None => {
                let ok = lattice::recognize_even_unimodular_e8(&half_gram_of(lattice, &extended)?)?;
                recognized.insert(extended, ok);
                ok
            }
        };
        if !ok {
            return fail(format!("adjoining {v} to the D8 does not give E8"));
        }
    }
    cert.check_true("each glue vector lies outside D8 and extends it to E8", true);
    Ok(cert)
}

pub fn build_partition(arr: &FrameArray, shells: &Shells) -> Result<Norm4Partition> {
    let blocks = arr
        .rows
        .par_iter()
        .enumerate()
        .map(|(i, row)| row_to_block(i, row, shells))
        .collect::<Result<Vec<_>>>()?;
    let p = Norm4Partition { blocks };
    verify_partition(&p, shells)?;
    Ok(p)
}

/// Checks that the blocks partition the norm-4 shell into nine pieces of 240.
pub fn verify_partition(p: &Norm4Partition, shells: &Shells) -> Result<Certificate> {
    const STAGE: &str = "partition";
    let mut cert = Certificate::new(STAGE);
    let fail = |msg: String| Err(Error::verify(STAGE, msg));
    if !cert.check("blocks", 9, p.blocks.len()) {
        return fail(format!("expected 9 blocks, found {}", p.blocks.len()));
    }
    let mut owner: Vec<Option<usize>> = vec![None; shells.norm4.len()];
    for (b, block) in p.blocks.iter().enumerate() {
        if block.vectors.len() != BLOCK_SIZE {
            return fail(format!("block {b} has {} vectors, expected {BLOCK_SIZE}", block.vectors.len()));
        }
        for v in &block.vectors {
            let Some(i) = shells.norm4_index(v) else {
                return fail(format!("block {b}: {v} is not a norm-4 vector"));
            };
            if let Some(prev) = owner[i] {
                return fail(format!("{v} lies in blocks {prev} and {b}"));
            }
            owner[i] = Some(b);
        }
    }
    if let Some(i) = owner.iter().position(Option::is_none) {
        return fail(format!("{} lies in no block", shells.norm4[i]));
    }
    cert.check("norm-4 vectors covered exactly once", shells.norm4.len(), owner.len());
    for (b, block) in p.blocks.iter().enumerate() {
        if let Some(v) = block.vectors.iter().find(|v| !block.contains(&-**v)) {
            return fail(format!("block {b} contains {v} but not its negative"));
        }
    }
    cert.check_true("every block is closed under negation", true);
    Ok(cert)
}

/// Per-block certification of every claim about the half-scale copies:
/// E8 recognition for each block and D8-plus-glue for all its frames.
pub fn certify_blocks(p: &Norm4Partition, arr: &FrameArray, shells: &Shells) -> Result<Certificate> {
    let mut cert = Certificate::new("blocks");
    let e8: Vec<Certificate> = p
        .blocks
        .par_iter()
        .map(|b| certify_scaled_e8(b, &shells.lattice))
        .collect::<Result<_>>()?;
    cert.check("blocks recognized as half-scale E8", p.blocks.len(), e8.len());
    let pairs: Vec<(usize, &Frame)> = arr
        .rows
        .iter()
        .enumerate()
        .flat_map(|(r, row)| row.iter().map(move |f| (r, f)))
        .collect();
    let glue: Vec<Certificate> = pairs
        .par_iter()
        .map(|(r, f)| certify_d8_glue(&p.blocks[*r], f, shells))
        .collect::<Result<_>>()?;
    cert.check("(block, frame) pairs with D8 plus glue certified", 135, glue.len());
    Ok(cert)
}

/// Reduces each block mod 2 and rebuilds the spread from the images.
pub fn spread_from_partition(p: &Norm4Partition, geom: &F2Geometry) -> Result<Spread> {
    const STAGE: &str = "round-trip";
    let mut spaces = Vec::with_capacity(p.blocks.len());
    for (b, block) in p.blocks.iter().enumerate() {
        let hits = class_hits(block);
        if hits.len() > 15 {
            return Err(Error::verify(STAGE, format!("block {b} projects onto {} classes, more than 15", hits.len())));
        }
        if let Some(x) = hits.keys().find(|x| !geom.forms.is_isotropic_point(**x)) {
            return Err(Error::verify(STAGE, format!("block {b} projects onto non-isotropic class {x}")));
        }
        let space = F2Subspace::span(hits.keys().copied());
        let points = space.points();
        if space.dim() != 4 || points != hits.keys().copied().collect::<Vec<_>>() {
            return Err(Error::verify(STAGE, format!("classes of block {b} do not form a 4-space")));
        }
        if !geom.forms.is_totally_isotropic(&space) {
            return Err(Error::verify(STAGE, format!("span of block {b} is not totally isotropic")));
        }
        spaces.push(space);
    }
    let class = spaces
        .first()
        .and_then(|s| geom.classes.class_of(s))
        .ok_or_else(|| Error::verify(STAGE, "recovered spaces are not classified"))?;
    Ok(Spread { spaces, class })
}

/// How often each block hits each of its mod-2 classes.
pub fn class_hits(block: &Norm4Block) -> BTreeMap<F2Vector, usize> {
    let mut hits = BTreeMap::new();
    for v in &block.vectors {
        *hits.entry(reduce_mod2(v)).or_default() += 1;
    }
    hits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::{F2Geometry, SpaceClass};
    use crate::frames::build_frame_array;
    use crate::spread::find_spread;

    fn setup() -> (Shells, F2Geometry, Spread, FrameArray) {
        let shells = Shells::e8();
        let geom = F2Geometry::new(&shells).unwrap();
        let s = find_spread(SpaceClass::A, &geom.members(SpaceClass::A)).unwrap();
        let arr = build_frame_array(&s, &geom, &shells).unwrap();
        (shells, geom, s, arr)
    }

    #[test]
    fn half_inner_rejects_odd_products() {
        let shells = Shells::e8();
        let r = shells.roots[0];
        assert_eq!(half_inner(&shells.lattice, &r, &r).unwrap(), 1);
        let odd = shells.roots.iter().find(|s| shells.lattice.inner(&r, s) == 1).unwrap();
        assert!(half_inner(&shells.lattice, &r, odd).is_err());
    }

    #[test]
    fn roots_generate_the_whole_lattice() {
        let shells = Shells::e8();
        let basis = generated_basis(&shells.roots);
        assert_eq!(linalg::determinant(&basis.clone().try_into().unwrap()).abs(), 1);
    }

    #[test]
    fn rank_deficient_block_is_rejected() {
        let shells = Shells::e8();
        let v = shells.norm4[0];
        assert!(Norm4Block::from_vectors(0, vec![v, -v], &shells.lattice).is_err());
    }

    #[test]
    fn frame_gives_112_distinct_vectors() {
        let (shells, _, _, arr) = setup();
        let fv: BTreeSet<LatticeVector> = frame_vectors(&arr.rows[0][0], &shells).into_iter().collect();
        assert_eq!(fv.len(), 112);
        assert!(fv.iter().all(|v| shells.lattice.norm(v) == 4));
    }

    #[test]
    fn blocks_certify_and_reduce_to_the_spread() {
        let (shells, geom, s, arr) = setup();
        let p = build_partition(&arr, &shells).unwrap();
        assert!(certify_scaled_e8(&p.blocks[3], &shells.lattice).unwrap().passed());
        assert!(certify_d8_glue(&p.blocks[3], &arr.rows[3][7], &shells).unwrap().passed());
        let back = spread_from_partition(&p, &geom).unwrap();
        assert_eq!(back.spaces, s.spaces);
        assert!(class_hits(&p.blocks[0]).values().all(|&n| n == 16));
    }

    #[test]
    fn foreign_vector_breaks_a_block() {
        let (shells, _, _, arr) = setup();
        let p = build_partition(&arr, &shells).unwrap();
        let mut vectors = p.blocks[0].vectors.clone();
        vectors[0] = p.blocks[1].vectors[0];
        let broken = Norm4Block::from_vectors(0, vectors, &shells.lattice);
        assert!(broken.and_then(|b| certify_scaled_e8(&b, &shells.lattice)).is_err());
    }

    #[test]
    fn frame_from_another_row_fails_glue_certification() {
        let (shells, _, _, arr) = setup();
        let p = build_partition(&arr, &shells).unwrap();
        assert!(certify_d8_glue(&p.blocks[0], &arr.rows[1][0], &shells).is_err());
    }
}
