//! The stabilizer of the norm-4 partition inside Aut(E8).
//!
//! Generators are found as signed frame-to-frame maps. A frame `r_1..r_8`
//! gives coordinates `y_i(x) = <x, r_i>`, and in those coordinates the 240
//! roots are `±2e_i` plus 224 vectors `±1` on the fourteen 4-sets of an
//! extended Hamming code. A signed bijection onto another frame extends to
//! an automorphism of E8 exactly when its underlying permutation carries
//! one code onto the other; sign changes are always allowed (they are the
//! reflections in the frame roots). Each such automorphism is then kept if
//! it permutes the nine blocks.
//!
//! Completeness is certified by the stabilizer-chain order alone.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2::{reduce_mod2, F2Geometry, F2Vector};
use crate::frames::{Frame, FrameArray};
use crate::lattice::{LatticeVector, Shells};
use crate::linalg::{self, Mat8, Vec8, RANK};
use crate::norm4::Norm4Partition;
use crate::perm::{self, Perm, StabChain};
use crate::spread::Spread;

/// `2 · |A9|`.
pub const EXPECTED_ORDER: u128 = 362_880;
/// `|A9|`.
pub const A9_ORDER: u128 = 181_440;
/// `|A8| = |L4(2)|`.
pub const A8_ORDER: u128 = 20_160;

/// An automorphism of the lattice, acting on coordinate columns `x -> M x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Isometry {
    matrix: Mat8,
}

impl Isometry {
    pub fn new(matrix: Mat8) -> Isometry {
        Isometry { matrix }
    }

    pub fn identity() -> Isometry {
        Isometry { matrix: linalg::identity() }
    }

    pub fn negation() -> Isometry {
        Isometry { matrix: linalg::identity().map(|row| row.map(|x| -x)) }
    }

    pub fn matrix(&self) -> &Mat8 {
        &self.matrix
    }

    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        LatticeVector(linalg::mat_vec(&self.matrix, &v.0))
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Isometry) -> Isometry {
        Isometry { matrix: linalg::mat_mul(&other.matrix, &self.matrix) }
    }

    pub fn determinant(&self) -> i128 {
        linalg::determinant(&self.matrix)
    }

    /// `M^T G M = G`.
    pub fn preserves_gram(&self, gram: &Mat8) -> bool {
        linalg::mat_mul(&linalg::transpose(&self.matrix), &linalg::mat_mul(gram, &self.matrix)) == *gram
    }

    pub fn act_mod2(&self, x: F2Vector) -> F2Vector {
        reduce_mod2(&self.apply(&x.lift()))
    }

    /// The induced permutation of the norm-4 shell (canonical shell order).
    pub fn to_norm4_perm(&self, shells: &Shells) -> Result<Perm> {
        let images = shells
            .norm4
            .iter()
            .map(|v| {
                let w = self.apply(v);
                shells
                    .norm4_index(&w)
                    .ok_or_else(|| Error::verify("group", format!("{v} maps to {w}, which is not a norm-4 vector")))
            })
            .collect::<Result<Vec<_>>>()?;
        Perm::from_images(images)
    }

    /// Recovers the matrix from a permutation of the norm-4 shell, checking
    /// that it reproduces the permutation on every vector.
    pub fn from_norm4_perm(p: &Perm, shells: &Shells) -> Result<Isometry> {
        let fail = |msg: &str| Error::verify("group", msg.to_string());
        if p.degree() != shells.norm4.len() {
            return Err(fail("permutation degree does not match the norm-4 shell"));
        }
        let sources = independent_norm4(shells);
        // row r of M solves sum_j M[r][j] v_i[j] = w_i[r] for all i
        let columns: Vec<Vec8> = (0..RANK).map(|j| std::array::from_fn(|i| shells.norm4[sources[i]].0[j])).collect();
        let mut matrix = [[0; RANK]; RANK];
        for (r, row) in matrix.iter_mut().enumerate() {
            let target: Vec8 = std::array::from_fn(|i| shells.norm4[p.apply(sources[i])].0[r]);
            *row = linalg::lattice_coefficients(&columns, &target)
                .ok_or_else(|| fail("permutation is not induced by an integral matrix"))?;
        }
        let m = Isometry { matrix };
        if m.to_norm4_perm(shells).ok().as_ref() != Some(p) {
            return Err(fail("permutation is not induced by a linear map"));
        }
        Ok(m)
    }
}

fn independent_norm4(shells: &Shells) -> Vec<usize> {
    let mut picked: Vec<usize> = Vec::with_capacity(RANK);
    let mut rows: Vec<Vec8> = Vec::with_capacity(RANK);
    for (i, v) in shells.norm4.iter().enumerate() {
        rows.push(v.0);
        if linalg::rank(&rows) == rows.len() {
            picked.push(i);
            if picked.len() == RANK {
                break;
            }
        } else {
            rows.pop();
        }
    }
    picked
}

/// A permutation group on the norm-4 shell together with its stabilizer
/// chain.
#[derive(Clone, Debug)]
pub struct PermutationGroup {
    pub generators: Vec<Perm>,
    pub chain: StabChain,
}

impl PermutationGroup {
    pub fn new(generators: Vec<Perm>, degree: usize) -> Result<PermutationGroup> {
        let chain = perm::schreier_sims(&generators, degree)?;
        Ok(PermutationGroup { generators, chain })
    }

    pub fn from_isometries(gens: &[Isometry], shells: &Shells) -> Result<PermutationGroup> {
        let perms = gens.iter().map(|g| g.to_norm4_perm(shells)).collect::<Result<Vec<_>>>()?;
        PermutationGroup::new(perms, shells.norm4.len())
    }

    pub fn order(&self) -> u128 {
        self.chain.order()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.chain.contains(g)
    }

    pub fn degree(&self) -> usize {
        self.chain.degree()
    }
}

/// Frame coordinates and the code they carry.
struct FrameChart {
    reps: [LatticeVector; 8],
    /// Rows `G r_i`, so that `y_i(x) = <G r_i, x>`.
    dual_rows: [Vec8; 8],
    supports: HashSet<u8>,
    root_coords: HashSet<Vec8>,
}

impl FrameChart {
    fn new(frame: &Frame, shells: &Shells) -> FrameChart {
        let reps: [LatticeVector; 8] = std::array::from_fn(|i| shells.representative(frame.roots[i]));
        let dual_rows: [Vec8; 8] = std::array::from_fn(|i| linalg::mat_vec(shells.lattice.gram(), &reps[i].0));
        let mut supports = HashSet::new();
        let mut root_coords = HashSet::new();
        for r in &shells.roots {
            let y: Vec8 = std::array::from_fn(|i| dual_rows[i].iter().zip(&r.0).map(|(a, b)| a * b).sum());
            let support = y.iter().enumerate().filter(|(_, c)| **c != 0).fold(0u8, |m, (i, _)| m | 1 << i);
            if support.count_ones() == 4 {
                supports.insert(support);
            }
            root_coords.insert(y);
        }
        FrameChart { reps, dual_rows, supports, root_coords }
    }
}

/// Permutations `sigma` of frame positions carrying the source code onto
/// the target code and the source root set onto the target root set.
fn code_isomorphisms(src: &FrameChart, dst: &FrameChart) -> Vec<[usize; 8]> {
    let mut by_top: [Vec<u8>; 8] = Default::default();
    for &s in &src.supports {
        by_top[7 - s.leading_zeros() as usize].push(s);
    }
    for v in by_top.iter_mut() {
        v.sort_unstable();
    }
    let mut out = Vec::new();
    let mut sigma = [0usize; 8];
    extend_sigma(src, dst, &by_top, 0, 0, &mut sigma, &mut out);
    out
}

fn extend_sigma(
    src: &FrameChart,
    dst: &FrameChart,
    by_top: &[Vec<u8>; 8],
    pos: usize,
    used: u8,
    sigma: &mut [usize; 8],
    out: &mut Vec<[usize; 8]>,
) {
    if pos == 8 {
        let ok = src.root_coords.iter().all(|y| {
            let mut z = [0; RANK];
            for i in 0..RANK {
                z[sigma[i]] = y[i];
            }
            dst.root_coords.contains(&z)
        });
        if ok {
            out.push(*sigma);
        }
        return;
    }
    for t in 0..8 {
        if used >> t & 1 == 1 {
            continue;
        }
        sigma[pos] = t;
        let consistent = by_top[pos].iter().all(|&s| {
            let image = (0..8).filter(|i| s >> i & 1 == 1).fold(0u8, |m, i| m | 1 << sigma[i]);
            dst.supports.contains(&image)
        });
        if consistent {
            extend_sigma(src, dst, by_top, pos + 1, used | 1 << t, sigma, out);
        }
    }
}

/// `r_i -> signs_i * s_{sigma(i)}` as a matrix, or `None` if it is not
/// integral.
fn frame_map(src: &FrameChart, dst: &FrameChart, sigma: &[usize; 8], signs: u8) -> Option<Isometry> {
    // x = (1/2) sum_i y_i(x) r_i, so M = (1/2) sum_i eps_i s_sigma(i) (G r_i)^T
    let mut m = [[0i64; RANK]; RANK];
    for i in 0..RANK {
        let s = &dst.reps[sigma[i]].0;
        let eps = if signs >> i & 1 == 1 { -1 } else { 1 };
        for (row, si) in m.iter_mut().zip(s) {
            if *si == 0 {
                continue;
            }
            for (entry, a) in row.iter_mut().zip(&src.dual_rows[i]) {
                *entry += eps * si * a;
            }
        }
    }
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            if *x % 2 != 0 {
                return None;
            }
            *x /= 2;
        }
    }
    Some(Isometry { matrix: m })
}

/// Block numbers of the norm-4 shell, failing if the partition misses a
/// vector.
fn block_labels(p: &Norm4Partition, shells: &Shells) -> Result<Vec<usize>> {
    p.block_of(shells)
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::verify("group", format!("{} lies in no block", shells.norm4[i]))))
        .collect()
}

/// The induced permutation of blocks, if `g` maps blocks onto blocks.
pub fn block_permutation(g: &Isometry, labels: &[usize], shells: &Shells) -> Option<Vec<usize>> {
    let n_blocks = labels.iter().max().map_or(0, |m| m + 1);
    let mut image = vec![usize::MAX; n_blocks];
    for (i, v) in shells.norm4.iter().enumerate() {
        let j = shells.norm4_index(&g.apply(v))?;
        let slot = &mut image[labels[i]];
        if *slot == usize::MAX {
            *slot = labels[j];
        } else if *slot != labels[j] {
            return None;
        }
    }
    let distinct: BTreeSet<usize> = image.iter().copied().collect();
    (distinct.len() == n_blocks).then_some(image)
}

fn frame_image(g: &Isometry, frame: &Frame, shells: &Shells) -> Option<[usize; 8]> {
    let mut roots = [0; 8];
    for (slot, &id) in roots.iter_mut().zip(&frame.roots) {
        *slot = shells.pair_of(&g.apply(&shells.representative(id)))?;
    }
    roots.sort_unstable();
    Some(roots)
}

fn frame_orbit(gens: &[Isometry], start: (usize, usize), arr: &FrameArray, shells: &Shells) -> HashSet<(usize, usize)> {
    let index = arr.index();
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(pos) = queue.pop_front() {
        for g in gens {
            if let Some(next) = frame_image(g, arr.get(pos), shells).and_then(|r| index.get(&r).copied()) {
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
    }
    seen
}

/// Generators for the stabilizer of the partition, with their stabilizer
/// chain.
#[derive(Clone, Debug)]
pub struct StabilizerSearch {
    pub generators: Vec<Isometry>,
    pub group: PermutationGroup,
    /// Candidate signed frame maps that were built and tested.
    pub candidates_tested: u64,
    /// Source frames used before the order was reached.
    pub sources_used: usize,
}

pub fn stabilizer_generators(arr: &FrameArray, p: &Norm4Partition, shells: &Shells) -> Result<StabilizerSearch> {
    let labels = block_labels(p, shells)?;
    let degree = shells.norm4.len();
    let gram = *shells.lattice.gram();

    let mut generators: Vec<Isometry> = Vec::new();
    let mut perms: Vec<Perm> = Vec::new();
    let mut chain = StabChain::trivial(degree);
    let mut tested = 0u64;

    let accept = |g: Isometry, generators: &mut Vec<Isometry>, perms: &mut Vec<Perm>, chain: &mut StabChain| -> Result<bool> {
        if !g.preserves_gram(&gram) || g.determinant().abs() != 1 {
            return Err(Error::verify("group", "frame map is not a lattice isometry"));
        }
        let pg = g.to_norm4_perm(shells)?;
        if chain.add_generator(pg.clone())? {
            generators.push(g);
            perms.push(pg);
            if chain.order() > EXPECTED_ORDER {
                return Err(Error::verify("group", format!("stabilizer order {} exceeds {EXPECTED_ORDER}", chain.order())));
            }
            return Ok(true);
        }
        Ok(false)
    };

    let neg = Isometry::negation();
    if block_permutation(&neg, &labels, shells).is_none() {
        return Err(Error::verify("group", "negation does not preserve the blocks"));
    }
    accept(neg, &mut generators, &mut perms, &mut chain)?;

    let positions: Vec<(usize, usize)> = arr.frames().map(|f| f.source).collect();
    let charts: HashMap<(usize, usize), FrameChart> =
        positions.iter().map(|&pos| (pos, FrameChart::new(arr.get(pos), shells))).collect();

    let mut sources_used = 0;
    for &source in &positions {
        if chain.order() == EXPECTED_ORDER {
            break;
        }
        sources_used += 1;
        let src = &charts[&source];
        let mut reached = frame_orbit(&generators, source, arr, shells);
        for &target in &positions {
            if chain.order() == EXPECTED_ORDER {
                break;
            }
            let whole_stabilizer = target == source;
            if !whole_stabilizer && reached.contains(&target) {
                continue;
            }
            let dst = &charts[&target];
            'sigmas: for sigma in code_isomorphisms(src, dst) {
                for signs in 0..=255u8 {
                    tested += 1;
                    let g = frame_map(src, dst, &sigma, signs)
                        .ok_or_else(|| Error::verify("group", "code isomorphism gave a non-integral map"))?;
                    if block_permutation(&g, &labels, shells).is_none() {
                        continue;
                    }
                    let added = accept(g, &mut generators, &mut perms, &mut chain)?;
                    if !whole_stabilizer && added {
                        break 'sigmas;
                    }
                }
            }
            reached = frame_orbit(&generators, source, arr, shells);
        }
    }
    if chain.order() != EXPECTED_ORDER {
        return Err(Error::GenerationIncomplete { reached: chain.order(), expected: EXPECTED_ORDER });
    }
    Ok(StabilizerSearch {
        generators,
        group: PermutationGroup { generators: perms, chain },
        candidates_tested: tested,
        sources_used,
    })
}

/// Checks supplied isometries: each preserves the Gram matrix, is
/// unimodular and permutes the blocks.
pub fn check_generators(gens: &[Isometry], p: &Norm4Partition, shells: &Shells) -> Result<Vec<Vec<usize>>> {
    let labels = block_labels(p, shells)?;
    gens.iter()
        .enumerate()
        .map(|(k, g)| {
            if !g.preserves_gram(shells.lattice.gram()) {
                return Err(Error::verify("group", format!("generator {k} does not preserve the Gram matrix")));
            }
            if g.determinant().abs() != 1 {
                return Err(Error::verify("group", format!("generator {k} is not unimodular")));
            }
            block_permutation(g, &labels, shells)
                .ok_or_else(|| Error::verify("group", format!("generator {k} does not permute the blocks")))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockAction {
    /// Image of each generator on the nine blocks.
    pub images: Vec<Vec<usize>>,
    pub group_order: u128,
    pub image_order: u128,
    pub kernel_order: u128,
    pub all_even: bool,
    /// Kernel has order 2 and contains the negation.
    pub kernel_is_plus_minus_one: bool,
}

pub fn block_action(gens: &[Isometry], p: &Norm4Partition, shells: &Shells) -> Result<BlockAction> {
    let images = check_generators(gens, p, shells)?;
    let group = PermutationGroup::from_isometries(gens, shells)?;
    let block_perms = images.iter().cloned().map(Perm::from_images).collect::<Result<Vec<_>>>()?;
    let image = perm::schreier_sims(&block_perms, p.blocks.len())?;
    let all_even = block_perms.iter().all(Perm::is_even) && image.strong_generators().iter().all(Perm::is_even);
    let group_order = group.order();
    let image_order = image.order();
    let kernel_order = group_order / image_order;
    let neg = Isometry::negation();
    let neg_in_kernel = group.contains(&neg.to_norm4_perm(shells)?)
        && check_generators(std::slice::from_ref(&neg), p, shells)?[0].iter().enumerate().all(|(i, &j)| i == j);
    Ok(BlockAction {
        images,
        group_order,
        image_order,
        kernel_order,
        all_even,
        kernel_is_plus_minus_one: kernel_order == 2 && neg_in_kernel,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OneBlockReport {
    pub stabilizer_order: u128,
    /// Action on the eight other blocks.
    pub blocks_image_order: u128,
    pub blocks_transitive: bool,
    pub blocks_kernel_order: u128,
    /// Action on the 15 points of the fixed block's 4-space.
    pub points_image_order: u128,
    pub points_transitive: bool,
    pub points_kernel_order: u128,
    /// Negation acts trivially in both actions.
    pub kernels_are_plus_minus_one: bool,
}

/// Stabilizer of block 0 (through Schreier generators of the block action)
/// and its actions on the remaining blocks and on the points of the
/// corresponding spread member.
pub fn one_block_stabilizer_analysis(
    g: &PermutationGroup,
    p: &Norm4Partition,
    s: &Spread,
    shells: &Shells,
    geom: &F2Geometry,
) -> Result<OneBlockReport> {
    let fail = |msg: String| Err(Error::verify("one-block", msg));
    let labels = block_labels(p, shells)?;
    let first_in: Vec<usize> = (0..p.blocks.len())
        .map(|b| labels.iter().position(|&l| l == b).expect("nonempty block"))
        .collect();
    let on_blocks = |x: &Perm| -> Vec<usize> { first_in.iter().map(|&v| labels[x.apply(v)]).collect() };

    // orbit of block 0 with transversal, then Schreier generators
    let degree = g.degree();
    let mut transversal: Vec<Option<Perm>> = vec![None; p.blocks.len()];
    transversal[0] = Some(Perm::identity(degree));
    let mut queue = VecDeque::from([0usize]);
    while let Some(b) = queue.pop_front() {
        let u = transversal[b].clone().expect("visited");
        for x in &g.generators {
            let c = on_blocks(x)[b];
            if transversal[c].is_none() {
                transversal[c] = Some(u.then(x));
                queue.push_back(c);
            }
        }
    }
    let mut stab_gens: Vec<Perm> = Vec::new();
    let mut seen: HashSet<Perm> = HashSet::new();
    for b in 0..p.blocks.len() {
        let Some(u) = &transversal[b] else { continue };
        for x in &g.generators {
            let c = on_blocks(x)[b];
            let t = u.then(x).then(&transversal[c].as_ref().expect("orbit is closed").inverse());
            if !t.is_identity() && seen.insert(t.clone()) {
                stab_gens.push(t);
            }
        }
    }
    let stab = perm::schreier_sims(&stab_gens, degree)?;

    let others: Vec<Perm> = stab_gens
        .iter()
        .map(|x| {
            let img = on_blocks(x);
            if img[0] != 0 {
                return Err(Error::verify("one-block", "Schreier generator moves block 0"));
            }
            Perm::from_images(img[1..].iter().map(|&c| c - 1).collect())
        })
        .collect::<Result<_>>()?;
    let blocks_image = perm::schreier_sims(&others, p.blocks.len() - 1)?;
    let blocks_transitive = perm::orbit(&others, 0, p.blocks.len() - 1).len() == p.blocks.len() - 1;

    let v0 = &s.spaces[0];
    let points = v0.points();
    let block0_classes: BTreeSet<F2Vector> = p.blocks[0].vectors.iter().map(reduce_mod2).collect();
    if block0_classes != points.iter().copied().collect::<BTreeSet<_>>() {
        return fail("block 0 does not project onto the points of spread member 0".into());
    }
    let mut on_points: Vec<Perm> = Vec::new();
    for x in &stab_gens {
        let mut img = Vec::with_capacity(points.len());
        for &pt in &points {
            let over = geom.norm4_over(pt);
            let targets: BTreeSet<F2Vector> = over.iter().map(|&i| reduce_mod2(&shells.norm4[x.apply(i)])).collect();
            if targets.len() != 1 {
                return fail(format!("point {pt} is not mapped to a single point"));
            }
            let t = *targets.iter().next().expect("one target");
            let k = points
                .binary_search(&t)
                .map_err(|_| Error::verify("one-block", format!("point {pt} leaves the fixed 4-space")))?;
            img.push(k);
        }
        on_points.push(Perm::from_images(img)?);
    }
    let points_image = perm::schreier_sims(&on_points, points.len())?;
    let points_transitive = perm::orbit(&on_points, 0, points.len()).len() == points.len();

    let neg = Isometry::negation().to_norm4_perm(shells)?;
    let neg_trivial = stab.contains(&neg)
        && on_blocks(&neg).iter().enumerate().all(|(i, &j)| i == j)
        && shells.norm4.iter().enumerate().all(|(i, v)| reduce_mod2(v) == reduce_mod2(&shells.norm4[neg.apply(i)]));

    let stabilizer_order = stab.order();
    Ok(OneBlockReport {
        stabilizer_order,
        blocks_image_order: blocks_image.order(),
        blocks_transitive,
        blocks_kernel_order: stabilizer_order / blocks_image.order(),
        points_image_order: points_image.order(),
        points_transitive,
        points_kernel_order: stabilizer_order / points_image.order(),
        kernels_are_plus_minus_one: neg_trivial
            && stabilizer_order == 2 * blocks_image.order()
            && stabilizer_order == 2 * points_image.order(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionReport {
    pub derived_subgroup_order: u128,
    /// The derived subgroup has index 2 and avoids the negation, so it is a
    /// complement to the center.
    pub complement_found: bool,
}

/// Order of the commutator subgroup (normal closure of the generator
/// commutators), which decides whether the center `{±1}` has a complement.
pub fn extension_report(g: &PermutationGroup, shells: &Shells) -> Result<ExtensionReport> {
    let degree = g.degree();
    let mut derived = StabChain::trivial(degree);
    let mut gens: Vec<Perm> = Vec::new();
    for (i, a) in g.generators.iter().enumerate() {
        for b in &g.generators[i + 1..] {
            let c = a.inverse().then(&b.inverse()).then(a).then(b);
            if derived.add_generator(c.clone())? {
                gens.push(c);
            }
        }
    }
    let mut k = 0;
    while k < gens.len() {
        for x in &g.generators {
            let c = x.inverse().then(&gens[k]).then(x);
            if derived.add_generator(c.clone())? {
                gens.push(c);
            }
        }
        k += 1;
    }
    let order = derived.order();
    let neg = Isometry::negation().to_norm4_perm(shells)?;
    Ok(ExtensionReport {
        derived_subgroup_order: order,
        complement_found: order * 2 == g.order() && !derived.contains(&neg),
    })
}
