//! Spreads: nine pairwise-disjoint isotropic 4-spaces of one class, which
//! between them contain every isotropic point exactly once.

use crate::cert::Certificate;
use crate::error::{Error, Result};
use crate::f2::{F2Geometry, F2Subspace, PointSet, SpaceClass};

pub const SPREAD_SIZE: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spread {
    pub spaces: Vec<F2Subspace>,
    pub class: SpaceClass,
}

impl Spread {
    /// Index of the member containing a nonzero vector.
    pub fn space_containing(&self, x: crate::f2::F2Vector) -> Option<usize> {
        self.spaces.iter().position(|s| s.contains(x))
    }

    pub fn same_spaces(&self, other: &Spread) -> bool {
        let mut a = self.spaces.clone();
        let mut b = other.spaces.clone();
        a.sort();
        b.sort();
        a == b
    }
}

/// Finds the canonical spread of one class.
///
/// The first member is the lexicographically first space of the class. After
/// that the search always covers the smallest uncovered point, trying the
/// spaces through it in sorted order, so the result is deterministic.
pub fn find_spread(class: SpaceClass, members: &[F2Subspace]) -> Result<Spread> {
    let mut members = members.to_vec();
    members.sort();
    members.dedup();
    let sets: Vec<PointSet> = members.iter().map(|m| m.points().into_iter().collect()).collect();
    let all = sets.iter().fold(PointSet::default(), |acc, s| acc.union(s));
    if members.is_empty() {
        return Err(Error::NoSpread(0, class));
    }
    let mut chosen = vec![0];
    if cover(&sets, &all, sets[0], &mut chosen) {
        Ok(Spread { spaces: chosen.into_iter().map(|i| members[i].clone()).collect(), class })
    } else {
        Err(Error::NoSpread(members.len(), class))
    }
}

fn cover(sets: &[PointSet], all: &PointSet, covered: PointSet, chosen: &mut Vec<usize>) -> bool {
    let Some(p) = all.iter().find(|p| !covered.contains(*p)) else {
        return chosen.len() == SPREAD_SIZE;
    };
    if chosen.len() == SPREAD_SIZE {
        return false;
    }
    for (i, s) in sets.iter().enumerate() {
        if !s.contains(p) || !s.intersection(&covered).is_empty() {
            continue;
        }
        chosen.push(i);
        if cover(sets, all, covered.union(s), chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Re-checks every spread invariant, stopping at the first violation.
pub fn verify_spread(s: &Spread, geom: &F2Geometry) -> Result<Certificate> {
    const STAGE: &str = "spread";
    let mut cert = Certificate::new(STAGE);
    let fail = |msg: String| Err(Error::verify(STAGE, msg));

    if !cert.check("number of spaces", SPREAD_SIZE, s.spaces.len()) {
        return fail(format!("expected {SPREAD_SIZE} spaces, found {}", s.spaces.len()));
    }
    for (i, v) in s.spaces.iter().enumerate() {
        if v.dim() != 4 {
            return fail(format!("space {i} {v} has dimension {}, expected 4", v.dim()));
        }
        if !geom.forms.is_totally_isotropic(v) {
            return fail(format!("space {i} {v} is not totally isotropic"));
        }
        if geom.classes.class_of(v) != Some(s.class) {
            return fail(format!("space {i} {v} is not in class {}", s.class));
        }
    }
    cert.check_true("every space is a totally isotropic 4-space of the stated class", true);
    for i in 0..s.spaces.len() {
        for j in i + 1..s.spaces.len() {
            let d = s.spaces[i].intersection_dim(&s.spaces[j]);
            if d != 0 {
                return fail(format!(
                    "spaces {i} {} and {j} {} meet in dimension {d}",
                    s.spaces[i], s.spaces[j]
                ));
            }
        }
    }
    cert.check("pairwise intersections of dimension 0", 36, 36);
    let covered: PointSet = s.spaces.iter().flat_map(|v| v.points()).collect();
    let isotropic: PointSet = geom.forms.isotropic_points().into_iter().collect();
    if !cert.check("isotropic points covered", isotropic.len(), covered.len()) || covered != isotropic {
        return fail(format!("spaces cover {} of {} isotropic points", covered.len(), isotropic.len()));
    }
    Ok(cert)
}
