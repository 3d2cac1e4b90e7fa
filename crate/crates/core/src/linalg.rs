//! Exact integer and rational linear algebra on small dense matrices.
//!
//! Everything here works on rank-8 data, so matrices are plain fixed-size
//! arrays and intermediate values are widened to `i128`.

use num_rational::Ratio;
use num_traits::Zero;

pub const RANK: usize = 8;

pub type Vec8 = [i64; RANK];
pub type Mat8 = [[i64; RANK]; RANK];

type Q = Ratio<i128>;

pub fn identity() -> Mat8 {
    let mut m = [[0; RANK]; RANK];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

pub fn transpose(m: &Mat8) -> Mat8 {
    let mut t = [[0; RANK]; RANK];
    for i in 0..RANK {
        for j in 0..RANK {
            t[j][i] = m[i][j];
        }
    }
    t
}

pub fn mat_mul(a: &Mat8, b: &Mat8) -> Mat8 {
    let mut c = [[0; RANK]; RANK];
    for i in 0..RANK {
        for k in 0..RANK {
            let aik = a[i][k];
            if aik == 0 {
                continue;
            }
            for j in 0..RANK {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub fn mat_vec(m: &Mat8, v: &Vec8) -> Vec8 {
    let mut out = [0; RANK];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

/// `u^T G v`.
pub fn bilinear(g: &Mat8, u: &Vec8, v: &Vec8) -> i64 {
    let gv = mat_vec(g, v);
    u.iter().zip(&gv).map(|(a, b)| a * b).sum()
}

pub fn is_symmetric(m: &Mat8) -> bool {
    (0..RANK).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

/// Determinant of the leading `n × n` block by fraction-free (Bareiss)
/// elimination.
pub fn leading_minor(m: &Mat8, n: usize) -> i128 {
    let mut a: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(m[i][j])).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * a[n - 1][n - 1]
    }
}

pub fn determinant(m: &Mat8) -> i128 {
    leading_minor(m, RANK)
}

/// Sylvester's criterion on exact leading minors.
pub fn is_positive_definite(m: &Mat8) -> bool {
    is_symmetric(m) && (1..=RANK).all(|n| leading_minor(m, n) > 0)
}

/// Rank over the rationals of a list of integer vectors.
pub fn rank(rows: &[Vec8]) -> usize {
    let mut echelon: Vec<Vec<Q>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for row in rows {
        let mut r: Vec<Q> = row.iter().map(|&x| Q::from_integer(i128::from(x))).collect();
        for (e, &p) in echelon.iter().zip(&pivots) {
            if !r[p].is_zero() {
                let f = r[p] / e[p];
                for j in 0..RANK {
                    r[j] -= f * e[j];
                }
            }
        }
        if let Some(p) = r.iter().position(|x| !x.is_zero()) {
            echelon.push(r);
            pivots.push(p);
        }
    }
    echelon.len()
}

/// Hermite normal form (row style) of the lattice spanned by `generators`.
///
/// The result is the canonical basis of the generated lattice: upper
/// triangular, positive pivots, entries above each pivot reduced into
/// `0..pivot`. Zero rows are dropped, so the length is the rank.
pub fn hermite_basis(generators: &[Vec8]) -> Vec<Vec8> {
    let mut rows: Vec<Vec8> = generators.iter().filter(|r| r.iter().any(|&x| x != 0)).copied().collect();
    let mut out: Vec<Vec8> = Vec::new();
    for col in 0..RANK {
        loop {
            // smallest nonzero entry in this column among the remaining rows
            let pick = rows
                .iter()
                .enumerate()
                .filter(|(_, r)| r[col] != 0)
                .min_by_key(|(i, r)| (r[col].abs(), *i))
                .map(|(i, _)| i);
            let Some(p) = pick else { break };
            let pivot = rows[p];
            let mut all_zero = true;
            for (i, r) in rows.iter_mut().enumerate() {
                if i == p || r[col] == 0 {
                    continue;
                }
                let q = r[col].div_euclid(pivot[col]);
                for j in 0..RANK {
                    r[j] -= q * pivot[j];
                }
                if r[col] != 0 {
                    all_zero = false;
                }
            }
            if all_zero {
                let mut pr = rows.swap_remove(p);
                if pr[col] < 0 {
                    for x in pr.iter_mut() {
                        *x = -*x;
                    }
                }
                out.push(pr);
                rows.retain(|r| r.iter().any(|&x| x != 0));
                break;
            }
        }
    }
    // reduce entries above pivots
    for i in 0..out.len() {
        let pc = out[i].iter().position(|&x| x != 0).expect("nonzero HNF row");
        let pivot = out[i];
        for k in 0..i {
            let q = out[k][pc].div_euclid(pivot[pc]);
            if q != 0 {
                for j in 0..RANK {
                    out[k][j] -= q * pivot[j];
                }
            }
        }
    }
    out
}

/// Solve `sum_i c_i * basis[i] = v` over the rationals for a basis of
/// full rank 8. Returns `None` if the basis is singular.
pub fn solve_coefficients(basis: &[Vec8], v: &Vec8) -> Option<[Q; RANK]> {
    if basis.len() != RANK {
        return None;
    }
    // augmented system: rows are coordinates j, columns are basis vectors i
    let mut a: Vec<Vec<Q>> = (0..RANK)
        .map(|j| {
            let mut row: Vec<Q> = basis.iter().map(|b| Q::from_integer(i128::from(b[j]))).collect();
            row.push(Q::from_integer(i128::from(v[j])));
            row
        })
        .collect();
    for col in 0..RANK {
        let p = (col..RANK).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= inv;
        }
        for r in 0..RANK {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for k in col..=RANK {
                    let t = a[col][k];
                    a[r][k] -= f * t;
                }
            }
        }
    }
    let mut c = [Q::zero(); RANK];
    for (i, ci) in c.iter_mut().enumerate() {
        *ci = a[i][RANK];
    }
    Some(c)
}

/// Integer coefficients of `v` in `basis`, if `v` lies in the lattice the
/// basis spans.
pub fn lattice_coefficients(basis: &[Vec8], v: &Vec8) -> Option<Vec8> {
    let c = solve_coefficients(basis, v)?;
    let mut out = [0; RANK];
    for (o, ci) in out.iter_mut().zip(c.iter()) {
        if !ci.is_integer() {
            return None;
        }
        *o = i64::try_from(ci.to_integer()).ok()?;
    }
    Some(out)
}

/// Gram matrix `B G B^T` of the rows of `basis`.
pub fn gram_of(basis: &[Vec8], g: &Mat8) -> Mat8 {
    let mut out = [[0; RANK]; RANK];
    for i in 0..RANK.min(basis.len()) {
        for j in 0..RANK.min(basis.len()) {
            out[i][j] = bilinear(g, &basis[i], &basis[j]);
        }
    }
    out
}

/// Vectors of norm exactly `target` for the positive-definite form `gram`,
/// sorted lexicographically.
///
/// Fincke–Pohst enumeration over the exact rational LDL^T decomposition:
/// `Q(x) = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2`. The final norm is
/// checked again in integers.
pub fn vectors_of_norm(gram: &Mat8, target: i64) -> Vec<Vec8> {
    let mut q: Vec<Vec<Q>> = gram
        .iter()
        .map(|row| row.iter().map(|&x| Q::from_integer(i128::from(x))).collect())
        .collect();
    for i in 0..RANK {
        for j in i + 1..RANK {
            q[j][i] = q[i][j];
            q[i][j] = q[i][j] / q[i][i];
        }
        for k in i + 1..RANK {
            for l in k..RANK {
                let t = q[k][i] * q[i][l];
                q[k][l] -= t;
            }
        }
    }
    let mut out = Vec::new();
    let mut x = [0i64; RANK];
    descend(&q, RANK - 1, Q::from_integer(i128::from(target)), &mut x, gram, target, &mut out);
    out.sort_unstable();
    out
}

fn descend(q: &[Vec<Q>], level: usize, remaining: Q, x: &mut Vec8, gram: &Mat8, target: i64, out: &mut Vec<Vec8>) {
    let center: Q = -(level + 1..RANK).map(|j| q[level][j] * Q::from_integer(i128::from(x[j]))).sum::<Q>();
    let d = q[level][level];
    let fits = |v: i64| {
        let t = Q::from_integer(i128::from(v)) - center;
        d * t * t <= remaining
    };
    let base = center.floor().to_integer() as i64;
    let start = if fits(base) {
        base
    } else if fits(base + 1) {
        base + 1
    } else {
        return;
    };
    let mut lo = start;
    while fits(lo - 1) {
        lo -= 1;
    }
    let mut hi = start;
    while fits(hi + 1) {
        hi += 1;
    }
    for v in lo..=hi {
        x[level] = v;
        let t = Q::from_integer(i128::from(v)) - center;
        let rest = remaining - d * t * t;
        if level == 0 {
            if bilinear(gram, x, x) == target {
                out.push(*x);
            }
        } else {
            descend(q, level - 1, rest, x, gram, target, out);
        }
    }
    x[level] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_matches_cofactor_on_small_cases() {
        let mut m = identity();
        m[0][1] = 3;
        m[1][0] = 1;
        // [[1,3],[1,1]] block: det -2
        assert_eq!(determinant(&m), -2);
        assert_eq!(leading_minor(&m, 1), 1);
    }

    #[test]
    fn hermite_basis_of_even_sum_sublattice() {
        // D8 inside Z^8: vectors with even coordinate sum
        let mut gens = Vec::new();
        for i in 0..RANK {
            for j in i + 1..RANK {
                let mut v = [0; RANK];
                v[i] = 1;
                v[j] = 1;
                gens.push(v);
                v[j] = -1;
                gens.push(v);
            }
        }
        let b = hermite_basis(&gens);
        assert_eq!(b.len(), 8);
        let m: Mat8 = b.clone().try_into().unwrap();
        assert_eq!(determinant(&m).abs(), 2);
        assert!(lattice_coefficients(&b, &[1, 1, 0, 0, 0, 0, 0, 0]).is_some());
        assert!(lattice_coefficients(&b, &[1, 0, 0, 0, 0, 0, 0, 0]).is_none());
    }

    #[test]
    fn vectors_of_norm_on_identity_form() {
        let g = identity();
        assert_eq!(vectors_of_norm(&g, 1).len(), 16);
        assert_eq!(vectors_of_norm(&g, 2).len(), 112);
    }

    #[test]
    fn rank_detects_dependence() {
        let a = [1, 2, 0, 0, 0, 0, 0, 0];
        let b = [2, 4, 0, 0, 0, 0, 0, 0];
        let c = [0, 0, 1, 0, 0, 0, 0, 0];
        assert_eq!(rank(&[a, b, c]), 2);
    }
}
