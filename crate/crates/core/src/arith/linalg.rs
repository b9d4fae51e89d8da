//! Exact integer and mod-p linear algebra: Hermite and Smith normal forms,
//! saturated integer kernels, linear Diophantine systems, and F_p kernels.
//!
//! Matrices are `Vec<Vec<T>>` in row-major order. The integer routines are generic
//! over `i128` (lattice kernels) and `BigInt` (Hecke modules, class groups).

use std::fmt::Debug;

use num_integer::Integer;
use num_traits::Signed;

use crate::error::{Error, Result};

pub trait Int: Integer + Signed + Clone + Debug {}
impl<T: Integer + Signed + Clone + Debug> Int for T {}

pub type Matrix<T> = Vec<Vec<T>>;

pub fn identity<T: Int>(n: usize) -> Matrix<T> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Matrix<T> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul<T: Int>(a: &[Vec<T>], b: &[Vec<T>]) -> Matrix<T> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "dimension mismatch");
            (0..cols)
                .map(|j| {
                    let mut s = T::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() {
                            s = s + x.clone() * b[k][j].clone();
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<T: Int>(a: &[Vec<T>], x: &[T]) -> Vec<T> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(T::zero(), |s, (r, v)| s + r.clone() * v.clone())
        })
        .collect()
}

pub fn vec_mat<T: Int>(x: &[T], a: &[Vec<T>]) -> Vec<T> {
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    (0..cols)
        .map(|j| {
            x.iter()
                .zip(a)
                .fold(T::zero(), |s, (v, row)| s + v.clone() * row[j].clone())
        })
        .collect()
}

/// Row-style Hermite reduction on the first `pivot_cols` columns of `rows`; remaining
/// columns ride along (they carry a transformation when `rows = [A | I]`).
/// Returns the rank; rows `0..rank` are the echelon rows, later rows are zero on the pivot block.
fn echelon<T: Int>(rows: &mut [Vec<T>], pivot_cols: usize) -> usize {
    let m = rows.len();
    let mut r = 0;
    for j in 0..pivot_cols {
        if r == m {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..m {
                if !rows[i][j].is_zero()
                    && best.map_or(true, |b| rows[i][j].abs() < rows[b][j].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(r, b);
            let mut done = true;
            for i in r + 1..m {
                if rows[i][j].is_zero() {
                    continue;
                }
                let q = rows[i][j].div_floor(&rows[r][j]);
                let (head, tail) = rows.split_at_mut(i);
                let piv = &head[r];
                for (x, y) in tail[0].iter_mut().zip(piv) {
                    if !y.is_zero() {
                        *x = x.clone() - q.clone() * y.clone();
                    }
                }
                if !rows[i][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[r][j].is_zero() {
            continue;
        }
        if rows[r][j].is_negative() {
            for x in rows[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for k in 0..r {
            if rows[k][j].is_zero() {
                continue;
            }
            let q = rows[k][j].div_floor(&rows[r][j]);
            let (head, tail) = rows.split_at_mut(r);
            for (x, y) in head[k].iter_mut().zip(&tail[0]) {
                if !y.is_zero() {
                    *x = x.clone() - q.clone() * y.clone();
                }
            }
        }
        r += 1;
    }
    r
}

/// Hermite normal form of the row span: nonzero rows only, pivots positive,
/// entries above each pivot reduced into `[0, pivot)`.
pub fn hnf<T: Int>(rows: &[Vec<T>]) -> Matrix<T> {
    if rows.is_empty() {
        return Vec::new();
    }
    let n = rows[0].len();
    let mut a = rows.to_vec();
    let r = echelon(&mut a, n);
    a.truncate(r);
    a
}

/// HNF together with a unimodular `U` such that `U * A = H` (H keeps its zero rows).
pub fn hnf_with_transform<T: Int>(a: &[Vec<T>]) -> (Matrix<T>, Matrix<T>, usize) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut aug: Matrix<T> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v = row.clone();
            v.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
            v
        })
        .collect();
    let rank = echelon(&mut aug, n);
    let h = aug.iter().map(|r| r[..n].to_vec()).collect();
    let u = aug.iter().map(|r| r[n..].to_vec()).collect();
    (h, u, rank)
}

/// Saturated basis (in HNF) of the right kernel `{x in Z^n : A x = 0}`.
pub fn integer_kernel<T: Int>(a: &[Vec<T>], n: usize) -> Matrix<T> {
    let at: Matrix<T> = if a.is_empty() {
        vec![Vec::new(); n]
    } else {
        transpose(a)
    };
    let (_, u, rank) = hnf_with_transform(&at);
    let ker: Matrix<T> = u[rank..].to_vec();
    hnf(&ker)
}

/// Saturation `(span V ⊗ Q) ∩ Z^n` of a set of row vectors.
pub fn saturate<T: Int>(rows: &[Vec<T>], n: usize) -> Matrix<T> {
    let k = integer_kernel(rows, n);
    integer_kernel(&k, n)
}

/// A solution set `particular + Z-span(kernel)` of an integer linear system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerSolution<T> {
    pub particular: Vec<T>,
    pub kernel: Matrix<T>,
}

/// Solves `A x = b` over the integers. An incompatible system is `Error::Inconsistent`,
/// distinct from a consistent system with trivial kernel.
pub fn solve_integer<T: Int>(a: &[Vec<T>], b: &[T], n: usize) -> Result<IntegerSolution<T>> {
    let m = a.len();
    assert_eq!(b.len(), m);
    let at: Matrix<T> = if m == 0 { vec![Vec::new(); n] } else { transpose(a) };
    let (h, u, rank) = hnf_with_transform(&at);
    let mut y: Vec<T> = Vec::with_capacity(rank);
    let mut residual = b.to_vec();
    for i in 0..rank {
        let j = (0..m)
            .find(|&j| !h[i][j].is_zero())
            .expect("echelon row has a pivot");
        let (q, rem) = residual[j].div_rem(&h[i][j]);
        if !rem.is_zero() {
            return Err(Error::Inconsistent);
        }
        for (res, hv) in residual.iter_mut().zip(&h[i]) {
            *res = res.clone() - q.clone() * hv.clone();
        }
        y.push(q);
    }
    if residual.iter().any(|x| !x.is_zero()) {
        return Err(Error::Inconsistent);
    }
    let mut x = vec![T::zero(); n];
    for (yi, ui) in y.iter().zip(&u) {
        for (xk, uk) in x.iter_mut().zip(ui) {
            *xk = xk.clone() + yi.clone() * uk.clone();
        }
    }
    let kernel = hnf(&u[rank..]);
    Ok(IntegerSolution {
        particular: x,
        kernel,
    })
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant<T: Int>(a: &[Vec<T>]) -> T {
    let n = a.len();
    if n == 0 {
        return T::one();
    }
    let mut m = a.to_vec();
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(s) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return T::zero();
            };
            m.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].clone() * m[k][k].clone() - m[i][k].clone() * m[k][j].clone();
                m[i][j] = v / prev.clone();
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Smith normal form `U A V = D` with `D` diagonal, each entry dividing the next.
#[derive(Clone, Debug)]
pub struct Smith<T> {
    pub diagonal: Vec<T>,
    pub u: Matrix<T>,
    pub v: Matrix<T>,
}

pub fn smith_normal_form<T: Int>(a: &[Vec<T>]) -> Smith<T> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut d = a.to_vec();
    let mut u: Matrix<T> = identity(m);
    let mut v: Matrix<T> = identity(n);

    fn row_op<T: Int>(mat: &mut [Vec<T>], dst: usize, src: usize, q: &T) {
        let (lo, hi) = (dst.min(src), dst.max(src));
        let (head, tail) = mat.split_at_mut(hi);
        let (dr, sr) = if dst < src {
            (&mut head[lo], &tail[0])
        } else {
            (&mut tail[0], &head[lo])
        };
        for (x, y) in dr.iter_mut().zip(sr.iter()) {
            *x = x.clone() - q.clone() * y.clone();
        }
    }
    fn col_op<T: Int>(mat: &mut [Vec<T>], dst: usize, src: usize, q: &T) {
        for row in mat.iter_mut() {
            let s = row[src].clone();
            row[dst] = row[dst].clone() - q.clone() * s;
        }
    }
    fn swap_cols<T>(mat: &mut [Vec<T>], i: usize, j: usize) {
        for row in mat.iter_mut() {
            row.swap(i, j);
        }
    }

    let mut diagonal = Vec::new();
    for t in 0..m.min(n) {
        // Pivot: smallest nonzero entry of the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !d[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        d.swap(t, bi);
        u.swap(t, bi);
        swap_cols(&mut d, t, bj);
        swap_cols(&mut v, t, bj);
        loop {
            let mut changed = false;
            for i in t + 1..m {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                row_op(&mut d, i, t, &q);
                row_op(&mut u, i, t, &q);
                if !d[i][t].is_zero() {
                    d.swap(t, i);
                    u.swap(t, i);
                    changed = true;
                }
            }
            for j in t + 1..n {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                col_op(&mut d, j, t, &q);
                col_op(&mut v, j, t, &q);
                if !d[t][j].is_zero() {
                    swap_cols(&mut d, t, j);
                    swap_cols(&mut v, t, j);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // Divisibility: fold an offending row into the pivot row and repeat.
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[i][j].is_multiple_of(&d[t][t])));
            match bad {
                Some(i) => {
                    let minus_one = -T::one();
                    row_op(&mut d, t, i, &minus_one);
                    row_op(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        diagonal.push(d[t][t].clone());
    }
    Smith { diagonal, u, v }
}

// ---------------------------------------------------------------------------
// Linear algebra over F_p.

fn inv_mod(a: u64, p: u64) -> u64 {
    let (g, x, _) = crate::arith::integer::ext_gcd(&(a as i128), &(p as i128));
    assert_eq!(g, 1, "{a} not invertible mod {p}");
    x.rem_euclid(p as i128) as u64
}

/// Reduced row echelon form mod p; returns the pivot columns.
pub fn rref_mod_p(a: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let m = a.len();
    if m == 0 {
        return Vec::new();
    }
    let n = a[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for j in 0..n {
        if r == m {
            break;
        }
        let Some(s) = (r..m).find(|&i| a[i][j] % p != 0) else {
            continue;
        };
        a.swap(r, s);
        let inv = inv_mod(a[r][j] % p, p);
        for x in a[r].iter_mut() {
            *x = (*x % p) * inv % p;
        }
        for i in 0..m {
            if i != r && a[i][j] % p != 0 {
                let f = a[i][j] % p;
                let (head, tail) = a.split_at_mut(i.max(r));
                let (row, piv) = if i < r {
                    (&mut head[i], &tail[0])
                } else {
                    (&mut tail[0], &head[r])
                };
                for (x, y) in row.iter_mut().zip(piv.iter()) {
                    *x = (*x % p + p * p - f * y % p) % p;
                }
            }
        }
        pivots.push(j);
        r += 1;
    }
    pivots
}

pub fn rank_mod_p(a: &[Vec<u64>], p: u64) -> usize {
    let mut m = a.to_vec();
    rref_mod_p(&mut m, p).len()
}

/// Basis of the right kernel `{x : A x = 0 mod p}`, one vector per free column.
pub fn kernel_mod_p(a: &[Vec<u64>], n: usize, p: u64) -> Matrix<u64> {
    let mut m: Matrix<u64> = a.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let pivots = rref_mod_p(&mut m, p);
    let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![0u64; n];
            x[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = (p - m[r][f] % p) % p;
            }
            x
        })
        .collect()
}

/// Intersection of two row spaces in F_p^n, as a row basis.
pub fn intersect_mod_p(u: &[Vec<u64>], v: &[Vec<u64>], n: usize, p: u64) -> Matrix<u64> {
    if u.is_empty() || v.is_empty() {
        return Vec::new();
    }
    // x = sum a_i u_i = sum b_j v_j  <=>  [U; -V]^T (a, b) = 0.
    let k = u.len() + v.len();
    let cols: Matrix<u64> = (0..n)
        .map(|c| {
            u.iter()
                .map(|r| r[c] % p)
                .chain(v.iter().map(|r| (p - r[c] % p) % p))
                .collect()
        })
        .collect();
    let ker = kernel_mod_p(&cols, k, p);
    let mut out: Matrix<u64> = ker
        .iter()
        .map(|coef| {
            (0..n)
                .map(|c| {
                    u.iter()
                        .zip(coef)
                        .fold(0u64, |s, (r, a)| (s + r[c] % p * a) % p)
                })
                .collect()
        })
        .collect();
    let piv = rref_mod_p(&mut out, p);
    out.truncate(piv.len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    #[test]
    fn diophantine_two_term() {
        let sol = solve_integer(&[vec![2i128, 3]], &[-1], 2).unwrap();
        let [x, y] = [sol.particular[0], sol.particular[1]];
        assert_eq!(2 * x + 3 * y, -1);
        assert_eq!(sol.kernel.len(), 1);
        let k = &sol.kernel[0];
        assert_eq!(k[0].abs(), 3);
        assert_eq!(k[1].abs(), 2);
        assert_eq!(2 * k[0] + 3 * k[1], 0);
        // the canonical particular solution from the extended gcd
        assert_eq!(sol.particular, vec![1, -1]);
    }

    #[test]
    fn identity_kernel_is_trivial() {
        let id: Matrix<i128> = identity(3);
        assert!(integer_kernel(&id, 3).is_empty());
    }

    #[test]
    fn mod_p_kernel_rank_one() {
        let k = kernel_mod_p(&[vec![1, 1], vec![2, 2]], 2, 5);
        assert_eq!(k, vec![vec![4, 1]]);
    }

    #[test]
    fn inconsistent_distinct_from_empty_kernel() {
        let r = solve_integer(&[vec![2i128, 4]], &[1], 2);
        assert_eq!(r, Err(Error::Inconsistent));
        let ok = solve_integer(&[vec![1i128, 0], vec![0, 1]], &[3, 4], 2).unwrap();
        assert!(ok.kernel.is_empty());
        assert_eq!(ok.particular, vec![3, 4]);
    }

    #[test]
    fn smith_of_known_matrix() {
        let a: Matrix<BigInt> = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let s = smith_normal_form(&a);
        let d: Vec<i64> = s.diagonal.iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert_eq!(d, vec![2, 6, 12]);
        let uav = mat_mul(&mat_mul(&s.u, &a), &s.v);
        for (i, row) in uav.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i == j {
                    assert_eq!(x, &s.diagonal[i]);
                } else {
                    assert_eq!(x, &BigInt::from(0));
                }
            }
        }
    }

    #[test]
    fn saturation_removes_index() {
        let s = saturate(&[vec![2i128, 4, 6]], 3);
        assert_eq!(s, vec![vec![1, 2, 3]]);
    }

    proptest! {
        #[test]
        fn hnf_transform_is_consistent(rows in proptest::collection::vec(proptest::collection::vec(-20i128..20, 4), 1..7)) {
            let (h, u, rank) = hnf_with_transform(&rows);
            prop_assert_eq!(mat_mul(&u, &rows), h.clone());
            prop_assert_eq!(determinant(&u).abs(), 1);
            for row in &h[rank..] {
                prop_assert!(row.iter().all(|x| *x == 0));
            }
        }

        #[test]
        fn kernel_vectors_annihilate(rows in proptest::collection::vec(proptest::collection::vec(-9i128..9, 5), 1..4)) {
            let k = integer_kernel(&rows, 5);
            for v in &k {
                prop_assert!(mat_vec(&rows, v).iter().all(|x| *x == 0));
            }
            let rank = hnf(&rows).len();
            prop_assert_eq!(k.len(), 5 - rank);
        }
    }
}
