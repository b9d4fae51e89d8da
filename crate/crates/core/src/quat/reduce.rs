//! LLL reduction and exact short-vector enumeration for positive definite integral
//! quadratic forms `Q(x) = x^T G x`.

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::integer::{isqrt_i128, Rational};

/// A positive definite form after LLL, with the data needed for enumeration.
#[derive(Clone, Debug)]
pub struct ReducedForm {
    n: usize,
    /// Rows of `u` express the reduced basis in the original one.
    u: Vec<Vec<i128>>,
    gram: Vec<Vec<i128>>,
    // Q(x) * scale = sum_k f[k] * (e[k] x_k + sum_{j>k} m[k][j] x_j)^2
    scale: i128,
    f: Vec<i128>,
    e: Vec<i128>,
    m: Vec<Vec<i128>>,
}

fn q(x: i128) -> Rational {
    Rational::from_integer(x.into())
}

fn to_i(x: &Rational) -> i128 {
    assert!(x.is_integer());
    x.to_integer().to_i128().expect("enumeration data exceeds 128 bits")
}

fn lll(gram: &[Vec<i128>]) -> (Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let n = gram.len();
    let mut g: Vec<Vec<i128>> = gram.to_vec();
    let mut u: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();
    let delta = Rational::new(3.into(), 4.into());

    let gso = |g: &Vec<Vec<i128>>| {
        let mut mu = vec![vec![Rational::zero(); n]; n];
        let mut b = vec![Rational::zero(); n];
        for i in 0..n {
            for j in 0..i {
                let mut s = q(g[i][j]);
                for k in 0..j {
                    s -= &mu[j][k] * &mu[i][k] * &b[k];
                }
                mu[i][j] = s / &b[j];
            }
            let mut s = q(g[i][i]);
            for k in 0..i {
                s -= &mu[i][k] * &mu[i][k] * &b[k];
            }
            b[i] = s;
        }
        (mu, b)
    };

    let mut k = 1;
    while k < n {
        // size-reduce row k against rows k-1..0
        for j in (0..k).rev() {
            let (mu, _) = gso(&g);
            let c = mu[k][j].round().to_integer().to_i128().unwrap();
            if c != 0 {
                apply(&mut g, &mut u, k, j, c);
            }
        }
        let (mu, b) = gso(&g);
        let lhs = &b[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &b[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            g.swap(k, k - 1);
            for row in g.iter_mut() {
                row.swap(k, k - 1);
            }
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    (u, g)
}

/// Basis change `b_i <- b_i - c b_j` on the Gram matrix and transform.
fn apply(g: &mut [Vec<i128>], u: &mut [Vec<i128>], i: usize, j: usize, c: i128) {
    let n = g.len();
    for t in 0..n {
        u[i][t] -= c * u[j][t];
    }
    let gjj = g[j][j];
    let gij = g[i][j];
    let gii = g[i][i];
    for t in 0..n {
        if t != i {
            g[i][t] -= c * g[j][t];
            g[t][i] = g[i][t];
        }
    }
    g[i][i] = gii - 2 * c * gij + c * c * gjj;
}

impl ReducedForm {
    pub fn new(gram: &[Vec<i128>]) -> Self {
        let n = gram.len();
        let (u, g) = lll(gram);
        // LDL^T: Q = sum_k d_k (x_k + sum_{j>k} mu[j][k] x_j)^2 built from the last variable up,
        // so that enumeration fixes x_{n-1} first.
        let mut mu = vec![vec![Rational::zero(); n]; n];
        let mut d = vec![Rational::zero(); n];
        let mut a: Vec<Vec<Rational>> = g.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        for k in 0..n {
            d[k] = a[k][k].clone();
            assert!(d[k].is_positive(), "form is not positive definite");
            for j in k + 1..n {
                mu[j][k] = &a[k][j] / &d[k];
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &mu[i][k] * &mu[j][k] * &d[k];
                    a[i][j] -= t;
                }
            }
        }
        let mut e = vec![0i128; n];
        let mut m = vec![vec![0i128; n]; n];
        let mut fr = vec![Rational::zero(); n];
        for k in 0..n {
            let mut l = num_bigint::BigInt::one();
            for j in k + 1..n {
                l = l.lcm(mu[j][k].denom());
            }
            e[k] = l.to_i128().unwrap();
            for j in k + 1..n {
                m[k][j] = to_i(&(&mu[j][k] * q(e[k])));
            }
            fr[k] = &d[k] / q(e[k] * e[k]);
        }
        let mut s = num_bigint::BigInt::one();
        for x in &fr {
            s = s.lcm(x.denom());
        }
        let scale = s.to_i128().unwrap();
        let f = fr.iter().map(|x| to_i(&(x * q(scale)))).collect();
        Self {
            n,
            u,
            gram: g,
            scale,
            f,
            e,
            m,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn reduced_gram(&self) -> &[Vec<i128>] {
        &self.gram
    }

    /// Minimum of `Q` over nonzero vectors of the original lattice.
    pub fn minimum(&self) -> i128 {
        (0..self.n).map(|i| self.gram[i][i]).min().map_or(0, |upper| {
            self.enumerate(upper)
                .into_iter()
                .map(|(_, v)| v)
                .min()
                .unwrap_or(upper)
        })
    }

    /// All nonzero `x` (original coordinates, both signs) with `Q(x) <= bound`.
    pub fn enumerate(&self, bound: i128) -> Vec<(Vec<i128>, i128)> {
        let mut out = Vec::new();
        self.visit(bound, &mut |y, val| {
            out.push((self.to_original(y), val));
        });
        out
    }

    /// Number of nonzero vectors with `Q(x) = v`, for each `v <= bound`.
    pub fn theta(&self, bound: i128) -> Vec<u64> {
        let mut t = vec![0u64; bound as usize + 1];
        self.visit(bound, &mut |_, v| t[v as usize] += 1);
        t
    }

    /// Some vector with `Q(x) = value`, if one exists.
    pub fn find(&self, value: i128) -> Option<Vec<i128>> {
        let mut found = None;
        self.visit_until(value, &mut |y, v| {
            if v == value {
                found = Some(self.to_original(y));
                true
            } else {
                false
            }
        });
        found
    }

    fn to_original(&self, y: &[i128]) -> Vec<i128> {
        (0..self.n)
            .map(|t| (0..self.n).map(|i| y[i] * self.u[i][t]).sum())
            .collect()
    }

    fn visit(&self, bound: i128, cb: &mut dyn FnMut(&[i128], i128)) {
        self.visit_until(bound, &mut |y, v| {
            cb(y, v);
            false
        });
    }

    /// Depth-first Fincke-Pohst walk; `cb` returning true stops the walk.
    fn visit_until(&self, bound: i128, cb: &mut dyn FnMut(&[i128], i128) -> bool) {
        if bound <= 0 || self.n == 0 {
            return;
        }
        let n = self.n;
        let mut x = vec![0i128; n];
        let total = bound * self.scale;
        self.walk(n - 1, total, total, &mut x, cb);
    }

    fn walk(
        &self,
        k: usize,
        total: i128,
        budget: i128,
        x: &mut Vec<i128>,
        cb: &mut dyn FnMut(&[i128], i128) -> bool,
    ) -> bool {
        let t: i128 = (k + 1..self.n).map(|j| self.m[k][j] * x[j]).sum();
        let ymax = isqrt_i128(budget / self.f[k]);
        let e = self.e[k];
        let lo = num_integer::Integer::div_ceil(&(-ymax - t), &e);
        let hi = num_integer::Integer::div_floor(&(ymax - t), &e);
        for c in lo..=hi {
            let y = e * c + t;
            let rest = budget - self.f[k] * y * y;
            if rest < 0 {
                continue;
            }
            x[k] = c;
            if k == 0 {
                if x.iter().any(|&v| v != 0) {
                    let used = total - rest;
                    debug_assert_eq!(used % self.scale, 0);
                    if cb(x, used / self.scale) {
                        return true;
                    }
                }
            } else if self.walk(k - 1, total, rest, x, cb) {
                return true;
            }
        }
        x[k] = 0;
        false
    }
}

/// `x^T G x`
pub fn evaluate(gram: &[Vec<i128>], x: &[i128]) -> i128 {
    let n = gram.len();
    let mut s = 0;
    for i in 0..n {
        for j in 0..n {
            s += x[i] * gram[i][j] * x[j];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(g: &[Vec<i128>], bound: i128, r: i128) -> Vec<u64> {
        let mut t = vec![0u64; bound as usize + 1];
        let n = g.len();
        let total = (2 * r + 1).pow(n as u32);
        for idx in 0..total {
            let mut x = vec![0i128; n];
            let mut v = idx;
            for c in x.iter_mut() {
                *c = v % (2 * r + 1) - r;
                v /= 2 * r + 1;
            }
            if x.iter().all(|&c| c == 0) {
                continue;
            }
            let q = evaluate(g, &x);
            if q <= bound {
                t[q as usize] += 1;
            }
        }
        t
    }

    #[test]
    fn sum_of_four_squares() {
        let g: Vec<Vec<i128>> = (0..4).map(|i| (0..4).map(|j| i128::from(i == j)).collect()).collect();
        let r = ReducedForm::new(&g);
        let t = r.theta(5);
        // r_4(n) = 8 * sum of divisors not divisible by 4
        assert_eq!(t, vec![0, 8, 24, 32, 24, 48]);
        assert_eq!(r.minimum(), 1);
    }

    #[test]
    fn skewed_form() {
        // a badly reduced basis of Z^2 with the standard form
        let g = vec![vec![1, 10], vec![10, 101]];
        let r = ReducedForm::new(&g);
        assert_eq!(r.theta(2), vec![0, 4, 4]);
        for (x, v) in r.enumerate(2) {
            assert_eq!(evaluate(&g, &x), v);
        }
    }

    proptest! {
        #[test]
        fn theta_matches_brute_force(entries in proptest::collection::vec(-3i128..4, 16)) {
            // G = A^T A + I is positive definite.
            let n = 4;
            let a: Vec<Vec<i128>> = (0..n).map(|i| entries[i * n..(i + 1) * n].to_vec()).collect();
            let g: Vec<Vec<i128>> = (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|k| a[k][i] * a[k][j]).sum::<i128>() + i128::from(i == j)).collect())
                .collect();
            let bound = 6;
            // eigenvalues >= 1 so |x_i|^2 <= Q(x) <= 6 bounds coordinates by 2.
            let expected = brute(&g, bound, 2);
            let r = ReducedForm::new(&g);
            prop_assert_eq!(r.theta(bound), expected);
            for (x, v) in r.enumerate(bound) {
                prop_assert_eq!(evaluate(&g, &x), v);
            }
        }
    }
}
