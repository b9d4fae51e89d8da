//! Kronecker and Hilbert symbols.

use serde::{Deserialize, Serialize};

use super::integer::valuation;

/// Kronecker symbol `(a/n)` with the usual extension to even and negative `n`.
pub fn kronecker_symbol(a: i64, n: i64) -> i32 {
    let (mut a, mut n) = (a as i128, n as i128);
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut k = 1i32;
    let v = n.trailing_zeros();
    n >>= v;
    if v % 2 == 1 && (a.rem_euclid(8) == 3 || a.rem_euclid(8) == 5) {
        k = -k;
    }
    if n < 0 {
        n = -n;
        if a < 0 {
            k = -k;
        }
    }
    a = a.rem_euclid(n);
    // n is odd and positive from here on: Jacobi symbol.
    while a != 0 {
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            k = -k;
        }
        if a % 4 == 3 && n % 4 == 3 {
            k = -k;
        }
        let r = n % a;
        n = a;
        a = r;
    }
    if n == 1 {
        k
    } else {
        0
    }
}

/// A place of Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Finite(u64),
    Infinite,
}

fn unit_part(n: i128, p: i128) -> (u32, i128) {
    let v = valuation(n, p);
    (v, n / p.pow(v))
}

/// Hilbert symbol `(a, b)_v` in `{-1, 1}` for nonzero integers.
pub fn hilbert_symbol(a: i64, b: i64, v: Place) -> i32 {
    assert!(a != 0 && b != 0, "hilbert symbol of zero");
    match v {
        Place::Infinite => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let (alpha, u) = unit_part(a as i128, 2);
            let (beta, w) = unit_part(b as i128, 2);
            let eps = |x: i128| ((x.rem_euclid(8) - 1) / 2) % 2;
            let omega = |x: i128| {
                let r = x.rem_euclid(8);
                if r == 3 || r == 5 {
                    1
                } else {
                    0
                }
            };
            let e = eps(u) * eps(w) + alpha as i128 * omega(w) + beta as i128 * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Finite(p) => {
            let pi = p as i128;
            let (alpha, u) = unit_part(a as i128, pi);
            let (beta, w) = unit_part(b as i128, pi);
            let mut s = 1i32;
            if (alpha * beta) % 2 == 1 && pi % 4 == 3 {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= kronecker_symbol(u as i64, p as i64);
            }
            if alpha % 2 == 1 {
                s *= kronecker_symbol(w as i64, p as i64);
            }
            s
        }
    }
}
