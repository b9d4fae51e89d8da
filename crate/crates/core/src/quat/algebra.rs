//! Definite quaternion algebras (a, b) over Q and their elements.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::integer::{divisors, factor_u64, Rational};
use crate::arith::symbols::{hilbert_symbol, Place};
use crate::error::{Error, Result};

/// B = (a, b) with i² = a, j² = b, k = ij = -ji and a, b < 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuaternionAlgebra {
    a: i64,
    b: i64,
    ramified: Vec<u64>,
}

/// Coordinates in the basis 1, i, j, k.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuatElement(pub [Rational; 4]);

fn ramification_of(a: i64, b: i64) -> Vec<u64> {
    let mut primes: Vec<u64> = factor_u64(a.unsigned_abs())
        .into_iter()
        .chain(factor_u64(b.unsigned_abs()))
        .map(|(p, _)| p)
        .collect();
    primes.push(2);
    primes.sort_unstable();
    primes.dedup();
    primes
        .into_iter()
        .filter(|&p| hilbert_symbol(a, b, Place::Finite(p)) == -1)
        .collect()
}

impl QuaternionAlgebra {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a >= 0 || b >= 0 {
            return Err(Error::InvalidArgument(format!(
                "({a}, {b}) is not a definite algebra: both parameters must be negative"
            )));
        }
        Ok(Self {
            a,
            b,
            ramified: ramification_of(a, b),
        })
    }

    /// The definite algebra ramified exactly at the finite primes in `s` (and at infinity).
    pub fn construct_ramified(s: &[u64]) -> Result<Self> {
        let mut target = s.to_vec();
        target.sort_unstable();
        target.dedup();
        if target.len() != s.len() || target.iter().any(|&p| !crate::arith::integer::is_prime(p)) {
            return Err(Error::InvalidArgument(format!(
                "ramification set must consist of distinct primes: {s:?}"
            )));
        }
        if target.len() % 2 == 0 {
            return Err(Error::EvenRamification(target));
        }
        for prod in 1u64.. {
            for a in divisors(prod) {
                let b = prod / a;
                if a > b {
                    break;
                }
                let (a, b) = (-(a as i64), -(b as i64));
                if ramification_of(a, b) == target {
                    return Self::new(a, b);
                }
            }
        }
        unreachable!()
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn ramified_primes(&self) -> &[u64] {
        &self.ramified
    }

    pub fn is_ramified(&self, p: u64) -> bool {
        hilbert_symbol(self.a, self.b, Place::Finite(p)) == -1
    }

    /// Product of the finite ramified primes.
    pub fn discriminant(&self) -> u64 {
        self.ramified.iter().product()
    }

    pub fn mul(&self, x: &QuatElement, y: &QuatElement) -> QuatElement {
        let a = Rational::from_integer(self.a.into());
        let b = Rational::from_integer(self.b.into());
        let ab = &a * &b;
        let [x0, x1, x2, x3] = &x.0;
        let [y0, y1, y2, y3] = &y.0;
        QuatElement([
            x0 * y0 + &a * x1 * y1 + &b * x2 * y2 - &ab * x3 * y3,
            x0 * y1 + x1 * y0 - &b * x2 * y3 + &b * x3 * y2,
            x0 * y2 + x2 * y0 + &a * x1 * y3 - &a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        ])
    }

    /// Product on integer coordinate vectors.
    pub fn mul_int(&self, x: &[i128; 4], y: &[i128; 4]) -> [i128; 4] {
        let (a, b) = (self.a as i128, self.b as i128);
        [
            x[0] * y[0] + a * x[1] * y[1] + b * x[2] * y[2] - a * b * x[3] * y[3],
            x[0] * y[1] + x[1] * y[0] - b * x[2] * y[3] + b * x[3] * y[2],
            x[0] * y[2] + x[2] * y[0] + a * x[1] * y[3] - a * x[3] * y[1],
            x[0] * y[3] + x[3] * y[0] + x[1] * y[2] - x[2] * y[1],
        ]
    }

    pub fn nrd(&self, x: &QuatElement) -> Rational {
        let a = Rational::from_integer(self.a.into());
        let b = Rational::from_integer(self.b.into());
        let [x0, x1, x2, x3] = &x.0;
        x0 * x0 - &a * x1 * x1 - &b * x2 * x2 + &a * &b * x3 * x3
    }

    pub fn trd(&self, x: &QuatElement) -> Rational {
        &x.0[0] * Rational::from_integer(2.into())
    }

    pub fn conj(&self, x: &QuatElement) -> QuatElement {
        x.conj()
    }

    pub fn inverse(&self, x: &QuatElement) -> Option<QuatElement> {
        let n = self.nrd(x);
        (!n.is_zero()).then(|| x.conj().scale(&n.recip()))
    }

    /// T(x, y) = trd(x conj y) on integer coordinates.
    pub fn bilinear_int(&self, x: &[i128; 4], y: &[i128; 4]) -> i128 {
        let (a, b) = (self.a as i128, self.b as i128);
        2 * (x[0] * y[0] - a * x[1] * y[1] - b * x[2] * y[2] + a * b * x[3] * y[3])
    }

    pub fn nrd_int(&self, x: &[i128; 4]) -> i128 {
        self.bilinear_int(x, x) / 2
    }
}

impl QuatElement {
    pub fn from_ints(c: [i64; 4]) -> Self {
        Self(c.map(|x| Rational::from_integer(x.into())))
    }

    pub fn from_rational(q: Rational) -> Self {
        let z = Rational::zero();
        Self([q, z.clone(), z.clone(), z])
    }

    pub fn one() -> Self {
        Self::from_ints([1, 0, 0, 0])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_scalar(&self) -> bool {
        self.0[1..].iter().all(Zero::is_zero)
    }

    pub fn conj(&self) -> Self {
        let [x0, x1, x2, x3] = &self.0;
        Self([x0.clone(), -x1, -x2, -x3])
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self(self.0.clone().map(|x| x * q))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self(std::array::from_fn(|i| &self.0[i] - &o.0[i]))
    }
}

impl fmt::Display for QuatElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "i", "j", "k"];
        let mut first = true;
        for (c, n) in self.0.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let a = c.abs();
            if n.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{n}")?;
            } else {
                write!(f, "{a}*{n}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn construct_examples() {
        let b = QuaternionAlgebra::construct_ramified(&[2]).unwrap();
        assert_eq!((b.a(), b.b()), (-1, -1));
        let b = QuaternionAlgebra::construct_ramified(&[11]).unwrap();
        assert_eq!(b.ramified_primes(), &[11]);
        assert!(b.is_ramified(11));
        assert!(!b.is_ramified(5));
        let b = QuaternionAlgebra::construct_ramified(&[3]).unwrap();
        assert_eq!((b.a(), b.b()), (-1, -3));
        assert!(matches!(
            QuaternionAlgebra::construct_ramified(&[2, 3]),
            Err(Error::EvenRamification(_))
        ));
        let b = QuaternionAlgebra::new(-1, -11).unwrap();
        assert!(b.is_ramified(11) && !b.is_ramified(5));
        assert!(QuaternionAlgebra::new(-1, -1).unwrap().is_ramified(2));
    }

    #[test]
    fn norm_and_trace() {
        let b = QuaternionAlgebra::new(-1, -1).unwrap();
        let x = QuatElement::from_ints([1, 1, 1, 1]);
        assert_eq!(b.nrd(&x), q(4, 1));
        assert_eq!(b.trd(&QuatElement::from_ints([0, 1, 0, 0])), q(0, 1));
    }

    #[test]
    fn construct_recovers_every_small_set() {
        let primes = crate::arith::integer::primes_up_to(50);
        let mut sets: Vec<Vec<u64>> = primes.iter().map(|&p| vec![p]).collect();
        for (i, &p) in primes.iter().enumerate().take(6) {
            for (j, &r) in primes.iter().enumerate().skip(i + 1).take(5) {
                for &s in primes.iter().skip(j + 1).take(3) {
                    sets.push(vec![p, r, s]);
                }
            }
        }
        for s in sets {
            let b = QuaternionAlgebra::construct_ramified(&s).unwrap();
            assert_eq!(b.ramified_primes(), &s[..]);
            assert_eq!(hilbert_symbol(b.a(), b.b(), Place::Infinite), -1);
        }
    }

    fn elem() -> impl Strategy<Value = QuatElement> {
        proptest::array::uniform4((-20i64..20, 1i64..5))
            .prop_map(|c| QuatElement(c.map(|(n, d)| q(n, d))))
    }

    proptest! {
        #[test]
        fn algebra_laws(a in 1i64..30, b in 1i64..30, x in elem(), y in elem()) {
            let alg = QuaternionAlgebra::new(-a, -b).unwrap();
            // anti-automorphism
            prop_assert_eq!(alg.mul(&x, &y).conj(), alg.mul(&y.conj(), &x.conj()));
            // nrd = x conj x, trd = x + conj x
            let n = alg.mul(&x, &x.conj());
            prop_assert!(n.is_scalar());
            prop_assert_eq!(&n.0[0], &alg.nrd(&x));
            prop_assert_eq!(x.add(&x.conj()), QuatElement::from_rational(alg.trd(&x)));
            // Cayley-Hamilton
            let x2 = alg.mul(&x, &x);
            let ch = x2.sub(&x.scale(&alg.trd(&x))).add(&QuatElement::from_rational(alg.nrd(&x)));
            prop_assert!(ch.is_zero());
            // definiteness
            prop_assert!(alg.nrd(&x) >= q(0, 1));
            prop_assert_eq!(alg.nrd(&x).is_zero(), x.is_zero());
            // multiplicativity
            prop_assert_eq!(alg.nrd(&alg.mul(&x, &y)), alg.nrd(&x) * alg.nrd(&y));
        }
    }
}
