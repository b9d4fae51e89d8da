//! Elements of Z[ζ_n], reduced modulo the n-th cyclotomic polynomial.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};

use super::integer::{euler_phi, Integer};
use super::poly::{cyclotomic_polynomial, FpPoly, ZPoly};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicInt {
    n: u64,
    coeffs: Vec<Integer>,
}

impl CyclotomicInt {
    fn reduce(n: u64, raw: Vec<Integer>) -> Self {
        let phi = cyclotomic_polynomial(n);
        let (_, r) = ZPoly::new(raw).divrem_monic(&phi);
        let d = euler_phi(n) as usize;
        let mut coeffs: Vec<Integer> = r.coeffs().to_vec();
        coeffs.resize(d, Integer::zero());
        Self { n, coeffs }
    }

    pub fn from_integer(n: u64, x: impl Into<Integer>) -> Self {
        Self::reduce(n, vec![x.into()])
    }

    pub fn zero(n: u64) -> Self {
        Self::from_integer(n, 0)
    }

    pub fn one(n: u64) -> Self {
        Self::from_integer(n, 1)
    }

    /// ζ_n^k for any integer k.
    pub fn zeta_pow(n: u64, k: i64) -> Self {
        let e = k.rem_euclid(n as i64) as usize;
        let mut raw = vec![Integer::zero(); e + 1];
        raw[e] = Integer::one();
        Self::reduce(n, raw)
    }

    pub fn conductor(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational integer this element equals, if any.
    pub fn to_integer(&self) -> Option<Integer> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| self.coeffs[0].clone())
    }

    /// Complex conjugation ζ ↦ ζ⁻¹.
    pub fn conj(&self) -> Self {
        let n = self.n as usize;
        let mut raw = vec![Integer::zero(); n.max(1)];
        for (k, c) in self.coeffs.iter().enumerate() {
            raw[(n - k) % n] += c;
        }
        Self::reduce(self.n, raw)
    }

    /// x · conj(x)
    pub fn abs_squared(&self) -> Self {
        self * &self.conj()
    }

    /// Reduction into F_p[x]/(g) for an irreducible factor g of Φ_n mod p;
    /// returns the residue polynomial.
    pub fn reduce_mod_factor(&self, g: &FpPoly) -> FpPoly {
        let p = g.modulus();
        let pb = Integer::from(p);
        let f = FpPoly::new(
            p,
            self.coeffs
                .iter()
                .map(|c| c.mod_floor(&pb).to_u64().unwrap())
                .collect(),
        );
        f.rem(g)
    }

    /// Whether x lies in every prime of Z[ζ_n] above p.
    pub fn vanishes_mod_all_primes_above(&self, p: u64) -> bool {
        cyclotomic_polynomial(self.n)
            .reduce_mod(p)
            .factor()
            .iter()
            .all(|(g, _)| self.reduce_mod_factor(g).is_zero())
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.n, o.n, "cyclotomic elements of different conductors");
    }
}

impl Add for &CyclotomicInt {
    type Output = CyclotomicInt;
    fn add(self, o: &CyclotomicInt) -> CyclotomicInt {
        self.check(o);
        CyclotomicInt {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CyclotomicInt {
    type Output = CyclotomicInt;
    fn sub(self, o: &CyclotomicInt) -> CyclotomicInt {
        self.check(o);
        CyclotomicInt {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CyclotomicInt {
    type Output = CyclotomicInt;
    fn neg(self) -> CyclotomicInt {
        CyclotomicInt {
            n: self.n,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &CyclotomicInt {
    type Output = CyclotomicInt;
    fn mul(self, o: &CyclotomicInt) -> CyclotomicInt {
        self.check(o);
        let a = ZPoly::new(self.coeffs.clone());
        let b = ZPoly::new(o.coeffs.clone());
        CyclotomicInt::reduce(self.n, a.mul(&b).coeffs().to_vec())
    }
}

impl fmt::Display for CyclotomicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = ZPoly::new(self.coeffs.clone());
        let s = p.to_string().replace('x', "z");
        write!(f, "{s}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cube_roots_sum_to_zero() {
        let s = &(&CyclotomicInt::one(3) + &CyclotomicInt::zeta_pow(3, 1)) + &CyclotomicInt::zeta_pow(3, 2);
        assert!(s.is_zero());
    }

    #[test]
    fn five_zeta_has_norm_25() {
        let x = &CyclotomicInt::from_integer(3, 5) * &CyclotomicInt::zeta_pow(3, 1);
        assert_eq!(x.abs_squared().to_integer(), Some(Integer::from(25)));
        assert!(x.vanishes_mod_all_primes_above(5));
        assert!(!CyclotomicInt::zeta_pow(3, 1).vanishes_mod_all_primes_above(5));
    }

    #[test]
    fn conductor_one_and_two() {
        let a = CyclotomicInt::zeta_pow(2, 1);
        assert_eq!(a.to_integer(), Some(Integer::from(-1)));
        let b = CyclotomicInt::zeta_pow(1, 5);
        assert_eq!(b.to_integer(), Some(Integer::from(1)));
        assert_eq!(b.conj(), b);
    }

    proptest! {
        #[test]
        fn conj_involution_and_roots_of_unity(n in 1u64..25, k in -40i64..40,
                                              c in proptest::collection::vec(-9i64..9, 1..8)) {
            let x = CyclotomicInt::reduce(n, c.into_iter().map(Integer::from).collect());
            prop_assert_eq!(x.conj().conj(), x.clone());
            let z = CyclotomicInt::zeta_pow(n, k);
            prop_assert_eq!(z.abs_squared(), CyclotomicInt::one(n));
            let norm = x.abs_squared();
            prop_assert_eq!(norm.conj(), norm);
        }
    }
}
