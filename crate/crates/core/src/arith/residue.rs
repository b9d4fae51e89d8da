use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer as _;
use num_traits::{One, Zero};

use super::integer::{ext_gcd, Integer};

/// An element of `Z/mZ`, stored as its least nonnegative representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueInt {
    modulus: Integer,
    value: Integer,
}

impl ResidueInt {
    pub fn new(value: impl Into<Integer>, modulus: impl Into<Integer>) -> Self {
        let modulus = modulus.into();
        assert!(modulus > Integer::one(), "modulus must exceed 1");
        let value = value.into().mod_floor(&modulus);
        Self { modulus, value }
    }

    pub fn value(&self) -> &Integer {
        &self.value
    }

    pub fn modulus(&self) -> &Integer {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn inverse(&self) -> Option<Self> {
        let (g, x, _) = ext_gcd(&self.value, &self.modulus);
        g.is_one().then(|| Self::new(x, self.modulus.clone()))
    }

    pub fn pow(&self, e: u64) -> Self {
        Self {
            modulus: self.modulus.clone(),
            value: self.value.modpow(&Integer::from(e), &self.modulus),
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.modulus, other.modulus, "residues with different moduli");
    }
}

impl fmt::Display for ResidueInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

impl Add for &ResidueInt {
    type Output = ResidueInt;
    fn add(self, rhs: &ResidueInt) -> ResidueInt {
        self.check(rhs);
        ResidueInt::new(&self.value + &rhs.value, self.modulus.clone())
    }
}

impl Sub for &ResidueInt {
    type Output = ResidueInt;
    fn sub(self, rhs: &ResidueInt) -> ResidueInt {
        self.check(rhs);
        ResidueInt::new(&self.value - &rhs.value, self.modulus.clone())
    }
}

impl Mul for &ResidueInt {
    type Output = ResidueInt;
    fn mul(self, rhs: &ResidueInt) -> ResidueInt {
        self.check(rhs);
        ResidueInt::new(&self.value * &rhs.value, self.modulus.clone())
    }
}

impl Neg for &ResidueInt {
    type Output = ResidueInt;
    fn neg(self) -> ResidueInt {
        ResidueInt::new(-&self.value, self.modulus.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_operations() {
        let a = ResidueInt::new(-4, 5);
        assert_eq!(a.value(), &Integer::from(1));
        let b = ResidueInt::new(3, 5);
        assert_eq!((&a + &b).value(), &Integer::from(4));
        assert_eq!((&a - &b).value(), &Integer::from(3));
        assert_eq!((&b * &b).value(), &Integer::from(4));
        assert_eq!(b.inverse().unwrap().value(), &Integer::from(2));
        assert!(ResidueInt::new(2, 4).inverse().is_none());
        assert_eq!(b.pow(4).value(), &Integer::from(1));
        assert_eq!((-&b).value(), &Integer::from(2));
    }
}
