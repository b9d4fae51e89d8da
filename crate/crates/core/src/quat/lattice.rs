//! Full-rank Z-lattices in a quaternion algebra, stored as `(1/den) * H` with `H`
//! a 4x4 upper-triangular Hermite basis in the coordinates 1, i, j, k.
//!
//! The kernels run on `i128`; release builds keep overflow checks on, so an
//! out-of-range intermediate aborts instead of producing a wrong answer.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{Signed, ToPrimitive, Zero};

use super::algebra::{QuatElement, QuaternionAlgebra};
use crate::arith::integer::{exact_sqrt, gcd_i128, lcm_i128, Integer, Rational};
use crate::arith::linalg::{determinant, hnf, integer_kernel};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice {
    rows: [[i128; 4]; 4],
    den: i128,
}

fn to_i128(q: &Integer) -> Result<i128> {
    q.to_i128()
        .ok_or_else(|| Error::MalformedLattice(format!("coordinate {q} exceeds 128 bits")))
}

/// Integer vector and denominator with `x = v / d`.
pub fn element_to_int(x: &QuatElement) -> Result<([i128; 4], i128)> {
    let mut d = Integer::from(1);
    for c in &x.0 {
        d = d.lcm(c.denom());
    }
    let v: Vec<i128> = x
        .0
        .iter()
        .map(|c| to_i128(&(c.numer() * (&d / c.denom()))))
        .collect::<Result<_>>()?;
    Ok(([v[0], v[1], v[2], v[3]], to_i128(&d)?))
}

pub fn int_to_element(v: &[i128; 4], d: i128) -> QuatElement {
    QuatElement(v.map(|x| Rational::new(x.into(), d.into())))
}

impl Lattice {
    /// Lattice spanned by `gens / den`; fails unless the span has rank 4.
    pub fn from_generators(gens: &[[i128; 4]], den: i128) -> Result<Self> {
        assert!(den > 0);
        let rows: Vec<Vec<i128>> = gens.iter().map(|g| g.to_vec()).collect();
        let h = hnf(&rows);
        if h.len() != 4 {
            return Err(Error::MalformedLattice(format!("rank {} < 4", h.len())));
        }
        let mut out = [[0i128; 4]; 4];
        for (o, r) in out.iter_mut().zip(&h) {
            o.copy_from_slice(r);
        }
        Ok(Self::normalized(out, den))
    }

    pub fn from_elements(gens: &[QuatElement]) -> Result<Self> {
        let ints: Vec<([i128; 4], i128)> = gens.iter().map(element_to_int).collect::<Result<_>>()?;
        let den = ints.iter().fold(1, |l, (_, d)| lcm_i128(l, *d));
        let scaled: Vec<[i128; 4]> = ints
            .iter()
            .map(|(v, d)| v.map(|x| x * (den / d)))
            .collect();
        Self::from_generators(&scaled, den)
    }

    fn normalized(rows: [[i128; 4]; 4], den: i128) -> Self {
        let mut g = den;
        for r in &rows {
            for &x in r {
                g = gcd_i128(g, x);
            }
        }
        Self {
            rows: rows.map(|r| r.map(|x| x / g)),
            den: den / g,
        }
    }

    pub fn rows(&self) -> &[[i128; 4]; 4] {
        &self.rows
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn basis(&self) -> Vec<QuatElement> {
        self.rows.iter().map(|r| int_to_element(r, self.den)).collect()
    }

    pub fn standard(_alg: &QuaternionAlgebra) -> Self {
        Self::normalized(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
            1,
        )
    }

    /// Coordinates of `v / d` in this basis, if rational solutions exist (always, full rank).
    pub fn coordinates(&self, v: &[i128; 4], d: i128) -> Vec<Rational> {
        // rows are upper triangular: solve c H = v * den / d by forward substitution.
        let target: Vec<Rational> = v
            .iter()
            .map(|&x| Rational::new((x * self.den).into(), d.into()))
            .collect();
        let mut c = vec![Rational::zero(); 4];
        for j in 0..4 {
            let mut s = target[j].clone();
            for (i, ci) in c.iter().enumerate().take(j) {
                s -= ci * Rational::from_integer(self.rows[i][j].into());
            }
            c[j] = s / Rational::from_integer(self.rows[j][j].into());
        }
        c
    }

    pub fn contains_int(&self, v: &[i128; 4], d: i128) -> bool {
        self.coordinates(v, d).iter().all(|c| c.is_integer())
    }

    pub fn contains(&self, x: &QuatElement) -> bool {
        match element_to_int(x) {
            Ok((v, d)) => self.contains_int(&v, d),
            Err(_) => false,
        }
    }

    pub fn is_subset_of(&self, other: &Lattice) -> bool {
        self.rows.iter().all(|r| other.contains_int(r, self.den))
    }

    pub fn product(&self, other: &Lattice, alg: &QuaternionAlgebra) -> Lattice {
        let mut gens = Vec::with_capacity(16);
        for x in &self.rows {
            for y in &other.rows {
                gens.push(alg.mul_int(x, y));
            }
        }
        Self::from_generators(&gens, self.den * other.den).expect("product of full lattices")
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        let den = lcm_i128(self.den, other.den);
        let (s, t) = (den / self.den, den / other.den);
        let gens: Vec<[i128; 4]> = self
            .rows
            .iter()
            .map(|r| r.map(|x| x * s))
            .chain(other.rows.iter().map(|r| r.map(|x| x * t)))
            .collect();
        Self::from_generators(&gens, den).expect("sum of full lattices")
    }

    pub fn intersection(&self, other: &Lattice) -> Lattice {
        let den = lcm_i128(self.den, other.den);
        let (s, t) = (den / self.den, den / other.den);
        let m1: Vec<[i128; 4]> = self.rows.iter().map(|r| r.map(|x| x * s)).collect();
        let m2: Vec<[i128; 4]> = other.rows.iter().map(|r| r.map(|x| x * t)).collect();
        // (u, v) with u M1 = v M2.
        let cols: Vec<Vec<i128>> = (0..4)
            .map(|c| {
                m1.iter()
                    .map(|r| r[c])
                    .chain(m2.iter().map(|r| -r[c]))
                    .collect()
            })
            .collect();
        let ker = integer_kernel(&cols, 8);
        let gens: Vec<[i128; 4]> = ker
            .iter()
            .map(|k| {
                let mut v = [0i128; 4];
                for (i, r) in m1.iter().enumerate() {
                    for c in 0..4 {
                        v[c] += k[i] * r[c];
                    }
                }
                v
            })
            .collect();
        Self::from_generators(&gens, den).expect("intersection of full lattices")
    }

    pub fn conj(&self) -> Lattice {
        let gens: Vec<[i128; 4]> = self
            .rows
            .iter()
            .map(|r| [r[0], -r[1], -r[2], -r[3]])
            .collect();
        Self::from_generators(&gens, self.den).expect("conjugate lattice")
    }

    /// `(n/d) * L`
    pub fn scale(&self, n: i128, d: i128) -> Lattice {
        assert!(n != 0 && d != 0);
        let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
        let gens: Vec<[i128; 4]> = self.rows.iter().map(|r| r.map(|x| x * n)).collect();
        Self::from_generators(&gens, self.den * d).expect("scaled lattice")
    }

    pub fn scale_rational(&self, q: &Rational) -> Lattice {
        self.scale(to_i128(q.numer()).unwrap(), to_i128(q.denom()).unwrap())
    }

    /// `x * L`
    pub fn left_mul(&self, x: &QuatElement, alg: &QuaternionAlgebra) -> Lattice {
        let (v, d) = element_to_int(x).expect("element in range");
        let gens: Vec<[i128; 4]> = self.rows.iter().map(|r| alg.mul_int(&v, r)).collect();
        Self::from_generators(&gens, self.den * d).expect("nonzero multiplier")
    }

    /// `L * x`
    pub fn right_mul(&self, x: &QuatElement, alg: &QuaternionAlgebra) -> Lattice {
        let (v, d) = element_to_int(x).expect("element in range");
        let gens: Vec<[i128; 4]> = self.rows.iter().map(|r| alg.mul_int(r, &v)).collect();
        Self::from_generators(&gens, self.den * d).expect("nonzero multiplier")
    }

    /// Integer Gram matrix `G` of the trace form `T(x, y) = trd(x conj y)` on the
    /// unscaled rows; the true Gram matrix is `G / den²`.
    pub fn gram_int(&self, alg: &QuaternionAlgebra) -> [[i128; 4]; 4] {
        let mut g = [[0i128; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] = alg.bilinear_int(&self.rows[i], &self.rows[j]);
            }
        }
        g
    }

    /// The reduced norm `nrd(L)`: the positive generator of the Z-module `nrd(L)`.
    pub fn norm(&self, alg: &QuaternionAlgebra) -> Rational {
        let g = self.gram_int(alg);
        let mut c = 0i128;
        for i in 0..4 {
            c = gcd_i128(c, g[i][i] / 2);
            for j in i + 1..4 {
                c = gcd_i128(c, g[i][j]);
            }
        }
        Rational::new(c.into(), (self.den * self.den).into())
    }

    /// Gram matrix of the normalized form `x ↦ 2 nrd(x) / nrd(L)`; integral with even diagonal.
    pub fn normalized_gram(&self, alg: &QuaternionAlgebra) -> [[i128; 4]; 4] {
        let g = self.gram_int(alg);
        let n = self.norm(alg);
        // nrd(L) = c / den²; T / den² / (c / den²) = T / c
        let c = to_i128(&(n * Rational::from_integer((self.den * self.den).into())).to_integer())
            .unwrap();
        g.map(|r| r.map(|x| x / c))
    }

    /// Square root of |det T| on this lattice, as a rational number.
    pub fn discriminant(&self, alg: &QuaternionAlgebra) -> Result<Rational> {
        let g = self.gram_int(alg);
        let m: Vec<Vec<BigInt>> = g
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let det = determinant(&m).abs();
        let root = exact_sqrt(&det)
            .ok_or_else(|| Error::MalformedOrder(format!("Gram determinant {det} is not a square")))?;
        let d4 = BigInt::from(self.den).pow(4);
        Ok(Rational::new(root, d4))
    }

    /// Index `[self : other]`-style covolume ratio `vol(other) / vol(self)` for nested lattices.
    pub fn index_in(&self, larger: &Lattice) -> Rational {
        let vol = |l: &Lattice| {
            let d: i128 = (0..4).map(|i| l.rows[i][i]).product();
            Rational::new(d.into(), BigInt::from(l.den).pow(4))
        };
        vol(self) / vol(larger)
    }

    /// `{x : x L ⊆ L}`
    pub fn left_order(&self, alg: &QuaternionAlgebra) -> Lattice {
        let mut acc: Option<Lattice> = None;
        for b in self.basis() {
            let inv = alg.inverse(&b).expect("nonzero basis element");
            let piece = self.right_mul(&inv, alg);
            acc = Some(match acc {
                None => piece,
                Some(a) => a.intersection(&piece),
            });
        }
        acc.unwrap()
    }

    /// `{x : L x ⊆ L}`
    pub fn right_order(&self, alg: &QuaternionAlgebra) -> Lattice {
        let mut acc: Option<Lattice> = None;
        for b in self.basis() {
            let inv = alg.inverse(&b).expect("nonzero basis element");
            let piece = self.left_mul(&inv, alg);
            acc = Some(match acc {
                None => piece,
                Some(a) => a.intersection(&piece),
            });
        }
        acc.unwrap()
    }

    pub fn contains_one(&self) -> bool {
        self.contains_int(&[1, 0, 0, 0], 1)
    }

    /// Closed under multiplication, contains 1, and every element integral.
    pub fn is_order(&self, alg: &QuaternionAlgebra) -> bool {
        if !self.contains_one() {
            return false;
        }
        if !self.product(self, alg).is_subset_of(self) {
            return false;
        }
        let g = self.gram_int(alg);
        let d2 = self.den * self.den;
        (0..4).all(|i| (g[i][i] / 2) % d2 == 0 && g[i][i] % 2 == 0 && (0..4).all(|j| g[i][j] % d2 == 0))
    }

    pub fn is_integral(&self, alg: &QuaternionAlgebra) -> bool {
        let n = self.norm(alg);
        n.is_integer()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hurwitz(alg: &QuaternionAlgebra) -> Lattice {
        Lattice::from_generators(
            &[[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [1, 1, 1, 1]],
            2,
        )
        .map(|l| {
            assert!(l.is_order(alg));
            l
        })
        .unwrap()
    }

    #[test]
    fn hurwitz_invariants() {
        let alg = QuaternionAlgebra::new(-1, -1).unwrap();
        let o = hurwitz(&alg);
        assert_eq!(o.discriminant(&alg).unwrap(), Rational::from_integer(2.into()));
        assert_eq!(o.norm(&alg), Rational::from_integer(1.into()));
        assert_eq!(o.left_order(&alg), o);
        assert_eq!(o.right_order(&alg), o);
        let std = Lattice::standard(&alg);
        assert!(std.is_subset_of(&o));
        assert_eq!(std.index_in(&o), Rational::from_integer(2.into()));
        assert_eq!(std.discriminant(&alg).unwrap(), Rational::from_integer(4.into()));
        assert_eq!(o.intersection(&std), std);
        assert_eq!(o.sum(&std), o);
    }

    #[test]
    fn principal_ideal_norm() {
        let alg = QuaternionAlgebra::new(-1, -1).unwrap();
        let o = hurwitz(&alg);
        let x = QuatElement::from_ints([1, 1, 0, 0]);
        let p = o.left_mul(&x, &alg);
        assert_eq!(p.norm(&alg), Rational::from_integer(2.into()));
        assert_eq!(p.right_order(&alg), o);
        assert_eq!(p.product(&p, &alg), o.scale(2, 1));
    }
}
