//! Imaginary quadratic fields: reduced binary quadratic forms, Gauss composition,
//! class group structure and class characters.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer as _;
use serde::{Deserialize, Serialize};

use crate::arith::integer::{ext_gcd, is_squarefree};
use crate::arith::linalg::smith_normal_form;
use crate::arith::{kronecker_symbol, CyclotomicInt};
use crate::error::{Error, Result};

pub fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let m = d.unsigned_abs();
    match d.rem_euclid(4) {
        1 => is_squarefree(m),
        0 => {
            let q = d / 4;
            matches!(q.rem_euclid(4), 2 | 3) && is_squarefree(q.unsigned_abs())
        }
        _ => false,
    }
}

/// Fundamental discriminants `d` with `lo ≤ |d| ≤ hi`, in order of increasing `|d|`.
pub fn fundamental_discriminants(lo: u64, hi: u64) -> Vec<i64> {
    (lo.max(3)..=hi).map(|m| -(m as i64)).filter(|&d| is_fundamental(d)).collect()
}

/// Kronecker `(Δ/p) = −1`.
pub fn inert_at(disc: i64, p: u64) -> bool {
    kronecker_symbol(disc, p as i64) == -1
}

/// "inert", "split" or "ramified".
pub fn splitting_type(disc: i64, p: u64) -> &'static str {
    match kronecker_symbol(disc, p as i64) {
        -1 => "inert",
        1 => "split",
        _ => "ramified",
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImagQuadField {
    pub disc: i64,
}

impl ImagQuadField {
    pub fn new(disc: i64) -> Result<Self> {
        if !is_fundamental(disc) {
            return Err(Error::InvalidArgument(format!(
                "{disc} is not a negative fundamental discriminant"
            )));
        }
        Ok(Self { disc })
    }

    /// Number of roots of unity.
    pub fn w(&self) -> u64 {
        match self.disc {
            -3 => 6,
            -4 => 4,
            _ => 2,
        }
    }

    /// Trace and norm of the standard generator `ω = (t + √Δ)/2` of the ring of integers.
    pub fn generator_trace_norm(&self) -> (i64, i64) {
        let t = self.disc.rem_euclid(2);
        (t, (t * t - self.disc) / 4)
    }
}

/// A primitive positive definite form `a x² + b xy + c y²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let Form { a, b, c } = *self;
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    pub fn reduce(self) -> Form {
        let Form { mut a, mut b, mut c } = self;
        loop {
            // bring b into (−a, a]
            if b <= -a || b > a {
                let k = num_integer::Integer::div_floor(&(a - b), &(2 * a));
                let nb = b + 2 * k * a;
                c = (nb * nb - self.discriminant()) / (4 * a);
                b = nb;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return Form { a, b, c };
        }
    }

    pub fn inverse(&self) -> Form {
        Form { a: self.a, b: -self.b, c: self.c }.reduce()
    }

    /// Gauss composition of forms of equal discriminant, reduced.
    pub fn compose(&self, other: &Form) -> Form {
        let (f1, f2) = if self.a <= other.a { (self, other) } else { (other, self) };
        let (a1, b1, _) = (f1.a as i128, f1.b as i128, f1.c as i128);
        let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (d, y1) = if a2 % a1 == 0 {
            (a1, 0)
        } else {
            let (g, u, _) = ext_gcd(&a2, &a1);
            (g, u)
        };
        let (d1, x2, y2) = if s % d == 0 {
            (d, 0, -1)
        } else {
            let (g, u, v) = ext_gcd(&s, &d);
            (g, u, -v)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
        let b3 = b2 + 2 * v2 * r;
        let a3 = v1 * v2;
        let c3 = (c2 * d1 + r * (b2 + v2 * r)) / v1;
        Form { a: a3 as i64, b: b3 as i64, c: c3 as i64 }.reduce()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// Class group of a fundamental discriminant, with the principal form first.
#[derive(Clone, Debug)]
pub struct FormClassGroup {
    pub field: ImagQuadField,
    pub forms: Vec<Form>,
    index: HashMap<Form, usize>,
    table: Vec<Vec<usize>>,
    /// Invariant factors `d_1 | d_2 | …`, all > 1.
    pub structure: Vec<u64>,
    /// Coordinates of each class in `⊕ Z/d_i`.
    pub coordinates: Vec<Vec<u64>>,
}

pub fn reduced_forms(disc: i64) -> Result<FormClassGroup> {
    let field = ImagQuadField::new(disc)?;
    let mut forms = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -disc {
        for b in -a + 1..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = Form { a, b, c: num / (4 * a) };
            if f.is_reduced() && num_integer::gcd(num_integer::gcd(f.a, f.b), f.c) == 1 {
                forms.push(f);
            }
        }
        a += 1;
    }
    forms.sort();
    let index: HashMap<Form, usize> = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let h = forms.len();
    let mut table = vec![vec![0; h]; h];
    for i in 0..h {
        for j in 0..h {
            let c = forms[i].compose(&forms[j]);
            table[i][j] = *index
                .get(&c)
                .ok_or_else(|| Error::Internal(format!("composition produced unknown form {c}")))?;
        }
    }
    let (structure, coordinates) = structure_of(&table);
    Ok(FormClassGroup { field, forms, index, table, structure, coordinates })
}

/// Invariant factors from the relation matrix `e_x + e_y − e_{xy}` and the coordinates
/// of each element.
fn structure_of(table: &[Vec<usize>]) -> (Vec<u64>, Vec<Vec<u64>>) {
    let h = table.len();
    let mut rel: Vec<Vec<i128>> = Vec::new();
    let mut id = vec![0i128; h];
    id[0] = 1;
    rel.push(id);
    for x in 0..h {
        for y in x..h {
            let mut r = vec![0i128; h];
            r[x] += 1;
            r[y] += 1;
            r[table[x][y]] -= 1;
            rel.push(r);
        }
    }
    let snf = smith_normal_form(&rel);
    let mut structure = Vec::new();
    let mut cols = Vec::new();
    for (k, d) in snf.diagonal.iter().enumerate() {
        let d = d.unsigned_abs() as u64;
        if d > 1 {
            structure.push(d);
            cols.push(k);
        }
    }
    let coordinates = (0..h)
        .map(|x| {
            cols.iter()
                .zip(&structure)
                .map(|(&k, &d)| snf.v[x][k].rem_euclid(d as i128) as u64)
                .collect()
        })
        .collect();
    (structure, coordinates)
}

impl FormClassGroup {
    pub fn h(&self) -> usize {
        self.forms.len()
    }

    pub fn disc(&self) -> i64 {
        self.field.disc
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.index[&self.forms[i].inverse()]
    }

    pub fn index_of(&self, f: &Form) -> Option<usize> {
        self.index.get(&f.reduce()).copied()
    }

    pub fn exponent(&self) -> u64 {
        self.structure.iter().fold(1, |e, &d| e.lcm(&d))
    }

    /// All `h` characters; index 0 is trivial.
    pub fn characters(&self) -> Vec<ClassCharacter> {
        let mut out = Vec::new();
        let mut k = vec![0u64; self.structure.len()];
        loop {
            out.push(ClassCharacter { exponents: k.clone(), structure: self.structure.clone() });
            let mut i = self.structure.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                k[i] += 1;
                if k[i] < self.structure[i] {
                    break;
                }
                k[i] = 0;
            }
        }
    }

    pub fn character(&self, index: usize) -> Result<ClassCharacter> {
        self.characters().into_iter().nth(index).ok_or_else(|| {
            Error::InvalidArgument(format!("character index {index} out of range (h = {})", self.h()))
        })
    }

    pub fn order_of(&self, i: usize) -> u64 {
        let mut x = i;
        let mut n = 1;
        while x != 0 {
            x = self.table[x][i];
            n += 1;
        }
        n
    }
}

/// `χ(x) = ζ_e^{Σ k_i (e/d_i) x_i}` on the coordinates of the class group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCharacter {
    pub exponents: Vec<u64>,
    pub structure: Vec<u64>,
}

impl ClassCharacter {
    pub fn conductor(&self) -> u64 {
        self.structure.iter().fold(1, |e, &d| e.lcm(&d))
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&k| k == 0)
    }

    pub fn order(&self) -> u64 {
        self.exponents
            .iter()
            .zip(&self.structure)
            .fold(1, |o, (&k, &d)| o.lcm(&(d / num_integer::gcd(k, d))))
    }

    /// Exponent of `ζ_e` at a class with the given coordinates.
    pub fn log(&self, coords: &[u64]) -> u64 {
        let e = self.conductor();
        self.exponents
            .iter()
            .zip(&self.structure)
            .zip(coords)
            .map(|((&k, &d), &x)| k * (e / d) * x)
            .sum::<u64>()
            % e
    }

    pub fn value(&self, g: &FormClassGroup, class: usize) -> CyclotomicInt {
        CyclotomicInt::zeta_pow(self.conductor(), self.log(&g.coordinates[class]) as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::integer::is_prime;
    use proptest::prelude::*;

    fn brute_h(d: i64) -> usize {
        // primitive reduced forms, counted directly
        let mut n = 0;
        for a in 1..=(-d) {
            for b in -a..=a {
                let num = b * b - d;
                if num % (4 * a) != 0 {
                    continue;
                }
                let f = Form { a, b, c: num / (4 * a) };
                if f.is_reduced() && num_integer::gcd(num_integer::gcd(a, b), f.c) == 1 {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn small_examples() {
        let g = reduced_forms(-23).unwrap();
        assert_eq!(g.forms, vec![Form { a: 1, b: 1, c: 6 }, Form { a: 2, b: -1, c: 3 }, Form { a: 2, b: 1, c: 3 }]);
        assert_eq!(g.structure, vec![3]);
        let g = reduced_forms(-4).unwrap();
        assert_eq!(g.h(), 1);
        assert!(g.structure.is_empty());
        assert_eq!(g.characters().len(), 1);
        assert_eq!(reduced_forms(-68).unwrap().h(), 4);
        assert_eq!(reduced_forms(-68).unwrap().structure, vec![4]);
        assert!(reduced_forms(-12).is_err());
        assert!(reduced_forms(-8).is_ok());
        assert_eq!(reduced_forms(-420).unwrap().structure, vec![2, 2, 2]);
    }

    #[test]
    fn splitting() {
        assert!(inert_at(-23, 11));
        assert!(!inert_at(-23, 23));
        assert_eq!(splitting_type(-4, 17), "split");
        assert_eq!(splitting_type(-4, 11), "inert");
        assert_eq!(splitting_type(-7, 11), "split");
    }

    #[test]
    fn class_numbers_match_enumeration() {
        for d in fundamental_discriminants(3, 400) {
            let g = reduced_forms(d).unwrap();
            assert_eq!(g.h(), brute_h(d), "Δ = {d}");
            assert_eq!(g.structure.iter().product::<u64>() as usize, g.h());
        }
    }

    #[test]
    fn group_axioms() {
        for d in fundamental_discriminants(3, 800) {
            let g = reduced_forms(d).unwrap();
            let h = g.h();
            if h > 16 {
                continue;
            }
            for x in 0..h {
                assert_eq!(g.compose(0, x), x);
                assert_eq!(g.compose(x, g.inverse(x)), 0);
                for y in 0..h {
                    assert_eq!(g.compose(x, y), g.compose(y, x));
                    for z in 0..h {
                        assert_eq!(g.compose(g.compose(x, y), z), g.compose(x, g.compose(y, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn genus_parity_for_prime_discriminants() {
        for d in 3..=500u64 {
            if is_prime(d) && is_fundamental(-(d as i64)) {
                assert_eq!(reduced_forms(-(d as i64)).unwrap().h() % 2, 1, "d = {d}");
            }
        }
    }

    #[test]
    fn character_orthogonality() {
        for d in [-23i64, -56, -84, -260, -420, -231, -47] {
            let g = reduced_forms(d).unwrap();
            let chars = g.characters();
            assert_eq!(chars.len(), g.h());
            for (i, x) in chars.iter().enumerate() {
                assert_eq!(x.value(&g, 0), CyclotomicInt::one(x.conductor()));
                for (j, y) in chars.iter().enumerate() {
                    let mut s = CyclotomicInt::zero(x.conductor());
                    for t in 0..g.h() {
                        s = &s + &(&x.value(&g, t) * &y.value(&g, t).conj());
                    }
                    let want = if i == j { g.h() as i64 } else { 0 };
                    assert_eq!(s, CyclotomicInt::from_integer(x.conductor(), want));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn characters_are_homomorphisms(idx in 0usize..200) {
            let ds = fundamental_discriminants(3, 600);
            let g = reduced_forms(ds[idx % ds.len()]).unwrap();
            for chi in g.characters() {
                for x in 0..g.h() {
                    for y in 0..g.h() {
                        prop_assert_eq!(
                            chi.value(&g, g.compose(x, y)),
                            &chi.value(&g, x) * &chi.value(&g, y)
                        );
                    }
                }
            }
        }
    }
}
