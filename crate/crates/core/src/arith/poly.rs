//! Dense univariate polynomials over Z and F_p, with factorization over Q
//! (Berlekamp mod p, Hensel lifting, Zassenhaus recombination) and characteristic polynomials.

use std::fmt;

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::integer::{is_prime, Integer};
use super::linalg::kernel_mod_p;
use crate::error::{Error, Result};

/// Polynomial with integer coefficients, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZPoly(Vec<Integer>);

impl ZPoly {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self(Vec::new())
    }

    pub fn one() -> Self {
        Self(vec![Integer::one()])
    }

    /// `x - c`
    pub fn linear(c: &Integer) -> Self {
        Self(vec![-c.clone(), Integer::one()])
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Integer {
        self.0.get(i).cloned().unwrap_or_default()
    }

    pub fn lead(&self) -> Integer {
        self.0.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Integer::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, k: &Integer) -> Self {
        Self::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Integer::from(i))
                .collect(),
        )
    }

    pub fn content(&self) -> Integer {
        self.0.iter().fold(Integer::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.lead().is_negative() {
            g = -g;
        }
        Self::new(self.0.iter().map(|c| c / &g).collect())
    }

    /// Division by a monic polynomial.
    pub fn divrem_monic(&self, d: &Self) -> (Self, Self) {
        assert!(d.is_monic(), "divisor must be monic");
        let dd = d.0.len() - 1;
        if self.0.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut r = self.0.clone();
        let mut q = vec![Integer::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (i, di) in d.0.iter().enumerate() {
                r[k + i] -= &c * di;
            }
            q[k] = c;
        }
        (Self::new(q), Self::new(r))
    }

    /// Pseudo-remainder `lc(d)^(deg a - deg d + 1) a mod d`.
    fn pseudo_rem(&self, d: &Self) -> Self {
        let dd = d.0.len() - 1;
        let lc = d.lead();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let c = r.lead();
            let mut shifted = vec![Integer::zero(); rd - dd];
            shifted.extend(d.0.iter().map(|x| x * &c));
            r = r.scale(&lc).sub(&Self::new(shifted));
        }
        r
    }

    /// Gcd over Q, returned primitive with positive leading coefficient.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.primitive_part(), o.primitive_part());
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a
    }

    pub fn eval(&self, x: &Integer) -> Integer {
        self.0
            .iter()
            .rev()
            .fold(Integer::zero(), |acc, c| acc * x + c)
    }

    /// `g(M)` for a square integer matrix, by Horner's rule.
    pub fn eval_matrix(&self, m: &[Vec<Integer>]) -> Vec<Vec<Integer>> {
        let n = m.len();
        let mut r = vec![vec![Integer::zero(); n]; n];
        for c in self.0.iter().rev() {
            r = super::linalg::mat_mul(&r, m);
            for (i, row) in r.iter_mut().enumerate() {
                row[i] += c;
            }
        }
        r
    }

    pub fn reduce_mod(&self, p: u64) -> FpPoly {
        let pb = Integer::from(p);
        FpPoly::new(
            p,
            self.0
                .iter()
                .map(|c| c.mod_floor(&pb).to_u64().unwrap())
                .collect(),
        )
    }

    /// Lift with coefficients in the symmetric range `(-m/2, m/2]`.
    fn symmetric_lift(coeffs: &[Integer], m: &Integer) -> Self {
        let half: Integer = m / 2;
        Self::new(
            coeffs
                .iter()
                .map(|c| {
                    let r = c.mod_floor(m);
                    if r > half {
                        r - m
                    } else {
                        r
                    }
                })
                .collect(),
        )
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}x", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}x^{i}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

pub fn cyclotomic_polynomial(n: u64) -> ZPoly {
    assert!(n >= 1);
    // x^n - 1 = prod_{d | n} Phi_d
    let mut f = {
        let mut c = vec![Integer::zero(); n as usize + 1];
        c[0] = -Integer::one();
        c[n as usize] = Integer::one();
        ZPoly::new(c)
    };
    for d in super::integer::divisors(n) {
        if d < n {
            let (q, r) = f.divrem_monic(&cyclotomic_polynomial(d));
            debug_assert!(r.is_zero());
            f = q;
        }
    }
    f
}

/// Characteristic polynomial `det(x I - M)` by Faddeev-LeVerrier.
pub fn charpoly(m: &[Vec<Integer>]) -> ZPoly {
    let n = m.len();
    let mut c = vec![Integer::zero(); n + 1];
    c[n] = Integer::one();
    let mut mk = vec![vec![Integer::zero(); n]; n];
    for k in 1..=n {
        let mut next = super::linalg::mat_mul(m, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n + 1 - k];
        }
        let am = super::linalg::mat_mul(m, &next);
        let tr: Integer = (0..n).map(|i| am[i][i].clone()).sum();
        let (q, r) = tr.div_rem(&Integer::from(k));
        debug_assert!(r.is_zero());
        c[n - k] = -q;
        mk = next;
    }
    ZPoly::new(c)
}

// ---------------------------------------------------------------------------
// F_p[x]

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn invmod(a: u64, p: u64) -> u64 {
    let (g, x, _) = super::integer::ext_gcd(&(a as i128), &(p as i128));
    assert_eq!(g, 1);
    x.rem_euclid(p as i128) as u64
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        Self { p, c }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(self.p, (0..n).map(|i| (self.coeff(i) + o.coeff(i)) % self.p).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(
            self.p,
            (0..n).map(|i| (self.coeff(i) + self.p - o.coeff(i)) % self.p).collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(self.p, Vec::new());
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + mulmod(a, b, self.p)) % self.p;
            }
        }
        Self::new(self.p, c)
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(self.p, self.c.iter().map(|&x| mulmod(x, k % self.p, self.p)).collect())
    }

    pub fn make_monic(&self) -> Self {
        match self.c.last() {
            None => self.clone(),
            Some(&l) => self.scale(invmod(l, self.p)),
        }
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = invmod(*d.c.last().unwrap(), self.p);
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::new(self.p, Vec::new()), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = mulmod(r[k + dd], inv, self.p);
            if c == 0 {
                continue;
            }
            for (i, &di) in d.c.iter().enumerate() {
                r[k + i] = (r[k + i] + self.p - mulmod(c, di, self.p)) % self.p;
            }
            q[k] = c;
        }
        (Self::new(self.p, q), Self::new(self.p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// `(g, s, t)` with `s a + t b = g` monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let zero = Self::new(p, Vec::new());
        let one = Self::new(p, vec![1]);
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (one.clone(), zero.clone());
        let (mut t0, mut t1) = (zero, one);
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = invmod(*r0.c.last().unwrap(), p);
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.p,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mulmod(c, i as u64 % self.p, self.p))
                .collect(),
        )
    }

    pub fn powmod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::new(self.p, vec![1]).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    pub fn to_zpoly(&self) -> ZPoly {
        ZPoly::new(self.c.iter().map(|&x| Integer::from(x)).collect())
    }

    /// Factorization of a monic squarefree polynomial into monic irreducibles (Berlekamp).
    pub fn berlekamp(&self) -> Vec<FpPoly> {
        let p = self.p;
        let n = match self.degree() {
            None | Some(0) => return Vec::new(),
            Some(1) => return vec![self.make_monic()],
            Some(n) => n,
        };
        let f = self.make_monic();
        // Row i of Q is x^{ip} mod f.
        let xp = Self::new(p, vec![0, 1]).powmod(p, &f);
        let mut rows = Vec::with_capacity(n);
        let mut cur = Self::new(p, vec![1]);
        for _ in 0..n {
            rows.push((0..n).map(|j| cur.coeff(j)).collect::<Vec<u64>>());
            cur = cur.mul(&xp).rem(&f);
        }
        // g with g^p = g mod f: g (Q - I) = 0, i.e. (Q - I)^T g = 0.
        let qt: Vec<Vec<u64>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| (rows[i][j] + if i == j { p - 1 } else { 0 }) % p)
                    .collect()
            })
            .collect();
        let basis = kernel_mod_p(&qt, n, p);
        let r = basis.len();
        let mut factors = vec![f];
        for v in basis {
            if factors.len() == r {
                break;
            }
            let g = Self::new(p, v);
            if g.degree().unwrap_or(0) == 0 {
                continue;
            }
            let mut next = Vec::new();
            for h in factors {
                if h.degree() == Some(1) {
                    next.push(h);
                    continue;
                }
                let mut rest = h;
                for s in 0..p {
                    let gs = g.sub(&Self::new(p, vec![s]));
                    let d = rest.gcd(&gs);
                    if d.degree().unwrap_or(0) > 0 && d.degree() < rest.degree() {
                        rest = rest.divrem(&d).0.make_monic();
                        next.push(d);
                    }
                    if rest.degree() == Some(1) {
                        break;
                    }
                }
                next.push(rest);
            }
            factors = next;
        }
        factors.sort();
        factors
    }

    /// Full factorization of a nonzero polynomial into monic irreducibles with multiplicity.
    pub fn factor(&self) -> Vec<(FpPoly, u32)> {
        let mut out = Vec::new();
        for (g, e) in self.make_monic().squarefree_decomposition() {
            for h in g.berlekamp() {
                out.push((h, e));
            }
        }
        out.sort();
        out
    }

    fn squarefree_decomposition(&self) -> Vec<(FpPoly, u32)> {
        let p = self.p;
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.make_monic();
        let mut c = f.gcd(&f.derivative());
        let mut w = f.divrem(&c).0;
        let mut i = 1u32;
        while !w.is_one() {
            let y = w.gcd(&c);
            let z = w.divrem(&y).0;
            if z.degree().unwrap_or(0) > 0 {
                out.push((z.make_monic(), i));
            }
            i += 1;
            w = y;
            c = c.divrem(&w).0;
        }
        if !c.is_one() {
            // c is a p-th power.
            let root = Self::new(p, c.c.iter().step_by(p as usize).copied().collect());
            for (g, e) in root.squarefree_decomposition() {
                out.push((g, e * p as u32));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Factorization over Q of monic integer polynomials.

fn squarefree_decomposition_z(f: &ZPoly) -> Vec<(ZPoly, u32)> {
    let monic = |g: ZPoly| g.primitive_part();
    let mut out = Vec::new();
    let fp = f.derivative();
    let a0 = monic(f.gcd(&fp));
    let mut b = f.divrem_monic(&a0).0;
    let c = fp.divrem_monic(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = monic(b.gcd(&d));
        let nb = b.divrem_monic(&a).0;
        let nc = d.divrem_monic(&a).0;
        d = nc.sub(&nb.derivative());
        if a.degree().unwrap_or(0) > 0 {
            out.push((a, i));
        }
        b = nb;
        i += 1;
    }
    out
}

/// Lift `f = g h mod p^k` to mod `p^(2k)`-style linear steps until modulus `target`.
fn hensel_lift_pair(f: &ZPoly, g: &FpPoly, h: &FpPoly, target: &Integer) -> (ZPoly, ZPoly) {
    let p = g.modulus();
    let pb = Integer::from(p);
    let (one, s, t) = g.ext_gcd(h);
    debug_assert!(one.is_one());
    let mut gz = g.to_zpoly();
    let mut hz = h.to_zpoly();
    let mut m = pb.clone();
    while &m < target {
        // e = (f - g h) / m mod p
        let e = f.sub(&gz.mul(&hz));
        let e = ZPoly::new(e.coeffs().iter().map(|c| c / &m).collect()).reduce_mod(p);
        // Solve dg h + dh g = e with deg dh < deg h, deg dg < deg g... here in the form
        // dh = (s e) rem h, dg = t e + (s e quo h) g.
        let se = s.mul(&e);
        let (q, dh) = se.divrem(h);
        let dg = t.mul(&e).add(&q.mul(g));
        // g is monic; keep it monic by dropping any top-degree drift.
        gz = gz.add(&dg.to_zpoly().scale(&m));
        hz = hz.add(&dh.to_zpoly().scale(&m));
        m *= &pb;
    }
    (gz, hz)
}

fn multi_lift(f: &ZPoly, factors: &[FpPoly], target: &Integer) -> Vec<ZPoly> {
    if factors.len() == 1 {
        let lc = f.clone();
        return vec![ZPoly::symmetric_lift(lc.coeffs(), target)];
    }
    let p = factors[0].modulus();
    let mid = factors.len() / 2;
    let prod = |fs: &[FpPoly]| {
        fs.iter()
            .fold(FpPoly::new(p, vec![1]), |acc, x| acc.mul(x))
    };
    let (g, h) = hensel_lift_pair(f, &prod(&factors[..mid]), &prod(&factors[mid..]), target);
    let g = ZPoly::symmetric_lift(g.coeffs(), target);
    let h = ZPoly::symmetric_lift(h.coeffs(), target);
    let mut out = multi_lift(&g, &factors[..mid], target);
    out.extend(multi_lift(&h, &factors[mid..], target));
    out
}

fn zassenhaus(f: &ZPoly) -> Vec<ZPoly> {
    let n = f.degree().unwrap();
    if n <= 1 {
        return vec![f.clone()];
    }
    let mut p = 3u64;
    loop {
        if is_prime(p) {
            let fp = f.reduce_mod(p);
            if fp.gcd(&fp.derivative()).is_one() {
                break;
            }
        }
        p += 2;
    }
    let local = f.reduce_mod(p).berlekamp();
    if local.len() == 1 {
        return vec![f.clone()];
    }
    let norm1: Integer = f.coeffs().iter().map(|c| c.abs()).sum();
    let bound = (Integer::one() << n) * norm1 * 2;
    let pb = Integer::from(p);
    let mut modulus = pb.clone();
    while modulus <= bound {
        modulus *= &pb;
    }
    let lifted = multi_lift(f, &local, &modulus);

    let mut remaining: Vec<ZPoly> = lifted;
    let mut g = f.clone();
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut found = false;
        for combo in combinations(remaining.len(), size) {
            let prod = combo
                .iter()
                .fold(ZPoly::one(), |acc, &i| acc.mul(&remaining[i]));
            let cand = ZPoly::symmetric_lift(prod.coeffs(), &modulus);
            let (q, r) = g.divrem_monic(&cand);
            if r.is_zero() {
                out.push(cand);
                g = q;
                remaining = remaining
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !combo.contains(i))
                    .map(|(_, x)| x)
                    .collect();
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    if g.degree().unwrap_or(0) > 0 {
        out.push(g);
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Factorization of a monic integer polynomial into monic irreducibles over Q.
pub fn factor(f: &ZPoly) -> Result<Vec<(ZPoly, u32)>> {
    if !f.is_monic() {
        return Err(Error::Unsupported(format!("factoring non-monic polynomial {f}")));
    }
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition_z(f) {
        for h in zassenhaus(&g) {
            out.push((h, e));
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(c: &[i64]) -> ZPoly {
        ZPoly::from_i64(c)
    }

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic_polynomial(1), z(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(3), z(&[1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(4), z(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(12), z(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(15).degree(), Some(8));
    }

    #[test]
    fn charpoly_of_companion() {
        let m: Vec<Vec<Integer>> = [[0, 3], [2, 1]]
            .iter()
            .map(|r| r.iter().map(|&x| Integer::from(x)).collect())
            .collect();
        // x^2 - x - 6 = (x - 3)(x + 2)
        assert_eq!(charpoly(&m), z(&[-6, -1, 1]));
        let f = factor(&charpoly(&m)).unwrap();
        assert_eq!(f, vec![(z(&[-3, 1]), 1), (z(&[2, 1]), 1)]);
    }

    #[test]
    fn factor_mod_2_cyclotomic() {
        let f = cyclotomic_polynomial(3).reduce_mod(2);
        assert_eq!(f.factor().len(), 1);
        let g = cyclotomic_polynomial(7).reduce_mod(2);
        let fs = g.factor();
        assert_eq!(fs.len(), 2);
        assert!(fs.iter().all(|(h, e)| h.degree() == Some(3) && *e == 1));
        let sq = z(&[1, 0, 1]).reduce_mod(2); // (x+1)^2
        assert_eq!(sq.factor(), vec![(FpPoly::new(2, vec![1, 1]), 2)]);
    }

    #[test]
    fn factor_swinnerton_dyer_like() {
        // x^4 + 1 is irreducible over Q but splits mod every prime.
        let f = z(&[1, 0, 0, 0, 1]);
        assert_eq!(factor(&f).unwrap(), vec![(f.clone(), 1)]);
        // x^4 - 1
        let g = z(&[-1, 0, 0, 0, 1]);
        let fs = factor(&g).unwrap();
        assert_eq!(fs.len(), 3);
    }

    #[test]
    fn factor_with_multiplicity() {
        let f = z(&[-1, 1]).mul(&z(&[-1, 1])).mul(&z(&[2, 0, 1]));
        let fs = factor(&f).unwrap();
        assert_eq!(fs, vec![(z(&[-1, 1]), 2), (z(&[2, 0, 1]), 1)]);
    }

    proptest! {
        #[test]
        fn factor_product_roundtrip(roots in proptest::collection::vec(-6i64..6, 1..5),
                                    quad in proptest::collection::vec((-5i64..5, 1i64..6), 0..3)) {
            let mut f = ZPoly::one();
            for r in &roots {
                f = f.mul(&z(&[-r, 1]));
            }
            for (b, c) in &quad {
                f = f.mul(&z(&[*c, *b, 1]));
            }
            let fs = factor(&f).unwrap();
            let mut prod = ZPoly::one();
            for (g, e) in &fs {
                prop_assert!(g.is_monic());
                for _ in 0..*e {
                    prod = prod.mul(g);
                }
            }
            prop_assert_eq!(prod, f);
            let linear = fs.iter().filter(|(g, _)| g.degree() == Some(1)).map(|(_, e)| *e as usize).sum::<usize>();
            prop_assert!(linear >= roots.len());
        }

        #[test]
        fn berlekamp_roundtrip(c in proptest::collection::vec(0u64..7, 2..9)) {
            let mut c = c;
            c.push(1);
            let f = FpPoly::new(7, c);
            let fs = f.factor();
            let mut prod = FpPoly::new(7, vec![1]);
            for (g, e) in &fs {
                for _ in 0..*e { prod = prod.mul(g); }
            }
            prop_assert_eq!(prod, f);
        }
    }
}
