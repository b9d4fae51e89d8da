//! Orders of level N = N1 N2: maximal orders, Eichler level at split primes and
//! the level-p^e orders at ramified primes.

use serde::{Deserialize, Serialize};

use crate::arith::integer::{factor_u64, mod_inverse, valuation_big, Integer, Rational};
use crate::arith::linalg::kernel_mod_p;
use crate::error::{Error, Result};
use crate::quat::lattice::int_to_element;
use crate::quat::{Lattice, QuatElement, QuaternionAlgebra};

/// A level split: `N1` carries the ramification, `N2` the Eichler level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Level {
    pub n1: u64,
    pub n2: u64,
}

impl Level {
    pub fn new(n1: u64, n2: u64) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidLevel("levels are positive".into()));
        }
        if num_integer::gcd(n1, n2) != 1 {
            return Err(Error::InvalidLevel(format!("N1 = {n1} and N2 = {n2} are not coprime")));
        }
        let f = factor_u64(n1);
        if let Some((p, e)) = f.iter().find(|(_, e)| e % 2 == 0) {
            return Err(Error::InvalidLevel(format!(
                "{p}^{e} divides N1 = {n1} to an even power"
            )));
        }
        if f.len() % 2 == 0 {
            return Err(Error::InvalidLevel(format!(
                "N1 = {n1} has an even number of prime factors; no definite algebra ramifies there"
            )));
        }
        Ok(Self { n1, n2 })
    }

    pub fn n(&self) -> u64 {
        self.n1 * self.n2
    }

    pub fn ramified_primes(&self) -> Vec<u64> {
        factor_u64(self.n1).into_iter().map(|(p, _)| p).collect()
    }

    /// Every admissible split of `n`, by increasing N1.
    pub fn splits(n: u64) -> Vec<Level> {
        crate::arith::integer::divisors(n)
            .into_iter()
            .filter_map(|d| Level::new(d, n / d).ok())
            .collect()
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.n1, self.n2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Order {
    pub algebra: QuaternionAlgebra,
    pub lattice: Lattice,
    pub level: Level,
}

impl Order {
    pub fn discriminant(&self) -> Result<Integer> {
        reduced_discriminant(&self.algebra, &self.lattice)
    }
}

/// Square root of `|det(trd(b_i conj b_j))|`; errors unless it is an integer.
pub fn reduced_discriminant(alg: &QuaternionAlgebra, l: &Lattice) -> Result<Integer> {
    let d = l.discriminant(alg)?;
    if !d.is_integer() {
        return Err(Error::MalformedOrder(format!("non-integral discriminant {d}")));
    }
    Ok(d.to_integer())
}

/// Kernel of the trace-form Gram matrix mod p, as integer rows in the lattice basis.
fn gram_radical_mod_p(alg: &QuaternionAlgebra, l: &Lattice, p: u64) -> Vec<Vec<u64>> {
    let g = l.gram_int(alg);
    let d2 = l.den() * l.den();
    let pi = p as i128;
    let m: Vec<Vec<u64>> = g
        .iter()
        .map(|r| r.iter().map(|&x| (x / d2).rem_euclid(pi) as u64).collect())
        .collect();
    kernel_mod_p(&m, 4, p)
}

fn combine(l: &Lattice, c: &[i128]) -> [i128; 4] {
    let mut v = [0i128; 4];
    for (k, row) in l.rows().iter().enumerate() {
        for t in 0..4 {
            v[t] += c[k] * row[t];
        }
    }
    v
}

/// `L + L L + ...` until stable; `None` once a non-integral lattice appears.
fn ring_closure(alg: &QuaternionAlgebra, l: &Lattice) -> Option<Lattice> {
    let mut cur = l.clone();
    loop {
        if !integral_gram(alg, &cur) {
            return None;
        }
        let next = cur.sum(&cur.product(&cur, alg));
        if next == cur {
            return Some(cur);
        }
        cur = next;
    }
}

fn integral_gram(alg: &QuaternionAlgebra, l: &Lattice) -> bool {
    let g = l.gram_int(alg);
    let d2 = l.den() * l.den();
    (0..4).all(|i| (g[i][i] / 2) % d2 == 0 && (0..4).all(|j| g[i][j] % d2 == 0))
}

/// One p-saturation step: a strictly larger order containing `o` with index a power of p.
fn enlarge_at(alg: &QuaternionAlgebra, o: &Lattice, p: u64) -> Option<Lattice> {
    let rad = gram_radical_mod_p(alg, o, p);
    let dim = rad.len();
    let pi = p as i128;
    let total = (p as usize).pow(dim as u32);
    for idx in 1..total {
        let mut coef = vec![0i128; 4];
        let mut t = idx;
        for r in &rad {
            let s = (t % p as usize) as i128;
            t /= p as usize;
            for k in 0..4 {
                coef[k] = (coef[k] + s * r[k] as i128) % pi;
            }
        }
        if coef.iter().all(|&c| c == 0) {
            continue;
        }
        let v = combine(o, &coef);
        // x = v / (p den): need nrd(x) integral.
        let den = o.den() * pi;
        if alg.nrd_int(&v) % (den * den) != 0 {
            continue;
        }
        let gens: Vec<[i128; 4]> = o
            .rows()
            .iter()
            .map(|r| r.map(|x| x * pi))
            .chain(std::iter::once(v))
            .collect();
        let cand = Lattice::from_generators(&gens, den).ok()?;
        if let Some(c) = ring_closure(alg, &cand) {
            return Some(c);
        }
    }
    None
}

/// A maximal order of `alg`, by saturating Z<1,i,j,k> at each prime dividing its discriminant.
pub fn maximal_order(alg: &QuaternionAlgebra) -> Result<Order> {
    let mut o = Lattice::standard(alg);
    let disc0 = 4 * alg.a().unsigned_abs() * alg.b().unsigned_abs();
    for (p, _) in factor_u64(disc0) {
        let target = u32::from(alg.is_ramified(p));
        loop {
            let d = reduced_discriminant(alg, &o)?;
            if valuation_big(&d, p) <= target {
                break;
            }
            o = enlarge_at(alg, &o, p).ok_or_else(|| {
                Error::Internal(format!("no p-saturation step found at p = {p}"))
            })?;
        }
    }
    let disc = reduced_discriminant(alg, &o)?;
    if disc != Integer::from(alg.discriminant()) {
        return Err(Error::Internal(format!(
            "maximal order has discriminant {disc}, expected {}",
            alg.discriminant()
        )));
    }
    let n1 = alg.discriminant();
    Ok(Order {
        algebra: alg.clone(),
        lattice: o,
        level: Level { n1, n2: 1 },
    })
}

/// A primitive element of `o` whose reduced norm is divisible by `q^f` (q unramified).
fn isotropic_element(alg: &QuaternionAlgebra, o: &Lattice, q: u64, f: u32) -> Result<[i128; 4]> {
    let qi = q as i128;
    let den = o.den();
    let nrd = |v: &[i128; 4]| alg.nrd_int(v) / (den * den);
    let mut x = None;
    'search: for idx in 1..(q as usize).pow(4) {
        let mut c = [0i128; 4];
        let mut t = idx;
        for ck in c.iter_mut() {
            *ck = (t % q as usize) as i128;
            t /= q as usize;
        }
        let v = combine(o, &c);
        if nrd(&v) % qi == 0 {
            x = Some(v);
            break 'search;
        }
    }
    let mut x = x.ok_or_else(|| Error::Internal(format!("no isotropic vector mod {q}")))?;
    // y with T(x, y) a unit mod q
    let y = o
        .rows()
        .iter()
        .copied()
        .find(|r| (alg.bilinear_int(&x, r) / (den * den)).rem_euclid(qi) != 0)
        .ok_or_else(|| Error::Internal(format!("trace form degenerate mod {q}")))?;
    let mut qk = qi;
    for _ in 1..f {
        let m = nrd(&x) / qk;
        let tr = alg.bilinear_int(&x, &y) / (den * den);
        let inv = mod_inverse(tr.rem_euclid(qi), qi).expect("unit");
        let s = (-m * inv).rem_euclid(qi);
        let t = qk * s;
        for k in 0..4 {
            x[k] += t * y[k];
        }
        qk *= qi;
        debug_assert_eq!(nrd(&x) % qk, 0);
    }
    Ok(x)
}

/// Eichler order of level q^f inside the maximal order `o`.
fn eichler_piece(alg: &QuaternionAlgebra, o: &Lattice, q: u64, f: u32) -> Result<Lattice> {
    let x = isotropic_element(alg, o, q, f)?;
    let qf = (q as i128).pow(f);
    let xo = Lattice::from_generators(
        &o.rows().iter().map(|r| alg.mul_int(&x, r)).collect::<Vec<_>>(),
        o.den() * o.den(),
    )?;
    let j = xo.sum(&o.scale(qf, 1));
    let left = j.left_order(alg);
    Ok(left.intersection(o))
}

/// `Z + Z u + p^m O`, with `u` generating the unramified quadratic order at `p`.
fn ramified_piece(alg: &QuaternionAlgebra, o: &Lattice, p: u64, e: u32) -> Result<Lattice> {
    let m = (e - 1) / 2;
    let pi = p as i128;
    let den = o.den();
    let mut u = None;
    'search: for idx in 1..(5usize.pow(4)) {
        let mut c = [0i128; 4];
        let mut t = idx;
        for ck in c.iter_mut() {
            *ck = (t % 5) as i128 - 2;
            t /= 5;
        }
        let v = combine(o, &c);
        let tr = alg.bilinear_int(&v, &[den, 0, 0, 0]) / (den * den);
        let n = alg.nrd_int(&v) / (den * den);
        let good = if p == 2 {
            tr % 2 != 0 && n % 2 != 0
        } else {
            let d = (tr * tr - 4 * n).rem_euclid(pi);
            d != 0 && crate::arith::symbols::kronecker_symbol(d as i64, p as i64) == -1
        };
        if good {
            u = Some(v);
            break 'search;
        }
    }
    let u = u.ok_or_else(|| Error::Internal(format!("no unramified generator at {p}")))?;
    let pm = pi.pow(m);
    let mut gens: Vec<[i128; 4]> = o.rows().iter().map(|r| r.map(|x| x * pm)).collect();
    gens.push([den, 0, 0, 0]);
    gens.push(u);
    Lattice::from_generators(&gens, den)
}

/// An order of level `N1 N2` in the algebra ramified at the primes of `N1`.
pub fn order_of_level(alg: &QuaternionAlgebra, level: Level) -> Result<Order> {
    let primes = level.ramified_primes();
    if primes != alg.ramified_primes() {
        return Err(Error::InvalidLevel(format!(
            "algebra ramified at {:?}, but N1 = {} has primes {:?}",
            alg.ramified_primes(),
            level.n1,
            primes
        )));
    }
    if factor_u64(level.n2).iter().any(|(q, _)| alg.is_ramified(*q)) {
        return Err(Error::InvalidLevel(format!("N2 = {} meets a ramified prime", level.n2)));
    }
    let omax = maximal_order(alg)?;
    let mut o = omax.lattice.clone();
    for (p, e) in factor_u64(level.n1) {
        if e > 1 {
            o = o.intersection(&ramified_piece(alg, &omax.lattice, p, e)?);
        }
    }
    for (q, f) in factor_u64(level.n2) {
        o = o.intersection(&eichler_piece(alg, &omax.lattice, q, f)?);
    }
    let order = Order {
        algebra: alg.clone(),
        lattice: o,
        level,
    };
    let d = order.discriminant()?;
    if d != Integer::from(level.n()) {
        return Err(Error::Internal(format!(
            "order of level {level} has discriminant {d}"
        )));
    }
    Ok(order)
}

/// Convenience: the algebra ramified at the primes of N1 and an order of the given level.
pub fn order_for(level: Level) -> Result<Order> {
    let alg = QuaternionAlgebra::construct_ramified(&level.ramified_primes())?;
    order_of_level(&alg, level)
}

/// The two-sided ideal P over p with P² = pO, for p exactly dividing N1.
pub fn two_sided_prime(order: &Order, p: u64) -> Result<Lattice> {
    let alg = &order.algebra;
    if !alg.is_ramified(p) {
        return Err(Error::Precondition(format!("{p} is not ramified in the algebra")));
    }
    if order.level.n1 % (p * p) == 0 {
        return Err(Error::Precondition(format!(
            "{p}^2 divides N1 = {}; the involution is defined only for p exactly dividing N1",
            order.level.n1
        )));
    }
    let o = &order.lattice;
    let rad = gram_radical_mod_p(alg, o, p);
    let pi = p as i128;
    let mut gens: Vec<[i128; 4]> = o.rows().iter().map(|r| r.map(|x| x * pi)).collect();
    for r in &rad {
        let c: Vec<i128> = r.iter().map(|&x| x as i128).collect();
        gens.push(combine(o, &c));
    }
    let big_p = Lattice::from_generators(&gens, o.den())?;
    let norm = big_p.norm(alg);
    if norm != Rational::from_integer(p.into()) {
        return Err(Error::Internal(format!("two-sided prime has norm {norm}")));
    }
    if big_p.product(&big_p, alg) != o.scale(pi, 1) {
        return Err(Error::Internal(format!("P^2 != {p}O")));
    }
    Ok(big_p)
}

/// Basis elements of an order as quaternions.
pub fn basis_elements(o: &Lattice) -> Vec<QuatElement> {
    o.rows().iter().map(|r| int_to_element(r, o.den())).collect()
}

/// All 16 products of basis elements lie in the lattice.
pub fn is_multiplicatively_closed(alg: &QuaternionAlgebra, o: &Lattice) -> bool {
    o.product(o, alg).is_subset_of(o)
}
