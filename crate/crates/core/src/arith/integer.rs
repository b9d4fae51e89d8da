//! Number-theoretic primitives on machine integers and `BigInt`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Integer = BigInt;
pub type Rational = num_rational::BigRational;

const TRIAL_LIMIT: u64 = 1_000_000;

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_i128(a: i128, b: i128) -> i128 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd_i128(a, b) * b).abs()
}

/// Extended Euclid on any signed integer type: returns `(g, x, y)` with `a x + b y = g >= 0`.
pub fn ext_gcd<T>(a: &T, b: &T) -> (T, T, T)
where
    T: num_integer::Integer + Signed + Clone,
{
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (T::one(), T::zero());
    let (mut t0, mut t1) = (T::zero(), T::one());
    while !r1.is_zero() {
        let q = r0.div_floor(&r1);
        let r2 = r0 - q.clone() * r1.clone();
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = s0 - q.clone() * s1.clone();
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = t0 - q * t1.clone();
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Inverse of `a` modulo `m`, if it exists, in `[0, m)`.
pub fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let (g, x, _) = ext_gcd(&a.rem_euclid(m), &m);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m))
}

/// Chinese remaindering of `x = r_i mod m_i`; moduli need not be coprime.
/// Returns `(r, lcm)` or `None` when the congruences are incompatible.
pub fn crt(residues: &[Integer], moduli: &[Integer]) -> Option<(Integer, Integer)> {
    assert_eq!(residues.len(), moduli.len());
    let mut r = Integer::zero();
    let mut m = Integer::one();
    for (ri, mi) in residues.iter().zip(moduli) {
        let (g, p, _) = ext_gcd(&m, mi);
        let diff = ri - &r;
        if !diff.is_multiple_of(&g) {
            return None;
        }
        let l = &m / &g * mi;
        let step = (&diff / &g * p).mod_floor(&(mi / &g));
        r = (r + &m * step).mod_floor(&l);
        m = l;
    }
    Some((r, m))
}

pub fn isqrt_u128(n: u128) -> u128 {
    num_integer::Roots::sqrt(&n)
}

pub fn isqrt_i128(n: i128) -> i128 {
    assert!(n >= 0);
    isqrt_u128(n as u128) as i128
}

/// Square root when `n` is a perfect square.
pub fn exact_sqrt(n: &Integer) -> Option<Integer> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

pub fn valuation(mut n: i128, p: i128) -> u32 {
    assert!(n != 0 && p > 1);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn valuation_big(n: &Integer, p: u64) -> u32 {
    assert!(!n.is_zero());
    let p = Integer::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while n.is_multiple_of(&p) {
        n /= &p;
        v += 1;
    }
    v
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Brent's variant of Pollard rho; `n` must be composite and odd.
fn rho_u64(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let mut ys = 2u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(r - k).min(128) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn push_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho_u64(n);
    push_factors(d, out);
    push_factors(n / d, out);
}

/// Factorization of a positive machine integer as sorted `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factor_u64 requires n >= 1");
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT && p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        let mut rest = Vec::new();
        push_factors(n, &mut rest);
        rest.sort_unstable();
        for q in rest {
            match out.last_mut() {
                Some((last, e)) if *last == q => *e += 1,
                _ => out.push((q, 1)),
            }
        }
    }
    out
}

fn is_probable_prime_big(n: &Integer) -> bool {
    if let Some(m) = n.to_u64() {
        return is_prime(m);
    }
    let one = Integer::one();
    let two = Integer::from(2);
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut s = 0;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut x = Integer::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_big(n: &Integer) -> Integer {
    let mut c = Integer::one();
    loop {
        let f = |x: &Integer| (x * x + &c) % n;
        let mut x = Integer::from(2);
        let mut y = x.clone();
        let mut g = Integer::one();
        while g.is_one() {
            x = f(&x);
            y = f(&f(&y));
            g = (&x - &y).abs().gcd(n);
        }
        if &g != n {
            return g;
        }
        c += 1;
    }
}

fn push_factors_big(n: Integer, out: &mut Vec<Integer>) {
    if n.is_one() {
        return;
    }
    if let Some(m) = n.to_u64() {
        let mut small = Vec::new();
        push_factors(m, &mut small);
        out.extend(small.into_iter().map(Integer::from));
        return;
    }
    if is_probable_prime_big(&n) {
        out.push(n);
        return;
    }
    let d = rho_big(&n);
    let q = &n / &d;
    push_factors_big(d, out);
    push_factors_big(q, out);
}

/// Factorization of a positive integer of any size: trial division up to 10^6, then Pollard rho.
pub fn factorize(n: &Integer) -> Result<Vec<(Integer, u32)>> {
    if n.sign() != Sign::Plus {
        return Err(Error::InvalidArgument(format!("cannot factor {n}")));
    }
    if let Some(m) = n.to_u64() {
        return Ok(factor_u64(m)
            .into_iter()
            .map(|(p, e)| (Integer::from(p), e))
            .collect());
    }
    let mut n = n.clone();
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let bp = Integer::from(p);
        while n.is_multiple_of(&bp) {
            n /= &bp;
            primes.push(bp.clone());
        }
        if &bp * &bp > n {
            break;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    push_factors_big(n, &mut primes);
    primes.sort();
    let mut out: Vec<(Integer, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    Ok(out)
}

pub fn euler_phi(n: u64) -> u64 {
    factor_u64(n)
        .into_iter()
        .map(|(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

pub fn mobius(n: u64) -> i64 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factor_u64(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn sigma1(n: u64) -> u64 {
    divisors(n).into_iter().sum()
}

/// Product of the distinct primes dividing `n`.
pub fn radical(n: u64) -> u64 {
    factor_u64(n).into_iter().map(|(p, _)| p).product()
}

pub fn is_squarefree(n: u64) -> bool {
    factor_u64(n).iter().all(|&(_, e)| e == 1)
}

/// True when `n` is a perfect square.
pub fn is_square(n: u64) -> bool {
    let r = isqrt_u128(n as u128) as u64;
    r * r == n
}

pub fn rational_numerator(q: &Rational) -> Integer {
    q.numer().clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_examples() {
        assert_eq!(factor_u64(50), vec![(2, 1), (5, 2)]);
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(143), vec![(11, 1), (13, 1)]);
        let big = Integer::from(1_000_003u64) * Integer::from(998_244_353u64) * Integer::from(4u64);
        let f = factorize(&big).unwrap();
        assert_eq!(
            f,
            vec![
                (Integer::from(2), 2),
                (Integer::from(1_000_003u64), 1),
                (Integer::from(998_244_353u64), 1)
            ]
        );
    }

    #[test]
    fn rho_splits_semiprimes_above_trial_limit() {
        let n = 1_000_003u64 * 1_000_033u64;
        assert_eq!(factor_u64(n), vec![(1_000_003, 1), (1_000_033, 1)]);
    }

    #[test]
    fn crt_and_ext_gcd() {
        let (g, x, y) = ext_gcd(&2i64, &3i64);
        assert_eq!(g, 1);
        assert_eq!(2 * x + 3 * y, 1);
        let (r, m) = crt(
            &[Integer::from(2), Integer::from(3)],
            &[Integer::from(5), Integer::from(7)],
        )
        .unwrap();
        assert_eq!((r, m), (Integer::from(17), Integer::from(35)));
        assert!(crt(
            &[Integer::from(1), Integer::from(2)],
            &[Integer::from(4), Integer::from(6)]
        )
        .is_none());
    }

    #[test]
    fn arithmetic_functions() {
        assert_eq!(euler_phi(27), 18);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(sigma1(12), 28);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(radical(72), 6);
        assert!(is_square(144) && !is_square(143));
    }

    #[test]
    fn primality_matches_sieve() {
        let sieve = primes_up_to(10_000);
        let mr: Vec<u64> = (0..=10_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, mr);
    }
}
