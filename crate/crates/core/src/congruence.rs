//! Eisenstein series E_{2,N}, the mass-numerator criterion, the constructive solver for
//! cusp forms congruent to 1, mod-p eigen-congruence search and certificates.

use std::collections::BTreeMap;

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::integer::{divisors, factor_u64, is_prime, is_squarefree, mobius, mod_inverse, sigma1, Integer, Rational};
use crate::arith::linalg::{integer_kernel, kernel_mod_p, solve_integer};
use crate::brandt::{
    cuspidal_lattice, default_operators, eigen_blocks, eisenstein_kernel_mod_p, operator_matrices,
    pairing, EigenBlock, IntMatrix, Operator,
};
use crate::classes::{mass_formula, ClassSet};
use crate::error::{Error, Result};
use crate::orders::Level;

pub use crate::classes::mass_numerator;

/// q-expansion of `E_{2,N} = Σ_{d|N} μ(d) d E_2(dz)` through `q^{n_max}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EisensteinSeries {
    pub level: u64,
    pub coeffs: Vec<Rational>,
}

impl EisensteinSeries {
    /// Hecke eigenvalue: ℓ + 1 away from N, 1 at ℓ | N.
    pub fn eigenvalue(&self, ell: u64) -> Integer {
        if self.level % ell == 0 {
            Integer::one()
        } else {
            Integer::from(ell + 1)
        }
    }
}

pub fn eisenstein_qexp(level: u64, n_max: u64) -> EisensteinSeries {
    let divs = divisors(level);
    let a0 = -divs
        .iter()
        .map(|&d| Rational::from_integer((mobius(d) * d as i64).into()))
        .fold(Rational::zero(), |s, x| s + x)
        / Rational::from_integer(24.into());
    let mut coeffs = vec![a0];
    for n in 1..=n_max {
        let g = num_integer::gcd(n, level);
        let a: i64 = divisors(g)
            .iter()
            .map(|&d| mobius(d) * d as i64 * sigma1(n / d) as i64)
            .sum();
        coeffs.push(Rational::from_integer(a.into()));
    }
    EisensteinSeries { level, coeffs }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{p} is not prime")))
    }
}

/// Integral φ = 1 + p^r a in the cuspidal space, by solving `Σ w*_i a_i = −Σ w*_i / p^r`
/// with `w*_i = W / w_i`, `W = ∏ w_i`.
pub fn construct_congruent_cuspform(cs: &ClassSet, p: u64, r: u32) -> Result<Vec<Integer>> {
    check_prime(p)?;
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    let num = mass_numerator(cs.level());
    if !num.is_multiple_of(&Integer::from(p)) {
        return Err(Error::Precondition(format!(
            "{p} does not divide the mass numerator {num}"
        )));
    }
    let w = cs.weights();
    let big_w: Integer = w.iter().map(|&x| Integer::from(x)).product();
    let wstar: Vec<Integer> = w.iter().map(|&x| &big_w / Integer::from(x)).collect();
    let total: Integer = wstar.iter().sum();
    let pr = Integer::from(p).pow(r);
    let (q, rem) = total.div_rem(&pr);
    if !rem.is_zero() {
        return Err(Error::Infeasible(format!(
            "Σ w*_i = {total} is not divisible by {p}^{r}"
        )));
    }
    let sol = solve_integer(&[wstar], &[-q], w.len()).map_err(|_| {
        Error::Infeasible(format!("no integral solution modulo {p}^{r}"))
    })?;
    let phi: Vec<Integer> = sol.particular.iter().map(|a| Integer::one() + &pr * a).collect();
    debug_assert!(pairing(cs, &phi, &vec![Integer::one(); phi.len()]).is_zero());
    Ok(phi)
}

/// Largest r ≤ r_max for which the solver succeeds.
pub fn maximal_congruence_exponent(cs: &ClassSet, p: u64, r_max: u32) -> u32 {
    (1..=r_max)
        .take_while(|&r| construct_congruent_cuspform(cs, p, r).is_ok())
        .last()
        .unwrap_or(0)
}

/// A block carrying the Eisenstein eigen-system mod p.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CongruentBlock {
    pub block: usize,
    pub dim: usize,
    /// Dimension of the joint mod-p kernel of `T − λ(E)` on the block.
    pub kernel_dim: usize,
    pub rational: bool,
    /// Per operator: the eigenvalue when rational, and its residue mod p.
    pub residues: Vec<(Operator, Option<String>, u64)>,
    /// `charpoly(λ(E)) ≡ 0 mod p` for every operator.
    pub charpoly_consistent: bool,
}

#[derive(Clone, Debug)]
pub struct CongruenceSearch {
    pub p: u64,
    pub operators: Vec<Operator>,
    pub blocks: Vec<EigenBlock>,
    pub congruent: Vec<CongruentBlock>,
    /// Joint kernel dimension on the whole cuspidal lattice mod p.
    pub cusp_kernel_dim: usize,
}

pub fn eigen_congruence_search(cs: &ClassSet, p: u64, ell_max: u64) -> Result<CongruenceSearch> {
    check_prime(p)?;
    let ops = default_operators(cs, ell_max);
    let mats = operator_matrices(cs, &ops)?;
    let blocks = eigen_blocks(cs, &mats)?;
    let pb = Integer::from(p);
    let mut congruent = Vec::new();
    for (idx, b) in blocks.iter().enumerate() {
        let ker = eisenstein_kernel_mod_p(b, p);
        if ker.is_empty() {
            continue;
        }
        let residues = b
            .operators
            .iter()
            .map(|o| {
                let s = o.scalar();
                let res = match &s {
                    Some(v) => v.mod_floor(&pb).to_u64().unwrap(),
                    None => o.op.eisenstein_eigenvalue().mod_floor(&pb).to_u64().unwrap(),
                };
                (o.op, s.map(|v| v.to_string()), res)
            })
            .collect();
        let charpoly_consistent = b.operators.iter().all(|o| {
            o.charpoly
                .eval(&o.op.eisenstein_eigenvalue())
                .is_multiple_of(&pb)
        });
        congruent.push(CongruentBlock {
            block: idx,
            dim: b.dim(),
            kernel_dim: ker.len(),
            rational: b.is_rational(),
            residues,
            charpoly_consistent,
        });
    }
    let cusp_kernel_dim = whole_space_kernel(cs, &mats, p)?;
    Ok(CongruenceSearch {
        p,
        operators: ops,
        blocks,
        congruent,
        cusp_kernel_dim,
    })
}

fn whole_space_kernel(cs: &ClassSet, mats: &[(Operator, IntMatrix)], p: u64) -> Result<usize> {
    let cusp = cuspidal_lattice(cs);
    if cusp.is_empty() {
        return Ok(0);
    }
    let k = cusp.len();
    let pb = Integer::from(p);
    let mut rows = Vec::new();
    for (op, m) in mats {
        let r = crate::brandt::restrict(m, &cusp)?;
        let ev = op.eisenstein_eigenvalue();
        for j in 0..k {
            rows.push(
                (0..k)
                    .map(|i| {
                        let mut x = r[i][j].clone();
                        if i == j {
                            x -= &ev;
                        }
                        x.mod_floor(&pb).to_u64().unwrap()
                    })
                    .collect(),
            );
        }
    }
    Ok(kernel_mod_p(&rows, k, p).len())
}

/// Comparison of a rational eigenform's q-expansion with E_{2,N} mod p.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourierReport {
    pub level: u64,
    pub p: u64,
    pub n_max: u64,
    /// a_n(f) ≡ a_n(E) mod p for 1 ≤ n ≤ n_max.
    pub coefficients_congruent: bool,
    /// First n ≥ 1 where they differ, if any.
    pub first_mismatch: Option<u64>,
    pub eisenstein_constant_term: String,
    /// a_0(E) ≡ 0 mod p.
    pub constant_term_congruent: bool,
    pub congruent_as_q_expansions: bool,
}

/// p-adic reduction of a rational with denominator prime to p.
fn residue(q: &Rational, p: u64) -> Option<u64> {
    let pb = Integer::from(p);
    if q.denom().is_multiple_of(&pb) {
        return None;
    }
    let d = q.denom().mod_floor(&pb).to_i128().unwrap();
    let inv = mod_inverse(d, p as i128)?;
    let n = q.numer().mod_floor(&pb).to_i128().unwrap();
    Some(((n * inv).rem_euclid(p as i128)) as u64)
}

/// Coefficients a_1..a_{n_max} of the newform with the given eigenvalues: multiplicative,
/// `a_{ℓ^{k+1}} = a_ℓ a_{ℓ^k} − ℓ a_{ℓ^{k−1}}` for ℓ ∤ N and `a_{ℓ^k} = a_ℓ^k` for ℓ | N.
pub fn newform_coefficients(level: u64, eigenvalues: &BTreeMap<Operator, Integer>, n_max: u64) -> Result<Vec<Integer>> {
    let mut a = vec![Integer::zero(); n_max as usize + 1];
    if n_max >= 1 {
        a[1] = Integer::one();
    }
    for n in 2..=n_max {
        let f = factor_u64(n);
        let mut prod = Integer::one();
        for (ell, e) in f {
            let op = if level % ell == 0 {
                Operator::Involution(ell)
            } else {
                Operator::Hecke(ell)
            };
            let al = eigenvalues.get(&op).ok_or_else(|| {
                Error::Unsupported(format!("eigenvalue of {op} unknown"))
            })?;
            let mut prev = Integer::one();
            let mut cur = al.clone();
            for _ in 1..e {
                let next = if level % ell == 0 {
                    &cur * al
                } else {
                    &cur * al - Integer::from(ell) * &prev
                };
                prev = cur;
                cur = next;
            }
            prod *= cur;
        }
        a[n as usize] = prod;
    }
    Ok(a)
}

pub fn verify_fourier_congruence(
    level: Level,
    eigenvalues: &BTreeMap<Operator, Integer>,
    p: u64,
    n_max: u64,
) -> Result<FourierReport> {
    check_prime(p)?;
    let n = level.n();
    if level.n2 != 1 || !is_squarefree(n) {
        return Err(Error::Unsupported(format!(
            "q-expansion comparison needs squarefree N = N1; got {level}"
        )));
    }
    let af = newform_coefficients(n, eigenvalues, n_max)?;
    let e = eisenstein_qexp(n, n_max);
    let pb = Integer::from(p);
    let mut first_mismatch = None;
    for k in 1..=n_max as usize {
        let ek = residue(&e.coeffs[k], p).expect("integral coefficient");
        if af[k].mod_floor(&pb).to_u64().unwrap() != ek {
            first_mismatch = Some(k as u64);
            break;
        }
    }
    let a0 = &e.coeffs[0];
    let constant_term_congruent = residue(a0, p) == Some(0);
    Ok(FourierReport {
        level: n,
        p,
        n_max,
        coefficients_congruent: first_mismatch.is_none(),
        first_mismatch,
        eisenstein_constant_term: a0.to_string(),
        constant_term_congruent,
        congruent_as_q_expansions: first_mismatch.is_none() && constant_term_congruent,
    })
}

/// When exactly one congruent block exists and it is an eigen-line spanned by φ,
/// the scalar c with c φ ≡ φ₀ mod p.
pub fn converse_uniqueness_check(search: &CongruenceSearch) -> Option<(Vec<Integer>, u64)> {
    let [only] = &search.congruent[..] else {
        return None;
    };
    let block = &search.blocks[only.block];
    let phi = block.eigenvector()?;
    scalar_to_one(&phi, search.p).map(|c| (phi, c))
}

/// c with c φ ≡ (1, …, 1) mod p, if the values of φ share one nonzero residue.
pub fn scalar_to_one(phi: &[Integer], p: u64) -> Option<u64> {
    let pb = Integer::from(p);
    let first = phi.first()?.mod_floor(&pb);
    if first.is_zero() || phi.iter().any(|x| x.mod_floor(&pb) != first) {
        return None;
    }
    let inv = mod_inverse(first.to_i128().unwrap(), p as i128)?;
    Some(inv as u64)
}

/// Machine-checkable record of an Eisenstein congruence at one level.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CongruenceCertificate {
    pub n: String,
    pub n1: String,
    pub n2: String,
    pub p: String,
    pub r: String,
    pub mass: String,
    pub mass_numerator: String,
    pub weights: Vec<String>,
    pub phi: Vec<String>,
    pub pairing_with_constant: String,
    pub operators_tested: Vec<String>,
    /// (operator, λ mod p, target mod p) for the matched block.
    pub residues: Vec<(String, String, String)>,
    pub congruent_blocks: usize,
    pub matched_block_dim: Option<String>,
    pub matched_block_rational: Option<bool>,
    pub converse_scalar: Option<String>,
    pub fourier_depth: Option<String>,
    pub verified: bool,
}

fn s<T: ToString>(x: T) -> String {
    x.to_string()
}

pub fn certificate(cs: &ClassSet, p: u64, r: u32, ell_max: u64, n_max: u64) -> Result<CongruenceCertificate> {
    let phi = construct_congruent_cuspform(cs, p, r)?;
    let search = eigen_congruence_search(cs, p, ell_max)?;
    let level = cs.level();
    let pb = Integer::from(p);
    let pair = pairing(cs, &phi, &vec![Integer::one(); phi.len()]);
    let matched = search.congruent.first();
    let residues = matched
        .map(|m| {
            m.residues
                .iter()
                .map(|(op, _, res)| {
                    let target = op.eisenstein_eigenvalue().mod_floor(&pb);
                    (s(op), s(res), s(target))
                })
                .collect()
        })
        .unwrap_or_default();
    let converse = converse_uniqueness_check(&search);
    let fourier_depth = match (&converse, level.n2 == 1 && is_squarefree(level.n())) {
        (Some(_), true) => {
            let block = &search.blocks[matched.unwrap().block];
            // eigenvalues at all primes up to n_max are needed
            let ops = default_operators(cs, n_max);
            let mats = operator_matrices(cs, &ops)?;
            let v = block.eigenvector().unwrap();
            let mut ev = BTreeMap::new();
            for (op, m) in &mats {
                let image = crate::brandt::apply(m, &v);
                let idx = v.iter().position(|x| !x.is_zero()).unwrap();
                ev.insert(*op, &image[idx] / &v[idx]);
            }
            let rep = verify_fourier_congruence(level, &ev, p, n_max)?;
            Some(match rep.first_mismatch {
                None => s(n_max),
                Some(k) => s(k - 1),
            })
        }
        _ => None,
    };
    let pr = pb.pow(r);
    let verified = phi
        .iter()
        .all(|x| (x - Integer::one()).is_multiple_of(&pr))
        && pair.is_zero()
        && !search.congruent.is_empty()
        && matched.is_some_and(|m| m.residues.iter().all(|(op, _, res)| {
            op.eisenstein_eigenvalue().mod_floor(&pb).to_u64() == Some(*res)
        }));
    Ok(CongruenceCertificate {
        n: s(level.n()),
        n1: s(level.n1),
        n2: s(level.n2),
        p: s(p),
        r: s(r),
        mass: s(mass_formula(level)),
        mass_numerator: s(mass_numerator(level)),
        weights: cs.weights().iter().map(s).collect(),
        phi: phi.iter().map(s).collect(),
        pairing_with_constant: s(pair),
        operators_tested: search.operators.iter().map(s).collect(),
        residues,
        congruent_blocks: search.congruent.len(),
        matched_block_dim: matched.map(|m| s(m.dim)),
        matched_block_rational: matched.map(|m| m.rational),
        converse_scalar: converse.map(|(_, c)| s(c)),
        fourier_depth,
        verified,
    })
}

/// Re-checks a certificate's arithmetic claims against a class set.
pub fn verify_certificate(cs: &ClassSet, cert: &CongruenceCertificate) -> Result<bool> {
    let parse = |x: &String| -> Result<Integer> {
        x.parse().map_err(|_| Error::InvalidArgument(format!("bad integer {x:?}")))
    };
    let p = parse(&cert.p)?;
    let r: u32 = cert.r.parse().map_err(|_| Error::InvalidArgument("bad r".into()))?;
    let phi: Vec<Integer> = cert.phi.iter().map(parse).collect::<Result<_>>()?;
    if phi.len() != cs.h() || cert.n1 != cs.level().n1.to_string() || cert.n2 != cs.level().n2.to_string() {
        return Ok(false);
    }
    let pr = p.pow(r);
    let ok_phi = phi.iter().all(|x| (x - Integer::one()).is_multiple_of(&pr));
    let ok_pair = pairing(cs, &phi, &vec![Integer::one(); phi.len()]).is_zero();
    let ok_res = cert.residues.iter().all(|(_, a, b)| a == b);
    Ok(ok_phi && ok_pair && ok_res && cert.congruent_blocks > 0)
}

/// The primes dividing the mass numerator.
pub fn congruence_primes(level: Level) -> Vec<u64> {
    let num = mass_numerator(level).abs();
    crate::arith::integer::factorize(&num)
        .unwrap_or_default()
        .into_iter()
        .map(|(p, _)| p.to_u64().unwrap())
        .collect()
}

/// Kernel helper exposed for tests: saturated integer kernel of one row.
pub fn cusp_condition_kernel(weights: &[u64]) -> IntMatrix {
    let l = weights.iter().fold(1u64, |a, &b| a.lcm(&b));
    let row: Vec<Integer> = weights.iter().map(|&w| Integer::from(l / w)).collect();
    integer_kernel(&[row], weights.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::class_set_for;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn cs(n1: u64, n2: u64) -> ClassSet {
        class_set_for(Level::new(n1, n2).unwrap(), None).unwrap()
    }

    #[test]
    fn eisenstein_examples() {
        let e = eisenstein_qexp(73, 5);
        assert_eq!(e.coeffs[0], q(3, 1));
        let e = eisenstein_qexp(11, 11);
        assert_eq!(e.coeffs[0], q(5, 12));
        assert_eq!(e.coeffs[2], q(3, 1));
        assert_eq!(e.coeffs[11], q(1, 1));
        assert_eq!(eisenstein_qexp(17, 1).coeffs[0], q(2, 3));
    }

    #[test]
    fn eisenstein_eigenvalues_and_powerfree_level() {
        for n in [11u64, 12, 27, 50, 73] {
            let e = eisenstein_qexp(n, 100);
            for ell in crate::arith::integer::primes_up_to(100) {
                assert_eq!(e.coeffs[ell as usize], Rational::from_integer(e.eigenvalue(ell)));
            }
            let radical = crate::arith::integer::radical(n);
            assert_eq!(e.coeffs, eisenstein_qexp(radical, 100).coeffs);
        }
    }

    #[test]
    fn solver_level_11() {
        let c = cs(11, 1);
        let phi = construct_congruent_cuspform(&c, 5, 1).unwrap();
        assert_eq!(phi, vec![Integer::from(6), Integer::from(-4)]);
        assert!(matches!(construct_congruent_cuspform(&c, 7, 1), Err(Error::Precondition(_))));
        assert!(matches!(construct_congruent_cuspform(&c, 5, 2), Err(Error::Infeasible(_))));
    }

    #[test]
    fn search_level_11() {
        let c = cs(11, 1);
        let s5 = eigen_congruence_search(&c, 5, 20).unwrap();
        assert_eq!(s5.congruent.len(), 1);
        let (phi, scalar) = converse_uniqueness_check(&s5).unwrap();
        assert_eq!(phi, vec![Integer::from(3), Integer::from(-2)]);
        assert_eq!(scalar, 2);
        let s7 = eigen_congruence_search(&c, 7, 20).unwrap();
        assert!(s7.congruent.is_empty());
    }

    #[test]
    fn fourier_level_11() {
        let c = cs(11, 1);
        let (forms, _) = crate::brandt::eigenforms(&c, &default_operators(&c, 200)).unwrap();
        let rep = verify_fourier_congruence(c.level(), &forms[0].eigenvalues, 5, 200).unwrap();
        assert!(rep.congruent_as_q_expansions);
        let a = newform_coefficients(11, &forms[0].eigenvalues, 10).unwrap();
        // η(z)²η(11z)² = q − 2q² − q³ + 2q⁴ + q⁵ + 2q⁶ − 2q⁷ − 2q⁹ − 2q¹⁰
        let want = [0i64, 1, -2, -1, 2, 1, 2, -2, 0, -2, -2];
        assert_eq!(a, want.iter().map(|&x| Integer::from(x)).collect::<Vec<_>>());
    }

    #[test]
    fn certificate_roundtrip() {
        let c = cs(11, 1);
        let cert = certificate(&c, 5, 1, 20, 50).unwrap();
        assert!(cert.verified);
        assert_eq!(cert.converse_scalar.as_deref(), Some("2"));
        assert_eq!(cert.fourier_depth.as_deref(), Some("50"));
        assert!(verify_certificate(&c, &cert).unwrap());
        let mut bad = cert.clone();
        bad.phi[0] = "7".into();
        assert!(!verify_certificate(&c, &bad).unwrap());
    }
}
