//! Optimal embeddings of imaginary quadratic orders, the class map Cl(o_K) → Cl(O),
//! toric periods and algebraic central L-values.

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::integer::{is_squarefree, Integer, Rational};
use crate::arith::CyclotomicInt;
use crate::classes::{left_order, normalized_form, ClassSet};
use crate::error::{Error, Result};
use crate::quadratic::{reduced_forms, splitting_type, ClassCharacter, FormClassGroup, ImagQuadField};
use crate::quat::lattice::int_to_element;
use crate::quat::{Lattice, QuatElement};

/// `ω` with minimal polynomial `x² − t x + n`, lying in the left order of `I_k`.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub field: ImagQuadField,
    pub omega: QuatElement,
    pub trace: i64,
    pub norm: i64,
    /// Index of the class whose left order contains `Z[ω]`.
    pub anchor: usize,
}

fn combine(l: &Lattice, c: &[i128]) -> QuatElement {
    let mut v = [0i128; 4];
    for (k, row) in l.rows().iter().enumerate() {
        for t in 0..4 {
            v[t] += c[k] * row[t];
        }
    }
    int_to_element(&v, l.den())
}

fn check_scope(cs: &ClassSet, field: &ImagQuadField) -> Result<()> {
    let level = cs.level();
    if level.n2 != 1 || !is_squarefree(level.n()) {
        return Err(Error::Unsupported(format!(
            "periods need a maximal order (squarefree N = N1); got {level}"
        )));
    }
    for &p in cs.algebra().ramified_primes() {
        let kind = splitting_type(field.disc, p);
        if kind != "inert" {
            return Err(Error::NotInert { disc: field.disc, prime: p, splitting: kind });
        }
    }
    Ok(())
}

/// Elements of `L` with reduced trace `t` and reduced norm `n`.
fn elements_with(cs: &ClassSet, l: &Lattice, t: i64, n: i64) -> Vec<QuatElement> {
    let alg = cs.algebra();
    let nl = l.norm(alg);
    let target = Rational::from_integer(n.into()) / &nl;
    if !target.is_integer() {
        return Vec::new();
    }
    let v = 2 * target.to_integer().to_i128().unwrap();
    let tq = Rational::from_integer(t.into());
    normalized_form(alg, l)
        .enumerate(v)
        .into_iter()
        .filter(|(_, q)| *q == v)
        .map(|(c, _)| combine(l, &c))
        .filter(|x| alg.trd(x) == tq)
        .collect()
}

/// All embeddings `ω` into the left orders of the class representatives, anchors in order.
pub fn embeddings(cs: &ClassSet, field: ImagQuadField) -> Result<Vec<Embedding>> {
    check_scope(cs, &field)?;
    let (t, n) = field.generator_trace_norm();
    let alg = cs.algebra();
    let mut out = Vec::new();
    for (k, c) in cs.classes.iter().enumerate() {
        let lo = left_order(alg, &c.ideal);
        for omega in elements_with(cs, &lo, t, n) {
            out.push(Embedding { field, omega, trace: t, norm: n, anchor: k });
        }
    }
    Ok(out)
}

/// First embedding, preferring `O` itself.
pub fn optimal_embedding(cs: &ClassSet, field: ImagQuadField) -> Result<Embedding> {
    check_scope(cs, &field)?;
    let (t, n) = field.generator_trace_norm();
    let alg = cs.algebra();
    for (k, c) in cs.classes.iter().enumerate() {
        let lo = left_order(alg, &c.ideal);
        if let Some(omega) = elements_with(cs, &lo, t, n).into_iter().next() {
            return Ok(Embedding { field, omega, trace: t, norm: n, anchor: k });
        }
    }
    Err(Error::Internal(format!(
        "no embedding of the maximal order of discriminant {} found",
        field.disc
    )))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ClassMap {
    pub disc: i64,
    /// Class index in Cl(O) of each form class.
    pub image: Vec<usize>,
    /// Number of form classes over each class of O.
    pub fibers: Vec<usize>,
}

/// `t ↦ [ι(a_t) I_k]` where `a_t = ⟨a, ω − (b + t₀)/2⟩` for the form `(a, b, c)`.
pub fn class_map(cs: &ClassSet, emb: &Embedding, group: &FormClassGroup) -> Result<ClassMap> {
    let alg = cs.algebra();
    let anchor = &cs.classes[emb.anchor].ideal;
    let image = group
        .forms
        .par_iter()
        .map(|f| {
            let shift = (f.b + emb.trace) / 2;
            let gen = emb.omega.sub(&QuatElement::from_rational(Rational::from_integer(shift.into())));
            let ideal = anchor
                .scale(f.a as i128, 1)
                .sum(&anchor.left_mul(&gen, alg));
            cs.classify(&ideal)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut fibers = vec![0; cs.h()];
    for &i in &image {
        fibers[i] += 1;
    }
    Ok(ClassMap { disc: group.disc(), image, fibers })
}

/// `P⁰_χ(φ) = Σ_t φ(x(t)) conj(χ(t))`.
pub fn period(phi: &[Integer], chi: &ClassCharacter, group: &FormClassGroup, cmap: &ClassMap) -> CyclotomicInt {
    let e = chi.conductor();
    let mut s = CyclotomicInt::zero(e);
    for (t, &i) in cmap.image.iter().enumerate() {
        let term = &chi.value(group, t).conj() * &CyclotomicInt::from_integer(e, phi[i].clone());
        s = &s + &term;
    }
    s
}

/// `|P⁰_χ(φ)|²`.
pub fn alg_lvalue(phi: &[Integer], chi: &ClassCharacter, group: &FormClassGroup, cmap: &ClassMap) -> CyclotomicInt {
    period(phi, chi, group, cmap).abs_squared()
}

/// φ divided by the gcd of its values, first nonzero value positive.
pub fn normalize(phi: &[Integer]) -> Vec<Integer> {
    let g = phi.iter().fold(Integer::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return phi.to_vec();
    }
    let sign = phi.iter().find(|x| !x.is_zero()).map_or(Integer::one(), |x| x.signum());
    phi.iter().map(|x| x / &g * &sign).collect()
}

/// The common residue of φ mod `m`.
pub fn c_phi(phi: &[Integer], m: &Integer) -> Result<Integer> {
    let first = phi
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty form".into()))?
        .mod_floor(m);
    if phi.iter().any(|x| x.mod_floor(m) != first) {
        return Err(Error::Precondition(format!("values of φ are not all congruent mod {m}")));
    }
    if first.is_zero() {
        return Err(Error::Precondition(format!("φ vanishes mod {m}")));
    }
    Ok(first)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LValueRecord {
    #[serde(rename = "N")]
    pub n: String,
    pub disc: String,
    pub h_k: String,
    pub w_k: String,
    #[serde(rename = "char")]
    pub character: String,
    pub character_order: String,
    pub conductor: String,
    pub phi: Vec<String>,
    pub fibers: Vec<String>,
    /// Coefficients of P in the power basis of Z[ζ_conductor].
    #[serde(rename = "P")]
    pub period: Vec<String>,
    #[serde(rename = "Lalg")]
    pub lalg: String,
    pub lalg_coefficients: Vec<String>,
    #[serde(rename = "target")]
    pub target_residue: Option<String>,
    pub verdict: Option<bool>,
}

fn strings(v: &[Integer]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn display_value(x: &CyclotomicInt) -> String {
    x.to_integer().map_or_else(|| x.to_string(), |v| v.to_string())
}

/// Central-value congruence for one (Δ, χ): `L ≡ δ_{χ,1} c² h² mod p^r` (rational case) or
/// `L ≡ 0` modulo every prime above p (r = 1) or modulo p^r (p prime to the conductor).
fn central_verdict(l: &CyclotomicInt, chi: &ClassCharacter, c: &Integer, h: usize, p: u64, r: u32) -> Result<(String, bool)> {
    let pr = Integer::from(p).pow(r);
    if chi.is_trivial() {
        let target = (c * c * Integer::from(h * h)).mod_floor(&pr);
        let lv = l
            .to_integer()
            .ok_or_else(|| Error::Internal("trivial-character L-value is not rational".into()))?;
        return Ok((target.to_string(), lv.mod_floor(&pr) == target));
    }
    if r == 1 {
        return Ok(("0".into(), l.vanishes_mod_all_primes_above(p)));
    }
    if chi.conductor() % p == 0 {
        return Err(Error::Unsupported(format!(
            "p^r with r > 1 and p dividing the character conductor {}",
            chi.conductor()
        )));
    }
    Ok(("0".into(), l.coeffs().iter().all(|x| x.is_multiple_of(&pr))))
}

/// Per-character L-values at one discriminant, with congruence verdicts when `p` is given.
pub fn lvalues(cs: &ClassSet, phi: &[Integer], disc: i64, check: Option<(u64, u32)>) -> Result<Vec<LValueRecord>> {
    let field = ImagQuadField::new(disc)?;
    let emb = optimal_embedding(cs, field)?;
    let group = reduced_forms(disc)?;
    let cmap = class_map(cs, &emb, &group)?;
    let phi = normalize(phi);
    let c = match check {
        Some((p, r)) => Some(c_phi(&phi, &Integer::from(p).pow(r))?),
        None => None,
    };
    group
        .characters()
        .iter()
        .enumerate()
        .map(|(idx, chi)| {
            let p0 = period(&phi, chi, &group, &cmap);
            let l = p0.abs_squared();
            let (target, verdict) = match (check, &c) {
                (Some((p, r)), Some(c)) => {
                    let (t, v) = central_verdict(&l, chi, c, group.h(), p, r)?;
                    (Some(t), Some(v))
                }
                _ => (None, None),
            };
            Ok(LValueRecord {
                n: cs.level().n().to_string(),
                disc: disc.to_string(),
                h_k: group.h().to_string(),
                w_k: field.w().to_string(),
                character: idx.to_string(),
                character_order: chi.order().to_string(),
                conductor: chi.conductor().to_string(),
                phi: strings(&phi),
                fibers: cmap.fibers.iter().map(|x| x.to_string()).collect(),
                period: strings(p0.coeffs()),
                lalg: display_value(&l),
                lalg_coefficients: strings(l.coeffs()),
                target_residue: target,
                verdict,
            })
        })
        .collect()
}

/// `L ≡ δ_{χ,1} c_φ² h_K² mod p^r` over a list of discriminants; discriminants not inert at every p | N are skipped.
pub fn verify_central_congruence(cs: &ClassSet, phi: &[Integer], p: u64, r: u32, discs: &[i64]) -> Result<Vec<LValueRecord>> {
    let per: Vec<Result<Vec<LValueRecord>>> = discs
        .par_iter()
        .filter(|&&d| cs.algebra().ramified_primes().iter().all(|&q| splitting_type(d, q) == "inert"))
        .map(|&d| lvalues(cs, phi, d, Some((p, r))))
        .collect();
    let mut out = Vec::new();
    for r in per {
        out.extend(r?);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Nonvanishing {
    /// `P⁰₁(φ) ≡ h_K ≢ 0 mod p`, so `L(1, f_K) ≠ 0` for some eigen-component.
    Nonvanishing { disc: i64, h_k: u64, period: String },
    /// `p | h_K`.
    Inconclusive { disc: i64, h_k: u64, period: String },
    /// Some prime dividing N is not inert.
    OutOfScope { disc: i64, prime: u64, splitting: String, reason: String },
}

pub fn nonvanishing_report(cs: &ClassSet, phi: &[Integer], p: u64, disc: i64) -> Result<Nonvanishing> {
    let field = ImagQuadField::new(disc)?;
    if !phi.iter().all(|x| (x - Integer::one()).is_multiple_of(&Integer::from(p))) {
        return Err(Error::Precondition(format!("φ is not congruent to 1 mod {p}")));
    }
    let emb = match optimal_embedding(cs, field) {
        Ok(e) => e,
        Err(Error::NotInert { disc, prime, splitting }) => {
            let reason = if splitting == "split" {
                "root number -1: the central value vanishes for sign reasons".to_string()
            } else {
                "ramified: local factors not covered".to_string()
            };
            return Ok(Nonvanishing::OutOfScope { disc, prime, splitting: splitting.into(), reason });
        }
        Err(e) => return Err(e),
    };
    let group = reduced_forms(disc)?;
    let cmap = class_map(cs, &emb, &group)?;
    let trivial = group.character(0)?;
    let p0 = period(phi, &trivial, &group, &cmap)
        .to_integer()
        .ok_or_else(|| Error::Internal("trivial period is not rational".into()))?;
    let h = group.h() as u64;
    if h % p == 0 {
        return Ok(Nonvanishing::Inconclusive { disc, h_k: h, period: p0.to_string() });
    }
    let pb = Integer::from(p);
    if p0.is_zero() || p0.mod_floor(&pb) != Integer::from(h).mod_floor(&pb) {
        return Err(Error::Internal(format!("period {p0} is not congruent to h_K = {h} mod {p}")));
    }
    Ok(Nonvanishing::Nonvanishing { disc, h_k: h, period: p0.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::class_set_for;
    use crate::orders::Level;
    use crate::quadratic::fundamental_discriminants;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    fn n11() -> ClassSet {
        class_set_for(Level::new(11, 1).unwrap(), None).unwrap()
    }

    #[test]
    fn worked_example_minus_23() {
        let cs = n11();
        let field = ImagQuadField::new(-23).unwrap();
        let emb = optimal_embedding(&cs, field).unwrap();
        assert_eq!(emb.anchor, 0);
        assert_eq!((emb.trace, emb.norm), (1, 6));
        let alg = cs.algebra();
        assert_eq!(alg.nrd(&emb.omega), Rational::from_integer(6.into()));
        let g = reduced_forms(-23).unwrap();
        let cmap = class_map(&cs, &emb, &g).unwrap();
        assert_eq!(cmap.fibers, vec![1, 2]);
        assert_eq!(cmap.image[0], 0);
        let phi = ints(&[3, -2]);
        let chars = g.characters();
        assert_eq!(period(&phi, &chars[0], &g, &cmap).to_integer(), Some((-1).into()));
        assert_eq!(alg_lvalue(&phi, &chars[0], &g, &cmap).to_integer(), Some(1.into()));
        for chi in &chars[1..] {
            let p = period(&phi, chi, &g, &cmap);
            let zeta_multiple = (0..3).any(|k| p == &CyclotomicInt::from_integer(3, 5) * &CyclotomicInt::zeta_pow(3, k));
            assert!(zeta_multiple, "P = {p}");
            assert_eq!(alg_lvalue(&phi, chi, &g, &cmap).to_integer(), Some(25.into()));
        }
    }

    #[test]
    fn refuses_split_primes() {
        let cs = n11();
        let err = optimal_embedding(&cs, ImagQuadField::new(-7).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NotInert { prime: 11, splitting: "split", .. }));
        let err = optimal_embedding(&cs, ImagQuadField::new(-11).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NotInert { splitting: "ramified", .. }));
    }

    #[test]
    fn c_phi_examples() {
        assert_eq!(c_phi(&ints(&[3, -2]), &5.into()).unwrap(), 3.into());
        assert_eq!(c_phi(&ints(&[1, 1, 1]), &7.into()).unwrap(), 1.into());
        assert!(c_phi(&ints(&[3, -2]), &7.into()).is_err());
    }

    #[test]
    fn eisenstein_periods_and_parseval() {
        let cs = n11();
        for d in fundamental_discriminants(3, 120) {
            if splitting_type(d, 11) != "inert" {
                continue;
            }
            let g = reduced_forms(d).unwrap();
            let emb = optimal_embedding(&cs, ImagQuadField::new(d).unwrap()).unwrap();
            let cmap = class_map(&cs, &emb, &g).unwrap();
            assert_eq!(cmap.fibers.iter().sum::<usize>(), g.h());
            let phi0 = ints(&[1, 1]);
            let phi = ints(&[3, -2]);
            for (i, chi) in g.characters().iter().enumerate() {
                let p0 = period(&phi0, chi, &g, &cmap);
                let want = if i == 0 { g.h() as i64 } else { 0 };
                assert_eq!(p0, CyclotomicInt::from_integer(chi.conductor(), want));
            }
            let rhs: Integer = cmap.image.iter().map(|&i| &phi[i] * &phi[i]).sum::<Integer>() * g.h();
            let lhs = parseval_sum(&phi, &g, &cmap);
            assert_eq!(lhs, rhs, "Δ = {d}");
        }
    }

    fn parseval_sum(phi: &[Integer], g: &FormClassGroup, cmap: &ClassMap) -> Integer {
        let e = g.exponent();
        let mut s = CyclotomicInt::zero(e);
        for chi in g.characters() {
            let l = alg_lvalue(phi, &chi, g, cmap);
            // lift into the common conductor e
            let mut lifted = CyclotomicInt::zero(e);
            let step = (e / chi.conductor()) as i64;
            for (k, c) in l.coeffs().iter().enumerate() {
                let term = &CyclotomicInt::from_integer(e, c.clone()) * &CyclotomicInt::zeta_pow(e, k as i64 * step);
                lifted = &lifted + &term;
            }
            s = &s + &lifted;
        }
        s.to_integer().expect("Parseval sum is rational")
    }

    #[test]
    fn embedding_independence() {
        let cs = n11();
        for d in [-23i64, -31, -47] {
            let g = reduced_forms(d).unwrap();
            let phi = ints(&[3, -2]);
            let embs = embeddings(&cs, ImagQuadField::new(d).unwrap()).unwrap();
            assert!(!embs.is_empty());
            let reference: Vec<CyclotomicInt> = {
                let cmap = class_map(&cs, &embs[0], &g).unwrap();
                g.characters().iter().map(|c| alg_lvalue(&phi, c, &g, &cmap)).collect()
            };
            for emb in embs.iter().step_by(embs.len().div_ceil(6)) {
                let cmap = class_map(&cs, emb, &g).unwrap();
                let mut got: Vec<CyclotomicInt> =
                    g.characters().iter().map(|c| alg_lvalue(&phi, c, &g, &cmap)).collect();
                let mut want = reference.clone();
                // conjugate characters may trade places
                got.sort_by_key(|x| x.to_string());
                want.sort_by_key(|x| x.to_string());
                assert_eq!(got, want, "Δ = {d}");
            }
        }
    }

    #[test]
    fn nonvanishing_at_17() {
        let cs = class_set_for(Level::new(17, 1).unwrap(), None).unwrap();
        let phi = crate::congruence::construct_congruent_cuspform(&cs, 2, 1).unwrap();
        // 17 is inert in Q(√−3)
        let rep = nonvanishing_report(&cs, &phi, 2, -3).unwrap();
        assert!(matches!(rep, Nonvanishing::Nonvanishing { h_k: 1, .. }));
        // 17 splits in Q(√−4)
        let rep = nonvanishing_report(&cs, &phi, 2, -4).unwrap();
        assert!(matches!(rep, Nonvanishing::OutOfScope { ref splitting, .. } if splitting == "split"));
    }
}
