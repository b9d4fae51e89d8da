//! Right ideal class sets Cl(O): neighbor enumeration certified by the mass formula,
//! equivalence testing and unit weights.

use std::collections::{HashMap, VecDeque};
use std::path::Path;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::integer::{euler_phi, factor_u64, is_prime, Integer, Rational};
use crate::arith::linalg::rref_mod_p;
use crate::error::{Error, Result};
use crate::orders::{order_for, Level, Order};
use crate::quat::lattice::int_to_element;
use crate::quat::reduce::evaluate;
use crate::quat::{Lattice, QuatElement, QuaternionAlgebra, ReducedForm};

/// `m(O) = φ(N1)/12 · N2 · ∏_{p | N2} (1 + 1/p)`
pub fn mass_formula(level: Level) -> Rational {
    let mut m = Rational::new(euler_phi(level.n1).into(), 12.into()) * Rational::from_integer(level.n2.into());
    for (p, _) in factor_u64(level.n2) {
        m *= Rational::new((p + 1).into(), p.into());
    }
    m
}

pub fn mass_numerator(level: Level) -> Integer {
    mass_formula(level).numer().clone()
}

fn gram_vec(g: &[[i128; 4]; 4]) -> Vec<Vec<i128>> {
    g.iter().map(|r| r.to_vec()).collect()
}

/// The form `x ↦ nrd(x)/nrd(L)` on a lattice, LLL-reduced; `Q = 2 q`.
pub fn normalized_form(alg: &QuaternionAlgebra, l: &Lattice) -> ReducedForm {
    ReducedForm::new(&gram_vec(&l.normalized_gram(alg)))
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

/// Witness `b` with `I = b J`, if the ideals are in the same class.
pub fn is_equivalent(alg: &QuaternionAlgebra, i: &Lattice, j: &Lattice) -> Option<QuatElement> {
    if i == j {
        return Some(QuatElement::one());
    }
    let (ni, nj) = (i.norm(alg), j.norm(alg));
    let l = i.product(&j.conj(), alg);
    let nl = l.norm(alg);
    let target = &ni * &nj / &nl;
    if !target.is_integer() {
        return None;
    }
    let t = target.to_integer().to_i128()?;
    let form = normalized_form(alg, &l);
    let c = form.find(2 * t)?;
    let y = int_to_element(&combine(&l, &c), l.den());
    let b = y.scale(&nj.recip());
    debug_assert_eq!(&j.left_mul(&b, alg), i);
    Some(b)
}

/// Half the number of reduced-norm-1 elements of the left order of `I`.
pub fn unit_weight(alg: &QuaternionAlgebra, i: &Lattice) -> u64 {
    let left = left_order(alg, i);
    let form = normalized_form(alg, &left);
    (form.theta(2)[2] / 2) as u64
}

/// `O_l(I) = I conj(I) / nrd(I)` for invertible `I`.
pub fn left_order(alg: &QuaternionAlgebra, i: &Lattice) -> Lattice {
    let n = i.norm(alg);
    i.product(&i.conj(), alg).scale_rational(&n.recip())
}

/// Equivalent integral ideal `conj(x) I / nrd(I)` with `x ∈ I` of minimal norm.
pub fn reduce_ideal(alg: &QuaternionAlgebra, i: &Lattice) -> Lattice {
    let form = normalized_form(alg, i);
    let min = form.minimum();
    let c = form.find(min).expect("minimum is attained");
    let x = int_to_element(&combine(i, &c), i.den());
    let n = i.norm(alg);
    i.left_mul(&x.conj(), alg).scale_rational(&n.recip())
}

/// Class invariant: theta coefficients of the normalized norm form of `I`.
fn invariant(alg: &QuaternionAlgebra, i: &Lattice) -> Vec<u64> {
    normalized_form(alg, i).theta(8)
}

/// The ℓ + 1 right O-ideals `J ⊂ I` with `[I : J] = ℓ²` and `nrd(J) = ℓ nrd(I)`.
pub fn neighbors(order: &Order, i: &Lattice, ell: u64) -> Vec<Lattice> {
    let alg = &order.algebra;
    let o = &order.lattice;
    let g = i.normalized_gram(alg);
    let gv = gram_vec(&g);
    let l = ell as i128;
    let li = i.scale(l, 1);
    let mut covered = vec![false; (ell as usize).pow(4)];
    let index = |c: &[i128]| c.iter().rev().fold(0usize, |acc, &x| acc * ell as usize + x as usize);
    let mut out = Vec::new();
    for idx in 1..covered.len() {
        if covered[idx] {
            continue;
        }
        let mut c = [0i128; 4];
        let mut t = idx;
        for ck in c.iter_mut() {
            *ck = (t % ell as usize) as i128;
            t /= ell as usize;
        }
        // q(c) = c^T G c / 2
        if (evaluate(&gv, &c) / 2) % l != 0 {
            continue;
        }
        let v = combine(i, &c);
        let xo = Lattice::from_generators(
            &o.rows().iter().map(|r| alg.mul_int(&v, r)).collect::<Vec<_>>(),
            i.den() * o.den(),
        )
        .expect("nonzero element");
        let j = xo.sum(&li);
        // J / ℓI inside I / ℓI
        let mut rows: Vec<Vec<u64>> = j
            .rows()
            .iter()
            .map(|r| {
                i.coordinates(r, j.den())
                    .iter()
                    .map(|q| {
                        let z = q.to_integer();
                        z.to_i128().unwrap().rem_euclid(l) as u64
                    })
                    .collect()
            })
            .collect();
        let piv = rref_mod_p(&mut rows, ell);
        rows.truncate(piv.len());
        let dim = rows.len();
        for s in 0..(ell as usize).pow(dim as u32) {
            let mut comb = [0i128; 4];
            let mut t = s;
            for r in &rows {
                let a = (t % ell as usize) as i128;
                t /= ell as usize;
                for k in 0..4 {
                    comb[k] = (comb[k] + a * r[k] as i128) % l;
                }
            }
            covered[index(&comb)] = true;
        }
        out.push(j);
    }
    out
}

/// One enumerated class: the ideal and its cached invariants.
#[derive(Clone, Debug)]
pub struct IdealClass {
    pub ideal: Lattice,
    pub norm: Rational,
    pub weight: u64,
    invariant: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct ClassSet {
    pub order: Order,
    pub classes: Vec<IdealClass>,
    pub mass: Rational,
    pub neighbor_primes: Vec<u64>,
}

impl ClassSet {
    pub fn h(&self) -> usize {
        self.classes.len()
    }

    pub fn weights(&self) -> Vec<u64> {
        self.classes.iter().map(|c| c.weight).collect()
    }

    pub fn ideals(&self) -> Vec<&Lattice> {
        self.classes.iter().map(|c| &c.ideal).collect()
    }

    pub fn algebra(&self) -> &QuaternionAlgebra {
        &self.order.algebra
    }

    pub fn level(&self) -> Level {
        self.order.level
    }

    pub fn weight_sum(&self) -> Rational {
        self.classes
            .iter()
            .map(|c| Rational::new(1.into(), c.weight.into()))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Index of the class of `j`.
    pub fn classify(&self, j: &Lattice) -> Result<usize> {
        let alg = self.algebra();
        let j = reduce_ideal(alg, j);
        let inv = invariant(alg, &j);
        self.classes
            .par_iter()
            .position_first(|c| c.invariant == inv && is_equivalent(alg, &c.ideal, &j).is_some())
            .ok_or_else(|| Error::Internal("ideal matches no class representative".into()))
    }
}

fn make_class(alg: &QuaternionAlgebra, ideal: Lattice) -> IdealClass {
    let norm = ideal.norm(alg);
    let weight = unit_weight(alg, &ideal);
    let invariant = invariant(alg, &ideal);
    IdealClass {
        ideal,
        norm,
        weight,
        invariant,
    }
}

fn neighbor_primes(level: Level) -> impl Iterator<Item = u64> {
    (2u64..).filter(move |&p| is_prime(p) && level.n() % p != 0)
}

/// Enumerate Cl(O) by neighbor search, stopping exactly when the weights reach the mass.
pub fn enumerate_classes(order: &Order) -> Result<ClassSet> {
    enumerate_with_primes(order, neighbor_primes(order.level).take(4).collect())
}

/// Enumeration using the given neighbor primes in order.
pub fn enumerate_with_primes(order: &Order, primes: Vec<u64>) -> Result<ClassSet> {
    let alg = &order.algebra;
    let mass = mass_formula(order.level);
    let first = make_class(alg, order.lattice.clone());
    let mut classes = vec![first];
    let mut total = Rational::new(1.into(), classes[0].weight.into());
    let mut by_hnf: HashMap<Lattice, usize> = HashMap::new();
    by_hnf.insert(order.lattice.clone(), 0);
    let mut used = Vec::new();

    for &ell in &primes {
        if total >= mass {
            break;
        }
        used.push(ell);
        let mut queue: VecDeque<usize> = (0..classes.len()).collect();
        while let Some(idx) = queue.pop_front() {
            if total >= mass {
                break;
            }
            let nbrs = neighbors(order, &classes[idx].ideal.clone(), ell);
            for j in nbrs {
                let j = reduce_ideal(alg, &j);
                if by_hnf.contains_key(&j) {
                    continue;
                }
                let inv = invariant(alg, &j);
                let known = classes
                    .par_iter()
                    .position_first(|c| c.invariant == inv && is_equivalent(alg, &c.ideal, &j).is_some());
                match known {
                    Some(k) => {
                        by_hnf.insert(j, k);
                    }
                    None => {
                        let c = make_class(alg, j.clone());
                        total += Rational::new(1.into(), c.weight.into());
                        by_hnf.insert(j, classes.len());
                        queue.push_back(classes.len());
                        classes.push(c);
                        if total > mass {
                            return Err(Error::MassOvershoot {
                                found: total.to_string(),
                                expected: mass.to_string(),
                            });
                        }
                        if total == mass {
                            break;
                        }
                    }
                }
            }
        }
    }
    if total != mass {
        return Err(Error::NeighborsExhausted {
            found: total.to_string(),
            expected: mass.to_string(),
        });
    }
    Ok(ClassSet {
        order: order.clone(),
        classes,
        mass,
        neighbor_primes: used,
    })
}

/// Re-bases the class set on the left order of a class of maximal unit weight, so that
/// `I_1 = O` has the largest unit group. Brandt matrices are unchanged up to relabelling.
pub fn canonical_class_set(order: &Order) -> Result<ClassSet> {
    let cs = enumerate_classes(order)?;
    let best = (0..cs.h())
        .max_by_key(|&i| (cs.classes[i].weight, std::cmp::Reverse(i)))
        .unwrap_or(0);
    if cs.classes[best].weight == cs.classes[0].weight {
        return Ok(cs);
    }
    let alg = &order.algebra;
    let lattice = left_order(alg, &cs.classes[best].ideal);
    let rebased = Order {
        algebra: alg.clone(),
        lattice,
        level: order.level,
    };
    if rebased.discriminant()? != Integer::from(order.level.n()) {
        return Err(Error::Internal("left order has the wrong discriminant".into()));
    }
    enumerate_classes(&rebased)
}

/// Class set for a level, through the cache directory when one is given.
/// The admissible split of `n` with the largest mass numerator (smallest N1 on ties).
pub fn default_split(n: u64) -> Result<Level> {
    let mut best: Option<(Integer, Level)> = None;
    for lv in Level::splits(n) {
        let num = mass_numerator(lv);
        if best.as_ref().map_or(true, |(b, _)| num > *b) {
            best = Some((num, lv));
        }
    }
    best.map(|(_, lv)| lv).ok_or_else(|| {
        Error::InvalidLevel(format!(
            "{n} admits no split: the primes to odd exponent must be odd in number"
        ))
    })
}

pub fn class_set_for(level: Level, cache_dir: Option<&Path>) -> Result<ClassSet> {
    let order = order_for(level)?;
    if let Some(dir) = cache_dir {
        if let Some(cs) = cache::load(dir, &order.algebra, level)? {
            return Ok(cs);
        }
        let cs = canonical_class_set(&order)?;
        cache::store(dir, &cs)?;
        return Ok(cs);
    }
    canonical_class_set(&order)
}

pub mod cache {
    //! JSON records of class sets, keyed by the algebra and level, re-validated on load.

    use std::fs;
    use std::path::{Path, PathBuf};

    use super::*;

    pub const FORMAT_VERSION: u32 = 1;

    #[derive(Serialize, Deserialize)]
    struct LatticeRecord {
        den: String,
        rows: Vec<Vec<String>>,
    }

    #[derive(Serialize, Deserialize)]
    struct Record {
        format: u32,
        a: String,
        b: String,
        n1: String,
        n2: String,
        order: LatticeRecord,
        ideals: Vec<LatticeRecord>,
        weights: Vec<String>,
        mass: String,
        neighbor_primes: Vec<String>,
    }

    fn to_record(l: &Lattice) -> LatticeRecord {
        LatticeRecord {
            den: l.den().to_string(),
            rows: l.rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
        }
    }

    fn bad(msg: impl Into<String>) -> Error {
        Error::Cache(msg.into())
    }

    fn parse<T: std::str::FromStr>(s: &str) -> Result<T> {
        s.parse().map_err(|_| bad(format!("bad number {s:?}")))
    }

    fn from_record(r: &LatticeRecord) -> Result<Lattice> {
        let den: i128 = parse(&r.den)?;
        let rows: Vec<[i128; 4]> = r
            .rows
            .iter()
            .map(|row| {
                let v: Vec<i128> = row.iter().map(|s| parse(s)).collect::<Result<_>>()?;
                v.try_into().map_err(|_| bad("row of wrong length"))
            })
            .collect::<Result<_>>()?;
        if den <= 0 {
            return Err(bad("nonpositive denominator"));
        }
        Lattice::from_generators(&rows, den).map_err(|e| bad(e.to_string()))
    }

    pub fn path_for(dir: &Path, alg: &QuaternionAlgebra, level: Level) -> PathBuf {
        dir.join(format!(
            "classes_v{FORMAT_VERSION}_a{}_b{}_n1_{}_n2_{}.json",
            alg.a(),
            alg.b(),
            level.n1,
            level.n2
        ))
    }

    pub fn store(dir: &Path, cs: &ClassSet) -> Result<()> {
        let alg = cs.algebra();
        let rec = Record {
            format: FORMAT_VERSION,
            a: alg.a().to_string(),
            b: alg.b().to_string(),
            n1: cs.level().n1.to_string(),
            n2: cs.level().n2.to_string(),
            order: to_record(&cs.order.lattice),
            ideals: cs.classes.iter().map(|c| to_record(&c.ideal)).collect(),
            weights: cs.classes.iter().map(|c| c.weight.to_string()).collect(),
            mass: cs.mass.to_string(),
            neighbor_primes: cs.neighbor_primes.iter().map(|p| p.to_string()).collect(),
        };
        fs::create_dir_all(dir).map_err(|e| bad(e.to_string()))?;
        let text = serde_json::to_string_pretty(&rec).map_err(|e| bad(e.to_string()))?;
        let path = path_for(dir, alg, cs.level());
        let tmp = path.with_extension(format!("json.{}.tmp", std::process::id()));
        fs::write(&tmp, text).map_err(|e| bad(e.to_string()))?;
        fs::rename(&tmp, &path).map_err(|e| bad(e.to_string()))
    }

    /// Loads and re-validates a cached class set; `Ok(None)` when absent.
    pub fn load(dir: &Path, alg: &QuaternionAlgebra, level: Level) -> Result<Option<ClassSet>> {
        let path = path_for(dir, alg, level);
        let Ok(text) = fs::read_to_string(&path) else {
            return Ok(None);
        };
        let rec: Record = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        if rec.format != FORMAT_VERSION {
            return Ok(None);
        }
        if rec.a != alg.a().to_string()
            || rec.b != alg.b().to_string()
            || rec.n1 != level.n1.to_string()
            || rec.n2 != level.n2.to_string()
        {
            return Err(bad("cache record does not match its key"));
        }
        let o = from_record(&rec.order)?;
        let order = Order {
            algebra: alg.clone(),
            lattice: o.clone(),
            level,
        };
        if !o.is_order(alg) || order.discriminant()? != Integer::from(level.n()) {
            return Err(bad("cached lattice is not an order of the right level"));
        }
        if rec.ideals.first().map(from_record).transpose()?.as_ref() != Some(&o) {
            return Err(bad("first cached ideal is not the order"));
        }
        let mass = mass_formula(level);
        let mut classes = Vec::new();
        for (ir, w) in rec.ideals.iter().zip(&rec.weights) {
            let ideal = from_record(ir)?;
            if !ideal.product(&o, alg).is_subset_of(&ideal) {
                return Err(bad("cached ideal is not a right ideal of the order"));
            }
            let c = make_class(alg, ideal);
            if c.weight.to_string() != *w {
                return Err(bad("cached weight disagrees with recomputation"));
            }
            classes.push(c);
        }
        let cs = ClassSet {
            order,
            classes,
            mass: mass.clone(),
            neighbor_primes: rec.neighbor_primes.iter().map(|s| parse(s)).collect::<Result<_>>()?,
        };
        if cs.weight_sum() != mass || rec.mass != mass.to_string() {
            return Err(bad("cached class set fails the mass check"));
        }
        certify(&cs).map_err(|e| bad(e.to_string()))?;
        Ok(Some(cs))
    }
}

/// `Σ 1/w_i` must equal the mass; also checks pairwise inequivalence.
pub fn certify(cs: &ClassSet) -> Result<()> {
    if cs.weight_sum() != cs.mass {
        return Err(Error::Internal("mass certificate fails".into()));
    }
    let alg = cs.algebra();
    for a in 0..cs.h() {
        for b in a + 1..cs.h() {
            if is_equivalent(alg, &cs.classes[a].ideal, &cs.classes[b].ideal).is_some() {
                return Err(Error::Internal(format!("classes {a} and {b} coincide")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn mass_examples() {
        assert_eq!(mass_formula(Level::new(11, 1).unwrap()), r(5, 6));
        assert_eq!(mass_formula(Level::new(11, 13).unwrap()), r(35, 3));
        assert_eq!(mass_formula(Level::new(13, 11).unwrap()), r(12, 1));
        assert_eq!(mass_formula(Level::new(27, 1).unwrap()), r(3, 2));
        assert_eq!(mass_numerator(Level::new(11, 13).unwrap()), Integer::from(35));
        assert_eq!(mass_numerator(Level::new(13, 11).unwrap()), Integer::from(12));
        assert_eq!(mass_numerator(Level::new(17, 1).unwrap()), Integer::from(4));
    }

    #[test]
    fn small_levels() {
        for (n1, h, w) in [(2u64, 1usize, vec![12u64]), (3, 1, vec![6]), (11, 2, vec![3, 2])] {
            let cs = enumerate_classes(&order_for(Level::new(n1, 1).unwrap()).unwrap()).unwrap();
            assert_eq!(cs.h(), h);
            let canon = class_set_for(Level::new(n1, 1).unwrap(), None).unwrap();
            assert_eq!(canon.weights(), w);
            let mut ws = cs.weights();
            ws.sort_unstable_by(|a, b| b.cmp(a));
            assert_eq!(ws, w);
            certify(&cs).unwrap();
        }
    }

    #[test]
    fn equivalence_witness() {
        let cs = enumerate_classes(&order_for(Level::new(11, 1).unwrap()).unwrap()).unwrap();
        let alg = cs.algebra();
        let i = &cs.classes[1].ideal;
        assert_eq!(is_equivalent(alg, i, i), Some(QuatElement::one()));
        let b = QuatElement::from_ints([1, 2, -1, 3]);
        let bi = i.left_mul(&b, alg);
        let w = is_equivalent(alg, &bi, i).unwrap();
        assert_eq!(i.left_mul(&w, alg), bi);
        assert!(is_equivalent(alg, &cs.classes[0].ideal, i).is_none());
        assert_eq!(cs.classify(&bi).unwrap(), 1);
        assert_eq!(cs.classify(&cs.order.lattice).unwrap(), 0);
    }

    #[test]
    fn neighbor_count() {
        let o = order_for(Level::new(11, 1).unwrap()).unwrap();
        for ell in [2u64, 3, 5, 7] {
            let n = neighbors(&o, &o.lattice, ell);
            assert_eq!(n.len() as u64, ell + 1);
            for j in &n {
                assert_eq!(j.norm(&o.algebra), Rational::from_integer(ell.into()));
                assert!(j.is_subset_of(&o.lattice));
            }
        }
    }

    #[test]
    fn cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let level = Level::new(11, 1).unwrap();
        let cs = class_set_for(level, Some(dir.path())).unwrap();
        let again = class_set_for(level, Some(dir.path())).unwrap();
        assert_eq!(cs.weights(), again.weights());
        assert_eq!(cs.ideals(), again.ideals());
        let path = cache::path_for(dir.path(), cs.algebra(), level);
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.replace("\"3\"", "\"4\"")).unwrap();
        assert!(matches!(class_set_for(level, Some(dir.path())), Err(Error::Cache(_))));
    }
}
