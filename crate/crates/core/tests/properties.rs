use std::collections::BTreeMap;

use num_traits::Signed;
use proptest::prelude::*;

use qmf::arith::{Integer, Rational};
use qmf::brandt::{apply, eisenstein_form, eigen_blocks, operator_matrices, Operator};
use qmf::classes::{
    canonical_class_set, enumerate_with_primes, is_equivalent, mass_numerator, ClassSet,
};
use qmf::congruence::{converse_uniqueness_check, eigen_congruence_search};
use qmf::orders::{is_multiplicatively_closed, order_for, order_of_level, Level};
use qmf::periods::{lvalues, verify_central_congruence};
use qmf::quadratic::fundamental_discriminants;
use qmf::quat::{Lattice, QuaternionAlgebra};

fn class_set(n1: u64, n2: u64) -> ClassSet {
    canonical_class_set(&order_for(Level::new(n1, n2).unwrap()).unwrap()).unwrap()
}

fn small_levels(max: u64) -> Vec<Level> {
    (2..=max).flat_map(Level::splits).collect()
}

fn primes_not_dividing(n: u64, skip: usize, take: usize) -> Vec<u64> {
    (2u64..)
        .filter(|&p| (2..p).all(|d| p % d != 0) && n % p != 0)
        .skip(skip)
        .take(take)
        .collect()
}

proptest! {
    #[test]
    fn rational_roundtrip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let x = Rational::new(Integer::from(p), Integer::from(q));
        prop_assert_eq!(x * Rational::from_integer(Integer::from(q)), Rational::from_integer(Integer::from(p)));
    }

    #[test]
    fn norm_form_is_positive_definite(a in -60i64..0, b in -60i64..0) {
        let alg = QuaternionAlgebra::new(a, b).unwrap();
        let g = Lattice::standard(&alg).gram_int(&alg);
        // diagonal form: every leading minor is a product of positive diagonal entries
        let mut minor = 1i128;
        for (i, row) in g.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if i != j {
                    prop_assert_eq!(x, 0);
                }
            }
            minor *= row[i];
            prop_assert!(minor > 0);
        }
    }
}

#[test]
fn orders_are_closed_with_expected_discriminant() {
    for level in small_levels(120) {
        let o = order_for(level).unwrap();
        assert!(is_multiplicatively_closed(&o.algebra, &o.lattice), "{level}");
        assert_eq!(o.discriminant().unwrap(), Integer::from(level.n()), "{level}");
    }
}

#[test]
fn class_data_is_independent_of_presentation() {
    for (s, level) in [(vec![11u64], Level::new(11, 1).unwrap()), (vec![2, 3, 5], Level::new(30, 1).unwrap()), (vec![13], Level::new(13, 4).unwrap())] {
        let mut algs = Vec::new();
        'outer: for a in (-80i64..0).rev() {
            for b in (-80i64..a).rev() {
                if let Ok(alg) = QuaternionAlgebra::new(a, b) {
                    if alg.ramified_primes() == s.as_slice() {
                        algs.push(alg);
                        if algs.len() == 3 {
                            break 'outer;
                        }
                    }
                }
            }
        }
        assert_eq!(algs.len(), 3, "{s:?}");
        let mut signatures = Vec::new();
        for alg in algs {
            let o = order_of_level(&alg, level).unwrap();
            let cs = canonical_class_set(&o).unwrap();
            let mut w = cs.weights();
            w.sort_unstable();
            let mut charpolys = Vec::new();
            let ops: Vec<Operator> = [2u64, 3, 5, 7].iter().filter(|&&l| level.n() % l != 0).map(|&l| Operator::Hecke(l)).collect();
            for (_, m) in operator_matrices(&cs, &ops).unwrap() {
                charpolys.push(qmf::arith::poly::charpoly(&m).to_string());
            }
            signatures.push((w, charpolys));
        }
        assert!(signatures.windows(2).all(|p| p[0] == p[1]), "{s:?}: {signatures:?}");
    }
}

#[test]
fn enumeration_is_independent_of_neighbor_primes() {
    for level in small_levels(60) {
        let o = order_for(level).unwrap();
        let a = canonical_class_set(&o).unwrap();
        let b = enumerate_with_primes(&a.order, primes_not_dividing(level.n(), 1, 6)).unwrap();
        assert_eq!(a.h(), b.h(), "{level}");
        let alg = a.algebra();
        let mut used = vec![false; b.h()];
        for c in &a.classes {
            let j = (0..b.h())
                .find(|&j| !used[j] && is_equivalent(alg, &c.ideal, &b.classes[j].ideal).is_some())
                .unwrap_or_else(|| panic!("{level}: no partner"));
            used[j] = true;
            assert_eq!(c.weight, b.classes[j].weight);
        }
    }
}

#[test]
fn weights_and_class_numbers() {
    for level in small_levels(150) {
        let cs = class_set(level.n1, level.n2);
        assert!(cs.weights().iter().all(|w| [1, 2, 3, 4, 6, 12].contains(w)), "{level}");
        assert_eq!(cs.weight_sum(), cs.mass);
        if mass_numerator(level) > Integer::from(1) {
            assert!(cs.h() > 1, "{level}");
        }
    }
}

fn brandt_invariants(cs: &ClassSet, ells: &[u64]) {
    let level = cs.level();
    let mut ops: Vec<Operator> = ells.iter().filter(|&&l| level.n() % l != 0).map(|&l| Operator::Hecke(l)).collect();
    for q in level.ramified_primes() {
        if level.n1 % (q * q) != 0 {
            ops.push(Operator::Involution(q));
        }
    }
    let mats = operator_matrices(cs, &ops).unwrap();
    let w: Vec<Integer> = cs.weights().into_iter().map(Integer::from).collect();
    let phi0 = eisenstein_form(cs);
    for (op, m) in &mats {
        let h = m.len();
        for i in 0..h {
            for j in 0..h {
                assert!(!m[i][j].is_negative(), "{level} {op}");
                assert_eq!(&w[j] * &m[i][j], &w[i] * &m[j][i], "{level} {op} symmetry");
            }
            if let Operator::Hecke(l) = op {
                let row: Integer = m[i].iter().sum();
                assert_eq!(row, Integer::from(l + 1), "{level} {op} row sum");
            }
        }
        let lam = op.eisenstein_eigenvalue();
        let image = apply(m, &phi0);
        assert!(image.iter().zip(&phi0).all(|(x, y)| *x == &lam * y), "{level} {op} on phi0");
    }
    for (a, (_, x)) in mats.iter().enumerate() {
        for (_, y) in &mats[a + 1..] {
            assert_eq!(qmf::brandt::product(x, y), qmf::brandt::product(y, x), "{level} commute");
        }
    }
    let blocks = eigen_blocks(cs, &mats).unwrap();
    let dim: usize = blocks.iter().map(|b| b.dim()).sum();
    assert_eq!(dim + 1, cs.h(), "{level}");
    for b in &blocks {
        for bo in &b.operators {
            // monic integral charpoly, a power of an irreducible
            assert_eq!(bo.factors.len(), 1, "{level}");
            if b.dim() == 1 {
                assert!(bo.scalar().is_some());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn brandt_matrices_at_random_levels(n in 2u64..140, pick in 0usize..4, ells in proptest::collection::vec(prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 17]), 1..4)) {
        let splits = Level::splits(n);
        prop_assume!(!splits.is_empty());
        let level = splits[pick % splits.len()];
        brandt_invariants(&class_set(level.n1, level.n2), &ells);
    }
}

#[test]
fn lvalues_are_nonnegative_integers_for_quadratic_characters() {
    for n in [11u64, 17, 19] {
        let cs = class_set(n, 1);
        let search = eigen_congruence_search(&cs, 2, 30).unwrap();
        let mut forms = vec![eisenstein_form(&cs)];
        forms.extend(search.blocks.iter().filter_map(|b| b.eigenvector()));
        let mut seen = 0;
        for phi in &forms {
            for d in fundamental_discriminants(3, 120).into_iter().filter(|&d| qmf::quadratic::inert_at(d, n)) {
                for r in lvalues(&cs, phi, d, None).unwrap() {
                    if r.character_order.parse::<u64>().unwrap() <= 2 {
                        let l: Integer = r.lalg.parse().unwrap_or_else(|_| panic!("{n} {d}: {}", r.lalg));
                        assert!(!l.is_negative(), "{n} {d}");
                        seen += 1;
                    }
                }
            }
        }
        assert!(seen > 20, "{n}: {seen}");
    }
}

#[test]
fn lalg_is_fixed_by_conjugation() {
    use qmf::periods::{alg_lvalue, class_map, optimal_embedding};
    use qmf::quadratic::{reduced_forms, ImagQuadField};
    let cs = class_set(11, 1);
    let phi = vec![Integer::from(6), Integer::from(-4)];
    for d in fundamental_discriminants(3, 160).into_iter().filter(|&d| qmf::quadratic::inert_at(d, 11)) {
        let field = ImagQuadField::new(d).unwrap();
        let group = reduced_forms(d).unwrap();
        let emb = optimal_embedding(&cs, field).unwrap();
        let cmap = class_map(&cs, &emb, &group).unwrap();
        for chi in group.characters() {
            let l = alg_lvalue(&phi, &chi, &group, &cmap);
            assert_eq!(l.conj(), l, "{d}");
        }
    }
}

#[test]
fn central_congruence_at_more_levels() {
    let discs = fundamental_discriminants(3, 200);
    for (n, p) in [(11u64, 5u64), (17, 2), (19, 3), (37, 3)] {
        let cs = class_set(n, 1);
        let search = eigen_congruence_search(&cs, p, 40).unwrap();
        let (phi, _) = converse_uniqueness_check(&search).unwrap_or_else(|| panic!("{n}: no congruent line"));
        let recs = verify_central_congruence(&cs, &phi, p, 1, &discs).unwrap();
        assert!(!recs.is_empty());
        let failures: BTreeMap<String, String> = recs
            .iter()
            .filter(|r| r.verdict != Some(true))
            .map(|r| (format!("{}:{}", r.disc, r.character), r.lalg.clone()))
            .collect();
        assert!(failures.is_empty(), "N={n} p={p}: {failures:?}");
    }
}

#[test]
fn congruent_cuspform_is_cuspidal_and_congruent_to_one() {
    use num_integer::Integer as _;
    use num_traits::Zero;
    use qmf::arith::factorize;
    use qmf::brandt::pairing;
    use qmf::congruence::construct_congruent_cuspform;
    let mut checked = 0;
    for level in small_levels(200) {
        let num = mass_numerator(level);
        if num <= Integer::from(1) {
            continue;
        }
        let cs = class_set(level.n1, level.n2);
        let phi0 = eisenstein_form(&cs);
        for (p, e) in factorize(&num).unwrap() {
            let p: u64 = p.try_into().unwrap();
            for r in 1..=e {
                let Ok(phi) = construct_congruent_cuspform(&cs, p, r) else { continue };
                let pr = Integer::from(p).pow(r);
                assert!(phi.iter().all(|x| (x - Integer::from(1)).is_multiple_of(&pr)), "{level} {p}^{r}");
                assert!(pairing(&cs, &phi, &phi0).is_zero(), "{level} {p}^{r}");
                checked += 1;
            }
        }
    }
    assert!(checked > 50, "{checked}");
}
