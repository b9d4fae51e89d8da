//! Hecke action on functions on Cl(O): Brandt matrices, ramified involutions, the
//! normalized pairing, the Eisenstein/cuspidal split and simultaneous eigen-decomposition.
//!
//! Convention: `(T φ)_i = Σ_j B_ij φ_j`.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::integer::{is_prime, Integer, Rational};
use crate::arith::linalg::{integer_kernel, kernel_mod_p, mat_mul, solve_integer, transpose, Matrix};
use crate::arith::poly::{charpoly, factor, ZPoly};
use crate::classes::{neighbors, normalized_form, ClassSet};
use crate::error::{Error, Result};
use crate::orders::two_sided_prime;

pub type IntMatrix = Matrix<Integer>;

fn int(x: impl Into<Integer>) -> Integer {
    x.into()
}

/// A Hecke operator acting on M(O).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operator {
    /// T_ℓ for ℓ not dividing N.
    Hecke(u64),
    /// φ ↦ φ(· P_ℓ) for ℓ exactly dividing N1.
    Involution(u64),
}

impl Operator {
    pub fn prime(&self) -> u64 {
        match *self {
            Operator::Hecke(l) | Operator::Involution(l) => l,
        }
    }

    /// Eigenvalue of the Eisenstein form φ₀.
    pub fn eisenstein_eigenvalue(&self) -> Integer {
        match *self {
            Operator::Hecke(l) => int(l + 1),
            Operator::Involution(_) => Integer::one(),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::Hecke(l) => write!(f, "T{l}"),
            Operator::Involution(l) => write!(f, "W{l}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrandtMatrix {
    pub ell: u64,
    pub matrix: IntMatrix,
}

/// Representation numbers `c_ij[v] = #{y ∈ I_i conj(I_j) : nrd(y) = v nrd(I_i) nrd(I_j)}`
/// for all pairs, computed once up to `vmax`.
#[derive(Clone, Debug)]
pub struct ThetaTable {
    pub vmax: u64,
    counts: Vec<Vec<Vec<u64>>>,
}

impl ThetaTable {
    pub fn new(cs: &ClassSet, vmax: u64) -> Result<Self> {
        let alg = cs.algebra();
        let h = cs.h();
        let pairs: Vec<(usize, usize)> = (0..h).flat_map(|i| (i..h).map(move |j| (i, j))).collect();
        let rows: Vec<((usize, usize), Vec<u64>)> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let (a, b) = (&cs.classes[i], &cs.classes[j]);
                let l = a.ideal.product(&b.ideal.conj(), alg);
                let r = &a.norm * &b.norm / l.norm(alg);
                if !r.is_integer() {
                    return Err(Error::Internal("ideal norms are not multiplicative".into()));
                }
                let r = r.to_integer().to_u64().unwrap();
                let form = normalized_form(alg, &l);
                let theta = form.theta((2 * r * vmax) as i128);
                let counts = (0..=vmax).map(|v| theta[(2 * r * v) as usize]).collect();
                Ok(((i, j), counts))
            })
            .collect::<Result<_>>()?;
        let mut counts = vec![vec![Vec::new(); h]; h];
        for ((i, j), c) in rows {
            counts[j][i] = c.clone();
            counts[i][j] = c;
        }
        Ok(Self { vmax, counts })
    }

    pub fn count(&self, i: usize, j: usize, v: u64) -> u64 {
        self.counts[i][j][v as usize]
    }
}

fn check_ell(cs: &ClassSet, ell: u64) -> Result<()> {
    if !is_prime(ell) {
        return Err(Error::InvalidArgument(format!("{ell} is not prime")));
    }
    if cs.level().n() % ell == 0 {
        return Err(Error::PrimeDividesLevel {
            ell,
            level: cs.level().n(),
        });
    }
    Ok(())
}

/// `B_ij = c_ij[ℓ] / (2 w_j)` from a precomputed theta table.
pub fn brandt_from_theta(cs: &ClassSet, theta: &ThetaTable, ell: u64) -> Result<BrandtMatrix> {
    check_ell(cs, ell)?;
    if ell > theta.vmax {
        return Err(Error::InvalidArgument(format!("ℓ = {ell} beyond the theta table")));
    }
    let h = cs.h();
    let w = cs.weights();
    let mut m = vec![vec![Integer::zero(); h]; h];
    for i in 0..h {
        for j in 0..h {
            let c = theta.count(i, j, ell);
            if c % (2 * w[j]) != 0 {
                return Err(Error::Internal(format!(
                    "representation count {c} not divisible by 2w = {}",
                    2 * w[j]
                )));
            }
            m[i][j] = int(c / (2 * w[j]));
        }
    }
    Ok(BrandtMatrix { ell, matrix: m })
}

/// Brandt matrix via lattice representation numbers.
pub fn brandt_matrix(cs: &ClassSet, ell: u64) -> Result<BrandtMatrix> {
    check_ell(cs, ell)?;
    let theta = ThetaTable::new(cs, ell)?;
    brandt_from_theta(cs, &theta, ell)
}

/// Brandt matrix by classifying the ℓ + 1 neighbors of every representative.
pub fn brandt_matrix_by_neighbors(cs: &ClassSet, ell: u64) -> Result<BrandtMatrix> {
    check_ell(cs, ell)?;
    let h = cs.h();
    let rows: Vec<Vec<Integer>> = (0..h)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![Integer::zero(); h];
            for j in neighbors(&cs.order, &cs.classes[i].ideal, ell) {
                row[cs.classify(&j)?] += 1;
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(BrandtMatrix { ell, matrix: rows })
}

/// Permutation matrix of `[I] ↦ [I P_ℓ]` for ℓ exactly dividing N1.
pub fn ramified_hecke(cs: &ClassSet, ell: u64) -> Result<IntMatrix> {
    let level = cs.level();
    if level.n1 % ell != 0 || level.n1 % (ell * ell) == 0 {
        return Err(Error::Precondition(format!(
            "the involution needs ℓ = {ell} to divide N1 = {} exactly",
            level.n1
        )));
    }
    let alg = cs.algebra();
    let p = two_sided_prime(&cs.order, ell)?;
    let h = cs.h();
    let images: Vec<usize> = (0..h)
        .into_par_iter()
        .map(|i| cs.classify(&cs.classes[i].ideal.product(&p, alg)))
        .collect::<Result<_>>()?;
    let mut m = vec![vec![Integer::zero(); h]; h];
    for (i, &j) in images.iter().enumerate() {
        m[i][j] = Integer::one();
    }
    Ok(m)
}

pub fn operator_matrix(cs: &ClassSet, op: Operator) -> Result<IntMatrix> {
    match op {
        Operator::Hecke(l) => Ok(brandt_matrix(cs, l)?.matrix),
        Operator::Involution(l) => ramified_hecke(cs, l),
    }
}

/// The operators defined at this level: T_ℓ for primes ℓ ≤ ℓ_max not dividing N,
/// and the involutions at primes exactly dividing N1.
pub fn default_operators(cs: &ClassSet, ell_max: u64) -> Vec<Operator> {
    let level = cs.level();
    let mut ops: Vec<Operator> = (2..=ell_max)
        .filter(|&l| is_prime(l) && level.n() % l != 0)
        .map(Operator::Hecke)
        .collect();
    for p in level.ramified_primes() {
        if level.n1 % (p * p) != 0 {
            ops.push(Operator::Involution(p));
        }
    }
    ops
}

/// Matrices for all operators, sharing one theta table.
pub fn operator_matrices(cs: &ClassSet, ops: &[Operator]) -> Result<Vec<(Operator, IntMatrix)>> {
    let vmax = ops
        .iter()
        .filter_map(|o| match o {
            Operator::Hecke(l) => Some(*l),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let theta = if vmax > 0 { Some(ThetaTable::new(cs, vmax)?) } else { None };
    ops.iter()
        .map(|&op| {
            let m = match op {
                Operator::Hecke(l) => brandt_from_theta(cs, theta.as_ref().unwrap(), l)?.matrix,
                Operator::Involution(l) => ramified_hecke(cs, l)?,
            };
            Ok((op, m))
        })
        .collect()
}

/// `[φ, ψ] = Σ φ_i ψ_i / w_i` for integer-valued forms.
pub fn pairing(cs: &ClassSet, phi: &[Integer], psi: &[Integer]) -> Rational {
    cs.weights()
        .iter()
        .zip(phi.iter().zip(psi))
        .map(|(&w, (a, b))| Rational::new(a * b, int(w)))
        .fold(Rational::zero(), |s, x| s + x)
}

pub fn eisenstein_form(cs: &ClassSet) -> Vec<Integer> {
    vec![Integer::one(); cs.h()]
}

/// Saturated basis (rows) of the cuspidal lattice `{φ ∈ Z^h : [φ, φ₀] = 0}`.
pub fn cuspidal_lattice(cs: &ClassSet) -> IntMatrix {
    let w = cs.weights();
    let l = w.iter().fold(1u64, |a, &b| a.lcm(&b));
    let row: Vec<Integer> = w.iter().map(|&x| int(l / x)).collect();
    integer_kernel(&[row], cs.h())
}

/// `(E, S)`: the Eisenstein form φ₀ and a basis of the cuspidal lattice.
pub fn decompose(cs: &ClassSet) -> (Vec<Integer>, IntMatrix) {
    (eisenstein_form(cs), cuspidal_lattice(cs))
}

pub fn apply(m: &IntMatrix, phi: &[Integer]) -> Vec<Integer> {
    m.iter()
        .map(|row| row.iter().zip(phi).map(|(a, b)| a * b).sum())
        .collect()
}

/// Matrix `R` with `T v_a = Σ_b R_ab v_b` for a T-stable saturated lattice with basis rows `v`.
pub fn restrict(m: &IntMatrix, basis: &IntMatrix) -> Result<IntMatrix> {
    let k = basis.len();
    let vt = transpose(basis);
    basis
        .iter()
        .map(|v| {
            let image = apply(m, v);
            let sol = solve_integer(&vt, &image, k).map_err(|_| {
                Error::Internal("sublattice is not stable under the operator".into())
            })?;
            Ok(sol.particular)
        })
        .collect()
}

fn primitive(v: &[Integer]) -> Vec<Integer> {
    let g = v.iter().fold(Integer::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let sign = v.iter().find(|x| !x.is_zero()).map_or(false, |x| x.is_negative());
    v.iter()
        .map(|x| if sign { -(x / &g) } else { x / &g })
        .collect()
}

/// Restriction data of one operator on one block.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    pub op: Operator,
    pub matrix: IntMatrix,
    pub charpoly: ZPoly,
    pub factors: Vec<(ZPoly, u32)>,
}

impl BlockOperator {
    /// The eigenvalue when the operator is a scalar on the block.
    pub fn scalar(&self) -> Option<Integer> {
        let k = self.matrix.len();
        let l = self.matrix.first()?.first()?.clone();
        for i in 0..k {
            for j in 0..k {
                let want = if i == j { l.clone() } else { Integer::zero() };
                if self.matrix[i][j] != want {
                    return None;
                }
            }
        }
        Some(l)
    }
}

/// A Hecke-stable saturated sublattice of the cuspidal lattice on which every operator
/// has characteristic polynomial a power of one irreducible.
#[derive(Clone, Debug)]
pub struct EigenBlock {
    pub basis: IntMatrix,
    pub operators: Vec<BlockOperator>,
}

impl EigenBlock {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// All operators act by rational scalars.
    pub fn is_rational(&self) -> bool {
        self.operators.iter().all(|o| o.scalar().is_some())
    }

    pub fn eigenvalue(&self, op: Operator) -> Option<Integer> {
        self.operators.iter().find(|o| o.op == op)?.scalar()
    }

    pub fn eigenvalues(&self) -> BTreeMap<Operator, Integer> {
        self.operators
            .iter()
            .filter_map(|o| o.scalar().map(|s| (o.op, s)))
            .collect()
    }

    /// Hecke field degree: degree of the irreducible factor of the first non-scalar operator.
    pub fn field_degree(&self) -> usize {
        self.operators
            .iter()
            .map(|o| o.factors[0].0.degree().unwrap_or(1))
            .max()
            .unwrap_or(1)
    }

    /// The primitive generator of a rank-one block.
    pub fn eigenvector(&self) -> Option<Vec<Integer>> {
        (self.dim() == 1).then(|| primitive(&self.basis[0]))
    }
}

/// Splits the cuspidal lattice under the commuting family `ops`.
pub fn eigen_blocks(cs: &ClassSet, ops: &[(Operator, IntMatrix)]) -> Result<Vec<EigenBlock>> {
    let cusp = cuspidal_lattice(cs);
    if cusp.is_empty() {
        return Ok(Vec::new());
    }
    let mut blocks: Vec<IntMatrix> = vec![cusp];
    for (_, m) in ops {
        let mut next = Vec::new();
        for b in blocks {
            next.extend(split_block(m, &b)?);
        }
        blocks = next;
    }
    let mut out = Vec::new();
    for basis in blocks {
        let operators = ops
            .iter()
            .map(|(op, m)| {
                let r = restrict(m, &basis)?;
                let cp = charpoly(&r);
                let f = factor(&cp)?;
                Ok(BlockOperator {
                    op: *op,
                    matrix: r,
                    charpoly: cp,
                    factors: f,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(EigenBlock { basis, operators });
    }
    out.sort_by(|a, b| (a.dim(), &a.basis).cmp(&(b.dim(), &b.basis)));
    Ok(out)
}

fn split_block(m: &IntMatrix, basis: &IntMatrix) -> Result<Vec<IntMatrix>> {
    let r = restrict(m, basis)?;
    let factors = factor(&charpoly(&r))?;
    if factors.len() <= 1 {
        return Ok(vec![basis.clone()]);
    }
    let k = basis.len();
    let mut out = Vec::new();
    for (g, e) in factors {
        let mut ge = ZPoly::one();
        for _ in 0..e {
            ge = ge.mul(&g);
        }
        // coordinates act on the right: left kernel of g(R)^e
        let gr = ge.eval_matrix(&r);
        let ker = integer_kernel(&transpose(&gr), k);
        let sub: IntMatrix = ker.iter().map(|c| {
            (0..basis[0].len())
                .map(|t| c.iter().zip(basis).map(|(a, row)| a * &row[t]).sum())
                .collect()
        }).collect();
        out.push(crate::arith::linalg::hnf(&sub));
    }
    Ok(out)
}

/// Rational eigenforms (rank-one blocks) with their eigenvalue tables.
#[derive(Clone, Debug)]
pub struct HeckeEigenform {
    pub form: Vec<Integer>,
    pub eigenvalues: BTreeMap<Operator, Integer>,
}

pub fn eigenforms(cs: &ClassSet, ops: &[Operator]) -> Result<(Vec<HeckeEigenform>, Vec<EigenBlock>)> {
    let mats = operator_matrices(cs, ops)?;
    let blocks = eigen_blocks(cs, &mats)?;
    let forms = blocks
        .iter()
        .filter(|b| b.is_rational() && b.dim() == 1)
        .map(|b| HeckeEigenform {
            form: b.eigenvector().unwrap(),
            eigenvalues: b.eigenvalues(),
        })
        .collect();
    Ok((forms, blocks))
}

/// Joint kernel mod p of `(R_op − λ_op(E))` over the block, in block coordinates.
pub fn eisenstein_kernel_mod_p(block: &EigenBlock, p: u64) -> Vec<Vec<u64>> {
    let k = block.dim();
    let pb = int(p);
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for o in &block.operators {
        let ev = o.op.eisenstein_eigenvalue();
        // c (R − λ) = 0  <=>  (R − λ)^T c^T = 0
        for j in 0..k {
            rows.push(
                (0..k)
                    .map(|i| {
                        let mut x = o.matrix[i][j].clone();
                        if i == j {
                            x -= &ev;
                        }
                        x.mod_floor(&pb).to_u64().unwrap()
                    })
                    .collect(),
            );
        }
    }
    kernel_mod_p(&rows, k, p)
}

/// Product of Brandt matrices, for commutation checks.
pub fn product(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    mat_mul(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::class_set_for;
    use crate::orders::Level;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    fn level11() -> ClassSet {
        class_set_for(Level::new(11, 1).unwrap(), None).unwrap()
    }

    #[test]
    fn level_11_brandt() {
        let cs = level11();
        assert_eq!(cs.weights(), vec![3, 2]);
        let b2 = brandt_matrix(&cs, 2).unwrap();
        assert_eq!(b2.matrix, m(&[&[0, 3], &[2, 1]]));
        assert_eq!(brandt_matrix_by_neighbors(&cs, 2).unwrap(), b2);
        let b3 = brandt_matrix(&cs, 3).unwrap();
        assert_eq!(b3.matrix[0][0].clone() + &b3.matrix[1][1], int(3));
        assert!(matches!(brandt_matrix(&cs, 11), Err(Error::PrimeDividesLevel { .. })));
    }

    #[test]
    fn level_11_split_and_pairing() {
        let cs = level11();
        let (e, s) = decompose(&cs);
        assert_eq!(s, m(&[&[3, -2]]));
        assert_eq!(pairing(&cs, &e, &e), Rational::new(5.into(), 6.into()));
        assert_eq!(pairing(&cs, &s[0], &s[0]), Rational::from_integer(5.into()));
        assert_eq!(pairing(&cs, &s[0], &e), Rational::zero());
    }

    #[test]
    fn level_11_eigenform_and_involution() {
        let cs = level11();
        let ops = default_operators(&cs, 7);
        let (forms, blocks) = eigenforms(&cs, &ops).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(forms.len(), 1);
        assert_eq!(forms[0].form, vec![int(3), int(-2)]);
        assert_eq!(forms[0].eigenvalues[&Operator::Hecke(2)], int(-2));
        assert_eq!(forms[0].eigenvalues[&Operator::Involution(11)], int(1));
        let w = ramified_hecke(&cs, 11).unwrap();
        assert_eq!(mat_mul(&w, &w), crate::arith::linalg::identity(2));
    }

    #[test]
    fn level_2_is_eisenstein_only() {
        let cs = class_set_for(Level::new(2, 1).unwrap(), None).unwrap();
        assert!(cuspidal_lattice(&cs).is_empty());
        let (forms, blocks) = eigenforms(&cs, &default_operators(&cs, 7)).unwrap();
        assert!(forms.is_empty() && blocks.is_empty());
    }
}
