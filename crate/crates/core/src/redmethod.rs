//! The reduction method: bring the stacked action matrix to `[D; 0]` by a
//! unimodular transformation over the `p`-local integers, read off an integral basis
//! of the associated order from `D^{-1}`, and the maximal-case eigenvalue model.
//!
//! Scalars are exact rationals whose denominators are prime to `p`; a matrix is
//! unimodular when it is `p`-integral and its determinant is a `p`-adic unit.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{inv_mod, is_odd_prime, residue, valuation};

pub type Q = BigRational;
pub type Matrix = Vec<Vec<Q>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RedError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("block shapes are inconsistent with n = {0}")]
    Shape(usize),
    #[error("entry {0} has a denominator divisible by p")]
    NotLocal(String),
    #[error("stacked matrix has rank {rank} < {n}")]
    RankDeficient { rank: usize, n: usize },
    #[error("need {expected} eigenvalues, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("the first eigenvalue must be 0, got {0}")]
    NonzeroLambdaZero(i64),
    #[error("eigenvalue {value} at index {index} is divisible by p")]
    NonUnitLambda { index: usize, value: i64 },
    #[error("eigenvalues at {0} and {1} agree mod p")]
    RepeatedLambda(usize, usize),
    #[error("the action of basis element {0} is not integral")]
    NonIntegralAction(usize),
    #[error("matrix is singular")]
    Singular,
}

/// `v_p(x)` for a nonzero rational.
pub fn vp(x: &Q, p: u64) -> Option<i64> {
    let num = valuation(x.numer(), p)? as i64;
    let den = valuation(x.denom(), p).unwrap_or(0) as i64;
    Some(num - den)
}

pub fn is_p_integral(x: &Q, p: u64) -> bool {
    x.is_zero() || !x.denom().is_multiple_of(&BigInt::from(p))
}

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Parses `"num/den"` or `"num"`.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n.trim().parse().ok()?, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| q(i64::from(i == j))).collect())
        .collect()
}

pub fn mat_mul(x: &Matrix, y: &Matrix) -> Matrix {
    let cols = y.first().map_or(0, Vec::len);
    x.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    row.iter()
                        .zip(y)
                        .filter(|(a, _)| !a.is_zero())
                        .map(|(a, yr)| a * &yr[c])
                        .fold(Q::zero(), |s, v| s + v)
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(x: &Matrix, v: &[Q]) -> Vec<Q> {
    x.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .fold(Q::zero(), |s, t| s + t)
        })
        .collect()
}

/// Gauss-Jordan inverse over the rationals.
pub fn mat_inv(x: &Matrix) -> Result<Matrix, RedError> {
    let n = x.len();
    let mut a: Matrix = x
        .iter()
        .zip(identity(n))
        .map(|(r, e)| r.iter().cloned().chain(e).collect())
        .collect();
    for c in 0..n {
        let piv = (c..n)
            .find(|&r| !a[r][c].is_zero())
            .ok_or(RedError::Singular)?;
        a.swap(c, piv);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot_row = a[c].clone();
                for (v, pv) in a[r].iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Determinant modulo `p` of a `p`-integral square matrix.
pub fn det_mod_p(x: &Matrix, p: u64) -> u64 {
    let pi = p as i64;
    let to_fp = |v: &Q| -> u64 {
        let n = (v.numer() % BigInt::from(pi)).to_i64().unwrap();
        let d = (v.denom() % BigInt::from(pi)).to_i64().unwrap();
        residue(n, p) * inv_mod(residue(d, p), p).unwrap() % p
    };
    let mut a: Vec<Vec<u64>> = x.iter().map(|r| r.iter().map(to_fp).collect()).collect();
    let n = a.len();
    let mut det = 1u64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| a[r][c] != 0) else {
            return 0;
        };
        if piv != c {
            a.swap(c, piv);
            det = (p - det) % p;
        }
        det = det * a[c][c] % p;
        let inv = inv_mod(a[c][c], p).unwrap();
        for r in c + 1..n {
            if a[r][c] != 0 {
                let f = a[r][c] * inv % p;
                for k in c..n {
                    a[r][k] = (a[r][k] + p * p - f * a[c][k] % p) % p;
                }
            }
        }
    }
    det
}

/// `n` blocks `M_j`, with `M_j[k][i]` the coordinate at `γ_k` of `w_i · γ_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionMatrix {
    p: u64,
    n: usize,
    blocks: Vec<Matrix>,
}

impl ActionMatrix {
    pub fn new(p: u64, blocks: Vec<Matrix>) -> Result<Self, RedError> {
        if !is_odd_prime(p) {
            return Err(RedError::NotOddPrime(p));
        }
        let n = blocks.len();
        if n == 0
            || blocks
                .iter()
                .any(|b| b.len() != n || b.iter().any(|r| r.len() != n))
        {
            return Err(RedError::Shape(n));
        }
        if let Some(bad) = blocks
            .iter()
            .flatten()
            .flatten()
            .find(|x| !is_p_integral(x, p))
        {
            return Err(RedError::NotLocal(bad.to_string()));
        }
        Ok(ActionMatrix { p, n, blocks })
    }

    /// Splits an `n² × n` stacked matrix into its blocks.
    pub fn from_stacked(p: u64, rows: Matrix) -> Result<Self, RedError> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.len() != n * n {
            return Err(RedError::Shape(n));
        }
        let blocks = rows.chunks(n.max(1)).map(<[_]>::to_vec).collect();
        Self::new(p, blocks)
    }

    /// Blocks `M_j = e_j e_j^T`.
    pub fn identity_blocks(p: u64, n: usize) -> Result<Self, RedError> {
        let blocks = (0..n)
            .map(|j| {
                let mut b = vec![vec![Q::zero(); n]; n];
                b[j][j] = Q::one();
                b
            })
            .collect();
        Self::new(p, blocks)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    pub fn stacked(&self) -> Matrix {
        self.blocks.iter().flatten().cloned().collect()
    }

    /// Matrix of `w_l` acting on `L` in the basis `γ`: `op[k][j] = M_j[k][l]`.
    pub fn operator(&self, l: usize) -> Matrix {
        (0..self.n)
            .map(|k| (0..self.n).map(|j| self.blocks[j][k][l].clone()).collect())
            .collect()
    }

    /// Matrix of `Σ_l x_l w_l` acting on `L`.
    pub fn operator_of(&self, x: &[Q]) -> Matrix {
        let mut out = vec![vec![Q::zero(); self.n]; self.n];
        for (l, c) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (row, op_row) in out.iter_mut().zip(self.operator(l)) {
                for (o, v) in row.iter_mut().zip(op_row) {
                    *o += c * v;
                }
            }
        }
        out
    }
}

impl fmt::Display for ActionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.stacked() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// The reduced matrix `D` and the transformation `U` with `U·M = [D; 0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedPair {
    p: u64,
    d: Matrix,
    u: Matrix,
}

impl ReducedPair {
    pub fn d(&self) -> &Matrix {
        &self.d
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    /// `U` is `p`-integral with unit determinant and `U·M = [D; 0]` exactly.
    pub fn certificate_holds(&self, m: &ActionMatrix) -> bool {
        let p = self.p;
        if !self.u.iter().flatten().all(|x| is_p_integral(x, p)) {
            return false;
        }
        if det_mod_p(&self.u, p) == 0 {
            return false;
        }
        let prod = mat_mul(&self.u, &m.stacked());
        let n = m.n();
        prod[..n] == self.d[..] && prod[n..].iter().flatten().all(Zero::is_zero)
    }
}

fn eliminate(m: &ActionMatrix) -> Result<ReducedPair, RedError> {
    let (p, n) = (m.p(), m.n());
    let mut a = m.stacked();
    let mut u = identity(n * n);
    for c in 0..n {
        let piv = (c..n * n)
            .filter(|&r| !a[r][c].is_zero())
            .min_by_key(|&r| (vp(&a[r][c], p).unwrap(), r));
        let Some(piv) = piv else {
            return Err(RedError::RankDeficient { rank: c, n });
        };
        a.swap(c, piv);
        u.swap(c, piv);
        let pivot_row = a[c].clone();
        let pivot_u = u[c].clone();
        for r in c + 1..n * n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &pivot_row[c];
            for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
            for (x, y) in u[r].iter_mut().zip(&pivot_u) {
                *x -= &f * y;
            }
        }
    }
    a.truncate(n);
    Ok(ReducedPair { p, d: a, u })
}

/// Reduces `M` to `[D; 0]`. When exactly `n` rows are nonzero they are moved to the
/// top and form `D`; otherwise rows are eliminated column by column against the pivot
/// of least `p`-adic valuation, ties going to the lowest row.
pub fn reduce(m: &ActionMatrix) -> Result<ReducedPair, RedError> {
    let n = m.n();
    let rows = m.stacked();
    let nonzero: Vec<usize> = (0..n * n)
        .filter(|&r| rows[r].iter().any(|x| !x.is_zero()))
        .collect();
    if nonzero.len() != n {
        return eliminate(m);
    }
    let zero = (0..n * n).filter(|r| !nonzero.contains(r));
    let order: Vec<usize> = nonzero.iter().copied().chain(zero).collect();
    let d: Matrix = nonzero.iter().map(|&r| rows[r].clone()).collect();
    if mat_inv(&d).is_err() {
        return eliminate(m);
    }
    let u = order
        .iter()
        .map(|&r| (0..n * n).map(|c| q(i64::from(c == r))).collect())
        .collect();
    Ok(ReducedPair { p: m.p(), d, u })
}

/// Always runs the elimination, skipping the row-permutation shortcut.
pub fn reduce_full(m: &ActionMatrix) -> Result<ReducedPair, RedError> {
    eliminate(m)
}

/// Columns of `D^{-1}`: the coordinates of an integral basis `v_i` of the associated order.
pub fn basis_from_reduced(rp: &ReducedPair) -> Result<Vec<Vec<Q>>, RedError> {
    let inv = mat_inv(&rp.d)?;
    let n = inv.len();
    Ok((0..n)
        .map(|i| (0..n).map(|l| inv[l][i].clone()).collect())
        .collect())
}

/// `M·v` for each basis vector, split into blocks: entry `[i][j]` holds the coordinates
/// of `v_i · γ_j`. Fails if any coordinate is not `p`-integral.
pub fn basis_action(m: &ActionMatrix, basis: &[Vec<Q>]) -> Result<Vec<Vec<Vec<Q>>>, RedError> {
    let stacked = m.stacked();
    basis
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let img = mat_vec(&stacked, v);
            if !img.iter().all(|x| is_p_integral(x, m.p())) {
                return Err(RedError::NonIntegralAction(i));
            }
            Ok(img.chunks(m.n()).map(<[_]>::to_vec).collect())
        })
        .collect()
}

/// Whether two bases span the same `p`-local lattice.
pub fn same_lattice(x: &[Vec<Q>], y: &[Vec<Q>], p: u64) -> bool {
    let as_cols = |b: &[Vec<Q>]| -> Matrix {
        let n = b.len();
        (0..n)
            .map(|r| (0..n).map(|c| b[c][r].clone()).collect())
            .collect()
    };
    let (bx, by) = (as_cols(x), as_cols(y));
    let (Ok(ix), Ok(iy)) = (mat_inv(&bx), mat_inv(&by)) else {
        return false;
    };
    let integral = |m: &Matrix| m.iter().flatten().all(|v| is_p_integral(v, p));
    integral(&mat_mul(&ix, &by)) && integral(&mat_mul(&iy, &bx))
}

/// Eigenvalue model of the maximally ramified case: `w^i · α^j = λ_j^i α^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalModel {
    p: u64,
    lambdas: Vec<i64>,
    lambda: Matrix,
    omega: Matrix,
}

impl MaximalModel {
    pub fn new(p: u64, lambdas: Vec<i64>) -> Result<Self, RedError> {
        if !is_odd_prime(p) {
            return Err(RedError::NotOddPrime(p));
        }
        let n = p as usize;
        if lambdas.len() != n {
            return Err(RedError::WrongLength {
                expected: n,
                got: lambdas.len(),
            });
        }
        if lambdas[0] != 0 {
            return Err(RedError::NonzeroLambdaZero(lambdas[0]));
        }
        let mut seen = vec![None; n];
        for (j, &l) in lambdas.iter().enumerate() {
            let r = residue(l, p) as usize;
            if j > 0 && r == 0 {
                return Err(RedError::NonUnitLambda { index: j, value: l });
            }
            if let Some(prev) = seen[r] {
                return Err(RedError::RepeatedLambda(prev, j));
            }
            seen[r] = Some(j);
        }
        let lambda: Matrix = lambdas
            .iter()
            .map(|&l| {
                (0..n as u32)
                    .map(|i| Q::from_integer(BigInt::from(l).pow(i)))
                    .collect()
            })
            .collect();
        let omega = mat_inv(&lambda)?;
        Ok(MaximalModel {
            p,
            lambdas,
            lambda,
            omega,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn lambdas(&self) -> &[i64] {
        &self.lambdas
    }

    /// `Λ`, with row `j` equal to `(λ_j^i)_i`.
    pub fn lambda_matrix(&self) -> &Matrix {
        &self.lambda
    }

    pub fn omega(&self) -> &Matrix {
        &self.omega
    }

    /// Block `j` has the single nonzero row `j`, equal to row `j` of `Λ`.
    pub fn action_matrix(&self) -> ActionMatrix {
        let n = self.p as usize;
        let blocks = (0..n)
            .map(|j| {
                let mut b = vec![vec![Q::zero(); n]; n];
                b[j] = self.lambda[j].clone();
                b
            })
            .collect();
        ActionMatrix::new(self.p, blocks).unwrap()
    }
}

/// Whether `basis_action` sends `v_i · γ_j` to `δ_ij γ_j` for all pairs.
pub fn delta_action_holds(action: &[Vec<Vec<Q>>]) -> bool {
    action.iter().enumerate().all(|(i, blocks)| {
        blocks.iter().enumerate().all(|(j, coords)| {
            coords
                .iter()
                .enumerate()
                .all(|(k, x)| *x == q(i64::from(i == j && j == k)))
        })
    })
}

/// Reduces the model, extracts the basis and checks that the basis elements act as
/// primitive orthogonal idempotents: `(v_i v_j) · α^k = δ_ik δ_jk α^k`.
pub fn idempotent_check(mm: &MaximalModel) -> bool {
    let m = mm.action_matrix();
    let Ok(rp) = reduce(&m) else {
        return false;
    };
    let Ok(basis) = basis_from_reduced(&rp) else {
        return false;
    };
    let ops: Vec<Matrix> = basis.iter().map(|v| m.operator_of(v)).collect();
    let n = basis.len();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let prod = mat_mul(&ops[i], &ops[j]);
            (0..n).all(|k| {
                let col: Vec<Q> = prod.iter().map(|r| r[k].clone()).collect();
                col.iter()
                    .enumerate()
                    .all(|(r, x)| *x == q(i64::from(i == k && j == k && r == k)))
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect()
    }

    #[test]
    fn maximal_model_at_three() {
        let mm = MaximalModel::new(3, vec![0, 1, 2]).unwrap();
        assert_eq!(
            *mm.lambda_matrix(),
            qm(&[&[1, 0, 0], &[1, 1, 1], &[1, 2, 4]])
        );
        let m = mm.action_matrix();
        let rp = reduce(&m).unwrap();
        assert_eq!(*rp.d(), *mm.lambda_matrix());
        assert!(rp.certificate_holds(&m));
        let basis = basis_from_reduced(&rp).unwrap();
        let act = basis_action(&m, &basis).unwrap();
        assert!(delta_action_holds(&act));
        assert!(idempotent_check(&mm));
    }

    #[test]
    fn identity_blocks_reduce_to_identity() {
        let m = ActionMatrix::identity_blocks(5, 3).unwrap();
        let rp = reduce(&m).unwrap();
        assert_eq!(*rp.d(), identity(3));
        assert_eq!(basis_from_reduced(&rp).unwrap(), identity(3));
        let rf = reduce_full(&m).unwrap();
        assert!(rf.certificate_holds(&m));
    }

    #[test]
    fn rank_deficiency() {
        let mut blocks = vec![vec![vec![Q::zero(); 3]; 3]; 3];
        blocks[0][0] = vec![q(1), q(0), q(0)];
        blocks[1][1] = vec![q(0), q(1), q(0)];
        blocks[2][2] = vec![q(1), q(1), q(0)];
        let m = ActionMatrix::new(5, blocks).unwrap();
        assert!(matches!(
            reduce(&m),
            Err(RedError::RankDeficient { rank: 2, n: 3 })
        ));
    }

    #[test]
    fn model_validation() {
        assert!(matches!(
            MaximalModel::new(5, vec![0, 1, 1, 2, 3]),
            Err(RedError::RepeatedLambda(1, 2))
        ));
        assert!(matches!(
            MaximalModel::new(3, vec![0, 3, 1]),
            Err(RedError::NonUnitLambda { index: 1, .. })
        ));
        assert!(MaximalModel::new(3, vec![1, 2, 3]).is_err());
        assert!(MaximalModel::new(5, vec![0, 1, 2, 3, 4])
            .map(|m| idempotent_check(&m))
            .unwrap());
    }

    #[test]
    fn local_arithmetic() {
        assert_eq!(vp(&Q::new(50.into(), 3.into()), 5), Some(2));
        assert_eq!(vp(&Q::new(3.into(), 25.into()), 5), Some(-2));
        assert!(!is_p_integral(&Q::new(1.into(), 10.into()), 5));
        assert_eq!(parse_rational("3/6"), Some(Q::new(1.into(), 2.into())));
        assert_eq!(parse_rational("-4"), Some(q(-4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(det_mod_p(&qm(&[&[2, 1], &[1, 3]]), 5), 0);
        assert_eq!(det_mod_p(&qm(&[&[0, 1], &[1, 0]]), 5), 4);
    }
}
