//! Cartan subalgebras of `M(d, k)`: classification and simultaneous eigenlines.
//!
//! A subspace `A` of `d x d` matrices is a Cartan subalgebra when some
//! conjugation takes it onto the diagonal matrices. Over the working field this
//! is decided by three checks on the canonical basis of `A`: `dim A = d`, the
//! basis commutes pairwise, and every basis matrix has a squarefree split
//! minimal polynomial. Commuting diagonalizable matrices diagonalize
//! simultaneously, and a `d`-dimensional subspace of a conjugate of the
//! diagonal algebra is that whole conjugate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Eigenspaces, Field, Matrix, MatrixSubspace, Poly, Scalar, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CartanError {
    #[error("ambient dimension {found} does not match d = {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspace is not a split Cartan subalgebra ({0})")]
    NotSplitCartan(CartanVerdict),
    #[error("conjugating matrix is singular")]
    SingularT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CartanStatus {
    CartanSplit,
    CartanNonSplit,
    NotCartan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotCartanReason {
    WrongDimension { expected: usize, found: usize },
    /// Canonical basis matrices `i` and `j` do not commute.
    NotCommutative { i: usize, j: usize },
    /// Canonical basis matrix `index` has a minimal polynomial with a repeated factor.
    NotDiagonalizable { index: usize, min_poly: Poly },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CartanVerdict {
    Split,
    /// Cartan over the algebraic closure only; `witness` is the root-free
    /// part of the minimal polynomial of basis matrix `index`.
    NonSplit { index: usize, witness: Poly },
    NotCartan(NotCartanReason),
}

impl CartanVerdict {
    pub fn status(&self) -> CartanStatus {
        match self {
            CartanVerdict::Split => CartanStatus::CartanSplit,
            CartanVerdict::NonSplit { .. } => CartanStatus::CartanNonSplit,
            CartanVerdict::NotCartan(_) => CartanStatus::NotCartan,
        }
    }
}

impl std::fmt::Display for CartanVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CartanVerdict::Split => write!(f, "CartanSplit"),
            CartanVerdict::NonSplit { witness, .. } => write!(f, "CartanNonSplit (witness {witness})"),
            CartanVerdict::NotCartan(NotCartanReason::WrongDimension { expected, found }) => {
                write!(f, "NotCartan: WrongDimension (dim {found}, expected {expected})")
            }
            CartanVerdict::NotCartan(NotCartanReason::NotCommutative { i, j }) => {
                write!(f, "NotCartan: NotCommutative (basis {i} and {j})")
            }
            CartanVerdict::NotCartan(NotCartanReason::NotDiagonalizable { min_poly, .. }) => {
                write!(f, "NotCartan: NotDiagonalizable (witness {min_poly})")
            }
        }
    }
}

/// Simultaneous eigenlines of a split Cartan subalgebra with their eigenvalue
/// functionals, ordered lexicographically by line vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenlineSet {
    /// Leading-one normalized line vectors.
    pub lines: Vec<Vec<Scalar>>,
    /// `functionals[t][i]` is the eigenvalue of canonical basis matrix `i` on line `t`.
    pub functionals: Vec<Vec<Scalar>>,
}

impl EigenlineSet {
    /// Matrix whose columns are the line vectors.
    pub fn frame(&self, field: Field) -> Matrix {
        Matrix::from_columns(field, self.lines.len(), &self.lines)
    }

    /// Index of the line containing `v`, together with the scalar `s` such that
    /// `v = s * line`.
    pub fn locate(&self, v: &[Scalar]) -> Option<(usize, Scalar)> {
        self.lines.iter().enumerate().find_map(|(t, w)| {
            let lead = w.iter().position(|x| !x.is_zero())?;
            let s = v[lead].clone();
            let scaled: Vec<Scalar> = w.iter().map(|x| x * &s).collect();
            (scaled == v && !s.is_zero()).then_some((t, s))
        })
    }
}

/// Root-free cofactor and repeated-root status of a minimal polynomial.
enum Diagonalizability {
    Split,
    NonSplit(Poly),
    Defective,
}

fn diagonalizability(mp: &Poly) -> Diagonalizability {
    let roots = mp.roots_in_field().expect("minimal polynomial is nonzero");
    if roots.roots.iter().any(|(_, m)| *m > 1) {
        return Diagonalizability::Defective;
    }
    if roots.split {
        return Diagonalizability::Split;
    }
    if roots.cofactor.squarefree_perfect() {
        Diagonalizability::NonSplit(roots.cofactor)
    } else {
        Diagonalizability::Defective
    }
}

pub fn classify_subspace(a: &MatrixSubspace, d: usize) -> Result<CartanVerdict, CartanError> {
    if a.d() != d {
        return Err(CartanError::DimensionMismatch { expected: d, found: a.d() });
    }
    if a.dim() != d {
        return Ok(CartanVerdict::NotCartan(NotCartanReason::WrongDimension { expected: d, found: a.dim() }));
    }
    let basis = a.basis();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            if !basis[i].commutes_with(&basis[j]) {
                return Ok(CartanVerdict::NotCartan(NotCartanReason::NotCommutative { i, j }));
            }
        }
    }
    let mut non_split = None;
    for (index, m) in basis.iter().enumerate() {
        let mp = primitive_scaling(m).min_poly().expect("square");
        match diagonalizability(&mp) {
            Diagonalizability::Split => {}
            Diagonalizability::NonSplit(witness) => {
                non_split.get_or_insert((index, witness));
            }
            Diagonalizability::Defective => {
                return Ok(CartanVerdict::NotCartan(NotCartanReason::NotDiagonalizable { index, min_poly: mp }));
            }
        }
    }
    let verdict = match non_split {
        Some((index, witness)) => CartanVerdict::NonSplit { index, witness },
        None => CartanVerdict::Split,
    };
    debug_assert!(verdict != CartanVerdict::Split || is_closed_subalgebra(a));
    Ok(verdict)
}

/// Rational matrices are rescaled to coprime integer entries so witnesses do
/// not depend on the normalization of the canonical basis.
fn primitive_scaling(m: &Matrix) -> Matrix {
    if m.field() != Field::Rationals {
        return m.clone();
    }
    let rats: Vec<&BigRational> = m.entries().iter().filter_map(Scalar::as_rational).collect();
    let lcm = rats.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let cleared: Vec<BigInt> = rats.iter().map(|q| (*q * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = cleared.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return m.clone();
    }
    m.scale(&Scalar::Rational(BigRational::new(lcm, g)))
}

fn is_closed_subalgebra(a: &MatrixSubspace) -> bool {
    let basis = a.basis();
    a.contains(&Matrix::identity(a.field(), a.d()))
        && basis.iter().all(|x| basis.iter().all(|y| a.contains(&x.mul(y))))
}

/// Eigenspace refinement: start from `k^d` as one block and split every block
/// by the eigenspaces of each canonical basis matrix in turn.
pub fn simultaneous_eigenlines(a: &MatrixSubspace) -> Result<EigenlineSet, CartanError> {
    let d = a.d();
    let verdict = classify_subspace(a, d)?;
    if verdict != CartanVerdict::Split {
        return Err(CartanError::NotSplitCartan(verdict));
    }
    let field = a.field();
    let basis = a.basis();
    let mut blocks = vec![Subspace::full(field, d)];
    for m in &basis {
        let Eigenspaces::Split(spaces) = m.eigenspaces().expect("square") else {
            unreachable!("split verdict");
        };
        blocks = blocks
            .iter()
            .flat_map(|b| spaces.iter().map(move |e| b.intersection(&e.space).unwrap()))
            .filter(|s| s.dim() > 0)
            .collect();
    }
    assert!(blocks.iter().all(|b| b.dim() == 1) && blocks.len() == d, "refinement ends in lines");
    let mut lines: Vec<Vec<Scalar>> = blocks.into_iter().map(|b| b.basis()[0].clone()).collect();
    lines.sort();
    let functionals = lines
        .iter()
        .map(|w| {
            let lead = w.iter().position(|x| !x.is_zero()).unwrap();
            basis.iter().map(|m| m.apply(w)[lead].clone()).collect()
        })
        .collect();
    Ok(EigenlineSet { lines, functionals })
}

pub fn conjugate_subspace(a: &MatrixSubspace, t: &Matrix) -> Result<MatrixSubspace, CartanError> {
    if t.rows() != a.d() || t.cols() != a.d() {
        return Err(CartanError::DimensionMismatch { expected: a.d(), found: t.rows() });
    }
    let t_inv = t.inverse().ok_or(CartanError::SingularT)?;
    Ok(a.conjugate_with(t, &t_inv))
}
