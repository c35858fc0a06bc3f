//! Subspaces in canonical form.
//!
//! A subspace is stored as the nonzero rows of the reduced row echelon form of
//! any spanning set. That basis is unique, so two subspaces are equal exactly
//! when their stored bases are identical.

use super::{AlgebraError, Field, Matrix, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    basis: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace { field, ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        let id = Matrix::identity(field, ambient);
        Subspace { field, ambient, basis: id.to_rows(), pivots: (0..ambient).collect() }
    }

    pub fn from_vectors(field: Field, ambient: usize, vectors: &[Vec<Scalar>]) -> Self {
        if vectors.is_empty() || ambient == 0 {
            return Subspace::zero(field, ambient);
        }
        let m = Matrix::from_rows(field, vectors.to_vec()).expect("vectors of equal length");
        assert_eq!(m.cols(), ambient, "vector length differs from ambient dimension");
        let r = m.rref();
        let basis = (0..r.rank).map(|i| r.matrix.row(i).to_vec()).collect();
        Subspace { field, ambient, basis, pivots: r.pivots }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` lies outside.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(v.len(), self.ambient);
        let coords: Vec<Scalar> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut rebuilt = vec![self.field.zero(); self.ambient];
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (r, x) in rebuilt.iter_mut().zip(b) {
                *r = &*r + &(c * x);
            }
        }
        (rebuilt == v).then_some(coords)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    fn check(&self, other: &Subspace) -> Result<(), AlgebraError> {
        if self.ambient != other.ambient {
            return Err(AlgebraError::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, AlgebraError> {
        self.check(other)?;
        let mut v = self.basis.clone();
        v.extend(other.basis.iter().cloned());
        Ok(Subspace::from_vectors(self.field, self.ambient, &v))
    }

    /// Vectors orthogonal to every basis vector under the standard pairing.
    pub fn annihilator(&self) -> Subspace {
        if self.basis.is_empty() {
            return Subspace::full(self.field, self.ambient);
        }
        Matrix::from_rows(self.field, self.basis.clone()).unwrap().kernel()
    }

    /// Intersection as the kernel of both annihilators stacked.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, AlgebraError> {
        self.check(other)?;
        let mut constraints = self.annihilator().basis;
        constraints.extend(other.annihilator().basis);
        if constraints.is_empty() {
            return Ok(Subspace::full(self.field, self.ambient));
        }
        Ok(Matrix::from_rows(self.field, constraints).unwrap().kernel())
    }

    /// Image under a linear map.
    pub fn image(&self, m: &Matrix) -> Subspace {
        let v: Vec<Vec<Scalar>> = self.basis.iter().map(|b| m.apply(b)).collect();
        Subspace::from_vectors(self.field, m.rows(), &v)
    }
}

/// A subspace of `d x d` matrices, canonical on the flattened `d^2` vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixSubspace {
    d: usize,
    space: Subspace,
}

impl MatrixSubspace {
    pub fn new(field: Field, d: usize, matrices: &[Matrix]) -> Result<Self, AlgebraError> {
        for m in matrices {
            if m.rows() != d || m.cols() != d {
                return Err(AlgebraError::DimensionMismatch { expected: d, found: m.rows().max(m.cols()) });
            }
            if m.field() != field {
                return Err(AlgebraError::FieldMismatch);
            }
        }
        let v: Vec<Vec<Scalar>> = matrices.iter().map(|m| m.entries().to_vec()).collect();
        Ok(MatrixSubspace { d, space: Subspace::from_vectors(field, d * d, &v) })
    }

    /// The algebra of all diagonal matrices.
    pub fn diagonal_algebra(field: Field, d: usize) -> Self {
        let units: Vec<Matrix> = (0..d).map(|i| Matrix::unit(field, d, i, i)).collect();
        MatrixSubspace::new(field, d, &units).unwrap()
    }

    pub fn zero(field: Field, d: usize) -> Self {
        MatrixSubspace { d, space: Subspace::zero(field, d * d) }
    }

    pub fn field(&self) -> Field {
        self.space.field()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn as_subspace(&self) -> &Subspace {
        &self.space
    }

    pub fn basis(&self) -> Vec<Matrix> {
        self.space
            .basis()
            .iter()
            .map(|v| Matrix::from_flat(self.field(), self.d, self.d, v.clone()).unwrap())
            .collect()
    }

    pub fn coordinates(&self, m: &Matrix) -> Option<Vec<Scalar>> {
        if m.rows() != self.d || m.cols() != self.d {
            return None;
        }
        self.space.coordinates(m.entries())
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.coordinates(m).is_some()
    }

    /// Linear combination of the canonical basis.
    pub fn element(&self, coords: &[Scalar]) -> Matrix {
        assert_eq!(coords.len(), self.dim());
        let mut acc = Matrix::zeros(self.field(), self.d, self.d);
        for (c, b) in coords.iter().zip(self.basis()) {
            acc = &acc + &b.scale(c);
        }
        acc
    }

    fn check(&self, other: &MatrixSubspace) -> Result<(), AlgebraError> {
        if self.d != other.d {
            return Err(AlgebraError::DimensionMismatch { expected: self.d, found: other.d });
        }
        Ok(())
    }

    pub fn sum(&self, other: &MatrixSubspace) -> Result<MatrixSubspace, AlgebraError> {
        self.check(other)?;
        Ok(MatrixSubspace { d: self.d, space: self.space.sum(&other.space)? })
    }

    pub fn intersection(&self, other: &MatrixSubspace) -> Result<MatrixSubspace, AlgebraError> {
        self.check(other)?;
        Ok(MatrixSubspace { d: self.d, space: self.space.intersection(&other.space)? })
    }

    /// `{T a T^{-1}}` for a supplied inverse, in canonical form.
    pub fn conjugate_with(&self, t: &Matrix, t_inv: &Matrix) -> MatrixSubspace {
        let conj: Vec<Matrix> = self.basis().iter().map(|a| a.conjugate_by(t, t_inv)).collect();
        MatrixSubspace::new(self.field(), self.d, &conj).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn canonical_equality() {
        let a = Subspace::from_vectors(q(), 2, &[vec![q().int(1), q().int(1)], vec![q().int(1), q().int(-1)]]);
        assert_eq!(a, Subspace::full(q(), 2));
        let b = Subspace::from_vectors(q(), 2, &[vec![q().int(3), q().int(3)]]);
        let c = Subspace::from_vectors(q(), 2, &[vec![q().int(-1), q().int(-1)]]);
        assert_eq!(b, c);
    }

    #[test]
    fn matrix_subspace_operations() {
        let e11 = Matrix::unit(q(), 2, 0, 0);
        let e22 = Matrix::unit(q(), 2, 1, 1);
        let a = MatrixSubspace::new(q(), 2, &[e11.clone()]).unwrap();
        let b = MatrixSubspace::new(q(), 2, &[e22]).unwrap();
        assert_eq!(a, a.clone());
        assert_eq!(a.intersection(&b).unwrap().dim(), 0);
        assert_eq!(a.sum(&b).unwrap(), MatrixSubspace::diagonal_algebra(q(), 2));

        let s = Matrix::from_ints(q(), &[&[0, 1], &[1, 0]]);
        let span = MatrixSubspace::new(q(), 2, &[Matrix::identity(q(), 2), s.clone()]).unwrap();
        let probe = &s + &Matrix::identity(q(), 2).scale(&q().int(3));
        assert!(span.contains(&probe));
        assert!(!span.contains(&e11));

        let big = MatrixSubspace::zero(q(), 3);
        assert!(matches!(a.sum(&big), Err(AlgebraError::DimensionMismatch { .. })));
    }

    #[test]
    fn intersection_of_planes() {
        let v = |xs: &[i64]| xs.iter().map(|&x| q().int(x)).collect::<Vec<_>>();
        let a = Subspace::from_vectors(q(), 3, &[v(&[1, 0, 0]), v(&[0, 1, 0])]);
        let b = Subspace::from_vectors(q(), 3, &[v(&[0, 1, 0]), v(&[0, 0, 1])]);
        assert_eq!(a.intersection(&b).unwrap().basis(), &[v(&[0, 1, 0])]);
    }
}
