//! Vector and algebra bundles over a base graph.
//!
//! A bundle of rank `d` assigns an invertible `d x d` transition matrix to every
//! oriented edge; walking an edge against its orientation applies the inverse.
//! Flat sections (assignments fixed by every transition) model global sections.

use itertools::Itertools;
use thiserror::Error;

use crate::algebra::{Field, Matrix, MatrixSubspace, Poly, Scalar, Subspace};
use crate::cartan::{classify_subspace, CartanVerdict};
use crate::graph::{BaseGraph, SpanningTree, TreeOrder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("expected {expected} transition matrices, found {found}")]
    TransitionCount { expected: usize, found: usize },
    #[error("transition on edge {edge} has the wrong shape or field")]
    BadTransition { edge: usize },
    #[error("transition on edge {0} is singular")]
    SingularTransition(usize),
    #[error("base graph is disconnected")]
    DisconnectedBase,
    #[error("expected {expected} vertex algebras, found {found}")]
    AlgebraCount { expected: usize, found: usize },
    #[error("algebra at vertex {vertex} is not Cartan: {verdict}")]
    NotCartanAtVertex { vertex: usize, verdict: CartanVerdict },
    #[error("algebra at vertex {vertex} is Cartan but not split (witness {witness})")]
    NonSplitAtVertex { vertex: usize, witness: Poly },
    #[error("edge {0} does not conjugate the source algebra onto the target algebra")]
    IncompatibleEdge(usize),
    #[error("bundles differ in base, field or rank")]
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleRep {
    base: BaseGraph,
    field: Field,
    rank: usize,
    transitions: Vec<Matrix>,
    inverses: Vec<Option<Matrix>>,
}

impl BundleRep {
    pub fn new(base: BaseGraph, field: Field, rank: usize, transitions: Vec<Matrix>) -> Result<Self, BundleError> {
        if transitions.len() != base.edge_count() {
            return Err(BundleError::TransitionCount { expected: base.edge_count(), found: transitions.len() });
        }
        for (edge, t) in transitions.iter().enumerate() {
            if t.rows() != rank || t.cols() != rank || t.field() != field {
                return Err(BundleError::BadTransition { edge });
            }
        }
        let inverses = transitions.iter().map(Matrix::inverse).collect();
        Ok(BundleRep { base, field, rank, transitions, inverses })
    }

    fn with_inverses(base: BaseGraph, field: Field, rank: usize, pairs: Vec<(Matrix, Matrix)>) -> Self {
        let (transitions, inverses): (Vec<_>, Vec<_>) = pairs.into_iter().map(|(t, i)| (t, Some(i))).unzip();
        BundleRep { base, field, rank, transitions, inverses }
    }

    /// Identity transitions on every edge.
    pub fn trivial(base: BaseGraph, field: Field, rank: usize) -> Self {
        let ts = vec![Matrix::identity(field, rank); base.edge_count()];
        BundleRep::new(base, field, rank, ts).unwrap()
    }

    pub fn base(&self) -> &BaseGraph {
        &self.base
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn transitions(&self) -> &[Matrix] {
        &self.transitions
    }

    pub fn transition(&self, e: usize) -> &Matrix {
        &self.transitions[e]
    }

    /// Cached inverse; `None` when the transition is singular.
    pub fn inverse(&self, e: usize) -> Option<&Matrix> {
        self.inverses[e].as_ref()
    }

    fn inv(&self, e: usize) -> &Matrix {
        self.inverse(e).expect("validated bundle has invertible transitions")
    }

    pub fn validate(&self) -> Result<(), BundleError> {
        if let Some(e) = self.inverses.iter().position(Option::is_none) {
            return Err(BundleError::SingularTransition(e));
        }
        if !self.base.is_connected() {
            return Err(BundleError::DisconnectedBase);
        }
        Ok(())
    }

    /// Gauge change by per-vertex invertible matrices: `T'_e = G_v T_e G_u^{-1}`.
    pub fn regauge(&self, gauge: &[Matrix]) -> BundleRep {
        let inv: Vec<Matrix> = gauge.iter().map(|g| g.inverse().expect("invertible gauge")).collect();
        let ts = self
            .base
            .edges()
            .iter()
            .zip(&self.transitions)
            .map(|(&(u, v), t)| gauge[v].mul(t).mul(&inv[u]))
            .collect();
        BundleRep::new(self.base.clone(), self.field, self.rank, ts).unwrap()
    }

    /// Transport from the tree root to every vertex along the spanning tree.
    fn tree_transport(&self, tree: &SpanningTree) -> Vec<Matrix> {
        let mut g = vec![Matrix::identity(self.field, self.rank); self.base.vertex_count()];
        for &v in tree.order.iter().skip(1) {
            let step = tree.steps[v].unwrap();
            let t = if step.forward { self.transition(step.edge) } else { self.inv(step.edge) };
            g[v] = t.mul(&g[step.parent]);
        }
        g
    }

    /// Holonomy at the root around the fundamental cycle of each non-tree edge.
    pub fn fundamental_holonomies(&self, order: TreeOrder) -> Vec<(usize, Matrix)> {
        let tree = self.base.spanning_tree(order);
        let g = self.tree_transport(&tree);
        tree.non_tree_edges
            .iter()
            .map(|&e| {
                let (u, v) = self.base.edge(e);
                let h = g[v].inverse().unwrap().mul(self.transition(e)).mul(&g[u]);
                (e, h)
            })
            .collect()
    }
}

/// One subalgebra of `End(E_v)` per base vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubalgebraBundle {
    pub algebras: Vec<MatrixSubspace>,
}

impl SubalgebraBundle {
    pub fn constant(algebra: MatrixSubspace, vertices: usize) -> Self {
        SubalgebraBundle { algebras: vec![algebra; vertices] }
    }

    pub fn diagonal(field: Field, d: usize, vertices: usize) -> Self {
        Self::constant(MatrixSubspace::diagonal_algebra(field, d), vertices)
    }

    /// Conjugate every vertex algebra by its gauge matrix.
    pub fn regauge(&self, gauge: &[Matrix]) -> Self {
        let algebras = self
            .algebras
            .iter()
            .zip(gauge)
            .map(|(a, g)| a.conjugate_with(g, &g.inverse().expect("invertible gauge")))
            .collect();
        SubalgebraBundle { algebras }
    }
}

pub fn validate_bundle(b: &BundleRep) -> Result<(), BundleError> {
    b.validate()
}

/// Every vertex algebra is a split Cartan subalgebra and every transition
/// conjugates the source algebra onto the target algebra.
pub fn validate_cartan_bundle(e: &BundleRep, a: &SubalgebraBundle) -> Result<(), BundleError> {
    e.validate()?;
    let n = e.base().vertex_count();
    if a.algebras.len() != n {
        return Err(BundleError::AlgebraCount { expected: n, found: a.algebras.len() });
    }
    for (vertex, alg) in a.algebras.iter().enumerate() {
        if alg.d() != e.rank() || alg.field() != e.field() {
            return Err(BundleError::Mismatch);
        }
        match classify_subspace(alg, e.rank()).expect("dimensions checked") {
            CartanVerdict::Split => {}
            CartanVerdict::NonSplit { witness, .. } => return Err(BundleError::NonSplitAtVertex { vertex, witness }),
            verdict => return Err(BundleError::NotCartanAtVertex { vertex, verdict }),
        }
    }
    for (edge, &(u, v)) in e.base().edges().iter().enumerate() {
        if a.algebras[u].conjugate_with(e.transition(edge), e.inv(edge)) != a.algebras[v] {
            return Err(BundleError::IncompatibleEdge(edge));
        }
    }
    Ok(())
}

/// `Hom(E, F)` acting on row-major flattened `rank(F) x rank(E)` matrices by
/// `M -> T^F M (T^E)^{-1}`.
pub fn hom_bundle(e: &BundleRep, f: &BundleRep) -> Result<BundleRep, BundleError> {
    if e.base() != f.base() || e.field() != f.field() {
        return Err(BundleError::Mismatch);
    }
    e.validate()?;
    f.validate()?;
    let pairs = (0..e.base().edge_count())
        .map(|k| {
            let act = f.transition(k).kron(&e.inv(k).transpose());
            let act_inv = f.inv(k).kron(&e.transition(k).transpose());
            (act, act_inv)
        })
        .collect();
    Ok(BundleRep::with_inverses(e.base().clone(), e.field(), e.rank() * f.rank(), pairs))
}

/// `End(E)`: rank `d^2`, edge action `M -> T M T^{-1}`.
pub fn end_bundle(e: &BundleRep) -> Result<BundleRep, BundleError> {
    hom_bundle(e, e)
}

/// Basis of flat sections; each section lists one vector per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatSectionSpace {
    pub sections: Vec<Vec<Vec<Scalar>>>,
}

impl FlatSectionSpace {
    pub fn dim(&self) -> usize {
        self.sections.len()
    }
}

/// Flat sections whose root value lies in `root_space`: propagate along the
/// spanning tree, then impose consistency on the remaining edges.
fn solve_flat(b: &BundleRep, root_space: &Subspace, order: TreeOrder) -> FlatSectionSpace {
    let field = b.field();
    let r = b.rank();
    let tree = b.base().spanning_tree(order);
    let g = b.tree_transport(&tree);
    let k = root_space.dim();
    if k == 0 {
        return FlatSectionSpace { sections: Vec::new() };
    }
    let basis = Matrix::from_columns(field, r, root_space.basis());
    let mut constraints: Option<Matrix> = None;
    for &e in &tree.non_tree_edges {
        let (u, v) = b.base().edge(e);
        let c = (&b.transition(e).mul(&g[u]) - &g[v]).mul(&basis);
        constraints = Some(match constraints {
            None => c,
            Some(acc) => acc.stack(&c),
        });
    }
    let coords = match constraints {
        None => Subspace::full(field, k),
        Some(c) => c.kernel(),
    };
    let sections = coords
        .basis()
        .iter()
        .map(|c| {
            let s0 = basis.apply(c);
            g.iter().map(|gv| gv.apply(&s0)).collect()
        })
        .collect();
    FlatSectionSpace { sections }
}

/// Flat sections of a vector bundle: `T_e s_u = s_v` on every edge.
pub fn flat_sections(b: &BundleRep) -> Result<FlatSectionSpace, BundleError> {
    flat_sections_with(b, TreeOrder::Forward)
}

pub fn flat_sections_with(b: &BundleRep, order: TreeOrder) -> Result<FlatSectionSpace, BundleError> {
    b.validate()?;
    Ok(solve_flat(b, &Subspace::full(b.field(), b.rank()), order))
}

/// Flat sections of a subalgebra bundle: `T_e s_u T_e^{-1} = s_v` with
/// `s_v` in `A_v`. Sections are returned as flattened `d x d` matrices.
pub fn algebra_flat_sections(e: &BundleRep, a: &SubalgebraBundle) -> Result<FlatSectionSpace, BundleError> {
    algebra_flat_sections_with(e, a, TreeOrder::Forward)
}

pub fn algebra_flat_sections_with(
    e: &BundleRep,
    a: &SubalgebraBundle,
    order: TreeOrder,
) -> Result<FlatSectionSpace, BundleError> {
    validate_cartan_bundle(e, a)?;
    let end = end_bundle(e)?;
    Ok(solve_flat(&end, a.algebras[0].as_subspace(), order))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoOutcome {
    /// A flat invertible `Hom(E, F)` section, one matrix per vertex.
    Found(Vec<Matrix>),
    /// No invertible candidate found. Conclusive only when `hom_dim == 0`.
    NotFound { hom_dim: usize, conclusive: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsoSearch {
    /// Integer coefficients range over `[-bound, bound]`.
    pub bound: i64,
    /// Cap on the number of combinations tried.
    pub max_candidates: usize,
}

impl Default for IsoSearch {
    fn default() -> Self {
        IsoSearch { bound: 3, max_candidates: 20_000 }
    }
}

/// Searches the flat sections of `Hom(E, F)` for an invertible one: each basis
/// element first, then integer combinations in lexicographic order.
pub fn bundle_iso_check(e: &BundleRep, f: &BundleRep, search: IsoSearch) -> Result<IsoOutcome, BundleError> {
    if e.rank() != f.rank() {
        return Err(BundleError::Mismatch);
    }
    let hom = hom_bundle(e, f)?;
    let flat = solve_flat(&hom, &Subspace::full(e.field(), hom.rank()), TreeOrder::Forward);
    let d = e.rank();
    let field = e.field();
    let to_mats = |s: &Vec<Vec<Scalar>>| -> Vec<Matrix> {
        s.iter().map(|v| Matrix::from_flat(field, d, d, v.clone()).unwrap()).collect()
    };
    // Flat sections are invertible everywhere iff invertible at the root.
    for s in &flat.sections {
        let mats = to_mats(s);
        if mats[0].is_invertible() {
            return Ok(IsoOutcome::Found(mats));
        }
    }
    let k = flat.dim();
    if k > 1 {
        let range: Vec<i64> = (-search.bound..=search.bound).collect();
        let combos = std::iter::repeat_n(range.iter(), k).multi_cartesian_product();
        for coeffs in combos.take(search.max_candidates) {
            if coeffs.iter().all(|&&c| c == 0) {
                continue;
            }
            let mut s0 = Matrix::zeros(field, d, d);
            for (c, sec) in coeffs.iter().zip(&flat.sections) {
                let m = Matrix::from_flat(field, d, d, sec[0].clone()).unwrap();
                s0 = &s0 + &m.scale(&field.int(**c));
            }
            if s0.is_invertible() {
                let n = e.base().vertex_count();
                let per_vertex = (0..n)
                    .map(|v| {
                        let mut acc = Matrix::zeros(field, d, d);
                        for (c, sec) in coeffs.iter().zip(&flat.sections) {
                            let m = Matrix::from_flat(field, d, d, sec[v].clone()).unwrap();
                            acc = &acc + &m.scale(&field.int(**c));
                        }
                        acc
                    })
                    .collect();
                return Ok(IsoOutcome::Found(per_vertex));
            }
        }
    }
    Ok(IsoOutcome::NotFound { hom_dim: k, conclusive: k == 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    fn loop_bundle(t: Matrix) -> BundleRep {
        let d = t.rows();
        BundleRep::new(BaseGraph::bouquet(1), t.field(), d, vec![t]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(loop_bundle(Matrix::from_ints(q(), &[&[1]])).validate().is_ok());
        assert_eq!(
            loop_bundle(Matrix::from_ints(q(), &[&[1, 2], &[2, 4]])).validate(),
            Err(BundleError::SingularTransition(0))
        );
        let b = BundleRep::new(BaseGraph::new(2, vec![]).unwrap(), q(), 1, vec![]).unwrap();
        assert_eq!(b.validate(), Err(BundleError::DisconnectedBase));
    }

    #[test]
    fn cartan_bundle_examples() {
        let t = Matrix::from_ints(q(), &[&[0, 2], &[1, 0]]);
        let e = loop_bundle(t.clone());
        assert!(validate_cartan_bundle(&e, &SubalgebraBundle::diagonal(q(), 2, 1)).is_ok());

        let span = MatrixSubspace::new(q(), 2, &[Matrix::identity(q(), 2), t]).unwrap();
        assert_eq!(
            validate_cartan_bundle(&e, &SubalgebraBundle::constant(span, 1)),
            Err(BundleError::NonSplitAtVertex { vertex: 0, witness: Poly::from_ints(q(), &[-2, 0, 1]) })
        );

        let e = loop_bundle(Matrix::from_ints(q(), &[&[1, 1], &[0, 1]]));
        assert_eq!(
            validate_cartan_bundle(&e, &SubalgebraBundle::diagonal(q(), 2, 1)),
            Err(BundleError::IncompatibleEdge(0))
        );
    }

    #[test]
    fn end_bundle_examples() {
        let e = loop_bundle(Matrix::from_ints(q(), &[&[5]]));
        assert_eq!(end_bundle(&e).unwrap().transition(0), &Matrix::identity(q(), 1));

        let e = loop_bundle(Matrix::from_ints(q(), &[&[2, 0], &[0, 3]]));
        let act = end_bundle(&e).unwrap().transition(0).clone();
        let third = |s: &str| q().parse(s).unwrap();
        // basis order E11, E12, E21, E22
        assert_eq!(act, Matrix::diagonal(q(), &[q().int(1), third("2/3"), third("3/2"), q().int(1)]));
        assert!(act.is_invertible());
    }

    #[test]
    fn flat_section_examples() {
        let base = BaseGraph::new(3, vec![(0, 1), (1, 2), (2, 0), (1, 1)]).unwrap();
        let triv = BundleRep::trivial(base, q(), 3);
        assert_eq!(flat_sections(&triv).unwrap().dim(), 3);

        let t = Matrix::from_ints(q(), &[&[0, 2], &[1, 0]]);
        let e = loop_bundle(t);
        let fs = algebra_flat_sections(&e, &SubalgebraBundle::diagonal(q(), 2, 1)).unwrap();
        assert_eq!(fs.dim(), 1);
        assert_eq!(fs.sections[0][0], Matrix::identity(q(), 2).into_entries());

        let e = loop_bundle(Matrix::from_ints(q(), &[&[2]]));
        assert_eq!(flat_sections(&e).unwrap().dim(), 0);
    }

    #[test]
    fn iso_examples() {
        let t = Matrix::from_ints(q(), &[&[1, 2], &[3, 5]]);
        let e = loop_bundle(t.clone());
        match bundle_iso_check(&e, &e, IsoSearch::default()).unwrap() {
            IsoOutcome::Found(w) => assert!(w[0].is_invertible()),
            other => panic!("{other:?}"),
        }

        let a = loop_bundle(Matrix::from_ints(q(), &[&[2]]));
        let b = loop_bundle(Matrix::from_ints(q(), &[&[3]]));
        assert_eq!(
            bundle_iso_check(&a, &b, IsoSearch::default()).unwrap(),
            IsoOutcome::NotFound { hom_dim: 0, conclusive: true }
        );

        let p = Matrix::from_ints(q(), &[&[0, 1], &[1, 0]]);
        let f = loop_bundle(p.mul(&t).mul(&p));
        let IsoOutcome::Found(w) = bundle_iso_check(&e, &f, IsoSearch::default()).unwrap() else { panic!() };
        // the flat Hom space of this loop is spanned by P·poly(T); the witness intertwines
        assert_eq!(f.transition(0).mul(&w[0]), w[0].mul(e.transition(0)));
    }

    #[test]
    fn holonomy_preserves_cartan_bundle() {
        let base = BaseGraph::new(2, vec![(0, 1), (1, 0), (1, 1)]).unwrap();
        let sw = Matrix::from_ints(q(), &[&[0, 3], &[1, 0]]);
        let dg = Matrix::from_ints(q(), &[&[2, 0], &[0, 7]]);
        let e = BundleRep::new(base, q(), 2, vec![sw.clone(), dg, sw]).unwrap();
        let a = SubalgebraBundle::diagonal(q(), 2, 2);
        validate_cartan_bundle(&e, &a).unwrap();
        for (_, h) in e.fundamental_holonomies(TreeOrder::Forward) {
            assert_eq!(a.algebras[0].conjugate_with(&h, &h.inverse().unwrap()), a.algebras[0]);
        }
        let f = algebra_flat_sections_with(&e, &a, TreeOrder::Forward).unwrap().dim();
        let r = algebra_flat_sections_with(&e, &a, TreeOrder::Reverse).unwrap().dim();
        assert_eq!((f, r), (1, 1));
    }
}
