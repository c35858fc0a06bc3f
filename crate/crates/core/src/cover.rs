//! Étale covers of the base graph, their direct images, and the inverse
//! construction that rebuilds a cover and a line bundle from a split Cartan
//! subalgebra bundle.
//!
//! A degree-`d` cover has fiber labels `0..d` over every vertex and a bijection
//! `sigma_e` from source labels to target labels on every edge. A line bundle
//! on the cover puts a nonzero scalar on each lifted edge `(e, t)`. Its direct
//! image is the rank-`d` bundle whose transition on `e` sends basis vector `u_t`
//! to `s_{e,t} u_{sigma_e(t)}`, always a monomial matrix.

use itertools::Itertools;
use thiserror::Error;

use crate::algebra::{Field, Matrix, MatrixSubspace, Scalar};
use crate::bundle::{algebra_flat_sections, validate_cartan_bundle, BundleError, BundleRep, SubalgebraBundle};
use crate::cartan::{simultaneous_eigenlines, EigenlineSet};
use crate::graph::{BaseGraph, TreeOrder, UnionFind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("expected {expected} edge permutations, found {found}")]
    SigmaCount { expected: usize, found: usize },
    #[error("edge {edge} does not carry a permutation of 0..{degree}")]
    BadPermutation { edge: usize, degree: usize },
    #[error("line bundle scalars do not match the cover shape")]
    ScalarShape,
    #[error("zero scalar on edge {edge}, label {label}")]
    ZeroScalar { edge: usize, label: usize },
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("edge {edge} does not map line {label} onto a line")]
    LineNotMapped { edge: usize, label: usize },
    #[error("eta fails to intertwine transitions on edge {0}")]
    NotIntertwining(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverRep {
    base: BaseGraph,
    degree: usize,
    sigma: Vec<Vec<usize>>,
}

impl CoverRep {
    pub fn new(base: BaseGraph, degree: usize, sigma: Vec<Vec<usize>>) -> Result<Self, CoverError> {
        if sigma.len() != base.edge_count() {
            return Err(CoverError::SigmaCount { expected: base.edge_count(), found: sigma.len() });
        }
        for (edge, s) in sigma.iter().enumerate() {
            if !is_permutation(s, degree) {
                return Err(CoverError::BadPermutation { edge, degree });
            }
        }
        Ok(CoverRep { base, degree, sigma })
    }

    /// Disjoint union of `d` copies of the base.
    pub fn trivial(base: BaseGraph, degree: usize) -> Self {
        let sigma = vec![(0..degree).collect(); base.edge_count()];
        CoverRep { base, degree, sigma }
    }

    pub fn base(&self) -> &BaseGraph {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn sigma(&self, e: usize) -> &[usize] {
        &self.sigma[e]
    }

    pub fn sigmas(&self) -> &[Vec<usize>] {
        &self.sigma
    }

    fn node(&self, v: usize, t: usize) -> usize {
        v * self.degree + t
    }

    /// Component label of every `(vertex, label)` node, indexed `v * d + t`.
    fn component_labels(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.base.vertex_count() * self.degree);
        for (e, &(u, v)) in self.base.edges().iter().enumerate() {
            for t in 0..self.degree {
                uf.union(self.node(u, t), self.node(v, self.sigma[e][t]));
            }
        }
        uf.labels()
    }
}

pub(crate) fn is_permutation(s: &[usize], d: usize) -> bool {
    let mut seen = vec![false; d];
    s.len() == d && s.iter().all(|&i| i < d && !std::mem::replace(&mut seen[i], true))
}

pub(crate) fn invert_permutation(s: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; s.len()];
    for (i, &j) in s.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// Nonzero scalars on the lifted edges of a cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineBundleOnCover {
    field: Field,
    scalars: Vec<Vec<Scalar>>,
}

impl LineBundleOnCover {
    pub fn new(cover: &CoverRep, field: Field, scalars: Vec<Vec<Scalar>>) -> Result<Self, CoverError> {
        if scalars.len() != cover.base.edge_count() || scalars.iter().any(|s| s.len() != cover.degree) {
            return Err(CoverError::ScalarShape);
        }
        for (edge, row) in scalars.iter().enumerate() {
            if row.iter().any(|s| s.field() != field) {
                return Err(CoverError::ScalarShape);
            }
            if let Some(label) = row.iter().position(Scalar::is_zero) {
                return Err(CoverError::ZeroScalar { edge, label });
            }
        }
        Ok(LineBundleOnCover { field, scalars })
    }

    /// The structure sheaf: every scalar is one.
    pub fn trivial(cover: &CoverRep, field: Field) -> Self {
        LineBundleOnCover { field, scalars: vec![vec![field.one(); cover.degree]; cover.base.edge_count()] }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn scalar(&self, e: usize, t: usize) -> &Scalar {
        &self.scalars[e][t]
    }

    pub fn scalars(&self) -> &[Vec<Scalar>] {
        &self.scalars
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverReport {
    pub components: usize,
    /// Number of labels each component has over a vertex, descending.
    pub component_degrees: Vec<usize>,
    /// Every component maps isomorphically onto the base.
    pub split: bool,
}

/// Monomial transitions: column `t` of `T_e` holds `s_{e,t}` in row `sigma_e(t)`.
pub fn direct_image_line_bundle(c: &CoverRep, l: &LineBundleOnCover) -> BundleRep {
    let field = l.field;
    let d = c.degree;
    let ts = (0..c.base.edge_count())
        .map(|e| {
            let mut t = Matrix::zeros(field, d, d);
            for label in 0..d {
                t.set(c.sigma[e][label], label, l.scalars[e][label].clone());
            }
            t
        })
        .collect();
    BundleRep::new(c.base.clone(), field, d, ts).expect("monomial transitions have the right shape")
}

/// Image of the functions on the cover inside `End(f_* L)`: the diagonal
/// matrices in the cover-label basis, at every vertex.
pub fn canonical_algebra_map(c: &CoverRep, l: &LineBundleOnCover) -> SubalgebraBundle {
    SubalgebraBundle::diagonal(l.field, c.degree, c.base.vertex_count())
}

/// Cover, line bundle and per-vertex frame rebuilt from a Cartan bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralCover {
    pub cover: CoverRep,
    pub line_bundle: LineBundleOnCover,
    /// Columns are the normalized eigenline vectors at each vertex.
    pub eta: Vec<Matrix>,
    pub eigenlines: Vec<EigenlineSet>,
}

pub fn build_spectral_cover(e: &BundleRep, a: &SubalgebraBundle) -> Result<SpectralCover, CoverError> {
    validate_cartan_bundle(e, a)?;
    let field = e.field();
    let d = e.rank();
    let eigenlines: Vec<EigenlineSet> = a
        .algebras
        .iter()
        .map(|alg| simultaneous_eigenlines(alg).expect("validated split Cartan algebra"))
        .collect();
    let base = e.base().clone();
    let mut sigma = Vec::with_capacity(base.edge_count());
    let mut scalars = Vec::with_capacity(base.edge_count());
    for (edge, &(u, v)) in base.edges().iter().enumerate() {
        let t_e = e.transition(edge);
        let mut perm = vec![0; d];
        let mut row = vec![field.one(); d];
        for (label, w) in eigenlines[u].lines.iter().enumerate() {
            let image = t_e.apply(w);
            let (target, s) = eigenlines[v].locate(&image).ok_or(CoverError::LineNotMapped { edge, label })?;
            perm[label] = target;
            row[label] = s;
        }
        if !is_permutation(&perm, d) {
            return Err(CoverError::LineNotMapped { edge, label: 0 });
        }
        sigma.push(perm);
        scalars.push(row);
    }
    let cover = CoverRep::new(base, d, sigma)?;
    let line_bundle = LineBundleOnCover::new(&cover, field, scalars)?;
    let eta: Vec<Matrix> = eigenlines.iter().map(|l| l.frame(field)).collect();
    let pushed = direct_image_line_bundle(&cover, &line_bundle);
    if let Some(edge) = first_non_intertwining(e, &pushed, &eta) {
        return Err(CoverError::NotIntertwining(edge));
    }
    Ok(SpectralCover { cover, line_bundle, eta, eigenlines })
}

/// First edge where `eta_v T^F_e = T^E_e eta_u` fails.
fn first_non_intertwining(e: &BundleRep, f: &BundleRep, eta: &[Matrix]) -> Option<usize> {
    e.base()
        .edges()
        .iter()
        .enumerate()
        .find(|&(k, &(u, v))| eta[v].mul(f.transition(k)) != e.transition(k).mul(&eta[u]))
        .map(|(k, _)| k)
}

pub fn cover_report(c: &CoverRep) -> CoverReport {
    let labels = c.component_labels();
    // Every component meets vertex 0 since the base is connected.
    let mut counts = std::collections::BTreeMap::new();
    for t in 0..c.degree {
        *counts.entry(labels[c.node(0, t)]).or_insert(0usize) += 1;
    }
    let mut component_degrees: Vec<usize> = counts.into_values().collect();
    component_degrees.sort_unstable_by(|a, b| b.cmp(a));
    let split = component_degrees.iter().all(|&k| k == 1);
    CoverReport { components: component_degrees.len(), component_degrees, split }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTrip {
    pub spectral: SpectralCover,
    /// `eta` intertwines the transitions of `f_* L` and `E`.
    pub intertwines: bool,
    /// The diagonal algebra conjugated through `eta` is `A` at every vertex.
    pub algebra_matches: bool,
    pub components: usize,
    pub flat_section_dim: usize,
    /// Component count equals the flat-section dimension of `A`.
    pub components_match: bool,
    pub witnesses: Vec<String>,
}

impl RoundTrip {
    pub fn all_pass(&self) -> bool {
        self.intertwines && self.algebra_matches && self.components_match
    }
}

pub fn roundtrip_verify(e: &BundleRep, a: &SubalgebraBundle) -> Result<RoundTrip, CoverError> {
    let spectral = build_spectral_cover(e, a)?;
    let pushed = direct_image_line_bundle(&spectral.cover, &spectral.line_bundle);
    let rebuilt = canonical_algebra_map(&spectral.cover, &spectral.line_bundle);
    let mut witnesses = Vec::new();

    let bad_edge = first_non_intertwining(e, &pushed, &spectral.eta);
    if let Some(k) = bad_edge {
        witnesses.push(format!("eta does not intertwine on edge {k}"));
    }
    let mut algebra_matches = true;
    for (v, (eta, alg)) in spectral.eta.iter().zip(&rebuilt.algebras).enumerate() {
        let inv = eta.inverse().expect("eigenlines span the fiber");
        if alg.conjugate_with(eta, &inv) != a.algebras[v] {
            algebra_matches = false;
            witnesses.push(format!("reconstructed algebra differs at vertex {v}"));
        }
    }
    let components = cover_report(&spectral.cover).components;
    let flat_section_dim = algebra_flat_sections(e, a)?.dim();
    if components != flat_section_dim {
        witnesses.push(format!("{components} components but {flat_section_dim} flat sections"));
    }
    Ok(RoundTrip {
        spectral,
        intertwines: bad_edge.is_none(),
        algebra_matches,
        components,
        flat_section_dim,
        components_match: components == flat_section_dim,
        witnesses,
    })
}

/// Holonomy of the line bundle around the fundamental cycles of the total
/// graph of the cover, one entry per lifted non-tree edge `(edge, label)`.
pub fn cycle_holonomies(c: &CoverRep, l: &LineBundleOnCover) -> Vec<((usize, usize), Scalar)> {
    let field = l.field;
    let d = c.degree;
    let nodes = c.base.vertex_count() * d;
    // adjacency: (neighbour, edge, label, forward)
    let mut adj: Vec<Vec<(usize, usize, usize, bool)>> = vec![Vec::new(); nodes];
    for (e, &(u, v)) in c.base.edges().iter().enumerate() {
        for t in 0..d {
            let (a, b) = (c.node(u, t), c.node(v, c.sigma[e][t]));
            adj[a].push((b, e, t, true));
            adj[b].push((a, e, t, false));
        }
    }
    let mut gauge: Vec<Option<Scalar>> = vec![None; nodes];
    let mut tree = std::collections::HashSet::new();
    for start in 0..nodes {
        if gauge[start].is_some() {
            continue;
        }
        gauge[start] = Some(field.one());
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            let gx = gauge[x].clone().unwrap();
            for &(y, e, t, forward) in &adj[x] {
                if gauge[y].is_none() {
                    let s = l.scalar(e, t);
                    let gy = if forward { &gx * s } else { gx.checked_div(s).unwrap() };
                    gauge[y] = Some(gy);
                    tree.insert((e, t));
                    stack.push(y);
                }
            }
        }
    }
    let mut out = Vec::new();
    for (e, &(u, v)) in c.base.edges().iter().enumerate() {
        for t in 0..d {
            if tree.contains(&(e, t)) {
                continue;
            }
            let src = gauge[c.node(u, t)].as_ref().unwrap();
            let dst = gauge[c.node(v, c.sigma[e][t])].as_ref().unwrap();
            out.push(((e, t), (l.scalar(e, t) * src).checked_div(dst).unwrap()));
        }
    }
    out
}

/// Label bijections `phi_v` with `phi_v o sigma_e = sigma'_e o phi_u` on every
/// edge. When both line bundles are given the bijection must also carry one
/// onto the other up to gauge (equal holonomy around every cycle).
pub fn find_cover_isomorphism(
    c1: &CoverRep,
    l1: Option<&LineBundleOnCover>,
    c2: &CoverRep,
    l2: Option<&LineBundleOnCover>,
) -> Option<Vec<Vec<usize>>> {
    if c1.base != c2.base || c1.degree != c2.degree {
        return None;
    }
    let d = c1.degree;
    let tree = c1.base.spanning_tree(TreeOrder::Forward);
    for root in (0..d).permutations(d) {
        let mut phi = vec![Vec::new(); c1.base.vertex_count()];
        phi[tree.root] = root;
        for &v in tree.order.iter().skip(1) {
            let step = tree.steps[v].unwrap();
            let p = &phi[step.parent];
            let (s1, s2) = (&c1.sigma[step.edge], &c2.sigma[step.edge]);
            phi[v] = if step.forward {
                let mut m = vec![0; d];
                for t in 0..d {
                    m[s1[t]] = s2[p[t]];
                }
                m
            } else {
                let s2_inv = invert_permutation(s2);
                (0..d).map(|t| s2_inv[p[s1[t]]]).collect()
            };
        }
        let commutes = c1.base.edges().iter().enumerate().all(|(e, &(u, v))| {
            (0..d).all(|t| phi[v][c1.sigma[e][t]] == c2.sigma[e][phi[u][t]])
        });
        if !commutes {
            continue;
        }
        let bundles_match = match (l1, l2) {
            (Some(a), Some(b)) => {
                let ratio: Vec<Vec<Scalar>> = c1
                    .base
                    .edges()
                    .iter()
                    .enumerate()
                    .map(|(e, &(u, _))| {
                        (0..d).map(|t| b.scalar(e, phi[u][t]).checked_div(a.scalar(e, t)).unwrap()).collect()
                    })
                    .collect();
                let ratio = LineBundleOnCover { field: a.field, scalars: ratio };
                cycle_holonomies(c1, &ratio).iter().all(|(_, h)| h.is_one())
            }
            _ => true,
        };
        if bundles_match {
            return Some(phi);
        }
    }
    None
}

/// Full diagonal algebra in a given frame: `eta D eta^{-1}`.
pub fn framed_diagonal(field: Field, eta: &Matrix) -> MatrixSubspace {
    MatrixSubspace::diagonal_algebra(field, eta.rows()).conjugate_with(eta, &eta.inverse().expect("invertible frame"))
}
