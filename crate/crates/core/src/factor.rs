//! Intermediate covers `Y -> Z -> X` as block systems of the monodromy action,
//! and the matching direct summands of `f_* O_Y`.

use itertools::Itertools;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{Field, Matrix, MatrixSubspace, Subspace};
use crate::cartan::{classify_subspace, CartanVerdict};
use crate::cover::{direct_image_line_bundle, invert_permutation, CoverError, CoverRep, LineBundleOnCover};
use crate::graph::TreeOrder;

pub const MAX_BLOCK_DEGREE: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("degree {degree} exceeds the enumeration bound {max}")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("not a block system: {0}")]
    NotABlockSystem(String),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// Holonomy permutations after gauge-fixing the fibers along a spanning tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonodromyData {
    pub degree: usize,
    pub tree_edges: Vec<usize>,
    /// `(edge, permutation of root labels)` for every non-tree edge.
    pub generators: Vec<(usize, Vec<usize>)>,
    /// `transport[v][t]`: the label over `v` reached from root label `t` along the tree.
    pub transport: Vec<Vec<usize>>,
}

pub fn monodromy_generators(c: &CoverRep) -> MonodromyData {
    let d = c.degree();
    let tree = c.base().spanning_tree(TreeOrder::Forward);
    let mut transport = vec![(0..d).collect::<Vec<_>>(); c.base().vertex_count()];
    for &v in tree.order.iter().skip(1) {
        let step = tree.steps[v].unwrap();
        let s = c.sigma(step.edge);
        transport[v] = if step.forward {
            transport[step.parent].iter().map(|&t| s[t]).collect()
        } else {
            let inv = invert_permutation(s);
            transport[step.parent].iter().map(|&t| inv[t]).collect()
        };
    }
    let generators = tree
        .non_tree_edges
        .iter()
        .map(|&e| {
            let (u, v) = c.base().edge(e);
            let back = invert_permutation(&transport[v]);
            let g = (0..d).map(|t| back[c.sigma(e)[transport[u][t]]]).collect();
            (e, g)
        })
        .collect();
    MonodromyData { degree: d, tree_edges: tree.tree_edges, generators, transport }
}

/// Partition of the root fiber into blocks of equal size; blocks sorted
/// internally and ordered by their least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockSystem {
    blocks: Vec<Vec<usize>>,
}

impl BlockSystem {
    /// Canonicalizes and checks that the blocks partition `0..degree` evenly.
    pub fn new(degree: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self, FactorError> {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort();
        let mut seen = vec![false; degree];
        for &t in blocks.iter().flatten() {
            if t >= degree || std::mem::replace(&mut seen[t], true) {
                return Err(FactorError::NotABlockSystem(format!("label {t} repeated or out of range")));
            }
        }
        if seen.iter().any(|s| !s) || blocks.iter().any(|b| b.is_empty()) {
            return Err(FactorError::NotABlockSystem("blocks do not cover the fiber".into()));
        }
        if blocks.iter().map(Vec::len).dedup().count() != 1 {
            return Err(FactorError::NotABlockSystem("blocks differ in size".into()));
        }
        Ok(BlockSystem { blocks })
    }

    pub fn singletons(degree: usize) -> Self {
        BlockSystem { blocks: (0..degree).map(|t| vec![t]).collect() }
    }

    pub fn whole(degree: usize) -> Self {
        BlockSystem { blocks: vec![(0..degree).collect()] }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_size(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn degree(&self) -> usize {
        self.block_size() * self.block_count()
    }

    pub fn is_trivial(&self) -> bool {
        self.block_size() == 1 || self.block_count() == 1
    }

    /// Block index of every label.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.degree()];
        for (i, b) in self.blocks.iter().enumerate() {
            for &t in b {
                out[t] = i;
            }
        }
        out
    }

    /// Every permutation sends blocks onto blocks.
    pub fn is_preserved_by(&self, perms: &[Vec<usize>]) -> bool {
        let of = self.block_of();
        perms.iter().all(|g| {
            self.blocks.iter().all(|b| b.iter().map(|&t| of[g[t]]).all_equal())
        })
    }

    /// `true` when every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &BlockSystem) -> bool {
        let of = coarser.block_of();
        self.blocks.iter().all(|b| b.iter().map(|&t| of[t]).all_equal())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSystems {
    /// Systems other than singletons and the single block.
    pub proper: Vec<BlockSystem>,
    pub trivial: Vec<BlockSystem>,
}

pub fn block_systems(m: &MonodromyData) -> Result<BlockSystems, FactorError> {
    block_systems_bounded(m, MAX_BLOCK_DEGREE)
}

pub fn block_systems_bounded(m: &MonodromyData, max_degree: usize) -> Result<BlockSystems, FactorError> {
    let d = m.degree;
    let max = max_degree.min(MAX_BLOCK_DEGREE);
    if d > max {
        return Err(FactorError::DegreeTooLarge { degree: d, max });
    }
    let gens: Vec<Vec<usize>> = m.generators.iter().map(|(_, g)| g.clone()).collect();
    let mut trivial = vec![BlockSystem::singletons(d)];
    if d > 1 {
        trivial.push(BlockSystem::whole(d));
    }
    let mut proper: Vec<BlockSystem> = (2..d)
        .filter(|b| d % b == 0)
        .flat_map(|b| {
            // Parallel over the choice of the block containing label 0.
            let firsts: Vec<Vec<usize>> = (1..d).combinations(b - 1).collect();
            firsts
                .into_par_iter()
                .flat_map_iter(|rest| {
                    let mut assign = vec![usize::MAX; d];
                    let mut blocks = Vec::new();
                    let mut out = Vec::new();
                    let mut first = vec![0];
                    first.extend(rest);
                    place(&mut assign, &mut blocks, first, &gens, b, &mut out);
                    out
                })
                .collect::<Vec<_>>()
        })
        .collect();
    proper.sort();
    Ok(BlockSystems { proper, trivial })
}

/// Adds `block` to the partial partition and recurses; prunes as soon as the
/// image of a completed block straddles assigned and unassigned labels or two
/// different blocks.
fn place(
    assign: &mut Vec<usize>,
    blocks: &mut Vec<Vec<usize>>,
    block: Vec<usize>,
    gens: &[Vec<usize>],
    size: usize,
    out: &mut Vec<BlockSystem>,
) {
    let id = blocks.len();
    for &t in &block {
        assign[t] = id;
    }
    blocks.push(block);
    if consistent(assign, blocks, gens) {
        match assign.iter().position(|&a| a == usize::MAX) {
            None => out.push(BlockSystem { blocks: blocks.clone() }),
            Some(next) => {
                let free: Vec<usize> = (next + 1..assign.len()).filter(|&t| assign[t] == usize::MAX).collect();
                for rest in free.into_iter().combinations(size - 1) {
                    let mut b = vec![next];
                    b.extend(rest);
                    place(assign, blocks, b, gens, size, out);
                }
            }
        }
    }
    for &t in &blocks.pop().unwrap() {
        assign[t] = usize::MAX;
    }
}

fn consistent(assign: &[usize], blocks: &[Vec<usize>], gens: &[Vec<usize>]) -> bool {
    gens.iter().all(|g| {
        blocks.iter().all(|b| {
            let imgs: Vec<usize> = b.iter().map(|&t| assign[g[t]]).collect();
            imgs.iter().all(|&a| a == usize::MAX) || (imgs[0] != usize::MAX && imgs.iter().all_equal())
        })
    })
}

/// The quotient cover `Z` with its label map `g: Y -> Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntermediateCover {
    pub z: CoverRep,
    /// `label_map[v][t]`: the block (label of `Z`) containing label `t` over `v`.
    pub label_map: Vec<Vec<usize>>,
    /// `h o g` reproduces the permutation data of the original cover.
    pub consistent: bool,
}

pub fn intermediate_cover(c: &CoverRep, b: &BlockSystem) -> Result<IntermediateCover, FactorError> {
    let m = monodromy_generators(c);
    if b.degree() != c.degree() {
        return Err(FactorError::NotABlockSystem(format!("partition of {} labels for degree {}", b.degree(), c.degree())));
    }
    let gens: Vec<Vec<usize>> = m.generators.iter().map(|(_, g)| g.clone()).collect();
    if !b.is_preserved_by(&gens) {
        return Err(FactorError::NotABlockSystem("some monodromy generator splits a block".into()));
    }
    let of = b.block_of();
    let label_map: Vec<Vec<usize>> = m
        .transport
        .iter()
        .map(|pi| {
            let back = invert_permutation(pi);
            (0..c.degree()).map(|t| of[back[t]]).collect()
        })
        .collect();
    let sigma_z: Vec<Vec<usize>> = c
        .base()
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| {
            b.blocks()
                .iter()
                .map(|blk| label_map[v][c.sigma(e)[m.transport[u][blk[0]]]])
                .collect()
        })
        .collect();
    let z = CoverRep::new(c.base().clone(), b.block_count(), sigma_z)?;
    let consistent = c.base().edges().iter().enumerate().all(|(e, &(u, v))| {
        (0..c.degree()).all(|t| label_map[v][c.sigma(e)[t]] == z.sigma(e)[label_map[u][t]])
    });
    Ok(IntermediateCover { z, label_map, consistent })
}

/// Outcome of testing whether the span of block indicators is a direct summand
/// of `f_* O_Y` with commuting Cartan square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummandCheck {
    /// Transitions of `W = f_* O_Y` carry indicator spans onto indicator spans.
    pub subbundle: bool,
    /// The indicator embedding intertwines `h_* O_Z` with `W`.
    pub embedding_is_bundle_map: bool,
    /// `V_x` sits in `End(V_x)` as a split Cartan subalgebra at every vertex.
    pub cartan: bool,
    /// Square commutes with the first-label retraction.
    pub commutes_first_label: bool,
    /// Square commutes with the block-average retraction; `None` when the
    /// characteristic divides the block size.
    pub commutes_average: Option<bool>,
    pub witnesses: Vec<String>,
}

impl SummandCheck {
    pub fn passes(&self) -> bool {
        self.subbundle
            && self.embedding_is_bundle_map
            && self.cartan
            && self.commutes_first_label
            && self.commutes_average != Some(false)
    }
}

/// For a partition of the root fiber into equal blocks (not necessarily a
/// block system), builds the indicator embedding `i_V: V -> W` at every vertex
/// and checks the summand conditions.
pub fn summand_embedding_check(c: &CoverRep, partition: &BlockSystem, field: Field) -> SummandCheck {
    let d = c.degree();
    let m = monodromy_generators(c);
    let w_bundle = direct_image_line_bundle(c, &LineBundleOnCover::trivial(c, field));
    let blocks_at: Vec<Vec<Vec<usize>>> = m
        .transport
        .iter()
        .map(|pi| partition.blocks().iter().map(|b| b.iter().map(|&t| pi[t]).collect()).collect())
        .collect();
    let indicator = |v: usize| {
        let mut i = Matrix::zeros(field, d, partition.block_count());
        for (j, b) in blocks_at[v].iter().enumerate() {
            for &t in b {
                i.set(t, j, field.one());
            }
        }
        i
    };
    let first_label = |v: usize| {
        let mut p = Matrix::zeros(field, partition.block_count(), d);
        for (j, b) in blocks_at[v].iter().enumerate() {
            p.set(j, *b.iter().min().unwrap(), field.one());
        }
        p
    };
    let mut out = SummandCheck {
        subbundle: true,
        embedding_is_bundle_map: true,
        cartan: true,
        commutes_first_label: true,
        commutes_average: None,
        witnesses: Vec::new(),
    };
    let col_space = |mat: &Matrix| Subspace::from_vectors(field, d, &mat.transpose().to_rows());
    for (e, &(u, v)) in c.base().edges().iter().enumerate() {
        if col_space(&w_bundle.transition(e).mul(&indicator(u))) != col_space(&indicator(v)) {
            out.subbundle = false;
            out.witnesses.push(format!("edge {e} moves the indicator span off itself"));
        }
    }
    if !out.subbundle {
        out.embedding_is_bundle_map = false;
        out.cartan = false;
        out.commutes_first_label = false;
        return out;
    }
    let z = intermediate_cover(c, partition).expect("subbundle condition is the block condition");
    let v_bundle = direct_image_line_bundle(&z.z, &LineBundleOnCover::trivial(&z.z, field));
    for (e, &(u, v)) in c.base().edges().iter().enumerate() {
        if w_bundle.transition(e).mul(&indicator(u)) != indicator(v).mul(v_bundle.transition(e)) {
            out.embedding_is_bundle_map = false;
            out.witnesses.push(format!("indicator embedding fails to intertwine on edge {e}"));
        }
    }
    let k = partition.block_count();
    let ch = field.characteristic();
    let average_ok = ch == 0 || partition.block_size() as u64 % ch != 0;
    let avg_scale = field.int(partition.block_size() as i64).inv();
    let mut avg_result = average_ok.then_some(true);
    for v in 0..c.base().vertex_count() {
        if classify_subspace(&MatrixSubspace::diagonal_algebra(field, k), k).ok() != Some(CartanVerdict::Split) {
            out.cartan = false;
        }
        let i_v = indicator(v);
        let p_first = first_label(v);
        if !square_commutes(&i_v, &p_first, field) {
            out.commutes_first_label = false;
            out.witnesses.push(format!("first-label square fails at vertex {v}"));
        }
        if let (Some(flag), Some(scale)) = (avg_result.as_mut(), avg_scale.as_ref()) {
            let p_avg = i_v.transpose().scale(scale);
            if !square_commutes(&i_v, &p_avg, field) {
                *flag = false;
                out.witnesses.push(format!("block-average square fails at vertex {v}"));
            }
        }
    }
    // The average retraction is a bundle map, so V is a global summand.
    if let (Some(flag), Some(scale)) = (avg_result.as_mut(), avg_scale.as_ref()) {
        for (e, &(u, v)) in c.base().edges().iter().enumerate() {
            let pu = indicator(u).transpose().scale(scale);
            let pv = indicator(v).transpose().scale(scale);
            if v_bundle.transition(e).mul(&pu) != pv.mul(w_bundle.transition(e)) {
                *flag = false;
                out.witnesses.push(format!("block-average retraction not flat on edge {e}"));
            }
        }
    }
    out.commutes_average = avg_result;
    out
}

/// `p o diag(i(x)) o i = diag(x)` for every basis vector `x` of `V_x`, with
/// `p o i = id`.
fn square_commutes(i_v: &Matrix, p_v: &Matrix, field: Field) -> bool {
    let k = i_v.cols();
    if p_v.mul(i_v) != Matrix::identity(field, k) {
        return false;
    }
    (0..k).all(|j| {
        let mut x = vec![field.zero(); k];
        x[j] = field.one();
        let lifted = Matrix::diagonal(field, &i_v.apply(&x));
        p_v.mul(&lifted).mul(i_v) == Matrix::diagonal(field, &x)
    })
}
