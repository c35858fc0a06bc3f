//! Seeded random instances for self-tests and property suites.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Field, Matrix, Scalar};
use crate::cover::{CoverRep, LineBundleOnCover};
use crate::graph::BaseGraph;
use crate::parabolic::{riemann_hurwitz_genus, BranchPoint, ParabolicWeight, RamifiedCoverData};

/// Independent stream for instance `index` of a run seeded with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Connected graph: a random spanning tree plus extra edges (loops allowed).
pub fn random_connected_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize) -> BaseGraph {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
    }
    let min_extra = usize::from(edges.is_empty());
    let room = max_edges.saturating_sub(edges.len()).max(min_extra);
    let extra = rng.gen_range(min_extra..=room);
    for _ in 0..extra {
        edges.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    edges.shuffle(rng);
    BaseGraph::new(n, edges).expect("endpoints in range")
}

pub fn random_permutation<R: Rng>(rng: &mut R, d: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..d).collect();
    p.shuffle(rng);
    p
}

pub fn random_cover<R: Rng>(rng: &mut R, base: BaseGraph, degree: usize) -> CoverRep {
    let sigma = (0..base.edge_count()).map(|_| random_permutation(rng, degree)).collect();
    CoverRep::new(base, degree, sigma).expect("random permutations are valid")
}

/// Small nonzero scalar: `±a/b` with `1 <= a, b <= 3` over `Q`, a nonzero residue over `GF(p)`.
pub fn random_unit<R: Rng>(rng: &mut R, field: Field) -> Scalar {
    match field {
        Field::Rationals => {
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let q = BigRational::new(BigInt::from(sign * rng.gen_range(1..=3)), BigInt::from(rng.gen_range(1..=3)));
            field.rational(&q).unwrap()
        }
        Field::Prime(p) => field.int(rng.gen_range(1..p.get()) as i64),
    }
}

pub fn random_line_bundle<R: Rng>(rng: &mut R, cover: &CoverRep, field: Field) -> LineBundleOnCover {
    let scalars = (0..cover.base().edge_count())
        .map(|_| (0..cover.degree()).map(|_| random_unit(rng, field)).collect())
        .collect();
    LineBundleOnCover::new(cover, field, scalars).expect("nonzero scalars")
}

/// Invertible matrix built from a few row operations and a row permutation.
/// Over `Q` the additions use `±1` so entries stay small integers.
pub fn random_invertible<R: Rng>(rng: &mut R, field: Field, d: usize) -> Matrix {
    let mut m = Matrix::identity(field, d);
    if d < 2 {
        return m.scale(&random_unit(rng, field));
    }
    for _ in 0..rng.gen_range(1..=2 * d) {
        let i = rng.gen_range(0..d);
        let mut j = rng.gen_range(0..d - 1);
        if j >= i {
            j += 1;
        }
        let c = match field {
            Field::Rationals => field.int(if rng.gen_bool(0.5) { 1 } else { -1 }),
            Field::Prime(_) => random_unit(rng, field),
        };
        let mut op = Matrix::identity(field, d);
        op.set(i, j, c);
        m = op.mul(&m);
    }
    let perm = random_permutation(rng, d);
    let mut p = Matrix::zeros(field, d, d);
    for (i, &j) in perm.iter().enumerate() {
        p.set(i, j, field.one());
    }
    p.mul(&m)
}

pub fn random_gauge<R: Rng>(rng: &mut R, field: Field, d: usize, vertices: usize) -> Vec<Matrix> {
    (0..vertices).map(|_| random_invertible(rng, field, d)).collect()
}

/// Bounds for [`random_ramified_data`].
#[derive(Debug, Clone, Copy)]
pub struct RamifiedBounds {
    pub max_degree: usize,
    pub max_branch_points: usize,
    pub max_denominator: i64,
    pub max_genus: u64,
}

impl Default for RamifiedBounds {
    fn default() -> Self {
        RamifiedBounds { max_degree: 8, max_branch_points: 5, max_denominator: 12, max_genus: 2 }
    }
}

pub fn random_weight<R: Rng>(rng: &mut R, max_denominator: i64) -> ParabolicWeight {
    if rng.gen_bool(0.3) {
        return ParabolicWeight::zero();
    }
    let den = rng.gen_range(1..=max_denominator.max(1));
    ParabolicWeight::ratio(rng.gen_range(0..den), den).unwrap()
}

fn random_partition<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut parts = Vec::new();
    let mut left = n;
    while left > 0 {
        let k = if rng.gen_bool(0.4) { 1 } else { rng.gen_range(1..=left) };
        parts.push(k);
        left -= k;
    }
    parts
}

/// Profile over one point: a random partition of each component degree.
/// `force_odd[c]` requests odd ramification on component `c`.
fn random_point<R: Rng>(rng: &mut R, components: &[usize], force_odd: Option<&[bool]>, max_den: i64) -> BranchPoint {
    let mut profile = Vec::new();
    let mut component_of_sheet = Vec::new();
    for (c, &dc) in components.iter().enumerate() {
        let parts = match force_odd {
            Some(odd) if odd[c] => {
                let mut p = vec![2];
                p.extend(std::iter::repeat(1).take(dc - 2));
                p
            }
            Some(_) => vec![1; dc],
            None => random_partition(rng, dc),
        };
        component_of_sheet.extend(std::iter::repeat(c).take(parts.len()));
        profile.extend(parts);
    }
    let weights = profile.iter().map(|_| random_weight(rng, max_den)).collect();
    BranchPoint { profile, weights, component_of_sheet }
}

/// Valid ramified cover data: per-component parity repaired by one extra point,
/// and genus-zero bases that would force a negative genus retried or lifted.
pub fn random_ramified_data<R: Rng>(rng: &mut R, bounds: RamifiedBounds) -> RamifiedCoverData {
    let degree = rng.gen_range(1..=bounds.max_degree.max(1));
    let components = random_partition(rng, degree);
    let mut genus_x = rng.gen_range(0..=bounds.max_genus);
    for attempt in 0.. {
        let max_points = bounds.max_branch_points.max(1);
        let count = rng.gen_range(0..max_points);
        let mut branch_points: Vec<BranchPoint> =
            (0..count).map(|_| random_point(rng, &components, None, bounds.max_denominator)).collect();
        let parity: Vec<bool> = (0..components.len())
            .map(|c| {
                let r: usize = branch_points
                    .iter()
                    .flat_map(|bp| bp.profile.iter().zip(&bp.component_of_sheet))
                    .filter(|&(_, &k)| k == c)
                    .map(|(&b, _)| b - 1)
                    .sum();
                r % 2 == 1
            })
            .collect();
        if parity.iter().any(|&odd| odd) {
            branch_points.push(random_point(rng, &components, Some(&parity), bounds.max_denominator));
        }
        let unramified_points = (0..rng.gen_range(0..=2))
            .map(|_| (0..degree).map(|_| random_weight(rng, bounds.max_denominator)).collect())
            .collect();
        let data = RamifiedCoverData {
            genus_x,
            degree,
            component_degrees: components.clone(),
            branch_points,
            unramified_points,
        };
        if riemann_hurwitz_genus(&data).is_ok() {
            return data;
        }
        if attempt >= 8 {
            genus_x = genus_x.max(1);
        }
    }
    unreachable!()
}
