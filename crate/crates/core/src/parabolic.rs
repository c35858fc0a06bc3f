//! Parabolic structure on the direct image of a parabolic line bundle under a
//! ramified cover of curves, computed from combinatorial ramification data.
//!
//! Over a branch point with reduced fiber `y_1, ..., y_m` of multiplicities
//! `b_i`, the fiber of `f_* L` splits into pieces `V_i` of dimension `b_i`. Each
//! piece carries a complete flag `F_0 = V_i ⊃ F_1 ⊃ ... ⊃ F_{b_i} = 0` and the
//! step `F_l` has weight `(l + lambda_{y_i}) / b_i`. The filtration of the whole
//! fiber is the direct sum of the pieces, weight by weight.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Field, Scalar, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParabolicError {
    #[error("parabolic weight {0} is outside [0, 1)")]
    WeightOutOfRange(String),
    #[error("cannot parse weight {0:?}")]
    BadWeight(String),
    #[error("total dimension {found} does not match degree {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("component {component}: ramification parity makes the genus non-integral")]
    NonIntegralGenus { component: usize },
    #[error("component {component} would have negative genus")]
    NegativeGenus { component: usize },
    #[error("invalid cover data: {0}")]
    InvalidData(String),
}

/// Rational weight in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParabolicWeight(BigRational);

impl ParabolicWeight {
    pub fn new(value: BigRational) -> Result<Self, ParabolicError> {
        if value.is_negative() || value >= BigRational::one() {
            return Err(ParabolicError::WeightOutOfRange(display_rational(&value)));
        }
        Ok(ParabolicWeight(value))
    }

    pub fn zero() -> Self {
        ParabolicWeight(BigRational::zero())
    }

    pub fn ratio(num: i64, den: i64) -> Result<Self, ParabolicError> {
        if den == 0 {
            return Err(ParabolicError::BadWeight(format!("{num}/{den}")));
        }
        Self::new(BigRational::new(num.into(), den.into()))
    }

    pub fn parse(text: &str) -> Result<Self, ParabolicError> {
        let s = Field::Rationals.parse(text).map_err(|_| ParabolicError::BadWeight(text.to_string()))?;
        Self::new(s.as_rational().unwrap().clone())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for ParabolicWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", display_rational(&self.0))
    }
}

pub(crate) fn display_rational(q: &BigRational) -> String {
    Scalar::Rational(q.clone()).to_string()
}

/// One base point over which the cover ramifies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchPoint {
    /// Multiplicities `b_i` of the reduced fiber, summing to the degree.
    pub profile: Vec<usize>,
    /// Weight of `L_*` at each `y_i` (zero when `y_i` is not parabolic).
    pub weights: Vec<ParabolicWeight>,
    /// Component of `Y` containing each `y_i`.
    pub component_of_sheet: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamifiedCoverData {
    pub genus_x: u64,
    pub degree: usize,
    /// Degree of each connected component of `Y` over `X`.
    pub component_degrees: Vec<usize>,
    pub branch_points: Vec<BranchPoint>,
    /// Unramified base points where `L_*` has weights: one weight per sheet.
    pub unramified_points: Vec<Vec<ParabolicWeight>>,
}

impl RamifiedCoverData {
    pub fn validate(&self) -> Result<(), ParabolicError> {
        let bad = |m: String| Err(ParabolicError::InvalidData(m));
        if self.degree == 0 {
            return bad("degree must be positive".into());
        }
        if self.component_degrees.is_empty() || self.component_degrees.contains(&0) {
            return bad("components need positive degrees".into());
        }
        let total: usize = self.component_degrees.iter().sum();
        if total != self.degree {
            return Err(ParabolicError::DimensionMismatch { expected: self.degree, found: total });
        }
        let comps = self.component_degrees.len();
        for (i, bp) in self.branch_points.iter().enumerate() {
            if bp.profile.contains(&0) {
                return bad(format!("branch point {i}: multiplicities must be positive"));
            }
            let sum: usize = bp.profile.iter().sum();
            if sum != self.degree {
                return Err(ParabolicError::DimensionMismatch { expected: self.degree, found: sum });
            }
            if bp.weights.len() != bp.profile.len() || bp.component_of_sheet.len() != bp.profile.len() {
                return bad(format!("branch point {i}: one weight and one component per sheet"));
            }
            let mut per_comp = vec![0usize; comps];
            for (&b, &c) in bp.profile.iter().zip(&bp.component_of_sheet) {
                if c >= comps {
                    return bad(format!("branch point {i}: component {c} out of range"));
                }
                per_comp[c] += b;
            }
            if per_comp != self.component_degrees {
                return bad(format!("branch point {i}: sheets do not match component degrees"));
            }
        }
        for (i, w) in self.unramified_points.iter().enumerate() {
            if w.len() != self.degree {
                return bad(format!("unramified point {i}: expected {} weights", self.degree));
            }
        }
        for c in 0..comps {
            if self.ramification_of(c) % 2 != 0 {
                return Err(ParabolicError::NonIntegralGenus { component: c });
            }
        }
        Ok(())
    }

    /// `sum (b_y - 1)` over the ramified points of component `c`.
    fn ramification_of(&self, c: usize) -> usize {
        self.branch_points
            .iter()
            .flat_map(|bp| bp.profile.iter().zip(&bp.component_of_sheet))
            .filter(|&(_, &comp)| comp == c)
            .map(|(&b, _)| b - 1)
            .sum()
    }

    /// `sum (b_y - 1)` over all ramified points.
    pub fn total_ramification(&self) -> usize {
        self.branch_points.iter().flat_map(|bp| &bp.profile).map(|&b| b - 1).sum()
    }

    /// Sum of all weights of `L_*`.
    pub fn weight_sum(&self) -> BigRational {
        let branch = self.branch_points.iter().flat_map(|bp| &bp.weights);
        let unram = self.unramified_points.iter().flatten();
        branch.chain(unram).fold(BigRational::zero(), |acc, w| acc + w.value())
    }
}

/// Explicit flag of one ramified sheet: `F_l = span{e_l, ..., e_{b-1}}` in `k^b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalFlagModel {
    pub multiplicity: usize,
    pub lambda: ParabolicWeight,
    /// `F_0, ..., F_b`.
    pub subspaces: Vec<Subspace>,
    /// Weight of `F_l` for `l = 0..b`.
    pub weights: Vec<ParabolicWeight>,
}

pub fn local_flags(b: usize, lambda: &ParabolicWeight) -> LocalFlagModel {
    assert!(b >= 1, "multiplicity must be positive");
    let field = Field::Rationals;
    let subspaces = (0..=b)
        .map(|l| {
            let vs: Vec<Vec<Scalar>> = (l..b)
                .map(|j| (0..b).map(|i| if i == j { field.one() } else { field.zero() }).collect())
                .collect();
            Subspace::from_vectors(field, b, &vs)
        })
        .collect();
    let bq = BigRational::from_integer(BigInt::from(b));
    let weights = (0..b)
        .map(|l| {
            let w = (BigRational::from_integer(BigInt::from(l)) + lambda.value()) / &bq;
            ParabolicWeight::new(w).expect("(l + lambda) / b lies in [0, 1)")
        })
        .collect();
    LocalFlagModel { multiplicity: b, lambda: lambda.clone(), subspaces, weights }
}

/// `(weight, dimension jump)` pairs with strictly decreasing weights.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeightedFiltration(pub Vec<(ParabolicWeight, usize)>);

impl WeightedFiltration {
    pub fn total_dim(&self) -> usize {
        self.0.iter().map(|(_, j)| j).sum()
    }

    /// `sum weight * jump`.
    pub fn weight_sum(&self) -> BigRational {
        self.0
            .iter()
            .fold(BigRational::zero(), |acc, (w, j)| acc + w.value() * BigRational::from_integer(BigInt::from(*j)))
    }

    /// Only weight zero appears.
    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|(w, _)| w.is_zero())
    }

    fn from_jumps(mut jumps: Vec<ParabolicWeight>) -> Self {
        jumps.sort_by(|a, b| b.cmp(a));
        let mut out: Vec<(ParabolicWeight, usize)> = Vec::new();
        for w in jumps {
            match out.last_mut() {
                Some((last, n)) if *last == w => *n += 1,
                _ => out.push((w, 1)),
            }
        }
        WeightedFiltration(out)
    }
}

/// Sums equal-weight jumps across sheets; each unramified sheet adds its line.
pub fn merge_fiber_filtration(
    flags: &[LocalFlagModel],
    unramified: &[ParabolicWeight],
    degree: usize,
) -> Result<WeightedFiltration, ParabolicError> {
    let found = flags.iter().map(|f| f.multiplicity).sum::<usize>() + unramified.len();
    if found != degree {
        return Err(ParabolicError::DimensionMismatch { expected: degree, found });
    }
    let jumps = flags
        .iter()
        .flat_map(|f| f.weights.iter().cloned())
        .chain(unramified.iter().cloned())
        .collect();
    Ok(WeightedFiltration::from_jumps(jumps))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusReport {
    pub components: Vec<u64>,
    /// `dim H^1(Y, O_Y)`, the sum over components.
    pub total: u64,
    /// `chi(O_Y) = sum (1 - g_c)`.
    pub euler_characteristic: i64,
}

/// Per component `2g - 2 = d_c (2 g_X - 2) + sum (b_y - 1)`.
pub fn riemann_hurwitz_genus(data: &RamifiedCoverData) -> Result<GenusReport, ParabolicError> {
    data.validate()?;
    let gx = data.genus_x as i64;
    let mut components = Vec::with_capacity(data.component_degrees.len());
    for (c, &dc) in data.component_degrees.iter().enumerate() {
        let twice = dc as i64 * (2 * gx - 2) + data.ramification_of(c) as i64 + 2;
        if twice % 2 != 0 {
            return Err(ParabolicError::NonIntegralGenus { component: c });
        }
        if twice < 0 {
            return Err(ParabolicError::NegativeGenus { component: c });
        }
        components.push((twice / 2) as u64);
    }
    let total = components.iter().sum();
    let euler_characteristic = components.iter().map(|&g| 1 - g as i64).sum();
    Ok(GenusReport { components, total, euler_characteristic })
}

/// `deg f_* L = deg L + chi(O_Y) - d (1 - g_X)`, cross-checked against the
/// ramification drop `deg L - (1/2) sum (b_y - 1)`.
pub fn degree_direct_image(data: &RamifiedCoverData, deg_l: i64) -> Result<i64, ParabolicError> {
    let genus = riemann_hurwitz_genus(data)?;
    let d = data.degree as i64;
    let euler_route = deg_l + genus.euler_characteristic - d * (1 - data.genus_x as i64);
    let drop_route = deg_l - data.total_ramification() as i64 / 2;
    assert_eq!(euler_route, drop_route, "degree routes disagree");
    Ok(euler_route)
}

/// Which base point a fiber filtration sits over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum PointRef {
    Branch(usize),
    Unramified(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParabolicPoint {
    pub point: PointRef,
    pub filtration: WeightedFiltration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParabolicBundleData {
    pub degree: i64,
    pub rank: usize,
    pub points: Vec<ParabolicPoint>,
}

/// `f_* L_*`: the degree of the direct image plus one weighted filtration per
/// point of `f(R ∪ P)`. Points with only weight zero are left out.
pub fn pushforward_parabolic(data: &RamifiedCoverData, deg_l: i64) -> Result<ParabolicBundleData, ParabolicError> {
    let degree = degree_direct_image(data, deg_l)?;
    let mut points = Vec::new();
    for (i, bp) in data.branch_points.iter().enumerate() {
        let flags: Vec<LocalFlagModel> = bp.profile.iter().zip(&bp.weights).map(|(&b, w)| local_flags(b, w)).collect();
        let filtration = merge_fiber_filtration(&flags, &[], data.degree)?;
        let ramified = bp.profile.iter().any(|&b| b > 1);
        if ramified || !filtration.is_trivial() {
            points.push(ParabolicPoint { point: PointRef::Branch(i), filtration });
        }
    }
    for (i, weights) in data.unramified_points.iter().enumerate() {
        let filtration = merge_fiber_filtration(&[], weights, data.degree)?;
        if !filtration.is_trivial() {
            points.push(ParabolicPoint { point: PointRef::Unramified(i), filtration });
        }
    }
    Ok(ParabolicBundleData { degree, rank: data.degree, points })
}

/// `degree + sum over points of sum weight * jump`.
pub fn parabolic_degree(p: &ParabolicBundleData) -> BigRational {
    p.points
        .iter()
        .fold(BigRational::from_integer(BigInt::from(p.degree)), |acc, pt| acc + pt.filtration.weight_sum())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conservation {
    pub line_bundle: BigRational,
    pub direct_image: BigRational,
    pub holds: bool,
}

pub fn check_pardeg_conservation(data: &RamifiedCoverData, deg_l: i64) -> Result<Conservation, ParabolicError> {
    let pushed = pushforward_parabolic(data, deg_l)?;
    let line_bundle = BigRational::from_integer(BigInt::from(deg_l)) + data.weight_sum();
    let direct_image = parabolic_degree(&pushed);
    Ok(Conservation { holds: line_bundle == direct_image, line_bundle, direct_image })
}

/// A weight `a/b` in lowest terms is tame iff `p` does not divide `b`.
pub fn tameness_check(weights: &[ParabolicWeight], p: u64) -> Vec<bool> {
    assert!(crate::algebra::is_prime(p), "{p} is not prime");
    weights
        .iter()
        .map(|w| {
            // BigRational keeps lowest terms; zero has denominator 1.
            let den = w.value().denom();
            !den.mod_floor(&BigInt::from(p)).is_zero() || den.to_u64() == Some(1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ParabolicWeight {
        ParabolicWeight::parse(s).unwrap()
    }

    fn weights(f: &LocalFlagModel) -> Vec<String> {
        f.weights.iter().map(ToString::to_string).collect()
    }

    /// Genus-0 base, connected double cover with two simple branch points.
    pub(crate) fn p1_double_cover(lambda: &str) -> RamifiedCoverData {
        let bp = |l: &str| BranchPoint { profile: vec![2], weights: vec![w(l)], component_of_sheet: vec![0] };
        RamifiedCoverData {
            genus_x: 0,
            degree: 2,
            component_degrees: vec![2],
            branch_points: vec![bp(lambda), bp("0")],
            unramified_points: vec![],
        }
    }

    #[test]
    fn weight_range() {
        assert!(ParabolicWeight::parse("1").is_err());
        assert!(ParabolicWeight::parse("-1/2").is_err());
        assert_eq!(w("2/6").to_string(), "1/3");
    }

    #[test]
    fn local_flag_examples() {
        let f = local_flags(1, &ParabolicWeight::zero());
        assert_eq!(weights(&f), ["0"]);
        let f = local_flags(2, &ParabolicWeight::zero());
        assert_eq!(weights(&f), ["0", "1/2"]);
        assert_eq!(f.subspaces.iter().map(Subspace::dim).collect::<Vec<_>>(), [2, 1, 0]);
        assert_eq!(f.subspaces[1].basis()[0], vec![Field::Rationals.zero(), Field::Rationals.one()]);
        assert_eq!(weights(&local_flags(2, &w("1/2"))), ["1/4", "3/4"]);
        assert_eq!(weights(&local_flags(3, &w("1/2"))), ["1/6", "1/2", "5/6"]);
    }

    #[test]
    fn merge_examples() {
        let z = ParabolicWeight::zero();
        let m = merge_fiber_filtration(&[], &[z.clone(), z.clone()], 2).unwrap();
        assert_eq!(m.0, vec![(z.clone(), 2)]);

        let m = merge_fiber_filtration(&[local_flags(2, &z)], &[], 2).unwrap();
        assert_eq!(m.0, vec![(w("1/2"), 1), (z.clone(), 1)]);

        let m = merge_fiber_filtration(&[local_flags(2, &z), local_flags(2, &w("1/2"))], &[], 4).unwrap();
        assert_eq!(m.0, vec![(w("3/4"), 1), (w("1/2"), 1), (w("1/4"), 1), (z.clone(), 1)]);

        assert_eq!(
            merge_fiber_filtration(&[local_flags(2, &z)], &[], 3),
            Err(ParabolicError::DimensionMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn degree_examples() {
        let trivial = RamifiedCoverData {
            genus_x: 2,
            degree: 1,
            component_degrees: vec![1],
            branch_points: vec![],
            unramified_points: vec![],
        };
        assert_eq!(degree_direct_image(&trivial, 5).unwrap(), 5);
        assert_eq!(degree_direct_image(&p1_double_cover("0"), 0).unwrap(), -1);
        let elliptic = RamifiedCoverData { genus_x: 1, degree: 2, component_degrees: vec![2], ..trivial.clone() };
        assert_eq!(degree_direct_image(&elliptic, 0).unwrap(), 0);
        assert_eq!(riemann_hurwitz_genus(&elliptic).unwrap().components, vec![1]);
    }

    #[test]
    fn genus_examples() {
        assert_eq!(riemann_hurwitz_genus(&p1_double_cover("0")).unwrap().total, 0);
        let mut one = p1_double_cover("0");
        one.branch_points.pop();
        assert_eq!(riemann_hurwitz_genus(&one), Err(ParabolicError::NonIntegralGenus { component: 0 }));
        let unram_p1 = RamifiedCoverData {
            genus_x: 0,
            degree: 2,
            component_degrees: vec![2],
            branch_points: vec![],
            unramified_points: vec![],
        };
        assert_eq!(riemann_hurwitz_genus(&unram_p1), Err(ParabolicError::NegativeGenus { component: 0 }));
    }

    #[test]
    fn pushforward_examples() {
        let trivial = RamifiedCoverData {
            genus_x: 0,
            degree: 1,
            component_degrees: vec![1],
            branch_points: vec![],
            unramified_points: vec![],
        };
        let p = pushforward_parabolic(&trivial, 4).unwrap();
        assert_eq!((p.degree, p.points.len()), (4, 0));

        let p = pushforward_parabolic(&p1_double_cover("0"), 0).unwrap();
        assert_eq!(p.degree, -1);
        assert_eq!(p.points.len(), 2);
        for pt in &p.points {
            assert_eq!(pt.filtration.0, vec![(w("1/2"), 1), (ParabolicWeight::zero(), 1)]);
        }

        let p = pushforward_parabolic(&p1_double_cover("1/2"), 0).unwrap();
        assert_eq!(p.points[0].filtration.0, vec![(w("3/4"), 1), (w("1/4"), 1)]);
    }

    #[test]
    fn pardeg_examples() {
        let plain = ParabolicBundleData { degree: 3, rank: 2, points: vec![] };
        assert_eq!(parabolic_degree(&plain), BigRational::from_integer(3.into()));

        let p = pushforward_parabolic(&p1_double_cover("0"), 0).unwrap();
        assert!(parabolic_degree(&p).is_zero());

        let single = ParabolicBundleData {
            degree: -1,
            rank: 2,
            points: vec![ParabolicPoint {
                point: PointRef::Branch(0),
                filtration: WeightedFiltration(vec![(w("3/4"), 1), (w("1/4"), 1)]),
            }],
        };
        assert!(parabolic_degree(&single).is_zero());
    }

    #[test]
    fn conservation_examples() {
        let c = check_pardeg_conservation(&p1_double_cover("0"), 0).unwrap();
        assert!(c.holds && c.line_bundle.is_zero());
        let c = check_pardeg_conservation(&p1_double_cover("1/2"), 3).unwrap();
        assert!(c.holds);
        let unram = RamifiedCoverData {
            genus_x: 1,
            degree: 3,
            component_degrees: vec![1, 2],
            branch_points: vec![],
            unramified_points: vec![vec![ParabolicWeight::zero(); 3]],
        };
        let c = check_pardeg_conservation(&unram, 7).unwrap();
        assert!(c.holds);
        assert_eq!(c.line_bundle, BigRational::from_integer(7.into()));
    }

    #[test]
    fn tameness_examples() {
        assert_eq!(tameness_check(&[w("1/2")], 3), [true]);
        assert_eq!(tameness_check(&[w("1/3")], 3), [false]);
        assert_eq!(tameness_check(&[w("2/6")], 2), [true]);
        assert_eq!(tameness_check(&[ParabolicWeight::zero()], 2), [true]);
    }

    #[test]
    fn component_assignment_checked() {
        let mut d = p1_double_cover("0");
        d.component_degrees = vec![1, 1];
        assert!(matches!(d.validate(), Err(ParabolicError::InvalidData(_))));
    }
}
