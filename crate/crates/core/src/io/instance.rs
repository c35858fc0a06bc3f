//! JSON instance files. Fiber labels are written `1..d`; vertices, edges and
//! components are indexed from zero.

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::algebra::{Field, Matrix, MatrixSubspace, Scalar};
use crate::bundle::{BundleError, BundleRep, SubalgebraBundle};
use crate::cover::{CoverError, CoverRep, LineBundleOnCover};
use crate::graph::BaseGraph;
use crate::parabolic::{BranchPoint, ParabolicWeight, RamifiedCoverData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind")]
pub enum FieldSpec {
    #[default]
    Q,
    Fp {
        p: u64,
    },
}

impl FieldSpec {
    pub fn to_field(self) -> Result<Field, IoError> {
        match self {
            FieldSpec::Q => Ok(Field::Rationals),
            FieldSpec::Fp { p } => Field::prime(p).map_err(|e| IoError::parse("field.p", e.to_string())),
        }
    }

    pub fn from_field(field: Field) -> Self {
        match field {
            Field::Rationals => FieldSpec::Q,
            Field::Prime(p) => FieldSpec::Fp { p: p.get() },
        }
    }
}

/// A scalar written either as a string (`"a"`, `"a/b"`) or a bare integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarText {
    Text(String),
    Int(i64),
}

impl ScalarText {
    pub fn from_scalar(s: &Scalar) -> Self {
        ScalarText::Text(s.to_string())
    }

    fn text(&self) -> String {
        match self {
            ScalarText::Text(s) => s.clone(),
            ScalarText::Int(n) => n.to_string(),
        }
    }

    fn resolve(&self, field: Field, path: &str) -> Result<Scalar, IoError> {
        field.parse(&self.text()).map_err(|e| IoError::parse(path, e.to_string()))
    }
}

pub type MatrixText = Vec<Vec<ScalarText>>;

pub fn matrix_text(m: &Matrix) -> MatrixText {
    m.to_rows().iter().map(|r| r.iter().map(ScalarText::from_scalar).collect()).collect()
}

fn resolve_matrix(m: &MatrixText, field: Field, n: usize, path: &str) -> Result<Matrix, IoError> {
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(IoError::parse(path, format!("expected a {n}x{n} matrix")));
    }
    let rows = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter().enumerate().map(|(j, x)| x.resolve(field, &format!("{path}[{i}][{j}]"))).collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Matrix::from_rows(field, rows).map_err(|e| IoError::parse(path, e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphSpec {
    pub fn from_graph(g: &BaseGraph) -> Self {
        GraphSpec { vertices: g.vertex_count(), edges: g.edges().iter().map(|&(u, v)| [u, v]).collect() }
    }

    fn resolve(&self) -> Result<BaseGraph, IoError> {
        let edges = self.edges.iter().map(|&[u, v]| (u, v)).collect();
        BaseGraph::new(self.vertices, edges).map_err(|e| IoError::parse("graph", e.to_string()))
    }
}

/// Component of the cover, described by its degree over the base.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComponentSpec {
    Degree(usize),
    Described { degree: usize },
}

impl ComponentSpec {
    fn degree(&self) -> usize {
        match self {
            ComponentSpec::Degree(d) | ComponentSpec::Described { degree: d } => *d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchSpec {
    #[serde(alias = "profile")]
    pub profiles: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<ScalarText>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub component_of_sheet: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Payload {
    Cartan {
        d: usize,
        basis: Vec<MatrixText>,
    },
    Bundle {
        graph: GraphSpec,
        rank: usize,
        transitions: Vec<MatrixText>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cartan_bundle: Option<Vec<Vec<MatrixText>>>,
    },
    Cover {
        graph: GraphSpec,
        degree: usize,
        sigma: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scalars: Option<Vec<Vec<ScalarText>>>,
    },
    Parabolic {
        #[serde(rename = "gX")]
        genus_x: u64,
        degree: usize,
        components: Vec<ComponentSpec>,
        #[serde(default)]
        branch_points: Vec<BranchSpec>,
        #[serde(default)]
        unramified_weights: Vec<Vec<ScalarText>>,
        #[serde(rename = "degL", default)]
        deg_l: i64,
    },
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Cartan { .. } => "cartan",
            Payload::Bundle { .. } => "bundle",
            Payload::Cover { .. } => "cover",
            Payload::Parabolic { .. } => "parabolic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default)]
    pub field: FieldSpec,
    #[serde(flatten)]
    pub payload: Payload,
}

/// A parsed instance with every scalar resolved in its field.
#[derive(Debug, Clone)]
pub enum Instance {
    Cartan { d: usize, algebra: MatrixSubspace },
    Bundle { bundle: BundleRep, algebras: Option<SubalgebraBundle> },
    Cover { cover: CoverRep, line_bundle: LineBundleOnCover },
    Parabolic { field: Field, data: RamifiedCoverData, deg_l: i64 },
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self, IoError> {
        serde_json::from_str(text).map_err(IoError::from_json)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn cartan(field: Field, d: usize, basis: &[Matrix]) -> Self {
        InstanceFile {
            field: FieldSpec::from_field(field),
            payload: Payload::Cartan { d, basis: basis.iter().map(matrix_text).collect() },
        }
    }

    pub fn bundle(bundle: &BundleRep, algebras: Option<&SubalgebraBundle>) -> Self {
        let cartan_bundle =
            algebras.map(|a| a.algebras.iter().map(|alg| alg.basis().iter().map(matrix_text).collect()).collect());
        InstanceFile {
            field: FieldSpec::from_field(bundle.field()),
            payload: Payload::Bundle {
                graph: GraphSpec::from_graph(bundle.base()),
                rank: bundle.rank(),
                transitions: bundle.transitions().iter().map(matrix_text).collect(),
                cartan_bundle,
            },
        }
    }

    pub fn cover(cover: &CoverRep, line_bundle: Option<&LineBundleOnCover>, field: Field) -> Self {
        InstanceFile {
            field: FieldSpec::from_field(field),
            payload: Payload::Cover {
                graph: GraphSpec::from_graph(cover.base()),
                degree: cover.degree(),
                sigma: cover.sigmas().iter().map(|s| s.iter().map(|t| t + 1).collect()).collect(),
                scalars: line_bundle
                    .map(|l| l.scalars().iter().map(|r| r.iter().map(ScalarText::from_scalar).collect()).collect()),
            },
        }
    }

    pub fn parabolic(field: Field, data: &RamifiedCoverData, deg_l: i64) -> Self {
        let weight = |w: &ParabolicWeight| ScalarText::Text(w.to_string());
        InstanceFile {
            field: FieldSpec::from_field(field),
            payload: Payload::Parabolic {
                genus_x: data.genus_x,
                degree: data.degree,
                components: data.component_degrees.iter().map(|&d| ComponentSpec::Degree(d)).collect(),
                branch_points: data
                    .branch_points
                    .iter()
                    .map(|bp| BranchSpec {
                        profiles: bp.profile.clone(),
                        weights: bp.weights.iter().map(weight).collect(),
                        component_of_sheet: bp.component_of_sheet.clone(),
                    })
                    .collect(),
                unramified_weights: data.unramified_points.iter().map(|ws| ws.iter().map(weight).collect()).collect(),
                deg_l,
            },
        }
    }

    /// Resolves every scalar, using `field_override` in place of the declared field when given.
    pub fn resolve(&self, field_override: Option<Field>) -> Result<Instance, IoError> {
        let field = match field_override {
            Some(f) => f,
            None => self.field.to_field()?,
        };
        match &self.payload {
            Payload::Cartan { d, basis } => {
                let ms = basis
                    .iter()
                    .enumerate()
                    .map(|(i, m)| resolve_matrix(m, field, *d, &format!("basis[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let algebra = MatrixSubspace::new(field, *d, &ms).map_err(|e| IoError::parse("basis", e.to_string()))?;
                Ok(Instance::Cartan { d: *d, algebra })
            }
            Payload::Bundle { graph, rank, transitions, cartan_bundle } => {
                let base = graph.resolve()?;
                let ts = transitions
                    .iter()
                    .enumerate()
                    .map(|(e, m)| resolve_matrix(m, field, *rank, &format!("transitions[{e}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let bundle = BundleRep::new(base, field, *rank, ts).map_err(|e| bundle_input_error("transitions", e))?;
                let algebras = cartan_bundle
                    .as_ref()
                    .map(|per_vertex| {
                        per_vertex
                            .iter()
                            .enumerate()
                            .map(|(v, basis)| {
                                let ms = basis
                                    .iter()
                                    .enumerate()
                                    .map(|(i, m)| resolve_matrix(m, field, *rank, &format!("cartan_bundle[{v}][{i}]")))
                                    .collect::<Result<Vec<_>, _>>()?;
                                MatrixSubspace::new(field, *rank, &ms)
                                    .map_err(|e| IoError::parse(format!("cartan_bundle[{v}]"), e.to_string()))
                            })
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .transpose()?
                    .map(|algebras| SubalgebraBundle { algebras });
                Ok(Instance::Bundle { bundle, algebras })
            }
            Payload::Cover { graph, degree, sigma, scalars } => {
                let base = graph.resolve()?;
                let mut zero_based = Vec::with_capacity(sigma.len());
                for (e, s) in sigma.iter().enumerate() {
                    let perm = s
                        .iter()
                        .map(|&t| t.checked_sub(1).ok_or_else(|| IoError::parse(format!("sigma[{e}]"), "labels start at 1")))
                        .collect::<Result<Vec<_>, _>>()?;
                    zero_based.push(perm);
                }
                let cover = CoverRep::new(base, *degree, zero_based).map_err(|e| cover_input_error("sigma", e))?;
                let line_bundle = match scalars {
                    None => LineBundleOnCover::trivial(&cover, field),
                    Some(rows) => {
                        let resolved = rows
                            .iter()
                            .enumerate()
                            .map(|(e, r)| {
                                r.iter()
                                    .enumerate()
                                    .map(|(t, x)| x.resolve(field, &format!("scalars[{e}][{t}]")))
                                    .collect::<Result<Vec<_>, _>>()
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        LineBundleOnCover::new(&cover, field, resolved).map_err(|e| cover_input_error("scalars", e))?
                    }
                };
                Ok(Instance::Cover { cover, line_bundle })
            }
            Payload::Parabolic { genus_x, degree, components, branch_points, unramified_weights, deg_l } => {
                let weights = |ws: &[ScalarText], n: usize, path: String| -> Result<Vec<ParabolicWeight>, IoError> {
                    if ws.is_empty() {
                        return Ok(vec![ParabolicWeight::zero(); n]);
                    }
                    ws.iter()
                        .enumerate()
                        .map(|(i, w)| {
                            ParabolicWeight::parse(&w.text()).map_err(|e| IoError::parse(format!("{path}[{i}]"), e.to_string()))
                        })
                        .collect()
                };
                let component_degrees: Vec<usize> = components.iter().map(ComponentSpec::degree).collect();
                let mut bps = Vec::with_capacity(branch_points.len());
                for (i, bp) in branch_points.iter().enumerate() {
                    let n = bp.profiles.len();
                    let component_of_sheet = if bp.component_of_sheet.is_empty() && component_degrees.len() == 1 {
                        vec![0; n]
                    } else {
                        bp.component_of_sheet.clone()
                    };
                    bps.push(BranchPoint {
                        profile: bp.profiles.clone(),
                        weights: weights(&bp.weights, n, format!("branch_points[{i}].weights"))?,
                        component_of_sheet,
                    });
                }
                let unramified_points = unramified_weights
                    .iter()
                    .enumerate()
                    .map(|(i, ws)| weights(ws, *degree, format!("unramified_weights[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let data = RamifiedCoverData {
                    genus_x: *genus_x,
                    degree: *degree,
                    component_degrees,
                    branch_points: bps,
                    unramified_points,
                };
                Ok(Instance::Parabolic { field, data, deg_l: *deg_l })
            }
        }
    }
}

fn bundle_input_error(path: &str, e: BundleError) -> IoError {
    IoError::parse(path, e.to_string())
}

fn cover_input_error(path: &str, e: CoverError) -> IoError {
    IoError::parse(path, e.to_string())
}
