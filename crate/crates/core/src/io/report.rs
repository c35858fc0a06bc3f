//! Machine-readable reports and their plain-text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::parabolic::PointRef;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub result: ReportBody,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportBody {
    Classify(ClassifyReport),
    CoverBuild(CoverBuildReport),
    DirectImage(DirectImageReport),
    Parabolic(ParabolicReport),
    Factor(FactorReport),
    Selftest(SelftestReport),
    Failure(FailureReport),
}

pub type MatrixStrings = Vec<Vec<String>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub field: String,
    pub d: usize,
    pub dim: usize,
    pub status: String,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenlines: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functionals: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverBuildReport {
    pub field: String,
    pub degree: usize,
    /// One-based image lists.
    pub sigma: Vec<Vec<usize>>,
    pub scalars: Vec<Vec<String>>,
    pub eta: Vec<MatrixStrings>,
    pub components: usize,
    pub component_degrees: Vec<usize>,
    pub split: bool,
    pub flat_section_dim: usize,
    pub intertwines: bool,
    pub algebra_matches: bool,
    pub components_match: bool,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectImageReport {
    pub field: String,
    pub rank: usize,
    pub transitions: Vec<MatrixStrings>,
    pub monomial: bool,
    /// Basis of the canonical algebra at each vertex.
    pub algebra: Vec<Vec<MatrixStrings>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationStep {
    pub weight: String,
    pub jump: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointReport {
    pub point: PointRef,
    pub filtration: Vec<FiltrationStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicReport {
    pub genus_x: u64,
    pub rank: usize,
    pub genus_components: Vec<u64>,
    pub genus_total: u64,
    pub degree_line_bundle: i64,
    pub degree_direct_image: i64,
    pub points: Vec<PointReport>,
    pub pardeg_line_bundle: String,
    pub pardeg_direct_image: String,
    pub conservation: bool,
    /// Tameness of each weight, branch points first, over `GF(p)` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tame: Option<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub edge: usize,
    /// One-based image list.
    pub permutation: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockEntry {
    /// One-based labels.
    pub blocks: Vec<Vec<usize>>,
    pub block_size: usize,
    pub intermediate_degree: usize,
    pub intermediate_sigma: Vec<Vec<usize>>,
    pub consistent: bool,
    pub subbundle: bool,
    pub embedding_is_bundle_map: bool,
    pub cartan: bool,
    pub commutes_first_label: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commutes_average: Option<bool>,
    pub passes: bool,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorReport {
    pub field: String,
    pub degree: usize,
    pub max_degree: usize,
    pub monodromy: Vec<Generator>,
    pub block_systems: Vec<BlockEntry>,
    pub proper_count: usize,
    pub passing_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestFailure {
    pub index: u64,
    pub seed: u64,
    pub suite: String,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub count: u64,
    pub fields: Vec<String>,
    pub passed: u64,
    pub failed: u64,
    pub failures: Vec<SelftestFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureReport {
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Report {
    pub fn to_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_machine(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let status = match self.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Error => "error",
        };
        let _ = writeln!(out, "{}: {status}", self.command);
        match &self.result {
            ReportBody::Classify(r) => render_classify(&mut out, r),
            ReportBody::CoverBuild(r) => render_cover_build(&mut out, r),
            ReportBody::DirectImage(r) => render_direct_image(&mut out, r),
            ReportBody::Parabolic(r) => render_parabolic(&mut out, r),
            ReportBody::Factor(r) => render_factor(&mut out, r),
            ReportBody::Selftest(r) => render_selftest(&mut out, r),
            ReportBody::Failure(r) => {
                let _ = writeln!(out, "{}: {}", r.error, r.message);
                if let Some(w) = &r.witness {
                    let _ = writeln!(out, "witness: {w}");
                }
            }
        }
        out
    }
}

fn row(v: &[String]) -> String {
    format!("[{}]", v.join(", "))
}

fn matrix(m: &MatrixStrings) -> String {
    format!("[{}]", m.iter().map(|r| row(r)).collect::<Vec<_>>().join(", "))
}

fn perm(p: &[usize]) -> String {
    format!("[{}]", p.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
}

fn render_classify(out: &mut String, r: &ClassifyReport) {
    let _ = writeln!(out, "field {}, d = {}, dim = {}", r.field, r.d, r.dim);
    let _ = writeln!(out, "{}", r.verdict);
    if let (Some(lines), Some(mus)) = (&r.eigenlines, &r.functionals) {
        for (t, (l, mu)) in lines.iter().zip(mus).enumerate() {
            let _ = writeln!(out, "  line {}: {}  mu = {}", t + 1, row(l), row(mu));
        }
    }
}

fn render_cover_build(out: &mut String, r: &CoverBuildReport) {
    let _ = writeln!(out, "field {}, degree {}", r.field, r.degree);
    for (e, (s, l)) in r.sigma.iter().zip(&r.scalars).enumerate() {
        let _ = writeln!(out, "  edge {e}: sigma {}  scalars {}", perm(s), row(l));
    }
    for (v, m) in r.eta.iter().enumerate() {
        let _ = writeln!(out, "  eta at vertex {v}: {}", matrix(m));
    }
    let _ = writeln!(out, "components {} {:?}, split {}", r.components, r.component_degrees, r.split);
    let _ = writeln!(out, "flat sections of the algebra bundle: {}", r.flat_section_dim);
    let _ = writeln!(
        out,
        "intertwines {}, algebra matches {}, components match {}",
        r.intertwines, r.algebra_matches, r.components_match
    );
    for w in &r.witnesses {
        let _ = writeln!(out, "witness: {w}");
    }
}

fn render_direct_image(out: &mut String, r: &DirectImageReport) {
    let _ = writeln!(out, "field {}, rank {}, monomial {}", r.field, r.rank, r.monomial);
    for (e, m) in r.transitions.iter().enumerate() {
        let _ = writeln!(out, "  T_{e} = {}", matrix(m));
    }
    let _ = writeln!(out, "canonical algebra: diagonal in the label basis ({} generators)", r.algebra.first().map_or(0, Vec::len));
}

fn render_parabolic(out: &mut String, r: &ParabolicReport) {
    let _ = writeln!(out, "base genus {}, rank {}, cover genera {:?} (total {})", r.genus_x, r.rank, r.genus_components, r.genus_total);
    let _ = writeln!(out, "deg L = {}, deg f_*L = {}", r.degree_line_bundle, r.degree_direct_image);
    for p in &r.points {
        let name = match p.point {
            PointRef::Branch(i) => format!("branch point {i}"),
            PointRef::Unramified(i) => format!("unramified point {i}"),
        };
        let steps: Vec<String> = p.filtration.iter().map(|s| format!("({}, {})", s.weight, s.jump)).collect();
        let _ = writeln!(out, "  {name}: {}", steps.join(" "));
    }
    let _ = writeln!(
        out,
        "par-deg L = {}, par-deg f_*L = {}, conserved {}",
        r.pardeg_line_bundle, r.pardeg_direct_image, r.conservation
    );
    if let Some(t) = &r.tame {
        let _ = writeln!(out, "tame weights: {}/{}", t.iter().filter(|&&x| x).count(), t.len());
    }
}

fn render_factor(out: &mut String, r: &FactorReport) {
    let _ = writeln!(out, "field {}, degree {}", r.field, r.degree);
    for g in &r.monodromy {
        let _ = writeln!(out, "  monodromy on edge {}: {}", g.edge, perm(&g.permutation));
    }
    for b in &r.block_systems {
        let blocks: Vec<String> = b.blocks.iter().map(|x| perm(x)).collect();
        let _ = writeln!(
            out,
            "  blocks {} -> intermediate degree {}, summand check {}",
            blocks.join(" "),
            b.intermediate_degree,
            b.passes
        );
        for w in &b.witnesses {
            let _ = writeln!(out, "    witness: {w}");
        }
    }
    let _ = writeln!(out, "proper block systems {}, passing summands {}", r.proper_count, r.passing_count);
}

fn render_selftest(out: &mut String, r: &SelftestReport) {
    let _ = writeln!(out, "seed {}, {} instances over {}", r.seed, r.count, r.fields.join(", "));
    let _ = writeln!(out, "passed {}, failed {}", r.passed, r.failed);
    for f in &r.failures {
        let _ = writeln!(out, "  instance {} (seed {}, {}): {}", f.index, f.seed, f.suite, f.witness);
    }
}
