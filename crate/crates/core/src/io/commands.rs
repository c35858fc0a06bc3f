use super::instance::{Instance, InstanceFile};
use super::report::*;
use super::{Exit, IoError};
use crate::algebra::{Field, Matrix, Scalar};
use crate::bundle::BundleError;
use crate::cartan::{classify_subspace, simultaneous_eigenlines, CartanVerdict, NotCartanReason};
use crate::cover::{canonical_algebra_map, cover_report, direct_image_line_bundle, roundtrip_verify, CoverError};
use crate::factor::{
    block_systems_bounded, intermediate_cover, monodromy_generators, summand_embedding_check, FactorError,
    MAX_BLOCK_DEGREE,
};
use crate::parabolic::{
    check_pardeg_conservation, parabolic_degree, pushforward_parabolic, riemann_hurwitz_genus, tameness_check,
    ParabolicError,
};
use crate::selftest::{run_selftest, SelfTestConfig};

#[derive(Debug, Clone)]
pub struct Options {
    /// Replaces the field declared in the instance.
    pub field: Option<Field>,
    pub max_degree: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { field: None, max_degree: MAX_BLOCK_DEGREE }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub report: Report,
    pub exit: Exit,
}

impl Outcome {
    fn new(command: &str, pass: bool, result: ReportBody) -> Self {
        let (status, exit) = if pass { (Status::Pass, Exit::Pass) } else { (Status::Fail, Exit::Fail) };
        Outcome { report: Report { command: command.to_string(), status, result }, exit }
    }
}

/// Report for an input error; exit status 2.
pub fn error_outcome(command: &str, err: &IoError) -> Outcome {
    Outcome {
        report: Report {
            command: command.to_string(),
            status: Status::Error,
            result: ReportBody::Failure(FailureReport {
                error: err.name().to_string(),
                message: err.to_string(),
                vertex: None,
                edge: None,
                witness: None,
            }),
        },
        exit: Exit::InputError,
    }
}

fn strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn matrix_strings(m: &Matrix) -> MatrixStrings {
    m.to_rows().iter().map(|r| strings(r)).collect()
}

fn one_based(p: &[usize]) -> Vec<usize> {
    p.iter().map(|t| t + 1).collect()
}

fn wrong_kind(command: &str, expected: &str, inst: &InstanceFile) -> IoError {
    IoError::WrongKind { command: command.into(), expected: expected.into(), found: inst.payload.kind().into() }
}

fn verdict_witness(v: &CartanVerdict) -> Option<String> {
    match v {
        CartanVerdict::Split => None,
        CartanVerdict::NonSplit { witness, .. } => Some(witness.to_string()),
        CartanVerdict::NotCartan(NotCartanReason::NotDiagonalizable { min_poly, .. }) => Some(min_poly.to_string()),
        CartanVerdict::NotCartan(_) => None,
    }
}

pub fn cmd_classify(inst: &InstanceFile, opts: &Options) -> Result<Outcome, IoError> {
    let Instance::Cartan { d, algebra } = inst.resolve(opts.field)? else {
        return Err(wrong_kind("classify", "cartan", inst));
    };
    let verdict = classify_subspace(&algebra, d).map_err(|e| IoError::InvalidInstance(e.to_string()))?;
    let lines = match verdict {
        CartanVerdict::Split => Some(simultaneous_eigenlines(&algebra).expect("split Cartan has eigenlines")),
        _ => None,
    };
    let body = ClassifyReport {
        field: algebra.field().to_string(),
        d,
        dim: algebra.dim(),
        status: format!("{:?}", verdict.status()),
        verdict: verdict.to_string(),
        witness: verdict_witness(&verdict),
        eigenlines: lines.as_ref().map(|l| l.lines.iter().map(|v| strings(v)).collect()),
        functionals: lines.as_ref().map(|l| l.functionals.iter().map(|v| strings(v)).collect()),
    };
    Ok(Outcome::new("classify", true, ReportBody::Classify(body)))
}

/// Mathematical failure of a cover build, or `None` for malformed input.
fn cover_failure(err: &CoverError) -> Option<FailureReport> {
    let base = |error: &str| FailureReport {
        error: error.to_string(),
        message: err.to_string(),
        vertex: None,
        edge: None,
        witness: None,
    };
    match err {
        CoverError::Bundle(BundleError::NotCartanAtVertex { vertex, verdict }) => {
            Some(FailureReport { vertex: Some(*vertex), witness: verdict_witness(verdict), ..base("NotCartanAtVertex") })
        }
        CoverError::Bundle(BundleError::NonSplitAtVertex { vertex, witness }) => Some(FailureReport {
            vertex: Some(*vertex),
            witness: Some(witness.to_string()),
            ..base("NonSplitAtVertex")
        }),
        CoverError::Bundle(BundleError::IncompatibleEdge(e)) => {
            Some(FailureReport { edge: Some(*e), ..base("IncompatibleEdge") })
        }
        CoverError::LineNotMapped { edge, .. } => Some(FailureReport { edge: Some(*edge), ..base("LineNotMapped") }),
        CoverError::NotIntertwining(e) => Some(FailureReport { edge: Some(*e), ..base("NotIntertwining") }),
        _ => None,
    }
}

pub fn cmd_cover_build(inst: &InstanceFile, opts: &Options) -> Result<Outcome, IoError> {
    let Instance::Bundle { bundle, algebras } = inst.resolve(opts.field)? else {
        return Err(wrong_kind("cover-build", "bundle", inst));
    };
    let algebras = algebras.ok_or_else(|| IoError::InvalidInstance("cover-build needs cartan_bundle".into()))?;
    let rt = match roundtrip_verify(&bundle, &algebras) {
        Ok(rt) => rt,
        Err(err) => {
            return match cover_failure(&err) {
                Some(f) => Ok(Outcome::new("cover-build", false, ReportBody::Failure(f))),
                None => Err(IoError::InvalidInstance(err.to_string())),
            }
        }
    };
    let sc = &rt.spectral;
    let report = cover_report(&sc.cover);
    let body = CoverBuildReport {
        field: bundle.field().to_string(),
        degree: sc.cover.degree(),
        sigma: sc.cover.sigmas().iter().map(|s| one_based(s)).collect(),
        scalars: sc.line_bundle.scalars().iter().map(|r| strings(r)).collect(),
        eta: sc.eta.iter().map(matrix_strings).collect(),
        components: report.components,
        component_degrees: report.component_degrees,
        split: report.split,
        flat_section_dim: rt.flat_section_dim,
        intertwines: rt.intertwines,
        algebra_matches: rt.algebra_matches,
        components_match: rt.components_match,
        witnesses: rt.witnesses.clone(),
    };
    Ok(Outcome::new("cover-build", rt.all_pass(), ReportBody::CoverBuild(body)))
}

fn parabolic_input(e: ParabolicError) -> IoError {
    IoError::InvalidInstance(e.to_string())
}

pub fn cmd_pushforward(inst: &InstanceFile, opts: &Options) -> Result<Outcome, IoError> {
    match inst.resolve(opts.field)? {
        Instance::Cover { cover, line_bundle } => {
            let pushed = direct_image_line_bundle(&cover, &line_bundle);
            let algebra = canonical_algebra_map(&cover, &line_bundle);
            let body = DirectImageReport {
                field: line_bundle.field().to_string(),
                rank: pushed.rank(),
                transitions: pushed.transitions().iter().map(matrix_strings).collect(),
                monomial: pushed.transitions().iter().all(Matrix::is_monomial),
                algebra: algebra.algebras.iter().map(|a| a.basis().iter().map(matrix_strings).collect()).collect(),
            };
            let pass = body.monomial;
            Ok(Outcome::new("pushforward", pass, ReportBody::DirectImage(body)))
        }
        Instance::Parabolic { field, data, deg_l } => {
            let genus = riemann_hurwitz_genus(&data).map_err(parabolic_input)?;
            let pushed = pushforward_parabolic(&data, deg_l).map_err(parabolic_input)?;
            let conservation = check_pardeg_conservation(&data, deg_l).map_err(parabolic_input)?;
            debug_assert_eq!(parabolic_degree(&pushed), conservation.direct_image);
            let tame = (field != Field::Rationals).then(|| {
                let weights: Vec<_> = data
                    .branch_points
                    .iter()
                    .flat_map(|bp| bp.weights.iter().cloned())
                    .chain(data.unramified_points.iter().flatten().cloned())
                    .collect();
                tameness_check(&weights, field.characteristic())
            });
            let points = pushed
                .points
                .iter()
                .map(|p| PointReport {
                    point: p.point,
                    filtration: p
                        .filtration
                        .0
                        .iter()
                        .map(|(w, j)| FiltrationStep { weight: w.to_string(), jump: *j })
                        .collect(),
                })
                .collect();
            let body = ParabolicReport {
                genus_x: data.genus_x,
                rank: pushed.rank,
                genus_components: genus.components,
                genus_total: genus.total,
                degree_line_bundle: deg_l,
                degree_direct_image: pushed.degree,
                points,
                pardeg_line_bundle: Scalar::Rational(conservation.line_bundle.clone()).to_string(),
                pardeg_direct_image: Scalar::Rational(conservation.direct_image.clone()).to_string(),
                conservation: conservation.holds,
                tame,
            };
            Ok(Outcome::new("pushforward", conservation.holds, ReportBody::Parabolic(body)))
        }
        _ => Err(wrong_kind("pushforward", "cover or parabolic", inst)),
    }
}

pub fn cmd_factor(inst: &InstanceFile, opts: &Options) -> Result<Outcome, IoError> {
    if opts.max_degree > MAX_BLOCK_DEGREE {
        return Err(IoError::Usage(format!("--max-degree may not exceed {MAX_BLOCK_DEGREE}")));
    }
    let Instance::Cover { cover, line_bundle } = inst.resolve(opts.field)? else {
        return Err(wrong_kind("factor", "cover", inst));
    };
    let field = line_bundle.field();
    let factor_err = |e: FactorError| match e {
        FactorError::DegreeTooLarge { degree, max } => IoError::DegreeTooLarge { degree, max },
        other => IoError::InvalidInstance(other.to_string()),
    };
    let mono = monodromy_generators(&cover);
    let systems = block_systems_bounded(&mono, opts.max_degree).map_err(factor_err)?;
    let mut entries = Vec::with_capacity(systems.proper.len());
    for b in &systems.proper {
        let z = intermediate_cover(&cover, b).map_err(factor_err)?;
        let check = summand_embedding_check(&cover, b, field);
        entries.push(BlockEntry {
            blocks: b.blocks().iter().map(|x| one_based(x)).collect(),
            block_size: b.block_size(),
            intermediate_degree: z.z.degree(),
            intermediate_sigma: z.z.sigmas().iter().map(|s| one_based(s)).collect(),
            consistent: z.consistent,
            subbundle: check.subbundle,
            embedding_is_bundle_map: check.embedding_is_bundle_map,
            cartan: check.cartan,
            commutes_first_label: check.commutes_first_label,
            commutes_average: check.commutes_average,
            passes: check.passes() && z.consistent,
            witnesses: check.witnesses.clone(),
        });
    }
    let passing_count = entries.iter().filter(|e| e.passes).count();
    let body = FactorReport {
        field: field.to_string(),
        degree: cover.degree(),
        max_degree: opts.max_degree,
        monodromy: mono.generators.iter().map(|(e, p)| Generator { edge: *e, permutation: one_based(p) }).collect(),
        proper_count: entries.len(),
        passing_count,
        block_systems: entries,
    };
    let pass = body.proper_count == body.passing_count;
    Ok(Outcome::new("factor", pass, ReportBody::Factor(body)))
}

pub fn cmd_selftest(cfg: &SelfTestConfig) -> Outcome {
    let report = run_selftest(cfg);
    let pass = report.failed == 0;
    Outcome::new("selftest", pass, ReportBody::Selftest(report))
}
