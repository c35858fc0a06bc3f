//! Seeded randomized property suites.
//!
//! Instance `i` of a run with seed `s` draws from its own stream, so a failure
//! can be replayed from `(s, i)` alone and fanning out across threads does not
//! change any result.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::algebra::Field;
use crate::cover::{
    canonical_algebra_map, cover_report, direct_image_line_bundle, find_cover_isomorphism, roundtrip_verify,
};
use crate::generate::{
    instance_rng, random_connected_graph, random_cover, random_gauge, random_line_bundle, random_ramified_data,
    RamifiedBounds,
};
use crate::io::report::{SelftestFailure, SelftestReport};
use crate::parabolic::{check_pardeg_conservation, local_flags, merge_fiber_filtration, parabolic_degree, pushforward_parabolic};

#[derive(Debug, Clone)]
pub struct SelfTestConfig {
    pub seed: u64,
    pub count: u64,
    pub fields: Vec<Field>,
    /// Deliberately breaks one comparison to exercise failure reporting.
    pub inject_fault: bool,
}

impl SelfTestConfig {
    pub fn new(seed: u64, count: u64) -> Self {
        SelfTestConfig {
            seed,
            count,
            fields: vec![Field::Rationals, Field::prime(5).unwrap(), Field::prime(7).unwrap()],
            inject_fault: cfg!(feature = "fault-injection"),
        }
    }
}

/// Cover, line bundle and gauge drawn at random; pushing forward, regauging and
/// rebuilding the spectral cover must recover the cover and line bundle.
pub fn roundtrip_case<R: Rng>(rng: &mut R, field: Field, inject_fault: bool) -> Result<(), String> {
    let base = random_connected_graph(rng, 6, 9);
    let d = rng.gen_range(1..=6);
    let cover = random_cover(rng, base, d);
    let line = random_line_bundle(rng, &cover, field);
    let gauge = random_gauge(rng, field, d, cover.base().vertex_count());
    let e = direct_image_line_bundle(&cover, &line).regauge(&gauge);
    let a = canonical_algebra_map(&cover, &line).regauge(&gauge);
    let shape = format!(
        "{} vertices, {} edges, degree {d}, field {field}",
        cover.base().vertex_count(),
        cover.base().edge_count()
    );
    let rt = roundtrip_verify(&e, &a).map_err(|err| format!("{shape}: {err}"))?;
    if !rt.all_pass() {
        return Err(format!("{shape}: {}", rt.witnesses.join("; ")));
    }
    let expected = cover_report(&cover).components + usize::from(inject_fault);
    if rt.components != expected {
        return Err(format!("{shape}: rebuilt cover has {} components, expected {expected}", rt.components));
    }
    if find_cover_isomorphism(&cover, Some(&line), &rt.spectral.cover, Some(&rt.spectral.line_bundle)).is_none() {
        return Err(format!("{shape}: rebuilt cover or line bundle is not isomorphic to the original"));
    }
    Ok(())
}

/// Parabolic degree conservation, the local flag profile and sheet-order
/// independence of the merged filtration.
pub fn parabolic_case<R: Rng>(rng: &mut R) -> Result<(), String> {
    let data = random_ramified_data(rng, RamifiedBounds::default());
    let deg_l = rng.gen_range(-5..=5);
    let shape = format!("degree {}, {} branch points, genus {}", data.degree, data.branch_points.len(), data.genus_x);
    let c = check_pardeg_conservation(&data, deg_l).map_err(|e| format!("{shape}: {e}"))?;
    if !c.holds {
        return Err(format!("{shape}: par-deg {} vs {}", c.line_bundle, c.direct_image));
    }
    let pushed = pushforward_parabolic(&data, deg_l).map_err(|e| format!("{shape}: {e}"))?;
    if parabolic_degree(&pushed) != c.direct_image {
        return Err(format!("{shape}: parabolic degree not reproducible"));
    }
    for (i, bp) in data.branch_points.iter().enumerate() {
        let mut flags: Vec<_> = bp.profile.iter().zip(&bp.weights).map(|(&b, w)| local_flags(b, w)).collect();
        for f in &flags {
            let dims_ok = f.subspaces.iter().enumerate().all(|(l, s)| s.dim() == f.multiplicity - l);
            let increasing = f.weights.windows(2).all(|w| w[0] < w[1]);
            if !dims_ok || !increasing {
                return Err(format!("{shape}: flag profile broken at branch point {i}"));
            }
        }
        let merged = merge_fiber_filtration(&flags, &[], data.degree).map_err(|e| format!("{shape}: {e}"))?;
        flags.shuffle(rng);
        let shuffled = merge_fiber_filtration(&flags, &[], data.degree).map_err(|e| format!("{shape}: {e}"))?;
        if merged != shuffled || merged.total_dim() != data.degree {
            return Err(format!("{shape}: merged filtration depends on sheet order at branch point {i}"));
        }
    }
    Ok(())
}

pub fn run_selftest(cfg: &SelfTestConfig) -> SelftestReport {
    let fields = if cfg.fields.is_empty() { SelfTestConfig::new(0, 0).fields } else { cfg.fields.clone() };
    let failures: Vec<SelftestFailure> = (0..cfg.count)
        .into_par_iter()
        .flat_map_iter(|index| {
            let mut rng = instance_rng(cfg.seed, index);
            let field = fields[(index % fields.len() as u64) as usize];
            let roundtrip = roundtrip_case(&mut rng, field, cfg.inject_fault).err().map(|w| ("roundtrip", w));
            let parabolic = parabolic_case(&mut rng).err().map(|w| ("parabolic", w));
            roundtrip.into_iter().chain(parabolic).map(move |(suite, witness)| SelftestFailure {
                index,
                seed: cfg.seed,
                suite: suite.to_string(),
                witness,
            })
        })
        .collect();
    let mut failed_instances: Vec<u64> = failures.iter().map(|f| f.index).collect();
    failed_instances.dedup();
    let failed = failed_instances.len() as u64;
    SelftestReport {
        seed: cfg.seed,
        count: cfg.count,
        fields: fields.iter().map(ToString::to_string).collect(),
        passed: cfg.count - failed,
        failed,
        failures,
    }
}
