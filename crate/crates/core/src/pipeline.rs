//! The end-to-end pipeline: census, spread, frames, partition, group, and
//! re-verification of supplied artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::autgroup::{self, BlockAction, ExtensionReport, OneBlockReport, StabilizerSearch};
use crate::cert::Certificate;
use crate::error::{Error, Result};
use crate::f2::{self, F2Geometry, SpaceClass};
use crate::frames::{self, FrameArray};
use crate::io::{self, ArtifactKind, GeneratorRecord};
use crate::lattice::{Lattice, Shells};
use crate::norm4::{self, Norm4Partition};
use crate::spread::{self, Spread};

/// Shells and mod-2 geometry of the lattice, computed once.
#[derive(Clone, Debug)]
pub struct Context {
    pub shells: Shells,
    pub geom: F2Geometry,
}

impl Context {
    pub fn new(lattice: Lattice) -> Result<Context> {
        let shells = Shells::new(lattice)?;
        if !shells.has_e8_shells() {
            return Err(Error::verify(
                "lattice",
                format!("shells have {} roots and {} norm-4 vectors, not 240 and 2160", shells.roots.len(), shells.norm4.len()),
            ));
        }
        let geom = F2Geometry::new(&shells)?;
        Ok(Context { shells, geom })
    }

    pub fn e8() -> Result<Context> {
        Context::new(Lattice::e8())
    }
}

fn timed<T>(f: impl FnOnce() -> Result<(T, Certificate)>) -> Result<(T, Certificate)> {
    let start = Instant::now();
    let (value, mut cert) = f()?;
    cert.wall_time_ms = start.elapsed().as_millis();
    Ok((value, cert))
}

fn require(cert: Certificate) -> Result<Certificate> {
    match cert.first_failure() {
        None => Ok(cert),
        Some(c) => Err(Error::Verification {
            stage: "certificate",
            check: format!("{}: {}: expected {}, actual {}", cert.stage, c.description, c.expected, c.actual),
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub roots: usize,
    pub root_pairs: usize,
    pub norm4: usize,
    pub isotropic_points: usize,
    pub anisotropic_points: usize,
    /// Distinct values of the number of roots over an anisotropic class.
    pub roots_per_anisotropic: Vec<usize>,
    /// Distinct values of the number of norm-4 vectors over an isotropic class.
    pub norm4_per_isotropic: Vec<usize>,
    pub isotropic_4spaces: usize,
    pub class_a: usize,
    pub class_b: usize,
    /// Intersection dimensions of the first class-A space with the others.
    pub single_profile: BTreeMap<usize, usize>,
    /// Pairs of intersection dimensions with a disjoint pair of class-A
    /// spaces, keyed `"d1,d2"`.
    pub double_profile: BTreeMap<String, usize>,
}

/// Counts every basic invariant of the lattice and its mod-2 geometry,
/// without assuming any of them.
pub fn census(lattice: &Lattice) -> Result<(Census, Certificate)> {
    timed(|| {
        let shells = Shells::new(lattice.clone())?;
        let forms = f2::build_forms(lattice)?;
        let mut per_aniso = std::collections::BTreeSet::new();
        let mut per_iso = std::collections::BTreeSet::new();
        for x in f2::F2Vector::all().filter(|x| !x.is_zero()) {
            let roots = shells.roots.iter().filter(|r| f2::reduce_mod2(r) == x).count();
            let n4 = shells.norm4.iter().filter(|v| f2::reduce_mod2(v) == x).count();
            if forms.is_isotropic_point(x) {
                per_iso.insert(n4);
            } else {
                per_aniso.insert(roots);
            }
        }
        let spaces = f2::enumerate_isotropic_4spaces(&forms);
        let classes = f2::classify(&spaces)?;
        let a = classes.members(SpaceClass::A);
        let (single, double) = match a.first() {
            Some(v1) => {
                let single = f2::intersection_profile(v1, &a);
                let double = match a.iter().find(|u| v1.intersection_dim(u) == 0) {
                    Some(v2) => f2::double_profile(v1, v2, &a)?
                        .into_iter()
                        .map(|((d1, d2), n)| (format!("{d1},{d2}"), n))
                        .collect(),
                    None => BTreeMap::new(),
                };
                (single, double)
            }
            None => (BTreeMap::new(), BTreeMap::new()),
        };
        let c = Census {
            roots: shells.roots.len(),
            root_pairs: shells.pairs.len(),
            norm4: shells.norm4.len(),
            isotropic_points: forms.isotropic_points().len(),
            anisotropic_points: forms.anisotropic_points().len(),
            roots_per_anisotropic: per_aniso.into_iter().collect(),
            norm4_per_isotropic: per_iso.into_iter().collect(),
            isotropic_4spaces: spaces.len(),
            class_a: a.len(),
            class_b: classes.members(SpaceClass::B).len(),
            single_profile: single,
            double_profile: double,
        };
        let mut cert = Certificate::new("census");
        cert.check("Gram determinant", 1, lattice.determinant());
        cert.check("norm-2 vectors", 240, c.roots);
        cert.check("norm-4 vectors", 2160, c.norm4);
        cert.check("isotropic points", 135, c.isotropic_points);
        cert.check("anisotropic points", 120, c.anisotropic_points);
        cert.check("roots per anisotropic class", "2".to_string(), join(&c.roots_per_anisotropic));
        cert.check("norm-4 vectors per isotropic class", "16".to_string(), join(&c.norm4_per_isotropic));
        cert.check("totally isotropic 4-spaces", 270, c.isotropic_4spaces);
        cert.check("class A", 135, c.class_a);
        cert.check("class B", 135, c.class_b);
        cert.check("profile of one space", "0:64 2:70".to_string(), histogram(&c.single_profile));
        cert.check(
            "profile of a disjoint pair",
            "0,0:28 0,2:35 2,0:35 2,2:35".to_string(),
            histogram(&c.double_profile),
        );
        Ok((c, cert))
    })
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn histogram<K: std::fmt::Display>(h: &BTreeMap<K, usize>) -> String {
    h.iter().map(|(k, n)| format!("{k}:{n}")).collect::<Vec<_>>().join(" ")
}

pub fn spread_stage(ctx: &Context, class: SpaceClass) -> Result<(Spread, Certificate)> {
    timed(|| {
        let s = spread::find_spread(class, &ctx.geom.members(class))?;
        let cert = spread::verify_spread(&s, &ctx.geom)?;
        Ok((s, cert))
    })
}

/// Census checks on a frame array beyond its structural verification.
pub fn frame_census(arr: &FrameArray, shells: &Shells) -> Certificate {
    let census = frames::orthogonal_pair_census(arr, shells);
    let mut cert = Certificate::new("frame census");
    cert.check("orthogonal pairs of root pairs", 3780, census.orthogonal_pairs);
    cert.check(
        "root pairs orthogonal to each root pair",
        "63".to_string(),
        join(&census.orthogonal_per_root.iter().copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect::<Vec<_>>()),
    );
    cert.check("pairs sharing a frame", 3780, census.covered_pairs);
    cert.check(
        "multiplicity of each norm-4 vector",
        "7".to_string(),
        join(&census.norm4_multiplicity.iter().copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect::<Vec<_>>()),
    );
    cert
}

pub fn frames_stage(ctx: &Context, s: &Spread) -> Result<(FrameArray, Certificate)> {
    timed(|| {
        let arr = frames::build_frame_array(s, &ctx.geom, &ctx.shells)?;
        let mut cert = frames::verify_frame_array(&arr, &ctx.shells)?;
        cert.merge(frame_census(&arr, &ctx.shells));
        Ok((arr, cert))
    })
}

/// Partition certification: partition shape, per-block E8 recognition,
/// D8-plus-glue for every frame and the round trip to the spread.
pub fn partition_stage(ctx: &Context, arr: &FrameArray, s: &Spread) -> Result<(Norm4Partition, Certificate)> {
    timed(|| {
        let p = norm4::build_partition(arr, &ctx.shells)?;
        let mut cert = norm4::verify_partition(&p, &ctx.shells)?;
        cert.merge(norm4::certify_blocks(&p, arr, &ctx.shells)?);
        cert.merge(round_trip(&p, s, ctx)?);
        Ok((p, cert))
    })
}

fn round_trip(p: &Norm4Partition, s: &Spread, ctx: &Context) -> Result<Certificate> {
    let recovered = norm4::spread_from_partition(p, &ctx.geom)?;
    spread::verify_spread(&recovered, &ctx.geom)?;
    let mut cert = Certificate::new("round trip");
    cert.check_true("recovered spread equals the original", recovered.same_spaces(s) && recovered.class == s.class);
    Ok(cert)
}

#[derive(Clone, Debug)]
pub struct GroupOutcome {
    pub search: StabilizerSearch,
    pub records: Vec<GeneratorRecord>,
    pub block_action: BlockAction,
    pub one_block: OneBlockReport,
    pub extension: ExtensionReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupSummary {
    pub order: u128,
    pub generators: usize,
    pub candidates_tested: u64,
    pub block_action: BlockAction,
    pub one_block: OneBlockReport,
    pub extension: ExtensionReport,
}

impl GroupOutcome {
    pub fn summary(&self) -> GroupSummary {
        GroupSummary {
            order: self.search.group.order(),
            generators: self.records.len(),
            candidates_tested: self.search.candidates_tested,
            block_action: self.block_action.clone(),
            one_block: self.one_block.clone(),
            extension: self.extension.clone(),
        }
    }
}

pub fn group_stage(ctx: &Context, arr: &FrameArray, p: &Norm4Partition, s: &Spread) -> Result<(GroupOutcome, Certificate)> {
    timed(|| {
        let search = autgroup::stabilizer_generators(arr, p, &ctx.shells)?;
        let block_action = autgroup::block_action(&search.generators, p, &ctx.shells)?;
        let records = search
            .generators
            .iter()
            .zip(&block_action.images)
            .map(|(g, b)| GeneratorRecord { isometry: g.clone(), blocks: b.clone() })
            .collect();
        let mut cert = group_certificate(&search.generators, &block_action, &search.group, ctx)?;
        let one_block = autgroup::one_block_stabilizer_analysis(&search.group, p, s, &ctx.shells, &ctx.geom)?;
        cert.merge(one_block_certificate(&one_block));
        let extension = autgroup::extension_report(&search.group, &ctx.shells)?;
        Ok((GroupOutcome { search, records, block_action, one_block, extension }, cert))
    })
}

fn group_certificate(
    gens: &[autgroup::Isometry],
    action: &BlockAction,
    group: &autgroup::PermutationGroup,
    ctx: &Context,
) -> Result<Certificate> {
    let mut cert = Certificate::new("group");
    cert.check_true("generators preserve the Gram matrix, are unimodular and permute the blocks", true);
    cert.check("group order", autgroup::EXPECTED_ORDER, group.order());
    cert.check("order from the generators' matrices", group.order(), action.group_order);
    cert.check("block action image order", autgroup::A9_ORDER, action.image_order);
    cert.check_true("block action image is even", action.all_even);
    cert.check("block action kernel order", 2, action.kernel_order);
    cert.check_true("kernel is plus or minus the identity", action.kernel_is_plus_minus_one);
    let neg = autgroup::Isometry::negation().to_norm4_perm(&ctx.shells)?;
    cert.check_true("negation passes membership", group.contains(&neg));
    let recovered = gens
        .iter()
        .all(|g| g.to_norm4_perm(&ctx.shells).and_then(|p| autgroup::Isometry::from_norm4_perm(&p, &ctx.shells)).ok().as_ref() == Some(g));
    cert.check_true("matrices are recovered from their norm-4 permutations", recovered);
    Ok(cert)
}

fn one_block_certificate(r: &OneBlockReport) -> Certificate {
    let mut cert = Certificate::new("one-block stabilizer");
    cert.check("stabilizer order", 2 * autgroup::A8_ORDER, r.stabilizer_order);
    cert.check("image on the other eight blocks", autgroup::A8_ORDER, r.blocks_image_order);
    cert.check_true("transitive on the other eight blocks", r.blocks_transitive);
    cert.check("image on the 15 points of the fixed space", autgroup::A8_ORDER, r.points_image_order);
    cert.check_true("transitive on the 15 points", r.points_transitive);
    cert.check_true("both kernels are plus or minus the identity", r.kernels_are_plus_minus_one);
    cert
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub class: SpaceClass,
    pub out_dir: Option<PathBuf>,
    pub skip_group: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifyReport {
    pub class: SpaceClass,
    pub certificates: Vec<Certificate>,
    pub files: Vec<PathBuf>,
    pub group: Option<GroupSummary>,
}

pub const FAILURE_MARKER: &str = "FAILED";

/// Runs every stage, writing artifacts as they are produced. On failure
/// the artifacts so far are kept, the partial certificate is written and a
/// `FAILED` marker names the error.
pub fn certify(lattice: &Lattice, opts: &CertifyOptions) -> Result<CertifyReport> {
    let mut report = CertifyReport { class: opts.class, certificates: Vec::new(), files: Vec::new(), group: None };
    if let Some(dir) = &opts.out_dir {
        fs::create_dir_all(dir)?;
        let marker = dir.join(FAILURE_MARKER);
        if marker.exists() {
            fs::remove_file(&marker)?;
        }
    }
    let result = run_stages(lattice, opts, &mut report);
    if let Some(dir) = &opts.out_dir {
        let path = dir.join(ArtifactKind::Certificate.file_name());
        fs::write(&path, io::write_certificate(&report.certificates))?;
        report.files.push(path);
        if let Err(e) = &result {
            fs::write(dir.join(FAILURE_MARKER), format!("{e}\n"))?;
        }
    }
    result.map(|()| report)
}

fn run_stages(lattice: &Lattice, opts: &CertifyOptions, report: &mut CertifyReport) -> Result<()> {
    let write = |report: &mut CertifyReport, kind: ArtifactKind, text: String| -> Result<()> {
        if let Some(dir) = &opts.out_dir {
            let path = dir.join(kind.file_name());
            fs::write(&path, text)?;
            report.files.push(path);
        }
        Ok(())
    };
    let (_, cert) = census(lattice)?;
    report.certificates.push(cert.clone());
    require(cert)?;
    let ctx = &Context::new(lattice.clone())?;

    let (s, cert) = spread_stage(ctx, opts.class)?;
    report.certificates.push(cert.clone());
    write(report, ArtifactKind::Spread, io::write_spread(&s))?;
    require(cert)?;

    let (arr, cert) = frames_stage(ctx, &s)?;
    report.certificates.push(cert.clone());
    write(report, ArtifactKind::Frames, io::write_frames(&arr))?;
    require(cert)?;

    let (p, cert) = partition_stage(ctx, &arr, &s)?;
    report.certificates.push(cert.clone());
    write(report, ArtifactKind::Partition, io::write_partition(&p))?;
    require(cert)?;

    if opts.skip_group {
        return Ok(());
    }
    let (g, cert) = group_stage(ctx, &arr, &p, &s)?;
    report.certificates.push(cert.clone());
    write(report, ArtifactKind::Generators, io::write_generators(&g.records))?;
    report.group = Some(g.summary());
    require(cert)?;
    Ok(())
}

/// Reads, parses and re-verifies artifact files. Input problems (unreadable
/// files, unknown headers, malformed lines, duplicate kinds) are `Io` or
/// `Parse` errors; everything else is a verification failure.
pub fn verify_files(ctx: &Context, files: &[PathBuf]) -> Result<Vec<Certificate>> {
    let mut texts: BTreeMap<&'static str, (ArtifactKind, String, &Path)> = BTreeMap::new();
    for f in files {
        let text = fs::read_to_string(f)?;
        let kind = ArtifactKind::detect(&text)?;
        if texts.insert(kind.name(), (kind, text, f)).is_some() {
            return Err(Error::parse(1, format!("more than one {} file", kind.name())));
        }
    }
    let get = |k: ArtifactKind| texts.get(k.name()).map(|(_, t, _)| t.as_str());

    // parse everything first, so format errors win over verification failures
    let spread = get(ArtifactKind::Spread).map(io::parse_spread).transpose()?;
    let arr = get(ArtifactKind::Frames).map(io::parse_frames).transpose()?;
    let raw_blocks = get(ArtifactKind::Partition).map(io::parse_partition_vectors).transpose()?;
    let gens = get(ArtifactKind::Generators).map(io::parse_generators).transpose()?;
    let cert_lines = get(ArtifactKind::Certificate).map(io::parse_certificate).transpose()?;

    let mut out = Vec::new();
    if let Some(lines) = cert_lines {
        let mut cert = Certificate::new("certificate file");
        if let Some((_, line)) = lines.iter().find(|(pass, _)| !pass) {
            return Err(Error::verify("certificate file", format!("records a failed check: {line}")));
        }
        cert.check("recorded checks passing", lines.len(), lines.len());
        out.push(cert);
    }
    if let Some(s) = &spread {
        out.push(spread::verify_spread(s, &ctx.geom)?);
    }
    if let Some(a) = &arr {
        out.push(require(frames::verify_frame_array(a, &ctx.shells)?)?);
        out.push(require(frame_census(a, &ctx.shells))?);
    }
    let partition = match raw_blocks {
        Some(blocks) => {
            let p = io::partition_from_blocks(blocks, &ctx.shells.lattice)?;
            out.push(norm4::verify_partition(&p, &ctx.shells)?);
            for b in &p.blocks {
                out.push(norm4::certify_scaled_e8(b, &ctx.shells.lattice)?);
            }
            let mut cert = Certificate::new("partition consistency");
            let recovered = norm4::spread_from_partition(&p, &ctx.geom)?;
            spread::verify_spread(&recovered, &ctx.geom)?;
            cert.check_true("blocks reduce to a spread", true);
            if let Some(s) = &spread {
                if !cert.check_true("recovered spread equals the supplied spread", recovered.same_spaces(s) && recovered.class == s.class) {
                    return Err(Error::verify("partition", "recovered spread differs from the supplied spread"));
                }
            }
            if let Some(a) = &arr {
                cert.merge(norm4::certify_blocks(&p, a, &ctx.shells)?);
                for (r, row) in a.rows.iter().enumerate() {
                    let block = norm4::row_to_block(r, row, &ctx.shells)?;
                    if block.vectors != p.blocks[r].vectors {
                        return Err(Error::verify("partition", format!("block {r} differs from frame-array row {r}")));
                    }
                }
                cert.check_true("blocks match the frame-array rows", true);
            }
            out.push(require(cert)?);
            Some((p, recovered))
        }
        None => None,
    };
    if let Some(records) = gens {
        out.push(verify_generators(ctx, &records, partition.as_ref())?);
    }
    if out.is_empty() {
        return Err(Error::parse(0, "no artifact files given"));
    }
    Ok(out)
}

fn verify_generators(
    ctx: &Context,
    records: &[GeneratorRecord],
    partition: Option<&(Norm4Partition, Spread)>,
) -> Result<Certificate> {
    const STAGE: &str = "generators";
    let gens: Vec<autgroup::Isometry> = records.iter().map(|r| r.isometry.clone()).collect();
    for (k, g) in gens.iter().enumerate() {
        if !g.preserves_gram(ctx.shells.lattice.gram()) {
            return Err(Error::verify(STAGE, format!("generator {k} does not preserve the Gram matrix")));
        }
        if g.determinant().abs() != 1 {
            return Err(Error::verify(STAGE, format!("generator {k} is not unimodular")));
        }
    }
    let group = autgroup::PermutationGroup::from_isometries(&gens, &ctx.shells)?;
    let mut cert = Certificate::new(STAGE);
    if let Some((p, s)) = partition {
        let action = autgroup::block_action(&gens, p, &ctx.shells)?;
        for (k, (r, img)) in records.iter().zip(&action.images).enumerate() {
            if &r.blocks != img {
                return Err(Error::verify(STAGE, format!("generator {k}: recorded block permutation is wrong")));
            }
        }
        cert.merge(group_certificate(&gens, &action, &group, ctx)?);
        let one = autgroup::one_block_stabilizer_analysis(&group, p, s, &ctx.shells, &ctx.geom)?;
        cert.merge(one_block_certificate(&one));
    } else {
        cert.check("group order", autgroup::EXPECTED_ORDER, group.order());
    }
    require(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::D8_GRAM;

    #[test]
    fn census_of_e8_passes() {
        let (c, cert) = census(&Lattice::e8()).unwrap();
        assert!(cert.passed(), "{cert}");
        assert_eq!(c.single_profile, BTreeMap::from([(0, 64), (2, 70)]));
    }

    #[test]
    fn census_of_d8_fails() {
        let lattice = Lattice::from_gram(D8_GRAM).unwrap();
        if let Ok((_, cert)) = census(&lattice) {
            assert!(!cert.passed());
        }
        assert!(Context::new(lattice).is_err());
    }
}
