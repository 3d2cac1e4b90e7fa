//! Acceptance criteria 1-11. Each criterion prints one PASS/FAIL line; all
//! comparisons are exact and each has a wall-clock limit.

use std::collections::BTreeMap;
use std::fs;
use std::time::{Duration, Instant};

use e8spread::autgroup::{self, A8_ORDER, A9_ORDER, EXPECTED_ORDER};
use e8spread::f2::{self, SpaceClass};
use e8spread::frames;
use e8spread::lattice::Shells;
use e8spread::norm4;
use e8spread::pipeline::{self, CertifyOptions};
use e8spread::spread;
use e8spread::Lattice;

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn record(&mut self, id: u32, name: &str, limit: Duration, elapsed: Duration, ok: bool, detail: String) {
        let in_time = elapsed < limit;
        let pass = ok && in_time;
        let line = format!(
            "criterion {id:>2} {} {name}: {detail} ({} ms, limit {} ms)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_millis(),
            limit.as_millis()
        );
        println!("{line}");
        self.lines.push((pass, line));
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

#[test]
fn acceptance() {
    let mut r = Report { lines: Vec::new() };
    let secs = Duration::from_secs;

    // 1
    let (shells, t) = timed(|| Shells::new(Lattice::e8()).unwrap());
    r.record(
        1,
        "shell counts",
        secs(1),
        t,
        shells.roots.len() == 240 && shells.norm4.len() == 2160,
        format!("{} norm-2, {} norm-4", shells.roots.len(), shells.norm4.len()),
    );

    // 2
    let ((iso, aniso, per_aniso, per_iso), t) = timed(|| {
        let forms = f2::build_forms(&shells.lattice).unwrap();
        let mut roots_per: BTreeMap<usize, usize> = BTreeMap::new();
        let mut n4_per: BTreeMap<usize, usize> = BTreeMap::new();
        for x in forms.anisotropic_points() {
            let n = shells.roots.iter().filter(|v| f2::reduce_mod2(v) == x).count();
            *roots_per.entry(n).or_default() += 1;
        }
        for x in forms.isotropic_points() {
            let n = shells.norm4.iter().filter(|v| f2::reduce_mod2(v) == x).count();
            *n4_per.entry(n).or_default() += 1;
        }
        (forms.isotropic_points().len(), forms.anisotropic_points().len(), roots_per, n4_per)
    });
    r.record(
        2,
        "mod-2 census",
        secs(1),
        t,
        iso == 135 && aniso == 120 && per_aniso == BTreeMap::from([(2, 120)]) && per_iso == BTreeMap::from([(16, 135)]),
        format!("{iso} isotropic, {aniso} anisotropic, roots per class {per_aniso:?}, norm-4 per class {per_iso:?}"),
    );

    // 3
    let (geom, t) = timed(|| e8spread::F2Geometry::new(&shells).unwrap());
    let (a, b) = (geom.members(SpaceClass::A), geom.members(SpaceClass::B));
    let parity_ok = a.iter().chain(&b).all(|u| {
        let same = geom.classes.class_of(u) == geom.classes.class_of(&a[0]);
        (u.intersection_dim(&a[0]) % 2 == 0) == same
    });
    r.record(
        3,
        "isotropic 4-spaces and classes",
        secs(10),
        t,
        geom.spaces.len() == 270 && a.len() == 135 && b.len() == 135 && parity_ok,
        format!("{} spaces, classes {} + {}, parity consistent {parity_ok}", geom.spaces.len(), a.len(), b.len()),
    );

    // 4
    let ((single, double), t) = timed(|| {
        let v1 = &a[0];
        let v2 = a.iter().find(|u| v1.intersection_dim(u) == 0).unwrap();
        (f2::intersection_profile(v1, &a), f2::double_profile(v1, v2, &a).unwrap())
    });
    r.record(
        4,
        "intersection profiles",
        secs(5),
        t,
        single == BTreeMap::from([(0, 64), (2, 70)])
            && double == BTreeMap::from([((0, 0), 28), ((0, 2), 35), ((2, 0), 35), ((2, 2), 35)]),
        format!("single {single:?}, pair {double:?}"),
    );

    // 5
    let ((s, s_again), t) = timed(|| {
        let s = spread::find_spread(SpaceClass::A, &a).unwrap();
        let again = spread::find_spread(SpaceClass::A, &a).unwrap();
        (s, again)
    });
    let spread_ok = spread::verify_spread(&s, &geom).is_ok() && s == s_again;
    r.record(
        5,
        "spread",
        secs(30),
        t,
        spread_ok,
        format!("{} disjoint spaces covering the isotropic points, deterministic {}", s.spaces.len(), s == s_again),
    );

    // 6
    let ((arr, census), t) = timed(|| {
        let arr = frames::build_frame_array(&s, &geom, &shells).unwrap();
        let census = frames::orthogonal_pair_census(&arr, &shells);
        (arr, census)
    });
    let shape = arr.rows.len() == 9 && arr.rows.iter().all(|row| row.len() == 15);
    let per_row = arr.rows.iter().all(|row| {
        let mut ids: Vec<usize> = row.iter().flat_map(|f| f.roots).collect();
        ids.sort_unstable();
        ids == (0..120).collect::<Vec<_>>()
    });
    let mult_ok = census.norm4_multiplicity.iter().all(|&m| m == 7);
    r.record(
        6,
        "frame array",
        secs(10),
        t,
        shape && per_row && census.orthogonal_pairs == 3780 && census.covered_pairs == 3780 && mult_ok,
        format!(
            "9x15 {shape}, each pair once per row {per_row}, {} orthogonal pairs, {} covered once, multiplicity 7 {mult_ok}",
            census.orthogonal_pairs, census.covered_pairs
        ),
    );

    // 7
    let ((p, blocks_ok), t) = timed(|| {
        let p = norm4::build_partition(&arr, &shells).unwrap();
        let ok = norm4::certify_blocks(&p, &arr, &shells).map(|c| c.passed()).unwrap_or(false);
        (p, ok)
    });
    let cover_ok = norm4::verify_partition(&p, &shells).is_ok()
        && p.block_of(&shells).iter().all(Option::is_some)
        && p.blocks.iter().map(|b| b.vectors.len()).sum::<usize>() == 2160;
    r.record(
        7,
        "norm-4 partition",
        secs(60),
        t,
        cover_ok && blocks_ok && p.blocks.len() == 9,
        format!("{} blocks of 240 covering 2160 {cover_ok}, E8 and D8-plus-glue for all 135 pairs {blocks_ok}", p.blocks.len()),
    );

    // 8
    let (back, t) = timed(|| norm4::spread_from_partition(&p, &geom).unwrap());
    r.record(
        8,
        "round trip",
        secs(5),
        t,
        back.spaces == s.spaces && back.class == s.class,
        format!("recovered spread equals original {}", back.spaces == s.spaces),
    );

    // 9
    let ((search, action), t) = timed(|| {
        let search = autgroup::stabilizer_generators(&arr, &p, &shells).unwrap();
        let action = autgroup::block_action(&search.generators, &p, &shells).unwrap();
        (search, action)
    });
    r.record(
        9,
        "stabilizer group",
        secs(600),
        t,
        search.group.order() == EXPECTED_ORDER
            && action.image_order == A9_ORDER
            && action.all_even
            && action.kernel_order == 2
            && action.kernel_is_plus_minus_one,
        format!(
            "order {}, block image {} even {}, kernel {} = ±1 {}",
            search.group.order(),
            action.image_order,
            action.all_even,
            action.kernel_order,
            action.kernel_is_plus_minus_one
        ),
    );

    // 10
    let (one, t) = timed(|| autgroup::one_block_stabilizer_analysis(&search.group, &p, &s, &shells, &geom).unwrap());
    r.record(
        10,
        "one-block stabilizer",
        secs(60),
        t,
        one.stabilizer_order == 2 * A8_ORDER
            && one.blocks_image_order == A8_ORDER
            && one.blocks_transitive
            && one.points_image_order == A8_ORDER
            && one.points_transitive,
        format!(
            "stabilizer {}, on 8 blocks {} transitive {}, on 15 points {} transitive {}",
            one.stabilizer_order, one.blocks_image_order, one.blocks_transitive, one.points_image_order, one.points_transitive
        ),
    );

    // 11
    let (same, t) = timed(|| {
        let lattice = Lattice::e8();
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for d in &dirs {
            let opts = CertifyOptions { class: SpaceClass::A, out_dir: Some(d.path().to_path_buf()), skip_group: false };
            pipeline::certify(&lattice, &opts).unwrap();
        }
        let read = |d: &tempfile::TempDir| -> BTreeMap<String, Vec<u8>> {
            fs::read_dir(d.path())
                .unwrap()
                .map(|e| {
                    let e = e.unwrap();
                    (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
                })
                .collect()
        };
        let (x, y) = (read(&dirs[0]), read(&dirs[1]));
        (x.len(), x == y)
    });
    r.record(
        11,
        "determinism",
        secs(600),
        t,
        same.0 == 5 && same.1,
        format!("{} artifact files, byte-identical {}", same.0, same.1),
    );

    let failed: Vec<&String> = r.lines.iter().filter(|(pass, _)| !pass).map(|(_, l)| l).collect();
    assert!(failed.is_empty(), "failed criteria:\n{failed:#?}");
}
