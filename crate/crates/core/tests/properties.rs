use std::sync::OnceLock;

use proptest::prelude::*;

use e8spread::autgroup::{self, Isometry};
use e8spread::f2::{F2Subspace, F2Vector};
use e8spread::io::{self, GeneratorRecord};
use e8spread::perm::{self, Perm};
use e8spread::pipeline::{self, Context};
use e8spread::{FrameArray, Norm4Partition, SpaceClass, Spread};

struct Built {
    ctx: Context,
    spread: Spread,
    arr: FrameArray,
    partition: Norm4Partition,
    gens: Vec<Isometry>,
    group: autgroup::PermutationGroup,
    labels: Vec<usize>,
}

fn built() -> &'static Built {
    static CELL: OnceLock<Built> = OnceLock::new();
    CELL.get_or_init(|| {
        let ctx = Context::e8().unwrap();
        let (spread, _) = pipeline::spread_stage(&ctx, SpaceClass::A).unwrap();
        let (arr, _) = pipeline::frames_stage(&ctx, &spread).unwrap();
        let (partition, _) = pipeline::partition_stage(&ctx, &arr, &spread).unwrap();
        let search = autgroup::stabilizer_generators(&arr, &partition, &ctx.shells).unwrap();
        let labels = partition.block_of(&ctx.shells).into_iter().map(Option::unwrap).collect();
        Built { gens: search.generators, group: search.group, ctx, spread, arr, partition, labels }
    })
}

fn word(b: &Built, letters: &[(usize, bool)]) -> Isometry {
    letters.iter().fold(Isometry::identity(), |acc, &(i, inv)| {
        let g = &b.gens[i % b.gens.len()];
        let g = if inv {
            let p = g.to_norm4_perm(&b.ctx.shells).unwrap().inverse();
            Isometry::from_norm4_perm(&p, &b.ctx.shells).unwrap()
        } else {
            g.clone()
        };
        acc.then(&g)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_words_preserve_gram_and_partition(letters in prop::collection::vec((0usize..64, any::<bool>()), 0..=20)) {
        let b = built();
        let w = word(b, &letters);
        prop_assert!(w.preserves_gram(b.ctx.shells.lattice.gram()));
        prop_assert_eq!(w.determinant().abs(), 1);
        prop_assert!(autgroup::block_permutation(&w, &b.labels, &b.ctx.shells).is_some());
        let p = w.to_norm4_perm(&b.ctx.shells).unwrap();
        prop_assert!(b.group.contains(&p));
        prop_assert_eq!(Isometry::from_norm4_perm(&p, &b.ctx.shells).unwrap(), w);
    }

    #[test]
    fn words_act_on_the_spread(letters in prop::collection::vec((0usize..64, any::<bool>()), 1..=8)) {
        let b = built();
        let w = word(b, &letters);
        for v in &b.spread.spaces {
            let image = F2Subspace::span(v.rows().iter().map(|r| w.act_mod2(*r)));
            prop_assert!(b.spread.spaces.contains(&image));
        }
    }

    #[test]
    fn quadratic_form_polarizes(x in any::<u8>(), y in any::<u8>()) {
        let forms = &built().ctx.geom.forms;
        let (x, y) = (F2Vector(x), F2Vector(y));
        prop_assert_eq!(forms.q(x + y), forms.q(x) ^ forms.q(y) ^ forms.b(x, y));
        prop_assert_eq!(forms.b(x, y), forms.b(y, x));
    }

    #[test]
    fn permutation_algebra(images in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle(),
                           others in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle()) {
        let a = Perm::from_images(images).unwrap();
        let c = Perm::from_images(others).unwrap();
        prop_assert!(a.then(&a.inverse()).is_identity());
        prop_assert_eq!(a.then(&c).inverse(), c.inverse().then(&a.inverse()));
        prop_assert!(a.pow(a.order()).is_identity());
        let g = perm::schreier_sims(&[a.clone(), c.clone()], 12).unwrap();
        prop_assert!(g.contains(&a.then(&c)));
        // order of an element divides the group order
        prop_assert_eq!(g.order() % a.order() as u128, 0);
    }

    #[test]
    fn subspace_serialization_round_trips(rows in prop::collection::vec(1u8..=255, 1..=4)) {
        let v = F2Subspace::span(rows.into_iter().map(F2Vector));
        let s = Spread { spaces: vec![v.clone(), v], class: SpaceClass::B };
        prop_assert_eq!(io::parse_spread(&io::write_spread(&s)).unwrap(), s);
    }

    #[test]
    fn generator_serialization_round_trips(entries in prop::collection::vec(-50i64..50, 64), blocks in prop::collection::vec(0usize..9, 9)) {
        let m: [[i64; 8]; 8] = std::array::from_fn(|i| std::array::from_fn(|j| entries[8 * i + j]));
        let g = vec![GeneratorRecord { isometry: Isometry::new(m), blocks }];
        prop_assert_eq!(io::parse_generators(&io::write_generators(&g)).unwrap(), g);
    }
}

#[test]
fn artifacts_round_trip() {
    let b = built();
    assert_eq!(io::parse_spread(&io::write_spread(&b.spread)).unwrap(), b.spread);
    assert_eq!(io::parse_frames(&io::write_frames(&b.arr)).unwrap(), b.arr);
    assert_eq!(io::parse_partition(&io::write_partition(&b.partition), &b.ctx.shells.lattice).unwrap(), b.partition);
}

#[test]
fn negation_is_a_generator_and_central() {
    let b = built();
    assert_eq!(b.gens[0], Isometry::negation());
    let neg = Isometry::negation();
    for g in &b.gens {
        assert_eq!(g.then(&neg), neg.then(g));
    }
}

#[test]
fn permutation_group_order_is_product_of_orbit_lengths() {
    let b = built();
    let product: u128 = b.group.chain.orbit_lengths().iter().map(|&l| l as u128).product();
    assert_eq!(product, b.group.order());
}
