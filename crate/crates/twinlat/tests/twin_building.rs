use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twinlat::apartments::{common_apartment, Frame};
use twinlat::flags::{Geometry, PeriodicFlag};
use twinlat::laurent::Side;
use twinlat::verify::{codistance, codistance_via_apartment, opposite, random_gallery, twin_apartment, TwinChamberPair};
use twinlat::weyl::{AffineWeylElement, CoxeterType, TypeTag};
use twinlat::{Field, F2, F3};

fn geom<F: Field>(tag: TypeTag, n: usize) -> Geometry<F> {
    Geometry::new(CoxeterType::new(tag, n).unwrap()).unwrap()
}

fn random_chamber<F: Field>(g: Geometry<F>, side: Side, steps: usize, rng: &mut ChaCha8Rng) -> PeriodicFlag<F> {
    random_gallery(g, side, steps, 3, rng).unwrap().pop().unwrap()
}

fn twisted_frame_is_translate<F: Field>(g: Geometry<F>) {
    let std = Frame::standard(g);
    for w in AffineWeylElement::ball(g.ty(), 2) {
        let pair = TwinChamberPair::new(
            std.chamber_at(Side::Positive, &w).unwrap(),
            std.chamber_at(Side::Negative, &w).unwrap(),
        )
        .unwrap();
        let f = twin_apartment(&pair).unwrap();
        for v in AffineWeylElement::ball(g.ty(), 1) {
            let wv = w.compose(&v).unwrap();
            for side in [Side::Positive, Side::Negative] {
                assert_eq!(f.chamber_at(side, &v).unwrap(), std.chamber_at(side, &wv).unwrap(), "w = {w:?}, v = {v:?}");
            }
        }
    }
}

#[test]
fn twin_apartment_of_twisted_pair_is_translated_frame() {
    twisted_frame_is_translate(geom::<F2>(TypeTag::A, 2));
    twisted_frame_is_translate(geom::<F3>(TypeTag::C, 2));
    twisted_frame_is_translate(geom::<F3>(TypeTag::B, 3));
}

fn coconvexity<F: Field>(g: Geometry<F>) {
    let std = Frame::standard(g);
    let id = AffineWeylElement::identity(g.ty());
    for side in [Side::Positive, Side::Negative] {
        let c = std.chamber_at(side, &id).unwrap();
        let c_opp = std.chamber_at(side.flip(), &id).unwrap();
        for d in std.apartment_chambers(side, 2) {
            assert_eq!(codistance(&c_opp, &d).unwrap(), c.weyl_distance(&d).unwrap());
        }
    }
}

#[test]
fn codistance_matches_distance_inside_twin_apartment() {
    coconvexity(geom::<F2>(TypeTag::A, 3));
    coconvexity(geom::<F2>(TypeTag::C, 2));
    coconvexity(geom::<F3>(TypeTag::D, 4));
}

fn swap_symmetry<F: Field>(g: Geometry<F>, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..15 {
        let x = random_chamber(g, Side::Positive, 3, &mut rng);
        let y = random_chamber(g, Side::Negative, 3, &mut rng);
        let (mx, my) = (x.swap_sides(), y.swap_sides());
        assert_eq!(mx.side(), Side::Negative);
        assert_eq!(opposite(&x, &y).unwrap(), opposite(&my, &mx).unwrap());
        assert_eq!(codistance(&x, &y).unwrap().length(), codistance(&my, &mx).unwrap().length());
        assert_eq!(mx.swap_sides(), x);
    }
}

#[test]
fn side_swap_preserves_oppositeness() {
    swap_symmetry(geom::<F2>(TypeTag::A, 2), 1);
    swap_symmetry(geom::<F3>(TypeTag::C, 2), 2);
    swap_symmetry(geom::<F3>(TypeTag::B, 3), 3);
}

#[test]
fn both_walks_agree_with_formula() {
    let g = geom::<F3>(TypeTag::A, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let x = random_chamber(g, Side::Positive, 4, &mut rng);
        let y = random_chamber(g, Side::Negative, 4, &mut rng);
        let d = codistance(&x, &y).unwrap();
        for walk in [Side::Positive, Side::Negative] {
            let (d2, frame) = codistance_via_apartment(&x, &y, walk, &mut rng).unwrap();
            assert_eq!(d2, d);
            assert!(frame.position(&x).is_some() && frame.position(&y).is_some());
        }
        assert_eq!(codistance(&y, &x).unwrap(), d.inverse());
    }
}

#[test]
fn flag_json_field_names() {
    let g = geom::<F2>(TypeTag::C, 2);
    let v = serde_json::to_value(PeriodicFlag::standard(g, Side::Negative).to_json()).unwrap();
    let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(keys, ["oriflamme_pairs", "schema_version", "side", "subspaces", "typeK", "variant"]);
}

fn words() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..3, 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn standard_apartment_positions(word in words()) {
        let g = geom::<F2>(TypeTag::A, 3);
        let w = AffineWeylElement::from_word(g.ty(), &word).unwrap();
        let std = Frame::standard(g);
        let id = AffineWeylElement::identity(g.ty());
        let c = std.chamber_at(Side::Positive, &w).unwrap();
        prop_assert_eq!(std.position(&c), Some(w.clone()));
        let base = std.chamber_at(Side::Positive, &id).unwrap();
        prop_assert_eq!(base.weyl_distance(&c).unwrap(), w.clone());
        let neg = std.chamber_at(Side::Negative, &id).unwrap();
        prop_assert_eq!(codistance(&neg, &c).unwrap(), w.clone());
        prop_assert_eq!(opposite(&neg, &c).unwrap(), w.length() == 0);
    }

    #[test]
    fn common_apartment_contains_both(seed in 0u64..1000) {
        let g = geom::<F3>(TypeTag::A, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_chamber(g, Side::Positive, 4, &mut rng);
        let y = random_chamber(g, Side::Positive, 4, &mut rng);
        let ca = common_apartment(&x, &y).unwrap();
        let wx = ca.frame.position(&x).unwrap();
        let wy = ca.frame.position(&y).unwrap();
        prop_assert_eq!(wx.inverse().compose(&wy).unwrap(), x.weyl_distance(&y).unwrap());
    }
}
