use std::collections::BTreeMap;

use proptest::prelude::*;
use sftlab_core::blockcode::BlockCode;
use sftlab_core::dyadic::{Dyadic, DyadicCell};
use sftlab_core::eds::{CylinderPattern, GenCylinder};
use sftlab_core::format::*;
use sftlab_core::multidim::{TorusPattern, WangTile};
use sftlab_core::{Alphabet, Pattern, SftSpec, Site};

fn site(dim: usize) -> impl Strategy<Value = Site> {
    prop::collection::vec(-2i64..=2, dim).prop_map(Site::new)
}

fn pattern(dim: usize, k: u32) -> impl Strategy<Value = Pattern> {
    prop::collection::btree_map(site(dim), 0..k, 1..4)
        .prop_map(move |cells| Pattern::from_cells(dim, cells).unwrap())
}

fn sft() -> impl Strategy<Value = SftSpec> {
    (1usize..=2, 1u32..=3).prop_flat_map(|(dim, k)| {
        prop::collection::vec(pattern(dim, k), 0..4)
            .prop_map(move |f| SftSpec::new(Alphabet::numbered(k as usize), dim, f).unwrap())
    })
}

fn cylinder() -> impl Strategy<Value = CylinderPattern> {
    prop::collection::btree_map(0u64..12, any::<bool>(), 1..4).prop_map(CylinderPattern::new)
}

fn gencyl(dim: usize) -> impl Strategy<Value = GenCylinder> {
    prop::collection::btree_map(site(dim), cylinder(), 1..3)
        .prop_map(move |cells: BTreeMap<Site, CylinderPattern>| GenCylinder::new(dim, cells).unwrap())
}

proptest! {
    #[test]
    fn sft_round_trip(spec in sft()) {
        prop_assert_eq!(parse_sft(&write_sft(&spec)).unwrap(), spec);
    }

    #[test]
    fn wang_round_trip(colours in prop::collection::vec(prop::array::uniform4(0u8..3), 1..6)) {
        let tiles: Vec<WangTile> = colours
            .iter()
            .enumerate()
            .map(|(i, c)| WangTile {
                name: format!("t{i}"),
                n: format!("c{}", c[0]),
                e: format!("c{}", c[1]),
                s: format!("c{}", c[2]),
                w: format!("c{}", c[3]),
            })
            .collect();
        prop_assert_eq!(parse_wang(&write_wang(&tiles)).unwrap(), tiles);
    }

    #[test]
    fn block_code_round_trip(
        offsets in prop::collection::btree_set(-2i64..=2, 1..=3),
        k in 1u32..=3,
        seed in prop::collection::vec(any::<u32>(), 27),
    ) {
        let window: Vec<Site> = offsets.into_iter().map(|o| Site::new(vec![o])).collect();
        let size = (k as usize).pow(window.len() as u32);
        let rule = seed[..size].iter().map(|s| s % k).collect();
        let code = BlockCode::new(1, Alphabet::numbered(k as usize), Alphabet::numbered(k as usize), window, rule).unwrap();
        prop_assert_eq!(parse_block_code(&write_block_code(&code)).unwrap(), code);
    }

    #[test]
    fn torus_round_trip(p in 1usize..=3, q in 1usize..=3, seed in prop::collection::vec(0u32..3, 9)) {
        let t = TorusPattern::new(vec![p, q], seed[..p * q].to_vec()).unwrap();
        prop_assert_eq!(parse_torus(&write_torus(&t)).unwrap(), t);
    }

    #[test]
    fn cylinder_round_trip(
        (dim, cyls) in (1usize..=2).prop_flat_map(|d| (Just(d), prop::collection::vec(gencyl(d), 0..4)))
    ) {
        let (d, back) = parse_cylinders(&write_cylinders(dim, &cyls)).unwrap();
        prop_assert_eq!(d, dim);
        prop_assert_eq!(back, cyls);
    }

    #[test]
    fn cell_round_trip(level in 0u32..8, corner in prop::collection::vec(-40i64..40, 1..=3)) {
        let c = DyadicCell::new(level, corner);
        prop_assert_eq!(parse_cell(&write_cell(&c)).unwrap(), c);
    }

    #[test]
    fn dyadic_round_trip(num in -10_000i64..10_000, level in 0u32..20) {
        let x = Dyadic::new(num, level);
        prop_assert_eq!(x.to_string().parse::<Dyadic>().unwrap(), x);
    }
}
