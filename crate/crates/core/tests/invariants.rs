use proptest::prelude::*;
use sftlab_core::attractor::{image_cover, Affine, IntervalOracle};
use sftlab_core::dyadic::{Dyadic, DyadicCell, Interval};
use sftlab_core::eds::*;
use sftlab_core::onedim::DEFAULT_BIT_CAP;
use sftlab_core::{Budget, Site};

fn cylinder(max_bit: u64) -> impl Strategy<Value = CylinderPattern> {
    prop::collection::btree_map(0..max_bit, any::<bool>(), 1..4).prop_map(CylinderPattern::new)
}

fn gencyl_1d(max_bit: u64) -> impl Strategy<Value = GenCylinder> {
    prop::collection::btree_map((0i64..2).prop_map(|u| Site::new(vec![u])), cylinder(max_bit), 1..3)
        .prop_map(|cells| GenCylinder::new(1, cells).unwrap())
}

fn point(max_bit: u64) -> impl Strategy<Value = CantorPoint> {
    prop::collection::btree_set(0..max_bit, 0..(max_bit as usize)).prop_map(CantorPoint::new)
}

fn periodic(max_bit: u64) -> impl Strategy<Value = PeriodicPoint> {
    (1usize..=3).prop_flat_map(move |p| {
        prop::collection::vec(point(max_bit), p).prop_map(move |cells| PeriodicPoint::new(vec![p], cells).unwrap())
    })
}

fn script() -> impl Strategy<Value = ScriptedEnumerator> {
    prop::collection::vec((1u64..=5, gencyl_1d(2)), 0..6)
        .prop_map(|e| ScriptedEnumerator::new(1, e).unwrap())
}

proptest! {
    #[test]
    fn pairing_inverts(i in 0u64..1 << 20, n in 0u64..1 << 20) {
        prop_assert_eq!(unpairing(pairing(i, n)), (i, n));
    }

    #[test]
    fn lifted_cylinder_tests_the_lane(x in point(48), b in cylinder(6), n in 0u64..3) {
        prop_assert_eq!(x.in_cylinder(&lift_cylinder(n, &b)), x.project(n).in_cylinder(&b));
        prop_assert_eq!(project_cylinder(n, &lift_cylinder(n, &b)), b);
    }

    #[test]
    fn lifted_pattern_hits_iff_projection_hits(x in periodic(48), b in gencyl_1d(6), n in 0u64..3) {
        prop_assert_eq!(x.hits(&lift_gencyl(n, &b)), x.project(n).hits(&b));
    }

    #[test]
    fn guarded_stage_is_never_empty(a in script(), k in 0u64..7) {
        let g = guarded_stage(&a, k, DEFAULT_BIT_CAP).unwrap();
        prop_assert!(!g.stage.defines_empty_1d(DEFAULT_BIT_CAP).unwrap());
        prop_assert!(g.used <= k);
        let used = StageSet::new(1, truncated_emissions(&a, g.used).unwrap()).unwrap();
        prop_assert!(g.stage.equivalent(&used));
        match g.fired_at {
            None => {
                let full = StageSet::new(1, truncated_emissions(&a, k).unwrap()).unwrap();
                prop_assert!(g.stage.equivalent(&full));
            }
            Some(f) => {
                prop_assert!(g.used < f && f <= k);
                let at = StageSet::new(1, truncated_emissions(&a, f).unwrap()).unwrap();
                prop_assert!(at.defines_empty_1d(DEFAULT_BIT_CAP).unwrap());
            }
        }
    }

    #[test]
    fn guard_fires_once_and_stays(a in script()) {
        let mut first = None;
        for k in 0..7 {
            let g = guarded_stage(&a, k, DEFAULT_BIT_CAP).unwrap();
            if first.is_some() {
                prop_assert_eq!(g.fired_at, first);
            }
            first = first.or(g.fired_at);
        }
    }

    #[test]
    fn image_cover_is_local(
        coeff in prop::collection::vec(-8i64..=8, 2),
        shift in prop::collection::vec(-8i64..=8, 2),
        level in 0u32..3,
        corner in prop::collection::vec(-2i64..2, 2),
        m in 1u64..12,
        samples in prop::collection::vec(prop::collection::vec(0i64..=64, 2), 8),
    ) {
        let c: Vec<Dyadic> = coeff.iter().map(|&k| Dyadic::new(k, 3)).collect();
        let t: Vec<Dyadic> = shift.iter().map(|&k| Dyadic::new(k, 3)).collect();
        let f = Affine::diagonal(c.clone(), t.clone(), vec![Interval::new(Dyadic::int(-2), Dyadic::int(2)); 2]).unwrap();
        let cell = DyadicCell::new(level, corner.iter().map(|&k| k << level).collect());
        let oracle = IntervalOracle::new(f);
        let cover = image_cover(&oracle, &cell, m, &mut Budget::unlimited()).unwrap();
        let r = Dyadic::ratio_ceil(&1.into(), &(m as i64).into(), 40);
        let image = |x: &[Dyadic]| -> Vec<Dyadic> { (0..2).map(|i| &(&c[i] * &x[i]) + &t[i]).collect() };
        let sup = |a: &[Dyadic], b: &[Dyadic]| (0..2).map(|i| (&a[i] - &b[i]).abs()).max().unwrap();
        let b = cell.to_box();
        for s in &samples {
            let x: Vec<Dyadic> = (0..2).map(|i| &b[i].lo + &(&b[i].width() * &Dyadic::new(s[i], 6))).collect();
            let y = image(&x);
            prop_assert!(cover.iter().any(|p| sup(p, &y) <= r), "f({x:?}) uncovered");
        }
        let fimg: Vec<Interval> = (0..2)
            .map(|i| {
                let (u, v) = (&(&c[i] * &b[i].lo) + &t[i], &(&c[i] * &b[i].hi) + &t[i]);
                Interval::new(u.clone().min(v.clone()), u.max(v))
            })
            .collect();
        for p in &cover {
            let d = (0..2).map(|i| fimg[i].dist(&p[i])).max().unwrap();
            prop_assert!(d <= r, "cover point {p:?} strays");
        }
    }
}
