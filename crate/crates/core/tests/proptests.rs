use proptest::prelude::*;

use sizephase::prime::{prime_tiling, CornerBonus};
use sizephase::solver::{min_score_bruteforce, solve_column_dp, DpOptions};
use sizephase::stabilizer::{gf2_rank, PauliOperator};
use sizephase::thermal::hastings_bound_ln_k;
use sizephase::tiling::{
    rat, score_assignment, score_assignment_with, site_contributions, Assignment, TileSet, ABSENT,
    ANY,
};
use sizephase::SquareLattice;

fn entry(c: usize, star: bool) -> impl Strategy<Value = i32> {
    let colours = (0..c as i32).prop_map(|x| x);
    if star {
        prop_oneof![3 => colours, 2 => Just(ANY), 1 => Just(ABSENT)].boxed()
    } else {
        prop_oneof![3 => colours, 2 => Just(ANY)].boxed()
    }
}

fn pieces(c: usize, star: bool) -> impl Strategy<Value = Vec<([i32; 4], (i64, i64))>> {
    prop::collection::vec(
        (prop::array::uniform4(entry(c, star)), (-3i64..=5, 1i64..=3)),
        0..5,
    )
}

fn tileset() -> impl Strategy<Value = TileSet> {
    (1usize..=3).prop_flat_map(|c| {
        (pieces(c, false), pieces(c, true)).prop_map(move |(tiles, stars)| {
            let mut ts = TileSet::new(c);
            for (p, (n, d)) in tiles {
                ts.tile(p, rat(n, d));
            }
            for (p, (n, d)) in stars {
                ts.star(p, rat(n, d));
            }
            ts
        })
    })
}

fn lattice() -> impl Strategy<Value = SquareLattice> {
    prop_oneof![Just((1, 1)), Just((2, 1)), Just((1, 2)), Just((2, 2))]
        .prop_map(|(w, h)| SquareLattice::new(w, h))
}

fn instance() -> impl Strategy<Value = (TileSet, Assignment)> {
    (tileset(), lattice()).prop_flat_map(|(ts, lat)| {
        let c = ts.colours as u16;
        prop::collection::vec(0..c, lat.spin_count())
            .prop_map(move |v| (ts.clone(), Assignment::new(lat, v)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn score_is_sum_of_sites((ts, a) in instance()) {
        let total: sizephase::Score = site_contributions(&ts, &a).unwrap().into_iter().map(|(_, s)| s).sum();
        prop_assert_eq!(total, score_assignment(&ts, &a).unwrap());
    }

    #[test]
    fn piece_order_is_irrelevant((ts, a) in instance()) {
        let mut rev = ts.clone();
        rev.plaquette_pieces.reverse();
        rev.star_pieces.reverse();
        prop_assert_eq!(score_assignment(&ts, &a).unwrap(), score_assignment(&rev, &a).unwrap());
    }

    #[test]
    fn zero_weight_equals_absent((ts, a) in instance(), p in prop::array::uniform4(-2i32..1)) {
        let mut extra = ts.clone();
        extra.star(p, rat(0, 1));
        prop_assert_eq!(score_assignment(&ts, &a).unwrap(), score_assignment(&extra, &a).unwrap());
    }

    #[test]
    fn json_round_trip(ts in tileset()) {
        let back = TileSet::from_json(&ts.to_json()).unwrap();
        prop_assert_eq!(back, ts);
    }

    #[test]
    fn dp_equals_bruteforce(ts in tileset(), lat in lattice()) {
        let (bf, _, _) = min_score_bruteforce(&ts, &lat, u64::MAX).unwrap();
        let (dp, a, _) = solve_column_dp(&ts, &lat, &DpOptions::default()).unwrap();
        prop_assert_eq!(&bf, &dp);
        prop_assert_eq!(score_assignment(&ts, &a).unwrap(), dp);
    }

    #[test]
    fn pauli_commutation(xa in prop::collection::vec(any::<bool>(), 12), za in prop::collection::vec(any::<bool>(), 12),
                         xb in prop::collection::vec(any::<bool>(), 12), zb in prop::collection::vec(any::<bool>(), 12)) {
        let idx = |v: &[bool]| v.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect::<Vec<_>>();
        let a = PauliOperator::x_type(12, &idx(&xa)).product(&PauliOperator::z_type(12, &idx(&za)));
        let b = PauliOperator::x_type(12, &idx(&xb)).product(&PauliOperator::z_type(12, &idx(&zb)));
        prop_assert_eq!(a.commutes_with(&b), b.commutes_with(&a));
        // symplectic form computed independently
        let overlap = (0..12).filter(|&i| xa[i] && zb[i]).count() + (0..12).filter(|&i| za[i] && xb[i]).count();
        prop_assert_eq!(a.commutes_with(&b), overlap % 2 == 0);
        prop_assert!(a.commutes_with(&a));
    }

    #[test]
    fn rank_ignores_products(rows in prop::collection::vec(prop::collection::vec(0usize..10, 0..5), 1..8), i in 0usize..8, j in 0usize..8) {
        let ops: Vec<PauliOperator> = rows.iter().enumerate()
            .map(|(k, r)| if k % 2 == 0 { PauliOperator::x_type(10, r) } else { PauliOperator::z_type(10, r) })
            .collect();
        let r = gf2_rank(&ops);
        prop_assert!(r <= ops.len());
        let mut more = ops.clone();
        more.push(ops[i % ops.len()].product(&ops[j % ops.len()]));
        prop_assert_eq!(gf2_rank(&more), r);
    }

    #[test]
    fn hastings_monotone(ln_k in 0.0f64..50.0, b1 in 0.0f64..100.0, db in 0.0f64..10.0, delta in 0.1f64..5.0) {
        let a = hastings_bound_ln_k(ln_k, b1, delta).value;
        let b = hastings_bound_ln_k(ln_k, b1 + db, delta).value;
        prop_assert!(b <= a);
        prop_assert!(a >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Corner stars never change a score of the prime families.
    #[test]
    fn corner_stars_are_neutral(seed in prop::collection::vec(0u16..u16::MAX, 60), n in 1usize..5, q in 2usize..6) {
        let ts = prime_tiling(q, &CornerBonus::default()).unwrap().tileset;
        let lat = SquareLattice::square(n);
        let colours = (0..lat.spin_count()).map(|i| seed[i % seed.len()] % ts.colours as u16).collect();
        let a = Assignment::new(lat, colours);
        prop_assert_eq!(score_assignment(&ts, &a).unwrap(), score_assignment_with(&ts, &a, false).unwrap());
    }
}
