use sizephase::prime::{prime_tiling, CornerBonus};
use sizephase::solver::bruteforce::score_histogram;
use sizephase::solver::min_score_bruteforce;
use sizephase::tiling::{
    int, rat, score_assignment, score_assignment_with, site_contributions, Assignment, TileSet,
    ABSENT, ANY,
};
use sizephase::{Error, SiteKind, SquareLattice};

#[test]
fn empty_set_on_single_plaquette() {
    let lat = SquareLattice::square(1);
    assert_eq!(lat.enumerate_sites().len(), 5);
    let ts = TileSet::new(3);
    for c in 0..3 {
        let a = Assignment::uniform(lat, c);
        assert_eq!(score_assignment(&ts, &a).unwrap(), int(5));
        assert_eq!(score_assignment_with(&ts, &a, false).unwrap(), int(1));
    }
}

#[test]
fn weight_two_piece_contributes_minus_one() {
    let lat = SquareLattice::square(1);
    let mut ts = TileSet::new(2);
    ts.tile([1, 0, 1, 0], int(2));
    let a = Assignment::new(lat, vec![1, 1, 0, 0]);
    let contrib = site_contributions(&ts, &a).unwrap();
    let plaq = contrib
        .iter()
        .find(|(s, _)| s.kind == SiteKind::Plaquette)
        .unwrap();
    assert_eq!(plaq.1, int(-1));
    // plaquette -1 plus four unmatched corners
    assert_eq!(score_assignment(&ts, &a).unwrap(), int(3));
}

#[test]
fn overlapping_pieces_add_weights() {
    let lat = SquareLattice::square(1);
    let mut ts = TileSet::new(2);
    ts.tile([ANY; 4], rat(1, 2));
    ts.tile([ANY, ANY, 0, ANY], rat(1, 3));
    let a = Assignment::uniform(lat, 0);
    let plaq = site_contributions(&ts, &a)
        .unwrap()
        .into_iter()
        .find(|(s, _)| s.kind == SiteKind::Plaquette)
        .unwrap();
    assert_eq!(plaq.1, rat(1, 6));
}

#[test]
fn all_wildcard_pieces_score_zero() {
    let mut ts = TileSet::new(4);
    ts.tile([ANY; 4], int(1));
    ts.star([ANY; 4], int(1));
    for (w, h) in [(1, 1), (2, 3), (5, 4)] {
        let lat = SquareLattice::new(w, h);
        let colours = (0..lat.spin_count()).map(|i| (i * 7 % 4) as u16).collect();
        assert_eq!(
            score_assignment(&ts, &Assignment::new(lat, colours)).unwrap(),
            int(0)
        );
    }
}

#[test]
fn absent_entries_only_match_cut_slots() {
    let lat = SquareLattice::new(2, 1);
    let mut ts = TileSet::new(2);
    ts.star([ANY, ANY, ABSENT, ANY], int(1));
    let a = Assignment::uniform(lat, 0);
    let stars: Vec<_> = site_contributions(&ts, &a)
        .unwrap()
        .into_iter()
        .filter(|(s, _)| s.kind == SiteKind::Star)
        .collect();
    for (s, v) in stars {
        let expect = if s.y == 0 { int(0) } else { int(1) };
        assert_eq!(v, expect, "star at ({}, {})", s.x, s.y);
    }
}

#[test]
fn zero_weight_piece_is_absent() {
    let lat = SquareLattice::new(2, 1);
    let mut with = TileSet::new(2);
    with.tile([1, 1, ANY, 0], int(1));
    let mut extra = with.clone();
    extra.star([0, 1, ANY, ANY], int(0));
    for bits in 0u32..(1 << lat.spin_count()) {
        let colours = (0..lat.spin_count())
            .map(|i| (bits >> i & 1) as u16)
            .collect();
        let a = Assignment::new(lat, colours);
        assert_eq!(
            score_assignment(&with, &a).unwrap(),
            score_assignment(&extra, &a).unwrap()
        );
    }
}

#[test]
fn json_round_trip_preserves_scores() {
    let pt = prime_tiling(3, &CornerBonus::default()).unwrap();
    let back = TileSet::from_json(&pt.tileset.to_json()).unwrap();
    assert_eq!(back, pt.tileset);
    assert!(TileSet::from_json(
        "{\"colours\": 2, \"plaquette_pieces\": [[[0, \"?\", 0, 0], \"1\"]]}"
    )
    .is_err());
}

#[test]
fn out_of_range_colour_is_rejected() {
    let ts = TileSet::new(3);
    let mut colours = vec![0; 4];
    colours[2] = 3;
    let a = Assignment::new(SquareLattice::square(1), colours);
    assert!(matches!(
        score_assignment(&ts, &a),
        Err(Error::ColourOutOfRange {
            colour: 3,
            colours: 3
        })
    ));
}

#[test]
fn neutral_set_has_zero_minimum() {
    let mut ts = TileSet::new(2);
    ts.tile([ANY; 4], int(1));
    ts.star([ANY; 4], int(1));
    let (s, _, _) = min_score_bruteforce(&ts, &SquareLattice::new(2, 1), 1_000_000).unwrap();
    assert_eq!(s, int(0));
}

#[test]
fn bruteforce_minimum_matches_histogram() {
    // the five-colour example set
    let pt = prime_tiling(4, &CornerBonus::example()).unwrap();
    let lat = SquareLattice::square(1);
    let hist = score_histogram(&pt.tileset, &lat, 1 << 20).unwrap();
    assert_eq!(hist.values().sum::<u64>(), 5u64.pow(4));
    let (s, a, _) = min_score_bruteforce(&pt.tileset, &lat, 1 << 20).unwrap();
    assert_eq!(&s, hist.keys().next().unwrap());
    assert_eq!(score_assignment(&pt.tileset, &a).unwrap(), s);
}

// The bonus plaquette forces a penalised corner star; taking both still
// beats the neutral colourings, and enumeration agrees.
#[test]
fn bonus_micro_instance() {
    let lat = SquareLattice::square(1);
    let mut ts = TileSet::new(2);
    ts.tile([1, 1, 1, 1], int(2));
    ts.tile([ANY; 4], int(1));
    ts.star([ANY; 4], int(1));
    ts.star([1, 1, ABSENT, ABSENT], int(-1));
    let (s, a, _) = min_score_bruteforce(&ts, &lat, 1_000_000).unwrap();
    assert_eq!(s, int(-1));
    assert_eq!(a, Assignment::uniform(lat, 1));
    let hist = score_histogram(&ts, &lat, 1 << 10).unwrap();
    assert_eq!(hist.iter().next().unwrap(), (&int(-1), &1));
    assert_eq!(hist[&int(0)], 12);
    assert_eq!(hist[&int(1)], 3);
}
