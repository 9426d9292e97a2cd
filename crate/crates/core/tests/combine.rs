use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sizephase::combine::{
    adjacent_pairs, assemble_paper_model, penalty_energy, CombinedHamiltonian, Lemma2Toy, Sector,
    Signature,
};
use sizephase::solver::bruteforce::all_scores;
use sizephase::solver::sweep::Construction;
use sizephase::solver::Method;
use sizephase::tiling::{int, rat, TileSet, ANY};
use sizephase::{Error, SquareLattice};

const TOL: f64 = 1e-12;

#[test]
fn adjacency_on_single_plaquette() {
    let lat = SquareLattice::square(1);
    // the four sides of the square, each meeting its two neighbours
    let pairs = adjacent_pairs(&lat);
    assert_eq!(pairs.len(), 4);
    for (a, b) in &pairs {
        let (pa, pb) = (lat.midpoint2(*a), lat.midpoint2(*b));
        assert_eq!(((pa.0 - pb.0).abs(), (pa.1 - pb.1).abs()), (1, 1));
    }
}

// Pairs are every two edges at a right angle through a shared vertex.
#[test]
fn adjacency_matches_vertex_count() {
    for (w, h) in [(2, 2), (3, 2), (4, 5)] {
        let lat = SquareLattice::new(w, h);
        let mut expect = 0;
        for y in 0..=h {
            for x in 0..=w {
                let horiz = (x > 0) as usize + (x < w) as usize;
                let vert = (y > 0) as usize + (y < h) as usize;
                expect += horiz * vert;
            }
        }
        assert_eq!(adjacent_pairs(&lat).len(), expect, "{w}x{h}");
    }
}

#[test]
fn penalty_examples() {
    let lat = SquareLattice::new(2, 2);
    let n = lat.spin_count();
    let c = rat(3, 2);
    assert_eq!(
        penalty_energy(&Signature::uniform(n, Sector::Tc), &lat, &c).unwrap(),
        int(0)
    );
    assert_eq!(
        penalty_energy(&Signature::uniform(n, Sector::Cl), &lat, &c).unwrap(),
        int(0)
    );
    let pairs = adjacent_pairs(&lat);
    for spin in 0..n {
        let mut sig = Signature::uniform(n, Sector::Tc);
        sig.0[spin] = Sector::Cl;
        let degree = pairs
            .iter()
            .filter(|(a, b)| *a == spin || *b == spin)
            .count();
        assert_eq!(
            penalty_energy(&sig, &lat, &c).unwrap(),
            &c * int(degree as i64),
            "spin {spin}"
        );
    }
    assert!(penalty_energy(&Signature::uniform(3, Sector::Tc), &lat, &c).is_err());
}

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(v))
}

#[test]
fn two_level_toy() {
    // one spin: sector spectra {0} and {0.3}
    let toy = Lemma2Toy::chain(1, 1, 1, diag(&[0.0]), diag(&[0.3]), 0.9).unwrap();
    let r = toy.check(0.9).unwrap();
    assert_eq!(r.low_levels.len(), 2);
    assert!((r.low_levels[0].0).abs() < TOL && r.low_levels[0].1 == vec![Sector::Tc]);
    assert!((r.low_levels[1].0 - 0.3).abs() < TOL && r.low_levels[1].1 == vec![Sector::Cl]);
}

#[test]
fn zero_hamiltonian_toy() {
    let mu = 0.9;
    let toy = Lemma2Toy::chain(2, 2, 1, DMatrix::zeros(4, 4), DMatrix::zeros(1, 1), mu).unwrap();
    let r = toy.check(mu).unwrap();
    // both pure sectors at zero, every mixed signature at 1 + mu
    assert_eq!(r.low_levels.len(), 5);
    assert!(r.low_levels.iter().all(|(e, _)| e.abs() < TOL));
    let spec = toy.predicted_spectrum();
    assert_eq!(
        spec.iter()
            .filter(|e| (*e - (1.0 + mu)).abs() < TOL)
            .count(),
        9 - 5
    );
    assert!(r.union_error < TOL && r.max_commutator == 0.0);
}

#[test]
fn cutoff_must_sit_below_delta() {
    let toy = Lemma2Toy::chain(1, 1, 1, diag(&[0.0]), diag(&[0.0]), 0.5).unwrap();
    assert!(matches!(toy.check(1.5), Err(Error::CutoffTooHigh { .. })));
    assert!(Lemma2Toy::chain(
        4,
        5,
        5,
        DMatrix::zeros(625, 625),
        DMatrix::zeros(625, 625),
        0.5
    )
    .is_err());
    assert!(Lemma2Toy::chain(2, 2, 2, DMatrix::zeros(3, 3), DMatrix::zeros(4, 4), 0.5).is_err());
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

#[test]
fn random_toys() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..60 {
        let spins: usize = rng.gen_range(1..=3);
        let (d1, d2) = loop {
            let d1: usize = rng.gen_range(1..=5);
            let d2 = rng.gen_range(1..=10 - d1);
            if (d1 + d2).pow(spins as u32) <= 1000 {
                break (d1, d2);
            }
        };
        let h1 = random_symmetric(&mut rng, d1.pow(spins as u32));
        let h2 = random_symmetric(&mut rng, d2.pow(spins as u32));
        let mu = rng.gen_range(0.0..2.0);
        let toy = Lemma2Toy::chain(spins, d1, d2, h1.clone(), h2.clone(), mu).unwrap();
        let r = toy.check(mu).unwrap();
        let scale = 1.0 + h1.norm() + h2.norm() + toy.delta * spins as f64;
        let tol = TOL * scale;
        assert!(
            r.max_commutator <= tol,
            "case {case}: commutator {}",
            r.max_commutator
        );
        assert!(r.union_error <= tol, "case {case}: union {}", r.union_error);
        if spins > 1 {
            assert!(r.max_leak <= tol, "case {case}: leak {}", r.max_leak);
            assert!(r.low_levels.iter().all(|(_, s)| !s.is_empty()));
        }
        assert!(
            r.max_level_mismatch <= tol,
            "case {case}: level {}",
            r.max_level_mismatch
        );
        assert!(
            r.max_residual <= 1e-9 * scale,
            "case {case}: residual {}",
            r.max_residual
        );
    }
}

#[test]
fn q3_sector_switches_at_threshold() {
    let c = Construction::parse("prime:q=3").unwrap();
    for n in [1, 10, 15] {
        let ch = assemble_paper_model(&c, &SquareLattice::square(n)).unwrap();
        assert_eq!(ch.ground(), (rat(-1, 2), Sector::Cl), "N = {n}");
        assert_eq!(ch.delta(), rat(1, 2));
        assert_eq!(ch.gap_lower_bound(), rat(1, 2));
    }
    let ch = assemble_paper_model(&c, &SquareLattice::square(16)).unwrap();
    assert_eq!(ch.ground(), (int(0), Sector::Tc));
    assert_eq!(ch.lambda_min, rat(31, 2));
    assert_eq!(ch.gap_lower_bound(), rat(1, 2));
    let r = ch.report();
    assert_eq!(r.ground_sector, Sector::Tc);
    assert_eq!(r.penalty, "33/2");
}

#[test]
fn low_spectrum_on_single_plaquette() {
    let mut ts = TileSet::new(2);
    ts.tile([1, ANY, ANY, ANY], int(2));
    ts.star([ANY; 4], int(1));
    let lat = SquareLattice::square(1);
    let scores = all_scores(&ts, &lat, 1 << 10).unwrap();
    let min = scores.iter().min().unwrap().clone();
    assert_eq!(min, int(-1));
    let ch =
        CombinedHamiltonian::new("toy".into(), ts, min.clone(), Method::BruteForce, &lat).unwrap();
    assert_eq!(ch.ground(), (min.clone().min(int(0)), Sector::Cl));
    assert_eq!(ch.delta(), int(0));
    assert!(matches!(
        ch.low_spectrum(&int(0), 1 << 10),
        Err(Error::CutoffTooHigh { .. })
    ));
    let levels = ch.low_spectrum(&rat(-1, 2), 1 << 10).unwrap();
    assert_eq!(levels.len(), 1);
    assert_eq!(levels[0].sector, Sector::Cl);
    assert_eq!(levels[0].count, 8u32.into());
}

#[test]
fn low_spectrum_mixes_sectors() {
    let c = Construction::parse("prime:q=3").unwrap();
    let lat = SquareLattice::square(1);
    let ch = assemble_paper_model(&c, &lat).unwrap();
    let levels = ch.low_spectrum(&rat(1, 4), 1 << 20).unwrap();
    let sectors: Vec<_> = levels
        .iter()
        .map(|l| (l.energy.clone(), l.sector))
        .collect();
    assert_eq!(
        sectors,
        vec![
            (rat(-1, 2), Sector::Cl),
            (int(0), Sector::Tc),
            (int(0), Sector::Cl)
        ]
    );
    assert_eq!(levels[1].count, 1u32.into());
}

#[test]
fn example_set_on_single_plaquette() {
    let pt = sizephase::prime::prime_tiling(4, &sizephase::prime::CornerBonus::example()).unwrap();
    let lat = SquareLattice::square(1);
    let scores = all_scores(&pt.tileset, &lat, 1 << 10).unwrap();
    let min = scores.iter().min().unwrap().clone();
    let ch = CombinedHamiltonian::new(
        "example".into(),
        pt.tileset.clone(),
        min.clone(),
        Method::BruteForce,
        &lat,
    )
    .unwrap();
    let (e, sector) = ch.ground();
    assert_eq!(e, min.clone().min(int(0)));
    assert_eq!(sector, if min < int(0) { Sector::Cl } else { Sector::Tc });
    let levels = ch.low_spectrum(&(ch.delta() - rat(1, 4)), 1 << 10).unwrap();
    assert_eq!(levels[0].energy, e);
    assert_eq!(levels[0].sector, sector);
}
