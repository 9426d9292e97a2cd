use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::One;
use sizephase::stabilizer::{build_toric_code, dense_spectrum, gf2_rank, PauliOperator};
use sizephase::tiling::{int, rat};
use sizephase::{SiteKind, SquareLattice};

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

// Full Hamiltonian from 2x2 Pauli matrices, straight from the lattice sites.
fn full_matrix(lat: &SquareLattice) -> DMatrix<f64> {
    let n = lat.spin_count();
    let id = DMatrix::<f64>::identity(2, 2);
    let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let dim = 1 << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for site in lat.enumerate_sites() {
        let spins = site.spins();
        let p = if site.kind == SiteKind::Star { &x } else { &z };
        let mut term = DMatrix::<f64>::identity(1, 1);
        for i in 0..n {
            term = kron(&term, if spins.contains(&i) { p } else { &id });
        }
        h -= term;
    }
    h
}

fn binom(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn single_plaquette_operators() {
    let lat = SquareLattice::square(1);
    let h = build_toric_code(&lat, int(1));
    assert_eq!(h.stars.len(), 4);
    assert_eq!(h.plaquettes.len(), 1);
    assert!(h
        .stars
        .iter()
        .all(|s| s.x.count_ones() == 2 && s.z.is_zero()));
    assert_eq!(h.plaquettes[0].z.ones(), vec![0, 1, 2, 3]);
    assert!(h.plaquettes[0].x.is_zero());
}

#[test]
fn all_terms_commute() {
    for w in 1..=6 {
        for hgt in 1..=6 {
            let lat = SquareLattice::new(w, hgt);
            let h = build_toric_code(&lat, int(1));
            assert!(h.all_commute(), "{w}x{hgt}");
            assert_eq!(h.stars.len(), (w + 1) * (hgt + 1));
            assert_eq!(h.plaquettes.len(), w * hgt);
            assert_eq!(h.rank(), lat.spin_count(), "{w}x{hgt}");
        }
    }
}

#[test]
fn anticommuting_pair_is_detected() {
    let a = PauliOperator::x_type(3, &[0, 1]);
    let b = PauliOperator::z_type(3, &[1, 2]);
    let c = PauliOperator::z_type(3, &[0, 1]);
    assert!(!a.commutes_with(&b));
    assert!(a.commutes_with(&c));
}

#[test]
fn degeneracy_matches_dense() {
    for (w, hgt) in [(1, 1), (2, 1), (2, 2)] {
        let lat = SquareLattice::new(w, hgt);
        let h = build_toric_code(&lat, int(1));
        let s = h.summary();
        let dense = dense_spectrum(&h).unwrap();
        let ground = dense[0];
        let deg = dense.iter().filter(|e| (*e - ground).abs() < 1e-9).count();
        assert_eq!(BigUint::from(deg), s.ground_degeneracy, "{w}x{hgt}");
        assert!((ground - -(h.term_count() as f64)).abs() < 1e-9);
        // every dense eigenvalue sits on a predicted level with the right count
        for (e, count) in &s.level_counts {
            let e: f64 = num_traits::ToPrimitive::to_f64(e).unwrap();
            let n = dense.iter().filter(|x| (*x - e).abs() < 1e-9).count();
            assert_eq!(BigUint::from(n), *count, "{w}x{hgt} level {e}");
        }
        let total: BigUint = s.level_counts.iter().map(|(_, c)| c).sum();
        assert_eq!(total, BigUint::one() << lat.spin_count());
    }
}

#[test]
fn dense_block_form_matches_full_matrix() {
    for (w, hgt) in [(1, 1), (2, 1)] {
        let lat = SquareLattice::new(w, hgt);
        let mut full: Vec<f64> = full_matrix(&lat)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        full.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let blocks = dense_spectrum(&build_toric_code(&lat, int(1))).unwrap();
        for (a, b) in full.iter().zip(&blocks) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn dependent_stabilizer_leaves_rank_unchanged() {
    let h = build_toric_code(&SquareLattice::new(2, 2), int(1));
    let mut ops: Vec<PauliOperator> = h.operators().cloned().collect();
    let before = gf2_rank(&ops);
    ops.push(ops[0].clone());
    ops.push(ops[1].product(&ops[2]));
    assert_eq!(gf2_rank(&ops), before);
    assert_eq!(gf2_rank(&[]), 0);
}

// Star syndromes have even weight (every edge meets two vertices), while
// plaquette syndromes are unconstrained on the open lattice.
#[test]
fn level_counts_from_binomials() {
    for (w, hgt) in [(1, 1), (2, 2), (3, 2), (4, 4)] {
        let lat = SquareLattice::new(w, hgt);
        let h = build_toric_code(&lat, int(1));
        let s = h.summary();
        let (v, f) = ((w + 1) * (hgt + 1), w * hgt);
        for k in 0..=v + f {
            let mut expect = BigUint::from(0u32);
            for a in (0..=v.min(k)).step_by(2) {
                expect += binom(v, a) * binom(f, k - a);
            }
            let got = s
                .level_counts
                .iter()
                .find(|(e, _)| *e == h.level(k))
                .map(|(_, c)| c.clone())
                .unwrap_or_default();
            assert_eq!(got, expect, "{w}x{hgt}, {k} violated");
        }
    }
}

#[test]
fn rescaled_band() {
    for coupling in [int(1), int(2), rat(1, 3)] {
        let h = build_toric_code(&SquareLattice::new(3, 2), coupling.clone());
        let s = h.summary();
        let r = h.low_energy_rescale();
        assert_eq!(r.apply(&s.ground_energy), int(0));
        assert_eq!(r.apply(&s.level_counts[1].0), rat(1, 2));
        assert_eq!(s.gap, Some(&coupling * int(2)));
        assert_eq!(s.ground_degeneracy, BigUint::one());
    }
    // two terms at -1 lie at 1 after rescaling
    let h = build_toric_code(&SquareLattice::square(2), int(5));
    assert_eq!(h.low_energy_rescale().apply(&h.level(2)), int(1));
}

#[test]
fn dense_refuses_large_lattices() {
    let h = build_toric_code(&SquareLattice::square(3), int(1));
    assert!(dense_spectrum(&h).is_err());
}
