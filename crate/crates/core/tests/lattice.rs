use std::collections::BTreeSet;

use sizephase::lattice::Edge;
use sizephase::prime::{prime_tiling, propagate_pattern, CornerBonus};
use sizephase::solver::dp::{min_over_sites, DpOptions};
use sizephase::solver::propagate::{propagate, PropagateOptions};
use sizephase::tiling::{score_assignment, score_assignment_with};
use sizephase::tm::{compile_to_tileset, registry_machine, TuringMachine, DEFAULT_COLOUR_CAP};
use sizephase::{SiteKind, SquareLattice};

// Edges listed from vertex coordinates, independently of the index formulas.
fn edge_set(w: usize, h: usize) -> BTreeSet<((usize, usize), (usize, usize))> {
    let mut out = BTreeSet::new();
    for y in 0..=h {
        for x in 0..=w {
            if x < w {
                out.insert(((x, y), (x + 1, y)));
            }
            if y < h {
                out.insert(((x, y), (x, y + 1)));
            }
        }
    }
    out
}

fn endpoints(lat: &SquareLattice, spin: usize) -> ((usize, usize), (usize, usize)) {
    match lat.edge(spin) {
        Edge::H { x, y } => ((x, y), (x + 1, y)),
        Edge::V { x, y } => ((x, y), (x, y + 1)),
    }
}

#[test]
fn site_and_spin_counts_match_vertex_enumeration() {
    for w in 1..=5 {
        for h in 1..=5 {
            let lat = SquareLattice::new(w, h);
            let edges = edge_set(w, h);
            assert_eq!(lat.spin_count(), edges.len());
            let mapped: BTreeSet<_> = (0..lat.spin_count()).map(|s| endpoints(&lat, s)).collect();
            assert_eq!(mapped, edges);
            let sites = lat.enumerate_sites();
            let plaq = sites
                .iter()
                .filter(|s| s.kind == SiteKind::Plaquette)
                .count();
            assert_eq!(plaq, w * h);
            assert_eq!(sites.len() - plaq, (w + 1) * (h + 1));
            assert_eq!(sites.iter().filter(|s| s.is_corner()).count(), 4);
            assert_eq!(lat.enumerate_sites_with(false).len(), sites.len() - 4);
        }
    }
}

#[test]
fn spin_count_examples() {
    assert_eq!(SquareLattice::square(1).spin_count(), 4);
    assert_eq!(SquareLattice::square(2).spin_count(), 12);
    assert_eq!(SquareLattice::new(6, 4).spin_count(), 58);
}

#[test]
fn site_spins_are_the_incident_edges() {
    for (w, h) in [(1, 1), (3, 2), (4, 5)] {
        let lat = SquareLattice::new(w, h);
        for site in lat.enumerate_sites() {
            for s in site.spins() {
                assert!(s < lat.spin_count());
                let (a, b) = endpoints(&lat, s);
                match site.kind {
                    SiteKind::Star => assert!(a == (site.x, site.y) || b == (site.x, site.y)),
                    SiteKind::Plaquette => {
                        for (px, py) in [a, b] {
                            assert!(
                                px >= site.x
                                    && px <= site.x + 1
                                    && py >= site.y
                                    && py <= site.y + 1
                            );
                        }
                    }
                }
            }
            let expect = match site.kind {
                SiteKind::Plaquette => 4,
                SiteKind::Star => {
                    let bx = site.x == 0 || site.x == w;
                    let by = site.y == 0 || site.y == h;
                    4 - bx as usize - by as usize
                }
            };
            assert_eq!(site.arity(), expect);
        }
        assert_eq!(lat.enumerate_sites(), lat.enumerate_sites());
    }
}

#[test]
fn solver_orders_are_permutations() {
    let lat = SquareLattice::new(4, 3);
    for order in [lat.column_major_spins(), lat.interleaved_spins()] {
        let mut v = order.clone();
        v.sort();
        assert_eq!(v, (0..lat.spin_count()).collect::<Vec<_>>());
    }
}

// Dropping the four 2-local stars leaves the generated ground scores alone.
#[test]
fn corner_stars_do_not_change_generated_scores() {
    let pt = prime_tiling(3, &CornerBonus::default()).unwrap();
    let cm = compile_to_tileset(&registry_machine("bb2").unwrap(), DEFAULT_COLOUR_CAP).unwrap();
    for n in [1, 2, 5, 7, 16] {
        let lat = SquareLattice::square(n);
        let a = propagate_pattern(&pt, &lat).unwrap().assignment;
        assert_eq!(
            score_assignment(&pt.tileset, &a).unwrap(),
            score_assignment_with(&pt.tileset, &a, false).unwrap()
        );
        let a = propagate(&cm.tileset, &lat, &PropagateOptions::default())
            .unwrap()
            .assignment;
        assert_eq!(
            score_assignment(&cm.tileset, &a).unwrap(),
            score_assignment_with(&cm.tileset, &a, false).unwrap()
        );
    }
}

// The machine tiling's bottom-right corner carries the bottom-edge rule, so
// single colourings can differ; the exact minimum does not.
#[test]
fn corner_stars_do_not_change_machine_minimum() {
    let machines = [
        registry_machine("bb2").unwrap(),
        registry_machine("bb3").unwrap(),
        TuringMachine::from_rules(2, "A", &[]),
    ];
    for tm in &machines {
        let ts = compile_to_tileset(tm, DEFAULT_COLOUR_CAP).unwrap().tileset;
        for (w, h) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2)] {
            let lat = SquareLattice::new(w, h);
            let with = min_over_sites(
                &ts,
                &lat,
                &lat.enumerate_sites_with(true),
                &DpOptions::default(),
            )
            .unwrap()
            .0;
            let without = min_over_sites(
                &ts,
                &lat,
                &lat.enumerate_sites_with(false),
                &DpOptions::default(),
            )
            .unwrap()
            .0;
            assert_eq!(with, without, "{w}x{h}");
        }
    }
}
