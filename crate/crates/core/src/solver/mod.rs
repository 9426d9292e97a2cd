//! Ground-state engines: brute force, column dynamic program, forced
//! propagation, and size sweeps.

pub mod bounds;
pub mod bruteforce;
pub mod dp;
pub mod propagate;
pub mod sweep;

use serde::Serialize;

use crate::lattice::SquareLattice;
use crate::tiling::{Assignment, Compiled, Score, TileSet};
use crate::Result;

pub use bruteforce::min_score_bruteforce;
pub use dp::{solve_column_dp, DpOptions};
pub use propagate::{propagate, Frustration, PropagateOptions, Propagation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    BruteForce,
    ColumnDp,
    Propagation,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub min_score: Score,
    pub witness: Option<Assignment>,
    pub method: Method,
    pub nodes_explored: u64,
}

/// Spin ordering shared by the exact solvers.
pub(crate) struct Plan {
    /// Spins touched by at least one site, in assignment order.
    pub order: Vec<usize>,
    /// Sites whose last spin is fixed at each position.
    pub closing: Vec<Vec<usize>>,
    /// Sum of per-site minima of the sites closing at or after each position.
    pub suffix_min: Vec<i64>,
    /// Position after which a spin is no longer needed.
    pub last_use: Vec<usize>,
    /// Contribution of sites without spins.
    pub constant: i64,
}

impl Plan {
    pub fn new(comp: &Compiled, spin_order: &[usize]) -> Self {
        let mut used = vec![false; comp.spin_count];
        for s in &comp.sites {
            for &i in &s.spins {
                used[i] = true;
            }
        }
        let order: Vec<usize> = spin_order.iter().copied().filter(|&s| used[s]).collect();
        let mut pos = vec![usize::MAX; comp.spin_count];
        for (k, &s) in order.iter().enumerate() {
            pos[s] = k;
        }
        let n = order.len();
        let mut closing = vec![Vec::new(); n];
        let mut last_use = vec![0usize; comp.spin_count];
        let mut constant = 0;
        let mut close_min = vec![0i64; n + 1];
        for (si, s) in comp.sites.iter().enumerate() {
            match s.spins.iter().map(|&i| pos[i]).max() {
                None => constant += s.table[0],
                Some(k) => {
                    closing[k].push(si);
                    close_min[k] += s.min;
                    for &i in &s.spins {
                        last_use[i] = last_use[i].max(k);
                    }
                }
            }
        }
        let mut suffix_min = vec![0i64; n + 1];
        for k in (0..n).rev() {
            suffix_min[k] = suffix_min[k + 1] + close_min[k];
        }
        Self {
            order,
            closing,
            suffix_min,
            last_use,
            constant,
        }
    }
}

/// Runs the requested engine; `Auto` picks brute force for tiny instances
/// and the dynamic program otherwise.
pub fn solve(
    ts: &TileSet,
    lat: &SquareLattice,
    method: Option<Method>,
    budget: u64,
) -> Result<SolveResult> {
    let method = method.unwrap_or(if lat.spin_count() <= 16 {
        Method::BruteForce
    } else {
        Method::ColumnDp
    });
    match method {
        Method::BruteForce => {
            let (s, a, n) = min_score_bruteforce(ts, lat, budget)?;
            Ok(SolveResult {
                min_score: s,
                witness: Some(a),
                method,
                nodes_explored: n,
            })
        }
        Method::ColumnDp => {
            let (s, a, n) = solve_column_dp(ts, lat, &DpOptions::default())?;
            Ok(SolveResult {
                min_score: s,
                witness: Some(a),
                method,
                nodes_explored: n,
            })
        }
        Method::Propagation => {
            let p = propagate(ts, lat, &PropagateOptions::default())?;
            Ok(SolveResult {
                min_score: p.score.clone(),
                witness: Some(p.assignment),
                method,
                nodes_explored: p.nodes,
            })
        }
    }
}
