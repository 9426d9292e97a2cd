//! Depth-first branch and bound over all colourings.

use std::collections::BTreeMap;

use crate::lattice::SquareLattice;
use crate::tiling::{Assignment, Colour, Compiled, Score, TileSet};
use crate::{Error, Result};

use super::Plan;

/// Exact minimum score with a witness. Spins are assigned in column-major
/// order, colours in increasing order; among optimal assignments the one
/// that is lexicographically smallest in that order is returned.
pub fn min_score_bruteforce(
    ts: &TileSet,
    lat: &SquareLattice,
    budget: u64,
) -> Result<(Score, Assignment, u64)> {
    let comp = Compiled::new(ts, lat)?;
    let plan = Plan::new(&comp, &lat.column_major_spins());
    let (best, colours, nodes) = search(&comp, &plan, budget)?;
    Ok((comp.to_score(best), Assignment::new(*lat, colours), nodes))
}

pub(crate) fn search(comp: &Compiled, plan: &Plan, budget: u64) -> Result<(i64, Vec<Colour>, u64)> {
    let c = comp.colours as Colour;
    let n = plan.order.len();
    let mut colours = vec![0 as Colour; comp.spin_count];
    let mut best = i64::MAX;
    let mut best_colours = colours.clone();
    let mut nodes = 0u64;
    // partial[k] is the cost of sites closed before position k
    let mut partial = vec![0i64; n + 1];
    let mut next = vec![0 as Colour; n + 1];
    let mut k = 0usize;
    if n == 0 {
        return Ok((comp.evaluate(&colours), colours, 0));
    }
    loop {
        if next[k] >= c {
            if k == 0 {
                break;
            }
            k -= 1;
            continue;
        }
        let col = next[k];
        next[k] += 1;
        nodes += 1;
        if nodes > budget {
            return Err(Error::BudgetExceeded(budget));
        }
        colours[plan.order[k]] = col;
        let mut cost = partial[k];
        for &si in &plan.closing[k] {
            let s = &comp.sites[si];
            cost += s.table[s.index(|i| colours[i], comp.colours)];
        }
        if cost + plan.suffix_min[k + 1] >= best {
            continue;
        }
        if k + 1 == n {
            best = cost;
            best_colours.clone_from(&colours);
            continue;
        }
        partial[k + 1] = cost;
        k += 1;
        next[k] = 0;
    }
    // sites without spins contribute a constant
    Ok((best + plan.constant, best_colours, nodes))
}

/// Score of every colouring, indexed with spin 0 as the most significant
/// digit. Refuses more than `cap` colourings.
pub fn all_scores(ts: &TileSet, lat: &SquareLattice, cap: usize) -> Result<Vec<Score>> {
    let comp = Compiled::new(ts, lat)?;
    let c = comp.colours;
    let n = comp.spin_count;
    let total = (c as f64).powi(n as i32);
    if total > cap as f64 {
        return Err(Error::TooLarge(format!("{c}^{n} colourings")));
    }
    let total = total as usize;
    let mut colours = vec![0 as Colour; n];
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut r = idx;
        for i in (0..n).rev() {
            colours[i] = (r % c) as Colour;
            r /= c;
        }
        out.push(comp.to_score(comp.evaluate(&colours)));
    }
    Ok(out)
}

/// Number of colourings at each score, by depth-first enumeration in which
/// each site is evaluated once its last spin is fixed. Refuses more than
/// `cap` colourings.
pub fn score_histogram(
    ts: &TileSet,
    lat: &SquareLattice,
    cap: u64,
) -> Result<BTreeMap<Score, u64>> {
    let comp = Compiled::new(ts, lat)?;
    let c = comp.colours;
    let n = comp.spin_count;
    if (c as f64).powi(n as i32) > cap as f64 {
        return Err(Error::TooLarge(format!("{c}^{n} colourings")));
    }
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut constant = 0i64;
    for (i, s) in comp.sites.iter().enumerate() {
        match s.spins.iter().max() {
            Some(&last) => closing[last].push(i),
            None => constant += s.table[0],
        }
    }
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    if n == 0 {
        counts.insert(constant, 1);
    } else {
        let mut colours = vec![0 as Colour; n];
        let mut partial = vec![constant; n + 1];
        let mut k = 0;
        loop {
            let mut v = partial[k];
            for &i in &closing[k] {
                let s = &comp.sites[i];
                v += s.table[s.index(|j| colours[j], c)];
            }
            if k + 1 == n {
                *counts.entry(v).or_default() += 1;
            } else {
                partial[k + 1] = v;
                k += 1;
                colours[k] = 0;
                continue;
            }
            // advance the odometer
            loop {
                colours[k] += 1;
                if (colours[k] as usize) < c {
                    break;
                }
                if k == 0 {
                    return Ok(counts
                        .into_iter()
                        .map(|(v, m)| (comp.to_score(v), m))
                        .collect());
                }
                k -= 1;
            }
        }
    }
    Ok(counts
        .into_iter()
        .map(|(v, m)| (comp.to_score(v), m))
        .collect())
}
