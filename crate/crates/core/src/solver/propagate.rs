//! Forced propagation for generated tile sets.
//!
//! Spins are fixed column by column. For each column a depth-first search
//! looks for a colouring of that column plus a few lookahead columns in which
//! every completed site is matched without penalty; only the current column
//! is then committed. When no such colouring exists the deepest dead end is
//! recorded as a frustration, the offending sites are allowed to take a
//! penalty, and the search is repeated.

use std::collections::HashSet;

use num_traits::Signed;

use crate::lattice::{Edge, SiteKind, SquareLattice};
use crate::tiling::{
    score_assignment, Assignment, Colour, Compiled, Entry, Pattern, Score, TileSet,
};
use crate::{Error, Result};

use super::Plan;

#[derive(Clone, Debug)]
pub enum Seed {
    None,
    /// The plaquette piece with the largest weight above 1, placed at the
    /// bottom-left plaquette.
    BestBonusTile,
    Tile(Pattern),
}

#[derive(Clone, Debug)]
pub struct PropagateOptions {
    pub lookahead: usize,
    pub seed: Seed,
    /// Fail with `NotPropagatable` if a second penalty-free continuation of
    /// any column exists that differs below the top edge.
    pub check_unique: bool,
    pub node_budget: u64,
    pub max_frustrations: usize,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self {
            lookahead: 1,
            seed: Seed::BestBonusTile,
            check_unique: false,
            node_budget: 5_000_000,
            max_frustrations: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frustration {
    pub kind: SiteKind,
    pub x: usize,
    pub y: usize,
    pub contribution: Score,
}

#[derive(Clone, Debug)]
pub struct Propagation {
    pub assignment: Assignment,
    pub score: Score,
    /// Sites with positive contribution, in the order they were completed.
    pub frustrations: Vec<Frustration>,
    pub nodes: u64,
}

impl Propagation {
    pub fn is_complete(&self) -> bool {
        self.frustrations.is_empty()
    }

    pub fn first_frustration(&self) -> Option<&Frustration> {
        self.frustrations.first()
    }
}

struct Window<'a> {
    comp: &'a Compiled,
    plan: &'a Plan,
    fixed: &'a [Option<Colour>],
    waived: &'a HashSet<usize>,
    budget: u64,
    /// Sites containing each spin.
    touching: &'a [Vec<usize>],
    /// Position of each spin in the plan order.
    pos: &'a [usize],
}

enum WindowResult {
    Found,
    DeadEnd { sites: Vec<usize>, pos: usize },
}

impl Window<'_> {
    fn site_cost(&self, si: usize, colours: &[Colour]) -> i64 {
        let s = &self.comp.sites[si];
        s.table[s.index(|i| colours[i], self.comp.colours)]
    }

    /// Sites closing at `k` that are penalised under the current colours.
    fn violations(&self, k: usize, colours: &[Colour]) -> (Vec<usize>, i64) {
        let mut bad = Vec::new();
        let mut cost = 0;
        for &si in &self.plan.closing[k] {
            let v = self.site_cost(si, colours);
            if v > 0 && !self.waived.contains(&si) {
                bad.push(si);
                cost += v;
            }
        }
        (bad, cost)
    }

    /// Unfinished sites containing the spin at position `k` that can no
    /// longer be completed without penalty, with the least penalty each
    /// must take. With `first_only` the scan stops at the first such site.
    fn blocked(&self, k: usize, colours: &[Colour], first_only: bool) -> (Vec<usize>, i64) {
        let spin = self.plan.order[k];
        let c = self.comp.colours;
        let mut out = Vec::new();
        let mut cost = 0;
        for &si in &self.touching[spin] {
            if self.waived.contains(&si) {
                continue;
            }
            let site = &self.comp.sites[si];
            let mut base = 0usize;
            let mut free: Vec<usize> = Vec::new();
            let mut w = 1usize;
            for &sp in &site.spins {
                if self.pos[sp] > k {
                    free.push(w);
                } else {
                    base += w * colours[sp] as usize;
                }
                w *= c;
            }
            if free.is_empty() {
                continue;
            }
            let mut best = i64::MAX;
            for m in 0..c.pow(free.len() as u32) {
                let mut idx = base;
                let mut r = m;
                for &fw in &free {
                    idx += fw * (r % c);
                    r /= c;
                }
                best = best.min(site.table[idx]);
                if best <= 0 {
                    break;
                }
            }
            if best > 0 {
                out.push(si);
                cost += best;
                if first_only {
                    break;
                }
            }
        }
        (out, cost)
    }

    /// Depth-first search over positions `start..end`. `reject` is called at
    /// position `check_at` and may veto a branch.
    fn search(
        &self,
        start: usize,
        end: usize,
        colours: &mut [Colour],
        nodes: &mut u64,
        check_at: Option<usize>,
        reject: &dyn Fn(&[Colour]) -> bool,
    ) -> Result<WindowResult> {
        let c = self.comp.colours as Colour;
        if start == end {
            return Ok(WindowResult::Found);
        }
        let len = end - start;
        let mut next = vec![0 as Colour; len];
        let mut any_ok = vec![false; len];
        let mut deepest: Option<(usize, Vec<usize>, Colour)> = None;
        let mut d = 0usize;
        let local_start = *nodes;
        loop {
            let k = start + d;
            let spin = self.plan.order[k];
            let candidate = match self.fixed[spin] {
                Some(f) if next[d] <= f => {
                    next[d] = c;
                    Some(f)
                }
                Some(_) => None,
                None if next[d] < c => {
                    next[d] += 1;
                    Some(next[d] - 1)
                }
                None => None,
            };
            let Some(col) = candidate else {
                if !any_ok[d] && deepest.as_ref().map_or(true, |(p, _, _)| k > *p) {
                    deepest = Some(self.dead_end(k, colours));
                }
                if d == 0 {
                    let (pos, sites, _) = deepest.expect("a dead end was recorded");
                    return Ok(WindowResult::DeadEnd { sites, pos });
                }
                d -= 1;
                continue;
            };
            *nodes += 1;
            if *nodes - local_start > self.budget {
                return Err(Error::BudgetExceeded(self.budget));
            }
            colours[spin] = col;
            if !self.violations(k, colours).0.is_empty()
                || !self.blocked(k, colours, true).0.is_empty()
            {
                continue;
            }
            if check_at == Some(k) && reject(colours) {
                continue;
            }
            any_ok[d] = true;
            if d + 1 == len {
                return Ok(WindowResult::Found);
            }
            d += 1;
            next[d] = 0;
            any_ok[d] = false;
        }
    }

    fn dead_end(&self, k: usize, colours: &mut [Colour]) -> (usize, Vec<usize>, Colour) {
        let spin = self.plan.order[k];
        let saved = colours[spin];
        let options: Vec<Colour> = match self.fixed[spin] {
            Some(f) => vec![f],
            None => (0..self.comp.colours as Colour).collect(),
        };
        // least total penalty first, then the fewest completed sites broken,
        // then the sites that close last: a penalty is pushed as far along
        // the sweep as it will go
        let mut best: Option<((i64, i64, i64), Vec<usize>, Colour)> = None;
        for col in options {
            colours[spin] = col;
            let (mut bad, closed) = self.violations(k, colours);
            let (blocked, extra) = self.blocked(k, colours, false);
            bad.extend(blocked);
            let earliest = bad
                .iter()
                .map(|&si| {
                    self.comp.sites[si]
                        .spins
                        .iter()
                        .map(|&sp| self.pos[sp])
                        .max()
                        .unwrap_or(0)
                })
                .min()
                .unwrap_or(usize::MAX);
            let key = (closed + extra, closed, -(earliest as i64));
            if best.as_ref().map_or(true, |(b, _, _)| key < *b) {
                best = Some((key, bad, col));
            }
        }
        colours[spin] = saved;
        let (_, sites, col) = best.expect("at least one colour");
        (k, sites, col)
    }
}

fn seed_pattern(ts: &TileSet, seed: &Seed) -> Option<Pattern> {
    match seed {
        Seed::None => None,
        Seed::Tile(p) => Some(*p),
        Seed::BestBonusTile => {
            let one = num_rational::BigRational::from_integer(1.into());
            ts.plaquette_pieces
                .iter()
                .filter(|p| p.weight > one)
                .fold(None::<&crate::tiling::WeightedPiece>, |acc, p| match acc {
                    Some(a) if a.weight >= p.weight => Some(a),
                    _ => Some(p),
                })
                .map(|p| p.pattern)
        }
    }
}

/// Group of a spin in the interleaved order: column `x` owns `h(x, ·)` and
/// `v(x + 1, ·)`; the left edge joins column 0.
fn column_of(lat: &SquareLattice, spin: usize) -> usize {
    match lat.edge(spin) {
        Edge::H { x, .. } => x,
        Edge::V { x, .. } => x.saturating_sub(1),
    }
}

pub fn propagate(
    ts: &TileSet,
    lat: &SquareLattice,
    opts: &PropagateOptions,
) -> Result<Propagation> {
    let comp = Compiled::new(ts, lat)?;
    let plan = Plan::new(&comp, &lat.interleaved_spins());
    let n = plan.order.len();

    let mut fixed: Vec<Option<Colour>> = vec![None; comp.spin_count];
    if let Some(p) = seed_pattern(ts, &opts.seed) {
        let site = lat.plaquette(0, 0);
        for (e, slot) in p.iter().zip(site.slots) {
            if let (Entry::Colour(c), Some(s)) = (e, slot) {
                fixed[s] = Some(*c);
            }
        }
    }

    // end position (exclusive) of each column
    let mut col_end = vec![0usize; lat.width + 1];
    for (k, &s) in plan.order.iter().enumerate() {
        let x = column_of(lat, s);
        col_end[x] = col_end[x].max(k + 1);
    }
    for x in 1..=lat.width {
        col_end[x] = col_end[x].max(col_end[x - 1]);
    }
    let mut touching = vec![Vec::new(); comp.spin_count];
    for (si, s) in comp.sites.iter().enumerate() {
        for &sp in &s.spins {
            touching[sp].push(si);
        }
    }
    let mut pos = vec![usize::MAX; comp.spin_count];
    for (k, &s) in plan.order.iter().enumerate() {
        pos[s] = k;
    }
    let top_edge: HashSet<usize> = (0..lat.width).map(|x| lat.h(x, lat.height)).collect();

    let mut colours = vec![0 as Colour; comp.spin_count];
    let mut waived: HashSet<usize> = HashSet::new();
    let mut nodes = 0u64;
    let mut committed = 0usize;
    for x in 0..=lat.width {
        let end = col_end[(x + opts.lookahead).min(lat.width)];
        let commit_to = col_end[x];
        loop {
            let win = Window {
                comp: &comp,
                plan: &plan,
                fixed: &fixed,
                waived: &waived,
                budget: opts.node_budget,
                touching: &touching,
                pos: &pos,
            };
            let res = win.search(committed, end, &mut colours, &mut nodes, None, &|_| false);
            match res? {
                WindowResult::Found => {
                    if opts.check_unique && commit_to > committed {
                        let first: Vec<Colour> = plan.order[committed..commit_to]
                            .iter()
                            .map(|&s| colours[s])
                            .collect();
                        let checked: Vec<usize> = plan.order[committed..commit_to]
                            .iter()
                            .copied()
                            .filter(|s| !top_edge.contains(s))
                            .collect();
                        let reference: Vec<Colour> = checked.iter().map(|&s| colours[s]).collect();
                        let mut trial = colours.clone();
                        let same =
                            |c: &[Colour]| checked.iter().zip(&reference).all(|(&s, &r)| c[s] == r);
                        let again = win.search(
                            committed,
                            end,
                            &mut trial,
                            &mut nodes,
                            Some(commit_to - 1),
                            &same,
                        )?;
                        if let WindowResult::Found = again {
                            let spin = checked
                                .iter()
                                .copied()
                                .find(|&s| trial[s] != colours[s])
                                .unwrap_or(plan.order[committed]);
                            return Err(Error::NotPropagatable {
                                spin,
                                detail: format!("column {x} admits two penalty-free colourings"),
                            });
                        }
                        for (&s, &c) in plan.order[committed..commit_to].iter().zip(&first) {
                            colours[s] = c;
                        }
                    }
                    break;
                }
                WindowResult::DeadEnd { sites, pos } => {
                    if sites.is_empty() || waived.len() + sites.len() > opts.max_frustrations {
                        return Err(Error::NotPropagatable {
                            spin: plan.order[pos],
                            detail: "dead end without a site to relax".into(),
                        });
                    }
                    waived.extend(sites);
                }
            }
        }
        committed = commit_to;
    }
    debug_assert_eq!(committed, n);

    let assignment = Assignment::new(*lat, colours.clone());
    let score = score_assignment(ts, &assignment)?;
    let mut frustrations = Vec::new();
    let sites = lat.enumerate_sites();
    for k in 0..n {
        for &si in &plan.closing[k] {
            let site = &sites[si];
            let v = ts.site_contribution(site, assignment.site_colours(site));
            if v.is_positive() {
                frustrations.push(Frustration {
                    kind: site.kind,
                    x: site.x,
                    y: site.y,
                    contribution: v,
                });
            }
        }
    }
    Ok(Propagation {
        assignment,
        score,
        frustrations,
        nodes,
    })
}
