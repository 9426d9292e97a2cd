//! Frontier dynamic program: spins are fixed one at a time in column-major
//! order and the state is the colouring of the spins still needed by an
//! unfinished site. A site is charged when its last spin is fixed.

use std::collections::HashMap;

use crate::lattice::{InteractionSite, SquareLattice};
use crate::tiling::{Assignment, Colour, Compiled, Score, TileSet};
use crate::{Error, Result};

use super::Plan;

#[derive(Clone, Debug)]
pub struct DpOptions {
    /// Abort once a layer holds more states than this.
    pub max_states: usize,
    /// Discard states that provably cannot reach a total at or below this
    /// value (in score units).
    pub upper_bound: Option<Score>,
}

impl Default for DpOptions {
    fn default() -> Self {
        Self {
            max_states: 4_000_000,
            upper_bound: None,
        }
    }
}

pub struct DpOutcome {
    pub min: i64,
    pub colours: Vec<Colour>,
    pub peak_states: usize,
    pub transitions: u64,
}

pub fn solve_column_dp(
    ts: &TileSet,
    lat: &SquareLattice,
    opts: &DpOptions,
) -> Result<(Score, Assignment, u64)> {
    let comp = Compiled::new(ts, lat)?;
    let plan = Plan::new(&comp, &lat.column_major_spins());
    let out = run(&comp, &plan, opts)?;
    Ok((
        comp.to_score(out.min),
        Assignment::new(*lat, out.colours),
        out.transitions,
    ))
}

/// Exact minimum of the sum over an arbitrary subset of sites.
pub fn min_over_sites(
    ts: &TileSet,
    lat: &SquareLattice,
    sites: &[InteractionSite],
    opts: &DpOptions,
) -> Result<(Score, Vec<Colour>)> {
    let comp = Compiled::from_sites(ts, lat.spin_count(), sites)?;
    let plan = Plan::new(&comp, &lat.column_major_spins());
    let out = run(&comp, &plan, opts)?;
    Ok((comp.to_score(out.min), out.colours))
}

struct Layer {
    keys: Vec<Vec<Colour>>,
    cost: Vec<i64>,
    parent: Vec<u32>,
    colour: Vec<Colour>,
}

pub(crate) fn run(comp: &Compiled, plan: &Plan, opts: &DpOptions) -> Result<DpOutcome> {
    let c = comp.colours;
    let n = plan.order.len();
    let ub = opts.upper_bound.as_ref().map(|u| {
        let scaled = u * num_rational::BigRational::from_integer(comp.scale.into());
        let f = scaled.floor().to_integer();
        num_traits::ToPrimitive::to_i64(&f).unwrap_or(i64::MAX / 4) - plan.constant
    });

    // spins alive after each position, in a stable order
    let mut active: Vec<usize> = Vec::new();
    let mut layers: Vec<Layer> = Vec::with_capacity(n);
    let mut prev_keys: Vec<Vec<Colour>> = vec![Vec::new()];
    let mut prev_cost: Vec<i64> = vec![0];
    let mut peak = 1usize;
    let mut transitions = 0u64;
    let mut slot_of = vec![usize::MAX; comp.spin_count];
    let mut scratch = vec![0 as Colour; comp.spin_count];

    for k in 0..n {
        let spin = plan.order[k];
        for (i, &s) in active.iter().enumerate() {
            slot_of[s] = i;
        }
        let mut next_active: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&s| plan.last_use[s] > k)
            .collect();
        if plan.last_use[spin] > k {
            next_active.push(spin);
        }
        let keep: Vec<Option<usize>> = next_active
            .iter()
            .map(|&s| if s == spin { None } else { Some(slot_of[s]) })
            .collect();

        let mut index: HashMap<Vec<Colour>, u32> = HashMap::with_capacity(prev_keys.len() * 2);
        let mut layer = Layer {
            keys: Vec::new(),
            cost: Vec::new(),
            parent: Vec::new(),
            colour: Vec::new(),
        };
        for (pi, key) in prev_keys.iter().enumerate() {
            for (i, &s) in active.iter().enumerate() {
                scratch[s] = key[i];
            }
            for col in 0..c as Colour {
                transitions += 1;
                scratch[spin] = col;
                let mut cost = prev_cost[pi];
                for &si in &plan.closing[k] {
                    let s = &comp.sites[si];
                    cost += s.table[s.index(|i| scratch[i], c)];
                }
                if let Some(ub) = ub {
                    if cost + plan.suffix_min[k + 1] > ub {
                        continue;
                    }
                }
                let new_key: Vec<Colour> = keep
                    .iter()
                    .map(|k| match k {
                        Some(i) => key[*i],
                        None => col,
                    })
                    .collect();
                match index.get(&new_key) {
                    Some(&j) => {
                        let j = j as usize;
                        if cost < layer.cost[j] {
                            layer.cost[j] = cost;
                            layer.parent[j] = pi as u32;
                            layer.colour[j] = col;
                        }
                    }
                    None => {
                        index.insert(new_key.clone(), layer.keys.len() as u32);
                        layer.keys.push(new_key);
                        layer.cost.push(cost);
                        layer.parent.push(pi as u32);
                        layer.colour.push(col);
                    }
                }
            }
        }
        if layer.keys.len() > opts.max_states {
            return Err(Error::StateSpaceTooLarge(opts.max_states));
        }
        if layer.keys.is_empty() {
            return Err(Error::TooLarge(
                "upper bound excludes every assignment".into(),
            ));
        }
        peak = peak.max(layer.keys.len());
        prev_keys = std::mem::take(&mut layer.keys);
        prev_cost = layer.cost.clone();
        layers.push(layer);
        active = next_active;
    }

    let (best_idx, &best) = prev_cost
        .iter()
        .enumerate()
        .min_by_key(|&(i, c)| (*c, i))
        .expect("final layer is non-empty");
    let mut colours = vec![0 as Colour; comp.spin_count];
    let mut idx = best_idx;
    for k in (0..n).rev() {
        let layer = &layers[k];
        colours[plan.order[k]] = layer.colour[idx];
        idx = layer.parent[idx] as usize;
    }
    Ok(DpOutcome {
        min: best + plan.constant,
        colours,
        peak_states: peak,
        transitions,
    })
}
