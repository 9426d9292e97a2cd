//! Minimum score against lattice size, and where it jumps.

use rayon::prelude::*;
use serde::Serialize;

use crate::lattice::SquareLattice;
use crate::prime::{prime_tiling, propagate_pattern, CornerBonus, PrimeTiling};
use crate::tiling::{fmt_rational, Score, TileSet};
use crate::tm::{
    compile_to_tileset, registry_machine, CompiledMachine, TuringMachine, DEFAULT_COLOUR_CAP,
};
use crate::{Error, Result};

use super::{propagate, solve, Method, PropagateOptions};

/// A family of tile sets indexed by nothing but the lattice size.
#[derive(Clone, Debug)]
pub enum Construction {
    Prime { q: usize, bonus: CornerBonus },
    Machine { name: String, tm: TuringMachine },
    Tiles { name: String, tileset: TileSet },
}

impl Construction {
    /// Parses `prime:q=K`, `tm:bbN` or `tm:PATH` (a machine JSON file).
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("unknown construction {s:?}"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "prime" => {
                let q = arg.trim_start_matches("q=").parse().map_err(|_| bad())?;
                Ok(Self::Prime {
                    q,
                    bonus: CornerBonus::default(),
                })
            }
            "tm" => {
                if let Some(tm) = registry_machine(arg) {
                    return Ok(Self::Machine {
                        name: arg.to_string(),
                        tm,
                    });
                }
                let text = std::fs::read_to_string(arg)
                    .map_err(|e| Error::Format(format!("{arg}: {e}")))?;
                Ok(Self::Machine {
                    name: arg.to_string(),
                    tm: TuringMachine::from_json(&text)?,
                })
            }
            "tiles" => {
                let text = std::fs::read_to_string(arg)
                    .map_err(|e| Error::Format(format!("{arg}: {e}")))?;
                Ok(Self::Tiles {
                    name: arg.to_string(),
                    tileset: TileSet::from_json(&text)?,
                })
            }
            _ => Err(bad()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Prime { q, .. } => format!("prime:q={q}"),
            Self::Machine { name, .. } => format!("tm:{name}"),
            Self::Tiles { name, .. } => format!("tiles:{name}"),
        }
    }

    pub fn prepare(&self) -> Result<Prepared> {
        Ok(match self {
            Self::Prime { q, bonus } => Prepared::Prime(prime_tiling(*q, bonus)?),
            Self::Machine { tm, .. } => {
                Prepared::Machine(compile_to_tileset(tm, DEFAULT_COLOUR_CAP)?)
            }
            Self::Tiles { tileset, .. } => Prepared::Tiles(tileset.clone()),
        })
    }
}

/// A construction with its tile set built.
#[derive(Clone, Debug)]
pub enum Prepared {
    Prime(PrimeTiling),
    Machine(CompiledMachine),
    Tiles(TileSet),
}

impl Prepared {
    pub fn tileset(&self) -> &TileSet {
        match self {
            Self::Prime(p) => &p.tileset,
            Self::Machine(m) => &m.tileset,
            Self::Tiles(t) => t,
        }
    }

    /// Minimum score on `lat`: propagation for the generated families, the
    /// exact solvers otherwise.
    pub fn min_score(&self, lat: &SquareLattice) -> Result<(Score, Method)> {
        match self {
            Self::Prime(p) => Ok((propagate_pattern(p, lat)?.score, Method::Propagation)),
            Self::Machine(m) => Ok((
                propagate(&m.tileset, lat, &PropagateOptions::default())?.score,
                Method::Propagation,
            )),
            Self::Tiles(t) => {
                let r = solve(t, lat, None, 50_000_000)?;
                Ok((r.min_score, r.method))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitionReport {
    pub construction: String,
    pub sizes: Vec<usize>,
    #[serde(serialize_with = "ser_scores")]
    pub scores: Vec<Score>,
    pub methods: Vec<Method>,
    pub transition_at: Option<usize>,
}

fn ser_scores<S: serde::Serializer>(v: &[Score], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(fmt_rational))
}

impl TransitionReport {
    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "# construction {}\nN\tmin_score\tmethod\n",
            self.construction
        );
        for ((n, s), m) in self.sizes.iter().zip(&self.scores).zip(&self.methods) {
            out.push_str(&format!("{n}\t{}\t{m:?}\n", fmt_rational(s)));
        }
        match self.transition_at {
            Some(n) => out.push_str(&format!("# transition_at {n}\n")),
            None => out.push_str("# transition_at none\n"),
        }
        out
    }
}

/// First size whose score reaches `hi` after an earlier size was at or
/// below `lo`.
pub fn detect_transition(
    sizes: &[usize],
    scores: &[Score],
    lo: &Score,
    hi: &Score,
) -> Option<usize> {
    let mut seen_low = false;
    for (n, s) in sizes.iter().zip(scores) {
        if seen_low && s >= hi {
            return Some(*n);
        }
        seen_low |= s <= lo;
    }
    None
}

/// Square lattices of each size, solved in parallel; output order follows
/// `sizes`.
pub fn sweep_transition(
    c: &Construction,
    sizes: &[usize],
    lo: &Score,
    hi: &Score,
) -> Result<TransitionReport> {
    let prepared = c.prepare()?;
    let results: Vec<(Score, Method)> = sizes
        .par_iter()
        .map(|&n| prepared.min_score(&SquareLattice::square(n)))
        .collect::<Result<_>>()?;
    let (scores, methods): (Vec<Score>, Vec<Method>) = results.into_iter().unzip();
    let transition_at = detect_transition(sizes, &scores, lo, hi);
    Ok(TransitionReport {
        construction: c.name(),
        sizes: sizes.to_vec(),
        scores,
        methods,
        transition_at,
    })
}
