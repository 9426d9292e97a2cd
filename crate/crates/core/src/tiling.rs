//! Weighted pieces on plaquette and star sites, and exact scores.
//!
//! A site contributes `1 - sum of weights of matching pieces`. Pieces are
//! translation invariant: every site of a kind sees the same list, optionally
//! extended by per-site overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::lattice::{InteractionSite, SiteKind, SquareLattice};
use crate::{Error, Result};

pub type Colour = u16;
pub type Score = BigRational;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `"3/2"`, `"-1"`, `"0.5"` style parsing.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Format(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((i, f)) = s.split_once('.') {
        let neg = i.starts_with('-');
        let digits = format!("{}{}", i.trim_start_matches(['-', '+']), f);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), f.len());
        let r = BigRational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

pub fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// One position of a piece pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entry {
    Colour(Colour),
    /// Any colour, or no spin at all on a truncated site.
    Any,
    /// Only matches a position cut off by the boundary.
    Absent,
}

impl Entry {
    fn matches(self, c: Option<Colour>) -> bool {
        match (self, c) {
            (Entry::Any, _) => true,
            (Entry::Colour(a), Some(b)) => a == b,
            (Entry::Absent, None) => true,
            _ => false,
        }
    }
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Entry::Colour(c) => s.serialize_u16(*c),
            Entry::Any => s.serialize_str("*"),
            Entry::Absent => s.serialize_str("-"),
        }
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u16),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(c) => Ok(Entry::Colour(c)),
            Raw::S(s) if s == "*" => Ok(Entry::Any),
            Raw::S(s) if s == "-" => Ok(Entry::Absent),
            Raw::S(s) => Err(de::Error::custom(format!("bad pattern entry {s:?}"))),
        }
    }
}

/// Pattern in N, E, S, W order.
pub type Pattern = [Entry; 4];

/// Shorthand for building patterns: `c` is a colour, `ANY` and `ABSENT` are
/// the wildcards.
pub const ANY: i32 = -1;
pub const ABSENT: i32 = -2;

pub fn pat(p: [i32; 4]) -> Pattern {
    p.map(|e| match e {
        ANY => Entry::Any,
        ABSENT => Entry::Absent,
        c => Entry::Colour(c as Colour),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedPiece {
    pub pattern: Pattern,
    pub weight: BigRational,
}

impl WeightedPiece {
    pub fn matches(&self, colours: [Option<Colour>; 4]) -> bool {
        self.pattern.iter().zip(colours).all(|(e, c)| e.matches(c))
    }
}

#[derive(Serialize, Deserialize)]
struct PieceRepr {
    pattern: Pattern,
    weight: String,
}

impl Serialize for WeightedPiece {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PieceRepr {
            pattern: self.pattern,
            weight: fmt_rational(&self.weight),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedPiece {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PieceRepr::deserialize(d)?;
        let weight = parse_rational(&r.weight).map_err(de::Error::custom)?;
        Ok(WeightedPiece {
            pattern: r.pattern,
            weight,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Override {
    pub kind: SiteKind,
    pub x: usize,
    pub y: usize,
    pub pieces: Vec<WeightedPiece>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileSet {
    pub colours: usize,
    pub plaquette_pieces: Vec<WeightedPiece>,
    pub star_pieces: Vec<WeightedPiece>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<Override>,
}

impl TileSet {
    pub fn new(colours: usize) -> Self {
        Self {
            colours,
            plaquette_pieces: Vec::new(),
            star_pieces: Vec::new(),
            overrides: Vec::new(),
        }
    }

    pub fn pieces(&self, kind: SiteKind) -> &[WeightedPiece] {
        match kind {
            SiteKind::Plaquette => &self.plaquette_pieces,
            SiteKind::Star => &self.star_pieces,
        }
    }

    /// Adds a piece, merging its weight into an identical pattern if present.
    pub fn add(&mut self, kind: SiteKind, pattern: Pattern, weight: BigRational) {
        let list = match kind {
            SiteKind::Plaquette => &mut self.plaquette_pieces,
            SiteKind::Star => &mut self.star_pieces,
        };
        if let Some(p) = list.iter_mut().find(|p| p.pattern == pattern) {
            p.weight += weight;
        } else {
            list.push(WeightedPiece { pattern, weight });
        }
    }

    pub fn tile(&mut self, p: [i32; 4], weight: BigRational) {
        self.add(SiteKind::Plaquette, pat(p), weight);
    }

    pub fn star(&mut self, p: [i32; 4], weight: BigRational) {
        self.add(SiteKind::Star, pat(p), weight);
    }

    pub fn validate(&self) -> Result<()> {
        if self.colours == 0 || self.colours > 255 {
            return Err(Error::InvalidTileSet(format!(
                "colour count {} out of range",
                self.colours
            )));
        }
        let all = self
            .plaquette_pieces
            .iter()
            .map(|p| (SiteKind::Plaquette, p))
            .chain(self.star_pieces.iter().map(|p| (SiteKind::Star, p)));
        let mut seen = std::collections::HashSet::new();
        for (kind, p) in all {
            for e in p.pattern {
                if let Entry::Colour(c) = e {
                    if c as usize >= self.colours {
                        return Err(Error::InvalidTileSet(format!(
                            "piece {:?} uses colour {c}",
                            p.pattern
                        )));
                    }
                }
            }
            if kind == SiteKind::Plaquette && p.pattern.contains(&Entry::Absent) {
                return Err(Error::InvalidTileSet(
                    "plaquettes are never truncated".into(),
                ));
            }
            if !seen.insert((kind, p.pattern)) {
                return Err(Error::InvalidTileSet(format!(
                    "duplicate piece {:?}",
                    p.pattern
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tile sets always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let ts: TileSet = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        ts.validate()?;
        Ok(ts)
    }

    pub fn site_pieces<'a>(
        &'a self,
        site: &InteractionSite,
    ) -> impl Iterator<Item = &'a WeightedPiece> + 'a {
        let (kind, x, y) = (site.kind, site.x, site.y);
        let extra = self
            .overrides
            .iter()
            .filter(move |o| o.kind == kind && o.x == x && o.y == y)
            .flat_map(|o| o.pieces.iter());
        self.pieces(kind).iter().chain(extra)
    }

    /// Contribution `1 - sum w` of one site given the colours at its slots.
    pub fn site_contribution(
        &self,
        site: &InteractionSite,
        colours: [Option<Colour>; 4],
    ) -> BigRational {
        let mut total = BigRational::one();
        for p in self.site_pieces(site) {
            if p.matches(colours) {
                total -= &p.weight;
            }
        }
        total
    }

    /// Common denominator of all weights.
    pub fn denominator(&self) -> BigInt {
        let mut d = BigInt::one();
        let all = self.plaquette_pieces.iter().chain(&self.star_pieces);
        for p in all.chain(self.overrides.iter().flat_map(|o| o.pieces.iter())) {
            d = d.lcm(p.weight.denom());
        }
        d
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub lattice: SquareLattice,
    pub colours: Vec<Colour>,
}

impl Assignment {
    pub fn new(lattice: SquareLattice, colours: Vec<Colour>) -> Self {
        assert_eq!(colours.len(), lattice.spin_count());
        Self { lattice, colours }
    }

    pub fn uniform(lattice: SquareLattice, c: Colour) -> Self {
        Self {
            lattice,
            colours: vec![c; lattice.spin_count()],
        }
    }

    pub fn site_colours(&self, site: &InteractionSite) -> [Option<Colour>; 4] {
        site.slots.map(|s| s.map(|i| self.colours[i]))
    }

    pub fn h(&self, x: usize, y: usize) -> Colour {
        self.colours[self.lattice.h(x, y)]
    }

    pub fn v(&self, x: usize, y: usize) -> Colour {
        self.colours[self.lattice.v(x, y)]
    }
}

#[derive(Serialize, Deserialize)]
struct AssignmentRepr {
    width: usize,
    height: usize,
    colours: Vec<Colour>,
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AssignmentRepr {
            width: self.lattice.width,
            height: self.lattice.height,
            colours: self.colours.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = AssignmentRepr::deserialize(d)?;
        if r.width == 0 || r.height == 0 {
            return Err(de::Error::custom("empty lattice"));
        }
        let lattice = SquareLattice::new(r.width, r.height);
        if r.colours.len() != lattice.spin_count() {
            return Err(de::Error::custom("colour list does not match lattice"));
        }
        Ok(Assignment {
            lattice,
            colours: r.colours,
        })
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::render::ascii(self, &[]))
    }
}

fn check_colours(ts: &TileSet, a: &Assignment) -> Result<()> {
    if let Some(&c) = a.colours.iter().find(|&&c| c as usize >= ts.colours) {
        return Err(Error::ColourOutOfRange {
            colour: c as usize,
            colours: ts.colours,
        });
    }
    Ok(())
}

pub fn score_assignment(ts: &TileSet, a: &Assignment) -> Result<Score> {
    score_assignment_with(ts, a, true)
}

pub fn score_assignment_with(ts: &TileSet, a: &Assignment, corner_stars: bool) -> Result<Score> {
    check_colours(ts, a)?;
    let mut total = BigRational::zero();
    for site in a.lattice.enumerate_sites_with(corner_stars) {
        total += ts.site_contribution(&site, a.site_colours(&site));
    }
    Ok(total)
}

/// The eigenvalue of the basis state `a` under the diagonal Hamiltonian built
/// from `ts`; identical to the score.
pub fn eigenvalue_of_basis_state(ts: &TileSet, a: &Assignment) -> Result<Score> {
    score_assignment(ts, a)
}

/// Per-site contributions, in `enumerate_sites` order.
pub fn site_contributions(ts: &TileSet, a: &Assignment) -> Result<Vec<(InteractionSite, Score)>> {
    check_colours(ts, a)?;
    Ok(a.lattice
        .enumerate_sites()
        .into_iter()
        .map(|s| {
            let c = ts.site_contribution(&s, a.site_colours(&s));
            (s, c)
        })
        .collect())
}

/// A site with its contribution table over the colours of its present spins,
/// scaled to integers.
#[derive(Clone, Debug)]
pub struct CompiledSite {
    pub spins: Vec<usize>,
    pub table: Arc<Vec<i64>>,
    pub min: i64,
}

impl CompiledSite {
    pub fn index(&self, colour_of: impl Fn(usize) -> Colour, base: usize) -> usize {
        let mut idx = 0usize;
        for &s in self.spins.iter().rev() {
            idx = idx * base + colour_of(s) as usize;
        }
        idx
    }
}

/// Integer-scaled form of a tile set on a particular site list, used by the
/// solvers. Contributions are multiplied by `scale`.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub colours: usize,
    pub spin_count: usize,
    pub scale: i64,
    pub sites: Vec<CompiledSite>,
}

impl Compiled {
    pub fn new(ts: &TileSet, lat: &SquareLattice) -> Result<Self> {
        Self::from_sites(ts, lat.spin_count(), &lat.enumerate_sites())
    }

    pub fn from_sites(ts: &TileSet, spin_count: usize, sites: &[InteractionSite]) -> Result<Self> {
        ts.validate()?;
        let scale = ts
            .denominator()
            .to_i64()
            .filter(|d| *d < (1 << 20))
            .ok_or_else(|| {
                Error::InvalidTileSet("weight denominators too large for the solver".into())
            })?;
        let mut cache: BTreeMap<(SiteKind, [bool; 4]), Arc<Vec<i64>>> = BTreeMap::new();
        let mut out = Vec::with_capacity(sites.len());
        for site in sites {
            let mask = site.slots.map(|s| s.is_some());
            let has_override = ts
                .overrides
                .iter()
                .any(|o| o.kind == site.kind && o.x == site.x && o.y == site.y);
            let table = if has_override {
                Arc::new(build_table(ts, site, scale)?)
            } else if let Some(t) = cache.get(&(site.kind, mask)) {
                t.clone()
            } else {
                let t = Arc::new(build_table(ts, site, scale)?);
                cache.insert((site.kind, mask), t.clone());
                t
            };
            let min = *table.iter().min().expect("non-empty table");
            out.push(CompiledSite {
                spins: site.spins(),
                table,
                min,
            });
        }
        Ok(Self {
            colours: ts.colours,
            spin_count,
            scale,
            sites: out,
        })
    }

    pub fn to_score(&self, v: i64) -> Score {
        rat(v, self.scale)
    }

    pub fn evaluate(&self, colours: &[Colour]) -> i64 {
        self.sites
            .iter()
            .map(|s| s.table[s.index(|i| colours[i], self.colours)])
            .sum()
    }
}

fn build_table(ts: &TileSet, site: &InteractionSite, scale: i64) -> Result<Vec<i64>> {
    let c = ts.colours;
    let present: Vec<usize> = (0..4).filter(|&k| site.slots[k].is_some()).collect();
    let size = c.pow(present.len() as u32);
    let mut table = Vec::with_capacity(size);
    let pieces: Vec<&WeightedPiece> = ts.site_pieces(site).collect();
    for idx in 0..size {
        let mut cols = [None; 4];
        let mut r = idx;
        for &k in &present {
            cols[k] = Some((r % c) as Colour);
            r /= c;
        }
        let mut v = BigRational::one();
        for p in &pieces {
            if p.matches(cols) {
                v -= &p.weight;
            }
        }
        let scaled = v * BigRational::from_integer(BigInt::from(scale));
        debug_assert!(scaled.is_integer());
        let n = scaled
            .to_integer()
            .to_i64()
            .filter(|n| n.abs() < (1 << 40))
            .ok_or_else(|| Error::InvalidTileSet("weights too large for the solver".into()))?;
        table.push(n);
    }
    Ok(table)
}

/// Largest absolute weight, used by reports.
pub fn max_abs_weight(ts: &TileSet) -> BigRational {
    ts.plaquette_pieces
        .iter()
        .chain(&ts.star_pieces)
        .map(|p| p.weight.abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}
