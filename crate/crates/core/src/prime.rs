//! Prime-periodic tile sets.
//!
//! A row family is a list of rows, each a list of sub-period lengths. Row `i`
//! counts `1..r_i1, 1..r_i2, ...` along its vertical edges, so it repeats
//! every `p_i = sum_j r_ij` columns; its bottom edges carry one label per
//! sub-period. Rows stack in a fixed cyclic order and the first column at
//! which every row completes a cycle is flagged by a penalised star.
//!
//! Colour 0 is black. Labels of row `i` are `l_i..=h_i`, allocated
//! consecutively from 1.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::lattice::{SiteKind, SquareLattice};
use crate::solver::propagate::{propagate, PropagateOptions, Seed};
use crate::tiling::{int, pat, rat, Pattern, TileSet, ABSENT, ANY};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowFamily {
    pub q: usize,
    pub rows: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodReport {
    pub row_periods: Vec<u64>,
    pub overall_period: BigUint,
}

impl RowFamily {
    pub fn new(q: usize, rows: Vec<Vec<usize>>) -> Self {
        Self { q, rows }
    }

    pub fn f(&self) -> usize {
        self.rows.len()
    }

    pub fn periods(&self) -> Vec<u64> {
        self.rows
            .iter()
            .map(|r| r.iter().sum::<usize>() as u64)
            .collect()
    }

    pub fn report(&self) -> PeriodReport {
        let row_periods = self.periods();
        let overall_period = row_periods
            .iter()
            .fold(BigUint::one(), |acc, &p| acc.lcm(&BigUint::from(p)));
        PeriodReport {
            row_periods,
            overall_period,
        }
    }

    /// Lowest label of row `i` (1-based row index).
    pub fn low(&self, i: usize) -> usize {
        self.rows[..i - 1].iter().map(Vec::len).sum::<usize>() + 1
    }

    pub fn high(&self, i: usize) -> usize {
        self.low(i) + self.rows[i - 1].len() - 1
    }

    pub fn labels(&self, i: usize) -> std::ops::RangeInclusive<usize> {
        self.low(i)..=self.high(i)
    }

    /// Row directly above row `i` in the stacking order.
    pub fn above(&self, i: usize) -> usize {
        if i == 1 {
            self.f()
        } else {
            i - 1
        }
    }

    pub fn below(&self, i: usize) -> usize {
        if i == self.f() {
            1
        } else {
            i + 1
        }
    }

    fn is_middle(&self, i: usize) -> bool {
        i > 1 && i < self.f()
    }

    /// Row count, row length, entry range and label budget.
    pub fn validate(&self) -> Result<()> {
        let q = self.q;
        let f = self.f();
        let bad = |m: String| Err(Error::InvalidRowFamily(m));
        if q < 2 {
            return bad(format!("q = {q} leaves no working colours"));
        }
        if f == 0 || f > q {
            return bad(format!("{f} rows for q = {q}"));
        }
        let mut labels = 0;
        for (k, row) in self.rows.iter().enumerate() {
            let i = k + 1;
            if row.is_empty() || row.len() > q {
                return bad(format!("row {i} has {} entries", row.len()));
            }
            let cap = if self.is_middle(i) { q - 1 } else { q };
            if let Some(e) = row.iter().find(|&&e| e == 0 || e > cap) {
                return bad(format!("row {i} entry {e} outside 1..={cap}"));
            }
            labels += row.len();
        }
        if labels > q {
            return bad(format!("{labels} sub-period labels exceed {q} colours"));
        }
        Ok(())
    }

    /// Extra requirements of the tile generator: at least two rows, a single
    /// sub-period in the last row, and every sub-period of length 2 or more.
    pub fn validate_for_generator(&self) -> Result<()> {
        self.validate()?;
        let bad = |m: &str| Err(Error::InvalidRowFamily(m.to_string()));
        if self.f() < 2 {
            return bad("the generator needs at least two rows");
        }
        if self.rows[self.f() - 1].len() != 1 {
            return bad("the last row must have a single sub-period");
        }
        if self.rows.iter().flatten().any(|&e| e < 2) {
            return bad("sub-periods of length 1 are not supported");
        }
        if self.q < 3 && self.rows.iter().skip(1).any(|r| r.len() > 1) {
            return bad("split middle rows need the black colour");
        }
        Ok(())
    }

    pub fn generator_compatible(&self) -> bool {
        self.validate_for_generator().is_ok()
    }
}

/// Splits `p` into `m` entries in `lo..=cap`, largest first.
fn split(p: usize, m: usize, lo: usize, cap: usize) -> Option<Vec<usize>> {
    if p < m * lo || p > m * cap {
        return None;
    }
    let mut out = Vec::with_capacity(m);
    let mut rest = p;
    for j in 0..m {
        let left = m - j - 1;
        let e = cap.min(rest - left * lo);
        out.push(e);
        rest -= e;
    }
    Some(out)
}

/// Exhaustive search for the row family with the largest overall period.
///
/// Ties are broken by: families the tile generator accepts, fewest rows,
/// lexicographically smallest sorted period list, smallest label budget,
/// lexicographically smallest period sequence.
pub fn optimize_row_family(q: usize) -> Result<(RowFamily, PeriodReport)> {
    if !(2..=9).contains(&q) {
        return Err(Error::OutOfSearchRange(q));
    }
    type Key = (
        std::cmp::Reverse<BigUint>,
        bool,
        usize,
        Vec<u64>,
        usize,
        Vec<u64>,
    );
    let mut best: Option<(Key, RowFamily)> = None;

    for f in 1..=q {
        let mut periods = vec![0usize; f];
        let mut ms = vec![0usize; f];
        let mut floor = best
            .as_ref()
            .map_or(BigUint::one(), |(k, _)| k.0 .0.clone());
        search(
            q,
            f,
            0,
            q,
            &mut periods,
            &mut ms,
            BigUint::one(),
            &mut floor,
            &mut |periods, ms| {
                let lcm = periods
                    .iter()
                    .fold(BigUint::one(), |a, &p| a.lcm(&BigUint::from(p)));
                if let Some((k, _)) = &best {
                    if lcm < k.0 .0 {
                        return None;
                    }
                }
                let family = |lo: usize| -> Option<RowFamily> {
                    let rows: Option<Vec<Vec<usize>>> = (0..f)
                        .map(|k| {
                            let cap = if k > 0 && k + 1 < f { q - 1 } else { q };
                            split(periods[k], ms[k], lo, cap)
                        })
                        .collect();
                    rows.map(|rows| RowFamily::new(q, rows))
                };
                let (rf, compatible) = match family(2).filter(|r| r.generator_compatible()) {
                    Some(r) => (r, true),
                    None => match family(1) {
                        Some(r) => (r, false),
                        None => return None,
                    },
                };
                let mut sorted: Vec<u64> = periods.iter().map(|&p| p as u64).collect();
                sorted.sort_unstable();
                let key: Key = (
                    std::cmp::Reverse(lcm),
                    !compatible,
                    f,
                    sorted,
                    ms.iter().sum(),
                    periods.iter().map(|&p| p as u64).collect(),
                );
                let out = key.0 .0.clone();
                if best.as_ref().map_or(true, |(k, _)| key < *k) {
                    best = Some((key, rf));
                }
                Some(out)
            },
        );
    }
    let (_, rf) = best.expect("q >= 2 always admits a family");
    let report = rf.report();
    Ok((rf, report))
}

/// Depth-first enumeration of period sequences. Each period uses the fewest
/// sub-periods it can (more would only spend label budget), and branches
/// whose best possible lcm falls below `floor` are skipped.
#[allow(clippy::too_many_arguments)]
fn search(
    q: usize,
    f: usize,
    k: usize,
    budget: usize,
    periods: &mut Vec<usize>,
    ms: &mut Vec<usize>,
    acc: BigUint,
    floor: &mut BigUint,
    visit: &mut dyn FnMut(&[usize], &[usize]) -> Option<BigUint>,
) {
    if k == f {
        if let Some(l) = visit(periods, ms) {
            if l > *floor {
                *floor = l;
            }
        }
        return;
    }
    let left = f - k - 1;
    let cap = if k > 0 && k + 1 < f { q - 1 } else { q };
    let max_m = budget.saturating_sub(left);
    // optimistic bound: every remaining row gets the largest period allowed
    let rest_bound: BigUint = (k..f)
        .map(|kk| {
            let cap = if kk > 0 && kk + 1 < f { q - 1 } else { q };
            BigUint::from(max_m * cap)
        })
        .product();
    if &acc * rest_bound < *floor {
        return;
    }
    for p in (1..=max_m * cap).rev() {
        let m = p.div_ceil(cap);
        periods[k] = p;
        ms[k] = m;
        let next = acc.lcm(&BigUint::from(p));
        search(q, f, k + 1, budget - m, periods, ms, next, floor, visit);
    }
}

/// Which corner bonus to attach to the all-black tile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CornerBonus {
    /// Extra weight on top of 1; the general construction uses 1/2.
    Extra(BigRational),
}

impl Default for CornerBonus {
    fn default() -> Self {
        CornerBonus::Extra(rat(1, 2))
    }
}

impl CornerBonus {
    /// The five-colour example's weight of 2 on the corner tile.
    pub fn example() -> Self {
        CornerBonus::Extra(int(1))
    }
}

#[derive(Clone, Debug)]
pub struct PrimeTiling {
    pub family: RowFamily,
    pub tileset: TileSet,
    /// Star configuration marking a full period; penalised in `tileset`.
    pub marker: Pattern,
    pub bonus: BigRational,
    pub uses_black: bool,
}

impl PrimeTiling {
    /// Row type of lattice row `y` in the pattern seeded at the bottom-left.
    pub fn row_type(&self, y: usize) -> usize {
        let f = self.family.f();
        f - (y % f)
    }
}

struct Colours<'a> {
    rf: &'a RowFamily,
}

impl Colours<'_> {
    fn q(&self) -> i32 {
        self.rf.q as i32
    }

    /// Colour opening a sub-period other than the first.
    fn partial(&self, _i: usize) -> i32 {
        1
    }

    /// Colour opening the first sub-period when the rows above did not all
    /// wrap in the same column. `None` for the first row, whose wraps always
    /// count as marked.
    fn unmarked(&self, i: usize) -> Option<i32> {
        let rf = self.rf;
        if i == 1 {
            None
        } else if rf.is_middle(i) && rf.rows[i - 1].len() > 1 {
            Some(0)
        } else {
            Some(1)
        }
    }

    /// Colour opening the first sub-period when all rows above wrapped here.
    fn marked(&self, i: usize) -> Option<i32> {
        if i == 1 {
            Some(1)
        } else if self.rf.is_middle(i) {
            Some(self.q())
        } else {
            None
        }
    }

    fn wraps(&self, i: usize) -> Vec<i32> {
        let mut out: Vec<i32> = self.unmarked(i).into_iter().collect();
        if let Some(m) = self.marked(i) {
            if !out.contains(&m) {
                out.push(m);
            }
        }
        out
    }
}

/// Builds the tile and star set for a row family.
pub fn generate_tileset(rf: &RowFamily, bonus: &CornerBonus) -> Result<PrimeTiling> {
    rf.validate_for_generator()?;
    let q = rf.q;
    let f = rf.f();
    let qi = q as i32;
    let cols = Colours { rf };
    let one = int(1);
    let mut ts = TileSet::new(q + 1);
    let use_black = q >= 3;
    let CornerBonus::Extra(extra) = bonus;

    // counting tiles
    for i in 1..=f {
        let row = &rf.rows[i - 1];
        let m = row.len();
        let above = rf.above(i);
        let tops: Vec<i32> = rf.labels(above).map(|t| t as i32).collect();
        for (j, &r) in row.iter().enumerate() {
            let b = (rf.low(i) + j) as i32;
            for c in 1..=r {
                let ws: Vec<i32> = if c > 1 {
                    vec![c as i32]
                } else if j > 0 {
                    vec![cols.partial(i)]
                } else {
                    cols.unmarked(i).or(cols.marked(i)).into_iter().collect()
                };
                let es: Vec<i32> = if c < r {
                    vec![c as i32 + 1]
                } else if j + 1 < m {
                    vec![cols.partial(i)]
                } else {
                    cols.unmarked(i).or(cols.marked(i)).into_iter().collect()
                };
                for &t in &tops {
                    for &w in &ws {
                        for &e in &es {
                            ts.tile([t, e, b, w], one.clone());
                        }
                    }
                }
            }
        }
        // marked alternative around a full wrap, middle rows only
        if rf.is_middle(i) {
            let last = *row.last().unwrap() as i32;
            let first_next = if row[0] > 1 { 2 } else { cols.partial(i) };
            ts.tile(
                [rf.high(above) as i32, qi, rf.high(i) as i32, last],
                one.clone(),
            );
            ts.tile(
                [rf.low(above) as i32, first_next, rf.low(i) as i32, qi],
                one.clone(),
            );
        }
    }

    // row-locking stars
    for i in 1..=f {
        let row = &rf.rows[i - 1];
        let m = row.len();
        for (j, &r) in row.iter().enumerate() {
            let b = (rf.low(i) + j) as i32;
            for c in 2..=r {
                ts.star([c as i32, b, ANY, b], one.clone());
            }
            if j + 1 < m {
                ts.star([cols.partial(i), b + 1, ANY, b], one.clone());
            }
        }
        let (h, l) = (rf.high(i) as i32, rf.low(i) as i32);
        for n in cols.wraps(i) {
            ts.star([n, l, ANY, h], one.clone());
        }
    }

    // wrap marking between consecutive rows of a block
    let mut marker = pat([ANY; 4]);
    for i in 1..f {
        let below = i + 1;
        let (h, l) = (rf.high(i) as i32, rf.low(i) as i32);
        if below == f {
            let mk = cols
                .marked(i)
                .expect("row above the last row carries a mark");
            marker = pat([mk, l, 1, h]);
            ts.star([mk, l, 1, h], int(-2));
        } else {
            if let (Some(mk), Some(u)) = (cols.marked(i), cols.unmarked(below)) {
                ts.star([mk, l, u, h], int(-1));
            }
            if let Some(u) = cols.unmarked(i) {
                ts.star([u, l, qi, h], int(-1));
            }
        }
    }

    if use_black {
        let lf = rf.low(f) as i32;
        let r0 = rf.rows[f - 1][0];
        let second_e = if r0 > 2 { 3 } else { cols.unmarked(f).unwrap() };
        ts.tile([0, 0, 0, 0], &one + extra);
        ts.tile([0, 2, 0, 0], one.clone());
        for t in rf.labels(rf.above(f)) {
            ts.tile([t as i32, second_e, lf, 0], one.clone());
        }
        for i in 1..=f {
            ts.star([2, rf.low(i) as i32, ANY, 0], one.clone());
        }
        ts.star([0, lf, ABSENT, 0], one.clone());
        ts.star([ANY, 0, ANY, 0], int(-1));
        for s in 0..=qi {
            ts.star([0, ANY, s, 0], int(-1));
        }
    }

    // boundary stars: left and right edges are unconstrained
    for c in 0..=qi {
        ts.star([c, ANY, ANY, ABSENT], one.clone());
        ts.star([c, ABSENT, ANY, ANY], one.clone());
    }
    // top edge: unconstrained except that a middle row may not carry a mark
    let mut q_tops: Vec<i32> = Vec::new();
    if rf.rows[0].contains(&q) {
        q_tops.extend(rf.labels(f).map(|t| t as i32));
    }
    if rf.rows[f - 1].contains(&q) {
        q_tops.extend(rf.labels(f - 1).map(|t| t as i32));
    }
    for s in 0..=qi {
        if s != qi {
            ts.star([ABSENT, ANY, s, ANY], one.clone());
        }
    }
    ts.star([ABSENT, ABSENT, qi, ANY], one.clone());
    for e in 0..=qi {
        if q_tops.contains(&e) {
            ts.star([ABSENT, e, qi, ANY], one.clone());
        } else {
            ts.star([ABSENT, e, qi, ABSENT], one.clone());
        }
    }

    ts.validate()?;
    Ok(PrimeTiling {
        family: rf.clone(),
        tileset: ts,
        marker,
        bonus: extra.clone(),
        uses_black: use_black,
    })
}

/// Optimal family for `q` that the generator accepts, with its tile set.
pub fn prime_tiling(q: usize, bonus: &CornerBonus) -> Result<PrimeTiling> {
    let (rf, _) = optimize_row_family(q)?;
    let rf = if rf.generator_compatible() {
        rf
    } else if q == 2 {
        RowFamily::new(2, vec![vec![2], vec![2]])
    } else {
        return Err(Error::InvalidRowFamily(format!(
            "no generator-compatible optimum for q = {q}"
        )));
    };
    generate_tileset(&rf, bonus)
}

/// The periodic pattern on `lat` with the period marker allowed.
pub fn unpenalised_pattern(
    pt: &PrimeTiling,
    lat: &SquareLattice,
) -> Result<crate::tiling::Assignment> {
    let mut ts = pt.tileset.clone();
    ts.star_pieces.retain(|p| p.pattern != pt.marker);
    let p = propagate(&ts, lat, &PropagateOptions::default())?;
    if !p.is_complete() {
        return Err(Error::NotPropagatable {
            spin: 0,
            detail: "unpenalised pattern is frustrated".into(),
        });
    }
    Ok(p.assignment)
}

/// Interior vertices whose star shows the period marker, column by column.
pub fn marker_vertices(pt: &PrimeTiling, a: &crate::tiling::Assignment) -> Vec<(usize, usize)> {
    let lat = &a.lattice;
    let w = crate::tiling::WeightedPiece {
        pattern: pt.marker,
        weight: int(0),
    };
    let mut out = Vec::new();
    for x in 1..=lat.width {
        for y in 1..lat.height {
            if w.matches(a.site_colours(&lat.star(x, y))) {
                out.push((x, y));
            }
        }
    }
    out
}

/// Column of the first vertex, right of the left edge, whose star shows the
/// period marker in the unpenalised pattern.
pub fn first_marker_column(pt: &PrimeTiling, max_cols: usize) -> Result<usize> {
    let lat = SquareLattice::new(max_cols + 1, 2 * pt.family.f());
    let a = unpenalised_pattern(pt, &lat)?;
    marker_vertices(pt, &a)
        .into_iter()
        .map(|(x, _)| x)
        .find(|&x| x <= max_cols)
        .ok_or(Error::MarkerNotFound(max_cols))
}

/// Propagated ground pattern of a prime tiling on `lat`.
pub fn propagate_pattern(
    pt: &PrimeTiling,
    lat: &SquareLattice,
) -> Result<crate::solver::Propagation> {
    let opts = PropagateOptions {
        seed: if pt.uses_black {
            Seed::BestBonusTile
        } else {
            Seed::None
        },
        ..PropagateOptions::default()
    };
    propagate(&pt.tileset, lat, &opts)
}

/// Vertical-edge colours along lattice row `y`, left to right.
pub fn row_vertical_colours(a: &crate::tiling::Assignment, y: usize) -> Vec<u16> {
    (0..=a.lattice.width).map(|x| a.v(x, y)).collect()
}

/// Bottom-edge labels along lattice row `y`.
pub fn row_labels(a: &crate::tiling::Assignment, y: usize) -> Vec<u16> {
    (0..a.lattice.width).map(|x| a.h(x, y)).collect()
}

pub fn site_kind_of_marker() -> SiteKind {
    SiteKind::Star
}
