//! Turing machines, Busy Beaver data, and the machine-to-tiles compiler.
//!
//! The compiled tiling writes the run along anti-diagonals. Level `t` holds
//! the edges `v(x, t - x)` and `h(x, t - x)`, read from the top-left
//! (`v(0, t)`) to the bottom-right (`h(t, 0)`), so it has `2t + 2` cells and
//! grows by one cell at each end per step. Every plaquette and star maps two
//! consecutive cells of one level (W, S) to the cells at the same tape
//! indices of the next level (N, E).
//!
//! Vertical edges hold a tape symbol or the machine state; the state sits
//! just right of the symbol it reads. Horizontal edges hold a pair
//! (symbol, register) or one of two boundary blanks. The register carries the
//! symbol a transition star read over to its partner tile.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::SquareLattice;
use crate::tiling::{int, Assignment, Colour, Entry, Pattern, TileSet};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    #[serde(alias = "L", alias = "left")]
    Left,
    #[serde(alias = "R", alias = "right")]
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub state: usize,
    pub read: usize,
    pub write: usize,
    pub mv: Move,
    pub next: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    pub states: Vec<String>,
    /// Symbol 0 is the blank.
    pub symbols: Vec<String>,
    pub initial: usize,
    pub delta: Vec<Transition>,
}

#[derive(Serialize, Deserialize)]
struct RawTransition {
    state: String,
    read: String,
    write: String,
    #[serde(rename = "move")]
    mv: Move,
    next: String,
}

#[derive(Serialize, Deserialize)]
struct RawMachine {
    states: Vec<String>,
    symbols: Vec<String>,
    initial: String,
    delta: Vec<RawTransition>,
}

impl TuringMachine {
    /// Builds a machine from `"A0:1RB"`-style rules over symbols `0..k`.
    /// Every state mentioned is created in order of appearance.
    pub fn from_rules(symbols: usize, initial: &str, rules: &[&str]) -> Self {
        let mut states: Vec<String> = vec![initial.to_string()];
        let idx = |s: &str, states: &mut Vec<String>| match states.iter().position(|x| x == s) {
            Some(i) => i,
            None => {
                states.push(s.to_string());
                states.len() - 1
            }
        };
        let mut delta = Vec::new();
        for r in rules {
            let (lhs, rhs) = r.split_once(':').expect("rule has a colon");
            let (q, s) = lhs.split_at(lhs.len() - 1);
            let b = rhs.as_bytes();
            let write = (b[0] - b'0') as usize;
            let mv = if b[1] == b'L' {
                Move::Left
            } else {
                Move::Right
            };
            let next = std::str::from_utf8(&b[2..]).unwrap();
            let state = idx(q, &mut states);
            let next = idx(next, &mut states);
            delta.push(Transition {
                state,
                read: s.parse().unwrap(),
                write,
                mv,
                next,
            });
        }
        Self {
            states,
            symbols: (0..symbols).map(|i| i.to_string()).collect(),
            initial: 0,
            delta,
        }
    }

    pub fn lookup(&self, state: usize, symbol: usize) -> Option<&Transition> {
        self.delta
            .iter()
            .find(|t| t.state == state && t.read == symbol)
    }

    /// States with at least one outgoing transition, plus the initial state.
    pub fn active_states(&self) -> Vec<usize> {
        (0..self.states.len())
            .filter(|&q| q == self.initial || self.delta.iter().any(|t| t.state == q))
            .collect()
    }

    pub fn is_active(&self, q: usize) -> bool {
        q == self.initial || self.delta.iter().any(|t| t.state == q)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Format(m));
        if self.symbols.is_empty() || self.states.is_empty() || self.initial >= self.states.len() {
            return bad("machine needs a blank symbol and an initial state".into());
        }
        let mut seen = BTreeSet::new();
        for t in &self.delta {
            if t.state >= self.states.len() || t.next >= self.states.len() {
                return bad(format!("transition refers to unknown state: {t:?}"));
            }
            if t.read >= self.symbols.len() || t.write >= self.symbols.len() {
                return bad(format!("transition refers to unknown symbol: {t:?}"));
            }
            if !seen.insert((t.state, t.read)) {
                return bad(format!(
                    "two transitions for ({}, {})",
                    self.states[t.state], self.symbols[t.read]
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let raw = RawMachine {
            states: self.states.clone(),
            symbols: self.symbols.clone(),
            initial: self.states[self.initial].clone(),
            delta: self
                .delta
                .iter()
                .map(|t| RawTransition {
                    state: self.states[t.state].clone(),
                    read: self.symbols[t.read].clone(),
                    write: self.symbols[t.write].clone(),
                    mv: t.mv,
                    next: self.states[t.next].clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("machine serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawMachine = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        let find = |list: &[String], name: &str, what: &str| {
            list.iter()
                .position(|x| x == name)
                .ok_or_else(|| Error::Format(format!("unknown {what} {name:?}")))
        };
        let mut delta = Vec::new();
        for t in &raw.delta {
            delta.push(Transition {
                state: find(&raw.states, &t.state, "state")?,
                read: find(&raw.symbols, &t.read, "symbol")?,
                write: find(&raw.symbols, &t.write, "symbol")?,
                mv: t.mv,
                next: find(&raw.states, &t.next, "state")?,
            });
        }
        let tm = Self {
            initial: find(&raw.states, &raw.initial, "state")?,
            states: raw.states,
            symbols: raw.symbols,
            delta,
        };
        tm.validate()?;
        Ok(tm)
    }
}

/// Tape contents over a window of cells at one time step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Snapshot {
    pub state: usize,
    /// Cell under the head.
    pub head: i64,
    /// Index of the first cell in `tape`.
    pub offset: i64,
    pub tape: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunTrace {
    pub steps: Vec<Snapshot>,
    pub halted: bool,
    pub step_count: u64,
}

impl fmt::Display for RunTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, s) in self.steps.iter().enumerate() {
            write!(f, "{t:>4} ")?;
            for (k, c) in s.tape.iter().enumerate() {
                let cell = s.offset + k as i64;
                if cell == s.head {
                    write!(f, "[{c}]")?;
                } else {
                    write!(f, " {c} ")?;
                }
            }
            writeln!(f, "  state {}", s.state)?;
        }
        writeln!(f, "steps {} halted {}", self.step_count, self.halted)
    }
}

/// Runs from a blank tape. Snapshot `t` covers cells `-(t+1)..=t+1`.
pub fn simulate(tm: &TuringMachine, max_steps: u64) -> RunTrace {
    let mut tape: HashMap<i64, usize> = HashMap::new();
    let mut head = 0i64;
    let mut state = tm.initial;
    let snap = |t: u64, state: usize, head: i64, tape: &HashMap<i64, usize>| {
        let r = t as i64 + 1;
        Snapshot {
            state,
            head,
            offset: -r,
            tape: (-r..=r).map(|c| *tape.get(&c).unwrap_or(&0)).collect(),
        }
    };
    let mut steps = vec![snap(0, state, head, &tape)];
    let mut t = 0u64;
    let mut halted = false;
    loop {
        let read = *tape.get(&head).unwrap_or(&0);
        let Some(tr) = tm.lookup(state, read) else {
            halted = true;
            break;
        };
        if t == max_steps {
            break;
        }
        tape.insert(head, tr.write);
        head += match tr.mv {
            Move::Left => -1,
            Move::Right => 1,
        };
        state = tr.next;
        t += 1;
        steps.push(snap(t, state, head, &tape));
    }
    RunTrace {
        steps,
        halted,
        step_count: t,
    }
}

/// Step count without keeping snapshots; `None` if still running.
pub fn count_steps(tm: &TuringMachine, max_steps: u64) -> Option<u64> {
    let mut tape: HashMap<i64, usize> = HashMap::new();
    let (mut head, mut state) = (0i64, tm.initial);
    for t in 0..=max_steps {
        let read = *tape.get(&head).unwrap_or(&0);
        let Some(tr) = tm.lookup(state, read) else {
            return Some(t);
        };
        tape.insert(head, tr.write);
        head += if tr.mv == Move::Left { -1 } else { 1 };
        state = tr.next;
    }
    None
}

/// `max{|A|^2 + 2, |A| + |Q|}` with `Q` the states that can act.
pub fn colour_count(tm: &TuringMachine) -> usize {
    colour_formula(tm.symbols.len(), tm.active_states().len())
}

pub fn colour_formula(symbols: usize, states: usize) -> usize {
    (symbols * symbols + 2).max(symbols + states)
}

/// `floor(s / sqrt 2)` in exact integer arithmetic.
pub fn threshold_estimate(step_count: &BigUint) -> BigUint {
    (step_count * step_count / 2u32).sqrt()
}

/// A positive number `mantissa * 10^exponent`, for values too large to
/// write out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sci {
    pub mantissa: f64,
    pub exponent: i64,
}

impl Sci {
    pub fn new(mantissa: f64, exponent: i64) -> Self {
        let mut s = Self { mantissa, exponent };
        s.normalise();
        s
    }

    fn normalise(&mut self) {
        while self.mantissa >= 10.0 {
            self.mantissa /= 10.0;
            self.exponent += 1;
        }
        while self.mantissa > 0.0 && self.mantissa < 1.0 {
            self.mantissa *= 10.0;
            self.exponent -= 1;
        }
    }

    /// Exact integer value; only for moderate exponents.
    pub fn to_biguint(&self, digits: u32) -> BigUint {
        let scale = 10f64.powi(digits as i32);
        let m = (self.mantissa * scale).round() as u64;
        let e = self.exponent - digits as i64;
        if e >= 0 {
            BigUint::from(m) * BigUint::from(10u32).pow(e as u32)
        } else {
            BigUint::from(m) / BigUint::from(10u32).pow((-e) as u32)
        }
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        if n.is_zero() {
            return Self {
                mantissa: 0.0,
                exponent: 0,
            };
        }
        let s = n.to_str_radix(10);
        let lead: String = s.chars().take(17).collect();
        let m: f64 = lead.parse::<f64>().unwrap() / 10f64.powi(lead.len() as i32 - 1);
        Self::new(m, s.len() as i64 - 1)
    }

    /// Natural logarithm.
    pub fn ln(&self) -> f64 {
        self.mantissa.ln() + self.exponent as f64 * std::f64::consts::LN_10
    }

    /// Rounded to `sig` significant figures, as `m.m·10^e`.
    pub fn display(&self, sig: usize) -> String {
        let mut r = *self;
        let f = 10f64.powi(sig as i32 - 1);
        r.mantissa = (r.mantissa * f).round() / f;
        r.normalise();
        format!("{:.*}e{}", sig.saturating_sub(1), r.mantissa, r.exponent)
    }
}

/// `floor(s / sqrt 2)` for a step count given as `m * 10^e`, to the
/// precision of the mantissa. Uses exact integer arithmetic on
/// `round(m * 10^digits) * 10^(e - digits)`.
pub fn threshold_estimate_sci(s: Sci) -> Sci {
    let digits = 15u32;
    if s.exponent >= digits as i64 {
        // s = m' * 10^k with integer m', so s/sqrt2 = floor(sqrt(m'^2 / 2)) * 10^k
        // to the precision of m'
        let m = BigUint::from((s.mantissa * 10f64.powi(digits as i32)).round() as u128);
        let k = s.exponent - digits as i64;
        let root = (&m * &m / 2u32).sqrt();
        let r = Sci::from_biguint(&root);
        Sci::new(r.mantissa, r.exponent + k)
    } else {
        let n = threshold_estimate(&s.to_biguint(digits));
        Sci::from_biguint(&n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum StepCount {
    Exact(u64),
    AtLeast(Sci),
}

#[derive(Clone, Debug, Serialize)]
pub struct BusyBeaver {
    pub states: usize,
    pub steps: StepCount,
    #[serde(skip)]
    pub machine: Option<TuringMachine>,
}

/// Two-symbol step champions. Machines are shipped for 2..=4 states; for 5
/// and 6 states only the lower bounds on the step count are recorded.
pub fn busy_beaver(states: usize) -> Option<BusyBeaver> {
    let (steps, machine) = match states {
        2 => (
            StepCount::Exact(6),
            Some(TuringMachine::from_rules(
                2,
                "A",
                &["A0:1RB", "A1:1LB", "B0:1LA", "B1:1RH"],
            )),
        ),
        3 => (
            StepCount::Exact(21),
            Some(TuringMachine::from_rules(
                2,
                "A",
                &["A0:1RB", "A1:1RH", "B0:1LB", "B1:0RC", "C0:1LC", "C1:1LA"],
            )),
        ),
        4 => (
            StepCount::Exact(107),
            Some(TuringMachine::from_rules(
                2,
                "A",
                &[
                    "A0:1RB", "A1:1LB", "B0:1LA", "B1:0LC", "C0:1RH", "C1:1LD", "D0:1RD", "D1:0RA",
                ],
            )),
        ),
        5 => (StepCount::AtLeast(Sci::new(4.7, 7)), None),
        6 => (StepCount::AtLeast(Sci::new(7.4, 36534)), None),
        _ => return None,
    };
    Some(BusyBeaver {
        states,
        steps,
        machine,
    })
}

pub fn registry_machine(name: &str) -> Option<TuringMachine> {
    let n: usize = name.strip_prefix("bb")?.parse().ok()?;
    busy_beaver(n)?.machine
}

#[derive(Clone, Debug, Serialize)]
pub struct BusyBeaverRow {
    pub states: usize,
    pub colours: usize,
    pub steps: String,
    pub threshold: String,
}

/// Rows of the colour and threshold table for 3..=6 states.
pub fn busy_beaver_table() -> Vec<BusyBeaverRow> {
    (3..=6)
        .map(|q| {
            let bb = busy_beaver(q).unwrap();
            let (steps, threshold) = match bb.steps {
                StepCount::Exact(s) => (
                    s.to_string(),
                    threshold_estimate(&BigUint::from(s)).to_string(),
                ),
                StepCount::AtLeast(s) => (s.display(2), threshold_estimate_sci(s).display(2)),
            };
            BusyBeaverRow {
                states: q,
                colours: colour_formula(2, q),
                steps,
                threshold,
            }
        })
        .collect()
}

/// How a state value came to sit on an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Arrival {
    /// Written by a star after a left move.
    Left,
    /// Written by a tile after a right move.
    Right,
    /// Placed by the corner tile.
    Start,
}

/// Meaning of the colours of a compiled machine.
#[derive(Clone, Debug, Serialize)]
pub struct TmColourMap {
    pub symbols: usize,
    /// `(state, arrivals)` for each vertical state colour, starting at
    /// colour `symbols`.
    pub state_colours: Vec<(usize, Vec<Arrival>)>,
    pub colours: usize,
    /// Horizontal blank on the left boundary.
    pub left_blank: Colour,
    /// Horizontal blank on the bottom boundary.
    pub bottom_blank: Colour,
}

impl TmColourMap {
    /// Splits a state's colour only where sharing would let two unrelated
    /// pieces create a head from nothing: left and right arrivals always get
    /// separate colours, and the start colour is shared with the right one,
    /// or with the left one if no left move on a blank lands there.
    pub fn new(tm: &TuringMachine) -> Self {
        let a = tm.symbols.len();
        let mut state_colours = Vec::new();
        for q in 0..tm.states.len() {
            if !tm.is_active(q) {
                continue;
            }
            let into = |m: Move| tm.delta.iter().any(|t| t.next == q && t.mv == m);
            let left_on_blank = tm
                .delta
                .iter()
                .any(|t| t.next == q && t.mv == Move::Left && t.read == 0);
            let mut left = into(Move::Left).then(|| vec![Arrival::Left]);
            let mut right = into(Move::Right).then(|| vec![Arrival::Right]);
            if q == tm.initial {
                if let Some(r) = right.as_mut() {
                    r.push(Arrival::Start);
                } else if let (Some(l), false) = (left.as_mut(), left_on_blank) {
                    l.push(Arrival::Start);
                } else {
                    state_colours.push((q, vec![Arrival::Start]));
                }
            }
            state_colours.extend(left.map(|l| (q, l)));
            state_colours.extend(right.map(|r| (q, r)));
        }
        let vertical = a + state_colours.len();
        let horizontal = a * a + 2;
        Self {
            symbols: a,
            state_colours,
            colours: vertical.max(horizontal),
            left_blank: (a * a) as Colour,
            bottom_blank: (a * a + 1) as Colour,
        }
    }

    pub fn pair(&self, symbol: usize, register: usize) -> Colour {
        (symbol * self.symbols + register) as Colour
    }

    pub fn state_colour(&self, q: usize, arrival: Arrival) -> Option<Colour> {
        self.state_colours
            .iter()
            .position(|(s, arr)| *s == q && arr.contains(&arrival))
            .map(|i| (self.symbols + i) as Colour)
    }

    pub fn colours_of_state(&self, q: usize) -> Vec<Colour> {
        self.state_colours
            .iter()
            .enumerate()
            .filter(|(_, (s, _))| *s == q)
            .map(|(i, _)| (self.symbols + i) as Colour)
            .collect()
    }

    /// A vertical colour as a symbol or a state.
    pub fn vertical(&self, c: Colour) -> Option<std::result::Result<usize, usize>> {
        let c = c as usize;
        if c < self.symbols {
            Some(Ok(c))
        } else {
            self.state_colours
                .get(c - self.symbols)
                .map(|(q, _)| Err(*q))
        }
    }

    /// Tape symbol of a horizontal colour; boundary blanks read as blank.
    pub fn horizontal(&self, c: Colour) -> Option<usize> {
        let c = c as usize;
        let a = self.symbols;
        if c < a * a {
            Some(c / a)
        } else if c < a * a + 2 {
            Some(0)
        } else {
            None
        }
    }

    /// Horizontal colours whose tape symbol is `s`, by register, plus the
    /// given boundary blanks when `s` is blank.
    fn reading(&self, s: usize, blanks: &[Colour]) -> Vec<Colour> {
        let mut out: Vec<Colour> = (0..self.symbols).map(|r| self.pair(s, r)).collect();
        if s == 0 {
            out.extend_from_slice(blanks);
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct CompiledMachine {
    pub tileset: TileSet,
    pub map: TmColourMap,
}

pub const DEFAULT_COLOUR_CAP: usize = 32;

fn c(x: Colour) -> Entry {
    Entry::Colour(x)
}

/// Compiles a machine into plaquette and star pieces.
///
/// Only the corner tile carries a bonus (weight 2); every other piece has
/// weight 1. A run that stays clear of a halting configuration inside the
/// lattice therefore scores exactly -1 and anything else scores at least 0.
pub fn compile_to_tileset(tm: &TuringMachine, cap: usize) -> Result<CompiledMachine> {
    tm.validate()?;
    let a = tm.symbols.len();
    if a * a + 2 > cap {
        return Err(Error::AlphabetTooLarge {
            needed: a * a + 2,
            cap,
        });
    }
    let map = TmColourMap::new(tm);
    if map.colours > cap {
        return Err(Error::AlphabetTooLarge {
            needed: map.colours,
            cap,
        });
    }
    let blue = map.left_blank;
    let green = map.bottom_blank;
    let sym = |s: usize| s as Colour;
    let moves: Vec<&Transition> = tm.delta.iter().filter(|t| tm.is_active(t.next)).collect();
    let col = |q: usize, arr: Arrival| map.state_colour(q, arr).expect("state colour allocated");

    let mut tiles: BTreeSet<[Entry; 4]> = BTreeSet::new();
    let mut stars: BTreeSet<[Entry; 4]> = BTreeSet::new();
    let absent = Entry::Absent;

    // left column and corner
    tiles.insert([c(blue), c(sym(0)), c(blue), c(sym(0))]);
    for t in moves.iter().filter(|t| t.mv == Move::Left && t.read == 0) {
        tiles.insert([c(blue), c(col(t.next, Arrival::Left)), c(blue), c(sym(0))]);
    }
    for t in moves.iter().filter(|t| t.mv == Move::Right && t.read == 0) {
        tiles.insert([c(blue), c(sym(t.write)), c(blue), c(sym(0))]);
    }
    let corner: Pattern = [
        c(blue),
        c(col(tm.initial, Arrival::Start)),
        c(green),
        c(sym(0)),
    ];
    stars.insert([c(sym(0)), c(blue), c(sym(0)), absent]);

    // plaquettes: copy, incoming from a left move, transitions
    for w in 0..a {
        for b in 0..a {
            for s in map.reading(b, &[green]) {
                tiles.insert([c(map.pair(w, 0)), c(sym(b)), c(s), c(sym(w))]);
            }
        }
        // the cell left of the head receives the new state on a left move
        // and the written symbol on a right move
        for t in &moves {
            let e = match t.mv {
                Move::Left => col(t.next, Arrival::Left),
                Move::Right => sym(t.write),
            };
            for s in map.reading(t.read, &[green]) {
                tiles.insert([c(map.pair(w, 0)), c(e), c(s), c(sym(w))]);
            }
        }
    }
    for t in &tm.delta {
        if !tm.is_active(t.next) {
            continue;
        }
        for qc in map.colours_of_state(t.state) {
            for w in 0..a {
                for s in map.reading(w, &[green]) {
                    let (n, e) = match t.mv {
                        Move::Left => (map.pair(t.write, t.read), sym(w)),
                        Move::Right => (map.pair(w, t.read), col(t.next, Arrival::Right)),
                    };
                    tiles.insert([c(n), c(e), c(s), c(qc)]);
                }
            }
        }
    }

    // stars with both inputs present: copy, incoming from a right move,
    // transitions
    let mut bulk: BTreeSet<[Entry; 4]> = BTreeSet::new();
    for u in 0..a {
        for b in 0..a {
            for wv in map.reading(b, &[blue]) {
                bulk.insert([c(sym(b)), c(map.pair(u, 0)), c(sym(u)), c(wv)]);
                for t in moves.iter().filter(|t| t.mv == Move::Right) {
                    bulk.insert([
                        c(col(t.next, Arrival::Right)),
                        c(map.pair(u, 0)),
                        c(sym(u)),
                        c(wv),
                    ]);
                }
            }
        }
    }
    for t in &tm.delta {
        if !tm.is_active(t.next) {
            continue;
        }
        for qc in map.colours_of_state(t.state) {
            for wv in map.reading(t.read, &[blue]) {
                match t.mv {
                    Move::Left => {
                        bulk.insert([
                            c(col(t.next, Arrival::Left)),
                            c(map.pair(t.write, t.read)),
                            c(qc),
                            c(wv),
                        ]);
                    }
                    Move::Right => {
                        for w in 0..a {
                            bulk.insert([c(sym(t.write)), c(map.pair(w, t.read)), c(qc), c(wv)]);
                        }
                    }
                }
            }
        }
    }
    // right and top edges: the same rules without the missing output; a
    // halt whose output would lie above the lattice is not penalised
    for p in &bulk {
        stars.insert([p[0], absent, p[2], p[3]]);
        stars.insert([absent, p[1], p[2], p[3]]);
    }
    stars.extend(bulk);
    for q in tm.active_states() {
        for s in 0..a {
            if tm.lookup(q, s).map_or(true, |t| !tm.is_active(t.next)) {
                for qc in map.colours_of_state(q) {
                    for wv in map.reading(s, &[blue]) {
                        for e in 0..(a * a + 2) as Colour {
                            stars.insert([absent, c(e), c(qc), c(wv)]);
                        }
                    }
                }
            }
        }
    }

    // bottom edge: a fresh blank enters from below
    stars.insert([c(sym(0)), c(green), absent, c(green)]);
    stars.insert([
        c(col(tm.initial, Arrival::Start)),
        c(green),
        absent,
        c(green),
    ]);
    for t in moves.iter().filter(|t| t.mv == Move::Right) {
        stars.insert([c(col(t.next, Arrival::Right)), c(green), absent, c(green)]);
    }
    // bottom-right corner: the bottom rule without the east output
    let bottom: Vec<[Entry; 4]> = stars.iter().filter(|p| p[2] == absent).copied().collect();
    for p in bottom {
        stars.insert([p[0], absent, absent, p[3]]);
    }
    // the other three corners are unconstrained
    for p in [
        [Entry::Any, Entry::Any, absent, absent],
        [absent, Entry::Any, Entry::Any, absent],
        [absent, absent, Entry::Any, Entry::Any],
    ] {
        stars.insert(p);
    }

    let mut ts = TileSet::new(map.colours);
    for p in tiles {
        if p != corner {
            ts.add(crate::SiteKind::Plaquette, p, int(1));
        }
    }
    ts.add(crate::SiteKind::Plaquette, corner, int(2));
    for p in stars {
        ts.add(crate::SiteKind::Star, p, int(1));
    }
    ts.validate()?;
    Ok(CompiledMachine { tileset: ts, map })
}

/// Edge at position `j` of level `t`, or `None` outside the lattice.
fn level_edge(lat: &SquareLattice, t: usize, j: usize) -> Option<(bool, usize)> {
    let x = j / 2;
    if x > t {
        return None;
    }
    let y = t - x;
    if j % 2 == 0 {
        (x <= lat.width && y < lat.height).then(|| (true, lat.v(x, y)))
    } else {
        (x < lat.width && y <= lat.height).then(|| (false, lat.h(x, y)))
    }
}

/// Reads the run off a tiling, one anti-diagonal per step, until the
/// diagonals leave the lattice or the machine reaches a configuration with
/// no transition.
pub fn decode_history(a: &Assignment, tm: &TuringMachine, map: &TmColourMap) -> Result<RunTrace> {
    let lat = &a.lattice;
    let mut steps = Vec::new();
    let mut halted = false;
    let mut t = 1usize;
    loop {
        let cells: Option<Vec<(bool, usize)>> =
            (0..2 * t + 2).map(|j| level_edge(lat, t, j)).collect();
        let Some(cells) = cells else { break };
        let mut tape = Vec::with_capacity(2 * t + 1);
        let mut state: Option<(usize, usize)> = None;
        for (j, &(vertical, spin)) in cells.iter().enumerate() {
            let colour = a.colours[spin];
            if vertical {
                match map.vertical(colour) {
                    Some(Ok(s)) => tape.push(s),
                    Some(Err(q)) => {
                        if state.is_some() {
                            return Err(Error::Decode(format!("two heads on diagonal {t}")));
                        }
                        state = Some((q, j));
                    }
                    None => {
                        return Err(Error::Decode(format!(
                            "colour {colour} is not a vertical value"
                        )))
                    }
                }
            } else {
                tape.push(map.horizontal(colour).ok_or_else(|| {
                    Error::Decode(format!("colour {colour} is not a horizontal value"))
                })?);
            }
        }
        let Some((q, j)) = state else {
            return Err(Error::Decode(format!("no head on diagonal {t}")));
        };
        let r = t as i64;
        // tape index of the state is j - t; the read cell is just left of it
        let head = j as i64 - r - 1;
        let snap = Snapshot {
            state: q,
            head,
            offset: -r,
            tape,
        };
        let read = snap.tape[(head + r) as usize];
        steps.push(snap);
        if tm.lookup(q, read).map_or(true, |tr| !tm.is_active(tr.next)) {
            halted = true;
            break;
        }
        t += 1;
    }
    if steps.is_empty() {
        return Err(Error::Decode("lattice holds no complete diagonal".into()));
    }
    let step_count = steps.len() as u64 - 1;
    Ok(RunTrace {
        steps,
        halted,
        step_count,
    })
}

/// Snapshots of `trace` that a tiling of `lat` can show: diagonals fully
/// inside the lattice, stopping before any state that has no colour.
pub fn visible_prefix(trace: &RunTrace, tm: &TuringMachine, lat: &SquareLattice) -> Vec<Snapshot> {
    let reach = lat.width.min(lat.height).saturating_sub(1);
    trace
        .steps
        .iter()
        .take(reach)
        .take_while(|s| tm.is_active(s.state))
        .cloned()
        .collect()
}

pub fn step_count_u64(s: &StepCount) -> Option<u64> {
    match s {
        StepCount::Exact(n) => Some(*n),
        StepCount::AtLeast(x) => x.to_biguint(3).to_u64(),
    }
}
