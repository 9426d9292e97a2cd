//! Pauli operators over GF(2) and the toric code on the open lattice.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::lattice::{SiteKind, SquareLattice};
use crate::tiling::int;
use crate::{Error, Result};

/// Bit vector over spins.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices(len: usize, idx: &[usize]) -> Self {
        let mut b = Self::zeros(len);
        for &i in idx {
            b.flip(i);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_with(&mut self, o: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a ^= b;
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Parity of the overlap with `o`.
    pub fn dot(&self, o: &Bits) -> bool {
        self.words
            .iter()
            .zip(&o.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn ones(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    /// Low 64 bits, for basis-state masks on small systems.
    pub fn as_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliOperator {
    pub x: Bits,
    pub z: Bits,
    /// +1 or -1.
    pub sign: i8,
}

impl PauliOperator {
    pub fn x_type(n: usize, spins: &[usize]) -> Self {
        Self {
            x: Bits::from_indices(n, spins),
            z: Bits::zeros(n),
            sign: 1,
        }
    }

    pub fn z_type(n: usize, spins: &[usize]) -> Self {
        Self {
            x: Bits::zeros(n),
            z: Bits::from_indices(n, spins),
            sign: 1,
        }
    }

    /// Symplectic form: operators commute iff it vanishes.
    pub fn commutes_with(&self, o: &PauliOperator) -> bool {
        self.x.dot(&o.z) == self.z.dot(&o.x)
    }

    /// Product `self * o`, tracking the sign for commuting factors.
    pub fn product(&self, o: &PauliOperator) -> PauliOperator {
        // moving o's X past self's Z: each overlap contributes a factor -1 if
        // odd in total; the result is Hermitian only for commuting pairs
        let mut x = self.x.clone();
        x.xor_with(&o.x);
        let mut z = self.z.clone();
        z.xor_with(&o.z);
        let flips = self.z.dot(&o.x);
        let sign = self.sign
            * o.sign
            * if flips && self.commutes_with(o) {
                -1
            } else {
                1
            };
        PauliOperator { x, z, sign }
    }
}

/// Rank over GF(2) of the symplectic vectors `(x | z)`.
pub fn gf2_rank(ops: &[PauliOperator]) -> usize {
    let rows: Vec<Bits> = ops
        .iter()
        .map(|p| {
            let n = p.x.len();
            let mut b = Bits::zeros(2 * n);
            for i in p.x.ones() {
                b.flip(i);
            }
            for i in p.z.ones() {
                b.flip(n + i);
            }
            b
        })
        .collect();
    rank_of(rows)
}

fn rank_of(mut rows: Vec<Bits>) -> usize {
    let Some(width) = rows.first().map(|r| r.len()) else {
        return 0;
    };
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_with(&pivot);
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of the linear relations among `rows` (vectors `d` with
/// `sum d_i rows_i = 0`).
fn relations(rows: &[Bits]) -> Vec<Bits> {
    let m = rows.len();
    let Some(width) = rows.first().map(|r| r.len()) else {
        return Vec::new();
    };
    // augment each row with an identity tag and eliminate
    let mut aug: Vec<(Bits, Bits)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.clone(), Bits::from_indices(m, &[i])))
        .collect();
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..m).find(|&r| aug[r].0.get(col)) else {
            continue;
        };
        aug.swap(rank, p);
        let pivot = aug[rank].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != rank && row.0.get(col) {
                row.0.xor_with(&pivot.0);
                row.1.xor_with(&pivot.1);
            }
        }
        rank += 1;
    }
    aug.into_iter().skip(rank).map(|(_, tag)| tag).collect()
}

#[derive(Clone, Debug)]
pub struct ToricCodeHamiltonian {
    pub lattice: SquareLattice,
    pub coupling: BigRational,
    /// X-type, one per vertex including the 2-local corners.
    pub stars: Vec<PauliOperator>,
    /// Z-type, one per face.
    pub plaquettes: Vec<PauliOperator>,
}

pub fn build_toric_code(lat: &SquareLattice, coupling: BigRational) -> ToricCodeHamiltonian {
    let n = lat.spin_count();
    let mut stars = Vec::new();
    let mut plaquettes = Vec::new();
    for site in lat.enumerate_sites() {
        match site.kind {
            SiteKind::Star => stars.push(PauliOperator::x_type(n, &site.spins())),
            SiteKind::Plaquette => plaquettes.push(PauliOperator::z_type(n, &site.spins())),
        }
    }
    ToricCodeHamiltonian {
        lattice: *lat,
        coupling,
        stars,
        plaquettes,
    }
}

impl ToricCodeHamiltonian {
    pub fn spin_count(&self) -> usize {
        self.lattice.spin_count()
    }

    pub fn operators(&self) -> impl Iterator<Item = &PauliOperator> {
        self.stars.iter().chain(&self.plaquettes)
    }

    pub fn term_count(&self) -> usize {
        self.stars.len() + self.plaquettes.len()
    }

    /// Every pair of emitted operators commutes.
    pub fn all_commute(&self) -> bool {
        let ops: Vec<&PauliOperator> = self.operators().collect();
        ops.iter()
            .enumerate()
            .all(|(i, a)| ops[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    pub fn rank(&self) -> usize {
        let ops: Vec<PauliOperator> = self.operators().cloned().collect();
        gf2_rank(&ops)
    }

    /// Energy in units of J with `violated` stabilizers at -1.
    pub fn level(&self, violated: usize) -> BigRational {
        &self.coupling * int(2 * violated as i64 - self.term_count() as i64)
    }

    pub fn summary(&self) -> SpectrumSummary {
        let n = self.spin_count();
        let rank = self.rank();
        let degeneracy = BigUint::one() << (n - rank);
        let star_rows: Vec<Bits> = self.stars.iter().map(|p| p.x.clone()).collect();
        let plaq_rows: Vec<Bits> = self.plaquettes.iter().map(|p| p.z.clone()).collect();
        let stars = syndrome_weights(&star_rows);
        let plaqs = syndrome_weights(&plaq_rows);
        let mut counts: BTreeMap<usize, BigUint> = BTreeMap::new();
        for (a, ca) in stars.iter().enumerate() {
            for (b, cb) in plaqs.iter().enumerate() {
                if !ca.is_zero() && !cb.is_zero() {
                    *counts.entry(a + b).or_default() += ca * cb * &degeneracy;
                }
            }
        }
        let level_counts: Vec<(BigRational, BigUint)> = counts
            .iter()
            .map(|(k, c)| (self.level(*k), c.clone()))
            .collect();
        let gap = level_counts.get(1).map(|(e, _)| e - &level_counts[0].0);
        SpectrumSummary {
            spins: n,
            terms: self.term_count(),
            rank,
            ground_energy: self.level(0),
            ground_degeneracy: degeneracy,
            gap,
            level_counts,
        }
    }

    /// Shift and scale taking the ground level to 0 and the first excited
    /// level to 1/2.
    pub fn low_energy_rescale(&self) -> Rescale {
        Rescale {
            shift: &self.coupling * int(self.term_count() as i64),
            scale: BigRational::one() / (&self.coupling * int(4)),
        }
    }
}

/// `E -> (E + shift) * scale`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rescale {
    #[serde(serialize_with = "ser_rat")]
    pub shift: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub scale: BigRational,
}

fn ser_rat<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::tiling::fmt_rational(r))
}

fn ser_big<S: serde::Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

impl Rescale {
    pub fn apply(&self, e: &BigRational) -> BigRational {
        (e + &self.shift) * &self.scale
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSummary {
    pub spins: usize,
    pub terms: usize,
    pub rank: usize,
    #[serde(serialize_with = "ser_rat")]
    pub ground_energy: BigRational,
    #[serde(serialize_with = "ser_big")]
    pub ground_degeneracy: BigUint,
    #[serde(skip)]
    pub gap: Option<BigRational>,
    #[serde(skip)]
    pub level_counts: Vec<(BigRational, BigUint)>,
}

/// Number of reachable syndromes of each weight for stabilizers of one
/// Pauli type with supports `rows`. A syndrome is reachable iff it is
/// orthogonal to every relation among the rows; the weight distribution of
/// that code follows from the relations' by the MacWilliams identity.
fn syndrome_weights(rows: &[Bits]) -> Vec<BigUint> {
    let m = rows.len();
    let rel = relations(rows);
    assert!(rel.len() <= 24, "too many relations to enumerate");
    let mut dist = vec![0u64; m + 1];
    for mask in 0u32..(1 << rel.len()) {
        let mut v = Bits::zeros(m);
        for (i, r) in rel.iter().enumerate() {
            if mask >> i & 1 == 1 {
                v.xor_with(r);
            }
        }
        dist[v.count_ones() as usize] += 1;
    }
    let size = BigInt::from(1u64 << rel.len());
    (0..=m)
        .map(|k| {
            let mut total = BigInt::zero();
            for (w, &cnt) in dist.iter().enumerate() {
                if cnt > 0 {
                    total += krawtchouk(k, w, m) * BigInt::from(cnt);
                }
            }
            let r = total / &size;
            r.to_biguint().expect("non-negative count")
        })
        .collect()
}

/// `K_k(w; m) = sum_j (-1)^j C(w, j) C(m - w, k - j)`.
fn krawtchouk(k: usize, w: usize, m: usize) -> BigInt {
    let mut s = BigInt::zero();
    for j in 0..=k.min(w) {
        if k - j > m - w {
            continue;
        }
        let t = binom(w, j) * binom(m - w, k - j);
        if j % 2 == 0 {
            s += t;
        } else {
            s -= t;
        }
    }
    s
}

fn binom(n: usize, k: usize) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

pub const DENSE_MAX_SPINS: usize = 16;

/// Eigenvalues (units of J = 1) by exact diagonalisation. Plaquette terms
/// are diagonal in the computational basis, so the matrix is split into one
/// block per plaquette pattern and each block is diagonalised densely.
pub fn dense_spectrum(h: &ToricCodeHamiltonian) -> Result<Vec<f64>> {
    let n = h.spin_count();
    if n > DENSE_MAX_SPINS {
        return Err(Error::TooLarge(format!(
            "{n} spins for dense diagonalisation"
        )));
    }
    let star_masks: Vec<u64> = h.stars.iter().map(|p| p.x.as_u64()).collect();
    let plaq_masks: Vec<u64> = h.plaquettes.iter().map(|p| p.z.as_u64()).collect();
    let dim = 1usize << n;
    let key = |b: u64| {
        plaq_masks.iter().enumerate().fold(0u64, |acc, (i, m)| {
            acc | (((b & m).count_ones() as u64 & 1) << i)
        })
    };
    let mut blocks: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for b in 0..dim as u64 {
        blocks.entry(key(b)).or_default().push(b);
    }
    let mut out = Vec::with_capacity(dim);
    for states in blocks.values() {
        let index: BTreeMap<u64, usize> = states.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let m = states.len();
        let mut mat = DMatrix::<f64>::zeros(m, m);
        for (i, &b) in states.iter().enumerate() {
            let diag: f64 = plaq_masks
                .iter()
                .map(|pm| {
                    if (b & pm).count_ones() % 2 == 0 {
                        -1.0
                    } else {
                        1.0
                    }
                })
                .sum();
            mat[(i, i)] += diag;
            for sm in &star_masks {
                let j = index[&(b ^ sm)];
                mat[(j, i)] -= 1.0;
            }
        }
        out.extend(mat.symmetric_eigenvalues().iter().copied());
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}
