//! Direct-sum combination of the toric code and a classical tiling
//! Hamiltonian, glued by a penalty on adjacent spins in different sectors.
//!
//! Every local space is `C^d1 (+) C^d2`. The toric code acts on the first
//! summand, the classical terms on the second, and the penalty is diagonal in
//! the sector labels, so all three parts commute and the spectrum splits by
//! signature (the sector label of each spin).

use std::collections::BTreeSet;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::lattice::SquareLattice;
use crate::solver::bruteforce::all_scores;
use crate::solver::sweep::Construction;
use crate::solver::Method;
use crate::stabilizer::{build_toric_code, Rescale, ToricCodeHamiltonian};
use crate::tiling::{fmt_rational, int, rat, Compiled, Score, TileSet};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sector {
    /// Toric code summand.
    Tc,
    /// Classical summand.
    Cl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DirectSumSpace {
    pub d1: usize,
    pub d2: usize,
}

impl DirectSumSpace {
    pub fn dim(&self) -> usize {
        self.d1 + self.d2
    }

    pub fn sector_of(&self, local: usize) -> Sector {
        if local < self.d1 {
            Sector::Tc
        } else {
            Sector::Cl
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature(pub Vec<Sector>);

impl Signature {
    pub fn uniform(n: usize, s: Sector) -> Self {
        Self(vec![s; n])
    }
}

/// Nearest-neighbour spin pairs: spins sharing a site whose edge midpoints
/// are at the minimal distance (adjacent sides of a plaquette or star).
pub fn adjacent_pairs(lat: &SquareLattice) -> Vec<(usize, usize)> {
    let mut out = BTreeSet::new();
    for site in lat.enumerate_sites() {
        let spins = site.spins();
        for (i, &a) in spins.iter().enumerate() {
            for &b in &spins[i + 1..] {
                let (pa, pb) = (lat.midpoint2(a), lat.midpoint2(b));
                if (pa.0 - pb.0).abs() == 1 && (pa.1 - pb.1).abs() == 1 {
                    out.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    out.into_iter().collect()
}

/// `c` times the number of adjacent pairs in different sectors.
pub fn penalty_energy(
    sig: &Signature,
    lat: &SquareLattice,
    c: &BigRational,
) -> Result<BigRational> {
    if sig.0.len() != lat.spin_count() {
        return Err(Error::Format(format!(
            "signature has {} spins, lattice {}",
            sig.0.len(),
            lat.spin_count()
        )));
    }
    let mixed = adjacent_pairs(lat)
        .iter()
        .filter(|(a, b)| sig.0[*a] != sig.0[*b])
        .count();
    Ok(c * int(mixed as i64))
}

/// Toric code and classical tiling on one lattice, both sectors solved.
#[derive(Clone, Debug)]
pub struct CombinedHamiltonian {
    pub lattice: SquareLattice,
    pub construction: String,
    pub toric: ToricCodeHamiltonian,
    pub rescale: Rescale,
    pub classical: TileSet,
    /// Exact minimum of the classical sector.
    pub lambda_min: Score,
    pub classical_method: Method,
    /// Penalty per mixed adjacent pair.
    pub penalty: BigRational,
    /// Every classical score is a multiple of this.
    pub granularity: BigRational,
}

#[derive(Clone, Debug, Serialize)]
pub struct Level {
    #[serde(serialize_with = "ser_rat")]
    pub energy: BigRational,
    pub sector: Sector,
    #[serde(serialize_with = "ser_big")]
    pub count: BigUint,
}

fn ser_rat<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

fn ser_big<S: serde::Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

impl CombinedHamiltonian {
    /// Classical sector from a tile set whose exact minimum is known; the
    /// penalty is `1 + lambda_min`.
    pub fn new(
        construction: String,
        classical: TileSet,
        lambda_min: Score,
        classical_method: Method,
        lat: &SquareLattice,
    ) -> Result<Self> {
        let comp = Compiled::new(&classical, lat)?;
        let toric = build_toric_code(lat, int(1));
        let rescale = toric.low_energy_rescale();
        Ok(Self {
            lattice: *lat,
            construction,
            rescale,
            toric,
            penalty: int(1) + &lambda_min,
            classical,
            lambda_min,
            classical_method,
            granularity: rat(1, comp.scale),
        })
    }

    /// Lowest energy of any signature mixing both sectors. Both sector
    /// Hamiltonians vanish off their own product subspace, so this is the
    /// penalty for a single mismatched pair.
    pub fn delta(&self) -> BigRational {
        self.penalty.clone()
    }

    pub fn tc_ground(&self) -> BigRational {
        BigRational::zero()
    }

    pub fn tc_gap(&self) -> BigRational {
        rat(1, 2)
    }

    pub fn ground(&self) -> (BigRational, Sector) {
        if self.lambda_min < self.tc_ground() {
            (self.lambda_min.clone(), Sector::Cl)
        } else {
            (self.tc_ground(), Sector::Tc)
        }
    }

    /// Lower bound on the gap above the ground level. Degenerate pure-sector
    /// ground levels across sectors give zero.
    pub fn gap_lower_bound(&self) -> BigRational {
        let (e0, sector) = self.ground();
        let (own, other) = match sector {
            Sector::Tc => (self.tc_gap(), self.lambda_min.clone()),
            Sector::Cl => (self.granularity.clone(), self.tc_ground()),
        };
        [own, other - &e0, self.delta() - &e0]
            .into_iter()
            .min()
            .expect("three candidates")
    }

    /// All levels at or below `mu`, tagged by sector. Requires `mu` below
    /// [`delta`](Self::delta) so that no mixed signature can contribute.
    pub fn low_spectrum(&self, mu: &BigRational, cap: usize) -> Result<Vec<Level>> {
        let delta = self.delta();
        if *mu >= delta {
            return Err(Error::CutoffTooHigh {
                mu: mu.to_f64().unwrap_or(f64::NAN),
                delta: delta.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mut out = Vec::new();
        for (e, n) in self.toric.summary().level_counts {
            let e = self.rescale.apply(&e);
            if e <= *mu {
                out.push(Level {
                    energy: e,
                    sector: Sector::Tc,
                    count: n,
                });
            }
        }
        if self.lambda_min <= *mu {
            let mut scores = all_scores(&self.classical, &self.lattice, cap)?;
            scores.sort();
            let mut i = 0;
            while i < scores.len() && scores[i] <= *mu {
                let j = scores[i..].iter().take_while(|s| **s == scores[i]).count();
                out.push(Level {
                    energy: scores[i].clone(),
                    sector: Sector::Cl,
                    count: BigUint::from(j),
                });
                i += j;
            }
        }
        out.sort_by(|a, b| a.energy.cmp(&b.energy).then(a.sector.cmp(&b.sector)));
        Ok(out)
    }

    pub fn report(&self) -> AssemblyReport {
        let (e, s) = self.ground();
        AssemblyReport {
            construction: self.construction.clone(),
            width: self.lattice.width,
            height: self.lattice.height,
            classical_method: self.classical_method,
            lambda_min: fmt_rational(&self.lambda_min),
            penalty: fmt_rational(&self.penalty),
            delta: fmt_rational(&self.delta()),
            ground_energy: fmt_rational(&e),
            ground_sector: s,
            gap_lower_bound: fmt_rational(&self.gap_lower_bound()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AssemblyReport {
    pub construction: String,
    pub width: usize,
    pub height: usize,
    pub classical_method: Method,
    pub lambda_min: String,
    pub penalty: String,
    pub delta: String,
    pub ground_energy: String,
    pub ground_sector: Sector,
    pub gap_lower_bound: String,
}

/// Solves the classical sector of `c` on `lat` and attaches the toric code.
pub fn assemble_paper_model(c: &Construction, lat: &SquareLattice) -> Result<CombinedHamiltonian> {
    let prepared = c.prepare()?;
    let (lambda_min, method) = prepared.min_score(lat)?;
    CombinedHamiltonian::new(
        c.name(),
        prepared.tileset().clone(),
        lambda_min,
        method,
        lat,
    )
}

/// A dense instance of the combination: `spins` sites on a chain, arbitrary
/// symmetric `h1` on the first summands and `h2` on the second, penalty
/// `delta` on each chain bond.
#[derive(Clone, Debug)]
pub struct Lemma2Toy {
    pub spins: usize,
    pub space: DirectSumSpace,
    pub h1: DMatrix<f64>,
    pub h2: DMatrix<f64>,
    pub pairs: Vec<(usize, usize)>,
    pub delta: f64,
}

pub const TOY_MAX_DIM: usize = 1000;

#[derive(Clone, Debug)]
pub struct Lemma2Report {
    /// Largest entry of any pairwise commutator of the three parts.
    pub max_commutator: f64,
    /// Largest gap between the sorted spectrum and the signature-wise sums.
    pub union_error: f64,
    /// Eigenvalues at or below the cutoff, with the sectors they live in.
    pub low_levels: Vec<(f64, Vec<Sector>)>,
    /// Largest weight of a low eigenvector outside the two pure sectors.
    pub max_leak: f64,
    /// Largest residual of a low eigenvector's sector parts as eigenvectors
    /// of `h1` and `h2`.
    pub max_residual: f64,
    /// Largest distance from a low eigenvalue to the nearest eigenvalue of
    /// the sector it lives in.
    pub max_level_mismatch: f64,
}

impl Lemma2Toy {
    /// Chain toy with the generic penalty `delta = 1 + mu`.
    pub fn chain(
        spins: usize,
        d1: usize,
        d2: usize,
        h1: DMatrix<f64>,
        h2: DMatrix<f64>,
        mu: f64,
    ) -> Result<Self> {
        let space = DirectSumSpace { d1, d2 };
        let dim = space.dim().pow(spins as u32);
        if dim > TOY_MAX_DIM {
            return Err(Error::TooLarge(format!("dense toy of dimension {dim}")));
        }
        if h1.nrows() != d1.pow(spins as u32) || h2.nrows() != d2.pow(spins as u32) {
            return Err(Error::Format(
                "sector Hamiltonian has the wrong dimension".into(),
            ));
        }
        let pairs = (1..spins).map(|i| (i - 1, i)).collect();
        Ok(Self {
            spins,
            space,
            h1,
            h2,
            pairs,
            delta: 1.0 + mu,
        })
    }

    fn locals(&self, mut idx: usize) -> Vec<usize> {
        let d = self.space.dim();
        let mut out = vec![0; self.spins];
        for k in (0..self.spins).rev() {
            out[k] = idx % d;
            idx /= d;
        }
        out
    }

    /// Index of a pure-sector basis state inside its own sector space.
    fn sector_index(&self, locals: &[usize]) -> Option<(Sector, usize)> {
        let s = self.space.sector_of(locals[0]);
        if locals.iter().any(|&l| self.space.sector_of(l) != s) {
            return None;
        }
        let (off, base) = match s {
            Sector::Tc => (0, self.space.d1),
            Sector::Cl => (self.space.d1, self.space.d2),
        };
        Some((s, locals.iter().fold(0, |acc, &l| acc * base + (l - off))))
    }

    fn sector_basis(&self, s: Sector) -> Vec<usize> {
        let dim = self.space.dim().pow(self.spins as u32);
        let mut v: Vec<(usize, usize)> = (0..dim)
            .filter_map(|g| match self.sector_index(&self.locals(g)) {
                Some((t, i)) if t == s => Some((i, g)),
                _ => None,
            })
            .collect();
        v.sort();
        v.into_iter().map(|(_, g)| g).collect()
    }

    fn mismatches(&self, locals: &[usize]) -> usize {
        self.pairs
            .iter()
            .filter(|(a, b)| self.space.sector_of(locals[*a]) != self.space.sector_of(locals[*b]))
            .count()
    }

    /// Penalty and the two embedded sector Hamiltonians on the full space.
    pub fn parts(&self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let dim = self.space.dim().pow(self.spins as u32);
        let mut h0 = DMatrix::zeros(dim, dim);
        for g in 0..dim {
            h0[(g, g)] = self.delta * self.mismatches(&self.locals(g)) as f64;
        }
        let embed = |h: &DMatrix<f64>, basis: &[usize]| {
            let mut m = DMatrix::zeros(dim, dim);
            for (i, &gi) in basis.iter().enumerate() {
                for (j, &gj) in basis.iter().enumerate() {
                    m[(gi, gj)] = h[(i, j)];
                }
            }
            m
        };
        (
            h0,
            embed(&self.h1, &self.sector_basis(Sector::Tc)),
            embed(&self.h2, &self.sector_basis(Sector::Cl)),
        )
    }

    /// Spectrum predicted signature by signature: the sector spectra for the
    /// pure signatures, the penalty value repeated for the mixed ones.
    pub fn predicted_spectrum(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .h1
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        out.extend(self.h2.clone().symmetric_eigenvalues().iter());
        for mask in 0u32..(1 << self.spins) {
            let ones = mask.count_ones() as usize;
            if ones == 0 || ones == self.spins {
                continue;
            }
            let locals: Vec<usize> = (0..self.spins)
                .map(|k| if mask >> k & 1 == 1 { self.space.d1 } else { 0 })
                .collect();
            let mult =
                self.space.d1.pow((self.spins - ones) as u32) * self.space.d2.pow(ones as u32);
            let e = self.delta * self.mismatches(&locals) as f64;
            out.extend(std::iter::repeat_n(e, mult));
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    pub fn check(&self, mu: f64) -> Result<Lemma2Report> {
        if mu >= self.delta {
            return Err(Error::CutoffTooHigh {
                mu,
                delta: self.delta,
            });
        }
        let (h0, h1, h2) = self.parts();
        let comm = |a: &DMatrix<f64>, b: &DMatrix<f64>| (a * b - b * a).amax();
        let max_commutator = comm(&h0, &h1).max(comm(&h0, &h2)).max(comm(&h1, &h2));
        let h = &h0 + &h1 + &h2;
        let eig = SymmetricEigen::new(h);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let predicted = self.predicted_spectrum();
        let union_error = vals
            .iter()
            .zip(&predicted)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);

        let tc = self.sector_basis(Sector::Tc);
        let cl = self.sector_basis(Sector::Cl);
        let s1: Vec<f64> = self
            .h1
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        let s2: Vec<f64> = self
            .h2
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        let nearest = |s: &[f64], x: f64| {
            s.iter()
                .map(|y| (x - y).abs())
                .fold(f64::INFINITY, f64::min)
        };
        let mut low_levels = Vec::new();
        let (mut max_leak, mut max_residual, mut max_level_mismatch) = (0.0f64, 0.0f64, 0.0f64);
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > mu {
                continue;
            }
            let v = eig.eigenvectors.column(k);
            let part = |basis: &[usize]| DMatrix::from_fn(basis.len(), 1, |i, _| v[basis[i]]);
            let (p1, p2) = (part(&tc), part(&cl));
            let (w1, w2) = (p1.norm_squared(), p2.norm_squared());
            max_leak = max_leak.max((1.0 - w1 - w2).abs());
            max_residual = max_residual
                .max((&self.h1 * &p1 - &p1 * lambda).amax())
                .max((&self.h2 * &p2 - &p2 * lambda).amax());
            let mut sectors = Vec::new();
            if w1 > 1e-9 {
                sectors.push(Sector::Tc);
                max_level_mismatch = max_level_mismatch.max(nearest(&s1, lambda));
            }
            if w2 > 1e-9 {
                sectors.push(Sector::Cl);
                max_level_mismatch = max_level_mismatch.max(nearest(&s2, lambda));
            }
            low_levels.push((lambda, sectors));
        }
        low_levels.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(Lemma2Report {
            max_commutator,
            union_error,
            low_levels,
            max_leak,
            max_residual,
            max_level_mismatch,
        })
    }
}
