//! Dense operator form of a weighted tile set.
//!
//! Every site term is `1 - sum_p w_p P_p` with `P_p` the tensor product of
//! one diagonal projector per spin of the site (the identity elsewhere).
//! Only the diagonal is kept, built by Kronecker products; spin 0 is the
//! most significant factor, so basis index `sum_i c_i * C^(n-1-i)` holds
//! the colouring `c`.

use nalgebra::DVector;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::lattice::SquareLattice;
use crate::tiling::{Entry, Score, TileSet};
use crate::{Error, Result};

/// Largest Hilbert-space dimension this module will build.
pub const MAX_DIMENSION: usize = 1 << 22;

/// Diagonal of the Hamiltonian, scaled by `scale` to integers.
#[derive(Clone, Debug)]
pub struct DenseDiagonal {
    pub colours: usize,
    pub spins: usize,
    pub scale: i64,
    pub diagonal: DVector<i64>,
}

impl DenseDiagonal {
    pub fn energy(&self, index: usize) -> Score {
        BigRational::new(BigInt::from(self.diagonal[index]), BigInt::from(self.scale))
    }

    /// Basis index of a colouring.
    pub fn index_of(&self, colours: &[u16]) -> usize {
        colours
            .iter()
            .fold(0usize, |acc, &c| acc * self.colours + c as usize)
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> Vec<Score> {
        let mut v: Vec<i64> = self.diagonal.iter().copied().collect();
        v.sort_unstable();
        v.into_iter()
            .map(|x| BigRational::new(BigInt::from(x), BigInt::from(self.scale)))
            .collect()
    }
}

fn kron_all(factors: &[DVector<i64>]) -> DVector<i64> {
    let mut acc = DVector::from_element(1, 1i64);
    for f in factors {
        acc = acc.kronecker(f);
    }
    acc
}

pub fn dense_diagonal(ts: &TileSet, lat: &SquareLattice) -> Result<DenseDiagonal> {
    let c = ts.colours;
    let n = lat.spin_count();
    let dim = (c as f64).powi(n as i32);
    if dim > MAX_DIMENSION as f64 {
        return Err(Error::TooLarge(format!("{c}^{n} basis states")));
    }
    let scale = ts
        .denominator()
        .to_i64()
        .ok_or_else(|| Error::InvalidTileSet("weight denominators too large".into()))?;
    let scaled = |w: &BigRational| {
        (w * BigRational::from_integer(BigInt::from(scale)))
            .to_integer()
            .to_i64()
            .unwrap()
    };
    let identity = DVector::from_element(c, 1i64);
    let sites = lat.enumerate_sites();
    let mut h = DVector::from_element(c.pow(n as u32), scale * sites.len() as i64);
    for site in &sites {
        'piece: for p in ts.site_pieces(site) {
            let mut factors = vec![identity.clone(); n];
            for (entry, slot) in p.pattern.iter().zip(site.slots) {
                match (entry, slot) {
                    (Entry::Any, _) | (Entry::Absent, None) => {}
                    (Entry::Colour(_), None) | (Entry::Absent, Some(_)) => continue 'piece,
                    (Entry::Colour(col), Some(s)) => {
                        let mut d = DVector::from_element(c, 0i64);
                        d[*col as usize] = 1;
                        factors[s] = factors[s].component_mul(&d);
                    }
                }
            }
            h -= kron_all(&factors) * scaled(&p.weight);
        }
    }
    Ok(DenseDiagonal {
        colours: c,
        spins: n,
        scale,
        diagonal: h,
    })
}
