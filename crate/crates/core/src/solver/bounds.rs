//! Certified lower bounds from a partition of the sites into horizontal
//! bands. Each band is minimised exactly on its own, so the sum of the band
//! minima bounds the global minimum from below.

use crate::lattice::{InteractionSite, SiteKind, SquareLattice};
use crate::tiling::{Score, TileSet};
use crate::Result;

use super::dp::{min_over_sites, DpOptions};

#[derive(Clone, Debug)]
pub struct BandBound {
    pub bands: Vec<(usize, usize, Score)>,
    pub total: Score,
}

/// Band `[y0, y1)` owns the plaquettes of its rows and the stars on the
/// bottom vertex row of each; the topmost band also owns the top vertex row.
pub fn band_sites(lat: &SquareLattice, y0: usize, y1: usize) -> Vec<InteractionSite> {
    lat.enumerate_sites()
        .into_iter()
        .filter(|s| match s.kind {
            SiteKind::Plaquette => s.y >= y0 && s.y < y1,
            SiteKind::Star => (s.y >= y0 && s.y < y1) || (y1 == lat.height && s.y == lat.height),
        })
        .collect()
}

/// Lower bound using bands of `rows` plaquette rows each (the last band may
/// be shorter).
pub fn band_lower_bound(
    ts: &TileSet,
    lat: &SquareLattice,
    rows: usize,
    opts: &DpOptions,
) -> Result<BandBound> {
    let rows = rows.max(1);
    let mut bands = Vec::new();
    let mut total = Score::from_integer(0.into());
    let mut y0 = 0;
    while y0 < lat.height {
        let y1 = (y0 + rows).min(lat.height);
        let sites = band_sites(lat, y0, y1);
        let (m, _) = min_over_sites(ts, lat, &sites, opts)?;
        total += &m;
        bands.push((y0, y1, m));
        y0 = y1;
    }
    Ok(BandBound { bands, total })
}
