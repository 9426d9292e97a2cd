//! Open-boundary square lattice with one spin per edge.
//!
//! Horizontal edge `h(x, y)` is the bottom edge of plaquette `(x, y)`, with
//! `x < width` and `y <= height`. Vertical edge `v(x, y)` is the left edge of
//! plaquette `(x, y)`, with `x <= width` and `y < height`. Coordinates grow to
//! the right and upwards.

use serde::{Deserialize, Serialize};

/// Position of a spin inside a site, in the fixed order used by every piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    N = 0,
    E = 1,
    S = 2,
    W = 3,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::N, Dir::E, Dir::S, Dir::W];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SiteKind {
    Plaquette,
    Star,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Edge {
    H { x: usize, y: usize },
    V { x: usize, y: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SquareLattice {
    pub width: usize,
    pub height: usize,
}

/// A plaquette or star. `slots` holds the spin at each of N, E, S, W, or
/// `None` where the star is cut off by the boundary.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InteractionSite {
    pub kind: SiteKind,
    /// Plaquette `(x, y)` or vertex `(x, y)`.
    pub x: usize,
    pub y: usize,
    pub slots: [Option<usize>; 4],
}

impl InteractionSite {
    pub fn spins(&self) -> Vec<usize> {
        self.slots.iter().flatten().copied().collect()
    }

    pub fn arity(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub fn is_corner(&self) -> bool {
        self.kind == SiteKind::Star && self.arity() == 2
    }
}

impl SquareLattice {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(
            width >= 1 && height >= 1,
            "lattice needs at least one plaquette"
        );
        Self { width, height }
    }

    pub fn square(n: usize) -> Self {
        Self::new(n, n)
    }

    pub fn horizontal_count(&self) -> usize {
        self.width * (self.height + 1)
    }

    pub fn vertical_count(&self) -> usize {
        (self.width + 1) * self.height
    }

    pub fn spin_count(&self) -> usize {
        self.horizontal_count() + self.vertical_count()
    }

    pub fn h(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.width && y <= self.height);
        y * self.width + x
    }

    pub fn v(&self, x: usize, y: usize) -> usize {
        debug_assert!(x <= self.width && y < self.height);
        self.horizontal_count() + y * (self.width + 1) + x
    }

    pub fn edge(&self, spin: usize) -> Edge {
        let nh = self.horizontal_count();
        if spin < nh {
            Edge::H {
                x: spin % self.width,
                y: spin / self.width,
            }
        } else {
            let k = spin - nh;
            Edge::V {
                x: k % (self.width + 1),
                y: k / (self.width + 1),
            }
        }
    }

    /// Edge midpoint in doubled coordinates, so that all values are integers.
    pub fn midpoint2(&self, spin: usize) -> (i64, i64) {
        match self.edge(spin) {
            Edge::H { x, y } => (2 * x as i64 + 1, 2 * y as i64),
            Edge::V { x, y } => (2 * x as i64, 2 * y as i64 + 1),
        }
    }

    pub fn plaquette(&self, x: usize, y: usize) -> InteractionSite {
        InteractionSite {
            kind: SiteKind::Plaquette,
            x,
            y,
            slots: [
                Some(self.h(x, y + 1)),
                Some(self.v(x + 1, y)),
                Some(self.h(x, y)),
                Some(self.v(x, y)),
            ],
        }
    }

    pub fn star(&self, x: usize, y: usize) -> InteractionSite {
        let n = (y < self.height).then(|| self.v(x, y));
        let e = (x < self.width).then(|| self.h(x, y));
        let s = (y > 0).then(|| self.v(x, y - 1));
        let w = (x > 0).then(|| self.h(x - 1, y));
        InteractionSite {
            kind: SiteKind::Star,
            x,
            y,
            slots: [n, e, s, w],
        }
    }

    /// All plaquettes (row-major from the bottom-left) followed by all stars
    /// (same order over vertices).
    pub fn enumerate_sites(&self) -> Vec<InteractionSite> {
        self.enumerate_sites_with(true)
    }

    /// As [`enumerate_sites`](Self::enumerate_sites), optionally leaving out
    /// the four 2-local corner stars.
    pub fn enumerate_sites_with(&self, corner_stars: bool) -> Vec<InteractionSite> {
        let mut out =
            Vec::with_capacity(self.width * self.height + (self.width + 1) * (self.height + 1));
        for y in 0..self.height {
            for x in 0..self.width {
                out.push(self.plaquette(x, y));
            }
        }
        for y in 0..=self.height {
            for x in 0..=self.width {
                let s = self.star(x, y);
                if corner_stars || !s.is_corner() {
                    out.push(s);
                }
            }
        }
        out
    }

    /// Spins ordered column by column: `v(0, ·)`, `h(0, ·)`, `v(1, ·)`, ...
    /// each bottom to top. The solvers assign spins in this order.
    pub fn column_major_spins(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.spin_count());
        for x in 0..=self.width {
            for y in 0..self.height {
                out.push(self.v(x, y));
            }
            if x < self.width {
                for y in 0..=self.height {
                    out.push(self.h(x, y));
                }
            }
        }
        out
    }

    /// Column order with the horizontal edges of column `x` interleaved with
    /// the vertical edges on its right: `v(0, ·)`, then `h(x, 0)` followed by
    /// `h(x, y + 1), v(x + 1, y)` for each `y`. Every plaquette and star is
    /// completed as early as possible, which keeps propagation shallow.
    pub fn interleaved_spins(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.spin_count());
        for y in 0..self.height {
            out.push(self.v(0, y));
        }
        for x in 0..self.width {
            out.push(self.h(x, 0));
            for y in 0..self.height {
                out.push(self.h(x, y + 1));
                out.push(self.v(x + 1, y));
            }
        }
        out
    }
}
