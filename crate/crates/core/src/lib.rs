//! Finite-size phase transitions built from weighted tilings.
//!
//! The crate covers the classical side (weighted tile sets scored on an
//! open square lattice, prime-periodic and Turing-machine tile sets, exact
//! ground-state solvers), the toric code sector, the combination of both
//! spectra, and the thermal bounds evaluated at the resulting threshold sizes.

pub mod combine;
pub mod dense;
pub mod lattice;
pub mod prime;
pub mod render;
pub mod solver;
pub mod stabilizer;
pub mod thermal;
pub mod tiling;
pub mod tm;

pub use lattice::{InteractionSite, SiteKind, SquareLattice};
pub use tiling::{Assignment, Score, TileSet};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("colour {colour} out of range for {colours} colours")]
    ColourOutOfRange { colour: usize, colours: usize },
    #[error("invalid tile set: {0}")]
    InvalidTileSet(String),
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error("state space exceeded {0} states")]
    StateSpaceTooLarge(usize),
    #[error("q = {0} outside the supported search range 2..=9")]
    OutOfSearchRange(usize),
    #[error("invalid row family: {0}")]
    InvalidRowFamily(String),
    #[error("propagation is not unique at spin {spin}: {detail}")]
    NotPropagatable { spin: usize, detail: String },
    #[error("no period marker within {0} columns")]
    MarkerNotFound(usize),
    #[error("alphabet too large: {needed} colours exceed the cap of {cap}")]
    AlphabetTooLarge { needed: usize, cap: usize },
    #[error("decode error: {0}")]
    Decode(String),
    #[error("epsilon {0} outside (0, 2)")]
    EpsilonOutOfRange(f64),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("cutoff {mu} is not below delta {delta}")]
    CutoffTooHigh { mu: f64, delta: f64 },
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
