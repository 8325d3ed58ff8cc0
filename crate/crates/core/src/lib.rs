//! Nested-lattice quantize-map-and-forward (QMF) relaying for layered
//! Gaussian relay networks.
//!
//! The crate has five layers:
//!
//! - [`lattice`]: exact lattice arithmetic (nearest point, mod operations)
//!   and Monte Carlo geometric statistics.
//! - [`nested`]: Construction-A nested codebooks over a coarse lattice, the
//!   field<->lattice bijections, and statistical validators for the uniform /
//!   pairwise-independence properties of the random ensemble.
//! - [`qmf`]: the relaying scheme itself - source encoder with power
//!   scaling, dithered lattice quantization at relays, and the structured
//!   finite-field lattice-to-lattice map.
//! - [`sim`]: layered-network block simulation, the lattice consistency
//!   decoder, and Monte Carlo error-rate measurement.
//! - [`bounds`]: cutset mutual information and min-cut, approximation-gap
//!   constants, Poltyrev/Chernoff exponent formulas, and half-duplex
//!   schedule optimization (max-min LP, waterfilling, power-gap
//!   certificates).
//!
//! [`harness`] ties these together behind reproducible experiment configs;
//! the `lqmf` binary exposes them on the command line.

pub mod bounds;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod linalg;
pub mod nested;
pub mod qmf;
pub mod sim;

pub use error::{Error, Result};
pub use lattice::{mod_cube, Lattice, LatticeSpec, LatticeStats};




