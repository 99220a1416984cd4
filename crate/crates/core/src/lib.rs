//! Numerical toolkit for Caffarelli–Kohn–Nirenberg interpolation inequalities
//! and weighted logarithmic Hardy inequalities.
//!
//! * [`params`]: parameter tuples, admissibility and derived quantities.
//! * [`constants`]: closed-form radial constants, symmetry-breaking curves and
//!   existence thresholds.
//! * [`ground_state`]: shooting for the radial ground state of
//!   `-Δu + u = u^{p-1}`, its moments, the Gagliardo–Nirenberg constant and the
//!   second-order expansion coefficient `R`.
//! * [`cylinder`]: discretized functionals on the Emden–Fowler cylinder and
//!   their constrained minimization.
//! * [`inequalities`]: the scalar and entropy inequalities used along the way.
//!
//! ```
//! use ckn_core::constants::ckn_radial;
//!
//! let c = ckn_radial(0.8, 4.0, 0.0, 3).unwrap();
//! assert!((c.value - 0.27955).abs() < 1e-4);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod cylinder;
pub mod error;
pub mod ground_state;
pub mod inequalities;
pub mod ode;
pub mod params;
pub mod quadrature;
pub mod special;

pub use error::{Error, ParamError, Result};
pub use params::{CknParams, Exponent, WlhParams};
