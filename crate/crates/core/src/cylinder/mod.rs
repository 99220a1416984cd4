//! Functionals on the truncated cylinder `[-L, L] × S^{d-1}`.
//!
//! Fields depend on `s = log|x|` and, optionally, on the colatitude `ξ`. The
//! sphere is reduced to `ξ ∈ [0, π]` with weight `sin^{d-2} ξ` for `d ≥ 3`;
//! for `d = 2` the angle runs over the whole circle with periodic ends.
//! Quadrature weights are scaled so that a field independent of `ξ` sees the
//! full area `|S^{d-1}|`, which keeps discrete energies comparable with the
//! closed-form radial constants.

mod energy;
mod grid;
mod solver;

pub use energy::{energy_ckn, energy_wlh, entropy, norm_p, norm_p_pow};
pub use grid::{CylinderField, Geometry, GridSpec};
pub use solver::{
    detect_symmetry_breaking, detect_symmetry_breaking_with, minimize_ckn, minimize_ckn_from, minimize_radial_ckn,
    minimize_wlh, minimize_wlh_from, spreading_sequence_demo, MinimizeResult, RunRecord, SymmetryReport,
    DEFAULT_GAP_THRESHOLD,
};
