//! Weil–Petersson curvature of the universal Teichmüller space, computed in
//! the orthonormal basis of harmonic Beltrami differentials on the unit disk.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`]: hyperbolic density, disk automorphisms, polar quadrature.
//! * [`beltrami`]: the basis `ν_n`, Weil–Petersson inner products, sup-norms,
//!   the injectivity-radius constant `C(r)` and the truncated projection kernel.
//! * [`resolvent`]: the operator `G = ½(Δ + ½)⁻¹` with a spectral collocation
//!   backend and an independent Green's-function backend.
//! * [`curvature`]: Riemann tensor entries, holomorphic sectional, sectional and
//!   truncated Ricci curvature, plus the thick-part bound calculator.
//! * [`cli`]: the `wpcurv` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beltrami;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod geometry;
mod optimize;
pub mod resolvent;

pub use beltrami::{
    basis_element, sup_norm_exact, sup_norm_numeric, thick_part_constant, wp_inner,
    CenterBoundChain, HarmonicBeltrami, ProjectionKernel, SupNorm, ThickPartConstant,
};
pub use curvature::{
    thick_part_bounds, CurvatureContext, CurvatureReport, Quantity, RicciSeries, ThickPartBounds,
};
pub use error::{Error, Result};
pub use geometry::{
    build_grid, hyperbolic_disk_radius, rho, AreaWeighting, DiskAutomorphism, DiskPoint,
    QuadratureGrid,
};
pub use resolvent::{Backend, GridFunction, RadialProfile, ResolventOperator};
