//! Integrated information as KL projections onto split models.
//!
//! For a system with input `x` and output `y` (each `n` binary elements, or
//! an `n`-dimensional Gaussian AR process `y = A x + e`), every measure is
//! `min_q D_KL[p(x, y) : q(x, y)]` over a model `q` in which some
//! information transmission is removed:
//!
//! - [`phi::phi_fs`] / [`gaussian::phi_fs_gauss`]: fully split model.
//! - [`phi::phi_ds`] / [`gaussian::phi_ds_gauss`]: diagonally split model.
//! - [`phi::phi_md`]: mismatched decoding (discrete only).
//! - [`phi::phi_g`] / [`gaussian::phi_g_gauss`]: geometric (causally split) model.
//! - mutual information `I(X;Y)`: fully disconnected model.
//!
//! All values are in nats unless a report asks for bits.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discrete;
pub mod error;
pub mod expfam;
pub mod gaussian;
pub mod hierarchy;
pub mod io;
pub mod model;
pub mod numopt;
pub mod phi;
pub mod random;
pub mod report;
pub mod systems;
pub mod tolerances;

pub use discrete::{DiscreteJoint, VarSet};
pub use error::{Error, Result};
pub use gaussian::GaussianSystem;
pub use hierarchy::{HierarchyReport, MeasureValues};
pub use io::{System, SystemConfig};
pub use model::SplitModelKind;
pub use phi::{phi_all, PhiOptions, PhiResult};
pub use report::{PhiReport, Units};
pub use tolerances::Tolerances;
