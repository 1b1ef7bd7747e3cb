//! Computational toolkit for approximate lattices at desk scale.
//!
//! The crate is organized around six largely independent subsystems:
//!
//! - [`places`]: exact arithmetic of rationals, p-adic valuations,
//!   normalized absolute values and the product formula;
//! - [`rootsys`]: Bourbaki root data, fundamental weights, and the
//!   root/weight coefficient matrices with their sign properties;
//! - [`cones`]: polyhedral tip normal cones, nested generalized cone
//!   families, the rescaling construction, and the Coxeter-type
//!   linearity classification;
//! - [`cutproject`]: cut-and-project schemes, model-set enumeration,
//!   approximate-group certificates and descent sets;
//! - [`coarse`]: finite metric spaces, Vietoris-Rips complexes,
//!   component maps, F2 homology ranks, and filtration probes;
//! - [`bttree`]: the rank-1 Bruhat-Tits tree of SL2 over Q_p with
//!   Busemann functions and the horofunction transformation law.
//!
//! [`suite`] packages the end-to-end verification checks that the
//! `alab` CLI exposes as `alab suite`.

pub mod bttree;
pub mod coarse;
pub mod cones;
pub mod cutproject;
pub mod linalg;
pub mod places;
pub mod rootsys;
pub mod suite;
