//! Numerical toolkit for principal bundles over the circle with matrix
//! structure groups.
//!
//! The crate realizes, as machine-checkable numerics, the local (Čech)
//! description of gauge groups and bundle automorphism groups:
//!
//! * [`liegroup`] — matrix structure groups (U(1), SU(2), SO(3), O(2) and
//!   products with finite cyclic groups) with exp/log/Ad and π₀ bookkeeping,
//! * [`manifold`] — circle geometry: arcs, closed covers, partitions of
//!   unity, sampled maps and near-identity diffeomorphisms,
//! * [`bundle`] — principal bundles as transition data, cocycle validation,
//!   refinement, flat bundles, pullback and π₀ classification,
//! * [`gauge`] — the gauge group and gauge algebra as compatible local data,
//!   the chart induced by the group logarithm, gluing, the gauge exponential
//!   and the regularity ODE,
//! * [`diffauto`] — fragmentation of diffeomorphisms, local lifts, the
//!   section S of Aut(P) → Diff(S¹), the outer action T, the cocycle ω and
//!   the factor-system product on bundle automorphisms,
//! * [`connection`] — connections as local 1-forms, gauge and automorphism
//!   actions, holonomy,
//! * [`classify`] — which diffeomorphisms preserve a bundle class, twisted
//!   loop algebra evaluation, and homotopy bookkeeping,
//! * [`cli`] — configuration, verification suites and report emission for
//!   the `gaugeforge` binary.
//!
//! Every identity the library claims is accompanied by a residual check; the
//! `tests/acceptance.rs` suite runs the full battery and prints one line per
//! criterion. The `examples/` directory holds one runnable walk-through per
//! capability.

pub mod bundle;
pub mod classify;
pub mod cli;
pub mod connection;
pub mod diffauto;
pub mod error;
pub mod gauge;
pub mod liegroup;
pub mod linalg;
pub mod manifold;
pub mod tol;

pub use error::{Error, Result};
