//! Real projective iterated function systems on the projective line.
//!
//! The crate covers the whole pipeline for a finite family of invertible
//! 2×2 matrices acting on `RP^1` by Möbius maps:
//!
//! * [`projline`]: homogeneous points, chart arithmetic and the chart metric.
//! * [`rpifs`]: matrices, words, generating cones, attractor refinement,
//!   hyperbolicity certificates and zeta-function dimension estimates.
//! * [`measure`]: Bernoulli cylinder masses, the invariant self-similar
//!   measure, its exact moments for affine systems and chaos-game sampling.
//! * [`quant`]: Voronoi partitions of the chart, quantization error of
//!   order `r`, the midpoint quantizers `Δ_n` with their closed-form error
//!   `D_n`, Lloyd iteration and an exact dynamic-programming oracle.
//!
//! [`cantor`] bundles the two-map Cantor-like system used throughout the
//! tests and the command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cantor;
mod error;
pub mod measure;
pub mod projline;
pub mod quant;
pub mod rpifs;

pub use error::{Error, Result, MAX_PRODUCTS};
pub use measure::{BernoulliSpec, MassBounds, Moments, SelfSimilarMeasure};
pub use projline::ProjPoint;
pub use quant::{ErrorReport, Method, Quantizer, VoronoiDiagram};
pub use rpifs::{Cone, Mat2, RpifsSpec, Word};
