//! Matrices acting on the projective line, index words, generating cones,
//! attractor refinement and norm-growth estimates.

mod cone;
mod dimension;
mod matrix;
mod system;

pub use cone::{refine, Cone};
pub use dimension::{
    critical_exponent, dimension_estimate, hyperbolicity_certificate, zeta_partial, HyperbolicityCertificate,
    ZetaPartial,
};
pub use matrix::Mat2;
pub use system::{Extension, RpifsSpec, Word};

pub(crate) use system::validate_probs;
