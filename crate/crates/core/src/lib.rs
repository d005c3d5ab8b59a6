//! Maslov-type indices, an exact metaplectic calculus on Gaussian amplitudes, and holonomy of
//! the ground-state line of the symplectic spinor bundle over Lagrangian submanifolds of R^{2n}.
//!
//! Modules, bottom-up:
//!
//! * [`symplectic`] — symplectic and unitary matrices, Lagrangian frames, the Souriau map.
//! * [`maslov`] — Kashiwara signature, Leray index on the universal cover, path lifting and
//!   the Cappell–Lee–Miller index.
//! * [`metaplectic`] — generators of Mp(2n) acting on (polynomial-)Gaussians, quadratic
//!   Fourier transforms, the index μ̂ and continuous lifting of unitary paths.
//! * [`geometry`] — charts of Lagrangian embeddings, frame transport and the holonomy verifiers.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod maslov;
pub mod metaplectic;
pub mod poly;
pub mod random;
pub mod symplectic;
pub mod tolerance;

pub use error::{MaslovError, Result};
pub use tolerance::Tolerances;
