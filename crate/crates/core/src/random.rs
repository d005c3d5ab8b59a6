//! Seeded samplers used by the property suites and the CLI's randomized reports.

use rand_distr::StandardNormal;

use crate::linalg::{CMat, RMat, C64};

pub use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng as SeedRng;

pub fn rng(seed: u64) -> SeedRng {
    SeedRng::seed_from_u64(seed)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> RMat {
    RMat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RMat {
    let g = gaussian_matrix(rng, n, n);
    (&g + g.transpose()) * 0.5
}

/// Anti-Hermitian-free Hermitian matrix with standard normal entries.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of R's diagonal
/// moved into Q.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Haar-distributed orthogonal matrix.
pub fn orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RMat {
    let qr = gaussian_matrix(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Random invertible real matrix with condition number kept moderate.
pub fn well_conditioned<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RMat {
    let u = orthogonal(rng, n);
    let v = orthogonal(rng, n);
    let d = RMat::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| rng.gen_range(0.4..2.5)));
    u * d * v
}
