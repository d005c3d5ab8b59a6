//! Elements of Mp(2n) as products of quadratic Fourier transforms.

use std::f64::consts::FRAC_PI_2;

use crate::error::{MaslovError, Result};
use crate::linalg;
use crate::metaplectic::gaussian::{DistributionState, GaussianAmplitude};
use crate::metaplectic::generator::apply_generator_to_distribution;
use crate::metaplectic::lift::lift_frame_path;
use crate::metaplectic::quadratic::{
    apply_quad_fourier, mu_hat, mu_hat_composed, quad_fourier_from_symplectic, solve_branch, QuadraticFourier,
};
use crate::symplectic::{embed_unitary, SymplecticMatrix, UnitaryComplex};
use crate::tolerance::Tolerances;

/// |det B| below which a factorization is considered too ill-conditioned to be free.
pub const FREE_MARGIN: f64 = 1e-4;

/// The product factors[0]·factors[1]·…, rightmost applied first.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaplecticElement {
    pub factors: Vec<QuadraticFourier>,
}

impl MetaplecticElement {
    pub fn single(qf: QuadraticFourier) -> Self {
        Self { factors: vec![qf] }
    }

    pub fn pair(left: QuadraticFourier, right: QuadraticFourier) -> Self {
        Self { factors: vec![left, right] }
    }

    pub fn n(&self) -> usize {
        self.factors[0].n()
    }

    /// Projection to Sp(2n).
    pub fn symplectic(&self) -> SymplecticMatrix {
        let n = self.n();
        self.factors.iter().fold(SymplecticMatrix::identity(n), |acc, f| acc.compose(&f.symplectic()))
    }

    pub fn apply(&self, s: &GaussianAmplitude, tol: &Tolerances) -> Result<GaussianAmplitude> {
        let mut out = s.clone();
        for f in self.factors.iter().rev() {
            out = apply_quad_fourier(f, &out, tol)?;
        }
        Ok(out)
    }

    /// Dual action on δ: conj(Ŝδ), generator by generator.
    pub fn apply_to_delta(&self, tol: &Tolerances) -> Result<DistributionState> {
        let mut d = DistributionState::delta(self.n());
        for f in self.factors.iter().rev() {
            for g in f.word().iter().rev() {
                d = apply_generator_to_distribution(g, &d, tol)?;
            }
        }
        Ok(d.conj())
    }

    /// μ̂ mod 8 (one factor: 2m − n; two factors: with the signature cocycle).
    pub fn mu_hat(&self, tol: &Tolerances) -> Result<i64> {
        match self.factors.as_slice() {
            [a] => Ok(mu_hat(a)),
            [a, b] => mu_hat_composed(a, b, tol),
            _ => Err(MaslovError::Unsupported(format!("μ̂ of a {}-factor product", self.factors.len()))),
        }
    }

    /// The element over `s` that maps `probe_in` to `probe_out`.
    ///
    /// If s has a well-conditioned B-block it is a single quadratic Fourier transform;
    /// otherwise it is written as Ŝ₁·R̂ with R = embed(e^{iφ}I) a rotation (φ = π/2, i.e. σ,
    /// preferred) and R̂ its continuous lift from the identity.
    pub fn from_lift(
        s: &SymplecticMatrix,
        probe_in: &GaussianAmplitude,
        probe_out: &GaussianAmplitude,
        tol: &Tolerances,
    ) -> Result<Self> {
        let (_, b, _, _) = s.blocks();
        if b.determinant().abs() >= FREE_MARGIN {
            let w = quad_fourier_from_symplectic(s, 0, tol)?;
            return Ok(Self::single(solve_branch(&w, probe_in, probe_out, tol)?));
        }
        let n = s.n();
        let grid = std::iter::once(FRAC_PI_2).chain((1..16).map(|k| std::f64::consts::PI * k as f64 / 16.0));
        let mut best: Option<(f64, f64)> = None;
        for phi in grid {
            let r = embed_unitary(&UnitaryComplex::scalar_phase(n, phi));
            let (_, b1, _, _) = s.compose(&r.inverse()).blocks();
            let d = b1.determinant().abs();
            if d >= FREE_MARGIN.sqrt() {
                best = Some((d, phi));
                break;
            }
            if best.is_none_or(|(bd, _)| d > bd) {
                best = Some((d, phi));
            }
        }
        let (d, phi) = best.expect("non-empty grid");
        if d < FREE_MARGIN {
            return Err(MaslovError::NotFree { det_b: d });
        }
        let steps = 16;
        let rot_path: Vec<_> = (0..=steps)
            .map(|k| {
                let t = phi * k as f64 / steps as f64;
                (t, embed_unitary(&UnitaryComplex::scalar_phase(n, t)))
            })
            .collect();
        let r = rot_path[steps].1.clone();
        let rotated = lift_frame_path(&rot_path, probe_in, tol, crate::maslov::DEFAULT_REFINE_MAX)?.state;
        let rq = solve_branch(&quad_fourier_from_symplectic(&r, 0, tol)?, probe_in, &rotated, tol)?;
        let s1 = s.compose(&r.inverse());
        let w1 = solve_branch(&quad_fourier_from_symplectic(&s1, 0, tol)?, &rotated, probe_out, tol)?;
        Ok(Self::pair(w1, rq))
    }

    /// max |Ŝ projection − s|.
    pub fn projection_residual(&self, s: &SymplecticMatrix) -> f64 {
        linalg::max_abs(&(self.symplectic().matrix() - s.matrix()))
    }
}
