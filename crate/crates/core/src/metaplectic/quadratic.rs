//! Quadratic Fourier transforms Ŝ_{W,m} attached to a free generating function
//! W(x,x′) = ½⟨Px,x⟩ − ⟨Lx,x′⟩ + ½⟨Qx′,x′⟩ and a branch integer m.
//!
//! Ŝ_{W,m} is realized as the generator word Chirp(−P)·Dilate(Lᵀ,m)·Ĵ·Chirp(−Q), which is the
//! oscillatory-integral operator
//!
//! ```text
//!     Ŝ_{W,m} f(x) = (2πi)^{−n/2}·i^m·|det L|^{1/2} ∫ e^{iW(x,x′)} f(x′) dx′
//! ```
//!
//! and projects to S_W = [[L⁻¹Q, L⁻¹], [PL⁻¹Q − Lᵀ, PL⁻¹]]. Conversely a symplectic
//! S = [[A,B],[C,D]] with det B ≠ 0 has W = (DB⁻¹, B⁻¹, B⁻¹A).

use crate::error::{MaslovError, Result};
use crate::linalg::{self, RMat};
use crate::metaplectic::gaussian::{DistributionKind, DistributionState, GaussianAmplitude};
use crate::metaplectic::generator::{apply_generator, apply_generator_to_distribution, Generator};
use crate::symplectic::SymplecticMatrix;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFourier {
    pub p: RMat,
    pub l: RMat,
    pub q: RMat,
    /// Branch integer, reduced mod 4.
    pub m: i64,
}

impl QuadraticFourier {
    pub fn new(p: RMat, l: RMat, q: RMat, m: i64, tol: &Tolerances) -> Result<Self> {
        let n = l.nrows();
        for mat in [&p, &l, &q] {
            if mat.nrows() != n || mat.ncols() != n {
                return Err(MaslovError::Dimension { expected: n, found: mat.nrows() });
            }
        }
        for (what, mat) in [("P symmetric", &p), ("Q symmetric", &q)] {
            let r = linalg::max_abs(&(mat - mat.transpose()));
            if r > tol.residual_tol * (1.0 + linalg::max_abs(mat)) {
                return Err(MaslovError::InvariantViolation { what, residual: r });
            }
        }
        let d = l.determinant().abs();
        if d < tol.rank_tol {
            return Err(MaslovError::InvariantViolation { what: "L invertible", residual: d });
        }
        Ok(Self { p: linalg::symmetrize(&p), l, q: linalg::symmetrize(&q), m: m.rem_euclid(4) })
    }

    pub fn n(&self) -> usize {
        self.l.nrows()
    }

    pub fn with_branch(&self, m: i64) -> Self {
        Self { m: m.rem_euclid(4), ..self.clone() }
    }

    /// The generator word, leftmost factor applied last.
    pub fn word(&self) -> [Generator; 4] {
        [
            Generator::Chirp { b: -&self.p },
            Generator::Dilate { a: self.l.transpose(), m: self.m },
            Generator::JHat,
            Generator::Chirp { b: -&self.q },
        ]
    }

    /// S_W.
    pub fn symplectic(&self) -> SymplecticMatrix {
        let li = self.l.clone().try_inverse().expect("validated invertible");
        let a = &li * &self.q;
        let d = &self.p * &li;
        let c = &self.p * &li * &self.q - self.l.transpose();
        SymplecticMatrix::new_unchecked(linalg::from_blocks(&a, &li, &c, &d))
    }

    /// Adjoint Ŝ*_{W,m} = Ŝ_{W̃, n−m} with W̃ = (−Q, −Lᵀ, −P).
    pub fn adjoint(&self) -> Self {
        Self { p: -&self.q, l: -self.l.transpose(), q: -&self.p, m: (self.n() as i64 - self.m).rem_euclid(4) }
    }

    /// Whether i^m·|det L|^{1/2} is a square root of det L (m even iff det L > 0).
    pub fn branch_parity_consistent(&self) -> bool {
        (self.l.determinant() > 0.0) == (self.m % 2 == 0)
    }
}

/// W from a symplectic matrix with invertible B-block.
pub fn quad_fourier_from_symplectic(s: &SymplecticMatrix, m: i64, tol: &Tolerances) -> Result<QuadraticFourier> {
    let (a, b, _c, d) = s.blocks();
    let det_b = b.determinant();
    if det_b.abs() < tol.rank_tol {
        return Err(MaslovError::NotFree { det_b: det_b.abs() });
    }
    let bi = b.try_inverse().ok_or(MaslovError::NotFree { det_b: det_b.abs() })?;
    let p = &d * &bi;
    let q = &bi * &a;
    let scale = 1.0 + linalg::max_abs(&p).max(linalg::max_abs(&q));
    let check = Tolerances { residual_tol: tol.residual_tol * 10.0 * scale, ..*tol };
    QuadraticFourier::new(p, bi, q, m, &check)
}

pub fn apply_quad_fourier(qf: &QuadraticFourier, s: &GaussianAmplitude, tol: &Tolerances) -> Result<GaussianAmplitude> {
    let mut out = s.clone();
    for g in qf.word().iter().rev() {
        out = apply_generator(g, &out, tol)?;
    }
    Ok(out)
}

/// μ̂(Ŝ_{W,m}) = 2m − n mod 8.
pub fn mu_hat(qf: &QuadraticFourier) -> i64 {
    (2 * qf.m - qf.n() as i64).rem_euclid(8)
}

/// μ̂(Ŝ_{W₁,m₁}·Ŝ_{W₂,m₂}) = μ̂₁ + μ̂₂ + sign(P₂ + Q₁) mod 8.
pub fn mu_hat_composed(qf1: &QuadraticFourier, qf2: &QuadraticFourier, tol: &Tolerances) -> Result<i64> {
    if qf1.n() != qf2.n() {
        return Err(MaslovError::Dimension { expected: qf1.n(), found: qf2.n() });
    }
    let sig = linalg::signature(&(&qf2.p + &qf1.q), tol.rank_tol);
    Ok((mu_hat(qf1) + mu_hat(qf2) + sig).rem_euclid(8))
}

/// Find m ∈ Z₄ with Ŝ_{W,m}·input = target (up to tolerance).
pub fn solve_branch(
    w: &QuadraticFourier,
    input: &GaussianAmplitude,
    target: &GaussianAmplitude,
    tol: &Tolerances,
) -> Result<QuadraticFourier> {
    let base = apply_quad_fourier(&w.with_branch(0), input, tol)?;
    let ratio = base
        .ratio_to(target, tol)
        .ok_or(MaslovError::InvariantViolation { what: "target lies over the projection of W", residual: 1.0 })?;
    let turns = ratio.arg() / std::f64::consts::FRAC_PI_2;
    let m = turns.round();
    let residual = (ratio - linalg::i_pow(m as i64)).norm();
    if residual > tol.phase_tol * 10.0 {
        return Err(MaslovError::Conditioning(format!(
            "branch ratio {ratio} is not a fourth root of unity (residual {residual:.3e})"
        )));
    }
    Ok(w.with_branch(m as i64))
}

/// Dual action on δ: the functional f ↦ (Ŝδ)(f) = ∫ conj(Ŝδ)·f, i.e. conj(Ŝ_{W,m}δ),
/// computed generator by generator.
pub fn apply_to_delta(qf: &QuadraticFourier, tol: &Tolerances) -> Result<DistributionState> {
    let mut d = DistributionState::delta(qf.n());
    for g in qf.word().iter().rev() {
        d = apply_generator_to_distribution(g, &d, tol)?;
    }
    Ok(d.conj())
}

/// Closed form of [`apply_to_delta`] in the transverse case:
/// (2π)^{−n/2}·i^{n/2−m}·|det L|^{1/2}·exp(−(i/2)⟨Px,x⟩).
pub fn delta_image_closed_form(qf: &QuadraticFourier) -> DistributionState {
    let n = qf.n() as i64;
    let c = (2.0 * std::f64::consts::PI).powf(-(n as f64) / 2.0)
        * qf.l.determinant().abs().sqrt()
        * linalg::i_pow_half(n - 2 * qf.m);
    DistributionState { kind: DistributionKind::Const, c, chirp: qf.p.clone() }
}

/// Positive part c(y) = (2π)^{−n/2}|det L|^{1/2} of the transverse δ image.
pub fn delta_positive_part(qf: &QuadraticFourier) -> f64 {
    (2.0 * std::f64::consts::PI).powf(-(qf.n() as f64) / 2.0) * qf.l.determinant().abs().sqrt()
}
