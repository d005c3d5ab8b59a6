//! The three generator families of the metaplectic representation.
//!
//! * `Dilate(A, m)`: f ↦ |det A|^{1/2}·i^m·f(Aᵀx)
//! * `Chirp(B)`:    f ↦ exp(−(i/2)⟨Bx,x⟩)·f
//! * `JHat`:        f ↦ i^{−n/2}·F f, F f(ξ) = (2π)^{−n/2}∫ e^{−i⟨ξ,x⟩} f(x) dx
//!
//! Each acts on Gaussians c·exp(−½⟨Mx,x⟩) through a Möbius transformation of Z = iM:
//! for S = [[A,B],[C,D]], Z ↦ (C + DZ)(A + BZ)⁻¹ and c ↦ c·det(A + BZ)^{−1/2}. The matrix
//! returned by [`Generator::symplectic`] is the one realizing that action, so projection to
//! Sp(2n) is a homomorphism on words.

use crate::error::{MaslovError, Result};
use crate::linalg::{self, CMat, RMat};
use crate::metaplectic::gaussian::{DistributionKind, DistributionState, GaussianAmplitude};
use crate::poly::Polynomial;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Dilate { a: RMat, m: i64 },
    Chirp { b: RMat },
    JHat,
}

impl Generator {
    pub fn validate(&self, n: usize, tol: &Tolerances) -> Result<()> {
        match self {
            Generator::Dilate { a, .. } => {
                if a.nrows() != n || a.ncols() != n {
                    return Err(MaslovError::Dimension { expected: n, found: a.nrows() });
                }
                let d = a.determinant().abs();
                if d < tol.rank_tol {
                    return Err(MaslovError::InvariantViolation { what: "Dilate: A invertible", residual: d });
                }
            }
            Generator::Chirp { b } => {
                if b.nrows() != n || b.ncols() != n {
                    return Err(MaslovError::Dimension { expected: n, found: b.nrows() });
                }
                let r = linalg::max_abs(&(b - b.transpose()));
                if r > tol.residual_tol {
                    return Err(MaslovError::InvariantViolation { what: "Chirp: B symmetric", residual: r });
                }
            }
            Generator::JHat => {}
        }
        Ok(())
    }

    /// The symplectic matrix realizing this generator's Möbius action.
    pub fn symplectic(&self, n: usize) -> RMat {
        let id = RMat::identity(n, n);
        let zero = RMat::zeros(n, n);
        match self {
            Generator::Dilate { a, .. } => {
                let a_inv_t = a.clone().try_inverse().expect("validated invertible").transpose();
                linalg::from_blocks(&a_inv_t, &zero, &zero, a)
            }
            Generator::Chirp { b } => linalg::from_blocks(&id, &zero, &(-b), &id),
            Generator::JHat => linalg::from_blocks(&zero, &id, &(-&id), &zero),
        }
    }
}

/// F[p·g] = p(i∂_ξ)F[g] where F[g] ∝ exp(−½ξᵀNξ): each i∂_j acts on q·exp(−½ξᵀNξ) as
/// q ↦ i(∂_j q − (Nξ)_j q).
fn fourier_polynomial(p: &Polynomial, nmat: &CMat) -> Polynomial {
    let n = p.nvars();
    let op = |q: &Polynomial, j: usize| -> Polynomial {
        let mut nx = Polynomial::zero(n);
        for k in 0..n {
            nx = &nx + &q.mul_var(k).scale(nmat[(j, k)]);
        }
        (&q.derivative(j) - &nx).scale(linalg::I)
    };
    let mut cache: std::collections::HashMap<Vec<u32>, Polynomial> = std::collections::HashMap::new();
    cache.insert(vec![0; n], Polynomial::one(n));
    fn build(
        alpha: &[u32],
        cache: &mut std::collections::HashMap<Vec<u32>, Polynomial>,
        op: &dyn Fn(&Polynomial, usize) -> Polynomial,
    ) -> Polynomial {
        if let Some(q) = cache.get(alpha) {
            return q.clone();
        }
        let j = alpha.iter().position(|&a| a > 0).expect("non-zero multi-index");
        let mut prev = alpha.to_vec();
        prev[j] -= 1;
        let q = op(&build(&prev, cache, op), j);
        cache.insert(alpha.to_vec(), q.clone());
        q
    }
    let mut out = Polynomial::zero(n);
    for (e, c) in p.terms() {
        out = &out + &build(e, &mut cache, &op).scale(*c);
    }
    out
}

pub fn apply_generator(gen: &Generator, s: &GaussianAmplitude, tol: &Tolerances) -> Result<GaussianAmplitude> {
    let n = s.n();
    gen.validate(n, tol)?;
    let out = match gen {
        Generator::Dilate { a, m } => GaussianAmplitude {
            c: s.c * a.determinant().abs().sqrt() * linalg::i_pow(*m),
            m: linalg::csymmetrize(&(linalg::to_complex(a) * &s.m * linalg::to_complex(&a.transpose()))),
            poly: s.poly.compose_linear(&a.transpose()),
        },
        Generator::Chirp { b } => {
            GaussianAmplitude { c: s.c, m: &s.m + linalg::to_complex(b) * linalg::I, poly: s.poly.clone() }
        }
        Generator::JHat => {
            let inv =
                s.m.clone()
                    .try_inverse()
                    .ok_or_else(|| MaslovError::StateDomain("singular M under Fourier transform".into()))?;
            let inv = linalg::csymmetrize(&inv);
            GaussianAmplitude {
                c: s.c * linalg::det_inv_sqrt_siegel(&s.m)? * linalg::i_pow_half(-(n as i64)),
                poly: fourier_polynomial(&s.poly, &inv),
                m: inv,
            }
        }
    };
    out.validate(tol)?;
    Ok(out)
}

/// Generator action on δ and (chirped) constants:
/// Dilate: δ ↦ |det A|^{−1/2} i^m δ, chirp ↦ A·C·Aᵀ; Chirp(B): δ fixed, chirp += B;
/// JHat: δ ↦ i^{−n/2}(2π)^{−n/2}·1 and 1 ↦ i^{−n/2}(2π)^{n/2}·δ.
pub fn apply_generator_to_distribution(
    gen: &Generator,
    s: &DistributionState,
    tol: &Tolerances,
) -> Result<DistributionState> {
    let n = s.n();
    gen.validate(n, tol)?;
    let two_pi_half = (2.0 * std::f64::consts::PI).powf(n as f64 / 2.0);
    Ok(match (gen, s.kind) {
        (Generator::Dilate { a, m }, DistributionKind::Delta) => DistributionState {
            kind: DistributionKind::Delta,
            c: s.c * linalg::i_pow(*m) / a.determinant().abs().sqrt(),
            chirp: s.chirp.clone(),
        },
        (Generator::Dilate { a, m }, DistributionKind::Const) => DistributionState {
            kind: DistributionKind::Const,
            c: s.c * linalg::i_pow(*m) * a.determinant().abs().sqrt(),
            chirp: linalg::symmetrize(&(a * &s.chirp * a.transpose())),
        },
        (Generator::Chirp { .. }, DistributionKind::Delta) => s.clone(),
        (Generator::Chirp { b }, DistributionKind::Const) => {
            DistributionState { kind: DistributionKind::Const, c: s.c, chirp: &s.chirp + b }
        }
        (Generator::JHat, DistributionKind::Delta) => DistributionState {
            kind: DistributionKind::Const,
            c: s.c * linalg::i_pow_half(-(n as i64)) / two_pi_half,
            chirp: RMat::zeros(n, n),
        },
        (Generator::JHat, DistributionKind::Const) => {
            if linalg::max_abs(&s.chirp) > tol.residual_tol {
                return Err(MaslovError::Case("Fourier transform of a chirped constant is not a δ".into()));
            }
            DistributionState {
                kind: DistributionKind::Delta,
                c: s.c * linalg::i_pow_half(-(n as i64)) * two_pi_half,
                chirp: RMat::zeros(n, n),
            }
        }
    })
}
