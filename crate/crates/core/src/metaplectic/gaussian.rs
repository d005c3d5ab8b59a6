//! Polynomial-Gaussian states x ↦ c·p(x)·exp(−½⟨Mx,x⟩) and the two distributions δ and 1.

use std::collections::HashMap;

use crate::error::{MaslovError, Result};
use crate::linalg::{self, CMat, RMat, C64};
use crate::poly::Polynomial;
use crate::tolerance::Tolerances;

/// c·p(x)·exp(−½ xᵀMx) with M complex symmetric and Re M ≻ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianAmplitude {
    pub c: C64,
    pub m: CMat,
    pub poly: Polynomial,
}

impl GaussianAmplitude {
    pub fn new(c: C64, m: CMat, poly: Polynomial, tol: &Tolerances) -> Result<Self> {
        let s = Self { c, m, poly };
        s.validate(tol)?;
        Ok(s)
    }

    /// The harmonic-oscillator ground state u₀(x) = exp(−|x|²/2).
    pub fn ground(n: usize) -> Self {
        Self { c: C64::new(1.0, 0.0), m: CMat::identity(n, n), poly: Polynomial::one(n) }
    }

    pub fn gaussian(c: C64, m: CMat) -> Self {
        let n = m.nrows();
        Self { c, m, poly: Polynomial::one(n) }
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let n = self.n();
        if self.m.ncols() != n || self.poly.nvars() != n {
            return Err(MaslovError::Dimension { expected: n, found: self.poly.nvars() });
        }
        let asym = linalg::cmax_abs(&(&self.m - self.m.transpose()));
        if asym > tol.residual_tol * (1.0 + linalg::cmax_abs(&self.m)) {
            return Err(MaslovError::InvariantViolation { what: "M symmetric", residual: asym });
        }
        let re = linalg::symmetrize(&linalg::re_part(&self.m));
        let min = re.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min < tol.rank_tol {
            return Err(MaslovError::StateDomain(format!("Re M not positive definite (λ_min = {min:.3e})")));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        let n = self.n();
        let mut quad = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                quad += self.m[(i, j)] * x[i] * x[j];
            }
        }
        self.c * self.poly.eval_real(x) * (-0.5 * quad).exp()
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { c: self.c * s, m: self.m.clone(), poly: self.poly.clone() }
    }

    /// ⟨self, other⟩ = ∫ conj(self)·other, in closed form.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        let k = self.m.map(|z| z.conj()) + &other.m;
        let conj_poly = {
            let mut p = Polynomial::zero(self.n());
            for (e, c) in self.poly.terms() {
                p = &p + &Polynomial::monomial(e.clone(), c.conj());
            }
            p
        };
        let q = &conj_poly * &other.poly;
        Ok(self.c.conj() * other.c * gaussian_integral(&q, &k)?)
    }

    /// L² norm, in closed form.
    pub fn norm(&self) -> Result<f64> {
        Ok(self.inner(self)?.re.max(0.0).sqrt())
    }

    /// Whether `other` is this state times a scalar, returning the scalar.
    pub fn ratio_to(&self, other: &Self, tol: &Tolerances) -> Option<C64> {
        let scale = 1.0 + linalg::cmax_abs(&self.m);
        if linalg::cmax_abs(&(&self.m - &other.m)) > 1e3 * tol.residual_tol * scale {
            return None;
        }
        // compare polynomials after normalizing by the largest coefficient of `self`
        let (key, lead) = self.poly.terms().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))?;
        let r = other.poly.coeff(key) * other.c / (*lead * self.c);
        let diff = &other.poly.scale(other.c) - &self.poly.scale(self.c * r);
        let size = self.poly.max_abs_coeff() * self.c.norm();
        (diff.max_abs_coeff() <= 1e3 * tol.residual_tol * size.max(1e-300)).then_some(r)
    }
}

/// E[x^α] for a centred "Gaussian" with complex symmetric covariance Σ (Isserlis recursion).
fn moment(alpha: &[u32], sigma: &CMat, memo: &mut HashMap<Vec<u32>, C64>) -> C64 {
    if let Some(v) = memo.get(alpha) {
        return *v;
    }
    let total: u32 = alpha.iter().sum();
    let value = if total == 0 {
        C64::new(1.0, 0.0)
    } else if total % 2 == 1 {
        C64::new(0.0, 0.0)
    } else {
        let j = alpha.iter().position(|&a| a > 0).expect("non-zero multi-index");
        let mut rest = alpha.to_vec();
        rest[j] -= 1;
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..alpha.len() {
            if rest[k] > 0 {
                let mut r2 = rest.clone();
                r2[k] -= 1;
                acc += sigma[(j, k)] * rest[k] as f64 * moment(&r2, sigma, memo);
            }
        }
        acc
    };
    memo.insert(alpha.to_vec(), value);
    value
}

/// ∫ q(x)·exp(−½ xᵀKx) dx for complex symmetric K with Re K ≻ 0.
pub fn gaussian_integral(q: &Polynomial, k: &CMat) -> Result<C64> {
    let n = k.nrows();
    let sigma = k
        .clone()
        .try_inverse()
        .ok_or_else(|| MaslovError::StateDomain("singular quadratic form in Gaussian integral".into()))?;
    let pref = (2.0 * std::f64::consts::PI).powf(n as f64 / 2.0) * linalg::det_inv_sqrt_siegel(k)?;
    let mut memo = HashMap::new();
    let mut sum = C64::new(0.0, 0.0);
    for (e, c) in q.terms() {
        sum += c * moment(e, &sigma, &mut memo);
    }
    Ok(pref * sum)
}

/// The two distributions the dual action needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DistributionKind {
    /// c·δ(x).
    Delta,
    /// c·exp(−(i/2)⟨Cx,x⟩) with C = `chirp`; plain constant when C = 0.
    Const,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionState {
    pub kind: DistributionKind,
    pub c: C64,
    /// Real symmetric chirp matrix of a `Const` state (zero for δ).
    pub chirp: RMat,
}

impl DistributionState {
    pub fn delta(n: usize) -> Self {
        Self { kind: DistributionKind::Delta, c: C64::new(1.0, 0.0), chirp: RMat::zeros(n, n) }
    }

    pub fn constant(n: usize, c: C64) -> Self {
        Self { kind: DistributionKind::Const, c, chirp: RMat::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.chirp.nrows()
    }

    /// Complex conjugate distribution.
    pub fn conj(&self) -> Self {
        Self { kind: self.kind, c: self.c.conj(), chirp: -&self.chirp }
    }

    /// Bilinear pairing ∫ T·f with a polynomial-Gaussian f.
    pub fn pair(&self, f: &GaussianAmplitude) -> Result<C64> {
        match self.kind {
            DistributionKind::Delta => Ok(self.c * f.eval(&vec![0.0; f.n()])),
            DistributionKind::Const => {
                let k = &f.m + linalg::to_complex(&self.chirp) * linalg::I;
                Ok(self.c * f.c * gaussian_integral(&f.poly, &k)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ground_state_norm() {
        for n in 1..4 {
            let u = GaussianAmplitude::ground(n);
            assert!((u.norm().unwrap() - PI.powf(n as f64 / 4.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn polynomial_norm_against_quadrature() {
        // n = 1: f = (1 + 2ix − x²)·exp(−½(1.3 + 0.4i)x²)
        let x = Polynomial::variable(1, 0);
        let p = &(&Polynomial::one(1) + &x.scale(C64::new(0.0, 2.0))) - &(&x * &x);
        let f = GaussianAmplitude::new(
            C64::new(0.7, -0.2),
            CMat::from_element(1, 1, C64::new(1.3, 0.4)),
            p,
            &Tolerances::default(),
        )
        .unwrap();
        let h = 1e-3;
        let quad: f64 = (-12_000..=12_000).map(|k| f.eval(&[k as f64 * h]).norm_sqr() * h).sum();
        assert!((f.norm().unwrap().powi(2) - quad).abs() < 1e-10);
    }

    #[test]
    fn constant_pairing_matches_quadrature() {
        let mut t = DistributionState::constant(1, C64::new(0.5, 0.5));
        t.chirp[(0, 0)] = 0.8;
        let u = GaussianAmplitude::ground(1);
        let h = 1e-3;
        let quad: C64 = (-12_000..=12_000)
            .map(|k| {
                let x = k as f64 * h;
                t.c * C64::new(0.0, -0.4 * x * x).exp() * u.eval(&[x]) * h
            })
            .sum();
        assert!((t.pair(&u).unwrap() - quad).norm() < 1e-10);
    }

    #[test]
    fn domain_violation_detected() {
        let bad = CMat::from_element(1, 1, C64::new(-1.0, 0.0));
        assert!(GaussianAmplitude::new(C64::new(1.0, 0.0), bad, Polynomial::one(1), &Tolerances::default()).is_err());
    }
}
