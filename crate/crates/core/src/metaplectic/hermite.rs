//! Hermite-function states and the harmonic-oscillator eigenspaces M_l.
//!
//! H₀ = ½(Δ − |x|²) acts on p(x)·e^{−|x|²/2} as ½(Δp − 2x·∇p − n·p)·e^{−|x|²/2}, so the
//! products of Hermite polynomials of total degree l span the eigenspace with eigenvalue
//! −(l + n/2).

use crate::error::{MaslovError, Result};
use crate::linalg::{CMat, C64};
use crate::metaplectic::gaussian::GaussianAmplitude;
use crate::poly::Polynomial;

/// Physicists' Hermite polynomial H_k in variable `j` of `nvars`.
pub fn hermite_polynomial(nvars: usize, j: usize, k: u32) -> Polynomial {
    let x = Polynomial::variable(nvars, j);
    let mut prev = Polynomial::one(nvars);
    if k == 0 {
        return prev;
    }
    let mut cur = x.scale(C64::new(2.0, 0.0));
    for d in 1..k {
        // H_{d+1} = 2x H_d − 2d H_{d−1}
        let next = &cur.mul_var(j).scale(C64::new(2.0, 0.0)) - &prev.scale(C64::new(2.0 * d as f64, 0.0));
        prev = cur;
        cur = next;
    }
    cur
}

/// Π_j H_{α_j}(x_j) · e^{−|x|²/2}.
pub fn hermite_state(alpha: &[u32]) -> GaussianAmplitude {
    let n = alpha.len();
    let poly = alpha.iter().enumerate().fold(Polynomial::one(n), |acc, (j, &k)| &acc * &hermite_polynomial(n, j, k));
    GaussianAmplitude { c: C64::new(1.0, 0.0), m: CMat::identity(n, n), poly }
}

/// All multi-indices of length n with |α| = l, in lexicographic order.
pub fn level_indices(n: usize, l: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if l == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=l).rev() {
        for mut rest in level_indices(n - 1, l - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// A basis of M_l.
pub fn level_basis(n: usize, l: u32) -> Vec<GaussianAmplitude> {
    level_indices(n, l).iter().map(|a| hermite_state(a)).collect()
}

/// dim M_l = C(n + l − 1, l).
pub fn level_dimension(n: usize, l: u32) -> usize {
    if n == 0 {
        return usize::from(l == 0);
    }
    let (top, k) = (n as u64 + l as u64 - 1, l as u64);
    ((1..=k).fold(1u64, |acc, i| acc * (top - k + i) / i)) as usize
}

/// The polynomial part of H₀(p·u₀).
pub fn harmonic_oscillator_poly(p: &Polynomial) -> Polynomial {
    let n = p.nvars();
    let mut out = p.scale(C64::new(-(n as f64), 0.0));
    for j in 0..n {
        let dj = p.derivative(j);
        out = &out + &dj.derivative(j);
        out = &out - &dj.mul_var(j).scale(C64::new(2.0, 0.0));
    }
    out.scale(C64::new(0.5, 0.0))
}

/// max |coefficient| of H₀ψ + (l + n/2)ψ relative to ψ; requires M = I.
pub fn eigen_residual(state: &GaussianAmplitude, l: u32) -> Result<f64> {
    let n = state.n();
    let dev = crate::linalg::cmax_abs(&(&state.m - CMat::identity(n, n)));
    if dev > 1e-9 {
        return Err(MaslovError::StateDomain(format!("state is not over the ground Gaussian (|M − I| = {dev:.3e})")));
    }
    let h = harmonic_oscillator_poly(&state.poly);
    let r = &h + &state.poly.scale(C64::new(l as f64 + n as f64 / 2.0, 0.0));
    let scale = state.poly.max_abs_coeff().max(f64::MIN_POSITIVE);
    Ok(r.max_abs_coeff() / scale)
}

/// The level l with ψ ∈ M_l, when ψ is an eigenstate.
pub fn level_of(state: &GaussianAmplitude, tol: f64) -> Option<u32> {
    let l = state.poly.degree()?;
    (eigen_residual(state, l).ok()? <= tol).then_some(l)
}
