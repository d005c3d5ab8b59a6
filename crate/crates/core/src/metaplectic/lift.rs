//! Continuous lifting of unitary frame paths to the metaplectic group.
//!
//! Each step ΔS = S_{k+1}·S_k⁻¹ of a path in embed(U(n)) acts on a Gaussian (c, Z = iM) by
//! Z ↦ (C + DZ)(A + BZ)⁻¹, c ↦ c·det(A + BZ)^{−1/2}. For a small step det(A + BZ) is close
//! to 1 and the principal square root is the continuous branch; steps are bisected along the
//! unitary geodesic until |arg det(A + BZ)| < π/2.

use std::f64::consts::FRAC_PI_2;

use crate::error::{MaslovError, Result};
use crate::linalg::{self, CMat, RMat, C64};
use crate::metaplectic::element::MetaplecticElement;
use crate::metaplectic::gaussian::GaussianAmplitude;
use crate::symplectic::SymplecticMatrix;
use crate::tolerance::Tolerances;

/// Output of [`lift_frame_path`].
#[derive(Debug, Clone)]
pub struct FramePathLift {
    /// κ(Ŝ(1))·s0.
    pub state: GaussianAmplitude,
    /// κ(Ŝ(1))·u₀, the ground-state probe used to fix branches.
    pub probe: GaussianAmplitude,
    /// (t, prefactor of the probe) at every input sample; for paths in embed(U(n)) the probe
    /// stays a multiple of u₀, so this is the accumulated phase.
    pub trace: Vec<(f64, C64)>,
    pub max_depth: u32,
    pub inserted: usize,
    /// The endpoint element used when s0 carries a polynomial factor.
    pub element: Option<MetaplecticElement>,
}

impl FramePathLift {
    pub fn phase(&self) -> C64 {
        self.probe.c
    }
}

/// Möbius action of S on a pure Gaussian; also returns arg det(A + BZ).
pub fn mobius(s: &RMat, g: &GaussianAmplitude) -> Result<(GaussianAmplitude, f64)> {
    let (a, b, c, d) = linalg::blocks(s);
    let z = &g.m * linalg::I;
    let x = linalg::to_complex(&a) + linalg::to_complex(&b) * &z;
    let det = x.determinant();
    let xi = x.try_inverse().ok_or_else(|| MaslovError::StateDomain("singular A + BZ in Möbius action".into()))?;
    let zp = (linalg::to_complex(&c) + linalg::to_complex(&d) * &z) * xi;
    let m = linalg::csymmetrize(&(zp * (-linalg::I)));
    Ok((GaussianAmplitude { c: g.c / det.sqrt(), m, poly: g.poly.clone() }, det.arg()))
}

/// Geodesic midpoint of two unitaries: U·(Uᴴ V)^{1/2} with the principal square root.
fn unitary_midpoint(u: &CMat, v: &CMat) -> Result<CMat> {
    let rel = u.adjoint() * v;
    let (ev, q) = linalg::schur(&rel)?;
    if ev.iter().any(|l| (l + C64::new(1.0, 0.0)).norm() < 1e-6) {
        return Err(MaslovError::Sampling("antipodal unitary step has no unique geodesic".into()));
    }
    let roots = CMat::from_diagonal(&nalgebra::DVector::from_iterator(ev.len(), ev.iter().map(|l| l.sqrt())));
    Ok(linalg::polar_unitary(&(u * q.clone() * roots * q.adjoint())))
}

struct Stepper<'a> {
    tol: &'a Tolerances,
    refine_max: u32,
    max_depth: u32,
    inserted: usize,
}

impl Stepper<'_> {
    fn step(&mut self, sa: &RMat, sb: &RMat, states: &mut [GaussianAmplitude], depth: u32) -> Result<()> {
        let delta = sb * sa.transpose();
        let k = delta.nrows();
        let small = (&delta - RMat::identity(k, k)).norm() < 0.5;
        if small {
            let mut next = Vec::with_capacity(states.len());
            let mut ok = true;
            for s in states.iter() {
                let (g, arg) = mobius(&delta, s)?;
                if arg.abs() >= FRAC_PI_2 {
                    ok = false;
                    break;
                }
                next.push(g);
            }
            if ok {
                for (slot, g) in states.iter_mut().zip(next) {
                    *slot = g;
                }
                self.max_depth = self.max_depth.max(depth);
                return Ok(());
            }
        }
        if depth >= self.refine_max {
            return Err(MaslovError::Sampling(format!(
                "metaplectic branch tracking needs more than {depth} bisections"
            )));
        }
        let mid = linalg::embed(&unitary_midpoint(&linalg::unembed(sa), &linalg::unembed(sb))?);
        self.inserted += 1;
        self.step(sa, &mid, states, depth + 1)?;
        self.step(&mid, sb, states, depth + 1)
    }
}

/// Lift a path t ↦ S(t) in embed(U(n)) with S(0) = I and return κ(Ŝ(1))·s0.
pub fn lift_frame_path(
    path: &[(f64, SymplecticMatrix)],
    s0: &GaussianAmplitude,
    tol: &Tolerances,
    refine_max: u32,
) -> Result<FramePathLift> {
    let first = path.first().ok_or_else(|| MaslovError::InvalidInput("empty frame path".into()))?;
    let n = first.1.n();
    if s0.n() != n {
        return Err(MaslovError::Dimension { expected: n, found: s0.n() });
    }
    let id_res = linalg::max_abs(&(first.1.matrix() - RMat::identity(2 * n, 2 * n)));
    if id_res > tol.residual_tol {
        return Err(MaslovError::InvariantViolation { what: "frame path starts at the identity", residual: id_res });
    }
    for (_, s) in path {
        let r = s.orthogonal_residual().max(s.symplectic_residual());
        if r > tol.residual_tol {
            return Err(MaslovError::InvariantViolation { what: "S(t) in the unitary image", residual: r });
        }
    }
    let pure = s0.poly.degree().unwrap_or(0) == 0;
    let probe0 = GaussianAmplitude::ground(n);
    let mut states = vec![probe0.clone()];
    if pure {
        states.push(s0.clone());
    }
    let mut stepper = Stepper { tol, refine_max, max_depth: 0, inserted: 0 };
    let mut trace = vec![(first.0, states[0].c)];
    for pair in path.windows(2) {
        stepper.step(pair[0].1.matrix(), pair[1].1.matrix(), &mut states, 0)?;
        trace.push((pair[1].0, states[0].c));
    }
    let _ = stepper.tol;
    let probe = states[0].clone();
    let (state, element) = if pure {
        (states[1].clone(), None)
    } else {
        let end = &path[path.len() - 1].1;
        let el = MetaplecticElement::from_lift(end, &probe0, &probe, tol)?;
        (el.apply(s0, tol)?, Some(el))
    };
    Ok(FramePathLift { state, probe, trace, max_depth: stepper.max_depth, inserted: stepper.inserted, element })
}
