//! Levi-Civita transport of tangent frames by projection.
//!
//! A frame at u(t_a) is moved to u(t_b) by orthogonally projecting onto the new tangent space
//! and taking the polar (closest orthonormal) factor. Each step agrees with parallel transport
//! of the induced metric up to second order in the step; steps are halved until the frame moves
//! less than [`FRAME_STEP_BOUND`] and the chart is linear over the step to the same relative
//! accuracy (a half or full turn can otherwise bring the tangent plane back onto itself and look
//! stationary).

use std::sync::Arc;

use crate::error::{MaslovError, Result};
use crate::geometry::chart::LagrangianChart;
use crate::geometry::path::ParamPath;
use crate::linalg::{self, RMat};
use crate::maslov::LagrangianPath;
use crate::symplectic::{LagrangianFrame, SymplecticMatrix};
use crate::tolerance::Tolerances;

/// Largest entrywise change of the frame accepted in a single transport step.
pub const FRAME_STEP_BOUND: f64 = 1e-2;

/// Orthogonality and tangency of transported frames are checked against this bound.
pub const FRAME_RESIDUAL_BOUND: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct TransportResult {
    pub times: Vec<f64>,
    /// 2n×n orthonormal tangent frames e(t).
    pub frames: Vec<RMat>,
    /// S(t) = F(0)ᵀF(t), F(t) = (e(t), J₀e(t)): the transport expressed in the unitary frame
    /// at the basepoint.
    pub s: Vec<SymplecticMatrix>,
    pub tangent_path: LagrangianPath,
    pub max_halvings: u32,
    pub orthogonality_residual: f64,
    pub tangency_residual: f64,
}

impl TransportResult {
    pub fn n(&self) -> usize {
        self.frames[0].ncols()
    }

    /// (t, S(t)) pairs, the input of the metaplectic lift.
    pub fn symplectic_path(&self) -> Vec<(f64, SymplecticMatrix)> {
        self.times.iter().cloned().zip(self.s.iter().cloned()).collect()
    }

    pub fn end(&self) -> &SymplecticMatrix {
        self.s.last().expect("non-empty transport")
    }
}

/// Gram–Schmidt basis of the tangent space at u (QR with a positive diagonal).
pub fn tangent_basis(chart: &LagrangianChart, u: &[f64], tol: &Tolerances) -> Result<RMat> {
    let j = chart.immersed_jacobian(u, tol)?;
    let qr = j.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..q.ncols() {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    Ok(q)
}

/// The full unitary frame (e, J₀e) = embed(e_q + i·e_p).
pub fn full_frame(e: &RMat) -> RMat {
    let n = e.ncols();
    let eq = e.rows(0, n).into_owned();
    let ep = e.rows(n, n).into_owned();
    linalg::embed(&linalg::complexify(&eq, &ep))
}

fn frame_residuals(e: &RMat, basis: &RMat) -> (f64, f64) {
    let n = e.ncols();
    let orth = linalg::max_abs(&(e.transpose() * e - RMat::identity(n, n)));
    let tang = linalg::max_abs(&(e - basis * (basis.transpose() * e)));
    (orth, tang)
}

struct Transporter<'a> {
    chart: &'a LagrangianChart,
    path: &'a ParamPath,
    tol: &'a Tolerances,
    refine_max: u32,
    max_halvings: u32,
}

impl Transporter<'_> {
    /// |i(u_b) − i(u_a) − J(u_a)Δu| ≤ bound·|J(u_a)Δu|.
    fn is_linear_step(&self, ta: f64, tb: f64) -> Result<bool> {
        let (ua, ub) = (self.path.eval(ta), self.path.eval(tb));
        let du = nalgebra::DVector::from_iterator(ua.len(), ua.iter().zip(&ub).map(|(a, b)| b - a));
        let lin = self.chart.jacobian(&ua)? * du;
        let (pa, pb) = (self.chart.eval(&ua)?, self.chart.eval(&ub)?);
        let err = (0..pa.len()).map(|k| (pb[k] - pa[k] - lin[k]).powi(2)).sum::<f64>().sqrt();
        Ok(err <= FRAME_STEP_BOUND * lin.norm())
    }

    fn advance(&mut self, e: &RMat, ta: f64, tb: f64, depth: u32) -> Result<RMat> {
        let basis = tangent_basis(self.chart, &self.path.eval(tb), self.tol)?;
        let projected = &basis * (basis.transpose() * e);
        let linear = self.is_linear_step(ta, tb)?;
        let next = linalg::polar_orthonormalize(&projected, self.tol.rank_tol);
        if let Ok(next) = next {
            if linear && linalg::max_abs(&(&next - e)) < FRAME_STEP_BOUND {
                self.max_halvings = self.max_halvings.max(depth);
                return Ok(next);
            }
        }
        if depth >= self.refine_max {
            return Err(MaslovError::Sampling(format!(
                "frame transport needs more than {depth} halvings near t = {ta}"
            )));
        }
        let mid = 0.5 * (ta + tb);
        let e_mid = self.advance(e, ta, mid, depth + 1)?;
        self.advance(&e_mid, mid, tb, depth + 1)
    }
}

/// Transport `initial` (default: Gram–Schmidt of the Jacobian columns) along the path.
pub fn transport_frame(
    chart: &LagrangianChart,
    path: &ParamPath,
    initial: Option<&RMat>,
    tol: &Tolerances,
    refine_max: u32,
) -> Result<TransportResult> {
    path.validate()?;
    if path.n() != chart.n() {
        return Err(MaslovError::Dimension { expected: chart.n(), found: path.n() });
    }
    let n = chart.n();
    let times = path.times();
    let basis0 = tangent_basis(chart, &path.eval(0.0), tol)?;
    let e0 = match initial {
        None => basis0.clone(),
        Some(e) => {
            if e.shape() != (2 * n, n) {
                return Err(MaslovError::Dimension { expected: 2 * n, found: e.nrows() });
            }
            let (orth, tang) = frame_residuals(e, &basis0);
            if orth.max(tang) > tol.residual_tol {
                return Err(MaslovError::InvalidInput(format!(
                    "initial frame must be orthonormal and tangent (residuals {orth:.2e}, {tang:.2e})"
                )));
            }
            e.clone()
        }
    };
    let mut tr = Transporter { chart, path, tol, refine_max, max_halvings: 0 };
    let mut frames = vec![e0];
    let (mut orth_max, mut tang_max) = (0.0f64, 0.0f64);
    for w in times.windows(2) {
        let next = tr.advance(frames.last().expect("seeded"), w[0], w[1], 0)?;
        let (orth, tang) = frame_residuals(&next, &tangent_basis(chart, &path.eval(w[1]), tol)?);
        if orth.max(tang) > FRAME_RESIDUAL_BOUND {
            return Err(MaslovError::InvariantViolation {
                what: "transported frame tangent and orthonormal",
                residual: orth.max(tang),
            });
        }
        orth_max = orth_max.max(orth);
        tang_max = tang_max.max(tang);
        frames.push(next);
    }
    let f0t = full_frame(&frames[0]).transpose();
    let mut s = Vec::with_capacity(frames.len());
    for e in &frames {
        let m = &f0t * full_frame(e);
        let sm = SymplecticMatrix::new_unchecked(m);
        let r = sm.orthogonal_residual().max(sm.symplectic_residual());
        if r > tol.residual_tol {
            return Err(MaslovError::InvariantViolation { what: "S(t) in Sp(2n) ∩ O(2n)", residual: r });
        }
        s.push(sm);
    }
    let samples = times.iter().zip(&frames).map(|(&t, e)| (t, LagrangianFrame::new_unchecked(e.clone()))).collect();
    let tangent_path = LagrangianPath::with_source(samples, tangent_source(chart, path, tol))?;
    Ok(TransportResult {
        times,
        frames,
        s,
        tangent_path,
        max_halvings: tr.max_halvings,
        orthogonality_residual: orth_max,
        tangency_residual: tang_max,
    })
}

fn tangent_source(chart: &LagrangianChart, path: &ParamPath, tol: &Tolerances) -> Arc<dyn crate::maslov::FrameSource> {
    let (chart, path, tol) = (chart.clone(), path.clone(), *tol);
    Arc::new(move |t: f64| tangent_basis(&chart, &path.eval(t), &tol).map(LagrangianFrame::new_unchecked))
}

/// t ↦ T_{u(t)}L as a Lagrangian path, backed by the chart for exact refinement.
pub fn tangent_lagrangian_path(chart: &LagrangianChart, path: &ParamPath, tol: &Tolerances) -> Result<LagrangianPath> {
    path.validate()?;
    let source = tangent_source(chart, path, tol);
    let samples = path.times().into_iter().map(|t| source.frame_at(t).map(|f| (t, f))).collect::<Result<Vec<_>>>()?;
    LagrangianPath::with_source(samples, source)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::{ChartSpec, MonomialTerm};
    use crate::maslov::{clm_index, lift_path, DEFAULT_REFINE_MAX};
    use crate::symplectic::{embed_unitary, UnitaryComplex};
    use std::f64::consts::PI;

    fn rotation(t: f64) -> RMat {
        embed_unitary(&UnitaryComplex::scalar_phase(1, t)).into_matrix()
    }

    #[test]
    fn plane_transport_is_trivial() {
        let t = Tolerances::default();
        let chart = LagrangianChart::plane(2).unwrap();
        let path = ParamPath::segment(vec![0.0, 0.0], vec![3.0, -1.0], 10).unwrap();
        let tr = transport_frame(&chart, &path, None, &t, 20).unwrap();
        for s in &tr.s {
            assert!(linalg::max_abs(&(s.matrix() - RMat::identity(4, 4))) < 1e-15);
        }
    }

    #[test]
    fn circle_loop_rotates_through_full_turn() {
        let t = Tolerances::default();
        let path = ParamPath::torus_loop(&[0.0], &[1], 32).unwrap();
        let tr = transport_frame(&LagrangianChart::circle(), &path, None, &t, 20).unwrap();
        // explicit oracle: the unit tangent at angle u is (−sin u, cos u), so S(t) is rotation by 2πt
        for (time, s) in tr.times.iter().zip(&tr.s) {
            assert!(linalg::max_abs(&(s.matrix() - rotation(2.0 * PI * time))) < 1e-12);
        }
        assert!(linalg::max_abs(&(tr.end().matrix() - RMat::identity(2, 2))) < 1e-12);
        assert!(linalg::max_abs(&(&tr.frames[0] - tr.frames.last().unwrap())) < 1e-12);
    }

    #[test]
    fn quarter_circle() {
        let t = Tolerances::default();
        let path = ParamPath::segment(vec![0.0], vec![PI / 2.0], 8).unwrap();
        let tr = transport_frame(&LagrangianChart::circle(), &path, None, &t, 20).unwrap();
        assert!(linalg::max_abs(&(tr.end().matrix() - rotation(PI / 2.0))) < 1e-12);
    }

    #[test]
    fn coarse_sampling_is_refined() {
        let t = Tolerances::default();
        let path = ParamPath::torus_loop(&[0.0], &[1], 2).unwrap();
        let tr = transport_frame(&LagrangianChart::circle(), &path, None, &t, 20).unwrap();
        assert!(tr.max_halvings > 3);
        assert!(linalg::max_abs(&(tr.s[1].matrix() - rotation(PI))) < 1e-12);
        let exhausted = transport_frame(&LagrangianChart::circle(), &path, None, &t, 2);
        assert!(matches!(exhausted, Err(MaslovError::Sampling(_))));
    }

    #[test]
    fn tangent_path_of_circle_winds_twice() {
        let t = Tolerances::default();
        let path = ParamPath::torus_loop(&[0.0], &[1], 16).unwrap();
        let lp = tangent_lagrangian_path(&LagrangianChart::circle(), &path, &t).unwrap();
        let lifted = lift_path(&lp, 0.0, &t, DEFAULT_REFINE_MAX).unwrap();
        assert!((lifted.winding() - 4.0 * PI).abs() < 1e-9);
        assert_eq!(clm_index(&lp, &t, DEFAULT_REFINE_MAX).unwrap().index, 2);
    }

    #[test]
    fn torus_loop_winding_adds() {
        let t = Tolerances::default();
        let chart = LagrangianChart::product_torus(vec![1.0, 1.0]).unwrap();
        for (a, b) in [(1, 0), (1, 1), (2, -1), (0, -2)] {
            let path = ParamPath::torus_loop(&[0.2, 0.5], &[a, b], 48).unwrap();
            let lp = tangent_lagrangian_path(&chart, &path, &t).unwrap();
            let theta0 = crate::symplectic::souriau_map(lp.start(), &t).unwrap().det().arg();
            let w = lift_path(&lp, theta0, &t, DEFAULT_REFINE_MAX).unwrap().winding();
            assert!((w - 4.0 * PI * (a + b) as f64).abs() < 1e-9, "{a},{b}: {w}");
        }
    }

    #[test]
    fn curved_graph_transport_residuals() {
        let t = Tolerances::default();
        let chart = LagrangianChart::new(ChartSpec::GradientGraph {
            n: 2,
            potential: vec![
                MonomialTerm { coef: 0.5, exponents: vec![2, 1] },
                MonomialTerm { coef: 0.25, exponents: vec![0, 4] },
            ],
        })
        .unwrap();
        let path = ParamPath::new(vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![-0.5, 1.0], vec![0.0, 0.0]], 40).unwrap();
        let tr = transport_frame(&chart, &path, None, &t, 20).unwrap();
        assert!(tr.orthogonality_residual < FRAME_RESIDUAL_BOUND);
        assert!(tr.tangency_residual < FRAME_RESIDUAL_BOUND);
        // closed loop: the endpoint frame is the basepoint frame rotated within the tangent space
        let e0 = &tr.frames[0];
        let e1 = tr.frames.last().unwrap();
        let o = e0.transpose() * e1;
        assert!(linalg::max_abs(&(o.transpose() * &o - RMat::identity(2, 2))) < 1e-9);
    }
}
