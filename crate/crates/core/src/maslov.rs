//! Maslov-type indices on the universal cover of the Lagrangian Grassmannian.
//!
//! Points of the cover are Souriau pairs (w, θ) with det w = e^{iθ}. The Leray index μ is
//! characterized by local constancy on transverse pairs plus the coboundary identity
//! μ(x,y) − μ(x,z) + μ(y,z) = τ(πx, πy, πz); on transverse pairs it has the closed form
//!
//! ```text
//!     μ(x,y) = (1/π)·[θ_x − θ_y + i·Tr Log(−w_x w_y⁻¹)]
//! ```
//!
//! and the general case is reduced to it through an auxiliary Lagrangian transverse to both.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{MaslovError, Result};
use crate::linalg::{self, RMat, C64};
use crate::symplectic::{
    intersection_dim, lagrangian_from_souriau, souriau_map, LagrangianFrame, SymplecticMatrix, UnitaryComplex,
};
use crate::tolerance::Tolerances;

/// Which quadratic form defines the Kashiwara signature τ(L₁,L₂,L₃).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KashiwaraForm {
    /// ω(z₁,z₂) + ω(z₂,z₃) + ω(z₁,z₃).
    PrintedOrder,
    /// ω(z₁,z₂) + ω(z₂,z₃) + ω(z₃,z₁).
    Cyclic,
}

/// The form in force. With the Souriau-coordinate Leray formula above, the coboundary identity
/// holds for `PrintedOrder` and fails (by an overall sign) for `Cyclic`; the two forms are
/// related by z₂ ↦ −z₂ composed with a sign flip, so their signatures are opposite.
pub const KASHIWARA_FORM: KashiwaraForm = KashiwaraForm::PrintedOrder;

/// Margin on min |λ − 1| (λ eigenvalues of w_x·w_y⁻¹) below which [`leray_index`] avoids the
/// closed form and goes through an auxiliary Lagrangian, staying clear of the Log branch cut.
pub const AUX_ROUTE_MARGIN: f64 = 1e-4;

/// Number of grid angles φ ∈ (0, π) tried for the auxiliary Lagrangian e^{2iφ}·w_x.
pub const AUX_GRID: usize = 32;

/// Default bound on recursive bisection depth when lifting paths.
pub const DEFAULT_REFINE_MAX: u32 = 20;

/// A point (w, θ) of the universal cover: w symmetric unitary and det w = e^{iθ}.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverPoint {
    pub w: UnitaryComplex,
    pub theta: f64,
}

impl CoverPoint {
    pub fn new(w: UnitaryComplex, theta: f64, tol: &Tolerances) -> Result<Self> {
        let r = (w.det() - C64::from_polar(1.0, theta)).norm();
        if r > tol.phase_tol {
            return Err(MaslovError::InvariantViolation { what: "det w = e^{iθ}", residual: r });
        }
        Ok(Self { w, theta })
    }

    /// The lift of L with θ the principal argument of det w.
    pub fn principal(l: &LagrangianFrame, tol: &Tolerances) -> Result<Self> {
        let w = souriau_map(l, tol)?;
        let theta = linalg::principal_arg(w.det());
        Ok(Self { w, theta })
    }

    /// The lift of L whose θ is the representative of arg det w nearest to `near`.
    pub fn near(l: &LagrangianFrame, near: f64, tol: &Tolerances) -> Result<Self> {
        let w = souriau_map(l, tol)?;
        let theta = near + linalg::wrap_pi(w.det().arg() - near);
        Ok(Self { w, theta })
    }

    pub fn n(&self) -> usize {
        self.w.n()
    }

    /// Projection to Lag(n).
    pub fn lagrangian(&self, tol: &Tolerances) -> Result<LagrangianFrame> {
        lagrangian_from_souriau(&self.w, tol)
    }
}

/// β^r, β = (I, π): acts on the cover by θ ↦ θ + 2πr.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeckAction {
    pub r: i64,
}

impl DeckAction {
    pub fn apply(&self, x: &CoverPoint) -> CoverPoint {
        CoverPoint { w: x.w.clone(), theta: x.theta + 2.0 * PI * self.r as f64 }
    }
}

/// A point (r, φ) of the universal cover of U(n): det r = e^{iφ}.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedUnitary {
    pub r: UnitaryComplex,
    pub phi: f64,
}

impl LiftedUnitary {
    pub fn new(r: UnitaryComplex, phi: f64, tol: &Tolerances) -> Result<Self> {
        let res = (r.det() - C64::from_polar(1.0, phi)).norm();
        if res > tol.phase_tol {
            return Err(MaslovError::InvariantViolation { what: "det r = e^{iφ}", residual: res });
        }
        Ok(Self { r, phi })
    }

    pub fn identity(n: usize) -> Self {
        Self { r: UnitaryComplex::identity(n), phi: 0.0 }
    }

    /// (r, φ)·(w, θ) = (r w rᵀ, θ + 2φ).
    pub fn act(&self, x: &CoverPoint) -> CoverPoint {
        let rm = self.r.matrix();
        let w = linalg::csymmetrize(&(rm * x.w.matrix() * rm.transpose()));
        CoverPoint { w: UnitaryComplex::new_unchecked(w), theta: x.theta + 2.0 * self.phi }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { r: self.r.mul(&other.r), phi: self.phi + other.phi }
    }

    pub fn symplectic(&self) -> SymplecticMatrix {
        crate::symplectic::embed_unitary(&self.r)
    }
}

/// Lift a sampled unitary path U(t₀) = I, … to Ũ(n) by continuously unwrapping arg det.
pub fn lift_unitary_path(us: &[UnitaryComplex]) -> Result<LiftedUnitary> {
    let first = us.first().ok_or_else(|| MaslovError::InvalidInput("empty unitary path".into()))?;
    let mut phi = linalg::principal_arg(first.det());
    for pair in us.windows(2) {
        let step = linalg::principal_arg(pair[1].det() / pair[0].det());
        if step.abs() >= PI / 2.0 {
            return Err(MaslovError::Sampling(format!("arg det step {step:.3} too large to unwrap")));
        }
        phi += step;
    }
    Ok(LiftedUnitary { r: us[us.len() - 1].clone(), phi })
}

fn round_index(value: f64, tol: &Tolerances, what: &str) -> Result<i64> {
    let k = value.round();
    if (value - k).abs() > tol.phase_tol {
        return Err(MaslovError::Conditioning(format!("{what} = {value:.9} is not within phase_tol of an integer")));
    }
    Ok(k as i64)
}

/// Symmetric 3n×3n matrix of the Kashiwara form on L₁⊕L₂⊕L₃, in frame coordinates.
pub fn kashiwara_matrix(form: KashiwaraForm, frames: [&RMat; 3]) -> RMat {
    let n = frames[0].ncols();
    let mut q = RMat::zeros(3 * n, 3 * n);
    let (a, b) = match form {
        KashiwaraForm::PrintedOrder => (0, 2),
        KashiwaraForm::Cyclic => (2, 0),
    };
    for (i, j) in [(0usize, 1usize), (1, 2), (a, b)] {
        let g = linalg::omega_gram(frames[i], frames[j]) * 0.5;
        let mut blk = q.view_mut((i * n, j * n), (n, n));
        blk += &g;
        let mut blk_t = q.view_mut((j * n, i * n), (n, n));
        blk_t += g.transpose();
    }
    q
}

/// Kashiwara signature τ(L₁,L₂,L₃) with the form selected by [`KASHIWARA_FORM`].
pub fn kashiwara_signature(
    l1: &LagrangianFrame,
    l2: &LagrangianFrame,
    l3: &LagrangianFrame,
    tol: &Tolerances,
) -> Result<i64> {
    kashiwara_signature_with(KASHIWARA_FORM, l1, l2, l3, tol)
}

pub fn kashiwara_signature_with(
    form: KashiwaraForm,
    l1: &LagrangianFrame,
    l2: &LagrangianFrame,
    l3: &LagrangianFrame,
    tol: &Tolerances,
) -> Result<i64> {
    let n = l1.n();
    for l in [l2, l3] {
        if l.n() != n {
            return Err(MaslovError::Dimension { expected: n, found: l.n() });
        }
    }
    let f1 = linalg::polar_orthonormalize(l1.columns(), tol.rank_tol)?;
    let f2 = linalg::polar_orthonormalize(l2.columns(), tol.rank_tol)?;
    let f3 = linalg::polar_orthonormalize(l3.columns(), tol.rank_tol)?;
    Ok(linalg::signature(&kashiwara_matrix(form, [&f1, &f2, &f3]), tol.rank_tol))
}

fn check_same_n(x: &CoverPoint, y: &CoverPoint) -> Result<usize> {
    if x.n() != y.n() {
        return Err(MaslovError::Dimension { expected: x.n(), found: y.n() });
    }
    Ok(x.n())
}

/// Eigenvalues of w_x·w_y⁻¹ = w_x·w_yᴴ.
fn relative_spectrum(x: &CoverPoint, y: &CoverPoint) -> Result<Vec<C64>> {
    linalg::eigenvalues(&(x.w.matrix() * y.w.matrix().adjoint()))
}

fn min_distance_to_one(ev: &[C64]) -> f64 {
    ev.iter().map(|l| (l - C64::new(1.0, 0.0)).norm()).fold(f64::INFINITY, f64::min)
}

/// Real-valued transverse Leray formula, before rounding.
pub fn leray_transverse_real(x: &CoverPoint, y: &CoverPoint, tol: &Tolerances) -> Result<f64> {
    check_same_n(x, y)?;
    let ev = relative_spectrum(x, y)?;
    let cap = ev.iter().filter(|l| (*l - C64::new(1.0, 0.0)).norm() <= tol.rank_tol).count();
    if cap > 0 {
        return Err(MaslovError::NotTransverse { dim: cap });
    }
    // i·Tr Log(−Λ) = i·Σ (ln|λ| + i·arg(−λ)); the modulus part is O(residual) for unitary inputs.
    let trace_arg: f64 = ev.iter().map(|l| (-l).arg()).sum();
    Ok((x.theta - y.theta - trace_arg) / PI)
}

/// Leray index of a transverse pair.
pub fn leray_transverse(x: &CoverPoint, y: &CoverPoint, tol: &Tolerances) -> Result<i64> {
    round_index(leray_transverse_real(x, y, tol)?, tol, "transverse Leray index")
}

/// Deterministic auxiliary lift z = (e^{2iφ}·w_x, θ_x + 2nφ) transverse to both πx and πy.
pub fn auxiliary_point(x: &CoverPoint, y: &CoverPoint, tol: &Tolerances) -> Result<CoverPoint> {
    let n = check_same_n(x, y)?;
    let ev = relative_spectrum(x, y)?;
    let mut best: Option<(f64, f64)> = None;
    for k in 0..AUX_GRID {
        let phi = PI * (k as f64 + 0.5) / AUX_GRID as f64;
        let rot = C64::from_polar(1.0, 2.0 * phi);
        let margin_y = ev.iter().map(|l| (rot * l - C64::new(1.0, 0.0)).norm()).fold(f64::INFINITY, f64::min);
        let margin = margin_y.min((rot - C64::new(1.0, 0.0)).norm());
        if best.is_none_or(|(m, _)| margin > m) {
            best = Some((margin, phi));
        }
    }
    let (margin, phi) = best.expect("non-empty grid");
    if margin <= AUX_ROUTE_MARGIN.max(tol.rank_tol) {
        return Err(MaslovError::Conditioning("no auxiliary Lagrangian transverse to both arguments".into()));
    }
    let w = x.w.matrix() * C64::from_polar(1.0, 2.0 * phi);
    Ok(CoverPoint { w: UnitaryComplex::new_unchecked(w), theta: x.theta + 2.0 * n as f64 * phi })
}

/// μ(x,y) = μ(x,z) − μ(y,z) + τ(πx,πy,πz) for a given z transverse to πx and πy.
pub fn leray_index_via(x: &CoverPoint, y: &CoverPoint, z: &CoverPoint, tol: &Tolerances) -> Result<i64> {
    let lx = x.lagrangian(tol)?;
    let ly = y.lagrangian(tol)?;
    let lz = z.lagrangian(tol)?;
    let tau = kashiwara_signature(&lx, &ly, &lz, tol)?;
    Ok(leray_transverse(x, z, tol)? - leray_transverse(y, z, tol)? + tau)
}

/// Leray index of an arbitrary pair on the cover.
pub fn leray_index(x: &CoverPoint, y: &CoverPoint, tol: &Tolerances) -> Result<i64> {
    check_same_n(x, y)?;
    let ev = relative_spectrum(x, y)?;
    if min_distance_to_one(&ev) > AUX_ROUTE_MARGIN.max(tol.rank_tol) {
        return leray_transverse(x, y, tol);
    }
    let z = auxiliary_point(x, y, tol)?;
    leray_index_via(x, y, &z, tol)
}

/// Something that can produce the Lagrangian at any parameter t ∈ [t₀, t_N]; used to refine
/// a path exactly instead of by interpolation.
pub trait FrameSource: Send + Sync {
    fn frame_at(&self, t: f64) -> Result<LagrangianFrame>;
}

impl<F> FrameSource for F
where
    F: Fn(f64) -> Result<LagrangianFrame> + Send + Sync,
{
    fn frame_at(&self, t: f64) -> Result<LagrangianFrame> {
        self(t)
    }
}

/// A sampled path of Lagrangians, optionally backed by an exact [`FrameSource`].
#[derive(Clone)]
pub struct LagrangianPath {
    samples: Vec<(f64, LagrangianFrame)>,
    source: Option<Arc<dyn FrameSource>>,
}

impl fmt::Debug for LagrangianPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LagrangianPath")
            .field("samples", &self.samples.len())
            .field("has_source", &self.source.is_some())
            .finish()
    }
}

impl LagrangianPath {
    pub fn new(samples: Vec<(f64, LagrangianFrame)>) -> Result<Self> {
        Self::validate(&samples)?;
        Ok(Self { samples, source: None })
    }

    pub fn with_source(samples: Vec<(f64, LagrangianFrame)>, source: Arc<dyn FrameSource>) -> Result<Self> {
        Self::validate(&samples)?;
        Ok(Self { samples, source: Some(source) })
    }

    /// Sample `source` at `count + 1` equally spaced parameters in [t0, t1].
    pub fn sample(source: Arc<dyn FrameSource>, t0: f64, t1: f64, count: usize) -> Result<Self> {
        let count = count.max(1);
        let samples = (0..=count)
            .map(|k| {
                let t = t0 + (t1 - t0) * k as f64 / count as f64;
                source.frame_at(t).map(|f| (t, f))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_source(samples, source)
    }

    /// A constant path at L.
    pub fn constant(l: LagrangianFrame) -> Self {
        Self { samples: vec![(0.0, l.clone()), (1.0, l)], source: None }
    }

    fn validate(samples: &[(f64, LagrangianFrame)]) -> Result<()> {
        if samples.is_empty() {
            return Err(MaslovError::InvalidInput("path has no samples".into()));
        }
        let n = samples[0].1.n();
        for w in samples.windows(2) {
            // Also rejects NaN parameters.
            if w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater) {
                return Err(MaslovError::InvalidInput("path parameters must increase strictly".into()));
            }
            if w[1].1.n() != n {
                return Err(MaslovError::Dimension { expected: n, found: w[1].1.n() });
            }
        }
        Ok(())
    }

    pub fn samples(&self) -> &[(f64, LagrangianFrame)] {
        &self.samples
    }

    pub fn n(&self) -> usize {
        self.samples[0].1.n()
    }

    pub fn start(&self) -> &LagrangianFrame {
        &self.samples[0].1
    }

    pub fn end(&self) -> &LagrangianFrame {
        &self.samples[self.samples.len() - 1].1
    }
}

/// Output of [`lift_path`]: cover points at the original samples plus refinement statistics.
#[derive(Debug, Clone)]
pub struct LiftedPath {
    pub points: Vec<(f64, CoverPoint)>,
    /// Deepest bisection level reached.
    pub max_depth: u32,
    /// Number of extra points inserted by refinement.
    pub inserted: usize,
}

impl LiftedPath {
    pub fn first(&self) -> &CoverPoint {
        &self.points[0].1
    }

    pub fn last(&self) -> &CoverPoint {
        &self.points[self.points.len() - 1].1
    }

    pub fn winding(&self) -> f64 {
        self.last().theta - self.first().theta
    }
}

/// Frobenius step bound under which the principal argument of det(w_b w_a⁻¹) is the true
/// increment: every eigenvalue of w_b w_a⁻¹ then has |arg| < π/(2n).
fn step_bound(n: usize) -> f64 {
    (2.0 * (PI / (4.0 * n as f64)).sin()).min(0.5)
}

struct Lifter<'a> {
    source: Option<&'a Arc<dyn FrameSource>>,
    tol: &'a Tolerances,
    refine_max: u32,
    bound: f64,
    max_depth: u32,
    inserted: usize,
}

impl Lifter<'_> {
    fn midpoint(&self, ta: f64, wa: &UnitaryComplex, tb: f64, wb: &UnitaryComplex) -> Result<UnitaryComplex> {
        if let Some(src) = self.source {
            return souriau_map(&src.frame_at(0.5 * (ta + tb))?, self.tol);
        }
        let avg = (wa.matrix() + wb.matrix()) * C64::new(0.5, 0.0);
        let smin = avg.clone().svd(false, false).singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        if smin < self.tol.rank_tol {
            return Err(MaslovError::Sampling("antipodal consecutive samples cannot be interpolated".into()));
        }
        let w = linalg::csymmetrize(&linalg::polar_unitary(&linalg::csymmetrize(&avg)));
        Ok(UnitaryComplex::new_unchecked(w))
    }

    fn step(&mut self, ta: f64, wa: &UnitaryComplex, tb: f64, wb: &UnitaryComplex, depth: u32) -> Result<f64> {
        let diff = (wb.matrix() - wa.matrix()).norm();
        if diff < self.bound {
            self.max_depth = self.max_depth.max(depth);
            return Ok(linalg::principal_arg(wb.det() / wa.det()));
        }
        if depth >= self.refine_max {
            return Err(MaslovError::Sampling(format!(
                "Souriau step {diff:.3} still above {:.3} after {depth} bisections near t = {ta:.6}",
                self.bound
            )));
        }
        let tm = 0.5 * (ta + tb);
        let wm = self.midpoint(ta, wa, tb, wb)?;
        self.inserted += 1;
        Ok(self.step(ta, wa, tm, &wm, depth + 1)? + self.step(tm, &wm, tb, wb, depth + 1)?)
    }
}

/// Lift a Lagrangian path to the universal cover, starting at θ₀ over the first sample.
pub fn lift_path(path: &LagrangianPath, theta0: f64, tol: &Tolerances, refine_max: u32) -> Result<LiftedPath> {
    let ws = path.samples.iter().map(|(t, l)| souriau_map(l, tol).map(|w| (*t, w))).collect::<Result<Vec<_>>>()?;
    let start = CoverPoint::new(ws[0].1.clone(), theta0, tol)?;
    let mut lifter = Lifter {
        source: path.source.as_ref(),
        tol,
        refine_max,
        bound: step_bound(path.n()),
        max_depth: 0,
        inserted: 0,
    };
    let mut points = vec![(ws[0].0, start)];
    let mut theta = theta0;
    for pair in ws.windows(2) {
        theta += lifter.step(pair[0].0, &pair[0].1, pair[1].0, &pair[1].1, 0)?;
        points.push((pair[1].0, CoverPoint { w: pair[1].1.clone(), theta }));
    }
    Ok(LiftedPath { points, max_depth: lifter.max_depth, inserted: lifter.inserted })
}

/// Result of [`clm_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClmIndex {
    /// M = (μ(x,y) − n + dim(γ(0)∩γ(1)))/2.
    pub index: i64,
    /// The Leray index μ(x,y) of the endpoint lift x against the starting lift y.
    pub leray: i64,
    pub intersection_dim: usize,
    /// Unwrapped change of arg det w along the path.
    pub winding: f64,
    /// The alternative normalization M + n.
    pub shifted_by_n: i64,
    pub max_depth: u32,
    pub inserted: usize,
}

impl ClmIndex {
    pub fn mod4(&self) -> i64 {
        self.index.rem_euclid(4)
    }
}

/// Cappell–Lee–Miller index of the path against the constant path at its endpoint γ(1).
pub fn clm_index(path: &LagrangianPath, tol: &Tolerances, refine_max: u32) -> Result<ClmIndex> {
    let theta0 = linalg::principal_arg(souriau_map(path.start(), tol)?.det());
    let lifted = lift_path(path, theta0, tol, refine_max)?;
    let mu = leray_index(lifted.last(), lifted.first(), tol)?;
    let dim = intersection_dim(path.start(), path.end(), tol)?;
    let twice = mu - path.n() as i64 + dim as i64;
    if twice.rem_euclid(2) != 0 {
        return Err(MaslovError::Parity(format!("μ = {mu}, n = {}, dim∩ = {dim}", path.n())));
    }
    Ok(ClmIndex {
        index: twice / 2,
        leray: mu,
        intersection_dim: dim,
        winding: lifted.winding(),
        shifted_by_n: twice / 2 + path.n() as i64,
        max_depth: lifted.max_depth,
        inserted: lifted.inserted,
    })
}

pub fn clm_index_mod4(path: &LagrangianPath, tol: &Tolerances, refine_max: u32) -> Result<i64> {
    Ok(clm_index(path, tol, refine_max)?.mod4())
}

/// μ_L(S̃) along a symplectic path and its mod-8 reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MuHatOnCover {
    pub mu: i64,
    pub mod8: i64,
}

/// μ_L(S̃) = μ(lift of S(1)L, lift of L) along t ↦ S(t)·L, S(0) = I.
pub fn mu_hat_on_cover(
    path_s: &[(f64, SymplecticMatrix)],
    l: &LagrangianFrame,
    tol: &Tolerances,
    refine_max: u32,
) -> Result<MuHatOnCover> {
    let first = path_s.first().ok_or_else(|| MaslovError::InvalidInput("empty symplectic path".into()))?;
    let n = l.n();
    if linalg::max_abs(&(first.1.matrix() - RMat::identity(2 * n, 2 * n))) > tol.residual_tol {
        return Err(MaslovError::InvalidInput("symplectic path must start at the identity".into()));
    }
    let samples = path_s.iter().map(|(t, s)| (*t, s.apply(l))).collect();
    let path = LagrangianPath::new(samples)?;
    let theta0 = linalg::principal_arg(souriau_map(l, tol)?.det());
    let lifted = lift_path(&path, theta0, tol, refine_max)?;
    let mu = leray_index(lifted.last(), lifted.first(), tol)?;
    Ok(MuHatOnCover { mu, mod8: mu.rem_euclid(8) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMat;
    use crate::random;
    use crate::symplectic::embed_unitary;
    use rand::Rng;
    use std::f64::consts::FRAC_PI_4;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn scalar_point(w: C64, theta: f64) -> CoverPoint {
        CoverPoint::new(UnitaryComplex::new_unchecked(CMat::from_element(1, 1, w)), theta, &tol()).unwrap()
    }

    /// Brute-force oracle: the 3×3 form of three lines, assembled entry by entry.
    fn tau_lines_oracle(a: [f64; 3], cyclic: bool) -> i64 {
        let v: Vec<[f64; 2]> = a.iter().map(|t| [t.cos(), t.sin()]).collect();
        let om = |x: [f64; 2], y: [f64; 2]| x[0] * y[1] - x[1] * y[0];
        let mut m = RMat::zeros(3, 3);
        let pairs = if cyclic { [(0, 1), (1, 2), (2, 0)] } else { [(0, 1), (1, 2), (0, 2)] };
        for (i, j) in pairs {
            m[(i, j)] += 0.5 * om(v[i], v[j]);
            m[(j, i)] += 0.5 * om(v[i], v[j]);
        }
        let ev = m.symmetric_eigenvalues();
        ev.iter().map(|&l| (l > 1e-12) as i64 - (l < -1e-12) as i64).sum()
    }

    #[test]
    fn tau_trivial_and_three_lines() {
        let t = tol();
        let l = LagrangianFrame::line(0.3);
        assert_eq!(kashiwara_signature(&l, &l, &l, &t).unwrap(), 0);
        let (a, b, c) = (LagrangianFrame::line(0.0), LagrangianFrame::line(FRAC_PI_4), LagrangianFrame::line(PI / 2.0));
        assert_eq!(kashiwara_signature_with(KashiwaraForm::Cyclic, &a, &b, &c, &t).unwrap(), 1);
        assert_eq!(tau_lines_oracle([0.0, FRAC_PI_4, PI / 2.0], true), 1);
        // the form actually in force is the opposite one
        assert_eq!(kashiwara_signature(&a, &b, &c, &t).unwrap(), -1);
        assert_eq!(tau_lines_oracle([0.0, FRAC_PI_4, PI / 2.0], false), -1);
    }

    #[test]
    fn tau_swap_antisymmetry() {
        let t = tol();
        let mut rng = random::rng(5);
        for _ in 0..20 {
            let a: [f64; 3] = [rng.gen_range(0.0..PI), rng.gen_range(0.0..PI), rng.gen_range(0.0..PI)];
            let l: Vec<_> = a.iter().map(|x| LagrangianFrame::line(*x)).collect();
            let t123 = kashiwara_signature(&l[0], &l[1], &l[2], &t).unwrap();
            let t213 = kashiwara_signature(&l[1], &l[0], &l[2], &t).unwrap();
            assert_eq!(t123, -t213);
            assert_eq!(t123, tau_lines_oracle(a, false));
        }
    }

    #[test]
    fn leray_transverse_example() {
        let x = scalar_point(C64::new(-1.0, 0.0), PI);
        let y = scalar_point(C64::new(1.0, 0.0), 0.0);
        assert_eq!(leray_transverse(&x, &y, &tol()).unwrap(), 1);
        let shifted = DeckAction { r: 1 }.apply(&x);
        assert_eq!(leray_transverse(&shifted, &y, &tol()).unwrap(), 3);
        assert!(matches!(leray_transverse(&y, &y, &tol()), Err(MaslovError::NotTransverse { dim: 1 })));
    }

    #[test]
    fn leray_generic_line_deck_shift() {
        let t = tol();
        let (a, b) = (0.4_f64, 1.3_f64);
        let x = scalar_point(-C64::from_polar(1.0, 2.0 * a), 2.0 * a - PI);
        let y = scalar_point(-C64::from_polar(1.0, 2.0 * b), 2.0 * b - PI);
        let base = leray_transverse(&x, &y, &t).unwrap();
        let x2 = scalar_point(-C64::from_polar(1.0, 2.0 * a), 2.0 * a - PI + 2.0 * PI);
        assert_eq!(leray_transverse(&x2, &y, &t).unwrap(), base + 2);
    }

    #[test]
    fn leray_of_equal_points_is_zero() {
        let t = tol();
        let l = LagrangianFrame::product_of_lines(&[0.2, 1.1]);
        let x = CoverPoint::principal(&l, &t).unwrap();
        assert_eq!(leray_index(&x, &x, &t).unwrap(), 0);
    }

    #[test]
    fn leray_lift_of_aux_irrelevant() {
        let t = tol();
        let mut rng = random::rng(9);
        for _ in 0..50 {
            let n = rng.gen_range(1..=3);
            let ux = random::unitary(&mut rng, n);
            let uy = random::unitary(&mut rng, n);
            let x = CoverPoint::principal(
                &embed_unitary(&UnitaryComplex::new_unchecked(ux)).apply(&LagrangianFrame::l0(n)),
                &t,
            )
            .unwrap();
            let y = CoverPoint::principal(
                &embed_unitary(&UnitaryComplex::new_unchecked(uy)).apply(&LagrangianFrame::l0(n)),
                &t,
            )
            .unwrap();
            let z = auxiliary_point(&x, &y, &t).unwrap();
            let z3 = DeckAction { r: 3 }.apply(&z);
            assert_eq!(leray_index_via(&x, &y, &z, &t).unwrap(), leray_index_via(&x, &y, &z3, &t).unwrap());
        }
    }

    fn circle_tangent_path(turns: f64, count: usize) -> LagrangianPath {
        let src: Arc<dyn FrameSource> =
            Arc::new(move |s: f64| Ok(LagrangianFrame::line(2.0 * PI * turns * s + PI / 2.0)));
        LagrangianPath::sample(src, 0.0, 1.0, count).unwrap()
    }

    #[test]
    fn lift_constant_path() {
        let t = tol();
        let p = LagrangianPath::constant(LagrangianFrame::line(0.7));
        let th = linalg::principal_arg(souriau_map(p.start(), &t).unwrap().det());
        let lifted = lift_path(&p, th, &t, DEFAULT_REFINE_MAX).unwrap();
        assert_eq!(lifted.winding(), 0.0);
    }

    #[test]
    fn lift_circle_winds_4pi_against_dense_accumulation() {
        let t = tol();
        // coarse sampling forces refinement through the exact source
        let p = circle_tangent_path(1.0, 5);
        let th = linalg::principal_arg(souriau_map(p.start(), &t).unwrap().det());
        let lifted = lift_path(&p, th, &t, DEFAULT_REFINE_MAX).unwrap();
        assert!(lifted.inserted > 0);
        // oracle: accumulate principal increments of det w = −e^{2iα} over 10⁴ samples
        let mut acc = 0.0;
        let det = |s: f64| -C64::from_polar(1.0, 2.0 * (2.0 * PI * s + PI / 2.0));
        for k in 0..10_000 {
            let (a, b) = (k as f64 / 1e4, (k + 1) as f64 / 1e4);
            acc += (det(b) / det(a)).arg();
        }
        assert!((lifted.winding() - 4.0 * PI).abs() < 1e-9);
        assert!((acc - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn lift_without_source_interpolates() {
        let t = tol();
        let samples: Vec<_> = (0..=6)
            .map(|k| {
                let s = k as f64 / 6.0;
                (s, LagrangianFrame::line(2.0 * PI * s + PI / 2.0))
            })
            .collect();
        let p = LagrangianPath::new(samples).unwrap();
        let th = linalg::principal_arg(souriau_map(p.start(), &t).unwrap().det());
        let lifted = lift_path(&p, th, &t, DEFAULT_REFINE_MAX).unwrap();
        assert!((lifted.winding() - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn lift_product_with_fixed_line() {
        let t = tol();
        let src: Arc<dyn FrameSource> =
            Arc::new(|s: f64| Ok(LagrangianFrame::product_of_lines(&[2.0 * PI * s + PI / 2.0, 0.3])));
        let p = LagrangianPath::sample(src, 0.0, 1.0, 40).unwrap();
        let th = linalg::principal_arg(souriau_map(p.start(), &t).unwrap().det());
        let lifted = lift_path(&p, th, &t, DEFAULT_REFINE_MAX).unwrap();
        assert!((lifted.winding() - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn lift_exhaustion_is_an_error() {
        let t = tol();
        let p = circle_tangent_path(1.0, 3);
        let th = linalg::principal_arg(souriau_map(p.start(), &t).unwrap().det());
        assert!(matches!(lift_path(&p, th, &t, 1), Err(MaslovError::Sampling(_))));
    }

    /// Signed crossings of the line α(s) with the fixed line α(1), endpoints counted with
    /// weight ½, for a monotone increasing angle function.
    fn crossing_oracle(alpha: impl Fn(f64) -> f64) -> i64 {
        let a1 = alpha(1.0);
        let f = |s: f64| (alpha(s) - a1).sin();
        let k = 20_000;
        let mut twice = 0;
        // staggered grid so no interior sample lands exactly on a crossing
        for j in 0..k - 1 {
            let (s0, s1) = ((j as f64 + 0.37) / k as f64, (j as f64 + 1.37) / k as f64);
            if f(s0).signum() != f(s1).signum() {
                twice += 2;
            }
        }
        for s in [0.0, 1.0] {
            if f(s).abs() < 1e-12 {
                twice += 1;
            }
        }
        twice / 2
    }

    #[test]
    fn clm_examples() {
        let t = tol();
        let c = LagrangianPath::constant(LagrangianFrame::line(0.2));
        assert_eq!(clm_index(&c, &t, DEFAULT_REFINE_MAX).unwrap().index, 0);
        let loop1 = clm_index(&circle_tangent_path(1.0, 64), &t, DEFAULT_REFINE_MAX).unwrap();
        assert_eq!(loop1.index, 2);
        assert_eq!(loop1.shifted_by_n, 3);
        assert_eq!(clm_index(&circle_tangent_path(2.0, 128), &t, DEFAULT_REFINE_MAX).unwrap().index, 4);
        assert_eq!(crossing_oracle(|s| 2.0 * PI * s + PI / 2.0), loop1.index);
        assert_eq!(crossing_oracle(|s| 4.0 * PI * s + PI / 2.0), 4);
    }

    #[test]
    fn clm_of_arcs() {
        let t = tol();
        for (frac, expect) in [(0.25, 0), (0.5, 1), (0.75, 1)] {
            let src: Arc<dyn FrameSource> =
                Arc::new(move |s: f64| Ok(LagrangianFrame::line(2.0 * PI * frac * s + PI / 2.0)));
            let p = LagrangianPath::sample(src, 0.0, 1.0, 32).unwrap();
            assert_eq!(clm_index(&p, &t, DEFAULT_REFINE_MAX).unwrap().index, expect, "arc {frac}");
        }
    }

    #[test]
    fn mu_hat_on_cover_rotation_loop() {
        let t = tol();
        let path: Vec<_> = (0..=200)
            .map(|k| {
                let s = 2.0 * PI * k as f64 / 200.0;
                (s, embed_unitary(&UnitaryComplex::scalar_phase(1, s)))
            })
            .collect();
        let m = mu_hat_on_cover(&path, &LagrangianFrame::l0(1), &t, DEFAULT_REFINE_MAX).unwrap();
        assert_eq!(m.mu, 4);
        assert_eq!(m.mod8, 4);
        let constant = vec![(0.0, SymplecticMatrix::identity(2)), (1.0, SymplecticMatrix::identity(2))];
        assert_eq!(mu_hat_on_cover(&constant, &LagrangianFrame::l0(2), &t, 4).unwrap().mu, 0);
    }

    #[test]
    fn lifted_unitary_action_and_unitary_path_lift() {
        let t = tol();
        let us: Vec<_> = (0..=100).map(|k| UnitaryComplex::scalar_phase(2, 2.0 * PI * k as f64 / 100.0)).collect();
        let lu = lift_unitary_path(&us).unwrap();
        assert!((lu.phi - 4.0 * PI).abs() < 1e-9);
        let x0 = CoverPoint::principal(&LagrangianFrame::l0(2), &t).unwrap();
        let x1 = lu.act(&x0);
        assert!((x1.theta - 8.0 * PI).abs() < 1e-9);
        assert_eq!(leray_index(&x1, &x0, &t).unwrap(), 8);
    }
}
