//! Symplectic and unitary matrix types, Lagrangian frames and the Souriau model of Lag(n).
//!
//! The Souriau map identifies a Lagrangian L = R·L₀ (R = embed(r) unitary, L₀ = {0}×Rⁿ) with
//! the symmetric unitary matrix w = r·rᵀ. It is well defined because the stabilizer of L₀ in
//! U(n) is O(n), and it intertwines the action of U(n): F(R·L) = r·F(L)·rᵀ.

use nalgebra::DVector;

use crate::error::{MaslovError, Result};
use crate::linalg::{self, CMat, RMat, C64};
use crate::tolerance::Tolerances;

/// A 2n×2n real matrix S with SᵀJ₀S = J₀.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    m: RMat,
}

impl SymplecticMatrix {
    pub fn new(m: RMat, tol: &Tolerances) -> Result<Self> {
        if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) || m.nrows() == 0 {
            return Err(MaslovError::Dimension { expected: 2 * (m.nrows() / 2).max(1), found: m.ncols() });
        }
        let s = Self { m };
        let r = s.symplectic_residual();
        if r > tol.residual_tol {
            return Err(MaslovError::InvariantViolation { what: "SᵀJ₀S = J₀", residual: r });
        }
        Ok(s)
    }

    /// Wrap without checking; callers must guarantee the invariant by construction.
    pub fn new_unchecked(m: RMat) -> Self {
        Self { m }
    }

    pub fn identity(n: usize) -> Self {
        Self { m: RMat::identity(2 * n, 2 * n) }
    }

    pub fn n(&self) -> usize {
        self.m.nrows() / 2
    }

    pub fn matrix(&self) -> &RMat {
        &self.m
    }

    pub fn into_matrix(self) -> RMat {
        self.m
    }

    pub fn symplectic_residual(&self) -> f64 {
        let j = linalg::j0(self.n());
        linalg::max_abs(&(self.m.transpose() * &j * &self.m - j))
    }

    pub fn orthogonal_residual(&self) -> f64 {
        let k = self.m.nrows();
        linalg::max_abs(&(self.m.transpose() * &self.m - RMat::identity(k, k)))
    }

    /// Whether S lies in Sp(2n) ∩ O(2n) = embed(U(n)).
    pub fn is_unitary_image(&self, tol: &Tolerances) -> bool {
        self.orthogonal_residual() <= tol.residual_tol && self.symplectic_residual() <= tol.residual_tol
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { m: &self.m * &other.m }
    }

    /// S⁻¹ = J₀⁻¹SᵀJ₀, exact for symplectic S.
    pub fn inverse(&self) -> Self {
        let j = linalg::j0(self.n());
        Self { m: -(&j * self.m.transpose() * &j) }
    }

    pub fn blocks(&self) -> (RMat, RMat, RMat, RMat) {
        linalg::blocks(&self.m)
    }

    pub fn apply(&self, l: &LagrangianFrame) -> LagrangianFrame {
        LagrangianFrame { cols: &self.m * &l.cols }
    }
}

/// An n×n complex matrix with U*U = I.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryComplex {
    u: CMat,
}

impl UnitaryComplex {
    pub fn new(u: CMat, tol: &Tolerances) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(MaslovError::Dimension { expected: u.nrows(), found: u.ncols() });
        }
        let s = Self { u };
        let r = s.unitary_residual();
        if r > tol.residual_tol {
            return Err(MaslovError::InvariantViolation { what: "U*U = I", residual: r });
        }
        Ok(s)
    }

    pub fn new_unchecked(u: CMat) -> Self {
        Self { u }
    }

    pub fn identity(n: usize) -> Self {
        Self { u: CMat::identity(n, n) }
    }

    /// e^{iφ}·I.
    pub fn scalar_phase(n: usize, phi: f64) -> Self {
        Self { u: CMat::identity(n, n) * C64::from_polar(1.0, phi) }
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.u
    }

    pub fn unitary_residual(&self) -> f64 {
        let n = self.n();
        linalg::cmax_abs(&(self.u.adjoint() * &self.u - CMat::identity(n, n)))
    }

    pub fn symmetry_residual(&self) -> f64 {
        linalg::cmax_abs(&(&self.u - self.u.transpose()))
    }

    pub fn det(&self) -> C64 {
        self.u.determinant()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { u: &self.u * &other.u }
    }

    pub fn adjoint(&self) -> Self {
        Self { u: self.u.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { u: self.u.transpose() }
    }
}

/// A 2n×n real matrix whose columns span a Lagrangian subspace of (R^{2n}, ω₀).
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianFrame {
    cols: RMat,
}

impl LagrangianFrame {
    /// Validate isotropy (on the orthonormalized columns, so the check is scale-free) and full rank.
    pub fn new(cols: RMat, tol: &Tolerances) -> Result<Self> {
        let n = cols.ncols();
        if n == 0 || cols.nrows() != 2 * n {
            return Err(MaslovError::Dimension { expected: 2 * n, found: cols.nrows() });
        }
        let smin = linalg::singular_values(&cols).iter().cloned().fold(f64::INFINITY, f64::min);
        if smin < tol.rank_tol {
            return Err(MaslovError::InvariantViolation { what: "frame has full rank", residual: smin });
        }
        let q = linalg::polar_orthonormalize(&cols, tol.rank_tol)?;
        let iso = linalg::max_abs(&linalg::omega_gram(&q, &q));
        if iso > tol.residual_tol {
            return Err(MaslovError::InvariantViolation { what: "frame is isotropic", residual: iso });
        }
        Ok(Self { cols })
    }

    pub fn new_unchecked(cols: RMat) -> Self {
        Self { cols }
    }

    /// L₀ = {0}×Rⁿ.
    pub fn l0(n: usize) -> Self {
        let mut cols = RMat::zeros(2 * n, n);
        for k in 0..n {
            cols[(n + k, k)] = 1.0;
        }
        Self { cols }
    }

    /// Rⁿ×{0}.
    pub fn horizontal(n: usize) -> Self {
        let mut cols = RMat::zeros(2 * n, n);
        for k in 0..n {
            cols[(k, k)] = 1.0;
        }
        Self { cols }
    }

    /// The line through (cos α, sin α) in R² (n = 1).
    pub fn line(alpha: f64) -> Self {
        Self { cols: RMat::from_column_slice(2, 1, &[alpha.cos(), alpha.sin()]) }
    }

    /// Product of lines, one per (qₖ, pₖ) plane, at the given angles.
    pub fn product_of_lines(alphas: &[f64]) -> Self {
        let n = alphas.len();
        let mut cols = RMat::zeros(2 * n, n);
        for (k, a) in alphas.iter().enumerate() {
            cols[(k, k)] = a.cos();
            cols[(n + k, k)] = a.sin();
        }
        Self { cols }
    }

    pub fn n(&self) -> usize {
        self.cols.ncols()
    }

    pub fn columns(&self) -> &RMat {
        &self.cols
    }

    pub fn column(&self, k: usize) -> DVector<f64> {
        self.cols.column(k).into_owned()
    }

    pub fn isotropy_residual(&self) -> f64 {
        linalg::max_abs(&linalg::omega_gram(&self.cols, &self.cols))
    }

    pub fn orthonormalized(&self, tol: &Tolerances) -> Result<Self> {
        Ok(Self { cols: linalg::polar_orthonormalize(&self.cols, tol.rank_tol)? })
    }

    /// Orthogonal projector onto the span of the columns.
    pub fn projector(&self, tol: &Tolerances) -> Result<RMat> {
        let q = linalg::polar_orthonormalize(&self.cols, tol.rank_tol)?;
        Ok(&q * q.transpose())
    }
}

/// The standard compatible pair (J₀, g₀) on R^{2n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KahlerPair {
    pub n: usize,
}

impl KahlerPair {
    pub fn j0(&self) -> RMat {
        linalg::j0(self.n)
    }

    pub fn g0(&self) -> RMat {
        RMat::identity(2 * self.n, 2 * self.n)
    }

    /// max |g₀(eₐ,e_b) − ω₀(eₐ, J₀e_b)| over basis vectors.
    pub fn compatibility_residual(&self) -> f64 {
        let m = 2 * self.n;
        let j = self.j0();
        let g = self.g0();
        let mut worst = 0.0_f64;
        for a in 0..m {
            for b in 0..m {
                let ea = DVector::from_fn(m, |k, _| (k == a) as u8 as f64);
                let eb = DVector::from_fn(m, |k, _| (k == b) as u8 as f64);
                let lhs = (ea.transpose() * &g * &eb)[(0, 0)];
                let rhs = linalg::omega(&ea, &(&j * &eb));
                worst = worst.max((lhs - rhs).abs());
            }
        }
        worst
    }
}

/// embed(A+iB) = [[A,−B],[B,A]] ∈ Sp(2n) ∩ O(2n).
pub fn embed_unitary(u: &UnitaryComplex) -> SymplecticMatrix {
    SymplecticMatrix::new_unchecked(linalg::embed(u.matrix()))
}

/// Checked variant of [`embed_unitary`] for raw complex matrices.
pub fn embed_unitary_checked(u: &CMat, tol: &Tolerances) -> Result<SymplecticMatrix> {
    Ok(embed_unitary(&UnitaryComplex::new(u.clone(), tol)?))
}

/// A unitary r with embed(r)·L₀ = span(L), built from an orthonormalized frame (X_q; X_p):
/// the columns of embed(r)·L₀ are (−Im r; Re r), so r = X_p − i·X_q.
pub fn unitary_representative(l: &LagrangianFrame, tol: &Tolerances) -> Result<UnitaryComplex> {
    let n = l.n();
    let q = linalg::polar_orthonormalize(l.columns(), tol.rank_tol)?;
    let xq = q.rows(0, n).into_owned();
    let xp = q.rows(n, n).into_owned();
    Ok(UnitaryComplex::new_unchecked(linalg::complexify(&xp, &(-xq))))
}

/// Souriau map L ↦ w = r·rᵀ.
pub fn souriau_map(l: &LagrangianFrame, tol: &Tolerances) -> Result<UnitaryComplex> {
    let q = l.orthonormalized(tol)?;
    let iso = q.isotropy_residual();
    if iso > tol.residual_tol {
        return Err(MaslovError::InvariantViolation { what: "frame is isotropic", residual: iso });
    }
    let r = unitary_representative(&q, tol)?;
    let w = r.matrix() * r.matrix().transpose();
    Ok(UnitaryComplex::new_unchecked(linalg::csymmetrize(&w)))
}

/// Check that w is a symmetric unitary matrix.
pub fn check_symmetric_unitary(w: &UnitaryComplex, tol: &Tolerances) -> Result<()> {
    let ur = w.unitary_residual();
    if ur > tol.residual_tol {
        return Err(MaslovError::InvariantViolation { what: "w unitary", residual: ur });
    }
    let sr = w.symmetry_residual();
    if sr > tol.residual_tol {
        return Err(MaslovError::InvariantViolation { what: "w symmetric", residual: sr });
    }
    Ok(())
}

/// A symmetric unitary square root r of a symmetric unitary w (r² = w, r = rᵀ, so w = r·rᵀ).
///
/// r is a spectral function of w. The square-root branch cut is placed in the middle of the
/// largest angular gap of the spectrum so that numerically split clusters of a repeated
/// eigenvalue never straddle it (which would break symmetry of r).
pub fn symmetric_unitary_sqrt(w: &UnitaryComplex) -> Result<UnitaryComplex> {
    use std::f64::consts::PI;
    let n = w.n();
    let (ev, q) = linalg::schur(w.matrix())?;
    let mut args: Vec<f64> = ev.iter().map(|z| z.arg().rem_euclid(2.0 * PI)).collect();
    args.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalue arguments"));
    let mut cut = args[args.len() - 1] + (args[0] + 2.0 * PI - args[args.len() - 1]) / 2.0;
    let mut best = args[0] + 2.0 * PI - args[args.len() - 1];
    for k in 1..args.len() {
        let gap = args[k] - args[k - 1];
        if gap > best {
            best = gap;
            cut = args[k - 1] + gap / 2.0;
        }
    }
    let roots = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        ev.iter().map(|z| {
            let a = (z.arg() - cut).rem_euclid(2.0 * PI) + cut;
            C64::from_polar(1.0, a / 2.0)
        }),
    ));
    let r = &q * roots * q.adjoint();
    let r = linalg::polar_unitary(&linalg::csymmetrize(&r));
    Ok(UnitaryComplex::new_unchecked(linalg::csymmetrize(&r)))
}

/// Inverse Souriau map: the Lagrangian L with souriau_map(L) = w.
pub fn lagrangian_from_souriau(w: &UnitaryComplex, tol: &Tolerances) -> Result<LagrangianFrame> {
    check_symmetric_unitary(w, tol)?;
    let r = symmetric_unitary_sqrt(w)?;
    let n = w.n();
    let rm = r.matrix();
    let mut cols = RMat::zeros(2 * n, n);
    cols.view_mut((0, 0), (n, n)).copy_from(&(-linalg::im_part(rm)));
    cols.view_mut((n, 0), (n, n)).copy_from(&linalg::re_part(rm));
    Ok(LagrangianFrame::new_unchecked(cols))
}

/// dim(span L1 ∩ span L2) = 2n − rank [L1 | L2].
pub fn intersection_dim(l1: &LagrangianFrame, l2: &LagrangianFrame, tol: &Tolerances) -> Result<usize> {
    let n = l1.n();
    if l2.n() != n {
        return Err(MaslovError::Dimension { expected: n, found: l2.n() });
    }
    let a = linalg::polar_orthonormalize(l1.columns(), tol.rank_tol)?;
    let b = linalg::polar_orthonormalize(l2.columns(), tol.rank_tol)?;
    let mut stacked = RMat::zeros(2 * n, 2 * n);
    stacked.view_mut((0, 0), (2 * n, n)).copy_from(&a);
    stacked.view_mut((0, n), (2 * n, n)).copy_from(&b);
    Ok(2 * n - linalg::rank(&stacked, tol.rank_tol))
}

/// Smallest singular value of the stacked orthonormal frames: a transversality margin
/// (zero iff the subspaces intersect).
pub fn transversality_margin(l1: &LagrangianFrame, l2: &LagrangianFrame, tol: &Tolerances) -> Result<f64> {
    let n = l1.n();
    let a = linalg::polar_orthonormalize(l1.columns(), tol.rank_tol)?;
    let b = linalg::polar_orthonormalize(l2.columns(), tol.rank_tol)?;
    let mut stacked = RMat::zeros(2 * n, 2 * n);
    stacked.view_mut((0, 0), (2 * n, n)).copy_from(&a);
    stacked.view_mut((0, n), (2 * n, n)).copy_from(&b);
    Ok(linalg::singular_values(&stacked).iter().cloned().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn scalar(z: C64) -> UnitaryComplex {
        UnitaryComplex::new(CMat::from_element(1, 1, z), &tol()).unwrap()
    }

    #[test]
    fn embed_examples() {
        let s = embed_unitary(&scalar(C64::new(1.0, 0.0)));
        assert_eq!(s.matrix(), &RMat::identity(2, 2));
        let s = embed_unitary(&scalar(C64::new(0.0, 1.0)));
        assert_eq!(s.matrix(), &linalg::j0(1));
        let s = embed_unitary(&scalar(C64::from_polar(1.0, FRAC_PI_4)));
        let h = 2f64.sqrt() / 2.0;
        let expect = RMat::from_row_slice(2, 2, &[h, -h, h, h]);
        assert!(linalg::max_abs(&(s.matrix() - expect)) < 1e-15);
        assert!(s.symplectic_residual() < 1e-15);
    }

    #[test]
    fn embed_rejects_non_unitary() {
        let err = embed_unitary_checked(&CMat::from_element(1, 1, C64::new(2.0, 0.0)), &tol()).unwrap_err();
        assert!(matches!(err, MaslovError::InvariantViolation { residual, .. } if (residual - 3.0).abs() < 1e-12));
    }

    #[test]
    fn souriau_examples() {
        let w = souriau_map(&LagrangianFrame::l0(1), &tol()).unwrap();
        assert!((w.matrix()[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        let w = souriau_map(&LagrangianFrame::horizontal(1), &tol()).unwrap();
        assert!((w.matrix()[(0, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        // r = e^{-iπ/2} rotates L₀ onto the horizontal axis
        let img = embed_unitary(&scalar(C64::new(0.0, -1.0))).apply(&LagrangianFrame::l0(1));
        assert!((img.columns()[(0, 0)].abs() - 1.0).abs() < 1e-15 && img.columns()[(1, 0)].abs() < 1e-15);
    }

    #[test]
    fn souriau_of_line_at_angle() {
        let mut rng = random::rng(11);
        for _ in 0..10 {
            let a: f64 = rand::Rng::gen_range(&mut rng, -PI..PI);
            let w = souriau_map(&LagrangianFrame::line(a), &tol()).unwrap().matrix()[(0, 0)];
            assert!((w + C64::from_polar(1.0, 2.0 * a)).norm() < 1e-14);
            // oracle: r = e^{i(α−π/2)} maps L₀ onto the line
            let img = embed_unitary(&scalar(C64::from_polar(1.0, a - PI / 2.0))).apply(&LagrangianFrame::l0(1));
            let cross = img.columns()[(0, 0)] * a.sin() - img.columns()[(1, 0)] * a.cos();
            assert!(cross.abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_souriau_examples() {
        let t = tol();
        let l = lagrangian_from_souriau(&scalar(C64::new(1.0, 0.0)), &t).unwrap();
        assert_eq!(intersection_dim(&l, &LagrangianFrame::l0(1), &t).unwrap(), 1);
        let l = lagrangian_from_souriau(&scalar(C64::new(-1.0, 0.0)), &t).unwrap();
        assert_eq!(intersection_dim(&l, &LagrangianFrame::horizontal(1), &t).unwrap(), 1);
        let l = lagrangian_from_souriau(&UnitaryComplex::identity(2), &t).unwrap();
        assert_eq!(intersection_dim(&l, &LagrangianFrame::l0(2), &t).unwrap(), 2);
    }

    #[test]
    fn inverse_souriau_repeated_eigenvalue_near_cut() {
        // w = −I has a doubly repeated eigenvalue exactly on the principal cut.
        let t = tol();
        let w = UnitaryComplex::new(-CMat::identity(2, 2), &t).unwrap();
        let l = lagrangian_from_souriau(&w, &t).unwrap();
        let back = souriau_map(&l, &t).unwrap();
        assert!(linalg::cmax_abs(&(back.matrix() - w.matrix())) < 1e-12);
    }

    #[test]
    fn intersection_dim_examples() {
        let t = tol();
        let l0 = LagrangianFrame::l0(2);
        assert_eq!(intersection_dim(&l0, &l0, &t).unwrap(), 2);
        assert_eq!(intersection_dim(&LagrangianFrame::l0(1), &LagrangianFrame::horizontal(1), &t).unwrap(), 0);
        let l2 =
            LagrangianFrame::new(RMat::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]), &t).unwrap();
        assert_eq!(intersection_dim(&l0, &l2, &t).unwrap(), 1);
        // brute-force oracle: null space of [L1 | -L2]
        let mut st = RMat::zeros(4, 4);
        st.view_mut((0, 0), (4, 2)).copy_from(l0.columns());
        st.view_mut((0, 2), (4, 2)).copy_from(&(-l2.columns()));
        let nullity = linalg::singular_values(&st).iter().filter(|s| **s < 1e-10).count();
        assert_eq!(nullity, 1);
        assert!(intersection_dim(&l0, &LagrangianFrame::l0(1), &t).is_err());
    }

    #[test]
    fn frame_validation() {
        let t = tol();
        // span{e_q1, e_p1} is symplectic, not Lagrangian
        let bad = RMat::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(LagrangianFrame::new(bad, &t).is_err());
        let deficient = RMat::from_row_slice(2, 1, &[0.0, 0.0]);
        assert!(LagrangianFrame::new(deficient, &t).is_err());
    }

    #[test]
    fn kahler_pair_compatible() {
        for n in 1..4 {
            assert_eq!(KahlerPair { n }.compatibility_residual(), 0.0);
        }
    }

    #[test]
    fn symplectic_inverse_and_checks() {
        let t = tol();
        let u = random::unitary(&mut random::rng(3), 3);
        let s = embed_unitary(&UnitaryComplex::new(u, &t).unwrap());
        assert!(s.is_unitary_image(&t));
        let id = s.compose(&s.inverse());
        assert!(linalg::max_abs(&(id.matrix() - RMat::identity(6, 6))) < 1e-13);
        let shear = RMat::from_row_slice(2, 2, &[1.0, 0.0, 2.0, 1.0]);
        let sh = SymplecticMatrix::new(shear, &t).unwrap();
        assert!(!sh.is_unitary_image(&t));
        assert!(SymplecticMatrix::new(RMat::identity(2, 2) * 2.0, &t).is_err());
    }
}
