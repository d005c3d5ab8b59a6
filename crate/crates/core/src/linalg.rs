//! Dense linear-algebra helpers on top of `nalgebra`.
//!
//! Points of R^{2n} are ordered (q₁…qₙ, p₁…pₙ). With that ordering the standard
//! complex structure is J₀ = [[0,−I],[I,0]] and ω₀(u,v) = u_q·v_p − u_p·v_q.

use nalgebra::linalg::Schur;
use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{MaslovError, Result};

pub type C64 = Complex<f64>;
pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// J₀ = [[0,−I],[I,0]].
pub fn j0(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = -1.0;
        j[(n + k, k)] = 1.0;
    }
    j
}

/// ω₀(u, v) for vectors in R^{2n}.
pub fn omega(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let n = u.len() / 2;
    (0..n).map(|k| u[k] * v[n + k] - u[n + k] * v[k]).sum()
}

/// Gram matrix of ω₀ between the columns of `a` and `b`: G_ij = ω₀(a_i, b_j).
pub fn omega_gram(a: &RMat, b: &RMat) -> RMat {
    let n = a.nrows() / 2;
    let (aq, ap) = (a.rows(0, n), a.rows(n, n));
    let (bq, bp) = (b.rows(0, n), b.rows(n, n));
    aq.transpose() * bp - ap.transpose() * bq
}

pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn cmax_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.norm()))
}

/// Real block embedding A+iB ↦ [[A,−B],[B,A]].
pub fn embed(u: &CMat) -> RMat {
    let n = u.nrows();
    let mut s = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = u[(i, j)];
            s[(i, j)] = z.re;
            s[(i, n + j)] = -z.im;
            s[(n + i, j)] = z.im;
            s[(n + i, n + j)] = z.re;
        }
    }
    s
}

/// Inverse of [`embed`] on matrices of the form [[A,−B],[B,A]] (reads the left column blocks).
pub fn unembed(s: &RMat) -> CMat {
    let n = s.nrows() / 2;
    CMat::from_fn(n, n, |i, j| C64::new(s[(i, j)], s[(n + i, j)]))
}

/// Split a 2n×2n matrix into its n×n blocks (A, B, C, D) = [[A,B],[C,D]].
pub fn blocks(s: &RMat) -> (RMat, RMat, RMat, RMat) {
    let n = s.nrows() / 2;
    (
        s.view((0, 0), (n, n)).into_owned(),
        s.view((0, n), (n, n)).into_owned(),
        s.view((n, 0), (n, n)).into_owned(),
        s.view((n, n), (n, n)).into_owned(),
    )
}

pub fn from_blocks(a: &RMat, b: &RMat, c: &RMat, d: &RMat) -> RMat {
    let n = a.nrows();
    let mut s = RMat::zeros(2 * n, 2 * n);
    s.view_mut((0, 0), (n, n)).copy_from(a);
    s.view_mut((0, n), (n, n)).copy_from(b);
    s.view_mut((n, 0), (n, n)).copy_from(c);
    s.view_mut((n, n), (n, n)).copy_from(d);
    s
}

pub fn complexify(re: &RMat, im: &RMat) -> CMat {
    CMat::from_fn(re.nrows(), re.ncols(), |i, j| C64::new(re[(i, j)], im[(i, j)]))
}

pub fn to_complex(re: &RMat) -> CMat {
    re.map(|x| C64::new(x, 0.0))
}

pub fn re_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn im_part(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

pub fn symmetrize(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

pub fn csymmetrize(m: &CMat) -> CMat {
    (m + m.transpose()) * C64::new(0.5, 0.0)
}

pub fn singular_values(m: &RMat) -> DVector<f64> {
    m.clone().svd(false, false).singular_values
}

pub fn rank(m: &RMat, tol: f64) -> usize {
    singular_values(m).iter().filter(|&&s| s > tol).count()
}

/// Signature (#positive − #negative eigenvalues) of a real symmetric matrix; eigenvalues
/// with modulus ≤ `tol` are dropped.
pub fn signature(sym: &RMat, tol: f64) -> i64 {
    if sym.nrows() == 0 {
        return 0;
    }
    let ev = symmetrize(sym).symmetric_eigenvalues();
    ev.iter()
        .map(|&l| {
            if l > tol {
                1
            } else if l < -tol {
                -1
            } else {
                0
            }
        })
        .sum()
}

/// G^{−1/2} for a symmetric positive-definite G.
pub fn spd_inv_sqrt(g: &RMat, tol: f64) -> Result<RMat> {
    let eig = symmetrize(g).symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= tol * tol {
        return Err(MaslovError::Conditioning(format!("Gram matrix not positive definite (λ_min = {min:.3e})")));
    }
    let d = RMat::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// Symmetric (Löwdin) orthonormalization E·(EᵀE)^{−1/2}.
///
/// Unlike Gram–Schmidt this is independent of column order and is the closest orthonormal
/// frame to E, which makes projection transport second-order accurate.
pub fn polar_orthonormalize(e: &RMat, rank_tol: f64) -> Result<RMat> {
    let g = e.transpose() * e;
    Ok(e * spd_inv_sqrt(&g, rank_tol)?)
}

/// Unitary polar factor U·Vᴴ of a square complex matrix.
pub fn polar_unitary(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, true);
    svd.u.expect("requested u") * svd.v_t.expect("requested v_t")
}

/// Complex Schur decomposition m = Q T Qᴴ; returns (diag T, Q).
///
/// For normal matrices (unitary ones in particular) T is diagonal and Q holds eigenvectors.
/// The QR iteration occasionally stalls on normal matrices with repeated eigenvalues; those are
/// then diagonalized through the Hermitian pencil instead (see [`normal_eig`]).
pub fn schur(m: &CMat) -> Result<(Vec<C64>, CMat)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((vec![], CMat::zeros(0, 0)));
    }
    if let Some(s) = Schur::try_new(m.clone(), f64::EPSILON, 100_000) {
        let (q, t) = s.unpack();
        return Ok(((0..n).map(|k| t[(k, k)]).collect(), q));
    }
    let scale = cmax_abs(m).max(1.0);
    if cmax_abs(&(m * m.adjoint() - m.adjoint() * m)) <= 1e-10 * scale * scale {
        return Ok(normal_eig(m));
    }
    Err(MaslovError::Conditioning("complex Schur iteration did not converge".into()))
}

/// Eigen-decomposition of a normal matrix through the Hermitian matrix Re m + c·Im m
/// (Re, Im in the operator sense), which shares its eigenvectors; c is an irrational weight so
/// that distinct eigenvalues of m stay distinct.
pub fn normal_eig(m: &CMat) -> (Vec<C64>, CMat) {
    let c = std::f64::consts::FRAC_1_SQRT_2 * 0.816_496_580_927_726;
    let re = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let im = (m - m.adjoint()) * C64::new(0.0, -0.5);
    let h = &re + im * C64::new(c, 0.0);
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let q = nalgebra::SymmetricEigen::new(h).eigenvectors;
    let d = q.adjoint() * m * &q;
    ((0..m.nrows()).map(|k| d[(k, k)]).collect(), q)
}

pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    Ok(schur(m)?.0)
}

/// Principal argument in (−π, π].
pub fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if a <= -std::f64::consts::PI {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

/// Wrap an angle into (−π, π].
pub fn wrap_pi(a: f64) -> f64 {
    use std::f64::consts::PI;
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// det(M)^{−1/2} on the canonical branch of the domain Re M ≻ 0.
///
/// Every eigenvalue of such an M lies in the open right half plane, so the product of
/// principal square roots is continuous there and positive on real positive-definite M.
pub fn det_inv_sqrt_siegel(m: &CMat) -> Result<C64> {
    let ev = eigenvalues(m)?;
    let mut out = ONE;
    for l in ev {
        if l.re <= 0.0 {
            return Err(MaslovError::StateDomain(format!("eigenvalue {l} outside the right half plane")));
        }
        out /= l.sqrt();
    }
    Ok(out)
}

/// i^{k/2} with the fixed root i^{1/2} = e^{iπ/4}.
pub fn i_pow_half(k: i64) -> C64 {
    C64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * k as f64)
}

/// i^k for integer k.
pub fn i_pow(k: i64) -> C64 {
    match k.rem_euclid(4) {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}
