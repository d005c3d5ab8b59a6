#![allow(dead_code)]

use maslov_core::linalg::{CMat, RMat, C64};
use maslov_core::maslov::{CoverPoint, DeckAction};
use maslov_core::random::{self, SeedRng};
use maslov_core::symplectic::{embed_unitary, LagrangianFrame, UnitaryComplex};
use maslov_core::Tolerances;

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn unitary(rng: &mut SeedRng, n: usize) -> UnitaryComplex {
    UnitaryComplex::new_unchecked(random::unitary(rng, n))
}

pub fn lagrangian(rng: &mut SeedRng, n: usize) -> LagrangianFrame {
    embed_unitary(&unitary(rng, n)).apply(&LagrangianFrame::l0(n))
}

pub fn cover_point(rng: &mut SeedRng, n: usize, r: i64) -> CoverPoint {
    let x = CoverPoint::principal(&lagrangian(rng, n), &tol()).unwrap();
    DeckAction { r }.apply(&x)
}

/// exp(iH) for Hermitian H, from its (diagonal) Schur form.
pub fn expi(h: &CMat) -> CMat {
    let n = h.nrows();
    let (ev, q) = maslov_core::linalg::schur(h).unwrap();
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(n, ev.iter().map(|l| C64::from_polar(1.0, l.re))));
    &q * d * q.adjoint()
}

pub fn real_identity(n: usize) -> RMat {
    RMat::identity(n, n)
}
