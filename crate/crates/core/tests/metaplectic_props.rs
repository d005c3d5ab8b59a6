mod common;

use common::{expi, tol};
use maslov_core::linalg::{self, CMat, C64};
use maslov_core::maslov::{clm_index, mu_hat_on_cover, LagrangianPath, DEFAULT_REFINE_MAX};
use maslov_core::metaplectic::hermite::{level_basis, level_of};
use maslov_core::metaplectic::{
    apply_generator, apply_quad_fourier, lift_frame_path, mu_hat_composed, quad_fourier_from_symplectic, solve_branch,
    GaussianAmplitude, Generator, MetaplecticElement, QuadraticFourier,
};
use maslov_core::poly::Polynomial;
use maslov_core::random::{self, SeedRng, SeedableRng};
use maslov_core::symplectic::{embed_unitary, LagrangianFrame, SymplecticMatrix, UnitaryComplex};
use proptest::prelude::*;
use rand::Rng;

fn seeded(seed: u64) -> SeedRng {
    SeedRng::seed_from_u64(seed)
}

fn random_state(rng: &mut SeedRng, n: usize) -> GaussianAmplitude {
    let a = random::well_conditioned(rng, n);
    let re = a.transpose() * &a;
    let im = random::symmetric(rng, n);
    let m = linalg::complexify(&re, &im);
    let mut poly = Polynomial::zero(n);
    for _ in 0..3 {
        let exps: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        poly = &poly + &Polynomial::monomial(exps, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    if poly.is_zero() {
        poly = Polynomial::one(n);
    }
    GaussianAmplitude { c: C64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(-3.0..3.0)), m, poly }
}

fn random_generator(rng: &mut SeedRng, n: usize) -> Generator {
    match rng.gen_range(0..3) {
        0 => {
            let a = random::well_conditioned(rng, n);
            let m = if a.determinant() > 0.0 { 2 * rng.gen_range(0..2) } else { 2 * rng.gen_range(0..2) + 1 };
            Generator::Dilate { a, m }
        }
        1 => Generator::Chirp { b: random::symmetric(rng, n) },
        _ => Generator::JHat,
    }
}

fn random_qf(rng: &mut SeedRng, n: usize) -> QuadraticFourier {
    let l = random::well_conditioned(rng, n);
    let m = if l.determinant() > 0.0 { 2 * rng.gen_range(0..2) } else { 2 * rng.gen_range(0..2) + 1 };
    QuadraticFourier::new(random::symmetric(rng, n), l, random::symmetric(rng, n), m, &tol()).unwrap()
}

/// U(t) = Π_j exp(i t K_j) sampled on [0, 1].
fn unitary_path(rng: &mut SeedRng, n: usize, factors: usize, count: usize) -> Vec<(f64, SymplecticMatrix)> {
    let ks: Vec<CMat> = (0..factors).map(|_| random::hermitian(rng, n).map(|z| z * 1.5)).collect();
    (0..=count)
        .map(|k| {
            let t = k as f64 / count as f64;
            let u = ks.iter().fold(CMat::identity(n, n), |acc, h| acc * expi(&h.map(|z| z * t)));
            (t, embed_unitary(&UnitaryComplex::new_unchecked(linalg::polar_unitary(&u))))
        })
        .collect()
}

fn norm_ratio(a: &GaussianAmplitude, b: &GaussianAmplitude) -> f64 {
    (a.norm().unwrap() / b.norm().unwrap() - 1.0).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn generators_and_quad_fouriers_are_unitary(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = seeded(seed);
        let s = random_state(&mut rng, n);
        let mut cur = s.clone();
        for _ in 0..4 {
            let g = random_generator(&mut rng, n);
            let next = apply_generator(&g, &cur, &tol()).unwrap();
            prop_assert!(norm_ratio(&next, &cur) < 1e-9);
            cur = next;
        }
        let qf = random_qf(&mut rng, n);
        let out = apply_quad_fourier(&qf, &s, &tol()).unwrap();
        prop_assert!(norm_ratio(&out, &s) < 1e-9);
    }

    /// ⟨Ŝu, v⟩ = ⟨u, Ŝ*v⟩ with Ŝ* the quadratic Fourier transform of the adjoint data.
    #[test]
    fn adjoint_relation(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = seeded(seed);
        let qf = random_qf(&mut rng, n);
        let (u, v) = (GaussianAmplitude::ground(n), random_state(&mut rng, n));
        let lhs = apply_quad_fourier(&qf, &u, &tol()).unwrap().inner(&v).unwrap();
        let rhs = u.inner(&apply_quad_fourier(&qf.adjoint(), &v, &tol()).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0));
    }

    /// Ŝ_a Ŝ_b = Ŝ_{a'} Ŝ_c for a random free c: both factorizations give the same μ̂.
    #[test]
    fn cocycle_independent_of_factorization(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = seeded(seed);
        let t = tol();
        let (a, b, c) = (random_qf(&mut rng, n), random_qf(&mut rng, n), random_qf(&mut rng, n));
        let whole = a.symplectic().compose(&b.symplectic());
        let rest = whole.compose(&c.symplectic().inverse());
        let (_, bb, _, _) = rest.blocks();
        prop_assume!(bb.determinant().abs() > 1e-3);
        let u0 = GaussianAmplitude::ground(n);
        let target = apply_quad_fourier(&a, &apply_quad_fourier(&b, &u0, &t).unwrap(), &t).unwrap();
        let via_c = apply_quad_fourier(&c, &u0, &t).unwrap();
        let a2 = solve_branch(&quad_fourier_from_symplectic(&rest, 0, &t).unwrap(), &via_c, &target, &t).unwrap();
        prop_assert_eq!(mu_hat_composed(&a, &b, &t).unwrap(), mu_hat_composed(&a2, &c, &t).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn branch_tracking_stable_under_doubling(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = seeded(seed);
        let state = random_state(&mut rng, n);
        let pure = GaussianAmplitude { poly: Polynomial::one(n), ..state.clone() };
        let mut rng2 = seeded(seed ^ 0x5eed);
        let coarse = unitary_path(&mut rng2.clone(), n, 3, 24);
        let fine = unitary_path(&mut rng2, n, 3, 48);
        for s0 in [&pure, &state] {
            let a = lift_frame_path(&coarse, s0, &tol(), DEFAULT_REFINE_MAX).unwrap().state;
            let b = lift_frame_path(&fine, s0, &tol(), DEFAULT_REFINE_MAX).unwrap().state;
            prop_assert!((a.c - b.c).norm() <= tol().phase_tol * a.c.norm().max(1.0), "{} vs {}", a.c, b.c);
            prop_assert!(linalg::cmax_abs(&(&a.m - &b.m)) < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// μ on the cover, 2·μ_CLM + n − dim, and 2m − n from the Gaussian calculus agree mod 8.
    #[test]
    fn mod8_three_way(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = seeded(seed);
        let t = tol();
        let path = unitary_path(&mut rng, n, 3, 40);
        let l0 = LagrangianFrame::l0(n);
        let cover = mu_hat_on_cover(&path, &l0, &t, DEFAULT_REFINE_MAX).unwrap();
        let lpath = LagrangianPath::new(path.iter().map(|(s, m)| (*s, m.apply(&l0))).collect()).unwrap();
        let clm = clm_index(&lpath, &t, DEFAULT_REFINE_MAX).unwrap();
        let from_clm = (2 * clm.index + n as i64 - clm.intersection_dim as i64).rem_euclid(8);
        let lift = lift_frame_path(&path, &GaussianAmplitude::ground(n), &t, DEFAULT_REFINE_MAX).unwrap();
        let end = &path.last().unwrap().1;
        let el = MetaplecticElement::from_lift(end, &GaussianAmplitude::ground(n), &lift.probe, &t).unwrap();
        let gaussian = el.mu_hat(&t).unwrap();
        prop_assert_eq!(cover.mod8, from_clm);
        prop_assert_eq!(cover.mod8, gaussian, "factors {}", el.factors.len());
    }

    /// Unitary-image quadratic Fourier transforms keep Hermite states in their level.
    #[test]
    fn eigenspaces_preserved(seed in any::<u64>(), n in 1usize..=2, level in 0u32..=3) {
        let mut rng = seeded(seed);
        let s = embed_unitary(&UnitaryComplex::new_unchecked(random::unitary(&mut rng, n)));
        let (_, b, _, _) = s.blocks();
        prop_assume!(b.determinant().abs() > 1e-3);
        let qf = quad_fourier_from_symplectic(&s, rng.gen_range(0..4), &tol()).unwrap();
        for psi in level_basis(n, level) {
            let out = apply_quad_fourier(&qf, &psi, &tol()).unwrap();
            prop_assert!(linalg::cmax_abs(&(&out.m - CMat::identity(n, n))) < 1e-9);
            let absorbed = GaussianAmplitude { poly: out.poly.scale(out.c), c: C64::new(1.0, 0.0), ..out.clone() };
            prop_assert_eq!(level_of(&absorbed, 1e-8), Some(level));
            prop_assert_eq!(out.poly.parity(), psi.poly.parity());
        }
    }
}
