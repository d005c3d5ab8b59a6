//! Sparse multivariate polynomials with complex coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::linalg::{RMat, C64};

/// Σ_α c_α x^α, keyed by exponent vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C64::new(1.0, 0.0))
    }

    /// The coordinate function x_j.
    pub fn variable(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        Self::monomial(e, C64::new(1.0, 0.0))
    }

    pub fn monomial(exps: Vec<u32>, c: C64) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if c != C64::new(0.0, 0.0) {
            terms.insert(exps, c);
        }
        Self { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> C64 {
        self.terms.get(exps).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Some(d mod 2) if every monomial has the same degree parity.
    pub fn parity(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>() % 2);
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |a, c| a.max(c.norm()))
    }

    /// Drop coefficients of modulus ≤ tol · (largest modulus).
    pub fn pruned(mut self, rel_tol: f64) -> Self {
        let cut = rel_tol * self.max_abs_coeff();
        self.terms.retain(|_, c| c.norm() > cut);
        self
    }

    fn add_term(&mut self, e: Vec<u32>, c: C64) {
        let entry = self.terms.entry(e).or_insert(C64::new(0.0, 0.0));
        *entry += c;
        // exact cancellations only; numerical noise is handled by `pruned`
        if *entry == C64::new(0.0, 0.0) {
            self.terms.retain(|_, v| *v != C64::new(0.0, 0.0));
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    /// x_j · p.
    pub fn mul_var(&self, j: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e = e.clone();
                e[j] += 1;
                (e, *c)
            })
            .collect();
        Self { nvars: self.nvars, terms }
    }

    /// ∂p/∂x_j.
    pub fn derivative(&self, j: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[j] > 0 {
                let mut d = e.clone();
                d[j] -= 1;
                out.add_term(d, c * e[j] as f64);
            }
        }
        out
    }

    pub fn eval(&self, x: &[C64]) -> C64 {
        self.terms.iter().map(|(e, c)| e.iter().zip(x).fold(*c, |acc, (&k, xi)| acc * xi.powu(k))).sum()
    }

    pub fn eval_real(&self, x: &[f64]) -> C64 {
        let xc: Vec<C64> = x.iter().map(|v| C64::new(*v, 0.0)).collect();
        self.eval(&xc)
    }

    /// p(A·x): substitute x_j ↦ Σ_k A_jk x_k.
    pub fn compose_linear(&self, a: &RMat) -> Self {
        let n = self.nvars;
        let forms: Vec<Polynomial> = (0..n)
            .map(|j| {
                let mut f = Self::zero(n);
                for k in 0..n {
                    if a[(j, k)] != 0.0 {
                        f = &f + &Self::variable(n, k).scale(C64::new(a[(j, k)], 0.0));
                    }
                }
                f
            })
            .collect();
        let mut powers: Vec<Vec<Polynomial>> = forms.iter().map(|f| vec![Self::one(n), f.clone()]).collect();
        let mut out = Self::zero(n);
        for (e, c) in &self.terms {
            let mut term = Self::constant(n, *c);
            for (j, &k) in e.iter().enumerate() {
                while powers[j].len() <= k as usize {
                    let next = &powers[j][powers[j].len() - 1] * &forms[j];
                    powers[j].push(next);
                }
                term = &term * &powers[j][k as usize];
            }
            out = &out + &term;
        }
        out
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                // Exponents add when monomials multiply.
                #[allow(clippy::suspicious_arithmetic_impl)]
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}
