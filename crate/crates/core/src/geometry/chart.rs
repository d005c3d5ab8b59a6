//! Parametrized Lagrangian embeddings u ↦ i(u) ∈ R^{2n}, points stored as (q₁…qₙ, p₁…pₙ).

use serde::{Deserialize, Serialize};

use crate::error::{MaslovError, Result};
use crate::linalg::{self, RMat};
use crate::tolerance::Tolerances;

/// `coef · Π_j u_j^{exponents[j]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialTerm {
    pub coef: f64,
    pub exponents: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorFn {
    Pow,
    Cos,
    Sin,
}

/// One factor of a custom term: u_var^k, cos(k·u_var) or sin(k·u_var).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factor {
    pub var: usize,
    #[serde(rename = "fn")]
    pub func: FactorFn,
    #[serde(default = "one")]
    pub k: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coef: f64,
    #[serde(default)]
    pub factors: Vec<Factor>,
}

/// Catalog description of a chart, as it appears in experiment files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChartSpec {
    /// u ↦ (r cos u, r sin u).
    Circle {
        #[serde(default = "one")]
        radius: f64,
    },
    /// (u₁…uₙ) ↦ (r₁cos u₁, …, rₙcos uₙ, r₁sin u₁, …, rₙsin uₙ).
    ProductTorus { radii: Vec<f64> },
    /// u ↦ (u, ∇φ(u)) for a polynomial potential φ; an empty potential is the flat plane.
    GradientGraph {
        n: usize,
        #[serde(default)]
        potential: Vec<MonomialTerm>,
    },
    /// 2n components, each a sum of products of powers and trigonometric factors.
    Custom { n: usize, components: Vec<Vec<Term>> },
}

/// A validated chart.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianChart {
    spec: ChartSpec,
    n: usize,
}

fn factor_value(f: &Factor, u: &[f64]) -> f64 {
    let x = u[f.var];
    match f.func {
        FactorFn::Pow => x.powi(f.k as i32),
        FactorFn::Cos => (f.k * x).cos(),
        FactorFn::Sin => (f.k * x).sin(),
    }
}

fn factor_derivative(f: &Factor, u: &[f64]) -> f64 {
    let x = u[f.var];
    match f.func {
        FactorFn::Pow if f.k == 0.0 => 0.0,
        FactorFn::Pow => f.k * x.powi(f.k as i32 - 1),
        FactorFn::Cos => -f.k * (f.k * x).sin(),
        FactorFn::Sin => f.k * (f.k * x).cos(),
    }
}

fn term_value(t: &Term, u: &[f64]) -> f64 {
    t.factors.iter().fold(t.coef, |acc, f| acc * factor_value(f, u))
}

fn term_partial(t: &Term, u: &[f64], j: usize) -> f64 {
    let mut total = 0.0;
    for (idx, f) in t.factors.iter().enumerate() {
        if f.var != j {
            continue;
        }
        let rest: f64 =
            t.factors.iter().enumerate().filter(|(other, _)| *other != idx).map(|(_, g)| factor_value(g, u)).product();
        total += t.coef * factor_derivative(f, u) * rest;
    }
    total
}

/// ∂^{e}-style helpers for monomials: value of ∂_a ∂_b (coef·u^e), with None meaning "no b".
fn monomial_partial(term: &MonomialTerm, u: &[f64], a: usize, b: Option<usize>) -> f64 {
    let mut e: Vec<i64> = term.exponents.iter().map(|&k| k as i64).collect();
    let mut c = term.coef;
    for d in std::iter::once(a).chain(b) {
        if e[d] == 0 {
            return 0.0;
        }
        c *= e[d] as f64;
        e[d] -= 1;
    }
    e.iter().zip(u).fold(c, |acc, (&k, &x)| acc * x.powi(k as i32))
}

/// Largest parameter dimension accepted from a chart record.
pub const MAX_CHART_DIM: usize = 64;

impl LagrangianChart {
    pub fn new(spec: ChartSpec) -> Result<Self> {
        let bad = |msg: String| Err(MaslovError::InvalidInput(msg));
        if let ChartSpec::GradientGraph { n, .. } | ChartSpec::Custom { n, .. } = &spec {
            if *n > MAX_CHART_DIM {
                return bad(format!("chart dimension {n} exceeds {MAX_CHART_DIM}"));
            }
        }
        let n = match &spec {
            ChartSpec::Circle { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return bad(format!("circle radius must be positive, got {radius}"));
                }
                1
            }
            ChartSpec::ProductTorus { radii } => {
                if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                    return bad("product_torus needs at least one positive radius".into());
                }
                radii.len()
            }
            ChartSpec::GradientGraph { n, potential } => {
                if *n == 0 {
                    return bad("gradient_graph needs n ≥ 1".into());
                }
                for t in potential {
                    if t.exponents.len() != *n || !t.coef.is_finite() {
                        return bad(format!("potential term needs {n} exponents and a finite coefficient"));
                    }
                }
                *n
            }
            ChartSpec::Custom { n, components } => {
                if *n == 0 || components.len() != 2 * n {
                    return bad(format!("custom chart with n = {n} needs {} components", 2 * n));
                }
                for t in components.iter().flatten() {
                    if !t.coef.is_finite() {
                        return bad("non-finite coefficient".into());
                    }
                    for f in &t.factors {
                        if f.var >= *n || !f.k.is_finite() {
                            return bad(format!("factor variable {} out of range or bad k", f.var));
                        }
                        if f.func == FactorFn::Pow && (f.k < 0.0 || f.k.fract() != 0.0 || f.k > 64.0) {
                            return bad(format!("pow factor needs a small non-negative integer k, got {}", f.k));
                        }
                    }
                }
                *n
            }
        };
        if n > MAX_CHART_DIM {
            return bad(format!("chart dimension {n} exceeds {MAX_CHART_DIM}"));
        }
        Ok(Self { spec, n })
    }

    pub fn circle() -> Self {
        Self::new(ChartSpec::Circle { radius: 1.0 }).expect("unit circle")
    }

    pub fn product_torus(radii: Vec<f64>) -> Result<Self> {
        Self::new(ChartSpec::ProductTorus { radii })
    }

    pub fn plane(n: usize) -> Result<Self> {
        Self::new(ChartSpec::GradientGraph { n, potential: vec![] })
    }

    pub fn spec(&self) -> &ChartSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tag(&self) -> &'static str {
        match self.spec {
            ChartSpec::Circle { .. } => "circle",
            ChartSpec::ProductTorus { .. } => "product_torus",
            ChartSpec::GradientGraph { .. } => "gradient_graph",
            ChartSpec::Custom { .. } => "custom",
        }
    }

    fn check_arg(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n {
            return Err(MaslovError::Dimension { expected: self.n, found: u.len() });
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(MaslovError::InvalidInput("non-finite chart parameter".into()));
        }
        Ok(())
    }

    /// The point i(u) ∈ R^{2n}.
    pub fn eval(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_arg(u)?;
        let n = self.n;
        Ok(match &self.spec {
            ChartSpec::Circle { radius } => vec![radius * u[0].cos(), radius * u[0].sin()],
            ChartSpec::ProductTorus { radii } => {
                let q = radii.iter().zip(u).map(|(r, x)| r * x.cos());
                let p = radii.iter().zip(u).map(|(r, x)| r * x.sin());
                q.chain(p).collect()
            }
            ChartSpec::GradientGraph { potential, .. } => {
                let mut out = u.to_vec();
                out.extend((0..n).map(|a| potential.iter().map(|t| monomial_partial(t, u, a, None)).sum::<f64>()));
                out
            }
            ChartSpec::Custom { components, .. } => {
                components.iter().map(|c| c.iter().map(|t| term_value(t, u)).sum()).collect()
            }
        })
    }

    /// The 2n×n Jacobian, in closed form.
    pub fn jacobian(&self, u: &[f64]) -> Result<RMat> {
        self.check_arg(u)?;
        let n = self.n;
        Ok(match &self.spec {
            ChartSpec::Circle { radius } => RMat::from_column_slice(2, 1, &[-radius * u[0].sin(), radius * u[0].cos()]),
            ChartSpec::ProductTorus { radii } => {
                let mut j = RMat::zeros(2 * n, n);
                for k in 0..n {
                    j[(k, k)] = -radii[k] * u[k].sin();
                    j[(n + k, k)] = radii[k] * u[k].cos();
                }
                j
            }
            ChartSpec::GradientGraph { potential, .. } => {
                let mut j = RMat::zeros(2 * n, n);
                for a in 0..n {
                    j[(a, a)] = 1.0;
                    for b in 0..n {
                        j[(n + a, b)] = potential.iter().map(|t| monomial_partial(t, u, a, Some(b))).sum();
                    }
                }
                j
            }
            ChartSpec::Custom { components, .. } => {
                RMat::from_fn(2 * n, n, |r, c| components[r].iter().map(|t| term_partial(t, u, c)).sum())
            }
        })
    }

    /// Jacobian with linearly independent columns; rank deficiency is an immersion error.
    pub fn immersed_jacobian(&self, u: &[f64], tol: &Tolerances) -> Result<RMat> {
        let j = self.jacobian(u)?;
        let sv = linalg::singular_values(&j);
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if smin <= tol.rank_tol {
            return Err(MaslovError::Immersion { at: u.to_vec(), sigma: smin });
        }
        Ok(j)
    }

    /// max |Jᵀ J₀ J|, the pullback of ω₀.
    pub fn lagrangian_residual(&self, u: &[f64]) -> Result<f64> {
        let j = self.jacobian(u)?;
        Ok(linalg::max_abs(&linalg::omega_gram(&j, &j)))
    }

    /// Checks the Lagrangian and immersion conditions at the given parameters.
    pub fn check_samples<'a>(&self, us: impl IntoIterator<Item = &'a [f64]>, tol: &Tolerances) -> Result<()> {
        for u in us {
            self.immersed_jacobian(u, tol)?;
            let r = self.lagrangian_residual(u)?;
            if r > tol.residual_tol {
                return Err(MaslovError::InvariantViolation { what: "pullback of ω₀ vanishes", residual: r });
            }
        }
        Ok(())
    }
}

/// Central finite-difference Jacobian with step h; a test oracle for the closed forms.
pub fn fd_jacobian(chart: &LagrangianChart, u: &[f64], h: f64) -> Result<RMat> {
    let n = chart.n();
    let mut j = RMat::zeros(2 * n, n);
    let mut up = u.to_vec();
    for c in 0..n {
        up[c] = u[c] + h;
        let plus = chart.eval(&up)?;
        up[c] = u[c] - h;
        let minus = chart.eval(&up)?;
        up[c] = u[c];
        for r in 0..2 * n {
            j[(r, c)] = (plus[r] - minus[r]) / (2.0 * h);
        }
    }
    Ok(j)
}

/// g(u) = Jᵀ J, the metric making the embedding isometric.
pub fn induced_metric(chart: &LagrangianChart, u: &[f64], tol: &Tolerances) -> Result<RMat> {
    let j = chart.immersed_jacobian(u, tol)?;
    Ok(linalg::symmetrize(&(j.transpose() * j)))
}
