//! Command execution.

use std::f64::consts::PI;

use serde_json::json;

use maslov_core::geometry::verify::{
    holonomy_data, verify_corollary1, verify_theorem1, verify_theorem2, EndpointCase, Theorem1Report, Theorem2Report,
};
use maslov_core::geometry::{tangent_lagrangian_path, LagrangianChart, ParamPath};
use maslov_core::linalg;
use maslov_core::maslov::{
    clm_index, kashiwara_signature_with, leray_index, lift_path, CoverPoint, DeckAction, KashiwaraForm,
    DEFAULT_REFINE_MAX,
};
use maslov_core::random::{self, SeedableRng};
use maslov_core::symplectic::{embed_unitary, intersection_dim, LagrangianFrame, UnitaryComplex};
use maslov_core::{MaslovError, Tolerances};

use crate::report::{Report, TraceRow};
use crate::spec::{Command, ExperimentSpec, LagrangianSpec, NamedPath, PathSpec};
use crate::CliError;

/// Convention profiles selectable through the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConventionProfile {
    /// τ from ω(z₁,z₂) + ω(z₂,z₃) + ω(z₁,z₃), the form satisfying the coboundary identity
    /// with the Souriau-coordinate Leray index.
    PaperV1,
    /// τ reported with the cyclic form ω(z₁,z₂) + ω(z₂,z₃) + ω(z₃,z₁) instead (opposite sign).
    CyclicTau,
}

impl ConventionProfile {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "paper-v1" => Ok(Self::PaperV1),
            "cyclic-tau" => Ok(Self::CyclicTau),
            other => Err(CliError::input(
                crate::LEDGER_ENV,
                format!("unknown convention profile {other:?} (known: paper-v1, cyclic-tau)"),
            )),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PaperV1 => "paper-v1",
            Self::CyclicTau => "cyclic-tau",
        }
    }

    fn tau_form(self) -> KashiwaraForm {
        match self {
            Self::PaperV1 => KashiwaraForm::PrintedOrder,
            Self::CyclicTau => KashiwaraForm::Cyclic,
        }
    }
}

pub struct Outcome {
    pub report: Report,
    pub trace: Option<Vec<TraceRow>>,
}

struct Ctx {
    tol: Tolerances,
    refine_max: u32,
    profile: ConventionProfile,
}

pub fn run(spec: &ExperimentSpec, profile: ConventionProfile) -> Result<Outcome, CliError> {
    spec.validate()?;
    let ctx = Ctx { tol: spec.tolerances, refine_max: spec.refine_max.unwrap_or(DEFAULT_REFINE_MAX), profile };
    let mut inputs = serde_json::to_value(spec).expect("specs serialize");
    // Where the report goes is not an input of the computation; keep reports location-independent.
    if let Some(out) = inputs.get_mut("output").and_then(|o| o.as_object_mut()) {
        out.remove("path");
    }
    let command = serde_json::to_value(spec.command).expect("command serializes");
    let mut report = Report::new(profile.name(), command.as_str().expect("string"), inputs);
    report.sampling("refine_max", ctx.refine_max);
    let chart = spec.build_chart()?;
    let path = match (&chart, &spec.path) {
        (Some(c), Some(p)) => Some(p.build(c.n())?),
        _ => None,
    };
    let mut trace = None;
    match spec.command {
        Command::Index => {
            if let Some(triple) = &spec.triple {
                index_triple(&ctx, triple, &mut report)?;
            }
            if let (Some(c), Some(p)) = (&chart, &path) {
                index_path(&ctx, c, p, "path", &mut report)?;
            }
        }
        Command::Holonomy => {
            let (c, p) = (chart.as_ref().expect("validated"), path.as_ref().expect("validated"));
            let r = verify_theorem1(c, p, &ctx.tol, ctx.refine_max)?;
            record_theorem1(&ctx, "theorem1", &r, &mut report);
            trace = Some(build_trace(&ctx, c, p)?);
        }
        Command::Verify => {
            let c = chart.as_ref().expect("validated");
            if let Some(p) = &path {
                verify_path(&ctx, c, p, "", &mut report)?;
                trace = Some(build_trace(&ctx, c, p)?);
            }
            if !spec.loops.is_empty() {
                let loops = spec.loops.iter().map(|l| l.build(c.n())).collect::<Result<Vec<_>, _>>()?;
                let r = verify_corollary1(c, &loops, &ctx.tol, ctx.refine_max)?;
                for (k, l) in r.loops.iter().enumerate() {
                    report.phase(format!("corollary1.loop{k}.holonomy"), l.holonomy.to_complex(), &ctx.tol);
                }
                report.assert("corollary1.consistent", r.consistent);
                report.result("corollary1", &r);
            }
        }
        Command::Report => benchmark(&ctx, spec.seed, &mut report)?,
    }
    Ok(Outcome { report, trace })
}

fn frames(ctx: &Ctx, triple: &[LagrangianSpec; 3]) -> Result<Vec<LagrangianFrame>, CliError> {
    let out = triple
        .iter()
        .enumerate()
        .map(|(k, l)| l.build(&ctx.tol).map_err(|e| CliError::input(format!("triple[{k}]"), e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    if out.iter().any(|l| l.n() != out[0].n()) {
        return Err(CliError::input("triple", "all three Lagrangians need the same n".into()));
    }
    Ok(out)
}

fn index_triple(ctx: &Ctx, triple: &[LagrangianSpec; 3], report: &mut Report) -> Result<(), CliError> {
    let ls = frames(ctx, triple)?;
    let t = &ctx.tol;
    let tau = |form| kashiwara_signature_with(form, &ls[0], &ls[1], &ls[2], t);
    let (printed, cyclic) = (tau(KashiwaraForm::PrintedOrder)?, tau(KashiwaraForm::Cyclic)?);
    let xs = ls.iter().map(|l| CoverPoint::principal(l, t)).collect::<Result<Vec<_>, _>>()?;
    let mu = |a: usize, b: usize| leray_index(&xs[a], &xs[b], t);
    let (m01, m02, m12) = (mu(0, 1)?, mu(0, 2)?, mu(1, 2)?);
    let tau_reported = tau(ctx.profile.tau_form())?;
    report.result(
        "triple",
        json!({
            "n": ls[0].n(),
            "tau": tau_reported,
            "tau_printed_order": printed,
            "tau_cyclic": cyclic,
            "theta": xs.iter().map(|x| x.theta).collect::<Vec<_>>(),
            "leray_01": m01,
            "leray_02": m02,
            "leray_12": m12,
            "intersection_dims": [
                intersection_dim(&ls[0], &ls[1], t)?,
                intersection_dim(&ls[0], &ls[2], t)?,
                intersection_dim(&ls[1], &ls[2], t)?,
            ],
        }),
    );
    report.assert("index.coboundary", m01 - m02 + m12 == printed);
    Ok(())
}

fn index_path(
    ctx: &Ctx,
    chart: &LagrangianChart,
    path: &ParamPath,
    key: &str,
    report: &mut Report,
) -> Result<(), CliError> {
    let lp = tangent_lagrangian_path(chart, path, &ctx.tol)?;
    let clm = clm_index(&lp, &ctx.tol, ctx.refine_max)?;
    let n = chart.n() as i64;
    report.result(
        key,
        json!({
            "n": n,
            "mu_clm": clm.index,
            "mu_clm_mod4": clm.mod4(),
            "mu_clm_shifted_by_n": clm.shifted_by_n,
            "leray": clm.leray,
            "mu_cover_mod8": (2 * clm.index + n - clm.intersection_dim as i64).rem_euclid(8),
            "intersection_dim": clm.intersection_dim,
            "winding": clm.winding,
        }),
    );
    report.sampling(&format!("{key}.max_depth"), clm.max_depth);
    report.sampling(&format!("{key}.inserted"), clm.inserted);
    Ok(())
}

fn record_theorem1(ctx: &Ctx, key: &str, r: &Theorem1Report, report: &mut Report) {
    report.phase(format!("{key}.holonomy"), r.holonomy.actual.to_complex(), &ctx.tol);
    report.assert(format!("{key}.holonomy_phase"), r.pass);
    report.sampling(&format!("{key}.samples"), r.samples);
    report.sampling(&format!("{key}.max_halvings"), r.max_halvings);
    report.result(key, r);
}

fn record_theorem2(ctx: &Ctx, key: &str, r: &Theorem2Report, report: &mut Report) {
    let t = &ctx.tol;
    report.phase(format!("{key}.dual_prefactor"), r.dual_prefactor.to_complex() / r.positive_part, t);
    report.phase(format!("{key}.ground"), r.ground.actual.to_complex(), t);
    report.assert(format!("{key}.dual_phase"), r.dual.pass);
    report.assert(format!("{key}.ground_phase"), r.ground.pass);
    report.assert(
        format!("{key}.positive_part"),
        (r.positive_part - r.positive_part_expected).abs() <= t.phase_tol * r.positive_part_expected.max(1.0),
    );
    if r.case == EndpointCase::Transverse {
        report.diagnostic(format!("{key}.dual_phase_shifted"), r.dual_shifted.pass);
        report.diagnostic(format!("{key}.ground_phase_shifted"), r.ground_shifted.pass);
    }
    if let Some(ok) = r.dual_conjugates_holonomy {
        report.assert(format!("{key}.dual_conjugates_holonomy"), ok);
    }
    for p in &r.pairings {
        report.assert(format!("{key}.pairing.l{}.s{}", p.level, p.state), p.pass);
    }
    report.result(key, r);
}

fn prefixed(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn verify_path(
    ctx: &Ctx,
    chart: &LagrangianChart,
    path: &ParamPath,
    prefix: &str,
    report: &mut Report,
) -> Result<(), CliError> {
    if path.is_closed(chart, &ctx.tol)? {
        let r = verify_theorem1(chart, path, &ctx.tol, ctx.refine_max)?;
        record_theorem1(ctx, &prefixed(prefix, "theorem1"), &r, report);
    }
    match verify_theorem2(chart, path, &ctx.tol, ctx.refine_max) {
        Ok(r) => record_theorem2(ctx, &prefixed(prefix, "theorem2"), &r, report),
        Err(MaslovError::Unsupported(why)) => {
            report.result(&prefixed(prefix, "theorem2"), json!({ "skipped": why }));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn build_trace(ctx: &Ctx, chart: &LagrangianChart, path: &ParamPath) -> Result<Vec<TraceRow>, CliError> {
    let d = holonomy_data(chart, path, &ctx.tol, ctx.refine_max)?;
    let theta0 =
        linalg::principal_arg(maslov_core::symplectic::souriau_map(d.transport.tangent_path.start(), &ctx.tol)?.det());
    let lifted = lift_path(&d.transport.tangent_path, theta0, &ctx.tol, ctx.refine_max)?;
    Ok(d.lift
        .trace
        .iter()
        .zip(&lifted.points)
        .map(|(&(t, phase), x)| TraceRow { t, theta_unwrapped: x.1.theta, phase })
        .collect())
}

/// Built-in catalog: randomized coboundary suite plus the circle, torus and arc benchmarks.
fn benchmark(ctx: &Ctx, seed: u64, report: &mut Report) -> Result<(), CliError> {
    let t = &ctx.tol;
    let mut rng = random::SeedRng::seed_from_u64(seed);
    let mut counts = Vec::new();
    for n in 1..=3usize {
        let mut ok = 0;
        let trials = 50;
        for _ in 0..trials {
            let pts: Vec<CoverPoint> = (0..3)
                .map(|_| {
                    let u = UnitaryComplex::new_unchecked(random::unitary(&mut rng, n));
                    let l = embed_unitary(&u).apply(&LagrangianFrame::l0(n));
                    let r = random::Rng::gen_range(&mut rng, -2i64..=2);
                    CoverPoint::principal(&l, t).map(|x| DeckAction { r }.apply(&x))
                })
                .collect::<Result<_, _>>()?;
            let ls = pts.iter().map(|x| x.lagrangian(t)).collect::<Result<Vec<_>, _>>()?;
            let tau = kashiwara_signature_with(KashiwaraForm::PrintedOrder, &ls[0], &ls[1], &ls[2], t)?;
            let lhs = leray_index(&pts[0], &pts[1], t)? - leray_index(&pts[0], &pts[2], t)?
                + leray_index(&pts[1], &pts[2], t)?;
            ok += usize::from(lhs == tau);
        }
        report.assert(format!("coboundary.n{n}"), ok == trials);
        counts.push(json!({ "n": n, "trials": trials, "passed": ok }));
    }
    report.result("coboundary", counts);

    let lines = [0.0, PI / 4.0, PI / 2.0].map(|a| LagrangianSpec::Lines(vec![a]));
    index_triple(ctx, &lines, report)?;

    let circle = LagrangianChart::circle();
    for (name, named) in [("circle_full_loop", NamedPath::FullLoop), ("circle_double_loop", NamedPath::DoubleLoop)] {
        let p = PathSpec::Named(named).build(1)?;
        let r = verify_theorem1(&circle, &p, t, ctx.refine_max)?;
        record_theorem1(ctx, name, &r, report);
    }
    let torus = LagrangianChart::product_torus(vec![1.0, 1.0])?;
    let mut gens = Vec::new();
    for (name, w) in [("torus_1_0", [1, 0]), ("torus_0_1", [0, 1]), ("torus_1_1", [1, 1])] {
        let p = ParamPath::torus_loop(&[0.0, 0.0], &w, 64)?;
        let r = verify_theorem1(&torus, &p, t, ctx.refine_max)?;
        record_theorem1(ctx, name, &r, report);
        if w != [1, 1] {
            gens.push(p);
        }
    }
    let cor = verify_corollary1(&torus, &gens, t, ctx.refine_max)?;
    report.assert("torus_corollary1.consistent", cor.consistent);
    report.result("torus_corollary1", &cor);

    for (name, named) in [
        ("circle_quarter_arc", NamedPath::QuarterArc),
        ("circle_half_arc", NamedPath::HalfArc),
        ("circle_three_quarter_arc", NamedPath::ThreeQuarterArc),
        ("circle_loop_dual", NamedPath::FullLoop),
    ] {
        let p = PathSpec::Named(named).build(1)?;
        let r = verify_theorem2(&circle, &p, t, ctx.refine_max)?;
        record_theorem2(ctx, name, &r, report);
    }
    Ok(())
}
