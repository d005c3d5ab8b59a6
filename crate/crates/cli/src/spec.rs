//! Experiment files.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use maslov_core::geometry::{ChartSpec, LagrangianChart, ParamPath};
use maslov_core::symplectic::LagrangianFrame;
use maslov_core::Tolerances;

use crate::CliError;

pub const SPEC_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// τ and Leray indices of a Lagrangian triple, and/or μ_CLM of a chart path.
    Index,
    /// Holonomy of the ground-state line along a closed path.
    Holonomy,
    /// Every holonomy/transport statement that applies to the given path(s).
    Verify,
    /// The built-in benchmark catalog, with a seeded randomized coboundary suite.
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedPath {
    FullLoop,
    DoubleLoop,
    QuarterArc,
    HalfArc,
    ThreeQuarterArc,
}

fn default_samples() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopSpec {
    #[serde(default)]
    pub base: Option<Vec<f64>>,
    pub winding: Vec<i64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

/// How a path through the chart's parameter space is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    /// Named loops and arcs: all parameters advance together from 0.
    Named(NamedPath),
    Loop(LoopSpec),
    Segment(SegmentSpec),
    Polyline(ParamPath),
}

impl PathSpec {
    pub fn build(&self, n: usize) -> Result<ParamPath, CliError> {
        let turns = |x: f64| -> Result<ParamPath, CliError> { Ok(ParamPath::segment(vec![0.0; n], vec![x; n], 64)?) };
        let path = match self {
            PathSpec::Named(NamedPath::FullLoop) => turns(2.0 * PI)?,
            PathSpec::Named(NamedPath::DoubleLoop) => ParamPath::segment(vec![0.0; n], vec![4.0 * PI; n], 128)?,
            PathSpec::Named(NamedPath::QuarterArc) => turns(PI / 2.0)?,
            PathSpec::Named(NamedPath::HalfArc) => turns(PI)?,
            PathSpec::Named(NamedPath::ThreeQuarterArc) => turns(1.5 * PI)?,
            PathSpec::Loop(l) => {
                let base = l.base.clone().unwrap_or_else(|| vec![0.0; l.winding.len()]);
                ParamPath::torus_loop(&base, &l.winding, l.samples)?
            }
            PathSpec::Segment(s) => ParamPath::segment(s.from.clone(), s.to.clone(), s.samples)?,
            PathSpec::Polyline(p) => {
                p.validate()?;
                p.clone()
            }
        };
        if path.n() != n {
            return Err(CliError::input("path", format!("path has {} parameters, chart has {n}", path.n())));
        }
        Ok(path)
    }
}

/// A Lagrangian subspace: a product of lines at the given angles, or explicit frame columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LagrangianSpec {
    Lines(Vec<f64>),
    /// n columns of length 2n, in (q, p) coordinates.
    Columns(Vec<Vec<f64>>),
}

impl LagrangianSpec {
    pub fn build(&self, tol: &Tolerances) -> Result<LagrangianFrame, maslov_core::MaslovError> {
        match self {
            LagrangianSpec::Lines(a) => {
                if a.is_empty() || a.iter().any(|x| !x.is_finite()) {
                    return Err(maslov_core::MaslovError::InvalidInput("lines need finite angles".into()));
                }
                Ok(LagrangianFrame::product_of_lines(a))
            }
            LagrangianSpec::Columns(cols) => {
                let n = cols.len();
                if n == 0 || cols.iter().any(|c| c.len() != 2 * n || c.iter().any(|x| !x.is_finite())) {
                    return Err(maslov_core::MaslovError::InvalidInput(
                        "columns: need n columns of 2n finite entries".into(),
                    ));
                }
                let m = maslov_core::linalg::RMat::from_fn(2 * n, n, |r, c| cols[c][r]);
                LagrangianFrame::new(m, tol)
            }
        }
    }
}

fn default_version() -> String {
    SPEC_VERSION.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default = "default_version")]
    pub spec_version: String,
    pub command: Command,
    #[serde(default)]
    pub chart: Option<ChartSpec>,
    #[serde(default)]
    pub path: Option<PathSpec>,
    /// Generators of π₁ for the parallel-section count.
    #[serde(default)]
    pub loops: Vec<PathSpec>,
    #[serde(default)]
    pub triple: Option<[LagrangianSpec; 3]>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub refine_max: Option<u32>,
}

impl ExperimentSpec {
    /// Parse, reporting the offending field path on failure.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::input(if path == "." { "<root>".into() } else { path }, e.into_inner().to_string())
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.spec_version != SPEC_VERSION {
            return Err(CliError::input("spec_version", format!("unsupported version {:?}", self.spec_version)));
        }
        self.tolerances.validate(6).map_err(|e| CliError::input("tolerances", e.to_string()))?;
        if let Some(r) = self.refine_max {
            if r == 0 || r > 40 {
                return Err(CliError::input("refine_max", format!("must be in 1..=40, got {r}")));
            }
        }
        let needs_chart = match self.command {
            Command::Holonomy | Command::Verify => true,
            Command::Index => self.triple.is_none(),
            Command::Report => false,
        };
        if needs_chart && (self.chart.is_none() || (self.path.is_none() && self.loops.is_empty())) {
            return Err(CliError::input("chart", "this command needs a chart and a path".into()));
        }
        if self.command == Command::Holonomy && self.path.is_none() {
            return Err(CliError::input("path", "holonomy needs a closed path".into()));
        }
        if self.output.format == Format::Csv && !matches!(self.command, Command::Holonomy | Command::Verify) {
            return Err(CliError::input("output.format", "csv traces exist only for holonomy and verify".into()));
        }
        if self.output.format == Format::Csv && self.path.is_none() {
            return Err(CliError::input("output.format", "csv traces need a path".into()));
        }
        Ok(())
    }

    pub fn build_chart(&self) -> Result<Option<LagrangianChart>, CliError> {
        self.chart
            .clone()
            .map(|c| LagrangianChart::new(c).map_err(|e| CliError::input("chart", e.to_string())))
            .transpose()
    }
}
