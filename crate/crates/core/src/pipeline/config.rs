//! TOML experiment configuration.
//!
//! ```toml
//! pipeline = "stadium"          # stadium | ring | sweep
//!
//! [domain]
//! shape = "stadium"             # stadium | disk
//! a = 8.0
//! h = 0.03125
//!
//! [levels]
//! lo = 0.05
//! hi = 0.95
//! n = 50
//!
//! [output]
//! dir = "out/stadium"
//! ```
//!
//! Every section and key is optional; missing values take the defaults
//! below.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cutoff::CutoffVariant;
use crate::elliptic::{
    Affine, CoefficientField, LinearOptions, MonotoneOptions, NonlinearitySpec,
};
use crate::geometry::{CapProfile, Shape};
use crate::ringlab::RingOptions;
use crate::varmin::VarminOptions;
use crate::{Error, Execution, Point, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PipelineKind {
    #[default]
    Stadium,
    Ring,
    Sweep,
}

impl PipelineKind {
    pub fn name(self) -> &'static str {
        match self {
            PipelineKind::Stadium => "stadium",
            PipelineKind::Ring => "ring",
            PipelineKind::Sweep => "sweep",
        }
    }
}

impl std::str::FromStr for PipelineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stadium" => Ok(PipelineKind::Stadium),
            "ring" => Ok(PipelineKind::Ring),
            "sweep" => Ok(PipelineKind::Sweep),
            other => Err(Error::Config(format!(
                "unknown pipeline `{other}` (expected stadium, ring or sweep)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    #[default]
    Stadium,
    Disk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    pub shape: ShapeKind,
    /// Half-length of the flat part of a stadium.
    pub a: f64,
    /// Cap stretch of a stadium; 1 gives half-disk caps.
    pub cap_stretch: f64,
    pub radius: f64,
    pub center: [f64; 2],
    pub h: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig {
            shape: ShapeKind::Stadium,
            a: 8.0,
            cap_stretch: 1.0,
            radius: 1.0,
            center: [0.0, 0.0],
            h: 1.0 / 32.0,
        }
    }
}

impl DomainConfig {
    pub fn cap(&self) -> CapProfile {
        if self.cap_stretch == 1.0 {
            CapProfile::Circular
        } else {
            CapProfile::Elliptic {
                stretch: self.cap_stretch,
            }
        }
    }

    pub fn shape(&self) -> Shape {
        match self.shape {
            ShapeKind::Stadium => Shape::stadium(self.a, self.cap()),
            ShapeKind::Disk => Shape::Disk {
                center: Point::new(self.center[0], self.center[1]),
                radius: self.radius,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CutoffConfig {
    pub variant: CutoffVariant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonlinearConfig {
    pub tol: f64,
    pub max_sweeps: usize,
    pub tol_feas: f64,
}

impl Default for NonlinearConfig {
    fn default() -> Self {
        let m = MonotoneOptions::default();
        NonlinearConfig {
            tol: m.tol,
            max_sweeps: m.max_sweeps,
            tol_feas: m.tol_feas,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LevelsConfig {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    /// Relative hull-deficiency tolerance.
    pub tol: f64,
}

impl Default for LevelsConfig {
    fn default() -> Self {
        LevelsConfig {
            lo: 0.05,
            hi: 0.95,
            n: 50,
            tol: crate::quasiconcavity::DEFAULT_CONVEXITY_TOL,
        }
    }
}

impl LevelsConfig {
    /// Parses `"a:b:n"`.
    pub fn parse_triplet(s: &str, tol: f64) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("levels `{s}` must look like a:b:n"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if !(lo < hi) || n < 2 {
            return Err(Error::Config(format!("levels `{s}` need a < b and n >= 2")));
        }
        Ok(LevelsConfig { lo, hi, n, tol })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    #[default]
    A,
    Eps,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub values: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            kind: SweepKind::A,
            values: vec![4.0, 6.0, 8.0, 10.0, 12.0],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientKind {
    #[default]
    Laplacian,
    /// `A = diag(1, 1 + 0.3 x)`, `b = (0.2, 0)`.
    Mild,
}

impl CoefficientKind {
    pub fn field(self) -> CoefficientField {
        match self {
            CoefficientKind::Laplacian => CoefficientField::laplacian(),
            CoefficientKind::Mild => CoefficientField {
                a22: Affine {
                    c0: 1.0,
                    cx: 0.3,
                    cy: 0.0,
                },
                ..CoefficientField::laplacian()
            }
            .with_drift(0.2, 0.0),
        }
    }
}

/// `M = auto` (use `M0`) or an explicit value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InnerValue {
    Value(f64),
    Keyword(String),
}

impl Default for InnerValue {
    fn default() -> Self {
        InnerValue::Keyword("auto".into())
    }
}

impl InnerValue {
    /// `None` for `auto`.
    pub fn value(&self) -> Result<Option<f64>> {
        match self {
            InnerValue::Value(v) => Ok(Some(*v)),
            InnerValue::Keyword(k) if k == "auto" => Ok(None),
            InnerValue::Keyword(k) => Err(Error::Config(format!(
                "ring.m must be a number or \"auto\", got \"{k}\""
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RingConfig {
    /// `"constant beta"` or `"logistic gamma p"`.
    pub f: String,
    pub coefficients: CoefficientKind,
    /// Hole centre strategy: walk from the maximum until `v <= ratio max v`.
    pub x0_ratio: f64,
    pub clearance: f64,
    /// Explicit hole centre, overriding the walk.
    pub x0: Option<[f64; 2]>,
    pub eps: Vec<f64>,
    pub m: InnerValue,
    pub r0: f64,
    /// Vertices of a convex polygonal hole; a unit disk when absent.
    pub hole_vertices: Option<Vec<[f64; 2]>>,
    pub witness_margin: f64,
    /// Optional bound on the gap at the smallest `eps`.
    pub gap_tol: Option<f64>,
}

impl Default for RingConfig {
    fn default() -> Self {
        RingConfig {
            f: "logistic 10 2".into(),
            coefficients: CoefficientKind::Laplacian,
            x0_ratio: 0.5,
            clearance: 0.1,
            x0: None,
            eps: vec![0.2, 0.1, 0.05, 0.025],
            m: InnerValue::default(),
            r0: 0.3,
            hole_vertices: None,
            witness_margin: 1e-6,
            gap_tol: None,
        }
    }
}

impl RingConfig {
    pub fn nonlinearity(&self) -> Result<NonlinearitySpec> {
        parse_nonlinearity(&self.f)
    }

    pub fn hole(&self) -> Shape {
        match &self.hole_vertices {
            Some(v) => Shape::Polygon {
                vertices: v.iter().map(|p| Point::new(p[0], p[1])).collect(),
            },
            None => Shape::Disk {
                center: Point::new(0.0, 0.0),
                radius: 1.0,
            },
        }
    }
}

/// Parses `"constant beta"` or `"logistic gamma p"`.
pub fn parse_nonlinearity(s: &str) -> Result<NonlinearitySpec> {
    let words: Vec<&str> = s.split_whitespace().collect();
    let num = |w: &str| -> Result<f64> {
        w.parse()
            .map_err(|_| Error::Config(format!("`{w}` is not a number in f = \"{s}\"")))
    };
    match words.as_slice() {
        ["constant", beta] => Ok(NonlinearitySpec::constant(num(beta)?)),
        ["logistic", gamma, p] => NonlinearitySpec::logistic(num(gamma)?, num(p)?),
        _ => Err(Error::Config(format!(
            "f = \"{s}\" must be \"constant BETA\" or \"logistic GAMMA P\""
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub fields: bool,
    pub contours: bool,
    pub report: bool,
    pub figures: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            fields: true,
            contours: true,
            report: true,
            figures: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pipeline: PipelineKind,
    pub execution: Execution,
    pub domain: DomainConfig,
    pub cutoff: CutoffConfig,
    pub linear: LinearOptions,
    pub nonlinear: NonlinearConfig,
    pub varmin: VarminOptions,
    pub levels: LevelsConfig,
    pub sweep: SweepConfig,
    pub ring: RingConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            pipeline: PipelineKind::Stadium,
            execution: Execution::default(),
            domain: DomainConfig::default(),
            cutoff: CutoffConfig::default(),
            linear: LinearOptions::default(),
            nonlinear: NonlinearConfig::default(),
            varmin: VarminOptions::default(),
            levels: LevelsConfig::default(),
            sweep: SweepConfig::default(),
            ring: RingConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.domain.h > 0.0) {
            return bad(format!("domain.h = {} must be positive", self.domain.h));
        }
        if self.levels.n < 2 || !(self.levels.lo < self.levels.hi) {
            return bad(format!(
                "levels need lo < hi and n >= 2 (got {}:{}:{})",
                self.levels.lo, self.levels.hi, self.levels.n
            ));
        }
        if !(self.levels.tol >= 0.0) {
            return bad("levels.tol must be nonnegative".into());
        }
        match self.pipeline {
            PipelineKind::Stadium => {
                if self.domain.shape != ShapeKind::Stadium {
                    return bad("the stadium pipeline needs domain.shape = \"stadium\"".into());
                }
            }
            PipelineKind::Ring => self.validate_ring()?,
            PipelineKind::Sweep => {
                if self.sweep.values.is_empty() {
                    return bad("sweep.values is empty".into());
                }
                match self.sweep.kind {
                    SweepKind::A => {
                        if self.domain.shape != ShapeKind::Stadium {
                            return bad("an a-sweep needs domain.shape = \"stadium\"".into());
                        }
                    }
                    SweepKind::Eps => self.validate_ring()?,
                }
            }
        }
        Ok(())
    }

    fn validate_ring(&self) -> Result<()> {
        self.ring.nonlinearity()?;
        self.ring.m.value()?;
        let eps = match (self.pipeline, self.sweep.kind) {
            (PipelineKind::Sweep, SweepKind::Eps) => &self.sweep.values,
            _ => &self.ring.eps,
        };
        if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Config("ring eps values must be positive".into()));
        }
        if !(self.ring.x0_ratio > 0.0 && self.ring.x0_ratio < 1.0) {
            return Err(Error::Config("ring.x0_ratio must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn ring_options(&self) -> RingOptions {
        let base = RingOptions::default();
        RingOptions {
            monotone: MonotoneOptions {
                tol: self.nonlinear.tol,
                max_sweeps: self.nonlinear.max_sweeps,
                tol_feas: self.nonlinear.tol_feas,
                ..base.monotone
            },
            tol_feas: self.nonlinear.tol_feas,
            linear: self.linear,
            ..base
        }
    }
}
