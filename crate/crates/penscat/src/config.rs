//! Run configuration: one TOML document per run, strictly validated.

use std::path::PathBuf;

use penscat_core::geometry::ParamCurve;
use penscat_core::math::{Vec2, C64};
use penscat_core::special::IncidentField;
use penscat_core::transmission::{IndexProfile, MediumSpec};
use penscat_core::uniqueness::SourceKind;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Forward,
    Farfield,
    ItpEig,
    ItpSolve,
    Mitp,
    Blowup,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Forward => "forward",
            Command::Farfield => "farfield",
            Command::ItpEig => "itp-eig",
            Command::ItpSolve => "itp-solve",
            Command::Mitp => "mitp",
            Command::Blowup => "blowup",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Output directory.
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub geometry: Geometry,
    #[serde(default)]
    pub medium: Medium,
    #[serde(default)]
    pub incident: Incident,
    #[serde(default)]
    pub discretization: Discretization,
    #[serde(default)]
    pub experiment: Experiment,
    #[serde(default)]
    pub itp: Itp,
    #[serde(default)]
    pub mitp: Mitp,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    /// `circle`, `ellipse`, `kite` or `custom`.
    pub kind: String,
    /// Shape parameters; omitted means the unit circle or the standard kite.
    pub params: Option<Vec<f64>>,
}

impl Geometry {
    pub fn params(&self) -> Vec<f64> {
        match (&self.params, self.kind.as_str()) {
            (Some(p), _) => p.clone(),
            (None, "circle") => vec![1.0],
            (None, _) => Vec::new(),
        }
    }
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry { kind: "circle".into(), params: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Medium {
    pub k: f64,
    pub lambda: f64,
    pub n: f64,
    pub n_imag: f64,
    /// Radial profile `n(r) = Σ c_i r^i`; replaces `n` when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_radial: Option<Vec<f64>>,
}

impl Default for Medium {
    fn default() -> Self {
        Medium { k: 1.0, lambda: 1.0, n: 2.0, n_imag: 0.0, n_radial: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IncidentKind {
    Plane,
    Point,
    Dipole,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Incident {
    pub kind: IncidentKind,
    /// Propagation angle of a plane wave.
    pub angle: f64,
    /// Source location of a point source or dipole.
    pub source: [f64; 2],
    /// Angle of the dipole moment.
    pub moment_angle: f64,
}

impl Default for Incident {
    fn default() -> Self {
        Incident { kind: IncidentKind::Plane, angle: 0.0, source: [2.0, 0.0], moment_angle: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    Bie,
    Ls,
    Sov,
    TwoStep,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Discretization {
    pub solver: Solver,
    /// Boundary nodes N.
    pub nodes: usize,
    /// Angular mode cutoff M.
    pub modes: usize,
    /// Volume grid points per side.
    pub grid: usize,
    /// Far-field samples.
    pub angles: usize,
    /// Radial polynomial degree of the modal solver.
    pub degree: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization { solver: Solver::Bie, nodes: 256, modes: 20, grid: 64, angles: 64, degree: 48 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceChoice {
    Monopole,
    Dipole,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Experiment {
    /// Curve parameter of the anchor point z*.
    pub anchor: f64,
    pub delta: f64,
    /// Number of sources J.
    pub count: usize,
    /// Exponent of the Lᵖ norms.
    pub p: f64,
    /// Defaults to a monopole for λ ≠ 1 and a dipole for λ = 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceChoice>,
    pub probe_radius: f64,
    pub probe_resolution: usize,
    /// Boundary grading towards z*.
    pub grading: f64,
    /// Evaluation points of `forward`; a ring around the obstacle by default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
}

impl Default for Experiment {
    fn default() -> Self {
        Experiment {
            anchor: 0.0,
            delta: 0.1,
            count: 32,
            p: 4.0 / 3.0,
            source: None,
            probe_radius: 0.25,
            probe_resolution: 8,
            grading: 0.96,
            points: None,
        }
    }
}

/// One Fourier coefficient of boundary data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeCoeff {
    pub m: i64,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Itp {
    pub radii: Vec<f64>,
    /// Eigenvalue scans cover `0 < kR ≤ window`.
    pub window: f64,
    pub f1: Vec<ModeCoeff>,
    pub f2: Vec<ModeCoeff>,
    /// Extra solves at `k₁(R) + offset` for every radius.
    pub eigen_offsets: Vec<f64>,
}

impl Default for Itp {
    fn default() -> Self {
        Itp {
            radii: vec![1.0, 0.5, 0.25],
            window: 3.0,
            f1: vec![ModeCoeff { m: 0, re: 1.0, im: 0.0 }],
            f2: Vec::new(),
            eigen_offsets: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Mitp {
    pub radius: f64,
    pub lambdas: Vec<f64>,
    pub intervals: usize,
    pub modes: usize,
}

impl Default for Mitp {
    fn default() -> Self {
        Mitp { radius: 1.0, lambdas: vec![2.0, 1.5, 1.1, 1.01], intervals: 256, modes: 4 }
    }
}

/// Keys that belong to an electromagnetic setting this tool does not model.
const ELECTROMAGNETIC_KEYS: &[&str] = &["lambda_H", "lambda_E", "mu", "epsilon", "sigma", "polarization"];

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let de = toml::Deserializer::parse(text).map_err(|e| CliError::Schema {
        path: String::new(),
        message: e.message().to_string(),
    })?;
    let mut cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let message = e.inner().message().to_string();
        let hint = ELECTROMAGNETIC_KEYS
            .iter()
            .any(|k| message.contains(&format!("`{k}`")))
            .then(|| "electromagnetic (Maxwell) transmission problems are out of scope".to_string());
        CliError::Schema { path, message: hint.map_or(message.clone(), |h| format!("{message}; {h}")) }
    })?;
    // Resolve shape defaults so the manifest echo is explicit.
    cfg.geometry.params = Some(cfg.geometry.params());
    cfg.validate()?;
    Ok(cfg)
}

fn schema(path: &str, message: impl Into<String>) -> CliError {
    CliError::Schema { path: path.into(), message: message.into() }
}

fn physics(message: impl Into<String>) -> CliError {
    CliError::Physics(message.into())
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let m = &self.medium;
        if !(m.k.is_finite() && m.k > 0.0) {
            return Err(schema("medium.k", "wave number must be finite and > 0"));
        }
        if !(m.lambda.is_finite() && m.lambda > 0.0) {
            return Err(physics(format!("lambda = {} must be > 0", m.lambda)));
        }
        if !(m.n.is_finite() && m.n_imag.is_finite()) {
            return Err(schema("medium.n", "index must be finite"));
        }
        if m.n <= 0.0 {
            return Err(physics(format!("Re n = {} must be > 0", m.n)));
        }
        if m.n_imag < 0.0 {
            return Err(physics(format!("Im n = {} must be ≥ 0", m.n_imag)));
        }
        let curve = self.curve()?;
        if let Some(c) = &m.n_radial {
            if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
                return Err(schema("medium.n_radial", "radial coefficients must be finite and non-empty"));
            }
            self.medium_spec()
                .and_then(|s| s.check_radial(curve.max_norm()))
                .map_err(|e| physics(e.to_string()))?;
        }

        let d = &self.discretization;
        if d.nodes < 16 || !d.nodes.is_multiple_of(2) {
            return Err(schema("discretization.nodes", "need an even number of boundary nodes ≥ 16"));
        }
        if !d.grid.is_power_of_two() || d.grid < 16 {
            return Err(schema("discretization.grid", "volume grid must be a power of two ≥ 16"));
        }
        if d.angles < penscat_core::transmission::farfield::MIN_SAMPLES {
            return Err(schema(
                "discretization.angles",
                format!("need at least {} far-field samples", penscat_core::transmission::farfield::MIN_SAMPLES),
            ));
        }
        if matches!(d.solver, Solver::Sov | Solver::TwoStep) && self.geometry.kind != "circle" {
            return Err(schema("discretization.solver", "the modal solvers need a circle"));
        }
        if d.solver == Solver::TwoStep && m.n_radial.is_none() {
            return Err(schema("discretization.solver", "two-step needs medium.n_radial"));
        }
        if d.solver == Solver::Ls && m.lambda != 1.0 {
            return Err(schema("discretization.solver", "the volume solver needs lambda = 1"));
        }
        if d.solver == Solver::Bie && m.n_radial.is_some() {
            return Err(schema("discretization.solver", "the boundary solver needs a constant index"));
        }

        let e = &self.experiment;
        if !(e.delta.is_finite() && e.delta > 0.0) {
            return Err(schema("experiment.delta", "offset must be finite and > 0"));
        }
        if e.count < 4 {
            return Err(schema("experiment.count", "need at least 4 sources"));
        }
        if !(1.2 - 1e-12..2.0).contains(&e.p) {
            return Err(schema("experiment.p", "exponent must lie in [6/5, 2)"));
        }
        if let Some(pts) = &e.points {
            if pts.iter().flatten().any(|v| !v.is_finite()) {
                return Err(schema("experiment.points", "points must be finite"));
            }
        }

        if matches!(self.command, Command::ItpEig | Command::ItpSolve) {
            let it = &self.itp;
            if it.radii.is_empty() || it.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                return Err(schema("itp.radii", "radii must be finite and > 0"));
            }
            if !(it.window.is_finite() && it.window > 0.0) {
                return Err(schema("itp.window", "window must be finite and > 0"));
            }
            if m.n_radial.is_some() || m.n_imag != 0.0 {
                return Err(schema("medium.n", "interior transmission problems need a constant real index"));
            }
            if m.n == 1.0 {
                return Err(schema("medium.n", "interior transmission problems need n ≠ 1"));
            }
            for (name, data) in [("itp.f1", &it.f1), ("itp.f2", &it.f2)] {
                if data.iter().any(|c| c.m.unsigned_abs() as usize > d.modes) {
                    return Err(schema(name, format!("mode exceeds the cutoff {}", d.modes)));
                }
            }
        }
        if self.command == Command::Mitp {
            let mp = &self.mitp;
            for (i, l) in mp.lambdas.iter().enumerate() {
                if *l == 1.0 {
                    return Err(schema(
                        &format!("mitp.lambdas[{i}]"),
                        "the modified problem is only well posed for lambda ≠ 1",
                    ));
                }
                if !(l.is_finite() && *l > 0.0) {
                    return Err(physics(format!("lambda = {l} must be > 0")));
                }
            }
        }
        Ok(())
    }

    pub fn curve(&self) -> Result<ParamCurve, CliError> {
        ParamCurve::from_kind_params(&self.geometry.kind, &self.geometry.params())
            .map_err(|e| schema("geometry", e.to_string()))
    }

    pub fn index(&self) -> IndexProfile {
        match &self.medium.n_radial {
            Some(c) => IndexProfile::radial(c),
            None => IndexProfile::Constant(C64::new(self.medium.n, self.medium.n_imag)),
        }
    }

    pub fn medium_spec(&self) -> penscat_core::error::Result<MediumSpec> {
        MediumSpec::new(self.medium.k, self.medium.lambda, self.index())
    }

    pub fn incident_field(&self) -> IncidentField {
        let i = &self.incident;
        let z = Vec2::new(i.source[0], i.source[1]);
        match i.kind {
            IncidentKind::Plane => IncidentField::plane_wave(i.angle),
            IncidentKind::Point => IncidentField::PointSource { z },
            IncidentKind::Dipole => IncidentField::Dipole { z, a: Vec2::polar(1.0, i.moment_angle) },
        }
    }

    pub fn source_kind(&self) -> SourceKind {
        match self.experiment.source {
            Some(SourceChoice::Monopole) => SourceKind::Monopole,
            Some(SourceChoice::Dipole) => SourceKind::Dipole,
            None if self.medium.lambda == 1.0 => SourceKind::Dipole,
            None => SourceKind::Monopole,
        }
    }

    /// The resolved configuration as TOML, defaults included.
    pub fn echo(&self) -> String {
        toml::to_string(self).unwrap_or_else(|e| format!("# unprintable configuration: {e}\n"))
    }
}

/// Dense `m = −M..=M` coefficient list from sparse entries; repeated modes add.
pub fn dense_coefficients(entries: &[ModeCoeff], cutoff: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); 2 * cutoff + 1];
    for c in entries {
        out[(c.m + cutoff as i64) as usize] += C64::new(c.re, c.im);
    }
    out
}
