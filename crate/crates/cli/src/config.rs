//! Run configuration read from JSON.

use std::path::{Path, PathBuf};

use mep_core::convergence::StudySpec;
use mep_core::{EvolveConfig, InitialPath, Method, SurfaceId, SurfaceSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    /// Path ends, used as given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoints: Option<Endpoints>,
    /// Rough locations refined by Newton's method. Built-in guesses are used
    /// when neither `endpoints` nor `guesses` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guesses: Option<Guesses>,
    /// Defaults to an arc through the saddle guess.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSpec>,
    #[serde(default = "default_images")]
    pub images: usize,
    #[serde(default)]
    pub solver: Solver,
    /// Path dynamics; studies default to their own tighter settings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveConfig>,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub study: StudyOverrides,
    #[serde(default)]
    pub probe: ProbeConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_images() -> usize {
    32
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Endpoints {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Guesses {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saddle: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Linear,
    ArcVia { via: Vec<f64> },
    FromFile { path: PathBuf },
}

impl InitialSpec {
    pub fn to_initial(&self, base: &Path) -> InitialPath {
        match self {
            InitialSpec::Linear => InitialPath::Linear,
            InitialSpec::ArcVia { via } => InitialPath::ArcVia(via.clone()),
            InitialSpec::FromFile { path } => InitialPath::FromFile(base.join(path)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// The configured explicit stepper.
    #[default]
    Explicit,
    /// Newton iterations on the stationary equations, explicit fallback.
    Relax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub m_ref: usize,
    /// Relative eigenvalue gap below which a spectrum counts as degenerate.
    pub degeneracy_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            m_ref: 512,
            degeneracy_tol: 1e-6,
        }
    }
}

/// Changes applied on top of the built-in study of the surface.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyOverrides {
    pub name: Option<String>,
    pub ladder: Option<Vec<usize>>,
    pub m_ref: Option<usize>,
    pub via: Option<Vec<f64>>,
    /// Compare against the closed-form MEP where one exists.
    pub exact: Option<bool>,
    /// Also write every converged ladder member as a snapshot.
    pub write_paths: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeConfig {
    pub trials: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { trials: 100 }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct FlagOverrides {
    pub seed: Option<u64>,
    pub method: Option<Method>,
    pub images: Option<usize>,
    pub spring: Option<f64>,
    pub tol: Option<f64>,
}

/// Rough critical point locations for each built-in surface.
pub fn builtin_guesses(id: SurfaceId) -> Guesses {
    let (a, b, s) = match id {
        SurfaceId::Example1(_) => ([-0.9, 0.1], [0.9, 0.1], [0.05, 0.95]),
        SurfaceId::Muller => ([-0.05, 0.47], [0.62, 0.03], [0.21, 0.29]),
        SurfaceId::LjCell => ([0.56, 0.97], [0.97, 0.56], [0.78, 0.78]),
    };
    Guesses {
        start: a.to_vec(),
        end: b.to_vec(),
        saddle: Some(s.to_vec()),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.endpoints.is_some() && self.guesses.is_some() {
            return Err(CliError::Config("give either endpoints or guesses, not both".into()));
        }
        if self.images < 2 {
            return Err(CliError::Config(format!("images must be at least 2, got {}", self.images)));
        }
        if let Some(e) = &self.evolve {
            e.validate()?;
        }
        if self.verify.m_ref < 16 {
            return Err(CliError::Config("verify.m_ref must be at least 16".into()));
        }
        Ok(())
    }

    pub fn apply(&mut self, flags: &FlagOverrides) -> Result<(), CliError> {
        if let Some(s) = flags.seed {
            self.seed = s;
        }
        if let Some(m) = flags.images {
            self.images = m;
        }
        if flags.method.is_some() || flags.spring.is_some() || flags.tol.is_some() {
            let e = self.evolve.get_or_insert_with(EvolveConfig::default);
            apply_evolve(e, flags);
        }
        self.validate()
    }

    pub fn evolve_config(&self) -> EvolveConfig {
        self.evolve.clone().unwrap_or_default()
    }

    /// Guesses for the critical points: explicit, else built in.
    pub fn guesses(&self) -> Guesses {
        self.guesses.clone().unwrap_or_else(|| builtin_guesses(self.surface.id))
    }
}

pub fn apply_evolve(e: &mut EvolveConfig, flags: &FlagOverrides) {
    if let Some(m) = flags.method {
        e.method = m;
    }
    if let Some(c) = flags.spring {
        e.spring_c = c;
    }
    if let Some(t) = flags.tol {
        e.force_tol = t;
    }
}

/// The study run by `converge`: the surface's built-in study with the
/// configured changes applied.
pub fn study_spec(cfg: &RunConfig, flags: &FlagOverrides) -> Result<StudySpec, CliError> {
    let mut spec = StudySpec::default_for(cfg.surface.id)?;
    if cfg.surface.overrides.is_some() {
        spec.surface = cfg.surface.clone();
    }
    let s = &cfg.study;
    if let Some(n) = &s.name {
        spec.name = n.clone();
    }
    if let Some(l) = &s.ladder {
        spec.ladder = l.clone();
    }
    if let Some(m) = s.m_ref {
        spec.m_ref = m;
    }
    if let Some(v) = &s.via {
        spec.via = v.clone();
    }
    if s.exact == Some(false) {
        spec.exact = None;
    } else if s.exact == Some(true) && spec.exact.is_none() {
        return Err(CliError::Config(format!("{} has no closed-form MEP", cfg.surface.id)));
    }
    if let Some(e) = &cfg.evolve {
        spec.evolve = e.clone();
    }
    apply_evolve(&mut spec.evolve, flags);
    spec.validate()?;
    Ok(spec)
}
