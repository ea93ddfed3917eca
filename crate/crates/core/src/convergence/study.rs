//! Mesh-refinement studies: a reference, a ladder of coarse discrete MEPs,
//! their error triples and fitted rates.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::errors::{error_triple, ErrorTriple};
use super::fit::{fit_slope, SlopeFit};
use super::reference::{build_reference, exact_reference, ExactArc, Reference};
use crate::dynamics::{relax, EvolveConfig, InitialPath, Method};
use crate::error::{MepError, Result};
use crate::path::{resample_equal_arclength, Barrier, DiscretePath};
use crate::surface::{
    find_critical_point, BuiltinSurface, Example1Variant, MullerParams, Surface, SurfaceId, SurfaceSpec,
};

/// Force tolerance used by default for study runs.
pub const STUDY_FORCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySpec {
    pub name: String,
    pub surface: SurfaceSpec,
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    /// Via point of the circular arc that initializes the reference run.
    pub via: Vec<f64>,
    pub ladder: Vec<usize>,
    pub m_ref: usize,
    /// Closed-form MEP; when set it is the reference and ladder members need
    /// not divide `m_ref`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactArc>,
    #[serde(default = "study_evolve_config")]
    pub evolve: EvolveConfig,
}

fn study_evolve_config() -> EvolveConfig {
    EvolveConfig {
        auto_dt: true,
        ..EvolveConfig::default().with_tol(STUDY_FORCE_TOL)
    }
}

/// Rough locations of the two Müller minimizers of the study and a via point near their saddle.
const MULLER_PAIR: ([f64; 2], [f64; 2], [f64; 2]) = ([-0.05, 0.47], [0.62, 0.03], [0.21, 0.29]);

/// Reference mesh of the Müller study. Its many divisors give a dense
/// ladder, which averages over where the saddle falls between two images.
const MULLER_M_REF: usize = 5040;

fn divisors_between(n: usize, lo: usize, hi: usize) -> Vec<usize> {
    (lo..=hi).filter(|m| n % m == 0).collect()
}

/// Gradient tolerance of the endpoint refinement.
const ENDPOINT_TOL: f64 = 1e-10;

/// Newton-refined minimizers from rough guesses.
fn refine_endpoints(surface: &BuiltinSurface<f64>, a: [f64; 2], b: [f64; 2]) -> Result<(Vec<f64>, Vec<f64>)> {
    let a = find_critical_point(surface, &a, ENDPOINT_TOL)?.location;
    let b = find_critical_point(surface, &b, ENDPOINT_TOL)?.location;
    Ok((a, b))
}

impl StudySpec {
    /// Built-in study for a surface. Example 1 is compared against the exact
    /// semicircle on odd meshes, where no image sits on the saddle; the
    /// symmetric Lennard-Jones cell likewise uses odd meshes.
    pub fn default_for(id: SurfaceId) -> Result<Self> {
        let surface_spec = SurfaceSpec::new(id);
        let surface: BuiltinSurface<f64> = surface_spec.build()?;
        let evolve = study_evolve_config();
        let spec = match id {
            SurfaceId::Example1(v) => Self {
                name: format!("example1-{}", v.to_string().to_lowercase()),
                surface: surface_spec,
                start: vec![-1.0, 0.0],
                end: vec![1.0, 0.0],
                via: vec![0.0, 1.0],
                ladder: vec![9, 17, 33, 65, 129],
                m_ref: 1024,
                exact: Some(ExactArc::upper_unit_semicircle()),
                evolve,
            },
            SurfaceId::Muller => {
                // The printed fourth amplitude leaves a single minimizer in the
                // basin region; the study uses the literature sign.
                let mut params = MullerParams::default();
                params.t[3] = 15.0;
                let surface_spec = SurfaceSpec {
                    id,
                    overrides: Some(serde_json::to_value(&params).map_err(|e| MepError::Config(e.to_string()))?),
                };
                let surface: BuiltinSurface<f64> = surface_spec.build()?;
                let (a, b) = refine_endpoints(&surface, MULLER_PAIR.0, MULLER_PAIR.1)?;
                Self {
                    name: "muller".into(),
                    surface: surface_spec,
                    start: a,
                    end: b,
                    via: MULLER_PAIR.2.to_vec(),
                    ladder: divisors_between(MULLER_M_REF, 8, 128),
                    m_ref: MULLER_M_REF,
                    exact: None,
                    evolve,
                }
            }
            SurfaceId::LjCell => {
                let (a, b) = refine_endpoints(&surface, [0.56, 0.97], [0.97, 0.56])?;
                Self {
                    name: "lj-cell".into(),
                    surface: surface_spec,
                    start: a,
                    end: b,
                    via: vec![0.85, 0.85],
                    ladder: vec![35, 63, 105, 189, 315],
                    m_ref: 2835,
                    exact: None,
                    evolve,
                }
            }
        };
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(MepError::Config(m));
        if self.ladder.len() < 2 {
            return bad("a study needs at least two ladder members".into());
        }
        if self.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return bad("ladder must be strictly increasing".into());
        }
        if self.ladder[0] < 2 {
            return Err(MepError::TooFewImages(self.ladder[0]));
        }
        if self.exact.is_none() {
            if let Some(&m) = self.ladder.iter().find(|&&m| self.m_ref % m != 0) {
                return Err(MepError::MeshMismatch { m, m_ref: self.m_ref });
            }
        }
        if self.evolve.method != Method::Neb {
            return bad("studies evolve the NEB dynamics".into());
        }
        self.evolve.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub m: usize,
    pub h: f64,
    pub converged: bool,
    pub steps: usize,
    pub final_force_inf: f64,
    pub barrier: f64,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub errors: Option<ErrorTriple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StudySlopes {
    pub e_c1: Option<SlopeFit>,
    pub e_eb: Option<SlopeFit>,
    pub e_c: Option<SlopeFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub name: String,
    pub surface: SurfaceId,
    pub method: Method,
    pub m_ref: usize,
    pub exact_reference: bool,
    pub reference_barrier: f64,
    pub rows: Vec<TableRow>,
    pub slopes: StudySlopes,
}

impl ConvergenceTable {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged && r.errors.is_some())
    }

    /// Rows with errors, in ladder order.
    pub fn measured(&self) -> impl Iterator<Item = (&TableRow, &ErrorTriple)> {
        self.rows.iter().filter_map(|r| r.errors.as_ref().map(|e| (r, e)))
    }

    /// Refits all three slopes on the measured rows with `m >= m_min`.
    pub fn fit_from(&self, m_min: usize) -> StudySlopes {
        let rows: Vec<_> = self.measured().filter(|(r, _)| r.m >= m_min).collect();
        let h: Vec<f64> = rows.iter().map(|(r, _)| r.h).collect();
        let pick = |f: fn(&ErrorTriple) -> f64| {
            let e: Vec<f64> = rows.iter().map(|(_, e)| f(e)).collect();
            fit_slope(&h, &e)
        };
        StudySlopes {
            e_c1: pick(|e| e.e_c1),
            e_eb: pick(|e| e.e_eb),
            e_c: pick(|e| e.e_c),
        }
    }

    /// CSV with header `M,h,e_C1,e_Eb,e_C,e_C1_inf,e_C_inf,converged,steps`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "M,h,e_C1,e_Eb,e_C,e_C1_inf,e_C_inf,converged,steps")?;
        for r in &self.rows {
            let e = |f: fn(&ErrorTriple) -> f64| r.errors.as_ref().map_or(String::from("nan"), |t| format!("{:.10e}", f(t)));
            writeln!(
                w,
                "{},{:.10e},{},{},{},{},{},{},{}",
                r.m,
                r.h,
                e(|t| t.e_c1),
                e(|t| t.e_eb),
                e(|t| t.e_c),
                e(|t| t.e_c1_inf),
                e(|t| t.e_c_inf),
                r.converged,
                r.steps
            )?;
        }
        Ok(())
    }
}

/// A converged ladder member, kept for optional snapshot output.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyPath {
    pub m: usize,
    pub path: DiscretePath<f64>,
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutcome {
    pub table: ConvergenceTable,
    pub reference: Reference<f64>,
    pub paths: Vec<StudyPath>,
}

pub fn study_reference(spec: &StudySpec, surface: &BuiltinSurface<f64>) -> Result<Reference<f64>> {
    match spec.exact {
        Some(arc) => exact_reference(surface, arc, spec.m_ref),
        None => build_reference(
            surface,
            &spec.start,
            &spec.end,
            &InitialPath::ArcVia(spec.via.clone()),
            spec.m_ref,
            &spec.evolve,
        ),
    }
}

fn run_member(
    surface: &BuiltinSurface<f64>,
    reference: &Reference<f64>,
    m: usize,
    config: &EvolveConfig,
) -> (TableRow, Option<StudyPath>) {
    let mut row = TableRow {
        m,
        h: 1.0 / m as f64,
        converged: false,
        steps: 0,
        final_force_inf: f64::NAN,
        barrier: f64::NAN,
        errors: None,
        failure: None,
    };
    let attempt = (|| -> Result<StudyPath> {
        let warm = resample_equal_arclength(&reference.path, m)?;
        let r = relax(surface, &warm, config)?;
        row.converged = r.converged;
        row.steps = r.steps;
        row.final_force_inf = r.final_force_inf;
        row.barrier = Barrier::from_energies(&r.energy_profile).value;
        if !r.converged {
            return Err(MepError::NoConvergence {
                iterations: r.steps,
                grad_norm: r.final_force_inf,
            });
        }
        row.errors = Some(error_triple(&r.path, &r.energy_profile, reference, config.tie_rtol)?);
        Ok(StudyPath {
            m,
            path: r.path,
            energies: r.energy_profile,
        })
    })();
    match attempt {
        Ok(p) => (row, Some(p)),
        Err(e) => {
            row.failure = Some(e.to_string());
            (row, None)
        }
    }
}

/// Builds the reference, relaxes every ladder member from the reference
/// redistributed to its mesh, and fits rates. Ladder members run in
/// parallel; a failing member is recorded in its row and left out of the fits.
pub fn run_study(spec: &StudySpec) -> Result<StudyOutcome> {
    spec.validate()?;
    let surface: BuiltinSurface<f64> = spec.surface.build()?;
    if spec.start.len() != surface.dim() || spec.end.len() != surface.dim() {
        return Err(MepError::Dimension {
            expected: surface.dim(),
            got: spec.start.len(),
        });
    }
    let reference = study_reference(spec, &surface)?;
    let results: Vec<(TableRow, Option<StudyPath>)> = spec
        .ladder
        .par_iter()
        .map(|&m| run_member(&surface, &reference, m, &spec.evolve))
        .collect();
    let (rows, paths): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let mut table = ConvergenceTable {
        name: spec.name.clone(),
        surface: spec.surface.id,
        method: spec.evolve.method,
        m_ref: spec.m_ref,
        exact_reference: spec.exact.is_some(),
        reference_barrier: reference.barrier,
        rows,
        slopes: StudySlopes::default(),
    };
    table.slopes = table.fit_from(0);
    Ok(StudyOutcome {
        table,
        reference,
        paths: paths.into_iter().flatten().collect(),
    })
}

/// Default ladders as stated for the plain Example 1 surface (`M` dividing `m_ref`).
pub fn example1_even_spec(variant: Example1Variant) -> Result<StudySpec> {
    let mut spec = StudySpec::default_for(SurfaceId::Example1(variant))?;
    spec.ladder = vec![8, 16, 32, 64, 128];
    Ok(spec)
}
