//! Fine reference paths for mesh-refinement studies.

use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, make_initial_path, newton_polish, EvolveConfig, InitialPath};
use crate::error::{MepError, Result};
use crate::linalg::distance;
use crate::path::{discrete_length, energies, resample_equal_arclength, Barrier, DiscretePath, NodeField};
use crate::scalar::Real;
use crate::surface::{find_critical_point, Classification, Surface};

/// Coarsest mesh of the continuation that builds a numerical reference.
const CONTINUATION_START: usize = 64;
const PRE_RELAX_TOL: f64 = 1e-5;
const SADDLE_TOL: f64 = 1e-10;

/// A closed-form MEP: the circular arc
/// `center + radius (cos(theta0 + sweep a), sin(theta0 + sweep a))`, `a in [0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactArc {
    pub center: [f64; 2],
    pub radius: f64,
    pub theta0: f64,
    pub sweep: f64,
}

impl ExactArc {
    /// Upper unit semicircle from `(-1, 0)` to `(1, 0)`.
    pub fn upper_unit_semicircle() -> Self {
        Self {
            center: [0.0, 0.0],
            radius: 1.0,
            theta0: std::f64::consts::PI,
            sweep: -std::f64::consts::PI,
        }
    }

    pub fn point<T: Real>(&self, alpha: T) -> [T; 2] {
        let t = T::lit(self.theta0) + T::lit(self.sweep) * alpha;
        let r = T::lit(self.radius);
        [T::lit(self.center[0]) + r * t.cos(), T::lit(self.center[1]) + r * t.sin()]
    }

    pub fn derivative<T: Real>(&self, alpha: T) -> [T; 2] {
        let t = T::lit(self.theta0) + T::lit(self.sweep) * alpha;
        let rs = T::lit(self.radius * self.sweep);
        [-rs * t.sin(), rs * t.cos()]
    }

    /// The arc at `m + 1` equally spaced parameters.
    pub fn sample<T: Real>(&self, m: usize) -> Result<DiscretePath<T>> {
        let mt = T::from_usize_lossy(m);
        DiscretePath::new((0..=m).map(|k| self.point(T::from_usize_lossy(k) / mt).to_vec()).collect())
    }
}

/// Reference MEP sampled at `M_ref + 1` nodes, with its parameter derivative
/// and barrier. `exact` is set when the MEP is known in closed form, which
/// lets it be compared on meshes that do not divide `M_ref`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference<T: Real> {
    pub path: DiscretePath<T>,
    pub derivative: NodeField<T>,
    pub energies: Vec<T>,
    /// Barrier of the continuous MEP: the Newton-refined saddle energy minus
    /// the start energy when the refinement succeeds, else `path_barrier`.
    pub barrier: T,
    /// `max_k E(phi_k) - E(phi_0)` on the reference path itself.
    pub path_barrier: T,
    pub saddle: Option<Vec<T>>,
    pub exact: Option<ExactArc>,
}

impl<T: Real> Reference<T> {
    pub fn m_ref(&self) -> usize {
        self.path.m()
    }

    /// Reference point and derivative at `alpha = k / m`.
    pub fn at(&self, k: usize, m: usize) -> Result<(Vec<T>, Vec<T>)> {
        let m_ref = self.m_ref();
        if m_ref % m == 0 {
            let kr = k * (m_ref / m);
            return Ok((self.path.image(kr).to_vec(), self.derivative.at(kr).to_vec()));
        }
        match &self.exact {
            Some(arc) => {
                let a = T::from_usize_lossy(k) / T::from_usize_lossy(m);
                Ok((arc.point(a).to_vec(), arc.derivative(a).to_vec()))
            }
            None => Err(MepError::MeshMismatch { m, m_ref }),
        }
    }
}

/// Fourth-order differences in the node index, scaled by `m`: central in the
/// interior, one-sided five-point stencils at the first two and last two nodes.
pub fn fourth_order_derivative<T: Real>(path: &DiscretePath<T>) -> Result<NodeField<T>> {
    let m = path.m();
    if m < 4 {
        return Err(MepError::TooFewImages(m));
    }
    let d = path.dim();
    let scale = T::from_usize_lossy(m) / T::lit(12.0);
    let mut out = NodeField::zeros(d, m + 1);
    let combine = |k: usize, nodes: [usize; 5], w: [f64; 5], sign: f64, out: &mut NodeField<T>| {
        let o = out.at_mut(k);
        for (j, &n) in nodes.iter().enumerate() {
            let x = path.image(n);
            for i in 0..d {
                o[i] += T::lit(sign * w[j]) * scale * x[i];
            }
        }
    };
    let end0 = [-25.0, 48.0, -36.0, 16.0, -3.0];
    let end1 = [-3.0, -10.0, 18.0, -6.0, 1.0];
    let central = [1.0, -8.0, 0.0, 8.0, -1.0];
    combine(0, [0, 1, 2, 3, 4], end0, 1.0, &mut out);
    combine(1, [0, 1, 2, 3, 4], end1, 1.0, &mut out);
    for k in 2..m - 1 {
        combine(k, [k - 2, k - 1, k, k + 1, k + 2], central, 1.0, &mut out);
    }
    combine(m - 1, [m, m - 1, m - 2, m - 3, m - 4], end1, -1.0, &mut out);
    combine(m, [m, m - 1, m - 2, m - 3, m - 4], end0, -1.0, &mut out);
    Ok(out)
}

/// Converged discrete MEP at `m_ref` reached by mesh continuation: an
/// explicit run at a coarse mesh, then repeated refinement by equal-arclength
/// resampling, each level finished by Newton iterations to `config.force_tol`.
pub fn build_reference<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    a: &[T],
    b: &[T],
    initial: &InitialPath,
    m_ref: usize,
    config: &EvolveConfig,
) -> Result<Reference<T>> {
    let m0 = m_ref.min(CONTINUATION_START);
    let start = make_initial_path(initial, a, b, m0)?;
    let loose = EvolveConfig {
        force_tol: config.force_tol.max(PRE_RELAX_TOL),
        ..config.clone()
    };
    let mut path = evolve(surface, &start, &loose)?.path;
    let mut m = m0;
    loop {
        let mut r = newton_polish(surface, &path, config)?;
        if !r.converged {
            r = evolve(surface, &r.path, config)?;
        }
        if !r.converged {
            return Err(MepError::NoConvergence {
                iterations: r.steps,
                grad_norm: r.final_force_inf.as_f64(),
            });
        }
        if m == m_ref {
            return reference_from_path(surface, r.path, None);
        }
        m = if 2 * m < m_ref { 2 * m } else { m_ref };
        path = resample_equal_arclength(&r.path, m)?;
    }
}

/// Refines the highest image to an index-1 saddle; `None` if Newton fails,
/// lands on another kind of critical point, or moves more than two segments.
fn refine_saddle<T: Real, S: Surface<T> + ?Sized>(surface: &S, path: &DiscretePath<T>, energies: &[T]) -> Option<(Vec<T>, T)> {
    let k = Barrier::from_energies(energies).k_max;
    let guess = path.image(k);
    let report = find_critical_point(surface, guess, T::lit(SADDLE_TOL)).ok()?;
    let reach = T::lit(2.0) * discrete_length(path) / T::from_usize_lossy(path.m());
    (report.classification == Classification::Index1Saddle && distance(&report.location, guess) <= reach)
        .then_some((report.location, report.energy))
}

/// Reference from a converged path: derivative by fourth-order differences,
/// barrier from the refined saddle.
pub fn reference_from_path<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    path: DiscretePath<T>,
    exact: Option<ExactArc>,
) -> Result<Reference<T>> {
    let derivative = fourth_order_derivative(&path)?;
    assemble_reference(surface, path, derivative, exact)
}

fn assemble_reference<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    path: DiscretePath<T>,
    derivative: NodeField<T>,
    exact: Option<ExactArc>,
) -> Result<Reference<T>> {
    let energies = energies(surface, &path)?;
    let path_barrier = Barrier::from_energies(&energies).value;
    let saddle = refine_saddle(surface, &path, &energies);
    let barrier = saddle.as_ref().map_or(path_barrier, |(_, e)| *e - energies[0]);
    Ok(Reference {
        path,
        derivative,
        energies,
        barrier,
        path_barrier,
        saddle: saddle.map(|(x, _)| x),
        exact,
    })
}

/// Reference sampled from a closed-form arc, with exact derivatives.
pub fn exact_reference<T: Real, S: Surface<T> + ?Sized>(surface: &S, arc: ExactArc, m_ref: usize) -> Result<Reference<T>> {
    let path = arc.sample(m_ref)?;
    let mt = T::from_usize_lossy(m_ref);
    let mut derivative = NodeField::zeros(2, m_ref + 1);
    for k in 0..=m_ref {
        derivative
            .at_mut(k)
            .copy_from_slice(&arc.derivative(T::from_usize_lossy(k) / mt));
    }
    assemble_reference(surface, path, derivative, Some(arc))
}
