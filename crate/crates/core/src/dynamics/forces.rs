//! Driving forces of the NEB and string dynamics.

use crate::error::{MepError, Result};
use crate::linalg::{distance, dot, norm};
use crate::path::tangent::{apply_stencils, upwind_stencils, Stencil};
use crate::path::{DiscretePath, NodeField};
use crate::scalar::Real;
use crate::surface::Surface;

/// Reusable buffers for repeated force evaluations on paths of one size.
pub(crate) struct ForceWorkspace<T> {
    pub energies: Vec<T>,
    pub grads: NodeField<T>,
}

impl<T: Real> ForceWorkspace<T> {
    pub fn new(dim: usize, nodes: usize) -> Self {
        Self {
            energies: vec![T::zero(); nodes],
            grads: NodeField::zeros(dim, nodes),
        }
    }

    pub fn evaluate<S: Surface<T> + ?Sized>(&mut self, surface: &S, path: &DiscretePath<T>) -> Result<()> {
        for k in 0..path.len() {
            self.energies[k] = surface.energy_gradient(path.image(k), self.grads.at_mut(k))?;
        }
        Ok(())
    }
}

/// Which force to assemble from the current energies and gradients.
#[derive(Debug, Clone, Copy)]
pub(crate) enum ForceKind<T> {
    Neb { spring_c: T },
    String,
}

/// Assembles the force into `out` from an evaluated workspace.
pub(crate) fn assemble<T: Real>(
    path: &DiscretePath<T>,
    ws: &ForceWorkspace<T>,
    kind: ForceKind<T>,
    tie_rtol: T,
    out: &mut NodeField<T>,
) -> Result<()> {
    let stencils = upwind_stencils(&ws.energies, tie_rtol);
    assemble_with(path, ws, kind, &stencils, out)
}

/// As [`assemble`] with the difference stencils fixed by the caller.
pub(crate) fn assemble_with<T: Real>(
    path: &DiscretePath<T>,
    ws: &ForceWorkspace<T>,
    kind: ForceKind<T>,
    stencils: &[Stencil],
    out: &mut NodeField<T>,
) -> Result<()> {
    let m = path.m();
    let diffs = apply_stencils(path.field(), stencils);
    let inv_h = T::from_usize_lossy(m);
    out.at_mut(0).iter_mut().for_each(|x| *x = T::zero());
    out.at_mut(m).iter_mut().for_each(|x| *x = T::zero());
    for k in 1..m {
        let d = diffs.at(k);
        let dn = norm(d);
        if dn == T::zero() {
            return Err(MepError::ZeroTangent(k));
        }
        let g = ws.grads.at(k);
        // -P^perp_d g = -(g - (g.d / |d|^2) d)
        let gd = dot(g, d) / (dn * dn);
        let spring = match kind {
            ForceKind::Neb { spring_c } => {
                spring_c
                    * inv_h
                    * (distance(path.image(k), path.image(k + 1)) - distance(path.image(k), path.image(k - 1)))
                    / dn
            }
            ForceKind::String => T::zero(),
        };
        let f = out.at_mut(k);
        for i in 0..f.len() {
            f[i] = -(g[i] - gd * d[i]) + spring * d[i];
        }
    }
    Ok(())
}

/// NEB force: zero at the ends, `-P^perp_tau grad E + c h^-1 (|phi_k - phi_k+1| - |phi_k - phi_k-1|) tau`
/// inside, with the upwind unit tangent `tau`.
pub fn neb_force<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    path: &DiscretePath<T>,
    spring_c: T,
) -> Result<NodeField<T>> {
    let mut ws = ForceWorkspace::new(path.dim(), path.len());
    ws.evaluate(surface, path)?;
    let mut out = NodeField::zeros(path.dim(), path.len());
    assemble(
        path,
        &ws,
        ForceKind::Neb { spring_c },
        T::lit(crate::path::DEFAULT_TIE_RTOL),
        &mut out,
    )?;
    Ok(out)
}

/// String force: the perpendicular part of `-grad E` relative to the upwind difference.
pub fn string_force<T: Real, S: Surface<T> + ?Sized>(surface: &S, path: &DiscretePath<T>) -> Result<NodeField<T>> {
    let mut ws = ForceWorkspace::new(path.dim(), path.len());
    ws.evaluate(surface, path)?;
    let mut out = NodeField::zeros(path.dim(), path.len());
    assemble(
        path,
        &ws,
        ForceKind::String,
        T::lit(crate::path::DEFAULT_TIE_RTOL),
        &mut out,
    )?;
    Ok(out)
}
