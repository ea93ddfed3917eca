//! Discrete paths of images, difference schemes, and path measures.

mod measure;
mod norms;
mod resample;
mod snapshot;
pub(crate) mod tangent;

pub use measure::{barrier, discrete_length, energies, saddle_index, Barrier, SaddleIndex};
pub use norms::{sup_norm, xh_norm, yh_norm};
pub use resample::resample_equal_arclength;
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};
pub use tangent::{DEFAULT_TIE_RTOL, 
    tangent_backward, tangent_saddle_switch, tangent_upwind, upwind_differences, TangentField,
    TangentScheme,
};

use crate::error::{MepError, Result};
use crate::linalg::distance;
use crate::scalar::Real;

/// Values attached to the `M + 1` nodes of a path (forces, tangents, residuals).
#[derive(Debug, Clone, PartialEq)]
pub struct NodeField<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> NodeField<T> {
    pub fn zeros(dim: usize, nodes: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * nodes],
        }
    }

    pub fn from_flat(dim: usize, data: Vec<T>) -> Self {
        assert!(dim > 0 && data.len() % dim == 0, "flat data must hold whole nodes");
        Self { dim, data }
    }

    pub fn from_nodes(nodes: &[Vec<T>]) -> Self {
        let dim = nodes.first().map_or(1, |v| v.len());
        let data = nodes.iter().flat_map(|v| v.iter().copied()).collect();
        Self::from_flat(dim, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of nodes (`M + 1`).
    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn at(&self, k: usize) -> &[T] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    #[inline]
    pub fn at_mut(&mut self, k: usize) -> &mut [T] {
        &mut self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn as_flat(&self) -> &[T] {
        &self.data
    }

    pub fn as_flat_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.dim)
    }

    /// `max_k |f_k|_inf`
    pub fn sup_norm(&self) -> T {
        crate::linalg::norm_inf(&self.data)
    }

    /// `max_k |f_k - g_k|` (Euclidean per node).
    pub fn max_distance_to(&self, other: &Self) -> T {
        self.nodes()
            .zip(other.nodes())
            .map(|(a, b)| distance(a, b))
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// `max_k |f_k|` with the Euclidean norm per node.
    pub fn max_euclidean(&self) -> T {
        self.nodes()
            .map(crate::linalg::norm)
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// Serializes as a list of per-node vectors.
impl<T: Real + serde::Serialize> serde::Serialize for NodeField<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.nodes())
    }
}

/// Ordered images `phi_0, ..., phi_M` with `M >= 2`. The end images are the
/// two minimizers and are never moved by the dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePath<T> {
    field: NodeField<T>,
}

impl<T: Real> DiscretePath<T> {
    /// Builds a path and checks that it lies in the admissible set
    /// (at least three images, consistent dimension, pairwise distinct).
    pub fn new(images: Vec<Vec<T>>) -> Result<Self> {
        let dim = images.first().map_or(0, |v| v.len());
        if dim == 0 {
            return Err(MepError::TooFewImages(0));
        }
        for v in &images {
            if v.len() != dim {
                return Err(MepError::Dimension {
                    expected: dim,
                    got: v.len(),
                });
            }
        }
        let path = Self::from_flat(dim, images.into_iter().flatten().collect())?;
        path.check_distinct()?;
        Ok(path)
    }

    /// Builds a path from flat coordinates without the O(M^2) distinctness check.
    pub fn from_flat(dim: usize, coords: Vec<T>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(MepError::Dimension {
                expected: dim,
                got: coords.len(),
            });
        }
        let nodes = coords.len() / dim;
        if nodes < 3 {
            return Err(MepError::TooFewImages(nodes.saturating_sub(1)));
        }
        Ok(Self {
            field: NodeField::from_flat(dim, coords),
        })
    }

    pub fn check_distinct(&self) -> Result<()> {
        for j in 0..self.len() {
            for k in j + 1..self.len() {
                if self.image(j) == self.image(k) {
                    return Err(MepError::CoincidentImages(j, k));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    /// Number of images, `M + 1`.
    #[inline]
    pub fn len(&self) -> usize {
        self.field.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of intervals `M`.
    #[inline]
    pub fn m(&self) -> usize {
        self.len() - 1
    }

    /// Mesh size `h = 1/M`.
    #[inline]
    pub fn h(&self) -> T {
        T::one() / T::from_usize_lossy(self.m())
    }

    /// Node parameter `alpha_k = k h`.
    #[inline]
    pub fn alpha(&self, k: usize) -> T {
        T::from_usize_lossy(k) / T::from_usize_lossy(self.m())
    }

    #[inline]
    pub fn image(&self, k: usize) -> &[T] {
        self.field.at(k)
    }

    pub fn images(&self) -> impl Iterator<Item = &[T]> {
        self.field.nodes()
    }

    pub fn to_vecs(&self) -> Vec<Vec<T>> {
        self.images().map(|v| v.to_vec()).collect()
    }

    pub(crate) fn field(&self) -> &NodeField<T> {
        &self.field
    }

    pub fn coords(&self) -> &[T] {
        self.field.as_flat()
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [T] {
        self.field.as_flat_mut()
    }

    /// Same images in reverse order.
    pub fn reversed(&self) -> Self {
        let mut data = Vec::with_capacity(self.coords().len());
        for k in (0..self.len()).rev() {
            data.extend_from_slice(self.image(k));
        }
        Self {
            field: NodeField::from_flat(self.dim(), data),
        }
    }

    /// Applies `f` to every image (e.g. a mirror symmetry).
    pub fn map_images(&self, mut f: impl FnMut(&[T]) -> Vec<T>) -> Self {
        let data = self.images().flat_map(|v| f(v)).collect();
        Self {
            field: NodeField::from_flat(self.dim(), data),
        }
    }

    /// Restriction to every `stride`-th image.
    pub fn subsample(&self, stride: usize) -> Result<Self> {
        if stride == 0 || self.m() % stride != 0 {
            return Err(MepError::MeshMismatch {
                m: stride,
                m_ref: self.m(),
            });
        }
        let data = (0..=self.m())
            .step_by(stride)
            .flat_map(|k| self.image(k).iter().copied())
            .collect();
        Self::from_flat(self.dim(), data)
    }

    /// `max_k |phi_k - other_k|` (Euclidean per image).
    pub fn max_distance(&self, other: &Self) -> T {
        self.images()
            .zip(other.images())
            .map(|(a, b)| distance(a, b))
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Smallest distance between consecutive images.
    pub fn min_spacing(&self) -> T {
        (1..self.len())
            .map(|k| distance(self.image(k), self.image(k - 1)))
            .fold(T::max_value().unwrap_or(T::lit(f64::MAX)), |a, b| a.min(b))
    }

    /// Converts the path to another scalar type.
    pub fn cast<U: Real>(&self) -> DiscretePath<U> {
        let data = self.coords().iter().map(|&x| U::lit(x.as_f64())).collect();
        DiscretePath {
            field: NodeField::from_flat(self.dim(), data),
        }
    }
}
