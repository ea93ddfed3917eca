//! Redistribution of images along the polygon through the current images.
//!
//! The new images lie on the piecewise-linear interpolant, with endpoints kept
//! exactly, and are spaced so that consecutive images are at equal Euclidean
//! distance (equal chords). On a straight polygon this is plain equal-arclength
//! resampling; across corners it keeps the equidistribution the NEB stationary
//! state satisfies.

use super::DiscretePath;
use crate::error::{MepError, Result};
use crate::linalg::{distance, dot};
use crate::scalar::Real;

/// Position on the polygon: segment index and local parameter in `[0, 1]`.
#[derive(Debug, Clone, Copy)]
struct Cursor<T> {
    seg: usize,
    t: T,
}

struct Polygon<'a, T: Real> {
    path: &'a DiscretePath<T>,
    seg_len: Vec<T>,
}

impl<'a, T: Real> Polygon<'a, T> {
    fn point(&self, c: Cursor<T>, out: &mut [T]) {
        let a = self.path.image(c.seg);
        let b = self.path.image(c.seg + 1);
        for i in 0..out.len() {
            out[i] = a[i] + c.t * (b[i] - a[i]);
        }
    }

    /// First point after `from` at Euclidean distance `chord` from `q`, or
    /// `None` if the polygon ends first.
    fn advance(&self, from: Cursor<T>, q: &[T], chord: T, scratch: &mut [T]) -> Option<Cursor<T>> {
        let n = self.seg_len.len();
        let c2 = chord * chord;
        let mut seg = from.seg;
        let mut t0 = from.t;
        while seg < n {
            let len = self.seg_len[seg];
            if len > T::zero() {
                let a = self.path.image(seg);
                let b = self.path.image(seg + 1);
                // |a + t d - q|^2 = chord^2 with d = b - a
                for i in 0..scratch.len() {
                    scratch[i] = a[i] - q[i];
                }
                let mut dd = T::zero();
                let mut ad = T::zero();
                for i in 0..scratch.len() {
                    let d = b[i] - a[i];
                    dd += d * d;
                    ad += scratch[i] * d;
                }
                let aa = dot(scratch, scratch);
                let disc = ad * ad - dd * (aa - c2);
                if disc >= T::zero() {
                    // the crossing going outward is the larger root
                    let t = (-ad + disc.sqrt()) / dd;
                    if t >= t0 && t <= T::one() {
                        return Some(Cursor { seg, t });
                    }
                }
            }
            seg += 1;
            t0 = T::zero();
        }
        None
    }

    /// Marches `steps` equal chords from the start; returns the remaining
    /// distance to the last vertex (negative infinity if the polygon ran out).
    fn march(&self, chord: T, steps: usize, out: Option<&mut Vec<T>>) -> T {
        let dim = self.path.dim();
        let mut q = self.path.image(0).to_vec();
        let mut scratch = vec![T::zero(); dim];
        let mut cur = Cursor { seg: 0, t: T::zero() };
        let mut out = out;
        for _ in 0..steps {
            match self.advance(cur, &q, chord, &mut scratch) {
                Some(next) => {
                    cur = next;
                    self.point(cur, &mut q);
                    if let Some(o) = out.as_deref_mut() {
                        o.extend_from_slice(&q);
                    }
                }
                None => return -T::max_value().unwrap_or(T::lit(f64::MAX)),
            }
        }
        distance(&q, self.path.image(self.path.m()))
    }
}

/// Resamples `path` to `m_new + 1` images on its polygon with equal chords.
pub fn resample_equal_arclength<T: Real>(path: &DiscretePath<T>, m_new: usize) -> Result<DiscretePath<T>> {
    if m_new < 2 {
        return Err(MepError::TooFewImages(m_new));
    }
    let seg_len: Vec<T> = (0..path.m())
        .map(|k| distance(path.image(k), path.image(k + 1)))
        .collect();
    let total = seg_len.iter().fold(T::zero(), |a, &b| a + b);
    if total <= T::zero() {
        return Err(MepError::DegeneratePath);
    }
    let poly = Polygon { path, seg_len };
    let steps = m_new - 1;
    // g(chord) = remaining - chord is decreasing; the root lies in (0, L / m_new].
    let g = |c: T| poly.march(c, steps, None) - c;
    let mut hi = total / T::from_usize_lossy(m_new);
    let mut lo = T::zero();
    if g(hi) >= T::zero() {
        lo = hi;
    } else {
        for _ in 0..200 {
            let mid = (lo + hi) * T::lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) >= T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let mut coords = Vec::with_capacity((m_new + 1) * path.dim());
    coords.extend_from_slice(path.image(0));
    let mut interior = Vec::with_capacity(steps * path.dim());
    let rem = poly.march(lo, steps, Some(&mut interior));
    if rem < T::zero() || interior.len() != steps * path.dim() {
        return Err(MepError::DegeneratePath);
    }
    coords.extend_from_slice(&interior);
    coords.extend_from_slice(path.image(path.m()));
    DiscretePath::from_flat(path.dim(), coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::discrete_length;

    fn chord_spread(p: &DiscretePath<f64>) -> f64 {
        let c: Vec<f64> = (1..p.len()).map(|k| distance(p.image(k), p.image(k - 1))).collect();
        let max = c.iter().cloned().fold(f64::MIN, f64::max);
        let min = c.iter().cloned().fold(f64::MAX, f64::min);
        (max - min) / max
    }

    #[test]
    fn straight_identity() {
        let p = DiscretePath::new((0..=10).map(|k| vec![k as f64 * 0.1, -0.3 * k as f64 * 0.1]).collect())
            .unwrap();
        let q = resample_equal_arclength(&p, 10).unwrap();
        assert!(p.max_distance(&q) < 1e-14);
        assert_eq!(q.image(0), p.image(0));
        assert_eq!(q.image(10), p.image(10));
    }

    #[test]
    fn dogleg_breakpoints() {
        let p = DiscretePath::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 3.0]]).unwrap();
        let q = resample_equal_arclength(&p, 4).unwrap();
        let expected = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [1.0, 2.0], [1.0, 3.0]];
        for (k, e) in expected.iter().enumerate() {
            assert!(distance(q.image(k), e) < 1e-13, "k = {k}: {:?}", q.image(k));
        }
    }

    #[test]
    fn curved_polygon_gets_equal_chords() {
        let m = 37;
        let p = DiscretePath::new(
            (0..=m)
                .map(|k| {
                    let t = std::f64::consts::PI * (k as f64 / m as f64).powi(2);
                    vec![-t.cos(), t.sin()]
                })
                .collect(),
        )
        .unwrap();
        let q = resample_equal_arclength(&p, 20).unwrap();
        assert!(chord_spread(&q) < 1e-12, "spread {}", chord_spread(&q));
        assert_eq!(q.image(20), p.image(m));
        assert!(discrete_length(&q) <= discrete_length(&p) + 1e-12);
    }

    #[test]
    fn zero_length_is_degenerate() {
        let p = DiscretePath::from_flat(1, vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(resample_equal_arclength(&p, 4), Err(MepError::DegeneratePath));
    }
}
