//! Initial paths: straight chord, circular arc through a via point, or a
//! CSV snapshot.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use crate::error::{MepError, Result};
use crate::linalg::{dot, norm};
use crate::path::{read_snapshot, resample_equal_arclength, DiscretePath};
use crate::scalar::Real;
use crate::surface::Surface;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialPath {
    Linear,
    ArcVia(Vec<f64>),
    FromFile(PathBuf),
}

/// Builds an initial path with `m + 1` images between `a` and `b`.
///
/// A snapshot with a different image count is redistributed to `m + 1`
/// images; its own endpoints are kept.
pub fn make_initial_path<T: Real>(kind: &InitialPath, a: &[T], b: &[T], m: usize) -> Result<DiscretePath<T>> {
    if m < 2 {
        return Err(MepError::TooFewImages(m));
    }
    if a.len() != b.len() {
        return Err(MepError::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    match kind {
        InitialPath::Linear => linear(a, b, m),
        InitialPath::ArcVia(via) => {
            if via.len() != a.len() {
                return Err(MepError::Dimension {
                    expected: a.len(),
                    got: via.len(),
                });
            }
            let via: Vec<T> = via.iter().map(|&v| T::lit(v)).collect();
            arc_via(a, b, &via, m)
        }
        InitialPath::FromFile(file) => {
            let snap = read_snapshot::<T, _>(BufReader::new(File::open(file)?))?;
            if snap.path.m() == m {
                Ok(snap.path)
            } else {
                resample_equal_arclength(&snap.path, m)
            }
        }
    }
}

/// Like [`make_initial_path`], and also rejects paths with a segment
/// through a region excluded by `surface`.
pub fn make_initial_path_on<T: Real, S: Surface<T> + ?Sized>(
    surface: &S,
    kind: &InitialPath,
    a: &[T],
    b: &[T],
    m: usize,
) -> Result<DiscretePath<T>> {
    let path = make_initial_path(kind, a, b, m)?;
    if path.dim() != surface.dim() {
        return Err(MepError::Dimension {
            expected: surface.dim(),
            got: path.dim(),
        });
    }
    for k in 0..path.m() {
        if surface.segment_excluded(path.image(k), path.image(k + 1)) {
            return Err(MepError::ExcludedRegion(k));
        }
    }
    Ok(path)
}

fn linear<T: Real>(a: &[T], b: &[T], m: usize) -> Result<DiscretePath<T>> {
    let mut images = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let s = T::from_usize_lossy(k) / T::from_usize_lossy(m);
        images.push(a.iter().zip(b).map(|(&x, &y)| x + s * (y - x)).collect());
    }
    images[0] = a.to_vec();
    images[m] = b.to_vec();
    DiscretePath::new(images)
}

fn arc_via<T: Real>(a: &[T], b: &[T], via: &[T], m: usize) -> Result<DiscretePath<T>> {
    let n = a.len();
    let ab: Vec<T> = (0..n).map(|i| b[i] - a[i]).collect();
    let ap: Vec<T> = (0..n).map(|i| via[i] - a[i]).collect();
    let d = norm(&ab);
    if d == T::zero() {
        return Err(MepError::CollinearVia);
    }
    // Orthonormal basis of the plane through a, b, via.
    let e1: Vec<T> = ab.iter().map(|&v| v / d).collect();
    let px = dot(&ap, &e1);
    let rest: Vec<T> = (0..n).map(|i| ap[i] - px * e1[i]).collect();
    let py = norm(&rest);
    let scale = d.max(norm(&ap));
    if py <= T::lit(1e-12) * scale {
        return Err(MepError::CollinearVia);
    }
    let e2: Vec<T> = rest.iter().map(|&v| v / py).collect();

    // In plane coordinates a = (0,0), b = (d,0), via = (px,py).
    let two = T::lit(2.0);
    let cx = d / two;
    let cy = (px * px + py * py - d * px) / (two * py);
    let r = (cx * cx + cy * cy).sqrt();
    let theta = |x: T, y: T| (y - cy).atan2(x - cx);
    let ta = theta(T::zero(), T::zero());
    let tp = theta(px, py);
    let tb = theta(d, T::zero());
    let tau = T::two_pi();
    let wrap = |t: T| {
        let mut t = t % tau;
        if t < T::zero() {
            t += tau;
        }
        t
    };
    // Sweep counterclockwise from a if that passes via before b, else clockwise.
    let ccw_b = wrap(tb - ta);
    let sweep = if wrap(tp - ta) < ccw_b { ccw_b } else { ccw_b - tau };

    let mut images = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let t = ta + sweep * T::from_usize_lossy(k) / T::from_usize_lossy(m);
        let (u, v) = (cx + r * t.cos(), cy + r * t.sin());
        images.push((0..n).map(|i| a[i] + u * e1[i] + v * e2[i]).collect());
    }
    images[0] = a.to_vec();
    images[m] = b.to_vec();
    DiscretePath::new(images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{Example1, Example1Variant};

    #[test]
    fn linear_is_equispaced() {
        let p = make_initial_path::<f64>(&InitialPath::Linear, &[-1.0, 0.0], &[1.0, 0.0], 4).unwrap();
        let xs: Vec<f64> = p.images().map(|x| x[0]).collect();
        assert_eq!(xs, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn arc_through_top_of_circle() {
        let kind = InitialPath::ArcVia(vec![0.0, 1.0]);
        let p = make_initial_path::<f64>(&kind, &[-1.0, 0.0], &[1.0, 0.0], 2).unwrap();
        assert!((p.image(1)[0]).abs() < 1e-15);
        assert!((p.image(1)[1] - 1.0).abs() < 1e-15);
        let p = make_initial_path::<f64>(&kind, &[-1.0, 0.0], &[1.0, 0.0], 16).unwrap();
        for x in p.images() {
            assert!((x[0].hypot(x[1]) - 1.0).abs() < 1e-14);
            assert!(x[1] >= 0.0);
        }
        let below = InitialPath::ArcVia(vec![0.0, -1.0]);
        let p = make_initial_path::<f64>(&below, &[-1.0, 0.0], &[1.0, 0.0], 16).unwrap();
        assert!(p.images().all(|x| x[1] <= 0.0));
    }

    #[test]
    fn arc_is_equal_arclength() {
        let kind = InitialPath::ArcVia(vec![0.3, 0.8]);
        let p = make_initial_path::<f64>(&kind, &[-1.0, 0.2], &[1.5, -0.1], 10).unwrap();
        let d0 = crate::linalg::distance(p.image(0), p.image(1));
        for k in 0..10 {
            let d = crate::linalg::distance(p.image(k), p.image(k + 1));
            assert!((d - d0).abs() < 1e-12);
        }
    }

    #[test]
    fn collinear_via_rejected() {
        let kind = InitialPath::ArcVia(vec![0.25, 0.0]);
        let r = make_initial_path::<f64>(&kind, &[-1.0, 0.0], &[1.0, 0.0], 8);
        assert!(matches!(r, Err(MepError::CollinearVia)));
    }

    #[test]
    fn linear_through_origin_rejected_on_example1() {
        let s = Example1::<f64>::new(Example1Variant::E);
        let r = make_initial_path_on(&s, &InitialPath::Linear, &[-1.0, 0.0], &[1.0, 0.0], 8);
        assert!(matches!(r, Err(MepError::ExcludedRegion(_))));
        let ok = make_initial_path_on(&s, &InitialPath::ArcVia(vec![0.0, 1.0]), &[-1.0, 0.0], &[1.0, 0.0], 8);
        assert!(ok.is_ok());
    }
}
