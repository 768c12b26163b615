use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{distance_map, neighbour_offsets, BinaryMask, Connectivity};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDistances {
    /// 95th percentile of the pooled directed boundary distances.
    pub hd95: f64,
    /// Mean of the pooled directed boundary distances.
    pub assd: f64,
}

/// Foreground cells with at least one face neighbour in the background;
/// cells beyond the grid edge count as background.
pub fn boundary(mask: &BinaryMask) -> BinaryMask {
    let shape = mask.shape();
    let offsets = neighbour_offsets(shape.ndim(), Connectivity::Face);
    let mut coord = vec![0isize; shape.ndim()];
    let mut out = BinaryMask::empty(shape.clone());
    for i in mask.foreground() {
        let c = shape.coords(i);
        let on_edge = offsets.iter().any(|off| {
            for a in 0..c.len() {
                coord[a] = c[a] as isize + off[a];
            }
            shape.checked_index(&coord).is_none_or(|j| !mask.values()[j])
        });
        if on_edge {
            out.values_mut()[i] = true;
        }
    }
    out
}

/// Symmetric boundary distances in physical units (from the masks' spacing).
pub fn surface_distances(pred: &BinaryMask, gt: &BinaryMask) -> Result<SurfaceDistances> {
    pred.shape().ensure_same_dims(gt.shape())?;
    if pred.is_empty() {
        return Err(Error::EmptySurface("prediction"));
    }
    if gt.is_empty() {
        return Err(Error::EmptySurface("ground-truth"));
    }
    let bp = boundary(pred);
    let bg = boundary(gt);
    // distance_map measures to the nearest background cell, so the boundary
    // set plays the background role.
    let to_gt = distance_map(&bg.complement());
    let to_pred = distance_map(&bp.complement());
    let mut pooled: Vec<f64> = bp
        .foreground()
        .map(|i| to_gt.values()[i])
        .chain(bg.foreground().map(|i| to_pred.values()[i]))
        .collect();
    pooled.sort_by(f64::total_cmp);
    let assd = pooled.iter().sum::<f64>() / pooled.len() as f64;
    Ok(SurfaceDistances {
        hd95: percentile_sorted(&pooled, 95.0),
        assd,
    })
}

/// Linear-interpolation percentile of sorted data.
pub(crate) fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Shape;

    fn square(shape: &Shape, y0: usize, x0: usize, side: usize) -> BinaryMask {
        BinaryMask::from_fn(shape.clone(), |c| {
            (y0..y0 + side).contains(&c[0]) && (x0..x0 + side).contains(&c[1])
        })
    }

    /// All-pairs minimum over boundary cells.
    fn brute_force(pred: &BinaryMask, gt: &BinaryMask) -> (f64, f64) {
        let shape = pred.shape();
        let bp: Vec<Vec<usize>> = boundary(pred).foreground().map(|i| shape.coords(i)).collect();
        let bg: Vec<Vec<usize>> = boundary(gt).foreground().map(|i| shape.coords(i)).collect();
        let dist = |a: &[usize], b: &[usize]| {
            a.iter()
                .zip(b)
                .zip(shape.spacing())
                .map(|((&x, &y), h)| ((x as f64 - y as f64) * h).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let mut pooled: Vec<f64> = bp
            .iter()
            .map(|a| bg.iter().map(|b| dist(a, b)).fold(f64::INFINITY, f64::min))
            .chain(
                bg.iter()
                    .map(|b| bp.iter().map(|a| dist(a, b)).fold(f64::INFINITY, f64::min)),
            )
            .collect();
        pooled.sort_by(f64::total_cmp);
        let mean = pooled.iter().sum::<f64>() / pooled.len() as f64;
        (percentile_sorted(&pooled, 95.0), mean)
    }

    #[test]
    fn identical_masks_are_zero() {
        let s = Shape::new(&[16, 16]).unwrap();
        let m = square(&s, 3, 3, 6);
        let d = surface_distances(&m, &m).unwrap();
        assert_eq!((d.hd95, d.assd), (0.0, 0.0));
    }

    #[test]
    fn offset_squares_match_brute_force() {
        let s = Shape::new(&[24, 24]).unwrap();
        let a = square(&s, 6, 4, 6);
        let b = square(&s, 6, 7, 6);
        let d = surface_distances(&a, &b).unwrap();
        let (hd, mean) = brute_force(&a, &b);
        assert!((d.hd95 - hd).abs() < 1e-12);
        assert!((d.assd - mean).abs() < 1e-12);
        assert!(d.hd95 <= 3.0 + 1e-12);
    }

    #[test]
    fn unit_squares_three_cells_apart() {
        let s = Shape::new(&[10, 10]).unwrap();
        let a = square(&s, 4, 2, 1);
        let b = square(&s, 4, 5, 1);
        let d = surface_distances(&a, &b).unwrap();
        assert_eq!(brute_force(&a, &b), (3.0, 3.0));
        assert!((d.assd - 3.0).abs() <= 0.5);
        assert_eq!(d.hd95, 3.0);
    }

    #[test]
    fn symmetric_in_arguments() {
        let s = Shape::new(&[20, 20]).unwrap();
        let a = square(&s, 2, 2, 5);
        let b = square(&s, 9, 11, 7);
        let ab = surface_distances(&a, &b).unwrap();
        let ba = surface_distances(&b, &a).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn doubling_spacing_doubles_distances() {
        let s1 = Shape::new(&[20, 20]).unwrap();
        let s2 = Shape::with_spacing(&[20, 20], &[2.0, 2.0]).unwrap();
        let d1 = surface_distances(&square(&s1, 2, 2, 5), &square(&s1, 8, 9, 6)).unwrap();
        let d2 = surface_distances(&square(&s2, 2, 2, 5), &square(&s2, 8, 9, 6)).unwrap();
        assert!((d2.hd95 - 2.0 * d1.hd95).abs() < 1e-12);
        assert!((d2.assd - 2.0 * d1.assd).abs() < 1e-12);
    }

    #[test]
    fn empty_surface_is_an_error() {
        let s = Shape::new(&[8, 8]).unwrap();
        let e = BinaryMask::empty(s.clone());
        let m = square(&s, 1, 1, 3);
        assert!(matches!(surface_distances(&e, &m), Err(Error::EmptySurface(_))));
        assert!(matches!(surface_distances(&m, &e), Err(Error::EmptySurface(_))));
    }
}
