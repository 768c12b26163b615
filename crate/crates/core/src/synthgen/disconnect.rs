use rand::Rng;

use super::GenParams;
use crate::grid::morph::ball_cells;
use crate::grid::{BinaryMask, Shape};

/// Deletes each foreground cell of the ball of radius `size` around `center`
/// with probability `removal_prob`. Returns the new mask and the removed cells.
pub fn make_disconnection<R: Rng + ?Sized>(
    mask: &BinaryMask,
    center: &[usize],
    size: f64,
    removal_prob: f64,
    rng: &mut R,
) -> (BinaryMask, BinaryMask) {
    let mut out = mask.clone();
    let mut removed = BinaryMask::empty(mask.shape().clone());
    for i in ball_cells(mask.shape(), center, size) {
        if mask.values()[i] && rng.random_bool(removal_prob) {
            out.values_mut()[i] = false;
            removed.values_mut()[i] = true;
        }
    }
    (out, removed)
}

/// Scatters `params.n_fragments` blobs (discs in 2D, randomly oriented
/// ellipsoids in 3D) centred on uniformly drawn background cells. Background
/// cells inside a blob turn on with probability `fragment_fill_prob`.
/// Returns the augmented mask and the fragments-only mask.
pub fn add_fragments<R: Rng + ?Sized>(
    mask: &BinaryMask,
    params: &GenParams,
    rng: &mut R,
) -> (BinaryMask, BinaryMask) {
    let keep_off = BinaryMask::empty(mask.shape().clone());
    add_fragments_avoiding(mask, &keep_off, params, rng)
}

/// As [`add_fragments`], but cells of `keep_off` are never filled.
pub(crate) fn add_fragments_avoiding<R: Rng + ?Sized>(
    mask: &BinaryMask,
    keep_off: &BinaryMask,
    params: &GenParams,
    rng: &mut R,
) -> (BinaryMask, BinaryMask) {
    let shape = mask.shape();
    let mut fragments = BinaryMask::empty(shape.clone());
    let candidates: Vec<usize> = (0..shape.len())
        .filter(|&i| !mask.values()[i] && !keep_off.values()[i])
        .collect();
    if candidates.is_empty() {
        return (mask.clone(), fragments);
    }
    let [rmin, rmax] = params.fragment_radius_range;
    for _ in 0..params.n_fragments {
        let centre = shape.coords(candidates[rng.random_range(0..candidates.len())]);
        let cells = if shape.ndim() == 2 {
            let r = uniform(rng, rmin, rmax);
            ball_cells(shape, &centre, r)
        } else {
            let axes = [
                uniform(rng, rmin, rmax),
                uniform(rng, rmin, rmax),
                uniform(rng, rmin, rmax),
            ];
            let rot = random_rotation(rng);
            ellipsoid_cells(shape, &centre, axes, &rot)
        };
        for i in cells {
            if !mask.values()[i] && !keep_off.values()[i] && rng.random_bool(params.fragment_fill_prob) {
                fragments.values_mut()[i] = true;
            }
        }
    }
    (mask.union(&fragments), fragments)
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// Rotation matrix of a uniformly random unit quaternion.
fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> [[f64; 3]; 3] {
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let tau = std::f64::consts::TAU;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (w, x, y, z) = (
        a * (tau * u2).sin(),
        a * (tau * u2).cos(),
        b * (tau * u3).sin(),
        b * (tau * u3).cos(),
    );
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn ellipsoid_cells(shape: &Shape, centre: &[usize], axes: [f64; 3], rot: &[[f64; 3]; 3]) -> Vec<usize> {
    let reach = axes.iter().cloned().fold(0.0, f64::max).floor() as isize;
    let mut out = Vec::new();
    for dz in -reach..=reach {
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                let d = [dz as f64, dy as f64, dx as f64];
                // Coordinates in the ellipsoid frame are R^T d.
                let q: f64 = (0..3)
                    .map(|k| {
                        let local = rot[0][k] * d[0] + rot[1][k] * d[1] + rot[2][k] * d[2];
                        (local / axes[k]).powi(2)
                    })
                    .sum();
                if q > 1.0 {
                    continue;
                }
                let c = [
                    centre[0] as isize + dz,
                    centre[1] as isize + dy,
                    centre[2] as isize + dx,
                ];
                if let Some(i) = shape.checked_index(&c) {
                    out.push(i);
                }
            }
        }
    }
    out
}
