use serde::{Deserialize, Serialize};

use crate::grid::components::{border_labels, fill_small_holes, remove_small_components};
use crate::grid::{connected_components, BinaryMask, Connectivity};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Betti {
    pub b0: i64,
    pub b1: i64,
    pub b2: i64,
    pub euler: i64,
}

/// Betti numbers with foreground full connectivity and background face
/// connectivity. `b0` and `b2` come from component counting, the Euler
/// characteristic from the cubical complex of closed cells, and
/// `b1 = b0 + b2 - euler`.
pub fn betti(mask: &BinaryMask) -> Betti {
    let b0 = connected_components(mask, Connectivity::Full).count() as i64;
    let b2 = if mask.shape().ndim() == 3 {
        cavities(mask)
    } else {
        0
    };
    let euler = euler_characteristic(mask);
    Betti {
        b0,
        b1: b0 + b2 - euler,
        b2,
        euler,
    }
}

/// Face-connected background components that do not touch the border.
fn cavities(mask: &BinaryMask) -> i64 {
    let bg = connected_components(&mask.complement(), Connectivity::Face);
    let border = border_labels(&bg);
    border.iter().skip(1).filter(|&&b| !b).count() as i64
}

/// Alternating count of the vertices, edges, faces and cubes of the union of
/// closed unit cells over foreground cells.
///
/// Elements are addressed on the doubled lattice `0..=2d` per axis: odd
/// coordinates are cell interiors, even ones are cell boundaries, and the
/// element's dimension is its number of odd coordinates.
pub fn euler_characteristic(mask: &BinaryMask) -> i64 {
    let shape = mask.shape();
    let dims = shape.dims();
    let ndim = dims.len();
    let doubled: Vec<usize> = dims.iter().map(|&d| 2 * d + 1).collect();
    let total: usize = doubled.iter().product();
    let values = mask.values();
    let mut chi = 0i64;
    let mut c = vec![0usize; ndim];
    let mut ranges: Vec<(usize, usize)> = vec![(0, 0); ndim];
    for _ in 0..total {
        let mut dim = 0;
        for a in 0..ndim {
            if c[a] % 2 == 1 {
                dim += 1;
                ranges[a] = ((c[a] - 1) / 2, (c[a] - 1) / 2);
            } else {
                let half = c[a] / 2;
                ranges[a] = (half.saturating_sub(1), half.min(dims[a] - 1));
            }
        }
        if any_foreground(values, dims, &ranges) {
            chi += if dim % 2 == 0 { 1 } else { -1 };
        }
        // Advance the doubled-lattice counter.
        for a in (0..ndim).rev() {
            c[a] += 1;
            if c[a] < doubled[a] {
                break;
            }
            c[a] = 0;
        }
    }
    chi
}

fn any_foreground(values: &[bool], dims: &[usize], ranges: &[(usize, usize)]) -> bool {
    match dims.len() {
        2 => {
            for y in ranges[0].0..=ranges[0].1 {
                for x in ranges[1].0..=ranges[1].1 {
                    if values[y * dims[1] + x] {
                        return true;
                    }
                }
            }
            false
        }
        _ => {
            for z in ranges[0].0..=ranges[0].1 {
                for y in ranges[1].0..=ranges[1].1 {
                    for x in ranges[2].0..=ranges[2].1 {
                        if values[(z * dims[1] + y) * dims[2] + x] {
                            return true;
                        }
                    }
                }
            }
            false
        }
    }
}

/// Minimum component size kept by post-processing: 20 cells in 2D, 90 in 3D.
pub fn min_component_size(ndim: usize) -> usize {
    if ndim == 2 {
        20
    } else {
        90
    }
}

/// Holes smaller than this are filled in 2D; no hole filling in 3D.
pub const MAX_HOLE_SIZE_2D: usize = 10;

/// Noise clean-up applied before topological metrics: small components are
/// removed and, in 2D, small holes filled.
pub fn postprocess(mask: &BinaryMask) -> BinaryMask {
    let ndim = mask.shape().ndim();
    let cleaned = remove_small_components(mask, min_component_size(ndim), Connectivity::Full);
    if ndim == 2 {
        fill_small_holes(&cleaned, MAX_HOLE_SIZE_2D)
    } else {
        cleaned
    }
}

/// `|M - M_gt| / |M_gt|`, undefined (`None`) when `M_gt = 0`.
pub fn error_ratio(m: i64, m_gt: i64) -> Option<f64> {
    if m_gt == 0 {
        None
    } else {
        Some(((m - m_gt) as f64 / m_gt as f64).abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopoErrors {
    pub eps_b0: Option<f64>,
    pub eps_b1: Option<f64>,
    pub eps_chi: Option<f64>,
    pub pred: Betti,
    pub gt: Betti,
}

pub fn topo_errors(pred: &BinaryMask, gt: &BinaryMask, postprocess_pred: bool) -> TopoErrors {
    let pred = if postprocess_pred {
        postprocess(pred)
    } else {
        pred.clone()
    };
    let bp = betti(&pred);
    let bg = betti(gt);
    TopoErrors {
        eps_b0: error_ratio(bp.b0, bg.b0),
        eps_b1: error_ratio(bp.b1, bg.b1),
        eps_chi: error_ratio(bp.euler, bg.euler),
        pred: bp,
        gt: bg,
    }
}
