use super::{BinaryMask, Shape};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MorphOp {
    Dilate,
    Erode,
    /// Dilation followed by erosion.
    Close,
}

/// Offsets of the discrete Euclidean ball: every integer offset with norm at
/// most `radius` (in cells).
pub fn ball_offsets(ndim: usize, radius: f64) -> Vec<Vec<isize>> {
    let r = radius.floor().max(0.0) as isize;
    let r2 = radius * radius;
    let mut out = Vec::new();
    let mut off = vec![-r; ndim];
    loop {
        let n2: f64 = off.iter().map(|&o| (o * o) as f64).sum();
        if n2 <= r2 {
            out.push(off.clone());
        }
        let mut a = ndim;
        loop {
            if a == 0 {
                return out;
            }
            a -= 1;
            if off[a] < r {
                off[a] += 1;
                break;
            }
            off[a] = -r;
        }
    }
}

/// Binary morphology with a Euclidean ball of `radius` cells. Cells outside
/// the grid count as background for dilation and as foreground for erosion,
/// which keeps `erode(m) = !dilate(!m)` exact and makes closing extensive.
pub fn morph(mask: &BinaryMask, op: MorphOp, radius: f64) -> Result<BinaryMask> {
    if !(radius >= 0.0) {
        return Err(Error::invalid("structuring element radius must be >= 0"));
    }
    if radius < 1.0 {
        return Ok(mask.clone());
    }
    let offsets = ball_offsets(mask.shape().ndim(), radius);
    Ok(match op {
        MorphOp::Dilate => dilate(mask, &offsets),
        MorphOp::Erode => erode(mask, &offsets),
        MorphOp::Close => erode(&dilate(mask, &offsets), &offsets),
    })
}

fn dilate(mask: &BinaryMask, offsets: &[Vec<isize>]) -> BinaryMask {
    let shape = mask.shape();
    let mut out = vec![false; shape.len()];
    let mut coord = vec![0isize; shape.ndim()];
    for i in mask.foreground() {
        let c = shape.coords(i);
        for off in offsets {
            for a in 0..c.len() {
                coord[a] = c[a] as isize + off[a];
            }
            if let Some(j) = shape.checked_index(&coord) {
                out[j] = true;
            }
        }
    }
    BinaryMask::from_vec(shape.clone(), out).expect("length matches shape")
}

fn erode(mask: &BinaryMask, offsets: &[Vec<isize>]) -> BinaryMask {
    dilate(&mask.complement(), offsets).complement()
}

/// Cells of the ball of `radius` around `centre` that lie inside the grid.
pub(crate) fn ball_cells(shape: &Shape, centre: &[usize], radius: f64) -> Vec<usize> {
    let mut coord = vec![0isize; shape.ndim()];
    ball_offsets(shape.ndim(), radius)
        .iter()
        .filter_map(|off| {
            for a in 0..centre.len() {
                coord[a] = centre[a] as isize + off[a];
            }
            shape.checked_index(&coord)
        })
        .collect()
}
