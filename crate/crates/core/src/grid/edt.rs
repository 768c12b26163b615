//! Exact Euclidean distance transform by separable lower envelopes of
//! parabolas (Felzenszwalb & Huttenlocher), with per-axis spacing.

use super::{BinaryMask, ScalarField};

/// Euclidean distance, in spacing units, from each foreground cell to the
/// nearest background cell of the grid; 0 on background. Cells outside the
/// grid are not background, so a mask without any background maps to +inf.
pub fn distance_map(mask: &BinaryMask) -> ScalarField {
    squared_distance_map(mask).map(f64::sqrt)
}

/// Squared distances; exact integers at unit spacing.
pub(crate) fn squared_distance_map(mask: &BinaryMask) -> ScalarField {
    let shape = mask.shape();
    let mut d: Vec<f64> = mask
        .values()
        .iter()
        .map(|&fg| if fg { f64::INFINITY } else { 0.0 })
        .collect();
    let strides = shape.strides();
    let n = shape.len();
    let mut line = Vec::new();
    let mut out = Vec::new();
    for (axis, (&dim, &h)) in shape.dims().iter().zip(shape.spacing()).enumerate() {
        let stride = strides[axis];
        for start in 0..n {
            // Visit each line once, from its first cell along `axis`.
            if (start / stride) % dim != 0 {
                continue;
            }
            line.clear();
            line.extend((0..dim).map(|k| d[start + k * stride]));
            envelope_1d(&line, h, &mut out);
            for (k, &v) in out.iter().enumerate() {
                d[start + k * stride] = v;
            }
        }
    }
    ScalarField::from_vec(shape.clone(), d).expect("length matches shape")
}

/// `out[p] = min_q (h (p - q))^2 + f[q]`, ignoring infinite sites.
fn envelope_1d(f: &[f64], h: f64, out: &mut Vec<f64>) {
    let n = f.len();
    out.clear();
    out.resize(n, f64::INFINITY);
    let mut sites: Vec<usize> = Vec::with_capacity(n);
    let mut bounds: Vec<f64> = Vec::with_capacity(n + 1);
    let key = |q: usize| f[q] + (q as f64 * h).powi(2);
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            match sites.last() {
                None => {
                    sites.push(q);
                    bounds.clear();
                    bounds.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&v) => {
                    let s = (key(q) - key(v)) / (2.0 * h * h * (q as f64 - v as f64));
                    if s <= *bounds.last().unwrap() {
                        sites.pop();
                        bounds.pop();
                    } else {
                        sites.push(q);
                        bounds.push(s);
                        break;
                    }
                }
            }
        }
    }
    if sites.is_empty() {
        return;
    }
    let mut k = 0;
    for (p, o) in out.iter_mut().enumerate() {
        let x = p as f64;
        while k + 1 < sites.len() && bounds[k + 1] < x {
            k += 1;
        }
        let q = sites[k];
        let dx = (x - q as f64) * h;
        *o = dx * dx + f[q];
    }
}
