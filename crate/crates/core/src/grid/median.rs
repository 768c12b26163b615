use super::ScalarField;
use crate::error::{Error, Result};

/// `f` minus its median over the `(2r+1)^n` box around each cell. Coordinates
/// falling outside the grid are clamped to the nearest edge cell, so every
/// window holds the same (odd) number of samples.
pub fn median_subtract(f: &ScalarField, radius: usize) -> Result<ScalarField> {
    if radius == 0 {
        return Err(Error::invalid("median radius must be at least 1"));
    }
    let shape = f.shape();
    let dims = shape.dims();
    let ndim = dims.len();
    let r = radius as isize;
    let width = 2 * radius + 1;
    let window_len = width.pow(ndim as u32);
    let offsets: Vec<Vec<isize>> = (0..window_len)
        .map(|k| {
            let mut off = vec![0isize; ndim];
            let mut rem = k;
            for a in (0..ndim).rev() {
                off[a] = (rem % width) as isize - r;
                rem /= width;
            }
            off
        })
        .collect();

    let src = f.values();
    let mut window = Vec::with_capacity(window_len);
    let mut out = Vec::with_capacity(src.len());
    for i in 0..src.len() {
        let c = shape.coords(i);
        window.clear();
        for off in &offsets {
            let mut idx = 0usize;
            for a in 0..ndim {
                let x = (c[a] as isize + off[a]).clamp(0, dims[a] as isize - 1) as usize;
                idx = idx * dims[a] + x;
            }
            window.push(src[idx]);
        }
        let mid = window_len / 2;
        let (_, median, _) = window.select_nth_unstable_by(mid, f64::total_cmp);
        out.push(src[i] - *median);
    }
    ScalarField::from_vec(shape.clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Shape;

    fn brute_force(f: &ScalarField, r: usize) -> ScalarField {
        let shape = f.shape().clone();
        let dims = shape.dims().to_vec();
        ScalarField::from_fn(shape.clone(), |c| {
            let mut vals = Vec::new();
            let r = r as isize;
            match c.len() {
                2 => {
                    for dy in -r..=r {
                        for dx in -r..=r {
                            let y = (c[0] as isize + dy).clamp(0, dims[0] as isize - 1) as usize;
                            let x = (c[1] as isize + dx).clamp(0, dims[1] as isize - 1) as usize;
                            vals.push(f.get(&[y, x]));
                        }
                    }
                }
                _ => {
                    for dz in -r..=r {
                        for dy in -r..=r {
                            for dx in -r..=r {
                                let z = (c[0] as isize + dz).clamp(0, dims[0] as isize - 1) as usize;
                                let y = (c[1] as isize + dy).clamp(0, dims[1] as isize - 1) as usize;
                                let x = (c[2] as isize + dx).clamp(0, dims[2] as isize - 1) as usize;
                                vals.push(f.get(&[z, y, x]));
                            }
                        }
                    }
                }
            }
            vals.sort_by(f64::total_cmp);
            f.get(c) - vals[vals.len() / 2]
        })
    }

    #[test]
    fn constant_becomes_zero() {
        let f = ScalarField::filled(Shape::new(&[6, 5]).unwrap(), 3.25);
        let g = median_subtract(&f, 2).unwrap();
        assert!(g.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_bright_cell_survives() {
        let mut f = ScalarField::zeros(Shape::new(&[7, 7]).unwrap());
        f.set(&[3, 3], 1.0);
        let g = median_subtract(&f, 1).unwrap();
        assert_eq!(g, brute_force(&f, 1));
        assert_eq!(g.get(&[3, 3]), 1.0);
        assert_eq!(g.values().iter().filter(|&&v| v != 0.0).count(), 1);
    }

    #[test]
    fn ramp_matches_brute_force() {
        let f = ScalarField::from_fn(Shape::new(&[9, 11]).unwrap(), |c| {
            (c[0] * 3 + c[1] * c[1]) as f64 * 0.1
        });
        for r in 1..=3 {
            assert_eq!(median_subtract(&f, r).unwrap(), brute_force(&f, r));
        }
        let f3 = ScalarField::from_fn(Shape::new(&[4, 5, 6]).unwrap(), |c| {
            ((c[0] * 7 + c[1] * 3 + c[2]) % 5) as f64
        });
        assert_eq!(median_subtract(&f3, 1).unwrap(), brute_force(&f3, 1));
    }

    #[test]
    fn zero_radius_rejected() {
        let f = ScalarField::zeros(Shape::new(&[3, 3]).unwrap());
        assert!(median_subtract(&f, 0).is_err());
    }
}
