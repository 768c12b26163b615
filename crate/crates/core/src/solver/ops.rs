use crate::error::{Error, Result};
use crate::grid::{gradient, operator_norm_sq, ScalarField, Shape, VectorField};

/// Per-cell `(a - f)^2 - (b - f)^2`.
///
/// Minimising `<u, chan_weight(f, a, b)>` over `u` in `[0, 1]` switches on
/// the cells closer to `a` than to `b`.
pub fn chan_weight(f: &ScalarField, a: f64, b: f64) -> ScalarField {
    f.map(|v| (a - v).powi(2) - (b - v).powi(2))
}

/// Projects every cell vector onto the Euclidean ball of radius `lambda`.
pub fn prox_dual_tv(w: &VectorField, lambda: f64) -> VectorField {
    let mut out = w.clone();
    project_ball_in_place(&mut out, lambda);
    out
}

pub(crate) fn project_ball_in_place(w: &mut VectorField, lambda: f64) {
    let n = w.shape().len();
    let ndim = w.ndim();
    let raw = w.raw_mut();
    for i in 0..n {
        let norm = (0..ndim).map(|a| raw[a * n + i].powi(2)).sum::<f64>().sqrt();
        if norm > lambda {
            let scale = if norm > 0.0 { lambda / norm } else { 0.0 };
            for a in 0..ndim {
                raw[a * n + i] *= scale;
            }
        }
    }
}

/// Per-cell clamp to `[0, 1]`.
pub fn project_unit_interval(u: &ScalarField) -> ScalarField {
    u.map(|v| v.clamp(0.0, 1.0))
}

/// `1/tau - sigma * ||grad||^2 >= 0`, the convergence condition for a data
/// term whose gradient is constant.
pub fn check_step_sizes(tau: f64, sigma: f64, shape: &Shape) -> bool {
    step_margin(tau, sigma, shape) >= 0.0
}

pub(crate) fn step_margin(tau: f64, sigma: f64, shape: &Shape) -> f64 {
    1.0 / tau - sigma * operator_norm_sq(shape)
}

/// Isotropic total variation: sum of per-cell gradient norms.
pub fn total_variation(u: &ScalarField) -> f64 {
    let g = gradient(u);
    let n = u.shape().len();
    (0..n)
        .map(|i| (0..g.ndim()).map(|a| g.component(a)[i].powi(2)).sum::<f64>().sqrt())
        .sum()
}

/// `<u, data_weight> + lambda * TV(u)`.
pub fn primal_energy(u: &ScalarField, data_weight: &ScalarField, lambda: f64) -> f64 {
    let data: f64 = u.values().iter().zip(data_weight.values()).map(|(a, b)| a * b).sum();
    data + lambda * total_variation(u)
}

/// Two-class 1-D k-means on the intensities, started from the extremes.
/// Returns `(lower centroid, upper centroid)`.
pub fn estimate_means(f: &ScalarField) -> Result<(f64, f64)> {
    let (lo, hi) = (f.min(), f.max());
    if !(hi > lo) {
        return Err(Error::DegenerateImage);
    }
    let (mut c1, mut c2) = (lo, hi);
    for _ in 0..100 {
        let mid = 0.5 * (c1 + c2);
        let (mut s1, mut n1, mut s2, mut n2) = (0.0, 0usize, 0.0, 0usize);
        for &v in f.values() {
            if v <= mid {
                s1 += v;
                n1 += 1;
            } else {
                s2 += v;
                n2 += 1;
            }
        }
        // Both clusters keep their seeding extreme, so neither empties.
        let next = (s1 / n1 as f64, s2 / n2 as f64);
        if next == (c1, c2) {
            break;
        }
        (c1, c2) = next;
    }
    Ok((c1, c2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn field(values: Vec<f64>) -> ScalarField {
        let n = values.len();
        ScalarField::from_vec(Shape::new(&[1, n]).unwrap(), values).unwrap()
    }

    #[test]
    fn chan_weight_substitution() {
        let w = chan_weight(&field(vec![0.8, 0.5]), 0.2, 0.8);
        assert!((w.values()[0] - 0.36).abs() < 1e-15);
        assert!(w.values()[1].abs() < 1e-15);
        let same = chan_weight(&field(vec![0.1, 0.7, 3.0]), 0.4, 0.4);
        assert!(same.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ball_projection_examples() {
        let shape = Shape::new(&[1, 2]).unwrap();
        let w = VectorField::from_components(shape, vec![vec![3.0, 0.1], vec![4.0, 0.2]]).unwrap();
        let p = prox_dual_tv(&w, 1.0);
        assert!((p.at(0)[0] - 0.6).abs() < 1e-15 && (p.at(0)[1] - 0.8).abs() < 1e-15);
        assert_eq!(p.at(1), vec![0.1, 0.2]);
        let z = prox_dual_tv(&w, 0.0);
        assert!(z.raw().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unit_interval_projection() {
        let p = project_unit_interval(&field(vec![1.3, -0.2, 0.5]));
        assert_eq!(p.values(), &[1.0, 0.0, 0.5]);
        assert_eq!(project_unit_interval(&p), p);
    }

    #[test]
    fn step_size_gate() {
        let s2 = Shape::new(&[8, 8]).unwrap();
        let s3 = Shape::new(&[4, 4, 4]).unwrap();
        assert!(check_step_sizes(1.587, 1e-3, &s2));
        assert!(check_step_sizes(1.493, 1e-3, &s3));
        assert!(!check_step_sizes(1000.0, 1.0, &s2));
        assert!((step_margin(1.587, 1e-3, &s2) - (1.0 / 1.587 - 0.008)).abs() < 1e-15);
    }

    #[test]
    fn means_of_separated_clusters() {
        let mut v = vec![0.2; 1000];
        v.extend(vec![0.8; 100]);
        let (c1, c2) = estimate_means(&field(v)).unwrap();
        assert!((c1 - 0.2).abs() < 1e-12 && (c2 - 0.8).abs() < 1e-12);
        let mut b = vec![0.0; 50];
        b.extend(vec![1.0; 50]);
        assert_eq!(estimate_means(&field(b)).unwrap(), (0.0, 1.0));
        assert!(matches!(estimate_means(&field(vec![0.3; 9])), Err(Error::DegenerateImage)));
    }

    #[test]
    fn means_of_gaussian_mixture() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let lo = Normal::new(0.3, 0.05).unwrap();
        let hi = Normal::new(0.7, 0.05).unwrap();
        let mut v: Vec<f64> = (0..5000).map(|_| lo.sample(&mut rng)).collect();
        v.extend((0..2000).map(|_| hi.sample(&mut rng)));
        let (c1, c2) = estimate_means(&field(v)).unwrap();
        assert!((c1 - 0.3).abs() < 0.02 && (c2 - 0.7).abs() < 0.02, "{c1} {c2}");
    }

    #[test]
    fn total_variation_of_step() {
        // A unit step across one column boundary of a 3x4 grid: 3 unit jumps.
        let u = ScalarField::from_fn(Shape::new(&[3, 4]).unwrap(), |c| if c[1] >= 2 { 1.0 } else { 0.0 });
        assert_eq!(total_variation(&u), 3.0);
    }
}
