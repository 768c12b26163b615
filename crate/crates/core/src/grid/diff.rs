use super::{ScalarField, Shape, VectorField};

/// Forward differences per axis, scaled by spacing. The difference past the
/// last cell of an axis is zero (Neumann boundary).
pub fn gradient(u: &ScalarField) -> VectorField {
    let shape = u.shape();
    let strides = shape.strides();
    let n = shape.len();
    let src = u.values();
    let mut out = VectorField::zeros(shape.clone());
    for (axis, (&stride, (&dim, &h))) in strides
        .iter()
        .zip(shape.dims().iter().zip(shape.spacing()))
        .enumerate()
    {
        let g = out.component_mut(axis);
        for i in 0..n {
            if (i / stride) % dim + 1 < dim {
                g[i] = (src[i + stride] - src[i]) / h;
            }
        }
    }
    out
}

/// Backward differences per axis; the exact negative adjoint of [`gradient`],
/// so that `<grad u, v> = -<u, div v>`.
pub fn divergence(v: &VectorField) -> ScalarField {
    let shape = v.shape();
    let strides = shape.strides();
    let n = shape.len();
    let mut out = vec![0.0; n];
    for (axis, (&stride, (&dim, &h))) in strides
        .iter()
        .zip(shape.dims().iter().zip(shape.spacing()))
        .enumerate()
    {
        let c = v.component(axis);
        for (i, o) in out.iter_mut().enumerate() {
            let k = (i / stride) % dim;
            let mut d = 0.0;
            if k + 1 < dim {
                d += c[i];
            }
            if k > 0 {
                d -= c[i - stride];
            }
            *o += d / h;
        }
    }
    ScalarField::from_vec(shape.clone(), out).expect("length matches shape")
}

/// Plain Euclidean inner product of two equally sized slices.
pub fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Upper bound on the squared spectral norm of the discrete gradient:
/// `4 * sum(1 / h_a^2)`, i.e. 8 in 2D and 12 in 3D at unit spacing.
pub fn operator_norm_sq(shape: &Shape) -> f64 {
    shape.spacing().iter().map(|h| 4.0 / (h * h)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_field_has_zero_gradient() {
        let u = ScalarField::filled(Shape::new(&[5, 7]).unwrap(), 5.0);
        assert!(gradient(&u).raw().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn forward_differences_with_neumann_end() {
        // 1x3 grid: the varying axis is the last one.
        let u = ScalarField::from_vec(Shape::new(&[1, 3]).unwrap(), vec![0.0, 1.0, 3.0]).unwrap();
        let g = gradient(&u);
        assert_eq!(g.component(1), &[1.0, 2.0, 0.0]);
        assert_eq!(g.component(0), &[0.0, 0.0, 0.0]);
        // Same data along axis 0.
        let u = ScalarField::from_vec(Shape::new(&[3, 1]).unwrap(), vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(gradient(&u).component(0), &[1.0, 2.0, 0.0]);
    }

    #[test]
    fn spacing_scales_differences() {
        let s = Shape::with_spacing(&[3, 1], &[0.5, 1.0]).unwrap();
        let u = ScalarField::from_vec(s, vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(gradient(&u).component(0), &[2.0, 4.0, 0.0]);
    }

    #[test]
    fn zero_field_has_zero_divergence() {
        let v = VectorField::zeros(Shape::new(&[4, 4, 4]).unwrap());
        assert!(divergence(&v).values().iter().all(|&d| d == 0.0));
    }

    fn laplacian_stencil(u: &ScalarField) -> ScalarField {
        // Direct 2n-neighbour stencil with reflecting boundary: missing neighbours
        // contribute no flux.
        let shape = u.shape().clone();
        ScalarField::from_fn(shape.clone(), |c| {
            let centre = u.get(c);
            let mut acc = 0.0;
            for axis in 0..c.len() {
                for step in [-1isize, 1] {
                    let mut nb: Vec<isize> = c.iter().map(|&x| x as isize).collect();
                    nb[axis] += step;
                    if let Some(j) = shape.checked_index(&nb) {
                        acc += u.values()[j] - centre;
                    }
                }
            }
            acc
        })
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let shape = Shape::new(&[8, 8]).unwrap();
        let mut u = ScalarField::zeros(shape);
        u.set(&[3, 4], 1.0);
        let lap = divergence(&gradient(&u));
        let oracle = laplacian_stencil(&u);
        assert!(lap.max_abs_diff(&oracle) < 1e-14);
        // Corner cell exercises the boundary branch.
        let mut u = ScalarField::zeros(Shape::new(&[8, 8]).unwrap());
        u.set(&[0, 7], 1.0);
        assert!(divergence(&gradient(&u)).max_abs_diff(&laplacian_stencil(&u)) < 1e-14);
    }

    #[test]
    fn adjoint_identity_random_16x16() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let shape = Shape::new(&[16, 16]).unwrap();
        let u = ScalarField::from_fn(shape.clone(), |_| rng.random_range(-1.0..1.0));
        let comps = (0..2)
            .map(|_| (0..shape.len()).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let v = VectorField::from_components(shape, comps).unwrap();
        let lhs = inner(gradient(&u).raw(), v.raw());
        let rhs = inner(u.values(), divergence(&v).values());
        assert!((lhs + rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn norm_bound_values() {
        assert_eq!(operator_norm_sq(&Shape::new(&[4, 4]).unwrap()), 8.0);
        assert_eq!(operator_norm_sq(&Shape::new(&[4, 4, 4]).unwrap()), 12.0);
    }
}
