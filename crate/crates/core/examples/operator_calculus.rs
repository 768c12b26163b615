//! Gradient, divergence and the bound on the squared operator norm.
//!
//! ```text
//! cargo run --example operator_calculus
//! ```

use curvseg::grid::{divergence, gradient, inner, operator_norm_sq};
use curvseg::{ScalarField, Shape, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> curvseg::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (dims, spacing) in [(vec![64, 48], vec![1.0, 1.0]), (vec![16, 20, 24], vec![2.0, 1.0, 0.5])] {
        let shape = Shape::with_spacing(&dims, &spacing)?;
        let u = ScalarField::from_fn(shape.clone(), |_| rng.random_range(-1.0..1.0));
        let v = VectorField::from_components(
            shape.clone(),
            (0..shape.ndim())
                .map(|_| (0..shape.len()).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect(),
        )?;
        let gap = inner(gradient(&u).raw(), v.raw()) + inner(u.values(), divergence(&v).values());

        // Power iteration on -div(grad(.)).
        let mut w = u.clone();
        let mut estimate = 0.0;
        for _ in 0..300 {
            let next = divergence(&gradient(&w)).map(|x| -x);
            estimate = inner(next.values(), w.values()) / inner(w.values(), w.values());
            let n = inner(next.values(), next.values()).sqrt();
            w = next.map(|x| x / n);
        }
        println!(
            "dims {dims:?} spacing {spacing:?}: <grad u, v> + <u, div v> = {gap:.2e}, |grad|^2 ~ {estimate:.4} <= {:.4}",
            operator_norm_sq(&shape)
        );
    }
    Ok(())
}
