//! Total-variation segmentation of a noisy two-level image, tracking the
//! primal energy and step size along the way.
//!
//! ```text
//! cargo run --release --example segment_two_level
//! ```

use curvseg::metrics::dice;
use curvseg::reconnect::IdentityReconnector;
use curvseg::solver::{primal_energy, Solver, SolverConfig};
use curvseg::synthgen::{random_tree, render_two_level};

fn main() -> curvseg::Result<()> {
    let mask = random_tree(&[128, 128], 6, [1.5, 4.0], 7)?;
    let f = render_two_level(&mask, 0.2, 0.8, 0.1, 1)?;
    let config = SolverConfig {
        lambda: 0.01,
        max_iter: 400,
        ..SolverConfig::default()
    };
    let solver = Solver::new(config, f.shape())?;
    let (c1, c2) = solver.means(&f)?;
    let weight = solver.data_weight(&f)?;
    println!("estimated means: foreground {c1:.3}, background {c2:.3}");

    let state = solver.run(&f, &IdentityReconnector, |s| {
        if s.iter % 50 == 0 {
            let e = primal_energy(&s.u, &weight, solver.config().lambda);
            println!("iter {:4}  energy {e:10.4}  |du| {:.2e}", s.iter, s.last_delta);
        }
    })?;
    let seg = state.u.threshold(solver.config().threshold);
    println!("{} iterations, Dice vs ground truth {:.4}", state.iter, dice(&seg, &mask));
    println!("plain 0.5 threshold Dice {:.4}", dice(&f.threshold(0.5), &mask));
    Ok(())
}
