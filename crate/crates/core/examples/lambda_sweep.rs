//! Picking the regularization weight by MCC over a grid of values.
//!
//! ```text
//! cargo run --release --example lambda_sweep
//! ```

use curvseg::metrics::{confusion, volumetric};
use curvseg::reconnect::IdentityReconnector;
use curvseg::solver::{segment, SolverConfig};
use curvseg::synthgen::{random_tree, render_two_level};
use curvseg::BinaryMask;

fn main() -> curvseg::Result<()> {
    let gt = random_tree(&[96, 96], 6, [1.0, 3.5], 21)?;
    let f = render_two_level(&gt, 0.3, 0.7, 0.2, 21)?;
    let roi = BinaryMask::full(gt.shape().clone());
    let mut best = (0.0, f64::NEG_INFINITY);
    for lambda in curvseg::cli::lambda_grid(0.01, 0.2, 0.01)? {
        let config = SolverConfig {
            lambda,
            max_iter: 300,
            ..SolverConfig::default()
        };
        let (mask, _) = segment(&f, &config, &IdentityReconnector)?;
        let mcc = volumetric(&confusion(&mask, &gt, &roi)?).mcc;
        println!("lambda {lambda:.3}  mcc {mcc:.4}");
        if mcc > best.1 {
            best = (lambda, mcc);
        }
    }
    println!("best lambda {:.3} (mcc {:.4})", best.0, best.1);
    Ok(())
}
