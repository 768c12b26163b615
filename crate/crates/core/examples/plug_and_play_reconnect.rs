//! Plugging the morphological reconnector into the solver and comparing the
//! topology against a plain total-variation run.
//!
//! ```text
//! cargo run --release --example plug_and_play_reconnect
//! ```

use curvseg::metrics::evaluate;
use curvseg::reconnect::{IdentityReconnector, MorphReconnector, Reconnector};
use curvseg::solver::{segment, SolverConfig};
use curvseg::synthgen::{generate_pair, random_tree, render_two_level, GenParams};

fn main() -> curvseg::Result<()> {
    let config = SolverConfig {
        lambda: 0.01,
        max_iter: 200,
        alpha: Some(100),
        ..SolverConfig::default()
    };
    let morph = MorphReconnector::new(3.0, 40)?;
    let reconnectors: [&dyn Reconnector; 2] = [&IdentityReconnector, &morph];
    let mut totals = [0.0; 2];
    for seed in 0..5u64 {
        let clean = random_tree(&[128, 128], 8, [1.0, 4.0], 50 + seed)?;
        let pair = generate_pair(&clean, &GenParams { seed, ..GenParams::default() })?;
        let f = render_two_level(&pair.broken, 0.2, 0.8, 0.05, seed)?;
        print!("tree {seed}:");
        for (k, r) in reconnectors.iter().enumerate() {
            let (mask, _) = segment(&f, &config, *r)?;
            let report = evaluate(r.name(), &mask, &clean, None, true)?;
            let eps = report.eps_b0.unwrap_or(f64::NAN);
            totals[k] += eps;
            print!("  {} b0 {} (eps {eps:.2}) mcc {:.3}", r.name(), report.betti_pred.b0, report.mcc);
        }
        println!();
    }
    println!("mean eps_b0: identity {:.3}, morph {:.3}", totals[0] / 5.0, totals[1] / 5.0);
    Ok(())
}
