//! The full metrics report for a prediction against an annotation.
//!
//! ```text
//! cargo run --example evaluate_metrics
//! ```

use curvseg::metrics::{evaluate, volumetric, ConfusionCounts, CSV_HEADER};
use curvseg::synthgen::{generate_pair, random_tree, GenParams};

fn main() -> curvseg::Result<()> {
    let v = volumetric(&ConfusionCounts {
        tp: 30,
        fp: 10,
        tn: 50,
        fn_: 10,
    });
    println!("TP 30 FP 10 TN 50 FN 10: tpr {} ppv {} dice {} mcc {:.4}", v.tpr, v.ppv, v.dice, v.mcc);

    let gt = random_tree(&[128, 128], 8, [1.0, 4.0], 11)?;
    let pred = generate_pair(&gt, &GenParams { seed: 2, ..GenParams::default() })?.broken;
    let raw = evaluate("broken", &pred, &gt, None, false)?;
    let cleaned = evaluate("broken+post", &pred, &gt, None, true)?;
    println!("{CSV_HEADER}");
    println!("{}", raw.csv_row());
    println!("{}", cleaned.csv_row());
    println!("betti gt {:?} pred {:?}, flags {:?}", raw.betti_gt, raw.betti_pred, raw.flags);
    Ok(())
}
