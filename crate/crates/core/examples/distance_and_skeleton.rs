//! Exact distance transform, skeleton, morphology and components of a
//! procedural tree.
//!
//! ```text
//! cargo run --example distance_and_skeleton [OUT_DIR]
//! ```

use curvseg::grid::{connected_components, distance_map, morph, skeletonize, Connectivity, MorphOp};
use curvseg::io;
use curvseg::metrics::betti;
use curvseg::synthgen::random_tree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: std::path::PathBuf = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("curvseg-skeleton"));
    std::fs::create_dir_all(&out)?;

    let tree = random_tree(&[128, 128], 6, [1.0, 4.0], 3)?;
    let dist = distance_map(&tree);
    let skeleton = skeletonize(&tree);
    let radii: Vec<f64> = skeleton.foreground().map(|i| dist.values()[i]).collect();
    let mean = radii.iter().sum::<f64>() / radii.len() as f64;
    println!("tree: {} cells, skeleton {} cells, mean centerline radius {mean:.2}", tree.count(), skeleton.count());
    println!("tree betti {:?}, skeleton betti {:?}", betti(&tree), betti(&skeleton));

    let eroded = morph(&tree, MorphOp::Erode, 1.5)?;
    let parts = connected_components(&eroded, Connectivity::Full);
    println!("erosion with radius 1.5 keeps {} cells in {} components", eroded.count(), parts.count());

    io::write_mask(out.join("tree.png"), &tree)?;
    io::write_mask(out.join("skeleton.png"), &skeleton)?;
    io::write_image(out.join("distance.png"), &dist.normalized())?;
    println!("wrote {}", out.display());
    Ok(())
}
