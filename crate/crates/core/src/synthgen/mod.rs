//! Paired connected / disconnected curvilinear masks for training and
//! evaluating reconnectors.
//!
//! The recipe: skeletonize the clean mask, bin centerline cells by local
//! radius, then repeatedly cut random discs centred on the thinnest classes
//! (thin vessels break most often) and finally sprinkle blob fragments.

mod disconnect;
mod radii;
mod tree;

pub use disconnect::{add_fragments, make_disconnection};
pub use radii::{class_probability, classify_radii, sample_class};
pub use tree::random_tree;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{distance_map, skeletonize, BinaryMask, ScalarField};

/// Class draws attempted before a disconnection is skipped.
pub const MAX_CLASS_ATTEMPTS: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenParams {
    /// Number of radius classes.
    pub m: usize,
    /// Number of thinnest classes eligible for disconnection.
    pub p: usize,
    /// Disconnection-size constant; class `i` cuts discs of mean radius `C/(i+1)`.
    #[serde(rename = "C")]
    pub c: f64,
    pub size_std: f64,
    pub removal_prob: f64,
    pub n_disconnections: usize,
    pub n_fragments: usize,
    pub fragment_radius_range: [f64; 2],
    pub fragment_fill_prob: f64,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            m: 4,
            p: 2,
            c: 6.0,
            size_std: 1.5,
            removal_prob: 0.9,
            n_disconnections: 5,
            n_fragments: 5,
            fragment_radius_range: [1.0, 3.0],
            fragment_fill_prob: 0.5,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        let prob = |v: f64| v > 0.0 && v <= 1.0;
        let checks = [
            (self.m >= 1, "m must be >= 1"),
            (self.p >= 1 && self.p <= self.m, "p must satisfy 1 <= p <= m"),
            (self.p <= 62, "p must be <= 62"),
            (self.c > 0.0 && self.c.is_finite(), "C must be positive"),
            (self.size_std >= 0.0 && self.size_std.is_finite(), "size_std must be >= 0"),
            (prob(self.removal_prob), "removal_prob must be in (0, 1]"),
            (prob(self.fragment_fill_prob), "fragment_fill_prob must be in (0, 1]"),
            (
                self.fragment_radius_range[0] >= 0.0
                    && self.fragment_radius_range[1] >= self.fragment_radius_range[0]
                    && self.fragment_radius_range[1].is_finite(),
                "fragment_radius_range must satisfy 0 <= min <= max",
            ),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::invalid(*msg)),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisconnectionRecord {
    pub center: Vec<usize>,
    pub class_index: usize,
    pub size: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetPair {
    pub clean: BinaryMask,
    /// Clean mask with disconnections cut and fragments added.
    pub broken: BinaryMask,
    /// Cells removed by the disconnections.
    pub missing: BinaryMask,
    /// Cells added by fragment injection.
    pub fragments: BinaryMask,
    pub records: Vec<DisconnectionRecord>,
    /// Disconnections dropped because no eligible class was drawn.
    pub skipped: usize,
    pub seed: u64,
}

/// Runs the full disconnection recipe on `clean`. A pure function of its
/// arguments: the RNG is seeded from `params.seed`.
pub fn generate_pair(clean: &BinaryMask, params: &GenParams) -> Result<DatasetPair> {
    params.validate()?;
    if clean.is_empty() {
        return Err(Error::invalid("clean mask has no foreground"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let centerline = skeletonize(clean);
    let dist = distance_map(clean);
    let classes = classify_radii(&centerline, &dist, params.m)?;
    let mut eligible: Vec<Vec<usize>> = vec![Vec::new(); params.p + 1];
    for (i, &c) in classes.labels().iter().enumerate() {
        if c >= 1 && c as usize <= params.p {
            eligible[c as usize].push(i);
        }
    }

    let shape = clean.shape();
    let mut broken = clean.clone();
    let mut missing = BinaryMask::empty(shape.clone());
    let mut records = Vec::new();
    let mut skipped = 0;
    for _ in 0..params.n_disconnections {
        let Some(class) = (0..MAX_CLASS_ATTEMPTS)
            .map(|_| sample_class(params.p, &mut rng))
            .find(|&i| !eligible[i].is_empty())
        else {
            skipped += 1;
            continue;
        };
        let cells = &eligible[class];
        let center = shape.coords(cells[rng.random_range(0..cells.len())]);
        let law = Normal::new(params.c / (class + 1) as f64, params.size_std)
            .map_err(|e| Error::invalid(format!("size law: {e}")))?;
        let size = law.sample(&mut rng).max(1.0);
        let (next, removed) = make_disconnection(&broken, &center, size, params.removal_prob, &mut rng);
        broken = next;
        missing = missing.union(&removed);
        records.push(DisconnectionRecord {
            center,
            class_index: class,
            size,
        });
    }
    let (broken, fragments) = disconnect::add_fragments_avoiding(&broken, &missing, params, &mut rng);
    Ok(DatasetPair {
        clean: clean.clone(),
        broken,
        missing,
        fragments,
        records,
        skipped,
        seed: params.seed,
    })
}

/// Gray-level rendering of a mask: `background` off, `foreground` on, plus
/// i.i.d. Gaussian noise of standard deviation `noise_std`.
pub fn render_two_level(
    mask: &BinaryMask,
    background: f64,
    foreground: f64,
    noise_std: f64,
    seed: u64,
) -> Result<ScalarField> {
    let noise = Normal::new(0.0, noise_std).map_err(|e| Error::invalid(format!("noise law: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = mask
        .values()
        .iter()
        .map(|&on| if on { foreground } else { background } + noise.sample(&mut rng))
        .collect();
    ScalarField::from_vec(mask.shape().clone(), values)
}
