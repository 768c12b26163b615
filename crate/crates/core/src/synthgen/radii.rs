use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{BinaryMask, LabelField, ScalarField};

/// Assigns each centerline cell a radius class in `1..=m` (1 = thinnest) by
/// equal-width binning of its distance value over the observed centerline
/// range. Other cells get 0.
pub fn classify_radii(centerline: &BinaryMask, dist: &ScalarField, m: usize) -> Result<LabelField> {
    centerline.shape().ensure_same_dims(dist.shape())?;
    if m == 0 {
        return Err(Error::invalid("number of radius classes must be >= 1"));
    }
    let radii: Vec<(usize, f64)> = centerline
        .foreground()
        .map(|i| (i, dist.values()[i]))
        .collect();
    if radii.is_empty() {
        return Err(Error::NoCenterline);
    }
    if radii.iter().any(|&(_, r)| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::invalid("centerline cells must have a positive finite distance"));
    }
    let lo = radii.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let hi = radii.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let mut labels = vec![0u32; centerline.shape().len()];
    for (i, r) in radii {
        let class = if hi > lo {
            let bin = ((r - lo) / (hi - lo) * m as f64).floor() as usize;
            bin.min(m - 1) + 1
        } else {
            1
        };
        labels[i] = class as u32;
    }
    Ok(LabelField::new(centerline.shape().clone(), labels, m as u32))
}

/// Draws a class `i` in `1..=p` with probability `2^(p-i) / (2^p - 1)`.
///
/// A uniform integer `k` in `[1, 2^p - 1]` has `floor(log2 k) = j` with
/// probability `2^j / (2^p - 1)`; mapping `j` to `i = p - j` gives the law
/// exactly, with no floating-point cumulative sums.
pub fn sample_class<R: Rng + ?Sized>(p: usize, rng: &mut R) -> usize {
    assert!((1..=62).contains(&p), "class count out of range: {p}");
    let k: u64 = rng.random_range(1..(1u64 << p));
    let j = 63 - k.leading_zeros() as usize;
    p - j
}

/// Probability of class `i` under [`sample_class`].
pub fn class_probability(p: usize, i: usize) -> f64 {
    if i == 0 || i > p {
        return 0.0;
    }
    2f64.powi((p - i) as i32) / (2f64.powi(p as i32) - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Shape;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line_with_radii(radii: &[f64]) -> (BinaryMask, ScalarField) {
        let shape = Shape::new(&[1, radii.len()]).unwrap();
        let cl = BinaryMask::full(shape.clone());
        let d = ScalarField::from_vec(shape, radii.to_vec()).unwrap();
        (cl, d)
    }

    #[test]
    fn equal_radii_single_class() {
        let (cl, d) = line_with_radii(&[2.0, 2.0, 2.0]);
        let l = classify_radii(&cl, &d, 4).unwrap();
        assert_eq!(l.labels(), &[1, 1, 1]);
    }

    #[test]
    fn two_separated_bins() {
        let (cl, d) = line_with_radii(&[1.0, 1.0, 5.0, 5.0]);
        let l = classify_radii(&cl, &d, 2).unwrap();
        assert_eq!(l.labels(), &[1, 1, 2, 2]);
    }

    #[test]
    fn bin_arithmetic_by_hand() {
        // Range [1, 4] split in 4 bins of width 0.75: [1,1.75) [1.75,2.5) [2.5,3.25) [3.25,4].
        let (cl, d) = line_with_radii(&[1.0, 1.7, 1.8, 2.6, 3.3, 4.0]);
        let l = classify_radii(&cl, &d, 4).unwrap();
        assert_eq!(l.labels(), &[1, 1, 2, 3, 4, 4]);
    }

    #[test]
    fn empty_centerline_is_an_error() {
        let shape = Shape::new(&[3, 3]).unwrap();
        let cl = BinaryMask::empty(shape.clone());
        let d = ScalarField::zeros(shape);
        assert!(matches!(classify_radii(&cl, &d, 2), Err(Error::NoCenterline)));
    }

    #[test]
    fn single_class_always_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((0..1000).all(|_| sample_class(1, &mut rng) == 1));
    }

    #[test]
    fn three_class_probabilities() {
        assert_eq!(class_probability(3, 1), 4.0 / 7.0);
        assert_eq!(class_probability(3, 2), 2.0 / 7.0);
        assert_eq!(class_probability(3, 3), 1.0 / 7.0);
        for p in 1..=8 {
            let total: f64 = (1..=p).map(|i| class_probability(p, i)).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empirical_frequencies_p3() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut counts = [0usize; 4];
        let n = 100_000;
        for _ in 0..n {
            counts[sample_class(3, &mut rng)] += 1;
        }
        for i in 1..=3 {
            let freq = counts[i] as f64 / n as f64;
            assert!((freq - class_probability(3, i)).abs() < 0.01, "class {i}: {freq}");
        }
    }
}
