//! Operators plugged into the solver in place of the box projection once
//! the iterate is nearly binary.

#[cfg(feature = "onnx")]
mod neural;
#[cfg(feature = "onnx")]
pub use neural::{Blend, NeuralReconnector, TileSpec};

use crate::error::{Error, Result};
use crate::grid::components::remove_small_components;
use crate::grid::{morph, BinaryMask, Connectivity, MorphOp, ScalarField};

/// Maps a field with values in `[0, 1]` to a field of the same dims with
/// values in `[0, 1]`.
pub trait Reconnector {
    fn name(&self) -> &str;

    fn apply(&self, u: &ScalarField) -> Result<ScalarField>;
}

/// Verifies that `output` is a valid reconnector response to `input`.
pub fn check_contract(input: &ScalarField, output: &ScalarField) -> Result<()> {
    if !input.shape().same_dims(output.shape()) {
        return Err(Error::ReconnectorContract(format!(
            "output dims {:?} differ from input dims {:?}",
            output.dims(),
            input.dims()
        )));
    }
    if let Some(v) = output.values().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::ReconnectorContract(format!("output value {v} outside [0, 1]")));
    }
    Ok(())
}

/// Returns its input: plugging it in yields the plain TV pipeline.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityReconnector;

impl Reconnector for IdentityReconnector {
    fn name(&self) -> &str {
        "identity"
    }

    fn apply(&self, u: &ScalarField) -> Result<ScalarField> {
        Ok(u.clone())
    }
}

/// Thresholds at 0.5, closes with a Euclidean ball to bridge gaps, then drops
/// connected components smaller than `min_component` cells.
#[derive(Clone, Copy, Debug)]
pub struct MorphReconnector {
    close_radius: f64,
    min_component: usize,
}

impl MorphReconnector {
    pub fn new(close_radius: f64, min_component: usize) -> Result<Self> {
        if !(close_radius >= 0.0 && close_radius.is_finite()) {
            return Err(Error::invalid("close_radius must be a finite value >= 0"));
        }
        Ok(Self {
            close_radius,
            min_component,
        })
    }

    pub fn close_radius(&self) -> f64 {
        self.close_radius
    }

    pub fn min_component(&self) -> usize {
        self.min_component
    }

    pub fn apply_mask(&self, mask: &BinaryMask) -> Result<BinaryMask> {
        let closed = morph(mask, MorphOp::Close, self.close_radius)?;
        Ok(remove_small_components(&closed, self.min_component, Connectivity::Full))
    }
}

impl Reconnector for MorphReconnector {
    fn name(&self) -> &str {
        "morph"
    }

    fn apply(&self, u: &ScalarField) -> Result<ScalarField> {
        Ok(self.apply_mask(&u.threshold(0.5))?.to_field())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{connected_components, Shape};
    use crate::metrics::betti;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bar_with_gap(width: usize, gap: usize) -> BinaryMask {
        BinaryMask::from_fn(Shape::new(&[11, 40]).unwrap(), |c| {
            (5 - width / 2..=5 + width / 2).contains(&c[0])
                && (5..35).contains(&c[1])
                && !(20..20 + gap).contains(&c[1])
        })
    }

    #[test]
    fn identity_passes_through() {
        let u = ScalarField::from_fn(Shape::new(&[4, 5]).unwrap(), |c| (c[0] * c[1]) as f64 / 12.0);
        let out = IdentityReconnector.apply(&u).unwrap();
        assert_eq!(out, u);
        check_contract(&u, &out).unwrap();
    }

    #[test]
    fn closing_bridges_a_three_cell_gap() {
        let m = bar_with_gap(5, 3);
        assert_eq!(betti(&m).b0, 2);
        let r = MorphReconnector::new(2.0, 0).unwrap();
        let out = r.apply(&m.to_field()).unwrap();
        assert_eq!(betti(&out.threshold(0.5)).b0, 1);
        // A 3-wide bar needs a ball of radius 2.5 to span the same gap.
        let thin = bar_with_gap(3, 3);
        let closed = |r: f64| MorphReconnector::new(r, 0).unwrap().apply_mask(&thin).unwrap();
        assert_eq!(betti(&closed(2.0)).b0, 2);
        assert_eq!(betti(&closed(2.5)).b0, 1);
    }

    #[test]
    fn small_blob_is_removed() {
        let mut m = bar_with_gap(3, 0);
        for c in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            m.set(&c, true);
        }
        let r = MorphReconnector::new(0.0, 20).unwrap();
        let out = r.apply_mask(&m).unwrap();
        assert_eq!(out, bar_with_gap(3, 0));
    }

    #[test]
    fn zero_parameters_only_threshold() {
        let u = ScalarField::from_fn(Shape::new(&[6, 6]).unwrap(), |c| (c[0] + c[1]) as f64 / 10.0);
        let out = MorphReconnector::new(0.0, 0).unwrap().apply(&u).unwrap();
        assert_eq!(out, u.threshold(0.5).to_field());
    }

    #[test]
    fn closing_never_splits_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let m = BinaryMask::from_fn(Shape::new(&[20, 20]).unwrap(), |_| rng.random_bool(0.3));
            let r = MorphReconnector::new(rng.random_range(0.0..3.0), 0).unwrap();
            let out = r.apply_mask(&m).unwrap();
            let count = |x: &BinaryMask| connected_components(x, Connectivity::Full).count();
            assert!(count(&out) <= count(&m));
        }
    }

    #[test]
    fn contract_violations() {
        let s = Shape::new(&[3, 3]).unwrap();
        let u = ScalarField::zeros(s.clone());
        let big = ScalarField::filled(s, 1.5);
        assert!(matches!(check_contract(&u, &big), Err(Error::ReconnectorContract(_))));
        let other = ScalarField::zeros(Shape::new(&[3, 4]).unwrap());
        assert!(matches!(check_contract(&u, &other), Err(Error::ReconnectorContract(_))));
        let nan = ScalarField::filled(Shape::new(&[3, 3]).unwrap(), f64::NAN);
        assert!(check_contract(&u, &nan).is_err());
    }
}
