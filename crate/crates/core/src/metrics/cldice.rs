use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{skeletonize, BinaryMask};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClDice {
    pub value: f64,
    /// False when either skeleton was empty (value forced to 0).
    pub defined: bool,
}

/// Centerline Dice: harmonic mean of topology precision
/// `|S(pred) ∩ gt| / |S(pred)|` and topology sensitivity
/// `|S(gt) ∩ pred| / |S(gt)|`.
pub fn cl_dice(pred: &BinaryMask, gt: &BinaryMask) -> Result<ClDice> {
    pred.shape().ensure_same_dims(gt.shape())?;
    let sp = skeletonize(pred);
    let sg = skeletonize(gt);
    let (np, ng) = (sp.count(), sg.count());
    if np == 0 || ng == 0 {
        return Ok(ClDice {
            value: 0.0,
            defined: false,
        });
    }
    let tprec = sp.intersection(gt).count() as f64 / np as f64;
    let tsens = sg.intersection(pred).count() as f64 / ng as f64;
    let value = if tprec + tsens == 0.0 {
        0.0
    } else {
        2.0 * tprec * tsens / (tprec + tsens)
    };
    Ok(ClDice {
        value,
        defined: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Shape;

    fn bar() -> BinaryMask {
        BinaryMask::from_fn(Shape::new(&[11, 60]).unwrap(), |c| {
            (4..=6).contains(&c[0]) && (3..57).contains(&c[1])
        })
    }

    #[test]
    fn identical_tube_is_one() {
        let m = bar();
        let d = cl_dice(&m, &m).unwrap();
        assert_eq!(d.value, 1.0);
        assert!(d.defined);
    }

    #[test]
    fn disjoint_is_zero() {
        let m = bar();
        let other = BinaryMask::from_fn(m.shape().clone(), |c| c[0] == 9 && (3..57).contains(&c[1]));
        assert_eq!(cl_dice(&other, &m).unwrap().value, 0.0);
    }

    #[test]
    fn empty_prediction_is_flagged() {
        let m = bar();
        let e = BinaryMask::empty(m.shape().clone());
        let d = cl_dice(&e, &m).unwrap();
        assert_eq!(d.value, 0.0);
        assert!(!d.defined);
    }

    #[test]
    fn larger_gaps_score_lower() {
        let gt = bar();
        let mut last = 1.0;
        for gap in [6usize, 12, 20] {
            let lo = 30 - gap / 2;
            let pred = BinaryMask::from_fn(gt.shape().clone(), |c| {
                gt.get(c) && !(lo..lo + gap).contains(&c[1])
            });
            let v = cl_dice(&pred, &gt).unwrap().value;
            assert!(v > 0.0 && v < 1.0, "gap {gap}: {v}");
            assert!(v < last, "gap {gap}: {v} not below {last}");
            last = v;
        }
    }
}
