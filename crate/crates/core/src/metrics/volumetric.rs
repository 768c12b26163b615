use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::BinaryMask;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Confusion counts restricted to the cells of `roi`.
pub fn confusion(pred: &BinaryMask, gt: &BinaryMask, roi: &BinaryMask) -> Result<ConfusionCounts> {
    pred.shape().ensure_same_dims(gt.shape())?;
    pred.shape().ensure_same_dims(roi.shape())?;
    if roi.is_empty() {
        return Err(Error::invalid("region of interest is empty"));
    }
    let mut c = ConfusionCounts::default();
    for ((&p, &g), &r) in pred.values().iter().zip(gt.values()).zip(roi.values()) {
        if !r {
            continue;
        }
        match (p, g) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Volumetric {
    pub tpr: f64,
    pub ppv: f64,
    pub dice: f64,
    pub mcc: f64,
    /// Names of rates whose denominator was zero; those are reported as 0.
    pub undefined: Vec<String>,
}

pub fn volumetric(c: &ConfusionCounts) -> Volumetric {
    let (tp, fp, tn, fn_) = (c.tp as f64, c.fp as f64, c.tn as f64, c.fn_ as f64);
    let mut undefined = Vec::new();
    let mut ratio = |name: &str, num: f64, den: f64| {
        if den == 0.0 {
            undefined.push(name.to_string());
            0.0
        } else {
            num / den
        }
    };
    let tpr = ratio("tpr", tp, tp + fn_);
    let ppv = ratio("ppv", tp, tp + fp);
    let dice = ratio("dice", 2.0 * tp, 2.0 * tp + fn_ + fp);
    let den = ((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_)).sqrt();
    let mcc = ratio("mcc", tp * tn - fp * fn_, den);
    Volumetric {
        tpr,
        ppv,
        dice,
        mcc,
        undefined,
    }
}

/// Dice coefficient of two masks over the whole grid.
pub fn dice(a: &BinaryMask, b: &BinaryMask) -> f64 {
    let inter = a.intersection(b).count() as f64;
    let total = (a.count() + b.count()) as f64;
    if total == 0.0 {
        1.0
    } else {
        2.0 * inter / total
    }
}
