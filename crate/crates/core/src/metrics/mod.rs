//! Volumetric, geometric and topological evaluation of a binary prediction
//! against its annotation.
//!
//! Volumetric rates are computed inside a region of interest (the whole grid
//! when none is given). Topological errors optionally run on a cleaned-up
//! prediction (small components removed, small 2D holes filled); the other
//! metrics always see the raw prediction.

mod cldice;
mod surface;
mod topology;
mod volumetric;

pub use cldice::{cl_dice, ClDice};
pub use surface::{boundary, surface_distances, SurfaceDistances};
pub use topology::{
    betti, error_ratio, euler_characteristic, min_component_size, postprocess, topo_errors, Betti,
    TopoErrors, MAX_HOLE_SIZE_2D,
};
pub use volumetric::{confusion, dice, volumetric, ConfusionCounts, Volumetric};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::BinaryMask;

/// Column order of [`MetricsReport::csv_row`].
pub const CSV_HEADER: &str = "name,tpr,ppv,dice,mcc,cl_dice,hd95,assd,\
b0_pred,b1_pred,b2_pred,chi_pred,b0_gt,b1_gt,b2_gt,chi_gt,eps_b0,eps_b1,eps_chi,flags";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub name: String,
    pub confusion: ConfusionCounts,
    pub tpr: f64,
    pub ppv: f64,
    pub dice: f64,
    pub mcc: f64,
    pub cl_dice: f64,
    /// `None` when either mask is empty.
    pub hd95: Option<f64>,
    pub assd: Option<f64>,
    pub betti_pred: Betti,
    pub betti_gt: Betti,
    pub eps_b0: Option<f64>,
    pub eps_b1: Option<f64>,
    pub eps_chi: Option<f64>,
    pub postprocessed: bool,
    /// Diagnostics such as `roi_defaulted`, `undefined:mcc`, `cl_dice_empty_skeleton`.
    pub flags: Vec<String>,
}

/// Full metric suite for one (prediction, annotation) pair.
pub fn evaluate(
    name: &str,
    pred: &BinaryMask,
    gt: &BinaryMask,
    roi: Option<&BinaryMask>,
    postprocess_topology: bool,
) -> Result<MetricsReport> {
    pred.shape().ensure_same_dims(gt.shape())?;
    let mut flags = Vec::new();
    let full;
    let roi = match roi {
        Some(r) => r,
        None => {
            flags.push("roi_defaulted".to_string());
            full = BinaryMask::full(pred.shape().clone());
            &full
        }
    };
    let counts = confusion(pred, gt, roi)?;
    let vol = volumetric(&counts);
    flags.extend(vol.undefined.iter().map(|n| format!("undefined:{n}")));

    let cl = cl_dice(pred, gt)?;
    if !cl.defined {
        flags.push("cl_dice_empty_skeleton".to_string());
    }
    let (hd95, assd) = match surface_distances(pred, gt) {
        Ok(d) => (Some(d.hd95), Some(d.assd)),
        Err(Error::EmptySurface(which)) => {
            flags.push(format!("empty_surface:{which}"));
            (None, None)
        }
        Err(e) => return Err(e),
    };
    let topo = topo_errors(pred, gt, postprocess_topology);
    for (n, v) in [("eps_b0", topo.eps_b0), ("eps_b1", topo.eps_b1), ("eps_chi", topo.eps_chi)] {
        if v.is_none() {
            flags.push(format!("undefined:{n}"));
        }
    }
    Ok(MetricsReport {
        name: name.to_string(),
        confusion: counts,
        tpr: vol.tpr,
        ppv: vol.ppv,
        dice: vol.dice,
        mcc: vol.mcc,
        cl_dice: cl.value,
        hd95,
        assd,
        betti_pred: topo.pred,
        betti_gt: topo.gt,
        eps_b0: topo.eps_b0,
        eps_b1: topo.eps_b1,
        eps_chi: topo.eps_chi,
        postprocessed: postprocess_topology,
        flags,
    })
}

impl MetricsReport {
    /// One CSV line matching [`CSV_HEADER`]; undefined values are empty cells
    /// and flags are `;`-separated.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let name = if self.name.contains([',', '"', '\n']) {
            format!("\"{}\"", self.name.replace('"', "\"\""))
        } else {
            self.name.clone()
        };
        [
            name,
            self.tpr.to_string(),
            self.ppv.to_string(),
            self.dice.to_string(),
            self.mcc.to_string(),
            self.cl_dice.to_string(),
            opt(self.hd95),
            opt(self.assd),
            self.betti_pred.b0.to_string(),
            self.betti_pred.b1.to_string(),
            self.betti_pred.b2.to_string(),
            self.betti_pred.euler.to_string(),
            self.betti_gt.b0.to_string(),
            self.betti_gt.b1.to_string(),
            self.betti_gt.b2.to_string(),
            self.betti_gt.euler.to_string(),
            opt(self.eps_b0),
            opt(self.eps_b1),
            opt(self.eps_chi),
            self.flags.join(";"),
        ]
        .join(",")
    }
}
