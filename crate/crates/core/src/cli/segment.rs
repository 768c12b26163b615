use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{parse_list, sibling, Outcome, Plan, SegmentArgs, SolveArgs, SweepArgs};
use crate::error::{Error, Result};
use crate::grid::{median_subtract, ScalarField};
use crate::io;
use crate::metrics::{confusion, evaluate, volumetric, MetricsReport};
use crate::reconnect::{IdentityReconnector, MorphReconnector, Reconnector};
use crate::solver::{primal_energy, Solver, SolverConfig};

/// Default closing radius of `--reconnector morph`.
pub const DEFAULT_CLOSE_RADIUS: f64 = 3.0;
/// Default minimum component size of `--reconnector morph`.
pub const DEFAULT_MIN_COMPONENT: usize = 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReconnectorSpec {
    Identity,
    Morph {
        close_radius: f64,
        min_component: usize,
    },
    Model {
        path: PathBuf,
        tile: usize,
        overlap: usize,
        blend: String,
    },
}

impl FromStr for ReconnectorSpec {
    type Err = Error;

    /// `identity`, `morph`, `morph:RADIUS:MIN_COMPONENT` or `model:PATH`;
    /// model tiling takes the defaults until set by the caller.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("unknown reconnector {s:?}"));
        match s.split_once(':') {
            None if s == "identity" => Ok(Self::Identity),
            None if s == "morph" => Ok(Self::Morph {
                close_radius: DEFAULT_CLOSE_RADIUS,
                min_component: DEFAULT_MIN_COMPONENT,
            }),
            Some(("morph", rest)) => {
                let (r, m) = rest.split_once(':').ok_or_else(bad)?;
                Ok(Self::Morph {
                    close_radius: r.parse().map_err(|_| bad())?,
                    min_component: m.parse().map_err(|_| bad())?,
                })
            }
            Some(("model", path)) if !path.is_empty() => Ok(Self::Model {
                path: PathBuf::from(path),
                tile: 96,
                overlap: 16,
                blend: "average".into(),
            }),
            _ => Err(bad()),
        }
    }
}

impl ReconnectorSpec {
    fn from_args(args: &SolveArgs) -> Result<Self> {
        let mut spec: Self = args.reconnector.parse()?;
        if let Self::Model { tile, overlap, blend, .. } = &mut spec {
            *tile = args.tile;
            *overlap = args.overlap;
            *blend = args.blend.clone();
        }
        Ok(spec)
    }

    /// Instantiates the reconnector for `ndim`-D images.
    pub fn build(&self, ndim: usize) -> Result<Box<dyn Reconnector>> {
        match self {
            Self::Identity => Ok(Box::new(IdentityReconnector)),
            Self::Morph {
                close_radius,
                min_component,
            } => Ok(Box::new(MorphReconnector::new(*close_radius, *min_component)?)),
            #[cfg(feature = "onnx")]
            Self::Model {
                path,
                tile,
                overlap,
                blend,
            } => {
                use crate::reconnect::{Blend, NeuralReconnector, TileSpec};
                let blend = match blend.as_str() {
                    "average" => Blend::Average,
                    "max" => Blend::Max,
                    other => return Err(Error::invalid(format!("unknown blend {other:?}"))),
                };
                let tiles = TileSpec::uniform(*tile, *overlap, blend);
                Ok(Box::new(NeuralReconnector::load(path, ndim, tiles)?))
            }
            #[cfg(not(feature = "onnx"))]
            Self::Model { .. } => {
                let _ = ndim;
                Err(Error::ModelLoad("built without the `onnx` feature".into()))
            }
        }
    }

    fn input(&self) -> Option<PathBuf> {
        match self {
            Self::Model { path, .. } => Some(path.clone()),
            _ => None,
        }
    }
}

fn solver_config(args: &SolveArgs) -> Result<Option<SolverConfig>> {
    args.config.as_ref().map(io::load_config).transpose()
}

/// Default config for the image dimension when no file is given.
fn config_or_default(config: &Option<SolverConfig>, ndim: usize) -> SolverConfig {
    match config {
        Some(c) => c.clone(),
        None if ndim == 3 => SolverConfig::default_3d(),
        None => SolverConfig::default(),
    }
}

fn load_input(path: &PathBuf, median_radius: usize) -> Result<ScalarField> {
    let f = io::read_image(path)?;
    if median_radius > 0 {
        median_subtract(&f, median_radius)
    } else {
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentPlan {
    pub image: PathBuf,
    pub out: PathBuf,
    pub gt: Option<PathBuf>,
    /// `None` means the dimension-dependent defaults.
    pub solver: Option<SolverConfig>,
    pub reconnector: ReconnectorSpec,
    pub median_radius: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentSummary {
    pub solver: SolverConfig,
    pub reconnector: String,
    pub c1: f64,
    pub c2: f64,
    pub iterations: usize,
    pub last_delta: f64,
    pub energy: f64,
    pub foreground_cells: usize,
    pub metrics: Option<MetricsReport>,
}

impl SegmentPlan {
    pub fn from_args(args: SegmentArgs) -> Result<Self> {
        Ok(Self {
            image: args.image,
            out: args.out,
            gt: args.gt,
            solver: solver_config(&args.solve)?,
            reconnector: ReconnectorSpec::from_args(&args.solve)?,
            median_radius: args.solve.median_radius,
        })
    }

    pub fn summary_path(&self) -> PathBuf {
        sibling(&self.out, "summary.json")
    }
}

impl Plan for SegmentPlan {
    const COMMAND: &'static str = "segment";

    fn execute(&self) -> Result<Outcome> {
        let f = load_input(&self.image, self.median_radius)?;
        let config = config_or_default(&self.solver, f.shape().ndim());
        let solver = Solver::new(config.clone(), f.shape())?;
        let reconnector = self.reconnector.build(f.shape().ndim())?;
        let (c1, c2) = solver.means(&f)?;
        let (mask, state) = solver.segment(&f, reconnector.as_ref())?;
        let metrics = match &self.gt {
            Some(gt) => Some(evaluate("segment", &mask, &io::read_mask(gt)?, None, true)?),
            None => None,
        };
        let summary = SegmentSummary {
            energy: primal_energy(&state.u, &solver.data_weight(&f)?, config.lambda),
            solver: config,
            reconnector: reconnector.name().to_string(),
            c1,
            c2,
            iterations: state.iter,
            last_delta: state.last_delta,
            foreground_cells: mask.count(),
            metrics,
        };
        io::write_mask(&self.out, &mask)?;
        io::write_json(self.summary_path(), &summary)?;
        let mut inputs = vec![self.image.clone()];
        inputs.extend(self.gt.clone());
        inputs.extend(self.reconnector.input());
        Ok(Outcome {
            inputs,
            outputs: vec![self.out.clone(), self.summary_path()],
            seed: None,
        })
    }

    fn manifest_path(&self) -> PathBuf {
        sibling(&self.out, "run.json")
    }
}

/// `lo, lo + step, ...` up to `hi` inclusive (within half a step).
pub fn lambda_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo >= 0.0 && hi >= lo && step > 0.0 && hi.is_finite()) {
        return Err(Error::invalid("lambda range needs 0 <= lo <= hi and step > 0"));
    }
    let n = ((hi - lo) / step + 0.5).floor() as usize + 1;
    Ok((0..n).map(|k| lo + k as f64 * step).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub image: PathBuf,
    pub gt: PathBuf,
    pub roi: Option<PathBuf>,
    /// `None` means the dimension-dependent default range.
    pub range: Option<[f64; 2]>,
    pub step: f64,
    pub out: PathBuf,
    pub solver: Option<SolverConfig>,
    pub reconnector: ReconnectorSpec,
    pub median_radius: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub mcc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub best_lambda: f64,
    pub best_mcc: f64,
}

impl SweepPlan {
    pub fn from_args(args: SweepArgs) -> Result<Self> {
        let range = match &args.range {
            Some(text) => {
                let v = parse_list::<f64>(text, ',', "lambda range")?;
                match v[..] {
                    [lo, hi] => Some([lo, hi]),
                    [x] => Some([x, x]),
                    _ => return Err(Error::invalid("lambda range needs lo,hi")),
                }
            }
            None => None,
        };
        Ok(Self {
            image: args.image,
            gt: args.gt,
            roi: args.roi,
            range,
            step: args.step,
            out: args.out,
            solver: solver_config(&args.solve)?,
            reconnector: ReconnectorSpec::from_args(&args.solve)?,
            median_radius: args.solve.median_radius,
        })
    }

    /// The default search interval: `[0.001, 0.080]` in 2D, `[0.001, 0.050]` in 3D.
    pub fn default_range(ndim: usize) -> [f64; 2] {
        if ndim == 3 {
            [0.001, 0.050]
        } else {
            [0.001, 0.080]
        }
    }

    pub fn sweep(&self) -> Result<SweepReport> {
        let f = load_input(&self.image, self.median_radius)?;
        let gt = io::read_mask(&self.gt)?;
        let roi = self.roi.as_ref().map(io::read_mask).transpose()?;
        let ndim = f.shape().ndim();
        let [lo, hi] = self.range.unwrap_or_else(|| Self::default_range(ndim));
        let base = config_or_default(&self.solver, ndim);
        let reconnector = self.reconnector.build(ndim)?;
        let full;
        let roi = match &roi {
            Some(r) => r,
            None => {
                full = crate::grid::BinaryMask::full(f.shape().clone());
                &full
            }
        };
        let mut rows = Vec::new();
        for lambda in lambda_grid(lo, hi, self.step)? {
            let config = SolverConfig { lambda, ..base.clone() };
            let (mask, _) = Solver::new(config, f.shape())?.segment(&f, reconnector.as_ref())?;
            let mcc = volumetric(&confusion(&mask, &gt, roi)?).mcc;
            rows.push(SweepRow { lambda, mcc });
        }
        let best = rows
            .iter()
            .fold(&rows[0], |b, r| if r.mcc > b.mcc { r } else { b });
        Ok(SweepReport {
            best_lambda: best.lambda,
            best_mcc: best.mcc,
            rows,
        })
    }
}

impl Plan for SweepPlan {
    const COMMAND: &'static str = "sweep-lambda";

    fn execute(&self) -> Result<Outcome> {
        let report = self.sweep()?;
        println!("lambda,mcc");
        for r in &report.rows {
            println!("{},{}", r.lambda, r.mcc);
        }
        io::write_json(&self.out, &report)?;
        let mut inputs = vec![self.image.clone(), self.gt.clone()];
        inputs.extend(self.roi.clone());
        inputs.extend(self.reconnector.input());
        Ok(Outcome {
            inputs,
            outputs: vec![self.out.clone()],
            seed: None,
        })
    }

    fn manifest_path(&self) -> PathBuf {
        sibling(&self.out, "run.json")
    }
}
