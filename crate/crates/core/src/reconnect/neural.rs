use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use tract_onnx::prelude::*;
use tract_onnx::tract_hir::infer::Factoid;

use super::Reconnector;
use crate::error::{Error, Result};
use crate::grid::ScalarField;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Blend {
    Max,
    #[default]
    Average,
}

/// Tiling of the network input. Each output cell is taken from the tiles
/// whose core covers it, the core being the tile minus `overlap / 2` cells on
/// every side shared with a neighbouring tile. Tiled and untiled inference
/// agree exactly when `overlap` is at least twice the receptive-field radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileSpec {
    /// Cells per axis; a single value applies to every axis.
    pub tile: Vec<usize>,
    pub overlap: Vec<usize>,
    pub blend: Blend,
}

impl Default for TileSpec {
    fn default() -> Self {
        Self {
            tile: vec![96],
            overlap: vec![16],
            blend: Blend::Average,
        }
    }
}

impl TileSpec {
    pub fn uniform(tile: usize, overlap: usize, blend: Blend) -> Self {
        Self {
            tile: vec![tile],
            overlap: vec![overlap],
            blend,
        }
    }

    fn per_axis(values: &[usize], ndim: usize, what: &str) -> Result<Vec<usize>> {
        match values.len() {
            1 => Ok(vec![values[0]; ndim]),
            n if n == ndim => Ok(values.to_vec()),
            n => Err(Error::invalid(format!("{what} has {n} entries for a {ndim}-D image"))),
        }
    }

    /// Tile and overlap per axis, validated for an `ndim`-D image.
    pub fn resolve(&self, ndim: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        let tile = Self::per_axis(&self.tile, ndim, "tile")?;
        let overlap = Self::per_axis(&self.overlap, ndim, "overlap")?;
        for (&t, &o) in tile.iter().zip(&overlap) {
            if t < 16 {
                return Err(Error::invalid(format!("tile {t} is below the 16-cell minimum")));
            }
            if o >= t {
                return Err(Error::invalid(format!("overlap {o} must be smaller than tile {t}")));
            }
        }
        Ok((tile, overlap))
    }
}

/// Placement of the tiles along one axis.
#[derive(Clone, Debug, PartialEq)]
struct AxisPlan {
    /// Padded extent the tiles live in (the image extent unless it is
    /// smaller than one tile).
    padded: usize,
    starts: Vec<usize>,
    /// Half-open range of each tile's core, in image coordinates.
    cores: Vec<(usize, usize)>,
}

fn plan_axis(extent: usize, tile: usize, overlap: usize) -> AxisPlan {
    if extent <= tile {
        return AxisPlan {
            padded: tile,
            starts: vec![0],
            cores: vec![(0, extent)],
        };
    }
    let stride = tile - overlap;
    let mut starts = Vec::new();
    let mut s = 0;
    while s + tile < extent {
        starts.push(s);
        s += stride;
    }
    starts.push(extent - tile);
    let margin = overlap / 2;
    let last = starts.len() - 1;
    let cores = starts
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let lo = if k == 0 { 0 } else { s + margin };
            let hi = if k == last { extent } else { s + tile - margin };
            (lo, hi)
        })
        .collect();
    AxisPlan {
        padded: extent,
        starts,
        cores,
    }
}

/// Mirror index into `0..n` without repeating the edge cell.
fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    (if m < n as isize { m } else { period - m }) as usize
}

type Plan = Arc<TypedRunnableModel>;

/// A learned reconnector loaded from an ONNX file with one input of shape
/// `(1, 1, spatial...)` and one output of the same shape with values in
/// `[0, 1]`.
pub struct NeuralReconnector {
    path: PathBuf,
    model: InferenceModel,
    tiles: TileSpec,
    ndim: usize,
    cache: std::sync::Mutex<Option<(Vec<usize>, Plan)>>,
}

impl std::fmt::Debug for NeuralReconnector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NeuralReconnector")
            .field("path", &self.path)
            .field("tiles", &self.tiles)
            .field("ndim", &self.ndim)
            .finish()
    }
}

impl NeuralReconnector {
    /// Loads the model and checks its signature for `ndim`-D images.
    pub fn load(path: impl AsRef<Path>, ndim: usize, tiles: TileSpec) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        if !(2..=3).contains(&ndim) {
            return Err(Error::invalid(format!("model spatial arity must be 2 or 3, got {ndim}")));
        }
        tiles.resolve(ndim)?;
        let model = tract_onnx::onnx()
            .model_for_path(&path)
            .map_err(|e| Error::ModelLoad(format!("{}: {e}", path.display())))?;
        let inputs = model.input_outlets().map_err(sig)?.len();
        let outputs = model.output_outlets().map_err(sig)?.len();
        if inputs != 1 || outputs != 1 {
            return Err(Error::ModelSignature(format!(
                "expected one input and one output, found {inputs} and {outputs}"
            )));
        }
        let fact = model.input_fact(0).map_err(sig)?;
        if let Some(rank) = fact.shape.rank().concretize() {
            if rank as usize != ndim + 2 {
                return Err(Error::ModelSignature(format!(
                    "input rank {rank} does not fit (batch, channel) + {ndim} spatial axes"
                )));
            }
        }
        if let Some(channels) = fact.shape.dim(1).and_then(|d| d.concretize()) {
            if let Ok(c) = channels.to_i64() {
                if c != 1 {
                    return Err(Error::ModelSignature(format!("input has {c} channels, expected 1")));
                }
            }
        }
        let reconnector = Self {
            path,
            model,
            tiles,
            ndim,
            cache: std::sync::Mutex::new(None),
        };
        // Resolve the plan once so signature errors surface at load time.
        let (tile, _) = reconnector.tiles.resolve(ndim)?;
        reconnector.plan_for(&tile)?;
        Ok(reconnector)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn tiles(&self) -> &TileSpec {
        &self.tiles
    }

    fn plan_for(&self, tile: &[usize]) -> Result<Plan> {
        let mut cache = self.cache.lock().expect("model cache poisoned");
        if let Some((dims, plan)) = cache.as_ref() {
            if dims == tile {
                return Ok(plan.clone());
            }
        }
        let mut shape = vec![1usize, 1];
        shape.extend_from_slice(tile);
        let typed = self
            .model
            .clone()
            .with_input_fact(0, InferenceFact::dt_shape(f32::datum_type(), &shape))
            .and_then(|m| m.into_optimized())
            .map_err(sig)?;
        let out = typed.output_fact(0).map_err(sig)?;
        let out_shape: Option<Vec<usize>> = out.shape.as_concrete().map(|s| s.to_vec());
        if out_shape.as_deref() != Some(&shape[..]) {
            return Err(Error::ModelSignature(format!(
                "output shape {:?} differs from input shape {shape:?}",
                out.shape
            )));
        }
        let plan = typed.into_runnable().map_err(sig)?;
        *cache = Some((tile.to_vec(), plan.clone()));
        Ok(plan)
    }

    fn infer_tile(&self, plan: &Plan, shape: &[usize], data: Vec<f32>) -> Result<Vec<f32>> {
        let input = Tensor::from_shape(shape, &data).map_err(|e| Error::ModelOutput(e.to_string()))?;
        let outputs = plan
            .run(tvec!(input.into_tvalue()))
            .map_err(|e| Error::ModelOutput(e.to_string()))?;
        let out = outputs[0]
            .cast_to::<f32>()
            .map_err(|e| Error::ModelOutput(e.to_string()))?;
        let values = out
            .try_as_plain_ram()
            .and_then(|v| v.as_slice::<f32>().map(|s| s.to_vec()))
            .map_err(|e| Error::ModelOutput(e.to_string()))?;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::ModelOutput(format!("non-finite value {v}")));
        }
        Ok(values)
    }
}

fn sig(e: impl std::fmt::Display) -> Error {
    Error::ModelSignature(e.to_string())
}

impl Reconnector for NeuralReconnector {
    fn name(&self) -> &str {
        "neural"
    }

    fn apply(&self, u: &ScalarField) -> Result<ScalarField> {
        let dims = u.dims().to_vec();
        let ndim = dims.len();
        if ndim != self.ndim {
            return Err(Error::ModelSignature(format!(
                "model expects {}-D images, got {ndim}-D",
                self.ndim
            )));
        }
        let (tile, overlap) = self.tiles.resolve(ndim)?;
        let plans: Vec<AxisPlan> = (0..ndim).map(|a| plan_axis(dims[a], tile[a], overlap[a])).collect();
        let plan = self.plan_for(&tile)?;
        let mut tensor_shape = vec![1usize, 1];
        tensor_shape.extend_from_slice(&tile);

        let shape = u.shape();
        let n = shape.len();
        let mut acc = vec![0f64; n];
        let mut hits = vec![0u32; n];
        let tile_len: usize = tile.iter().product();
        let counts: Vec<usize> = plans.iter().map(|p| p.starts.len()).collect();
        let mut which = vec![0usize; ndim];
        loop {
            // Gather the tile, mirroring cells beyond the image.
            let mut data = Vec::with_capacity(tile_len);
            let mut local = vec![0usize; ndim];
            let mut src = vec![0usize; ndim];
            for _ in 0..tile_len {
                for a in 0..ndim {
                    let g = plans[a].starts[which[a]] + local[a];
                    src[a] = reflect(g as isize, dims[a]);
                }
                data.push(u.values()[shape.index(&src)] as f32);
                advance(&mut local, &tile);
            }
            let out = self.infer_tile(&plan, &tensor_shape, data)?;

            // Scatter the core back.
            let ranges: Vec<(usize, usize)> = (0..ndim).map(|a| plans[a].cores[which[a]]).collect();
            let extent: Vec<usize> = ranges.iter().map(|r| r.1 - r.0).collect();
            let mut k = vec![0usize; ndim];
            let total: usize = extent.iter().product();
            let mut g = vec![0usize; ndim];
            for _ in 0..total {
                let mut t = 0;
                for a in 0..ndim {
                    g[a] = ranges[a].0 + k[a];
                    t = t * tile[a] + (g[a] - plans[a].starts[which[a]]);
                }
                let i = shape.index(&g);
                let v = out[t] as f64;
                match self.tiles.blend {
                    Blend::Average => acc[i] += v,
                    Blend::Max => acc[i] = if hits[i] == 0 { v } else { acc[i].max(v) },
                }
                hits[i] += 1;
                advance(&mut k, &extent);
            }
            if !advance(&mut which, &counts) {
                break;
            }
        }
        let values = acc
            .iter()
            .zip(&hits)
            .map(|(&s, &h)| {
                let v = match self.tiles.blend {
                    Blend::Average => s / h as f64,
                    Blend::Max => s,
                };
                v.clamp(0.0, 1.0)
            })
            .collect();
        ScalarField::from_vec(shape.clone(), values)
    }
}

/// Row-major odometer step; returns false after wrapping past the end.
fn advance(idx: &mut [usize], extent: &[usize]) -> bool {
    for a in (0..idx.len()).rev() {
        idx[a] += 1;
        if idx[a] < extent[a] {
            return true;
        }
        idx[a] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_plan_covers_every_cell() {
        for extent in [16usize, 40, 97, 150, 200] {
            for (tile, overlap) in [(16, 0), (32, 8), (32, 9), (96, 16), (40, 39)] {
                let p = plan_axis(extent, tile, overlap);
                let mut covered = vec![0; extent];
                for (&(lo, hi), &s) in p.cores.iter().zip(&p.starts) {
                    assert!(s <= lo && hi <= s + tile);
                    covered[lo..hi].iter_mut().for_each(|c| *c += 1);
                }
                assert!(covered.iter().all(|&c| c >= 1), "{extent} {tile} {overlap}");
                if extent > tile {
                    assert_eq!(p.starts.last().unwrap() + tile, extent);
                }
            }
        }
    }

    #[test]
    fn cores_keep_away_from_inner_tile_edges() {
        let p = plan_axis(100, 32, 12);
        for (k, (&(lo, hi), &s)) in p.cores.iter().zip(&p.starts).enumerate() {
            if k > 0 {
                assert!(lo >= s + 6);
            }
            if k + 1 < p.starts.len() {
                assert!(hi + 6 <= s + 32);
            }
        }
    }

    #[test]
    fn small_image_is_padded_to_one_tile() {
        let p = plan_axis(10, 32, 8);
        assert_eq!(p.padded, 32);
        assert_eq!(p.starts, vec![0]);
        assert_eq!(p.cores, vec![(0, 10)]);
    }

    #[test]
    fn reflection_indices() {
        let got: Vec<usize> = (-3..8).map(|i| reflect(i, 4)).collect();
        assert_eq!(got, vec![3, 2, 1, 0, 1, 2, 3, 2, 1, 0, 1]);
        assert_eq!(reflect(5, 1), 0);
    }

    #[test]
    fn tile_spec_validation() {
        assert!(TileSpec::uniform(8, 2, Blend::Average).resolve(2).is_err());
        assert!(TileSpec::uniform(32, 32, Blend::Average).resolve(2).is_err());
        let spec = TileSpec {
            tile: vec![32, 48],
            overlap: vec![4],
            blend: Blend::Max,
        };
        assert_eq!(spec.resolve(2).unwrap(), (vec![32, 48], vec![4, 4]));
        assert!(spec.resolve(3).is_err());
    }

    #[test]
    fn missing_file_is_a_load_error() {
        let err = NeuralReconnector::load("/nonexistent/model.onnx", 2, TileSpec::default()).unwrap_err();
        assert!(matches!(err, Error::ModelLoad(_)));
    }
}
