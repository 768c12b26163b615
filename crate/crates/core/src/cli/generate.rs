use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ensure_dir, parse_list, GenerateArgs, Outcome, Plan};
use crate::error::{Error, Result};
use crate::grid::BinaryMask;
use crate::io;
use crate::synthgen::{generate_pair, random_tree, DisconnectionRecord, GenParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeSource {
    Directory { path: PathBuf },
    RandomTrees { count: usize, dims: Vec<usize>, branches: usize, radius: [f64; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratePlan {
    pub source: TreeSource,
    pub params: GenParams,
    pub out_dir: PathBuf,
}

/// Per-pair manifest, written as `pair_NNNN.json` beside the pair's masks.
/// File names are relative to the manifest's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairManifest {
    pub name: String,
    pub source: Option<PathBuf>,
    pub clean: String,
    pub broken: String,
    pub missing: String,
    pub fragments: String,
    pub params: GenParams,
    pub seed: u64,
    pub records: Vec<DisconnectionRecord>,
    pub skipped: usize,
}

/// Independent per-pair seed streams from one base seed.
fn derive_seed(base: u64, index: u64, stream: u64) -> u64 {
    let mut z = base
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl GeneratePlan {
    pub fn from_args(args: GenerateArgs) -> Result<Self> {
        let mut params: GenParams = match &args.params {
            Some(p) => io::load_config(p)?,
            None => GenParams::default(),
        };
        if let Some(seed) = args.seed {
            params.seed = seed;
        }
        params.validate()?;
        let source = match (args.input_dir, args.random_trees) {
            (Some(path), None) => TreeSource::Directory { path },
            (None, Some(count)) => {
                let radius = parse_list::<f64>(&args.radius, ',', "radius range")?;
                let radius: [f64; 2] = radius
                    .try_into()
                    .map_err(|_| Error::invalid("radius range needs two values: min,max"))?;
                TreeSource::RandomTrees {
                    count,
                    dims: parse_list(&args.dims, 'x', "dims")?,
                    branches: args.branches,
                    radius,
                }
            }
            _ => return Err(Error::invalid("give exactly one of --input-dir and --random-trees")),
        };
        Ok(Self {
            source,
            params,
            out_dir: args.out_dir,
        })
    }

    fn clean_masks(&self) -> Result<Vec<(Option<PathBuf>, BinaryMask)>> {
        match &self.source {
            TreeSource::Directory { path } => {
                let files = mask_files(path)?;
                if files.is_empty() {
                    return Err(Error::invalid(format!("no .png or .nii masks in {}", path.display())));
                }
                files
                    .into_iter()
                    .map(|f| io::read_mask(&f).map(|m| (Some(f), m)))
                    .collect()
            }
            TreeSource::RandomTrees { count, dims, branches, radius } => (0..*count as u64)
                .map(|k| random_tree(dims, *branches, *radius, derive_seed(self.params.seed, k, 1)).map(|m| (None, m)))
                .collect(),
        }
    }
}

/// `.png` and `.nii` files of a directory in name order.
pub(crate) fn mask_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("png") || e.eq_ignore_ascii_case("nii"))
        })
        .collect();
    files.sort();
    Ok(files)
}

impl Plan for GeneratePlan {
    const COMMAND: &'static str = "generate";

    fn execute(&self) -> Result<Outcome> {
        ensure_dir(&self.out_dir)?;
        let mut outputs = Vec::new();
        let mut inputs = Vec::new();
        for (k, (source, clean)) in self.clean_masks()?.into_iter().enumerate() {
            let name = format!("pair_{k:04}");
            let ext = io::extension_for(clean.shape().ndim());
            let params = GenParams {
                seed: derive_seed(self.params.seed, k as u64, 2),
                ..self.params.clone()
            };
            let pair = generate_pair(&clean, &params)?;
            let file = |part: &str| format!("{name}_{part}.{ext}");
            let manifest = PairManifest {
                name: name.clone(),
                source: source.clone(),
                clean: file("clean"),
                broken: file("broken"),
                missing: file("missing"),
                fragments: file("fragments"),
                params,
                seed: pair.seed,
                records: pair.records.clone(),
                skipped: pair.skipped,
            };
            for (rel, mask) in [
                (&manifest.clean, &pair.clean),
                (&manifest.broken, &pair.broken),
                (&manifest.missing, &pair.missing),
                (&manifest.fragments, &pair.fragments),
            ] {
                let path = self.out_dir.join(rel);
                io::write_mask(&path, mask)?;
                outputs.push(path);
            }
            let path = self.out_dir.join(format!("{name}.json"));
            io::write_json(&path, &manifest)?;
            outputs.push(path);
            inputs.extend(source);
        }
        Ok(Outcome {
            inputs,
            outputs,
            seed: Some(self.params.seed),
        })
    }

    fn manifest_path(&self) -> PathBuf {
        self.out_dir.join("run.json")
    }
}
