use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::generate::mask_files;
use super::{sibling, EvaluateArgs, Outcome, Plan};
use crate::error::{Error, Result};
use crate::io;
use crate::metrics::{evaluate, MetricsReport, CSV_HEADER};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluatePlan {
    /// `(name, prediction, annotation)` triples.
    pub pairs: Vec<(String, PathBuf, PathBuf)>,
    pub roi: Option<PathBuf>,
    pub postprocess: bool,
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluateSummary {
    pub reports: Vec<MetricsReport>,
}

fn stem(path: &std::path::Path) -> String {
    let s = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
    s.strip_suffix(".nii").unwrap_or(s).to_string()
}

impl EvaluatePlan {
    pub fn from_args(args: EvaluateArgs) -> Result<Self> {
        let pairs = match (args.pred, args.gt, args.pred_dir, args.gt_dir) {
            (Some(p), Some(g), None, None) => vec![(stem(&p), p, g)],
            (None, None, Some(pd), Some(gd)) => {
                let mut pairs = Vec::new();
                for p in mask_files(&pd)? {
                    let name = p.file_name().unwrap().to_owned();
                    let g = gd.join(&name);
                    if !g.is_file() {
                        return Err(Error::invalid(format!("no annotation {} for {}", g.display(), p.display())));
                    }
                    pairs.push((stem(&p), p, g));
                }
                if pairs.is_empty() {
                    return Err(Error::invalid(format!("no masks in {}", pd.display())));
                }
                pairs
            }
            _ => return Err(Error::invalid("give --pred and --gt, or --pred-dir and --gt-dir")),
        };
        Ok(Self {
            pairs,
            roi: args.roi,
            postprocess: args.postprocess,
            out: args.out,
        })
    }

    pub fn reports(&self) -> Result<Vec<MetricsReport>> {
        let roi = self.roi.as_ref().map(io::read_mask).transpose()?;
        self.pairs
            .iter()
            .map(|(name, p, g)| evaluate(name, &io::read_mask(p)?, &io::read_mask(g)?, roi.as_ref(), self.postprocess))
            .collect()
    }
}

impl Plan for EvaluatePlan {
    const COMMAND: &'static str = "evaluate";

    fn execute(&self) -> Result<Outcome> {
        let reports = self.reports()?;
        let mut csv = String::from(CSV_HEADER);
        csv.push('\n');
        for r in &reports {
            csv.push_str(&r.csv_row());
            csv.push('\n');
        }
        std::fs::write(&self.out, csv).map_err(|e| Error::io(self.out.display().to_string(), e))?;
        let json = sibling(&self.out, "json");
        io::write_json(&json, &EvaluateSummary { reports })?;
        let mut inputs: Vec<PathBuf> = self.pairs.iter().flat_map(|(_, p, g)| [p.clone(), g.clone()]).collect();
        inputs.extend(self.roi.clone());
        Ok(Outcome {
            inputs,
            outputs: vec![self.out.clone(), json],
            seed: None,
        })
    }

    fn manifest_path(&self) -> PathBuf {
        sibling(&self.out, "run.json")
    }
}
