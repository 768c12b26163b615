//! Image, mask and config files.
//!
//! 2D images are grayscale PNG (8 or 16 bit, intensities scaled to `[0, 1]`);
//! 3D volumes are single-file NIfTI-1 (`.nii`) with raw intensities. A mask
//! cell is foreground when its stored value is nonzero; masks are written as
//! 0/255 PNG or 0/1 `uint8` NIfTI.

pub mod nifti;

use std::path::Path;

use image::{ImageBuffer, Luma};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{BinaryMask, ScalarField, Shape};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Png,
    Nifti,
}

fn format_of(path: &Path) -> Result<Format> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_ascii_lowercase();
    if name.ends_with(".png") {
        Ok(Format::Png)
    } else if name.ends_with(".nii") {
        Ok(Format::Nifti)
    } else {
        Err(Error::Format(format!(
            "{}: expected a .png (2D) or .nii (3D) file",
            path.display()
        )))
    }
}

/// Extension matching the grid dimension: `png` in 2D, `nii` in 3D.
pub fn extension_for(ndim: usize) -> &'static str {
    if ndim == 2 {
        "png"
    } else {
        "nii"
    }
}

/// Reads a gray-level image. PNG values are divided by the bit-depth maximum.
pub fn read_image(path: impl AsRef<Path>) -> Result<ScalarField> {
    let path = path.as_ref();
    match format_of(path)? {
        Format::Nifti => nifti::read(path),
        Format::Png => {
            let img = image::open(path)?;
            let (w, h) = (img.width() as usize, img.height() as usize);
            let shape = Shape::new(&[h, w])?;
            let values: Vec<f64> = match img {
                image::DynamicImage::ImageLuma16(buf) => {
                    buf.into_raw().into_iter().map(|v| v as f64 / 65535.0).collect()
                }
                image::DynamicImage::ImageLuma8(buf) => {
                    buf.into_raw().into_iter().map(|v| v as f64 / 255.0).collect()
                }
                other => {
                    if other.color().has_color() {
                        return Err(Error::Format(format!("{}: expected a grayscale PNG", path.display())));
                    }
                    other.into_luma16().into_raw().into_iter().map(|v| v as f64 / 65535.0).collect()
                }
            };
            ScalarField::from_vec(shape, values)
        }
    }
}

/// Reads a mask: every nonzero cell is foreground.
pub fn read_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let field = read_image(path)?;
    let values = field.values().iter().map(|&v| v != 0.0).collect();
    BinaryMask::from_vec(field.shape().clone(), values)
}

pub fn write_mask(path: impl AsRef<Path>, mask: &BinaryMask) -> Result<()> {
    let path = path.as_ref();
    match format_of(path)? {
        Format::Png => {
            let [h, w] = dims_2d(mask.shape(), path)?;
            let raw: Vec<u8> = mask.values().iter().map(|&b| if b { 255 } else { 0 }).collect();
            let buf: ImageBuffer<Luma<u8>, _> = ImageBuffer::from_raw(w as u32, h as u32, raw).unwrap();
            Ok(buf.save(path)?)
        }
        Format::Nifti => nifti::write(path, &mask.to_field(), nifti::VoxelType::U8),
    }
}

/// Writes a gray-level image. PNG output is 16-bit with values clamped to
/// `[0, 1]`; NIfTI output is `float32` with raw values.
pub fn write_image(path: impl AsRef<Path>, field: &ScalarField) -> Result<()> {
    let path = path.as_ref();
    match format_of(path)? {
        Format::Png => {
            let [h, w] = dims_2d(field.shape(), path)?;
            let raw: Vec<u16> = field
                .values()
                .iter()
                .map(|&v| (v.clamp(0.0, 1.0) * 65535.0).round() as u16)
                .collect();
            let buf: ImageBuffer<Luma<u16>, _> = ImageBuffer::from_raw(w as u32, h as u32, raw).unwrap();
            Ok(buf.save(path)?)
        }
        Format::Nifti => nifti::write(path, field, nifti::VoxelType::F32),
    }
}

fn dims_2d(shape: &Shape, path: &Path) -> Result<[usize; 2]> {
    match shape.dims() {
        &[h, w] => Ok([h, w]),
        _ => Err(Error::Format(format!("{}: PNG holds 2D images only", path.display()))),
    }
}

/// Loads a flat key-value config: JSON for `.json`, TOML otherwise. Missing
/// keys take their defaults; unknown keys are rejected.
pub fn load_config<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|message| Error::Config {
        path: path.to_path_buf(),
        message,
    })
}

/// Pretty-printed JSON followed by a newline.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SolverConfig;
    use crate::synthgen::GenParams;

    #[test]
    fn png_mask_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.png");
        let m = BinaryMask::from_fn(Shape::new(&[5, 7]).unwrap(), |c| (c[0] + 2 * c[1]) % 3 == 0);
        write_mask(&p, &m).unwrap();
        assert_eq!(read_mask(&p).unwrap(), m);
    }

    #[test]
    fn png_image_is_16_bit() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.png");
        let f = ScalarField::from_fn(Shape::new(&[4, 6]).unwrap(), |c| (c[0] * 6 + c[1]) as f64 / 23.0);
        write_image(&p, &f).unwrap();
        let back = read_image(&p).unwrap();
        assert!(back.max_abs_diff(&f) <= 0.5 / 65535.0 + 1e-12);
    }

    #[test]
    fn eight_bit_png_scales_to_unit_interval() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.png");
        let buf: ImageBuffer<Luma<u8>, _> = ImageBuffer::from_raw(3, 1, vec![0u8, 51, 255]).unwrap();
        buf.save(&p).unwrap();
        assert_eq!(read_image(&p).unwrap().values(), &[0.0, 0.2, 1.0]);
    }

    #[test]
    fn nifti_mask_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.nii");
        let m = BinaryMask::from_fn(Shape::new(&[3, 4, 5]).unwrap(), |c| c[0] == c[1] || c[2] == 4);
        write_mask(&p, &m).unwrap();
        assert_eq!(read_mask(&p).unwrap(), m);
    }

    #[test]
    fn wrong_format_or_arity() {
        let dir = tempfile::tempdir().unwrap();
        let m3 = BinaryMask::empty(Shape::new(&[2, 2, 2]).unwrap());
        assert!(matches!(write_mask(dir.path().join("a.png"), &m3), Err(Error::Format(_))));
        assert!(matches!(read_image(dir.path().join("a.tif")), Err(Error::Format(_))));
    }

    #[test]
    fn configs_from_key_value_text() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("gen.toml");
        std::fs::write(&p, "m = 3\np = 1\nC = 8.0\nseed = 7\n").unwrap();
        let g: GenParams = load_config(&p).unwrap();
        assert_eq!((g.m, g.p, g.c, g.seed), (3, 1, 8.0, 7));
        assert_eq!(g.removal_prob, GenParams::default().removal_prob);

        let q = dir.path().join("solver.json");
        std::fs::write(&q, r#"{"lambda": 0.05, "alpha": 10}"#).unwrap();
        let s: SolverConfig = load_config(&q).unwrap();
        assert_eq!((s.lambda, s.alpha), (0.05, Some(10)));

        std::fs::write(&p, "bogus = 1\n").unwrap();
        assert!(matches!(load_config::<GenParams>(&p), Err(Error::Config { .. })));
    }
}
