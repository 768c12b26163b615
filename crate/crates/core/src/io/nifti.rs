//! Single-file NIfTI-1 (`.nii`) volumes, uncompressed.
//!
//! Voxel `(i, j, k)` of the file maps to grid coordinates `[k, j, i]`, so the
//! fastest file axis is the fastest grid axis and no data is reordered.

use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{ScalarField, Shape};

const HEADER_SIZE: usize = 348;
const DATA_OFFSET: usize = 352;

const DT_UINT8: i16 = 2;
const DT_INT16: i16 = 4;
const DT_INT32: i16 = 8;
const DT_FLOAT32: i16 = 16;
const DT_FLOAT64: i16 = 64;
const DT_UINT16: i16 = 512;

/// Voxel type used when writing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VoxelType {
    U8,
    F32,
}

struct Reader<'a> {
    bytes: &'a [u8],
    big: bool,
}

impl Reader<'_> {
    fn take<const N: usize>(&self, at: usize) -> [u8; N] {
        let mut b: [u8; N] = self.bytes[at..at + N].try_into().unwrap();
        if self.big {
            b.reverse();
        }
        b
    }
    fn i16(&self, at: usize) -> i16 {
        i16::from_le_bytes(self.take(at))
    }
    fn i32(&self, at: usize) -> i32 {
        i32::from_le_bytes(self.take(at))
    }
    fn f32(&self, at: usize) -> f32 {
        f32::from_le_bytes(self.take(at))
    }
}

pub fn read(path: &Path) -> Result<ScalarField> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    decode(&bytes).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub(crate) fn decode(bytes: &[u8]) -> Result<ScalarField> {
    if bytes.len() < HEADER_SIZE {
        return Err(Error::Format("file shorter than a NIfTI-1 header".into()));
    }
    let big = match (
        i32::from_le_bytes(bytes[0..4].try_into().unwrap()),
        i32::from_be_bytes(bytes[0..4].try_into().unwrap()),
    ) {
        (348, _) => false,
        (_, 348) => true,
        _ => return Err(Error::Format("not a NIfTI-1 header".into())),
    };
    if &bytes[344..347] != b"n+1" {
        return Err(Error::Format("only single-file NIfTI-1 (n+1) is supported".into()));
    }
    let r = Reader { bytes, big };
    let rank = r.i16(40);
    if !(2..=3).contains(&rank) {
        return Err(Error::Format(format!("unsupported rank {rank}")));
    }
    let file_dims: Vec<usize> = (0..rank as usize).map(|a| r.i16(42 + 2 * a).max(0) as usize).collect();
    let file_spacing: Vec<f64> = (0..rank as usize)
        .map(|a| {
            let p = r.f32(80 + 4 * a).abs() as f64;
            if p > 0.0 && p.is_finite() {
                p
            } else {
                1.0
            }
        })
        .collect();
    let datatype = r.i16(70);
    let offset = r.f32(108) as usize;
    let slope = r.f32(112) as f64;
    let inter = r.f32(116) as f64;
    let (slope, inter) = if slope != 0.0 && slope.is_finite() {
        (slope, if inter.is_finite() { inter } else { 0.0 })
    } else {
        (1.0, 0.0)
    };

    let dims: Vec<usize> = file_dims.iter().rev().cloned().collect();
    let spacing: Vec<f64> = file_spacing.iter().rev().cloned().collect();
    let shape = Shape::with_spacing(&dims, &spacing)?;
    let n = shape.len();
    let width = match datatype {
        DT_UINT8 => 1,
        DT_INT16 | DT_UINT16 => 2,
        DT_INT32 | DT_FLOAT32 => 4,
        DT_FLOAT64 => 8,
        other => return Err(Error::Format(format!("unsupported datatype code {other}"))),
    };
    let end = offset + n * width;
    if bytes.len() < end {
        return Err(Error::Format(format!("expected {} data bytes, found {}", n * width, bytes.len().saturating_sub(offset))));
    }
    let data = Reader {
        bytes: &bytes[offset..end],
        big,
    };
    let values = (0..n)
        .map(|i| {
            let at = i * width;
            let raw = match datatype {
                DT_UINT8 => data.bytes[at] as f64,
                DT_INT16 => data.i16(at) as f64,
                DT_UINT16 => u16::from_le_bytes(data.take(at)) as f64,
                DT_INT32 => data.i32(at) as f64,
                DT_FLOAT32 => data.f32(at) as f64,
                _ => f64::from_le_bytes(data.take(at)),
            };
            raw * slope + inter
        })
        .collect();
    ScalarField::from_vec(shape, values)
}

pub fn write(path: &Path, field: &ScalarField, voxel: VoxelType) -> Result<()> {
    std::fs::write(path, encode(field, voxel)).map_err(|e| Error::io(path.display().to_string(), e))
}

pub(crate) fn encode(field: &ScalarField, voxel: VoxelType) -> Vec<u8> {
    let shape = field.shape();
    let ndim = shape.ndim();
    let (code, bitpix, width) = match voxel {
        VoxelType::U8 => (DT_UINT8, 8i16, 1),
        VoxelType::F32 => (DT_FLOAT32, 32i16, 4),
    };
    let mut h = vec![0u8; DATA_OFFSET];
    let put_i16 = |h: &mut [u8], at: usize, v: i16| h[at..at + 2].copy_from_slice(&v.to_le_bytes());
    let put_f32 = |h: &mut [u8], at: usize, v: f32| h[at..at + 4].copy_from_slice(&v.to_le_bytes());
    h[0..4].copy_from_slice(&(HEADER_SIZE as i32).to_le_bytes());
    put_i16(&mut h, 40, ndim as i16);
    for (a, &d) in shape.dims().iter().rev().enumerate() {
        put_i16(&mut h, 42 + 2 * a, d as i16);
    }
    for a in ndim..7 {
        put_i16(&mut h, 42 + 2 * a, 1);
    }
    put_i16(&mut h, 70, code);
    put_i16(&mut h, 72, bitpix);
    put_f32(&mut h, 76, 1.0);
    for (a, &s) in shape.spacing().iter().rev().enumerate() {
        put_f32(&mut h, 80 + 4 * a, s as f32);
    }
    put_f32(&mut h, 108, DATA_OFFSET as f32);
    put_f32(&mut h, 112, 1.0);
    h[123] = 2; // xyzt_units: millimetres
    h[344..348].copy_from_slice(b"n+1\0");
    h.reserve(field.values().len() * width);
    for &v in field.values() {
        match voxel {
            VoxelType::U8 => h.push(v.round().clamp(0.0, 255.0) as u8),
            VoxelType::F32 => h.extend_from_slice(&(v as f32).to_le_bytes()),
        }
    }
    h
}
