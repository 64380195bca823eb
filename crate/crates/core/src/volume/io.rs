//! NPY (format 1.0, little-endian, C order, `f4`/`f8`, 3D) and headerless
//! raw `f32` volume files.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{voxel_count, Dims, Volume};
use crate::error::{Error, Result};

const NPY_MAGIC: &[u8] = b"\x93NUMPY";

/// On-disk layout of a volume file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeFormat {
    Npy,
    /// Little-endian `f32` samples, z fastest, with extents supplied separately.
    Raw(Dims),
}

impl VolumeFormat {
    /// Picks NPY for `.npy` files and raw otherwise, which needs `raw_dims`.
    pub fn from_path(path: &Path, raw_dims: Option<Dims>) -> Result<Self> {
        let is_npy = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("npy"));
        match (is_npy, raw_dims) {
            (true, _) => Ok(VolumeFormat::Npy),
            (false, Some(d)) => Ok(VolumeFormat::Raw(d)),
            (false, None) => Err(Error::Format(format!(
                "{} is not an .npy file and no raw dimensions were given",
                path.display()
            ))),
        }
    }
}

pub fn load_volume(path: impl AsRef<Path>, format: VolumeFormat) -> Result<Volume> {
    let bytes = fs::read(path.as_ref())?;
    match format {
        VolumeFormat::Npy => parse_npy(&bytes),
        VolumeFormat::Raw(dims) => parse_raw(&bytes, dims),
    }
}

/// Writes `v` as NPY `<f8` (lossless) or raw `f32`.
pub fn save_volume(path: impl AsRef<Path>, v: &Volume, format: VolumeFormat) -> Result<()> {
    let bytes = match format {
        VolumeFormat::Npy => encode_npy(v),
        VolumeFormat::Raw(dims) => {
            if dims != v.dims() {
                return Err(Error::size_mismatch(format!("{:?}", v.dims()), format!("{dims:?}")));
            }
            v.data().iter().flat_map(|&x| (x as f32).to_le_bytes()).collect()
        }
    };
    let mut file = fs::File::create(path.as_ref())?;
    file.write_all(&bytes)?;
    Ok(())
}

pub(crate) fn encode_npy(v: &Volume) -> Vec<u8> {
    let [a, b, c] = v.dims();
    let mut header = format!("{{'descr': '<f8', 'fortran_order': False, 'shape': ({a}, {b}, {c}), }}");
    // Magic (6) + version (2) + length (2) + header + '\n' is padded to 64 bytes.
    let unpadded = NPY_MAGIC.len() + 4 + header.len() + 1;
    header.extend(std::iter::repeat_n(' ', (64 - unpadded % 64) % 64));
    header.push('\n');

    let mut out = Vec::with_capacity(10 + header.len() + 8 * v.len());
    out.extend_from_slice(NPY_MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(header.len() as u16).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    for &x in v.data() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dtype {
    F4,
    F8,
}

impl Dtype {
    fn width(self) -> usize {
        match self {
            Dtype::F4 => 4,
            Dtype::F8 => 8,
        }
    }
}

pub(crate) fn parse_npy(bytes: &[u8]) -> Result<Volume> {
    if bytes.len() < 10 || &bytes[..6] != NPY_MAGIC {
        return Err(Error::Format("missing NPY magic string".into()));
    }
    let (header_len, header_start) = match bytes[6] {
        1 => (u16::from_le_bytes([bytes[8], bytes[9]]) as usize, 10),
        2 | 3 if bytes.len() >= 12 => (
            u32::from_le_bytes([bytes[8], bytes[9], bytes[10], bytes[11]]) as usize,
            12,
        ),
        v => return Err(Error::Format(format!("unsupported NPY version {v}"))),
    };
    let header_end = header_start + header_len;
    if bytes.len() < header_end {
        return Err(Error::Format("truncated NPY header".into()));
    }
    let header = std::str::from_utf8(&bytes[header_start..header_end])
        .map_err(|_| Error::Format("NPY header is not valid text".into()))?;
    let (dtype, dims) = parse_header(header)?;

    let payload = &bytes[header_end..];
    let expected = voxel_count(dims) * dtype.width();
    if payload.len() != expected {
        return Err(Error::size_mismatch(
            format!("{expected} payload bytes for shape {dims:?}"),
            payload.len(),
        ));
    }
    Volume::new(dims, decode(payload, dtype))
}

fn parse_raw(bytes: &[u8], dims: Dims) -> Result<Volume> {
    let expected = voxel_count(dims) * 4;
    if bytes.len() != expected {
        return Err(Error::size_mismatch(
            format!("{expected} bytes for dims {dims:?}"),
            bytes.len(),
        ));
    }
    Volume::new(dims, decode(bytes, Dtype::F4))
}

fn decode(payload: &[u8], dtype: Dtype) -> Vec<f64> {
    match dtype {
        Dtype::F4 => payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect(),
        Dtype::F8 => payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
    }
}

fn parse_header(header: &str) -> Result<(Dtype, Dims)> {
    let descr = dict_value(header, "descr")?;
    let dtype = match descr.trim().trim_matches(|c| c == '\'' || c == '"') {
        "<f4" | "f4" => Dtype::F4,
        "<f8" | "f8" => Dtype::F8,
        other => {
            return Err(Error::Format(format!(
                "unsupported dtype {other}, expected little-endian f4 or f8"
            )))
        }
    };
    match dict_value(header, "fortran_order")?.trim() {
        "False" => {}
        "True" => return Err(Error::Format("Fortran-ordered arrays are not supported".into())),
        other => return Err(Error::Format(format!("bad fortran_order value {other}"))),
    }
    let shape = dict_value(header, "shape")?;
    let inner = shape
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Format(format!("bad shape {shape}")))?;
    let extents = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::Format(format!("bad shape entry {s}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let dims: Dims = extents
        .try_into()
        .map_err(|e: Vec<usize>| Error::Format(format!("expected a 3D array, got {}D", e.len())))?;
    Ok((dtype, dims))
}

/// Extracts the raw text of `key`'s value from a Python dict literal.
fn dict_value<'a>(header: &'a str, key: &str) -> Result<&'a str> {
    let missing = || Error::Format(format!("NPY header lacks '{key}'"));
    let start = header
        .find(&format!("'{key}'"))
        .or_else(|| header.find(&format!("\"{key}\"")))
        .ok_or_else(missing)?;
    let rest = &header[start + key.len() + 2..];
    let rest = rest.trim_start().strip_prefix(':').ok_or_else(missing)?;
    let rest = rest.trim_start();
    let end = if rest.starts_with('(') {
        rest.find(')').map(|i| i + 1)
    } else {
        rest.find([',', '}'])
    }
    .ok_or_else(missing)?;
    Ok(&rest[..end])
}
