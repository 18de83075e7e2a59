//! Raw plane files: a little-endian, channel-planar, row-major payload next
//! to a JSON sidecar (`<payload>.json`) describing it. Hard labels can also
//! be read from and written to 8-bit binary PGM (`P5`).

use std::fs;
use std::path::{Path, PathBuf};

use epd_core::{HardLabelMap, ImagePlane, MultiChannelImage, SoftLabelMap};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed sidecar: {source}")]
    Sidecar {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("unknown dtype `{0}` (expected u8, i16 or f64)")]
    UnknownDtype(String),
    #[error("unknown semantic `{0}` (expected hard-label, soft-label, image-hu or image-norm)")]
    UnknownSemantic(String),
    #[error("unsupported byte order `{0}` (only little-endian)")]
    ByteOrder(String),
    #[error("dtype {dtype} cannot hold {semantic} data")]
    DtypeMismatch { dtype: &'static str, semantic: &'static str },
    #[error("payload length mismatch: expected {expected} bytes, found {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("hard labels have exactly one channel, sidecar says {0}")]
    LabelChannels(usize),
    #[error("negative class index {0}")]
    NegativeClass(i16),
    #[error("{0} classes do not fit in a 16-bit payload")]
    TooManyClasses(usize),
    #[error("PGM: {0}")]
    Pgm(String),
    #[error(transparent)]
    Invalid(#[from] epd_core::Error),
}

type Result<T, E = FormatError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    U8,
    I16,
    F64,
}

impl Dtype {
    pub fn name(self) -> &'static str {
        match self {
            Dtype::U8 => "u8",
            Dtype::I16 => "i16",
            Dtype::F64 => "f64",
        }
    }

    pub fn size(self) -> usize {
        match self {
            Dtype::U8 => 1,
            Dtype::I16 => 2,
            Dtype::F64 => 8,
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "u8" => Ok(Dtype::U8),
            "i16" => Ok(Dtype::I16),
            "f64" => Ok(Dtype::F64),
            other => Err(FormatError::UnknownDtype(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantic {
    HardLabel,
    SoftLabel,
    ImageHu,
    ImageNorm,
}

impl Semantic {
    pub fn name(self) -> &'static str {
        match self {
            Semantic::HardLabel => "hard-label",
            Semantic::SoftLabel => "soft-label",
            Semantic::ImageHu => "image-hu",
            Semantic::ImageNorm => "image-norm",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "hard-label" => Ok(Semantic::HardLabel),
            "soft-label" => Ok(Semantic::SoftLabel),
            "image-hu" => Ok(Semantic::ImageHu),
            "image-norm" => Ok(Semantic::ImageNorm),
            other => Err(FormatError::UnknownSemantic(other.to_owned())),
        }
    }
}

/// JSON sidecar. `classes` is only written for hard labels; `padding`
/// records bottom/right padding added before downsampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub height: usize,
    pub width: usize,
    pub dtype: String,
    pub channels: usize,
    pub byte_order: String,
    pub semantic: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub padding: Option<[usize; 2]>,
}

/// In-memory content of a plane file.
#[derive(Debug, Clone, PartialEq)]
pub enum Plane {
    Hard(HardLabelMap),
    Soft(SoftLabelMap),
    /// `semantic` is [`Semantic::ImageHu`] or [`Semantic::ImageNorm`].
    Image {
        semantic: Semantic,
        image: MultiChannelImage,
    },
}

impl Plane {
    pub fn semantic(&self) -> Semantic {
        match self {
            Plane::Hard(_) => Semantic::HardLabel,
            Plane::Soft(_) => Semantic::SoftLabel,
            Plane::Image { semantic, .. } => *semantic,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            Plane::Hard(l) => (l.height(), l.width()),
            Plane::Soft(s) => (s.height(), s.width()),
            Plane::Image { image, .. } => (image.height(), image.width()),
        }
    }

    pub fn image(semantic: Semantic, plane: ImagePlane) -> Self {
        Plane::Image {
            semantic,
            image: MultiChannelImage::new(vec![plane]).expect("one channel"),
        }
    }
}

/// Sidecar path for a payload path: `labels.raw` -> `labels.raw.json`.
pub fn sidecar_path(payload: &Path) -> PathBuf {
    let mut s = payload.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn is_pgm(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Loads a plane file. `path` may name the payload, its `.json` sidecar, or
/// a `.pgm` hard label.
pub fn load(path: &Path) -> Result<Plane> {
    if is_pgm(path) {
        return Ok(Plane::Hard(read_pgm(&read(path)?)?));
    }
    let payload_path = match path.to_str().and_then(|s| s.strip_suffix(".json")) {
        Some(stripped) => PathBuf::from(stripped),
        None => path.to_owned(),
    };
    let side_path = sidecar_path(&payload_path);
    let sidecar: Sidecar = serde_json::from_slice(&read(&side_path)?).map_err(|source| FormatError::Sidecar {
        path: side_path.clone(),
        source,
    })?;
    decode(&sidecar, &read(&payload_path)?)
}

/// Parses a payload according to its sidecar.
pub fn decode(sidecar: &Sidecar, payload: &[u8]) -> Result<Plane> {
    let dtype = Dtype::parse(&sidecar.dtype)?;
    let semantic = Semantic::parse(&sidecar.semantic)?;
    if sidecar.byte_order != "little-endian" {
        return Err(FormatError::ByteOrder(sidecar.byte_order.clone()));
    }
    let (h, w, ch) = (sidecar.height, sidecar.width, sidecar.channels);
    let expected = h * w * ch * dtype.size();
    if payload.len() != expected {
        return Err(FormatError::LengthMismatch {
            expected,
            actual: payload.len(),
        });
    }
    match semantic {
        Semantic::HardLabel => {
            if ch != 1 {
                return Err(FormatError::LabelChannels(ch));
            }
            let data: Vec<u16> = match dtype {
                Dtype::U8 => payload.iter().map(|&b| u16::from(b)).collect(),
                Dtype::I16 => payload
                    .chunks_exact(2)
                    .map(|b| {
                        let v = i16::from_le_bytes([b[0], b[1]]);
                        u16::try_from(v).map_err(|_| FormatError::NegativeClass(v))
                    })
                    .collect::<Result<_>>()?,
                Dtype::F64 => {
                    return Err(FormatError::DtypeMismatch {
                        dtype: dtype.name(),
                        semantic: semantic.name(),
                    })
                }
            };
            let classes = sidecar
                .classes
                .unwrap_or_else(|| data.iter().max().map_or(2, |&m| usize::from(m) + 1).max(2));
            Ok(Plane::Hard(HardLabelMap::new(h, w, classes, data)?))
        }
        Semantic::SoftLabel => {
            if dtype != Dtype::F64 {
                return Err(FormatError::DtypeMismatch {
                    dtype: dtype.name(),
                    semantic: semantic.name(),
                });
            }
            let values = decode_f64(payload);
            Ok(Plane::Soft(SoftLabelMap::from_planar(h, w, ch, &values)?))
        }
        Semantic::ImageHu | Semantic::ImageNorm => {
            let values: Vec<f64> = match dtype {
                Dtype::U8 => payload.iter().map(|&b| f64::from(b)).collect(),
                Dtype::I16 => payload
                    .chunks_exact(2)
                    .map(|b| f64::from(i16::from_le_bytes([b[0], b[1]])))
                    .collect(),
                Dtype::F64 => decode_f64(payload),
            };
            let n = h * w;
            let channels = (0..ch)
                .map(|k| ImagePlane::new(h, w, values[k * n..(k + 1) * n].to_vec()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Plane::Image {
                semantic,
                image: MultiChannelImage::new(channels)?,
            })
        }
    }
}

fn decode_f64(payload: &[u8]) -> Vec<f64> {
    payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
        .collect()
}

/// Sidecar and payload for `plane`.
pub fn encode(plane: &Plane) -> Result<(Sidecar, Vec<u8>)> {
    let (h, w) = plane.dims();
    let sidecar = |dtype: Dtype, channels, classes| Sidecar {
        height: h,
        width: w,
        dtype: dtype.name().to_owned(),
        channels,
        byte_order: "little-endian".to_owned(),
        semantic: plane.semantic().name().to_owned(),
        classes,
        padding: None,
    };
    Ok(match plane {
        Plane::Hard(l) => {
            let c = l.num_classes();
            if c <= 256 {
                let bytes = l.data().iter().map(|&v| v as u8).collect();
                (sidecar(Dtype::U8, 1, Some(c)), bytes)
            } else if c <= i16::MAX as usize + 1 {
                let bytes = l.data().iter().flat_map(|&v| (v as i16).to_le_bytes()).collect();
                (sidecar(Dtype::I16, 1, Some(c)), bytes)
            } else {
                return Err(FormatError::TooManyClasses(c));
            }
        }
        Plane::Soft(s) => {
            let bytes = s.to_planar().iter().flat_map(|v| v.to_le_bytes()).collect();
            (sidecar(Dtype::F64, s.num_classes(), None), bytes)
        }
        Plane::Image { image, .. } => {
            let bytes = image
                .channels()
                .iter()
                .flat_map(|ch| ch.data().iter().flat_map(|v| v.to_le_bytes()))
                .collect();
            (sidecar(Dtype::F64, image.channels().len(), None), bytes)
        }
    })
}

/// Writes `plane` to `path` plus its sidecar, or a PGM when `path` ends in
/// `.pgm` (hard labels only).
pub fn save(path: &Path, plane: &Plane) -> Result<()> {
    save_with_padding(path, plane, None)
}

pub fn save_with_padding(path: &Path, plane: &Plane, padding: Option<[usize; 2]>) -> Result<()> {
    if is_pgm(path) {
        return match plane {
            Plane::Hard(l) => write(path, &write_pgm(l)?),
            _ => Err(FormatError::Pgm("only hard labels can be written as PGM".into())),
        };
    }
    let (mut sidecar, payload) = encode(plane)?;
    sidecar.padding = padding;
    let mut json = serde_json::to_vec_pretty(&sidecar).expect("sidecar serializes");
    json.push(b'\n');
    write(path, &payload)?;
    write(&sidecar_path(path), &json)
}

/// Parses a binary PGM. The gray value is the class index; the class count
/// is `maxval + 1`.
pub fn read_pgm(bytes: &[u8]) -> Result<HardLabelMap> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        // whitespace and comments between header fields
        while pos < bytes.len() {
            match bytes[pos] {
                b'#' => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(FormatError::Pgm("truncated header".into()));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| FormatError::Pgm("non-ASCII header".into()))?);
    }
    if fields[0] != "P5" {
        return Err(FormatError::Pgm(format!("expected magic P5, found {}", fields[0])));
    }
    let num = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| FormatError::Pgm(format!("invalid {what} `{s}`")))
    };
    let width = num(fields[1], "width")?;
    let height = num(fields[2], "height")?;
    let maxval = num(fields[3], "maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(FormatError::Pgm(format!("maxval {maxval} is not an 8-bit value")));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let raster = bytes.get(pos..).unwrap_or_default();
    if raster.len() != width * height {
        return Err(FormatError::LengthMismatch {
            expected: width * height,
            actual: raster.len(),
        });
    }
    let data = raster.iter().map(|&b| u16::from(b)).collect();
    Ok(HardLabelMap::new(height, width, (maxval + 1).max(2), data)?)
}

/// Binary PGM with `maxval = classes - 1`.
pub fn write_pgm(label: &HardLabelMap) -> Result<Vec<u8>> {
    let c = label.num_classes();
    if c > 256 {
        return Err(FormatError::Pgm(format!("{c} classes exceed 8-bit gray levels")));
    }
    let mut out = format!("P5\n{} {}\n{}\n", label.width(), label.height(), c - 1).into_bytes();
    out.extend(label.data().iter().map(|&v| v as u8));
    Ok(out)
}
