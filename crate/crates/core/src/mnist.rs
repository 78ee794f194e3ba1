//! IDX (MNIST) file reading and writing.
//!
//! Files may be raw or gzip-compressed (`.gz` suffix). Layout is big-endian:
//! magic `0x00000803` / `0x00000801`, item count, then `rows, cols` for images, then payload.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

pub const TRAIN_IMAGES: &str = "train-images-idx3-ubyte";
pub const TRAIN_LABELS: &str = "train-labels-idx1-ubyte";
pub const TEST_IMAGES: &str = "t10k-images-idx3-ubyte";
pub const TEST_LABELS: &str = "t10k-labels-idx1-ubyte";

/// Images scaled to `[0, 1]` (one row per image) and their digit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct MnistSet {
    pub images: DMatrix<f64>,
    pub labels: Vec<u8>,
    pub rows: usize,
    pub cols: usize,
}

impl MnistSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// First `n` examples (or all of them when `n` is `None` or too large).
    pub fn truncate(mut self, n: Option<usize>) -> Self {
        if let Some(n) = n {
            if n < self.len() {
                self.images = self.images.rows(0, n).into_owned();
                self.labels.truncate(n);
            }
        }
        self
    }
}

struct Source {
    path: PathBuf,
    bytes: Vec<u8>,
}

impl Source {
    fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
            Box::new(GzDecoder::new(BufReader::new(file)))
        } else {
            Box::new(BufReader::new(file))
        };
        let mut bytes = Vec::new();
        reader
            .read_to_end(&mut bytes)
            .map_err(|e| Error::io(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            bytes,
        })
    }

    fn format(&self, offset: usize, reason: impl Into<String>) -> Error {
        Error::Format {
            path: self.path.clone(),
            offset: offset as u64,
            reason: reason.into(),
        }
    }

    fn u32_at(&self, offset: usize) -> Result<u32> {
        let b = self
            .bytes
            .get(offset..offset + 4)
            .ok_or_else(|| self.format(offset, "truncated header"))?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn payload(&self, offset: usize, len: usize) -> Result<&[u8]> {
        let end = offset
            .checked_add(len)
            .ok_or_else(|| self.format(offset, "payload size overflows"))?;
        if self.bytes.len() < end {
            return Err(self.format(
                self.bytes.len(),
                format!("truncated payload: expected {len} bytes from offset {offset}"),
            ));
        }
        if self.bytes.len() > end {
            return Err(self.format(end, "trailing bytes after payload"));
        }
        Ok(&self.bytes[offset..end])
    }
}

fn read_images(path: &Path) -> Result<(usize, usize, usize, Vec<u8>)> {
    let src = Source::open(path)?;
    let magic = src.u32_at(0)?;
    if magic != IMAGE_MAGIC {
        return Err(src.format(
            0,
            format!("image magic {magic:#010x}, expected {IMAGE_MAGIC:#010x}"),
        ));
    }
    let n = src.u32_at(4)? as usize;
    let rows = src.u32_at(8)? as usize;
    let cols = src.u32_at(12)? as usize;
    let len = n
        .checked_mul(rows)
        .and_then(|v| v.checked_mul(cols))
        .ok_or_else(|| src.format(4, "image dimensions overflow"))?;
    let payload = src.payload(16, len)?.to_vec();
    Ok((n, rows, cols, payload))
}

fn read_labels(path: &Path) -> Result<Vec<u8>> {
    let src = Source::open(path)?;
    let magic = src.u32_at(0)?;
    if magic != LABEL_MAGIC {
        return Err(src.format(
            0,
            format!("label magic {magic:#010x}, expected {LABEL_MAGIC:#010x}"),
        ));
    }
    let n = src.u32_at(4)? as usize;
    let payload = src.payload(8, n)?;
    if let Some(i) = payload.iter().position(|&l| l > 9) {
        return Err(Error::Range(format!(
            "label {} at byte offset {} of {}",
            payload[i],
            8 + i,
            path.display()
        )));
    }
    Ok(payload.to_vec())
}

/// Loads an image/label file pair; pixels are divided by 255.
pub fn load_mnist(image_path: &Path, label_path: &Path) -> Result<MnistSet> {
    let (n, rows, cols, pixels) = read_images(image_path)?;
    let labels = read_labels(label_path)?;
    if labels.len() != n {
        return Err(Error::Format {
            path: label_path.to_path_buf(),
            offset: 4,
            reason: format!("{} labels for {n} images", labels.len()),
        });
    }
    let width = rows * cols;
    let images = DMatrix::from_fn(n, width, |i, j| pixels[i * width + j] as f64 / 255.0);
    Ok(MnistSet {
        images,
        labels,
        rows,
        cols,
    })
}

fn resolve(dir: &Path, stem: &str) -> PathBuf {
    let raw = dir.join(stem);
    if raw.exists() {
        raw
    } else {
        dir.join(format!("{stem}.gz"))
    }
}

/// Loads the standard `train-*` / `t10k-*` pairs from a directory (raw or `.gz`).
pub fn load_mnist_dir(dir: &Path) -> Result<(MnistSet, MnistSet)> {
    let train = load_mnist(&resolve(dir, TRAIN_IMAGES), &resolve(dir, TRAIN_LABELS))?;
    let test = load_mnist(&resolve(dir, TEST_IMAGES), &resolve(dir, TEST_LABELS))?;
    Ok((train, test))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let written = if path.extension().is_some_and(|e| e == "gz") {
        let mut gz = GzEncoder::new(w, Compression::default());
        gz.write_all(bytes)
            .and_then(|_| gz.finish())
            .and_then(|mut inner| inner.flush())
    } else {
        w.write_all(bytes).and_then(|_| w.flush())
    };
    written.map_err(|e| Error::io(path, e))
}

/// Writes an IDX image file from raw bytes (`n * rows * cols` of them).
pub fn write_idx_images(path: &Path, rows: usize, cols: usize, pixels: &[u8]) -> Result<()> {
    let width = rows * cols;
    if width == 0 || !pixels.len().is_multiple_of(width) {
        return Err(Error::Dimension(format!(
            "{} bytes is not a multiple of {width}",
            pixels.len()
        )));
    }
    let mut bytes = Vec::with_capacity(16 + pixels.len());
    for h in [
        IMAGE_MAGIC,
        (pixels.len() / width) as u32,
        rows as u32,
        cols as u32,
    ] {
        bytes.extend_from_slice(&h.to_be_bytes());
    }
    bytes.extend_from_slice(pixels);
    write_bytes(path, &bytes)
}

pub fn write_idx_labels(path: &Path, labels: &[u8]) -> Result<()> {
    let mut bytes = Vec::with_capacity(8 + labels.len());
    bytes.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    bytes.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    bytes.extend_from_slice(labels);
    write_bytes(path, &bytes)
}
