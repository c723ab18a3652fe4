//! Reader and writer for IDX image containers (the MNIST image format):
//! big-endian magic `0x00000803`, then count, rows and cols as big-endian
//! `u32`, then `count * rows * cols` unsigned bytes.

use ndarray::{Array2, Axis};

use crate::error::IdxError;
use crate::scalar::Scalar;

pub const IDX_IMAGE_MAGIC: u32 = 0x0000_0803;
const HEADER_LEN: usize = 16;

/// Images as rows of pixels scaled into `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageDataset<T> {
    images: Array2<T>,
    rows: usize,
    cols: usize,
}

impl<T: Scalar> ImageDataset<T> {
    /// Builds a dataset from raw 8-bit pixels, `count * rows * cols` of them.
    pub fn from_bytes(count: usize, rows: usize, cols: usize, pixels: &[u8]) -> Self {
        assert_eq!(pixels.len(), count * rows * cols, "pixel buffer size");
        let scale = T::one() / T::lit(255.0);
        let images = Array2::from_shape_fn((count, rows * cols), |(i, j)| {
            T::lit(f64::from(pixels[i * rows * cols + j])) * scale
        });
        ImageDataset { images, rows, cols }
    }

    pub fn images(&self) -> &Array2<T> {
        &self.images
    }

    pub fn count(&self) -> usize {
        self.images.nrows()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixel_dim(&self) -> usize {
        self.rows * self.cols
    }

    /// Copies the selected images into a `len x pixel_dim` batch.
    pub fn batch(&self, indices: &[usize]) -> Array2<T> {
        self.images.select(Axis(0), indices)
    }

    /// Keeps only the first `n` images.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.count());
        ImageDataset {
            images: self.images.slice(ndarray::s![..n, ..]).to_owned(),
            rows: self.rows,
            cols: self.cols,
        }
    }
}

fn read_u32(bytes: &[u8], offset: usize) -> u32 {
    u32::from_be_bytes(bytes[offset..offset + 4].try_into().expect("4-byte slice"))
}

pub fn parse_idx_images<T: Scalar>(bytes: &[u8]) -> Result<ImageDataset<T>, IdxError> {
    if bytes.len() >= 4 {
        let magic = read_u32(bytes, 0);
        if magic != IDX_IMAGE_MAGIC {
            return Err(IdxError::BadMagic { found: magic });
        }
    }
    if bytes.len() < HEADER_LEN {
        return Err(IdxError::Truncated {
            offset: bytes.len(),
            detail: format!("header needs {HEADER_LEN} bytes"),
        });
    }
    let count = read_u32(bytes, 4) as usize;
    let rows = read_u32(bytes, 8) as usize;
    let cols = read_u32(bytes, 12) as usize;
    let expected = count
        .checked_mul(rows)
        .and_then(|n| n.checked_mul(cols))
        .ok_or_else(|| IdxError::Truncated {
            offset: HEADER_LEN,
            detail: format!("{count}x{rows}x{cols} payload does not fit in memory"),
        })?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() < expected {
        return Err(IdxError::Truncated {
            offset: bytes.len(),
            detail: format!("expected {expected} pixel bytes, found {}", payload.len()),
        });
    }
    if payload.len() > expected {
        return Err(IdxError::TrailingBytes {
            offset: HEADER_LEN + expected,
            extra: payload.len() - expected,
        });
    }
    Ok(ImageDataset::from_bytes(count, rows, cols, payload))
}

/// Serialises a dataset, quantising each pixel back to `round(255 p)`.
pub fn write_idx_images<T: Scalar>(data: &ImageDataset<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + data.images.len());
    for word in [IDX_IMAGE_MAGIC, data.count() as u32, data.rows as u32, data.cols as u32] {
        out.extend_from_slice(&word.to_be_bytes());
    }
    let full = T::lit(255.0);
    out.extend(data.images.iter().map(|&p| {
        (p * full)
            .round()
            .max(T::zero())
            .min(full)
            .to_u8()
            .expect("pixel in byte range")
    }));
    out
}
