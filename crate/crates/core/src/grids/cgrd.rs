//! The CGRD binary layout.
//!
//! Little-endian throughout:
//!
//! | offset | size | field                   |
//! |--------|------|-------------------------|
//! | 0      | 4    | magic `b"CGRD"`         |
//! | 4      | 4    | version `u32 = 1`       |
//! | 8      | 4    | points per side `u32`   |
//! | 12     | 4    | reserved `u32 = 0`      |
//! | 16     | 8    | half-width `f64`        |
//! | 24     | 16n² | `(re, im)` `f64` pairs  |

use num_complex::Complex;
use thiserror::Error;

use super::{ComplexGrid, GridError, GridSpec};
use crate::scalar::Real;

pub const CGRD_MAGIC: [u8; 4] = *b"CGRD";
pub const CGRD_VERSION: u32 = 1;
pub const CGRD_HEADER_LEN: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("bad magic: expected CGRD")]
    BadMagic,
    #[error("truncated header: {0} bytes")]
    TruncatedHeader(usize),
    #[error("version mismatch: expected {CGRD_VERSION}, found {0}")]
    VersionMismatch(u32),
    #[error("payload length mismatch: expected {expected} bytes, found {found}")]
    PayloadLengthMismatch { expected: usize, found: usize },
    #[error("non-finite payload value at sample {0}")]
    NonFinite(usize),
    #[error("invalid header: {0}")]
    InvalidHeader(GridError),
}

/// Serializes a grid; samples are widened to `f64`.
pub fn write_grid<T: Real>(grid: &ComplexGrid<T>) -> Vec<u8> {
    let spec = grid.spec();
    let mut out = Vec::with_capacity(CGRD_HEADER_LEN + 16 * spec.len());
    out.extend_from_slice(&CGRD_MAGIC);
    out.extend_from_slice(&CGRD_VERSION.to_le_bytes());
    out.extend_from_slice(&(spec.n() as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&spec.half_width().wide().to_le_bytes());
    for z in grid.values() {
        out.extend_from_slice(&z.re.wide().to_le_bytes());
        out.extend_from_slice(&z.im.wide().to_le_bytes());
    }
    out
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4-byte slice"))
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

/// Parses a CGRD byte buffer.
pub fn read_grid<T: Real>(bytes: &[u8]) -> Result<ComplexGrid<T>, FormatError> {
    if bytes.len() >= 4 && bytes[..4] != CGRD_MAGIC {
        return Err(FormatError::BadMagic);
    }
    if bytes.len() < CGRD_HEADER_LEN {
        return Err(FormatError::TruncatedHeader(bytes.len()));
    }
    let version = u32_at(bytes, 4);
    if version != CGRD_VERSION {
        return Err(FormatError::VersionMismatch(version));
    }
    let n = u32_at(bytes, 8) as usize;
    let half_width = f64_at(bytes, 16);
    let spec = GridSpec::new(n, T::of(half_width)).map_err(FormatError::InvalidHeader)?;
    let payload = &bytes[CGRD_HEADER_LEN..];
    let expected = 16 * spec.len();
    if payload.len() != expected {
        return Err(FormatError::PayloadLengthMismatch { expected, found: payload.len() });
    }
    let mut values = Vec::with_capacity(spec.len());
    for (idx, chunk) in payload.chunks_exact(16).enumerate() {
        let re = T::of(f64_at(chunk, 0));
        let im = T::of(f64_at(chunk, 8));
        if !(re.is_finite() && im.is_finite()) {
            return Err(FormatError::NonFinite(idx));
        }
        values.push(Complex::new(re, im));
    }
    Ok(ComplexGrid::from_raw(spec, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec16() -> GridSpec<f64> {
        GridSpec::new(16, 1.5).unwrap()
    }

    #[test]
    fn zero_grid_size() {
        let bytes = write_grid(&ComplexGrid::zeros(spec16()));
        assert_eq!(bytes.len(), 24 + 16 * 16 * 16);
        assert_eq!(&bytes[..4], b"CGRD");
    }

    #[test]
    fn golden_header() {
        let bytes = write_grid(&ComplexGrid::constant(spec16(), Complex::new(1.0, -2.0)));
        let expected_header: [u8; 24] = [
            0x43, 0x47, 0x52, 0x44, 1, 0, 0, 0, 16, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0xf8, 0x3f,
        ];
        assert_eq!(bytes[..24], expected_header);
        assert_eq!(bytes[24..32], 1.0f64.to_le_bytes());
        assert_eq!(bytes[32..40], (-2.0f64).to_le_bytes());
    }

    #[test]
    fn distinct_errors() {
        let good = write_grid(&ComplexGrid::zeros(spec16()));

        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert_eq!(read_grid::<f64>(&bad_magic), Err(FormatError::BadMagic));

        let mut bad_version = good.clone();
        bad_version[4] = 2;
        assert_eq!(read_grid::<f64>(&bad_version), Err(FormatError::VersionMismatch(2)));

        let truncated = &good[..good.len() - 8];
        let err = read_grid::<f64>(truncated).unwrap_err();
        assert!(err.to_string().starts_with("payload length mismatch"));

        let mut nan = good.clone();
        nan[24 + 16 * 5..24 + 16 * 5 + 8].copy_from_slice(&f64::NAN.to_le_bytes());
        assert_eq!(read_grid::<f64>(&nan), Err(FormatError::NonFinite(5)));

        assert_eq!(read_grid::<f64>(&good[..10]), Err(FormatError::TruncatedHeader(10)));

        let mut bad_n = good.clone();
        bad_n[8] = 12;
        assert!(matches!(read_grid::<f64>(&bad_n), Err(FormatError::InvalidHeader(_))));
    }

    proptest! {
        #[test]
        fn roundtrip_is_bit_exact(
            log_n in 4u32..6,
            half_width in 1e-3f64..1e3,
            seed in proptest::collection::vec((-1e300f64..1e300, -1e-300f64..1e-300), 16),
        ) {
            let n = 1usize << log_n;
            let spec = GridSpec::new(n, half_width).unwrap();
            let values: Vec<_> = (0..n * n)
                .map(|i| {
                    let (a, b) = seed[i % seed.len()];
                    Complex::new(a * (i as f64 + 1.0).recip(), b + i as f64)
                })
                .collect();
            let g = ComplexGrid::from_values(spec, values).unwrap();
            let bytes = write_grid(&g);
            let back: ComplexGrid<f64> = read_grid(&bytes).unwrap();
            prop_assert_eq!(back.spec().half_width().to_bits(), half_width.to_bits());
            for (a, b) in back.values().iter().zip(g.values()) {
                prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
                prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
            prop_assert_eq!(write_grid(&back), bytes);
        }
    }
}
