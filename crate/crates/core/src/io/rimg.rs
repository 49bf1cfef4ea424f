//! `RIMG1` range images: magic, u32 width, u32 height, then per pixel four
//! little-endian f32 values (x, y, z, variance). Invalid pixels are NaN.

use std::path::Path;

use crate::simworld::{RangeImage, RangePoint};
use crate::{Error, Result};

const MAGIC: &[u8; 5] = b"RIMG1";

pub fn encode_rimg(image: &RangeImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(13 + image.points.len() * 16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&image.width.to_le_bytes());
    out.extend_from_slice(&image.height.to_le_bytes());
    for p in &image.points {
        let rec = if p.is_valid() {
            [p.x as f32, p.y as f32, p.z as f32, p.variance as f32]
        } else {
            [f32::NAN; 4]
        };
        for v in rec {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_rimg(bytes: &[u8]) -> Result<RangeImage> {
    if bytes.len() < 13 || &bytes[..5] != MAGIC {
        return Err(Error::format("range image", "missing RIMG1 magic"));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
    let (width, height) = (word(5), word(9));
    let count = width as usize * height as usize;
    if bytes.len() != 13 + count * 16 {
        return Err(Error::format(
            "range image",
            format!("{width}x{height} image needs {} bytes, found {}", 13 + count * 16, bytes.len()),
        ));
    }
    let float = |at: usize| f64::from(f32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")));
    let points = (0..count)
        .map(|i| {
            let at = 13 + i * 16;
            let p = RangePoint {
                x: float(at),
                y: float(at + 4),
                z: float(at + 8),
                variance: float(at + 12),
            };
            if p.is_valid() {
                p
            } else {
                RangePoint::INVALID
            }
        })
        .collect();
    Ok(RangeImage { width, height, points })
}

pub fn write_rimg(path: &Path, image: &RangeImage) -> Result<()> {
    std::fs::write(path, encode_rimg(image)).map_err(|e| Error::io(path, e))
}

pub fn read_rimg(path: &Path) -> Result<RangeImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_rimg(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut img = RangeImage::new_invalid(3, 2);
        img.points[4] = RangePoint { x: 1.5, y: -2.25, z: 0.125, variance: 1e-4 };
        let back = decode_rimg(&encode_rimg(&img)).unwrap();
        assert_eq!(back.width, 3);
        assert!(!back.points[0].is_valid());
        assert_eq!(back.points[4].x, 1.5);
        assert_eq!(back.points[4].variance, f64::from(1e-4f32));
    }

    #[test]
    fn corrupt_magic_and_length() {
        assert!(decode_rimg(b"RIMG2\0\0\0\0\0\0\0\0").is_err());
        let mut bytes = encode_rimg(&RangeImage::new_invalid(2, 2));
        bytes.pop();
        assert!(matches!(decode_rimg(&bytes), Err(Error::Format { .. })));
    }
}
