//! Binary PGM (P5) images, 8 or 16 bit. Row 0 is the image top, which is the
//! maximum-y edge of the map.

use std::path::Path;

use crate::detector::{LandingClass, LandingMap};
use crate::{Error, Result};

pub fn encode_pgm8(width: usize, height: usize, pixels: &[u8], comment: Option<&str>) -> Vec<u8> {
    let mut out = header(width, height, 255, comment);
    out.extend_from_slice(pixels);
    out
}

pub fn encode_pgm16(width: usize, height: usize, pixels: &[u16], comment: Option<&str>) -> Vec<u8> {
    let mut out = header(width, height, 65535, comment);
    for p in pixels {
        out.extend_from_slice(&p.to_be_bytes());
    }
    out
}

fn header(width: usize, height: usize, maxval: u32, comment: Option<&str>) -> Vec<u8> {
    let mut h = String::from("P5\n");
    if let Some(c) = comment {
        for line in c.lines() {
            h.push_str("# ");
            h.push_str(line);
            h.push('\n');
        }
    }
    h.push_str(&format!("{width} {height}\n{maxval}\n"));
    h.into_bytes()
}

/// Decodes an 8-bit P5 image into `(width, height, pixels)`.
pub fn decode_pgm8(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let mut pos = 0;
    let mut tokens = Vec::new();
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format("PGM", "truncated header"));
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if tokens[0] != "P5" || tokens[3] != "255" {
        return Err(Error::format("PGM", "expected an 8-bit P5 image"));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|e| Error::format("PGM", e.to_string()));
    let (w, h) = (parse(&tokens[1])?, parse(&tokens[2])?);
    if bytes.len() < pos + w * h {
        return Err(Error::format("PGM", "truncated pixel data"));
    }
    Ok((w, h, bytes[pos..pos + w * h].to_vec()))
}

/// Flips a row-major grid with row 0 at minimum y into image order.
pub(crate) fn to_image_rows<T: Copy>(n: usize, grid: &[T]) -> Vec<T> {
    (0..n).rev().flat_map(|r| grid[r * n..(r + 1) * n].iter().copied()).collect()
}

pub fn write_landing_pgm(path: &Path, map: &LandingMap) -> Result<()> {
    let codes: Vec<u8> = map.classes.iter().map(|c| c.code()).collect();
    let comment = "landing classes: SAFE=255 HAZARD=64 UNKNOWN=128 BORDER=192 NO_DATA=0";
    let bytes = encode_pgm8(map.cells, map.cells, &to_image_rows(map.cells, &codes), Some(comment));
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Reads landing classes back in map row order.
pub fn read_landing_pgm(path: &Path) -> Result<(usize, Vec<LandingClass>)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let (w, h, px) = decode_pgm8(&bytes)?;
    if w != h {
        return Err(Error::format("landing map", "image must be square"));
    }
    let rows = to_image_rows(w, &px);
    let classes = rows
        .into_iter()
        .map(|c| LandingClass::from_code(c).ok_or_else(|| Error::format("landing map", format!("unknown class code {c}"))))
        .collect::<Result<_>>()?;
    Ok((w, classes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm8_round_trip() {
        let px = vec![0u8, 64, 128, 192, 255, 7];
        let bytes = encode_pgm8(3, 2, &px, Some("hello\nworld"));
        assert_eq!(decode_pgm8(&bytes).unwrap(), (3, 2, px));
    }

    #[test]
    fn pgm16_is_big_endian() {
        let bytes = encode_pgm16(1, 1, &[0x0102], None);
        assert_eq!(&bytes[bytes.len() - 2..], &[1, 2]);
    }
}
