//! Binary PGM (P5) reading and writing, 8- and 16-bit.

use std::io::Write;
use std::path::Path;

use super::{ImageGrid, Shape};
use crate::error::{invalid, Error, Result};
use crate::Scalar;

struct Header {
    width: usize,
    height: usize,
    maxval: u32,
    data_offset: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        let magic = String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned();
        return Err(Error::Unsupported(format!("only binary P5 PGM is supported, found {magic:?}")));
    }
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for field in &mut fields {
        // Skip whitespace and comment lines.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while let Some(&b) = bytes.get(pos) {
                        pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                Some(_) => break,
                None => return Err(Error::Format("truncated header".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format(format!("expected a number in header at byte {start}")));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format("header number out of range".into()))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::Format("missing whitespace after maxval".into())),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::Format("zero image dimension".into()));
    }
    if maxval != 255 && maxval != 65535 {
        return Err(Error::Unsupported(format!("maxval {maxval} (expected 255 or 65535)")));
    }
    Ok(Header { width: width as usize, height: height as usize, maxval: maxval as u32, data_offset: pos })
}

/// Decodes a P5 byte stream, mapping levels to `[0, 1]` by dividing by maxval.
pub fn decode<T: Scalar>(bytes: &[u8]) -> Result<ImageGrid<T>> {
    let hdr = parse_header(bytes)?;
    let n = hdr.width * hdr.height;
    let bpp = if hdr.maxval > 255 { 2 } else { 1 };
    let payload = &bytes[hdr.data_offset..];
    if payload.len() < n * bpp {
        return Err(Error::Format(format!(
            "truncated payload: need {} bytes, found {}",
            n * bpp,
            payload.len()
        )));
    }
    let scale = T::of(hdr.maxval as f64);
    let values = (0..n)
        .map(|i| {
            let level = if bpp == 2 {
                u16::from_be_bytes([payload[2 * i], payload[2 * i + 1]]) as u32
            } else {
                payload[i] as u32
            };
            if level > hdr.maxval {
                return Err(Error::Format(format!("level {level} exceeds maxval")));
            }
            Ok(T::of(level as f64) / scale)
        })
        .collect::<Result<Vec<T>>>()?;
    ImageGrid::new(Shape::new(hdr.height, hdr.width), values)
}

/// Encodes to P5: clip to `[0, 1]`, scale, round half away from zero.
pub fn encode<T: Scalar>(img: &ImageGrid<T>, bit_depth: u8) -> Result<Vec<u8>> {
    let maxval: u32 = match bit_depth {
        8 => 255,
        16 => 65535,
        other => return invalid(format!("bit depth must be 8 or 16, got {other}")),
    };
    let mut out = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval).into_bytes();
    for &v in img.values() {
        let clipped = v.as_f64().clamp(0.0, 1.0);
        let level = (clipped * maxval as f64).round() as u32;
        if bit_depth == 16 {
            out.extend_from_slice(&(level as u16).to_be_bytes());
        } else {
            out.push(level as u8);
        }
    }
    Ok(out)
}

pub fn pgm_read<T: Scalar>(path: impl AsRef<Path>) -> Result<ImageGrid<T>> {
    decode(&std::fs::read(path)?)
}

pub fn pgm_write<T: Scalar>(img: &ImageGrid<T>, path: impl AsRef<Path>, bit_depth: u8) -> Result<()> {
    let bytes = encode(img, bit_depth)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::RngState;

    #[test]
    fn decodes_reference_bytes() {
        let mut bytes = b"P5 2 2 255\n".to_vec();
        bytes.extend_from_slice(&[0, 255, 128, 64]);
        let img: ImageGrid<f64> = decode(&bytes).unwrap();
        assert_eq!(img.values(), &[0.0, 1.0, 128.0 / 255.0, 64.0 / 255.0]);
    }

    #[test]
    fn comments_in_header() {
        let mut bytes = b"P5\n# made by hand\n1 2\n# another\n255\n".to_vec();
        bytes.extend_from_slice(&[10, 20]);
        let img: ImageGrid<f64> = decode(&bytes).unwrap();
        assert_eq!(img.shape(), Shape::new(2, 1));
    }

    #[test]
    fn ascii_variant_unsupported() {
        let err = decode::<f64>(b"P2 2 2 255\n0 1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn malformed_inputs_rejected() {
        assert!(matches!(decode::<f64>(b"P5 2 2 255\n\x00\x01"), Err(Error::Format(_))));
        assert!(matches!(decode::<f64>(b"P5 2 2 1023\n"), Err(Error::Unsupported(_))));
        assert!(matches!(decode::<f64>(b"P5 2 x 255\n"), Err(Error::Format(_))));
        assert!(matches!(decode::<f64>(b"P5 2"), Err(Error::Format(_))));
    }

    #[test]
    fn sixteen_bit_round_trip_within_quantization() {
        let shape = Shape::new(13, 17);
        let img = ImageGrid::new(shape, RngState::new(8).uniform_vec::<f64>(shape.len())).unwrap();
        let back: ImageGrid<f64> = decode(&encode(&img, 16).unwrap()).unwrap();
        for (a, b) in img.values().iter().zip(back.values()) {
            assert!((a - b).abs() <= 1.0 / 65535.0);
        }
    }

    #[test]
    fn export_clips_out_of_range() {
        let img = ImageGrid::new(Shape::new(1, 3), vec![-0.5, 0.5, 1.5]).unwrap();
        let back: ImageGrid<f64> = decode(&encode(&img, 8).unwrap()).unwrap();
        assert_eq!(back.values(), &[0.0, 128.0 / 255.0, 1.0]);
        assert!(encode(&img, 12).is_err());
    }
}
