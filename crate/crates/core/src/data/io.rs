//! Point-cloud and latent files.
//!
//! Text cloud: one `x y z` point per line, `#` comments, blank lines ignored.
//! Binary cloud: `PCB1`, u32 LE point count, then little-endian f32 triplets.
//! Latent text: one float per line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::autoencoder::LatentVector;
use crate::error::{Error, ParseError, Result};
use crate::metrics::{Point, PointCloud};

pub const CLOUD_MAGIC: &[u8; 4] = b"PCB1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    Text,
    Binary,
}

impl CloudFormat {
    /// `.pcb` selects binary; anything else is text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("pcb") => CloudFormat::Binary,
            _ => CloudFormat::Text,
        }
    }
}

fn parse_float(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| ParseError::Line {
        line,
        message: format!("not a number: {token:?}"),
    })?;
    if !v.is_finite() {
        return Err(ParseError::Line {
            line,
            message: format!("non-finite value {token:?}"),
        }
        .into());
    }
    Ok(v)
}

pub fn parse_cloud_text(text: &str) -> Result<PointCloud> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(ParseError::Line {
                line,
                message: format!("expected 3 coordinates, found {}", tokens.len()),
            }
            .into());
        }
        points.push([
            parse_float(tokens[0], line)?,
            parse_float(tokens[1], line)?,
            parse_float(tokens[2], line)?,
        ]);
    }
    PointCloud::new(points)
}

pub fn cloud_to_text(cloud: &PointCloud) -> String {
    let mut out = String::with_capacity(cloud.len() * 48);
    for [x, y, z] in cloud.points() {
        // `{}` on f64 prints the shortest string that parses back exactly.
        let _ = writeln!(out, "{x} {y} {z}");
    }
    out
}

pub fn parse_cloud_binary(bytes: &[u8]) -> Result<PointCloud> {
    if bytes.len() < 4 || &bytes[..4] != CLOUD_MAGIC {
        return Err(ParseError::WrongMagic {
            found: bytes[..bytes.len().min(4)].to_vec(),
            expected: CLOUD_MAGIC,
        }
        .into());
    }
    let count_bytes = bytes.get(4..8).ok_or_else(|| ParseError::Truncated {
        offset: bytes.len(),
        message: "missing point count".into(),
    })?;
    let count = u32::from_le_bytes(count_bytes.try_into().expect("4 bytes")) as usize;
    if count == 0 {
        return Err(Error::dim("binary cloud declares zero points"));
    }
    let body = &bytes[8..];
    let needed = count * 12;
    if body.len() < needed {
        return Err(ParseError::Truncated {
            offset: bytes.len(),
            message: format!("{count} points need {needed} bytes, found {}", body.len()),
        }
        .into());
    }
    if body.len() > needed {
        return Err(ParseError::TrailingData { offset: 8 + needed }.into());
    }
    let points: Vec<Point> = body
        .chunks_exact(12)
        .map(|c| {
            std::array::from_fn(|k| {
                f64::from(f32::from_le_bytes(
                    c[4 * k..4 * k + 4].try_into().expect("4 bytes"),
                ))
            })
        })
        .collect();
    PointCloud::new(points)
}

/// Encodes with coordinates rounded to f32.
pub fn cloud_to_binary(cloud: &PointCloud) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + cloud.len() * 12);
    out.extend_from_slice(CLOUD_MAGIC);
    out.extend_from_slice(&(cloud.len() as u32).to_le_bytes());
    for p in cloud.points() {
        for &c in p {
            out.extend_from_slice(&(c as f32).to_le_bytes());
        }
    }
    out
}

/// Reads either format, recognising binary by its magic bytes.
pub fn load_cloud(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(CLOUD_MAGIC) {
        parse_cloud_binary(&bytes)
    } else {
        let text = std::str::from_utf8(&bytes).map_err(|e| ParseError::Line {
            line: bytes[..e.valid_up_to()]
                .iter()
                .filter(|&&b| b == b'\n')
                .count()
                + 1,
            message: "invalid UTF-8".into(),
        })?;
        parse_cloud_text(text)
    }
}

pub fn save_cloud(cloud: &PointCloud, path: impl AsRef<Path>, format: CloudFormat) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format {
        CloudFormat::Text => cloud_to_text(cloud).into_bytes(),
        CloudFormat::Binary => cloud_to_binary(cloud),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn parse_latent_text(text: &str) -> Result<LatentVector> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        values.push(parse_float(content, i + 1)?);
    }
    LatentVector::new(values)
}

pub fn latent_to_text(z: &LatentVector) -> String {
    z.values().iter().map(|v| format!("{v}\n")).collect()
}

pub fn load_latent(path: impl AsRef<Path>) -> Result<LatentVector> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_latent_text(&text)
}

pub fn save_latent(z: &LatentVector, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, latent_to_text(z)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_parse_with_comments() {
        let cloud = parse_cloud_text("# header\n1 2 3\n\n  -0.5 1e-3 4 # trailing\n").unwrap();
        assert_eq!(cloud.points(), &[[1.0, 2.0, 3.0], [-0.5, 1e-3, 4.0]]);
    }

    #[test]
    fn text_errors_name_line() {
        let err = parse_cloud_text("1 2 3\n4 five 6\n").unwrap_err();
        assert!(
            matches!(err, Error::Parse(ParseError::Line { line: 2, .. })),
            "{err}"
        );
        let err = parse_cloud_text("1 2\n").unwrap_err();
        assert!(matches!(
            err,
            Error::Parse(ParseError::Line { line: 1, .. })
        ));
        assert!(matches!(parse_cloud_text(""), Err(Error::Dimension(_))));
        assert!(matches!(
            parse_cloud_text("# only\n\n"),
            Err(Error::Dimension(_))
        ));
        assert!(parse_cloud_text("1 2 inf\n").is_err());
    }

    #[test]
    fn text_round_trip_exact() {
        let cloud = PointCloud::new(vec![[0.1, 1.0 / 3.0, -2e-300], [1e10, -0.0, 7.0]]).unwrap();
        let back = parse_cloud_text(&cloud_to_text(&cloud)).unwrap();
        assert!(back.bitwise_eq(&cloud));
    }

    #[test]
    fn binary_errors() {
        assert!(matches!(
            parse_cloud_binary(b"PCB2\x01\0\0\0"),
            Err(Error::Parse(ParseError::WrongMagic { .. }))
        ));
        assert!(matches!(
            parse_cloud_binary(b"PCB1\x02\0\0\0\0\0\0\0"),
            Err(Error::Parse(ParseError::Truncated { .. }))
        ));
        assert!(matches!(
            parse_cloud_binary(b"PCB1\0\0\0\0"),
            Err(Error::Dimension(_))
        ));
        let mut ok = cloud_to_binary(&PointCloud::new(vec![[1.0, 2.0, 3.0]]).unwrap());
        ok.push(0);
        assert!(matches!(
            parse_cloud_binary(&ok),
            Err(Error::Parse(ParseError::TrailingData { offset: 20 }))
        ));
    }

    #[test]
    fn binary_layout() {
        let bytes = cloud_to_binary(&PointCloud::new(vec![[1.0, -2.0, 0.5]]).unwrap());
        assert_eq!(&bytes[..4], b"PCB1");
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(&bytes[8..12], &1.0f32.to_le_bytes());
        assert_eq!(bytes.len(), 20);
    }

    #[test]
    fn latent_text() {
        let z = LatentVector::new(vec![0.1, -3.25, 1e-17]).unwrap();
        let back = parse_latent_text(&latent_to_text(&z)).unwrap();
        assert!(back.bitwise_eq(&z));
        assert!(matches!(
            parse_latent_text("1.0\nabc\n"),
            Err(Error::Parse(ParseError::Line { line: 2, .. }))
        ));
        assert!(parse_latent_text("").is_err());
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(
            CloudFormat::from_path(Path::new("a/b.pcb")),
            CloudFormat::Binary
        );
        assert_eq!(
            CloudFormat::from_path(Path::new("a/b.xyz")),
            CloudFormat::Text
        );
        assert_eq!(CloudFormat::from_path(Path::new("b")), CloudFormat::Text);
    }
}
