//! Scan curves and detector rasters, with their CSV and PGM writers.
//!
//! Both writers are deterministic: identical inputs give identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version string written into every output header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// An ordered curve `(abscissa, value)` with labelled units and provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub abscissa_label: String,
    pub value_label: String,
    pub abscissa: Vec<f64>,
    pub values: Vec<f64>,
    /// Key/value pairs in insertion order.
    pub metadata: Vec<(String, String)>,
}

impl ScanResult {
    pub fn new(abscissa_label: &str, value_label: &str, abscissa: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let r = ScanResult {
            abscissa_label: abscissa_label.to_owned(),
            value_label: value_label.to_owned(),
            abscissa,
            values,
            metadata: Vec::new(),
        };
        r.validate()?;
        Ok(r)
    }

    /// Appends a metadata entry; floats are written with full precision.
    pub fn push_meta(&mut self, key: &str, value: impl MetaValue) {
        self.metadata.push((key.to_owned(), value.render()));
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }

    /// Abscissa strictly increasing, equal lengths, no NaN.
    pub fn validate(&self) -> Result<()> {
        if self.abscissa.len() != self.values.len() {
            return Err(Error::Argument(format!(
                "scan has {} abscissae but {} values",
                self.abscissa.len(),
                self.values.len()
            )));
        }
        if let Some(w) = self.abscissa.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::Argument(format!(
                "abscissa not strictly increasing at index {}",
                w + 1
            )));
        }
        if let Some(i) = self.values.iter().chain(&self.abscissa).position(|v| v.is_nan()) {
            return Err(Error::Argument(format!("NaN in scan data (entry {i})")));
        }
        Ok(())
    }

    /// Trapezoidal integral of the values over the abscissa.
    pub fn trapezoid(&self) -> f64 {
        self.abscissa
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }

    /// Abscissa of the largest value.
    pub fn argmax(&self) -> Option<f64> {
        self.values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| self.abscissa[i])
    }
}

/// Values accepted by [`ScanResult::push_meta`].
pub trait MetaValue {
    fn render(&self) -> String;
}

impl MetaValue for f64 {
    fn render(&self) -> String {
        format!("{self:.16e}")
    }
}

impl MetaValue for usize {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl MetaValue for bool {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl MetaValue for &str {
    fn render(&self) -> String {
        (*self).to_owned()
    }
}

impl MetaValue for String {
    fn render(&self) -> String {
        self.clone()
    }
}

impl MetaValue for &[f64] {
    fn render(&self) -> String {
        let parts: Vec<String> = self.iter().map(|v| v.render()).collect();
        parts.join(" ")
    }
}

/// Writes `# key = value` header lines, a column line and `x,y` rows.
pub fn write_csv(result: &ScanResult, path: &Path) -> Result<()> {
    result.validate()?;
    let mut s = String::new();
    let _ = writeln!(s, "# qsource {VERSION}");
    for (k, v) in &result.metadata {
        let _ = writeln!(s, "# {k} = {v}");
    }
    let _ = writeln!(s, "# columns: {},{}", result.abscissa_label, result.value_label);
    for (x, y) in result.abscissa.iter().zip(&result.values) {
        let _ = writeln!(s, "{x:.16e},{y:.16e}");
    }
    fs::write(path, s).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Parses a file written by [`write_csv`] (or any `#`-commented two-column CSV).
pub fn read_csv(path: &Path) -> Result<ScanResult> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut r = ScanResult {
        abscissa_label: "x".into(),
        value_label: "y".into(),
        abscissa: Vec::new(),
        values: Vec::new(),
        metadata: Vec::new(),
    };
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            let h = h.trim();
            if let Some(cols) = h.strip_prefix("columns:") {
                if let Some((a, b)) = cols.trim().split_once(',') {
                    r.abscissa_label = a.to_owned();
                    r.value_label = b.to_owned();
                }
            } else if let Some((k, v)) = h.split_once(" = ") {
                r.metadata.push((k.to_owned(), v.to_owned()));
            }
            continue;
        }
        let parse = |t: &str| -> Result<f64> {
            t.trim()
                .parse()
                .map_err(|_| Error::Argument(format!("{}:{}: cannot parse `{t}`", path.display(), n + 1)))
        };
        let mut it = line.split(',');
        let (Some(a), Some(b)) = (it.next(), it.next()) else {
            return Err(Error::Argument(format!(
                "{}:{}: expected two columns",
                path.display(),
                n + 1
            )));
        };
        r.abscissa.push(parse(a)?);
        r.values.push(parse(b)?);
    }
    r.validate()?;
    Ok(r)
}

/// Square or rectangular raster of non-negative intensities, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    /// Physical extent `[x_min, x_max, y_min, y_max]` in metres.
    pub extent: [f64; 4],
    pub data: Vec<f64>,
    pub metadata: Vec<(String, String)>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, extent: [f64; 4], data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Argument(format!(
                "raster dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::Argument(format!(
                "raster data has {} entries, expected {}",
                data.len(),
                width * height
            )));
        }
        if let Some(v) = data.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Argument(format!(
                "raster intensities must be finite and >= 0, found {v}"
            )));
        }
        Ok(RasterImage {
            width,
            height,
            extent,
            data,
            metadata: Vec::new(),
        })
    }

    pub fn push_meta(&mut self, key: &str, value: impl MetaValue) {
        self.metadata.push((key.to_owned(), value.render()));
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.data[row * self.width + col]
    }

    /// 16-bit samples after normalisation to the maximum.
    pub fn quantized(&self) -> Vec<u16> {
        let max = self.max_value();
        if max <= 0.0 {
            return vec![0; self.data.len()];
        }
        self.data
            .iter()
            .map(|v| (v / max * 65535.0).round().clamp(0.0, 65535.0) as u16)
            .collect()
    }
}

#[derive(Serialize)]
struct PgmSidecar<'a> {
    version: &'a str,
    width: usize,
    height: usize,
    extent_m: [f64; 4],
    /// Physical value of the brightest sample (65535); 0 for an all-zero image.
    normalization: f64,
    metadata: &'a [(String, String)],
}

/// Path of the JSON sidecar written next to a PGM file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.meta.json"))
}

/// Writes a binary 16-bit PGM (P5, big-endian) plus `<stem>.meta.json`.
pub fn write_pgm(image: &RasterImage, path: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let mut bytes = format!("P5\n{} {}\n65535\n", image.width, image.height).into_bytes();
    for q in image.quantized() {
        bytes.extend_from_slice(&q.to_be_bytes());
    }
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(&bytes).map_err(io)?;

    let side = PgmSidecar {
        version: VERSION,
        width: image.width,
        height: image.height,
        extent_m: image.extent,
        normalization: image.max_value(),
        metadata: &image.metadata,
    };
    let json = serde_json::to_string_pretty(&side).map_err(|e| Error::Io(e.to_string()))?;
    let sp = sidecar_path(path);
    fs::write(&sp, json + "\n").map_err(|e| Error::Io(format!("{}: {e}", sp.display())))
}

/// Reads a P5 file written by [`write_pgm`]: `(width, height, samples)`.
pub fn read_pgm(path: &Path) -> Result<(usize, usize, Vec<u16>)> {
    let bytes = fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let bad = || Error::Argument(format!("{}: not a 16-bit P5 file", path.display()));
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad());
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if fields[0] != "P5" || fields[3] != "65535" {
        return Err(bad());
    }
    let w: usize = fields[1].parse().map_err(|_| bad())?;
    let h: usize = fields[2].parse().map_err(|_| bad())?;
    let body = &bytes[pos..];
    if body.len() != 2 * w * h {
        return Err(bad());
    }
    let samples = body.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
    Ok((w, h, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_validation() {
        assert!(ScanResult::new("x", "y", vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(ScanResult::new("x", "y", vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(ScanResult::new("x", "y", vec![0.0, 1.0], vec![f64::NAN, 2.0]).is_err());
        assert!(ScanResult::new("x", "y", vec![0.0, 1.0], vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn trapezoid_and_argmax() {
        let r = ScanResult::new("x", "y", vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(r.trapezoid(), 2.0);
        assert_eq!(r.argmax(), Some(1.0));
    }

    #[test]
    fn raster_validation() {
        assert!(RasterImage::new(0, 3, [0.0; 4], vec![]).is_err());
        assert!(RasterImage::new(2, 2, [0.0; 4], vec![0.0, 1.0, -1.0, 0.0]).is_err());
        let z = RasterImage::new(2, 2, [0.0; 4], vec![0.0; 4]).unwrap();
        assert_eq!(z.quantized(), vec![0; 4]);
        let r = RasterImage::new(2, 1, [0.0; 4], vec![1.0, 0.5]).unwrap();
        assert_eq!(r.quantized(), vec![65535, 32768]);
    }

    #[test]
    fn meta_rendering_round_trips() {
        let x = 0.1f64 + 0.2;
        let s = x.render();
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }
}
