//! Frame traces on disk.
//!
//! A trace directory holds `manifest.json` plus one file per frame. Frame
//! files are raw RGBA8888 (`.rgba`/`.raw`, row-major, bytes `R,G,B,A` per
//! pixel), binary PPM (`.ppm`, alpha 255) or PNG (`.png`, decoded to RGBA8).

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{Frame, Pixel};

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "UI")]
    Ui,
    #[serde(rename = "2D")]
    TwoD,
    #[serde(rename = "3D")]
    ThreeD,
    #[serde(rename = "synthetic")]
    Synthetic,
    #[default]
    #[serde(rename = "unknown")]
    Unknown,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Ui => "UI",
            Category::TwoD => "2D",
            Category::ThreeD => "3D",
            Category::Synthetic => "synthetic",
            Category::Unknown => "unknown",
        })
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ui" => Ok(Category::Ui),
            "2d" => Ok(Category::TwoD),
            "3d" => Ok(Category::ThreeD),
            "synthetic" => Ok(Category::Synthetic),
            "unknown" => Ok(Category::Unknown),
            other => Err(Error::Manifest(format!("unknown category {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub width: u32,
    pub height: u32,
    pub frames: Vec<String>,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub category: Category,
}

/// An ordered sequence of equally sized frames.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceTrace {
    pub name: String,
    pub category: Category,
    frames: Vec<Frame>,
}

impl SurfaceTrace {
    pub fn new(name: impl Into<String>, category: Category, frames: Vec<Frame>) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::TooFewFrames(frames.len()));
        }
        let (w, h) = (frames[0].width(), frames[0].height());
        for (i, f) in frames.iter().enumerate() {
            if f.width() != w || f.height() != h {
                return Err(Error::DimensionMismatch {
                    file: format!("#{i}"),
                    width: f.width(),
                    height: f.height(),
                    expected_width: w,
                    expected_height: h,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            category,
            frames,
        })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn width(&self) -> u32 {
        self.frames[0].width()
    }

    pub fn height(&self) -> u32 {
        self.frames[0].height()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameFormat {
    Raw,
    Ppm,
    Png,
}

impl FrameFormat {
    fn from_name(name: &str) -> Result<Self> {
        let ext = Path::new(name)
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        match ext.as_str() {
            "rgba" | "raw" => Ok(FrameFormat::Raw),
            "ppm" => Ok(FrameFormat::Ppm),
            "png" => Ok(FrameFormat::Png),
            _ => Err(Error::UnsupportedFormat(name.to_string())),
        }
    }

    fn extension(self) -> &'static str {
        match self {
            FrameFormat::Raw => "rgba",
            FrameFormat::Ppm => "ppm",
            FrameFormat::Png => "png",
        }
    }
}

pub fn load_trace(dir: impl AsRef<Path>) -> Result<SurfaceTrace> {
    let dir = dir.as_ref();
    let manifest_path = dir.join(MANIFEST);
    if !manifest_path.is_file() {
        return Err(Error::MissingManifest(manifest_path));
    }
    let manifest: Manifest = serde_json::from_slice(&fs::read(&manifest_path)?)
        .map_err(|e| Error::Manifest(e.to_string()))?;
    if manifest.width == 0 || manifest.height == 0 {
        return Err(Error::Manifest("width and height must be positive".into()));
    }
    if manifest.frames.len() < 2 {
        return Err(Error::TooFewFrames(manifest.frames.len()));
    }
    let frames = manifest
        .frames
        .iter()
        .map(|name| read_frame(&dir.join(name), name, manifest.width, manifest.height))
        .collect::<Result<Vec<_>>>()?;
    SurfaceTrace::new(manifest.name, manifest.category, frames)
}

fn read_frame(path: &Path, name: &str, width: u32, height: u32) -> Result<Frame> {
    let bytes = fs::read(path)?;
    let rgba = match FrameFormat::from_name(name)? {
        FrameFormat::Raw => bytes,
        FrameFormat::Ppm => decode_ppm(&bytes, name, width, height)?,
        FrameFormat::Png => {
            let img = image::load_from_memory_with_format(&bytes, image::ImageFormat::Png)
                .map_err(|e| Error::UnsupportedFormat(format!("{name}: {e}")))?
                .into_rgba8();
            check_dims(name, img.width(), img.height(), width, height)?;
            img.into_raw()
        }
    };
    let expected = width as usize * height as usize * 4;
    if rgba.len() != expected {
        return Err(Error::FrameSizeMismatch {
            file: name.to_string(),
            expected,
            actual: rgba.len(),
        });
    }
    let pixels = rgba
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Frame::new(width, height, pixels)
}

fn check_dims(name: &str, w: u32, h: u32, width: u32, height: u32) -> Result<()> {
    if (w, h) != (width, height) {
        return Err(Error::DimensionMismatch {
            file: name.to_string(),
            width: w,
            height: h,
            expected_width: width,
            expected_height: height,
        });
    }
    Ok(())
}

fn decode_ppm(bytes: &[u8], name: &str, width: u32, height: u32) -> Result<Vec<u8>> {
    let bad = |what: &str| Error::UnsupportedFormat(format!("{name}: {what}"));
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        // skip whitespace and comments
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header"))?);
    }
    if fields[0] != "P6" {
        return Err(bad("only binary P6 is supported"));
    }
    let parse = |s: &str| s.parse::<u32>().map_err(|_| bad("header number"));
    let (w, h, max) = (parse(fields[1])?, parse(fields[2])?, parse(fields[3])?);
    if max != 255 {
        return Err(bad("only 8-bit PPM is supported"));
    }
    check_dims(name, w, h, width, height)?;
    // exactly one whitespace byte separates the header from the raster
    let raster = bytes.get(pos + 1..).unwrap_or_default();
    let expected = width as usize * height as usize * 3;
    if raster.len() != expected {
        return Err(Error::FrameSizeMismatch {
            file: name.to_string(),
            expected,
            actual: raster.len(),
        });
    }
    Ok(raster
        .chunks_exact(3)
        .flat_map(|c| [c[0], c[1], c[2], 255])
        .collect())
}

/// Writes `trace` as a loadable directory, creating it if needed.
pub fn write_trace(trace: &SurfaceTrace, dir: impl AsRef<Path>, format: FrameFormat) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut names = Vec::with_capacity(trace.len());
    for (i, frame) in trace.frames().iter().enumerate() {
        let name = format!("frame_{i:05}.{}", format.extension());
        fs::write(dir.join(&name), encode_frame(frame, format)?)?;
        names.push(name);
    }
    let manifest = Manifest {
        width: trace.width(),
        height: trace.height(),
        frames: names,
        name: trace.name.clone(),
        category: trace.category,
    };
    let json =
        serde_json::to_string_pretty(&manifest).map_err(|e| Error::Manifest(e.to_string()))?;
    fs::write(dir.join(MANIFEST), json + "\n")?;
    Ok(())
}

pub fn frame_rgba_bytes(frame: &Frame) -> Vec<u8> {
    frame
        .pixels()
        .iter()
        .flat_map(|p| p.to_le_bytes())
        .collect()
}

fn encode_frame(frame: &Frame, format: FrameFormat) -> Result<Vec<u8>> {
    match format {
        FrameFormat::Raw => Ok(frame_rgba_bytes(frame)),
        FrameFormat::Ppm => {
            if frame
                .pixels()
                .iter()
                .any(|&p| Pixel::from_packed(p).a != 255)
            {
                return Err(Error::UnsupportedFormat("PPM cannot store alpha".into()));
            }
            let mut out = format!("P6\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
            out.extend(frame.pixels().iter().flat_map(|&p| {
                let [r, g, b, _] = Pixel::from_packed(p).channels();
                [r, g, b]
            }));
            Ok(out)
        }
        FrameFormat::Png => {
            let img =
                image::RgbaImage::from_raw(frame.width(), frame.height(), frame_rgba_bytes(frame))
                    .ok_or_else(|| Error::InvalidGeometry("png buffer".into()))?;
            let mut out = std::io::Cursor::new(Vec::new());
            img.write_to(&mut out, image::ImageFormat::Png)
                .map_err(|e| Error::UnsupportedFormat(e.to_string()))?;
            Ok(out.into_inner())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_trace(frames: usize) -> SurfaceTrace {
        let frames = (0..frames)
            .map(|t| {
                let px = (0..64)
                    .map(|i| Pixel::opaque(i as u8, t as u8, 3).packed())
                    .collect();
                Frame::new(8, 8, px).unwrap()
            })
            .collect();
        SurfaceTrace::new("tiny", Category::Synthetic, frames).unwrap()
    }

    #[test]
    fn raw_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let trace = tiny_trace(3);
        write_trace(&trace, dir.path(), FrameFormat::Raw).unwrap();
        let back = load_trace(dir.path()).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!((back.width(), back.height()), (8, 8));
        assert_eq!(back, trace);
    }

    #[test]
    fn ppm_and_png_round_trip() {
        for format in [FrameFormat::Ppm, FrameFormat::Png] {
            let dir = tempfile::tempdir().unwrap();
            let trace = tiny_trace(2);
            write_trace(&trace, dir.path(), format).unwrap();
            assert_eq!(load_trace(dir.path()).unwrap(), trace);
        }
    }

    #[test]
    fn truncated_frame_is_size_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        write_trace(&tiny_trace(3), dir.path(), FrameFormat::Raw).unwrap();
        let second = dir.path().join("frame_00001.rgba");
        let bytes = fs::read(&second).unwrap();
        fs::write(&second, &bytes[..bytes.len() - 5]).unwrap();
        assert!(matches!(
            load_trace(dir.path()),
            Err(Error::FrameSizeMismatch { .. })
        ));
    }

    #[test]
    fn missing_manifest() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_trace(dir.path()),
            Err(Error::MissingManifest(_))
        ));
    }

    #[test]
    fn too_few_frames() {
        let dir = tempfile::tempdir().unwrap();
        let m = Manifest {
            width: 8,
            height: 8,
            frames: vec!["a.rgba".into()],
            name: String::new(),
            category: Category::Unknown,
        };
        fs::write(dir.path().join(MANIFEST), serde_json::to_vec(&m).unwrap()).unwrap();
        assert!(matches!(
            load_trace(dir.path()),
            Err(Error::TooFewFrames(1))
        ));
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let a = Frame::filled(8, 8, 0).unwrap();
        let b = Frame::filled(16, 8, 0).unwrap();
        assert!(matches!(
            SurfaceTrace::new("x", Category::Unknown, vec![a, b]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mismatched_png_dimensions_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_trace(&tiny_trace(2), dir.path(), FrameFormat::Png).unwrap();
        let mut m: Manifest =
            serde_json::from_slice(&fs::read(dir.path().join(MANIFEST)).unwrap()).unwrap();
        m.width = 16;
        fs::write(dir.path().join(MANIFEST), serde_json::to_vec(&m).unwrap()).unwrap();
        assert!(matches!(
            load_trace(dir.path()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn category_names() {
        assert_eq!(serde_json::to_string(&Category::TwoD).unwrap(), "\"2D\"");
        assert_eq!("ui".parse::<Category>().unwrap(), Category::Ui);
    }
}
