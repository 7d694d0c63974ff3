//! Heatmap and frame rasters.
//!
//! Heatmaps are stored either losslessly as raw float32 (`u32` width, `u32`
//! height, then row-major values, all little-endian) or as 8-bit PGM/PNG
//! images for viewing. Frames are read from PNG or PNM and converted to
//! luminance.

use std::io::{Read, Write};
use std::path::Path;

use image::{GrayImage, Luma};

use super::{write_atomic, IoError};
use crate::baseline::GrayFrame;
use crate::heatmap::{Heatmap, RasterSize};

pub fn write_heatmap_f32<W: Write>(mut writer: W, heatmap: &Heatmap) -> Result<(), IoError> {
    let dim = |v: usize| u32::try_from(v).map_err(|_| IoError::Format("raster too large".into()));
    writer.write_all(&dim(heatmap.width())?.to_le_bytes())?;
    writer.write_all(&dim(heatmap.height())?.to_le_bytes())?;
    for v in heatmap.values() {
        writer.write_all(&(*v as f32).to_le_bytes())?;
    }
    Ok(())
}

pub fn read_heatmap_f32<R: Read>(mut reader: R) -> Result<Heatmap, IoError> {
    let mut word = [0u8; 4];
    reader.read_exact(&mut word)?;
    let width = u32::from_le_bytes(word) as usize;
    reader.read_exact(&mut word)?;
    let height = u32::from_le_bytes(word) as usize;
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() != width * height * 4 {
        return Err(IoError::Format(format!(
            "heatmap payload has {} bytes, expected {} for {width}x{height}",
            bytes.len(),
            width * height * 4
        )));
    }
    let values = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    Heatmap::from_values(RasterSize::new(width, height), values)
        .map_err(|e| IoError::Format(e.to_string()))
}

pub fn save_heatmap_f32(path: &Path, heatmap: &Heatmap) -> Result<(), IoError> {
    let mut buf = Vec::with_capacity(8 + heatmap.values().len() * 4);
    write_heatmap_f32(&mut buf, heatmap)?;
    write_atomic(path, &buf)
}

pub fn load_heatmap_f32(path: &Path) -> Result<Heatmap, IoError> {
    let bytes = std::fs::read(path).map_err(|e| IoError::file(path, e))?;
    read_heatmap_f32(bytes.as_slice())
}

fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn heatmap_to_image(heatmap: &Heatmap) -> GrayImage {
    GrayImage::from_fn(heatmap.width() as u32, heatmap.height() as u32, |x, y| {
        Luma([quantize(heatmap.get(x as usize, y as usize))])
    })
}

pub fn frame_to_image(frame: &GrayFrame) -> GrayImage {
    GrayImage::from_fn(frame.width() as u32, frame.height() as u32, |x, y| {
        Luma([quantize(frame.get(x as usize, y as usize))])
    })
}

/// Encodes as binary PGM (P5) or PNG depending on the extension of `path`.
pub fn save_gray_image(path: &Path, image: &GrayImage) -> Result<(), IoError> {
    let format = image::ImageFormat::from_path(path)?;
    let mut buf = std::io::Cursor::new(Vec::new());
    match format {
        image::ImageFormat::Pnm => {
            let encoder = image::codecs::pnm::PnmEncoder::new(&mut buf).with_subtype(
                image::codecs::pnm::PnmSubtype::Graymap(image::codecs::pnm::SampleEncoding::Binary),
            );
            image.write_with_encoder(encoder)?;
        }
        other => image.write_to(&mut buf, other)?,
    }
    write_atomic(path, buf.get_ref())
}

/// Reads an 8-bit image as a heatmap with values `v / 255`.
pub fn load_heatmap_image(path: &Path) -> Result<Heatmap, IoError> {
    let img = image::open(path)?.to_luma8();
    let values = img.pixels().map(|p| p.0[0] as f64 / 255.0).collect();
    Heatmap::from_values(
        RasterSize::new(img.width() as usize, img.height() as usize),
        values,
    )
    .map_err(|e| IoError::Format(e.to_string()))
}

/// Loads a heatmap from `.f32`, or from any supported image format.
pub fn load_heatmap(path: &Path) -> Result<Heatmap, IoError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("f32") => load_heatmap_f32(path),
        _ => load_heatmap_image(path),
    }
}

/// Reads a colour or gray image and converts it to luminance.
pub fn load_gray_frame(path: &Path) -> Result<GrayFrame, IoError> {
    let img = image::open(path)?.to_rgb8();
    GrayFrame::from_rgb8(img.width() as usize, img.height() as usize, img.as_raw())
        .map_err(|e| IoError::Format(e.to_string()))
}
