//! PNG reading and writing.

use std::path::Path;

use image::{ColorType, DynamicImage, ImageBuffer, Luma, Rgb};
use spotseg_core::{GrayImage, LabelMask, RgbImage};

use crate::error::{Error, Result};

fn open(path: &Path) -> Result<DynamicImage> {
    let img = image::open(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })?;
    match img.color() {
        ColorType::L8 | ColorType::La8 | ColorType::Rgb8 | ColorType::Rgba8 => Ok(img),
        other => Err(Error::Format {
            path: path.to_path_buf(),
            reason: format!("unsupported pixel format {other:?}, expected 8-bit"),
        }),
    }
}

/// Loads an 8-bit PNG as RGB. Gray inputs are replicated, alpha is dropped.
pub fn load_rgb(path: &Path) -> Result<RgbImage> {
    let buf = open(path)?.into_rgb8();
    let (w, h) = (buf.width() as usize, buf.height() as usize);
    let data = buf.pixels().map(|p| p.0).collect();
    RgbImage::new(w, h, data).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

pub fn load_gray(path: &Path) -> Result<GrayImage> {
    let buf = open(path)?.into_luma8();
    let (w, h) = (buf.width() as usize, buf.height() as usize);
    GrayImage::new(w, h, buf.into_raw()).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Reads a mask; values above 127 are foreground.
pub fn load_mask(path: &Path) -> Result<LabelMask> {
    Ok(load_gray(path)?.map(|&v| v > 127))
}

pub fn save_rgb(path: &Path, img: &RgbImage) -> Result<()> {
    let raw: Vec<u8> = img.as_slice().iter().flatten().copied().collect();
    let buf: ImageBuffer<Rgb<u8>, _> =
        ImageBuffer::from_raw(img.width() as u32, img.height() as u32, raw)
            .expect("buffer matches dims");
    buf.save(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_gray(path: &Path, img: &GrayImage) -> Result<()> {
    let buf: ImageBuffer<Luma<u8>, _> = ImageBuffer::from_raw(
        img.width() as u32,
        img.height() as u32,
        img.as_slice().to_vec(),
    )
    .expect("buffer matches dims");
    buf.save(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes a mask as a {0, 255} single-channel PNG.
pub fn save_mask(path: &Path, mask: &LabelMask) -> Result<()> {
    save_gray(path, &mask.map(|&b| if b { 255 } else { 0 }))
}
