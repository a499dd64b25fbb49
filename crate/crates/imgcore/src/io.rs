use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::{Image, ImageError, Result};

/// Supported on-disk encodings: 8-bit PNG and binary PPM (P6) / PGM (P5).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Ppm,
    Pgm,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()) {
            Some(ext) if ext == "png" => Ok(Self::Png),
            Some(ext) if ext == "ppm" => Ok(Self::Ppm),
            Some(ext) if ext == "pgm" => Ok(Self::Pgm),
            _ => Err(ImageError::UnsupportedFormat(path.display().to_string())),
        }
    }
}

/// Load an image, picking the decoder from the file extension.
pub fn read_image(path: &Path) -> Result<Image> {
    match ImageFormat::from_path(path)? {
        ImageFormat::Png => read_png(path),
        ImageFormat::Ppm | ImageFormat::Pgm => read_pnm(path),
    }
}

/// Write an image, picking the encoder from the file extension. PGM requires
/// a single channel, PPM three.
pub fn write_image(path: &Path, img: &Image) -> Result<()> {
    match ImageFormat::from_path(path)? {
        ImageFormat::Png => write_png(path, img),
        ImageFormat::Ppm => {
            img.require_channels(3)?;
            write_pnm(path, img)
        }
        ImageFormat::Pgm => {
            img.require_channels(1)?;
            write_pnm(path, img)
        }
    }
}

fn read_png(path: &Path) -> Result<Image> {
    let decoder = png::Decoder::new(BufReader::new(File::open(path)?));
    let mut reader = decoder.read_info().map_err(|e| ImageError::Decode(e.to_string()))?;
    let mut buf = vec![0u8; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf).map_err(|e| ImageError::Decode(e.to_string()))?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(ImageError::Decode(format!("{}: only 8-bit PNG supported", path.display())));
    }
    buf.truncate(info.buffer_size());
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => {
            return Err(ImageError::Decode(format!(
                "{}: unsupported PNG color type {other:?}",
                path.display()
            )))
        }
    };
    Image::new(info.width, info.height, channels, buf)
}

fn write_png(path: &Path, img: &Image) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    let mut encoder = png::Encoder::new(file, img.width(), img.height());
    encoder.set_color(if img.channels() == 1 {
        png::ColorType::Grayscale
    } else {
        png::ColorType::Rgb
    });
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(|e| ImageError::Decode(e.to_string()))?;
    writer
        .write_image_data(img.samples())
        .map_err(|e| ImageError::Decode(e.to_string()))?;
    Ok(())
}

fn read_pnm(path: &Path) -> Result<Image> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    let bad = |msg: &str| ImageError::Decode(format!("{}: {msg}", path.display()));

    let mut pos = 0usize;
    let mut token = |bytes: &[u8]| -> Result<String> {
        // Skip whitespace and '#' comment lines between header tokens.
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(ImageError::Decode("truncated header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    let magic = token(&bytes)?;
    let channels = match magic.as_str() {
        "P5" => 1u8,
        "P6" => 3u8,
        m => return Err(bad(&format!("unsupported PNM magic {m}"))),
    };
    let width: u32 = token(&bytes)?.parse().map_err(|_| bad("bad width"))?;
    let height: u32 = token(&bytes)?.parse().map_err(|_| bad("bad height"))?;
    let maxval: u32 = token(&bytes)?.parse().map_err(|_| bad("bad maxval"))?;
    if maxval != 255 {
        return Err(bad("only maxval 255 supported"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let expected = width as usize * height as usize * channels as usize;
    if bytes.len() < pos + expected {
        return Err(bad("raster shorter than header promises"));
    }
    Image::new(width, height, channels, bytes[pos..pos + expected].to_vec())
}

fn write_pnm(path: &Path, img: &Image) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    write!(file, "{magic}\n{} {}\n255\n", img.width(), img.height())?;
    file.write_all(img.samples())?;
    Ok(())
}
