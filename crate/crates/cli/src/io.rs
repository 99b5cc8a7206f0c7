//! File formats: point clouds as CSV, images as 8-bit PNG.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use geowass::line_closed_form::RgbImage;
use geowass::PointCloud;

/// Reads one atom per row; a first line starting with `#` is a header and is skipped.
pub fn read_cloud(path: &Path) -> Result<PointCloud> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let mut data = Vec::new();
    let mut dim = None;
    for (row, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: malformed CSV", path.display()))?;
        let line = record.position().map_or(row + 1, |p| p.line() as usize);
        let d = *dim.get_or_insert(record.len());
        if record.len() != d {
            bail!("{}: line {line} has {} columns, expected {d}", path.display(), record.len());
        }
        for field in record.iter() {
            let v: f64 =
                field.parse().with_context(|| format!("{}: line {line}: {field:?} is not a number", path.display()))?;
            data.push(v);
        }
    }
    let Some(d) = dim else { bail!("{}: no data rows", path.display()) };
    PointCloud::new(data, d).with_context(|| format!("{}: invalid point cloud", path.display()))
}

pub fn write_cloud(path: &Path, cloud: &PointCloud) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    for row in cloud.rows() {
        writer.write_record(row.iter().map(|v| v.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

/// Loads a PNG as RGB in `[0, 1]`; alpha is dropped.
pub fn read_png(path: &Path) -> Result<RgbImage> {
    let img = image::open(path).with_context(|| format!("cannot read image {}", path.display()))?.to_rgb8();
    let (w, h) = img.dimensions();
    let pixels = img.pixels().map(|p| p.0.map(|c| f64::from(c) / 255.0)).collect();
    Ok(RgbImage::new(w as usize, h as usize, pixels)?)
}

pub fn write_png(path: &Path, img: &RgbImage) -> Result<()> {
    let bytes: Vec<u8> =
        img.pixels().iter().flat_map(|p| p.map(|c| (c * 255.0).round().clamp(0.0, 255.0) as u8)).collect();
    let buf = image::RgbImage::from_raw(img.width() as u32, img.height() as u32, bytes).expect("buffer size matches");
    buf.save_with_format(path, image::ImageFormat::Png).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
