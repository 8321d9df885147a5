use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fracdyn::population::{Period, PiecewiseModel};
use fracdyn::raster::{self, BinaryRaster, GrayRaster, PgmFormat, Polarity};
use serde::Serialize;

use crate::{PolarityArg, Threshold};

/// Resolves an output path against the output directory, creating parents.
pub fn output_path(out_dir: &Path, path: &Path) -> Result<PathBuf> {
    let full = if path.is_absolute() {
        path.to_path_buf()
    } else {
        out_dir.join(path)
    };
    if let Some(parent) = full.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .with_context(|| format!("cannot create directory {}", parent.display()))?;
    }
    Ok(full)
}

/// Loads a PGM or PNG; decode errors are tagged with the path.
pub fn load_gray(path: &Path) -> Result<GrayRaster> {
    raster::load_gray(path).map_err(|e| match e {
        fracdyn::Error::Io { .. } => anyhow::Error::new(e),
        other => anyhow::Error::new(other).context(format!("decoding {}", path.display())),
    })
}

pub fn load_binary(path: &Path, opts: &Threshold) -> Result<BinaryRaster> {
    let gray = load_gray(path)?;
    binarize(&gray, opts).with_context(|| format!("binarizing {}", path.display()))
}

pub fn binarize(gray: &GrayRaster, opts: &Threshold) -> Result<BinaryRaster> {
    let polarity = match opts.polarity {
        PolarityArg::Light => Polarity::LightIsOccupied,
        PolarityArg::Dark => Polarity::DarkIsOccupied,
    };
    let threshold = match opts.threshold {
        Some(t) => t,
        None if gray.samples().iter().all(|&v| v == 0 || v == 255) => 128,
        None => bail!("image has intermediate gray levels; pass --threshold"),
    };
    Ok(raster::binarize(gray, threshold, polarity))
}

pub fn write_pgm(path: &Path, gray: &GrayRaster, plain: bool) -> Result<()> {
    let format = if plain { PgmFormat::Plain } else { PgmFormat::Raw };
    raster::write_pgm(path, gray, format)?;
    Ok(())
}

/// Reads a two-column numeric CSV with a header row.
pub fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, record) in reader.deserialize::<(f64, f64)>().enumerate() {
        // +2: one for the header, one for 1-based line numbers
        let row = record.with_context(|| format!("{} line {}", path.display(), i + 2))?;
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, serde::Deserialize)]
pub struct ManifestRow {
    pub year: f64,
    pub path: PathBuf,
}

/// Manifest rows with paths resolved against the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read manifest {}", path.display()))?;
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["year", "path"] {
        bail!("manifest {} must have header `year,path`", path.display());
    }
    let mut rows = Vec::new();
    for (i, record) in reader.deserialize::<ManifestRow>().enumerate() {
        let mut row = record.with_context(|| format!("{} line {}", path.display(), i + 2))?;
        if row.path.is_relative() {
            row.path = base.join(&row.path);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("manifest {} lists no images", path.display());
    }
    Ok(rows)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
}

pub fn read_periods(path: &Path) -> Result<Vec<Period>> {
    read_json(path)
}

pub fn read_model(path: &Path) -> Result<PiecewiseModel> {
    read_json(path)
}

pub fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut writer =
        csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
