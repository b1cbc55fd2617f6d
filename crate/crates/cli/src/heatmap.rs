//! Density heatmaps over `K`.

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::str::FromStr;

use hcf_core::estimator::DensityGrids;
use hcf_core::{Complex, Error, Result};
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// 8-bit grayscale, binary PGM.
    Pgm,
    /// Viridis colour map, binary PPM.
    Ppm,
}

impl Format {
    /// `.ppm` selects colour; anything else is grayscale.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("ppm") => Format::Ppm,
            _ => Format::Pgm,
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Pgm => "pgm",
            Format::Ppm => "ppm",
        })
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pgm" => Ok(Format::Pgm),
            "ppm" => Ok(Format::Ppm),
            other => Err(Error::Config(format!("unknown image format {other:?}"))),
        }
    }
}

/// Density at the centres of an `n x n` lattice on `K`, row major with the
/// top row at the largest imaginary part. `None` on region boundaries.
pub fn sample(dens: &DensityGrids, n: usize) -> Result<Vec<Option<f64>>> {
    let step = 1.0 / n as f64;
    (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (row, col) = (idx / n, idx % n);
            let z = Complex::new(
                -0.5 + (col as f64 + 0.5) * step,
                0.5 - (row as f64 + 0.5) * step,
            );
            match dens.density_at(&z) {
                Ok(v) => Ok(Some(v)),
                Err(Error::BoundaryPoint(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Gray levels: min..max of the sampled density mapped onto 0..255,
/// boundary pixels 0.
pub fn render(dens: &DensityGrids, n: usize) -> Result<Vec<u8>> {
    let values = sample(dens, n)?;
    let (lo, hi) = values
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = if hi > lo { hi - lo } else { 1.0 };
    Ok(values
        .iter()
        .map(|v| match v {
            Some(v) => ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8,
            None => 0,
        })
        .collect())
}

pub fn write(gray: &[u8], n: usize, format: Format, path: &Path) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    let side = u32::try_from(n).map_err(|_| Error::Config(format!("image side {n} too large")))?;
    let result = match format {
        Format::Pgm => PnmEncoder::new(file)
            .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
            .write_image(gray, side, side, ExtendedColorType::L8),
        Format::Ppm => {
            // Boundary pixels stay black rather than taking the colour of 0.
            let rgb: Vec<u8> = gray
                .iter()
                .flat_map(|&g| {
                    if g == 0 {
                        [0, 0, 0]
                    } else {
                        let c = colorous::VIRIDIS.eval_rational(g as usize, 256);
                        [c.r, c.g, c.b]
                    }
                })
                .collect();
            PnmEncoder::new(file)
                .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary))
                .write_image(&rgb, side, side, ExtendedColorType::Rgb8)
        }
    };
    result.map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}
