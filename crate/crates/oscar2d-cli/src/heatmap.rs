//! Matrix snapshots as portable graymaps, for eyeballing recovered signals
//! next to the truth.
//!
//! Zero is the visual reference: it always renders as mid-gray (128), the
//! most negative entry as black (0) and the most positive as white (255),
//! with each sign scaled linearly on its own side. That keeps sign structure
//! readable even when the two extremes differ in magnitude. A sidecar CSV
//! with the raw values is written next to the image so external tooling can
//! re-render with its own palette.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use oscar2d::DenseMatrix;

/// Longest line emitted into the PGM body; the format recommends keeping
/// lines short for maximum reader compatibility.
const MAX_LINE: usize = 70;

fn pixel(v: f64, min: f64, max: f64) -> u8 {
    if v < 0.0 {
        // min is negative here since v <= min < 0.
        (128.0 - 128.0 * (v / min)).round() as u8
    } else if v > 0.0 {
        (128.0 + 127.0 * (v / max)).round() as u8
    } else {
        128
    }
}

/// Renders the matrix as an ASCII (P2) PGM image, one pixel per entry.
pub fn render_pgm(x: &DenseMatrix) -> String {
    let (rows, cols) = x.shape();
    let min = x.data().iter().cloned().fold(0.0, f64::min);
    let max = x.data().iter().cloned().fold(0.0, f64::max);

    let mut out = format!("P2\n{cols} {rows}\n255\n");
    let mut line = String::new();
    for i in 0..rows {
        for j in 0..cols {
            let token = pixel(x[(i, j)], min, max).to_string();
            if !line.is_empty() && line.len() + 1 + token.len() > MAX_LINE {
                out.push_str(&line);
                out.push('\n');
                line.clear();
            }
            if !line.is_empty() {
                line.push(' ');
            }
            line.push_str(&token);
        }
        out.push_str(&line);
        out.push('\n');
        line.clear();
    }
    out
}

/// Writes the PGM to `path` and the raw values to a sidecar CSV with the
/// same stem; returns the sidecar path.
pub fn export_heatmap(x: &DenseMatrix, path: &Path) -> io::Result<PathBuf> {
    fs::write(path, render_pgm(x))?;
    let sidecar = path.with_extension("csv");
    x.write_csv(&sidecar)
        .map_err(|e| io::Error::other(e.to_string()))?;
    Ok(sidecar)
}
