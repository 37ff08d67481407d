//! Intensity maps on a Cartesian grid, with CSV and 16-bit PGM export.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt;
use crate::Field;

/// Largest sample count per axis.
pub const MAX_AXIS_SAMPLES: usize = 16384;

/// Default floor for log-scaled exports.
pub const DEFAULT_LOG_FLOOR: f64 = 1e-8;

/// Sampling window in µm. Samples sit at `x_min + ix * step` for every
/// `ix` that stays within `x_max`, and likewise in `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, step: f64) -> Result<Self> {
        let all_finite = [x_min, x_max, y_min, y_max, step].iter().all(|v| v.is_finite());
        if !all_finite || step <= 0.0 || x_max <= x_min || y_max <= y_min {
            return Err(Error::Domain(format!(
                "invalid grid x {x_min}..{x_max}, y {y_min}..{y_max}, step {step}"
            )));
        }
        let grid = Self { x_min, x_max, y_min, y_max, step };
        let (nx, ny) = grid.dims();
        if nx > MAX_AXIS_SAMPLES || ny > MAX_AXIS_SAMPLES {
            return Err(Error::GridTooLarge { nx, ny, limit: MAX_AXIS_SAMPLES });
        }
        Ok(grid)
    }

    /// Square window `[-extent, extent]^2` centred on the origin.
    pub fn centered(extent: f64, step: f64) -> Result<Self> {
        Self::new(-extent, extent, -extent, extent, step)
    }

    pub fn dims(&self) -> (usize, usize) {
        (axis_len(self.x_min, self.x_max, self.step), axis_len(self.y_min, self.y_max, self.step))
    }
}

fn axis_len(lo: f64, hi: f64, step: f64) -> usize {
    let n = ((hi - lo) / step + 1e-9).floor();
    if n >= MAX_AXIS_SAMPLES as f64 {
        MAX_AXIS_SAMPLES + 1
    } else {
        n as usize + 1
    }
}

/// Row-major `|A|^2` samples; `values[iy * nx + ix]` is at
/// `(x_min + ix * step, y_min + iy * step)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityGrid {
    pub nx: usize,
    pub ny: usize,
    pub x_min: f64,
    pub y_min: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl IntensityGrid {
    pub fn x(&self, ix: usize) -> f64 {
        self.x_min + ix as f64 * self.step
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.y_min + iy as f64 * self.step
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `(ix, iy)` of the brightest sample; the first in row-major order wins.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        (best % self.nx, best / self.nx)
    }

    pub fn metadata(&self, format: ExportFormat, scaling: Scaling) -> GridMetadata {
        GridMetadata {
            nx: self.nx,
            ny: self.ny,
            x_min: self.x_min,
            y_min: self.y_min,
            step: self.step,
            max_intensity: self.max(),
            format: format.to_string(),
            scaling: match scaling {
                Scaling::Linear => "linear".into(),
                Scaling::Log10 { .. } => "log10".into(),
            },
            log_floor: match scaling {
                Scaling::Linear => None,
                Scaling::Log10 { floor } => Some(floor),
            },
            top_row_y: self.y(self.ny - 1),
        }
    }

    /// Rebuild a grid from `x,y,intensity` CSV rows in the order `export`
    /// writes them.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some("x,y,intensity") {
            return Err(Error::Parse("missing `x,y,intensity` header".into()));
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?;
            if fields.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected 3 fields", i + 2)));
            }
            rows.push((fields[0], fields[1], fields[2]));
        }
        if rows.is_empty() {
            return Err(Error::Parse("no samples".into()));
        }
        let (x_min, y_min) = (rows[0].0, rows[0].1);
        let nx = rows.iter().take_while(|r| r.1 == y_min).count();
        if rows.len() % nx != 0 {
            return Err(Error::Parse(format!("{} samples do not fill rows of {nx}", rows.len())));
        }
        let ny = rows.len() / nx;
        let step = if nx > 1 {
            rows[1].0 - x_min
        } else if ny > 1 {
            rows[nx].1 - y_min
        } else {
            1.0
        };
        Ok(Self { nx, ny, x_min, y_min, step, values: rows.into_iter().map(|r| r.2).collect() })
    }
}

/// Sample `|A|^2` of `field` on `grid`. Rows are computed in parallel; the
/// output does not depend on scheduling.
pub fn raster_field<F: Field + Sync + ?Sized>(field: &F, grid: &GridSpec) -> Result<IntensityGrid> {
    let grid = GridSpec::new(grid.x_min, grid.x_max, grid.y_min, grid.y_max, grid.step)?;
    let (nx, ny) = grid.dims();
    let mut values = vec![0.0; nx * ny];
    values.par_chunks_mut(nx).enumerate().for_each(|(iy, row)| {
        let y = grid.y_min + iy as f64 * grid.step;
        for (ix, v) in row.iter_mut().enumerate() {
            *v = field.intensity(grid.x_min + ix as f64 * grid.step, y);
        }
    });
    Ok(IntensityGrid { nx, ny, x_min: grid.x_min, y_min: grid.y_min, step: grid.step, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Pgm16,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "pgm16" | "pgm" => Ok(Self::Pgm16),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

impl std::fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Pgm16 => "pgm16",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scaling {
    /// `[0, max] -> [0, 65535]`.
    Linear,
    /// `[log10 floor, 0] -> [0, 65535]`, values below `floor` clamp to 0.
    Log10 { floor: f64 },
}

impl Scaling {
    pub fn log10(floor: f64) -> Result<Self> {
        if !(floor > 0.0 && floor < 1.0) {
            return Err(Error::Domain(format!("log floor must lie in (0, 1), got {floor}")));
        }
        Ok(Self::Log10 { floor })
    }
}

/// Grid geometry written next to an exported map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub nx: usize,
    pub ny: usize,
    pub x_min: f64,
    pub y_min: f64,
    pub step: f64,
    pub max_intensity: f64,
    pub format: String,
    pub scaling: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_floor: Option<f64>,
    /// `y` of the first image row in the PGM.
    pub top_row_y: f64,
}

/// Map one intensity to a 16-bit grey level.
pub fn pixel_word(value: f64, max: f64, scaling: Scaling) -> u16 {
    let unit = match scaling {
        Scaling::Linear => {
            if max > 0.0 {
                value / max
            } else {
                0.0
            }
        }
        Scaling::Log10 { floor } => {
            let lf = floor.log10();
            (value.max(floor).log10() - lf) / -lf
        }
    };
    (unit.clamp(0.0, 1.0) * 65535.0).round() as u16
}

pub fn export(grid: &IntensityGrid, format: ExportFormat, scaling: Scaling) -> Result<Vec<u8>> {
    if let Scaling::Log10 { floor } = scaling {
        Scaling::log10(floor)?;
    }
    if grid.values.len() != grid.nx * grid.ny || grid.nx == 0 {
        return Err(Error::Domain("grid dimensions do not match sample count".into()));
    }
    Ok(match format {
        ExportFormat::Csv => export_csv(grid).into_bytes(),
        ExportFormat::Pgm16 => export_pgm(grid, scaling),
    })
}

fn export_csv(grid: &IntensityGrid) -> String {
    let mut out = String::with_capacity(32 * grid.values.len() + 16);
    out.push_str("x,y,intensity\n");
    for iy in 0..grid.ny {
        let y = fmt::g(grid.y(iy), 9);
        for ix in 0..grid.nx {
            out.push_str(&fmt::g(grid.x(ix), 9));
            out.push(',');
            out.push_str(&y);
            out.push(',');
            out.push_str(&fmt::g(grid.get(ix, iy), 9));
            out.push('\n');
        }
    }
    out
}

fn export_pgm(grid: &IntensityGrid, scaling: Scaling) -> Vec<u8> {
    let header = format!("P5\n{} {}\n65535\n", grid.nx, grid.ny);
    let mut out = Vec::with_capacity(header.len() + 2 * grid.values.len());
    out.extend_from_slice(header.as_bytes());
    let max = grid.max();
    // top image row is the largest y
    for iy in (0..grid.ny).rev() {
        for ix in 0..grid.nx {
            out.extend_from_slice(&pixel_word(grid.get(ix, iy), max, scaling).to_be_bytes());
        }
    }
    out
}
