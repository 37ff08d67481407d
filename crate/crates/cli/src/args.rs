use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latzero::synthesis::ShiftVector;

#[derive(Debug, Parser)]
#[command(name = "latzero", version, about = "Design, synthesize and analyse single-site addressing fields for optical lattices")]
pub struct Cli {
    /// Output format (default: inferred from the -o extension, else human).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the command's result to PATH instead of stdout.
    #[arg(short = 'o', long = "output", global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Suppress summaries and notes on stdout/stderr.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the Bessel coefficients that null the first M sites.
    Design(DesignArgs),
    /// Per-site crosstalk of a design, ideal or synthesized.
    Crosstalk(CrosstalkArgs),
    /// Coefficients, ideal and quantized crosstalk for M = 1..6.
    Table1(Table1Args),
    /// Waist and lens NA of the focused-Gaussian alternative.
    Gaussian(GaussianArgs),
    /// NA against normalized waist for several wavelength ratios.
    NaCurve(NaCurveArgs),
    /// Plane-wave weights equivalent to a design.
    Synth(SynthArgs),
    /// Translate a beam set's focus by a lateral shift.
    Steer(SteerArgs),
    /// Quantize weights to modulator amplitude/phase words.
    Quantize(QuantizeArgs),
    /// Render an intensity map (16-bit PGM or CSV plus JSON sidecar).
    Map(MapArgs),
    /// Predicted and measured secondary-ring diameter of a uniform ring.
    Ring(RingArgs),
}

#[derive(Debug, Clone, Args)]
pub struct LatticeArgs {
    /// Addressing wavelength, µm.
    #[arg(long, default_value_t = 0.78, value_parser = positive)]
    pub lambda: f64,

    /// Lattice wavelength, µm (site spacing is half of it).
    #[arg(long, default_value_t = 0.8, value_parser = positive)]
    pub lattice: f64,
}

/// Where the ideal field comes from.
#[derive(Debug, Clone, Args)]
pub struct DesignSource {
    #[command(flatten)]
    pub lattice: LatticeArgs,

    /// Number of nulled sites (solved on the fly).
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=16))]
    pub sites: u32,

    /// Read the design from a design file instead of solving.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["sites", "lambda", "lattice"])]
    pub design: Option<PathBuf>,
}

/// Where a plane-wave set comes from.
#[derive(Debug, Clone, Args)]
pub struct BeamSource {
    #[command(flatten)]
    pub source: DesignSource,

    /// Number of plane waves.
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(4..))]
    pub n_beams: u32,

    /// Equal weights (a plain J0 ring) instead of a design.
    #[arg(long, conflicts_with_all = ["design", "sites", "waves"])]
    pub uniform: bool,

    /// Read a wave-set file.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["design", "sites", "lambda", "n_beams", "uniform"])]
    pub waves: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,

    /// Number of nulled sites M.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=16))]
    pub sites: u32,
}

#[derive(Debug, Args)]
pub struct CrosstalkArgs {
    #[command(flatten)]
    pub source: DesignSource,

    /// Last site included in the report.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    pub m_limit: u32,

    /// Evaluate the synthesized field with this many plane waves.
    #[arg(long, value_parser = clap::value_parser!(u32).range(4..))]
    pub n_beams: Option<u32>,

    /// Quantize the synthesized weights to this bit depth (implies --n-beams 256 if unset).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=32))]
    pub bits: Option<u32>,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[command(flatten)]
    pub lattice: LatticeArgs,

    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(4..))]
    pub n_beams: u32,

    #[arg(long, default_value_t = 14, value_parser = clap::value_parser!(u32).range(1..=32))]
    pub bits: u32,

    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    pub m_limit: u32,

    /// Largest M in the table.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=16))]
    pub max_sites: u32,
}

#[derive(Debug, Args)]
pub struct GaussianArgs {
    /// Intensity fraction allowed on the neighbouring site.
    #[arg(long, default_value_t = 1e-5, value_parser = positive)]
    pub epsilon: f64,

    #[command(flatten)]
    pub lattice: LatticeArgs,

    /// Lens aperture diameter in units of the beam radius there.
    #[arg(long, default_value_t = 3.0, value_parser = positive)]
    pub aperture: f64,
}

#[derive(Debug, Args)]
pub struct NaCurveArgs {
    /// Lattice-to-addressing wavelength ratios, comma separated.
    #[arg(long, default_value = "1,2,10", value_delimiter = ',', value_parser = positive)]
    pub ratios: Vec<f64>,

    /// Normalized waist range MIN:MAX:STEP.
    #[arg(long, default_value = "0.1:1.0:0.01", value_parser = parse_range)]
    pub range: (f64, f64, f64),

    #[arg(long, default_value_t = 3.0, value_parser = positive)]
    pub aperture: f64,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub source: DesignSource,

    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(4..))]
    pub n_beams: u32,
}

#[derive(Debug, Args)]
pub struct SteerArgs {
    #[command(flatten)]
    pub beams: BeamSource,

    /// Lateral shift DX,DY in µm.
    #[arg(long, value_parser = parse_shift, allow_hyphen_values = true)]
    pub shift: ShiftVector,
}

#[derive(Debug, Args)]
pub struct QuantizeArgs {
    #[command(flatten)]
    pub beams: BeamSource,

    /// Bit depth for both amplitude and phase.
    #[arg(long, default_value_t = 14, value_parser = clap::value_parser!(u32).range(1..=32))]
    pub bits: u32,

    /// Override the amplitude bit depth.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=32))]
    pub amp_bits: Option<u32>,

    /// Override the phase bit depth.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=32))]
    pub phase_bits: Option<u32>,

    /// Also write the modulator words as CSV.
    #[arg(long, value_name = "PATH")]
    pub words: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[command(flatten)]
    pub beams: BeamSource,

    /// Render the ideal Fourier-Bessel field instead of a plane-wave sum.
    #[arg(long, conflicts_with_all = ["uniform", "waves", "bits", "shift"])]
    pub ideal: bool,

    /// Quantize the weights before rendering.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=32))]
    pub bits: Option<u32>,

    /// Steer the focus by DX,DY µm before rendering.
    #[arg(long, value_parser = parse_shift, allow_hyphen_values = true)]
    pub shift: Option<ShiftVector>,

    /// Half-width of the square map, µm.
    #[arg(long, default_value_t = 15.0, value_parser = positive)]
    pub extent: f64,

    /// Sample spacing, µm.
    #[arg(long, default_value_t = 0.05, value_parser = positive)]
    pub step: f64,

    /// Grey-level mapping.
    #[arg(long, value_enum, default_value_t = Scale::Log)]
    pub scale: Scale,

    /// Lowest relative intensity shown on the log scale.
    #[arg(long, default_value_t = latzero::raster::DEFAULT_LOG_FLOOR, value_parser = positive)]
    pub floor: f64,

    /// Image format (default: csv for a .csv output path, else pgm16).
    #[arg(long, value_parser = ["pgm16", "pgm", "csv"])]
    pub image: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Log,
    Linear,
}

#[derive(Debug, Args)]
pub struct RingArgs {
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(8..))]
    pub n_beams: u32,

    #[arg(long, default_value_t = 0.78, value_parser = positive)]
    pub lambda: f64,

    /// Ring detection threshold relative to the centre amplitude.
    #[arg(long, default_value_t = latzero::synthesis::DEFAULT_RING_THRESHOLD, value_parser = unit_interval)]
    pub threshold: f64,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive and finite, got {s}"))
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v = positive(s)?;
    if v < 1.0 {
        Ok(v)
    } else {
        Err(format!("must lie in (0, 1), got {s}"))
    }
}

fn parse_range(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [min, max, step] = parts.as_slice() else {
        return Err(format!("expected MIN:MAX:STEP, got `{s}`"));
    };
    let (min, max, step) = (positive(min)?, positive(max)?, positive(step)?);
    if max < min {
        return Err(format!("MAX ({max}) is below MIN ({min})"));
    }
    Ok((min, max, step))
}

fn parse_shift(s: &str) -> Result<ShiftVector, String> {
    let (dx, dy) = s.split_once(',').ok_or_else(|| format!("expected DX,DY, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    ShiftVector::new(parse(dx)?, parse(dy)?).map_err(|e| e.to_string())
}
