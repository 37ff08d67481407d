use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Result};
use latzero::design::{solve_design, CrosstalkReport, FourierBesselDesign, LatticeSpec};
use latzero::fmt::g;
use latzero::gaussian::{na_curve, na_curve_csv, AddressingScenario, SampleRange};
use latzero::raster::{export, raster_field, ExportFormat, GridSpec, Scaling};
use latzero::synthesis::{slm_words_csv, synthesize_waves, PlaneWaveSet, QuantizationSpec};
use latzero::Field;
use serde::Serialize;

use crate::args::*;
use crate::output::{read_file, write_file, Output};
use crate::UsageError;

/// Shortest decimal that parses back to the same `f64`.
fn full(v: f64) -> String {
    if v == 0.0 || !v.is_finite() || (1e-4..1e16).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl LatticeArgs {
    fn spec(&self) -> Result<LatticeSpec> {
        Ok(LatticeSpec::new(self.lambda, self.lattice)?)
    }
}

impl DesignSource {
    fn resolve(&self) -> Result<FourierBesselDesign> {
        match &self.design {
            Some(path) => Ok(FourierBesselDesign::from_json(&read_file(path)?)?),
            None => Ok(solve_design(self.lattice.spec()?, self.sites as usize)?),
        }
    }
}

impl BeamSource {
    fn resolve(&self) -> Result<PlaneWaveSet> {
        let n = self.n_beams as usize;
        if let Some(path) = &self.waves {
            Ok(PlaneWaveSet::from_json(&read_file(path)?)?)
        } else if self.uniform {
            Ok(PlaneWaveSet::uniform(TAU / self.source.lattice.lambda, n)?)
        } else {
            Ok(synthesize_waves(&self.source.resolve()?, n)?)
        }
    }
}

/// Write `file` to `-o` (if any) and report `render` in the appropriate place.
fn artifact(out: &Output, file: &[u8], render: impl Fn(Format) -> String) -> Result<()> {
    match &out.path {
        Some(path) => {
            write_file(path, file)?;
            out.summary(&render(out.summary_format()))
        }
        None => out.emit(&render(out.format)),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn design(args: &DesignArgs, out: &Output) -> Result<()> {
    let d = solve_design(args.lattice.spec()?, args.sites as usize)?;
    let file = d.to_json();
    artifact(out, file.as_bytes(), |format| match format {
        Format::Human => {
            let mut s = format!(
                "M = {}, lambda = {} um, lambda_f = {} um\n",
                d.m_sites(),
                g(d.lattice().lambda(), 6),
                g(d.lattice().lambda_f(), 6)
            );
            for (i, a) in d.coefficients().iter().enumerate() {
                let _ = writeln!(s, "a{:<3}= {}", 2 * (i + 1), g(*a, 6));
            }
            let _ = writeln!(s, "max |A| on sites 1..{} = {}", d.m_sites(), g(d.residual_max(), 3));
            s
        }
        Format::Csv => {
            let mut s = String::from("order,coefficient\n");
            for (i, a) in d.coefficients().iter().enumerate() {
                let _ = writeln!(s, "{},{}", 2 * (i + 1), full(*a));
            }
            s
        }
        Format::Json => file.clone(),
    })
}

pub fn crosstalk(args: &CrosstalkArgs, out: &Output) -> Result<()> {
    let d = args.source.resolve()?;
    let m_limit = args.m_limit as usize;
    let (report, label) = if args.n_beams.is_some() || args.bits.is_some() {
        let n = args.n_beams.unwrap_or(256) as usize;
        let mut waves = synthesize_waves(&d, n)?;
        let mut label = format!("synthesized, N = {n}");
        if let Some(bits) = args.bits {
            waves = waves.quantize(QuantizationSpec::uniform(bits)?)?;
            let _ = write!(label, ", {bits}-bit");
        }
        (waves.lattice_crosstalk(d.lattice(), m_limit)?, label)
    } else {
        (d.crosstalk_report(m_limit)?, "ideal".to_string())
    };
    out.emit(&render_crosstalk(&report, &label, out.format))
}

fn render_crosstalk(r: &CrosstalkReport, label: &str, format: Format) -> String {
    match format {
        Format::Human => {
            let mut s = format!(
                "{label}: max |A|^2 = {} at site m = {} (sites 1..{})\n  m  |A|^2\n",
                g(r.max_intensity, 3),
                r.m_max,
                r.site_intensity.len()
            );
            for (i, v) in r.site_intensity.iter().enumerate() {
                let _ = writeln!(s, "{:>3}  {}", i + 1, g(*v, 3));
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("m,intensity\n");
            for (i, v) in r.site_intensity.iter().enumerate() {
                let _ = writeln!(s, "{},{}", i + 1, full(*v));
            }
            s
        }
        Format::Json => json(r),
    }
}

#[derive(Serialize)]
struct Table1Column {
    m_sites: usize,
    coefficients: Vec<f64>,
    max_intensity: f64,
    m_max: usize,
    quantized_max_intensity: f64,
    quantized_m_max: usize,
}

pub fn table1(args: &Table1Args, out: &Output) -> Result<()> {
    let lattice = args.lattice.spec()?;
    let spec = QuantizationSpec::uniform(args.bits)?;
    let m_limit = args.m_limit as usize;
    let mut cols = Vec::new();
    for m in 1..=args.max_sites as usize {
        let d = solve_design(lattice, m)?;
        let ideal = d.crosstalk_report(m_limit)?;
        let quantized = synthesize_waves(&d, args.n_beams as usize)?
            .quantize(spec)?
            .lattice_crosstalk(&lattice, m_limit)?;
        cols.push(Table1Column {
            m_sites: m,
            coefficients: d.coefficients().to_vec(),
            max_intensity: ideal.max_intensity,
            m_max: ideal.m_max,
            quantized_max_intensity: quantized.max_intensity,
            quantized_m_max: quantized.m_max,
        });
    }

    let text = match out.format {
        Format::Json => json(&cols),
        Format::Csv => {
            let mut s = String::from("quantity");
            for c in &cols {
                let _ = write!(s, ",M{}", c.m_sites);
            }
            s.push('\n');
            table_rows(&cols, args, full, &mut |label, cells| {
                let _ = writeln!(s, "{label},{}", cells.join(","));
            });
            s
        }
        Format::Human => {
            let quant = format!("max|A|^2 {}-bit N={}", args.bits, args.n_beams);
            let width = quant.len().max(12);
            let mut s = format!("{:<width$}", "");
            for c in &cols {
                let _ = write!(s, "{:>11}", format!("M={}", c.m_sites));
            }
            s.push('\n');
            table_rows(&cols, args, |v| g(v, 3), &mut |label, cells| {
                let _ = write!(s, "{label:<width$}");
                for c in cells {
                    let _ = write!(s, "{c:>11}");
                }
                s.push('\n');
            });
            s
        }
    };
    out.emit(&text)
}

fn table_rows(
    cols: &[Table1Column],
    args: &Table1Args,
    num: impl Fn(f64) -> String,
    row: &mut dyn FnMut(&str, Vec<String>),
) {
    let depth = cols.iter().map(|c| c.m_sites).max().unwrap_or(0);
    for n in 0..depth {
        let cells = cols.iter().map(|c| c.coefficients.get(n).map(|&a| num(a)).unwrap_or_default()).collect();
        row(&format!("a{}", 2 * (n + 1)), cells);
    }
    row("max|A|^2", cols.iter().map(|c| num(c.max_intensity)).collect());
    row("m_max", cols.iter().map(|c| c.m_max.to_string()).collect());
    let label = format!("max|A|^2 {}-bit N={}", args.bits, args.n_beams);
    row(&label, cols.iter().map(|c| num(c.quantized_max_intensity)).collect());
    row("m_max quantized", cols.iter().map(|c| c.quantized_m_max.to_string()).collect());
}

#[derive(Serialize)]
struct GaussianSummary {
    epsilon: f64,
    lambda_um: f64,
    lambda_f_um: f64,
    aperture: f64,
    w0_um: f64,
    w0_tilde: f64,
    na: f64,
    blocked_fraction: f64,
}

pub fn gaussian(args: &GaussianArgs, out: &Output) -> Result<()> {
    let s = AddressingScenario::with_aperture(args.lattice.lambda, args.lattice.lattice, args.epsilon, args.aperture)?;
    let r = GaussianSummary {
        epsilon: s.epsilon,
        lambda_um: s.lambda,
        lambda_f_um: s.lambda_f,
        aperture: s.p,
        w0_um: s.waist(),
        w0_tilde: s.waist_tilde(),
        na: s.numerical_aperture(),
        blocked_fraction: s.blocked_fraction(),
    };
    let text = match out.format {
        Format::Human => format!(
            "crosstalk epsilon   {}\nwaist w0            {} um\nnormalized w0~      {}\nlens NA             {}\nblocked fraction    {} (aperture {} w)\n",
            g(r.epsilon, 4),
            g(r.w0_um, 4),
            g(r.w0_tilde, 4),
            g(r.na, 4),
            g(r.blocked_fraction, 3),
            g(r.aperture, 3)
        ),
        Format::Csv => format!(
            "epsilon,lambda_um,lambda_f_um,aperture,w0_um,w0_tilde,na,blocked_fraction\n{}\n",
            [r.epsilon, r.lambda_um, r.lambda_f_um, r.aperture, r.w0_um, r.w0_tilde, r.na, r.blocked_fraction]
                .map(full)
                .join(",")
        ),
        Format::Json => json(&r),
    };
    out.emit(&text)
}

#[derive(Serialize)]
struct NaCurveJson {
    /// Lattice-to-addressing wavelength ratio.
    ratio: f64,
    samples: Vec<latzero::gaussian::NaSample>,
}

pub fn na_curve_cmd(args: &NaCurveArgs, out: &Output) -> Result<()> {
    let (min, max, step) = args.range;
    let range = SampleRange::new(min, max, step)?;
    let curves = args
        .ratios
        .iter()
        .map(|&r| Ok(NaCurveJson { ratio: r, samples: na_curve(1.0 / r, range, args.aperture)? }))
        .collect::<Result<Vec<_>>>()?;

    let text = match out.format {
        Format::Json => json(&curves),
        Format::Csv if curves.len() == 1 => na_curve_csv(&curves[0].samples),
        Format::Csv => {
            let mut s = String::from("w0_tilde");
            for c in &curves {
                let _ = write!(s, ",na_{}", g(c.ratio, 6));
            }
            s.push('\n');
            for (i, sample) in curves[0].samples.iter().enumerate() {
                s.push_str(&g(sample.w0_tilde, 6));
                for c in &curves {
                    let _ = write!(s, ",{}", g(c.samples[i].na, 6));
                }
                s.push('\n');
            }
            s
        }
        Format::Human => {
            let mut s = format!("{:>8}", "w0~");
            for c in &curves {
                let _ = write!(s, "{:>12}", format!("NA(1:{})", g(c.ratio, 4)));
            }
            s.push('\n');
            for (i, sample) in curves[0].samples.iter().enumerate() {
                let _ = write!(s, "{:>8.3}", sample.w0_tilde);
                for c in &curves {
                    let _ = write!(s, "{:>12.4}", c.samples[i].na);
                }
                s.push('\n');
            }
            s
        }
    };
    out.emit(&text)
}

fn waves_artifact(out: &Output, waves: &PlaneWaveSet, headline: &str) -> Result<()> {
    let file = waves.to_json();
    artifact(out, file.as_bytes(), |format| match format {
        Format::Human => {
            let w_max = waves.weights().map(|w| w.norm()).fold(0.0, f64::max);
            format!(
                "{headline}\nN = {} plane waves, k = {} rad/um, max |w| = {}\nA(0,0) = {}\npredicted ring diameter N lambda/4 = {} um\n",
                waves.len(),
                g(waves.k(), 6),
                g(w_max, 4),
                {
                    let a0 = waves.evaluate(0.0, 0.0);
                    fmt_complex(a0.re, a0.im)
                },
                g(waves.predicted_ring_diameter(), 4)
            )
        }
        Format::Csv => {
            let mut s = String::from("j,phi,re,im\n");
            for (j, w) in waves.waves().iter().enumerate() {
                let _ = writeln!(s, "{j},{},{},{}", full(w.phi), full(w.weight.re), full(w.weight.im));
            }
            s
        }
        Format::Json => file.clone(),
    })
}

fn fmt_complex(re: f64, im: f64) -> String {
    format!("{}{}{}i", g(re, 6), if im < 0.0 { "-" } else { "+" }, g(im.abs(), 3))
}

pub fn synth(args: &SynthArgs, out: &Output) -> Result<()> {
    let d = args.source.resolve()?;
    let waves = synthesize_waves(&d, args.n_beams as usize)?;
    waves_artifact(out, &waves, &format!("synthesized M = {} design", d.m_sites()))
}

pub fn steer(args: &SteerArgs, out: &Output) -> Result<()> {
    let waves = args.beams.resolve()?;
    let steered = waves.steer(args.shift);
    let headline = format!(
        "steered by ({}, {}) um, |dr| = {} um",
        g(args.shift.dx, 6),
        g(args.shift.dy, 6),
        g(args.shift.magnitude(), 4)
    );
    waves_artifact(out, &steered, &headline)
}

pub fn quantize(args: &QuantizeArgs, out: &Output) -> Result<()> {
    let waves = args.beams.resolve()?;
    let spec = QuantizationSpec::new(args.amp_bits.unwrap_or(args.bits), args.phase_bits.unwrap_or(args.bits))?;
    let q = waves.quantize(spec)?;
    let words = waves.slm_words(spec)?;
    if let Some(path) = &args.words {
        write_file(path, slm_words_csv(&words).as_bytes())?;
    }

    let errors: Vec<f64> = waves.weights().zip(q.weights()).map(|(a, b)| (a - b).norm()).collect();
    let max_err = errors.iter().copied().fold(0.0, f64::max);
    let rms_err = (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt();
    let file = q.to_json();
    artifact(out, file.as_bytes(), |format| match format {
        Format::Human => format!(
            "{} plane waves quantized to {}-bit amplitude, {}-bit phase\nweight error: max {}, rms {}\n",
            q.len(),
            spec.amplitude_bits(),
            spec.phase_bits(),
            g(max_err, 3),
            g(rms_err, 3)
        ),
        Format::Csv => slm_words_csv(&words),
        Format::Json => file.clone(),
    })
}

#[derive(Serialize)]
struct MapSummary {
    path: String,
    sidecar: String,
    nx: usize,
    ny: usize,
    step: f64,
    peak_x: f64,
    peak_y: f64,
    max_intensity: f64,
}

pub fn map(args: &MapArgs, out: &Output) -> Result<()> {
    let Some(path) = out.path.as_deref() else {
        return Err(UsageError("map needs an output path (-o map.pgm or -o map.csv)".into()).into());
    };
    let format: ExportFormat = match &args.image {
        Some(name) => name.parse()?,
        None if has_extension(path, "csv") => ExportFormat::Csv,
        None => ExportFormat::Pgm16,
    };
    let sidecar = path.with_extension("json");
    if sidecar == path {
        bail!(UsageError("map output must not be a .json file; the sidecar takes that name".into()));
    }
    let inputs = [&args.beams.source.design, &args.beams.waves];
    if inputs.into_iter().flatten().any(|input| same_file(input, &sidecar)) {
        bail!(UsageError(format!("sidecar {} would overwrite an input file", sidecar.display())));
    }
    let scaling = match args.scale {
        Scale::Log => Scaling::log10(args.floor)?,
        Scale::Linear => Scaling::Linear,
    };
    let grid_spec = GridSpec::centered(args.extent, args.step)?;

    let field: Box<dyn Field + Sync> = if args.ideal {
        Box::new(args.beams.source.resolve()?)
    } else {
        let mut waves = args.beams.resolve()?;
        if let Some(bits) = args.bits {
            waves = waves.quantize(QuantizationSpec::uniform(bits)?)?;
        }
        if let Some(shift) = args.shift {
            waves = waves.steer(shift);
        }
        Box::new(waves)
    };
    let grid = raster_field(field.as_ref(), &grid_spec)?;

    write_file(path, &export(&grid, format, scaling)?)?;
    write_file(&sidecar, json(&grid.metadata(format, scaling)).as_bytes())?;

    let (ix, iy) = grid.argmax();
    let summary = MapSummary {
        path: path.display().to_string(),
        sidecar: sidecar.display().to_string(),
        nx: grid.nx,
        ny: grid.ny,
        step: grid.step,
        peak_x: grid.x(ix),
        peak_y: grid.y(iy),
        max_intensity: grid.max(),
    };
    out.summary(&match out.summary_format() {
        Format::Human => format!(
            "wrote {} ({} x {}, step {} um) and {}\npeak |A|^2 = {} at ({}, {}) um\n",
            summary.path,
            summary.nx,
            summary.ny,
            g(summary.step, 4),
            summary.sidecar,
            g(summary.max_intensity, 4),
            g(summary.peak_x, 6),
            g(summary.peak_y, 6)
        ),
        Format::Csv => format!(
            "nx,ny,step,peak_x,peak_y,max_intensity\n{},{},{},{},{},{}\n",
            summary.nx,
            summary.ny,
            full(summary.step),
            full(summary.peak_x),
            full(summary.peak_y),
            full(summary.max_intensity)
        ),
        Format::Json => json(&summary),
    })
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(a), Ok(b)) => a == b,
        _ => a == b,
    }
}

fn has_extension(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

#[derive(Serialize)]
struct RingSummary {
    n_beams: usize,
    lambda_um: f64,
    threshold: f64,
    predicted_um: f64,
    measured_um: f64,
    ratio: f64,
    peak_amplitude: f64,
}

pub fn ring(args: &RingArgs, out: &Output) -> Result<()> {
    let waves = PlaneWaveSet::uniform(TAU / args.lambda, args.n_beams as usize)?;
    let r = waves.ring_analysis(args.threshold)?;
    let s = RingSummary {
        n_beams: waves.len(),
        lambda_um: args.lambda,
        threshold: args.threshold,
        predicted_um: r.predicted,
        measured_um: r.measured,
        ratio: r.ratio(),
        peak_amplitude: r.peak_amplitude,
    };
    let text = match out.format {
        Format::Human => format!(
            "N = {}, lambda = {} um\npredicted ring diameter N lambda/4 = {} um\nmeasured ring diameter = {} um\nratio = {}\nring peak |A| = {} (threshold {})\n",
            s.n_beams,
            g(s.lambda_um, 6),
            g(s.predicted_um, 4),
            g(s.measured_um, 4),
            g(s.ratio, 4),
            g(s.peak_amplitude, 3),
            g(s.threshold, 3)
        ),
        Format::Csv => format!(
            "n_beams,lambda_um,threshold,predicted_um,measured_um,ratio,peak_amplitude\n{},{}\n",
            s.n_beams,
            [s.lambda_um, s.threshold, s.predicted_um, s.measured_um, s.ratio, s.peak_amplitude]
                .map(full)
                .join(",")
        ),
        Format::Json => json(&s),
    };
    out.emit(&text)
}
