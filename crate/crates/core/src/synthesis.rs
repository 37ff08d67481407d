//! Plane-wave realization of Fourier-Bessel fields.
//!
//! A ring of `N` plane waves with wavenumber `k` and azimuths `phi_j`
//! produces
//!
//! ```text
//! A(x, y) = (1/N) sum_j w_j exp[i k (x cos phi_j + y sin phi_j)]
//! ```
//!
//! With `phi_j = 2 pi j / N` and `w_j = 1 + sum_n a_2n (-1)^n exp(i 2n phi_j)`
//! this is the design field plus aliased Bessel orders `>= N - 2M`, which are
//! negligible until `k rho` approaches `N`. Uniform weights give `J0(k rho)`
//! in the same limit.
//!
//! The weights are what a modulator has to produce, so this module also
//! covers finite bit depth, steering by per-beam phase ramps, and the
//! quasiperiodic revival rings that bound the steering range.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{CrosstalkReport, FourierBesselDesign, LatticeSpec};
use crate::error::{Error, Result};
use crate::Field;

/// Smallest beam count accepted for a wave set.
pub const MIN_BEAMS: usize = 4;

/// Ring detection threshold on `|A| / |A(0)|`.
pub const DEFAULT_RING_THRESHOLD: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    /// Azimuth of the wave vector, radians.
    pub phi: f64,
    /// `A_j exp(i chi_j)`.
    pub weight: Complex64,
}

/// Immutable set of converging plane waves.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaveSet {
    k: f64,
    waves: Vec<PlaneWave>,
    // (cos phi, sin phi) per wave
    dirs: Vec<(f64, f64)>,
}

impl PlaneWaveSet {
    pub fn new(k: f64, waves: Vec<PlaneWave>) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
        }
        if waves.len() < MIN_BEAMS {
            return Err(Error::Range(format!(
                "need at least {MIN_BEAMS} plane waves, got {}",
                waves.len()
            )));
        }
        let mut prev = f64::NEG_INFINITY;
        for w in &waves {
            if !(w.phi >= 0.0 && w.phi < TAU) || w.phi <= prev {
                return Err(Error::Domain(format!(
                    "wave azimuths must be strictly increasing in [0, 2 pi), got {} after {prev}",
                    w.phi
                )));
            }
            if !(w.weight.re.is_finite() && w.weight.im.is_finite()) {
                return Err(Error::Domain(format!("non-finite weight {}", w.weight)));
            }
            prev = w.phi;
        }
        let dirs = waves.iter().map(|w| (w.phi.cos(), w.phi.sin())).collect();
        Ok(Self { k, waves, dirs })
    }

    /// `N` equally spaced waves with unit weight: a `J0` Bessel beam.
    pub fn uniform(k: f64, n_beams: usize) -> Result<Self> {
        Self::from_weights(k, vec![Complex64::new(1.0, 0.0); n_beams])
    }

    /// Weights placed at `phi_j = 2 pi j / N`.
    pub fn from_weights(k: f64, weights: Vec<Complex64>) -> Result<Self> {
        let n = weights.len();
        let waves = weights
            .into_iter()
            .enumerate()
            .map(|(j, weight)| PlaneWave { phi: ring_angle(j, n), weight })
            .collect();
        Self::new(k, waves)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn wavelength(&self) -> f64 {
        TAU / self.k
    }

    pub fn len(&self) -> usize {
        self.waves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waves.is_empty()
    }

    pub fn waves(&self) -> &[PlaneWave] {
        &self.waves
    }

    pub fn weights(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.waves.iter().map(|w| w.weight)
    }

    /// `d_ring ~ N lambda / 4`.
    pub fn predicted_ring_diameter(&self) -> f64 {
        self.len() as f64 * self.wavelength() / 4.0
    }

    /// True when the azimuths are exactly `2 pi j / N`.
    fn is_regular_ring(&self) -> bool {
        let n = self.len();
        self.waves.iter().enumerate().all(|(j, w)| w.phi == ring_angle(j, n))
    }

    pub fn evaluate(&self, x: f64, y: f64) -> Complex64 {
        let sum: Complex64 = self
            .waves
            .iter()
            .zip(&self.dirs)
            .map(|(w, &(c, s))| w.weight * Complex64::cis(self.k * (x * c + y * s)))
            .sum();
        sum / self.len() as f64
    }

    /// Translate the synthesized field by `shift`.
    pub fn steer(&self, shift: ShiftVector) -> PlaneWaveSet {
        let reach = 0.5 * self.predicted_ring_diameter();
        if shift.magnitude() >= reach {
            log::warn!(
                "shift of {:.3} um reaches the secondary ring region (d_ring / 2 ~ {:.3} um)",
                shift.magnitude(),
                reach
            );
        }
        let waves = self
            .waves
            .iter()
            .zip(&self.dirs)
            .map(|(w, &(c, s))| PlaneWave {
                phi: w.phi,
                weight: w.weight * Complex64::cis(-self.k * (shift.dx * c + shift.dy * s)),
            })
            .collect();
        Self { k: self.k, waves, dirs: self.dirs.clone() }
    }

    /// Modulator words for every beam.
    pub fn slm_words(&self, spec: QuantizationSpec) -> Result<Vec<SlmWord>> {
        let w_max = self.weights().map(|w| w.norm()).fold(0.0, f64::max);
        if w_max == 0.0 {
            return Err(Error::Degenerate("all plane-wave weights are zero".into()));
        }
        let amp_levels = spec.amplitude_levels() as f64;
        let phase_count = spec.phase_count();
        let phase_step = TAU / phase_count as f64;
        Ok(self
            .weights()
            .enumerate()
            .map(|(pixel, w)| {
                let amp_word = (w.norm() / w_max * amp_levels).round() as u64;
                let phase_word = (w.arg().rem_euclid(TAU) / phase_step).round() as u64 % phase_count;
                SlmWord { pixel, amp_word, phase_word }
            })
            .collect())
    }

    /// Round each weight to the nearest representable modulator setting.
    pub fn quantize(&self, spec: QuantizationSpec) -> Result<PlaneWaveSet> {
        let words = self.slm_words(spec)?;
        let w_max = self.weights().map(|w| w.norm()).fold(0.0, f64::max);
        let amp_step = w_max / spec.amplitude_levels() as f64;
        let phase_step = TAU / spec.phase_count() as f64;
        let waves = self
            .waves
            .iter()
            .zip(words)
            .map(|(w, word)| PlaneWave {
                phi: w.phi,
                weight: Complex64::from_polar(
                    word.amp_word as f64 * amp_step,
                    word.phase_word as f64 * phase_step,
                ),
            })
            .collect();
        Ok(Self { k: self.k, waves, dirs: self.dirs.clone() })
    }

    /// Crosstalk on lattice sites `1..=m_limit`, relative to `|A(0, 0)|^2`.
    pub fn lattice_crosstalk(&self, lattice: &LatticeSpec, m_limit: usize) -> Result<CrosstalkReport> {
        if m_limit == 0 {
            return Err(Error::Range("scan depth must be at least 1".into()));
        }
        let center = self.evaluate(0.0, 0.0).norm_sqr();
        if center == 0.0 {
            return Err(Error::Degenerate("field vanishes at the addressed site".into()));
        }
        let intensities = (1..=m_limit)
            .map(|m| self.evaluate(lattice.site_radius(m), 0.0).norm_sqr() / center)
            .collect();
        Ok(CrosstalkReport::from_intensities(intensities))
    }

    /// Largest `|A|` over `4N` azimuths at each radius, relative to
    /// `|A(0, 0)|`.
    pub fn azimuthal_peak_profile(&self, radii: &[f64]) -> Result<Vec<f64>> {
        let center = self.evaluate(0.0, 0.0).norm();
        if center == 0.0 {
            return Err(Error::Degenerate("field vanishes at the origin".into()));
        }
        let n = self.len();
        let n_theta = 4 * n;
        let profile = if self.is_regular_ring() {
            // theta_l - phi_j = 2 pi (l - 4 j) / (4N): one phasor table per radius
            let cosines: Vec<f64> = (0..n_theta).map(|q| (TAU * q as f64 / n_theta as f64).cos()).collect();
            radii
                .par_iter()
                .map(|&r| {
                    let table: Vec<Complex64> =
                        cosines.iter().map(|c| Complex64::cis(self.k * r * c)).collect();
                    (0..n_theta)
                        .map(|l| {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for (j, w) in self.waves.iter().enumerate() {
                                acc += w.weight * table[(l + n_theta - 4 * j) % n_theta];
                            }
                            acc.norm()
                        })
                        .fold(0.0, f64::max)
                        / (n as f64 * center)
                })
                .collect()
        } else {
            radii
                .par_iter()
                .map(|&r| {
                    (0..n_theta)
                        .map(|l| {
                            let (s, c) = (TAU * l as f64 / n_theta as f64).sin_cos();
                            self.evaluate(r * c, r * s).norm()
                        })
                        .fold(0.0, f64::max)
                        / center
                })
                .collect()
        };
        Ok(profile)
    }

    /// Locate the first secondary interference ring.
    ///
    /// The radial scan (step `lambda / 20`) starts outside the central region
    /// `rho <= min(3 lambda, N lambda / 16)` and stops at the predicted
    /// diameter `N lambda / 4`, i.e. twice the predicted ring radius. The
    /// ring radius is the first local maximum of the azimuthal peak profile
    /// that exceeds `threshold`.
    pub fn ring_analysis(&self, threshold: f64) -> Result<RingAnalysis> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::Domain(format!("ring threshold must lie in (0, 1), got {threshold}")));
        }
        let lambda = self.wavelength();
        let predicted = self.predicted_ring_diameter();
        let step = lambda / 20.0;
        let central = (3.0 * lambda).min(self.len() as f64 * lambda / 16.0);
        let count = (predicted / step).floor() as usize + 2;
        let radii: Vec<f64> = (0..count).map(|i| i as f64 * step).collect();
        let profile = self.azimuthal_peak_profile(&radii)?;

        for i in 1..count - 1 {
            let p = profile[i];
            if radii[i] > central && p > threshold && p >= profile[i - 1] && p >= profile[i + 1] {
                return Ok(RingAnalysis {
                    measured: 2.0 * radii[i],
                    predicted,
                    peak_amplitude: p,
                });
            }
        }
        Err(Error::NotFound(format!(
            "no secondary ring above {threshold} within rho <= {predicted:.3} um"
        )))
    }

    pub fn to_file(&self) -> WaveSetFile {
        WaveSetFile {
            k_rad_per_um: self.k,
            waves: self
                .waves
                .iter()
                .map(|w| WaveRecord { phi: w.phi, re: w.weight.re, im: w.weight.im })
                .collect(),
        }
    }

    pub fn from_file(file: &WaveSetFile) -> Result<Self> {
        let waves = file
            .waves
            .iter()
            .map(|r| PlaneWave { phi: r.phi, weight: Complex64::new(r.re, r.im) })
            .collect();
        Self::new(file.k_rad_per_um, waves)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("plain struct serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}

impl Field for PlaneWaveSet {
    fn amplitude(&self, x: f64, y: f64) -> Complex64 {
        self.evaluate(x, y)
    }
}

fn ring_angle(j: usize, n: usize) -> f64 {
    TAU * j as f64 / n as f64
}

/// Plane-wave weights for a design, sampled at `N` equally spaced azimuths.
pub fn synthesize_waves(design: &FourierBesselDesign, n_beams: usize) -> Result<PlaneWaveSet> {
    let order = 2 * design.m_sites();
    let required = (2 * order + 2).max(MIN_BEAMS);
    if n_beams < required {
        return Err(Error::Undersampled { n_beams, order, required });
    }
    let weights = (0..n_beams)
        .map(|j| {
            let phi = ring_angle(j, n_beams);
            let mut w = Complex64::new(1.0, 0.0);
            for (i, a) in design.coefficients().iter().enumerate() {
                let n = i + 1;
                // i^(2n) = (-1)^n
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                w += Complex64::from_polar(sign * a, (2 * n) as f64 * phi);
            }
            w
        })
        .collect();
    PlaneWaveSet::from_weights(design.lattice().wavenumber(), weights)
}

pub fn evaluate_synthesized(waves: &PlaneWaveSet, x: f64, y: f64) -> Complex64 {
    waves.evaluate(x, y)
}

pub fn steer(waves: &PlaneWaveSet, shift: ShiftVector) -> PlaneWaveSet {
    waves.steer(shift)
}

pub fn quantize(waves: &PlaneWaveSet, spec: QuantizationSpec) -> Result<PlaneWaveSet> {
    waves.quantize(spec)
}

pub fn lattice_crosstalk(waves: &PlaneWaveSet, lattice: &LatticeSpec, m_limit: usize) -> Result<CrosstalkReport> {
    waves.lattice_crosstalk(lattice, m_limit)
}

pub fn ring_analysis(waves: &PlaneWaveSet, threshold: f64) -> Result<RingAnalysis> {
    waves.ring_analysis(threshold)
}

/// Modulator bit depths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantizationSpec {
    amplitude_bits: u32,
    phase_bits: u32,
}

impl QuantizationSpec {
    pub const MAX_BITS: u32 = 32;

    pub fn new(amplitude_bits: u32, phase_bits: u32) -> Result<Self> {
        for (name, b) in [("amplitude", amplitude_bits), ("phase", phase_bits)] {
            if !(1..=Self::MAX_BITS).contains(&b) {
                return Err(Error::Range(format!(
                    "{name} bits must be in 1..={}, got {b}",
                    Self::MAX_BITS
                )));
            }
        }
        Ok(Self { amplitude_bits, phase_bits })
    }

    pub fn uniform(bits: u32) -> Result<Self> {
        Self::new(bits, bits)
    }

    pub fn amplitude_bits(&self) -> u32 {
        self.amplitude_bits
    }

    pub fn phase_bits(&self) -> u32 {
        self.phase_bits
    }

    /// Top amplitude word, `2^B_a - 1`.
    pub fn amplitude_levels(&self) -> u64 {
        (1u64 << self.amplitude_bits) - 1
    }

    /// Number of phase words, `2^B_p`.
    pub fn phase_count(&self) -> u64 {
        1u64 << self.phase_bits
    }
}

/// One modulator pixel setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlmWord {
    pub pixel: usize,
    pub amp_word: u64,
    pub phase_word: u64,
}

/// CSV `pixel,amp_word,phase_word`.
pub fn slm_words_csv(words: &[SlmWord]) -> String {
    let mut out = String::from("pixel,amp_word,phase_word\n");
    for w in words {
        out.push_str(&format!("{},{},{}\n", w.pixel, w.amp_word, w.phase_word));
    }
    out
}

/// Lateral displacement of the synthesized spot, µm.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ShiftVector {
    pub dx: f64,
    pub dy: f64,
}

impl ShiftVector {
    pub fn new(dx: f64, dy: f64) -> Result<Self> {
        if !(dx.is_finite() && dy.is_finite()) {
            return Err(Error::Domain(format!("shift must be finite, got ({dx}, {dy})")));
        }
        Ok(Self { dx, dy })
    }

    pub fn magnitude(&self) -> f64 {
        self.dx.hypot(self.dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingAnalysis {
    /// Twice the radius of the first detected ring, µm.
    pub measured: f64,
    /// `N lambda / 4`, µm.
    pub predicted: f64,
    /// Ring peak amplitude relative to the centre.
    pub peak_amplitude: f64,
}

impl RingAnalysis {
    pub fn ratio(&self) -> f64 {
        self.measured / self.predicted
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSetFile {
    pub k_rad_per_um: f64,
    pub waves: Vec<WaveRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveRecord {
    pub phi: f64,
    pub re: f64,
    pub im: f64,
}
