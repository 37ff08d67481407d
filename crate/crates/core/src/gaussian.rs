//! Gaussian-focusing baseline for single-site addressing.
//!
//! A Gaussian spot that leaves intensity fraction `epsilon` on the nearest
//! neighbour (distance `d = lambda_f / 2`) needs a waist
//! `w0 = sqrt(-1 / (2 ln epsilon)) * lambda_f`. Focusing to that waist with a
//! lens whose aperture is `p` times the beam radius at the lens requires
//!
//! ```text
//! x  = p / (2 pi w0~) * (lambda / lambda_f),   w0~ = w0 / lambda_f
//! NA = x / sqrt(1 + x^2)
//! ```
//!
//! The aperture diameter itself is `D ~ p w0 z_lens / z_R`; the lens distance
//! cancels out of the NA so it is not exposed separately.
//!
//! All lengths are in micrometres.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aperture-to-beam-radius ratio used when none is given.
pub const DEFAULT_APERTURE_RATIO: f64 = 3.0;

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and positive, got {v}")))
    }
}

fn crosstalk_fraction(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in (0, 1), got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBeam {
    w0: f64,
    lambda: f64,
    i0: f64,
}

impl GaussianBeam {
    /// Beam with unit peak intensity.
    pub fn new(w0: f64, lambda: f64) -> Result<Self> {
        Self::with_peak(w0, lambda, 1.0)
    }

    pub fn with_peak(w0: f64, lambda: f64, i0: f64) -> Result<Self> {
        positive("waist", w0)?;
        positive("wavelength", lambda)?;
        if !i0.is_finite() || i0 < 0.0 {
            return Err(Error::Domain(format!("peak intensity must be finite and >= 0, got {i0}")));
        }
        Ok(Self { w0, lambda, i0 })
    }

    pub fn waist(&self) -> f64 {
        self.w0
    }

    pub fn wavelength(&self) -> f64 {
        self.lambda
    }

    pub fn peak_intensity(&self) -> f64 {
        self.i0
    }

    pub fn rayleigh_range(&self) -> f64 {
        PI * self.w0 * self.w0 / self.lambda
    }

    /// Squared beam radius `w(z)^2`.
    pub fn radius_sq(&self, z: f64) -> f64 {
        let zr = self.rayleigh_range();
        self.w0 * self.w0 * (1.0 + (z / zr).powi(2))
    }

    /// `I0 exp(-2 rho^2 / w(z)^2)`.
    ///
    /// This is the bare profile without the `(w0 / w(z))^2` on-axis falloff;
    /// the two agree in the focal plane, which is the only plane the
    /// crosstalk analysis uses.
    pub fn intensity(&self, rho: f64, z: f64) -> Result<f64> {
        if rho.is_nan() || rho < 0.0 || !z.is_finite() {
            return Err(Error::Domain(format!(
                "need rho >= 0 and finite z, got rho = {rho}, z = {z}"
            )));
        }
        Ok(self.i0 * (-2.0 * rho * rho / self.radius_sq(z)).exp())
    }
}

/// Addressing problem: which beam is needed to hit one lattice site with
/// crosstalk `epsilon` on its neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AddressingScenario {
    pub lambda: f64,
    pub lambda_f: f64,
    pub epsilon: f64,
    pub p: f64,
}

impl AddressingScenario {
    pub fn new(lambda: f64, lambda_f: f64, epsilon: f64) -> Result<Self> {
        Self::with_aperture(lambda, lambda_f, epsilon, DEFAULT_APERTURE_RATIO)
    }

    pub fn with_aperture(lambda: f64, lambda_f: f64, epsilon: f64, p: f64) -> Result<Self> {
        positive("addressing wavelength", lambda)?;
        positive("lattice wavelength", lambda_f)?;
        positive("aperture ratio", p)?;
        crosstalk_fraction("crosstalk", epsilon)?;
        Ok(Self { lambda, lambda_f, epsilon, p })
    }

    pub fn site_spacing(&self) -> f64 {
        0.5 * self.lambda_f
    }

    pub fn waist(&self) -> f64 {
        // both inputs already validated
        (-1.0 / (2.0 * self.epsilon.ln())).sqrt() * self.lambda_f
    }

    /// Waist in units of the lattice wavelength.
    pub fn waist_tilde(&self) -> f64 {
        self.waist() / self.lambda_f
    }

    pub fn numerical_aperture(&self) -> f64 {
        na(self.waist_tilde(), self.lambda / self.lambda_f, self.p)
    }

    pub fn blocked_fraction(&self) -> f64 {
        (-0.5 * self.p * self.p).exp()
    }
}

/// Waist (µm) that puts intensity fraction `epsilon` on a site `lambda_f / 2`
/// away.
pub fn waist_for_crosstalk(epsilon: f64, lambda_f: f64) -> Result<f64> {
    crosstalk_fraction("crosstalk", epsilon)?;
    positive("lattice wavelength", lambda_f)?;
    Ok((-1.0 / (2.0 * epsilon.ln())).sqrt() * lambda_f)
}

/// Lens NA needed to reach waist `w0_tilde` (units of `lambda_f`);
/// `wavelength_ratio` is `lambda / lambda_f`.
pub fn numerical_aperture(w0_tilde: f64, wavelength_ratio: f64, p: f64) -> Result<f64> {
    positive("normalized waist", w0_tilde)?;
    positive("wavelength ratio", wavelength_ratio)?;
    positive("aperture ratio", p)?;
    Ok(na(w0_tilde, wavelength_ratio, p))
}

fn na(w0_tilde: f64, wavelength_ratio: f64, p: f64) -> f64 {
    let x = p / (2.0 * PI * w0_tilde) * wavelength_ratio;
    // x / sqrt(1 + x^2), arranged to stay finite for huge x
    if x > 1.0 {
        1.0 / (1.0 + (1.0 / x).powi(2)).sqrt()
    } else {
        x / (1.0 + x * x).sqrt()
    }
}

/// Fraction of a Gaussian beam's power outside an aperture of diameter
/// `p * w`.
pub fn aperture_blocked_fraction(p: f64) -> Result<f64> {
    positive("aperture ratio", p)?;
    Ok((-0.5 * p * p).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaSample {
    pub w0_tilde: f64,
    pub na: f64,
}

/// Inclusive abscissa range `min, min + step, ..., <= max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl SampleRange {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) || step <= 0.0 || max < min {
            return Err(Error::Range(format!(
                "empty or invalid range {min}:{max}:{step}"
            )));
        }
        Ok(Self { min, max, step })
    }

    pub fn samples(&self) -> Vec<f64> {
        // tolerate accumulated rounding at the upper end
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.min + i as f64 * self.step).collect()
    }
}

/// NA against normalized waist for one wavelength ratio.
pub fn na_curve(wavelength_ratio: f64, range: SampleRange, p: f64) -> Result<Vec<NaSample>> {
    positive("wavelength ratio", wavelength_ratio)?;
    positive("aperture ratio", p)?;
    let xs = range.samples();
    if xs[0] <= 0.0 {
        return Err(Error::Range(format!(
            "normalized waist range must be positive, starts at {}",
            xs[0]
        )));
    }
    Ok(xs
        .into_iter()
        .map(|w| NaSample { w0_tilde: w, na: na(w, wavelength_ratio, p) })
        .collect())
}

/// CSV with header `w0_tilde,na`, values in `%.6g`.
pub fn na_curve_csv(rows: &[NaSample]) -> String {
    let mut out = String::from("w0_tilde,na\n");
    for r in rows {
        out.push_str(&crate::fmt::g(r.w0_tilde, 6));
        out.push(',');
        out.push_str(&crate::fmt::g(r.na, 6));
        out.push('\n');
    }
    out
}
