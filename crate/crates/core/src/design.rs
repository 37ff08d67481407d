//! Fourier-Bessel fields with zeroes on the sites of a 1-D lattice.
//!
//! The field is a truncated even-order series
//!
//! ```text
//! A(rho, theta) = J0(k rho) + sum_{n=1..M} a_2n J_2n(k rho) exp(i 2n theta)
//! ```
//!
//! normalized so that `A(0) = 1`. Odd orders are absent, which makes the
//! field symmetric under `theta -> theta + pi` and therefore equal on both
//! sides of the addressed atom along the lattice axis. The `M` real
//! coefficients are fixed by demanding `A(rho_m, 0) = 0` at the first `M`
//! sites `rho_m = m lambda_f / 2`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{self, MAX_ARGUMENT, MAX_ORDER};
use crate::{linalg, Field};

/// Largest site count `solve_design` accepts.
pub const MAX_DESIGN_SITES: usize = 16;

/// Scan depth used for crosstalk reports unless told otherwise.
pub const DEFAULT_SCAN_DEPTH: usize = 50;

/// Addressing and lattice wavelengths, in micrometres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    lambda: f64,
    lambda_f: f64,
}

impl LatticeSpec {
    pub fn new(lambda: f64, lambda_f: f64) -> Result<Self> {
        for (name, v) in [("addressing wavelength", lambda), ("lattice wavelength", lambda_f)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be finite and positive, got {v}")));
            }
        }
        Ok(Self { lambda, lambda_f })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda_f(&self) -> f64 {
        self.lambda_f
    }

    /// `2 pi / lambda`, rad/µm.
    pub fn wavenumber(&self) -> f64 {
        TAU / self.lambda
    }

    pub fn site_spacing(&self) -> f64 {
        0.5 * self.lambda_f
    }

    /// Distance of site `m` from the addressed site.
    pub fn site_radius(&self, m: usize) -> f64 {
        m as f64 * self.site_spacing()
    }
}

/// Polar field coordinate; `theta` is kept in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    rho: f64,
    theta: f64,
}

impl FieldPoint {
    pub fn new(rho: f64, theta: f64) -> Result<Self> {
        if !(rho.is_finite() && rho >= 0.0) || !theta.is_finite() {
            return Err(Error::Domain(format!("invalid field point rho = {rho}, theta = {theta}")));
        }
        let mut theta = theta.rem_euclid(TAU);
        if theta >= TAU {
            theta = 0.0;
        }
        Ok(Self { rho, theta })
    }

    pub fn from_cartesian(x: f64, y: f64) -> Result<Self> {
        Self::new(x.hypot(y), y.atan2(x))
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// A set of even-order Fourier-Bessel coefficients on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBesselDesign {
    lattice: LatticeSpec,
    coefficients: Vec<f64>,
    residual_max: f64,
}

impl FourierBesselDesign {
    /// Plain `J0(k rho)` field, i.e. a design with no correction terms.
    pub fn bessel_j0(lattice: LatticeSpec) -> Self {
        Self { lattice, coefficients: Vec::new(), residual_max: 0.0 }
    }

    /// Wrap arbitrary coefficients `a_2, a_4, ...`. The residual is measured
    /// over as many sites as there are coefficients.
    pub fn from_coefficients(lattice: LatticeSpec, coefficients: Vec<f64>) -> Result<Self> {
        check_coefficients(&coefficients)?;
        let mut design = Self { lattice, coefficients, residual_max: 0.0 };
        design.residual_max = design.site_residual();
        Ok(design)
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    /// Number of zeroed sites `M` (equal to the coefficient count).
    pub fn m_sites(&self) -> usize {
        self.coefficients.len()
    }

    /// `a_2, a_4, ..., a_2M`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Largest `|A(rho_m, 0)|` over the design sites.
    pub fn residual_max(&self) -> f64 {
        self.residual_max
    }

    fn site_residual(&self) -> f64 {
        (1..=self.m_sites())
            .map(|m| self.on_axis(self.lattice.site_radius(m)).abs())
            .fold(0.0, f64::max)
    }

    /// Real field on the lattice axis (`theta = 0`).
    fn on_axis(&self, rho: f64) -> f64 {
        let j = specfun::sequence_unchecked(2 * self.m_sites(), self.lattice.wavenumber() * rho);
        j[0] + self.coefficients.iter().enumerate().map(|(i, a)| a * j[2 * (i + 1)]).sum::<f64>()
    }

    /// Complex amplitude at a polar point.
    pub fn evaluate(&self, point: FieldPoint) -> Result<Complex64> {
        let x = self.lattice.wavenumber() * point.rho();
        if x > MAX_ARGUMENT {
            return Err(Error::Domain(format!("k rho = {x} beyond supported range")));
        }
        let j = specfun::sequence_unchecked(2 * self.m_sites(), x);
        let mut a = Complex64::new(j[0], 0.0);
        for (i, coef) in self.coefficients.iter().enumerate() {
            let order = 2 * (i + 1);
            a += Complex64::from_polar(coef * j[order], order as f64 * point.theta());
        }
        Ok(a)
    }

    /// Intensity `|A(rho_m, 0)|^2` at sites `1..=m_limit`, relative to the
    /// addressed site.
    pub fn crosstalk_report(&self, m_limit: usize) -> Result<CrosstalkReport> {
        if m_limit < self.m_sites().max(1) {
            return Err(Error::Range(format!(
                "scan depth {m_limit} must cover the {} design sites",
                self.m_sites()
            )));
        }
        let intensities = (1..=m_limit)
            .map(|m| {
                let rho = self.lattice.site_radius(m);
                if self.lattice.wavenumber() * rho > MAX_ARGUMENT {
                    return Err(Error::Range(format!("site {m} lies beyond the supported radius")));
                }
                Ok(self.on_axis(rho).powi(2))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CrosstalkReport::from_intensities(intensities))
    }

    pub fn to_file(&self) -> DesignFile {
        DesignFile {
            lambda_um: self.lattice.lambda,
            lambda_f_um: self.lattice.lambda_f,
            m_sites: self.m_sites(),
            coefficients: self.coefficients.clone(),
            residual_max: self.residual_max,
        }
    }

    /// Rebuild from a file record. The stored residual is kept verbatim so
    /// that a load/save cycle reproduces the file exactly.
    pub fn from_file(file: &DesignFile) -> Result<Self> {
        let lattice = LatticeSpec::new(file.lambda_um, file.lambda_f_um)?;
        if file.coefficients.len() != file.m_sites {
            return Err(Error::Parse(format!(
                "design file lists {} coefficients for m_sites = {}",
                file.coefficients.len(),
                file.m_sites
            )));
        }
        check_coefficients(&file.coefficients)?;
        Ok(Self { lattice, coefficients: file.coefficients.clone(), residual_max: file.residual_max })
    }

    pub fn to_json(&self) -> String {
        self.to_file().to_json()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}

fn check_coefficients(coefficients: &[f64]) -> Result<()> {
    if 2 * coefficients.len() > MAX_ORDER as usize {
        return Err(Error::Range(format!("{} coefficients exceed the supported order", coefficients.len())));
    }
    if let Some(bad) = coefficients.iter().find(|c| !c.is_finite()) {
        return Err(Error::Domain(format!("non-finite coefficient {bad}")));
    }
    Ok(())
}

impl Field for FourierBesselDesign {
    fn amplitude(&self, x: f64, y: f64) -> Complex64 {
        let point = FieldPoint::from_cartesian(x, y).expect("finite coordinates");
        self.evaluate(point).expect("point within supported radius")
    }
}

/// On-disk design record. Floats are written in shortest round-trip form,
/// so parse-then-serialize reproduces the bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub lambda_um: f64,
    pub lambda_f_um: f64,
    pub m_sites: usize,
    pub coefficients: Vec<f64>,
    pub residual_max: f64,
}

impl DesignFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain struct serializes");
        s.push('\n');
        s
    }
}

/// Site-by-site crosstalk along the lattice axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkReport {
    /// `site_intensity[m - 1]` is the intensity at site `m`.
    pub site_intensity: Vec<f64>,
    pub max_intensity: f64,
    /// 1-based index of the brightest site.
    pub m_max: usize,
}

impl CrosstalkReport {
    /// Summarize per-site intensities (site 1 first). The first site wins ties.
    pub fn from_intensities(site_intensity: Vec<f64>) -> Self {
        let (idx, max) = site_intensity
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
        Self { site_intensity, max_intensity: max, m_max: idx + 1 }
    }

    pub fn intensity_at(&self, m: usize) -> Option<f64> {
        m.checked_sub(1).and_then(|i| self.site_intensity.get(i)).copied()
    }
}

/// Solve for the `M` coefficients that zero the field at sites `1..=M`.
pub fn solve_design(lattice: LatticeSpec, m_sites: usize) -> Result<FourierBesselDesign> {
    if !(1..=MAX_DESIGN_SITES).contains(&m_sites) {
        return Err(Error::Range(format!(
            "site count must be in 1..={MAX_DESIGN_SITES}, got {m_sites}"
        )));
    }
    let k = lattice.wavenumber();
    let mut matrix = Vec::with_capacity(m_sites);
    let mut rhs = Vec::with_capacity(m_sites);
    for m in 1..=m_sites {
        let j = specfun::sequence_unchecked(2 * m_sites, k * lattice.site_radius(m));
        matrix.push((1..=m_sites).map(|n| j[2 * n]).collect::<Vec<_>>());
        rhs.push(-j[0]);
    }
    let coefficients = linalg::solve(matrix, rhs)?;
    assert!(coefficients.iter().all(|c| c.is_finite()), "real system produced non-finite solution");
    FourierBesselDesign::from_coefficients(lattice, coefficients)
}

/// Free-function form of [`FourierBesselDesign::evaluate`].
pub fn evaluate_field(design: &FourierBesselDesign, point: FieldPoint) -> Result<Complex64> {
    design.evaluate(point)
}

/// Free-function form of [`FourierBesselDesign::crosstalk_report`].
pub fn crosstalk_report(design: &FourierBesselDesign, m_limit: usize) -> Result<CrosstalkReport> {
    design.crosstalk_report(m_limit)
}

/// Radius at which `J0(k rho)^2` drops to `e^-2`, found by bisection on the
/// central lobe.
pub fn central_lobe_radius(lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("wavelength must be positive, got {lambda}")));
    }
    let target = (-2.0f64).exp();
    let g = |x: f64| specfun::sequence_unchecked(0, x)[0].powi(2) - target;
    // J0^2 falls monotonically from 1 to 0 between 0 and its first zero
    let (mut lo, mut hi) = (0.0, 2.404_825_557_695_773);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi) * lambda / (2.0 * PI))
}
