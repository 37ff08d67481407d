//! Optical fields with zeroes on the sites of a 1-D optical lattice.
//!
//! The crate covers the whole chain from design to a modulator-ready beam set:
//!
//! * [`specfun`]: integer-order Bessel functions `J_n`.
//! * [`gaussian`]: the conventional focused-Gaussian baseline (waist and
//!   lens NA needed for a given neighbour crosstalk).
//! * [`design`]: Fourier-Bessel coefficients that null the field on the
//!   first `M` lattice sites, field evaluation and crosstalk reports.
//! * [`synthesis`]: the equivalent ring of `N` plane waves, modulator
//!   quantization, shift-theorem steering and secondary-ring analysis.
//! * [`raster`]: intensity maps and CSV / 16-bit PGM export.
//!
//! Lengths are in micrometres throughout. Fields are normalized so the
//! addressed site has unit amplitude.

pub mod design;
pub mod error;
pub mod fmt;
pub mod gaussian;
pub mod linalg;
pub mod raster;
pub mod specfun;
pub mod synthesis;

use num_complex::Complex64;

pub use design::{
    crosstalk_report, evaluate_field, solve_design, CrosstalkReport, DesignFile, FieldPoint,
    FourierBesselDesign, LatticeSpec,
};
pub use error::{Error, Result};
pub use gaussian::{AddressingScenario, GaussianBeam};
pub use raster::{GridSpec, IntensityGrid};
pub use specfun::{bessel_j, bessel_j_sequence, BesselOrder};
pub use synthesis::{PlaneWave, PlaneWaveSet, QuantizationSpec, ShiftVector};

/// Anything that yields a complex scalar amplitude on the `x-y` plane.
pub trait Field {
    fn amplitude(&self, x: f64, y: f64) -> Complex64;

    fn intensity(&self, x: f64, y: f64) -> f64 {
        self.amplitude(x, y).norm_sqr()
    }
}
