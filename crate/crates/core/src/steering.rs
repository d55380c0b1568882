//! Spatial, polarisation and stacked steering vectors of a crossed-dipole
//! linear array.
//!
//! Every element carries an x-oriented and a y-oriented dipole. Element
//! positions are measured along the y axis in wavelengths, so the spatial
//! phase of element `n` toward `(θ, φ)` is `2π·d_n·sinθ·sinφ`. Angles enter
//! in degrees and are converted to radians only inside these functions.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::{wrap_degrees, Real};

/// Element displacements from element 0, in wavelengths.
#[derive(Clone, Debug, PartialEq)]
pub struct ArrayGeometry<T> {
    positions: Vec<T>,
}

impl<T: Real> ArrayGeometry<T> {
    /// Positions must start at 0 and increase strictly.
    pub fn new(positions: Vec<T>) -> Result<Self> {
        match positions.first() {
            None => return Err(Error::invalid("positions", "array needs at least one element")),
            Some(p) if !p.is_zero() => {
                return Err(Error::invalid("positions", "first element must sit at 0"))
            }
            _ => {}
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("positions", "positions must be finite"));
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("positions", "positions must be strictly increasing"));
        }
        Ok(Self { positions })
    }

    /// `count` elements with uniform `spacing` wavelengths.
    pub fn uniform(count: usize, spacing: T) -> Result<Self> {
        if count == 0 {
            return Err(Error::invalid("element_count", "must be at least 1"));
        }
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(Error::invalid("spacing_wavelengths", "must be positive and finite"));
        }
        Self::new((0..count).map(|n| spacing * T::lit(n as f64)).collect())
    }

    /// Uniform array spanning `aperture` wavelengths: `aperture/spacing + 1` elements.
    pub fn from_aperture(aperture: T, spacing: T) -> Result<Self> {
        let count = element_count_for_aperture(aperture, spacing)?;
        Self::uniform(count, spacing)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[T] {
        &self.positions
    }
}

/// Element count of a uniform array covering `aperture` at `spacing`.
///
/// The ratio must be an integer to within 1e-9.
pub fn element_count_for_aperture<T: Real>(aperture: T, spacing: T) -> Result<usize> {
    if !(spacing > T::zero()) || !spacing.is_finite() {
        return Err(Error::invalid("spacing_wavelengths", "must be positive and finite"));
    }
    if !(aperture >= T::zero()) || !aperture.is_finite() {
        return Err(Error::invalid("aperture_wavelengths", "must be nonnegative and finite"));
    }
    let ratio = (aperture / spacing).to_f64_lossless();
    let gaps = ratio.round();
    if (ratio - gaps).abs() > 1e-9 {
        return Err(Error::invalid(
            "aperture_wavelengths",
            format!("aperture is not a whole number of spacings ({ratio} gaps)"),
        ));
    }
    Ok(gaps as usize + 1)
}

/// Far-field direction in degrees: elevation θ ∈ [0, 180], azimuth φ ∈ [0, 360).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction<T> {
    theta: T,
    phi: T,
}

impl<T: Real> Direction<T> {
    /// Azimuth is wrapped into `[0, 360)`, so `-90` becomes `270`.
    pub fn new(theta_deg: T, phi_deg: T) -> Result<Self> {
        if !theta_deg.is_finite() || theta_deg < T::zero() || theta_deg > T::lit(180.0) {
            return Err(Error::invalid("theta_deg", format!("{theta_deg} outside [0, 180]")));
        }
        if !phi_deg.is_finite() {
            return Err(Error::invalid("phi_deg", "must be finite"));
        }
        let full = T::lit(360.0);
        let mut phi = phi_deg % full;
        if phi < T::zero() {
            phi = phi + full;
        }
        if phi >= full {
            phi = phi - full;
        }
        Ok(Self {
            theta: theta_deg,
            phi,
        })
    }

    pub fn theta_deg(&self) -> T {
        self.theta
    }

    pub fn phi_deg(&self) -> T {
        self.phi
    }

    /// Same physical direction: equal angles, or both at a pole where φ is moot.
    pub fn coincides(&self, other: &Self, tol: T) -> bool {
        let at_pole = |d: &Self| d.theta <= tol || (T::lit(180.0) - d.theta) <= tol;
        if (self.theta - other.theta).abs() > tol {
            return false;
        }
        if at_pole(self) && at_pole(other) {
            return true;
        }
        let dphi = wrap_degrees(self.phi - other.phi).abs();
        dphi <= tol
    }
}

/// Directions along a fixed-azimuth cut, θ from `start` to `stop` inclusive.
pub fn phi_cut<T: Real>(phi_deg: T, start: T, stop: T, step: T) -> Result<Vec<Direction<T>>> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::invalid("theta_step_deg", "must be positive"));
    }
    if stop < start {
        return Err(Error::invalid("theta_stop_deg", "must not be below theta_start_deg"));
    }
    let count = ((stop - start) / step + T::lit(1e-9)).floor().to_f64_lossless() as usize + 1;
    (0..count)
        .map(|k| Direction::new(start + step * T::lit(k as f64), phi_deg))
        .collect()
}

/// Transmitted polarisation: auxiliary angle γ ∈ [0, 90] and phase difference η ∈ [-180, 180), degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationState<T> {
    gamma: T,
    eta: T,
}

impl<T: Real> PolarizationState<T> {
    /// η is wrapped into `[-180, 180)`; γ outside `[0, 90]` is rejected.
    pub fn new(gamma_deg: T, eta_deg: T) -> Result<Self> {
        if !gamma_deg.is_finite() || gamma_deg < T::zero() || gamma_deg > T::lit(90.0) {
            return Err(Error::invalid("gamma_deg", format!("{gamma_deg} outside [0, 90]")));
        }
        if !eta_deg.is_finite() {
            return Err(Error::invalid("eta_deg", "must be finite"));
        }
        Ok(Self {
            gamma: gamma_deg,
            eta: wrap_degrees(eta_deg),
        })
    }

    /// (γ, η) = (0°, 0°)
    pub fn horizontal() -> Self {
        Self {
            gamma: T::zero(),
            eta: T::zero(),
        }
    }

    /// (γ, η) = (90°, 0°)
    pub fn vertical() -> Self {
        Self {
            gamma: T::lit(90.0),
            eta: T::zero(),
        }
    }

    pub fn gamma_deg(&self) -> T {
        self.gamma
    }

    pub fn eta_deg(&self) -> T {
        self.eta
    }
}

/// Stacked 2N steering vector: x-dipole entries first, then y-dipole entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SteeringVector<T>(Vec<Complex<T>>);

impl<T: Real> SteeringVector<T> {
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex<T>> {
        self.0
    }

    pub fn x_block(&self) -> &[Complex<T>] {
        &self.0[..self.0.len() / 2]
    }

    pub fn y_block(&self) -> &[Complex<T>] {
        &self.0[self.0.len() / 2..]
    }
}

impl<T> AsRef<[Complex<T>]> for SteeringVector<T> {
    fn as_ref(&self) -> &[Complex<T>] {
        &self.0
    }
}

/// Per-element phase factors `exp(-j·2π·d_n·sinθ·sinφ)`.
pub fn spatial_steering<T: Real>(geometry: &ArrayGeometry<T>, dir: &Direction<T>) -> Vec<Complex<T>> {
    let u = dir.theta.to_radians().sin() * dir.phi.to_radians().sin();
    geometry
        .positions
        .iter()
        .map(|&d| {
            let phase = -T::TAU() * d * u;
            Complex::new(phase.cos(), phase.sin())
        })
        .collect()
}

/// Spatial-polarisation coherent pair `(s_px, s_py)`.
pub fn polarisation_vector<T: Real>(
    dir: &Direction<T>,
    pol: &PolarizationState<T>,
) -> (Complex<T>, Complex<T>) {
    let cos_t = dir.theta.to_radians().cos();
    let (sin_p, cos_p) = dir.phi.to_radians().sin_cos();
    let (sin_g, cos_g) = pol.gamma.to_radians().sin_cos();
    let eta = pol.eta.to_radians();
    let b = Complex::new(eta.cos(), eta.sin()) * (cos_t * sin_g);
    let s_px = b * cos_p + Complex::new(-sin_p * cos_g, T::zero());
    let s_py = b * sin_p + Complex::new(cos_p * cos_g, T::zero());
    (s_px, s_py)
}

/// Stacked steering vector `[s_px·s_s ; s_py·s_s]`.
pub fn full_steering<T: Real>(
    geometry: &ArrayGeometry<T>,
    dir: &Direction<T>,
    pol: &PolarizationState<T>,
) -> SteeringVector<T> {
    let spatial = spatial_steering(geometry, dir);
    let (px, py) = polarisation_vector(dir, pol);
    let mut out = Vec::with_capacity(2 * spatial.len());
    out.extend(spatial.iter().map(|&s| s * px));
    out.extend(spatial.iter().map(|&s| s * py));
    SteeringVector(out)
}
