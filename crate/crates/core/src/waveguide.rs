//! Fundamental-mode parameters of a parabolic graded-index slab.
//!
//! The slab has index profile `n^2(x) = n0^2 (1 - alpha^2 x^2)` with `n0`
//! supplied by a Sellmeier model at each field's own wavelength. The
//! fundamental TE mode is Gaussian with transverse decay `gamma`, and the
//! guide is single-mode whenever the propagation constant exceeds the cutoff
//! constant.

use crate::dispersion::SellmeierModel;
use crate::error::{Error, Result};
use crate::real::{light_speed, real, Real};

/// Graded-index slab bound to the dispersion model that supplies its core
/// index.
#[derive(Debug, Clone)]
pub struct WaveguideSpec<R = f64> {
    /// Gradient constant `alpha` of the parabolic profile (1/m).
    pub alpha_per_m: R,
    /// Interaction length `L` (m).
    pub length_m: R,
    /// Core index model, evaluated at each field's own wavelength.
    pub core: SellmeierModel<R>,
}

/// Fundamental-mode summary at one angular frequency.
#[derive(Debug, Clone, Copy)]
pub struct GuidedMode<R = f64> {
    /// Transverse decay parameter (1/m).
    pub gamma: R,
    /// Propagation constant (rad/m).
    pub beta: R,
    /// Angular frequency (rad/s).
    pub omega: R,
    /// Whether only the fundamental mode propagates at this frequency.
    pub single_mode: bool,
}

impl<R: Real> WaveguideSpec<R> {
    pub fn new(alpha_per_m: R, length_m: R, core: SellmeierModel<R>) -> Result<Self> {
        if !alpha_per_m.is_finite() || alpha_per_m < R::zero() {
            return Err(Error::invalid("alpha", "must be finite and >= 0"));
        }
        if !length_m.is_finite() || length_m <= R::zero() {
            return Err(Error::invalid("length", "must be finite and > 0"));
        }
        Ok(WaveguideSpec {
            alpha_per_m,
            length_m,
            core,
        })
    }

    fn check_omega(omega: R) -> Result<()> {
        if !omega.is_finite() || omega <= R::zero() {
            return Err(Error::NonFinite {
                what: "angular frequency",
            });
        }
        Ok(())
    }

    /// Bulk wavenumber `n0 w / c` of the core medium (rad/m).
    pub fn bulk_wavenumber(&self, omega: R) -> Result<R> {
        Self::check_omega(omega)?;
        Ok(self.core.index_at_omega(omega)? * omega / light_speed::<R>())
    }

    /// Transverse decay parameter `gamma = sqrt(n0 w alpha / c)` (1/m).
    pub fn mode_gamma(&self, omega: R) -> Result<R> {
        Self::check_omega(omega)?;
        let n0 = self.core.index_at_omega(omega)?;
        Ok((n0 * omega * self.alpha_per_m / light_speed::<R>()).sqrt())
    }

    /// Guidance bracket `1 - k c alpha / (n0 w)`; the mode exists only while
    /// this stays positive.
    fn bracket(&self, omega: R, factor: R) -> Result<R> {
        let n0 = self.core.index_at_omega(omega)?;
        Ok(R::one() - factor * light_speed::<R>() * self.alpha_per_m / (n0 * omega))
    }

    /// Fundamental-mode propagation constant
    /// `beta = (n0 w / c) sqrt(1 - c alpha / (n0 w))` (rad/m).
    pub fn propagation_constant(&self, omega: R) -> Result<R> {
        Self::check_omega(omega)?;
        let b = self.bracket(omega, R::one())?;
        if b <= R::zero() {
            return Err(Error::Guidance {
                omega: omega.to_f64().unwrap_or(f64::NAN),
                alpha: self.alpha_per_m.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(self.bulk_wavenumber(omega)? * b.sqrt())
    }

    /// Single-mode cutoff constant
    /// `beta_c = (n0 w / c) sqrt(1 - 3 c alpha / (n0 w))` (rad/m).
    pub fn cutoff_constant(&self, omega: R) -> Result<R> {
        Self::check_omega(omega)?;
        let b = self.bracket(omega, real(3.0))?;
        if b <= R::zero() {
            return Err(Error::Guidance {
                omega: omega.to_f64().unwrap_or(f64::NAN),
                alpha: self.alpha_per_m.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(self.bulk_wavenumber(omega)? * b.sqrt())
    }

    /// True iff the fundamental mode is the only guided mode, i.e.
    /// `beta > beta_c` at this frequency.
    pub fn is_single_mode(&self, omega: R) -> Result<bool> {
        Ok(self.propagation_constant(omega)? > self.cutoff_constant(omega)?)
    }

    pub fn guided_mode(&self, omega: R) -> Result<GuidedMode<R>> {
        Ok(GuidedMode {
            gamma: self.mode_gamma(omega)?,
            beta: self.propagation_constant(omega)?,
            omega,
            single_mode: self.is_single_mode(omega)?,
        })
    }
}
