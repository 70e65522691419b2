//! Full interaction configuration and the phase-mismatch evaluators built on
//! top of it.

use crate::error::{Error, Result};
use crate::qpm::{idler_from_energy, DirectionPair, PolingSpec, PumpGeometry};
use crate::real::{omega_from_lambda_nm, real, Real};
use crate::report::fmt_sig;
use crate::waveguide::WaveguideSpec;

/// Source of the signal/idler propagation constants.
///
/// `Bulk` evaluates plane-wave constants straight from the Sellmeier index,
/// which is how the tuning curves are computed. `Guided` uses the
/// graded-index fundamental-mode constant instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaMode {
    Bulk,
    Guided,
}

impl BetaMode {
    pub fn label(self) -> &'static str {
        match self {
            BetaMode::Bulk => "bulk",
            BetaMode::Guided => "guided",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bulk" => Some(BetaMode::Bulk),
            "guided" => Some(BetaMode::Guided),
            _ => None,
        }
    }
}

/// How the two-sinc spectral bracket is turned into a nonnegative intensity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClampMode {
    /// Evaluate the bracket literally and clamp negative side-lobe values to 0.
    Literal,
    /// Square the bracket.
    Squared,
}

impl ClampMode {
    pub fn label(self) -> &'static str {
        match self {
            ClampMode::Literal => "literal-clamped",
            ClampMode::Squared => "squared",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "literal" | "literal-clamped" => Some(ClampMode::Literal),
            "squared" => Some(ClampMode::Squared),
            _ => None,
        }
    }
}

/// Everything needed to evaluate the quasi-phase-matching residual and the
/// spectral density: pump geometry, poling, waveguide, propagation directions.
#[derive(Debug, Clone)]
pub struct InteractionConfig<R = f64> {
    pub pump: PumpGeometry<R>,
    pub poling: PolingSpec<R>,
    pub waveguide: WaveguideSpec<R>,
    pub dirs: DirectionPair,
    pub beta_mode: BetaMode,
    pub clamp: ClampMode,
    /// Grating orders summed in the spectral bracket (the first-order pair
    /// by default).
    pub spectral_orders: Vec<i32>,
}

/// Fraction of the pump wavenumber used as the root-residual tolerance.
pub const MISMATCH_TOL_FRACTION: f64 = 1e-6;

impl<R: Real> InteractionConfig<R> {
    pub fn new(
        pump_wavelength_nm: R,
        theta_deg: R,
        poling: PolingSpec<R>,
        waveguide: WaveguideSpec<R>,
        dirs: DirectionPair,
    ) -> Result<Self> {
        let pump = PumpGeometry::new(pump_wavelength_nm, theta_deg, &waveguide.core)?;
        Ok(InteractionConfig {
            pump,
            poling,
            waveguide,
            dirs,
            beta_mode: BetaMode::Bulk,
            clamp: ClampMode::Literal,
            spectral_orders: vec![-1, 1],
        })
    }

    /// Same configuration at a different pump incidence angle.
    pub fn with_theta_deg(&self, theta_deg: R) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.pump = PumpGeometry::new(self.pump.wavelength_nm, theta_deg, &self.waveguide.core)?;
        Ok(cfg)
    }

    /// Same configuration with a different poling period.
    pub fn with_period_m(&self, period_m: R) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.poling = PolingSpec::new(period_m, self.poling.duty, self.poling.orders.clone())?;
        Ok(cfg)
    }

    /// Signal or idler propagation-constant magnitude at a wavelength,
    /// according to the configured beta source.
    pub fn beta_field(&self, lambda_nm: R) -> Result<R> {
        let omega = omega_from_lambda_nm(lambda_nm);
        match self.beta_mode {
            BetaMode::Bulk => self.waveguide.bulk_wavenumber(omega),
            BetaMode::Guided => self.waveguide.propagation_constant(omega),
        }
    }

    /// Direction-signed mismatch without the grating term,
    /// `beta_p - s_s beta_s - s_i beta_i` (rad/m).
    pub fn delta_beta(&self, lambda_s_nm: R) -> Result<R> {
        let lambda_i_nm = idler_from_energy(self.pump.wavelength_nm, lambda_s_nm)?;
        let beta_s = self.beta_field(lambda_s_nm)?;
        let beta_i = self.beta_field(lambda_i_nm)?;
        let ss: R = real(self.dirs.signal_sign as f64);
        let si: R = real(self.dirs.idler_sign as f64);
        Ok(self.pump.beta() - ss * beta_s - si * beta_i)
    }

    /// Quasi-phase-matching residual `delta_beta - K_m` (rad/m).
    pub fn phase_mismatch(&self, lambda_s_nm: R, m: i32) -> Result<R> {
        Ok(self.delta_beta(lambda_s_nm)? - self.poling.grating_wavenumber(m)?)
    }

    /// Residual magnitude below which a root is accepted.
    pub fn mismatch_tolerance(&self) -> R {
        real::<R>(MISMATCH_TOL_FRACTION) * self.pump.wavenumber()
    }

    /// Signal-wavelength interval on which both the signal and the derived
    /// idler stay inside the dispersion model's validity window.
    pub fn lambda_scan_window_nm(&self) -> Result<(R, R)> {
        let (valid_lo, valid_hi) = self.waveguide.core.valid_range_nm();
        let lambda_p = self.pump.wavelength_nm;
        if lambda_p <= valid_lo || lambda_p >= valid_hi {
            return Err(Error::invalid(
                "pump wavelength",
                "must lie inside the dispersion validity window",
            ));
        }
        // signal whose conjugate idler sits exactly at the upper validity edge
        let conj = R::one() / (R::one() / lambda_p - R::one() / valid_hi);
        let nudge = real::<R>(1.0) + real::<R>(1e-12);
        let lo = (conj * nudge).max(valid_lo);
        let hi = valid_hi;
        if !(lo < hi) {
            return Err(Error::invalid(
                "scan window",
                "dispersion validity window leaves no room for signal/idler pairs",
            ));
        }
        Ok((lo, hi))
    }

    /// Deterministic one-line description embedded in output files.
    pub fn fingerprint(&self) -> String {
        let f = |x: R| fmt_sig(x.to_f64().unwrap_or(f64::NAN));
        let orders = self
            .spectral_orders
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "pump_nm={};theta_deg={};period_um={};duty={};alpha_per_m={};length_mm={};dirs={};beta_mode={};clamp={};spectral_orders={};sellmeier={}",
            f(self.pump.wavelength_nm),
            f(self.pump.theta_deg),
            f(self.poling.period_m * real(1e6)),
            f(self.poling.duty),
            f(self.waveguide.alpha_per_m),
            f(self.waveguide.length_m * real(1e3)),
            self.dirs.label(),
            self.beta_mode.label(),
            self.clamp.label(),
            orders,
            self.waveguide.core.name(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::builtin_ppln_e;

    fn base() -> InteractionConfig<f64> {
        let poling = PolingSpec::new(6.8e-6, 0.5, vec![-3, -2, -1, 0, 1, 2, 3]).unwrap();
        let wg = WaveguideSpec::new(4e5, 1e-3, builtin_ppln_e()).unwrap();
        InteractionConfig::new(532.0, 80.0, poling, wg, DirectionPair::counter()).unwrap()
    }

    #[test]
    fn scan_window_keeps_both_fields_in_range() {
        let cfg = base();
        let (lo, hi) = cfg.lambda_scan_window_nm().unwrap();
        assert!(lo > 532.0 && hi <= 3400.0);
        // both edges evaluate without range errors
        cfg.delta_beta(lo).unwrap();
        cfg.delta_beta(hi).unwrap();
    }

    #[test]
    fn bulk_and_guided_betas_differ() {
        let mut cfg = base();
        cfg.beta_mode = BetaMode::Bulk;
        let bulk = cfg.beta_field(1064.0).unwrap();
        cfg.beta_mode = BetaMode::Guided;
        let guided = cfg.beta_field(1064.0).unwrap();
        assert!(guided < bulk);
    }

    #[test]
    fn fingerprint_is_deterministic_and_self_describing() {
        let cfg = base();
        let a = cfg.fingerprint();
        let b = cfg.fingerprint();
        assert_eq!(a, b);
        assert!(a.contains("period_um=6.8"), "{a}");
        assert!(a.contains("dirs=counter"), "{a}");
        assert!(a.contains("sellmeier=ppln_e"), "{a}");
    }
}
