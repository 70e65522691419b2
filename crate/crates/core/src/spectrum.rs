//! Closed-form spectral density of the down-converted light, bandwidth
//! extraction, ratio sweeps, 2-D angle/wavelength maps, and the weights of
//! the discrete frequency superposition.
//!
//! The density at a signal wavelength is the waveguide prefactor
//! `sqrt(pi / (g_s^2 + g_i^2)) * exp(-zeta^2 / (4 g_eff^2))` times a bracket
//! of sinc terms, one per active grating order:
//! `sum_m sinc((dbeta - K_m) L / 2)` with `sinc(x) = sin(x)/x`, `dbeta` the
//! direction-signed mismatch without the grating term, `zeta = k_p sin(theta)`
//! and `g_eff^2 = (g_s^2 + g_i^2) / 2`. The bracket can dip negative in side
//! lobes; reported intensities either clamp it at zero or square it, selected
//! by [`ClampMode`]. Slices and maps are normalized to unit peak, with the
//! prefactor handled in log space so extreme exponents cannot underflow the
//! normalized result.

use crate::config::{BetaMode, ClampMode, InteractionConfig};
use crate::error::{Error, Result};
use crate::qpm::{
    idler_from_energy, solve_poling_period, solve_pump_angles, solve_signal_idler,
    PeriodSolution, PhaseMatchSolution,
};
use crate::real::{lambda_nm_from_omega, omega_from_lambda_nm, real, sinc, Real};

/// Positive argument at which `sinc` falls to one half.
pub const HALF_MAX_SINC_ARG: f64 = 1.895_494_267_033_981;

/// Number of grid intervals used by automatically sized slice windows.
const AUTO_WINDOW_POINTS: usize = 2400;

/// Automatic windows span this many estimated widths either side of the root.
const AUTO_WINDOW_SPAN_WIDTHS: f64 = 3.0;

/// Uniform signal-wavelength grid for a spectral slice.
#[derive(Debug, Clone, Copy)]
pub struct LambdaWindow<R = f64> {
    pub lo_nm: R,
    pub hi_nm: R,
    pub step_nm: R,
}

impl<R: Real> LambdaWindow<R> {
    pub fn new(lo_nm: R, hi_nm: R, step_nm: R) -> Result<Self> {
        if !(lo_nm.is_finite() && hi_nm.is_finite() && step_nm.is_finite()) {
            return Err(Error::NonFinite { what: "window bound" });
        }
        if !(lo_nm < hi_nm) || !(step_nm > R::zero()) {
            return Err(Error::invalid("window", "requires lo < hi and step > 0"));
        }
        Ok(LambdaWindow {
            lo_nm,
            hi_nm,
            step_nm,
        })
    }

    pub fn nodes(&self) -> Vec<R> {
        let n = ((self.hi_nm - self.lo_nm) / self.step_nm + real(1e-9))
            .floor()
            .to_usize()
            .unwrap_or(0)
            .max(1);
        (0..=n)
            .map(|k| (self.lo_nm + self.step_nm * real(k as f64)).min(self.hi_nm))
            .collect()
    }
}

/// Uniform pump-angle grid for a spectral map.
#[derive(Debug, Clone, Copy)]
pub struct ThetaRange<R = f64> {
    pub lo_deg: R,
    pub hi_deg: R,
    pub step_deg: R,
}

impl<R: Real> ThetaRange<R> {
    pub fn new(lo_deg: R, hi_deg: R, step_deg: R) -> Result<Self> {
        if !(lo_deg < hi_deg) || !(step_deg > R::zero()) {
            return Err(Error::invalid("theta range", "requires lo < hi and step > 0"));
        }
        Ok(ThetaRange {
            lo_deg,
            hi_deg,
            step_deg,
        })
    }

    pub fn nodes(&self) -> Vec<R> {
        let n = ((self.hi_deg - self.lo_deg) / self.step_deg + real(1e-9))
            .floor()
            .to_usize()
            .unwrap_or(0)
            .max(1);
        (0..=n)
            .map(|k| (self.lo_deg + self.step_deg * real(k as f64)).min(self.hi_deg))
            .collect()
    }
}

/// A gridded spectral slice, normalized to unit peak.
#[derive(Debug, Clone)]
pub struct SpectrumSlice<R = f64> {
    pub lambda_s_nm: Vec<R>,
    /// Normalized intensity, max exactly 1.
    pub intensity: Vec<R>,
    /// Wavelength of the interior peak, when one exists.
    pub peak_lambda_nm: Option<R>,
    /// Full width at half maximum (nm) when both crossings lie in-window.
    pub fwhm_nm: Option<R>,
    /// False when the maximum sits on the window edge.
    pub in_window_peak: bool,
    /// Grid nodes between the half-maximum crossings.
    pub points_in_fwhm: Option<usize>,
    pub beta_mode: BetaMode,
    pub clamp: ClampMode,
    pub fingerprint: String,
}

/// Angle-by-wavelength map of normalized intensity.
#[derive(Debug, Clone)]
pub struct SpectralMap<R = f64> {
    pub theta_deg: Vec<R>,
    pub lambda_s_nm: Vec<R>,
    /// Rows indexed by angle, normalized to a global unit maximum.
    pub intensity: Vec<Vec<R>>,
    /// Cells that failed range or guidance checks and were zeroed.
    pub failed_cells: usize,
    pub fingerprint: String,
}

fn clamp_bracket<R: Real>(bracket: R, clamp: ClampMode) -> R {
    match clamp {
        ClampMode::Literal => bracket.max(R::zero()),
        ClampMode::Squared => bracket * bracket,
    }
}

/// Sum of sinc terms over the active grating wavenumbers; symmetric under
/// `dbeta -> -dbeta` when the wavenumber set is sign-symmetric.
pub fn sinc_bracket<R: Real>(delta_beta: R, gratings: &[R], half_length_m: R) -> R {
    gratings
        .iter()
        .map(|&k| sinc((delta_beta - k) * half_length_m))
        .sum()
}

fn grating_set<R: Real>(cfg: &InteractionConfig<R>, orders: &[i32]) -> Result<Vec<R>> {
    if orders.is_empty() {
        return Err(Error::invalid("spectral orders", "list must not be empty"));
    }
    orders
        .iter()
        .map(|&m| cfg.poling.grating_wavenumber(m))
        .collect()
}

/// Natural log of the waveguide prefactor
/// `0.5 ln(pi / (g_s^2 + g_i^2)) - zeta^2 / (2 (g_s^2 + g_i^2))`.
fn log_prefactor<R: Real>(cfg: &InteractionConfig<R>, lambda_s_nm: R, lambda_i_nm: R) -> Result<R> {
    let gs = cfg
        .waveguide
        .mode_gamma(omega_from_lambda_nm(lambda_s_nm))?;
    let gi = cfg
        .waveguide
        .mode_gamma(omega_from_lambda_nm(lambda_i_nm))?;
    let s = gs * gs + gi * gi;
    if !(s > R::zero()) {
        return Err(Error::invalid(
            "alpha",
            "waveguide prefactor requires a positive gradient constant",
        ));
    }
    let zeta = cfg.pump.zeta();
    Ok(real::<R>(0.5) * (R::PI() / s).ln() - zeta * zeta / (real::<R>(2.0) * s))
}

/// The waveguide prefactor on its own (for flatness checks).
pub fn waveguide_prefactor<R: Real>(cfg: &InteractionConfig<R>, lambda_s_nm: R) -> Result<R> {
    let lambda_i_nm = idler_from_energy(cfg.pump.wavelength_nm, lambda_s_nm)?;
    Ok(log_prefactor(cfg, lambda_s_nm, lambda_i_nm)?.exp())
}

fn check_single_mode<R: Real>(cfg: &InteractionConfig<R>, lambda_nm: R) -> Result<()> {
    if cfg.beta_mode == BetaMode::Guided
        && !cfg
            .waveguide
            .is_single_mode(omega_from_lambda_nm(lambda_nm))?
    {
        return Err(Error::invalid(
            "config",
            format!("waveguide is not single-mode at {lambda_nm} nm"),
        ));
    }
    Ok(())
}

/// Unnormalized spectral density at one signal wavelength.
pub fn spectrum_value<R: Real>(cfg: &InteractionConfig<R>, lambda_s_nm: R) -> Result<R> {
    let lambda_i_nm = idler_from_energy(cfg.pump.wavelength_nm, lambda_s_nm)?;
    check_single_mode(cfg, lambda_s_nm)?;
    check_single_mode(cfg, lambda_i_nm)?;
    let gratings = grating_set(cfg, &cfg.spectral_orders)?;
    let half_length = cfg.waveguide.length_m / real(2.0);
    let bracket = sinc_bracket(cfg.delta_beta(lambda_s_nm)?, &gratings, half_length);
    let log_pref = log_prefactor(cfg, lambda_s_nm, lambda_i_nm)?;
    Ok(log_pref.exp() * clamp_bracket(bracket, cfg.clamp))
}

/// Locate the half-maximum crossings around the global peak by linear
/// interpolation. Returns (left_nm, right_nm, nodes inside).
fn half_max_crossings<R: Real>(
    lambda: &[R],
    values: &[R],
    peak_idx: usize,
) -> Option<(R, R, usize)> {
    let half = real::<R>(0.5);
    let interp = |i: usize, j: usize| -> R {
        let (x0, x1, y0, y1) = (lambda[i], lambda[j], values[i], values[j]);
        x0 + (half - y0) * (x1 - x0) / (y1 - y0)
    };
    let mut left = None;
    for i in (0..peak_idx).rev() {
        if values[i] < half {
            left = Some(interp(i, i + 1));
            break;
        }
    }
    let mut right = None;
    for (i, v) in values.iter().enumerate().skip(peak_idx + 1) {
        if *v < half {
            right = Some(interp(i - 1, i));
            break;
        }
    }

    let (l, r) = (left?, right?);
    let inside = lambda.iter().filter(|&&x| x >= l && x <= r).count();
    Some((l, r, inside))
}

/// Evaluate a normalized slice over an explicit window.
pub fn spectrum_slice<R: Real>(
    cfg: &InteractionConfig<R>,
    window: &LambdaWindow<R>,
) -> Result<SpectrumSlice<R>> {
    let lambda = window.nodes();
    let gratings = grating_set(cfg, &cfg.spectral_orders)?;
    let half_length = cfg.waveguide.length_m / real(2.0);

    let mut log_pref = Vec::with_capacity(lambda.len());
    let mut bracket = Vec::with_capacity(lambda.len());
    for &ls in &lambda {
        let li = idler_from_energy(cfg.pump.wavelength_nm, ls)?;
        check_single_mode(cfg, ls)?;
        check_single_mode(cfg, li)?;
        log_pref.push(log_prefactor(cfg, ls, li)?);
        bracket.push(clamp_bracket(
            sinc_bracket(cfg.delta_beta(ls)?, &gratings, half_length),
            cfg.clamp,
        ));
    }
    let l_ref = log_pref
        .iter()
        .cloned()
        .fold(R::neg_infinity(), R::max);
    let mut intensity: Vec<R> = log_pref
        .iter()
        .zip(&bracket)
        .map(|(&lp, &b)| (lp - l_ref).exp() * b)
        .collect();
    let (mut peak_idx, mut peak_val) = (0usize, R::neg_infinity());
    for (i, &v) in intensity.iter().enumerate() {
        if v > peak_val {
            peak_val = v;
            peak_idx = i;
        }
    }
    if !(peak_val > R::zero()) {
        return Err(Error::invalid(
            "window",
            "spectral density vanishes everywhere in the window",
        ));
    }
    for v in &mut intensity {
        *v = *v / peak_val;
    }

    let interior = peak_idx > 0 && peak_idx + 1 < intensity.len();
    let crossings = if interior {
        half_max_crossings(&lambda, &intensity, peak_idx)
    } else {
        None
    };
    Ok(SpectrumSlice {
        peak_lambda_nm: interior.then(|| lambda[peak_idx]),
        fwhm_nm: crossings.map(|(l, r, _)| r - l),
        in_window_peak: interior,
        points_in_fwhm: crossings.map(|(_, _, n)| n),
        lambda_s_nm: lambda,
        intensity,
        beta_mode: cfg.beta_mode,
        clamp: cfg.clamp,
        fingerprint: cfg.fingerprint(),
    })
}

/// Estimate the main-lobe width at a root from the local slope and curvature
/// of the mismatch, and size a window spanning a few widths around it.
pub fn auto_window<R: Real>(cfg: &InteractionConfig<R>, root_lambda_nm: R) -> Result<LambdaWindow<R>> {
    let omega0 = omega_from_lambda_nm(root_lambda_nm);
    let d_omega = omega0 * real(1e-6);
    let eval = |omega: R| cfg.delta_beta(lambda_nm_from_omega(omega));
    let f_minus = eval(omega0 - d_omega)?;
    let f_0 = eval(omega0)?;
    let f_plus = eval(omega0 + d_omega)?;
    let slope = (f_plus - f_minus) / (real::<R>(2.0) * d_omega);
    let curvature = (f_plus - f_0 - f_0 + f_minus) / (d_omega * d_omega);

    // full widths (rad/s) implied by a linear / quadratic mismatch profile
    let span_mismatch = real::<R>(4.0 * HALF_MAX_SINC_ARG) / cfg.waveguide.length_m;
    let mut width: Option<R> = None;
    if slope.abs() > R::zero() {
        width = Some(span_mismatch / slope.abs());
    }
    if curvature.abs() > R::zero() {
        let w_curv = real::<R>(2.0) * (span_mismatch / curvature.abs()).sqrt();
        width = Some(width.map_or(w_curv, |w| w.min(w_curv)));
    }
    let width = width.ok_or_else(|| {
        Error::invalid("auto window", "mismatch profile is flat at the root")
    })?;

    let half_span = width * real(AUTO_WINDOW_SPAN_WIDTHS);
    let (scan_lo, scan_hi) = cfg.lambda_scan_window_nm()?;
    let lo_nm = lambda_nm_from_omega(omega0 + half_span).max(scan_lo);
    let hi_nm = lambda_nm_from_omega((omega0 - half_span).max(omega0 * real(1e-3))).min(scan_hi);
    if !(lo_nm < hi_nm) {
        return Err(Error::invalid("auto window", "window collapsed after clipping"));
    }
    let step_nm = (hi_nm - lo_nm) / real(AUTO_WINDOW_POINTS as f64);
    LambdaWindow::new(lo_nm, hi_nm, step_nm)
}

/// Solve for the quasi-phase-matched roots and slice around the one nearest
/// `target_lambda_nm` (nearest the degenerate wavelength when no target is
/// given).
///
/// When another root falls inside the window, the window is clipped at the
/// inter-root midpoint so the reported bandwidth is that of the target peak
/// alone — unless the two lobes have merged (the bracket between them stays
/// above half maximum), in which case they form one spectral feature and the
/// window keeps both.
pub fn auto_slice<R: Real>(
    cfg: &InteractionConfig<R>,
    target_lambda_nm: Option<R>,
) -> Result<SpectrumSlice<R>> {
    let roots = solve_signal_idler(cfg, &cfg.spectral_orders)?;
    if roots.is_empty() {
        return Err(Error::invalid(
            "spectrum",
            "no quasi-phase-matching root inside the dispersion window; pass an explicit window",
        ));
    }
    let target = target_lambda_nm.unwrap_or(cfg.pump.wavelength_nm * real(2.0));
    let root = *roots
        .iter()
        .min_by(|a, b| {
            (a.lambda_s_nm - target)
                .abs()
                .partial_cmp(&(b.lambda_s_nm - target).abs())
                .unwrap()
        })
        .expect("roots is non-empty");
    let window = auto_window(cfg, root.lambda_s_nm)?;

    let gratings = grating_set(cfg, &cfg.spectral_orders)?;
    let half_length = cfg.waveguide.length_m / real(2.0);
    let bracket_at = |l: R| -> Result<R> {
        Ok(clamp_bracket(
            sinc_bracket(cfg.delta_beta(l)?, &gratings, half_length),
            cfg.clamp,
        ))
    };
    let peak_level = bracket_at(root.lambda_s_nm)?;
    let omega_root = omega_from_lambda_nm(root.lambda_s_nm);
    let (mut lo, mut hi) = (window.lo_nm, window.hi_nm);
    for other in &roots {
        let separation = (other.lambda_s_nm - root.lambda_s_nm).abs();
        if separation < real(0.5) || other.lambda_s_nm <= lo || other.lambda_s_nm >= hi {
            continue;
        }
        let omega_mid =
            (omega_root + omega_from_lambda_nm(other.lambda_s_nm)) / real(2.0);
        let lambda_mid = lambda_nm_from_omega(omega_mid);
        if bracket_at(lambda_mid)? >= real::<R>(0.5) * peak_level {
            continue; // merged lobes form one feature
        }
        if other.lambda_s_nm > root.lambda_s_nm {
            hi = hi.min(lambda_mid);
        } else {
            lo = lo.max(lambda_mid);
        }
    }
    let step = (hi - lo) / real(AUTO_WINDOW_POINTS as f64);
    spectrum_slice(cfg, &LambdaWindow::new(lo, hi, step)?)
}

/// One row of the bandwidth-ratio table.
#[derive(Debug, Clone)]
pub struct BandwidthRatioRow<R = f64> {
    pub lambda_s_nm: R,
    /// `lambda_s / (2 lambda_p)`.
    pub lambda_norm: R,
    pub fwhm_co_nm: Option<R>,
    pub fwhm_counter_nm: Option<R>,
    pub ratio_co: Option<R>,
    pub ratio_counter: Option<R>,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct BandwidthRatioTable<R = f64> {
    pub rows: Vec<BandwidthRatioRow<R>>,
    pub reference_lambda_nm: R,
}

/// Bandwidths of both direction configurations across a list of central
/// signal wavelengths, each divided by the bandwidth at the reference
/// wavelength.
///
/// Per row the counter-propagating case is phase-matched by solving the pump
/// angle at the template's fixed poling period (grating order +1, the branch
/// that reaches degeneracy), and the co-propagating case by solving the
/// poling period at normal incidence. Unsolvable rows are flagged and the
/// sweep continues.
pub fn bandwidth_ratio_sweep<R: Real>(
    cfg: &InteractionConfig<R>,
    signal_wavelengths_nm: &[R],
    reference_nm: R,
) -> Result<BandwidthRatioTable<R>> {
    let close = |a: R, b: R| (a - b).abs() < real(1e-9);
    if !signal_wavelengths_nm.iter().any(|&l| close(l, reference_nm)) {
        return Err(Error::invalid(
            "reference wavelength",
            "must be one of the sampled signal wavelengths",
        ));
    }

    let mut counter_cfg = cfg.clone();
    counter_cfg.dirs = crate::qpm::DirectionPair::counter();
    let co_base = {
        let mut c = cfg.with_theta_deg(R::zero())?;
        c.dirs = crate::qpm::DirectionPair::co();
        c
    };

    let mut rows: Vec<BandwidthRatioRow<R>> = Vec::new();
    for &ls in signal_wavelengths_nm {
        let lambda_norm = ls / (real::<R>(2.0) * cfg.pump.wavelength_nm);
        let mut note: Vec<String> = Vec::new();

        let fwhm_counter = (|| -> Result<Option<R>> {
            let li = idler_from_energy(cfg.pump.wavelength_nm, ls)?;
            let roots = solve_pump_angles(&counter_cfg, ls, li, &[1])?;
            let Some(first) = roots.first() else {
                return Ok(None);
            };
            let slice = auto_slice(&counter_cfg.with_theta_deg(first.theta_deg)?, Some(ls))?;
            Ok(slice.fwhm_nm)
        })()
        .unwrap_or_else(|e| {
            note.push(format!("counter: {e}"));
            None
        });
        if fwhm_counter.is_none() && note.is_empty() {
            note.push("counter: no pump-angle root at this period".to_string());
        }

        let fwhm_co = (|| -> Result<Option<R>> {
            let li = idler_from_energy(cfg.pump.wavelength_nm, ls)?;
            match solve_poling_period(&co_base, ls, li, 1)? {
                PeriodSolution::Finite(sol) => {
                    let slice = auto_slice(&co_base.with_period_m(sol.period_m)?, Some(ls))?;
                    Ok(slice.fwhm_nm)
                }
                PeriodSolution::Divergent { .. } => Ok(None),
            }
        })()
        .unwrap_or_else(|e| {
            note.push(format!("co: {e}"));
            None
        });

        rows.push(BandwidthRatioRow {
            lambda_s_nm: ls,
            lambda_norm,
            fwhm_co_nm: fwhm_co,
            fwhm_counter_nm: fwhm_counter,
            ratio_co: None,
            ratio_counter: None,
            note: if note.is_empty() {
                None
            } else {
                Some(note.join("; "))
            },
        });
    }

    let reference = rows
        .iter()
        .find(|r| close(r.lambda_s_nm, reference_nm))
        .expect("reference row exists");
    let (ref_co, ref_counter) = (reference.fwhm_co_nm, reference.fwhm_counter_nm);
    let (ref_co, ref_counter) = match (ref_co, ref_counter) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::invalid(
                "reference wavelength",
                "bandwidth at the reference wavelength could not be computed",
            ))
        }
    };
    for row in &mut rows {
        row.ratio_co = row.fwhm_co_nm.map(|f| f / ref_co);
        row.ratio_counter = row.fwhm_counter_nm.map(|f| f / ref_counter);
    }
    Ok(BandwidthRatioTable {
        rows,
        reference_lambda_nm: reference_nm,
    })
}

/// Normalized intensity over an angle-by-wavelength grid. Cells whose
/// wavelengths fall outside the dispersion or guidance domain are zeroed and
/// counted.
pub fn spectral_map<R: Real>(
    cfg: &InteractionConfig<R>,
    thetas: &ThetaRange<R>,
    window: &LambdaWindow<R>,
    orders: &[i32],
) -> Result<SpectralMap<R>> {
    let gratings = grating_set(cfg, orders)?;
    let theta_nodes = thetas.nodes();
    let lambda_nodes = window.nodes();
    let half_length = cfg.waveguide.length_m / real(2.0);
    let ss: R = real(cfg.dirs.signal_sign as f64);
    let si: R = real(cfg.dirs.idler_sign as f64);

    // per-wavelength constants; a failure marks the whole column
    struct Column<R> {
        neg_field_sum: R,
        half_log: R,
        inv_two_s: R,
    }
    let mut columns: Vec<Option<Column<R>>> = Vec::with_capacity(lambda_nodes.len());
    let mut failed_cells = 0usize;
    for &ls in &lambda_nodes {
        let col = (|| -> Result<Column<R>> {
            let li = idler_from_energy(cfg.pump.wavelength_nm, ls)?;
            check_single_mode(cfg, ls)?;
            check_single_mode(cfg, li)?;
            let bs = cfg.beta_field(ls)?;
            let bi = cfg.beta_field(li)?;
            let gs = cfg.waveguide.mode_gamma(omega_from_lambda_nm(ls))?;
            let gi = cfg.waveguide.mode_gamma(omega_from_lambda_nm(li))?;
            let s = gs * gs + gi * gi;
            if !(s > R::zero()) {
                return Err(Error::invalid(
                    "alpha",
                    "waveguide prefactor requires a positive gradient constant",
                ));
            }
            Ok(Column {
                neg_field_sum: -(ss * bs + si * bi),
                half_log: real::<R>(0.5) * (R::PI() / s).ln(),
                inv_two_s: R::one() / (real::<R>(2.0) * s),
            })
        })();
        match col {
            Ok(c) => columns.push(Some(c)),
            Err(_) => {
                columns.push(None);
                failed_cells += theta_nodes.len();
            }
        }
    }

    // log-prefactor reference: the exponent is largest at the smallest zeta,
    // i.e. the smallest angle of the range
    let pump_lo = cfg.with_theta_deg(theta_nodes[0])?.pump;
    let zeta2_lo = pump_lo.zeta() * pump_lo.zeta();
    let l_ref = columns
        .iter()
        .flatten()
        .map(|c| c.half_log - zeta2_lo * c.inv_two_s)
        .fold(R::neg_infinity(), R::max);
    if !l_ref.is_finite() {
        return Err(Error::invalid("map", "no evaluable cells in the window"));
    }

    let mut intensity: Vec<Vec<R>> = Vec::with_capacity(theta_nodes.len());
    let mut global_max = R::zero();
    for &theta in &theta_nodes {
        let pump = cfg.with_theta_deg(theta)?.pump;
        let beta_p = pump.beta();
        let zeta2 = pump.zeta() * pump.zeta();
        let mut row = Vec::with_capacity(lambda_nodes.len());
        for col in &columns {
            let v = match col {
                Some(c) => {
                    let bracket = clamp_bracket(
                        sinc_bracket(beta_p + c.neg_field_sum, &gratings, half_length),
                        cfg.clamp,
                    );
                    let log_pref = c.half_log - zeta2 * c.inv_two_s;
                    (log_pref - l_ref).exp() * bracket
                }
                None => R::zero(),
            };
            global_max = global_max.max(v);
            row.push(v);
        }
        intensity.push(row);
    }
    if !(global_max > R::zero()) {
        return Err(Error::invalid(
            "map",
            "spectral density vanishes on the whole grid",
        ));
    }
    for row in &mut intensity {
        for v in row {
            *v = *v / global_max;
        }
    }
    Ok(SpectralMap {
        theta_deg: theta_nodes,
        lambda_s_nm: lambda_nodes,
        intensity,
        failed_cells,
        fingerprint: cfg.fingerprint(),
    })
}

/// One component of the discrete frequency superposition.
#[derive(Debug, Clone, Copy)]
pub struct SuperpositionComponent<R = f64> {
    pub lambda_s_nm: R,
    pub lambda_i_nm: R,
    /// Fraction of the total spectral weight in this peak; the components
    /// sum to 1.
    pub weight: R,
}

/// Weights of the spectral peaks at a pump angle: each quasi-phase-matched
/// peak is sliced, the commonly normalized density is integrated over
/// angular frequency across the peak's window, and the integrals are
/// renormalized to unit total.
pub fn superposition_weights<R: Real>(
    cfg: &InteractionConfig<R>,
    theta_deg: R,
) -> Result<Vec<SuperpositionComponent<R>>> {
    let cfg_t = cfg.with_theta_deg(theta_deg)?;
    let roots: Vec<PhaseMatchSolution<R>> = solve_signal_idler(&cfg_t, &cfg_t.spectral_orders)?;
    if roots.is_empty() {
        return Ok(Vec::new());
    }
    let gratings = grating_set(&cfg_t, &cfg_t.spectral_orders)?;
    let half_length = cfg_t.waveguide.length_m / real(2.0);

    struct PeakGrid<R> {
        lambda_s_nm: R,
        lambda_i_nm: R,
        omegas: Vec<R>,
        log_pref: Vec<R>,
        bracket: Vec<R>,
    }
    let mut grids: Vec<PeakGrid<R>> = Vec::new();
    for root in &roots {
        let window = auto_window(&cfg_t, root.lambda_s_nm)?;
        let lambda = window.nodes();
        let mut omegas = Vec::with_capacity(lambda.len());
        let mut log_pref = Vec::with_capacity(lambda.len());
        let mut bracket = Vec::with_capacity(lambda.len());
        for &ls in &lambda {
            let li = idler_from_energy(cfg_t.pump.wavelength_nm, ls)?;
            omegas.push(omega_from_lambda_nm(ls));
            log_pref.push(log_prefactor(&cfg_t, ls, li)?);
            bracket.push(clamp_bracket(
                sinc_bracket(cfg_t.delta_beta(ls)?, &gratings, half_length),
                cfg_t.clamp,
            ));
        }
        grids.push(PeakGrid {
            lambda_s_nm: root.lambda_s_nm,
            lambda_i_nm: root.lambda_i_nm,
            omegas,
            log_pref,
            bracket,
        });
    }
    let l_ref = grids
        .iter()
        .flat_map(|g| g.log_pref.iter().cloned())
        .fold(R::neg_infinity(), R::max);

    let mut integrals = Vec::with_capacity(grids.len());
    for g in &grids {
        let values: Vec<R> = g
            .log_pref
            .iter()
            .zip(&g.bracket)
            .map(|(&lp, &b)| (lp - l_ref).exp() * b)
            .collect();
        let mut integral = R::zero();
        for i in 1..values.len() {
            let d_omega = (g.omegas[i - 1] - g.omegas[i]).abs();
            integral = integral + (values[i - 1] + values[i]) / real(2.0) * d_omega;
        }
        integrals.push(integral);
    }
    let total: R = integrals.iter().cloned().sum();
    if !(total > R::zero()) {
        return Ok(Vec::new());
    }
    let mut components: Vec<SuperpositionComponent<R>> = grids
        .iter()
        .zip(&integrals)
        .map(|(g, &i)| SuperpositionComponent {
            lambda_s_nm: g.lambda_s_nm,
            lambda_i_nm: g.lambda_i_nm,
            weight: i / total,
        })
        .collect();
    components.sort_by(|a, b| a.lambda_s_nm.partial_cmp(&b.lambda_s_nm).unwrap());
    Ok(components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::builtin_ppln_e;
    use crate::qpm::{DirectionPair, PolingSpec};
    use crate::waveguide::WaveguideSpec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg_at(theta_deg: f64, period_um: f64, dirs: DirectionPair) -> InteractionConfig<f64> {
        let poling = PolingSpec::with_period(period_um * 1e-6).unwrap();
        let wg = WaveguideSpec::new(4e5, 1e-3, builtin_ppln_e()).unwrap();
        InteractionConfig::new(532.0, theta_deg, poling, wg, dirs).unwrap()
    }

    #[test]
    fn matched_sinc_term_is_unity_at_a_root() {
        let period = 6.8e-6;
        let k1 = std::f64::consts::TAU / period;
        let half_length = 0.5e-3;
        // at dbeta = K_1 the matched term is sinc(0) = 1 and the opposite
        // order contributes sinc(K_1 L)
        let bracket = sinc_bracket(k1, &[-k1, k1], half_length);
        let expected = 1.0 + crate::real::sinc(2.0 * k1 * half_length);
        assert_relative_eq!(bracket, expected, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn bracket_symmetric_under_mismatch_negation(
            delta in -5e6f64..5e6,
            period_um in 4.0f64..10.0,
            length_mm in 0.5f64..2.0,
        ) {
            let k1 = std::f64::consts::TAU / (period_um * 1e-6);
            let half = length_mm * 1e-3 / 2.0;
            let plus = sinc_bracket(delta, &[-k1, k1], half);
            let minus = sinc_bracket(-delta, &[-k1, k1], half);
            prop_assert!((plus - minus).abs() <= 1e-12 * plus.abs().max(1.0));
        }
    }

    #[test]
    fn doubling_length_halves_first_zero_offset() {
        let k1 = std::f64::consts::TAU / 6.8e-6;
        for length in [1e-3, 2e-3] {
            // the matched term vanishes at |dbeta - K_1| = 2 pi / L
            let offset = std::f64::consts::TAU / length;
            let term = crate::real::sinc((k1 + offset - k1) * length / 2.0);
            assert!(term.abs() < 1e-12, "L = {length}");
        }
    }

    #[test]
    fn spectrum_value_checks_domain() {
        let cfg = cfg_at(80.0, 6.8, DirectionPair::counter());
        // out-of-range signal propagates a range error
        assert!(spectrum_value(&cfg, 3500.0).is_err());
        // a zero-gradient guide has no Gaussian prefactor
        let poling = PolingSpec::with_period(6.8e-6).unwrap();
        let wg = WaveguideSpec::new(0.0, 1e-3, builtin_ppln_e()).unwrap();
        let flat = InteractionConfig::new(532.0, 80.0, poling, wg, DirectionPair::counter()).unwrap();
        assert!(spectrum_value(&flat, 1000.0).is_err());
    }

    #[test]
    fn guided_mode_requires_single_mode_guide() {
        let mut cfg = cfg_at(80.0, 6.8, DirectionPair::counter());
        cfg.beta_mode = BetaMode::Guided;
        // fine at the default gradient
        spectrum_value(&cfg, 1000.0).unwrap();
        // alpha = 0 makes beta = beta_c, which is not single-mode
        let poling = PolingSpec::with_period(6.8e-6).unwrap();
        let wg = WaveguideSpec::new(0.0, 1e-3, builtin_ppln_e()).unwrap();
        let mut flat =
            InteractionConfig::new(532.0, 80.0, poling, wg, DirectionPair::counter()).unwrap();
        flat.beta_mode = BetaMode::Guided;
        assert!(spectrum_value(&flat, 1000.0).is_err());
    }

    #[test]
    fn slice_normalization_and_peak_location() {
        let cfg = cfg_at(88.2, 6.8, DirectionPair::counter());
        let slice = auto_slice(&cfg, None).unwrap();
        let max = slice.intensity.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(max, 1.0);
        assert!(slice.in_window_peak);
        assert!(slice.points_in_fwhm.unwrap() >= 50);
        // peak sits on the solved root to within two grid steps
        let root = crate::qpm::solve_signal_idler(&cfg, &[1]).unwrap()[0].lambda_s_nm;
        let step = slice.lambda_s_nm[1] - slice.lambda_s_nm[0];
        assert!(
            (slice.peak_lambda_nm.unwrap() - root).abs() <= 2.0 * step,
            "peak {} vs root {root}",
            slice.peak_lambda_nm.unwrap()
        );
    }

    #[test]
    fn fwhm_stable_under_grid_refinement() {
        let cfg = cfg_at(88.2, 6.8, DirectionPair::counter());
        let window = auto_window(&cfg, crate::qpm::solve_signal_idler(&cfg, &[1]).unwrap()[0].lambda_s_nm).unwrap();
        let coarse = spectrum_slice(&cfg, &window).unwrap().fwhm_nm.unwrap();
        let fine = spectrum_slice(
            &cfg,
            &LambdaWindow::new(window.lo_nm, window.hi_nm, window.step_nm / 2.0).unwrap(),
        )
        .unwrap()
        .fwhm_nm
        .unwrap();
        assert!(
            (coarse - fine).abs() / fine < 5e-3,
            "coarse {coarse} vs fine {fine}"
        );
    }

    #[test]
    fn edge_maximum_is_flagged_without_fwhm() {
        // window on the falling main-lobe tail of the degenerate
        // co-propagating spectrum: maximum lands on the window edge
        let cfg = cfg_at(0.0, 6.8, DirectionPair::co());
        let slice = spectrum_slice(&cfg, &LambdaWindow::new(1100.0, 1150.0, 0.05).unwrap()).unwrap();
        assert!(!slice.in_window_peak);
        assert!(slice.fwhm_nm.is_none());
        assert!(slice.peak_lambda_nm.is_none());
        // normalization still holds
        let max = slice.intensity.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(max, 1.0);
    }

    #[test]
    fn prefactor_is_flat_across_slices() {
        for (theta, period_um, dirs, target) in [
            (0.0, 6.8, DirectionPair::co(), None),
            (88.2, 6.8, DirectionPair::counter(), None),
            (69.7, 6.8, DirectionPair::counter(), Some(810.0)),
        ] {
            let cfg = cfg_at(theta, period_um, dirs);
            // flatness is judged over the window the slice is actually
            // computed on: a broad explicit window for the co-propagating
            // case, the auto window otherwise
            let (lo, hi) = if dirs == DirectionPair::co() {
                (900.0, 1250.0)
            } else {
                let s = auto_slice(&cfg, target).unwrap();
                (s.lambda_s_nm[0], *s.lambda_s_nm.last().unwrap())
            };
            let mut pmin = f64::INFINITY;
            let mut pmax = f64::NEG_INFINITY;
            for k in 0..=400 {
                let l = lo + (hi - lo) * k as f64 / 400.0;
                let p = waveguide_prefactor(&cfg, l).unwrap();
                pmin = pmin.min(p);
                pmax = pmax.max(p);
            }
            let variation = (pmax - pmin) / pmax;
            assert!(variation < 0.01, "prefactor varies {variation} at theta {theta}");
        }
    }

    #[test]
    fn weights_at_80_degrees_split_between_two_pairs() {
        let cfg = cfg_at(0.0, 6.8, DirectionPair::counter());
        let comps = superposition_weights(&cfg, 80.0).unwrap();
        assert_eq!(comps.len(), 2);
        assert!((comps[0].lambda_s_nm - 880.0).abs() < 15.0);
        assert!((comps[0].lambda_i_nm - 1350.0).abs() < 15.0);
        assert!((comps[1].lambda_s_nm - 930.0).abs() < 15.0);
        assert!((comps[1].lambda_i_nm - 1240.0).abs() < 15.0);
        let total: f64 = comps.iter().map(|c| c.weight).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-12);
        for c in &comps {
            assert!(c.weight > 0.3 && c.weight < 0.7, "weight = {}", c.weight);
        }
    }

    #[test]
    fn symmetric_pairs_weigh_half_each() {
        // at grazing incidence the pump contributes nothing and the two
        // grating orders produce mirror-image peaks around degeneracy
        let cfg = cfg_at(0.0, 6.8, DirectionPair::counter());
        let comps = superposition_weights(&cfg, 90.0).unwrap();
        assert_eq!(comps.len(), 2);
        assert_relative_eq!(comps[0].weight, 0.5, max_relative = 1e-6);
        assert_relative_eq!(comps[1].weight, 0.5, max_relative = 1e-6);
    }

    #[test]
    fn single_peak_weighs_one() {
        let mut cfg = cfg_at(88.2, 6.8, DirectionPair::counter());
        cfg.spectral_orders = vec![1];
        let comps = superposition_weights(&cfg, 88.2).unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].weight, 1.0);
    }

    #[test]
    fn ratio_table_reference_is_exactly_one() {
        let cfg = cfg_at(0.0, 6.8, DirectionPair::counter());
        let table = bandwidth_ratio_sweep(&cfg, &[880.0, 940.0], 880.0).unwrap();
        let r = &table.rows[0];
        assert_eq!(r.ratio_co.unwrap(), 1.0);
        assert_eq!(r.ratio_counter.unwrap(), 1.0);
        // and the other row exceeds it in the co configuration
        assert!(table.rows[1].ratio_co.unwrap() > 1.0);
    }

    #[test]
    fn ratio_table_requires_reference_in_list() {
        let cfg = cfg_at(0.0, 6.8, DirectionPair::counter());
        assert!(bandwidth_ratio_sweep(&cfg, &[900.0, 940.0], 880.0).is_err());
    }

    #[test]
    fn map_cells_normalized_and_failures_counted() {
        let cfg = cfg_at(0.0, 6.8, DirectionPair::counter());
        let thetas = ThetaRange::new(79.0, 81.0, 0.5).unwrap();
        // the last columns push the idler wavelength out of the valid window
        let window = LambdaWindow::new(860.0, 960.0, 1.0).unwrap();
        let map = spectral_map(&cfg, &thetas, &window, &[-1, 1]).unwrap();
        let mut max = f64::MIN;
        for row in &map.intensity {
            for &v in row {
                assert!((0.0..=1.0).contains(&v));
                max = max.max(v);
            }
        }
        assert_eq!(max, 1.0);
        assert_eq!(map.failed_cells, 0);

        // now a window that walks off the dispersion range entirely
        let window = LambdaWindow::new(3300.0, 3450.0, 10.0).unwrap();
        let map = spectral_map(&cfg, &thetas, &window, &[-1, 1]);
        // all-zero maps are rejected rather than silently normalized
        assert!(map.is_err() || map.unwrap().failed_cells > 0);
    }
}
