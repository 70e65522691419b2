//! Quasi-phase-matching residual solvers: poling period, pump angle, and
//! signal/idler wavelength, plus the sweep driver behind the tuning-curve
//! artifacts.
//!
//! The residual is `dbeta' = beta_p - s_s beta_s - s_i beta_i - K_m`, where
//! `beta_p = k_p cos(theta)` is the longitudinal constant of the unguided
//! plane-wave pump, `s_s`/`s_i` are direction signs (idler negative for
//! counter-propagation), and `K_m = 2 pi m / period` is the grating
//! wavenumber. Perfect quasi-phase matching is `dbeta' = 0`.

use crate::config::InteractionConfig;
use crate::dispersion::SellmeierModel;
use crate::error::{Error, Result};
use crate::real::{deg_to_rad, real, Real};
use crate::rootfind::{scan_roots, scan_roots_tabulated};

/// Smallest poling period currently considered fabricable (m).
pub const FEASIBLE_POLING_MIN_M: f64 = 4.0e-6;

/// Default bracketing grid step for pump-angle solves (degrees).
pub const THETA_GRID_STEP_DEG: f64 = 0.01;

/// Default bracketing grid step for signal-wavelength solves (nm).
pub const LAMBDA_GRID_STEP_NM: f64 = 0.1;

/// Denominators below this fraction of the pump wavenumber are reported as a
/// divergent period (`K_m -> 0`) rather than a finite solution.
const DIVERGENT_DENOM_FRACTION: f64 = 1e-4;

/// Periodic sign-modulation of the nonlinearity: period, duty cycle, and the
/// set of grating orders registered for use.
#[derive(Debug, Clone)]
pub struct PolingSpec<R = f64> {
    /// Poling period (m).
    pub period_m: R,
    /// Duty cycle of the square modulation, in [0, 1].
    pub duty: R,
    /// Registered grating orders; requests outside this set are rejected.
    pub orders: Vec<i32>,
}

impl<R: Real> PolingSpec<R> {
    pub fn new(period_m: R, duty: R, mut orders: Vec<i32>) -> Result<Self> {
        if !period_m.is_finite() || period_m <= R::zero() {
            return Err(Error::invalid("poling period", "must be finite and > 0"));
        }
        if !duty.is_finite() || duty < R::zero() || duty > R::one() {
            return Err(Error::invalid("duty cycle", "must lie in [0, 1]"));
        }
        if orders.is_empty() {
            return Err(Error::invalid("grating orders", "list must not be empty"));
        }
        orders.sort_unstable();
        orders.dedup();
        Ok(PolingSpec {
            period_m,
            duty,
            orders,
        })
    }

    /// 50%-duty default with orders 0, +-1, +-2, +-3.
    pub fn with_period(period_m: R) -> Result<Self> {
        PolingSpec::new(period_m, real(0.5), vec![-3, -2, -1, 0, 1, 2, 3])
    }

    pub fn is_registered(&self, m: i32) -> bool {
        self.orders.contains(&m)
    }

    /// Grating wavenumber `K_m = 2 pi m / period` (rad/m); antisymmetric in m.
    pub fn grating_wavenumber(&self, m: i32) -> Result<R> {
        if !self.is_registered(m) {
            return Err(Error::UnregisteredOrder(m));
        }
        Ok(R::TAU() * real(m as f64) / self.period_m)
    }

    /// Magnitude of the square-wave Fourier coefficient `G_m`; for a 50% duty
    /// cycle this is `2 / (pi |m|)` for odd m and 0 for even nonzero m.
    pub fn fourier_coefficient(&self, m: i32) -> Result<R> {
        if !self.is_registered(m) {
            return Err(Error::UnregisteredOrder(m));
        }
        if m == 0 {
            return Ok((real::<R>(2.0) * self.duty - R::one()).abs());
        }
        let pi_m = R::PI() * real(m as f64);
        Ok((real::<R>(2.0) * (pi_m * self.duty).sin() / pi_m).abs())
    }
}

/// Monochromatic unguided plane-wave pump crossing the guide at internal
/// angle `theta` from the propagation axis.
#[derive(Debug, Clone, Copy)]
pub struct PumpGeometry<R = f64> {
    /// Pump vacuum wavelength (nm).
    pub wavelength_nm: R,
    /// Incidence angle from the z-axis, inside the medium (degrees).
    pub theta_deg: R,
    /// Refractive index at the pump wavelength.
    pub index: R,
}

impl<R: Real> PumpGeometry<R> {
    pub fn new(wavelength_nm: R, theta_deg: R, model: &SellmeierModel<R>) -> Result<Self> {
        if !theta_deg.is_finite() || theta_deg < R::zero() || theta_deg > real(90.0) {
            return Err(Error::invalid(
                "pump angle",
                format!("theta = {theta_deg} deg must lie in [0, 90]"),
            ));
        }
        let index = model.refractive_index(wavelength_nm)?;
        Ok(PumpGeometry {
            wavelength_nm,
            theta_deg,
            index,
        })
    }

    /// Pump wavenumber in the medium `k_p = n(lambda_p) 2 pi / lambda_p` (rad/m).
    pub fn wavenumber(&self) -> R {
        self.index * R::TAU() / (self.wavelength_nm * real(1e-9))
    }

    /// Longitudinal component `beta_p = k_p cos(theta)` (rad/m).
    pub fn beta(&self) -> R {
        self.wavenumber() * deg_to_rad(self.theta_deg).cos()
    }

    /// Transverse component `k_p sin(theta)` (rad/m).
    pub fn zeta(&self) -> R {
        self.wavenumber() * deg_to_rad(self.theta_deg).sin()
    }
}

/// Longitudinal direction tags for the signal and idler fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectionPair {
    pub signal_sign: i8,
    pub idler_sign: i8,
}

impl DirectionPair {
    pub fn new(signal_sign: i8, idler_sign: i8) -> Result<Self> {
        if signal_sign.abs() != 1 || idler_sign.abs() != 1 {
            return Err(Error::invalid("direction pair", "signs must be +1 or -1"));
        }
        Ok(DirectionPair {
            signal_sign,
            idler_sign,
        })
    }

    /// Signal and idler both along +z.
    pub fn co() -> Self {
        DirectionPair {
            signal_sign: 1,
            idler_sign: 1,
        }
    }

    /// Signal along +z, idler along -z.
    pub fn counter() -> Self {
        DirectionPair {
            signal_sign: 1,
            idler_sign: -1,
        }
    }

    pub fn is_counter(self) -> bool {
        (self.signal_sign as i32) * (self.idler_sign as i32) == -1
    }

    pub fn label(self) -> &'static str {
        match (self.signal_sign, self.idler_sign) {
            (1, 1) => "co",
            (1, -1) => "counter",
            (-1, -1) => "co-reversed",
            _ => "counter-reversed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "co" => Some(DirectionPair::co()),
            "counter" => Some(DirectionPair::counter()),
            _ => None,
        }
    }
}

/// Idler wavelength fixed by energy conservation,
/// `1/lambda_i = 1/lambda_p - 1/lambda_s` (nm).
pub fn idler_from_energy<R: Real>(lambda_p_nm: R, lambda_s_nm: R) -> Result<R> {
    if !lambda_p_nm.is_finite() || !lambda_s_nm.is_finite() {
        return Err(Error::NonFinite { what: "wavelength" });
    }
    if lambda_s_nm <= lambda_p_nm {
        return Err(Error::NonphysicalPair {
            lambda_p_nm: lambda_p_nm.to_f64().unwrap_or(f64::NAN),
            lambda_s_nm: lambda_s_nm.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(R::one() / (R::one() / lambda_p_nm - R::one() / lambda_s_nm))
}

/// One root of the quasi-phase-matching residual with its full geometry.
#[derive(Debug, Clone, Copy)]
pub struct PhaseMatchSolution<R = f64> {
    pub theta_deg: R,
    pub period_m: R,
    pub lambda_s_nm: R,
    pub lambda_i_nm: R,
    pub order: i32,
    /// Residual `dbeta'` at the reported root (rad/m).
    pub residual: R,
    /// Whether the period clears the fabrication floor.
    pub feasible_poling: bool,
}

/// Result of a poling-period solve; the denominator can pass through zero, in
/// which case the period diverges and no finite solution exists.
#[derive(Debug, Clone, Copy)]
pub enum PeriodSolution<R = f64> {
    Finite(PhaseMatchSolution<R>),
    /// `K_m -> 0`: quasi-phase matching degenerates, the period grows without
    /// bound.
    Divergent { theta_deg: R, order: i32 },
}

fn feasible<R: Real>(period_m: R) -> bool {
    period_m >= real(FEASIBLE_POLING_MIN_M)
}

fn check_energy_consistency<R: Real>(
    lambda_p_nm: R,
    lambda_s_nm: R,
    lambda_i_nm: R,
) -> Result<()> {
    let expect = idler_from_energy(lambda_p_nm, lambda_s_nm)?;
    let rel = ((lambda_i_nm - expect) / expect).abs();
    if rel > real(1e-9) {
        return Err(Error::invalid(
            "signal/idler pair",
            format!(
                "energy conservation violated: idler {lambda_i_nm} nm vs {expect} nm implied by the pump"
            ),
        ));
    }
    Ok(())
}

/// Poling period that phase-matches the configured pump angle and directions
/// for the given pair and order: `period = 2 pi m / (beta_p - s_s beta_s - s_i beta_i)`.
pub fn solve_poling_period<R: Real>(
    cfg: &InteractionConfig<R>,
    lambda_s_nm: R,
    lambda_i_nm: R,
    m: i32,
) -> Result<PeriodSolution<R>> {
    if m == 0 {
        return Err(Error::invalid(
            "grating order",
            "period solve requires m != 0",
        ));
    }
    check_energy_consistency(cfg.pump.wavelength_nm, lambda_s_nm, lambda_i_nm)?;
    let ss: R = real(cfg.dirs.signal_sign as f64);
    let si: R = real(cfg.dirs.idler_sign as f64);
    let denom =
        cfg.pump.beta() - ss * cfg.beta_field(lambda_s_nm)? - si * cfg.beta_field(lambda_i_nm)?;
    if denom.abs() <= real::<R>(DIVERGENT_DENOM_FRACTION) * cfg.pump.wavenumber() {
        return Ok(PeriodSolution::Divergent {
            theta_deg: cfg.pump.theta_deg,
            order: m,
        });
    }
    let period = R::TAU() * real(m as f64) / denom;
    if period <= R::zero() {
        return Err(Error::NoSolutionForOrder {
            order: m,
            reason: "denominator sign requires the opposite-sign grating order".to_string(),
        });
    }
    let residual = denom - R::TAU() * real(m as f64) / period;
    Ok(PeriodSolution::Finite(PhaseMatchSolution {
        theta_deg: cfg.pump.theta_deg,
        period_m: period,
        lambda_s_nm,
        lambda_i_nm,
        order: m,
        residual,
        feasible_poling: feasible(period),
    }))
}

/// All pump angles in [0, 90] degrees with `dbeta' = 0` for the fixed pair,
/// one entry per (root, order), sorted by angle then order.
pub fn solve_pump_angles<R: Real>(
    cfg: &InteractionConfig<R>,
    lambda_s_nm: R,
    lambda_i_nm: R,
    orders: &[i32],
) -> Result<Vec<PhaseMatchSolution<R>>> {
    if orders.is_empty() {
        return Err(Error::invalid("grating orders", "list must not be empty"));
    }
    check_energy_consistency(cfg.pump.wavelength_nm, lambda_s_nm, lambda_i_nm)?;
    let ss: R = real(cfg.dirs.signal_sign as f64);
    let si: R = real(cfg.dirs.idler_sign as f64);
    let field_sum = ss * cfg.beta_field(lambda_s_nm)? + si * cfg.beta_field(lambda_i_nm)?;
    let k_p = cfg.pump.wavenumber();
    let tol = cfg.mismatch_tolerance();

    let lo = R::zero();
    let hi: R = real(90.0);
    let n_intervals = (90.0 / THETA_GRID_STEP_DEG).round() as usize;

    let mut out = Vec::new();
    for &m in orders {
        let k_m = cfg.poling.grating_wavenumber(m)?;
        let f = |theta: R| -> Result<R> { Ok(k_p * deg_to_rad(theta).cos() - field_sum - k_m) };
        for theta in scan_roots(lo, hi, n_intervals, tol, f)? {
            let residual = k_p * deg_to_rad(theta).cos() - field_sum - k_m;
            out.push(PhaseMatchSolution {
                theta_deg: theta,
                period_m: cfg.poling.period_m,
                lambda_s_nm,
                lambda_i_nm,
                order: m,
                residual,
                feasible_poling: feasible(cfg.poling.period_m),
            });
        }
    }
    out.sort_by(|a, b| {
        a.theta_deg
            .partial_cmp(&b.theta_deg)
            .unwrap()
            .then(a.order.cmp(&b.order))
    });
    Ok(out)
}

/// Precomputed signal-wavelength grid shared by wavelength solves and sweeps.
/// The tabulated quantity is `-(s_s beta_s + s_i beta_i)` per grid node, so a
/// residual evaluation per (theta, order) reduces to two additions.
#[derive(Debug, Clone)]
pub struct LambdaScanTable<R = f64> {
    pub lambda_s_nm: Vec<R>,
    neg_field_sum: Vec<R>,
}

impl<R: Real> LambdaScanTable<R> {
    pub fn build(cfg: &InteractionConfig<R>, step_nm: R) -> Result<Self> {
        if !(step_nm > R::zero()) {
            return Err(Error::invalid("scan step", "must be > 0"));
        }
        let (lo, hi) = cfg.lambda_scan_window_nm()?;
        let n = ((hi - lo) / step_nm)
            .ceil()
            .to_usize()
            .ok_or_else(|| Error::invalid("scan step", "grid too fine"))?
            .max(1);
        let ss: R = real(cfg.dirs.signal_sign as f64);
        let si: R = real(cfg.dirs.idler_sign as f64);
        let mut lambda_s_nm = Vec::with_capacity(n + 1);
        let mut neg_field_sum = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let lambda = if i == n {
                hi
            } else {
                lo + step_nm * real(i as f64)
            };
            let lambda = lambda.min(hi);
            let lambda_i = idler_from_energy(cfg.pump.wavelength_nm, lambda)?;
            let bs = cfg.beta_field(lambda)?;
            let bi = cfg.beta_field(lambda_i)?;
            lambda_s_nm.push(lambda);
            neg_field_sum.push(-(ss * bs + si * bi));
        }
        Ok(LambdaScanTable {
            lambda_s_nm,
            neg_field_sum,
        })
    }
}

/// All signal wavelengths in the dispersion-valid window with `dbeta' = 0` at
/// the configured pump angle; idlers follow from energy conservation.
pub fn solve_signal_idler<R: Real>(
    cfg: &InteractionConfig<R>,
    orders: &[i32],
) -> Result<Vec<PhaseMatchSolution<R>>> {
    let table = LambdaScanTable::build(cfg, real(LAMBDA_GRID_STEP_NM))?;
    solve_signal_idler_with_table(cfg, &table, orders)
}

/// As [`solve_signal_idler`] but reusing a prebuilt scan table (the per-node
/// field constants do not depend on the pump angle or the poling period).
pub fn solve_signal_idler_with_table<R: Real>(
    cfg: &InteractionConfig<R>,
    table: &LambdaScanTable<R>,
    orders: &[i32],
) -> Result<Vec<PhaseMatchSolution<R>>> {
    if orders.is_empty() {
        return Err(Error::invalid("grating orders", "list must not be empty"));
    }
    let beta_p = cfg.pump.beta();
    let tol = cfg.mismatch_tolerance();
    let mut out = Vec::new();
    for &m in orders {
        let k_m = cfg.poling.grating_wavenumber(m)?;
        let residual_nodes: Vec<R> = table
            .neg_field_sum
            .iter()
            .map(|&s| beta_p + s - k_m)
            .collect();
        let refine = |lambda: R| cfg.phase_mismatch(lambda, m);
        for lambda in scan_roots_tabulated(&table.lambda_s_nm, &residual_nodes, tol, refine)? {
            let lambda_i = idler_from_energy(cfg.pump.wavelength_nm, lambda)?;
            let residual = cfg.phase_mismatch(lambda, m)?;
            out.push(PhaseMatchSolution {
                theta_deg: cfg.pump.theta_deg,
                period_m: cfg.poling.period_m,
                lambda_s_nm: lambda,
                lambda_i_nm: lambda_i,
                order: m,
                residual,
                feasible_poling: feasible(cfg.poling.period_m),
            });
        }
    }
    out.sort_by(|a, b| {
        a.order
            .cmp(&b.order)
            .then(a.lambda_s_nm.partial_cmp(&b.lambda_s_nm).unwrap())
    });
    Ok(out)
}

/// Sweep axis for tuning tables.
#[derive(Debug, Clone, Copy)]
pub enum SweepAxis<R = f64> {
    /// Pump angle in degrees.
    ThetaDeg { lo: R, hi: R, step: R },
    /// Poling period in micrometres.
    PeriodUm { lo: R, hi: R, step: R },
}

/// What is solved at each axis value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepSolve {
    /// Signal/idler pairs at fixed period (theta axis) or fixed angle
    /// (period axis).
    Pairs,
    /// Poling period for a fixed pair (theta axis only).
    Period,
    /// Pump angles for a fixed pair (period axis only).
    Angles,
}

#[derive(Debug, Clone)]
pub struct TuningRow<R = f64> {
    pub axis_value: R,
    pub solutions: Vec<PhaseMatchSolution<R>>,
    /// Per-row solver failures; the sweep continues past them.
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct TuningCurve<R = f64> {
    pub rows: Vec<TuningRow<R>>,
    pub orders: Vec<i32>,
}

fn axis_nodes<R: Real>(lo: R, hi: R, step: R) -> Result<Vec<R>> {
    if !(step > R::zero()) || !(hi >= lo) {
        return Err(Error::invalid("sweep axis", "requires lo <= hi and step > 0"));
    }
    let n = ((hi - lo) / step + real(1e-9))
        .floor()
        .to_usize()
        .ok_or_else(|| Error::invalid("sweep axis", "grid too fine"))?;
    Ok((0..=n)
        .map(|k| (lo + step * real(k as f64)).min(hi))
        .collect())
}

/// Evaluate the requested solver at every axis node. Per-row errors are
/// recorded in the row note instead of aborting the sweep.
pub fn tuning_sweep<R: Real>(
    cfg: &InteractionConfig<R>,
    axis: SweepAxis<R>,
    solve: SweepSolve,
    orders: &[i32],
    pair: Option<(R, R)>,
) -> Result<TuningCurve<R>> {
    if orders.is_empty() {
        return Err(Error::invalid("grating orders", "list must not be empty"));
    }
    for &m in orders {
        if !cfg.poling.is_registered(m) {
            return Err(Error::UnregisteredOrder(m));
        }
    }
    let need_pair = || {
        pair.ok_or_else(|| {
            Error::invalid(
                "sweep",
                "period and angle solves require a fixed signal/idler pair",
            )
        })
    };

    let mut rows = Vec::new();
    match (axis, solve) {
        (SweepAxis::ThetaDeg { lo, hi, step }, SweepSolve::Pairs) => {
            let table = LambdaScanTable::build(cfg, real(LAMBDA_GRID_STEP_NM))?;
            for theta in axis_nodes(lo, hi, step)? {
                match cfg
                    .with_theta_deg(theta)
                    .and_then(|c| solve_signal_idler_with_table(&c, &table, orders))
                {
                    Ok(solutions) => rows.push(TuningRow {
                        axis_value: theta,
                        solutions,
                        note: None,
                    }),
                    Err(e) => rows.push(TuningRow {
                        axis_value: theta,
                        solutions: Vec::new(),
                        note: Some(e.to_string()),
                    }),
                }
            }
        }
        (SweepAxis::ThetaDeg { lo, hi, step }, SweepSolve::Period) => {
            let (ls, li) = need_pair()?;
            for theta in axis_nodes(lo, hi, step)? {
                let mut solutions = Vec::new();
                let mut notes = Vec::new();
                match cfg.with_theta_deg(theta) {
                    Ok(c) => {
                        for &m in orders.iter().filter(|&&m| m != 0) {
                            match solve_poling_period(&c, ls, li, m) {
                                Ok(PeriodSolution::Finite(sol)) => solutions.push(sol),
                                Ok(PeriodSolution::Divergent { .. }) => {
                                    notes.push(format!("m={m}: divergent period (K_m -> 0)"))
                                }
                                Err(Error::NoSolutionForOrder { .. }) => {}
                                Err(e) => notes.push(format!("m={m}: {e}")),
                            }
                        }
                    }
                    Err(e) => notes.push(e.to_string()),
                }
                solutions.sort_by_key(|s| s.order);
                rows.push(TuningRow {
                    axis_value: theta,
                    solutions,
                    note: if notes.is_empty() {
                        None
                    } else {
                        Some(notes.join("; "))
                    },
                });
            }
        }
        (SweepAxis::PeriodUm { lo, hi, step }, SweepSolve::Angles) => {
            let (ls, li) = need_pair()?;
            for period_um in axis_nodes(lo, hi, step)? {
                let period_m = period_um * real(1e-6);
                match cfg
                    .with_period_m(period_m)
                    .and_then(|c| solve_pump_angles(&c, ls, li, orders))
                {
                    Ok(solutions) => rows.push(TuningRow {
                        axis_value: period_um,
                        solutions,
                        note: None,
                    }),
                    Err(e) => rows.push(TuningRow {
                        axis_value: period_um,
                        solutions: Vec::new(),
                        note: Some(e.to_string()),
                    }),
                }
            }
        }
        (SweepAxis::PeriodUm { lo, hi, step }, SweepSolve::Pairs) => {
            let table = LambdaScanTable::build(cfg, real(LAMBDA_GRID_STEP_NM))?;
            for period_um in axis_nodes(lo, hi, step)? {
                let period_m = period_um * real(1e-6);
                match cfg
                    .with_period_m(period_m)
                    .and_then(|c| solve_signal_idler_with_table(&c, &table, orders))
                {
                    Ok(solutions) => rows.push(TuningRow {
                        axis_value: period_um,
                        solutions,
                        note: None,
                    }),
                    Err(e) => rows.push(TuningRow {
                        axis_value: period_um,
                        solutions: Vec::new(),
                        note: Some(e.to_string()),
                    }),
                }
            }
        }
        (SweepAxis::ThetaDeg { .. }, SweepSolve::Angles) => {
            return Err(Error::invalid(
                "sweep",
                "angle solve needs a period axis; use `pairs` or `period` on a theta axis",
            ))
        }
        (SweepAxis::PeriodUm { .. }, SweepSolve::Period) => {
            return Err(Error::invalid(
                "sweep",
                "period solve needs a theta axis; use `pairs` or `angles` on a period axis",
            ))
        }
    }
    Ok(TuningCurve {
        rows,
        orders: orders.to_vec(),
    })
}
