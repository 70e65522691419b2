//! Run configuration: paper-baseline defaults, `key = value` config files,
//! and command-line overrides (flags win over file values, file values win
//! over defaults).

use std::path::{Path, PathBuf};

use ppwg::kv;
use ppwg::{
    BetaMode, ClampMode, DirectionPair, Error, InteractionConfig, PolingSpec, Result,
    SellmeierModel, WaveguideSpec,
};

/// Inclusive range plus step, parsed from `lo:hi:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected `lo:hi:step`, got `{text}`"));
        }
        let mut vals = [0.0; 3];
        for (slot, part) in vals.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("cannot parse `{part}` in `{text}`: {e}"))?;
        }
        Ok(GridSpec {
            lo: vals[0],
            hi: vals[1],
            step: vals[2],
        })
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub sellmeier_path: Option<PathBuf>,
    pub pump_wavelength_nm: f64,
    pub theta_deg: f64,
    pub poling_period_um: f64,
    pub duty: f64,
    pub orders: Vec<i32>,
    pub length_mm: f64,
    pub grin_alpha_per_m: f64,
    pub beta_mode: BetaMode,
    pub directions: DirectionPair,
    pub clamp: ClampMode,
    pub output_path: Option<PathBuf>,
    pub window: Option<GridSpec>,
    pub theta_range: GridSpec,
    pub ratio_signals: Vec<f64>,
    pub reference_nm: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            sellmeier_path: None,
            pump_wavelength_nm: 532.0,
            theta_deg: 0.0,
            poling_period_um: 6.8,
            duty: 0.5,
            orders: vec![-1, 1],
            length_mm: 1.0,
            grin_alpha_per_m: 4.0e5,
            beta_mode: BetaMode::Bulk,
            directions: DirectionPair::counter(),
            clamp: ClampMode::Literal,
            output_path: None,
            window: None,
            theta_range: GridSpec {
                lo: 65.0,
                hi: 90.0,
                step: 0.1,
            },
            ratio_signals: vec![
                880.0, 900.0, 920.0, 940.0, 960.0, 980.0, 1000.0, 1020.0, 1040.0, 1050.0, 1060.0,
            ],
            reference_nm: 880.0,
        }
    }
}

fn parse_err(path: &str, line: usize, msg: String) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        msg,
    }
}

impl RunConfig {
    /// Load a config file over the defaults. An empty file yields the
    /// baseline configuration.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = RunConfig::default();
        cfg.apply_file(&text, &path.display().to_string())?;
        Ok(cfg)
    }

    pub fn apply_file(&mut self, text: &str, path: &str) -> Result<()> {
        for entry in kv::parse(text, path)? {
            let f = || kv::parse_f64(&entry, path);
            match entry.key.as_str() {
                "sellmeier_path" => self.sellmeier_path = Some(PathBuf::from(&entry.value)),
                "pump_wavelength_nm" => self.pump_wavelength_nm = f()?,
                "theta_deg" => self.theta_deg = f()?,
                "poling_period_um" => self.poling_period_um = f()?,
                "duty" => self.duty = f()?,
                "orders" => self.orders = kv::parse_i32_list(&entry, path)?,
                "length_mm" => self.length_mm = f()?,
                "grin_alpha_per_m" => self.grin_alpha_per_m = f()?,
                "beta_mode" => {
                    self.beta_mode = BetaMode::parse(&entry.value).ok_or_else(|| {
                        parse_err(
                            path,
                            entry.line,
                            format!("key `beta_mode`: expected bulk|guided, got `{}`", entry.value),
                        )
                    })?
                }
                "directions" => {
                    self.directions = DirectionPair::parse(&entry.value).ok_or_else(|| {
                        parse_err(
                            path,
                            entry.line,
                            format!("key `directions`: expected co|counter, got `{}`", entry.value),
                        )
                    })?
                }
                "clamp" => {
                    self.clamp = ClampMode::parse(&entry.value).ok_or_else(|| {
                        parse_err(
                            path,
                            entry.line,
                            format!("key `clamp`: expected literal|squared, got `{}`", entry.value),
                        )
                    })?
                }
                "output_path" => self.output_path = Some(PathBuf::from(&entry.value)),
                "window" => {
                    self.window = Some(GridSpec::parse(&entry.value).map_err(|e| {
                        parse_err(path, entry.line, format!("key `window`: {e}"))
                    })?)
                }
                "theta_range" => {
                    self.theta_range = GridSpec::parse(&entry.value).map_err(|e| {
                        parse_err(path, entry.line, format!("key `theta_range`: {e}"))
                    })?
                }
                "ratio_signals" => self.ratio_signals = kv::parse_f64_list(&entry, path)?,
                "reference_nm" => self.reference_nm = f()?,
                other => {
                    return Err(parse_err(
                        path,
                        entry.line,
                        format!("unknown key `{other}`"),
                    ))
                }
            }
        }
        Ok(())
    }

    /// Reject out-of-range values, naming the offending key.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pump_wavelength_nm", self.pump_wavelength_nm),
            ("poling_period_um", self.poling_period_um),
            ("length_mm", self.length_mm),
            ("reference_nm", self.reference_nm),
        ];
        for (key, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::invalid(key, format!("must be > 0, got {value}")));
            }
        }
        if !self.theta_deg.is_finite() || !(0.0..=90.0).contains(&self.theta_deg) {
            return Err(Error::invalid(
                "theta_deg",
                format!("must lie in [0, 90], got {}", self.theta_deg),
            ));
        }
        if !(0.0..=1.0).contains(&self.duty) {
            return Err(Error::invalid(
                "duty",
                format!("must lie in [0, 1], got {}", self.duty),
            ));
        }
        if !self.grin_alpha_per_m.is_finite() || self.grin_alpha_per_m < 0.0 {
            return Err(Error::invalid(
                "grin_alpha_per_m",
                format!("must be >= 0, got {}", self.grin_alpha_per_m),
            ));
        }
        if self.orders.is_empty() {
            return Err(Error::invalid("orders", "list must not be empty"));
        }
        for g in [Some(self.theta_range), self.window].into_iter().flatten() {
            if !g.lo.is_finite() || !g.hi.is_finite() || g.lo >= g.hi || !(g.step.is_finite() && g.step > 0.0) {
                return Err(Error::invalid(
                    "grid",
                    format!("requires lo < hi and step > 0, got {}:{}:{}", g.lo, g.hi, g.step),
                ));
            }
        }
        Ok(())
    }

    pub fn sellmeier(&self) -> Result<SellmeierModel<f64>> {
        match &self.sellmeier_path {
            Some(path) => SellmeierModel::load(path),
            None => Ok(ppwg::builtin_ppln_e()),
        }
    }

    /// Assemble the physics configuration; registered orders always include
    /// the requested list plus the first-order pair used by spectra.
    pub fn interaction(&self) -> Result<InteractionConfig<f64>> {
        self.validate()?;
        let mut registered = self.orders.clone();
        registered.extend_from_slice(&[-1, 1]);
        let poling = PolingSpec::new(self.poling_period_um * 1e-6, self.duty, registered)?;
        let waveguide =
            WaveguideSpec::new(self.grin_alpha_per_m, self.length_mm * 1e-3, self.sellmeier()?)?;
        let mut cfg = InteractionConfig::new(
            self.pump_wavelength_nm,
            self.theta_deg,
            poling,
            waveguide,
            self.directions,
        )?;
        cfg.beta_mode = self.beta_mode;
        cfg.clamp = self.clamp;
        Ok(cfg)
    }
}
