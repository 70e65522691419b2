//! Data-driven Sellmeier dispersion for the extraordinary refractive index.
//!
//! Coefficient sets live in small `key = value` text files so alternative
//! published fits can be swapped in without touching code. The functional
//! form is selected by `form_id`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::kv;
use crate::real::{lambda_nm_from_omega, real, Real};

/// Functional form of a Sellmeier coefficient set. Wavelengths enter in
/// micrometres in both forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SellmeierForm {
    /// `n^2 = A + B / (l^2 - C) - D l^2`, 4 coefficients.
    Abcd,
    /// `n^2 = 1 + sum_i B_i l^2 / (l^2 - C_i)`, 3 terms, 6 coefficients
    /// ordered `B1, C1, B2, C2, B3, C3`.
    Sellmeier3,
}

impl SellmeierForm {
    pub fn from_id(id: &str) -> Option<Self> {
        match id {
            "abcd" => Some(SellmeierForm::Abcd),
            "sellmeier3" => Some(SellmeierForm::Sellmeier3),
            _ => None,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            SellmeierForm::Abcd => "abcd",
            SellmeierForm::Sellmeier3 => "sellmeier3",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            SellmeierForm::Abcd => 4,
            SellmeierForm::Sellmeier3 => 6,
        }
    }
}

/// A named Sellmeier coefficient set with its validity window.
#[derive(Debug, Clone)]
pub struct SellmeierModel<R = f64> {
    name: String,
    form: SellmeierForm,
    coefficients: Vec<R>,
    valid_range_nm: (R, R),
    source: String,
}

impl<R: Real> SellmeierModel<R> {
    pub fn new(
        name: impl Into<String>,
        form: SellmeierForm,
        coefficients: Vec<R>,
        valid_range_nm: (R, R),
        source: impl Into<String>,
    ) -> Result<Self> {
        let name = name.into();
        if coefficients.len() != form.arity() {
            return Err(Error::CoefficientArity {
                model: name,
                form: form.id().to_string(),
                expected: form.arity(),
                got: coefficients.len(),
            });
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                what: "Sellmeier coefficient",
            });
        }
        let (lo, hi) = valid_range_nm;
        let nm_min: R = real(300.0);
        let nm_max: R = real(5000.0);
        if !(lo < hi && lo >= nm_min && hi <= nm_max) {
            return Err(Error::invalid(
                format!("valid_range_nm of model '{name}'"),
                "must satisfy 300 <= min < max <= 5000",
            ));
        }
        let model = SellmeierModel {
            name,
            form,
            coefficients,
            valid_range_nm,
            source: source.into(),
        };
        model.check_physical()?;
        Ok(model)
    }

    /// Sample the validity window and check the index stays a real number in
    /// (1, 4); this catches coefficient sets whose poles intrude on the range.
    fn check_physical(&self) -> Result<()> {
        let (lo, hi) = self.valid_range_nm;
        let n_samples = 257;
        let step = (hi - lo) / real(n_samples as f64 - 1.0);
        for i in 0..n_samples {
            let lambda = lo + step * real(i as f64);
            let n = self.eval_unchecked(lambda);
            if !n.is_finite() || n <= R::one() || n >= real(4.0) {
                return Err(Error::invalid(
                    format!("model '{}'", self.name),
                    format!("index {n} at {lambda} nm falls outside (1, 4)"),
                ));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn form(&self) -> SellmeierForm {
        self.form
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn valid_range_nm(&self) -> (R, R) {
        self.valid_range_nm
    }

    fn eval_unchecked(&self, lambda_nm: R) -> R {
        let um = lambda_nm * real(1e-3);
        let l2 = um * um;
        let c = &self.coefficients;
        let n2 = match self.form {
            SellmeierForm::Abcd => c[0] + c[1] / (l2 - c[2]) - c[3] * l2,
            SellmeierForm::Sellmeier3 => {
                R::one()
                    + c[0] * l2 / (l2 - c[1])
                    + c[2] * l2 / (l2 - c[3])
                    + c[4] * l2 / (l2 - c[5])
            }
        };
        n2.sqrt()
    }

    /// Extraordinary refractive index at a vacuum wavelength in nm.
    pub fn refractive_index(&self, lambda_nm: R) -> Result<R> {
        if !lambda_nm.is_finite() {
            return Err(Error::NonFinite { what: "wavelength" });
        }
        let (lo, hi) = self.valid_range_nm;
        if lambda_nm < lo || lambda_nm > hi {
            return Err(Error::WavelengthOutOfRange {
                model: self.name.clone(),
                lambda_nm: lambda_nm.to_f64().unwrap_or(f64::NAN),
                min_nm: lo.to_f64().unwrap_or(f64::NAN),
                max_nm: hi.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(self.eval_unchecked(lambda_nm))
    }

    /// Index at an angular frequency in rad/s.
    pub fn index_at_omega(&self, omega: R) -> Result<R> {
        if !(omega > R::zero()) {
            return Err(Error::NonFinite {
                what: "angular frequency",
            });
        }
        self.refractive_index(lambda_nm_from_omega(omega))
    }

    /// Parse a model from key-value text; `path` is used in error messages.
    pub fn from_str(text: &str, path: &str) -> Result<Self> {
        let entries = kv::parse(text, path)?;
        let mut name = None;
        let mut form = None;
        let mut coefficients: Option<Vec<f64>> = None;
        let mut valid_range: Option<Vec<f64>> = None;
        let mut source = None;
        for entry in &entries {
            match entry.key.as_str() {
                "name" => name = Some(entry.value.clone()),
                "form_id" => {
                    form = Some(SellmeierForm::from_id(&entry.value).ok_or_else(|| {
                        Error::Parse {
                            path: path.to_string(),
                            line: entry.line,
                            msg: format!("unknown form_id `{}`", entry.value),
                        }
                    })?)
                }
                "coefficients" => coefficients = Some(kv::parse_f64_list(entry, path)?),
                "valid_range_nm" => valid_range = Some(kv::parse_f64_list(entry, path)?),
                "source" => source = Some(entry.value.clone()),
                other => {
                    return Err(Error::Parse {
                        path: path.to_string(),
                        line: entry.line,
                        msg: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        let missing = |key: &str| Error::Parse {
            path: path.to_string(),
            line: 0,
            msg: format!("missing required key `{key}`"),
        };
        let name = name.ok_or_else(|| missing("name"))?;
        let form = form.ok_or_else(|| missing("form_id"))?;
        let coefficients = coefficients.ok_or_else(|| missing("coefficients"))?;
        let valid_range = valid_range.ok_or_else(|| missing("valid_range_nm"))?;
        let source = source.ok_or_else(|| missing("source"))?;
        if valid_range.len() != 2 {
            return Err(Error::Parse {
                path: path.to_string(),
                line: 0,
                msg: format!("valid_range_nm expects 2 values, got {}", valid_range.len()),
            });
        }
        SellmeierModel::new(
            name,
            form,
            coefficients.into_iter().map(real).collect(),
            (real(valid_range[0]), real(valid_range[1])),
            source,
        )
    }

    /// Load a model from a data file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text, &path.display().to_string())
    }
}

/// Text of the shipped congruent LiNbO3 extraordinary-index data file.
pub const PPLN_E_DATA: &str = include_str!("../data/ppln_e.sellmeier");

/// The shipped congruent LiNbO3 extraordinary-index model.
pub fn builtin_ppln_e<R: Real>() -> SellmeierModel<R> {
    SellmeierModel::from_str(PPLN_E_DATA, "builtin:ppln_e")
        .expect("shipped coefficient set must validate")
}
