// SPDX-License-Identifier: Apache-2.0

//! Fairness-aware filter designs.
//!
//! All three designs share the feasible set
//! `{h̃ : 0 ≤ h̃ ≤ 1, Σ h̃ ≥ nτ}` and differ in objective and parameterization:
//!
//! * [`design_direct`] minimizes `ρ(h̃)` itself over all responses.
//! * [`design_closed_form`] minimizes the linear upper bound `mᵀh̃`.
//! * [`design_polynomial`] minimizes `ρ(Ψh)` over polynomial responses of a
//!   fixed order.

mod closed_form;
mod direct;
mod polynomial;

pub use closed_form::design_closed_form;
pub use direct::design_direct;
pub use polynomial::{basis_matrix, design_polynomial};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::metrics::{rho_separable, rho_upper_bound, BiasContext};
use crate::spectral::SpectralDecomposition;

/// Information-budget grid used for tuning on the Pokec networks.
pub const TAU_GRID: [f64; 4] = [0.0003, 0.0004, 0.0005, 0.0006];
/// Polynomial length grid used for tuning on the Pokec networks.
pub const ORDER_GRID: [usize; 3] = [30, 40, 50];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Powers of `1-λ`, i.e. powers of `Â` in the vertex domain.
    #[default]
    Monomial,
    /// Chebyshev polynomials of the first kind in `1-λ ∈ [-1, 1]`.
    Chebyshev,
}

impl std::str::FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monomial" => Ok(Basis::Monomial),
            "chebyshev" => Ok(Basis::Chebyshev),
            other => Err(Error::InvalidArgument(format!(
                "unknown basis {other:?} (expected monomial or chebyshev)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Direct,
    Lp,
    Poly,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "lp" => Ok(Method::Lp),
            "poly" => Ok(Method::Poly),
            other => Err(Error::InvalidArgument(format!(
                "unknown design method {other:?} (expected direct, lp or poly)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DesignConfig {
    pub tau: f64,
    /// Number of polynomial coefficients `L`.
    pub order: usize,
    pub basis: Basis,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self {
            tau: 0.0004,
            order: 40,
            basis: Basis::Monomial,
            tolerance: 1e-8,
            max_iterations: 10_000,
        }
    }
}

impl DesignConfig {
    pub fn with_tau(tau: f64) -> Self {
        Self {
            tau,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::Domain(format!("tau = {} outside [0, 1]", self.tau)));
        }
        if self.order == 0 {
            return Err(Error::Domain("polynomial order must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Domain("solver tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    FrequencyResponse,
    Polynomial,
}

/// A designed filter. `h_tilde` is always populated; polynomial filters also
/// carry their coefficients and basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub kind: FilterKind,
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Basis>,
    pub h_tilde: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
}

impl FilterSpec {
    pub fn from_response(h_tilde: Vec<f64>, tau: f64) -> Self {
        Self {
            kind: FilterKind::FrequencyResponse,
            tau,
            order: None,
            basis: None,
            h_tilde,
            coeffs: None,
        }
    }

    /// `h̃ = 1`, which leaves every signal unchanged.
    pub fn all_pass(n: usize) -> Self {
        Self::from_response(vec![1.0; n], 1.0)
    }

    pub fn n(&self) -> usize {
        self.h_tilde.len()
    }

    pub fn response(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.h_tilde)
    }

    pub fn is_all_pass(&self) -> bool {
        self.h_tilde.iter().all(|&h| h == 1.0)
    }

    /// Monomial coefficients of a polynomial filter, converting from the
    /// Chebyshev basis when needed.
    pub fn monomial_coeffs(&self) -> Option<Vec<f64>> {
        let coeffs = self.coeffs.as_ref()?;
        Some(match self.basis.unwrap_or_default() {
            Basis::Monomial => coeffs.clone(),
            Basis::Chebyshev => polynomial::chebyshev_to_monomial(coeffs),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let filt: Self = serde_json::from_str(text)?;
        if let Some(coeffs) = &filt.coeffs {
            if filt.order.is_some_and(|l| l != coeffs.len()) {
                return Err(Error::InvalidArgument(
                    "filter order does not match coefficient count".into(),
                ));
            }
        }
        Ok(filt)
    }
}

/// Runs one of the three designs.
pub fn design(
    method: Method,
    ctx: &BiasContext,
    spec: &SpectralDecomposition,
    cfg: &DesignConfig,
) -> Result<FilterSpec> {
    match method {
        Method::Direct => design_direct(ctx, cfg),
        Method::Lp => design_closed_form(ctx, cfg),
        Method::Poly => design_polynomial(ctx, spec, cfg),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveReport {
    pub rho: f64,
    pub bound: f64,
    /// `Σ h̃ - nτ`; nonnegative for a feasible filter.
    pub budget_slack: f64,
}

pub fn objective_report(ctx: &BiasContext, filt: &FilterSpec) -> Result<ObjectiveReport> {
    check_len("filter length", ctx.n(), filt.n())?;
    let h = filt.response();
    Ok(ObjectiveReport {
        rho: rho_separable(ctx, &h)?,
        bound: rho_upper_bound(ctx, &h)?,
        budget_slack: h.sum() - ctx.n() as f64 * filt.tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(DesignConfig::with_tau(0.5).validate().is_ok());
        assert!(DesignConfig::with_tau(1.5).validate().is_err());
        assert!(DesignConfig::with_tau(-0.1).validate().is_err());
        let cfg = DesignConfig {
            order: 0,
            ..DesignConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn filter_json_shape() {
        let filt = FilterSpec::from_response(vec![0.0, 1.0], 0.5);
        let value: serde_json::Value = serde_json::from_str(&filt.to_json().unwrap()).unwrap();
        assert_eq!(value["kind"], "frequency_response");
        assert!(value.get("coeffs").is_none());
        assert!(value.get("order").is_none());
        assert_eq!(
            FilterSpec::from_json(&filt.to_json().unwrap()).unwrap(),
            filt
        );
    }

    #[test]
    fn objective_report_all_pass_and_zero() {
        let ctx = BiasContext::from_parts(
            DVector::from_vec(vec![0.0, -(2f64.sqrt())]),
            DVector::from_vec(vec![0.0, 2.0]),
        )
        .unwrap();
        let mut all_pass = FilterSpec::all_pass(2);
        all_pass.tau = 0.25;
        let report = objective_report(&ctx, &all_pass).unwrap();
        assert!((report.rho - 2f64.sqrt()).abs() < 1e-15);
        assert!((report.budget_slack - 2.0 * 0.75).abs() < 1e-15);

        let zero = FilterSpec::from_response(vec![0.0, 0.0], 0.0);
        let report = objective_report(&ctx, &zero).unwrap();
        assert_eq!(
            (report.rho, report.bound, report.budget_slack),
            (0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn method_parsing() {
        assert_eq!("lp".parse::<Method>().unwrap(), Method::Lp);
        assert!("simplex".parse::<Method>().is_err());
    }
}
