//! Generalization-bound formulas.
//!
//! Every logarithm is natural. Inputs are a sample size `n`, a Lipschitz
//! constant `L`, a doubling dimension `D`, a label count `k` and a
//! confidence `delta`.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::math::{ln, log2, pos, pow, sqrt};

/// Inputs shared by every risk bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub n: u64,
    pub lipschitz: f64,
    pub ddim: f64,
    pub k: u64,
    pub delta: f64,
    /// Approximate-nearest-neighbor slack; carried into reports.
    pub eta: f64,
}

impl BoundParams {
    pub fn new(n: u64, lipschitz: f64, ddim: f64, k: u64, delta: f64) -> Result<Self> {
        let p = Self {
            n,
            lipschitz,
            ddim,
            k,
            delta,
            eta: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        self.eta = eta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Result<Self> {
        self.lipschitz = lipschitz;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n", "sample size must be positive"));
        }
        if !(self.lipschitz > 0.0 && self.lipschitz.is_finite()) {
            return Err(invalid("L", format!("{} is not a positive real", self.lipschitz)));
        }
        if !(self.ddim >= 0.0 && self.ddim.is_finite()) {
            return Err(invalid("D", format!("{} is not a nonnegative real", self.ddim)));
        }
        if self.k < 2 {
            return Err(invalid("k", format!("{} labels; at least 2 required", self.k)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid("delta", format!("{} is not in (0, 1)", self.delta)));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(invalid("eta", format!("{} is not a nonnegative real", self.eta)));
        }
        Ok(())
    }
}

/// Base of the `(c L)^D` power term in `Delta_fat`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FatConstant {
    /// `(16 L)^D` (default).
    #[default]
    Printed,
    /// `(64 L)^D`, the metric-entropy bound evaluated at `eps = 1/4`.
    EntropyConsistent,
}

impl FatConstant {
    pub fn factor(self) -> f64 {
        match self {
            FatConstant::Printed => 16.0,
            FatConstant::EntropyConsistent => 64.0,
        }
    }
}

/// `log N(eps) <= (16 L / eps)^D ln(5 k / eps)`.
pub fn entropy_bound(epsilon: f64, lipschitz: f64, ddim: f64, k: u64) -> f64 {
    pow(16.0 * lipschitz / epsilon, ddim) * ln(5.0 * k as f64 / epsilon)
}

/// `R_n <= 2 L (ln(5k) / n)^(1 / (D + 1))`.
pub fn rademacher_bound(n: f64, lipschitz: f64, ddim: f64, k: u64) -> f64 {
    2.0 * lipschitz * pow(ln(5.0 * k as f64) / n, 1.0 / (ddim + 1.0))
}

/// Chaining cutoff `alpha* = (9 (16L)^D ln(5k) / n)^(1 / (D + 1))`.
pub fn chaining_alpha_star(n: f64, lipschitz: f64, ddim: f64, k: u64) -> f64 {
    pow(
        9.0 * pow(16.0 * lipschitz, ddim) * ln(5.0 * k as f64) / n,
        1.0 / (ddim + 1.0),
    )
}

/// Dudley's bound `4 alpha + 12 * integral`, with the entropy integral
/// bounded in closed form. Finite only for `D > 1`.
pub fn dudley_bound(alpha: f64, n: f64, lipschitz: f64, ddim: f64, k: u64) -> f64 {
    let integral = sqrt(ln(5.0 * k as f64) / n)
        * pow(16.0 * lipschitz, ddim / 2.0)
        * (2.0 / (ddim - 1.0))
        * pow(alpha, -(ddim - 1.0) / 2.0);
    4.0 * alpha + 12.0 * integral
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadTerms {
    /// `8 L (ln(5k)/n)^(1/(D+1))`
    pub complexity: f64,
    /// `sqrt((ln log2(2L))_+ / n)`
    pub stratification: f64,
    /// `sqrt(ln(2/delta) / (2n))`
    pub confidence: f64,
    /// The stratification logarithm was nonpositive or undefined.
    pub stratification_clamped: bool,
    pub alpha_star: f64,
    pub total: f64,
}

pub fn delta_rad(p: &BoundParams) -> RadTerms {
    let n = p.n as f64;
    let complexity = 4.0 * rademacher_bound(n, p.lipschitz, p.ddim, p.k);
    let inner = log2(2.0 * p.lipschitz);
    let (stratification, clamped) = if inner > 1.0 {
        (sqrt(ln(inner) / n), false)
    } else {
        (0.0, true)
    };
    let confidence = sqrt(ln(2.0 / p.delta) / (2.0 * n));
    RadTerms {
        complexity,
        stratification,
        confidence,
        stratification_clamped: clamped,
        alpha_star: chaining_alpha_star(n, p.lipschitz, p.ddim, p.k),
        total: complexity + stratification + confidence,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FatTerms {
    /// `sqrt((2/n) (2 (cL)^D ln(20k) + (ln(2L/delta))_+))`
    pub root: f64,
    /// `1/n`
    pub inverse_n: f64,
    /// `ln(2L/delta)` was negative and replaced by 0.
    pub confidence_clamped: bool,
    pub constant: FatConstant,
    pub total: f64,
}

pub fn delta_fat(p: &BoundParams) -> FatTerms {
    delta_fat_with(p, FatConstant::Printed)
}

pub fn delta_fat_with(p: &BoundParams, constant: FatConstant) -> FatTerms {
    let n = p.n as f64;
    let entropy = 2.0 * pow(constant.factor() * p.lipschitz, p.ddim) * ln(20.0 * p.k as f64);
    let conf = ln(2.0 * p.lipschitz / p.delta);
    let root = sqrt(2.0 / n * (entropy + pos(conf)));
    let inverse_n = 1.0 / n;
    FatTerms {
        root,
        inverse_n,
        confidence_clamped: conf < 0.0,
        constant,
        total: root + inverse_n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Rad,
    Fat,
}

/// Which complexity penalty enters the SRM objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Penalty {
    #[default]
    Combined,
    Rad,
    Fat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub params: BoundParams,
    pub delta_rad: f64,
    pub delta_fat: f64,
    pub combined: f64,
    pub winner: Winner,
    pub rad_terms: RadTerms,
    pub fat_terms: FatTerms,
}

impl BoundValue {
    pub fn penalty(&self, which: Penalty) -> f64 {
        match which {
            Penalty::Combined => self.combined,
            Penalty::Rad => self.delta_rad,
            Penalty::Fat => self.delta_fat,
        }
    }
}

/// `min(Delta_Rad, Delta_fat)`; ties are attributed to `Delta_Rad`.
pub fn delta_combined(p: &BoundParams) -> BoundValue {
    delta_combined_with(p, FatConstant::Printed)
}

pub fn delta_combined_with(p: &BoundParams, constant: FatConstant) -> BoundValue {
    let rad = delta_rad(p);
    let fat = delta_fat_with(p, constant);
    let (combined, winner) = if fat.total < rad.total {
        (fat.total, Winner::Fat)
    } else {
        (rad.total, Winner::Rad)
    };
    BoundValue {
        params: *p,
        delta_rad: rad.total,
        delta_fat: fat.total,
        combined,
        winner,
        rad_terms: rad,
        fat_terms: fat,
    }
}

/// Positions `i > 0` where the winner differs from position `i - 1`.
pub fn crossovers(values: &[BoundValue]) -> Vec<usize> {
    (1..values.len())
        .filter(|&i| values[i].winner != values[i - 1].winner)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimRedBound {
    /// `c L (alpha + (ln(5k)/n)^(1/(1+beta)))`
    pub asymptotic: f64,
    /// `2 L (ln(5k)/n)^(1/(1+beta)) + L alpha / n`
    pub chain: f64,
}

/// Empirical Rademacher bound after an `(alpha, beta)`-perturbation of the
/// sample, in the big-O form (constant `c`) and in the explicit chained form.
pub fn dimred_bound(lipschitz: f64, alpha: f64, beta: f64, k: u64, n: f64, constant: f64) -> DimRedBound {
    let rate = pow(ln(5.0 * k as f64) / n, 1.0 / (1.0 + beta));
    DimRedBound {
        asymptotic: constant * lipschitz * (alpha + rate),
        chain: 2.0 * lipschitz * rate + lipschitz * alpha / n,
    }
}
