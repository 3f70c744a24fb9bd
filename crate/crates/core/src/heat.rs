//! Separation-of-variables solution of the heat equation on [-1, 1] with
//! homogeneous Dirichlet data and the quartic as initial condition.
//!
//! `u^N(t, x) = sum_{n=1..N} A_n exp(-alpha t ((2n-1) pi / 2)^2) g_n(x)` with
//! `A_n` the projection of the initial condition onto `g_n`.

use std::f64::consts::PI;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HeatError, IntegrandError};
use crate::integrands::{basis_g, IntegrandVariant, Quartic, QuarticParams};
use crate::quadrature::{integrate, QuadratureResult, RuleId, Tolerances, Warnings};

pub const DEFAULT_ALPHA: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatConfig {
    pub alpha: f64,
    pub modes: u32,
    pub coeff_rule: RuleId,
    /// Regime of the initial condition; fixes the coefficient precision.
    pub variant: IntegrandVariant,
    /// Significant digits when `variant` is high precision.
    pub digits: u32,
    pub quartic: QuarticParams,
    pub tol: Tolerances,
}

impl HeatConfig {
    pub fn new(
        alpha: f64,
        modes: u32,
        coeff_rule: RuleId,
        variant: IntegrandVariant,
        quartic: QuarticParams,
    ) -> Result<Self, HeatError> {
        let cfg = HeatConfig {
            alpha,
            modes,
            coeff_rule,
            variant,
            digits: 32,
            quartic,
            tol: Tolerances::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HeatError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(HeatError::Alpha(self.alpha));
        }
        if self.modes < 1 {
            return Err(HeatError::Modes);
        }
        if !self.variant.is_quartic() {
            return Err(IntegrandError::InvalidVariant(self.variant.to_string()).into());
        }
        Ok(())
    }
}

/// `A_n = integral of phi(x) g_n(x) over [-1, 1]` with the configured rule and regime.
pub fn fourier_coefficient(n: u32, cfg: &HeatConfig) -> Result<(f64, QuadratureResult), HeatError> {
    if n < 1 {
        return Err(HeatError::Modes);
    }
    let integrand = Quartic::new(cfg.variant, cfg.quartic, cfg.digits)?.weighted(n);
    let result = integrate(cfg.coeff_rule, &integrand, -1.0, 1.0, cfg.tol)?;
    Ok((result.value, result))
}

/// Temporal factor `exp(-alpha t ((2n - 1) pi / 2)^2)`.
pub fn decay(n: u32, t: f64, alpha: f64) -> f64 {
    let k = (2 * n - 1) as f64 * PI / 2.0;
    (-alpha * t * k * k).exp()
}

/// Single term `u_n(t, x) = A_n f_n(t) g_n(x)`.
pub fn mode(n: u32, t: f64, x: f64, a_n: f64, alpha: f64) -> f64 {
    a_n * decay(n, t, alpha) * basis_g(n, x)
}

/// Coefficients `A_1..A_N`, computed once, with the run behind each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries {
    pub config: HeatConfig,
    pub coefficients: Vec<f64>,
    pub runs: Vec<QuadratureResult>,
}

impl FourierSeries {
    /// Computes every coefficient; distinct modes run in parallel.
    pub fn compute(cfg: &HeatConfig) -> Result<Self, HeatError> {
        cfg.validate()?;
        let pairs: Vec<(f64, QuadratureResult)> = (1..=cfg.modes)
            .into_par_iter()
            .map(|n| fourier_coefficient(n, cfg))
            .collect::<Result<_, _>>()?;
        let (coefficients, runs) = pairs.into_iter().unzip();
        Ok(FourierSeries {
            config: cfg.clone(),
            coefficients,
            runs,
        })
    }

    /// Series with the given coefficients and no quadrature metadata.
    pub fn from_coefficients(config: HeatConfig, coefficients: Vec<f64>) -> Self {
        FourierSeries {
            config,
            coefficients,
            runs: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Union of the warnings raised by the coefficient runs.
    pub fn warnings(&self) -> Warnings {
        self.runs.iter().flat_map(|r| r.warnings.iter().copied()).collect()
    }

    /// `u^N(t, x)`, summed from n = 1 upwards.
    pub fn evaluate(&self, t: f64, x: f64) -> f64 {
        let alpha = self.config.alpha;
        self.coefficients
            .iter()
            .enumerate()
            .fold(0.0, |acc, (i, &a)| acc + mode(i as u32 + 1, t, x, a, alpha))
    }

    /// The first `n` coefficients as a shorter series.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.len());
        let mut config = self.config.clone();
        config.modes = n as u32;
        FourierSeries {
            config,
            coefficients: self.coefficients[..n].to_vec(),
            runs: self.runs.iter().take(n).cloned().collect(),
        }
    }

    pub fn grid(&self, t_grid: &[f64], x_grid: &[f64]) -> Result<SolutionGrid, HeatError> {
        for &t in t_grid {
            if !(0.0..=1.0).contains(&t) {
                return Err(HeatError::Domain { t, x: x_grid.first().copied().unwrap_or(0.0) });
            }
        }
        for &x in x_grid {
            if !(-1.0..=1.0).contains(&x) {
                return Err(HeatError::Domain { t: t_grid.first().copied().unwrap_or(0.0), x });
            }
        }
        let u = t_grid
            .iter()
            .map(|&t| x_grid.iter().map(|&x| self.evaluate(t, x)).collect())
            .collect();
        Ok(SolutionGrid {
            t: t_grid.to_vec(),
            x: x_grid.to_vec(),
            u,
            warnings: self.warnings(),
        })
    }

    pub fn write_coefficients_json<W: Write>(&self, w: W) -> Result<(), serde_json::Error> {
        let doc = CoefficientFile {
            alpha: self.config.alpha,
            modes: self.config.modes,
            rule: self.config.coeff_rule.name(),
            variant: self.config.variant,
            digits: self.config.digits,
            delta: self.config.quartic.delta(),
            coefficients: self
                .coefficients
                .iter()
                .enumerate()
                .map(|(i, &value)| CoefficientRecord {
                    n: i as u32 + 1,
                    value,
                    error_estimate: self.runs.get(i).map(|r| r.error_estimate),
                    fevals: self.runs.get(i).map(|r| r.fevals),
                    warnings: self.runs.get(i).map(|r| r.warnings.clone()).unwrap_or_default(),
                })
                .collect(),
        };
        serde_json::to_writer_pretty(w, &doc)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub n: u32,
    pub value: f64,
    pub error_estimate: Option<f64>,
    pub fevals: Option<u64>,
    pub warnings: Warnings,
}

/// JSON layout of an exported coefficient list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub alpha: f64,
    pub modes: u32,
    pub rule: String,
    pub variant: IntegrandVariant,
    pub digits: u32,
    pub delta: f64,
    pub coefficients: Vec<CoefficientRecord>,
}

impl CoefficientFile {
    pub fn read<R: Read>(r: R) -> Result<Self, serde_json::Error> {
        serde_json::from_reader(r)
    }
}

/// `u^N` on a tensor grid; `u[i][j]` is the value at `(t[i], x[j])`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionGrid {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub warnings: Warnings,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub t: f64,
    pub x: f64,
    pub u: f64,
}

impl SolutionGrid {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.u[i]
    }

    /// Long-format records, `t` outer and `x` inner.
    pub fn records(&self) -> Vec<GridRecord> {
        let mut out = Vec::with_capacity(self.t.len() * self.x.len());
        for (i, &t) in self.t.iter().enumerate() {
            for (j, &x) in self.x.iter().enumerate() {
                out.push(GridRecord { t, x, u: self.u[i][j] });
            }
        }
        out
    }

    /// CSV with header `t,x,u`; values use the shortest round-tripping form.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        for r in self.records() {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Rebuilds a grid from long-format records written by [`Self::write_csv`].
    pub fn read_csv<R: Read>(r: R) -> Result<Self, HeatError> {
        let mut reader = csv::Reader::from_reader(r);
        let mut records = Vec::new();
        for rec in reader.deserialize::<GridRecord>() {
            records.push(rec.map_err(|e| HeatError::Shape(e.to_string()))?);
        }
        Self::from_records(&records)
    }

    pub fn from_records(records: &[GridRecord]) -> Result<Self, HeatError> {
        let mut t: Vec<f64> = Vec::new();
        let mut x: Vec<f64> = Vec::new();
        let mut u: Vec<Vec<f64>> = Vec::new();
        for r in records {
            if t.last() != Some(&r.t) {
                t.push(r.t);
                u.push(Vec::new());
            }
            let row = u.last_mut().expect("row pushed above");
            if t.len() == 1 {
                x.push(r.x);
            } else if x.get(row.len()) != Some(&r.x) {
                return Err(HeatError::Shape(format!("x = {} out of order at t = {}", r.x, r.t)));
            }
            row.push(r.u);
        }
        if u.iter().any(|row| row.len() != x.len()) {
            return Err(HeatError::Shape("ragged rows".to_owned()));
        }
        Ok(SolutionGrid {
            t,
            x,
            u,
            warnings: Warnings::new(),
        })
    }
}

/// Builds the coefficient series for `cfg` and evaluates it on the grid.
pub fn solution_grid(cfg: &HeatConfig, t_grid: &[f64], x_grid: &[f64]) -> Result<SolutionGrid, HeatError> {
    FourierSeries::compute(cfg)?.grid(t_grid, x_grid)
}

/// Per-time sup-norm of `corrupted - clean`.
pub fn bias_profile(clean: &SolutionGrid, corrupted: &SolutionGrid) -> Result<Vec<(f64, f64)>, HeatError> {
    if clean.t != corrupted.t || clean.x != corrupted.x {
        return Err(HeatError::Shape(format!(
            "{}x{} grid against {}x{}",
            clean.t.len(),
            clean.x.len(),
            corrupted.t.len(),
            corrupted.x.len()
        )));
    }
    Ok(clean
        .t
        .iter()
        .zip(clean.u.iter().zip(&corrupted.u))
        .map(|(&t, (a, b))| {
            let sup = a.iter().zip(b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
            (t, sup)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasRecord {
    pub t: f64,
    pub sup_diff: f64,
}

pub fn write_bias_csv<W: Write>(profile: &[(f64, f64)], w: W) -> Result<(), csv::Error> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    for &(t, sup_diff) in profile {
        out.serialize(BiasRecord { t, sup_diff })?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_bias_csv<R: Read>(r: R) -> Result<Vec<(f64, f64)>, csv::Error> {
    csv::Reader::from_reader(r)
        .deserialize::<BiasRecord>()
        .map(|rec| rec.map(|b| (b.t, b.sup_diff)))
        .collect()
}

/// `t` in {0, 0.01, ..., 1}.
pub fn default_t_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 100.0).collect()
}

/// 201 uniform points on [-1, 1].
pub fn default_x_grid() -> Vec<f64> {
    crate::diagnostics::uniform_grid(-1.0, 1.0, 201)
}
