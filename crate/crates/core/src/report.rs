//! Parameter sweeps over rules, regimes and the integrand parameter, rendered
//! as comparison tables (Markdown, CSV, JSON).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{IntegrandError, ReportError};
use crate::integrands::{Finance, FinanceParams, IntegrandVariant, Quartic, QuarticParams};
use crate::quadrature::{integrate, QuadratureResult, RuleId, Tolerances, Warning, Warnings};

/// What a sweep integrates; `param` is delta for the quartic families and
/// sigma for the finance integrand.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SweepTarget {
    /// The quartic over [-1, 1].
    Quartic,
    /// The Fourier coefficient `A_n` of the quartic.
    Coefficient { n: u32 },
    /// Real part of the contour integral over `[0, length]`.
    Finance { length: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub target: SweepTarget,
    pub rules: Vec<RuleId>,
    pub variants: Vec<IntegrandVariant>,
    pub params: Vec<f64>,
    pub digits: u32,
    pub tol: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub rule: String,
    pub param: f64,
    pub variant: IntegrandVariant,
    pub value: f64,
    pub error_vs_reference: f64,
    pub elapsed_seconds: f64,
    pub fevals: u64,
    pub warnings: Warnings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepSpec {
    fn reference_variant(&self) -> IntegrandVariant {
        match self.target {
            SweepTarget::Finance { .. } => IntegrandVariant::FinanceHighPrec,
            _ => IntegrandVariant::QuarticHighPrec,
        }
    }

    pub fn validate(&self) -> Result<(), ReportError> {
        if self.rules.is_empty() {
            return Err(ReportError::Usage("sweep needs at least one rule".to_owned()));
        }
        if self.variants.is_empty() {
            return Err(ReportError::Usage("sweep needs at least one variant".to_owned()));
        }
        if self.params.is_empty() {
            return Err(ReportError::Usage("sweep needs at least one parameter value".to_owned()));
        }
        let finance = matches!(self.target, SweepTarget::Finance { .. });
        for v in &self.variants {
            if v.is_quartic() == finance {
                return Err(ReportError::Usage(format!("variant {v} does not fit this sweep")));
            }
        }
        if let SweepTarget::Coefficient { n: 0 } = self.target {
            return Err(ReportError::Usage("coefficient index starts at 1".to_owned()));
        }
        Ok(())
    }

    fn run_one(&self, rule: RuleId, variant: IntegrandVariant, param: f64) -> Result<QuadratureResult, ReportError> {
        match self.target {
            SweepTarget::Quartic | SweepTarget::Coefficient { .. } => {
                let p = QuarticParams::new(param).map_err(IntegrandError::from)?;
                let mut q = Quartic::new(variant, p, self.digits)?;
                if let SweepTarget::Coefficient { n } = self.target {
                    q = q.weighted(n);
                }
                Ok(integrate(rule, &q, -1.0, 1.0, self.tol)?)
            }
            SweepTarget::Finance { length } => {
                let ctx = variant.context(self.digits)?;
                let f = Finance::new(FinanceParams::reference(param), ctx)?;
                let r = integrate(rule, &f, 0.0, length, self.tol)?;
                Ok(real_part(r))
            }
        }
    }

    /// Runs the reference (GK15 in high precision) for every parameter first,
    /// then every (rule, variant, param) combination in a worker pool.
    pub fn run(&self) -> Result<SweepReport, ReportError> {
        self.validate()?;
        let ref_variant = self.reference_variant();
        let references: Vec<(f64, QuadratureResult)> = self
            .params
            .par_iter()
            .map(|&param| {
                self.run_one(RuleId::Gk15, ref_variant, param)
                    .map(|r| (param, r))
                    .map_err(|e| ReportError::Reference(format!("param {param}: {e}")))
            })
            .collect::<Result<_, _>>()?;
        for (param, r) in &references {
            if !r.value.is_finite() {
                return Err(ReportError::Reference(format!("param {param}: non-finite value")));
            }
        }

        let mut jobs = Vec::new();
        for &rule in &self.rules {
            for &variant in &self.variants {
                for (k, &param) in self.params.iter().enumerate() {
                    jobs.push((rule, variant, param, k));
                }
            }
        }
        let mut rows: Vec<(RuleId, SweepRow)> = jobs
            .par_iter()
            .map(|&(rule, variant, param, k)| {
                let reference = &references[k].1;
                let r = if rule == RuleId::Gk15 && variant == ref_variant {
                    reference.clone()
                } else {
                    self.run_one(rule, variant, param)?
                };
                Ok((
                    rule,
                    SweepRow {
                        rule: rule.name(),
                        param,
                        variant,
                        value: r.value,
                        error_vs_reference: r.value - reference.value,
                        elapsed_seconds: r.elapsed.as_secs_f64(),
                        fevals: r.fevals,
                        warnings: r.warnings,
                    },
                ))
            })
            .collect::<Result<_, ReportError>>()?;
        rows.sort_by(|(ra, a), (rb, b)| {
            ra.rank()
                .cmp(&rb.rank())
                .then_with(|| rule_step(ra).total_cmp(&rule_step(rb)))
                .then_with(|| a.param.total_cmp(&b.param))
                .then_with(|| a.variant.cmp(&b.variant))
        });
        Ok(SweepReport {
            rows: rows.into_iter().map(|(_, row)| row).collect(),
        })
    }
}

fn rule_step(rule: &RuleId) -> f64 {
    match rule {
        RuleId::Trapezoid { step } => *step,
        _ => 0.0,
    }
}

fn real_part(r: QuadratureResult<crate::precision::Complex<f64>>) -> QuadratureResult {
    QuadratureResult {
        value: r.value.re,
        error_estimate: r.error_estimate,
        fevals: r.fevals,
        warnings: r.warnings,
        elapsed: r.elapsed,
    }
}

/// Output format of a rendered report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "md" => Ok(Format::Markdown),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

/// Fixed 15-decimal rendering used for values and errors.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.15}")
}

pub fn fmt_seconds(s: f64) -> String {
    format!("{s:.3}")
}

pub fn fmt_warnings(w: &Warnings) -> String {
    w.iter().map(Warning::as_str).collect::<Vec<_>>().join(";")
}

fn parse_warnings(s: &str) -> Result<Warnings, ReportError> {
    s.split(';')
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<Warning>().map_err(ReportError::Parse))
        .collect()
}

const CSV_HEADER: [&str; 8] = [
    "rule",
    "param",
    "variant",
    "value",
    "error_vs_reference",
    "elapsed_seconds",
    "fevals",
    "warnings",
];

impl SweepReport {
    /// Row whose error column is measured against, for a given parameter.
    pub fn reference_row(&self, param: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| {
            r.param == param
                && r.rule == "gk15"
                && matches!(r.variant, IntegrandVariant::QuarticHighPrec | IntegrandVariant::FinanceHighPrec)
        })
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), ReportError> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(CSV_HEADER)?;
        for r in &self.rows {
            out.write_record([
                r.rule.clone(),
                r.param.to_string(),
                r.variant.to_string(),
                fmt_value(r.value),
                fmt_value(r.error_vs_reference),
                fmt_seconds(r.elapsed_seconds),
                r.fevals.to_string(),
                fmt_warnings(&r.warnings),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Parses a CSV written by [`Self::write_csv`]. Values come back at the
    /// 15-decimal resolution they were written with.
    pub fn read_csv<R: Read>(r: R) -> Result<Self, ReportError> {
        let mut reader = csv::Reader::from_reader(r);
        if reader.headers()?.iter().ne(CSV_HEADER) {
            return Err(ReportError::Parse("unexpected sweep header".to_owned()));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| ReportError::Parse(format!("{s:?}: {e}")));
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            rows.push(SweepRow {
                rule: rec[0].to_owned(),
                param: num(&rec[1])?,
                variant: rec[2].parse().map_err(ReportError::Parse)?,
                value: num(&rec[3])?,
                error_vs_reference: num(&rec[4])?,
                elapsed_seconds: num(&rec[5])?,
                fevals: rec[6].parse().map_err(|e| ReportError::Parse(format!("{e}")))?,
                warnings: parse_warnings(&rec[7])?,
            });
        }
        Ok(SweepReport { rows })
    }

    /// The report as it reads back from CSV: values rounded to 15 decimals,
    /// seconds to 3.
    pub fn rounded(&self) -> Self {
        let round = |v: f64, s: String| if v.is_finite() { s.parse().unwrap_or(v) } else { v };
        SweepReport {
            rows: self
                .rows
                .iter()
                .map(|r| SweepRow {
                    value: round(r.value, fmt_value(r.value)),
                    error_vs_reference: round(r.error_vs_reference, fmt_value(r.error_vs_reference)),
                    elapsed_seconds: round(r.elapsed_seconds, fmt_seconds(r.elapsed_seconds)),
                    ..r.clone()
                })
                .collect(),
        }
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        s.push_str("| Rule | Param | Variant | Value | Error | Time [s] | Fevals | Warning |\n");
        s.push_str("|---|---:|---|---:|---:|---:|---:|---|\n");
        for r in &self.rows {
            let warn = if r.warnings.is_empty() {
                "No".to_owned()
            } else {
                format!("Yes ({})", fmt_warnings(&r.warnings).replace(';', ", "))
            };
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} | {} |",
                r.rule,
                r.param,
                r.variant,
                fmt_value(r.value),
                fmt_value(r.error_vs_reference),
                fmt_seconds(r.elapsed_seconds),
                r.fevals,
                warn
            );
        }
        s
    }

    pub fn to_json(&self) -> Result<String, ReportError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn render(&self, format: Format) -> Result<String, ReportError> {
        match format {
            Format::Markdown => Ok(self.to_markdown()),
            Format::Json => self.to_json(),
            Format::Csv => {
                let mut buf = Vec::new();
                self.write_csv(&mut buf)?;
                String::from_utf8(buf).map_err(|e| ReportError::Parse(e.to_string()))
            }
        }
    }

    /// Rows grouped by parameter, in report order.
    pub fn by_param(&self) -> BTreeMap<String, Vec<&SweepRow>> {
        let mut map: BTreeMap<String, Vec<&SweepRow>> = BTreeMap::new();
        for r in &self.rows {
            map.entry(r.param.to_string()).or_default().push(r);
        }
        map
    }
}
