use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use pq_osc_core::coherent::DimChoice;
use pq_osc_core::numbers::{DeformationParams, FamilyKind, FamilyPreset};
use pq_osc_core::susy::EntangledKind;

use crate::error::CliError;

#[derive(Debug, Parser, Serialize)]
#[serde(transparent)]
#[command(
    name = "pq-osc",
    version,
    about = "Deformed oscillator tables and verification suites"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Deformed numbers [n] for n = 0..=n-max.
    Numbers(Common),
    /// Deformed exponentials along an alpha grid.
    Exp(Common),
    /// Bosonic and supersymmetric energy levels.
    Spectrum(Common),
    /// Coherent-state uncertainty product from three routes.
    Uncertainty(Common),
    /// Concurrence of entangled super-coherent states.
    Concurrence(Common),
    /// Any tabulated quantity over the configured grid.
    Sweep {
        #[arg(long, value_enum)]
        quantity: Quantity,
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
    },
    /// Run verification suites.
    Verify {
        /// Suite name, or `all`.
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Quantity {
    PqNumber,
    Spectrum,
    Uncertainty,
    #[value(name = "concurrence_L")]
    #[serde(rename = "concurrence_L")]
    ConcurrenceL,
    #[value(name = "concurrence_B")]
    #[serde(rename = "concurrence_B")]
    ConcurrenceB,
    ReferenceValues,
    IdentitySuite,
    AlgebraResiduals,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Nonsym,
    Sym,
    Fermionic,
    Fibonacci,
    Fibdiv,
    Tammdankov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Kind {
    #[value(name = "L")]
    L,
    #[value(name = "B")]
    B,
}

impl From<Kind> for EntangledKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::L => EntangledKind::L,
            Kind::B => EntangledKind::B,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Fibonacci divisor index (fibdiv only).
    #[arg(long)]
    pub k: Option<u32>,
    /// Complex start point `re[,im]`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// End modulus of the alpha grid, along the phase of --alpha.
    #[arg(long)]
    pub alpha_max: Option<f64>,
    /// Grid intervals between --alpha and --alpha-max.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    /// Truncation `N` or `auto`.
    #[arg(long, default_value = "auto")]
    pub dim: String,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Series tolerance for the exponentials.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum, default_value = "L")]
    pub kind: Kind,
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::ConfigInvalid {
        field: field.to_string(),
        message: message.into(),
    }
}

pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| {
        t.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| invalid("alpha", format!("cannot parse `{s}` as re[,im]")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(invalid("alpha", format!("expected re[,im], got `{s}`"))),
    }
}

impl Common {
    /// Resolves the deformation parameters and a label.
    pub fn params(&self) -> Result<(DeformationParams, String), CliError> {
        let Some(family) = self.family else {
            return match (self.p, self.q) {
                (Some(p), Some(q)) => {
                    if self.k.is_some() {
                        return Err(invalid("k", "--k applies only to --family fibdiv"));
                    }
                    let params = DeformationParams::new(p, q).map_err(|e| invalid("p", e.to_string()))?;
                    Ok((params, format!("p={p},q={q}")))
                }
                _ => Err(invalid("family", "give --family or both --p and --q")),
            };
        };
        if self.p.is_some() {
            return Err(invalid("p", "--p conflicts with --family"));
        }
        if self.k.is_some() && family != Family::Fibdiv {
            return Err(invalid("k", "--k applies only to --family fibdiv"));
        }
        let q_or = |default: f64| self.q.unwrap_or(default);
        let no_q = |name: &str| -> Result<(), CliError> {
            if self.q.is_some() {
                Err(invalid("q", format!("--q conflicts with --family {name}")))
            } else {
                Ok(())
            }
        };
        let kind = match family {
            Family::Nonsym => FamilyKind::NonSymmetricQ { q: q_or(1.3) },
            Family::Sym => FamilyKind::SymmetricQ { q: q_or(1.2) },
            Family::Fermionic => FamilyKind::FermionicQ { q: q_or(1.2) },
            Family::Tammdankov => FamilyKind::TammDankov { q: q_or(1.1) },
            Family::Fibonacci => {
                no_q("fibonacci")?;
                FamilyKind::Fibonacci
            }
            Family::Fibdiv => {
                no_q("fibdiv")?;
                FamilyKind::FibonacciDivisor { k: self.k.unwrap_or(2) }
            }
        };
        let preset = FamilyPreset::new(kind).map_err(|e| invalid("family", e.to_string()))?;
        Ok((preset.params(), preset.label()))
    }

    /// Grid `r_k e^{i phi}`, `r_k` evenly spaced from `|alpha|` to `alpha-max`.
    pub fn alpha_grid(&self) -> Result<Vec<Complex64>, CliError> {
        let start = match &self.alpha {
            Some(s) => parse_complex(s)?,
            None => Complex64::new(0.0, 0.0),
        };
        let Some(max) = self.alpha_max else {
            if self.steps.is_some() {
                return Err(invalid("steps", "--steps requires --alpha-max"));
            }
            return Ok(vec![start]);
        };
        let steps = self.steps.unwrap_or(10);
        if steps < 1 {
            return Err(invalid("steps", "must be at least 1"));
        }
        let (r0, phase) = (start.norm(), if start.norm() > 0.0 { start.arg() } else { 0.0 });
        if !(max.is_finite() && max >= r0) {
            return Err(invalid("alpha-max", format!("must be finite and >= |alpha| = {r0}")));
        }
        Ok((0..=steps)
            .map(|k| Complex64::from_polar(r0 + (max - r0) * k as f64 / steps as f64, phase))
            .collect())
    }

    pub fn dim(&self) -> Result<DimChoice, CliError> {
        if self.dim == "auto" {
            return Ok(DimChoice::Auto);
        }
        match self.dim.parse::<usize>() {
            Ok(d) if d >= 2 => Ok(DimChoice::Fixed(d)),
            _ => Err(invalid(
                "dim",
                format!("expected an integer >= 2 or `auto`, got `{}`", self.dim),
            )),
        }
    }

    pub fn tol(&self) -> Result<f64, CliError> {
        match self.tol {
            None => Ok(pq_osc_core::calculus::SeriesConfig::default().tol),
            Some(t) if t > 0.0 && t.is_finite() => Ok(t),
            Some(t) => Err(invalid("tol", format!("must be positive, got {t}"))),
        }
    }
}
