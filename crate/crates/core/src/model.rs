//! Latency and energy models evaluated at a GPU clock frequency.
//!
//! Units are fixed across the crate: frequency in GHz, latency in ms,
//! energy in J. The energy coefficient is expressed in W/GHz³ so that
//! `kappa * f^3` is a power in watts when `f` is in GHz.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Upper bound on the power-law exponent accepted by the models and the fitter.
pub const MAX_EXPONENT: f64 = 4.0;

/// GPU clock frequency in GHz. Always finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Frequency(f64);

impl Frequency {
    pub fn ghz(value: f64) -> Result<Self, ModelError> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(ModelError::NonPositiveFrequency(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Frequency {
    type Error = ModelError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::ghz(value)
    }
}

impl From<Frequency> for f64 {
    fn from(f: Frequency) -> f64 {
        f.0
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} GHz", self.0)
    }
}

/// Which latency model family a computation should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelFamily {
    /// `t = a * f^(-b) + c`
    PowerLaw,
    /// `t = coeff / f`
    CpuDvfs,
}

impl ModelFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelFamily::PowerLaw => "power-law",
            ModelFamily::CpuDvfs => "cpu-dvfs",
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Frequency-dependent latency `a * f^(-b) + c` (ms, f in GHz).
///
/// `a` carries the compute-bound share of the work, `b` how strongly it
/// scales with the clock, and `c` a frequency-independent floor that
/// dominates once the kernel becomes memory bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLawModel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PowerLawModel {
    /// Builds a model, rejecting parameters outside `a >= 0`, `c >= 0`, `0 < b <= 4`.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, ModelError> {
        let model = Self { a, b, c };
        model.check()?;
        Ok(model)
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if !(self.a.is_finite() && self.a >= 0.0) {
            return Err(ModelError::InvalidParameter { name: "a", value: self.a });
        }
        if !(self.b.is_finite() && self.b > 0.0 && self.b <= MAX_EXPONENT) {
            return Err(ModelError::InvalidParameter { name: "b", value: self.b });
        }
        if !(self.c.is_finite() && self.c >= 0.0) {
            return Err(ModelError::InvalidParameter { name: "c", value: self.c });
        }
        Ok(())
    }

    /// Latency in ms at frequency `f`.
    pub fn latency_ms(&self, f: Frequency) -> f64 {
        self.a * f.get().powf(-self.b) + self.c
    }

    /// Dynamic energy in J of one inference at `f`: `kappa * (a f^(3-b) + c f^3)`.
    pub fn energy_j(&self, kappa: EnergyCoefficient, f: Frequency) -> f64 {
        kappa.dynamic_energy_j(f, self.latency_ms(f))
    }
}

/// Inverse-proportional latency `coeff / f` (ms, f in GHz).
///
/// `coeff` collapses the workload-over-throughput ratio `w / g` into a
/// single number with unit ms·GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CpuDvfsModel {
    pub coeff: f64,
}

impl CpuDvfsModel {
    pub fn new(coeff: f64) -> Result<Self, ModelError> {
        let model = Self { coeff };
        model.check()?;
        Ok(model)
    }

    /// Analytic construction from a FLOP count and the FLOPs retired per cycle.
    ///
    /// `flops / flops_per_cycle` cycles at `f` GHz take `flops / (flops_per_cycle * f * 1e9)`
    /// seconds, hence `coeff = flops / flops_per_cycle * 1e-6` in ms·GHz.
    pub fn from_workload(flops: f64, flops_per_cycle: f64) -> Result<Self, ModelError> {
        if !(flops_per_cycle.is_finite() && flops_per_cycle > 0.0) {
            return Err(ModelError::InvalidParameter {
                name: "flops_per_cycle",
                value: flops_per_cycle,
            });
        }
        Self::new(flops / flops_per_cycle * 1e-6)
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if self.coeff.is_finite() && self.coeff > 0.0 {
            Ok(())
        } else {
            Err(ModelError::InvalidParameter { name: "coeff", value: self.coeff })
        }
    }

    pub fn latency_ms(&self, f: Frequency) -> f64 {
        self.coeff / f.get()
    }

    /// The same curve expressed as a power law with unit exponent and no floor.
    pub fn as_power_law(&self) -> PowerLawModel {
        PowerLawModel { a: self.coeff, b: 1.0, c: 0.0 }
    }
}

/// Equivalent dynamic-energy coefficient in W/GHz³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EnergyCoefficient(f64);

impl EnergyCoefficient {
    pub fn new(kappa: f64) -> Result<Self, ModelError> {
        if kappa.is_finite() && kappa > 0.0 {
            Ok(Self(kappa))
        } else {
            Err(ModelError::InvalidParameter { name: "kappa", value: kappa })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `kappa * f^3 * t` with `t` in ms, returned in J. Callers must pass `t >= 0`.
    pub(crate) fn dynamic_energy_j(self, f: Frequency, latency_ms: f64) -> f64 {
        let f = f.get();
        self.0 * f * f * f * latency_ms * 1e-3
    }
}

impl TryFrom<f64> for EnergyCoefficient {
    type Error = ModelError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<EnergyCoefficient> for f64 {
    fn from(k: EnergyCoefficient) -> f64 {
        k.0
    }
}

pub fn predict_power_law(model: &PowerLawModel, f: Frequency) -> f64 {
    model.latency_ms(f)
}

pub fn predict_cpu_dvfs(model: &CpuDvfsModel, f: Frequency) -> f64 {
    model.latency_ms(f)
}

/// Energy in J spent running for `latency_ms` at `f`.
pub fn predict_energy(kappa: EnergyCoefficient, f: Frequency, latency_ms: f64) -> Result<f64, ModelError> {
    if !(latency_ms >= 0.0) || !latency_ms.is_finite() {
        return Err(ModelError::NegativeLatency(latency_ms));
    }
    Ok(kappa.dynamic_energy_j(f, latency_ms))
}

pub fn energy_at_frequency(model: &PowerLawModel, kappa: EnergyCoefficient, f: Frequency) -> f64 {
    model.energy_j(kappa, f)
}
