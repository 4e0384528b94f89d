//! Frequency and partition planning by exhaustive candidate evaluation.
//!
//! Both planners enumerate every candidate decision, keep the full candidate
//! table, and pick the feasible candidate with the best objective. Ties fall
//! to the other metric (latency for energy objectives, energy for latency
//! objectives), then to the smaller frequency, then to the larger partition
//! index. When nothing is feasible a best-effort candidate is returned with
//! `feasible = false` instead of an error.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::PlanError;
use crate::model::{Frequency, ModelFamily};
use crate::profile::{validate_profile, DeviceProfile, EdgeProfile, NetworkProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "objective", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LocalPlanRequest {
    MinEnergyUnderDeadline { deadline_ms: f64 },
    MinLatencyUnderEnergy { energy_budget_j: f64 },
}

impl LocalPlanRequest {
    fn check(&self) -> Result<(), PlanError> {
        match *self {
            LocalPlanRequest::MinEnergyUnderDeadline { deadline_ms } if !(deadline_ms > 0.0) => {
                Err(PlanError::Config(format!("deadline must be positive, got {deadline_ms}")))
            }
            LocalPlanRequest::MinLatencyUnderEnergy { energy_budget_j } if !(energy_budget_j > 0.0) => {
                Err(PlanError::Config(format!("energy budget must be positive, got {energy_budget_j}")))
            }
            _ => Ok(()),
        }
    }

    fn feasible(&self, latency_ms: f64, energy_j: f64) -> bool {
        match *self {
            LocalPlanRequest::MinEnergyUnderDeadline { deadline_ms } => latency_ms <= deadline_ms,
            LocalPlanRequest::MinLatencyUnderEnergy { energy_budget_j } => energy_j <= energy_budget_j,
        }
    }
}

/// Device clock used while planning a partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeviceFrequency {
    /// Highest frequency of the device scale.
    Max,
    Fixed(Frequency),
}

impl Serialize for DeviceFrequency {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            DeviceFrequency::Max => s.serialize_str("max"),
            DeviceFrequency::Fixed(f) => s.serialize_f64(f.get()),
        }
    }
}

impl<'de> Deserialize<'de> for DeviceFrequency {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Ghz(f64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) if s == "max" => Ok(DeviceFrequency::Max),
            Repr::Text(s) => Err(serde::de::Error::custom(format!("expected \"max\" or a frequency, got {s:?}"))),
            Repr::Ghz(v) => Frequency::ghz(v).map(DeviceFrequency::Fixed).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionPlanRequest {
    pub deadline_ms: f64,
    pub rate_mbps: f64,
    pub device_freq: DeviceFrequency,
    /// Also search over every frequency of the device scale.
    pub joint_freq: bool,
}

impl PartitionPlanRequest {
    pub fn new(deadline_ms: f64, rate_mbps: f64) -> Self {
        Self { deadline_ms, rate_mbps, device_freq: DeviceFrequency::Max, joint_freq: false }
    }

    fn check(&self) -> Result<(), PlanError> {
        if !(self.deadline_ms > 0.0) {
            return Err(PlanError::Config(format!("deadline must be positive, got {}", self.deadline_ms)));
        }
        if !(self.rate_mbps > 0.0) || !self.rate_mbps.is_finite() {
            return Err(PlanError::Config(format!("rate must be positive, got {}", self.rate_mbps)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlanRequest {
    Local(LocalPlanRequest),
    Partition(PartitionPlanRequest),
}

/// Where the network is split. Frequency-only plans run everything locally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partition {
    Local,
    /// Blocks `1..=m` on the device, the rest on the edge.
    Point(usize),
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Partition::Local => f.write_str("local"),
            Partition::Point(m) => write!(f, "{m}"),
        }
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Partition::Local => s.serialize_str("local"),
            Partition::Point(m) => s.serialize_u64(*m as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Index(u64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) if s == "local" => Ok(Partition::Local),
            Repr::Text(s) => Err(serde::de::Error::custom(format!("expected \"local\" or an index, got {s:?}"))),
            Repr::Index(m) => Ok(Partition::Point(m as usize)),
        }
    }
}

/// Latency split of a partition candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionBreakdown {
    pub device_ms: f64,
    pub upload_ms: f64,
    pub edge_ms: f64,
    pub compute_energy_j: f64,
    pub transmit_energy_j: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub frequency_ghz: f64,
    pub partition: Partition,
    pub latency_ms: f64,
    pub energy_j: f64,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakdown: Option<PartitionBreakdown>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub request: PlanRequest,
    pub model_family: ModelFamily,
    pub frequency_ghz: f64,
    pub partition: Partition,
    pub predicted_latency_ms: f64,
    pub predicted_energy_j: f64,
    pub feasible: bool,
    /// Index of the chosen row in `candidates`.
    pub chosen: usize,
    pub candidates: Vec<Candidate>,
}

impl Plan {
    fn from_choice(request: PlanRequest, family: ModelFamily, candidates: Vec<Candidate>, chosen: usize) -> Self {
        let c = candidates[chosen];
        Plan {
            request,
            model_family: family,
            frequency_ghz: c.frequency_ghz,
            partition: c.partition,
            predicted_latency_ms: c.latency_ms,
            predicted_energy_j: c.energy_j,
            feasible: c.feasible,
            chosen,
            candidates,
        }
    }
}

/// A plan re-scored under another (or the same) model family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub truth_family: ModelFamily,
    pub actual_latency_ms: f64,
    pub actual_energy_j: f64,
    /// Whether the original deadline (or energy budget) holds under the truth model.
    pub deadline_met: bool,
}

fn ensure_valid(net: &NetworkProfile, dev: &DeviceProfile, edge: Option<&EdgeProfile>) -> Result<(), PlanError> {
    let report = validate_profile(net, dev, edge);
    if report.is_valid() {
        Ok(())
    } else {
        let msgs: Vec<String> = report.violations().map(|i| format!("{}: {}", i.location, i.message)).collect();
        Err(PlanError::Config(format!("invalid profile: {}", msgs.join("; "))))
    }
}

fn ensure_family(net: &NetworkProfile, family: ModelFamily) -> Result<(), PlanError> {
    if family == ModelFamily::CpuDvfs && !net.has_cpu_dvfs() {
        return Err(PlanError::Config("cpu-dvfs planning needs a cpu_dvfs model on every block".into()));
    }
    Ok(())
}

/// Lexicographic candidate order: objective, secondary metric, smaller frequency, larger partition.
fn compare(a: &Candidate, b: &Candidate, primary: impl Fn(&Candidate) -> (f64, f64)) -> Ordering {
    let (pa, sa) = primary(a);
    let (pb, sb) = primary(b);
    pa.total_cmp(&pb)
        .then(sa.total_cmp(&sb))
        .then(a.frequency_ghz.total_cmp(&b.frequency_ghz))
        .then(partition_rank(b.partition).cmp(&partition_rank(a.partition)))
}

fn partition_rank(p: Partition) -> usize {
    match p {
        Partition::Local => usize::MAX,
        Partition::Point(m) => m,
    }
}

fn best_by(candidates: &[Candidate], filter: impl Fn(&Candidate) -> bool, key: impl Fn(&Candidate) -> (f64, f64) + Copy) -> Option<usize> {
    candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| filter(c))
        .min_by(|(ia, a), (ib, b)| compare(a, b, key).then(ia.cmp(ib)))
        .map(|(i, _)| i)
}

/// Picks the frequency for fully local inference.
pub fn plan_frequency(
    net: &NetworkProfile,
    dev: &DeviceProfile,
    req: &LocalPlanRequest,
    family: ModelFamily,
) -> Result<Plan, PlanError> {
    req.check()?;
    ensure_valid(net, dev, None)?;
    ensure_family(net, family)?;
    let kappa = dev.kappa()?;

    let mut candidates = Vec::with_capacity(dev.freq_scale_ghz.len());
    for f in dev.frequencies()? {
        let latency_ms = net.total_latency_for(family, f)?;
        let energy_j = crate::model::predict_energy(kappa, f, latency_ms)?;
        candidates.push(Candidate {
            frequency_ghz: f.get(),
            partition: Partition::Local,
            latency_ms,
            energy_j,
            feasible: req.feasible(latency_ms, energy_j),
            breakdown: None,
        });
    }

    let key = |c: &Candidate| match req {
        LocalPlanRequest::MinEnergyUnderDeadline { .. } => (c.energy_j, c.latency_ms),
        LocalPlanRequest::MinLatencyUnderEnergy { .. } => (c.latency_ms, c.energy_j),
    };
    let chosen = match best_by(&candidates, |c| c.feasible, key) {
        Some(i) => i,
        // scale is strictly increasing, so the ends are the fastest and the most frugal
        None => match req {
            LocalPlanRequest::MinEnergyUnderDeadline { .. } => candidates.len() - 1,
            LocalPlanRequest::MinLatencyUnderEnergy { .. } => 0,
        },
    };
    Ok(Plan::from_choice(PlanRequest::Local(*req), family, candidates, chosen))
}

fn partition_candidate(
    net: &NetworkProfile,
    dev: &DeviceProfile,
    edge: &EdgeProfile,
    family: ModelFamily,
    f: Frequency,
    m: usize,
    req: &PartitionPlanRequest,
) -> Result<Candidate, PlanError> {
    let device_ms = net.prefix_latency_for(family, m, f)?;
    let upload_ms = net.upload_bytes(m)? * 8e-3 / req.rate_mbps;
    let edge_ms = edge.suffix_latency(m);
    let compute_energy_j = dev.kappa()?.dynamic_energy_j(f, device_ms);
    let transmit_energy_j = dev.tx_power() * upload_ms * 1e-3;
    let latency_ms = device_ms + upload_ms + edge_ms;
    Ok(Candidate {
        frequency_ghz: f.get(),
        partition: Partition::Point(m),
        latency_ms,
        energy_j: compute_energy_j + transmit_energy_j,
        feasible: latency_ms <= req.deadline_ms,
        breakdown: Some(PartitionBreakdown { device_ms, upload_ms, edge_ms, compute_energy_j, transmit_energy_j }),
    })
}

fn require_partition_inputs<'a>(
    net: &NetworkProfile,
    dev: &DeviceProfile,
    edge: Option<&'a EdgeProfile>,
    family: ModelFamily,
) -> Result<&'a EdgeProfile, PlanError> {
    let edge = edge.ok_or_else(|| PlanError::Config("partition planning needs an edge profile".into()))?;
    ensure_valid(net, dev, Some(edge))?;
    ensure_family(net, family)?;
    if !net.has_feature_sizes() {
        return Err(PlanError::Config(format!(
            "network {} lacks output_bytes on some blocks; partition planning needs every feature size",
            net.name
        )));
    }
    Ok(edge)
}

/// Picks the partition point (and optionally frequency) minimizing device energy under a deadline.
pub fn plan_partition(
    net: &NetworkProfile,
    dev: &DeviceProfile,
    edge: Option<&EdgeProfile>,
    req: &PartitionPlanRequest,
    family: ModelFamily,
) -> Result<Plan, PlanError> {
    req.check()?;
    let edge = require_partition_inputs(net, dev, edge, family)?;

    let freqs = if req.joint_freq {
        dev.frequencies()?
    } else {
        match req.device_freq {
            DeviceFrequency::Max => vec![dev.max_frequency()?],
            DeviceFrequency::Fixed(f) if dev.in_scale(f) => vec![f],
            DeviceFrequency::Fixed(f) => {
                return Err(PlanError::Config(format!("device frequency {f} is not on the device scale")))
            }
        }
    };

    let mut candidates = Vec::with_capacity(freqs.len() * (net.block_count() + 1));
    for &f in &freqs {
        for m in 0..=net.block_count() {
            candidates.push(partition_candidate(net, dev, edge, family, f, m, req)?);
        }
    }

    let chosen = best_by(&candidates, |c| c.feasible, |c| (c.energy_j, c.latency_ms))
        .or_else(|| best_by(&candidates, |_| true, |c| (c.latency_ms, c.energy_j)))
        .expect("at least one candidate");
    Ok(Plan::from_choice(PlanRequest::Partition(*req), family, candidates, chosen))
}

/// Re-scores a plan's decision under `truth` and checks the original constraint.
pub fn evaluate_plan(
    plan: &Plan,
    net: &NetworkProfile,
    dev: &DeviceProfile,
    edge: Option<&EdgeProfile>,
    truth: ModelFamily,
) -> Result<Evaluation, PlanError> {
    let f = Frequency::ghz(plan.frequency_ghz)?;
    match &plan.request {
        PlanRequest::Local(req) => {
            ensure_valid(net, dev, None)?;
            ensure_family(net, truth)?;
            let latency_ms = net.total_latency_for(truth, f)?;
            let energy_j = crate::model::predict_energy(dev.kappa()?, f, latency_ms)?;
            Ok(Evaluation {
                truth_family: truth,
                actual_latency_ms: latency_ms,
                actual_energy_j: energy_j,
                deadline_met: req.feasible(latency_ms, energy_j),
            })
        }
        PlanRequest::Partition(req) => {
            let edge = require_partition_inputs(net, dev, edge, truth)?;
            let m = match plan.partition {
                Partition::Point(m) => m,
                Partition::Local => net.block_count(),
            };
            let c = partition_candidate(net, dev, edge, truth, f, m, req)?;
            Ok(Evaluation {
                truth_family: truth,
                actual_latency_ms: c.latency_ms,
                actual_energy_j: c.energy_j,
                deadline_met: c.feasible,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSweepRow {
    pub rate_mbps: f64,
    pub partition: Partition,
    pub frequency_ghz: f64,
    pub latency_ms: f64,
    pub energy_j: f64,
    pub feasible: bool,
}

/// Runs [`plan_partition`] once per rate, keeping the input order.
///
/// `base` supplies the deadline and frequency settings; its rate is replaced.
pub fn rate_sweep(
    net: &NetworkProfile,
    dev: &DeviceProfile,
    edge: Option<&EdgeProfile>,
    rates_mbps: &[f64],
    base: &PartitionPlanRequest,
    family: ModelFamily,
) -> Result<Vec<RateSweepRow>, PlanError> {
    rates_mbps
        .iter()
        .map(|&rate_mbps| {
            let req = PartitionPlanRequest { rate_mbps, ..*base };
            let plan = plan_partition(net, dev, edge, &req, family)?;
            Ok(RateSweepRow {
                rate_mbps,
                partition: plan.partition,
                frequency_ghz: plan.frequency_ghz,
                latency_ms: plan.predicted_latency_ms,
                energy_j: plan.predicted_energy_j,
                feasible: plan.feasible,
            })
        })
        .collect()
}
