//! Network, device, and edge profiles plus the JSON profile file.
//!
//! A network is a serial chain of `M` blocks. Partition index `m` ranges over
//! `0..=M`: blocks `1..=m` run on the device, the rest on the edge server.
//! `m = 0` offloads the raw input and `m = M` is fully local inference.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, ProfileError};
use crate::model::{CpuDvfsModel, EnergyCoefficient, Frequency, ModelFamily, PowerLawModel, MAX_EXPONENT};

/// Transmit power assumed when a device profile does not state one.
pub const DEFAULT_TX_POWER_W: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockProfile {
    pub name: String,
    pub flops: f64,
    /// Size of the feature map this block hands to the next one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_bytes: Option<f64>,
    pub model: PowerLawModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpu_dvfs: Option<CpuDvfsModel>,
}

impl BlockProfile {
    pub fn latency_ms(&self, family: ModelFamily, f: Frequency) -> Result<f64, ProfileError> {
        match family {
            ModelFamily::PowerLaw => Ok(self.model.latency_ms(f)),
            ModelFamily::CpuDvfs => self
                .cpu_dvfs
                .as_ref()
                .map(|m| m.latency_ms(f))
                .ok_or_else(|| ProfileError::Invalid(format!("block {} has no cpu-dvfs model", self.name))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkProfile {
    pub name: String,
    pub input_bytes: f64,
    pub blocks: Vec<BlockProfile>,
}

impl NetworkProfile {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Sum of all block latencies under the power-law model.
    pub fn total_latency(&self, f: Frequency) -> f64 {
        self.blocks.iter().fold(0.0, |acc, b| acc + b.model.latency_ms(f))
    }

    /// Latency of blocks `1..=m` under the power-law model.
    pub fn prefix_latency(&self, m: usize, f: Frequency) -> Result<f64, ProfileError> {
        self.prefix_latency_for(ModelFamily::PowerLaw, m, f)
    }

    pub fn prefix_latency_for(&self, family: ModelFamily, m: usize, f: Frequency) -> Result<f64, ProfileError> {
        self.check_partition(m)?;
        self.blocks[..m].iter().try_fold(0.0, |acc, b| Ok(acc + b.latency_ms(family, f)?))
    }

    pub fn total_latency_for(&self, family: ModelFamily, f: Frequency) -> Result<f64, ProfileError> {
        self.prefix_latency_for(family, self.blocks.len(), f)
    }

    /// Device energy of running blocks `1..=m` at `f`, in J. Block energies are additive.
    pub fn prefix_energy(&self, dev: &DeviceProfile, m: usize, f: Frequency) -> Result<f64, ProfileError> {
        self.prefix_energy_for(ModelFamily::PowerLaw, dev, m, f)
    }

    pub fn prefix_energy_for(
        &self,
        family: ModelFamily,
        dev: &DeviceProfile,
        m: usize,
        f: Frequency,
    ) -> Result<f64, ProfileError> {
        let t = self.prefix_latency_for(family, m, f)?;
        Ok(dev.kappa()?.dynamic_energy_j(f, t))
    }

    /// Bytes sent to the edge when partitioning at `m`; nothing is sent for local inference.
    pub fn upload_bytes(&self, m: usize) -> Result<f64, ProfileError> {
        self.check_partition(m)?;
        if m == 0 {
            Ok(self.input_bytes)
        } else if m == self.blocks.len() {
            Ok(0.0)
        } else {
            let block = &self.blocks[m - 1];
            block
                .output_bytes
                .ok_or_else(|| ProfileError::Invalid(format!("block {} has no output_bytes", block.name)))
        }
    }

    pub fn has_feature_sizes(&self) -> bool {
        self.blocks.iter().all(|b| b.output_bytes.is_some())
    }

    pub fn has_cpu_dvfs(&self) -> bool {
        self.blocks.iter().all(|b| b.cpu_dvfs.is_some())
    }

    /// Resolves a block by 1-based index or by name.
    pub fn find_block(&self, key: &str) -> Result<usize, ProfileError> {
        if let Ok(index) = key.parse::<usize>() {
            if (1..=self.blocks.len()).contains(&index) {
                return Ok(index - 1);
            }
        }
        self.blocks
            .iter()
            .position(|b| b.name == key)
            .ok_or_else(|| ProfileError::UnknownBlock(key.to_string()))
    }

    fn check_partition(&self, m: usize) -> Result<(), ProfileError> {
        if m > self.blocks.len() {
            Err(ProfileError::PartitionOutOfRange { index: m, blocks: self.blocks.len() })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceProfile {
    pub name: String,
    pub freq_scale_ghz: Vec<f64>,
    pub kappa_w_per_ghz3: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_power_w: Option<f64>,
}

impl DeviceProfile {
    /// `count` evenly spaced frequencies from `min` to `max` inclusive.
    pub fn uniform_scale(min: f64, max: f64, count: usize) -> Vec<f64> {
        match count {
            0 => Vec::new(),
            1 => vec![min],
            _ => {
                let step = (max - min) / (count - 1) as f64;
                (0..count)
                    .map(|i| if i + 1 == count { max } else { min + step * i as f64 })
                    .collect()
            }
        }
    }

    pub fn frequencies(&self) -> Result<Vec<Frequency>, ModelError> {
        self.freq_scale_ghz.iter().map(|&f| Frequency::ghz(f)).collect()
    }

    pub fn max_frequency(&self) -> Result<Frequency, ModelError> {
        let max = self.freq_scale_ghz.iter().copied().fold(f64::NAN, f64::max);
        Frequency::ghz(max)
    }

    pub fn kappa(&self) -> Result<EnergyCoefficient, ModelError> {
        EnergyCoefficient::new(self.kappa_w_per_ghz3)
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power_w.unwrap_or(DEFAULT_TX_POWER_W)
    }

    pub fn in_scale(&self, f: Frequency) -> bool {
        self.freq_scale_ghz.iter().any(|&g| g == f.get())
    }
}

/// Per-block execution latency on the edge server, aligned with the network's blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeProfile {
    pub name: String,
    pub block_latency_ms: Vec<f64>,
}

impl EdgeProfile {
    /// Edge latency of blocks `m+1..=M`.
    pub fn suffix_latency(&self, m: usize) -> f64 {
        self.block_latency_ms.get(m..).map_or(0.0, |rest| rest.iter().fold(0.0, |acc, t| acc + t))
    }
}

/// On-disk profile: a device, a network, and optionally an edge server.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDocument {
    pub device: DeviceProfile,
    pub network: NetworkProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<EdgeProfile>,
}

impl ProfileDocument {
    pub fn from_json(text: &str) -> Result<Self, ProfileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("profile serializes");
        out.push('\n');
        out
    }

    /// Reads and parses a profile. Validation is left to the caller.
    pub fn load(path: &Path) -> Result<Self, ProfileError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ProfileError::Invalid(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_profile(&self.network, &self.device, self.edge.as_ref())
    }
}

/// Standalone edge file: `{"edge": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDocument {
    pub edge: EdgeProfile,
}

impl EdgeDocument {
    pub fn load(path: &Path) -> Result<Self, ProfileError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ProfileError::Invalid(format!("{}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueCode {
    EmptyNetwork,
    NegativeInputBytes,
    NegativeFlops,
    NegativeOutputBytes,
    NegativeWorkload,
    ExponentOutOfBounds,
    NegativeFloor,
    InvalidCpuDvfs,
    EmptyFrequencyScale,
    NonPositiveFrequency,
    FrequencyScaleNotIncreasing,
    InvalidKappa,
    NegativeTxPower,
    TxPowerDefaulted,
    EdgeLengthMismatch,
    NegativeEdgeLatency,
}

impl IssueCode {
    pub fn description(self) -> &'static str {
        match self {
            IssueCode::EmptyNetwork => "network has no blocks",
            IssueCode::NegativeInputBytes => "negative input size",
            IssueCode::NegativeFlops => "negative flops",
            IssueCode::NegativeOutputBytes => "negative output feature size",
            IssueCode::NegativeWorkload => "workload coefficient out of bounds",
            IssueCode::ExponentOutOfBounds => "exponent out of bounds",
            IssueCode::NegativeFloor => "latency floor out of bounds",
            IssueCode::InvalidCpuDvfs => "cpu-dvfs coefficient must be positive",
            IssueCode::EmptyFrequencyScale => "frequency scale is empty",
            IssueCode::NonPositiveFrequency => "frequency must be positive",
            IssueCode::FrequencyScaleNotIncreasing => "frequency scale not strictly increasing",
            IssueCode::InvalidKappa => "energy coefficient must be positive",
            IssueCode::NegativeTxPower => "negative transmit power",
            IssueCode::TxPowerDefaulted => "transmit power defaulted",
            IssueCode::EdgeLengthMismatch => "edge/block length mismatch",
            IssueCode::NegativeEdgeLatency => "negative edge latency",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Violation,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub code: IssueCode,
    pub severity: Severity,
    pub location: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Violation => "violation",
            Severity::Warning => "warning",
        };
        write!(f, "{tag} [{:?}] {}: {}", self.code, self.location, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    fn push(&mut self, code: IssueCode, severity: Severity, location: impl Into<String>, detail: impl fmt::Display) {
        self.issues.push(Issue {
            code,
            severity,
            location: location.into(),
            message: format!("{}: {detail}", code.description()),
        });
    }

    fn violation(&mut self, code: IssueCode, location: impl Into<String>, detail: impl fmt::Display) {
        self.push(code, Severity::Violation, location, detail);
    }

    pub fn violations(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Violation)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }

    /// True when no invariant is violated. Warnings do not count.
    pub fn is_valid(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn has(&self, code: IssueCode) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }

    pub fn into_result(self) -> Result<Self, ProfileError> {
        if self.is_valid() {
            Ok(self)
        } else {
            let msgs: Vec<String> = self.violations().map(|i| format!("{}: {}", i.location, i.message)).collect();
            Err(ProfileError::Invalid(msgs.join("; ")))
        }
    }
}

fn non_negative(v: f64) -> bool {
    v.is_finite() && v >= 0.0
}

/// Checks every profile invariant and reports each violation separately.
pub fn validate_profile(net: &NetworkProfile, dev: &DeviceProfile, edge: Option<&EdgeProfile>) -> ValidationReport {
    let mut report = ValidationReport::default();

    if net.blocks.is_empty() {
        report.violation(IssueCode::EmptyNetwork, "network", &net.name);
    }
    if !non_negative(net.input_bytes) {
        report.violation(IssueCode::NegativeInputBytes, "network.input_bytes", net.input_bytes);
    }
    for (i, block) in net.blocks.iter().enumerate() {
        let loc = |field: &str| format!("network.blocks[{}].{field}", i + 1);
        if !non_negative(block.flops) {
            report.violation(IssueCode::NegativeFlops, loc("flops"), block.flops);
        }
        if let Some(bytes) = block.output_bytes {
            if !non_negative(bytes) {
                report.violation(IssueCode::NegativeOutputBytes, loc("output_bytes"), bytes);
            }
        }
        let m = &block.model;
        if !non_negative(m.a) {
            report.violation(IssueCode::NegativeWorkload, loc("model.a"), m.a);
        }
        if !(m.b.is_finite() && m.b > 0.0 && m.b <= MAX_EXPONENT) {
            report.violation(IssueCode::ExponentOutOfBounds, loc("model.b"), m.b);
        }
        if !non_negative(m.c) {
            report.violation(IssueCode::NegativeFloor, loc("model.c"), m.c);
        }
        if let Some(cpu) = &block.cpu_dvfs {
            if cpu.check().is_err() {
                report.violation(IssueCode::InvalidCpuDvfs, loc("cpu_dvfs.coeff"), cpu.coeff);
            }
        }
    }

    if dev.freq_scale_ghz.is_empty() {
        report.violation(IssueCode::EmptyFrequencyScale, "device.freq_scale_ghz", &dev.name);
    }
    for (i, &f) in dev.freq_scale_ghz.iter().enumerate() {
        if Frequency::ghz(f).is_err() {
            report.violation(IssueCode::NonPositiveFrequency, format!("device.freq_scale_ghz[{i}]"), f);
        }
    }
    for (i, pair) in dev.freq_scale_ghz.windows(2).enumerate() {
        if !(pair[1] > pair[0]) {
            report.violation(
                IssueCode::FrequencyScaleNotIncreasing,
                format!("device.freq_scale_ghz[{}]", i + 1),
                format!("{} after {}", pair[1], pair[0]),
            );
        }
    }
    if dev.kappa().is_err() {
        report.violation(IssueCode::InvalidKappa, "device.kappa_w_per_ghz3", dev.kappa_w_per_ghz3);
    }
    match dev.tx_power_w {
        Some(p) if !non_negative(p) => report.violation(IssueCode::NegativeTxPower, "device.tx_power_w", p),
        Some(_) => {}
        None => report.push(
            IssueCode::TxPowerDefaulted,
            Severity::Warning,
            "device.tx_power_w",
            format!("using {DEFAULT_TX_POWER_W} W"),
        ),
    }

    if let Some(edge) = edge {
        if edge.block_latency_ms.len() != net.blocks.len() {
            report.violation(
                IssueCode::EdgeLengthMismatch,
                "edge.block_latency_ms",
                format!("{} entries for {} blocks", edge.block_latency_ms.len(), net.blocks.len()),
            );
        }
        for (i, &t) in edge.block_latency_ms.iter().enumerate() {
            if !non_negative(t) {
                report.violation(IssueCode::NegativeEdgeLatency, format!("edge.block_latency_ms[{i}]"), t);
            }
        }
    }

    report
}

/// Profiles shipped with the crate: per-block fits on a Jetson Xavier NX.
pub mod builtin {
    use super::ProfileDocument;

    pub const ALEXNET_XAVIER_NX: &str = include_str!("../data/alexnet_xavier_nx.json");
    pub const RESNET152_XAVIER_NX: &str = include_str!("../data/resnet152_xavier_nx.json");

    pub fn alexnet_xavier_nx() -> ProfileDocument {
        ProfileDocument::from_json(ALEXNET_XAVIER_NX).expect("shipped profile parses")
    }

    pub fn resnet152_xavier_nx() -> ProfileDocument {
        ProfileDocument::from_json(RESNET152_XAVIER_NX).expect("shipped profile parses")
    }

    pub fn by_name(name: &str) -> Option<ProfileDocument> {
        match name {
            "alexnet" | "alexnet_xavier_nx" => Some(alexnet_xavier_nx()),
            "resnet152" | "resnet152_xavier_nx" => Some(resnet152_xavier_nx()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    fn ghz(v: f64) -> Frequency {
        Frequency::ghz(v).unwrap()
    }

    #[test]
    fn shipped_totals_at_one_ghz() {
        let alex = builtin::alexnet_xavier_nx();
        let resnet = builtin::resnet152_xavier_nx();
        assert!((alex.network.total_latency(ghz(1.0)) - 10.4205).abs() < 1e-6);
        assert!((resnet.network.total_latency(ghz(1.0)) - 118.8414).abs() < 1e-6);
        assert_eq!(alex.network.block_count(), 8);
        assert_eq!(resnet.network.block_count(), 9);
    }

    #[test]
    fn shipped_scale_is_uniform_grid() {
        let dev = builtin::resnet152_xavier_nx().device;
        let grid = DeviceProfile::uniform_scale(0.12, 1.10, 15);
        assert_eq!(dev.freq_scale_ghz.len(), 15);
        for (a, b) in dev.freq_scale_ghz.iter().zip(&grid) {
            assert_relative_eq!(*a, *b, max_relative = 1e-12);
        }
        assert_eq!(dev.kappa_w_per_ghz3, 1.3);
        assert_eq!(dev.tx_power_w, None);
    }

    #[test]
    fn prefix_latency_examples() {
        let net = builtin::alexnet_xavier_nx().network;
        assert_eq!(net.prefix_latency(0, ghz(0.7)).unwrap(), 0.0);
        assert!((net.prefix_latency(2, ghz(1.0)).unwrap() - 0.8610).abs() < 1e-12);
        assert_eq!(net.prefix_latency(8, ghz(0.33)).unwrap(), net.total_latency(ghz(0.33)));
        assert!(matches!(
            net.prefix_latency(9, ghz(1.0)),
            Err(ProfileError::PartitionOutOfRange { index: 9, blocks: 8 })
        ));
    }

    #[test]
    fn prefix_energy_examples() {
        let doc = builtin::alexnet_xavier_nx();
        assert_eq!(doc.network.prefix_energy(&doc.device, 0, ghz(1.0)).unwrap(), 0.0);
        assert!((doc.network.prefix_energy(&doc.device, 8, ghz(1.0)).unwrap() - 0.013547).abs() < 1e-6);

        let doc = builtin::resnet152_xavier_nx();
        let t = doc.network.total_latency(ghz(0.5));
        assert_relative_eq!(t, 163.621_010_560_009_04, max_relative = 1e-12);
        assert_relative_eq!(
            doc.network.prefix_energy(&doc.device, 9, ghz(0.5)).unwrap(),
            0.026_588_414_216_001_47,
            max_relative = 1e-12
        );
    }

    #[test]
    fn single_block_total_is_block_prediction() {
        let mut net = builtin::alexnet_xavier_nx().network;
        net.blocks.truncate(1);
        let f = ghz(0.61);
        assert_eq!(net.total_latency(f), net.blocks[0].model.latency_ms(f));
    }

    #[test]
    fn shipped_profiles_validate() {
        for doc in [builtin::alexnet_xavier_nx(), builtin::resnet152_xavier_nx()] {
            let report = doc.validate();
            assert!(report.is_valid(), "{report:?}");
            assert!(report.has(IssueCode::TxPowerDefaulted));
            assert_eq!(report.warnings().count(), 1);
        }
    }

    #[test]
    fn validation_flags_exponent_and_edge_length() {
        let mut doc = builtin::alexnet_xavier_nx();
        doc.network.blocks[2].model.b = 5.0;
        doc.device.tx_power_w = Some(0.5);
        let report = doc.validate();
        assert!(!report.is_valid());
        assert!(report.has(IssueCode::ExponentOutOfBounds));
        assert_eq!(report.issues.len(), 1);
        assert!(report.issues[0].message.contains("exponent out of bounds"));

        let edge = EdgeProfile { name: "gpu".into(), block_latency_ms: vec![0.1; 3] };
        let report = validate_profile(&builtin::alexnet_xavier_nx().network, &doc.device, Some(&edge));
        assert!(report.has(IssueCode::EdgeLengthMismatch));
        assert!(report.issues.iter().any(|i| i.message.contains("edge/block length mismatch")));
    }

    #[test]
    fn validation_reports_every_violation() {
        let mut doc = builtin::alexnet_xavier_nx();
        doc.device.freq_scale_ghz = vec![0.5, 0.5, -1.0];
        doc.device.kappa_w_per_ghz3 = 0.0;
        doc.network.blocks[0].flops = -1.0;
        doc.network.blocks[1].model.a = -1.0;
        doc.network.blocks[1].model.c = -1.0;
        let report = doc.validate();
        for code in [
            IssueCode::FrequencyScaleNotIncreasing,
            IssueCode::NonPositiveFrequency,
            IssueCode::InvalidKappa,
            IssueCode::NegativeFlops,
            IssueCode::NegativeWorkload,
            IssueCode::NegativeFloor,
        ] {
            assert!(report.has(code), "missing {code:?}");
        }
        assert!(report.clone().into_result().is_err());

        doc.network.blocks.clear();
        assert!(doc.validate().has(IssueCode::EmptyNetwork));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = builtin::ALEXNET_XAVIER_NX.replacen("\"kappa_w_per_ghz3\"", "\"voltage\": 1, \"kappa_w_per_ghz3\"", 1);
        assert!(ProfileDocument::from_json(&text).is_err());
        let text = builtin::ALEXNET_XAVIER_NX.replacen("\"flops\"", "\"layers\": 3, \"flops\"", 1);
        assert!(ProfileDocument::from_json(&text).is_err());
    }

    #[test]
    fn upload_bytes_semantics() {
        let net = builtin::resnet152_xavier_nx().network;
        assert_eq!(net.upload_bytes(0).unwrap(), 570_000.0);
        assert_eq!(net.upload_bytes(1).unwrap(), 3_060_000.0);
        assert_eq!(net.upload_bytes(8).unwrap(), 100_000.0);
        assert_eq!(net.upload_bytes(9).unwrap(), 0.0);
        assert!(!builtin::alexnet_xavier_nx().network.has_feature_sizes());
    }

    #[test]
    fn find_block_by_index_or_name() {
        let net = builtin::alexnet_xavier_nx().network;
        assert_eq!(net.find_block("1").unwrap(), 0);
        assert_eq!(net.find_block("block8").unwrap(), 7);
        assert!(net.find_block("9").is_err());
        assert!(net.find_block("conv").is_err());
    }

    #[test]
    fn edge_suffix_latency() {
        let edge = EdgeProfile { name: "e".into(), block_latency_ms: vec![1.0, 2.0, 4.0] };
        assert_eq!(edge.suffix_latency(0), 7.0);
        assert_eq!(edge.suffix_latency(2), 4.0);
        assert_eq!(edge.suffix_latency(3), 0.0);
    }
}
