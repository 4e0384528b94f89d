//! Serializable reports and plot-ready figure tables.
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same `f64`, so identical inputs always produce byte-identical files.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::PlanError;
use crate::fit::{fit_cpu_dvfs, fit_power_law, FitResult, FittedModel};
use crate::model::{Frequency, ModelFamily};
use crate::planner::{
    evaluate_plan, plan_frequency, Evaluation, LocalPlanRequest, Partition, Plan, PlanRequest, RateSweepRow,
};
use crate::profile::{DeviceProfile, EdgeProfile, NetworkProfile};
use crate::trace::{TraceKey, TraceSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub network: String,
    pub device: String,
    pub request: PlanRequest,
    pub model_family: ModelFamily,
    pub frequency_ghz: f64,
    pub partition: Partition,
    pub predicted_latency_ms: f64,
    pub predicted_energy_j: f64,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<Evaluation>,
    pub candidates: Vec<crate::planner::Candidate>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl PlanReport {
    pub fn new(net: &NetworkProfile, dev: &DeviceProfile, plan: Plan, truth: Option<Evaluation>, warnings: Vec<String>) -> Self {
        PlanReport {
            network: net.name.clone(),
            device: dev.name.clone(),
            request: plan.request,
            model_family: plan.model_family,
            frequency_ghz: plan.frequency_ghz,
            partition: plan.partition,
            predicted_latency_ms: plan.predicted_latency_ms,
            predicted_energy_j: plan.predicted_energy_j,
            feasible: plan.feasible,
            truth,
            candidates: plan.candidates,
            warnings,
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

/// One fitted series in a fit fragment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitEntry {
    /// 1-based block index or `total`.
    pub block: String,
    pub frequencies: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<crate::model::PowerLawModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_goodness: Option<crate::fit::Goodness>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unidentifiable_exponent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpu_dvfs: Option<crate::model::CpuDvfsModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpu_dvfs_goodness: Option<crate::fit::Goodness>,
}

/// Output of fitting a trace. `model` and `cpu_dvfs` use the block schema of
/// the profile file and can be pasted into it unchanged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitFragment {
    pub fits: Vec<FitEntry>,
}

impl FitFragment {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("fragment serializes");
        out.push('\n');
        out
    }
}

/// Fits the requested families to one series.
pub fn fit_entry(key: TraceKey, series: &TraceSeries, families: &[ModelFamily]) -> Result<FitEntry, crate::error::FitError> {
    let mut entry = FitEntry {
        block: key.to_string(),
        frequencies: series.distinct_frequencies(),
        model: None,
        model_goodness: None,
        unidentifiable_exponent: false,
        cpu_dvfs: None,
        cpu_dvfs_goodness: None,
    };
    let goodness = |r: &FitResult| crate::fit::Goodness { rmse: r.rmse, r_squared: r.r_squared };
    for family in families {
        match family {
            ModelFamily::PowerLaw => {
                let r = fit_power_law(series)?;
                entry.model = r.model.power_law();
                entry.model_goodness = Some(goodness(&r));
                entry.unidentifiable_exponent = r.unidentifiable_exponent;
            }
            ModelFamily::CpuDvfs => {
                let r = fit_cpu_dvfs(series)?;
                entry.cpu_dvfs = r.model.cpu_dvfs();
                entry.cpu_dvfs_goodness = Some(goodness(&r));
            }
        }
    }
    Ok(entry)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Bool(bool),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(v) => write!(f, "{v}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Bool(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Partition> for Cell {
    fn from(p: Partition) -> Self {
        match p {
            Partition::Local => Cell::Text("local".into()),
            Partition::Point(m) => Cell::Int(m),
        }
    }
}

/// Plot-ready columns: an x column followed by one column per series.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl FigureTable {
    fn new(columns: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{cell}").expect("write to string");
            }
            out.push('\n');
        }
        out
    }
}

/// `freq_ghz, total_ms, energy_j, block1_ms, ...` over the device scale.
pub fn latency_vs_freq(net: &NetworkProfile, dev: &DeviceProfile) -> Result<FigureTable, PlanError> {
    let mut columns = vec!["freq_ghz".to_string(), "total_ms".into(), "energy_j".into()];
    columns.extend((1..=net.block_count()).map(|i| format!("block{i}_ms")));
    let mut table = FigureTable::new(columns);
    let kappa = dev.kappa()?;
    for f in dev.frequencies()? {
        let total = net.total_latency(f);
        let mut row = vec![f.get().into(), total.into(), crate::model::predict_energy(kappa, f, total)?.into()];
        row.extend(net.blocks.iter().map(|b| Cell::Num(b.model.latency_ms(f))));
        table.rows.push(row);
    }
    Ok(table)
}

/// Fits both families to `series` and tabulates `freq_ghz, power_law_ms, cpu_dvfs_ms`.
pub fn model_compare(series: &TraceSeries, freqs: &[Frequency]) -> Result<FigureTable, PlanError> {
    let pl = fit_power_law(series)?;
    let cpu = fit_cpu_dvfs(series)?;
    let mut table = FigureTable::new(["freq_ghz", "power_law_ms", "cpu_dvfs_ms"]);
    for &f in freqs {
        table.rows.push(vec![f.get().into(), pl.model.latency_ms(f).into(), cpu.model.latency_ms(f).into()]);
    }
    Ok(table)
}

/// The model fits behind [`model_compare`], for callers that want to report them.
pub fn model_compare_fits(series: &TraceSeries) -> Result<(FittedModel, FittedModel), PlanError> {
    Ok((fit_power_law(series)?.model, fit_cpu_dvfs(series)?.model))
}

/// Plans every constraint with both families and scores each plan under the power-law model.
///
/// Columns: `constraint`, then per family `<family>_freq_ghz`, `<family>_actual_ms`,
/// `<family>_actual_j`, `<family>_met`.
pub fn plan_bars(net: &NetworkProfile, dev: &DeviceProfile, requests: &[LocalPlanRequest]) -> Result<FigureTable, PlanError> {
    if requests.is_empty() {
        return Err(PlanError::Config("plan-bars needs at least one deadline or energy budget".into()));
    }
    let mut columns = vec!["constraint".to_string()];
    for family in [ModelFamily::PowerLaw, ModelFamily::CpuDvfs] {
        let p = family.as_str().replace('-', "_");
        columns.extend([format!("{p}_freq_ghz"), format!("{p}_actual_ms"), format!("{p}_actual_j"), format!("{p}_met")]);
    }
    let mut table = FigureTable::new(columns);
    for req in requests {
        let limit = match *req {
            LocalPlanRequest::MinEnergyUnderDeadline { deadline_ms } => deadline_ms,
            LocalPlanRequest::MinLatencyUnderEnergy { energy_budget_j } => energy_budget_j,
        };
        let mut row = vec![Cell::Num(limit)];
        for family in [ModelFamily::PowerLaw, ModelFamily::CpuDvfs] {
            let plan = plan_frequency(net, dev, req, family)?;
            let eval = evaluate_plan(&plan, net, dev, None, ModelFamily::PowerLaw)?;
            row.extend([
                plan.frequency_ghz.into(),
                eval.actual_latency_ms.into(),
                eval.actual_energy_j.into(),
                eval.deadline_met.into(),
            ]);
        }
        table.rows.push(row);
    }
    Ok(table)
}

/// `rate_mbps, partition, freq_ghz, latency_ms, energy_j, feasible`.
pub fn rate_sweep_table(rows: &[RateSweepRow]) -> FigureTable {
    let mut table = FigureTable::new(["rate_mbps", "partition", "freq_ghz", "latency_ms", "energy_j", "feasible"]);
    for r in rows {
        table.rows.push(vec![
            r.rate_mbps.into(),
            r.partition.into(),
            r.frequency_ghz.into(),
            r.latency_ms.into(),
            r.energy_j.into(),
            r.feasible.into(),
        ]);
    }
    table
}

/// Per-candidate latency and energy split of a partition plan.
pub fn partition_curves(plan: &Plan) -> Result<FigureTable, PlanError> {
    let mut table = FigureTable::new([
        "partition",
        "freq_ghz",
        "device_ms",
        "upload_ms",
        "edge_ms",
        "total_ms",
        "compute_j",
        "transmit_j",
        "energy_j",
        "feasible",
    ]);
    for c in &plan.candidates {
        let b = c
            .breakdown
            .ok_or_else(|| PlanError::Config("partition-curves needs a partition plan".into()))?;
        table.rows.push(vec![
            c.partition.into(),
            c.frequency_ghz.into(),
            b.device_ms.into(),
            b.upload_ms.into(),
            b.edge_ms.into(),
            c.latency_ms.into(),
            b.compute_energy_j.into(),
            b.transmit_energy_j.into(),
            c.energy_j.into(),
            c.feasible.into(),
        ]);
    }
    Ok(table)
}

/// Convenience used by CLI and demo: the power-law samples of a network's
/// total latency at every scale frequency.
pub fn total_latency_series(net: &NetworkProfile, dev: &DeviceProfile) -> Result<TraceSeries, PlanError> {
    Ok(TraceSeries::from_pairs(dev.frequencies()?.into_iter().map(|f| (f.get(), net.total_latency(f)))))
}

/// Edge profile with the same latency on every block.
pub fn uniform_edge(name: &str, blocks: usize, per_block_ms: f64) -> EdgeProfile {
    EdgeProfile { name: name.into(), block_latency_ms: vec![per_block_ms; blocks] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::with_fitted_cpu_dvfs;
    use crate::planner::{plan_partition, PartitionPlanRequest};
    use crate::profile::builtin;

    #[test]
    fn model_compare_has_one_row_per_frequency() {
        let doc = builtin::alexnet_xavier_nx();
        let series = total_latency_series(&doc.network, &doc.device).unwrap();
        let table = model_compare(&series, &doc.device.frequencies().unwrap()).unwrap();
        assert_eq!(table.columns, ["freq_ghz", "power_law_ms", "cpu_dvfs_ms"]);
        assert_eq!(table.rows.len(), 15);
    }

    #[test]
    fn csv_uses_shortest_round_trip_numbers() {
        let mut t = FigureTable::new(["x", "y"]);
        t.rows.push(vec![Cell::Num(0.1 + 0.2), Cell::Text("local".into())]);
        t.rows.push(vec![Cell::Num(1.0), Cell::Bool(true)]);
        assert_eq!(t.to_csv(), "x,y\n0.30000000000000004,local\n1,true\n");
    }

    #[test]
    fn plan_bars_rejects_empty_list() {
        let doc = builtin::resnet152_xavier_nx();
        assert!(plan_bars(&doc.network, &doc.device, &[]).is_err());
        let net = with_fitted_cpu_dvfs(&doc.network, &doc.device, 0.4).unwrap();
        let reqs = [100.0, 150.0, 200.0].map(|d| LocalPlanRequest::MinEnergyUnderDeadline { deadline_ms: d });
        let table = plan_bars(&net, &doc.device, &reqs).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert_eq!(table.columns.len(), 9);
    }

    #[test]
    fn partition_curves_need_breakdown() {
        let doc = builtin::resnet152_xavier_nx();
        let edge = uniform_edge("e", 9, 1.0);
        let plan = plan_partition(&doc.network, &doc.device, Some(&edge), &PartitionPlanRequest::new(200.0, 20.0), ModelFamily::PowerLaw).unwrap();
        let table = partition_curves(&plan).unwrap();
        assert_eq!(table.rows.len(), 10);

        let local = plan_frequency(&doc.network, &doc.device, &LocalPlanRequest::MinEnergyUnderDeadline { deadline_ms: 200.0 }, ModelFamily::PowerLaw).unwrap();
        assert!(partition_curves(&local).is_err());
    }

    #[test]
    fn report_round_trips() {
        let doc = builtin::resnet152_xavier_nx();
        let req = LocalPlanRequest::MinEnergyUnderDeadline { deadline_ms: 150.0 };
        let plan = plan_frequency(&doc.network, &doc.device, &req, ModelFamily::PowerLaw).unwrap();
        let eval = evaluate_plan(&plan, &doc.network, &doc.device, None, ModelFamily::PowerLaw).unwrap();
        let report = PlanReport::new(&doc.network, &doc.device, plan, Some(eval), vec!["w".into()]);
        let back: PlanReport = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(back, report);
    }
}
