use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use dvfs_core::benchmark::{with_fitted_cpu_dvfs, with_workload_cpu_dvfs};
use dvfs_core::profile::EdgeDocument;
use dvfs_core::report::{self, FitFragment, PlanReport};
use dvfs_core::{
    evaluate_plan, plan_frequency, plan_partition, rate_sweep, DeviceFrequency, DeviceProfile, EdgeProfile,
    Frequency, LocalPlanRequest, ModelFamily, NetworkProfile, PartitionPlanRequest, ProfileDocument, Trace, TraceKey,
};

use crate::{BaselineArgs, Cli, Command, FigureArgs, FigureId, FitArgs, FitFamily, LocalArgs, PartitionArgs, PlanCommand, PredictArgs, SweepArgs};

pub enum Outcome {
    Success,
    Infeasible,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Fit(args) => fit(cli, args),
        Command::Predict(args) => predict(cli, args),
        Command::Plan(PlanCommand::Local(args)) => plan_local(cli, args),
        Command::Plan(PlanCommand::Partition(args)) => plan_partition_cmd(cli, args),
        Command::Sweep(args) => sweep(cli, args),
        Command::Figure(args) => figure(cli, args),
        Command::Validate => validate(cli),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

struct Loaded {
    doc: ProfileDocument,
    warnings: Vec<String>,
}

impl Loaded {
    fn net(&self) -> &NetworkProfile {
        &self.doc.network
    }

    fn dev(&self) -> &DeviceProfile {
        &self.doc.device
    }

    fn edge(&self) -> Option<&EdgeProfile> {
        self.doc.edge.as_ref()
    }
}

fn load(cli: &Cli, baseline: Option<&BaselineArgs>) -> Result<Loaded> {
    let path = cli.profile.as_deref().ok_or_else(|| anyhow!("--profile is required"))?;
    let mut doc = ProfileDocument::load(path)?;
    if let Some(edge_path) = &cli.edge {
        doc.edge = Some(EdgeDocument::load(edge_path)?.edge);
    }
    let report = doc.validate().into_result()?;
    let warnings = report.warnings().map(|w| format!("{}: {}", w.location, w.message)).collect();

    if let Some(b) = baseline {
        if let Some(max_ghz) = b.baseline_fit_below_ghz {
            doc.network = with_fitted_cpu_dvfs(&doc.network, &doc.device, max_ghz)?;
        } else if let Some(g) = b.flops_per_cycle {
            doc.network = with_workload_cpu_dvfs(&doc.network, g)?;
        }
    }
    Ok(Loaded { doc, warnings })
}

fn fit(cli: &Cli, args: &FitArgs) -> Result<Outcome> {
    let trace = Trace::read_path(&args.trace).with_context(|| format!("reading {}", args.trace.display()))?;
    let families: &[ModelFamily] = match args.family {
        FitFamily::PowerLaw => &[ModelFamily::PowerLaw],
        FitFamily::CpuDvfs => &[ModelFamily::CpuDvfs],
        FitFamily::Both => &[ModelFamily::PowerLaw, ModelFamily::CpuDvfs],
    };
    let mut fragment = FitFragment::default();
    for (key, series) in &trace.series {
        let entry = report::fit_entry(*key, series, families).with_context(|| format!("block {key}"))?;
        fragment.fits.push(entry);
    }
    emit(cli.out.as_deref(), &fragment.to_json())?;
    Ok(Outcome::Success)
}

fn predict(cli: &Cli, args: &PredictArgs) -> Result<Outcome> {
    let loaded = load(cli, Some(&args.baseline))?;
    let (net, dev) = (loaded.net(), loaded.dev());
    let f = Frequency::ghz(args.freq)?;
    if !dev.in_scale(f) {
        eprintln!("warning: {} GHz is not on the frequency scale of {}", args.freq, dev.name);
    }
    let family: ModelFamily = args.family.into();
    let latency = match &args.block {
        Some(key) => net.blocks[net.find_block(key)?].latency_ms(family, f)?,
        None => net.total_latency_for(family, f)?,
    };
    let mut text = format!("{latency} ms\n");
    if args.energy {
        let energy = dvfs_core::predict_energy(dev.kappa()?, f, latency)?;
        text.push_str(&format!("{energy} J\n"));
    }
    emit(cli.out.as_deref(), &text)?;
    Ok(Outcome::Success)
}

fn local_request(args: &LocalArgs) -> Result<LocalPlanRequest> {
    match (args.deadline_ms, args.energy_j) {
        (Some(d), None) => Ok(LocalPlanRequest::MinEnergyUnderDeadline { deadline_ms: d }),
        (None, Some(e)) => Ok(LocalPlanRequest::MinLatencyUnderEnergy { energy_budget_j: e }),
        _ => bail!("exactly one of --deadline-ms and --energy-j is required"),
    }
}

fn device_frequency(s: &str) -> Result<DeviceFrequency> {
    if s == "max" {
        return Ok(DeviceFrequency::Max);
    }
    let v: f64 = s.parse().map_err(|_| anyhow!("--device-freq expects a number or `max`, got `{s}`"))?;
    Ok(DeviceFrequency::Fixed(Frequency::ghz(v)?))
}

fn write_plan(cli: &Cli, loaded: &Loaded, plan: dvfs_core::Plan, truth: Option<crate::Family>) -> Result<Outcome> {
    let evaluation = truth
        .map(|t| evaluate_plan(&plan, loaded.net(), loaded.dev(), loaded.edge(), t.into()))
        .transpose()?;
    let feasible = plan.feasible;
    let report = PlanReport::new(loaded.net(), loaded.dev(), plan, evaluation, loaded.warnings.clone());
    emit(cli.out.as_deref(), &report.to_json())?;
    Ok(if feasible { Outcome::Success } else { Outcome::Infeasible })
}

fn plan_local(cli: &Cli, args: &LocalArgs) -> Result<Outcome> {
    let req = local_request(args)?;
    let loaded = load(cli, Some(&args.baseline))?;
    let plan = plan_frequency(loaded.net(), loaded.dev(), &req, args.family.into())?;
    write_plan(cli, &loaded, plan, args.truth)
}

fn plan_partition_cmd(cli: &Cli, args: &PartitionArgs) -> Result<Outcome> {
    let loaded = load(cli, Some(&args.baseline))?;
    let req = PartitionPlanRequest {
        deadline_ms: args.deadline_ms,
        rate_mbps: args.rate_mbps,
        device_freq: device_frequency(&args.device_freq)?,
        joint_freq: args.joint_freq,
    };
    let plan = plan_partition(loaded.net(), loaded.dev(), loaded.edge(), &req, args.family.into())?;
    write_plan(cli, &loaded, plan, args.truth)
}

fn sweep(cli: &Cli, args: &SweepArgs) -> Result<Outcome> {
    let loaded = load(cli, Some(&args.baseline))?;
    let base = PartitionPlanRequest {
        deadline_ms: args.deadline_ms,
        rate_mbps: 1.0,
        device_freq: device_frequency(&args.device_freq)?,
        joint_freq: args.joint_freq,
    };
    let rows = rate_sweep(loaded.net(), loaded.dev(), loaded.edge(), &args.rates_mbps, &base, args.family.into())?;
    let mut text = serde_json::to_string_pretty(&rows)?;
    text.push('\n');
    emit(cli.out.as_deref(), &text)?;
    Ok(Outcome::Success)
}

fn figure(cli: &Cli, args: &FigureArgs) -> Result<Outcome> {
    let loaded = load(cli, Some(&args.baseline))?;
    let (net, dev) = (loaded.net(), loaded.dev());
    let table = match args.id {
        FigureId::LatencyVsFreq => report::latency_vs_freq(net, dev)?,
        FigureId::ModelCompare => {
            let series = match (&args.trace, &args.block) {
                (Some(path), block) => {
                    let trace = Trace::read_path(path).with_context(|| format!("reading {}", path.display()))?;
                    let key = match block {
                        Some(b) => TraceKey::Block(net.find_block(b)? + 1),
                        None => TraceKey::Total,
                    };
                    trace.series.get(&key).cloned().ok_or_else(|| anyhow!("trace has no rows for block {key}"))?
                }
                (None, Some(b)) => {
                    let block = &net.blocks[net.find_block(b)?];
                    dvfs_core::TraceSeries::from_pairs(
                        dev.frequencies()?.into_iter().map(|f| (f.get(), block.model.latency_ms(f))),
                    )
                }
                (None, None) => report::total_latency_series(net, dev)?,
            };
            report::model_compare(&series, &dev.frequencies()?)?
        }
        FigureId::PlanBars => {
            let requests: Vec<LocalPlanRequest> = if !args.deadlines_ms.is_empty() {
                args.deadlines_ms.iter().map(|&d| LocalPlanRequest::MinEnergyUnderDeadline { deadline_ms: d }).collect()
            } else {
                args.energies_j.iter().map(|&e| LocalPlanRequest::MinLatencyUnderEnergy { energy_budget_j: e }).collect()
            };
            report::plan_bars(net, dev, &requests)?
        }
        FigureId::RateSweep => {
            if args.rates_mbps.is_empty() {
                bail!("rate-sweep needs --rates-mbps");
            }
            let base = PartitionPlanRequest {
                deadline_ms: args.deadline_ms.ok_or_else(|| anyhow!("rate-sweep needs --deadline-ms"))?,
                rate_mbps: 1.0,
                device_freq: device_frequency(&args.device_freq)?,
                joint_freq: args.joint_freq,
            };
            let rows = rate_sweep(net, dev, loaded.edge(), &args.rates_mbps, &base, args.family.into())?;
            report::rate_sweep_table(&rows)
        }
        FigureId::PartitionCurves => {
            let req = PartitionPlanRequest {
                deadline_ms: args.deadline_ms.ok_or_else(|| anyhow!("partition-curves needs --deadline-ms"))?,
                rate_mbps: args.rate_mbps.ok_or_else(|| anyhow!("partition-curves needs --rate-mbps"))?,
                device_freq: device_frequency(&args.device_freq)?,
                joint_freq: args.joint_freq,
            };
            let plan = plan_partition(net, dev, loaded.edge(), &req, args.family.into())?;
            report::partition_curves(&plan)?
        }
    };
    emit(cli.out.as_deref(), &table.to_csv())?;
    Ok(Outcome::Success)
}

fn validate(cli: &Cli) -> Result<Outcome> {
    let path = cli.profile.as_deref().ok_or_else(|| anyhow!("--profile is required"))?;
    let mut doc = ProfileDocument::load(path)?;
    if let Some(edge_path) = &cli.edge {
        doc.edge = Some(EdgeDocument::load(edge_path)?.edge);
    }
    let report = doc.validate();
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit(cli.out.as_deref(), &text)?;
    for issue in &report.issues {
        eprintln!("{issue}");
    }
    if report.is_valid() {
        Ok(Outcome::Success)
    } else {
        bail!("{} violation(s) in {}", report.violations().count(), path.display())
    }
}
