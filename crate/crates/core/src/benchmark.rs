//! Builds the inverse-frequency baseline models for a network that only
//! carries power-law fits.

use crate::error::PlanError;
use crate::fit::fit_cpu_dvfs;
use crate::model::{CpuDvfsModel, Frequency};
use crate::profile::{DeviceProfile, NetworkProfile};
use crate::trace::TraceSeries;

/// Sets every block's baseline to `flops / flops_per_cycle`.
pub fn with_workload_cpu_dvfs(net: &NetworkProfile, flops_per_cycle: f64) -> Result<NetworkProfile, PlanError> {
    let mut out = net.clone();
    for block in &mut out.blocks {
        if !(block.flops > 0.0) {
            return Err(PlanError::Config(format!(
                "block {} has no FLOP count; cannot derive a workload baseline",
                block.name
            )));
        }
        block.cpu_dvfs = Some(CpuDvfsModel::from_workload(block.flops, flops_per_cycle)?);
    }
    Ok(out)
}

/// Fits every block's baseline to its own power-law curve sampled at the
/// device frequencies `<= max_ghz`.
///
/// This mimics profiling a device only in its low-frequency range and
/// extrapolating with the inverse-frequency law.
pub fn with_fitted_cpu_dvfs(net: &NetworkProfile, dev: &DeviceProfile, max_ghz: f64) -> Result<NetworkProfile, PlanError> {
    let freqs: Vec<Frequency> = dev.frequencies()?.into_iter().filter(|f| f.get() <= max_ghz).collect();
    if freqs.is_empty() {
        return Err(PlanError::Config(format!("no device frequency at or below {max_ghz} GHz")));
    }
    let mut out = net.clone();
    for block in &mut out.blocks {
        let series = TraceSeries::from_pairs(freqs.iter().map(|&f| (f.get(), block.model.latency_ms(f))));
        let fit = fit_cpu_dvfs(&series)?;
        block.cpu_dvfs = fit.model.cpu_dvfs();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::builtin;

    #[test]
    fn fitted_baseline_underestimates_at_top_frequency() {
        let doc = builtin::resnet152_xavier_nx();
        let net = with_fitted_cpu_dvfs(&doc.network, &doc.device, 0.4).unwrap();
        let top = Frequency::ghz(1.1).unwrap();
        for block in &net.blocks {
            let cpu = block.cpu_dvfs.unwrap().latency_ms(top);
            assert!(cpu < block.model.latency_ms(top), "{}", block.name);
        }
        assert!(with_fitted_cpu_dvfs(&doc.network, &doc.device, 0.1).is_err());
    }

    #[test]
    fn workload_baseline_needs_flops() {
        let doc = builtin::alexnet_xavier_nx();
        assert!(with_workload_cpu_dvfs(&doc.network, 1536.0).is_err());
        let mut net = doc.network.clone();
        for b in &mut net.blocks {
            b.flops = 1536e6;
        }
        let net = with_workload_cpu_dvfs(&net, 1536.0).unwrap();
        assert_eq!(net.blocks[0].cpu_dvfs.unwrap().coeff, 1.0);
    }
}
