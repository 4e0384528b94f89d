//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes and returns JSON strings. The plain functions in
//! [`api`] do the work and are tested natively; the `#[wasm_bindgen]`
//! wrappers only turn their errors into JavaScript exceptions.

use wasm_bindgen::prelude::*;

pub mod api {
    use dvfs_core::benchmark::with_fitted_cpu_dvfs;
    use dvfs_core::report::{uniform_edge, PlanReport};
    use dvfs_core::{
        builtin, evaluate_plan, plan_frequency, plan_partition, DeviceFrequency, DeviceProfile, Frequency,
        LocalPlanRequest, ModelFamily, PartitionPlanRequest, ProfileDocument,
    };
    use serde::Serialize;

    pub type ApiResult = Result<String, String>;

    const CURVE_POINTS: usize = 100;

    fn err(e: impl std::fmt::Display) -> String {
        e.to_string()
    }

    fn family(name: &str) -> Result<ModelFamily, String> {
        match name {
            "power-law" => Ok(ModelFamily::PowerLaw),
            "cpu-dvfs" => Ok(ModelFamily::CpuDvfs),
            other => Err(format!("unknown model family `{other}`")),
        }
    }

    fn to_json<T: Serialize>(value: &T) -> ApiResult {
        serde_json::to_string(value).map_err(err)
    }

    /// Parses and validates a profile, then attaches baseline models fitted
    /// at frequencies up to `baseline_below_ghz` when given.
    fn load(profile_json: &str, baseline_below_ghz: Option<f64>) -> Result<(ProfileDocument, Vec<String>), String> {
        let mut doc = ProfileDocument::from_json(profile_json).map_err(err)?;
        let report = doc.validate().into_result().map_err(err)?;
        let warnings = report.warnings().map(|w| format!("{}: {}", w.location, w.message)).collect();
        if let Some(max_ghz) = baseline_below_ghz {
            doc.network = with_fitted_cpu_dvfs(&doc.network, &doc.device, max_ghz).map_err(err)?;
        }
        Ok((doc, warnings))
    }

    /// JSON of a shipped profile: `alexnet` or `resnet152`.
    pub fn builtin_profile(name: &str) -> ApiResult {
        builtin::by_name(name).map(|doc| doc.to_json()).ok_or_else(|| format!("no built-in profile `{name}`"))
    }

    #[derive(Debug, Serialize)]
    pub struct Curves {
        pub freq_ghz: Vec<f64>,
        pub power_law_ms: Vec<f64>,
        pub energy_j: Vec<f64>,
        /// Present when the network carries baseline models.
        pub cpu_dvfs_ms: Option<Vec<f64>>,
        pub cpu_dvfs_energy_j: Option<Vec<f64>>,
        /// The device's discrete frequency scale.
        pub scale_ghz: Vec<f64>,
    }

    /// Whole-network latency and energy sampled densely across the device's
    /// frequency range.
    pub fn curves(profile_json: &str, baseline_below_ghz: Option<f64>) -> ApiResult {
        let (doc, _) = load(profile_json, baseline_below_ghz)?;
        let (net, dev) = (&doc.network, &doc.device);
        let lo = dev.freq_scale_ghz.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = dev.max_frequency().map_err(err)?.get();
        let freqs = DeviceProfile::uniform_scale(lo, hi, CURVE_POINTS);
        let kappa = dev.kappa().map_err(err)?;

        let sample = |family: ModelFamily| -> Result<(Vec<f64>, Vec<f64>), String> {
            let mut ms = Vec::with_capacity(freqs.len());
            let mut joules = Vec::with_capacity(freqs.len());
            for &v in &freqs {
                let f = Frequency::ghz(v).map_err(err)?;
                let t = net.total_latency_for(family, f).map_err(err)?;
                ms.push(t);
                joules.push(dvfs_core::predict_energy(kappa, f, t).map_err(err)?);
            }
            Ok((ms, joules))
        };
        let (power_law_ms, energy_j) = sample(ModelFamily::PowerLaw)?;
        let (cpu_dvfs_ms, cpu_dvfs_energy_j) = if net.has_cpu_dvfs() {
            let (t, e) = sample(ModelFamily::CpuDvfs)?;
            (Some(t), Some(e))
        } else {
            (None, None)
        };
        to_json(&Curves {
            freq_ghz: freqs,
            power_law_ms,
            energy_j,
            cpu_dvfs_ms,
            cpu_dvfs_energy_j,
            scale_ghz: dev.freq_scale_ghz.clone(),
        })
    }

    /// Plans the local-inference frequency and re-scores the plan under the
    /// power-law model. `objective` is `deadline` (limit in ms) or `energy`
    /// (limit in J).
    pub fn plan_local(
        profile_json: &str,
        objective: &str,
        limit: f64,
        model: &str,
        baseline_below_ghz: Option<f64>,
    ) -> ApiResult {
        let request = match objective {
            "deadline" => LocalPlanRequest::MinEnergyUnderDeadline { deadline_ms: limit },
            "energy" => LocalPlanRequest::MinLatencyUnderEnergy { energy_budget_j: limit },
            other => return Err(format!("unknown objective `{other}`")),
        };
        let (doc, warnings) = load(profile_json, baseline_below_ghz)?;
        let plan = plan_frequency(&doc.network, &doc.device, &request, family(model)?).map_err(err)?;
        let truth = evaluate_plan(&plan, &doc.network, &doc.device, None, ModelFamily::PowerLaw).map_err(err)?;
        to_json(&PlanReport::new(&doc.network, &doc.device, plan, Some(truth), warnings))
    }

    /// Plans the device/edge partition point. Uses the profile's edge timings
    /// when present, otherwise `edge_ms_per_block` for every block.
    pub fn plan_split(
        profile_json: &str,
        edge_ms_per_block: f64,
        rate_mbps: f64,
        deadline_ms: f64,
        joint_freq: bool,
    ) -> ApiResult {
        let (mut doc, warnings) = load(profile_json, None)?;
        if doc.edge.is_none() {
            doc.edge = Some(uniform_edge("edge", doc.network.block_count(), edge_ms_per_block));
        }
        let request = PartitionPlanRequest { deadline_ms, rate_mbps, device_freq: DeviceFrequency::Max, joint_freq };
        let plan = plan_partition(&doc.network, &doc.device, doc.edge.as_ref(), &request, ModelFamily::PowerLaw)
            .map_err(err)?;
        to_json(&PlanReport::new(&doc.network, &doc.device, plan, None, warnings))
    }
}

fn js(result: api::ApiResult) -> Result<String, JsError> {
    result.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = builtinProfile)]
pub fn builtin_profile(name: &str) -> Result<String, JsError> {
    js(api::builtin_profile(name))
}

#[wasm_bindgen]
pub fn curves(profile_json: &str, baseline_below_ghz: Option<f64>) -> Result<String, JsError> {
    js(api::curves(profile_json, baseline_below_ghz))
}

#[wasm_bindgen(js_name = planLocal)]
pub fn plan_local(
    profile_json: &str,
    objective: &str,
    limit: f64,
    model: &str,
    baseline_below_ghz: Option<f64>,
) -> Result<String, JsError> {
    js(api::plan_local(profile_json, objective, limit, model, baseline_below_ghz))
}

#[wasm_bindgen(js_name = planSplit)]
pub fn plan_split(
    profile_json: &str,
    edge_ms_per_block: f64,
    rate_mbps: f64,
    deadline_ms: f64,
    joint_freq: bool,
) -> Result<String, JsError> {
    js(api::plan_split(profile_json, edge_ms_per_block, rate_mbps, deadline_ms, joint_freq))
}
