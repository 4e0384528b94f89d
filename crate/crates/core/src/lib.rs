//! DVFS-aware latency and energy modeling for DNN inference on GPUs.
//!
//! Block latency follows `t = a * f^(-b) + c` (f in GHz, t in ms) and dynamic
//! energy follows `e = kappa * f^3 * t`. The crate evaluates these models,
//! fits them to measured traces, and plans the GPU frequency and the
//! device/edge partition point of a serial network:
//!
//! - [`model`]: the power-law, inverse-frequency, and energy models
//! - [`profile`]: network/device/edge profiles and their JSON file format
//! - [`trace`]: CSV measurement traces
//! - [`fit`]: least-squares fitting and goodness of fit
//! - [`planner`]: frequency and partition planning, plan evaluation
//! - [`report`]: plan reports and plot-ready figure tables

pub mod benchmark;
pub mod error;
pub mod fit;
pub mod model;
pub mod planner;
pub mod profile;
pub mod report;
pub mod trace;

pub use error::{FitError, ModelError, PlanError, ProfileError, TraceError};
pub use fit::{fit_cpu_dvfs, fit_goodness, fit_linear_flops, fit_power_law, FitResult, FittedModel};
pub use model::{
    energy_at_frequency, predict_cpu_dvfs, predict_energy, predict_power_law, CpuDvfsModel, EnergyCoefficient,
    Frequency, ModelFamily, PowerLawModel,
};
pub use planner::{
    evaluate_plan, plan_frequency, plan_partition, rate_sweep, DeviceFrequency, Evaluation, LocalPlanRequest,
    Partition, PartitionPlanRequest, Plan,
};
pub use profile::{
    builtin, validate_profile, BlockProfile, DeviceProfile, EdgeProfile, NetworkProfile, ProfileDocument,
    ValidationReport,
};
pub use trace::{Trace, TraceKey, TraceSeries};
