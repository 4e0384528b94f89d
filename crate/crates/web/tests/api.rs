use dvfs_core::report::PlanReport;
use dvfs_core::Partition;
use dvfs_web::api;
use serde_json::Value;

fn resnet() -> String {
    api::builtin_profile("resnet152").unwrap()
}

#[test]
fn builtin_profiles_round_trip() {
    let text = api::builtin_profile("alexnet").unwrap();
    assert!(dvfs_core::ProfileDocument::from_json(&text).is_ok());
    assert!(api::builtin_profile("vgg19").is_err());
}

#[test]
fn curves_with_and_without_baseline() {
    let v: Value = serde_json::from_str(&api::curves(&resnet(), None).unwrap()).unwrap();
    assert_eq!(v["freq_ghz"].as_array().unwrap().len(), 100);
    assert!(v["cpu_dvfs_ms"].is_null());
    assert_eq!(v["scale_ghz"].as_array().unwrap().len(), 15);

    let v: Value = serde_json::from_str(&api::curves(&resnet(), Some(0.4)).unwrap()).unwrap();
    let pl: Vec<f64> = serde_json::from_value(v["power_law_ms"].clone()).unwrap();
    let cpu: Vec<f64> = serde_json::from_value(v["cpu_dvfs_ms"].clone()).unwrap();
    assert!(cpu.last().unwrap() < pl.last().unwrap());
    assert!(pl.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn local_plans_carry_truth() {
    let report: PlanReport =
        serde_json::from_str(&api::plan_local(&resnet(), "deadline", 100.0, "power-law", None).unwrap()).unwrap();
    assert!(!report.feasible);
    assert_eq!(report.frequency_ghz, 1.1);

    let report: PlanReport =
        serde_json::from_str(&api::plan_local(&resnet(), "deadline", 150.0, "cpu-dvfs", Some(0.4)).unwrap()).unwrap();
    assert!(report.feasible);
    assert!(!report.truth.unwrap().deadline_met);

    assert!(api::plan_local(&resnet(), "deadline", 150.0, "cpu-dvfs", None).is_err());
    assert!(api::plan_local(&resnet(), "throughput", 1.0, "power-law", None).is_err());
    assert!(api::plan_local(&resnet(), "energy", 1.0, "roofline", None).is_err());
}

#[test]
fn split_plans_use_a_uniform_edge() {
    let report: PlanReport = serde_json::from_str(&api::plan_split(&resnet(), 1.0, 20.0, 200.0, false).unwrap()).unwrap();
    assert_eq!(report.candidates.len(), 10);
    assert!(report.candidates.iter().all(|c| c.breakdown.is_some()));

    let report: PlanReport = serde_json::from_str(&api::plan_split(&resnet(), 0.0, 1e9, 200.0, true).unwrap()).unwrap();
    assert_eq!(report.partition, Partition::Point(0));
    assert_eq!(report.candidates.len(), 150);

    let alexnet = api::builtin_profile("alexnet").unwrap();
    assert!(api::plan_split(&alexnet, 1.0, 20.0, 200.0, false).is_err());
}

#[test]
fn invalid_profiles_are_rejected() {
    assert!(api::curves("{", None).is_err());
    let mut doc = dvfs_core::builtin::alexnet_xavier_nx();
    doc.network.blocks[0].model.b = 5.0;
    assert!(api::curves(&doc.to_json(), None).unwrap_err().contains("exponent"));
}
