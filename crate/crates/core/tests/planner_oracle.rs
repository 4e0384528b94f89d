mod support;

use dvfs_core::planner::{DeviceFrequency, Partition, PartitionPlanRequest};
use dvfs_core::{evaluate_plan, plan_frequency, plan_partition, LocalPlanRequest, ModelFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracle::{self, Family, RawInstance};

const INSTANCES: usize = 100;

fn families() -> [(ModelFamily, Family); 2] {
    [(ModelFamily::PowerLaw, Family::PowerLaw), (ModelFamily::CpuDvfs, Family::CpuDvfs)]
}

/// A deadline somewhere around the achievable latency range, so that both
/// feasible and infeasible requests occur.
fn deadline_for(inst: &RawInstance, family: Family, rng: &mut impl Rng) -> f64 {
    let fastest = inst.local(family, *inst.scale.last().unwrap()).0;
    let slowest = inst.local(family, inst.scale[0]).0;
    rng.gen_range(0.8 * fastest..1.1 * slowest)
}

#[test]
fn frequency_planner_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut disagreements = 0;
    for _ in 0..INSTANCES {
        let inst = RawInstance::random(&mut rng, 32, 12);
        let (net, dev) = (inst.network(), inst.device());
        for (family, raw_family) in families() {
            let d = deadline_for(&inst, raw_family, &mut rng);
            let plan = plan_frequency(&net, &dev, &LocalPlanRequest::MinEnergyUnderDeadline { deadline_ms: d }, family).unwrap();
            let want = oracle::frequency_deadline(&inst, raw_family, d);
            if plan.frequency_ghz != want.freq || plan.feasible != want.feasible {
                disagreements += 1;
            }
            assert_eq!(plan.candidates.len(), inst.scale.len());

            let e_lo = inst.local(raw_family, inst.scale[0]).1;
            let budget = rng.gen_range(0.8 * e_lo..3.0 * e_lo);
            let plan = plan_frequency(&net, &dev, &LocalPlanRequest::MinLatencyUnderEnergy { energy_budget_j: budget }, family).unwrap();
            let want = oracle::frequency_budget(&inst, raw_family, budget);
            if plan.frequency_ghz != want.freq || plan.feasible != want.feasible {
                disagreements += 1;
            }
        }
    }
    assert_eq!(disagreements, 0);
}

#[test]
fn partition_planner_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut disagreements = 0;
    for _ in 0..INSTANCES {
        let inst = RawInstance::random(&mut rng, 32, 12);
        let (net, dev, edge) = (inst.network(), inst.device(), inst.edge());
        for (family, raw_family) in families() {
            let rate = 10f64.powf(rng.gen_range(0.0..3.0));
            let d = deadline_for(&inst, raw_family, &mut rng);
            for joint in [false, true] {
                let req = PartitionPlanRequest { deadline_ms: d, rate_mbps: rate, device_freq: DeviceFrequency::Max, joint_freq: joint };
                let plan = plan_partition(&net, &dev, Some(&edge), &req, family).unwrap();
                let freqs = if joint { inst.scale.clone() } else { vec![*inst.scale.last().unwrap()] };
                let want = oracle::partition(&inst, raw_family, d, rate, &freqs);
                let got_m = match plan.partition {
                    Partition::Point(m) => Some(m),
                    Partition::Local => None,
                };
                if plan.frequency_ghz != want.freq || got_m != want.m || plan.feasible != want.feasible {
                    disagreements += 1;
                }
                assert_eq!(plan.candidates.len(), freqs.len() * (inst.blocks.len() + 1));
            }
        }
    }
    assert_eq!(disagreements, 0);
}

#[test]
fn deadline_plans_pick_the_slowest_feasible_frequency() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for _ in 0..INSTANCES {
        let inst = RawInstance::random(&mut rng, 32, 12);
        let (net, dev) = (inst.network(), inst.device());
        let d = deadline_for(&inst, Family::PowerLaw, &mut rng);
        let plan = plan_frequency(&net, &dev, &LocalPlanRequest::MinEnergyUnderDeadline { deadline_ms: d }, ModelFamily::PowerLaw).unwrap();
        if plan.feasible {
            let slowest_feasible = plan.candidates.iter().find(|c| c.feasible).unwrap();
            assert_eq!(plan.frequency_ghz, slowest_feasible.frequency_ghz);
        }
    }
}

#[test]
fn feasible_plans_are_sound_and_undominated() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    for _ in 0..INSTANCES {
        let inst = RawInstance::random(&mut rng, 16, 8);
        let (net, dev, edge) = (inst.network(), inst.device(), inst.edge());
        let d = deadline_for(&inst, Family::PowerLaw, &mut rng);

        let req = LocalPlanRequest::MinEnergyUnderDeadline { deadline_ms: d };
        let plan = plan_frequency(&net, &dev, &req, ModelFamily::PowerLaw).unwrap();
        let eval = evaluate_plan(&plan, &net, &dev, None, ModelFamily::PowerLaw).unwrap();
        assert_eq!(eval.deadline_met, plan.feasible);
        if plan.feasible {
            assert!(eval.actual_latency_ms <= d);
            assert!(plan.candidates.iter().filter(|c| c.feasible).all(|c| c.energy_j >= plan.predicted_energy_j));
        }

        let req = PartitionPlanRequest { deadline_ms: d, rate_mbps: 50.0, device_freq: DeviceFrequency::Max, joint_freq: true };
        let plan = plan_partition(&net, &dev, Some(&edge), &req, ModelFamily::PowerLaw).unwrap();
        let eval = evaluate_plan(&plan, &net, &dev, Some(&edge), ModelFamily::PowerLaw).unwrap();
        assert_eq!(eval.deadline_met, plan.feasible);
        assert_eq!(eval.actual_energy_j, plan.predicted_energy_j);
        if plan.feasible {
            assert!(eval.actual_latency_ms <= d);
            assert!(plan.candidates.iter().filter(|c| c.feasible).all(|c| c.energy_j >= plan.predicted_energy_j));
        }
    }
}
