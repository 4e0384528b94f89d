//! Brute-force reference planner over raw parameters.
//!
//! Shares no code with the library: latencies, energies, upload times, and
//! the selection rule are all recomputed here from plain numbers.

#![allow(dead_code)]

use dvfs_core::{BlockProfile, CpuDvfsModel, DeviceProfile, EdgeProfile, NetworkProfile, PowerLawModel};
use rand::Rng;

#[derive(Debug, Clone)]
pub struct RawBlock {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub coeff: f64,
    pub out_bytes: f64,
}

#[derive(Debug, Clone)]
pub struct RawInstance {
    pub blocks: Vec<RawBlock>,
    pub input_bytes: f64,
    pub scale: Vec<f64>,
    pub kappa: f64,
    pub tx_power: f64,
    pub edge_ms: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    PowerLaw,
    CpuDvfs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Choice {
    pub freq: f64,
    pub m: Option<usize>,
    pub feasible: bool,
}

impl RawInstance {
    pub fn random(rng: &mut impl Rng, max_freqs: usize, max_blocks: usize) -> Self {
        let n_blocks = rng.gen_range(1..=max_blocks);
        let n_freqs = rng.gen_range(1..=max_freqs);
        let mut scale: Vec<f64> = Vec::new();
        let mut f = rng.gen_range(0.05..0.3);
        for _ in 0..n_freqs {
            scale.push(f);
            f += rng.gen_range(0.01..0.2);
        }
        let blocks = (0..n_blocks)
            .map(|_| RawBlock {
                a: rng.gen_range(0.0..10.0),
                b: rng.gen_range(0.2..2.9),
                c: rng.gen_range(0.0..20.0),
                coeff: rng.gen_range(0.01..20.0),
                out_bytes: rng.gen_range(0.0..4e6),
            })
            .collect();
        RawInstance {
            blocks,
            input_bytes: rng.gen_range(1e4..2e6),
            scale,
            kappa: rng.gen_range(0.1..3.0),
            tx_power: rng.gen_range(0.0..3.0),
            edge_ms: (0..n_blocks).map(|_| rng.gen_range(0.0..5.0)).collect(),
        }
    }

    pub fn network(&self) -> NetworkProfile {
        NetworkProfile {
            name: "random".into(),
            input_bytes: self.input_bytes,
            blocks: self
                .blocks
                .iter()
                .enumerate()
                .map(|(i, b)| BlockProfile {
                    name: format!("b{}", i + 1),
                    flops: 0.0,
                    output_bytes: Some(b.out_bytes),
                    model: PowerLawModel { a: b.a, b: b.b, c: b.c },
                    cpu_dvfs: Some(CpuDvfsModel { coeff: b.coeff }),
                })
                .collect(),
        }
    }

    pub fn device(&self) -> DeviceProfile {
        DeviceProfile {
            name: "random".into(),
            freq_scale_ghz: self.scale.clone(),
            kappa_w_per_ghz3: self.kappa,
            tx_power_w: Some(self.tx_power),
        }
    }

    pub fn edge(&self) -> EdgeProfile {
        EdgeProfile { name: "random".into(), block_latency_ms: self.edge_ms.clone() }
    }

    fn block_ms(&self, i: usize, family: Family, f: f64) -> f64 {
        let b = &self.blocks[i];
        match family {
            Family::PowerLaw => b.a * f.powf(-b.b) + b.c,
            Family::CpuDvfs => b.coeff / f,
        }
    }

    fn device_ms(&self, m: usize, family: Family, f: f64) -> f64 {
        let mut t = 0.0;
        for i in 0..m {
            t += self.block_ms(i, family, f);
        }
        t
    }

    /// (latency ms, energy J) of fully local inference.
    pub fn local(&self, family: Family, f: f64) -> (f64, f64) {
        let t = self.device_ms(self.blocks.len(), family, f);
        (t, self.kappa * f * f * f * t / 1000.0)
    }

    /// (latency ms, energy J) of partitioning at `m`.
    pub fn split(&self, family: Family, f: f64, m: usize, rate_mbps: f64) -> (f64, f64) {
        let n = self.blocks.len();
        let t_dev = self.device_ms(m, family, f);
        let bytes = if m == 0 {
            self.input_bytes
        } else if m == n {
            0.0
        } else {
            self.blocks[m - 1].out_bytes
        };
        let up_s = bytes * 8.0 / (rate_mbps * 1e6);
        let mut t_edge = 0.0;
        for i in m..n {
            t_edge += self.edge_ms[i];
        }
        let latency = t_dev + up_s * 1000.0 + t_edge;
        let energy = self.kappa * f * f * f * t_dev / 1000.0 + self.tx_power * up_s;
        (latency, energy)
    }
}

/// `true` when (obj1, sec1, f1, m1) should replace (obj0, sec0, f0, m0).
fn wins(new: (f64, f64, f64, usize), old: (f64, f64, f64, usize)) -> bool {
    if new.0 != old.0 {
        return new.0 < old.0;
    }
    if new.1 != old.1 {
        return new.1 < old.1;
    }
    if new.2 != old.2 {
        return new.2 < old.2;
    }
    new.3 > old.3
}

pub fn frequency_deadline(inst: &RawInstance, family: Family, deadline_ms: f64) -> Choice {
    let mut best: Option<(f64, f64, f64, usize)> = None;
    for &f in &inst.scale {
        let (t, e) = inst.local(family, f);
        if t <= deadline_ms {
            let key = (e, t, f, 0);
            if best.is_none_or(|b| wins(key, b)) {
                best = Some(key);
            }
        }
    }
    match best {
        Some(b) => Choice { freq: b.2, m: None, feasible: true },
        None => Choice { freq: *inst.scale.last().unwrap(), m: None, feasible: false },
    }
}

pub fn frequency_budget(inst: &RawInstance, family: Family, budget_j: f64) -> Choice {
    let mut best: Option<(f64, f64, f64, usize)> = None;
    for &f in &inst.scale {
        let (t, e) = inst.local(family, f);
        if e <= budget_j {
            let key = (t, e, f, 0);
            if best.is_none_or(|b| wins(key, b)) {
                best = Some(key);
            }
        }
    }
    match best {
        Some(b) => Choice { freq: b.2, m: None, feasible: true },
        None => Choice { freq: inst.scale[0], m: None, feasible: false },
    }
}

pub fn partition(inst: &RawInstance, family: Family, deadline_ms: f64, rate_mbps: f64, freqs: &[f64]) -> Choice {
    let mut feasible_best: Option<(f64, f64, f64, usize)> = None;
    let mut fallback: Option<(f64, f64, f64, usize)> = None;
    for &f in freqs {
        for m in 0..=inst.blocks.len() {
            let (t, e) = inst.split(family, f, m, rate_mbps);
            if t <= deadline_ms {
                let key = (e, t, f, m);
                if feasible_best.is_none_or(|b| wins(key, b)) {
                    feasible_best = Some(key);
                }
            }
            let key = (t, e, f, m);
            if fallback.is_none_or(|b| wins(key, b)) {
                fallback = Some(key);
            }
        }
    }
    match feasible_best {
        Some(b) => Choice { freq: b.2, m: Some(b.3), feasible: true },
        None => {
            let b = fallback.unwrap();
            Choice { freq: b.2, m: Some(b.3), feasible: false }
        }
    }
}
