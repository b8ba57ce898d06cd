//! Direct formula evaluation straight from instance distances, independent of
//! the utility tables and caches under test.
#![allow(dead_code)]

use maxcap_core::instance::{generate_planar, GeneratorConfig, Instance, LocationId, NestSpec};

pub fn planar(zones: usize, candidates: usize, seed: u64) -> Instance {
    generate_planar(&GeneratorConfig::new(zones, candidates, seed)).unwrap()
}

fn utility(inst: &Instance, beta: f64, alpha: f64, zone: usize, loc: LocationId) -> f64 {
    let scale = if inst.competitors.contains(&loc) { alpha } else { 1.0 };
    -beta * scale * inst.distance(zone, loc)
}

/// MNL probabilities over `set ∪ competitors` by the textbook softmax.
pub fn mnl_probs(inst: &Instance, beta: f64, alpha: f64, zone: usize, set: &[LocationId]) -> Vec<(LocationId, f64)> {
    let mut alts: Vec<LocationId> = set.iter().chain(&inst.competitors).copied().collect();
    alts.sort();
    let expv: Vec<f64> = alts.iter().map(|&l| utility(inst, beta, alpha, zone, l).exp()).collect();
    let total: f64 = expv.iter().sum();
    alts.into_iter().zip(expv.into_iter().map(|e| e / total)).collect()
}

/// Nested-logit probabilities evaluated with `powf` exactly as written:
/// `a_j e^{μ v_j} (Σ_{k∈l} a_k e^{μ v_k})^{1/μ-1} / Σ_l' (Σ_{k∈l'} a_k e^{μ' v_k})^{1/μ'}`.
pub fn nested_probs(
    inst: &Instance,
    beta: f64,
    alpha: f64,
    nests: &NestSpec,
    mu: &[f64],
    coef: &[f64],
    zone: usize,
    set: &[LocationId],
) -> Vec<(LocationId, f64)> {
    let mut alts: Vec<LocationId> = set.iter().chain(&inst.competitors).copied().collect();
    alts.sort();
    let term = |l: LocationId| {
        let nest = nests.assignment[l.0];
        coef[l.0] * (mu[nest] * utility(inst, beta, alpha, zone, l)).exp()
    };
    let mut w = vec![0.0; nests.n_nests];
    for &l in &alts {
        w[nests.assignment[l.0]] += term(l);
    }
    let den: f64 = w
        .iter()
        .zip(mu)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, m)| w.powf(1.0 / m))
        .sum();
    alts.into_iter()
        .map(|l| {
            let nest = nests.assignment[l.0];
            (l, term(l) * w[nest].powf(1.0 / mu[nest] - 1.0) / den)
        })
        .collect()
}

pub fn capture_from_probs(inst: &Instance, set: &[LocationId], probs: impl Fn(usize) -> Vec<(LocationId, f64)>) -> f64 {
    (0..inst.n_zones())
        .map(|i| {
            let p: f64 = probs(i).iter().filter(|(l, _)| set.contains(l)).map(|(_, p)| p).sum();
            inst.demands[i] * p
        })
        .sum()
}

pub fn mnl_capture(inst: &Instance, beta: f64, alpha: f64, set: &[LocationId]) -> f64 {
    capture_from_probs(inst, set, |i| mnl_probs(inst, beta, alpha, i, set))
}

/// All subsets of `items` as bitmasks.
pub fn subsets(items: &[LocationId]) -> Vec<Vec<LocationId>> {
    (0u32..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, l)| *l)
                .collect()
        })
        .collect()
}

/// Tiny deterministic generator for test-side sampling.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }

    pub fn unit(&mut self) -> f64 {
        self.next() as f64 / (1u64 << 31) as f64
    }
}
