use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::choice::{ChoiceModelSpec, ModelKind};
use crate::error::{Error, Result};
use crate::instance::{Instance, LocationId};

/// Precomputed exponentiated utilities for one (instance, model) pair.
///
/// Candidate columns are stored slot-major (`slot * n_zones + zone`) so that
/// incremental swap evaluation streams over contiguous memory. Slots number
/// the candidates in ascending location id.
#[derive(Debug, Clone)]
pub struct UtilityTable {
    pub(crate) demand: Vec<f64>,
    pub(crate) candidate_ids: Vec<LocationId>,
    pub(crate) competitor_ids: Vec<LocationId>,
    slot_of: Vec<Option<usize>>,
    pub(crate) layers: Layers,
}

#[derive(Debug, Clone)]
pub(crate) enum Layers {
    /// One layer for MNL, one per sample for mixed logit.
    Logit(Vec<LogitLayer>),
    Nested(NestedLayer),
}

#[derive(Debug, Clone)]
pub(crate) struct LogitLayer {
    /// `V_ij`, slot-major.
    pub cand: Vec<f64>,
    /// Competitor exponentials, competitor-major.
    pub comp: Vec<f64>,
    /// `U_i`, per zone.
    pub comp_total: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct NestedLayer {
    pub n_nests: usize,
    /// `1 / mu_l`.
    pub inv_mu: Vec<f64>,
    /// `a_j exp(mu_l v_ij)`, slot-major.
    pub cand: Vec<f64>,
    pub cand_nest: Vec<usize>,
    pub comp: Vec<f64>,
    pub comp_nest: Vec<usize>,
    /// Competitors' part of every nest sum, zone-major (`zone * n_nests + nest`).
    pub fixed: Vec<f64>,
}

impl UtilityTable {
    pub fn n_zones(&self) -> usize {
        self.demand.len()
    }

    pub fn n_candidates(&self) -> usize {
        self.candidate_ids.len()
    }

    pub fn demand(&self) -> &[f64] {
        &self.demand
    }

    pub fn total_demand(&self) -> f64 {
        self.demand.iter().sum()
    }

    pub fn candidates(&self) -> &[LocationId] {
        &self.candidate_ids
    }

    pub fn competitors(&self) -> &[LocationId] {
        &self.competitor_ids
    }

    /// Number of Monte-Carlo layers (1 for MNL and nested).
    pub fn n_samples(&self) -> usize {
        match &self.layers {
            Layers::Logit(l) => l.len(),
            Layers::Nested(_) => 1,
        }
    }

    pub fn slot(&self, location: LocationId) -> Option<usize> {
        self.slot_of.get(location.0).copied().flatten()
    }

    pub fn location(&self, slot: usize) -> LocationId {
        self.candidate_ids[slot]
    }

    /// Candidate exponential `V_ij` of the given sample (MNL and mixed logit).
    pub fn candidate_utility(&self, sample: usize, zone: usize, location: LocationId) -> Option<f64> {
        let slot = self.slot(location)?;
        match &self.layers {
            Layers::Logit(layers) => Some(layers.get(sample)?.cand[slot * self.n_zones() + zone]),
            Layers::Nested(n) => Some(n.cand[slot * self.n_zones() + zone]),
        }
    }

    /// Competitor total `U_i` of the given sample (MNL and mixed logit).
    pub fn competitor_total(&self, sample: usize, zone: usize) -> Option<f64> {
        match &self.layers {
            Layers::Logit(layers) => Some(layers.get(sample)?.comp_total[zone]),
            Layers::Nested(_) => None,
        }
    }

    /// Maps location ids to sorted, distinct candidate slots.
    pub(crate) fn slots(&self, ids: &[LocationId]) -> Result<Vec<usize>> {
        let mut slots = Vec::with_capacity(ids.len());
        for &id in ids {
            let slot = self.slot(id).ok_or_else(|| {
                Error::Contract(format!("location {id} is not a candidate location"))
            })?;
            slots.push(slot);
        }
        slots.sort_unstable();
        if slots.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Contract("solution lists a location twice".into()));
        }
        Ok(slots)
    }
}

fn checked_exp(exponent: f64, zone: usize, location: LocationId) -> Result<f64> {
    let v = exponent.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteUtility {
            zone,
            location: location.0,
        })
    }
}

fn logit_layer(
    instance: &Instance,
    beta: f64,
    alpha: f64,
    mut distance: impl FnMut(usize, LocationId) -> f64,
) -> Result<LogitLayer> {
    let n_zones = instance.n_zones();
    let mut cand = Vec::with_capacity(instance.candidates.len() * n_zones);
    for &loc in &instance.candidates {
        for zone in 0..n_zones {
            cand.push(checked_exp(-beta * distance(zone, loc), zone, loc)?);
        }
    }
    let mut comp = Vec::with_capacity(instance.competitors.len() * n_zones);
    for &loc in &instance.competitors {
        for zone in 0..n_zones {
            comp.push(checked_exp(-beta * alpha * distance(zone, loc), zone, loc)?);
        }
    }
    let mut comp_total = vec![0.0; n_zones];
    for col in comp.chunks(n_zones) {
        for (total, v) in comp_total.iter_mut().zip(col) {
            *total += v;
        }
    }
    if let Some(zone) = comp_total.iter().position(|&u| u <= 0.0) {
        return Err(Error::VanishingCompetitors { zone });
    }
    Ok(LogitLayer {
        cand,
        comp,
        comp_total,
    })
}

/// Builds the utility table of `spec` on `instance`.
///
/// Mixed logit redraws every distance independently per sample from
/// `Uniform[(1 - δ) c, (1 + δ) c]` with a ChaCha8 stream seeded by the spec.
/// Draws run sample by sample, zone-major, over all locations in id order.
pub fn build_utilities(instance: &Instance, spec: &ChoiceModelSpec) -> Result<UtilityTable> {
    instance.check()?;
    spec.validate_for(instance)?;
    let n_zones = instance.n_zones();
    let n_loc = instance.n_locations();

    let layers = match &spec.kind {
        ModelKind::Mnl => Layers::Logit(vec![logit_layer(instance, spec.beta, spec.alpha, |i, l| {
            instance.distance(i, l)
        })?]),
        ModelKind::Mixed {
            samples,
            halfwidth,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut layers = Vec::with_capacity(*samples);
            let mut perturbed = vec![0.0; instance.distances.len()];
            for _ in 0..*samples {
                for (p, &c) in perturbed.iter_mut().zip(&instance.distances) {
                    let u: f64 = rng.random();
                    *p = c * (1.0 - halfwidth + 2.0 * halfwidth * u);
                }
                layers.push(logit_layer(instance, spec.beta, spec.alpha, |i, l| {
                    perturbed[i * n_loc + l.0]
                })?);
            }
            Layers::Logit(layers)
        }
        ModelKind::Nested(params) => {
            let n_nests = params.nests.n_nests;
            let assignment = &params.nests.assignment;
            let term = |zone: usize, loc: LocationId, scale: f64| -> Result<f64> {
                let mu = params.mu[assignment[loc.0]];
                let v = -spec.beta * scale * instance.distance(zone, loc);
                Ok(params.coefficients[loc.0] * checked_exp(mu * v, zone, loc)?)
            };

            let mut cand = Vec::with_capacity(instance.candidates.len() * n_zones);
            for &loc in &instance.candidates {
                for zone in 0..n_zones {
                    cand.push(term(zone, loc, 1.0)?);
                }
            }
            let mut comp = Vec::with_capacity(instance.competitors.len() * n_zones);
            let mut fixed = vec![0.0; n_zones * n_nests];
            for &loc in &instance.competitors {
                let nest = assignment[loc.0];
                for zone in 0..n_zones {
                    let t = term(zone, loc, spec.alpha)?;
                    comp.push(t);
                    fixed[zone * n_nests + nest] += t;
                }
            }
            for zone in 0..n_zones {
                if fixed[zone * n_nests..(zone + 1) * n_nests].iter().all(|&d| d <= 0.0) {
                    return Err(Error::VanishingCompetitors { zone });
                }
            }
            Layers::Nested(NestedLayer {
                n_nests,
                inv_mu: params.mu.iter().map(|m| 1.0 / m).collect(),
                cand,
                cand_nest: instance.candidates.iter().map(|l| assignment[l.0]).collect(),
                comp,
                comp_nest: instance.competitors.iter().map(|l| assignment[l.0]).collect(),
                fixed,
            })
        }
    };

    let mut slot_of = vec![None; n_loc];
    for (slot, loc) in instance.candidates.iter().enumerate() {
        slot_of[loc.0] = Some(slot);
    }
    Ok(UtilityTable {
        demand: instance.demands.clone(),
        candidate_ids: instance.candidates.clone(),
        competitor_ids: instance.competitors.clone(),
        slot_of,
        layers,
    })
}
