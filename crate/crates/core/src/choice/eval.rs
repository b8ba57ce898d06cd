use crate::choice::table::{Layers, LogitLayer, NestedLayer, UtilityTable};
use crate::error::{Error, Result};
use crate::instance::LocationId;

/// `W^{1/μ}` as `exp(ln W / μ)`; an empty nest contributes nothing.
#[inline]
pub(crate) fn nest_power(w: f64, inv_mu: f64) -> f64 {
    if w <= 0.0 {
        0.0
    } else if inv_mu == 1.0 {
        w
    } else {
        (w.ln() * inv_mu).exp()
    }
}

/// Numerator and denominator contributions `(C W^{1/μ-1}, W^{1/μ})` of one nest.
#[inline]
pub(crate) fn nest_terms(c: f64, d: f64, inv_mu: f64) -> (f64, f64) {
    let w = c + d;
    if w <= 0.0 {
        return (0.0, 0.0);
    }
    let pow = nest_power(w, inv_mu);
    (c / w * pow, pow)
}

/// Per-zone weighted candidate sums `A_i(x) = Σ_j x_j V_ij`.
pub(crate) fn logit_sums(layer: &LogitLayer, n_zones: usize, weights: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0; n_zones];
    for (col, &w) in layer.cand.chunks_exact(n_zones).zip(weights) {
        if w == 0.0 {
            continue;
        }
        for (a, v) in sums.iter_mut().zip(col) {
            *a += w * v;
        }
    }
    sums
}

pub(crate) fn logit_objective(layer: &LogitLayer, demand: &[f64], sums: &[f64]) -> f64 {
    demand
        .iter()
        .zip(sums)
        .zip(&layer.comp_total)
        .map(|((q, a), u)| q * a / (a + u))
        .sum()
}

/// Per-zone, per-nest weighted candidate sums `C_il(x)`, zone-major.
pub(crate) fn nested_sums(layer: &NestedLayer, n_zones: usize, weights: &[f64]) -> Vec<f64> {
    let n_nests = layer.n_nests;
    let mut sums = vec![0.0; n_zones * n_nests];
    for ((col, &w), &nest) in layer.cand.chunks_exact(n_zones).zip(weights).zip(&layer.cand_nest) {
        if w == 0.0 {
            continue;
        }
        for (zone, t) in col.iter().enumerate() {
            sums[zone * n_nests + nest] += w * t;
        }
    }
    sums
}

/// Zone ratio numerator and denominator from its nest sums.
pub(crate) fn nested_zone(layer: &NestedLayer, zone: usize, sums: &[f64]) -> (f64, f64) {
    let n_nests = layer.n_nests;
    let base = zone * n_nests;
    let mut num = 0.0;
    let mut den = 0.0;
    for nest in 0..n_nests {
        let (n, d) = nest_terms(sums[base + nest], layer.fixed[base + nest], layer.inv_mu[nest]);
        num += n;
        den += d;
    }
    (num, den)
}

pub(crate) fn nested_objective(layer: &NestedLayer, demand: &[f64], sums: &[f64]) -> f64 {
    demand
        .iter()
        .enumerate()
        .map(|(zone, q)| {
            let (num, den) = nested_zone(layer, zone, sums);
            q * num / den
        })
        .sum()
}

fn weighted_objective(table: &UtilityTable, weights: &[f64]) -> f64 {
    let n_zones = table.n_zones();
    match &table.layers {
        Layers::Logit(layers) => {
            let total: f64 = layers
                .iter()
                .map(|layer| logit_objective(layer, &table.demand, &logit_sums(layer, n_zones, weights)))
                .sum();
            total / layers.len() as f64
        }
        Layers::Nested(layer) => {
            nested_objective(layer, &table.demand, &nested_sums(layer, n_zones, weights))
        }
    }
}

pub(crate) fn indicator(n: usize, slots: &[usize]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for &s in slots {
        x[s] = 1.0;
    }
    x
}

/// Expected number of customers captured by opening `selected`.
pub fn capture(table: &UtilityTable, selected: &[LocationId]) -> Result<f64> {
    let slots = table.slots(selected)?;
    Ok(weighted_objective(table, &indicator(table.n_candidates(), &slots)))
}

pub(crate) fn capture_slots(table: &UtilityTable, slots: &[usize]) -> f64 {
    weighted_objective(table, &indicator(table.n_candidates(), slots))
}

fn check_weights(table: &UtilityTable, weights: &[f64]) -> Result<()> {
    if weights.len() != table.n_candidates() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {} candidates",
            weights.len(),
            table.n_candidates()
        )));
    }
    if let Some(k) = weights.iter().position(|w| !(0.0..=1.0).contains(w)) {
        return Err(Error::InvalidArgument(format!(
            "weight {k} = {} lies outside [0, 1]",
            weights[k]
        )));
    }
    Ok(())
}

/// Capture with the indicator of each candidate slot replaced by a weight in
/// `[0, 1]`. At binary weights this is bit-for-bit [`capture`].
pub fn relaxed_capture(table: &UtilityTable, weights: &[f64]) -> Result<f64> {
    check_weights(table, weights)?;
    Ok(weighted_objective(table, weights))
}

/// Gradient of [`relaxed_capture`] with respect to the slot weights.
///
/// Nested model: where a zone's nest sum is exactly zero the derivative of
/// `W^{1/μ}` is unbounded for `μ > 1`, so that entry uses the exact change of
/// the zone ratio for a unit step instead.
pub fn capture_gradient(table: &UtilityTable, weights: &[f64]) -> Result<Vec<f64>> {
    check_weights(table, weights)?;
    Ok(gradient_unchecked(table, weights))
}

pub(crate) fn gradient_unchecked(table: &UtilityTable, weights: &[f64]) -> Vec<f64> {
    let n_zones = table.n_zones();
    let n_cand = table.n_candidates();
    let demand = &table.demand;
    match &table.layers {
        Layers::Logit(layers) => {
            let mut grad = vec![0.0; n_cand];
            let mut factor = vec![0.0; n_zones];
            for layer in layers {
                let sums = logit_sums(layer, n_zones, weights);
                for (zone, f) in factor.iter_mut().enumerate() {
                    let u = layer.comp_total[zone];
                    let s = sums[zone] + u;
                    *f = demand[zone] * u / (s * s);
                }
                for (g, col) in grad.iter_mut().zip(layer.cand.chunks_exact(n_zones)) {
                    *g += col.iter().zip(&factor).map(|(v, f)| v * f).sum::<f64>();
                }
            }
            let k = layers.len() as f64;
            grad.iter_mut().for_each(|g| *g /= k);
            grad
        }
        Layers::Nested(layer) => {
            let n_nests = layer.n_nests;
            let sums = nested_sums(layer, n_zones, weights);
            let mut factor = vec![0.0; n_zones * n_nests];
            let mut zone_ratio = vec![(0.0, 0.0); n_zones];
            for zone in 0..n_zones {
                let (num, den) = nested_zone(layer, zone, &sums);
                zone_ratio[zone] = (num, den);
                for nest in 0..n_nests {
                    let k = zone * n_nests + nest;
                    let w = sums[k] + layer.fixed[k];
                    if w <= 0.0 {
                        factor[k] = f64::NAN;
                        continue;
                    }
                    let rho = layer.inv_mu[nest];
                    let share = sums[k] / w;
                    let pow_m1 = nest_power(w, rho) / w;
                    factor[k] = demand[zone] * pow_m1 * ((1.0 + (rho - 1.0) * share) * den - rho * num)
                        / (den * den);
                }
            }
            let mut grad = vec![0.0; n_cand];
            for (slot, col) in layer.cand.chunks_exact(n_zones).enumerate() {
                let nest = layer.cand_nest[slot];
                let rho = layer.inv_mu[nest];
                let mut g = 0.0;
                for (zone, &t) in col.iter().enumerate() {
                    let f = factor[zone * n_nests + nest];
                    if f.is_nan() {
                        if t > 0.0 {
                            let (num, den) = zone_ratio[zone];
                            let p = nest_power(t, rho);
                            g += demand[zone] * ((num + p) / (den + p) - num / den);
                        }
                    } else {
                        g += t * f;
                    }
                }
                grad[slot] = g;
            }
            grad
        }
    }
}

/// Choice probabilities of one zone over `selected ∪ competitors`, ordered by
/// location id. Mixed logit averages the per-sample probabilities.
pub fn choice_probabilities(
    table: &UtilityTable,
    zone: usize,
    selected: &[LocationId],
) -> Result<Vec<(LocationId, f64)>> {
    if zone >= table.n_zones() {
        return Err(Error::UnknownZone(zone));
    }
    let slots = table.slots(selected)?;
    let n_zones = table.n_zones();
    let n_comp = table.competitor_ids.len();
    let mut probs = vec![0.0; slots.len() + n_comp];

    match &table.layers {
        Layers::Logit(layers) => {
            for layer in layers {
                let a: f64 = slots.iter().map(|&s| layer.cand[s * n_zones + zone]).sum();
                let total = a + layer.comp_total[zone];
                for (p, &s) in probs.iter_mut().zip(&slots) {
                    *p += layer.cand[s * n_zones + zone] / total;
                }
                for (c, p) in probs[slots.len()..].iter_mut().enumerate() {
                    *p += layer.comp[c * n_zones + zone] / total;
                }
            }
            let k = layers.len() as f64;
            probs.iter_mut().for_each(|p| *p /= k);
        }
        Layers::Nested(layer) => {
            let n_nests = layer.n_nests;
            let mut sums = vec![0.0; n_nests];
            for &s in &slots {
                sums[layer.cand_nest[s]] += layer.cand[s * n_zones + zone];
            }
            let wsum: Vec<f64> = (0..n_nests)
                .map(|l| sums[l] + layer.fixed[zone * n_nests + l])
                .collect();
            let pow: Vec<f64> = (0..n_nests).map(|l| nest_power(wsum[l], layer.inv_mu[l])).collect();
            let den: f64 = pow.iter().sum();
            let prob = |t: f64, nest: usize| {
                if t == 0.0 {
                    0.0
                } else {
                    t / wsum[nest] * pow[nest] / den
                }
            };
            for (p, &s) in probs.iter_mut().zip(&slots) {
                *p = prob(layer.cand[s * n_zones + zone], layer.cand_nest[s]);
            }
            for (c, p) in probs[slots.len()..].iter_mut().enumerate() {
                *p = prob(layer.comp[c * n_zones + zone], layer.comp_nest[c]);
            }
        }
    }

    let mut out: Vec<(LocationId, f64)> = slots
        .iter()
        .map(|&s| table.location(s))
        .chain(table.competitor_ids.iter().copied())
        .zip(probs)
        .collect();
    out.sort_by_key(|&(id, _)| id);
    Ok(out)
}
