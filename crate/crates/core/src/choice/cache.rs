//! Incremental objective evaluation for swap-based search.

use crate::choice::eval::{
    capture_slots, indicator, logit_sums, nest_terms, nested_sums, nested_zone,
};
use crate::choice::table::{Layers, UtilityTable};
use crate::error::{Error, Result};
use crate::instance::LocationId;

/// A nest hit by a move: (nest, members after the move, [(slot, sign)]).
type TouchedNest = (usize, usize, Vec<(usize, f64)>);

/// Cached per-zone sums for the current solution.
///
/// Logit models keep `A_ik` for every sample; the nested model keeps `C_il`
/// together with each nest's numerator/denominator contribution so a move only
/// touches the nests it changes. A commit rebuilds the sums from scratch, so
/// the cached objective always equals [`capture`](crate::capture) exactly.
#[derive(Debug, Clone)]
pub struct EvalCache<'t> {
    table: &'t UtilityTable,
    selected: Vec<usize>,
    member: Vec<bool>,
    state: State,
    objective: f64,
}

#[derive(Debug, Clone)]
enum State {
    /// `A_ik`, sample-major.
    Logit { sums: Vec<f64> },
    Nested {
        /// `C_il`, zone-major.
        sums: Vec<f64>,
        num_terms: Vec<f64>,
        den_terms: Vec<f64>,
        num: Vec<f64>,
        den: Vec<f64>,
        /// Selected candidates per nest.
        counts: Vec<usize>,
    },
}

impl<'t> EvalCache<'t> {
    pub fn new(table: &'t UtilityTable, selected: &[LocationId]) -> Result<Self> {
        let slots = table.slots(selected)?;
        Ok(Self::from_slots(table, slots))
    }

    pub(crate) fn from_slots(table: &'t UtilityTable, mut slots: Vec<usize>) -> Self {
        slots.sort_unstable();
        let mut member = vec![false; table.n_candidates()];
        for &s in &slots {
            member[s] = true;
        }
        let mut cache = EvalCache {
            table,
            selected: slots,
            member,
            state: State::Logit { sums: Vec::new() },
            objective: 0.0,
        };
        cache.rebuild();
        cache
    }

    fn rebuild(&mut self) {
        let table = self.table;
        let n_zones = table.n_zones();
        let weights = indicator(table.n_candidates(), &self.selected);
        self.state = match &table.layers {
            Layers::Logit(layers) => State::Logit {
                sums: layers
                    .iter()
                    .flat_map(|layer| logit_sums(layer, n_zones, &weights))
                    .collect(),
            },
            Layers::Nested(layer) => {
                let n_nests = layer.n_nests;
                let sums = nested_sums(layer, n_zones, &weights);
                let mut num_terms = vec![0.0; sums.len()];
                let mut den_terms = vec![0.0; sums.len()];
                let mut num = vec![0.0; n_zones];
                let mut den = vec![0.0; n_zones];
                for zone in 0..n_zones {
                    for nest in 0..n_nests {
                        let k = zone * n_nests + nest;
                        let (n, d) = nest_terms(sums[k], layer.fixed[k], layer.inv_mu[nest]);
                        num_terms[k] = n;
                        den_terms[k] = d;
                    }
                    (num[zone], den[zone]) = nested_zone(layer, zone, &sums);
                }
                let mut counts = vec![0; n_nests];
                for &s in &self.selected {
                    counts[layer.cand_nest[s]] += 1;
                }
                State::Nested {
                    sums,
                    num_terms,
                    den_terms,
                    num,
                    den,
                    counts,
                }
            }
        };
        self.objective = capture_slots(table, &self.selected);
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn table(&self) -> &'t UtilityTable {
        self.table
    }

    pub fn selected(&self) -> Vec<LocationId> {
        self.selected.iter().map(|&s| self.table.location(s)).collect()
    }

    pub(crate) fn selected_slots(&self) -> &[usize] {
        &self.selected
    }

    pub(crate) fn is_selected(&self, slot: usize) -> bool {
        self.member[slot]
    }

    /// Cached per-zone candidate sums of one sample (logit) or the zone-major
    /// nest sums (nested).
    pub fn zone_sums(&self, sample: usize) -> &[f64] {
        match &self.state {
            State::Logit { sums } => {
                let n = self.table.n_zones();
                &sums[sample * n..(sample + 1) * n]
            }
            State::Nested { sums, .. } => sums,
        }
    }

    fn check_swap(&self, remove: LocationId, add: LocationId) -> Result<(usize, usize)> {
        let r = self
            .table
            .slot(remove)
            .filter(|&s| self.member[s])
            .ok_or_else(|| Error::Contract(format!("location {remove} is not in the solution")))?;
        let a = self
            .table
            .slot(add)
            .ok_or_else(|| Error::Contract(format!("location {add} is not a candidate")))?;
        if self.member[a] {
            return Err(Error::Contract(format!("location {add} is already in the solution")));
        }
        Ok((r, a))
    }

    /// Objective after exchanging `remove` for `add`, leaving the cache untouched.
    pub fn swap_objective(&self, remove: LocationId, add: LocationId) -> Result<f64> {
        let (r, a) = self.check_swap(remove, add)?;
        Ok(self.move_objective(&[r], &[a]))
    }

    /// Applies the swap and returns the new objective.
    pub fn commit_swap(&mut self, remove: LocationId, add: LocationId) -> Result<f64> {
        let (r, a) = self.check_swap(remove, add)?;
        self.commit_move(&[r], &[a]);
        Ok(self.objective)
    }

    pub(crate) fn commit_move(&mut self, removes: &[usize], adds: &[usize]) {
        for &r in removes {
            debug_assert!(self.member[r]);
            self.member[r] = false;
        }
        for &a in adds {
            debug_assert!(!self.member[a]);
            self.member[a] = true;
        }
        self.selected = (0..self.member.len()).filter(|&s| self.member[s]).collect();
        self.rebuild();
    }

    /// Objective after removing the slots in `removes` (all selected) and
    /// adding the slots in `adds` (none selected).
    pub(crate) fn move_objective(&self, removes: &[usize], adds: &[usize]) -> f64 {
        let table = self.table;
        let n_zones = table.n_zones();
        let demand = &table.demand;
        let emptied = self.selected.len() + adds.len() == removes.len();
        match (&table.layers, &self.state) {
            (Layers::Logit(layers), State::Logit { sums }) => {
                let mut total = 0.0;
                for (k, layer) in layers.iter().enumerate() {
                    if emptied {
                        continue;
                    }
                    let a_cached = &sums[k * n_zones..(k + 1) * n_zones];
                    let col = |s: usize| &layer.cand[s * n_zones..(s + 1) * n_zones];
                    let u = &layer.comp_total;
                    total += match (removes, adds) {
                        ([r], [x]) => {
                            let (cr, cx) = (col(*r), col(*x));
                            (0..n_zones)
                                .map(|i| {
                                    let a = a_cached[i] - cr[i] + cx[i];
                                    demand[i] * a / (a + u[i])
                                })
                                .sum::<f64>()
                        }
                        ([], [x]) => {
                            let cx = col(*x);
                            (0..n_zones)
                                .map(|i| {
                                    let a = a_cached[i] + cx[i];
                                    demand[i] * a / (a + u[i])
                                })
                                .sum::<f64>()
                        }
                        ([r1, r2], [x1, x2]) => {
                            let (cr1, cr2, cx1, cx2) = (col(*r1), col(*r2), col(*x1), col(*x2));
                            (0..n_zones)
                                .map(|i| {
                                    let a = a_cached[i] - cr1[i] - cr2[i] + cx1[i] + cx2[i];
                                    demand[i] * a / (a + u[i])
                                })
                                .sum::<f64>()
                        }
                        _ => (0..n_zones)
                            .map(|i| {
                                let a = a_cached[i] - removes.iter().map(|&s| col(s)[i]).sum::<f64>()
                                    + adds.iter().map(|&s| col(s)[i]).sum::<f64>();
                                demand[i] * a / (a + u[i])
                            })
                            .sum::<f64>(),
                    };
                }
                total / layers.len() as f64
            }
            (
                Layers::Nested(layer),
                State::Nested {
                    sums,
                    num_terms,
                    den_terms,
                    num,
                    den,
                    counts,
                },
            ) => {
                let n_nests = layer.n_nests;
                let mut touched: Vec<TouchedNest> = Vec::with_capacity(4);
                let moves = removes
                    .iter()
                    .map(|&s| (s, -1.0))
                    .chain(adds.iter().map(|&s| (s, 1.0)));
                for (slot, sign) in moves {
                    let nest = layer.cand_nest[slot];
                    match touched.iter_mut().find(|t| t.0 == nest) {
                        Some(t) => t.2.push((slot, sign)),
                        None => touched.push((nest, counts[nest], vec![(slot, sign)])),
                    }
                }
                for t in &mut touched {
                    let added = t.2.iter().filter(|m| m.1 > 0.0).count();
                    t.1 = t.1 + added - (t.2.len() - added);
                }
                (0..n_zones)
                    .map(|zone| {
                        let mut n = num[zone];
                        let mut d = den[zone];
                        for (nest, remaining, deltas) in &touched {
                            let k = zone * n_nests + nest;
                            let c = if *remaining == 0 {
                                0.0
                            } else {
                                sums[k]
                                    + deltas
                                        .iter()
                                        .map(|&(s, sign)| sign * layer.cand[s * n_zones + zone])
                                        .sum::<f64>()
                            };
                            let (tn, td) = nest_terms(c, layer.fixed[k], layer.inv_mu[*nest]);
                            n += tn - num_terms[k];
                            d += td - den_terms[k];
                        }
                        demand[zone] * n / d
                    })
                    .sum()
            }
            _ => unreachable!("cache state always matches the table's model"),
        }
    }
}
