//! Choice models, utility tables and the capture objective.
//!
//! Every model reduces to precomputed per-zone exponentials. The logit family
//! (MNL and its Monte-Carlo mixed version) stores `V_ij = exp(v_ij)` per
//! candidate and the competitor total `U_i`; the nested model stores
//! `a_j exp(μ_l v_ij)` per location together with the competitors' fixed part
//! of every nest sum.

mod cache;
pub(crate) mod eval;
mod table;

pub use cache::EvalCache;
pub use eval::{capture, capture_gradient, choice_probabilities, relaxed_capture};
pub use table::{build_utilities, UtilityTable};

use crate::error::{Error, Result};
use crate::instance::{Instance, NestSpec};

/// Default half-width of the relative distance perturbation for mixed logit.
pub const DEFAULT_MIXED_HALFWIDTH: f64 = 0.2;
/// Default nest dissimilarity parameter.
pub const DEFAULT_NEST_MU: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceModelSpec {
    /// Sensitivity of customers to distance: `v_ij = -beta * c_ij`.
    pub beta: f64,
    /// Competitor distance multiplier: `v_ij' = -beta * alpha * c_ij'`.
    pub alpha: f64,
    pub kind: ModelKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Mnl,
    /// Mixed logit approximated by `samples` draws of perturbed distances
    /// `c ~ Uniform[(1 - halfwidth) c, (1 + halfwidth) c]`.
    Mixed {
        samples: usize,
        halfwidth: f64,
        seed: u64,
    },
    Nested(NestParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NestParams {
    pub nests: NestSpec,
    /// Dissimilarity parameter per nest.
    pub mu: Vec<f64>,
    /// Inclusion coefficient `a_kl` of each location in its own nest.
    pub coefficients: Vec<f64>,
}

impl NestParams {
    pub fn uniform(nests: NestSpec, mu: f64, coefficient: f64) -> Self {
        NestParams {
            mu: vec![mu; nests.n_nests],
            coefficients: vec![coefficient; nests.assignment.len()],
            nests,
        }
    }
}

impl ChoiceModelSpec {
    pub fn mnl(beta: f64, alpha: f64) -> Self {
        ChoiceModelSpec {
            beta,
            alpha,
            kind: ModelKind::Mnl,
        }
    }

    pub fn mixed(beta: f64, alpha: f64, samples: usize, halfwidth: f64, seed: u64) -> Self {
        ChoiceModelSpec {
            beta,
            alpha,
            kind: ModelKind::Mixed {
                samples,
                halfwidth,
                seed,
            },
        }
    }

    pub fn nested(beta: f64, alpha: f64, params: NestParams) -> Self {
        ChoiceModelSpec {
            beta,
            alpha,
            kind: ModelKind::Nested(params),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::Mnl => "mnl",
            ModelKind::Mixed { .. } => "mmnl",
            ModelKind::Nested(_) => "nested",
        }
    }

    /// Checks parameter ranges and, for nested models, that the nests cover
    /// exactly the instance's locations.
    pub fn validate_for(&self, instance: &Instance) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        match &self.kind {
            ModelKind::Mnl => {}
            ModelKind::Mixed {
                samples, halfwidth, ..
            } => {
                if *samples == 0 {
                    return bad("mixed logit needs at least one sample".into());
                }
                if !(0.0..1.0).contains(halfwidth) {
                    return bad(format!("perturbation half-width must be in [0, 1), got {halfwidth}"));
                }
            }
            ModelKind::Nested(p) => {
                let n_loc = instance.n_locations();
                if p.nests.assignment.len() != n_loc {
                    return bad(format!(
                        "nest assignment covers {} locations, instance has {n_loc}",
                        p.nests.assignment.len()
                    ));
                }
                if let Some(l) = p.nests.assignment.iter().position(|&n| n >= p.nests.n_nests) {
                    return bad(format!("location {l} assigned to a nonexistent nest"));
                }
                if p.mu.len() != p.nests.n_nests {
                    return bad(format!("{} mu values for {} nests", p.mu.len(), p.nests.n_nests));
                }
                if let Some(mu) = p.mu.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
                    return bad(format!("nest mu must be positive, got {mu}"));
                }
                if p.coefficients.len() != n_loc {
                    return bad(format!(
                        "{} nest coefficients for {n_loc} locations",
                        p.coefficients.len()
                    ));
                }
                if let Some(a) = p.coefficients.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
                    return bad(format!("nest coefficients must be positive, got {a}"));
                }
            }
        }
        Ok(())
    }
}
