//! Entangled pairs of orthogonal binomial states shared by two cavities:
//!
//! `𝒩 [ |N,p₁,φ₁⟩₁ |N,1-p₂,π+φ₂⟩₂ + η |N,1-p₁,π+φ₁⟩₁ |N,p₂,φ₂⟩₂ ]`,
//! with `𝒩 = 1/√(1+η²)` and `N ∈ {1, 2}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::binomial::{check_probability, ngbs, GbsParams};
use crate::error::{Error, Result};
use crate::fock::StateVector;

/// Relative-amplitude branch of the inverse of [`degree_of_entanglement`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EtaBranch {
    /// `0 ≤ η ≤ 1`
    AtMostOne,
    /// `η ≥ 1`
    AtLeastOne,
}

/// Parameters of an entangled two-cavity binomial state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairParams {
    pub order: usize,
    pub p1: f64,
    pub p2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub eta: f64,
}

impl PairParams {
    pub fn new(order: usize, p1: f64, p2: f64, phi1: f64, phi2: f64, eta: f64) -> Result<Self> {
        let params = Self {
            order,
            p1,
            p2,
            phi1,
            phi2,
            eta,
        };
        params.validate()?;
        Ok(params)
    }

    /// Same `p` and `φ` in both cavities.
    pub fn symmetric(order: usize, p: f64, phi: f64, eta: f64) -> Result<Self> {
        Self::new(order, p, p, phi, phi, eta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.order) {
            return Err(Error::param(
                "order",
                format!("{} not in {{1, 2}}", self.order),
            ));
        }
        check_probability(self.p1)?;
        check_probability(self.p2)?;
        if !self.eta.is_finite() {
            return Err(Error::param("eta", "must be finite"));
        }
        if !self.phi1.is_finite() || !self.phi2.is_finite() {
            return Err(Error::param("phi", "must be finite"));
        }
        Ok(())
    }

    /// The `|+⟩` state of cavity `j` (1 or 2); its partner is `|-⟩`.
    pub fn basis(&self, cavity: usize) -> GbsParams {
        let (p, phi) = if cavity == 1 {
            (self.p1, self.phi1)
        } else {
            (self.p2, self.phi2)
        };
        GbsParams {
            n: self.order,
            p,
            phi,
        }
    }

    /// Normalization constant squared, `1/(1+η²)`.
    pub fn norm_sq(&self) -> f64 {
        1.0 / (1.0 + self.eta * self.eta)
    }
}

/// A realized entangled state together with the parameters it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoCavityState {
    params: PairParams,
    state: StateVector,
}

impl TwoCavityState {
    pub fn params(&self) -> &PairParams {
        &self.params
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn cavity_dim(&self) -> usize {
        self.params.order + 1
    }

    /// The two unnormalized product terms (the second already scaled by η).
    pub fn terms(&self) -> Result<(StateVector, StateVector)> {
        product_terms(&self.params)
    }

    /// Purity `Tr ρ₁²` of the first cavity's reduced state.
    pub fn reduced_purity(&self) -> Result<f64> {
        let rho = self.state.reduced_first()?;
        Ok(rho.matmul(&rho)?.trace().re)
    }

    /// True when the reduced state is pure to within `1e-10`.
    pub fn is_product(&self) -> Result<bool> {
        Ok((self.reduced_purity()? - 1.0).abs() < 1e-10)
    }
}

fn product_terms(params: &PairParams) -> Result<(StateVector, StateVector)> {
    let dim = params.order + 1;
    let plus1 = params.basis(1);
    let plus2 = params.basis(2);
    let first = ngbs(&plus1, dim)?.tensor(&ngbs(&plus2.orthogonal_partner(), dim)?);
    let second = ngbs(&plus1.orthogonal_partner(), dim)?
        .tensor(&ngbs(&plus2, dim)?)
        .scale(Complex64::new(params.eta, 0.0));
    Ok((first, second))
}

/// Builds the entangled state of order 1 or 2.
pub fn entangled_gbs(params: PairParams) -> Result<TwoCavityState> {
    params.validate()?;
    let (first, second) = product_terms(&params)?;
    let norm = params.norm_sq().sqrt();
    let state = first.add(&second)?.scale(Complex64::new(norm, 0.0));
    Ok(TwoCavityState { params, state })
}

/// `G = 2|η| / (1 + η²)`, in `[0, 1]` and symmetric under `η → 1/η`.
pub fn degree_of_entanglement(eta: f64) -> f64 {
    2.0 * eta.abs() / (1.0 + eta * eta)
}

/// Non-negative `η` with `degree_of_entanglement(η) = g` on the chosen branch.
pub fn eta_for_degree(g: f64, branch: EtaBranch) -> Result<f64> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::param("degree", format!("{g} not in [0, 1]")));
    }
    let root = (1.0 - g * g).sqrt();
    match branch {
        // g / (1 + √(1-g²)) is the cancellation-free form of (1 - √(1-g²)) / g
        EtaBranch::AtMostOne => Ok(g / (1.0 + root)),
        EtaBranch::AtLeastOne if g == 0.0 => Err(Error::param(
            "degree",
            "G = 0 has no finite η on the η ≥ 1 branch",
        )),
        EtaBranch::AtLeastOne => Ok((1.0 + root) / g),
    }
}
