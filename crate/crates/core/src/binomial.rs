//! Generalized binomial states `|N, p, φ⟩` of a single cavity mode.
//!
//! The photon-number distribution is binomial with `N` trials and success
//! probability `p`; photon number `n` carries the phase `e^{inφ}`. At `p = 0`
//! and `p = 1` the state collapses onto `|0⟩` and `|N⟩`; for large `N` with
//! `Np` held fixed it approaches a coherent state.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::StateVector;

/// Largest photon cutoff supported by the coherent-limit diagnostics.
pub const MAX_PHOTONS: usize = 50;

/// Default Fock dimension for coherent-limit comparisons.
pub const COHERENT_CUTOFF: usize = MAX_PHOTONS + 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbsParams {
    pub n: usize,
    pub p: f64,
    pub phi: f64,
}

impl GbsParams {
    pub fn new(n: usize, p: f64, phi: f64) -> Result<Self> {
        check_probability(p)?;
        if !phi.is_finite() {
            return Err(Error::param("phi", "must be finite"));
        }
        Ok(Self { n, p, phi })
    }

    /// The partner state `(N, 1-p, φ+π)`, which is orthogonal to `self`.
    ///
    /// Every odd multiple of π gives the same ray; the phase is reported in
    /// `[0, 2π)`.
    pub fn orthogonal_partner(&self) -> Self {
        Self {
            n: self.n,
            p: 1.0 - self.p,
            phi: (self.phi + PI).rem_euclid(TAU),
        }
    }

    /// Mean photon number, `N p`.
    pub fn mean_photons(&self) -> f64 {
        self.n as f64 * self.p
    }
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Probability(p));
    }
    Ok(())
}

/// `C(n, k)` accumulated as a running product, exact for the cutoffs used here.
pub fn binomial_coefficient(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}

/// Amplitudes `[C(N,n) pⁿ (1-p)^{N-n}]^{1/2} e^{inφ}` for `n = 0..=N`.
pub fn gbs_amplitudes(params: &GbsParams) -> Vec<Complex64> {
    let q = 1.0 - params.p;
    let big_n = params.n;
    (0..=big_n)
        .map(|n| {
            let weight = binomial_coefficient(big_n, n)
                * params.p.powi(n as i32)
                * q.powi((big_n - n) as i32);
            Complex64::from_polar(weight.sqrt(), n as f64 * params.phi)
        })
        .collect()
}

/// Realizes `|N, p, φ⟩` in a Fock space of dimension `dim ≥ N + 1`.
pub fn ngbs(params: &GbsParams, dim: usize) -> Result<StateVector> {
    check_probability(params.p)?;
    if dim < params.n + 1 {
        return Err(Error::CutoffTooSmall {
            required: params.n + 1,
            dim,
        });
    }
    let mut amps = gbs_amplitudes(params);
    amps.resize(dim, Complex64::new(0.0, 0.0));
    StateVector::new(amps)
}

/// Coherent-state amplitudes `e^{-|α|²/2} αⁿ / √n!` truncated to `dim` levels,
/// together with the probability mass that falls beyond the cutoff.
pub fn coherent_amplitudes(alpha_sq: f64, phi: f64, dim: usize) -> (Vec<Complex64>, f64) {
    let modulus = alpha_sq.sqrt();
    let mut amps = Vec::with_capacity(dim);
    let mut mag = (-alpha_sq / 2.0).exp();
    for n in 0..dim {
        if n > 0 {
            mag *= modulus / (n as f64).sqrt();
        }
        amps.push(Complex64::from_polar(mag, n as f64 * phi));
    }
    // Poisson tail, summed forward from the cutoff until the terms stop mattering
    let mut tail = 0.0;
    let mut prob = mag * mag;
    for n in dim.. {
        prob *= alpha_sq / n as f64;
        tail += prob;
        if n as f64 > alpha_sq && (prob < 1e-300 || prob <= tail * 1e-17) {
            break;
        }
    }
    (amps, tail)
}

/// Fidelity `|⟨α|N, |α|²/N, φ⟩|²` between a coherent state and the binomial
/// state with the same mean photon number.
pub fn coherent_overlap(alpha_sq: f64, phi: f64, n: usize, dim: usize) -> Result<f64> {
    if !alpha_sq.is_finite() || alpha_sq < 0.0 {
        return Err(Error::param("alpha_sq", "must be a non-negative real"));
    }
    if alpha_sq == 0.0 {
        // both states are the vacuum
        return Ok(1.0);
    }
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if alpha_sq > n as f64 {
        return Err(Error::param(
            "alpha_sq",
            "must not exceed N (p would exceed 1)",
        ));
    }
    if dim < n + 1 {
        return Err(Error::CutoffTooSmall {
            required: n + 1,
            dim,
        });
    }
    let (coh, tail) = coherent_amplitudes(alpha_sq, phi, dim);
    if tail > 1e-8 {
        return Err(Error::CoherentTail(tail));
    }
    let gbs = ngbs(&GbsParams::new(n, alpha_sq / n as f64, phi)?, dim)?;
    let coherent = StateVector::new(coh)?;
    Ok(coherent.inner(&gbs)?.norm_sqr())
}
