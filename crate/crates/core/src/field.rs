//! Cavity electric field `Ê = 2ε (a + a†)` and its first and second moments
//! in the entangled binomial states.
//!
//! All results are expressed in units of `ε = √(πħω/V)` (fields) and `ε²`
//! (covariances). Each closed form is paired with a dense-algebra recomputation
//! on the realized two-cavity state; the dense path is authoritative.
//!
//! For the two-photon states the closed forms come in two flavours: the
//! `literal_*` functions keep the uncorrected expressions, and the
//! unprefixed ones are the corrected forms that agree with the dense
//! computation. [`reconcile`] measures both against the oracle.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entangled::{entangled_gbs, PairParams, TwoCavityState};
use crate::error::{Error, Result};
use crate::fock::{annihilation_op, LinearOperator};

/// Field unit `ε = √(πħω/V)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldUnits {
    pub epsilon: f64,
}

impl FieldUnits {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::param("epsilon", "must be positive and finite"));
        }
        Ok(Self { epsilon })
    }
}

impl Default for FieldUnits {
    fn default() -> Self {
        Self { epsilon: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cavity {
    One,
    Two,
}

impl Cavity {
    pub fn from_index(j: usize) -> Result<Self> {
        match j {
            1 => Ok(Cavity::One),
            2 => Ok(Cavity::Two),
            _ => Err(Error::param("cavity", format!("{j} not in {{1, 2}}"))),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Cavity::One => 1,
            Cavity::Two => 2,
        }
    }
}

/// Scalar building blocks of the closed-form moments.
pub mod helpers {
    use super::SQRT_2;

    /// `f(p₁,p₂) = (1-2p₁)(1-2p₂)`
    pub fn imbalance_product(p1: f64, p2: f64) -> f64 {
        (1.0 - 2.0 * p1) * (1.0 - 2.0 * p2)
    }

    /// `h(p₁,p₂) = 2√(p₁p₂(1-p₁)(1-p₂))`
    pub fn overlap_weight(p1: f64, p2: f64) -> f64 {
        2.0 * (p1 * p2 * (1.0 - p1) * (1.0 - p2)).max(0.0).sqrt()
    }

    /// `f̃(p) = 4(1 - p + √2 p)`
    pub fn two_photon_weight(p: f64) -> f64 {
        4.0 * (1.0 - p + SQRT_2 * p)
    }

    /// `F(p; η) = f̃(p) - η² f̃(1-p)`
    pub fn mixed_weight(p: f64, eta: f64) -> f64 {
        two_photon_weight(p) - eta * eta * two_photon_weight(1.0 - p)
    }

    /// `F̃(p₁,p₂) = f̃(p₁) f̃(1-p₂)`
    pub fn cross_weight(p1: f64, p2: f64) -> f64 {
        two_photon_weight(p1) * two_photon_weight(1.0 - p2)
    }

    /// `F̄ = f(p₁,p₂) cos φ₁ cos φ₂ + sin φ₁ sin φ₂`
    pub fn phase_correlation(p1: f64, p2: f64, phi1: f64, phi2: f64) -> f64 {
        imbalance_product(p1, p2) * phi1.cos() * phi2.cos() + phi1.sin() * phi2.sin()
    }
}

use helpers::*;

/// `2ε(a + a†)` on a `dim`-level cavity.
pub fn field_operator(dim: usize, units: FieldUnits) -> Result<LinearOperator> {
    if dim < 2 {
        return Err(Error::param(
            "dim",
            "field operator needs at least two levels",
        ));
    }
    let a = annihilation_op(dim)?;
    let x = (&a + &a.adjoint())?;
    x.scale(Complex64::new(2.0 * units.epsilon, 0.0))
        .into_hermitian()
}

/// Mean field of a single two-photon binomial state `|2,p,φ⟩`:
/// `ε √(2p(1-p)) f̃(p) cos φ`.
pub fn single_two_photon_mean_field(p: f64, phi: f64, units: FieldUnits) -> f64 {
    units.epsilon * (2.0 * p * (1.0 - p)).sqrt() * two_photon_weight(p) * phi.cos()
}

fn cavity_params(params: &PairParams, cavity: Cavity) -> (f64, f64) {
    match cavity {
        Cavity::One => (params.p1, params.phi1),
        Cavity::Two => (params.p2, params.phi2),
    }
}

/// `⟨Ê_j⟩` for the entangled one-photon states.
pub fn mean_field_1gbs(params: &PairParams, cavity: Cavity, units: FieldUnits) -> f64 {
    let (p, phi) = cavity_params(params, cavity);
    let sign = if cavity == Cavity::One { 1.0 } else { -1.0 };
    let eta2 = params.eta * params.eta;
    4.0 * sign * units.epsilon * (p * (1.0 - p)).sqrt() * (1.0 - eta2) / (1.0 + eta2) * phi.cos()
}

/// Field covariance `⟨Ê₁Ê₂⟩ - ⟨Ê₁⟩⟨Ê₂⟩` for the entangled one-photon states.
pub fn covariance_1gbs(params: &PairParams, units: FieldUnits) -> f64 {
    let PairParams {
        p1,
        p2,
        phi1,
        phi2,
        eta,
        ..
    } = *params;
    let eta2 = eta * eta;
    let cc = phi1.cos() * phi2.cos();
    let imbalance = (1.0 - eta2) / (1.0 + eta2);
    let coherence = eta / (1.0 + eta2) * (imbalance_product(p1, p2) * cc + phi1.sin() * phi2.sin());
    let population = (1.0 - imbalance * imbalance) * overlap_weight(p1, p2) * cc;
    8.0 * units.epsilon * units.epsilon * (coherence - population)
}

fn mean_field_2gbs_with(
    params: &PairParams,
    cavity: Cavity,
    units: FieldUnits,
    first_denominator: f64,
) -> f64 {
    let (p, phi) = cavity_params(params, cavity);
    let j = cavity.index() as f64;
    let eta2 = params.eta * params.eta;
    let lead = two_photon_weight(j - 1.0 + (3.0 - 2.0 * j) * p);
    let trail = two_photon_weight(2.0 - j - (3.0 - 2.0 * j) * p);
    let sign = if cavity == Cavity::One { -1.0 } else { 1.0 };
    -units.epsilon
        * (2.0 * p * (1.0 - p)).sqrt()
        * (lead / first_denominator - eta2 * trail / (1.0 + eta2))
        * sign
        * phi.cos()
}

/// `⟨Ê_j⟩` for the entangled two-photon states.
///
/// Both terms share the normalization `1/(1+η²)`.
pub fn mean_field_2gbs(params: &PairParams, cavity: Cavity, units: FieldUnits) -> f64 {
    let eta2 = params.eta * params.eta;
    mean_field_2gbs_with(params, cavity, units, 1.0 + eta2)
}

/// Uncorrected two-photon mean field, whose first term is divided by
/// `1 + η⁴` instead of `1 + η²`. Kept for the reconciliation report.
pub fn literal_mean_field_2gbs(params: &PairParams, cavity: Cavity, units: FieldUnits) -> f64 {
    let eta2 = params.eta * params.eta;
    mean_field_2gbs_with(params, cavity, units, 1.0 + eta2 * eta2)
}

fn covariance_2gbs_with(params: &PairParams, units: FieldUnits, coherence_sign: f64) -> f64 {
    let PairParams {
        p1,
        p2,
        phi1,
        phi2,
        eta,
        ..
    } = *params;
    let eta2 = eta * eta;
    let populations = mixed_weight(p1, eta) * mixed_weight(1.0 - p2, eta) / (1.0 + eta2).powi(2)
        - (cross_weight(p1, p2) + eta2 * cross_weight(p2, p1)) / (1.0 + eta2);
    let coherence =
        8.0 * eta * (3.0 - 2.0 * SQRT_2) / (1.0 + eta2) * phase_correlation(p1, p2, phi1, phi2);
    units.epsilon
        * units.epsilon
        * overlap_weight(p1, p2)
        * (populations * phi1.cos() * phi2.cos() + coherence_sign * coherence)
}

/// Field covariance for the entangled two-photon states.
///
/// The interference term enters with a positive sign and a signed `η`, like
/// its one-photon counterpart.
pub fn covariance_2gbs(params: &PairParams, units: FieldUnits) -> f64 {
    covariance_2gbs_with(params, units, 1.0)
}

/// Uncorrected two-photon covariance, with the interference term
/// subtracted and weighted by `|η|`. Kept for the reconciliation report.
pub fn literal_covariance_2gbs(params: &PairParams, units: FieldUnits) -> f64 {
    let abs_params = PairParams {
        eta: params.eta.abs(),
        ..*params
    };
    // η enters the population terms only through η², so |η| is harmless there
    covariance_2gbs_with(&abs_params, units, -1.0)
}

/// Closed-form mean field, dispatched on the state order.
pub fn mean_field_analytic(params: &PairParams, cavity: Cavity, units: FieldUnits) -> Result<f64> {
    params.validate()?;
    Ok(match params.order {
        1 => mean_field_1gbs(params, cavity, units),
        _ => mean_field_2gbs(params, cavity, units),
    })
}

/// Closed-form covariance, dispatched on the state order.
pub fn covariance_analytic(params: &PairParams, units: FieldUnits) -> Result<f64> {
    params.validate()?;
    Ok(match params.order {
        1 => covariance_1gbs(params, units),
        _ => covariance_2gbs(params, units),
    })
}

/// Raw dense-algebra moments `⟨Ê₁⟩`, `⟨Ê₂⟩`, `⟨Ê₁Ê₂⟩` including imaginary
/// residues.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldMoments {
    pub mean1: Complex64,
    pub mean2: Complex64,
    pub joint: Complex64,
}

impl FieldMoments {
    pub fn mean(&self, cavity: Cavity) -> f64 {
        match cavity {
            Cavity::One => self.mean1.re,
            Cavity::Two => self.mean2.re,
        }
    }

    pub fn covariance(&self) -> f64 {
        self.joint.re - self.mean1.re * self.mean2.re
    }

    pub fn max_imaginary(&self) -> f64 {
        self.mean1
            .im
            .abs()
            .max(self.mean2.im.abs())
            .max(self.joint.im.abs())
    }
}

pub fn field_moments(state: &TwoCavityState, units: FieldUnits) -> Result<FieldMoments> {
    let dim = state.cavity_dim();
    let e = field_operator(dim, units)?;
    let id = LinearOperator::identity(dim)?;
    let psi = state.state();
    Ok(FieldMoments {
        mean1: psi.expectation(&e.tensor(&id))?,
        mean2: psi.expectation(&id.tensor(&e))?,
        joint: psi.expectation(&e.tensor(&e))?,
    })
}

pub fn mean_field_oracle(state: &TwoCavityState, cavity: Cavity, units: FieldUnits) -> Result<f64> {
    Ok(field_moments(state, units)?.mean(cavity))
}

pub fn covariance_oracle(state: &TwoCavityState, units: FieldUnits) -> Result<f64> {
    Ok(field_moments(state, units)?.covariance())
}

/// Cartesian parameter grid for reconciliation sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterGrid {
    pub etas: Vec<f64>,
    pub p1s: Vec<f64>,
    pub p2s: Vec<f64>,
    pub phi1s: Vec<f64>,
    pub phi2s: Vec<f64>,
}

impl ParameterGrid {
    /// η ∈ {-2,-1,-½,0,½,1,2}, p on an 11-point grid, φ on multiples of π/4.
    pub fn standard() -> Self {
        let ps: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let phis: Vec<f64> = (0..8)
            .map(|k| k as f64 * std::f64::consts::FRAC_PI_4)
            .collect();
        Self {
            etas: vec![-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0],
            p1s: ps.clone(),
            p2s: ps,
            phi1s: phis.clone(),
            phi2s: phis,
        }
    }

    pub fn len(&self) -> usize {
        self.etas.len() * self.p1s.len() * self.p2s.len() * self.phi1s.len() * self.phi2s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in row-major order: η slowest, φ₂ fastest.
    pub fn points(&self, order: usize) -> impl Iterator<Item = PairParams> + '_ {
        self.etas.iter().flat_map(move |&eta| {
            self.p1s.iter().flat_map(move |&p1| {
                self.p2s.iter().flat_map(move |&p2| {
                    self.phi1s.iter().flat_map(move |&phi1| {
                        self.phi2s.iter().map(move |&phi2| PairParams {
                            order,
                            p1,
                            p2,
                            phi1,
                            phi2,
                            eta,
                        })
                    })
                })
            })
        })
    }
}

/// One row of an analytic-versus-oracle comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObservableRow {
    pub params: PairParams,
    pub mean1_analytic: f64,
    pub mean1_oracle: f64,
    pub mean2_analytic: f64,
    pub mean2_oracle: f64,
    pub cov_analytic: f64,
    pub cov_oracle: f64,
}

impl ObservableRow {
    pub fn max_abs_diff(&self) -> f64 {
        (self.mean1_analytic - self.mean1_oracle)
            .abs()
            .max((self.mean2_analytic - self.mean2_oracle).abs())
            .max((self.cov_analytic - self.cov_oracle).abs())
    }
}

pub fn compare_observables(params: PairParams, units: FieldUnits) -> Result<ObservableRow> {
    let state = entangled_gbs(params)?;
    let m = field_moments(&state, units)?;
    Ok(ObservableRow {
        params,
        mean1_analytic: mean_field_analytic(&params, Cavity::One, units)?,
        mean1_oracle: m.mean(Cavity::One),
        mean2_analytic: mean_field_analytic(&params, Cavity::Two, units)?,
        mean2_oracle: m.mean(Cavity::Two),
        cov_analytic: covariance_analytic(&params, units)?,
        cov_oracle: m.covariance(),
    })
}

/// Outcome of sweeping the closed forms against the oracle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconciliationReport {
    pub order: usize,
    pub points: usize,
    pub max_mean_diff: f64,
    pub max_cov_diff: f64,
    pub max_imaginary_residue: f64,
    /// Worst mismatch of the uncorrected expressions (same as above for order 1).
    pub literal_max_mean_diff: f64,
    pub literal_max_cov_diff: f64,
    /// The uncorrected `1 + η⁴` mean-field denominator had to become `1 + η²`.
    pub mean_denominator_corrected: bool,
    /// The uncorrected covariance interference term had to change sign.
    pub covariance_sign_corrected: bool,
}

impl ReconciliationReport {
    pub fn max_diff(&self) -> f64 {
        self.max_mean_diff.max(self.max_cov_diff)
    }
}

/// Sweeps `grid` comparing closed forms with dense algebra.
pub fn reconcile(
    order: usize,
    grid: &ParameterGrid,
    units: FieldUnits,
) -> Result<ReconciliationReport> {
    let mut report = ReconciliationReport {
        order,
        points: 0,
        max_mean_diff: 0.0,
        max_cov_diff: 0.0,
        max_imaginary_residue: 0.0,
        literal_max_mean_diff: 0.0,
        literal_max_cov_diff: 0.0,
        mean_denominator_corrected: false,
        covariance_sign_corrected: false,
    };
    for params in grid.points(order) {
        let state = entangled_gbs(params)?;
        let m = field_moments(&state, units)?;
        let (o1, o2, oc) = (m.mean(Cavity::One), m.mean(Cavity::Two), m.covariance());
        let (a1, a2, ac) = (
            mean_field_analytic(&params, Cavity::One, units)?,
            mean_field_analytic(&params, Cavity::Two, units)?,
            covariance_analytic(&params, units)?,
        );
        let (l1, l2, lc) = if order == 2 {
            (
                literal_mean_field_2gbs(&params, Cavity::One, units),
                literal_mean_field_2gbs(&params, Cavity::Two, units),
                literal_covariance_2gbs(&params, units),
            )
        } else {
            (a1, a2, ac)
        };
        report.points += 1;
        report.max_mean_diff = report
            .max_mean_diff
            .max((a1 - o1).abs())
            .max((a2 - o2).abs());
        report.max_cov_diff = report.max_cov_diff.max((ac - oc).abs());
        report.literal_max_mean_diff = report
            .literal_max_mean_diff
            .max((l1 - o1).abs())
            .max((l2 - o2).abs());
        report.literal_max_cov_diff = report.literal_max_cov_diff.max((lc - oc).abs());
        report.max_imaginary_residue = report.max_imaginary_residue.max(m.max_imaginary());
    }
    if order == 2 {
        report.mean_denominator_corrected = report.literal_max_mean_diff > 1e-10;
        report.covariance_sign_corrected = report.literal_max_cov_diff > 1e-10;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binomial::{ngbs, GbsParams};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    const U: FieldUnits = FieldUnits { epsilon: 1.0 };

    fn pair(order: usize, p1: f64, p2: f64, phi1: f64, phi2: f64, eta: f64) -> PairParams {
        PairParams::new(order, p1, p2, phi1, phi2, eta).unwrap()
    }

    fn oracle(params: PairParams) -> FieldMoments {
        field_moments(&entangled_gbs(params).unwrap(), U).unwrap()
    }

    #[test]
    fn helper_identities() {
        assert_eq!(imbalance_product(0.5, 0.3), 0.0);
        assert_eq!(overlap_weight(0.0, 0.4), 0.0);
        assert_eq!(overlap_weight(1.0, 0.4), 0.0);
        assert_eq!(two_photon_weight(0.0), 4.0);
        assert!((two_photon_weight(1.0) - 4.0 * SQRT_2).abs() < 1e-15);
        assert!((mixed_weight(0.5, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn field_operator_matrix() {
        let e = field_operator(2, U).unwrap();
        let want = [0.0, 2.0, 2.0, 0.0];
        for (got, w) in e.entries().iter().zip(want) {
            assert_eq!(*got, Complex64::new(w, 0.0));
        }
        assert!(e.is_hermitian());
        assert!(field_operator(1, U).is_err());
        let scaled = field_operator(3, FieldUnits::new(0.5).unwrap()).unwrap();
        assert!((scaled.get(1, 2).re - 2f64.sqrt()).abs() < 1e-15);
        assert!(FieldUnits::new(0.0).is_err());
    }

    #[test]
    fn single_state_mean_field_matches_closed_form() {
        let vac = ngbs(&GbsParams::new(2, 0.0, 0.0).unwrap(), 3).unwrap();
        let e = field_operator(3, U).unwrap();
        assert_eq!(vac.expectation(&e).unwrap().re, 0.0);

        let half = ngbs(&GbsParams::new(2, 0.5, 0.0).unwrap(), 3).unwrap();
        let got = half.expectation(&e).unwrap();
        // ε √(1/2) f̃(1/2) = ε √2 (1 + √2)
        assert!((got.re - SQRT_2 * (1.0 + SQRT_2)).abs() < 1e-12);
        assert!((single_two_photon_mean_field(0.5, 0.0, U) - got.re).abs() < 1e-12);

        for i in 0..=10 {
            for k in 0..8 {
                let (p, phi) = (i as f64 / 10.0, k as f64 * FRAC_PI_4);
                let s = ngbs(&GbsParams::new(2, p, phi).unwrap(), 3).unwrap();
                let dense = s.expectation(&e).unwrap();
                assert!(dense.im.abs() < 1e-12);
                assert!((dense.re - single_two_photon_mean_field(p, phi, U)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn one_photon_mean_field_examples() {
        let m = mean_field_1gbs(&pair(1, 0.3, 0.6, 0.2, 1.1, 1.0), Cavity::One, U);
        assert_eq!(m, 0.0);
        for p in [0.0, 1.0] {
            let params = pair(1, p, p, 0.3, 0.3, 0.4);
            assert_eq!(mean_field_1gbs(&params, Cavity::One, U), 0.0);
            assert_eq!(mean_field_1gbs(&params, Cavity::Two, U), 0.0);
        }
        let params = pair(1, 0.5, 0.5, 0.0, 0.0, 0.0);
        assert!((mean_field_1gbs(&params, Cavity::One, U) - 2.0).abs() < 1e-15);
        assert!((oracle(params).mean(Cavity::One) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn one_photon_covariance_examples() {
        for phi1 in [0.0, 0.4, 1.3] {
            for phi2 in [0.0, 0.9, 2.2] {
                let plus = covariance_1gbs(&pair(1, 0.5, 0.5, phi1, phi2, 1.0), U);
                assert!((plus + 4.0 * (phi1 + phi2).cos()).abs() < 1e-12);
                let minus = covariance_1gbs(&pair(1, 0.5, 0.5, phi1, phi2, -1.0), U);
                assert!((minus + 4.0 * (phi1 - phi2).cos()).abs() < 1e-12);
                assert_eq!(covariance_1gbs(&pair(1, 0.3, 0.8, phi1, phi2, 0.0), U), 0.0);
            }
        }
        let params = pair(1, 0.3, 0.3, 0.4, 1.1, 0.5);
        assert!((covariance_1gbs(&params, U) - oracle(params).covariance()).abs() < 1e-10);
    }

    #[test]
    fn one_photon_contrast_at_maximal_entanglement() {
        for k in 0..16 {
            let phi = k as f64 * PI / 8.0;
            let plus = covariance_1gbs(&pair(1, 0.5, 0.5, phi, phi, 1.0), U);
            assert!((plus + 4.0 * (2.0 * phi).cos()).abs() < 1e-12);
            let minus = covariance_1gbs(&pair(1, 0.5, 0.5, phi, phi, -1.0), U);
            assert!((minus + 4.0).abs() < 1e-12);
        }
        assert!(covariance_1gbs(&pair(1, 0.5, 0.5, FRAC_PI_4, FRAC_PI_4, 1.0), U).abs() < 1e-12);
    }

    #[test]
    fn two_photon_mean_field_examples() {
        for p in [0.0, 1.0] {
            for eta in [0.0, 0.5, 1.0, 2.0, -1.5] {
                let params = pair(2, p, p, 0.3, 1.2, eta);
                assert!(mean_field_2gbs(&params, Cavity::One, U).abs() < 1e-12);
                assert!(mean_field_2gbs(&params, Cavity::Two, U).abs() < 1e-12);
            }
        }
        let params = pair(2, 0.5, 0.5, 0.3, 0.7, 1.0);
        assert!(mean_field_2gbs(&params, Cavity::One, U).abs() < 1e-12);
        // maximal entanglement alone does not kill the mean field
        let params = pair(2, 0.3, 0.3, 0.0, 0.0, 1.0);
        assert!(mean_field_2gbs(&params, Cavity::One, U).abs() > 0.1);
    }

    #[test]
    fn two_photon_mean_field_frozen_oracle_value() {
        // dense-algebra value for p₁=p₂=0.3, φ=0, η=0.5
        let params = pair(2, 0.3, 0.3, 0.0, 0.0, 0.5);
        let dense = oracle(params);
        assert!((dense.mean(Cavity::One) - 1.662_754_195_278_039).abs() < 1e-12);
        assert!((dense.mean(Cavity::Two) + 2.092_259_905_918_650_6).abs() < 1e-12);
        assert!((dense.covariance() + 6.229_829_813_432_524).abs() < 1e-12);
        assert!((mean_field_2gbs(&params, Cavity::One, U) - dense.mean(Cavity::One)).abs() < 1e-10);
        assert!((mean_field_2gbs(&params, Cavity::Two, U) - dense.mean(Cavity::Two)).abs() < 1e-10);
        assert!((covariance_2gbs(&params, U) - dense.covariance()).abs() < 1e-10);
        // the uncorrected denominator misses this point
        assert!(
            (literal_mean_field_2gbs(&params, Cavity::One, U) - dense.mean(Cavity::One)).abs()
                > 1e-3
        );
    }

    #[test]
    fn two_photon_covariance_examples() {
        for p1 in [0.0, 1.0] {
            for eta in [0.0, 0.5, 1.0, 2.0] {
                let params = pair(2, p1, 0.4, 0.5, 0.2, eta);
                assert!(covariance_2gbs(&params, U).abs() < 1e-12);
                assert!(oracle(params).covariance().abs() < 1e-12);
            }
        }
        for p in [0.1, 0.5, 0.8] {
            let params = pair(2, p, 0.35, 0.5, 0.2, 0.0);
            assert!(covariance_2gbs(&params, U).abs() < 1e-12);
        }
        let at_zero = pair(2, 0.5, 0.5, 0.0, 0.0, 1.0);
        let want = -2.0 * (3.0 + 2.0 * SQRT_2);
        assert!((oracle(at_zero).covariance() - want).abs() < 1e-10);
        assert!((covariance_2gbs(&at_zero, U) - want).abs() < 1e-10);
    }

    #[test]
    fn two_photon_maximal_entanglement_phase_dependence() {
        // Dense algebra gives -2ε²(3 cos 2φ + 2√2). The uncorrected special value
        // -2ε²(3 + 2√2 cos 2φ) agrees only where cos 2φ = 1.
        for k in 0..16 {
            let phi = k as f64 * PI / 8.0;
            let params = pair(2, 0.5, 0.5, phi, phi, 1.0);
            let dense = oracle(params).covariance();
            let want = -2.0 * (3.0 * (2.0 * phi).cos() + 2.0 * SQRT_2);
            assert!((dense - want).abs() < 1e-10, "phi={phi}");
            assert!((covariance_2gbs(&params, U) - want).abs() < 1e-10);
            let uncorrected = -2.0 * (3.0 + 2.0 * SQRT_2 * (2.0 * phi).cos());
            assert!((literal_covariance_2gbs(&params, U) - uncorrected).abs() < 1e-10);
        }
        // the uncorrected expression is exact for η = -1
        for k in 0..16 {
            let phi = k as f64 * PI / 8.0;
            let params = pair(2, 0.5, 0.5, phi, phi, -1.0);
            let uncorrected = -2.0 * (3.0 + 2.0 * SQRT_2 * (2.0 * phi).cos());
            assert!((oracle(params).covariance() - uncorrected).abs() < 1e-10);
        }
        // so at η = +1 the covariance does change sign with φ
        let flat = pair(2, 0.5, 0.5, FRAC_PI_2, FRAC_PI_2, 1.0);
        assert!(oracle(flat).covariance() > 0.0);
    }

    #[test]
    fn oracle_relabeling_symmetry() {
        for (p1, p2, phi1, phi2, eta) in [(0.2, 0.7, 0.3, 1.9, 0.6), (0.9, 0.1, 2.0, -0.4, -1.3)] {
            for order in 1..=2 {
                let a = oracle(pair(order, p1, p2, phi1, phi2, eta));
                let b = oracle(pair(order, p2, p1, phi2, phi1, eta));
                assert!((a.covariance() - b.covariance()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn product_state_covariance_vanishes() {
        for order in 1..=2 {
            let m = oracle(pair(order, 0.3, 0.8, 0.4, 2.0, 0.0));
            assert!(m.covariance().abs() < 1e-12);
        }
    }

    #[test]
    fn units_scale_quadratically() {
        let params = pair(2, 0.3, 0.6, 0.4, 1.0, 0.7);
        let u = FieldUnits::new(1.7).unwrap();
        let row = compare_observables(params, u).unwrap();
        assert!((row.cov_oracle - 1.7 * 1.7 * covariance_2gbs(&params, U)).abs() < 1e-10);
        assert!(row.max_abs_diff() < 1e-10);
    }

    #[test]
    fn reconcile_small_grids() {
        let grid = ParameterGrid {
            etas: vec![-1.0, 0.5, 2.0],
            p1s: vec![0.0, 0.3, 1.0],
            p2s: vec![0.6],
            phi1s: vec![0.0, 1.0],
            phi2s: vec![0.5],
        };
        let one = reconcile(1, &grid, U).unwrap();
        assert_eq!(one.points, 18);
        assert!(one.max_diff() < 1e-10);
        assert!(!one.mean_denominator_corrected && !one.covariance_sign_corrected);
        let two = reconcile(2, &grid, U).unwrap();
        assert!(two.max_diff() < 1e-10);
        assert!(two.mean_denominator_corrected);
        assert!(two.covariance_sign_corrected);
        assert!(two.max_imaginary_residue < 1e-12);
    }

    #[test]
    fn cavity_index_round_trip() {
        assert_eq!(Cavity::from_index(2).unwrap().index(), 2);
        assert!(Cavity::from_index(3).is_err());
    }
}
