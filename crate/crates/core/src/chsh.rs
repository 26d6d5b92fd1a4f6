//! Dichotomic cavity observables and the CHSH functional.
//!
//! In each cavity the pair `|+⟩ = |N,p,φ⟩`, `|−⟩ = |N,1−p,π+φ⟩` spans a
//! two-dimensional subspace. On it the observable
//!
//! `F̂ = F_z (|+⟩⟨+| − |−⟩⟨−|) + √(1−F_z²) (e^{iϑ}|+⟩⟨−| + e^{−iϑ}|−⟩⟨+|)`
//!
//! has eigenvalues ±1; on the orthogonal complement it acts as zero. The
//! entangled state lives entirely inside the product of the two subspaces, so
//! the extension never shows up in any correlation.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::binomial::{ngbs, GbsParams};
use crate::entangled::{entangled_gbs, eta_for_degree, EtaBranch, PairParams, TwoCavityState};
use crate::error::{Error, Result};
use crate::fock::{LinearOperator, StateVector};
use crate::grid::Linspace;

/// Local-realist bound on `S_B`.
pub const CLASSICAL_BOUND: f64 = 2.0;

/// Quantum maximum of `S_B`, `2√2`.
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;

/// Allowed leakage of a state outside the measured two-level subspaces.
pub const LEAK_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomicSetting {
    pub fz: f64,
    pub theta: f64,
}

impl DichotomicSetting {
    pub fn new(fz: f64, theta: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&fz) {
            return Err(Error::FzOutOfRange(fz));
        }
        if !theta.is_finite() {
            return Err(Error::param("theta", "must be finite"));
        }
        Ok(Self { fz, theta })
    }

    /// `|F₁₂| = √(1 − F_z²)`
    pub fn transverse(&self) -> f64 {
        (1.0 - self.fz * self.fz).max(0.0).sqrt()
    }

    fn check(&self) -> Result<()> {
        Self::new(self.fz, self.theta).map(|_| ())
    }
}

/// Analyzer angles `(ϑ₁, ϑ₂, ϑ₁′, ϑ₂′)`; index 1 is cavity 1, index 2 is cavity 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta1p: f64,
    pub theta2p: f64,
}

impl ChshAngles {
    pub fn new(theta1: f64, theta2: f64, theta1p: f64, theta2p: f64) -> Self {
        Self {
            theta1,
            theta2,
            theta1p,
            theta2p,
        }
    }

    /// `(0, π/4, π/2, 3π/4)`, which reaches `2√2` at maximal entanglement.
    pub fn canonical() -> Self {
        Self::new(0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4)
    }

    /// The four `(cavity 1, cavity 2)` angle pairs in CHSH order:
    /// `(ϑ₁,ϑ₂)`, `(ϑ₁,ϑ₂′)`, `(ϑ₁′,ϑ₂)`, `(ϑ₁′,ϑ₂′)`.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.theta1, self.theta2),
            (self.theta1, self.theta2p),
            (self.theta1p, self.theta2),
            (self.theta1p, self.theta2p),
        ]
    }

    pub fn shifted(&self, first: f64, second: f64) -> Self {
        Self::new(
            self.theta1 + first,
            self.theta2 + second,
            self.theta1p + first,
            self.theta2p + second,
        )
    }
}

/// `|E₁₁ − E₁₂| + |E₂₁ + E₂₂|` from correlations in [`ChshAngles::pairs`] order.
pub fn chsh_combination(corr: [f64; 4]) -> f64 {
    (corr[0] - corr[1]).abs() + (corr[2] + corr[3]).abs()
}

fn basis_pair(basis: &GbsParams, dim: usize) -> Result<(StateVector, StateVector)> {
    Ok((ngbs(basis, dim)?, ngbs(&basis.orthogonal_partner(), dim)?))
}

/// The dichotomic observable on a `dim`-level cavity whose two-level
/// subspace is built from `basis`.
pub fn dichotomic_operator(
    setting: &DichotomicSetting,
    basis: &GbsParams,
    dim: usize,
) -> Result<LinearOperator> {
    setting.check()?;
    let (plus, minus) = basis_pair(basis, dim)?;
    let fz = Complex64::new(setting.fz, 0.0);
    let up = Complex64::from_polar(setting.transverse(), setting.theta);
    let pp = LinearOperator::outer(&plus, &plus)?.scale(fz);
    let mm = LinearOperator::outer(&minus, &minus)?.scale(fz);
    let pm = LinearOperator::outer(&plus, &minus)?.scale(up);
    let mp = LinearOperator::outer(&minus, &plus)?.scale(up.conj());
    let op = (&(&pp - &mm)? + &(&pm + &mp)?)?;
    op.into_hermitian()
}

/// Eigenvectors `(|+̃⟩, |−̃⟩)` with eigenvalues `+1` and `−1`:
///
/// `|+̃⟩ = [√(1+F_z)|+⟩ + √(1−F_z) e^{−iϑ}|−⟩]/√2`,
/// `|−̃⟩ = [−√(1−F_z) e^{iϑ}|+⟩ + √(1+F_z)|−⟩]/√2`.
pub fn eigenvectors(
    setting: &DichotomicSetting,
    basis: &GbsParams,
    dim: usize,
) -> Result<(StateVector, StateVector)> {
    setting.check()?;
    let (plus, minus) = basis_pair(basis, dim)?;
    let a = ((1.0 + setting.fz) / 2.0).sqrt();
    let b = ((1.0 - setting.fz) / 2.0).max(0.0).sqrt();
    let up = plus
        .scale(Complex64::new(a, 0.0))
        .add(&minus.scale(Complex64::from_polar(b, -setting.theta)))?;
    let down = plus
        .scale(Complex64::from_polar(-b, setting.theta))
        .add(&minus.scale(Complex64::new(a, 0.0)))?;
    Ok((up, down))
}

/// Closed-form correlation `⟨F̂⁽¹⁾(ϑ₁)F̂⁽²⁾(ϑ₂)⟩ = 2η(1−F_z²)/(1+η²) cos(ϑ₁−ϑ₂) − F_z²`
/// with the same `F_z` in both cavities.
pub fn correlation_analytic(theta1: f64, theta2: f64, fz: f64, eta: f64) -> f64 {
    2.0 * eta * (1.0 - fz * fz) / (1.0 + eta * eta) * (theta1 - theta2).cos() - fz * fz
}

/// Weight of `state` outside `span(ℬ₁) ⊗ span(ℬ₂)`.
pub fn subspace_leak(
    state: &TwoCavityState,
    basis1: &GbsParams,
    basis2: &GbsParams,
) -> Result<f64> {
    let dim = state.cavity_dim();
    let projector = |basis: &GbsParams| -> Result<LinearOperator> {
        let (plus, minus) = basis_pair(basis, dim)?;
        &LinearOperator::outer(&plus, &plus)? + &LinearOperator::outer(&minus, &minus)?
    };
    let p = projector(basis1)?.tensor(&projector(basis2)?);
    let inside = state.state().expectation(&p)?.re;
    Ok((1.0 - inside).max(0.0))
}

/// Dense-algebra `⟨Ψ|F̂⁽¹⁾ ⊗ F̂⁽²⁾|Ψ⟩` with explicit per-cavity bases.
///
/// Fails if the state has weight outside the measured subspaces.
pub fn correlation_oracle_in(
    state: &TwoCavityState,
    basis1: &GbsParams,
    s1: &DichotomicSetting,
    basis2: &GbsParams,
    s2: &DichotomicSetting,
) -> Result<Complex64> {
    let leak = subspace_leak(state, basis1, basis2)?;
    if leak > LEAK_TOL {
        return Err(Error::SubspaceLeak(leak));
    }
    let dim = state.cavity_dim();
    let f1 = dichotomic_operator(s1, basis1, dim)?;
    let f2 = dichotomic_operator(s2, basis2, dim)?;
    state.state().expectation(&f1.tensor(&f2))
}

/// Dense-algebra correlation using the state's own cavity bases.
pub fn correlation_oracle(
    state: &TwoCavityState,
    s1: &DichotomicSetting,
    s2: &DichotomicSetting,
) -> Result<f64> {
    let p = state.params();
    Ok(correlation_oracle_in(state, &p.basis(1), s1, &p.basis(2), s2)?.re)
}

/// `S_B` from the closed-form correlations.
pub fn chsh_sb(angles: &ChshAngles, fz: f64, eta: f64) -> f64 {
    chsh_combination(
        angles
            .pairs()
            .map(|(a, b)| correlation_analytic(a, b, fz, eta)),
    )
}

/// `S_B` from dense-algebra correlations on a realized state.
pub fn chsh_sb_oracle(state: &TwoCavityState, angles: &ChshAngles, fz: f64) -> Result<f64> {
    let mut corr = [0.0; 4];
    for (slot, (a, b)) in corr.iter_mut().zip(angles.pairs()) {
        *slot = correlation_oracle(
            state,
            &DichotomicSetting::new(fz, a)?,
            &DichotomicSetting::new(fz, b)?,
        )?;
    }
    Ok(chsh_combination(corr))
}

/// `S_B` at `F_z = 0` in terms of the degree of entanglement:
/// `G [|cos(ϑ₁−ϑ₂) − cos(ϑ₁−ϑ₂′)| + |cos(ϑ₁′−ϑ₂) + cos(ϑ₁′−ϑ₂′)|]`.
pub fn chsh_sb_reduced(angles: &ChshAngles, degree: f64) -> f64 {
    degree * chsh_combination(angles.pairs().map(|(a, b)| (a - b).cos()))
}

/// Degree of entanglement at which `chsh_sb_reduced` crosses the classical
/// bound, located by bisection. `None` if the angles never violate.
pub fn violation_threshold(angles: &ChshAngles) -> Option<f64> {
    if chsh_sb_reduced(angles, 1.0) <= CLASSICAL_BOUND {
        return None;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if chsh_sb_reduced(angles, mid) > CLASSICAL_BOUND {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Non-negative `η` for a degree of entanglement; convenience for scans.
pub fn eta_from_degree(degree: f64) -> Result<f64> {
    eta_for_degree(degree, EtaBranch::AtMostOne)
}

/// Numerical check that `F_z = 0` maximizes `S_B`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationarityReport {
    pub sb_at_zero: f64,
    /// Central difference `∂S_B/∂F_z` at zero.
    pub derivative_at_zero: f64,
    pub argmax_fz: f64,
    pub max_sb: f64,
    /// Grid points where `S_B` beats its value at `F_z = 0`.
    pub counterexamples: Vec<(f64, f64)>,
}

impl StationarityReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty() && self.derivative_at_zero.abs() < 1e-8
    }
}

/// Scans `S_B(F_z)` on `points` evenly spaced values in `[−1, 1]`.
///
/// `S_B` depends on `F_z` only through `F_z²` and is piecewise linear in it,
/// so `F_z = 0` is the global maximum exactly when `S_B(0) ≥ 2`; below that
/// the scan reports the endpoints `|F_z| = 1` (where `S_B = 2`) as
/// counterexamples.
pub fn verify_fz_stationarity(
    angles: &ChshAngles,
    eta: f64,
    points: usize,
) -> Result<StationarityReport> {
    let grid = Linspace::new(-1.0, 1.0, points)?;
    let sb = |fz: f64| chsh_sb(angles, fz, eta);
    let s0 = sb(0.0);
    let h = 1e-5;
    let derivative = (sb(h) - sb(-h)) / (2.0 * h);
    let mut best: (f64, f64) = (0.0, s0);
    let mut counterexamples = Vec::new();
    for fz in grid.values() {
        let s = sb(fz);
        if s > s0 + 1e-12 {
            counterexamples.push((fz, s));
        }
        if s > best.1 + 1e-12 || (s >= best.1 - 1e-12 && fz.abs() < best.0.abs()) {
            best = (fz, s);
        }
    }
    Ok(StationarityReport {
        sb_at_zero: s0,
        derivative_at_zero: derivative,
        argmax_fz: best.0,
        max_sb: best.1,
        counterexamples,
    })
}

/// One point of the `S_B(G, ϑ₂′)` surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub degree: f64,
    pub theta2p: f64,
    pub sb: f64,
}

/// `S_B` over `degree × theta2p` with `ϑ₁, ϑ₂, ϑ₁′` held fixed; rows ordered
/// with `degree` slowest.
pub fn scan_sb_surface(
    theta1: f64,
    theta2: f64,
    theta1p: f64,
    degrees: &Linspace,
    theta2ps: &Linspace,
) -> Vec<SurfacePoint> {
    let mut rows = Vec::with_capacity(degrees.count * theta2ps.count);
    for degree in degrees.values() {
        for theta2p in theta2ps.values() {
            let angles = ChshAngles::new(theta1, theta2, theta1p, theta2p);
            rows.push(SurfacePoint {
                degree,
                theta2p,
                sb: chsh_sb_reduced(&angles, degree),
            });
        }
    }
    rows
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceSummary {
    pub max: SurfacePoint,
    /// Smallest grid `G` whose best `S_B` over `ϑ₂′` exceeds 2.
    pub first_violating_degree: Option<f64>,
    /// Linear interpolation of the crossing between that grid row and the one below.
    pub threshold_degree: Option<f64>,
}

/// Locates the surface maximum and the degree at which the row-wise maximum
/// crosses the classical bound. `rows` must come from [`scan_sb_surface`].
pub fn summarize_surface(rows: &[SurfacePoint]) -> Option<SurfaceSummary> {
    let max = *rows.iter().fold(
        rows.first()?,
        |best, r| if r.sb > best.sb { r } else { best },
    );
    // row-wise maxima, in grid order
    let mut per_degree: Vec<(f64, f64)> = Vec::new();
    for r in rows {
        match per_degree.last_mut() {
            Some((g, best)) if *g == r.degree => *best = best.max(r.sb),
            _ => per_degree.push((r.degree, r.sb)),
        }
    }
    let mut first = None;
    let mut threshold = None;
    for (i, &(g, s)) in per_degree.iter().enumerate() {
        if s > CLASSICAL_BOUND {
            first = Some(g);
            threshold = Some(if i == 0 {
                g
            } else {
                let (g0, s0) = per_degree[i - 1];
                g0 + (CLASSICAL_BOUND - s0) * (g - g0) / (s - s0)
            });
            break;
        }
    }
    Some(SurfaceSummary {
        max,
        first_violating_degree: first,
        threshold_degree: threshold,
    })
}

/// Grid resolution of [`optimize_angles`] giving an angle step of π/200.
pub const DEFAULT_ANGLE_STEPS: usize = 400;

/// Best CHSH angles at fixed degree of entanglement.
///
/// `ϑ₁` is pinned at zero (only angle differences matter); the other three
/// angles are scanned on `steps` points over `[0, 2π)`, followed by one finer
/// pass of the same size around the best grid point.
pub fn optimize_angles(degree: f64, steps: usize) -> (ChshAngles, f64) {
    let coarse = TAU / steps.max(1) as f64;
    let search = |center: (f64, f64, f64), span: f64, n: usize| {
        let mut best = (center, f64::NEG_INFINITY);
        let step = if n > 1 { 2.0 * span / n as f64 } else { 0.0 };
        for i in 0..n {
            let t2 = center.0 - span + i as f64 * step;
            for j in 0..n {
                let t1p = center.1 - span + j as f64 * step;
                for k in 0..n {
                    let t2p = center.2 - span + k as f64 * step;
                    let s = chsh_sb_reduced(&ChshAngles::new(0.0, t2, t1p, t2p), degree);
                    if s > best.1 {
                        best = ((t2, t1p, t2p), s);
                    }
                }
            }
        }
        best
    };
    let (c, _) = search((TAU / 2.0, TAU / 2.0, TAU / 2.0), TAU / 2.0, steps.max(1));
    let refine = 20;
    let (c, s) = search(c, coarse, refine);
    let wrap = |x: f64| x.rem_euclid(TAU);
    (ChshAngles::new(0.0, wrap(c.0), wrap(c.1), wrap(c.2)), s)
}

/// Worst disagreement between [`correlation_analytic`] and the oracle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub points: usize,
    pub max_diff: f64,
    /// Parameters of the worst point: `(η, F_z, ϑ₁, ϑ₂)`.
    pub worst: (f64, f64, f64, f64),
}

/// Compares closed-form and dense-algebra correlations over
/// `etas × fzs × thetas × thetas` for states with the given `p` and `φ`.
/// Each cavity is measured in its own binomial basis.
pub fn reconcile_correlations(
    base: &PairParams,
    etas: &[f64],
    fzs: &[f64],
    thetas: &[f64],
) -> Result<CorrelationReport> {
    let mut report = CorrelationReport {
        points: 0,
        max_diff: 0.0,
        worst: (0.0, 0.0, 0.0, 0.0),
    };
    for &eta in etas {
        let state = entangled_gbs(PairParams { eta, ..*base })?;
        for &fz in fzs {
            for &t1 in thetas {
                let s1 = DichotomicSetting::new(fz, t1)?;
                for &t2 in thetas {
                    let s2 = DichotomicSetting::new(fz, t2)?;
                    let diff = (correlation_oracle(&state, &s1, &s2)?
                        - correlation_analytic(t1, t2, fz, eta))
                    .abs();
                    report.points += 1;
                    if diff > report.max_diff {
                        report.max_diff = diff;
                        report.worst = (eta, fz, t1, t2);
                    }
                }
            }
        }
    }
    Ok(report)
}
