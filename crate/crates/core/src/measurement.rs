//! Monte Carlo Bell test on the entangled cavity pair.
//!
//! Each shot measures the dichotomic observable in both cavities, drawing the
//! joint `±1` outcome from the Born-rule probabilities. Each cavity's result
//! is then independently lost with probability `1 − α`, regardless of the
//! outcome and setting. Correlations are estimated from coincidences only
//! (fair sampling).
//!
//! Random numbers come from ChaCha8 keyed by the master seed, with one stream
//! per setting pair. Results therefore do not depend on the order in which the
//! setting pairs are simulated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chsh::{
    chsh_combination, eigenvectors, subspace_leak, ChshAngles, DichotomicSetting, LEAK_TOL,
    TSIRELSON_BOUND,
};
use crate::entangled::{entangled_gbs, PairParams, TwoCavityState};
use crate::error::{Error, Result};

pub const RNG_ALGORITHM: &str =
    "ChaCha8 (rand_chacha), seeded with seed_from_u64(seed); stream = setting-pair index";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Plus,
    Minus,
    Undetected,
}

impl Outcome {
    pub fn value(self) -> Option<i8> {
        match self {
            Outcome::Plus => Some(1),
            Outcome::Minus => Some(-1),
            Outcome::Undetected => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub outcome1: Outcome,
    pub outcome2: Outcome,
    /// Index into [`ChshAngles::pairs`].
    pub setting_pair: usize,
}

/// Born-rule probabilities of the four joint outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JointProbabilities {
    pub pp: f64,
    pub pm: f64,
    pub mp: f64,
    pub mm: f64,
}

impl JointProbabilities {
    pub fn total(&self) -> f64 {
        self.pp + self.pm + self.mp + self.mm
    }

    /// `Σ ab P(a,b)`.
    pub fn correlation(&self) -> f64 {
        self.pp + self.mm - self.pm - self.mp
    }

    pub fn marginal_first_plus(&self) -> f64 {
        self.pp + self.pm
    }

    pub fn marginal_second_plus(&self) -> f64 {
        self.pp + self.mp
    }

    fn as_array(&self) -> [f64; 4] {
        [self.pp, self.pm, self.mp, self.mm]
    }
}

/// `P(a,b) = |⟨ã₁ b̃₂|Ψ⟩|²` using the eigenvectors of each cavity's observable.
pub fn joint_outcome_probabilities(
    state: &TwoCavityState,
    s1: &DichotomicSetting,
    s2: &DichotomicSetting,
) -> Result<JointProbabilities> {
    let params = state.params();
    let (b1, b2) = (params.basis(1), params.basis(2));
    let leak = subspace_leak(state, &b1, &b2)?;
    if leak > LEAK_TOL {
        return Err(Error::SubspaceLeak(leak));
    }
    let dim = state.cavity_dim();
    let (u1, d1) = eigenvectors(s1, &b1, dim)?;
    let (u2, d2) = eigenvectors(s2, &b2, dim)?;
    let psi = state.state();
    let prob = |a: &crate::fock::StateVector, b: &crate::fock::StateVector| -> Result<f64> {
        Ok(a.tensor(b).inner(psi)?.norm_sqr())
    };
    Ok(JointProbabilities {
        pp: prob(&u1, &u2)?,
        pm: prob(&u1, &d2)?,
        mp: prob(&d1, &u2)?,
        mm: prob(&d1, &d2)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub shots_per_setting: u64,
    /// Per-cavity detection efficiency.
    pub alpha: f64,
    pub seed: u64,
    pub state: PairParams,
    pub angles: ChshAngles,
    pub fz: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shots_per_setting == 0 {
            return Err(Error::param("shots", "must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::param(
                "alpha",
                format!("{} not in (0, 1]", self.alpha),
            ));
        }
        self.state.validate()?;
        DichotomicSetting::new(self.fz, 0.0)?;
        Ok(())
    }

    fn settings(&self, pair: (f64, f64)) -> Result<(DichotomicSetting, DichotomicSetting)> {
        Ok((
            DichotomicSetting::new(self.fz, pair.0)?,
            DichotomicSetting::new(self.fz, pair.1)?,
        ))
    }
}

/// Per-setting shot generator.
pub struct ShotSampler {
    rng: ChaCha8Rng,
    cumulative: [f64; 3],
    alpha: f64,
    setting_pair: usize,
}

impl ShotSampler {
    pub fn new(probs: &JointProbabilities, alpha: f64, seed: u64, setting_pair: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(setting_pair as u64);
        let p = probs.as_array();
        Self {
            rng,
            cumulative: [p[0], p[0] + p[1], p[0] + p[1] + p[2]],
            alpha,
            setting_pair,
        }
    }
}

impl Iterator for ShotSampler {
    type Item = MeasurementRecord;

    fn next(&mut self) -> Option<MeasurementRecord> {
        use Outcome::*;
        let u: f64 = self.rng.random();
        let (a, b) = if u < self.cumulative[0] {
            (Plus, Plus)
        } else if u < self.cumulative[1] {
            (Plus, Minus)
        } else if u < self.cumulative[2] {
            (Minus, Plus)
        } else {
            (Minus, Minus)
        };
        // detection draws are consumed even at α = 1 so streams stay aligned
        let seen1 = self.rng.random::<f64>() < self.alpha;
        let seen2 = self.rng.random::<f64>() < self.alpha;
        Some(MeasurementRecord {
            outcome1: if seen1 { a } else { Undetected },
            outcome2: if seen2 { b } else { Undetected },
            setting_pair: self.setting_pair,
        })
    }
}

/// Tally of one setting pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SettingCounts {
    pub pp: u64,
    pub pm: u64,
    pub mp: u64,
    pub mm: u64,
    pub only_first: u64,
    pub only_second: u64,
    pub neither: u64,
}

impl SettingCounts {
    pub fn record(&mut self, r: &MeasurementRecord) {
        use Outcome::*;
        match (r.outcome1, r.outcome2) {
            (Plus, Plus) => self.pp += 1,
            (Plus, Minus) => self.pm += 1,
            (Minus, Plus) => self.mp += 1,
            (Minus, Minus) => self.mm += 1,
            (Undetected, Undetected) => self.neither += 1,
            (_, Undetected) => self.only_first += 1,
            (Undetected, _) => self.only_second += 1,
        }
    }

    pub fn coincidences(&self) -> u64 {
        self.pp + self.pm + self.mp + self.mm
    }

    pub fn shots(&self) -> u64 {
        self.coincidences() + self.only_first + self.only_second + self.neither
    }

    /// Fair-sampling correlation estimate and its binomial standard error.
    pub fn estimate(&self) -> Option<(f64, f64)> {
        let n = self.coincidences();
        if n == 0 {
            return None;
        }
        let nf = n as f64;
        let e = (self.pp + self.mm) as f64 / nf - (self.pm + self.mp) as f64 / nf;
        let se = ((1.0 - e * e).max(0.0) / nf).sqrt();
        Some((e, se))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SettingEstimate {
    pub index: usize,
    pub theta1: f64,
    pub theta2: f64,
    pub counts: SettingCounts,
    pub coincidences: u64,
    pub correlation: f64,
    pub std_error: f64,
    pub exact_correlation: f64,
    pub probabilities: JointProbabilities,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BellReport {
    pub rng: &'static str,
    pub config: SimConfig,
    pub settings: Vec<SettingEstimate>,
    pub sb_estimate: f64,
    pub sb_std_error: f64,
    /// `S_B` from the exact outcome probabilities.
    pub sb_exact: f64,
    pub coincidence_fraction: f64,
}

/// Samples every setting pair and forms the fair-sampling CHSH estimate.
pub fn run_bell_experiment(config: &SimConfig) -> Result<BellReport> {
    config.validate()?;
    let state = entangled_gbs(config.state)?;
    let mut settings = Vec::with_capacity(4);
    for (index, pair) in config.angles.pairs().into_iter().enumerate() {
        let (s1, s2) = config.settings(pair)?;
        let probs = joint_outcome_probabilities(&state, &s1, &s2)?;
        let mut counts = SettingCounts::default();
        ShotSampler::new(&probs, config.alpha, config.seed, index)
            .take(config.shots_per_setting as usize)
            .for_each(|r| counts.record(&r));
        let (correlation, std_error) = counts.estimate().ok_or(Error::NoCoincidences(index))?;
        settings.push(SettingEstimate {
            index,
            theta1: pair.0,
            theta2: pair.1,
            counts,
            coincidences: counts.coincidences(),
            correlation,
            std_error,
            exact_correlation: probs.correlation(),
            probabilities: probs,
        });
    }
    let corr: [f64; 4] = std::array::from_fn(|i| settings[i].correlation);
    let exact: [f64; 4] = std::array::from_fn(|i| settings[i].exact_correlation);
    let sb_std_error = settings
        .iter()
        .map(|s| s.std_error.powi(2))
        .sum::<f64>()
        .sqrt();
    let total_coinc: u64 = settings.iter().map(|s| s.coincidences).sum();
    Ok(BellReport {
        rng: RNG_ALGORITHM,
        config: *config,
        sb_estimate: chsh_combination(corr),
        sb_std_error,
        sb_exact: chsh_combination(exact),
        coincidence_fraction: total_coinc as f64 / (4 * config.shots_per_setting) as f64,
        settings,
    })
}

/// Minimum per-side detection efficiency `4/(S_B + 2)` for a CHSH value
/// `S_B` to close the detection loophole without fair sampling.
pub fn detection_loophole_threshold(sb: f64) -> Result<f64> {
    if !sb.is_finite() || sb <= 2.0 {
        return Err(Error::NoViolation(sb));
    }
    if sb > TSIRELSON_BOUND + 1e-12 {
        return Err(Error::param("sb", format!("{sb} exceeds 2√2")));
    }
    Ok(4.0 / (sb + 2.0))
}
