//! Estimation and decision layer: heterodyne moment estimation with bias
//! correction, the covariance tester for mixed Gaussian sources, round
//! amplification and sample-complexity planning for the rotation tests.

use crate::linalg::{symmetric_fn, RMat, RVec};
use crate::sampling::{GaussianHeterodyneSampler, HeterodyneSampler};
use crate::symplectic::{symplectic_eigenvalues, GaussianState};
use crate::fock::MixedFockState;
use crate::{Error, Result};
use rand::Rng;

/// Universal robustness constant c = 3·2⁹·3098 from the set-distance
/// lower bound; also controls feasibility of the covariance tester.
pub const ROBUSTNESS_CONSTANT: f64 = 3.0 * 512.0 * 3098.0;

/// Default amplification constant in round-count formulas.
pub const DEFAULT_KAPPA: f64 = 8.0;

/// A source of heterodyne outcomes: either exact Gaussian sampling or
/// Husimi rejection sampling of a truncated Fock state.
pub enum MomentSource {
    Gaussian(GaussianHeterodyneSampler),
    Fock(HeterodyneSampler),
}

impl MomentSource {
    pub fn from_gaussian(g: &GaussianState) -> Result<Self> {
        Ok(MomentSource::Gaussian(GaussianHeterodyneSampler::new(g)?))
    }

    pub fn from_fock(state: &MixedFockState) -> Result<Self> {
        Ok(MomentSource::Fock(HeterodyneSampler::new(state)?))
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<RVec> {
        match self {
            MomentSource::Gaussian(s) => Ok(s.sample(rng).outcome),
            MomentSource::Fock(s) => Ok(s.sample(rng)?.outcome),
        }
    }
}

/// First and second moments estimated from heterodyne data. `cov` is the
/// bias-corrected estimate V̂ = 2·Σ̂ − I of the state covariance, where Σ̂
/// is the (unbiased) sample covariance of the outcomes.
#[derive(Debug, Clone)]
pub struct CovarianceEstimate {
    pub mean: RVec,
    pub cov: RMat,
    pub shots: usize,
}

/// Estimate mean and covariance of a state from heterodyne outcomes.
pub fn estimate_moments<R: Rng>(
    source: &MomentSource,
    shots: usize,
    rng: &mut R,
) -> Result<CovarianceEstimate> {
    if shots < 2 {
        return Err(Error::InvalidParameter("need at least 2 shots".into()));
    }
    let first = source.sample(rng)?;
    let k = first.len();
    let mut sum = RVec::zeros(k);
    let mut sum2 = RMat::zeros(k, k);
    sum += &first;
    sum2 += &first * first.transpose();
    for _ in 1..shots {
        let s = source.sample(rng)?;
        sum += &s;
        sum2 += &s * s.transpose();
    }
    let mean = &sum / shots as f64;
    let outcome_cov = (sum2 - (&mean * mean.transpose()) * shots as f64) / (shots - 1) as f64;
    let cov = outcome_cov * 2.0 - RMat::identity(k, k);
    Ok(CovarianceEstimate { mean, cov, shots })
}

/// Heterodyne shots sufficient for ‖V̂−V‖∞ ≤ ε with failure probability δ.
pub fn covariance_sample_size(n: usize, e: f64, eps: f64, delta: f64) -> Result<usize> {
    if eps <= 0.0 || !(0.0..1.0).contains(&delta) || delta == 0.0 || e <= 0.0 {
        return Err(Error::InvalidParameter(
            "need eps > 0, delta in (0,1), E > 0".into(),
        ));
    }
    let nf = n as f64;
    let entries = 2.0 * (2.0 * nf * nf + 3.0 * nf);
    let per = 68.0 * (entries / delta).ln() * 200.0 * (8.0 * nf * nf * e * e + 3.0 * nf)
        / (eps * eps);
    Ok((n + 3) * per.ceil() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    AClose,
    BFar,
}

/// Result of a decision procedure, with the statistic it thresholded.
#[derive(Debug, Clone)]
pub struct TestDecision {
    pub hypothesis: Hypothesis,
    pub rounds: usize,
    pub statistic: f64,
    pub threshold: f64,
}

/// Decide the covariance test from an estimate: accept A (close to
/// Gaussian-testable vacuum-like spectrum) iff the largest estimated
/// symplectic eigenvalue stays below ν_thr = 1 + 2ε_B²/n − Δ/√n, where
/// Δ = 4nE(4nE+ε_V)ε_V accounts for estimation error.
pub fn covariance_test_decision(
    est: &CovarianceEstimate,
    eps_a: f64,
    eps_b: f64,
    e: f64,
    n: usize,
    eps_v: f64,
) -> Result<TestDecision> {
    let nf = n as f64;
    let delta_corr = 4.0 * nf * e * (4.0 * nf * e + eps_v) * eps_v;
    let margin = 2.0 * eps_b * eps_b / nf - delta_corr / nf.sqrt();
    let rhs = (2.0 * delta_corr + 2.0 * ROBUSTNESS_CONSTANT * (nf * e).powi(6) * eps_a).sqrt();
    if margin <= rhs {
        return Err(Error::Infeasible(format!(
            "covariance tester infeasible: 2eps_B^2/n - Delta/sqrt(n) = {margin:.3e} \
             must exceed sqrt(2*Delta + 2c(nE)^6 eps_A) = {rhs:.3e}"
        )));
    }
    let nu_thr = 1.0 + margin;
    // clamp the spectrum so the symplectic eigenvalues of the noisy
    // estimate are well defined
    let clamped = symmetric_fn(&est.cov, |v| v.max(1e-6));
    let nus = symplectic_eigenvalues(&clamped)?;
    let nu_max = nus[0];
    let hypothesis = if nu_max >= nu_thr {
        Hypothesis::BFar
    } else {
        Hypothesis::AClose
    };
    Ok(TestDecision {
        hypothesis,
        rounds: est.shots,
        statistic: nu_max,
        threshold: nu_thr,
    })
}

/// End-to-end property test for pure Gaussianity of a mixed source:
/// derives the moment accuracy ε_V from (ε_A, ε_B), estimates moments by
/// heterodyne and thresholds the symplectic spectrum.
///
/// The analytic shot count from `covariance_sample_size` is astronomically
/// conservative (≫10¹² even for n = 1); `shots_override` substitutes an
/// empirical sample size while keeping the decision rule itself intact.
pub fn pure_testing_pipeline<R: Rng>(
    source: &MomentSource,
    eps_a: f64,
    eps_b: f64,
    e: f64,
    n: usize,
    delta: f64,
    shots_override: Option<usize>,
    rng: &mut R,
) -> Result<TestDecision> {
    let nf = n as f64;
    let c = ROBUSTNESS_CONSTANT;
    let eta = eps_b.powi(4) - c / 2.0 * nf.powi(8) * e.powi(6) * eps_a;
    if eta <= 0.0 {
        return Err(Error::Infeasible(format!(
            "pipeline infeasible: eps_B^4 - (c/2) n^8 E^6 eps_A = {eta:.3e} <= 0"
        )));
    }
    let mu = (2.0 * eps_b * eps_b / nf).powi(2) - 2.0 * c * (nf * e).powi(6) * eps_a;
    let eps_v = mu / (24.0 * nf * e * (4.0 * nf * e + 1.0));
    let shots = match shots_override {
        Some(s) => s,
        None => covariance_sample_size(n, e, eps_v, delta)?,
    };
    let est = estimate_moments(source, shots, rng)?;
    covariance_test_decision(&est, eps_a, eps_b, e, n, eps_v)
}

/// Majority-vote amplification of a Bernoulli test round. Two-sided mode
/// runs k = ⌈κ(p_A−p_B)⁻² ln(1/δ)⌉ rounds and thresholds the acceptance
/// fraction at (p_A+p_B)/2; with `one_sided` (valid when p_A = 1, perfect
/// completeness) it runs k = ⌈κ(p_A−p_B)⁻¹ ln(1/δ)⌉ rounds and accepts
/// only on an all-accept record.
pub fn amplified_decision<R: Rng, F: FnMut(&mut R) -> Result<bool>>(
    mut round: F,
    p_a: f64,
    p_b: f64,
    delta: f64,
    kappa: f64,
    one_sided: bool,
    rng: &mut R,
) -> Result<TestDecision> {
    let gap = p_a - p_b;
    if gap <= 0.0 || !(0.0..1.0).contains(&delta) || delta == 0.0 {
        return Err(Error::InvalidParameter(
            "need p_A > p_B and delta in (0,1)".into(),
        ));
    }
    let k = if one_sided {
        (kappa / gap * (1.0 / delta).ln()).ceil() as usize
    } else {
        (kappa / (gap * gap) * (1.0 / delta).ln()).ceil() as usize
    };
    let k = k.max(1);
    let mut accepts = 0usize;
    for _ in 0..k {
        if round(rng)? {
            accepts += 1;
        }
    }
    let frac = accepts as f64 / k as f64;
    let threshold = if one_sided { 1.0 } else { (p_a + p_b) / 2.0 };
    let hypothesis = if frac >= threshold {
        Hypothesis::AClose
    } else {
        Hypothesis::BFar
    };
    Ok(TestDecision {
        hypothesis,
        rounds: k,
        statistic: frac,
        threshold,
    })
}

/// Planner inputs shared by the rotation-test analyses.
#[derive(Debug, Clone, Copy)]
pub struct TestPlanConfig {
    /// universal constant in the soundness gap (order-one placeholder)
    pub c_universal: f64,
    /// base accuracy scale of the analysis
    pub eps0: f64,
    /// amplification constant
    pub kappa: f64,
    /// failure probability
    pub delta: f64,
    /// energy bound E on Tr[ρÊ]/n
    pub e: f64,
    pub n: usize,
}

impl Default for TestPlanConfig {
    fn default() -> Self {
        TestPlanConfig {
            c_universal: 1.0,
            eps0: 0.1,
            kappa: DEFAULT_KAPPA,
            delta: 0.01,
            e: 1.0,
            n: 1,
        }
    }
}

/// Sample-complexity plan for a rotation test at soundness distance ε_B
/// and tolerated closeness ε_A.
#[derive(Debug, Clone)]
pub struct RotationTestPlan {
    /// acceptance-probability gap between the two hypotheses
    pub epsilon_gap: f64,
    pub rounds: usize,
    pub copies_per_round: usize,
}

/// Plan a rotation test: the acceptance gap is
/// C·min(ε_B², 1/(n⁴E⁴)) − ε_A and rounds follow the two-sided
/// amplification count.
pub fn rotation_test_plan(
    cfg: &TestPlanConfig,
    eps_a: f64,
    eps_b: f64,
    copies_per_round: usize,
) -> Result<RotationTestPlan> {
    let nf = cfg.n as f64;
    let gap = cfg.c_universal * (eps_b * eps_b).min(1.0 / (nf * cfg.e).powi(4)) - eps_a;
    if gap <= 0.0 {
        return Err(Error::Infeasible(format!(
            "rotation test plan infeasible: gap = {gap:.3e} <= 0"
        )));
    }
    let rounds = (cfg.kappa / (gap * gap) * (1.0 / cfg.delta).ln()).ceil() as usize;
    Ok(RotationTestPlan {
        epsilon_gap: gap,
        rounds: rounds.max(1),
        copies_per_round,
    })
}
