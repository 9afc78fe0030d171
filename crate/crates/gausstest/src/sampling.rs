//! Measurement simulation: Fock-basis sampling, heterodyne (Husimi)
//! phase-space sampling and Bernoulli rounds for the test circuits.
//!
//! Heterodyne outcomes are reported in quadrature coordinates
//! r = √2(Re α, Im α), so the outcome covariance of a state with moment
//! matrix V is (V+I)/2.

use crate::fock::{FockIndex, MixedFockState, PureFockState};
use crate::linalg::{c, hermitian_eigen, CMat, CVec, RMat, RVec};
use crate::rotations::{acceptance_probability, TestId};
use crate::symplectic::GaussianState;
use crate::{Error, Result};
use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;

/// Deterministic rng factory: the (seed, stream) pair fully determines the
/// sample sequence and distinct streams never overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut r = ChaCha12Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream);
        r
    }
}

/// One standard normal variate (polar method; keeps the dependency set small).
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen_range(-1.0..1.0);
        let v: f64 = rng.gen_range(-1.0..1.0);
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

/// Heterodyne outcome, length-2n quadrature coordinates √2(Re α, Im α).
#[derive(Debug, Clone)]
pub struct HeterodyneSample {
    pub outcome: RVec,
}

/// Sample a Fock index from the number-basis distribution of a state.
pub fn fock_sample<R: Rng>(state: &MixedFockState, rng: &mut R) -> FockIndex {
    let probs = state.diagonal_probs();
    let total: f64 = probs.iter().sum();
    let mut u = rng.gen_range(0.0..total);
    let mut idx = 0;
    for (i, &p) in probs.iter().enumerate() {
        if u < p {
            idx = i;
            break;
        }
        u -= p;
        idx = i;
    }
    FockIndex::from_flat(idx, state.n, state.d)
}

/// Draw many Fock samples reusing one cumulative table.
pub fn fock_sample_many<R: Rng>(state: &MixedFockState, count: usize, rng: &mut R) -> Vec<FockIndex> {
    let probs = state.diagonal_probs();
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in &probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    (0..count)
        .map(|_| {
            let u = rng.gen_range(0.0..total);
            let idx = match cdf.binary_search_by(|x| x.partial_cmp(&u).unwrap()) {
                Ok(i) => i + 1,
                Err(i) => i,
            }
            .min(probs.len() - 1);
            FockIndex::from_flat(idx, state.n, state.d)
        })
        .collect()
}

/// Husimi rejection sampler for a single-mode density matrix.
///
/// Proposal: complex Gaussian of per-mode variance s² (in |α|²), envelope
/// from the absolute-coefficient radial bound of the eigendecomposition,
/// maximized by a 1-D scan. The proposal variance is doubled until the
/// envelope closes.
struct SingleModeHusimi {
    d: usize,
    /// (weight, amplitude coefficients) of the eigendecomposition
    eig: Vec<(f64, CVec)>,
    s2: f64,
    envelope: f64,
}

impl SingleModeHusimi {
    fn new(rho: &CMat, d: usize) -> Result<Self> {
        let (vals, vecs) = hermitian_eigen(rho);
        let eig: Vec<(f64, CVec)> = (0..d)
            .filter(|&i| vals[i] > 1e-14)
            .map(|i| (vals[i], vecs.column(i).into_owned()))
            .collect();
        let inv_sqrt_fact: Vec<f64> = (0..d)
            .scan(1.0f64, |f, k| {
                if k > 0 {
                    *f *= k as f64;
                }
                Some(1.0 / f.sqrt())
            })
            .collect();
        let mut s2 = 2.0;
        for _ in 0..12 {
            // radial bound m(t) = e^{−t(1−1/s²)} Σ λ (Σ|c_k| t^{k/2}/√k!)²
            let bound = |t: f64| -> f64 {
                let sq = t.sqrt();
                let mut total = 0.0;
                for (lam, v) in &eig {
                    let mut h = 0.0;
                    let mut pw = 1.0;
                    for k in 0..d {
                        h += v[k].norm() * pw * inv_sqrt_fact[k];
                        pw *= sq;
                    }
                    total += lam * h * h;
                }
                (-t * (1.0 - 1.0 / s2)).exp() * total
            };
            let t_max = (16 * d) as f64;
            let mut best = 0.0;
            let mut best_t = 0.0;
            let steps = 4000;
            for i in 0..=steps {
                let t = t_max * i as f64 / steps as f64;
                let b = bound(t);
                if b > best {
                    best = b;
                    best_t = t;
                }
            }
            if best_t < 0.95 * t_max {
                return Ok(SingleModeHusimi {
                    d,
                    eig,
                    s2,
                    envelope: s2 * best * 1.05,
                });
            }
            s2 *= 2.0;
        }
        Err(Error::Numerical("Husimi rejection envelope failed to close".into()))
    }

    /// ⟨α|ρ|α⟩ (no 1/π factor).
    fn husimi_weight(&self, alpha: Complex<f64>) -> f64 {
        let t = alpha.norm_sqr();
        let ac = alpha.conj();
        let mut total = 0.0;
        for (lam, v) in &self.eig {
            // ⟨α|ψ⟩ = e^{−t/2} Σ_k c_k ᾱ^k/√k!
            let mut acc = c(0.0, 0.0);
            let mut pw = c(1.0, 0.0);
            let mut fact = 1.0f64;
            for k in 0..self.d {
                if k > 0 {
                    fact *= k as f64;
                }
                acc += v[k] * pw / c(fact.sqrt(), 0.0);
                pw *= ac;
            }
            total += lam * acc.norm_sqr();
        }
        (-t).exp() * total
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Result<Complex<f64>> {
        let sd = (self.s2 / 2.0).sqrt();
        for _ in 0..100000 {
            let alpha = c(sd * standard_normal(rng), sd * standard_normal(rng));
            let t = alpha.norm_sqr();
            let ratio = self.s2 * (t / self.s2).exp() * self.husimi_weight(alpha) / self.envelope;
            if ratio > 1.0 + 1e-9 {
                return Err(Error::Numerical(format!(
                    "Husimi envelope violated: ratio {ratio:.3}"
                )));
            }
            if rng.gen_range(0.0..1.0) < ratio {
                return Ok(alpha);
            }
        }
        Err(Error::Numerical("Husimi rejection sampling starved".into()))
    }
}

/// Heterodyne sampler over a truncated Fock state (n ≤ 2). Entangled
/// two-mode states are sampled by the exact chain rule: mode 1 from the
/// reduced Husimi, mode 2 from the conditional single-mode state.
pub struct HeterodyneSampler {
    n: usize,
    d: usize,
    mode1: SingleModeHusimi,
    /// full two-mode density matrix when n = 2
    joint: Option<CMat>,
}

impl HeterodyneSampler {
    pub fn new(state: &MixedFockState) -> Result<Self> {
        if state.leakage > crate::LEAKAGE_BOUND {
            return Err(Error::LeakageBudget {
                achieved: state.leakage,
                budget: crate::LEAKAGE_BOUND,
            });
        }
        match state.n {
            1 => Ok(HeterodyneSampler {
                n: 1,
                d: state.d,
                mode1: SingleModeHusimi::new(&state.matrix, state.d)?,
                joint: None,
            }),
            2 => {
                let red = crate::fock::partial_trace(state, &[0])?;
                Ok(HeterodyneSampler {
                    n: 2,
                    d: state.d,
                    mode1: SingleModeHusimi::new(&red.matrix, state.d)?,
                    joint: Some(state.matrix.clone()),
                })
            }
            _ => Err(Error::InvalidParameter(
                "heterodyne sampling supports n ≤ 2".into(),
            )),
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<HeterodyneSample> {
        let a1 = self.mode1.sample(rng)?;
        if self.n == 1 {
            let outcome = RVec::from_vec(vec![
                2f64.sqrt() * a1.re,
                2f64.sqrt() * a1.im,
            ]);
            return Ok(HeterodyneSample { outcome });
        }
        // conditional single-mode state: σ_{jk} ∝ Σ_{ab} v̄_a ρ_{(a,j),(b,k)} v_b
        // with v_a = ⟨α₁|a⟩
        let d = self.d;
        let rho = self.joint.as_ref().unwrap();
        let t = a1.norm_sqr();
        let ac = a1.conj();
        let mut v = CVec::zeros(d);
        let mut pw = c(1.0, 0.0);
        let mut fact = 1.0f64;
        for k in 0..d {
            if k > 0 {
                fact *= k as f64;
            }
            v[k] = pw / c(fact.sqrt(), 0.0) * c((-t / 2.0).exp(), 0.0);
            pw *= ac;
        }
        let mut sigma = CMat::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let w = v[a].conj() * v[b];
                if w.norm() < 1e-300 {
                    continue;
                }
                for j in 0..d {
                    for k in 0..d {
                        sigma[(j, k)] += w * rho[(a * d + j, b * d + k)];
                    }
                }
            }
        }
        let tr = sigma.trace().re;
        if tr <= 0.0 {
            return Err(Error::Numerical("vanishing conditional state".into()));
        }
        sigma /= c(tr, 0.0);
        let sigma = (&sigma + sigma.adjoint()) * c(0.5, 0.0);
        let cond = SingleModeHusimi::new(&sigma, d)?;
        let a2 = cond.sample(rng)?;
        let outcome = RVec::from_vec(vec![
            2f64.sqrt() * a1.re,
            2f64.sqrt() * a2.re,
            2f64.sqrt() * a1.im,
            2f64.sqrt() * a2.im,
        ]);
        Ok(HeterodyneSample { outcome })
    }
}

/// Exact heterodyne sampling for a Gaussian state: outcomes are normal
/// with mean m and covariance (V+I)/2.
pub struct GaussianHeterodyneSampler {
    mean: RVec,
    chol: RMat,
}

impl GaussianHeterodyneSampler {
    pub fn new(g: &GaussianState) -> Result<Self> {
        let cov = (g.cov_mat() + RMat::identity(2 * g.n, 2 * g.n)) * 0.5;
        let chol = nalgebra::Cholesky::new(cov)
            .ok_or_else(|| Error::Numerical("outcome covariance not PD".into()))?;
        Ok(GaussianHeterodyneSampler {
            mean: g.mean_vec(),
            chol: chol.l(),
        })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> HeterodyneSample {
        let k = self.mean.len();
        let z = RVec::from_iterator(k, (0..k).map(|_| standard_normal(rng)));
        HeterodyneSample {
            outcome: &self.mean + &self.chol * z,
        }
    }
}

/// Convenience single-shot heterodyne sample.
pub fn heterodyne_sample<R: Rng>(state: &MixedFockState, rng: &mut R) -> Result<HeterodyneSample> {
    HeterodyneSampler::new(state)?.sample(rng)
}

/// Bernoulli sampler for test rounds, drawn from the exact Born
/// acceptance probability (the tests are accept/reject POVMs, so the
/// Bernoulli marginal is exact).
pub struct TestRoundSampler {
    pub test: TestId,
    pub p_accept: f64,
}

impl TestRoundSampler {
    pub fn new(test: TestId, state: &PureFockState) -> Result<Self> {
        Ok(TestRoundSampler {
            test,
            p_accept: acceptance_probability(test, state)?,
        })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> bool {
        rng.gen_range(0.0..1.0) < self.p_accept
    }
}

/// One accept/reject round of a symmetry test.
pub fn test_round_sample<R: Rng>(test: TestId, state: &PureFockState, rng: &mut R) -> Result<bool> {
    Ok(TestRoundSampler::new(test, state)?.sample(rng))
}
