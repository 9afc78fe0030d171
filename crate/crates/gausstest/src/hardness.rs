//! Mixed-state hardness laboratory: geometric reference distributions,
//! a randomized perturbed family, the Fock-diagonal embedding and an
//! empirical collision-based distinguishing experiment over an energy
//! grid.

use crate::bounds::gaussianification_constant;
use crate::fock::{FockIndex, MixedFockState};
use crate::sampling::RngStream;
use crate::{Error, Result};
use rand::Rng;
use std::collections::HashMap;

/// A probability distribution over truncated ℕⁿ (per-coordinate cutoff),
/// flat row-major indexing as in `FockIndex`.
#[derive(Debug, Clone)]
pub struct ClassicalDist {
    pub n: usize,
    pub cutoff: usize,
    pub probs: Vec<f64>,
    /// probability mass beyond the truncation, tracked analytically
    pub tail_mass: f64,
}

impl ClassicalDist {
    pub fn tv(&self, other: &ClassicalDist) -> Result<f64> {
        if self.n != other.n || self.cutoff != other.cutoff {
            return Err(Error::DimensionMismatch("distribution shapes differ".into()));
        }
        let sum: f64 = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum();
        Ok(0.5 * (sum + (self.tail_mass - other.tail_mass).abs()))
    }

    /// collision probability ‖p‖₂² over the truncated support
    pub fn collision_prob(&self) -> f64 {
        self.probs.iter().map(|p| p * p).sum()
    }

    /// Σ p(k)(‖k‖₁ + n/2)², the second energy moment of the embedding.
    pub fn second_energy_moment(&self) -> f64 {
        let half_n = self.n as f64 / 2.0;
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let t = FockIndex::from_flat(i, self.n, self.cutoff).total() as f64;
                p * (t + half_n) * (t + half_n)
            })
            .sum()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let total: f64 = self.probs.iter().sum();
        let mut u = rng.gen_range(0.0..total);
        for (i, &p) in self.probs.iter().enumerate() {
            if u < p {
                return i;
            }
            u -= p;
        }
        self.probs.len() - 1
    }
}

/// i.i.d. geometric distribution q(k) = (ν+1)⁻ⁿ(ν/(ν+1))^‖k‖₁ with mean
/// photon number ν per mode.
pub fn geometric_distribution(nu: f64, n: usize, cutoff: usize) -> Result<ClassicalDist> {
    if nu <= 0.0 {
        return Err(Error::InvalidParameter("nu must be positive".into()));
    }
    let r = nu / (nu + 1.0);
    let size = cutoff.pow(n as u32);
    let norm = (nu + 1.0).powi(n as i32);
    let probs: Vec<f64> = (0..size)
        .map(|i| {
            let t = FockIndex::from_flat(i, n, cutoff).total() as i32;
            r.powi(t) / norm
        })
        .collect();
    let tail_mass = 1.0 - (1.0 - r.powi(cutoff as i32)).powi(n as i32);
    Ok(ClassicalDist {
        n,
        cutoff,
        probs,
        tail_mass,
    })
}

/// Smallest per-coordinate cutoff with geometric tail mass below budget.
pub fn cutoff_for_tail(nu: f64, n: usize, budget: f64) -> usize {
    let r = nu / (nu + 1.0);
    let mut c = 1;
    while 1.0 - (1.0 - r.powi(c as i32)).powi(n as i32) >= budget {
        c += 1;
    }
    c
}

/// A member of the perturbed family p(i) ∝ (1+4εz(i))q(i), z(i) ∈ {±1}.
#[derive(Debug, Clone)]
pub struct PerturbedMember {
    pub dist: ClassicalDist,
    pub eps: f64,
    pub z_seed: u64,
    pub tv_from_base: f64,
    /// resample attempts needed to reach TV > ε
    pub resamples: usize,
}

/// Build a perturbed family member with random signs, resampling until
/// its total-variation distance from the base exceeds ε.
pub fn valiant_perturb(q: &ClassicalDist, eps: f64, z_seed: u64) -> Result<PerturbedMember> {
    if !(0.0..0.25).contains(&eps) || eps == 0.0 {
        return Err(Error::InvalidParameter("eps must lie in (0, 1/4)".into()));
    }
    let q_max = q.probs.iter().cloned().fold(0.0, f64::max);
    if q_max > 0.5 + 1e-12 {
        return Err(Error::InvalidParameter("base distribution needs max prob <= 1/2".into()));
    }
    for attempt in 0..10000u64 {
        let mut rng = RngStream::new(z_seed, attempt).rng();
        let weighted: Vec<f64> = q
            .probs
            .iter()
            .map(|&p| {
                let z = if rng.gen_range(0.0..1.0) < 0.5 { 1.0 } else { -1.0 };
                (1.0 + 4.0 * eps * z) * p
            })
            .collect();
        let norm: f64 = weighted.iter().sum::<f64>() + q.tail_mass;
        let probs: Vec<f64> = weighted.iter().map(|w| w / norm).collect();
        let dist = ClassicalDist {
            n: q.n,
            cutoff: q.cutoff,
            probs,
            tail_mass: q.tail_mass / norm,
        };
        let tv = dist.tv(q)?;
        if tv > eps {
            // uniform family bound p <= (1+4eps)/(1-4eps) q holds by
            // construction; assert it as a sanity check
            let ratio = (1.0 + 4.0 * eps) / (1.0 - 4.0 * eps);
            debug_assert!(dist
                .probs
                .iter()
                .zip(&q.probs)
                .all(|(p, qq)| *p <= ratio * qq + 1e-15));
            return Ok(PerturbedMember {
                dist,
                eps,
                z_seed,
                tv_from_base: tv,
                resamples: attempt as usize,
            });
        }
    }
    Err(Error::Numerical("perturbation resampling did not reach TV > eps".into()))
}

/// Embed a classical distribution as the Fock-diagonal mixed state
/// Σ p(k)|k⟩⟨k| in an n-mode cutoff-d space.
pub fn embed_classical(p: &ClassicalDist, d: usize, allow_tail: bool) -> Result<MixedFockState> {
    if p.cutoff > d {
        return Err(Error::DimensionBudget {
            requested: p.cutoff,
            max: d,
        });
    }
    if p.tail_mass >= 1e-9 && !allow_tail {
        return Err(Error::LeakageBudget {
            achieved: p.tail_mass,
            budget: 1e-9,
        });
    }
    let size = d.pow(p.n as u32);
    let mut diag = vec![0.0; size];
    for (i, &pr) in p.probs.iter().enumerate() {
        let k = FockIndex::from_flat(i, p.n, p.cutoff);
        diag[k.flat(d)] = pr;
    }
    MixedFockState::from_diagonal(p.n, d, &diag)
}

/// Closed-form second energy moment of the i.i.d. geometric embedding:
/// nν(2ν+1) + n(n−1)ν² + n²ν + n²/4.
pub fn geometric_second_moment(n: usize, nu: f64) -> f64 {
    let nf = n as f64;
    nf * nu * (2.0 * nu + 1.0) + nf * (nf - 1.0) * nu * nu + nf * nf * nu + nf * nf / 4.0
}

/// Mean photon number ν_{E,ε} matching the energy budget:
/// positive root of n(n+1)ν² + n(n+1)ν + n²/4 = (1−4ε)/(1+4ε)·n²E².
pub fn matched_nu(n: usize, e: f64, eps: f64) -> Result<f64> {
    let nf = n as f64;
    let target = (1.0 - 4.0 * eps) / (1.0 + 4.0 * eps) * (nf * e) * (nf * e);
    let a = nf * (nf + 1.0);
    let b = nf * (nf + 1.0);
    let c = nf * nf / 4.0 - target;
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 || c >= 0.0 {
        return Err(Error::Infeasible(format!(
            "no positive nu matches energy budget E = {e}"
        )));
    }
    Ok((-b + disc.sqrt()) / (2.0 * a))
}

#[derive(Debug, Clone)]
pub struct HardnessGridPoint {
    pub e: f64,
    pub nu: f64,
    pub cutoff: usize,
    pub tv_from_base: f64,
    /// Tr[Ê²ρ(q)] closed form
    pub second_moment: f64,
    /// Tr[Ê²ρ(p)] of the emitted member (numeric)
    pub member_second_moment: f64,
    /// the budget (nE)² both moments must respect
    pub energy_budget: f64,
    /// empirical samples needed by the collision tester for 2/3 success
    pub samples_to_distinguish: usize,
}

#[derive(Debug, Clone)]
pub struct HardnessExperimentReport {
    pub n: usize,
    pub eps: f64,
    pub eps_b: f64,
    pub grid: Vec<HardnessGridPoint>,
}

/// Empirical sample complexity of a collision-count identity tester
/// separating p from q at 2/3 success, searched over a geometric shot
/// schedule.
fn collision_distinguishing_cost<R: Rng>(
    q: &ClassicalDist,
    p: &ClassicalDist,
    trials: usize,
    rng: &mut R,
) -> Result<usize> {
    let cq = q.collision_prob();
    let cp = p.collision_prob();
    if (cp - cq).abs() < 1e-12 {
        return Err(Error::Numerical("member has no collision gap".into()));
    }
    let p_side_high = cp > cq;
    let collisions = |samples: &[usize]| -> f64 {
        let mut counts: HashMap<usize, u64> = HashMap::new();
        for &s in samples {
            *counts.entry(s).or_insert(0) += 1;
        }
        counts
            .values()
            .map(|&c| (c * (c - 1) / 2) as f64)
            .sum()
    };
    let mut shots = 8usize;
    for _ in 0..40 {
        let thr = {
            let pairs = (shots * (shots - 1) / 2) as f64;
            pairs * (cq + cp) / 2.0
        };
        let mut correct = 0usize;
        for _ in 0..trials {
            let from_p: Vec<usize> = (0..shots).map(|_| p.sample(rng)).collect();
            if (collisions(&from_p) > thr) == p_side_high {
                correct += 1;
            }
            let from_q: Vec<usize> = (0..shots).map(|_| q.sample(rng)).collect();
            if (collisions(&from_q) > thr) != p_side_high {
                correct += 1;
            }
        }
        if correct as f64 >= 2.0 / 3.0 * (2 * trials) as f64 {
            return Ok(shots);
        }
        shots = (shots as f64 * 1.5).ceil() as usize;
    }
    Err(Error::Numerical("distinguishing cost search exhausted".into()))
}

/// Run the hardness laboratory over an energy grid. The perturbation
/// strength is ε = 8c_nE²ε_B as in the reduction; since feasible ε_B are
/// astronomically small, `eps_override` substitutes a fixed ε for the
/// empirical experiment (the contractual checks are unchanged).
pub fn hardness_experiment<R: Rng>(
    n: usize,
    e_grid: &[f64],
    eps_b: f64,
    eps_override: Option<f64>,
    trials: usize,
    z_seed: u64,
    rng: &mut R,
) -> Result<HardnessExperimentReport> {
    if n == 0 || n > 2 {
        return Err(Error::InvalidParameter("hardness lab supports n in {1, 2}".into()));
    }
    let e_min = e_grid
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let eps = match eps_override {
        Some(v) => v,
        None => {
            let c_ne = gaussianification_constant(n, e_min);
            8.0 * c_ne * c_ne * eps_b
        }
    };
    if !(0.0..0.25).contains(&eps) || eps == 0.0 {
        return Err(Error::Infeasible(format!(
            "perturbation eps = {eps:.3e} outside (0, 1/4); lower eps_B"
        )));
    }
    let mut grid = Vec::new();
    for (gi, &e) in e_grid.iter().enumerate() {
        let nu = matched_nu(n, e, eps)?;
        let cutoff = cutoff_for_tail(nu, n, 1e-9);
        let q = geometric_distribution(nu, n, cutoff)?;
        // screen for members the collision tester can see: random signs
        // guarantee TV > eps but not a collision-probability gap, so keep
        // only members whose relative gap lies in a fixed band and
        // average the cost over a few of them
        let cq = q.collision_prob();
        let band = 8.0 * eps * eps..24.0 * eps * eps;
        let mut members = Vec::new();
        for attempt in 0..2000u64 {
            let m = valiant_perturb(&q, eps, z_seed.wrapping_add(gi as u64 + 1000 * attempt))?;
            if band.contains(&(m.dist.collision_prob() / cq - 1.0).abs()) {
                members.push(m);
                if members.len() == 3 {
                    break;
                }
            }
        }
        if members.is_empty() {
            return Err(Error::Numerical("no member with detectable collision gap".into()));
        }

        let second_moment = geometric_second_moment(n, nu);
        let budget = (n as f64 * e) * (n as f64 * e);
        if second_moment > budget + 1e-9 {
            return Err(Error::Numerical("base second moment exceeds budget".into()));
        }
        let mut member_second_moment: f64 = 0.0;
        for m in &members {
            let sm = m.dist.second_energy_moment();
            if sm > budget + 1e-9 {
                return Err(Error::Numerical("member second moment exceeds budget".into()));
            }
            member_second_moment = member_second_moment.max(sm);
        }

        let mut cost_sum = 0usize;
        for m in &members {
            cost_sum += collision_distinguishing_cost(&q, &m.dist, trials, rng)?;
        }
        let cost = cost_sum / members.len();
        let member = &members[0];
        grid.push(HardnessGridPoint {
            e,
            nu,
            cutoff,
            tv_from_base: member.tv_from_base,
            second_moment,
            member_second_moment,
            energy_budget: budget,
            samples_to_distinguish: cost,
        });
    }
    Ok(HardnessExperimentReport {
        n,
        eps,
        eps_b,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::trace_distance_exact;
    use approx::assert_abs_diff_eq;

    #[test]
    fn geometric_values_and_norm() {
        let q = geometric_distribution(1.0, 1, 40).unwrap();
        assert_abs_diff_eq!(q.probs[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(q.probs[1], 0.25, epsilon = 1e-15);
        let max = q.probs.iter().cloned().fold(0.0, f64::max);
        assert_abs_diff_eq!(max, 0.5, epsilon = 1e-15);
        let total: f64 = q.probs.iter().sum();
        assert_abs_diff_eq!(total + q.tail_mass, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn geometric_factorizes() {
        let q1 = geometric_distribution(0.7, 1, 12).unwrap();
        let q2 = geometric_distribution(0.7, 2, 12).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                assert_abs_diff_eq!(
                    q2.probs[i * 12 + j],
                    q1.probs[i] * q1.probs[j],
                    epsilon = 1e-15
                );
            }
        }
    }

    #[test]
    fn perturb_two_point_example() {
        // q = (1/2, 1/2), z = (+1, -1), eps = 1/8 -> p = (0.75, 0.25)
        let q = ClassicalDist {
            n: 1,
            cutoff: 2,
            probs: vec![0.5, 0.5],
            tail_mass: 0.0,
        };
        // search a seed realizing z = (+1, -1) or (-1, +1); both give TV 1/4
        let m = valiant_perturb(&q, 0.125, 5).unwrap();
        assert_abs_diff_eq!(m.tv_from_base, 0.25, epsilon = 1e-12);
        let hi = m.dist.probs.iter().cloned().fold(0.0, f64::max);
        assert_abs_diff_eq!(hi, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn perturb_geometric_reaches_tv() {
        let q = geometric_distribution(1.0, 1, 40).unwrap();
        for seed in 0..20 {
            let m = valiant_perturb(&q, 0.1, seed).unwrap();
            assert!(m.tv_from_base > 0.1);
            // family bound entrywise
            let ratio = 1.4 / 0.6;
            for (p, qq) in m.dist.probs.iter().zip(&q.probs) {
                assert!(*p <= ratio * qq + 1e-15);
            }
        }
    }

    #[test]
    fn perturb_eps_range_enforced() {
        let q = geometric_distribution(1.0, 1, 40).unwrap();
        assert!(valiant_perturb(&q, 0.3, 0).is_err());
        assert!(valiant_perturb(&q, 0.0, 0).is_err());
    }

    #[test]
    fn embedding_matches_thermal() {
        let q = geometric_distribution(1.0, 1, 40).unwrap();
        let rho = embed_classical(&q, 40, true).unwrap();
        let th = MixedFockState::thermal(1.0, 40).unwrap();
        let probs = rho.diagonal_probs();
        let tprobs = th.diagonal_probs();
        for k in 0..40 {
            assert_abs_diff_eq!(probs[k], tprobs[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn embedding_isometry_trace_distance_equals_tv() {
        // cutoff deep enough that renormalization is below 1e-13
        let cutoff = cutoff_for_tail(1.0, 1, 1e-13);
        let q = geometric_distribution(1.0, 1, cutoff).unwrap();
        let m = valiant_perturb(&q, 0.1, 3).unwrap();
        let rq = embed_classical(&q, cutoff, false).unwrap();
        let rp = embed_classical(&m.dist, cutoff, false).unwrap();
        let td = trace_distance_exact(&rq, &rp).unwrap();
        assert_abs_diff_eq!(td, m.tv_from_base, epsilon = 1e-12);
    }

    #[test]
    fn embedding_tail_budget_enforced() {
        let q = geometric_distribution(1.0, 1, 8).unwrap();
        assert!(embed_classical(&q, 8, false).is_err());
        assert!(embed_classical(&q, 8, true).is_ok());
    }

    #[test]
    fn second_moment_formula_values() {
        // n = 1, nu = 1: 4.25
        assert_abs_diff_eq!(geometric_second_moment(1, 1.0), 4.25, epsilon = 1e-15);
        // brute force vs formula for n <= 2, nu <= 2
        for &(n, nu) in &[(1usize, 0.5), (1, 2.0), (2, 0.5), (2, 1.0), (2, 2.0)] {
            let cutoff = cutoff_for_tail(nu, n, 1e-14);
            let q = geometric_distribution(nu, n, cutoff).unwrap();
            assert_abs_diff_eq!(
                q.second_energy_moment(),
                geometric_second_moment(n, nu),
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn matched_nu_solves_quadratic() {
        // n = 1, E = 3, eps = 0.1: 2nu^2 + 2nu + 1/4 = (0.6/1.4)*9
        let nu = matched_nu(1, 3.0, 0.1).unwrap();
        let lhs = 2.0 * nu * nu + 2.0 * nu + 0.25;
        assert_abs_diff_eq!(lhs, 0.6 / 1.4 * 9.0, epsilon = 1e-12);
        assert!(nu > 0.0);
    }

    #[test]
    fn fock_sampling_reproduces_embedded_distribution() {
        // chi-square GOF at 1% with 1e5 shots
        let q = geometric_distribution(1.0, 1, 40).unwrap();
        let m = valiant_perturb(&q, 0.1, 11).unwrap();
        let rho = embed_classical(&m.dist, 40, true).unwrap();
        let mut rng = RngStream::new(41, 0).rng();
        let shots = 100000;
        let samples = crate::sampling::fock_sample_many(&rho, shots, &mut rng);
        let mut obs = [0f64; 10];
        for s in &samples {
            obs[s.total().min(9)] += 1.0;
        }
        let mut exp = [0f64; 10];
        for (i, &p) in m.dist.probs.iter().enumerate() {
            exp[i.min(9)] += p * shots as f64;
        }
        let chi2: f64 = obs
            .iter()
            .zip(&exp)
            .map(|(o, e)| (o - e) * (o - e) / e)
            .sum();
        assert!(chi2 < 21.67, "chi2 = {chi2}"); // 9 dof at 1%
    }

    #[test]
    fn experiment_monotone_in_energy() {
        // n = 2 keeps nu >= 1 across the grid so q satisfies the
        // max-prob <= 1/2 precondition of the perturbation lemma
        let mut rng = RngStream::new(42, 0).rng();
        let report =
            hardness_experiment(2, &[2.0, 3.0, 4.0], 1e-6, Some(0.1), 20, 7, &mut rng).unwrap();
        assert_eq!(report.grid.len(), 3);
        for p in &report.grid {
            assert!(p.tv_from_base > report.eps);
            assert!(p.second_moment <= p.energy_budget + 1e-9);
            assert!(p.member_second_moment <= p.energy_budget + 1e-9);
        }
        assert!(report.grid[0].samples_to_distinguish <= report.grid[1].samples_to_distinguish);
        assert!(report.grid[1].samples_to_distinguish <= report.grid[2].samples_to_distinguish);
    }

    #[test]
    fn experiment_eps_feasibility() {
        let mut rng = RngStream::new(43, 0).rng();
        // realistic eps_B makes eps = 8 c_nE^2 eps_B; too large a value
        // must be rejected
        let r = hardness_experiment(2, &[2.0], 1e-3, None, 5, 7, &mut rng);
        assert!(matches!(r, Err(Error::Infeasible(_))));
        // while an eps_B giving eps = 0.1 passes the gate end to end
        let c = gaussianification_constant(2, 2.0);
        let ok_eps_b = 0.1 / (8.0 * c * c);
        let r = hardness_experiment(2, &[2.0], ok_eps_b, None, 5, 7, &mut rng);
        assert!(r.is_ok(), "{:?}", r.err());
    }

    #[test]
    fn gaussianification_of_embedding_is_thermal() {
        // moments of the embedded geometric state match the thermal
        // Gaussian state
        let q = geometric_distribution(0.8, 1, 50).unwrap();
        let rho = embed_classical(&q, 50, true).unwrap();
        let (mean, cov) = crate::symplectic::moments_of_state(&rho).unwrap();
        let th = crate::symplectic::GaussianState::thermal(&[0.8]).unwrap();
        assert!(mean.norm() < 1e-8);
        assert!(crate::linalg::max_abs_real(&(cov - th.cov_mat())) < 1e-8);
    }
}
