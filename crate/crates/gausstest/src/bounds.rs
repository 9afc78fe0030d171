//! Trace-distance bound toolbox: two-sided bounds between Gaussian
//! states, between an arbitrary state and a pure Gaussian state, distance
//! to the pure Gaussian set from the symplectic spectrum (with perturbed
//! variants), the Williamson perturbation bound, and the
//! Gaussianification constant.

use crate::estimators::ROBUSTNESS_CONSTANT;
use crate::linalg::{frobenius_norm, spectral_norm, RMat, RVec};
use crate::symplectic::{symplectic_eigenvalues, GaussianState};
use crate::{Error, Result};

/// A two-sided trace-distance bound. `upper_raw` is the literal formula
/// value (may exceed 1); `upper_clamped` = min(1, upper_raw). `exact` is
/// filled in by callers that can compute the distance independently.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub lower: f64,
    pub upper_raw: f64,
    pub upper_clamped: f64,
    pub exact: Option<f64>,
    pub lemma: &'static str,
    pub parameters: Vec<(String, f64)>,
}

impl BoundReport {
    pub fn new(lower: f64, upper_raw: f64, lemma: &'static str) -> Self {
        BoundReport {
            lower,
            upper_raw,
            upper_clamped: upper_raw.min(1.0),
            exact: None,
            lemma,
            parameters: Vec::new(),
        }
    }

    pub fn with_exact(mut self, exact: f64) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.parameters.push((name.to_string(), value));
        self
    }

    /// lower ≤ exact ≤ min(1, upper), with a small numerical slack.
    pub fn sandwich_ok(&self) -> bool {
        match self.exact {
            Some(e) => self.lower <= e + 1e-9 && e <= self.upper_clamped + 1e-9,
            None => true,
        }
    }
}

/// Two-sided bound on the trace distance between two Gaussian states from
/// their moments alone.
pub fn gaussian_pair_bounds(g1: &GaussianState, g2: &GaussianState) -> Result<BoundReport> {
    if g1.n != g2.n {
        return Err(Error::DimensionMismatch("mode counts differ".into()));
    }
    let (v, w) = (g1.cov_mat(), g2.cov_mat());
    let (m, t) = (g1.mean_vec(), g2.mean_vec());
    let diff = &v - &w;
    let dm = (&m - &t).norm();
    let vn = spectral_norm(&v);
    let wn = spectral_norm(&w);
    let min_norm = vn.min(wn);

    let upper = (1.0 + 3f64.sqrt()) / 8.0 * v.trace().max(w.trace()) * spectral_norm(&diff)
        + (min_norm / 2.0).sqrt() * dm;

    let lower_mean = (1.0 / 200.0) * (dm / (4.0 * min_norm + 1.0).sqrt()).min(1.0);
    let lower_cov = (1.0 / 200.0) * (frobenius_norm(&diff) / (4.0 * min_norm + 1.0)).min(1.0);

    Ok(BoundReport::new(lower_mean.max(lower_cov), upper, "gaussian_pair"))
}

/// Moment and energy data of a possibly non-Gaussian state, enough to
/// evaluate the general-pair bounds.
#[derive(Debug, Clone)]
pub struct MomentData {
    pub mean: RVec,
    pub cov: RMat,
    /// Tr[ρÊ]
    pub energy: f64,
    /// Tr[ρÊ²], needed for the covariance-based lower bound
    pub energy_sq: Option<f64>,
    pub pure_gaussian: bool,
}

impl MomentData {
    pub fn from_gaussian(g: &GaussianState, pure: bool) -> Self {
        // Gaussian states: Tr[ρÊ] = TrV/4 + ‖m‖²/2
        MomentData {
            mean: g.mean_vec(),
            cov: g.cov_mat(),
            energy: g.mean_energy(),
            energy_sq: None,
            pure_gaussian: pure,
        }
    }
}

/// Two-sided bound on the trace distance between two arbitrary states
/// from moments and energies. The upper branch needs one argument to be a
/// pure Gaussian state; the covariance lower branch needs Tr[Ê²] data.
pub fn general_pair_bounds(a: &MomentData, b: &MomentData) -> Result<BoundReport> {
    if a.mean.len() != b.mean.len() {
        return Err(Error::DimensionMismatch("mode counts differ".into()));
    }
    let diff = &a.cov - &b.cov;
    let diff_norm = spectral_norm(&diff);
    let dm = (&a.mean - &b.mean).norm();

    let upper = if a.pure_gaussian || b.pure_gaussian {
        let e = a.energy.max(b.energy);
        e.sqrt() * (diff_norm + 2.0 * dm * dm).sqrt()
    } else {
        f64::INFINITY
    };

    let lower_mean = dm * dm / (32.0 * a.energy.max(b.energy));
    let lower_cov = match (a.energy_sq, b.energy_sq) {
        (Some(ea), Some(eb)) => diff_norm * diff_norm / (3098.0 * ea.max(eb)),
        _ => {
            if diff_norm > 0.0 && dm == 0.0 {
                return Err(Error::InvalidParameter(
                    "covariance lower bound needs Tr[E^2] data".into(),
                ));
            }
            0.0
        }
    };

    Ok(BoundReport::new(lower_mean.max(lower_cov), upper, "general_pair"))
}

/// Two-sided bound on the distance from a state to the set of pure
/// Gaussian states, in terms of its symplectic spectrum. With
/// `eps_v > 0` the perturbed forms are used: the spectrum is treated as
/// coming from a moment estimate accurate to eps_v, and both sides pick
/// up the Δ = 4nE(4nE+ε_V)ε_V corrections.
pub fn pure_gaussian_set_distance_bounds(
    nu: &[f64],
    n: usize,
    e: f64,
    eps_v: f64,
) -> Result<BoundReport> {
    if nu.len() != n {
        return Err(Error::DimensionMismatch("need one nu per mode".into()));
    }
    if nu.iter().any(|&x| x < 1.0 - 1e-8) {
        return Err(Error::InvalidParameter(format!(
            "symplectic eigenvalues must be >= 1, got {:?}",
            nu
        )));
    }
    if eps_v < 0.0 {
        return Err(Error::InvalidParameter("eps_v must be >= 0".into()));
    }
    let nf = n as f64;
    let sum_excess: f64 = nu.iter().map(|&x| (x - 1.0).max(0.0)).sum();
    let nu_max = nu.iter().cloned().fold(1.0, f64::max);
    let delta = 4.0 * nf * e * (4.0 * nf * e + eps_v) * eps_v;

    let upper = ((sum_excess + nf.powf(1.5) * delta) / 2.0).sqrt();
    let lower = if eps_v == 0.0 {
        (nu_max - 1.0).powi(2) / (ROBUSTNESS_CONSTANT * (nf * e).powi(6))
    } else {
        (((nu_max - 1.0).powi(2) - 2.0 * nf.sqrt() * delta)
            / (2.0 * ROBUSTNESS_CONSTANT * (nf * e).powi(6)))
        .max(0.0)
    };

    Ok(BoundReport::new(lower, upper, "set_distance")
        .with_param("nu_max", nu_max)
        .with_param("delta", delta))
}

/// Williamson perturbation bound: ‖D1−D2‖ ≤ √(K(V1)K(V2))·‖V1−V2‖ in
/// both the spectral and the Schatten-2 norm, K the condition number.
#[derive(Debug, Clone, Copy)]
pub struct WilliamsonPerturbation {
    pub bound_inf: f64,
    pub bound_2: f64,
    /// ‖D1−D2‖∞ from the symplectic spectra directly
    pub direct_gap: f64,
}

pub fn williamson_perturbation_bound(v1: &RMat, v2: &RMat) -> Result<WilliamsonPerturbation> {
    let cond = |v: &RMat| -> Result<f64> {
        let inv = v
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidParameter("singular covariance".into()))?;
        Ok(spectral_norm(v) * spectral_norm(&inv))
    };
    let k = (cond(v1)? * cond(v2)?).sqrt();
    let diff = v1 - v2;
    let nu1 = symplectic_eigenvalues(v1)?;
    let nu2 = symplectic_eigenvalues(v2)?;
    let direct_gap = nu1
        .iter()
        .zip(&nu2)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(WilliamsonPerturbation {
        bound_inf: k * spectral_norm(&diff),
        bound_2: k * frobenius_norm(&diff),
        direct_gap,
    })
}

/// The explicit constant c_nE = √2 + 8·3^{1/4}(nE)^{3/2} + ((1+√3)/2)√3098·(nE)².
pub fn gaussianification_constant(n: usize, e: f64) -> f64 {
    let ne = n as f64 * e;
    2f64.sqrt()
        + 8.0 * 3f64.powf(0.25) * ne.powf(1.5)
        + (1.0 + 3f64.sqrt()) / 2.0 * 3098f64.sqrt() * ne * ne
}

/// Bounds on the distance between a state and its Gaussianification in
/// terms of its distance to the Gaussian set: the set distance is a lower
/// bound, and the converse holds with an explicit (nE)²-scale prefactor.
#[derive(Debug, Clone)]
pub struct GaussianificationBounds {
    pub report: BoundReport,
    pub c_ne: f64,
    pub converse_prefactor: f64,
}

pub fn gaussianification_bounds(
    n: usize,
    e: f64,
    set_distance: f64,
    gaussianification_distance: Option<f64>,
) -> Result<GaussianificationBounds> {
    if !(0.0..=1.0 + 1e-9).contains(&set_distance) {
        return Err(Error::InvalidParameter("set distance must be in [0,1]".into()));
    }
    let ne = n as f64 * e;
    let prefactor = 1.0
        + (1.0 + 3f64.sqrt()) / 2.0 * 6f64.sqrt() * 1549f64.sqrt() * ne * ne
        + 4.0 * (2.0 * 3f64.sqrt()).sqrt() * ne.powf(1.5);
    let mut report = BoundReport::new(
        set_distance,
        prefactor * set_distance.sqrt(),
        "gaussianification",
    );
    if let Some(d) = gaussianification_distance {
        report = report.with_exact(d);
    }
    Ok(GaussianificationBounds {
        report,
        c_ne: gaussianification_constant(n, e),
        converse_prefactor: prefactor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gaussian_pair_identical_is_zero() {
        let g = GaussianState::thermal(&[0.3]).unwrap();
        let r = gaussian_pair_bounds(&g, &g).unwrap();
        assert_abs_diff_eq!(r.lower, 0.0);
        assert_abs_diff_eq!(r.upper_raw, 0.0);
    }

    #[test]
    fn gaussian_pair_displaced_vacuum_lower() {
        let vac = GaussianState::vacuum(1);
        let disp = GaussianState::coherent(1.0 / 2f64.sqrt(), 0.0);
        // mean in quadrature coordinates: (√2·Re α, √2·Im α) = (1, 0)
        assert_abs_diff_eq!(disp.mean_vec()[0], 1.0, epsilon = 1e-12);
        let r = gaussian_pair_bounds(&vac, &disp).unwrap();
        assert_abs_diff_eq!(r.lower, (1.0 / 200.0) * (1.0 / 5f64.sqrt()), epsilon = 1e-12);
        assert_abs_diff_eq!(r.lower, 0.00223606797, epsilon = 1e-9);
    }

    #[test]
    fn gaussian_pair_thermal_upper_raw_exceeds_one() {
        let vac = GaussianState::vacuum(1);
        let th = GaussianState::thermal(&[1.0]).unwrap(); // nu = 3
        let r = gaussian_pair_bounds(&vac, &th).unwrap();
        let expect = (1.0 + 3f64.sqrt()) / 8.0 * 6.0 * 2.0;
        assert_abs_diff_eq!(r.upper_raw, expect, epsilon = 1e-12);
        assert_abs_diff_eq!(r.upper_raw, 4.098, epsilon = 1e-3);
        assert_abs_diff_eq!(r.upper_clamped, 1.0);
        // sandwich against the exact diagonal distance nbar/(nbar+1)
        let r = r.with_exact(0.5);
        assert!(r.sandwich_ok());
    }

    #[test]
    fn general_pair_vacuum_vs_fock1() {
        let vac = MomentData::from_gaussian(&GaussianState::vacuum(1), true);
        // |1><1|: V = 3I, m = 0, E = 1.5, E^2 = (1 + 1/2)^2 = 2.25
        let f1 = MomentData {
            mean: RVec::zeros(2),
            cov: RMat::identity(2, 2) * 3.0,
            energy: 1.5,
            energy_sq: Some(2.25),
            pure_gaussian: false,
        };
        let vac = MomentData {
            energy_sq: Some(0.25),
            ..vac
        };
        let r = general_pair_bounds(&vac, &f1).unwrap();
        assert_abs_diff_eq!(r.lower, 4.0 / (3098.0 * 2.25), epsilon = 1e-15);
        assert_abs_diff_eq!(r.lower, 5.7389e-4, epsilon = 1e-7);
        // exact distance between vacuum and |1> is 1 (orthogonal)
        let r = r.with_exact(1.0);
        assert!(r.sandwich_ok());
    }

    #[test]
    fn general_pair_vacuum_vs_coherent() {
        let vac = MomentData::from_gaussian(&GaussianState::vacuum(1), true);
        let coh = MomentData::from_gaussian(&GaussianState::coherent(1.0, 0.0), true);
        assert_abs_diff_eq!(coh.energy, 1.5, epsilon = 1e-12);
        let r = general_pair_bounds(&vac, &coh).unwrap();
        // mean-based branch: ‖m‖² = 2 over 32·1.5
        assert_abs_diff_eq!(r.lower, 2.0 / 48.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.lower, 0.041667, epsilon = 1e-5);
        // exact: sqrt(1 - |<0|alpha>|^2) = sqrt(1 - e^{-1})
        let exact = (1.0 - (-1.0f64).exp()).sqrt();
        let r = r.with_exact(exact);
        assert!(r.sandwich_ok());
    }

    #[test]
    fn general_pair_identical_moments() {
        let a = MomentData::from_gaussian(&GaussianState::vacuum(1), true);
        let r = general_pair_bounds(&a, &a).unwrap();
        assert_abs_diff_eq!(r.lower, 0.0);
        assert_abs_diff_eq!(r.upper_raw, 0.0);
    }

    #[test]
    fn set_distance_trivial_and_examples() {
        let r = pure_gaussian_set_distance_bounds(&[1.0, 1.0], 2, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(r.lower, 0.0);
        assert_abs_diff_eq!(r.upper_raw, 0.0);

        // nu = 1.2, thermal nbar = 0.1: exact distance 0.1/1.1
        let r = pure_gaussian_set_distance_bounds(&[1.2], 1, 0.6, 0.0).unwrap();
        assert_abs_diff_eq!(r.upper_raw, 0.1f64.sqrt(), epsilon = 1e-12);
        let r = r.with_exact(0.1 / 1.1);
        assert!(r.sandwich_ok());

        // nu = 3, E = 1.5
        let r = pure_gaussian_set_distance_bounds(&[3.0], 1, 1.5, 0.0).unwrap();
        assert_abs_diff_eq!(r.lower, 4.0 / (4_758_528.0 * 1.5f64.powi(6)), epsilon = 1e-18);
        assert_abs_diff_eq!(r.lower, 7.376e-8, epsilon = 1e-10);
    }

    #[test]
    fn set_distance_perturbed_reduces_at_zero() {
        let a = pure_gaussian_set_distance_bounds(&[1.3], 1, 1.0, 0.0).unwrap();
        let b = pure_gaussian_set_distance_bounds(&[1.3], 1, 1.0, 1e-300).unwrap();
        assert_abs_diff_eq!(a.upper_raw, b.upper_raw, epsilon = 1e-12);
        // the perturbed lower carries the extra factor 1/2
        assert_abs_diff_eq!(a.lower, 2.0 * b.lower, epsilon = 1e-12);
        // corrections widen the bounds monotonically in eps_v
        let c = pure_gaussian_set_distance_bounds(&[1.3], 1, 1.0, 1e-2).unwrap();
        assert!(c.upper_raw > a.upper_raw);
        assert!(c.lower < a.lower);
    }

    #[test]
    fn williamson_perturbation_tight_example() {
        let v1 = RMat::identity(2, 2);
        let v2 = RMat::identity(2, 2) * 3.0;
        let p = williamson_perturbation_bound(&v1, &v2).unwrap();
        assert_abs_diff_eq!(p.bound_inf, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.direct_gap, 2.0, epsilon = 1e-12);
        assert!(p.bound_inf >= p.direct_gap - 1e-12);
    }

    #[test]
    fn williamson_perturbation_random_pairs() {
        use crate::sampling::RngStream;
        use crate::symplectic::random_gaussian_pure;
        let mut rng = RngStream::new(31, 0).rng();
        for _ in 0..100 {
            let g1 = random_gaussian_pure(1, 0.4, &mut rng);
            let g2 = random_gaussian_pure(1, 0.4, &mut rng);
            let p = williamson_perturbation_bound(&g1.cov_mat(), &g2.cov_mat()).unwrap();
            assert!(p.bound_inf >= p.direct_gap - 1e-9);
            assert!(p.bound_2 >= p.bound_inf - 1e-12);
        }
    }

    #[test]
    fn gaussianification_constant_value() {
        let c = gaussianification_constant(1, 1.0);
        let expect = 2f64.sqrt() + 8.0 * 3f64.powf(0.25) + (1.0 + 3f64.sqrt()) / 2.0 * 3098f64.sqrt();
        assert_abs_diff_eq!(c, expect, epsilon = 1e-12);
        assert_abs_diff_eq!(c, 87.98, epsilon = 0.01);
    }

    #[test]
    fn gaussianification_bounds_trivial_and_sandwich() {
        let b = gaussianification_bounds(1, 1.0, 0.0, Some(0.0)).unwrap();
        assert_abs_diff_eq!(b.report.lower, 0.0);
        assert_abs_diff_eq!(b.report.upper_raw, 0.0);
        assert!(b.report.sandwich_ok());

        // any set distance in (0,1): forward and converse bracket the
        // Gaussianification distance whenever exact data is supplied
        let b = gaussianification_bounds(1, 1.5, 0.04, Some(0.1)).unwrap();
        assert!(b.report.sandwich_ok());
        assert!(b.converse_prefactor > 1.0);
    }

    #[test]
    fn bounds_monotone_in_energy() {
        // the set-distance lower bound decreases as E grows
        let mut prev = f64::INFINITY;
        for &e in &[1.0, 1.5, 2.0, 3.0] {
            let r = pure_gaussian_set_distance_bounds(&[2.0], 1, e, 0.0).unwrap();
            assert!(r.lower < prev);
            prev = r.lower;
        }
    }
}
