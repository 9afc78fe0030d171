//! Phase-space (Gaussian) algebra: moments, Williamson decomposition,
//! Gaussian to Fock conversion, Gaussianification and the relative entropy
//! of non-Gaussianity.
//!
//! Quadrature ordering is (x₁..xₙ, p₁..pₙ) everywhere, with the symplectic
//! form Ω = [[0, I], [−I, 0]] and D = diag(ν₁..νₙ, ν₁..νₙ) in the same
//! block ordering. Vacuum has covariance I.

use crate::fock::{
    build_mode_operators, embed_single_mode, quadrature_operators, MixedFockState, PureFockState,
    QuantumState,
};
use crate::linalg::{
    c, exp_i_hermitian, hermitian_fn, max_abs_real, symmetric_eigen, symmetric_fn,
    to_complex, CMat, RMat, RVec,
};
use crate::{Error, Result, LEAKAGE_BOUND};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Gaussian state as its (mean, covariance) pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianState {
    pub n: usize,
    /// Length 2n, ordered (x₁..xₙ, p₁..pₙ).
    pub mean: Vec<f64>,
    /// 2n × 2n symmetric, stored row-major.
    pub cov: Vec<Vec<f64>>,
}

impl GaussianState {
    pub fn new(n: usize, mean: RVec, cov: RMat) -> Result<Self> {
        if mean.len() != 2 * n || cov.nrows() != 2 * n || cov.ncols() != 2 * n {
            return Err(Error::DimensionMismatch("gaussian state shape".into()));
        }
        if max_abs_real(&(&cov - cov.transpose())) > 1e-10 {
            return Err(Error::InvalidState("covariance not symmetric".into()));
        }
        // uncertainty relation V + iΩ ⪰ −1e−8
        let omega = symplectic_form(n);
        let m = to_complex(&cov) + to_complex(&omega) * c(0.0, 1.0);
        let (vals, _) = crate::linalg::hermitian_eigen(&m);
        if vals.min() < -1e-8 {
            return Err(Error::InvalidState(format!(
                "uncertainty relation violated: min eig(V+iΩ) = {:.3e}",
                vals.min()
            )));
        }
        Ok(GaussianState {
            n,
            mean: mean.iter().copied().collect(),
            cov: (0..2 * n)
                .map(|i| (0..2 * n).map(|j| cov[(i, j)]).collect())
                .collect(),
        })
    }

    pub fn mean_vec(&self) -> RVec {
        RVec::from_vec(self.mean.clone())
    }

    pub fn cov_mat(&self) -> RMat {
        RMat::from_fn(2 * self.n, 2 * self.n, |i, j| self.cov[i][j])
    }

    pub fn vacuum(n: usize) -> Self {
        GaussianState::new(n, RVec::zeros(2 * n), RMat::identity(2 * n, 2 * n)).unwrap()
    }

    /// Product of single-mode thermal states, νᵢ = 2n̄ᵢ + 1.
    pub fn thermal(nbars: &[f64]) -> Result<Self> {
        let n = nbars.len();
        let mut cov = RMat::identity(2 * n, 2 * n);
        for (i, &nb) in nbars.iter().enumerate() {
            if nb < 0.0 {
                return Err(Error::InvalidParameter("negative mean photon number".into()));
            }
            cov[(i, i)] = 2.0 * nb + 1.0;
            cov[(n + i, n + i)] = 2.0 * nb + 1.0;
        }
        GaussianState::new(n, RVec::zeros(2 * n), cov)
    }

    /// Single-mode squeezed vacuum: V = diag(e^{2r}, e^{-2r}).
    pub fn squeezed(r: f64) -> Self {
        let cov = RMat::from_diagonal(&RVec::from_vec(vec![(2.0 * r).exp(), (-2.0 * r).exp()]));
        GaussianState::new(1, RVec::zeros(2), cov).unwrap()
    }

    /// Single-mode coherent state: mean (√2 Re α, √2 Im α), V = I.
    pub fn coherent(alpha_re: f64, alpha_im: f64) -> Self {
        let mean = RVec::from_vec(vec![2f64.sqrt() * alpha_re, 2f64.sqrt() * alpha_im]);
        GaussianState::new(1, mean, RMat::identity(2, 2)).unwrap()
    }

    /// Mean energy Tr[Ê ρ] = Tr V / 4 + ‖m‖²/2.
    pub fn mean_energy(&self) -> f64 {
        self.cov_mat().trace() / 4.0 + self.mean_vec().norm_squared() / 2.0
    }
}

/// Ω = [[0, I], [−I, 0]].
pub fn symplectic_form(n: usize) -> RMat {
    let mut o = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        o[(i, n + i)] = 1.0;
        o[(n + i, i)] = -1.0;
    }
    o
}

/// Williamson factors of a covariance matrix: V = S D Sᵀ with S symplectic
/// and D = diag(ν₁..νₙ, ν₁..νₙ).
#[derive(Debug, Clone)]
pub struct WilliamsonFactors {
    pub s: RMat,
    /// Sorted descending, each ≥ 1 − 1e−8 for physical covariances.
    pub nu: Vec<f64>,
}

/// First and second moments of a truncated Fock-space state:
/// m = Tr[R̂ρ], V = Tr[{R̂−m, (R̂−m)ᵀ}ρ].
pub fn moments_of_state<S: QuantumState>(state: &S) -> Result<(RVec, RMat)> {
    if state.state_leakage() > LEAKAGE_BOUND {
        return Err(Error::LeakageBudget {
            achieved: state.state_leakage(),
            budget: LEAKAGE_BOUND,
        });
    }
    let n = state.modes();
    let quads = quadrature_operators(n, state.cutoff())?;
    let mut mean = RVec::zeros(2 * n);
    for i in 0..2 * n {
        mean[i] = state.expect(&quads[i])?.re;
    }
    let mut cov = RMat::zeros(2 * n, 2 * n);
    for i in 0..2 * n {
        for j in i..2 * n {
            let anti = &quads[i] * &quads[j] + &quads[j] * &quads[i];
            let v = state.expect(&anti)?.re - 2.0 * mean[i] * mean[j];
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok((mean, cov))
}

/// Symplectic eigenvalues of a positive definite covariance matrix,
/// sorted descending.
pub fn symplectic_eigenvalues(cov: &RMat) -> Result<Vec<f64>> {
    let two_n = cov.nrows();
    if two_n % 2 != 0 || cov.ncols() != two_n {
        return Err(Error::DimensionMismatch("covariance shape".into()));
    }
    let n = two_n / 2;
    let (vals, _) = symmetric_eigen(cov);
    if vals.min() <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "covariance not positive definite: min eig {:.3e}",
            vals.min()
        )));
    }
    let half = symmetric_fn(cov, f64::sqrt);
    let a = &half * symplectic_form(n) * &half; // antisymmetric
    let m = -(&a * &a); // symmetric PSD, eigenvalues ν² doubled
    let (mvals, _) = symmetric_eigen(&m);
    let mut nus: Vec<f64> = mvals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    nus.sort_by(|x, y| y.partial_cmp(x).unwrap());
    // pairs: keep every other entry
    Ok(nus.into_iter().step_by(2).collect())
}

/// Williamson decomposition via the antisymmetric kernel
/// B = V^{-1/2} Ω V^{-1/2}; eigenvectors of −B² are paired into an
/// orthogonal O with OᵀBO in canonical form, then S = V^{1/2} O D^{-1/2}.
pub fn williamson_decomposition(cov: &RMat) -> Result<WilliamsonFactors> {
    let two_n = cov.nrows();
    let n = two_n / 2;
    let (vals, _) = symmetric_eigen(cov);
    if vals.min() <= 0.0 {
        return Err(Error::InvalidParameter("covariance not positive definite".into()));
    }
    if vals.max() / vals.min() > 1e12 {
        return Err(Error::Numerical(format!(
            "covariance condition number {:.3e} too large",
            vals.max() / vals.min()
        )));
    }
    let half = symmetric_fn(cov, f64::sqrt);
    let inv_half = symmetric_fn(cov, |x| 1.0 / x.sqrt());
    let b = &inv_half * symplectic_form(n) * &inv_half;
    let m = -(&b * &b); // eigenvalues 1/ν², doubled
    let (mvals, mvecs) = symmetric_eigen(&m); // ascending
    // cluster near-equal eigenvalues (degenerate symplectic eigenvalues)
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..two_n {
        match clusters.last_mut() {
            Some(cl) if (mvals[i] - mvals[cl[0]]).abs() < 1e-8 * mvals[i].max(1.0) => cl.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    let mut pairs: Vec<(f64, RVec, RVec)> = Vec::new(); // (ν, u, w)
    for cl in &clusters {
        let lam: f64 = cl.iter().map(|&i| mvals[i]).sum::<f64>() / cl.len() as f64;
        let nu = 1.0 / lam.sqrt();
        let basis: Vec<RVec> = cl.iter().map(|&i| mvecs.column(i).into_owned()).collect();
        let mut chosen: Vec<RVec> = Vec::new();
        while chosen.len() < cl.len() {
            // next u: first basis vector with a large residual after
            // projecting out already-chosen pair vectors
            let mut u = None;
            for cand in &basis {
                let mut v = cand.clone();
                for w in &chosen {
                    let p = w.dot(&v);
                    v -= w * p;
                }
                if v.norm() > 1e-6 {
                    u = Some(v.normalize());
                    break;
                }
            }
            let u = u.ok_or_else(|| Error::Numerical("degenerate Williamson block".into()))?;
            let w = -(&b * &u) * nu;
            let w = w.normalize();
            pairs.push((nu, u.clone(), w.clone()));
            chosen.push(u);
            chosen.push(w);
        }
    }
    pairs.sort_by(|a, bb| bb.0.partial_cmp(&a.0).unwrap());
    let mut o = RMat::zeros(two_n, two_n);
    let mut nus = Vec::with_capacity(n);
    for (j, (nu, u, w)) in pairs.iter().enumerate() {
        nus.push(*nu);
        o.set_column(j, u);
        o.set_column(n + j, w);
    }
    let d_inv_half = {
        let mut d = RMat::zeros(two_n, two_n);
        for j in 0..n {
            d[(j, j)] = 1.0 / nus[j].sqrt();
            d[(n + j, n + j)] = 1.0 / nus[j].sqrt();
        }
        d
    };
    let s = &half * &o * d_inv_half;
    Ok(WilliamsonFactors { s, nu: nus })
}

/// Extract the unitary u = X + iY from an orthogonal symplectic matrix
/// O = [[X, −Y], [Y, X]].
fn ortho_symplectic_to_unitary(o: &RMat, n: usize) -> Result<CMat> {
    let x = o.view((0, 0), (n, n)).into_owned();
    let y = o.view((n, 0), (n, n)).into_owned();
    let consistency = max_abs_real(&(o.view((0, n), (n, n)).into_owned() + &y))
        .max(max_abs_real(&(o.view((n, n), (n, n)).into_owned() - &x)));
    if consistency > 1e-8 {
        return Err(Error::Numerical(format!(
            "matrix not orthogonal symplectic: block mismatch {consistency:.3e}"
        )));
    }
    Ok(to_complex(&x) + to_complex(&y) * c(0.0, 1.0))
}

/// Hermitian logarithm: K with u = exp(iK), eigenvalues of K in (−π, π].
/// Uses the Cayley transform; if −1 is in the spectrum of u, a random
/// phase is factored out first.
fn unitary_log(u: &CMat) -> Result<CMat> {
    let n = u.nrows();
    let id = CMat::identity(n, n);
    let mut phase = 0.0;
    for attempt in 0..8 {
        let u2 = u * c(0.0, phase).exp();
        let ipu = &id + &u2;
        // (I+u) is invertible iff −1 not in spectrum
        if let Some(inv) = ipu.clone().try_inverse() {
            let min_sv = ipu.svd(false, false).singular_values.min();
            if min_sv > 1e-6 || attempt == 7 {
                let h = (&id - &u2) * inv * c(0.0, 1.0);
                // Hermitize against roundoff
                let h = (&h + h.adjoint()) * c(0.5, 0.0);
                let k2 = hermitian_fn(&h, |t| 2.0 * t.atan());
                // u2 = exp(i k2), u = exp(i (k2 − phase·I))
                return Ok(k2 - &id * c(phase, 0.0));
            }
        }
        phase = 0.37 + 0.41 * attempt as f64;
    }
    Err(Error::Numerical("unitary log failed".into()))
}

/// Fock-space unitary implementing a symplectic transformation:
/// U† R̂ U = S R̂, built from the polar split S = O · P with the active
/// part exponentiated as a quadratic Hamiltonian and the passive part as
/// a number-conserving Hamiltonian.
pub fn gaussian_unitary_from_symplectic(s: &RMat, n: usize, d: usize) -> Result<CMat> {
    let omega = symplectic_form(n);
    if max_abs_real(&(s * &omega * s.transpose() - &omega)) > 1e-8 {
        return Err(Error::InvalidParameter("matrix is not symplectic".into()));
    }
    let sts = s.transpose() * s;
    let p = symmetric_fn(&sts, f64::sqrt);
    let p_inv = symmetric_fn(&sts, |x| 1.0 / x.sqrt());
    let o = s * &p_inv;
    // active part: P = exp(A), A = log P symmetric symplectic generator;
    // H = −ΩA gives U_P = exp(−i ½ R̂ᵀ H R̂) with U† R̂ U = e^{ΩH} R̂ = P R̂
    let a_gen = symmetric_fn(&p, f64::ln);
    let h_mat = -(&omega * &a_gen);
    let quads = quadrature_operators(n, d)?;
    let dim = d.pow(n as u32);
    let mut ham = CMat::zeros(dim, dim);
    for i in 0..2 * n {
        for j in 0..2 * n {
            if h_mat[(i, j)].abs() > 1e-14 {
                ham += (&quads[i] * &quads[j]) * c(0.5 * h_mat[(i, j)], 0.0);
            }
        }
    }
    let ham = (&ham + ham.adjoint()) * c(0.5, 0.0);
    let u_p = exp_i_hermitian(&ham, -1.0);
    // passive part: u = X + iY, K = −i log u, U_O = exp(+i Σ K_jk a_j† a_k)
    let u_small = ortho_symplectic_to_unitary(&o, n)?;
    let k = unitary_log(&u_small)?;
    let ops = build_mode_operators(d)?;
    let a_embedded: Vec<CMat> = (0..n)
        .map(|i| embed_single_mode(&ops.a.matrix, i, n, d))
        .collect();
    let mut ham_o = CMat::zeros(dim, dim);
    for j in 0..n {
        for l in 0..n {
            if k[(j, l)].norm() > 1e-14 {
                ham_o += a_embedded[j].adjoint() * &a_embedded[l] * k[(j, l)];
            }
        }
    }
    let ham_o = (&ham_o + ham_o.adjoint()) * c(0.5, 0.0);
    let u_o = exp_i_hermitian(&ham_o, 1.0);
    Ok(u_o * u_p)
}

/// Displacement unitary with U† R̂ U = R̂ + m.
pub fn displacement_unitary(m: &RVec, n: usize, d: usize) -> Result<CMat> {
    let omega = symplectic_form(n);
    let coeff = omega.transpose() * m; // (mᵀΩ)ᵀ
    let quads = quadrature_operators(n, d)?;
    let dim = d.pow(n as u32);
    let mut ham = CMat::zeros(dim, dim);
    for i in 0..2 * n {
        ham += &quads[i] * c(coeff[i], 0.0);
    }
    Ok(exp_i_hermitian(&ham, -1.0))
}

/// Probability mass in the top photon-number band (any mode at occupation
/// ≥ d−1); used as the truncation-quality estimate after applying
/// squeezing/displacement unitaries.
fn top_band_mass(diag: &[f64], n: usize, d: usize) -> f64 {
    let mut mass = 0.0;
    for (idx, &p) in diag.iter().enumerate() {
        let k = crate::fock::FockIndex::from_flat(idx, n, d);
        if k.k.iter().any(|&ki| ki >= d - 1) {
            mass += p;
        }
    }
    mass
}

/// Convert a Gaussian state to a truncated Fock-space representation.
/// With `pure` set, all symplectic eigenvalues must equal 1; the result is
/// a state vector. Otherwise a density matrix S·(thermal product)·S† is
/// built. Errors out when the achieved leakage exceeds the budget.
pub fn gaussian_state_to_fock(
    g: &GaussianState,
    d: usize,
    pure: bool,
) -> Result<GaussianFockResult> {
    if g.n > 3 {
        return Err(Error::InvalidParameter("desk scale is n ≤ 3".into()));
    }
    let wf = williamson_decomposition(&g.cov_mat())?;
    if pure && wf.nu.iter().any(|&nu| (nu - 1.0).abs() > 1e-6) {
        return Err(Error::InvalidParameter(format!(
            "pure flag set but symplectic eigenvalues are {:?}",
            wf.nu
        )));
    }
    let n = g.n;
    let mean = g.mean_vec();
    let needs_disp = mean.norm() > 1e-14;
    if pure {
        let mut psi = PureFockState::vacuum(n, d);
        let u = gaussian_unitary_from_symplectic(&wf.s, n, d)?;
        psi.amplitudes = &u * psi.amplitudes;
        if needs_disp {
            let ud = displacement_unitary(&mean, n, d)?;
            psi.amplitudes = ud * psi.amplitudes;
        }
        let probs: Vec<f64> = psi.amplitudes.iter().map(|z| z.norm_sqr()).collect();
        let leak = top_band_mass(&probs, n, d);
        psi.leakage = leak;
        if leak > LEAKAGE_BOUND {
            return Err(Error::LeakageBudget {
                achieved: leak,
                budget: LEAKAGE_BOUND,
            });
        }
        Ok(GaussianFockResult::Pure(psi))
    } else {
        // thermal product with n̄ᵢ = (νᵢ−1)/2, analytic geometric tails
        let mut tail = 0.0;
        let mut base = None::<MixedFockState>;
        for &nu in &wf.nu {
            let nb = ((nu - 1.0) / 2.0).max(0.0);
            let t = MixedFockState::thermal(nb, d)?;
            tail += t.leakage;
            base = Some(match base {
                None => t,
                Some(acc) => acc.tensor(&t)?,
            });
        }
        let base = base.ok_or_else(|| Error::InvalidParameter("zero modes".into()))?;
        let u = gaussian_unitary_from_symplectic(&wf.s, n, d)?;
        let mut mat = &u * &base.matrix * u.adjoint();
        if needs_disp {
            let ud = displacement_unitary(&mean, n, d)?;
            mat = &ud * mat * ud.adjoint();
        }
        let mat = (&mat + mat.adjoint()) * c(0.5, 0.0);
        let diag: Vec<f64> = (0..mat.nrows()).map(|i| mat[(i, i)].re).collect();
        let leak = tail + top_band_mass(&diag, n, d);
        if leak > LEAKAGE_BOUND {
            return Err(Error::LeakageBudget {
                achieved: leak,
                budget: LEAKAGE_BOUND,
            });
        }
        let rho = MixedFockState {
            n,
            d,
            matrix: mat,
            leakage: leak,
            clamped: false,
        };
        Ok(GaussianFockResult::Mixed(rho))
    }
}

#[derive(Debug, Clone)]
pub enum GaussianFockResult {
    Pure(PureFockState),
    Mixed(MixedFockState),
}

impl GaussianFockResult {
    pub fn into_mixed(self) -> MixedFockState {
        match self {
            GaussianFockResult::Pure(p) => p.to_mixed(),
            GaussianFockResult::Mixed(m) => m,
        }
    }

    pub fn leakage(&self) -> f64 {
        match self {
            GaussianFockResult::Pure(p) => p.leakage,
            GaussianFockResult::Mixed(m) => m.leakage,
        }
    }
}

/// Gaussianification G(ρ): the Gaussian state with ρ's moments.
pub fn gaussianification<S: QuantumState>(state: &S) -> Result<GaussianState> {
    let (mean, cov) = moments_of_state(state)?;
    GaussianState::new(state.modes(), mean, cov)
}

/// Entropy of one thermal mode with symplectic eigenvalue ν, in nats:
/// h(ν) = ((ν+1)/2)ln((ν+1)/2) − ((ν−1)/2)ln((ν−1)/2).
pub fn thermal_mode_entropy(nu: f64) -> f64 {
    let t = (nu - 1.0) / 2.0;
    if t <= 0.0 {
        return 0.0;
    }
    if t < 5e-7 {
        // series branch: (1+t)ln(1+t) − t ln t ≈ t + t²/2 − t ln t
        return t + t * t / 2.0 - t * t.ln();
    }
    (1.0 + t) * (1.0 + t).ln() - t * t.ln()
}

/// Entropy of a Gaussian state, Σᵢ h(νᵢ).
pub fn gaussian_entropy(g: &GaussianState) -> Result<f64> {
    Ok(symplectic_eigenvalues(&g.cov_mat())?
        .iter()
        .map(|&nu| thermal_mode_entropy(nu))
        .sum())
}

/// Relative entropy of non-Gaussianity, S(G(ρ)) − S(ρ).
pub fn nongaussianity_relative_entropy(state: &MixedFockState) -> Result<f64> {
    let g = gaussianification(state)?;
    let sg = gaussian_entropy(&g)?;
    let srho = crate::fock::spectral_functionals(state, None)?.von_neumann_entropy;
    let val = sg - srho;
    if val < -1e-8 {
        return Err(Error::Numerical(format!(
            "negative non-Gaussianity {val:.3e}"
        )));
    }
    Ok(val.max(0.0))
}

/// Characteristic and Wigner function values of a Gaussian state at a
/// phase-space point r.
#[derive(Debug, Clone)]
pub struct PhaseSpaceValues {
    pub chi: num_complex::Complex<f64>,
    pub wigner: f64,
}

pub fn phase_space_functions(g: &GaussianState, r: &RVec) -> Result<PhaseSpaceValues> {
    let n = g.n;
    if r.len() != 2 * n {
        return Err(Error::DimensionMismatch("phase-space point".into()));
    }
    let v = g.cov_mat();
    let (vals, _) = symmetric_eigen(&v);
    if vals.min() <= 0.0 {
        return Err(Error::InvalidParameter("singular covariance".into()));
    }
    let omega = symplectic_form(n);
    let m = g.mean_vec();
    let or = &omega * r;
    let chi_exp = -0.25 * (or.transpose() * &v * &or)[(0, 0)];
    let chi_phase = or.dot(&m);
    let chi = c(chi_exp, 0.0).exp() * c(0.0, chi_phase).exp();
    let vinv = symmetric_fn(&v, |x| 1.0 / x);
    let diff = r - &m;
    let quad = (diff.transpose() * vinv * &diff)[(0, 0)];
    let det: f64 = vals.iter().product();
    let wigner = (-quad).exp() / (std::f64::consts::PI.powi(n as i32) * det.sqrt());
    Ok(PhaseSpaceValues { chi, wigner })
}

/// Random n×n unitary from a seeded rng, via exp(i K) of a random
/// Hermitian K with Gaussian entries.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMat {
    use rand::distributions::Distribution;
    let normal = rand_distr_normal();
    let mut k = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            k[(i, j)] = c(normal.sample(rng), normal.sample(rng));
        }
    }
    let k = (&k + k.adjoint()) * c(0.5, 0.0);
    exp_i_hermitian(&k, 1.0)
}

fn rand_distr_normal() -> impl rand::distributions::Distribution<f64> {
    // Box–Muller via rand's StandardNormal is in rand_distr; keep it local
    // with a simple inverse-free polar method to avoid another dependency.
    struct Polar;
    impl rand::distributions::Distribution<f64> for Polar {
        fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
            loop {
                let u: f64 = rng.gen_range(-1.0..1.0);
                let v: f64 = rng.gen_range(-1.0..1.0);
                let s = u * u + v * v;
                if s > 0.0 && s < 1.0 {
                    return u * (-2.0 * s.ln() / s).sqrt();
                }
            }
        }
    }
    Polar
}

/// Orthogonal symplectic matrix corresponding to an n×n unitary.
pub fn unitary_to_ortho_symplectic(u: &CMat) -> RMat {
    let n = u.nrows();
    let mut o = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            o[(i, j)] = u[(i, j)].re;
            o[(n + i, n + j)] = u[(i, j)].re;
            o[(i, n + j)] = -u[(i, j)].im;
            o[(n + i, j)] = u[(i, j)].im;
        }
    }
    o
}

/// Random symplectic matrix via the Euler decomposition O₁ Z O₂ with
/// squeezing parameters uniform in [−squeeze_max, squeeze_max].
pub fn random_symplectic<R: Rng>(n: usize, squeeze_max: f64, rng: &mut R) -> RMat {
    let o1 = unitary_to_ortho_symplectic(&random_unitary(n, rng));
    let o2 = unitary_to_ortho_symplectic(&random_unitary(n, rng));
    let mut z = RMat::identity(2 * n, 2 * n);
    for i in 0..n {
        let r: f64 = if squeeze_max > 0.0 {
            rng.gen_range(-squeeze_max..squeeze_max)
        } else {
            0.0
        };
        z[(i, i)] = r.exp();
        z[(n + i, n + i)] = (-r).exp();
    }
    o1 * z * o2
}

/// Random zero-mean pure Gaussian state, V = SSᵀ; deterministic for a
/// fixed rng state.
pub fn random_gaussian_pure<R: Rng>(n: usize, squeeze_max: f64, rng: &mut R) -> GaussianState {
    let s = random_symplectic(n, squeeze_max, rng);
    let cov = &s * s.transpose();
    let cov = (&cov + cov.transpose()) * 0.5;
    GaussianState::new(n, RVec::zeros(2 * n), cov).unwrap()
}
