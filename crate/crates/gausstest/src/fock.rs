//! Truncated Fock-space representation of multi-mode bosonic states and
//! operators, with exact spectral functionals.
//!
//! Layout: `n` modes with a uniform per-mode cutoff `d` (occupations
//! 0..d-1), row-major multi-index order so that mode 0 is the slowest
//! index. Every construction that can lose norm or trace to the cutoff
//! records it in `leakage`.

use crate::linalg::{c, hermitian_eigen, kron_all, CMat, CVec};
use crate::{Error, Result};
use num_complex::Complex;

/// Occupation numbers of one basis state, one entry per mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FockIndex {
    pub k: Vec<usize>,
}

impl FockIndex {
    pub fn new(k: Vec<usize>) -> Self {
        FockIndex { k }
    }

    /// Total photon number |k|.
    pub fn total(&self) -> usize {
        self.k.iter().sum()
    }

    /// Row-major flat index into the d^n amplitude vector.
    pub fn flat(&self, d: usize) -> usize {
        self.k.iter().fold(0, |acc, &ki| acc * d + ki)
    }

    /// Inverse of `flat`.
    pub fn from_flat(mut idx: usize, n: usize, d: usize) -> Self {
        let mut k = vec![0; n];
        for i in (0..n).rev() {
            k[i] = idx % d;
            idx /= d;
        }
        FockIndex { k }
    }
}

/// Pure state on the truncated n-mode Fock space.
#[derive(Debug, Clone)]
pub struct PureFockState {
    pub n: usize,
    pub d: usize,
    pub amplitudes: CVec,
    pub leakage: f64,
}

impl PureFockState {
    /// Wrap an amplitude vector, normalizing it and recording the given
    /// truncation leakage.
    pub fn from_amplitudes(n: usize, d: usize, amplitudes: CVec, leakage: f64) -> Result<Self> {
        if amplitudes.len() != d.pow(n as u32) {
            return Err(Error::DimensionMismatch(format!(
                "amplitude vector length {} != {}^{}",
                amplitudes.len(),
                d,
                n
            )));
        }
        let norm = amplitudes.norm();
        if norm < 1e-12 {
            return Err(Error::InvalidState("zero amplitude vector".into()));
        }
        Ok(PureFockState {
            n,
            d,
            amplitudes: amplitudes / c(norm, 0.0),
            leakage,
        })
    }

    pub fn dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    /// Basis state |k⟩.
    pub fn basis(n: usize, d: usize, k: &FockIndex) -> Result<Self> {
        if k.k.len() != n || k.k.iter().any(|&ki| ki >= d) {
            return Err(Error::InvalidState(format!(
                "occupation {:?} out of range for n={}, d={}",
                k.k, n, d
            )));
        }
        let mut amps = CVec::zeros(d.pow(n as u32));
        amps[k.flat(d)] = c(1.0, 0.0);
        Ok(PureFockState {
            n,
            d,
            amplitudes: amps,
            leakage: 0.0,
        })
    }

    /// Single-mode number state |m⟩.
    pub fn fock(m: usize, d: usize) -> Result<Self> {
        Self::basis(1, d, &FockIndex::new(vec![m]))
    }

    pub fn vacuum(n: usize, d: usize) -> Self {
        Self::basis(n, d, &FockIndex::new(vec![0; n])).unwrap()
    }

    /// Single-mode coherent state |α⟩; leakage is the truncated Poisson tail.
    pub fn coherent(alpha: Complex<f64>, d: usize) -> Self {
        let mut amps = CVec::zeros(d);
        let mut term = c(1.0, 0.0) * (-alpha.norm_sqr() / 2.0).exp();
        for m in 0..d {
            amps[m] = term;
            term = term * alpha / c(((m + 1) as f64).sqrt(), 0.0);
        }
        let kept: f64 = amps.norm_squared();
        PureFockState {
            n: 1,
            d,
            amplitudes: amps / c(kept.sqrt(), 0.0),
            leakage: (1.0 - kept).max(0.0),
        }
    }

    /// Single-mode squeezed vacuum with squeezing parameter r:
    /// amplitudes (2m)!^{1/2}/(2^m m!) (−tanh r)^m / √cosh r on even levels.
    pub fn squeezed_vacuum(r: f64, d: usize) -> Self {
        let mut amps = CVec::zeros(d);
        let t = -r.tanh();
        // c_{2m} with c_0 = 1/sqrt(cosh r), ratio c_{2m+2}/c_{2m} = t·√(2m+1)/√(2m+2)
        let mut coef = 1.0 / r.cosh().sqrt();
        let mut m = 0;
        while 2 * m < d {
            amps[2 * m] = c(coef, 0.0);
            coef *= t * (((2 * m + 1) as f64) / ((2 * m + 2) as f64)).sqrt();
            m += 1;
        }
        let kept = amps.norm_squared();
        PureFockState {
            n: 1,
            d,
            amplitudes: amps / c(kept.sqrt(), 0.0),
            leakage: (1.0 - kept).max(0.0),
        }
    }

    pub fn expectation(&self, op: &CMat) -> Result<Complex<f64>> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator {}x{} on state of dim {}",
                op.nrows(),
                op.ncols(),
                self.dim()
            )));
        }
        Ok((self.amplitudes.adjoint() * op * &self.amplitudes)[(0, 0)])
    }

    pub fn to_mixed(&self) -> MixedFockState {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        MixedFockState {
            n: self.n,
            d: self.d,
            matrix: m,
            leakage: self.leakage,
            clamped: false,
        }
    }

    /// Tensor product, concatenating mode lists (requires equal cutoffs).
    pub fn tensor(&self, other: &PureFockState) -> Result<PureFockState> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch("cutoff mismatch in tensor".into()));
        }
        Ok(PureFockState {
            n: self.n + other.n,
            d: self.d,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
            leakage: self.leakage + other.leakage,
        })
    }

    /// k-fold tensor power ψ^{⊗k}.
    pub fn tensor_power(&self, k: usize) -> PureFockState {
        let mut out = self.clone();
        for _ in 1..k {
            out = out.tensor(self).unwrap();
        }
        out
    }
}

/// Density operator on the truncated n-mode Fock space.
#[derive(Debug, Clone)]
pub struct MixedFockState {
    pub n: usize,
    pub d: usize,
    pub matrix: CMat,
    pub leakage: f64,
    /// Set when negative eigenvalues beyond the floor were clamped away.
    pub clamped: bool,
}

impl MixedFockState {
    pub fn dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    /// Validate and wrap a density matrix. Hermiticity must hold to 1e-12
    /// entrywise; eigenvalues below -1e-10 are rejected, small negatives
    /// are clamped with renormalization and flagged.
    pub fn from_matrix(n: usize, d: usize, matrix: CMat, leakage: f64) -> Result<Self> {
        let dim = d.pow(n as u32);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix {}x{} != dim {}",
                matrix.nrows(),
                matrix.ncols(),
                dim
            )));
        }
        let herm_err = crate::linalg::max_abs(&(&matrix - matrix.adjoint()));
        if herm_err > 1e-12 {
            return Err(Error::InvalidState(format!(
                "not Hermitian: max |M - M†| = {herm_err:.3e}"
            )));
        }
        let m = (&matrix + matrix.adjoint()) * c(0.5, 0.0);
        let (vals, q) = hermitian_eigen(&m);
        if vals.min() < -1e-10 {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                vals.min()
            )));
        }
        let tr: f64 = m.trace().re;
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {} != 1", tr)));
        }
        let mut clamped = false;
        let m = if vals.min() < 0.0 {
            clamped = true;
            let pos = CVec::from_iterator(vals.len(), vals.iter().map(|&v| c(v.max(0.0), 0.0)));
            let s: f64 = pos.iter().map(|z| z.re).sum();
            let mm = &q * CMat::from_diagonal(&pos) * q.adjoint();
            mm / c(s, 0.0)
        } else {
            m
        };
        Ok(MixedFockState {
            n,
            d,
            matrix: m,
            leakage,
            clamped,
        })
    }

    /// Fock-diagonal state from a probability vector over flat indices.
    /// Probabilities are renormalized; the deficit is recorded as leakage.
    pub fn from_diagonal(n: usize, d: usize, probs: &[f64]) -> Result<Self> {
        let dim = d.pow(n as u32);
        if probs.len() != dim {
            return Err(Error::DimensionMismatch("diagonal length".into()));
        }
        if probs.iter().any(|&p| p < -1e-12) {
            return Err(Error::InvalidState("negative probability".into()));
        }
        let s: f64 = probs.iter().sum();
        if s <= 0.0 {
            return Err(Error::InvalidState("zero diagonal".into()));
        }
        let m = CMat::from_diagonal(&CVec::from_iterator(
            dim,
            probs.iter().map(|&p| c(p.max(0.0) / s, 0.0)),
        ));
        Ok(MixedFockState {
            n,
            d,
            matrix: m,
            leakage: (1.0 - s).max(0.0),
            clamped: false,
        })
    }

    /// Single-mode thermal state with mean photon number nbar.
    pub fn thermal(nbar: f64, d: usize) -> Result<Self> {
        if nbar < 0.0 {
            return Err(Error::InvalidParameter("nbar < 0".into()));
        }
        let r = nbar / (nbar + 1.0);
        let probs: Vec<f64> = (0..d).map(|k| r.powi(k as i32) / (nbar + 1.0)).collect();
        Self::from_diagonal(1, d, &probs)
    }

    pub fn expectation(&self, op: &CMat) -> Result<Complex<f64>> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch("operator vs state".into()));
        }
        // Tr[op ρ] without forming the product matrix.
        let mut acc = c(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += op[(i, j)] * self.matrix[(j, i)];
            }
        }
        Ok(acc)
    }

    pub fn tensor(&self, other: &MixedFockState) -> Result<MixedFockState> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch("cutoff mismatch in tensor".into()));
        }
        Ok(MixedFockState {
            n: self.n + other.n,
            d: self.d,
            matrix: self.matrix.kronecker(&other.matrix),
            leakage: self.leakage + other.leakage,
            clamped: self.clamped || other.clamped,
        })
    }

    pub fn tensor_power(&self, k: usize) -> MixedFockState {
        let mut out = self.clone();
        for _ in 1..k {
            out = out.tensor(self).unwrap();
        }
        out
    }

    /// Diagonal of the density matrix as a real probability vector.
    pub fn diagonal_probs(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re.max(0.0)).collect()
    }
}

/// Common interface over pure and mixed states for expectation values.
pub trait QuantumState {
    fn modes(&self) -> usize;
    fn cutoff(&self) -> usize;
    fn state_leakage(&self) -> f64;
    fn expect(&self, op: &CMat) -> Result<Complex<f64>>;
}

impl QuantumState for PureFockState {
    fn modes(&self) -> usize {
        self.n
    }
    fn cutoff(&self) -> usize {
        self.d
    }
    fn state_leakage(&self) -> f64 {
        self.leakage
    }
    fn expect(&self, op: &CMat) -> Result<Complex<f64>> {
        self.expectation(op)
    }
}

impl QuantumState for MixedFockState {
    fn modes(&self) -> usize {
        self.n
    }
    fn cutoff(&self) -> usize {
        self.d
    }
    fn state_leakage(&self) -> f64 {
        self.leakage
    }
    fn expect(&self, op: &CMat) -> Result<Complex<f64>> {
        self.expectation(op)
    }
}

/// Ladder/quadrature operator kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Annihilation,
    Creation,
    Position,
    Momentum,
    Number,
    Energy,
    Custom,
}

#[derive(Debug, Clone)]
pub struct ModeOperator {
    pub matrix: CMat,
    pub kind: OpKind,
}

/// The standard single-mode operator set at cutoff d.
#[derive(Debug, Clone)]
pub struct ModeOperators {
    pub a: ModeOperator,
    pub adag: ModeOperator,
    pub x: ModeOperator,
    pub p: ModeOperator,
    pub num: ModeOperator,
    pub energy: ModeOperator,
}

/// Build a, a†, x = (a+a†)/√2, p = (a−a†)/(i√2), n̂ and the single-mode
/// energy n̂ + ½ at cutoff d. The top Fock level carries the usual
/// truncation artifact in [x,p].
pub fn build_mode_operators(d: usize) -> Result<ModeOperators> {
    if d < 2 {
        return Err(Error::InvalidCutoff(format!("cutoff {} < 2", d)));
    }
    let mut a = CMat::zeros(d, d);
    for k in 1..d {
        a[(k - 1, k)] = c((k as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
    let x = (&a + &adag) * c(inv_sqrt2, 0.0);
    let p = (&a - &adag) * c(0.0, -inv_sqrt2); // (a - a†)/(i√2)
    let num = &adag * &a;
    let energy = &num + CMat::identity(d, d) * c(0.5, 0.0);
    Ok(ModeOperators {
        a: ModeOperator { matrix: a, kind: OpKind::Annihilation },
        adag: ModeOperator { matrix: adag, kind: OpKind::Creation },
        x: ModeOperator { matrix: x, kind: OpKind::Position },
        p: ModeOperator { matrix: p, kind: OpKind::Momentum },
        num: ModeOperator { matrix: num, kind: OpKind::Number },
        energy: ModeOperator { matrix: energy, kind: OpKind::Energy },
    })
}

/// Embed a single-mode operator on mode `mode` of an n-mode space.
pub fn embed_single_mode(op: &CMat, mode: usize, n: usize, d: usize) -> CMat {
    let id = CMat::identity(d, d);
    let parts: Vec<&CMat> = (0..n).map(|i| if i == mode { op } else { &id }).collect();
    kron_all(&parts)
}

/// The 2n quadrature operators (x̂₁..x̂ₙ, p̂₁..p̂ₙ) on the n-mode space.
pub fn quadrature_operators(n: usize, d: usize) -> Result<Vec<CMat>> {
    let ops = build_mode_operators(d)?;
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        out.push(embed_single_mode(&ops.x.matrix, i, n, d));
    }
    for i in 0..n {
        out.push(embed_single_mode(&ops.p.matrix, i, n, d));
    }
    Ok(out)
}

/// Total photon number operator on n modes.
pub fn total_number_operator(n: usize, d: usize) -> Result<CMat> {
    let ops = build_mode_operators(d)?;
    let dim = d.pow(n as u32);
    let mut out = CMat::zeros(dim, dim);
    for i in 0..n {
        out += embed_single_mode(&ops.num.matrix, i, n, d);
    }
    Ok(out)
}

/// Total energy Ê = N̂ + n/2 on n modes.
pub fn total_energy_operator(n: usize, d: usize) -> Result<CMat> {
    let dim = d.pow(n as u32);
    Ok(total_number_operator(n, d)? + CMat::identity(dim, dim) * c(n as f64 / 2.0, 0.0))
}

/// Projector onto even total photon number.
pub fn parity_projector(n: usize, d: usize) -> CMat {
    let dim = d.pow(n as u32);
    CMat::from_diagonal(&CVec::from_iterator(
        dim,
        (0..dim).map(|i| {
            let t = FockIndex::from_flat(i, n, d).total();
            c(if t % 2 == 0 { 1.0 } else { 0.0 }, 0.0)
        }),
    ))
}

/// Partial trace keeping the listed modes (in their original order).
pub fn partial_trace(state: &MixedFockState, keep: &[usize]) -> Result<MixedFockState> {
    if keep.is_empty() {
        return Err(Error::InvalidParameter("empty keep set".into()));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&m| m >= state.n) {
        return Err(Error::InvalidParameter("keep mode out of range".into()));
    }
    let traced: Vec<usize> = (0..state.n).filter(|m| !keep.contains(m)).collect();
    let d = state.d;
    let nk = keep.len();
    let nt = traced.len();
    let dim_k = d.pow(nk as u32);
    let dim_t = d.pow(nt as u32);
    let mut out = CMat::zeros(dim_k, dim_k);
    // assemble full multi-indices from (kept, traced) parts
    let assemble = |kp: &FockIndex, tp: &FockIndex| -> usize {
        let mut full = vec![0usize; state.n];
        for (pos, &m) in keep.iter().enumerate() {
            full[m] = kp.k[pos];
        }
        for (pos, &m) in traced.iter().enumerate() {
            full[m] = tp.k[pos];
        }
        FockIndex::new(full).flat(d)
    };
    for r in 0..dim_k {
        let rk = FockIndex::from_flat(r, nk, d);
        for cidx in 0..dim_k {
            let ck = FockIndex::from_flat(cidx, nk, d);
            let mut acc = c(0.0, 0.0);
            for t in 0..dim_t {
                let tk = FockIndex::from_flat(t, nt, d);
                acc += state.matrix[(assemble(&rk, &tk), assemble(&ck, &tk))];
            }
            out[(r, cidx)] = acc;
        }
    }
    Ok(MixedFockState {
        n: nk,
        d,
        matrix: out,
        leakage: state.leakage,
        clamped: state.clamped,
    })
}

/// Exact trace distance ½‖a−b‖₁ via the spectrum of the difference.
pub fn trace_distance_exact(a: &MixedFockState, b: &MixedFockState) -> Result<f64> {
    if a.n != b.n || a.d != b.d {
        return Err(Error::DimensionMismatch("trace distance arguments".into()));
    }
    let diff = &a.matrix - &b.matrix;
    let (vals, _) = hermitian_eigen(&diff);
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// Spectral functionals of a density matrix.
#[derive(Debug, Clone)]
pub struct SpectralFunctionals {
    pub purity: f64,
    /// von Neumann entropy in nats.
    pub von_neumann_entropy: f64,
    pub fidelity_with: Option<f64>,
}

pub fn spectral_functionals(
    state: &MixedFockState,
    target: Option<&PureFockState>,
) -> Result<SpectralFunctionals> {
    let (vals, _) = hermitian_eigen(&state.matrix);
    if vals.min() < -1e-10 {
        return Err(Error::InvalidState(format!(
            "non-PSD beyond tolerance: {:.3e}",
            vals.min()
        )));
    }
    let purity: f64 = vals.iter().map(|v| v * v).sum();
    let entropy: f64 = vals
        .iter()
        .filter(|&&v| v > 1e-15)
        .map(|&v| -v * v.ln())
        .sum();
    let fidelity_with = match target {
        Some(t) => Some(state.expectation(&(&t.amplitudes * t.amplitudes.adjoint()))?.re),
        None => None,
    };
    Ok(SpectralFunctionals {
        purity,
        von_neumann_entropy: entropy.max(0.0),
        fidelity_with,
    })
}
