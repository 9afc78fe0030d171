//! Copy-rotation unitaries on k = 2, 3 copies, their generators G and G̃,
//! the rotation-invariant projectors and exact acceptance probabilities
//! for the symmetry tests.
//!
//! All operators conserve total photon number, so everything is built per
//! total-photon block: within each block the truncated generator is
//! Hermitian and its exponential is exactly unitary.

use crate::fock::{total_energy_operator, FockIndex, MixedFockState, PureFockState};
use crate::linalg::{c, hermitian_eigen, CMat, CVec};
use crate::{Error, Result, LEAKAGE_BOUND, MAX_DENSE_DIM};
use num_complex::Complex;

/// Cap on the k·n-mode vector dimension for blockwise operators.
const MAX_BLOCK_SPACE_DIM: usize = 65536;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Two-copy rotation in the plane of the copies.
    Plane,
    /// Three-copy rotation about the (1,1,1) axis.
    Diag111,
}

#[derive(Debug, Clone)]
pub struct CopyRotation {
    pub k: usize,
    pub theta: f64,
    pub axis: Axis,
    pub n: usize,
    pub d: usize,
}

impl CopyRotation {
    pub fn two_copy(theta: f64, n: usize, d: usize) -> Self {
        CopyRotation { k: 2, theta, axis: Axis::Plane, n, d }
    }

    pub fn three_copy(theta: f64, n: usize, d: usize) -> Self {
        CopyRotation { k: 3, theta, axis: Axis::Diag111, n, d }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    G,
    Gtilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorVariant {
    Test1,
    Test2,
    Test4,
    Test5,
}

/// Test identifiers of the symmetry-testing suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestId {
    Test1,
    Test2,
    Test2Prime,
    Test3,
    Test4,
    Test5,
}

impl TestId {
    pub fn copies(self) -> usize {
        match self {
            TestId::Test1 | TestId::Test2 | TestId::Test2Prime | TestId::Test3 => 2,
            TestId::Test4 | TestId::Test5 => 3,
        }
    }

    pub fn parse(s: &str) -> Option<TestId> {
        match s {
            "1" => Some(TestId::Test1),
            "2" => Some(TestId::Test2),
            "2'" | "2p" | "2prime" => Some(TestId::Test2Prime),
            "3" => Some(TestId::Test3),
            "4" => Some(TestId::Test4),
            "5" => Some(TestId::Test5),
            _ => None,
        }
    }
}

/// Operator stored per total-photon block of the k·n-mode Fock space.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    pub dim: usize,
    pub modes: usize,
    pub d: usize,
    /// (flat indices of the block, dense block matrix)
    pub blocks: Vec<(Vec<usize>, CMat)>,
}

impl BlockOperator {
    pub fn apply(&self, v: &CVec) -> CVec {
        let mut out = CVec::zeros(self.dim);
        for (idx, m) in &self.blocks {
            let sub = CVec::from_iterator(idx.len(), idx.iter().map(|&i| v[i]));
            let res = m * sub;
            for (pos, &i) in idx.iter().enumerate() {
                out[i] = res[pos];
            }
        }
        out
    }

    pub fn expectation(&self, v: &CVec) -> Complex<f64> {
        let w = self.apply(v);
        (v.adjoint() * w)[(0, 0)]
    }

    pub fn to_dense(&self) -> Result<CMat> {
        if self.dim > MAX_DENSE_DIM {
            return Err(Error::DimensionBudget { requested: self.dim, max: MAX_DENSE_DIM });
        }
        let mut out = CMat::zeros(self.dim, self.dim);
        for (idx, m) in &self.blocks {
            for (pi, &i) in idx.iter().enumerate() {
                for (pj, &j) in idx.iter().enumerate() {
                    out[(i, j)] = m[(pi, pj)];
                }
            }
        }
        Ok(out)
    }

    /// Apply a function blockwise (blocks share the same index sets).
    fn map_blocks(&self, f: impl Fn(&CMat) -> CMat) -> BlockOperator {
        BlockOperator {
            dim: self.dim,
            modes: self.modes,
            d: self.d,
            blocks: self.blocks.iter().map(|(i, m)| (i.clone(), f(m))).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorOperator {
    pub which: Which,
    pub op: BlockOperator,
}

#[derive(Debug, Clone)]
pub struct InvariantProjector {
    pub variant: ProjectorVariant,
    pub op: BlockOperator,
    pub nullspace_tol: f64,
}

/// Hopping terms of the copy-rotation generator: the generator is
/// Σ c·i·(a_from a†_to) over listed (from, to) mode pairs together with
/// the Hermitian-conjugate partner carrying −c.
fn generator_hops(which: Which, k: usize, n: usize) -> Vec<(usize, usize)> {
    // mode (copy c, mode i) sits at position c·n + i
    let pairs: &[(usize, usize)] = match which {
        Which::G => &[(0, 1)],
        Which::Gtilde => &[(0, 1), (1, 2), (2, 0)],
    };
    let mut hops = Vec::new();
    for &(c1, c2) in pairs {
        assert!(c1 < k && c2 < k);
        for i in 0..n {
            hops.push((c1 * n + i, c2 * n + i));
        }
    }
    hops
}

/// Enumerate total-photon blocks of the m-mode cutoff-d space.
fn photon_blocks(m: usize, d: usize) -> Vec<Vec<usize>> {
    let dim = d.pow(m as u32);
    let max_t = m * (d - 1);
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); max_t + 1];
    for idx in 0..dim {
        let t = FockIndex::from_flat(idx, m, d).total();
        blocks[t].push(idx);
    }
    blocks
}

/// Build the generator G (k = 2) or G̃ (k = 3) as a block operator on
/// k·n modes at cutoff d: G = i Σᵢ (aᵢ ⊗ aᵢ† − aᵢ† ⊗ aᵢ), and
/// G̃ = G⁽¹²⁾ + G⁽²³⁾ + G⁽³¹⁾.
pub fn rotation_generator(which: Which, n: usize, d: usize) -> Result<GeneratorOperator> {
    let k = match which {
        Which::G => 2,
        Which::Gtilde => 3,
    };
    let m = k * n;
    let dim = d.pow(m as u32);
    if dim > MAX_BLOCK_SPACE_DIM {
        return Err(Error::DimensionBudget { requested: dim, max: MAX_BLOCK_SPACE_DIM });
    }
    let hops = generator_hops(which, k, n);
    let mut blocks = Vec::new();
    for idx in photon_blocks(m, d) {
        if idx.is_empty() {
            continue;
        }
        let local: std::collections::HashMap<usize, usize> =
            idx.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let mut mat = CMat::zeros(idx.len(), idx.len());
        for (col, &flat) in idx.iter().enumerate() {
            let ki = FockIndex::from_flat(flat, m, d);
            for &(from, to) in &hops {
                // +i a_from a†_to and −i a†_from a_to
                if ki.k[from] > 0 && ki.k[to] + 1 < d {
                    let coef = (ki.k[from] as f64).sqrt() * ((ki.k[to] + 1) as f64).sqrt();
                    let mut kk = ki.clone();
                    kk.k[from] -= 1;
                    kk.k[to] += 1;
                    let row = local[&kk.flat(d)];
                    mat[(row, col)] += c(0.0, coef);
                }
                if ki.k[to] > 0 && ki.k[from] + 1 < d {
                    let coef = (ki.k[to] as f64).sqrt() * ((ki.k[from] + 1) as f64).sqrt();
                    let mut kk = ki.clone();
                    kk.k[to] -= 1;
                    kk.k[from] += 1;
                    let row = local[&kk.flat(d)];
                    mat[(row, col)] -= c(0.0, coef);
                }
            }
        }
        blocks.push((idx, mat));
    }
    Ok(GeneratorOperator {
        which,
        op: BlockOperator { dim, modes: m, d, blocks },
    })
}

/// Copy-rotation unitary: exp(−iθG) for k = 2, exp(−iθG̃/√3) for k = 3.
pub fn copy_rotation_unitary(rot: &CopyRotation) -> Result<BlockOperator> {
    let (which, scale) = match (rot.k, rot.axis) {
        (2, Axis::Plane) => (Which::G, 1.0),
        (3, Axis::Diag111) => (Which::Gtilde, 1.0 / 3f64.sqrt()),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "unsupported copy rotation k={} axis={:?}",
                rot.k, rot.axis
            )))
        }
    };
    let g = rotation_generator(which, rot.n, rot.d)?;
    let theta = rot.theta;
    Ok(g.op.map_blocks(|m| {
        let (vals, q) = hermitian_eigen(m);
        let phases = CVec::from_iterator(
            vals.len(),
            vals.iter().map(|&v| c(0.0, -theta * scale * v).exp()),
        );
        &q * CMat::from_diagonal(&phases) * q.adjoint()
    }))
}

/// Swap operator exchanging the two copies (each a dⁿ-dim factor).
fn swap_two_copies(n: usize, d: usize) -> BlockOperator {
    let m = 2 * n;
    let dim = d.pow(m as u32);
    let single = d.pow(n as u32);
    let mut blocks = Vec::new();
    for idx in photon_blocks(m, d) {
        if idx.is_empty() {
            continue;
        }
        let local: std::collections::HashMap<usize, usize> =
            idx.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let mut mat = CMat::zeros(idx.len(), idx.len());
        for (col, &flat) in idx.iter().enumerate() {
            let (a, b) = (flat / single, flat % single);
            let row = local[&(b * single + a)];
            mat[(row, col)] = c(1.0, 0.0);
        }
        blocks.push((idx, mat));
    }
    BlockOperator { dim, modes: m, d, blocks }
}

/// Projector onto the invariant subspace of the given test.
///
/// Test 1: ker(G) ∩ Sym²; Test 2: eigenvalue-1 space of U_{π/4}
/// (generator eigenvalues ≡ 0 mod 8); Test 4: ker(G̃); Test 5:
/// eigenvalue-1 space of U_{π/3} (scaled generator eigenvalues ≡ 0 mod 6).
/// Eigenspaces are selected from the blockwise generator spectrum, which
/// makes the projector exactly Hermitian and idempotent.
pub fn invariant_projector(variant: ProjectorVariant, n: usize, d: usize) -> Result<InvariantProjector> {
    let tol = 1e-7;
    let (which, scale, modulus): (Which, f64, Option<f64>) = match variant {
        ProjectorVariant::Test1 => (Which::G, 1.0, None),
        ProjectorVariant::Test2 => (Which::G, 1.0, Some(8.0)),
        ProjectorVariant::Test4 => (Which::Gtilde, 1.0 / 3f64.sqrt(), None),
        ProjectorVariant::Test5 => (Which::Gtilde, 1.0 / 3f64.sqrt(), Some(6.0)),
    };
    let g = rotation_generator(which, n, d)?;
    if g.op.dim > MAX_DENSE_DIM {
        return Err(Error::DimensionBudget { requested: g.op.dim, max: MAX_DENSE_DIM });
    }
    let swap = if variant == ProjectorVariant::Test1 {
        Some(swap_two_copies(n, d))
    } else {
        None
    };
    let mut blocks = Vec::new();
    for (bi, (idx, gm)) in g.op.blocks.iter().enumerate() {
        let (vals, q) = hermitian_eigen(gm);
        let keep: Vec<usize> = (0..vals.len())
            .filter(|&i| {
                let lam = scale * vals[i];
                match modulus {
                    None => lam.abs() < tol,
                    Some(md) => {
                        let r = (lam / md - (lam / md).round()).abs() * md;
                        r < tol
                    }
                }
            })
            .collect();
        let mut basis: Vec<CVec> = keep.iter().map(|&i| q.column(i).into_owned()).collect();
        if let Some(sw) = &swap {
            // intersect with the symmetric subspace: symmetrize then
            // re-orthonormalize, dropping annihilated directions
            let sw_block = &sw.blocks[bi].1;
            let mut sym_basis: Vec<CVec> = Vec::new();
            for v in &basis {
                let mut w = (v + sw_block * v) * c(0.5, 0.0);
                for u in &sym_basis {
                    let ov = (u.adjoint() * &w)[(0, 0)];
                    w -= u * ov;
                }
                if w.norm() > 1e-8 {
                    let nw = w.norm();
                    sym_basis.push(w / c(nw, 0.0));
                }
            }
            basis = sym_basis;
        }
        let mut p = CMat::zeros(idx.len(), idx.len());
        for v in &basis {
            p += v * v.adjoint();
        }
        blocks.push((idx.clone(), p));
    }
    Ok(InvariantProjector {
        variant,
        op: BlockOperator { dim: g.op.dim, modes: g.op.modes, d, blocks },
        nullspace_tol: tol,
    })
}

/// Outcome record of the Test 3 product check.
#[derive(Debug, Clone)]
pub struct Test3Outcome {
    pub sigma: MixedFockState,
    pub purity: f64,
    pub swap_test_accept_prob: f64,
}

fn check_leakage(state: &PureFockState) -> Result<()> {
    if state.leakage > LEAKAGE_BOUND {
        return Err(Error::LeakageBudget { achieved: state.leakage, budget: LEAKAGE_BOUND });
    }
    Ok(())
}

/// σ = Tr₂[U_{π/4} ψ⊗ψ U†]; for Gaussian ψ the marginal is pure, so the
/// swap-test acceptance ½(1 + Tr σ²) reaches 1.
pub fn test3_product_check(state: &PureFockState) -> Result<Test3Outcome> {
    check_leakage(state)?;
    let dim2 = state.dim() * state.dim();
    if dim2 > MAX_DENSE_DIM {
        return Err(Error::DimensionBudget { requested: dim2, max: MAX_DENSE_DIM });
    }
    let u = copy_rotation_unitary(&CopyRotation::two_copy(
        std::f64::consts::FRAC_PI_4,
        state.n,
        state.d,
    ))?;
    let two = state.tensor_power(2);
    let rotated = u.apply(&two.amplitudes);
    let psi2 = PureFockState {
        n: 2 * state.n,
        d: state.d,
        amplitudes: rotated,
        leakage: two.leakage,
    };
    let keep: Vec<usize> = (0..state.n).collect();
    let sigma = crate::fock::partial_trace(&psi2.to_mixed(), &keep)?;
    let purity = (&sigma.matrix * &sigma.matrix).trace().re;
    Ok(Test3Outcome {
        sigma,
        purity,
        swap_test_accept_prob: 0.5 * (1.0 + purity),
    })
}

/// Exact acceptance probability of a symmetry test on a pure state.
pub fn acceptance_probability(test: TestId, state: &PureFockState) -> Result<f64> {
    check_leakage(state)?;
    let n = state.n;
    let d = state.d;
    match test {
        TestId::Test1 | TestId::Test2 | TestId::Test4 | TestId::Test5 => {
            let variant = match test {
                TestId::Test1 => ProjectorVariant::Test1,
                TestId::Test2 => ProjectorVariant::Test2,
                TestId::Test4 => ProjectorVariant::Test4,
                TestId::Test5 => ProjectorVariant::Test5,
                _ => unreachable!(),
            };
            let p = invariant_projector(variant, n, d)?;
            let v = state.tensor_power(test.copies());
            Ok(p.op.expectation(&v.amplitudes).re.clamp(0.0, 1.0))
        }
        TestId::Test2Prime => {
            // ancilla-0 Born probability of the controlled-U_{π/4} circuit:
            // ⟨Q⟩ with Q = ¼(I+U)(I+U†), i.e. ‖(v + Uv)/2‖²
            let u = copy_rotation_unitary(&CopyRotation::two_copy(
                std::f64::consts::FRAC_PI_4,
                n,
                d,
            ))?;
            let v = state.tensor_power(2);
            let w = (&v.amplitudes + u.apply(&v.amplitudes)) * c(0.5, 0.0);
            Ok(w.norm_squared().clamp(0.0, 1.0))
        }
        TestId::Test3 => Ok(test3_product_check(state)?.swap_test_accept_prob),
    }
}

/// Second and fourth moments of the rotation generator on ρ^{⊗k},
/// computed by factorizing every term product into per-copy ordered
/// quadrature products, so only single-copy expectation tensors are
/// needed (no (dⁿ)ᵏ-dimensional operators).
#[derive(Debug, Clone)]
pub struct GeneratorMoments {
    pub g2: f64,
    pub g4: f64,
    /// Fourth moment of the rotation-normalized generator (G for two
    /// copies, G̃/√3 for three); this is the quantity the energy bound
    /// constrains.
    pub g4_rotation_normalized: f64,
    /// g4_rotation_normalized ≤ (4⟨Ê²⟩ + 2n)² check.
    pub bound_ok: bool,
    pub e2: f64,
}

/// Symbolic generator terms: sign and (copy, quadrature index) factors,
/// with quadratures indexed (x₁..xₙ, p₁..pₙ). G = Σᵢ x̂ᵢ⊗p̂ᵢ − p̂ᵢ⊗x̂ᵢ.
fn generator_terms(which: Which, n: usize) -> Vec<(f64, [(usize, usize); 2])> {
    let pairs: &[(usize, usize)] = match which {
        Which::G => &[(0, 1)],
        Which::Gtilde => &[(0, 1), (1, 2), (2, 0)],
    };
    let mut terms = Vec::new();
    for &(a, b) in pairs {
        for i in 0..n {
            terms.push((1.0, [(a, i), (b, n + i)]));
            terms.push((-1.0, [(a, n + i), (b, i)]));
        }
    }
    terms
}

/// Single-copy ordered-product expectation tensors up to fourth order.
struct ExpectationTensors {
    n2: usize, // 2n
    t1: Vec<Complex<f64>>,
    t2: Vec<Complex<f64>>,
    t3: Vec<Complex<f64>>,
    t4: Vec<Complex<f64>>,
}

impl ExpectationTensors {
    fn build(rho: &MixedFockState) -> Result<Self> {
        let n = rho.n;
        let n2 = 2 * n;
        let quads = crate::fock::quadrature_operators(n, rho.d)?;
        let mut m2 = Vec::with_capacity(n2 * n2);
        for a in 0..n2 {
            for b in 0..n2 {
                m2.push(&quads[a] * &quads[b]);
            }
        }
        let p2: Vec<CMat> = m2.iter().map(|m| &rho.matrix * m).collect();
        let trdot = |x: &CMat, y: &CMat| -> Complex<f64> {
            // Tr[X Y]
            let mut acc = c(0.0, 0.0);
            for i in 0..x.nrows() {
                for j in 0..x.ncols() {
                    acc += x[(i, j)] * y[(j, i)];
                }
            }
            acc
        };
        let t1: Vec<Complex<f64>> = quads.iter().map(|q| trdot(&rho.matrix, q)).collect();
        let t2: Vec<Complex<f64>> = p2.iter().map(|p| p.trace()).collect();
        let mut t3 = vec![c(0.0, 0.0); n2 * n2 * n2];
        let mut t4 = vec![c(0.0, 0.0); n2 * n2 * n2 * n2];
        for a in 0..n2 {
            for b in 0..n2 {
                let pab = &p2[a * n2 + b];
                for e in 0..n2 {
                    t3[(a * n2 + b) * n2 + e] = trdot(pab, &quads[e]);
                    for f in 0..n2 {
                        t4[((a * n2 + b) * n2 + e) * n2 + f] = trdot(pab, &m2[e * n2 + f]);
                    }
                }
            }
        }
        Ok(ExpectationTensors { n2, t1, t2, t3, t4 })
    }

    fn lookup(&self, seq: &[usize]) -> Complex<f64> {
        match seq.len() {
            0 => c(1.0, 0.0),
            1 => self.t1[seq[0]],
            2 => self.t2[seq[0] * self.n2 + seq[1]],
            3 => self.t3[(seq[0] * self.n2 + seq[1]) * self.n2 + seq[2]],
            4 => self.t4[((seq[0] * self.n2 + seq[1]) * self.n2 + seq[2]) * self.n2 + seq[3]],
            _ => unreachable!(),
        }
    }
}

pub fn generator_moments(rho: &MixedFockState, which: Which) -> Result<GeneratorMoments> {
    if rho.leakage > LEAKAGE_BOUND {
        return Err(Error::LeakageBudget { achieved: rho.leakage, budget: LEAKAGE_BOUND });
    }
    let n = rho.n;
    let k = match which {
        Which::G => 2,
        Which::Gtilde => 3,
    };
    let tensors = ExpectationTensors::build(rho)?;
    if which == Which::G {
        // Lemma hypothesis: the two-copy generator identity needs zero mean
        let mean_mag = tensors.t1.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if mean_mag > 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "G moments require a zero-mean state (|⟨R⟩| = {mean_mag:.3e})"
            )));
        }
    }
    let terms = generator_terms(which, n);
    let contract = |combo: &[usize]| -> Complex<f64> {
        let mut sign = 1.0;
        let mut seqs: Vec<Vec<usize>> = vec![Vec::new(); k];
        for &t in combo {
            let (s, factors) = &terms[t];
            sign *= s;
            for &(copy, quad) in factors {
                seqs[copy].push(quad);
            }
        }
        let mut val = c(sign, 0.0);
        for s in &seqs {
            val *= tensors.lookup(s);
        }
        val
    };
    let nt = terms.len();
    let mut g2 = c(0.0, 0.0);
    for t1 in 0..nt {
        for t2 in 0..nt {
            g2 += contract(&[t1, t2]);
        }
    }
    let mut g4 = c(0.0, 0.0);
    for t1 in 0..nt {
        for t2 in 0..nt {
            for t3 in 0..nt {
                for t4 in 0..nt {
                    g4 += contract(&[t1, t2, t3, t4]);
                }
            }
        }
    }
    if g2.im.abs() > 1e-7 || g4.im.abs() > 1e-6 {
        return Err(Error::Numerical(format!(
            "generator moments not real: im(g2)={:.2e}, im(g4)={:.2e}",
            g2.im, g4.im
        )));
    }
    let e_op = total_energy_operator(n, rho.d)?;
    let e2 = rho.expectation(&(&e_op * &e_op))?.re;
    let bound = (4.0 * e2 + 2.0 * n as f64).powi(2);
    // the energy inequality constrains the generator of a unit-speed
    // rotation: G itself for two copies, G̃/√3 for three
    let scale4 = match which {
        Which::G => 1.0,
        Which::Gtilde => 1.0 / 9.0,
    };
    let g4_norm = g4.re * scale4;
    Ok(GeneratorMoments {
        g2: g2.re,
        g4: g4.re,
        g4_rotation_normalized: g4_norm,
        bound_ok: g4_norm <= bound + 1e-6,
        e2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn rotation_theta_zero_is_identity() {
        let u = copy_rotation_unitary(&CopyRotation::two_copy(0.0, 1, 6)).unwrap();
        let dense = u.to_dense().unwrap();
        assert!(max_abs(&(dense - CMat::identity(36, 36))) < 1e-12);
    }

    #[test]
    fn rotation_blocks_unitary_and_additive() {
        let u1 = copy_rotation_unitary(&CopyRotation::two_copy(0.3, 1, 8)).unwrap();
        let u2 = copy_rotation_unitary(&CopyRotation::two_copy(0.5, 1, 8)).unwrap();
        let u12 = copy_rotation_unitary(&CopyRotation::two_copy(0.8, 1, 8)).unwrap();
        let (d1, d2, d12) = (
            u1.to_dense().unwrap(),
            u2.to_dense().unwrap(),
            u12.to_dense().unwrap(),
        );
        assert!(max_abs(&(&d1 * d1.adjoint() - CMat::identity(64, 64))) < 1e-9);
        assert!(max_abs(&(&d1 * &d2 - d12)) < 1e-8);
    }

    #[test]
    fn beam_splitter_diagonal_elements() {
        // ⟨m,0|U_{π/4}|m,0⟩ = 2^{−m/2}
        let d = 12;
        let u = copy_rotation_unitary(&CopyRotation::two_copy(FRAC_PI_4, 1, d)).unwrap();
        let dense = u.to_dense().unwrap();
        for m in 0..=10 {
            let idx = FockIndex::new(vec![m, 0]).flat(d);
            assert_abs_diff_eq!(
                dense[(idx, idx)].norm(),
                2f64.powf(-(m as f64) / 2.0),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn three_copy_diagonal_elements() {
        // ⟨m,0,0|U_{π/3}|m,0,0⟩ = (2/3)^m
        let d = 9;
        let u = copy_rotation_unitary(&CopyRotation::three_copy(FRAC_PI_3, 1, d)).unwrap();
        let dense = u.to_dense().unwrap();
        for m in 0..=7 {
            let idx = FockIndex::new(vec![m, 0, 0]).flat(d);
            assert_abs_diff_eq!(
                dense[(idx, idx)].norm(),
                (2f64 / 3.0).powi(m as i32),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn half_turn_is_swap_with_parity() {
        // k=2, θ=π/2: |a,b⟩ → ±|b,a⟩ on a basis sample
        let d = 6;
        let u = copy_rotation_unitary(&CopyRotation::two_copy(
            std::f64::consts::FRAC_PI_2,
            1,
            d,
        ))
        .unwrap();
        let dense = u.to_dense().unwrap();
        for (a, b) in [(0, 0), (1, 0), (2, 1), (0, 3)] {
            let col = FockIndex::new(vec![a, b]).flat(d);
            let row = FockIndex::new(vec![b, a]).flat(d);
            assert_abs_diff_eq!(dense[(row, col)].norm(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn generator_annihilates_vacuum() {
        let g = rotation_generator(Which::G, 1, 5).unwrap();
        let v = PureFockState::vacuum(2, 5);
        let out = g.op.apply(&v.amplitudes);
        assert!(out.norm() < 1e-14);
        let gt = rotation_generator(Which::Gtilde, 1, 4).unwrap();
        let v3 = PureFockState::vacuum(3, 4);
        assert!(gt.op.apply(&v3.amplitudes).norm() < 1e-14);
    }

    #[test]
    fn generator_matches_quadrature_form() {
        // G = Σᵢ x̂ᵢ⊗p̂ᵢ − p̂ᵢ⊗x̂ᵢ entrywise, away from the cutoff edge
        let d = 6;
        let quads = crate::fock::quadrature_operators(1, d).unwrap();
        let expected = quads[0].kronecker(&quads[1]) - quads[1].kronecker(&quads[0]);
        let g = rotation_generator(Which::G, 1, d).unwrap().op.to_dense().unwrap();
        // compare on states with total photons ≤ d−2 (both constructions
        // agree exactly there)
        for i in 0..36 {
            for j in 0..36 {
                let ti = FockIndex::from_flat(i, 2, d).total();
                let tj = FockIndex::from_flat(j, 2, d).total();
                if ti < d - 1 && tj < d - 1 {
                    assert!(
                        (g[(i, j)] - expected[(i, j)]).norm() < 1e-12,
                        "mismatch at ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn generator_two_photon_nullspace() {
        // block {|20⟩,|11⟩,|02⟩}: kernel is (|20⟩+|02⟩)/√2
        let d = 4;
        let g = rotation_generator(Which::G, 1, d).unwrap();
        let mut v = CVec::zeros(16);
        v[FockIndex::new(vec![2, 0]).flat(d)] = c(1.0 / 2f64.sqrt(), 0.0);
        v[FockIndex::new(vec![0, 2]).flat(d)] = c(1.0 / 2f64.sqrt(), 0.0);
        assert!(g.op.apply(&v).norm() < 1e-12);
        // and |11⟩ is not in the kernel
        let mut w = CVec::zeros(16);
        w[FockIndex::new(vec![1, 1]).flat(d)] = c(1.0, 0.0);
        assert!(g.op.apply(&w).norm() > 0.5);
    }

    #[test]
    fn exp_generator_reproduces_unitary() {
        let d = 7;
        let g = rotation_generator(Which::G, 1, d).unwrap();
        let theta = 0.4;
        let via_blocks = copy_rotation_unitary(&CopyRotation::two_copy(theta, 1, d)).unwrap();
        let dense_g = g.op.to_dense().unwrap();
        let direct = crate::linalg::exp_i_hermitian(&dense_g, -theta);
        assert!(max_abs(&(via_blocks.to_dense().unwrap() - direct)) < 1e-8);
    }

    #[test]
    fn projector_idempotent_hermitian_contained() {
        let d = 6;
        let p1 = invariant_projector(ProjectorVariant::Test1, 1, d).unwrap();
        let p2 = invariant_projector(ProjectorVariant::Test2, 1, d).unwrap();
        let m1 = p1.op.to_dense().unwrap();
        let m2 = p2.op.to_dense().unwrap();
        assert!(max_abs(&(&m1 * &m1 - &m1)) < 1e-9);
        assert!(max_abs(&(&m2 * &m2 - &m2)) < 1e-9);
        assert!(max_abs(&(&m1 - m1.adjoint())) < 1e-10);
        // subspace containment: P1 P2 = P1
        assert!(max_abs(&(&m1 * &m2 - &m1)) < 1e-8);

        let d3 = 5;
        let p4 = invariant_projector(ProjectorVariant::Test4, 1, d3).unwrap();
        let p5 = invariant_projector(ProjectorVariant::Test5, 1, d3).unwrap();
        let m4 = p4.op.to_dense().unwrap();
        let m5 = p5.op.to_dense().unwrap();
        assert!(max_abs(&(&m4 * &m4 - &m4)) < 1e-9);
        assert!(max_abs(&(&m5 * &m5 - &m5)) < 1e-9);
        assert!(max_abs(&(&m4 * &m5 - &m4)) < 1e-8);
    }

    #[test]
    fn test2_projector_equals_group_average_on_complete_blocks() {
        let d = 6;
        let p2 = invariant_projector(ProjectorVariant::Test2, 1, d).unwrap();
        let mut avg = CMat::zeros(36, 36);
        for l in 0..8 {
            let u = copy_rotation_unitary(&CopyRotation::two_copy(
                FRAC_PI_4 * l as f64,
                1,
                d,
            ))
            .unwrap();
            avg += u.to_dense().unwrap();
        }
        avg /= c(8.0, 0.0);
        let dense = p2.op.to_dense().unwrap();
        for i in 0..36 {
            for j in 0..36 {
                let ti = FockIndex::from_flat(i, 2, d).total();
                let tj = FockIndex::from_flat(j, 2, d).total();
                if ti <= d - 1 && tj <= d - 1 {
                    assert!(
                        (dense[(i, j)] - avg[(i, j)]).norm() < 1e-8,
                        "mismatch at ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn test2_discrete_values() {
        // ⟨1,1|P|1,1⟩ = 0 and ⟨4,0|P|4,0⟩ = 3/8
        let d = 10;
        let p2 = invariant_projector(ProjectorVariant::Test2, 1, d).unwrap();
        let mut v11 = CVec::zeros(100);
        v11[FockIndex::new(vec![1, 1]).flat(d)] = c(1.0, 0.0);
        assert_abs_diff_eq!(p2.op.expectation(&v11).re, 0.0, epsilon = 1e-9);
        let mut v40 = CVec::zeros(100);
        v40[FockIndex::new(vec![4, 0]).flat(d)] = c(1.0, 0.0);
        assert_abs_diff_eq!(p2.op.expectation(&v40).re, 3.0 / 8.0, epsilon = 1e-9);
    }

    #[test]
    fn acceptance_on_fixtures() {
        // perfect completeness on vacuum for every projector test
        let vac = PureFockState::vacuum(1, 8);
        for t in [TestId::Test1, TestId::Test2, TestId::Test2Prime] {
            assert!(acceptance_probability(t, &vac).unwrap() > 1.0 - 1e-9);
        }
        let vac5 = PureFockState::vacuum(1, 6);
        for t in [TestId::Test4, TestId::Test5] {
            assert!(acceptance_probability(t, &vac5).unwrap() > 1.0 - 1e-9);
        }
        // Test 2 on |1⟩ rejects, Test 5 on |1⟩ accepts with 5/9
        let f1 = PureFockState::fock(1, 8).unwrap();
        assert_abs_diff_eq!(
            acceptance_probability(TestId::Test2, &f1).unwrap(),
            0.0,
            epsilon = 1e-9
        );
        let f1s = PureFockState::fock(1, 6).unwrap();
        assert_abs_diff_eq!(
            acceptance_probability(TestId::Test5, &f1s).unwrap(),
            5.0 / 9.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn test5_on_fock1_matches_group_average_oracle() {
        // brute-force (1/6)Σ U^l expectation oracle
        let d = 6;
        let f1 = PureFockState::fock(1, d).unwrap();
        let v = f1.tensor_power(3);
        let mut acc = c(0.0, 0.0);
        for l in 0..6 {
            let u = copy_rotation_unitary(&CopyRotation::three_copy(
                FRAC_PI_3 * l as f64,
                1,
                d,
            ))
            .unwrap();
            acc += (v.amplitudes.adjoint() * u.apply(&v.amplitudes))[(0, 0)];
        }
        assert_abs_diff_eq!(acc.re / 6.0, 5.0 / 9.0, epsilon = 1e-9);
    }

    #[test]
    fn robustness_expansion_coefficient() {
        // ψ_ε = √(1−ε²)|0⟩ + ε|4⟩: rejection of Test 2 ≈ 0.5 ε²
        let d = 10;
        for eps in [0.05f64, 0.1] {
            let mut amps = CVec::zeros(d);
            amps[0] = c((1.0 - eps * eps).sqrt(), 0.0);
            amps[4] = c(eps, 0.0);
            let psi = PureFockState::from_amplitudes(1, d, amps, 0.0).unwrap();
            let rej = 1.0 - acceptance_probability(TestId::Test2, &psi).unwrap();
            let coeff = rej / (eps * eps);
            assert!((0.45..=0.55).contains(&coeff), "eps={eps}: coeff={coeff}");
        }
    }

    #[test]
    fn test3_purity_witness() {
        let coh = PureFockState::coherent(c(0.5, 0.0), 14);
        let out = test3_product_check(&coh).unwrap();
        assert_abs_diff_eq!(out.purity, 1.0, epsilon = 1e-6);
        let vac = PureFockState::vacuum(1, 8);
        let out_v = test3_product_check(&vac).unwrap();
        assert_abs_diff_eq!(out_v.purity, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(out_v.sigma.matrix[(0, 0)].re, 1.0, epsilon = 1e-10);
        let f1 = PureFockState::fock(1, 10).unwrap();
        let out_f = test3_product_check(&f1).unwrap();
        assert!(out_f.purity < 0.99);
    }

    #[test]
    fn generator_moments_vacuum_and_thermal() {
        let vac = PureFockState::vacuum(1, 10).to_mixed();
        let gm = generator_moments(&vac, Which::G).unwrap();
        assert_abs_diff_eq!(gm.g2, 0.0, epsilon = 1e-10);
        assert!(gm.bound_ok);
        // thermal n̄=1 (ν=3): ⟨G²⟩ = ½(ν²−1) = 4
        let th = MixedFockState::thermal(1.0, 40).unwrap();
        let gm2 = generator_moments(&th, Which::G).unwrap();
        assert_abs_diff_eq!(gm2.g2, 4.0, epsilon = 1e-7);
    }

    #[test]
    fn gtilde_moments_on_fock1() {
        // |1⟩: ⟨G̃²⟩ = (3/2)(9−1) = 12 and ⟨G̃⁴⟩ ≤ (4·2.25+2)² = 121
        let f1 = PureFockState::fock(1, 14).unwrap().to_mixed();
        let gm = generator_moments(&f1, Which::Gtilde).unwrap();
        assert_abs_diff_eq!(gm.g2, 12.0, epsilon = 1e-8);
        assert!(
            gm.g4_rotation_normalized <= 121.0 + 1e-6,
            "normalized g4 = {}",
            gm.g4_rotation_normalized
        );
        assert!(gm.bound_ok);
    }

    #[test]
    fn gtilde_g4_matches_dense_oracle() {
        // cross-check the factorized contraction against a dense G̃ matrix
        let d = 8;
        let f1 = PureFockState::fock(1, d).unwrap();
        let gm = generator_moments(&f1.to_mixed(), Which::Gtilde).unwrap();
        let g = rotation_generator(Which::Gtilde, 1, d).unwrap();
        let dense = g.op.to_dense().unwrap();
        let v = f1.tensor_power(3);
        let g2v = &dense * &dense * &v.amplitudes;
        let oracle_g2 = (v.amplitudes.adjoint() * &g2v)[(0, 0)].re;
        let oracle_g4 = g2v.norm_squared();
        assert_abs_diff_eq!(gm.g2, oracle_g2, epsilon = 1e-8);
        assert_abs_diff_eq!(gm.g4, oracle_g4, epsilon = 1e-6);
    }

    #[test]
    fn g_moments_match_dense_oracle_two_modes() {
        let d = 6;
        let th = MixedFockState::thermal(0.4, d).unwrap();
        let mut th2 = th.tensor(&MixedFockState::thermal(0.2, d).unwrap()).unwrap();
        // algebraic agreement check: ignore the (renormalized) thermal tail
        th2.leakage = 0.0;
        let gm = generator_moments(&th2, Which::G).unwrap();
        let g = rotation_generator(Which::G, 2, d).unwrap();
        let dense = g.op.to_dense().unwrap();
        let rho2 = th2.tensor(&th2).unwrap();
        let oracle_g2 = rho2.expectation(&(&dense * &dense)).unwrap().re;
        assert_abs_diff_eq!(gm.g2, oracle_g2, epsilon = 1e-6);
        // identity: ½Σ(ν²−1), ν = (1.8, 1.4)
        let expect = 0.5 * ((1.8f64 * 1.8 - 1.0) + (1.4f64 * 1.4 - 1.0));
        // cutoff d=6 truncates the thermal tails, so compare loosely here;
        // the tight check lives in the acceptance suite at larger d
        assert_abs_diff_eq!(gm.g2, expect, epsilon = 5e-2);
    }

    #[test]
    fn g_requires_zero_mean() {
        let coh = PureFockState::coherent(c(0.8, 0.0), 20).to_mixed();
        assert!(matches!(
            generator_moments(&coh, Which::G),
            Err(Error::InvalidParameter(_))
        ));
        // but G̃ accepts nonzero mean
        assert!(generator_moments(&coh, Which::Gtilde).is_ok());
    }

    #[test]
    fn monotonicity_test1_le_test2() {
        let d = 8;
        for state in [
            PureFockState::fock(1, d).unwrap(),
            PureFockState::coherent(c(0.4, 0.1), d * 2),
            PureFockState::squeezed_vacuum(0.25, d * 2),
        ] {
            let a1 = acceptance_probability(TestId::Test1, &state).unwrap();
            let a2 = acceptance_probability(TestId::Test2, &state).unwrap();
            assert!(a1 <= a2 + 1e-9, "a1={a1}, a2={a2}");
        }
    }
}
