//! Weak typical and relative typical projectors for i.i.d. states,
//! represented in spectrum space (type classes over eigenvalue labels) so
//! the classical checks scale to blocklengths in the hundreds, with dense
//! materialization on demand for honest quantum checks at small n.

use crate::entropy;
use crate::linalg::{self, CMat};
use crate::op::{DensityOperator, HermitianOperator};
use crate::{tol, Error, Result};

const LN2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone)]
struct TypeClass {
    counts: Vec<usize>,
    ln_mult: f64,
}

fn enumerate_types(n: usize, d: usize) -> Result<Vec<TypeClass>> {
    let mut budget_check = 1usize;
    for k in 1..d {
        budget_check = budget_check.saturating_mul(n + k) / k;
    }
    if budget_check > 4_000_000 {
        return Err(Error::BudgetExceeded(format!(
            "{budget_check} type classes at n = {n}, d = {d}"
        )));
    }
    let mut out = Vec::with_capacity(budget_check);
    let mut counts = vec![0usize; d];
    fn rec(rem: usize, slot: usize, counts: &mut Vec<usize>, out: &mut Vec<TypeClass>) {
        let d = counts.len();
        if slot == d - 1 {
            counts[slot] = rem;
            let n: usize = counts.iter().sum();
            let mut ln_mult = linalg::ln_gamma(n as f64 + 1.0);
            for &c in counts.iter() {
                ln_mult -= linalg::ln_gamma(c as f64 + 1.0);
            }
            out.push(TypeClass {
                counts: counts.clone(),
                ln_mult,
            });
            return;
        }
        for c in 0..=rem {
            counts[slot] = c;
            rec(rem - c, slot + 1, counts, out);
        }
    }
    rec(n, 0, &mut counts, &mut out);
    Ok(out)
}

/// Weakly δ-typical projector of ρ^⊗n, stored as the set of typical type
/// classes over the eigenvalue labels of ρ.
#[derive(Debug, Clone)]
pub struct TypicalProjector {
    pub basis: CMat,
    pub spectrum: Vec<f64>,
    pub n: usize,
    pub delta: f64,
    pub entropy: f64,
    typical: Vec<TypeClass>,
    /// Tr{Π ρ^⊗n}
    pub prob: f64,
    /// log₂ Tr{Π}
    pub log2_trace: f64,
}

fn sample_entropy(counts: &[usize], log2_p: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 {
            if log2_p[i] == f64::NEG_INFINITY {
                return f64::INFINITY;
            }
            acc -= c as f64 * log2_p[i];
        }
    }
    acc / n as f64
}

fn log2_clip(x: f64) -> f64 {
    if x < tol::LOG_CLIP {
        f64::NEG_INFINITY
    } else {
        x.log2()
    }
}

pub fn typical_projector(rho: &DensityOperator, n: usize, delta: f64) -> Result<TypicalProjector> {
    if n == 0 || delta <= 0.0 {
        return Err(Error::Precondition("need n ≥ 1 and δ > 0".into()));
    }
    let (vals, basis) = linalg::eigh(rho.matrix());
    let spectrum: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    let log2_p: Vec<f64> = spectrum.iter().map(|&p| log2_clip(p)).collect();
    let h = entropy::spectrum_entropy(&spectrum);
    let types = enumerate_types(n, spectrum.len())?;
    let mut typical = Vec::new();
    let mut ln_probs = Vec::new();
    let mut ln_counts = Vec::new();
    for t in types {
        let hbar = sample_entropy(&t.counts, &log2_p, n);
        if (hbar - h).abs() <= delta + 1e-12 {
            // equipartition is definitional; keep the assertion honest
            let ln_p: f64 = t
                .counts
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c > 0)
                .map(|(i, &c)| c as f64 * log2_p[i] * LN2)
                .sum();
            let per_index_log2 = ln_p / LN2;
            assert!(per_index_log2 >= -(n as f64) * (h + delta) - 1e-6);
            assert!(per_index_log2 <= -(n as f64) * (h - delta) + 1e-6);
            ln_probs.push(t.ln_mult + ln_p);
            ln_counts.push(t.ln_mult);
            typical.push(t);
        }
    }
    let prob = linalg::logsumexp(&ln_probs).exp();
    let log2_trace = linalg::logsumexp(&ln_counts) / LN2;
    // cardinality bound Tr{Π} ≤ 2^{n(H+δ)}
    assert!(log2_trace <= n as f64 * (h + delta) + 1e-6);
    Ok(TypicalProjector {
        basis,
        spectrum,
        n,
        delta,
        entropy: h,
        typical,
        prob,
        log2_trace,
    })
}

impl TypicalProjector {
    /// Membership of an explicit length-n label sequence.
    pub fn contains_index(&self, idx: &[usize]) -> bool {
        if idx.len() != self.n {
            return false;
        }
        let d = self.spectrum.len();
        let mut counts = vec![0usize; d];
        for &i in idx {
            if i >= d {
                return false;
            }
            counts[i] += 1;
        }
        let log2_p: Vec<f64> = self.spectrum.iter().map(|&p| log2_clip(p)).collect();
        let hbar = sample_entropy(&counts, &log2_p, self.n);
        (hbar - self.entropy).abs() <= self.delta + 1e-12
    }

    /// Chebyshev blocklength past which Tr{Πρ^⊗n} ≥ 1 − ε is guaranteed:
    /// n ≥ Var(−log₂ p_X)/(δ²ε).
    pub fn chebyshev_threshold(&self, eps: f64) -> f64 {
        surprisal_variance(&self.spectrum, &self.spectrum) / (self.delta * self.delta * eps)
    }

    /// Dense projector in the computational basis; d^n ≤ 1024.
    pub fn dense_matrix(&self) -> Result<HermitianOperator> {
        let diag = self.dense_diagonal_capped(1024)?;
        dense_from_diag(&self.basis, &diag, self.n)
    }

    /// Diagonal indicator over product indices in the eigenbasis ordering;
    /// d^n ≤ 2^20.
    pub fn dense_diagonal(&self) -> Result<Vec<f64>> {
        self.dense_diagonal_capped(1 << 20)
    }

    fn dense_diagonal_capped(&self, cap: usize) -> Result<Vec<f64>> {
        let d = self.spectrum.len();
        let total = d.checked_pow(self.n as u32).unwrap_or(usize::MAX);
        if total > cap {
            return Err(Error::BudgetExceeded(format!(
                "dense typical projector needs {total} ≤ {cap} product indices"
            )));
        }
        let log2_p: Vec<f64> = self.spectrum.iter().map(|&p| log2_clip(p)).collect();
        let mut out = vec![0.0f64; total];
        let mut idx = vec![0usize; self.n];
        for (flat, slot) in out.iter_mut().enumerate() {
            let mut rem = flat;
            let mut counts = vec![0usize; d];
            for k in (0..self.n).rev() {
                idx[k] = rem % d;
                counts[idx[k]] += 1;
                rem /= d;
            }
            let hbar = sample_entropy(&counts, &log2_p, self.n);
            if (hbar - self.entropy).abs() <= self.delta + 1e-12 {
                *slot = 1.0;
            }
        }
        Ok(out)
    }
}

/// Variance of the surprisal −log₂ q(Y) under the distribution `weight`
/// (both indexed by the same labels). Labels with zero weight drop out.
fn surprisal_variance(weight: &[f64], q: &[f64]) -> f64 {
    let mut mean = 0.0;
    let mut second = 0.0;
    for (&w, &p) in weight.iter().zip(q.iter()) {
        if w > tol::LOG_CLIP && p > tol::LOG_CLIP {
            let s = -p.log2();
            mean += w * s;
            second += w * s * s;
        }
    }
    (second - mean * mean).max(0.0)
}

fn is_diagonal(m: &CMat) -> bool {
    let scale = linalg::max_norm(m).max(1e-300);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j && m[(i, j)].norm() > 1e-14 * scale {
                return false;
            }
        }
    }
    true
}

/// Column index of the single nonzero entry per row when the basis is
/// monomial (permutation times phases), as for already-diagonal inputs.
fn monomial_columns(basis: &CMat) -> Option<Vec<usize>> {
    let d = basis.nrows();
    let mut cols = vec![usize::MAX; d];
    for i in 0..d {
        for j in 0..d {
            if basis[(i, j)].norm_sqr() > 1e-28 {
                if cols[i] != usize::MAX {
                    return None;
                }
                cols[i] = j;
            }
        }
        if cols[i] == usize::MAX || (basis[(i, cols[i])].norm() - 1.0).abs() > 1e-12 {
            return None;
        }
    }
    Some(cols)
}

fn dense_from_diag(basis: &CMat, diag: &[f64], n: usize) -> Result<HermitianOperator> {
    let d = basis.nrows();
    // monomial basis: U D U† stays diagonal, permuted digit by digit
    if let Some(cols) = monomial_columns(basis) {
        let mut m = CMat::zeros(diag.len(), diag.len());
        for row in 0..diag.len() {
            let mut rem = row;
            let mut flat = 0usize;
            let mut weight = 1usize;
            for _ in 0..n {
                flat += cols[rem % d] * weight;
                weight *= d;
                rem /= d;
            }
            m[(row, row)] = linalg::cr(diag[flat]);
        }
        return HermitianOperator::new(m, vec![d; n]);
    }
    let big = linalg::kron_pow(basis, n);
    // scale columns by the diagonal instead of a third dense product
    let mut scaled = big.clone();
    for (j, &x) in diag.iter().enumerate() {
        scaled.column_mut(j).scale_mut(x);
    }
    let m = scaled * big.adjoint();
    HermitianOperator::new(linalg::hermitize(&m), vec![d; n])
}

/// Spectrum-space verification of the projector-trick inequalities
/// Π ≤ 2^{n[H+δ]} ρ^⊗n and Π ≤ 2^{−n[H−δ]/2} [ρ^⊗n]^{−1/2}: both sides are
/// diagonal in the eigenbasis, so the comparison is per typical type.
pub fn check_projector_tricks(rho: &DensityOperator, n: usize, delta: f64) -> Result<bool> {
    let tp = typical_projector(rho, n, delta)?;
    let log2_p: Vec<f64> = tp.spectrum.iter().map(|&p| log2_clip(p)).collect();
    let nh = n as f64;
    for t in &tp.typical {
        let lp: f64 = t
            .counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(i, &c)| c as f64 * log2_p[i])
            .sum();
        // 1 ≤ 2^{n(H+δ)} p(x): p(x) ≥ 2^{−n(H+δ)}
        if lp < -nh * (tp.entropy + delta) - 1e-9 {
            return Ok(false);
        }
        // 1 ≤ 2^{−n(H−δ)/2} p(x)^{−1/2}: p(x) ≤ 2^{−n(H−δ)}
        if lp > -nh * (tp.entropy - delta) + 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Relative typical projector of ρ^⊗n against the spectral decomposition of
/// a PSD operator B: indices y^n over B's eigenvalue labels whose empirical
/// −(1/n)log₂ Π b_{y_i} sits within δ of −Tr{ρ log₂ B}. Ties in the
/// eigenvalues enter only through the eigenvalue itself, so the projector
/// does not depend on the basis chosen inside degenerate blocks.
#[derive(Debug, Clone)]
pub struct RelativeTypicalProjector {
    pub alt_basis: CMat,
    pub alt_eigs: Vec<f64>,
    /// induced measure q(y) = ⟨v_y|ρ|v_y⟩
    pub induced: Vec<f64>,
    pub n: usize,
    pub delta: f64,
    /// −Tr{ρ log₂ B}
    pub expected_score: f64,
    typical: Vec<TypeClass>,
    /// Tr{Π ρ^⊗n}
    pub prob: f64,
}

pub fn relative_typical_projector(
    rho: &DensityOperator,
    b: &HermitianOperator,
    n: usize,
    delta: f64,
) -> Result<RelativeTypicalProjector> {
    if n == 0 || delta <= 0.0 {
        return Err(Error::Precondition("need n ≥ 1 and δ > 0".into()));
    }
    if b.min_eigenvalue() < -tol::PSD {
        return Err(Error::NotPsd {
            min_eig: b.min_eigenvalue(),
        });
    }
    let (bvals, basis) = linalg::eigh(b.matrix());
    let bmax = bvals.iter().cloned().fold(0.0, f64::max);
    let cut = tol::SUPPORT_REL * bmax.max(1e-300);
    let d = bvals.len();
    let mut induced = Vec::with_capacity(d);
    let rv = rho.matrix() * &basis;
    for y in 0..d {
        let q: f64 = basis
            .column(y)
            .iter()
            .zip(rv.column(y).iter())
            .map(|(u, w)| (u.conj() * w).re)
            .sum();
        induced.push(q.max(0.0));
    }
    // Tr{ρ log₂ B} needs ρ to avoid B's kernel
    let mut expected = 0.0;
    for y in 0..d {
        if bvals[y] <= cut {
            if induced[y] > 1e-9 {
                return Err(Error::Precondition(
                    "Tr{ρ log₂ B} undefined: ρ overlaps the kernel of B".into(),
                ));
            }
        } else {
            expected -= induced[y] * bvals[y].log2();
        }
    }
    let score: Vec<f64> = bvals
        .iter()
        .map(|&v| if v <= cut { f64::INFINITY } else { -v.log2() })
        .collect();
    let types = enumerate_types(n, d)?;
    let mut typical = Vec::new();
    let mut ln_probs = Vec::new();
    let lnq: Vec<f64> = induced
        .iter()
        .map(|&q| if q < tol::LOG_CLIP { f64::NEG_INFINITY } else { q.ln() })
        .collect();
    for t in types {
        let mut s = 0.0f64;
        for (y, &c) in t.counts.iter().enumerate() {
            if c > 0 {
                s += c as f64 * score[y];
            }
        }
        let empirical = s / n as f64;
        if (empirical - expected).abs() <= delta + 1e-12 {
            let lq: f64 = t
                .counts
                .iter()
                .enumerate()
                .map(|(y, &c)| if c > 0 { c as f64 * lnq[y] } else { 0.0 })
                .sum();
            ln_probs.push(t.ln_mult + lq);
            typical.push(t);
        }
    }
    let prob = linalg::logsumexp(&ln_probs).exp();
    Ok(RelativeTypicalProjector {
        alt_basis: basis,
        alt_eigs: bvals.iter().cloned().collect(),
        induced,
        n,
        delta,
        expected_score: expected,
        typical,
        prob,
    })
}

impl RelativeTypicalProjector {
    /// Chebyshev blocklength for the unit-probability property:
    /// n ≥ Var_q(−log₂ b_Y)/(δ²ε).
    pub fn chebyshev_threshold(&self, eps: f64) -> f64 {
        surprisal_variance(&self.induced, &self.alt_eigs) / (self.delta * self.delta * eps)
    }

    /// Two-sided diagonal bound
    /// 2^{−n[E+δ]} Π ≤ Π B^⊗n Π ≤ 2^{−n[E−δ]} Π with E = −Tr{ρ log₂ B},
    /// verified per typical type in spectrum space.
    pub fn check_sandwich_bounds(&self) -> bool {
        let nh = self.n as f64;
        let lo = -nh * (self.expected_score + self.delta) - 1e-9;
        let hi = -nh * (self.expected_score - self.delta) + 1e-9;
        for t in &self.typical {
            let mut lb = 0.0f64;
            for (y, &c) in t.counts.iter().enumerate() {
                if c > 0 {
                    lb += c as f64 * self.alt_eigs[y].max(1e-300).log2();
                }
            }
            if lb < lo || lb > hi {
                return false;
            }
        }
        true
    }

    pub fn dense_matrix(&self) -> Result<HermitianOperator> {
        let d = self.alt_eigs.len();
        let total = d.checked_pow(self.n as u32).unwrap_or(usize::MAX);
        if total > 1024 {
            return Err(Error::BudgetExceeded(format!(
                "dense relative typical projector needs {total} ≤ 1024 product indices"
            )));
        }
        let diag = self.dense_diagonal(total, d);
        dense_from_diag(&self.alt_basis, &diag, self.n)
    }

    fn dense_diagonal(&self, total: usize, d: usize) -> Vec<f64> {
        let cutoff = 1e-300f64;
        let score: Vec<f64> = self
            .alt_eigs
            .iter()
            .map(|&v| if v <= cutoff { f64::INFINITY } else { -v.log2() })
            .collect();
        let mut out = vec![0.0f64; total];
        for (flat, slot) in out.iter_mut().enumerate() {
            let mut rem = flat;
            let mut s = 0.0;
            for _ in 0..self.n {
                s += score[rem % d];
                rem /= d;
            }
            if (s / self.n as f64 - self.expected_score).abs() <= self.delta + 1e-12 {
                *slot = 1.0;
            }
        }
        out
    }
}

/// §-style composite-alternative test for a commuting alternative family:
/// T = Π_c Π_ρ Π_c where Π_ρ is the typical projector of ρ and Π_c is the
/// intersection of the relative typical projectors of every alternative
/// (they share an eigenbasis, so the product is an intersection).
/// Returns the dense test, its Type-I error, and the per-alternative
/// Type-II exponents −(1/n)log₂ Tr{T Bᵢ^⊗n}.
pub fn composite_alternative_test(
    rho: &DensityOperator,
    alts: &[HermitianOperator],
    n: usize,
    delta: f64,
) -> Result<(HermitianOperator, f64, Vec<f64>)> {
    if alts.is_empty() {
        return Err(Error::Precondition("empty alternative list".into()));
    }
    let d = rho.op().dim();
    let total = d.checked_pow(n as u32).unwrap_or(usize::MAX);
    if total > 1024 {
        return Err(Error::BudgetExceeded(format!(
            "dense composite test needs {total} ≤ 1024 product indices"
        )));
    }
    let scale = alts
        .iter()
        .map(|b| linalg::max_norm(b.matrix()))
        .fold(0.0, f64::max)
        .max(1e-300);
    for (i, a) in alts.iter().enumerate() {
        for b in &alts[i + 1..] {
            if linalg::commutator_norm(a.matrix(), b.matrix()) > 1e-12 * scale {
                return Err(Error::Precondition(
                    "alternatives must commute pairwise; the non-commuting case is open".into(),
                ));
            }
        }
    }
    for b in alts {
        let div = entropy::relative_entropy(rho, b);
        if !div.is_finite() {
            return Err(Error::Precondition(
                "supp(ρ) must lie inside supp(Bᵢ) for every alternative".into(),
            ));
        }
        if div.value <= 1e-12 {
            return Err(Error::Precondition(
                "min_i D(ρ‖Bᵢ) must be strictly positive".into(),
            ));
        }
    }
    // common eigenbasis of the commuting alternatives
    let mats: Vec<&CMat> = alts.iter().map(|b| b.matrix()).collect();
    let (vbasis, diags) = linalg::joint_eigenbasis(&mats, 1e-9 * scale)
        .ok_or_else(|| Error::Precondition("joint diagonalization failed".into()))?;

    // relative typical indicator for each alternative, intersected
    let mut combined = vec![1.0f64; total];
    for bdiag in &diags {
        // expected score under ρ in the common basis
        let rv = rho.matrix() * &vbasis;
        let mut expected = 0.0;
        for y in 0..d {
            let q: f64 = vbasis
                .column(y)
                .iter()
                .zip(rv.column(y).iter())
                .map(|(u, w)| (u.conj() * w).re)
                .sum();
            let bv = bdiag[y].max(0.0);
            if bv > 1e-300 {
                expected -= q.max(0.0) * bv.log2();
            }
        }
        let score: Vec<f64> = bdiag
            .iter()
            .map(|&v| {
                if v <= 1e-300 {
                    f64::INFINITY
                } else {
                    -v.log2()
                }
            })
            .collect();
        for (flat, slot) in combined.iter_mut().enumerate() {
            let mut rem = flat;
            let mut s = 0.0;
            for _ in 0..n {
                s += score[rem % d];
                rem /= d;
            }
            if (s / n as f64 - expected).abs() > delta + 1e-12 {
                *slot = 0.0;
            }
        }
    }
    let pi_c = dense_from_diag(&vbasis, &combined, n)?;
    let pi_rho = typical_projector(rho, n, delta)?.dense_matrix()?;
    // both projectors are diagonal whenever ρ commutes with the
    // alternatives; the sandwich is then an elementwise product
    let t_mat = if is_diagonal(pi_c.matrix()) && is_diagonal(pi_rho.matrix()) {
        let mut m = CMat::zeros(total, total);
        for i in 0..total {
            let c = pi_c.matrix()[(i, i)];
            m[(i, i)] = c * pi_rho.matrix()[(i, i)] * c;
        }
        m
    } else {
        pi_c.matrix() * pi_rho.matrix() * pi_c.matrix()
    };
    let t = HermitianOperator::new(linalg::hermitize(&t_mat), vec![d; n])?;

    let rho_n = crate::op::tensor_pow(rho.op(), n)?;
    let type1 = (1.0 - t.trace_product(&rho_n)).max(0.0);
    let mut exponents = Vec::with_capacity(alts.len());
    for b in alts {
        let bn = crate::op::tensor_pow(b, n)?;
        let hit = t.trace_product(&bn).max(1e-300);
        exponents.push(-hit.log2() / n as f64);
    }
    Ok((t, type1, exponents))
}
