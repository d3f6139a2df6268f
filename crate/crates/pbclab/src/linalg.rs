//! Dense complex matrix kernels: Hermitian eigendecomposition, subsystem
//! index arithmetic (tensor, embed, permute, partial trace) and matrix
//! functions of Hermitian operators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

pub fn cr(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

/// Largest absolute entry.
pub fn max_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_norm(&(m - m.adjoint()))
}

/// Exact symmetrization (A + A†)/2.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn commutator_norm(a: &CMat, b: &CMat) -> f64 {
    max_norm(&(a * b - b * a))
}

pub fn trace_re(m: &CMat) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// Returns (eigenvalues, unitary with eigenvectors as columns).
pub fn eigh(m: &CMat) -> (DVector<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), CMat::zeros(0, 0));
    }
    let se = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let mut vecs = CMat::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        vecs.set_column(new, &se.eigenvectors.column(old));
    }
    (vals, vecs)
}

/// U diag(f(λ_i)) U† for Hermitian input.
pub fn herm_func(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let d = CMat::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| cr(f(v))),
    ));
    &vecs * d * vecs.adjoint()
}

/// Kronecker product respecting row-major subsystem ordering.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_all(mats: &[&CMat]) -> CMat {
    assert!(!mats.is_empty());
    let mut out = mats[0].clone();
    for m in &mats[1..] {
        out = out.kronecker(m);
    }
    out
}

/// n-fold Kronecker power.
pub fn kron_pow(a: &CMat, n: usize) -> CMat {
    assert!(n >= 1);
    let mut out = a.clone();
    for _ in 1..n {
        out = out.kronecker(a);
    }
    out
}

/// Row-major strides for subsystem dimensions.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn decompose(mut idx: usize, dims: &[usize], st: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize; dims.len()];
    for k in 0..dims.len() {
        out[k] = idx / st[k];
        idx %= st[k];
    }
    out
}

/// Reorder subsystems. `new_order[j]` is the old subsystem sitting at new
/// slot `j`; returns the permuted matrix and the new dims vector.
pub fn permute_subsystems(m: &CMat, dims: &[usize], new_order: &[usize]) -> (CMat, Vec<usize>) {
    assert_eq!(new_order.len(), dims.len());
    let n = total_dim(dims);
    assert_eq!(m.nrows(), n);
    let new_dims: Vec<usize> = new_order.iter().map(|&o| dims[o]).collect();
    let new_st = strides(&new_dims);
    let old_st = strides(dims);
    // map new flat index -> old flat index
    let map: Vec<usize> = (0..n)
        .map(|idx| {
            let digits = decompose(idx, &new_dims, &new_st);
            digits
                .iter()
                .zip(new_order.iter())
                .map(|(&d, &o)| d * old_st[o])
                .sum()
        })
        .collect();
    let mut out = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = m[(map[i], map[j])];
        }
    }
    (out, new_dims)
}

/// Place an operator acting on the subsystems listed in `positions` (in that
/// order) into the full product space, identity elsewhere.
pub fn embed(op: &CMat, op_dims: &[usize], positions: &[usize], full_dims: &[usize]) -> CMat {
    assert_eq!(op_dims.len(), positions.len());
    for (k, &p) in positions.iter().enumerate() {
        assert_eq!(full_dims[p], op_dims[k], "embed dim mismatch");
    }
    let n = total_dim(full_dims);
    let full_st = strides(full_dims);
    let op_st = strides(op_dims);
    let rest: Vec<usize> = (0..full_dims.len())
        .filter(|k| !positions.contains(k))
        .collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&k| full_dims[k]).collect();
    let rest_st = strides(&rest_dims);
    let rest_n = total_dim(&rest_dims);
    let op_n = total_dim(op_dims);
    let mut out = CMat::zeros(n, n);
    for a in 0..op_n {
        let ad = decompose(a, op_dims, &op_st);
        for b in 0..op_n {
            let v = op[(a, b)];
            if v == Complex::ZERO {
                continue;
            }
            let bd = decompose(b, op_dims, &op_st);
            for r in 0..rest_n {
                let rd = decompose(r, &rest_dims, &rest_st);
                let mut i = 0usize;
                let mut j = 0usize;
                for (k, &p) in positions.iter().enumerate() {
                    i += ad[k] * full_st[p];
                    j += bd[k] * full_st[p];
                }
                for (k, &p) in rest.iter().enumerate() {
                    i += rd[k] * full_st[p];
                    j += rd[k] * full_st[p];
                }
                out[(i, j)] = v;
            }
        }
    }
    out
}

/// Partial trace keeping the subsystems in `keep` (original relative order).
pub fn partial_trace(m: &CMat, dims: &[usize], keep: &[usize]) -> (CMat, Vec<usize>) {
    let full_st = strides(dims);
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let keep_st = strides(&keep_dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let tr_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let tr_st = strides(&tr_dims);
    let kn = total_dim(&keep_dims);
    let tn = total_dim(&tr_dims);
    let mut out = CMat::zeros(kn, kn);
    for i in 0..kn {
        let id = decompose(i, &keep_dims, &keep_st);
        for j in 0..kn {
            let jd = decompose(j, &keep_dims, &keep_st);
            let mut acc = Complex::ZERO;
            for t in 0..tn {
                let td = decompose(t, &tr_dims, &tr_st);
                let mut fi = 0usize;
                let mut fj = 0usize;
                for (k, &p) in keep.iter().enumerate() {
                    fi += id[k] * full_st[p];
                    fj += jd[k] * full_st[p];
                }
                for (k, &p) in traced.iter().enumerate() {
                    fi += td[k] * full_st[p];
                    fj += td[k] * full_st[p];
                }
                acc += m[(fi, fj)];
            }
            out[(i, j)] = acc;
        }
    }
    (out, keep_dims)
}

/// Common eigenbasis for a family of pairwise-commuting Hermitian matrices,
/// found by successive refinement: start from one block covering the whole
/// space, diagonalize each operator inside every block, split blocks by
/// eigenvalue. Returns the basis and each operator's diagonal in it, or None
/// if some off-diagonal residue above `residue_tol` survives.
pub fn joint_eigenbasis(mats: &[&CMat], residue_tol: f64) -> Option<(CMat, Vec<Vec<f64>>)> {
    assert!(!mats.is_empty());
    let n = mats[0].nrows();
    let mut basis = identity(n);
    // groups of column indices of `basis` spanning invariant blocks
    let mut groups: Vec<Vec<usize>> = vec![(0..n).collect()];
    for m in mats {
        let mut next = Vec::new();
        for g in &groups {
            if g.len() == 1 {
                next.push(g.clone());
                continue;
            }
            let sub = CMat::from_fn(n, g.len(), |i, j| basis[(i, g[j])]);
            let block = sub.adjoint() * *m * &sub;
            let (vals, vecs) = eigh(&block);
            let new_cols = &sub * &vecs;
            for (j, &col) in g.iter().enumerate() {
                basis.set_column(col, &new_cols.column(j));
            }
            // split the group wherever consecutive eigenvalues separate
            let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
            let mut cur = vec![g[0]];
            for j in 1..g.len() {
                if (vals[j] - vals[j - 1]).abs() > 1e-9 * scale {
                    next.push(std::mem::take(&mut cur));
                }
                cur.push(g[j]);
            }
            next.push(cur);
        }
        groups = next;
    }
    let mut diags = Vec::with_capacity(mats.len());
    for m in mats {
        let rotated = basis.adjoint() * *m * &basis;
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(rotated[(i, j)].norm());
                }
            }
        }
        if off > residue_tol {
            return None;
        }
        diags.push((0..n).map(|i| rotated[(i, i)].re).collect());
    }
    Some((basis, diags))
}

/// log-sum-exp of a slice, -inf safe.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// ln Γ(x) via Lanczos; used for ln-binomial weights.
pub fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat2(a: f64, b: f64, c: f64, d: f64) -> CMat {
        CMat::from_row_slice(2, 2, &[cr(a), cr(b), cr(c), cr(d)])
    }

    #[test]
    fn eigh_reconstructs() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[cr(1.0), Complex::new(0.0, -0.5), Complex::new(0.0, 0.5), cr(2.0)],
        );
        let (vals, vecs) = eigh(&m);
        let d = CMat::from_diagonal(&DVector::from_iterator(2, vals.iter().map(|&v| cr(v))));
        let rec = &vecs * d * vecs.adjoint();
        assert!(max_norm(&(rec - m)) < 1e-12);
        assert!(vals[0] <= vals[1]);
    }

    #[test]
    fn kron_and_partial_trace_roundtrip() {
        let a = mat2(0.7, 0.0, 0.0, 0.3);
        let b = mat2(0.2, 0.1, 0.1, 0.8);
        let ab = kron(&a, &b);
        let (ta, _) = partial_trace(&ab, &[2, 2], &[0]);
        assert!(max_norm(&(ta - a.clone())) < 1e-14);
        let (tb, _) = partial_trace(&ab, &[2, 2], &[1]);
        assert!(max_norm(&(tb - b.clone().scale(1.0))) < 1e-14);
    }

    #[test]
    fn permute_swap_matches_kron_order() {
        let a = mat2(1.0, 0.0, 0.0, 2.0);
        let b = mat2(3.0, 1.0, 1.0, 4.0);
        let ab = kron(&a, &b);
        let (ba, dims) = permute_subsystems(&ab, &[2, 2], &[1, 0]);
        assert_eq!(dims, vec![2, 2]);
        assert!(max_norm(&(ba - kron(&b, &a))) < 1e-14);
    }

    #[test]
    fn embed_middle_subsystem() {
        let x = mat2(0.0, 1.0, 1.0, 0.0);
        let full = embed(&x, &[2], &[1], &[2, 2, 2]);
        let expect = kron(&kron(&identity(2), &x), &identity(2));
        assert!(max_norm(&(full - expect)) < 1e-14);
    }

    #[test]
    fn joint_eigenbasis_commuting_pair() {
        // two commuting non-diagonal matrices sharing an eigenbasis
        let h = mat2(1.0, 1.0, 1.0, 1.0).scale(0.5);
        let a = h.scale(3.0) + identity(2);
        let b = h.scale(-2.0) + identity(2).scale(5.0);
        let got = joint_eigenbasis(&[&a, &b], 1e-10);
        let (basis, diags) = got.expect("commuting family");
        let defect = max_norm(&(&basis * basis.adjoint() - identity(2)));
        assert!(defect < 1e-12);
        for (m, d) in [(&a, &diags[0]), (&b, &diags[1])] {
            let rec = &basis
                * CMat::from_diagonal(&DVector::from_iterator(2, d.iter().map(|&v| cr(v))))
                * basis.adjoint();
            assert!(max_norm(&(rec - m.clone())) < 1e-10);
        }
        // non-commuting pair is rejected
        let x = mat2(0.0, 1.0, 1.0, 0.0);
        let z = mat2(1.0, 0.0, 0.0, -1.0);
        assert!(joint_eigenbasis(&[&x, &z], 1e-10).is_none());
    }

    #[test]
    fn ln_binomial_small_values() {
        assert!((ln_binomial(4, 2) - 6f64.ln()).abs() < 1e-12);
        assert!((ln_binomial(10, 0)).abs() < 1e-12);
    }
}
