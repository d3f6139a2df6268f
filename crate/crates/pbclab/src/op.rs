//! Hermitian operator algebra on multipartite finite-dimensional systems:
//! certified constructors, tensor products, partial traces, spectral
//! projections, operator powers, channels and POVMs.

use crate::linalg::{self, cr, CMat};
use crate::{tol, Error, Result};
use nalgebra::DVector;
use num_complex::Complex;

/// Dense Hermitian operator with subsystem bookkeeping. Stored exactly
/// symmetrized as (A + A†)/2.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    mat: CMat,
    dims: Vec<usize>,
}

impl HermitianOperator {
    pub fn new(mat: CMat, dims: Vec<usize>) -> Result<Self> {
        let n = linalg::total_dim(&dims);
        if mat.nrows() != n || mat.ncols() != n || dims.iter().any(|&d| d == 0) {
            return Err(Error::DimMismatch(format!(
                "matrix order {}x{} vs subsystem dims {:?}",
                mat.nrows(),
                mat.ncols(),
                dims
            )));
        }
        let defect = linalg::hermiticity_defect(&mat);
        if defect > tol::HERM * (1.0 + linalg::max_norm(&mat)) {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self {
            mat: linalg::hermitize(&mat),
            dims,
        })
    }

    /// Single-subsystem operator.
    pub fn from_matrix(mat: CMat) -> Result<Self> {
        let d = mat.nrows();
        Self::new(mat, vec![d])
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mat = CMat::from_diagonal(&DVector::from_iterator(n, diag.iter().map(|&x| cr(x))));
        Self {
            mat,
            dims: vec![n],
        }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = linalg::total_dim(&dims);
        Self {
            mat: linalg::identity(n),
            dims,
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.mat)
    }

    /// Reinterpret the subsystem structure without touching the matrix.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        if linalg::total_dim(&dims) != self.dim() {
            return Err(Error::DimMismatch(format!(
                "cannot relabel order-{} operator with dims {:?}",
                self.dim(),
                dims
            )));
        }
        Ok(Self {
            mat: self.mat.clone(),
            dims,
        })
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        linalg::eigh(&self.mat).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let e = self.eigenvalues();
        e[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        let e = self.eigenvalues();
        e[e.len() - 1]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            mat: self.mat.scale(s),
            dims: self.dims.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimMismatch("operator addition".into()));
        }
        Ok(Self {
            mat: &self.mat + &other.mat,
            dims: self.dims.clone(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Tr{A B} for Hermitian A, B (real by symmetry).
    pub fn trace_product(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += (self.mat[(i, j)] * other.mat[(j, i)]).re;
            }
        }
        acc
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue() >= -tol::PSD
    }

    /// 0 ≤ self ≤ I within tolerance.
    pub fn is_test_operator(&self) -> bool {
        let e = self.eigenvalues();
        e[0] >= -tol::PSD && e[e.len() - 1] <= 1.0 + tol::PSD
    }
}

/// Kronecker product of a list of operators; dims concatenate.
pub fn tensor(ops: &[&HermitianOperator]) -> Result<HermitianOperator> {
    if ops.is_empty() {
        return Err(Error::Precondition("tensor of empty list".into()));
    }
    let mats: Vec<&CMat> = ops.iter().map(|o| o.matrix()).collect();
    let mat = linalg::kron_all(&mats);
    let dims: Vec<usize> = ops.iter().flat_map(|o| o.dims().iter().cloned()).collect();
    Ok(HermitianOperator { mat, dims })
}

pub fn tensor_pow(op: &HermitianOperator, n: usize) -> Result<HermitianOperator> {
    if n == 0 {
        return Err(Error::Precondition("tensor power with n = 0".into()));
    }
    let refs: Vec<&HermitianOperator> = std::iter::repeat(op).take(n).collect();
    tensor(&refs)
}

/// Marginal on the kept subsystems (original relative order preserved).
pub fn partial_trace(op: &HermitianOperator, keep: &[usize]) -> Result<HermitianOperator> {
    for &k in keep {
        if k >= op.dims().len() {
            return Err(Error::InvalidIndex {
                index: k,
                count: op.dims().len(),
            });
        }
    }
    let (mat, dims) = linalg::partial_trace(op.matrix(), op.dims(), keep);
    Ok(HermitianOperator { mat, dims })
}

/// Projector onto the span of eigenvectors with eigenvalue ≥ −τ_eig; the
/// numerically-zero eigenspace is included, matching the λ ≥ 0 convention.
pub fn positive_spectral_projection(x: &HermitianOperator) -> HermitianOperator {
    let (vals, vecs) = linalg::eigh(x.matrix());
    let lam_max = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let cut = -tol::EIG_REL * lam_max.max(1e-300);
    let d = CMat::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| cr(if v >= cut { 1.0 } else { 0.0 })),
    ));
    HermitianOperator {
        mat: linalg::hermitize(&(&vecs * d * vecs.adjoint())),
        dims: x.dims().to_vec(),
    }
}

/// Eigenvalue power λ ↦ λ^s on the support, with 0 ↦ 0. s = 0 yields the
/// support projector; s < 0 is the pseudo-power.
pub fn operator_power(a: &HermitianOperator, s: f64) -> HermitianOperator {
    let (vals, vecs) = linalg::eigh(a.matrix());
    let lam_max = vals.iter().cloned().fold(0.0, f64::max);
    let cut = tol::SUPPORT_REL * lam_max.max(1e-300);
    let d = CMat::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| {
            cr(if v <= cut {
                0.0
            } else if s == 0.0 {
                1.0
            } else {
                v.powf(s)
            })
        }),
    ));
    HermitianOperator {
        mat: linalg::hermitize(&(&vecs * d * vecs.adjoint())),
        dims: a.dims().to_vec(),
    }
}

pub fn support_projector(a: &HermitianOperator) -> HermitianOperator {
    operator_power(a, 0.0)
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(a: &HermitianOperator) -> f64 {
    a.eigenvalues().iter().map(|v| v.abs()).sum()
}

/// Density operator: PSD with trace in (0, 1]; subnormalized states are
/// allowed where the formulas permit them.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let min_eig = op.min_eigenvalue();
        if min_eig < -tol::PSD {
            return Err(Error::NotPsd { min_eig });
        }
        let tr = op.trace();
        if tr <= 0.0 || tr > 1.0 + tol::TR {
            return Err(Error::BadTrace {
                actual: tr,
                expected: "(0, 1]".into(),
            });
        }
        Ok(Self { op })
    }

    pub fn from_matrix(mat: CMat, dims: Vec<usize>) -> Result<Self> {
        Self::new(HermitianOperator::new(mat, dims)?)
    }

    pub fn pure(state: &[Complex<f64>], dims: Vec<usize>) -> Result<Self> {
        let v = DVector::from_iterator(state.len(), state.iter().cloned());
        let nrm = v.norm();
        if nrm <= 0.0 {
            return Err(Error::Precondition("zero state vector".into()));
        }
        let v = v.unscale(nrm);
        let mat = &v * v.adjoint();
        Self::from_matrix(mat, dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n = linalg::total_dim(&dims);
        Self {
            op: HermitianOperator {
                mat: linalg::identity(n).scale(1.0 / n as f64),
                dims,
            },
        }
    }

    /// Maximally entangled two-qudit state Φ⁺ on dims (d, d).
    pub fn max_entangled(d: usize) -> Self {
        let mut v = vec![Complex::ZERO; d * d];
        for k in 0..d {
            v[k * d + k] = cr(1.0 / (d as f64).sqrt());
        }
        Self::pure(&v, vec![d, d]).expect("Φ⁺ construction")
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMat {
        self.op.matrix()
    }

    pub fn dims(&self) -> &[usize] {
        self.op.dims()
    }

    pub fn trace(&self) -> f64 {
        self.op.trace()
    }

    pub fn is_normalized(&self) -> bool {
        (self.trace() - 1.0).abs() <= tol::TR
    }

    pub fn marginal(&self, keep: &[usize]) -> Result<DensityOperator> {
        Ok(Self {
            op: partial_trace(&self.op, keep)?,
        })
    }

    pub fn with_dims(&self, dims: Vec<usize>) -> Result<DensityOperator> {
        Ok(Self {
            op: self.op.with_dims(dims)?,
        })
    }

    /// Eigenvalues clipped to [0, ∞).
    pub fn spectrum(&self) -> Vec<f64> {
        self.op
            .eigenvalues()
            .iter()
            .map(|&v| v.max(0.0))
            .collect()
    }
}

/// Tr{ρ σ'} fidelity F(ρ,σ) = (Tr √(√ρ σ √ρ))².
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> f64 {
    let sr = operator_power(rho.op(), 0.5);
    let inner = sr.matrix() * sigma.matrix() * sr.matrix();
    let inner_op = HermitianOperator {
        mat: linalg::hermitize(&inner),
        dims: rho.dims().to_vec(),
    };
    let root = operator_power(&inner_op, 0.5);
    let f = root.trace();
    (f * f).clamp(0.0, 1.0)
}

/// Completeness-certified Kraus family.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    kraus: Vec<CMat>,
    in_dims: Vec<usize>,
    out_dims: Vec<usize>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMat>, in_dims: Vec<usize>, out_dims: Vec<usize>) -> Result<Self> {
        let din = linalg::total_dim(&in_dims);
        let dout = linalg::total_dim(&out_dims);
        if kraus.is_empty() {
            return Err(Error::Precondition("empty Kraus family".into()));
        }
        for k in &kraus {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::DimMismatch(format!(
                    "Kraus operator {}x{}, expected {}x{}",
                    k.nrows(),
                    k.ncols(),
                    dout,
                    din
                )));
            }
        }
        let mut sum = CMat::zeros(din, din);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let defect = linalg::max_norm(&(sum - linalg::identity(din)));
        if defect > tol::CPTP {
            return Err(Error::NotCptp { defect });
        }
        Ok(Self {
            kraus,
            in_dims,
            out_dims,
        })
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = linalg::total_dim(&dims);
        Self {
            kraus: vec![linalg::identity(n)],
            in_dims: dims.clone(),
            out_dims: dims,
        }
    }

    /// Fully depolarizing channel: every input goes to I/d.
    pub fn depolarizing(d: usize) -> Self {
        let mut kraus = Vec::with_capacity(d * d);
        let s = 1.0 / (d as f64).sqrt();
        for i in 0..d {
            for j in 0..d {
                let mut k = CMat::zeros(d, d);
                k[(i, j)] = cr(s);
                kraus.push(k);
            }
        }
        Self {
            kraus,
            in_dims: vec![d],
            out_dims: vec![d],
        }
    }

    /// Replacer channel: constant output σ regardless of input.
    pub fn replacer(sigma: &DensityOperator, in_dim: usize) -> Result<Self> {
        if !sigma.is_normalized() {
            return Err(Error::Precondition("replacer target must be normalized".into()));
        }
        let (vals, vecs) = linalg::eigh(sigma.matrix());
        let dout = sigma.op().dim();
        let mut kraus = Vec::new();
        for e in 0..dout {
            if vals[e] <= 0.0 {
                continue;
            }
            let col = vecs.column(e).clone_owned().scale(vals[e].sqrt());
            for j in 0..in_dim {
                // |v_e⟩⟨j| scaled by √λ_e
                let mut k = CMat::zeros(dout, in_dim);
                for i in 0..dout {
                    k[(i, j)] = col[i];
                }
                kraus.push(k);
            }
        }
        Self::new(kraus, vec![in_dim], sigma.dims().to_vec())
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn in_dims(&self) -> &[usize] {
        &self.in_dims
    }

    pub fn out_dims(&self) -> &[usize] {
        &self.out_dims
    }

    pub fn in_dim(&self) -> usize {
        linalg::total_dim(&self.in_dims)
    }

    pub fn out_dim(&self) -> usize {
        linalg::total_dim(&self.out_dims)
    }

    /// Choi matrix J(N) = (id ⊗ N)(|Γ⟩⟨Γ|) with unnormalized |Γ⟩ = Σ|ii⟩;
    /// dims (in, out).
    pub fn choi(&self) -> CMat {
        let din = self.in_dim();
        let dout = self.out_dim();
        let mut j = CMat::zeros(din * dout, din * dout);
        for k in &self.kraus {
            // vec(K) in row-major (i_in, i_out) layout
            let mut v = nalgebra::DVector::<Complex<f64>>::zeros(din * dout);
            for a in 0..din {
                for b in 0..dout {
                    v[a * dout + b] = k[(b, a)];
                }
            }
            j += &v * v.adjoint();
        }
        j
    }

    /// Tensor product channel acting on the concatenation of the inputs.
    pub fn tensor_with(&self, other: &QuantumChannel) -> QuantumChannel {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(linalg::kron(a, b));
            }
        }
        let mut in_dims = self.in_dims.clone();
        in_dims.extend_from_slice(&other.in_dims);
        let mut out_dims = self.out_dims.clone();
        out_dims.extend_from_slice(&other.out_dims);
        QuantumChannel {
            kraus,
            in_dims,
            out_dims,
        }
    }
}

/// Apply a channel to the subsystems listed in `on` (in that order). The
/// output carries the untouched subsystems first (original order), then the
/// channel output subsystems.
pub fn apply_channel(
    ch: &QuantumChannel,
    rho: &DensityOperator,
    on: &[usize],
) -> Result<DensityOperator> {
    let dims = rho.dims().to_vec();
    for &k in on {
        if k >= dims.len() {
            return Err(Error::InvalidIndex {
                index: k,
                count: dims.len(),
            });
        }
    }
    let sel: Vec<usize> = on.iter().map(|&k| dims[k]).collect();
    if sel != ch.in_dims {
        return Err(Error::DimMismatch(format!(
            "channel input dims {:?} vs selected subsystem dims {:?}",
            ch.in_dims, sel
        )));
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !on.contains(k)).collect();
    // move the selected subsystems to the end, in the order given by `on`
    let mut new_order = rest.clone();
    new_order.extend_from_slice(on);
    let (perm, perm_dims) = linalg::permute_subsystems(rho.matrix(), &dims, &new_order);
    let rest_n: usize = rest.iter().map(|&k| dims[k]).product();
    let rest_id = linalg::identity(rest_n);
    let mut out = CMat::zeros(rest_n * ch.out_dim(), rest_n * ch.out_dim());
    for k in ch.kraus() {
        let kk = linalg::kron(&rest_id, k);
        out += &kk * &perm * kk.adjoint();
    }
    let mut out_dims: Vec<usize> = perm_dims[..rest.len()].to_vec();
    out_dims.extend_from_slice(&ch.out_dims);
    DensityOperator::from_matrix(out, out_dims)
}

/// POVM with an explicit abstain element completing the family to I.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
    abstain: HermitianOperator,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Precondition("empty POVM".into()));
        }
        let dims = elements[0].dims().to_vec();
        let mut sum = HermitianOperator {
            mat: CMat::zeros(elements[0].dim(), elements[0].dim()),
            dims: dims.clone(),
        };
        for e in &elements {
            if e.dims() != dims.as_slice() {
                return Err(Error::DimMismatch("POVM element dims".into()));
            }
            if e.min_eigenvalue() < -tol::PSD {
                return Err(Error::NotPsd {
                    min_eig: e.min_eigenvalue(),
                });
            }
            sum = sum.add(e)?;
        }
        let abstain = HermitianOperator::identity(dims).sub(&sum)?;
        if abstain.min_eigenvalue() < -tol::PSD {
            return Err(Error::NotPsd {
                min_eig: abstain.min_eigenvalue(),
            });
        }
        Ok(Self { elements, abstain })
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn abstain(&self) -> &HermitianOperator {
        &self.abstain
    }
}
