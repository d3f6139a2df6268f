//! Entropic and divergence functionals, all in bits: von Neumann and Rényi
//! entropies, relative entropies (plain, Rényi, sandwiched), mutual
//! informations, the relative entropy variance and the Chernoff distance.

use crate::linalg::{self, CMat};
use crate::op::{self, DensityOperator, HermitianOperator};
use crate::{tol, Error, Result};

/// Divergence value in bits; infinite on support violation.
#[derive(Debug, Clone, Copy)]
pub struct DivergenceResult {
    pub value: f64,
    pub support_violation: bool,
}

impl DivergenceResult {
    fn finite(value: f64) -> Self {
        Self {
            value,
            support_violation: false,
        }
    }

    fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            support_violation: true,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Shannon entropy of a spectrum, 0·log 0 = 0.
pub fn spectrum_entropy(lams: &[f64]) -> f64 {
    -lams
        .iter()
        .map(|&l| if l < tol::LOG_CLIP { 0.0 } else { l * l.log2() })
        .sum::<f64>()
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    spectrum_entropy(&rho.spectrum())
}

/// H(A|B) = H(AB) − H(B) where `cond` lists the conditioning subsystems.
pub fn conditional_entropy(rho: &DensityOperator, cond: &[usize]) -> Result<f64> {
    if cond.is_empty() {
        return Ok(von_neumann_entropy(rho));
    }
    let rho_b = rho.marginal(cond)?;
    Ok(von_neumann_entropy(rho) - von_neumann_entropy(&rho_b))
}

pub fn renyi2_entropy(rho: &DensityOperator) -> f64 {
    let purity = rho.op().trace_product(rho.op());
    -purity.max(tol::LOG_CLIP).log2()
}

/// Collision conditional entropy
/// H₂(A|B) = −log₂ Tr{ρ_AB ρ_B^{−1/2} ρ_AB ρ_B^{−1/2}}
/// with the pseudo-inverse square root on the support of ρ_B.
pub fn collision_conditional_entropy(rho: &DensityOperator, cond: &[usize]) -> Result<f64> {
    if cond.is_empty() {
        return Ok(renyi2_entropy(rho));
    }
    let dims = rho.dims().to_vec();
    let rho_b = rho.marginal(cond)?;
    let b_inv_sqrt = op::operator_power(rho_b.op(), -0.5);
    let full = linalg::embed(b_inv_sqrt.matrix(), rho_b.dims(), cond, &dims);
    let m = rho.matrix() * &full * rho.matrix() * &full;
    let val = linalg::trace_re(&m);
    Ok(-val.max(tol::LOG_CLIP).log2())
}

fn support_weight_outside(rho: &DensityOperator, sigma: &HermitianOperator) -> f64 {
    let pi = op::support_projector(sigma);
    rho.trace() - rho.op().trace_product(&pi)
}

/// Operator log₂ on the support, 0 elsewhere.
fn support_log2(a: &HermitianOperator) -> CMat {
    let (vals, vecs) = linalg::eigh(a.matrix());
    let lam_max = vals.iter().cloned().fold(0.0, f64::max);
    let cut = tol::SUPPORT_REL * lam_max.max(1e-300);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter()
            .map(|&v| linalg::cr(if v <= cut { 0.0 } else { v.log2() })),
    ));
    linalg::hermitize(&(&vecs * d * vecs.adjoint()))
}

/// D(ρ‖σ) = Tr{ρ(log₂ρ − log₂σ)}; +∞ when supp(ρ) ⊄ supp(σ).
pub fn relative_entropy(rho: &DensityOperator, sigma: &HermitianOperator) -> DivergenceResult {
    if support_weight_outside(rho, sigma) > 1e-9 {
        return DivergenceResult::infinite();
    }
    let delta = support_log2(rho.op()) - support_log2(sigma);
    let mut acc = 0.0;
    let m = rho.matrix() * &delta;
    acc += linalg::trace_re(&m);
    DivergenceResult::finite(acc)
}

/// λ^e with the support convention 0^e = 0 (so λ^0 is the support indicator).
fn pow_supp(lam: f64, e: f64, cut: f64) -> f64 {
    if lam <= cut {
        0.0
    } else {
        lam.powf(e)
    }
}

/// Eigenvalues and squared-overlap matrix w_ij = |⟨u_i|v_j⟩|² for two
/// Hermitian operators; Tr{A^s B^t} = Σ_ij w_ij a_i^s b_j^t.
fn overlap_table(a: &HermitianOperator, b: &HermitianOperator) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let (av, au) = linalg::eigh(a.matrix());
    let (bv, bu) = linalg::eigh(b.matrix());
    let x = au.adjoint() * bu;
    let n = av.len();
    let w: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| x[(i, j)].norm_sqr()).collect())
        .collect();
    (av.iter().cloned().collect(), bv.iter().cloned().collect(), w)
}

fn cross_trace(avals: &[f64], bvals: &[f64], w: &[Vec<f64>], s: f64, t: f64) -> f64 {
    let acut = tol::SUPPORT_REL * avals.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let bcut = tol::SUPPORT_REL * bvals.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let mut acc = 0.0;
    for (i, &a) in avals.iter().enumerate() {
        let pa = pow_supp(a, s, acut);
        if pa == 0.0 {
            continue;
        }
        for (j, &b) in bvals.iter().enumerate() {
            let pb = pow_supp(b, t, bcut);
            if pb != 0.0 {
                acc += w[i][j] * pa * pb;
            }
        }
    }
    acc
}

/// Petz Rényi relative entropy D_α(ρ‖σ) = (1/(α−1)) log₂ Tr{ρ^α σ^{1−α}}.
pub fn renyi_relative_entropy(
    rho: &DensityOperator,
    sigma: &HermitianOperator,
    alpha: f64,
) -> Result<DivergenceResult> {
    if alpha <= 0.0 || (alpha - 1.0).abs() < 1e-12 {
        return Err(Error::Precondition(
            "Rényi order must be in (0,1) ∪ (1,∞); use relative_entropy at α = 1".into(),
        ));
    }
    if alpha > 1.0 && support_weight_outside(rho, sigma) > 1e-9 {
        return Ok(DivergenceResult::infinite());
    }
    let (av, bv, w) = overlap_table(rho.op(), sigma);
    let q = cross_trace(&av, &bv, &w, alpha, 1.0 - alpha);
    if q <= 0.0 {
        return Ok(DivergenceResult::infinite());
    }
    Ok(DivergenceResult::finite(q.log2() / (alpha - 1.0)))
}

/// Sandwiched Rényi relative entropy
/// D̃_α(ρ‖σ) = (1/(α−1)) log₂ Tr{(σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α}.
pub fn sandwiched_renyi(
    rho: &DensityOperator,
    sigma: &HermitianOperator,
    alpha: f64,
) -> Result<DivergenceResult> {
    if alpha <= 0.0 || (alpha - 1.0).abs() < 1e-12 {
        return Err(Error::Precondition(
            "Rényi order must be in (0,1) ∪ (1,∞); use relative_entropy at α = 1".into(),
        ));
    }
    if alpha > 1.0 && support_weight_outside(rho, sigma) > 1e-9 {
        return Ok(DivergenceResult::infinite());
    }
    let sig_op = HermitianOperator::new(sigma.matrix().clone(), sigma.dims().to_vec())?;
    let half = op::operator_power(&sig_op, (1.0 - alpha) / (2.0 * alpha));
    let inner = half.matrix() * rho.matrix() * half.matrix();
    let inner_op = HermitianOperator::new(linalg::hermitize(&inner), sigma.dims().to_vec())?;
    let powered = op::operator_power(&inner_op, alpha);
    let q = powered.trace();
    if q <= 0.0 {
        return Ok(DivergenceResult::infinite());
    }
    Ok(DivergenceResult::finite(q.log2() / (alpha - 1.0)))
}

/// ρ_A ⊗ ρ_B re-embedded so the subsystem ordering matches the input state.
pub fn product_of_marginals(
    rho: &DensityOperator,
    part_a: &[usize],
    part_b: &[usize],
) -> Result<DensityOperator> {
    let k = rho.dims().len();
    let mut seen = vec![false; k];
    for &i in part_a.iter().chain(part_b.iter()) {
        if i >= k {
            return Err(Error::InvalidIndex { index: i, count: k });
        }
        if seen[i] {
            return Err(Error::Precondition("overlapping partition".into()));
        }
        seen[i] = true;
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::Precondition("partition must cover all subsystems".into()));
    }
    let ra = rho.marginal(part_a)?;
    let rb = rho.marginal(part_b)?;
    let prod = op::tensor(&[ra.op(), rb.op()])?;
    let concat: Vec<usize> = part_a.iter().chain(part_b.iter()).cloned().collect();
    // new slot j (original subsystem j) holds the subsystem at position
    // `concat.index_of(j)` of the tensor product
    let new_order: Vec<usize> = (0..k)
        .map(|j| concat.iter().position(|&c| c == j).unwrap())
        .collect();
    let (m, dims) = linalg::permute_subsystems(prod.matrix(), prod.dims(), &new_order);
    DensityOperator::from_matrix(m, dims)
}

/// I(A;B) = D(ρ_AB ‖ ρ_A ⊗ ρ_B).
pub fn mutual_information(rho: &DensityOperator, part_a: &[usize], part_b: &[usize]) -> Result<f64> {
    let prod = product_of_marginals(rho, part_a, part_b)?;
    let d = relative_entropy(rho, prod.op());
    Ok(d.value)
}

/// I_α(A;B) = D_α(ρ_AB ‖ ρ_A ⊗ ρ_B).
pub fn renyi_mutual_information(
    rho: &DensityOperator,
    part_a: &[usize],
    part_b: &[usize],
    alpha: f64,
) -> Result<DivergenceResult> {
    let prod = product_of_marginals(rho, part_a, part_b)?;
    renyi_relative_entropy(rho, prod.op(), alpha)
}

/// V(ρ‖σ) = Tr{ρ [log₂ρ − log₂σ]²} − D(ρ‖σ)².
pub fn relative_entropy_variance(rho: &DensityOperator, sigma: &HermitianOperator) -> Result<f64> {
    if support_weight_outside(rho, sigma) > 1e-9 {
        return Err(Error::Precondition(
            "relative entropy variance needs supp(ρ) ⊆ supp(σ)".into(),
        ));
    }
    let delta = support_log2(rho.op()) - support_log2(sigma);
    let d = linalg::trace_re(&(rho.matrix() * &delta));
    let second = linalg::trace_re(&(rho.matrix() * &delta * &delta));
    Ok((second - d * d).max(0.0))
}

/// Chernoff distance sup_{s∈[0,1]} −log₂ Tr{A^s B^{1−s}} and its maximizer.
#[derive(Debug, Clone, Copy)]
pub struct ChernoffResult {
    pub value: f64,
    pub s_star: f64,
    pub infinite: bool,
}

pub fn chernoff_distance(a: &HermitianOperator, b: &HermitianOperator) -> Result<ChernoffResult> {
    if a.min_eigenvalue() < -tol::PSD || b.min_eigenvalue() < -tol::PSD {
        return Err(Error::NotPsd {
            min_eig: a.min_eigenvalue().min(b.min_eigenvalue()),
        });
    }
    if a.trace() <= 0.0 || b.trace() <= 0.0 {
        return Err(Error::Precondition("zero-trace input to Chernoff distance".into()));
    }
    let (av, bv, w) = overlap_table(a, b);
    // orthogonal supports: Tr{A^s B^{1−s}} = 0 for every s
    if cross_trace(&av, &bv, &w, 0.0, 0.0) <= 0.0 {
        return Ok(ChernoffResult {
            value: f64::INFINITY,
            s_star: 0.5,
            infinite: true,
        });
    }
    let g = |s: f64| cross_trace(&av, &bv, &w, s, 1.0 - s).max(1e-300).log2();
    // convexity guard on a coarse grid before trusting golden section
    let probe: Vec<f64> = (0..9).map(|k| g(k as f64 / 8.0)).collect();
    let convex_ok = (1..8).all(|k| probe[k] <= 0.5 * (probe[k - 1] + probe[k + 1]) + 1e-9);
    let s_star = if convex_ok {
        golden_min(&g, 0.0, 1.0, 1e-8)
    } else {
        let n = 4097;
        let mut best = (g(0.0), 0.0);
        for k in 1..n {
            let s = k as f64 / (n - 1) as f64;
            let v = g(s);
            if v < best.0 {
                best = (v, s);
            }
        }
        best.1
    };
    Ok(ChernoffResult {
        value: -g(s_star),
        s_star,
        infinite: false,
    })
}

/// Golden-section minimizer of a unimodal function on [lo, hi].
pub fn golden_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > xtol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cr;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn ddiag(xs: &[f64], dims: Vec<usize>) -> DensityOperator {
        DensityOperator::new(
            HermitianOperator::from_real_diag(xs)
                .with_dims(dims)
                .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn von_neumann_basics() {
        let mm = DensityOperator::maximally_mixed(vec![2]);
        assert!((von_neumann_entropy(&mm) - 1.0).abs() < 1e-12);
        let pure = DensityOperator::pure(&[cr(1.0), cr(0.0)], vec![2]).unwrap();
        assert!(von_neumann_entropy(&pure).abs() < 1e-12);
        let rho = ddiag(&[0.75, 0.25], vec![2]);
        // classical binary entropy oracle
        let h = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((von_neumann_entropy(&rho) - h).abs() < 1e-12);
        assert!((h - 0.8112781244591328).abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_cases() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let a = random::density(&mut rng, 2);
        let b = random::density(&mut rng, 3);
        let ab = DensityOperator::new(op::tensor(&[a.op(), b.op()]).unwrap()).unwrap();
        let h = conditional_entropy(&ab, &[1]).unwrap();
        assert!((h - von_neumann_entropy(&a)).abs() < 1e-10);

        let phi = DensityOperator::max_entangled(2);
        assert!((conditional_entropy(&phi, &[1]).unwrap() + 1.0).abs() < 1e-10);

        // cq state: H(B|X) = Σ p(x) H(ρ_x)
        let r0 = random::density(&mut rng, 2);
        let r1 = random::density(&mut rng, 2);
        let p = 0.3;
        let block = linalg::kron(
            &ddiag(&[p, 0.0], vec![2]).matrix().clone(),
            r0.matrix(),
        ) + linalg::kron(&ddiag(&[0.0, 1.0 - p], vec![2]).matrix().clone(), r1.matrix());
        let cq = DensityOperator::from_matrix(block, vec![2, 2]).unwrap();
        let h = conditional_entropy(&cq, &[0]).unwrap();
        let oracle = p * von_neumann_entropy(&r0) + (1.0 - p) * von_neumann_entropy(&r1);
        assert!((h - oracle).abs() < 1e-10);
    }

    #[test]
    fn renyi2_basics() {
        let mm = DensityOperator::maximally_mixed(vec![2]);
        assert!((renyi2_entropy(&mm) - 1.0).abs() < 1e-12);
        let pure = DensityOperator::pure(&[cr(1.0), cr(0.0)], vec![2]).unwrap();
        assert!(renyi2_entropy(&pure).abs() < 1e-12);
        let rho = ddiag(&[0.75, 0.25], vec![2]);
        assert!((renyi2_entropy(&rho) + (10.0f64 / 16.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn renyi2_below_von_neumann_sweep() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for _ in 0..200 {
            let rho = random::density(&mut rng, 3);
            assert!(renyi2_entropy(&rho) <= von_neumann_entropy(&rho) + 1e-10);
        }
    }

    #[test]
    fn collision_conditional_cases() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let a = random::density(&mut rng, 2);
        let b = random::density(&mut rng, 2);
        let ab = DensityOperator::new(op::tensor(&[a.op(), b.op()]).unwrap()).unwrap();
        let h = collision_conditional_entropy(&ab, &[1]).unwrap();
        assert!((h - renyi2_entropy(&a)).abs() < 1e-9);

        let mm = DensityOperator::maximally_mixed(vec![2, 2]);
        assert!((collision_conditional_entropy(&mm, &[1]).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn collision_conditional_matches_cq_formula() {
        // cq state Σ_y p(y) σ_y ⊗ |y⟩⟨y|: H₂(A|Y) = −log₂ Σ p(y) Tr σ_y²
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let s0 = random::density(&mut rng, 2);
        let s1 = random::density(&mut rng, 2);
        let p = 0.4;
        let m = linalg::kron(s0.matrix(), &ddiag(&[p, 0.0], vec![2]).matrix().clone())
            + linalg::kron(s1.matrix(), &ddiag(&[0.0, 1.0 - p], vec![2]).matrix().clone());
        let cq = DensityOperator::from_matrix(m, vec![2, 2]).unwrap();
        let h = collision_conditional_entropy(&cq, &[1]).unwrap();
        let oracle = -(p * s0.op().trace_product(s0.op())
            + (1.0 - p) * s1.op().trace_product(s1.op()))
        .log2();
        assert!((h - oracle).abs() < 1e-10);

        // all σ_y pure gives 0
        let p0 = DensityOperator::pure(&[cr(1.0), cr(0.0)], vec![2]).unwrap();
        let p1 = DensityOperator::pure(&[cr(1.0), cr(1.0)], vec![2]).unwrap();
        let m = linalg::kron(p0.matrix(), &ddiag(&[0.5, 0.0], vec![2]).matrix().clone())
            + linalg::kron(p1.matrix(), &ddiag(&[0.0, 0.5], vec![2]).matrix().clone());
        let cq = DensityOperator::from_matrix(m, vec![2, 2]).unwrap();
        assert!(collision_conditional_entropy(&cq, &[1]).unwrap().abs() < 1e-10);
    }

    #[test]
    fn relative_entropy_cases() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let rho = random::density(&mut rng, 3);
        let d = relative_entropy(&rho, rho.op());
        assert!(d.value.abs() < 1e-10);

        // D(ρ‖I/d) = log d − H(ρ)
        let third = HermitianOperator::from_real_diag(&[1.0 / 3.0; 3]);
        let d = relative_entropy(&rho, &third);
        assert!((d.value - (3f64.log2() - von_neumann_entropy(&rho))).abs() < 1e-10);

        let z0 = ddiag(&[1.0, 0.0], vec![2]);
        let z1 = ddiag(&[0.0, 1.0], vec![2]);
        let d = relative_entropy(&z0, z1.op());
        assert!(d.support_violation && d.value.is_infinite());
    }

    #[test]
    fn renyi_relative_entropy_cases() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let rho = random::density(&mut rng, 2);
        for alpha in [0.3, 0.7, 2.0, 3.0] {
            let d = renyi_relative_entropy(&rho, rho.op(), alpha).unwrap();
            assert!(d.value.abs() < 1e-9, "alpha {alpha}");
        }
        // classical α = 2 value
        let p = ddiag(&[0.75, 0.25], vec![2]);
        let q = ddiag(&[0.5, 0.5], vec![2]);
        let d = renyi_relative_entropy(&p, q.op(), 2.0).unwrap();
        assert!((d.value - (1.25f64).log2()).abs() < 1e-10);

        assert!(renyi_relative_entropy(&p, q.op(), 1.0).is_err());
    }

    #[test]
    fn renyi_limit_brackets_relative_entropy() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..5 {
            let rho = random::density(&mut rng, 2);
            let sig = random::density(&mut rng, 2);
            let d = relative_entropy(&rho, sig.op()).value;
            let lo = renyi_relative_entropy(&rho, sig.op(), 1.0 - 1e-4)
                .unwrap()
                .value;
            let hi = renyi_relative_entropy(&rho, sig.op(), 1.0 + 1e-4)
                .unwrap()
                .value;
            assert!(lo <= d + 1e-3 && d <= hi + 1e-3);
            assert!((lo - d).abs() < 1e-3 && (hi - d).abs() < 1e-3);
        }
    }

    #[test]
    fn renyi_monotone_in_alpha() {
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let grid = [0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.5, 2.0, 3.0];
        for _ in 0..20 {
            let rho = random::density(&mut rng, 2);
            let sig = random::density(&mut rng, 2);
            let mut prev = f64::NEG_INFINITY;
            for &a in &grid {
                let d = renyi_relative_entropy(&rho, sig.op(), a).unwrap().value;
                assert!(d >= prev - 1e-9, "alpha {a}");
                prev = d;
            }
        }
    }

    #[test]
    fn sandwiched_renyi_cases() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let rho = random::density(&mut rng, 2);
        for alpha in [0.5, 2.0] {
            let d = sandwiched_renyi(&rho, rho.op(), alpha).unwrap();
            assert!(d.value.abs() < 1e-9);
        }
        // commuting pair: equals the Petz quantity
        let p = ddiag(&[0.6, 0.4], vec![2]);
        let q = ddiag(&[0.2, 0.8], vec![2]);
        for alpha in [0.5, 2.0, 3.0] {
            let s = sandwiched_renyi(&p, q.op(), alpha).unwrap().value;
            let r = renyi_relative_entropy(&p, q.op(), alpha).unwrap().value;
            assert!((s - r).abs() < 1e-10, "alpha {alpha}");
        }
        // non-commuting: sandwiched ≤ Petz
        for _ in 0..20 {
            let rho = random::density(&mut rng, 2);
            let sig = random::density(&mut rng, 2);
            let s = sandwiched_renyi(&rho, sig.op(), 2.0).unwrap().value;
            let r = renyi_relative_entropy(&rho, sig.op(), 2.0).unwrap().value;
            assert!(s <= r + 1e-9);
        }
    }

    #[test]
    fn mutual_information_cases() {
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let a = random::density(&mut rng, 2);
        let b = random::density(&mut rng, 2);
        let prod = DensityOperator::new(op::tensor(&[a.op(), b.op()]).unwrap()).unwrap();
        assert!(mutual_information(&prod, &[0], &[1]).unwrap().abs() < 1e-9);
        for alpha in [0.5, 2.0] {
            assert!(
                renyi_mutual_information(&prod, &[0], &[1], alpha)
                    .unwrap()
                    .value
                    .abs()
                    < 1e-8
            );
        }
        let phi = DensityOperator::max_entangled(2);
        assert!((mutual_information(&phi, &[0], &[1]).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn renyi_mi_additive_on_tensor_square() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let rho = random::density_multi(&mut rng, &[2, 2]);
        let sq = DensityOperator::new(op::tensor(&[rho.op(), rho.op()]).unwrap()).unwrap();
        for alpha in [0.5, 2.0] {
            let single = renyi_mutual_information(&rho, &[0], &[1], alpha).unwrap().value;
            let double = renyi_mutual_information(&sq, &[0, 2], &[1, 3], alpha)
                .unwrap()
                .value;
            assert!((double - 2.0 * single).abs() < 1e-9, "alpha {alpha}");
        }
    }

    #[test]
    fn variance_cases() {
        let mut rng = ChaCha12Rng::seed_from_u64(14);
        let rho = random::density(&mut rng, 3);
        assert!(relative_entropy_variance(&rho, rho.op()).unwrap() < 1e-10);

        // classical oracle: variance of the log-likelihood ratio
        let p = [0.75, 0.25];
        let q = [0.5, 0.5];
        let rp = ddiag(&p, vec![2]);
        let rq = ddiag(&q, vec![2]);
        let llr: Vec<f64> = (0..2).map(|i| (p[i] / q[i]).log2()).collect();
        let mean: f64 = (0..2).map(|i| p[i] * llr[i]).sum();
        let var: f64 = (0..2).map(|i| p[i] * (llr[i] - mean).powi(2)).sum();
        let v = relative_entropy_variance(&rp, rq.op()).unwrap();
        assert!((v - var).abs() < 1e-12);
    }

    #[test]
    fn variance_of_mi_matches_eigen_sum() {
        // for Φ⁺ against its product of marginals both operators commute
        let phi = DensityOperator::max_entangled(2);
        let prod = product_of_marginals(&phi, &[0], &[1]).unwrap();
        let v = relative_entropy_variance(&phi, prod.op()).unwrap();
        // eigenbasis oracle: ρ is rank one with eigenvalue 1, log-ratio
        // constant log₂(1/(1/4)) = 2 on the support, so the variance is 0
        assert!(v < 1e-9);
    }

    #[test]
    fn chernoff_cases() {
        let mut rng = ChaCha12Rng::seed_from_u64(15);
        let rho = random::density(&mut rng, 2);
        let c = chernoff_distance(rho.op(), rho.op()).unwrap();
        assert!(c.value.abs() < 1e-8);

        // |0⟩⟨0| vs |+⟩⟨+|: Tr{ρ^s σ^{1−s}} = 1/2 in the interior
        let z0 = ddiag(&[1.0, 0.0], vec![2]);
        let plus = DensityOperator::pure(&[cr(1.0), cr(1.0)], vec![2]).unwrap();
        let c = chernoff_distance(z0.op(), plus.op()).unwrap();
        assert!((c.value - 1.0).abs() < 1e-6);

        // orthogonal supports
        let z1 = ddiag(&[0.0, 1.0], vec![2]);
        let c = chernoff_distance(z0.op(), z1.op()).unwrap();
        assert!(c.infinite);
    }

    #[test]
    fn chernoff_matches_grid_oracle_commuting() {
        let a = HermitianOperator::from_real_diag(&[0.7, 0.3]);
        let b = HermitianOperator::from_real_diag(&[0.2, 0.8]);
        let c = chernoff_distance(&a, &b).unwrap();
        // dense classical grid oracle
        let mut best = f64::NEG_INFINITY;
        for k in 0..=10_000 {
            let s = k as f64 / 10_000.0;
            let t: f64 = 0.7f64.powf(s) * 0.2f64.powf(1.0 - s)
                + 0.3f64.powf(s) * 0.8f64.powf(1.0 - s);
            best = best.max(-t.log2());
        }
        assert!((c.value - best).abs() < 1e-6);
    }
}
