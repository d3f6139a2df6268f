//! Seeded random operators, states and channels. All sampling goes through
//! an explicitly passed generator so every experiment is reproducible from a
//! single 64-bit seed.

use crate::linalg::{self, CMat};
use crate::op::{DensityOperator, HermitianOperator, QuantumChannel};
use num_complex::Complex;
use rand::Rng;

/// Standard-normal pair via Box-Muller.
fn gauss<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn ginibre<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| Complex::new(gauss(rng), gauss(rng)))
}

/// Haar-random unitary via QR of a Ginibre matrix with phase fix.
pub fn unitary<R: Rng>(rng: &mut R, d: usize) -> CMat {
    let g = ginibre(rng, d, d);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rj = r[(j, j)];
        let phase = if rj.norm() > 0.0 {
            rj / rj.norm()
        } else {
            Complex::ONE
        };
        for i in 0..d {
            q[(i, j)] *= phase.conj();
        }
    }
    q
}

/// Full-rank density operator from the Hilbert-Schmidt (Ginibre) ensemble.
pub fn density<R: Rng>(rng: &mut R, d: usize) -> DensityOperator {
    let g = ginibre(rng, d, d);
    let w = &g * g.adjoint();
    let tr = linalg::trace_re(&w);
    DensityOperator::from_matrix(w.scale(1.0 / tr), vec![d]).expect("Ginibre state")
}

/// Random density operator with explicit subsystem layout.
pub fn density_multi<R: Rng>(rng: &mut R, dims: &[usize]) -> DensityOperator {
    let n = linalg::total_dim(dims);
    let g = ginibre(rng, n, n);
    let w = &g * g.adjoint();
    let tr = linalg::trace_re(&w);
    DensityOperator::from_matrix(w.scale(1.0 / tr), dims.to_vec()).expect("Ginibre state")
}

/// Random pure bipartite state on dims (da, db).
pub fn pure_bipartite<R: Rng>(rng: &mut R, da: usize, db: usize) -> DensityOperator {
    let v: Vec<Complex<f64>> = (0..da * db)
        .map(|_| Complex::new(gauss(rng), gauss(rng)))
        .collect();
    DensityOperator::pure(&v, vec![da, db]).expect("random pure state")
}

/// Random PSD operator with trace in (0, scale]; not normalized.
pub fn psd<R: Rng>(rng: &mut R, d: usize, scale: f64) -> HermitianOperator {
    let g = ginibre(rng, d, d);
    let w = &g * g.adjoint();
    let tr = linalg::trace_re(&w);
    let t: f64 = rng.random::<f64>() * scale;
    HermitianOperator::new(w.scale(t / tr), vec![d]).expect("PSD sample")
}

/// Random channel via a Stinespring isometry: `kraus_count` Kraus operators
/// carved from the first `din` columns of a Haar unitary on din*kraus_count.
pub fn channel<R: Rng>(rng: &mut R, din: usize, dout: usize, kraus_count: usize) -> QuantumChannel {
    assert!(dout * kraus_count >= din, "environment too small");
    let big = unitary(rng, dout * kraus_count);
    let mut kraus = Vec::with_capacity(kraus_count);
    for e in 0..kraus_count {
        let mut k = CMat::zeros(dout, din);
        for i in 0..dout {
            for j in 0..din {
                k[(i, j)] = big[(e * dout + i, j)];
            }
        }
        kraus.push(k);
    }
    QuantumChannel::new(kraus, vec![din], vec![dout]).expect("isometric dilation")
}

/// Test operator 0 ≤ S ≤ I with a random eigenbasis.
pub fn test_operator<R: Rng>(rng: &mut R, d: usize) -> HermitianOperator {
    let u = unitary(rng, d);
    let diag = CMat::from_fn(d, d, |i, j| {
        if i == j {
            linalg::cr(rng.random::<f64>())
        } else {
            Complex::ZERO
        }
    });
    HermitianOperator::new(&u * diag * u.adjoint(), vec![d]).expect("test operator")
}

/// Probability vector from i.i.d. exponentials.
pub fn prob_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let u = unitary(&mut rng, 4);
        let defect = linalg::max_norm(&(&u * u.adjoint() - linalg::identity(4)));
        assert!(defect < 1e-12);
    }

    #[test]
    fn density_normalized_and_psd() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for d in 2..5 {
            let rho = density(&mut rng, d);
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            assert!(rho.op().min_eigenvalue() >= -1e-12);
        }
    }

    #[test]
    fn channel_is_cptp_by_construction() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let _ = channel(&mut rng, 3, 2, 4);
    }

    #[test]
    fn same_seed_same_sample() {
        let a = density(&mut ChaCha12Rng::seed_from_u64(9), 3);
        let b = density(&mut ChaCha12Rng::seed_from_u64(9), 3);
        assert!(linalg::max_norm(&(a.matrix() - b.matrix())) == 0.0);
    }
}
