//! Randomized invariants. Strategies draw an RNG seed so failures shrink
//! to a single reproducible instance.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use pbclab::op::{self, DensityOperator};
use pbclab::{entropy, hyptest, io, mac, random};

fn rng_for(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_json_roundtrip_is_byte_stable(seed: u64, d in 2usize..5) {
        let mut rng = rng_for(seed);
        let a = random::psd(&mut rng, d, 1.0);
        let text = io::write_operator(&a);
        let back = io::parse_operator(&text).unwrap();
        prop_assert_eq!(&text, &io::write_operator(&back));
        let diff = a.sub(&back).unwrap();
        prop_assert!(op::trace_norm(&diff) == 0.0, "roundtrip must be bit-exact");
    }

    #[test]
    fn channel_json_roundtrip_is_byte_stable(seed: u64, d in 2usize..4) {
        let mut rng = rng_for(seed);
        let ch = random::channel(&mut rng, d, d, 2);
        let text = io::write_channel(&ch);
        let back = io::parse_channel(&text).unwrap();
        prop_assert_eq!(text, io::write_channel(&back));
    }

    #[test]
    fn entropy_within_range_and_h2_below_h(seed: u64, d in 2usize..6) {
        let mut rng = rng_for(seed);
        let rho = random::density(&mut rng, d);
        let h = entropy::von_neumann_entropy(&rho);
        let h2 = entropy::renyi2_entropy(&rho);
        prop_assert!(h >= -1e-9 && h <= (d as f64).log2() + 1e-9);
        prop_assert!(h2 <= h + 1e-9, "H2 = {h2} must not exceed H = {h}");
    }

    #[test]
    fn hyp_test_value_monotone_in_eps(seed: u64) {
        let mut rng = rng_for(seed);
        let rho = random::density(&mut rng, 3);
        let sigma = random::density(&mut rng, 3);
        let mut last = f64::NEG_INFINITY;
        for eps in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let (v, _) = hyptest::hyp_test_rel_entropy(&rho, sigma.op(), eps).unwrap();
            prop_assert!(v.value >= last - 1e-7, "D_H must grow with ε");
            last = v.value;
        }
    }

    #[test]
    fn positive_projection_maximizes_trace(seed: u64, d in 2usize..6) {
        let mut rng = rng_for(seed);
        let x = random::psd(&mut rng, d, 1.0)
            .sub(&random::psd(&mut rng, d, 1.0))
            .unwrap();
        let p = op::positive_spectral_projection(&x);
        prop_assert!(p.is_test_operator());
        let t = random::test_operator(&mut rng, d);
        prop_assert!(p.trace_product(&x) >= t.trace_product(&x) - 1e-9);
    }

    #[test]
    fn partial_trace_of_product_factorizes(seed: u64) {
        let mut rng = rng_for(seed);
        let a = random::density(&mut rng, 2);
        let b = random::density(&mut rng, 3);
        let joint = op::tensor(&[a.op(), b.op()]).unwrap();
        let back = op::partial_trace(&joint, &[0]).unwrap();
        let diff = back.sub(a.op()).unwrap();
        prop_assert!(op::trace_norm(&diff) < 1e-10);
    }

    #[test]
    fn classical_np_respects_the_type1_budget(seed: u64, eps in 0.05f64..0.95) {
        let mut rng = rng_for(seed);
        let p = random::prob_vector(&mut rng, 4);
        let q = random::prob_vector(&mut rng, 4);
        let classes: Vec<(f64, f64)> = p
            .iter()
            .zip(&q)
            .map(|(&pi, &qi)| (pi.max(1e-300).ln(), qi.max(1e-300).ln()))
            .collect();
        let (value, type1, type2) = hyptest::classical_np(&classes, eps);
        prop_assert!(type1 <= eps + 1e-12);
        prop_assert!((value + type2.max(1e-300).log2()).abs() < 1e-9);
    }

    #[test]
    fn convex_hull_contains_every_input(seed: u64, n in 3usize..20) {
        use rand::Rng;
        let mut rng = rng_for(seed);
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        let hull = mac::convex_hull(&pts);
        for &p in &pts {
            prop_assert!(inside_hull(&hull, p), "{p:?} escaped its own hull");
        }
    }

    #[test]
    fn apply_channel_preserves_trace(seed: u64) {
        let mut rng = rng_for(seed);
        let ch = random::channel(&mut rng, 2, 3, 2);
        let rho = random::density_multi(&mut rng, &[2, 2]);
        let out = op::apply_channel(&ch, &rho, &[1]).unwrap();
        prop_assert!((out.trace() - 1.0).abs() < 1e-10);
        prop_assert!(out.op().min_eigenvalue() > -1e-10);
    }

    #[test]
    fn float_formatting_roundtrips_exactly(bits: u64) {
        let x = f64::from_bits(bits);
        prop_assume!(x.is_finite());
        let back: f64 = io::fmt_float(x).parse().unwrap();
        prop_assert!(back == x || (back == 0.0 && x == 0.0));
    }
}

fn inside_hull(hull: &[(f64, f64)], p: (f64, f64)) -> bool {
    if hull.len() < 3 {
        return hull
            .iter()
            .any(|&(x, y)| (x - p.0).abs() < 1e-9 && (y - p.1).abs() < 1e-9)
            || hull.len() == 2 && {
                let (a, b) = (hull[0], hull[1]);
                let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                cross.abs() < 1e-9
            };
    }
    hull.iter().zip(hull.iter().cycle().skip(1)).all(|(&a, &b)| {
        (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= -1e-9
    })
}

#[test]
fn density_roundtrip_rejects_bad_trace() {
    let text = r#"{"dims":[2],"matrix":[[[0.9,0.0],[0.0,0.0]],[[0.0,0.0],[0.4,0.0]]]}"#;
    assert!(io::parse_density(text).is_err());
    assert!(io::parse_operator(text).is_ok());
}

#[test]
fn cq_mac_roundtrip_preserves_outputs() {
    let mut rng = rng_for(11);
    let outputs = vec![
        vec![random::density(&mut rng, 2), random::density(&mut rng, 2)],
        vec![random::density(&mut rng, 2), random::density(&mut rng, 2)],
    ];
    let cq = mac::CqMac::new(vec![0.5, 0.5], vec![0.25, 0.75], outputs).unwrap();
    let text = io::write_cq_mac(&cq);
    let back = io::parse_cq_mac(&text).unwrap();
    assert_eq!(text, io::write_cq_mac(&back));
    for (row_a, row_b) in cq.outputs.iter().zip(&back.outputs) {
        for (a, b) in row_a.iter().zip(row_b) {
            let diff = a.op().sub(b.op()).unwrap();
            assert!(op::trace_norm(&diff) == 0.0);
        }
    }
}
