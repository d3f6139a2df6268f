//! Position-based multiple-access codes: exact simultaneous-decoder
//! simulation, the K-sender one-shot bound, cq-MAC derandomization, and
//! the order-two / collision / mutual-information rate regions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::entropy;
use crate::linalg::{self, CMat};
use crate::op::{self, DensityOperator, HermitianOperator, Povm, QuantumChannel};
use crate::p2p::CodePerformance;
use crate::{Error, Result};

const DIM_BUDGET: usize = 1 << 14;

/// K senders, message counts M_1..M_K, shared resources θ_{R_kA_k},
/// channel ⊗A_k → C.
#[derive(Debug, Clone)]
pub struct MacCodeSpec {
    pub resources: Vec<DensityOperator>,
    pub channel: QuantumChannel,
    pub sizes: Vec<usize>,
    /// binary test on R_1..R_K C; defaulted to the composite Helstrom
    /// projector when absent
    pub test: Option<HermitianOperator>,
    pub c: f64,
}

/// Channel output ω on R_1..R_K C from sending every A_k through.
pub fn mac_output(
    resources: &[DensityOperator],
    channel: &QuantumChannel,
) -> Result<DensityOperator> {
    if resources.is_empty() {
        return Err(Error::Precondition("need at least one sender".into()));
    }
    for r in resources {
        if r.dims().len() != 2 {
            return Err(Error::DimMismatch(format!(
                "each resource must be bipartite R_kA_k, got dims {:?}",
                r.dims()
            )));
        }
    }
    let parts: Vec<&HermitianOperator> = resources.iter().map(|r| r.op()).collect();
    let full = op::tensor(&parts)?;
    let full = DensityOperator::from_matrix(full.matrix().clone(), full.dims().to_vec())?;
    let a_slots: Vec<usize> = (0..resources.len()).map(|k| 2 * k + 1).collect();
    let out = op::apply_channel(channel, &full, &a_slots)?;
    if out.dims().len() != resources.len() + 1 {
        return Err(Error::DimMismatch(
            "channel must produce a single output system C".into(),
        ));
    }
    Ok(out)
}

/// Normalized confusion alternative for sender subset J: the senders in J
/// are replaced by their decoupled marginals,
/// σ_J = (⊗_{j∈J} θ_{R_j}) ⊗ ω_{S(J^c)C}, in canonical subsystem order.
pub fn alternative(
    omega: &DensityOperator,
    resources: &[DensityOperator],
    subset: &[usize],
) -> Result<HermitianOperator> {
    let k = resources.len();
    let keep: Vec<usize> = (0..=k).filter(|i| !subset.contains(i)).collect();
    let kept = omega.marginal(&keep)?;
    let mut parts: Vec<HermitianOperator> = vec![kept.op().clone()];
    for &j in subset {
        parts.push(resources[j].marginal(&[0])?.op().clone());
    }
    let refs: Vec<&HermitianOperator> = parts.iter().collect();
    let prod = op::tensor(&refs)?;
    let concat: Vec<usize> = keep.iter().chain(subset.iter()).cloned().collect();
    let new_order: Vec<usize> = (0..=k)
        .map(|s| concat.iter().position(|&c| c == s).unwrap())
        .collect();
    let (mat, dims) = linalg::permute_subsystems(prod.matrix(), prod.dims(), &new_order);
    HermitianOperator::new(mat, dims)
}

fn subsets(k: usize) -> Vec<Vec<usize>> {
    (1..(1usize << k))
        .map(|mask| (0..k).filter(|j| mask >> j & 1 == 1).collect())
        .collect()
}

fn resolve_test(
    spec: &MacCodeSpec,
) -> Result<(HermitianOperator, DensityOperator, Vec<(Vec<usize>, HermitianOperator)>)> {
    if spec.resources.len() != spec.sizes.len() || spec.sizes.iter().any(|&m| m == 0) {
        return Err(Error::Precondition(
            "sizes must list a positive M_k per sender".into(),
        ));
    }
    let omega = mac_output(&spec.resources, &spec.channel)?;
    let alts: Vec<(Vec<usize>, HermitianOperator)> = subsets(spec.resources.len())
        .into_iter()
        .map(|j| alternative(&omega, &spec.resources, &j).map(|a| (j, a)))
        .collect::<Result<_>>()?;
    let test = match &spec.test {
        Some(t) => {
            if t.dims() != omega.dims() {
                return Err(Error::DimMismatch(format!(
                    "test dims {:?} vs output dims {:?}",
                    t.dims(),
                    omega.dims()
                )));
            }
            if !t.is_test_operator() {
                return Err(Error::Precondition("supplied test violates 0 ≤ T ≤ I".into()));
            }
            t.clone()
        }
        None => {
            // composite Helstrom {ω − Σ_J σ_J ≥ 0} against the normalized
            // confusion alternatives; weighting them by Π M_j instead
            // drives the projector to zero already at M_k = 2
            let mut diff = omega.op().clone();
            for (_, alt) in &alts {
                diff = diff.sub(alt)?;
            }
            op::positive_spectral_projection(&diff)
        }
    };
    Ok((test, omega, alts))
}

fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &m in sizes {
        let mut next = Vec::with_capacity(out.len() * m);
        for t in &out {
            for v in 0..m {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// Exact simultaneous square-root decoder over all message tuples; the
/// leftover I − ΣΛ is an abstain outcome counted as error.
pub fn simulate_mac(spec: &MacCodeSpec) -> Result<CodePerformance> {
    if spec.c <= 0.0 {
        return Err(Error::Precondition("need c > 0".into()));
    }
    if spec.resources.len() > 3 {
        return Err(Error::BudgetExceeded(
            "exact simulation is capped at K = 3 senders".into(),
        ));
    }
    let (test, omega, _) = resolve_test(spec)?;
    let k = spec.resources.len();
    let d_c = spec.channel.out_dim();
    let mut total = d_c;
    for (r, &m) in spec.resources.iter().zip(&spec.sizes) {
        let d_r = r.dims()[0];
        for _ in 0..m {
            total = total.checked_mul(d_r).unwrap_or(usize::MAX);
        }
    }
    if total > DIM_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "simulation dimension {total} exceeds {DIM_BUDGET}"
        )));
    }
    // slot layout: sender k occupies offsets[k]..offsets[k]+M_k, C last
    let mut offsets = vec![0usize; k];
    for i in 1..k {
        offsets[i] = offsets[i - 1] + spec.sizes[i - 1];
    }
    let slots: usize = spec.sizes.iter().sum();
    let mut full_dims = Vec::with_capacity(slots + 1);
    for (r, &m) in spec.resources.iter().zip(&spec.sizes) {
        for _ in 0..m {
            full_dims.push(r.dims()[0]);
        }
    }
    full_dims.push(d_c);

    let all = tuples(&spec.sizes);
    let mut s = CMat::zeros(total, total);
    let mut gammas = Vec::with_capacity(all.len());
    for t in &all {
        let mut pos: Vec<usize> = t.iter().zip(&offsets).map(|(&m, &o)| o + m).collect();
        pos.push(slots);
        let g = linalg::embed(test.matrix(), test.dims(), &pos, &full_dims);
        s += &g;
        gammas.push(g);
    }
    let s_op = HermitianOperator::new(linalg::hermitize(&s), full_dims.clone())?;
    let s_inv_sqrt = op::operator_power(&s_op, -0.5);
    let spectators: Vec<DensityOperator> = spec
        .resources
        .iter()
        .map(|r| r.marginal(&[0]))
        .collect::<Result<_>>()?;

    let codeword = |t: &[usize]| -> Result<DensityOperator> {
        let mut parts: Vec<&HermitianOperator> = Vec::new();
        for (kk, &m) in spec.sizes.iter().enumerate() {
            for _ in 0..m.saturating_sub(1) {
                parts.push(spectators[kk].op());
            }
        }
        parts.push(omega.op());
        let spect_total: usize = spec.sizes.iter().map(|&m| m - 1).sum();
        let prod = op::tensor(&parts)?;
        let mut new_order = vec![0usize; slots + 1];
        let mut base = 0usize;
        for (kk, &m) in spec.sizes.iter().enumerate() {
            for j in 0..m {
                let slot = offsets[kk] + j;
                if j == t[kk] {
                    new_order[slot] = spect_total + kk;
                } else {
                    new_order[slot] = base + if j < t[kk] { j } else { j - 1 };
                }
            }
            base += m - 1;
        }
        new_order[slots] = spect_total + k;
        let (mat, dims) = linalg::permute_subsystems(prod.matrix(), prod.dims(), &new_order);
        DensityOperator::from_matrix(mat, dims)
    };
    let error_for = |idx: usize| -> Result<f64> {
        let lambda = s_inv_sqrt.matrix() * &gammas[idx] * s_inv_sqrt.matrix();
        let rho = codeword(&all[idx])?;
        Ok((1.0 - linalg::trace_re(&(&lambda * rho.matrix()))).clamp(0.0, 1.0))
    };
    let exact = error_for(0)?;
    if all.len() > 1 {
        let other = error_for(all.len() - 1)?;
        if (exact - other).abs() > 1e-10 {
            return Err(Error::Precondition(format!(
                "message symmetry violated: {exact} vs {other}"
            )));
        }
    }
    let bound = mac_one_shot_bound(spec)?;
    Ok(CodePerformance {
        exact_error: exact,
        bound,
        test_used: test,
    })
}

/// c_I·Tr{(I−T)ω} + c_II·Σ_{∅≠J⊆[K]} Π_{j∈J}(M_j−1)·Tr{T σ_J}.
pub fn mac_one_shot_bound(spec: &MacCodeSpec) -> Result<f64> {
    if spec.c <= 0.0 {
        return Err(Error::Precondition("need c > 0".into()));
    }
    let (test, omega, alts) = resolve_test(spec)?;
    let c_one = 1.0 + spec.c;
    let c_two = 2.0 + spec.c + 1.0 / spec.c;
    let mut bound = c_one * (1.0 - test.trace_product(omega.op())).max(0.0);
    for (j, alt) in &alts {
        let mult: f64 = j.iter().map(|&i| (spec.sizes[i] - 1) as f64).product();
        if mult > 0.0 {
            bound += c_two * mult * test.trace_product(alt).max(0.0);
        }
    }
    Ok(bound)
}

/// Classical-input MAC with a quantum output per input pair.
#[derive(Debug, Clone)]
pub struct CqMac {
    pub p_x: Vec<f64>,
    pub p_y: Vec<f64>,
    /// outputs[x][y] = ρ_C^{x,y}
    pub outputs: Vec<Vec<DensityOperator>>,
}

impl CqMac {
    pub fn new(p_x: Vec<f64>, p_y: Vec<f64>, outputs: Vec<Vec<DensityOperator>>) -> Result<Self> {
        for (name, p) in [("p_x", &p_x), ("p_y", &p_y)] {
            if p.is_empty() || p.iter().any(|&v| v < -1e-12) {
                return Err(Error::Precondition(format!("{name} must be nonnegative")));
            }
            let s: f64 = p.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::BadTrace {
                    actual: s,
                    expected: format!("{name} summing to 1"),
                });
            }
        }
        if outputs.len() != p_x.len() || outputs.iter().any(|row| row.len() != p_y.len()) {
            return Err(Error::DimMismatch(
                "outputs table must be |X| × |Y|".into(),
            ));
        }
        let d = outputs[0][0].op().dim();
        if outputs.iter().flatten().any(|o| o.op().dim() != d) {
            return Err(Error::DimMismatch("output dimensions differ".into()));
        }
        Ok(CqMac { p_x, p_y, outputs })
    }

    fn averages(&self) -> (Vec<DensityOperator>, Vec<DensityOperator>, DensityOperator) {
        let d = self.outputs[0][0].op().dim();
        let dims = self.outputs[0][0].dims().to_vec();
        let zero = || CMat::zeros(d, d);
        let mut bar = zero();
        let mut by_y: Vec<CMat> = (0..self.p_y.len()).map(|_| zero()).collect();
        let mut by_x: Vec<CMat> = (0..self.p_x.len()).map(|_| zero()).collect();
        for (x, &px) in self.p_x.iter().enumerate() {
            for (y, &py) in self.p_y.iter().enumerate() {
                let m = self.outputs[x][y].matrix();
                by_y[y] += m.scale(px);
                by_x[x] += m.scale(py);
                bar += m.scale(px * py);
            }
        }
        let wrap = |m: CMat| DensityOperator::from_matrix(m, dims.clone()).unwrap();
        (
            by_x.into_iter().map(wrap).collect(),
            by_y.into_iter().map(wrap).collect(),
            wrap(bar),
        )
    }
}

#[derive(Debug, Clone)]
pub struct DerandResult {
    pub codebook_x: Vec<usize>,
    pub codebook_y: Vec<usize>,
    pub decoder: Povm,
    pub avg_error: f64,
    /// randomness-assisted ensemble average over the explored codebooks
    pub ensemble_average: f64,
    /// true when every codebook was enumerated, false for sampled search
    pub enumerated: bool,
}

/// Deterministic codebook extraction for a cq-MAC: evaluates the exact
/// square-root-decoder error of candidate codebooks and returns one at or
/// below the randomness-assisted ensemble average.
pub fn derandomize_cq_mac(
    mac: &CqMac,
    l: usize,
    m: usize,
    search_budget: usize,
    seed: u64,
) -> Result<DerandResult> {
    if search_budget == 0 {
        return Err(Error::BudgetExceeded("search budget must be positive".into()));
    }
    if l == 0 || m == 0 {
        return Err(Error::Precondition("need L ≥ 1 and M ≥ 1".into()));
    }
    let nx = mac.p_x.len();
    let ny = mac.p_y.len();
    let (_, _, bar) = mac.averages();
    // per-pair Helstrom test against the ensemble average output,
    // {ρ^{xy} − ρ̄ ≥ 0}: the square-root form only needs one test per
    // input pair and this one stays nondegenerate at small alphabets
    let mut tests = vec![Vec::with_capacity(ny); nx];
    for x in 0..nx {
        for y in 0..ny {
            let diff = mac.outputs[x][y].op().sub(bar.op())?;
            tests[x].push(op::positive_spectral_projection(&diff));
        }
    }
    let d = mac.outputs[0][0].op().dim();
    let eval = |cx: &[usize], cy: &[usize]| -> Result<(f64, Vec<HermitianOperator>)> {
        let mut s = CMat::zeros(d, d);
        for &x in cx {
            for &y in cy {
                s += tests[x][y].matrix();
            }
        }
        let s_op = HermitianOperator::from_matrix(linalg::hermitize(&s))?;
        let inv_sqrt = op::operator_power(&s_op, -0.5);
        let mut hit = 0.0;
        let mut elements = Vec::with_capacity(cx.len() * cy.len());
        for &x in cx {
            for &y in cy {
                let om = inv_sqrt.matrix() * tests[x][y].matrix() * inv_sqrt.matrix();
                hit += linalg::trace_re(&(&om * mac.outputs[x][y].matrix()));
                elements.push(HermitianOperator::new(
                    linalg::hermitize(&om),
                    mac.outputs[0][0].dims().to_vec(),
                )?);
            }
        }
        let err = (1.0 - hit / (cx.len() * cy.len()) as f64).clamp(0.0, 1.0);
        Ok((err, elements))
    };

    let count = (nx as f64).powi(l as i32) * (ny as f64).powi(m as i32);
    let enumerated = count <= search_budget.min(1_000_000) as f64;
    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    let mut ens_num = 0.0f64;
    let mut ens_den = 0.0f64;
    let mut consider = |cx: &[usize], cy: &[usize], weight: f64| -> Result<()> {
        let (err, _) = eval(cx, cy)?;
        ens_num += weight * err;
        ens_den += weight;
        let better = match &best {
            None => true,
            Some((be, bx, by)) => {
                err < be - 1e-15 || ((err - be).abs() <= 1e-15 && (cx, cy) < (&bx[..], &by[..]))
            }
        };
        if better {
            best = Some((err, cx.to_vec(), cy.to_vec()));
        }
        Ok(())
    };
    if enumerated {
        for cx in tuples(&vec![nx; l]) {
            let wx: f64 = cx.iter().map(|&x| mac.p_x[x]).product();
            for cy in tuples(&vec![ny; m]) {
                let wy: f64 = cy.iter().map(|&y| mac.p_y[y]).product();
                consider(&cx, &cy, wx * wy)?;
            }
        }
    } else {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let sample = |p: &[f64], rng: &mut ChaCha12Rng| -> usize {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (i, &w) in p.iter().enumerate() {
                acc += w;
                if u < acc {
                    return i;
                }
            }
            p.len() - 1
        };
        for _ in 0..search_budget {
            let cx: Vec<usize> = (0..l).map(|_| sample(&mac.p_x, &mut rng)).collect();
            let cy: Vec<usize> = (0..m).map(|_| sample(&mac.p_y, &mut rng)).collect();
            consider(&cx, &cy, 1.0)?;
        }
    }
    let (err, cx, cy) = best.unwrap();
    let ensemble_average = ens_num / ens_den.max(1e-300);
    debug_assert!(err <= ensemble_average + 1e-9);
    let (_, elements) = eval(&cx, &cy)?;
    Ok(DerandResult {
        codebook_x: cx,
        codebook_y: cy,
        decoder: Povm::new(elements)?,
        avg_error: err,
        ensemble_average,
        enumerated,
    })
}

#[derive(Debug, Clone)]
pub struct RateConstraint {
    /// sender indices in the subset J
    pub senders: Vec<usize>,
    /// upper bound on Σ_{j∈J} R_j in bits
    pub bound: f64,
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct RateRegion {
    pub constraints: Vec<RateConstraint>,
}

fn sender_count(omega: &DensityOperator) -> Result<usize> {
    if omega.dims().len() < 2 {
        return Err(Error::DimMismatch(
            "state must carry sender systems and an output C".into(),
        ));
    }
    Ok(omega.dims().len() - 1)
}

fn fmt_set(j: &[usize]) -> String {
    let names: Vec<String> = j.iter().map(|i| format!("S{}", i + 1)).collect();
    names.join("")
}

/// Order-two region: bound(J) = H₂(S(J^c)C) − H(S(J^c)C | S(J)). The
/// theorem statement pairs R₁ with the other grouping; the proof's
/// exponents use this one, and both labels are recorded.
pub fn rate_region_renyi2(omega: &DensityOperator) -> Result<RateRegion> {
    let k = sender_count(omega)?;
    let mut constraints = Vec::new();
    for j in subsets(k) {
        let jc: Vec<usize> = (0..k).filter(|i| !j.contains(i)).collect();
        let mut keep = jc.clone();
        keep.push(k);
        let h2 = entropy::renyi2_entropy(&omega.marginal(&keep)?);
        let cond = entropy::conditional_entropy(omega, &j)?;
        constraints.push(RateConstraint {
            senders: j.clone(),
            bound: h2 - cond,
            label: format!(
                "proof pairing H2({jc}C) - H({jc}C|{j}); theorem label I~({j};C {jc})",
                jc = fmt_set(&jc),
                j = fmt_set(&j)
            ),
        });
    }
    Ok(RateRegion { constraints })
}

/// Collision region: bound(J) = H₂(C|S(J^c)) − H(C|S₁…S_K).
pub fn rate_region_collision(omega: &DensityOperator) -> Result<RateRegion> {
    let k = sender_count(omega)?;
    let all: Vec<usize> = (0..k).collect();
    let h_c_all = entropy::conditional_entropy(omega, &all)?;
    let mut constraints = Vec::new();
    for j in subsets(k) {
        let jc: Vec<usize> = (0..k).filter(|i| !j.contains(i)).collect();
        let mut keep = jc.clone();
        keep.push(k);
        let marg = omega.marginal(&keep)?;
        let cond_idx: Vec<usize> = (0..jc.len()).collect();
        let h2c = entropy::collision_conditional_entropy(&marg, &cond_idx)?;
        constraints.push(RateConstraint {
            senders: j.clone(),
            bound: h2c - h_c_all,
            label: format!(
                "H2(C|{jc}) - H(C|{all})",
                jc = fmt_set(&jc),
                all = fmt_set(&all)
            ),
        });
    }
    Ok(RateRegion { constraints })
}

/// Mutual-information region: bound(J) = I(S(J); C S(J^c)). Achievable
/// with a simultaneous decoder for K ≤ 2; conjectured for K ≥ 3.
pub fn rate_region_mi(omega: &DensityOperator) -> Result<RateRegion> {
    let k = sender_count(omega)?;
    let mut constraints = Vec::new();
    for j in subsets(k) {
        let jc: Vec<usize> = (0..k).filter(|i| !j.contains(i)).collect();
        let mut other = jc.clone();
        other.push(k);
        let mi = entropy::mutual_information(omega, &j, &other)?;
        let tag = if k >= 3 { "; conjectured for K >= 3" } else { "" };
        constraints.push(RateConstraint {
            senders: j.clone(),
            bound: mi,
            label: format!(
                "I({j};C {jc}){tag}",
                j = fmt_set(&j),
                jc = fmt_set(&jc)
            ),
        });
    }
    Ok(RateRegion { constraints })
}

/// Nonnegative rates satisfying every subset constraint with 1e-9 slack.
pub fn region_membership(region: &RateRegion, rates: &[f64]) -> bool {
    if rates.iter().any(|&r| r < -1e-12) {
        return false;
    }
    region.constraints.iter().all(|c| {
        let s: f64 = c.senders.iter().map(|&j| rates[j]).sum();
        s <= c.bound + 1e-9
    })
}

#[derive(Debug, Clone)]
pub struct RegionHull {
    pub a_vertices: Vec<(f64, f64)>,
    pub b_vertices: Vec<(f64, f64)>,
    /// convex hull of the union (time sharing between the two schemes)
    pub hull: Vec<(f64, f64)>,
}

fn bounds_2d(region: &RateRegion) -> Result<(f64, f64, f64)> {
    let mut b1 = f64::INFINITY;
    let mut b2 = f64::INFINITY;
    let mut b12 = f64::INFINITY;
    for c in &region.constraints {
        match c.senders.as_slice() {
            [0] => b1 = b1.min(c.bound),
            [1] => b2 = b2.min(c.bound),
            [0, 1] => b12 = b12.min(c.bound),
            _ => {
                return Err(Error::DimMismatch(
                    "vertex enumeration needs a two-sender region".into(),
                ))
            }
        }
    }
    if !(b1.is_finite() && b2.is_finite() && b12.is_finite()) {
        return Err(Error::Precondition("region is unbounded".into()));
    }
    Ok((b1, b2, b12))
}

fn vertices_2d(region: &RateRegion) -> Result<Vec<(f64, f64)>> {
    let (b1, b2, b12) = bounds_2d(region)?;
    if b1 < 0.0 || b2 < 0.0 || b12 < 0.0 {
        return Ok(vec![]); // no nonnegative rate pair is feasible
    }
    let mut cands = vec![
        (0.0, 0.0),
        (b1.min(b12), 0.0),
        (0.0, b2.min(b12)),
        (b1, (b12 - b1).clamp(0.0, b2)),
        ((b12 - b2).clamp(0.0, b1), b2),
    ];
    cands.retain(|&(x, y)| x <= b1 + 1e-12 && y <= b2 + 1e-12 && x + y <= b12 + 1e-12);
    Ok(convex_hull(&cands))
}

/// Andrew monotone chain; output in counterclockwise order, no duplicates.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-12 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-12 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Vertex lists for two 2-sender regions plus the hull of their union.
pub fn region_vertices_2d(a: &RateRegion, b: &RateRegion) -> Result<RegionHull> {
    let va = vertices_2d(a)?;
    let vb = vertices_2d(b)?;
    let mut all = va.clone();
    all.extend_from_slice(&vb);
    Ok(RegionHull {
        a_vertices: va,
        b_vertices: vb,
        hull: convex_hull(&all),
    })
}

#[derive(Debug, Clone)]
pub struct IdentityRow {
    pub name: String,
    pub divergence: f64,
    pub mi_minus_rate: f64,
    pub residual: f64,
}

/// The three hypothesis-testing identities
/// D(ω‖2^{R₁}·θ_R⊗ω_SC) = I(R;CS) − R₁ and cyclic variants; both sides
/// are computed independently.
pub fn mac_divergence_identities(
    theta: &DensityOperator,
    gamma: &DensityOperator,
    channel: &QuantumChannel,
    r1: f64,
    r2: f64,
) -> Result<Vec<IdentityRow>> {
    let resources = [theta.clone(), gamma.clone()];
    let omega = mac_output(&resources, channel)?;
    let rows_spec: [(&[usize], f64, &str); 3] = [
        (&[0], r1, "D(rho||B1) = I(R;CS) - R1"),
        (&[1], r2, "D(rho||B2) = I(S;CR) - R2"),
        (&[0, 1], r1 + r2, "D(rho||B3) = I(RS;C) - R1 - R2"),
    ];
    let mut rows = Vec::with_capacity(3);
    for (j, rate, name) in rows_spec {
        let alt = alternative(&omega, &resources, j)?;
        let lhs = entropy::relative_entropy(&omega, &alt.scale(rate.exp2()));
        if !lhs.is_finite() {
            return Err(Error::Precondition("divergence is infinite".into()));
        }
        let jc: Vec<usize> = (0..2).filter(|i| !j.contains(i)).collect();
        let mut other = jc;
        other.push(2);
        let mi = entropy::mutual_information(&omega, j, &other)?;
        let rhs = mi - rate;
        rows.push(IdentityRow {
            name: name.to_string(),
            divergence: lhs.value,
            mi_minus_rate: rhs,
            residual: (lhs.value - rhs).abs(),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct MacExponent {
    pub value: f64,
    /// per-subset (optimized value, maximizing s) in the order J = {1},
    /// {2}, {1,2}
    pub terms: [(f64, f64); 3],
    /// the simultaneous-decoder exponent rests on an unproven conjecture
    /// for K >= 3; always true
    pub conditional: bool,
}

fn sup_exponent(
    omega: &DensityOperator,
    sigma: &HermitianOperator,
    rate: f64,
    s_grid: &[f64],
) -> Result<(f64, f64)> {
    let g = |s: f64| -> f64 {
        if s >= 1.0 - 1e-12 {
            return 0.0;
        }
        match entropy::renyi_relative_entropy(omega, sigma, s.max(1e-9)) {
            Ok(d) if d.is_finite() => (1.0 - s) * (d.value - rate),
            _ => f64::NEG_INFINITY,
        }
    };
    let mut grid: Vec<f64> = s_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut best = (g(grid[0]), grid[0]);
    for &s in &grid[1..] {
        let v = g(s);
        if v > best.0 {
            best = (v, s);
        }
    }
    let idx = grid.iter().position(|&s| s == best.1).unwrap();
    let lo = if idx == 0 { grid[0] } else { grid[idx - 1] };
    let hi = if idx + 1 == grid.len() { grid[idx] } else { grid[idx + 1] };
    let s_star = entropy::golden_min(&|s| -g(s), lo, hi, 1e-9);
    let refined = g(s_star);
    if refined > best.0 {
        Ok((refined, s_star))
    } else {
        Ok(best)
    }
}

/// Conditional simultaneous-decoder exponent
/// min_J sup_{s∈[0,1]} (1−s)[I_s(J) − R(J)].
pub fn mac_error_exponent(
    theta: &DensityOperator,
    gamma: &DensityOperator,
    channel: &QuantumChannel,
    r1: f64,
    r2: f64,
    s_grid: &[f64],
) -> Result<MacExponent> {
    if s_grid.is_empty() || s_grid.iter().any(|&s| !(0.0..=1.0).contains(&s)) {
        return Err(Error::Precondition("s grid must be nonempty inside [0,1]".into()));
    }
    let resources = [theta.clone(), gamma.clone()];
    let omega = mac_output(&resources, channel)?;
    let cases: [(&[usize], f64); 3] = [(&[0], r1), (&[1], r2), (&[0, 1], r1 + r2)];
    let mut terms = [(0.0, 0.0); 3];
    for (i, (j, rate)) in cases.into_iter().enumerate() {
        let alt = alternative(&omega, &resources, j)?;
        terms[i] = sup_exponent(&omega, &alt, rate, s_grid)?;
    }
    let value = terms.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    Ok(MacExponent {
        value,
        terms,
        conditional: true,
    })
}
