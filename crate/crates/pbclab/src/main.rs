//! Command-line front end. One subcommand per library operation, JSON out
//! by default, CSV for the tabular dumps (region vertices, Chernoff
//! traces). Same seed and inputs give byte-identical output.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use pbclab::io::{self, fmt_float};
use pbclab::{entropy, hyptest, mac, p2p, random, typicality};
use pbclab::{Error, Result};

#[derive(Parser)]
#[command(name = "pbclab", version, about = "position-based coding and quantum hypothesis testing")]
struct Cli {
    /// seed for every sampled quantity; fixed seed means identical output
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// write the artifact here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// tolerance override, repeatable: --tol residual=1e-8
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_tol(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let v: f64 = v.parse().map_err(|e| format!("bad tolerance value: {e}"))?;
    Ok((k.to_string(), v))
}

#[derive(Subcommand)]
enum Cmd {
    /// entropies of a density operator: H, H2, and I across the first
    /// subsystem vs the rest when more than one subsystem is declared
    Entropy {
        #[arg(long)]
        state: PathBuf,
    },
    /// relative entropy D(rho||sigma), or a Renyi variant at --alpha
    Divergence {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
        /// use the sandwiched divergence instead of the Petz one
        #[arg(long)]
        sandwiched: bool,
    },
    /// hypothesis-testing relative entropy D_H^eps(rho||sigma)
    Hyptest {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// finite-n Stein sandwich: Renyi lower, exact D_H^eps/n, sandwiched upper
    Stein {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        alpha_lo: f64,
        #[arg(long, default_value_t = 2.0)]
        alpha_hi: f64,
    },
    /// exact symmetric error rate against a weighted composite alternative,
    /// per blocklength, with the two-operator Chernoff floor
    ChernoffMulti {
        #[arg(long)]
        null: PathBuf,
        /// alternative operator, repeatable
        #[arg(long = "alt", required = true)]
        alts: Vec<PathBuf>,
        /// weight for the null followed by one per alternative
        #[arg(long = "weight", required = true)]
        weights: Vec<f64>,
        /// blocklength, repeatable
        #[arg(long = "n", required = true)]
        ns: Vec<usize>,
    },
    /// typical projector statistics; with --alt, the relative typical
    /// projector scored against that operator
    Typicality {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        alt: Option<PathBuf>,
        /// failure probability for the Chebyshev blocklength threshold
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    #[command(subcommand)]
    P2p(P2pCmd),
    #[command(subcommand)]
    Mac(MacCmd),
    #[command(subcommand)]
    Check(CheckCmd),
}

#[derive(Subcommand)]
enum P2pCmd {
    /// exact square-root-decoder error and the one-shot bound
    Simulate {
        #[arg(long)]
        spec: PathBuf,
    },
    /// one-shot error bound only (no decoder simulation)
    Bound {
        #[arg(long)]
        spec: PathBuf,
    },
    /// lower bound on the error exponent at a fixed rate
    Exponent {
        #[arg(long)]
        resource: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        /// rate log2(M) in bits
        #[arg(long)]
        rate: f64,
        /// drop the one-shot -2 bits (per-copy asymptotic form)
        #[arg(long)]
        iid: bool,
        #[arg(long, default_value_t = 65)]
        grid: usize,
    },
    /// one-shot capacity lower bound at error eps with slack eta
    Capacity {
        #[arg(long)]
        resource: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        eta: f64,
    },
    /// Gaussian second-order rate nI + sqrt(nV) Phi^-1(eps)
    SecondOrder {
        #[arg(long)]
        resource: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
    },
    /// heuristic eps-mutual-information capacity upper bound
    Upper {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
}

#[derive(Subcommand)]
enum MacCmd {
    /// exact simultaneous-decoder error and the one-shot bound
    Simulate {
        #[arg(long)]
        spec: PathBuf,
    },
    /// one-shot error bound only
    Bound {
        #[arg(long)]
        spec: PathBuf,
    },
    /// deterministic codebook extraction for a cq-MAC
    Derandomize {
        #[arg(long)]
        mac: PathBuf,
        /// codebook size for sender X
        #[arg(long)]
        l: usize,
        /// codebook size for sender Y
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1 << 20)]
        budget: usize,
    },
    /// achievable rate region of a sender/output state
    Region {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = RegionKind::Renyi2)]
        kind: RegionKind,
    },
    /// conditional simultaneous-decoder error exponent
    Exponent {
        #[arg(long)]
        theta: PathBuf,
        #[arg(long)]
        gamma: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        #[arg(long, default_value_t = 65)]
        grid: usize,
    },
    /// cross-check D(omega||2^R sigma_J) = I(J) - R for the three subsets
    Identities {
        #[arg(long)]
        theta: PathBuf,
        #[arg(long)]
        gamma: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionKind {
    Renyi2,
    Collision,
    Mi,
}

#[derive(Subcommand)]
enum CheckCmd {
    /// gentle measurement: Tr{L rho} >= 1-eps implies trace distance <= 2 sqrt(eps)
    Gentle {
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// measurement on close states: Tr{L rho} >= Tr{L sigma} - ||rho - sigma||_1
    Close {
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Hayashi-Nagaoka operator inequality
    Hn {
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// P_e* <= Tr{A^s B^(1-s)}
    Spectral {
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// D_H^eps >= D_alpha + (alpha/(alpha-1)) log2(1/eps) for alpha in (0,1)
    Prop1 {
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// D_H^eps <= D~_alpha + (alpha/(alpha-1)) log2(1/(1-eps)) for alpha > 1
    Cmw {
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("PBCLAB_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(&cli) {
        Ok(Outcome { artifact, failed }) => {
            let emit = if let Some(path) = &cli.out {
                std::fs::write(path, &artifact).map(|_| ())
            } else {
                println!("{artifact}");
                Ok(())
            };
            if emit.is_err() {
                eprintln!("error: could not write output");
                return ExitCode::from(1);
            }
            ExitCode::from(if failed { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Parse(_) => 2,
                Error::BudgetExceeded(_) => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

struct Outcome {
    artifact: String,
    /// invariant-check failure: emit the artifact but exit 1
    failed: bool,
}

fn ok(artifact: String) -> Result<Outcome> {
    Ok(Outcome { artifact, failed: false })
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(e))
}

fn json_only(format: Format) -> Result<()> {
    if format == Format::Csv {
        return Err(Error::Precondition(
            "csv output is only available for region vertices and Chernoff traces".into(),
        ));
    }
    Ok(())
}

fn tol_map(cli: &Cli) -> BTreeMap<String, f64> {
    cli.tol.iter().cloned().collect()
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.cmd {
        Cmd::Entropy { state } => {
            json_only(cli.format)?;
            let rho = io::parse_density(&read(state)?)?;
            let h = entropy::von_neumann_entropy(&rho);
            let h2 = entropy::renyi2_entropy(&rho);
            let mut out = format!("{{\"H\":{},\"H2\":{}", fmt_float(h), fmt_float(h2));
            if rho.dims().len() >= 2 {
                let rest: Vec<usize> = (1..rho.dims().len()).collect();
                let i = entropy::mutual_information(&rho, &[0], &rest)?;
                out.push_str(&format!(",\"I\":{}", fmt_float(i)));
            }
            out.push('}');
            ok(out)
        }
        Cmd::Divergence { rho, sigma, alpha, sandwiched } => {
            json_only(cli.format)?;
            let rho = io::parse_density(&read(rho)?)?;
            let sigma = io::parse_operator(&read(sigma)?)?;
            let d = match alpha {
                None => entropy::relative_entropy(&rho, &sigma),
                Some(a) if *sandwiched => entropy::sandwiched_renyi(&rho, &sigma, *a)?,
                Some(a) => entropy::renyi_relative_entropy(&rho, &sigma, *a)?,
            };
            let value = if d.is_finite() { fmt_float(d.value) } else { "null".into() };
            ok(format!(
                "{{\"value\":{},\"infinite\":{}}}",
                value, !d.is_finite()
            ))
        }
        Cmd::Hyptest { rho, sigma, eps } => {
            json_only(cli.format)?;
            let rho = io::parse_density(&read(rho)?)?;
            let sigma = io::parse_operator(&read(sigma)?)?;
            let (v, _) = hyptest::hyp_test_rel_entropy(&rho, &sigma, *eps)?;
            ok(io::write_hyptest(&v))
        }
        Cmd::Stein { rho, sigma, eps, n, alpha_lo, alpha_hi } => {
            json_only(cli.format)?;
            let rho = io::parse_density(&read(rho)?)?;
            let sigma = io::parse_operator(&read(sigma)?)?;
            let (lo, exact, hi) = hyptest::stein_sandwich(&rho, &sigma, *eps, *n, *alpha_lo, *alpha_hi)?;
            ok(format!(
                "{{\"lower\":{},\"exact\":{},\"upper\":{}}}",
                fmt_float(lo),
                fmt_float(exact),
                fmt_float(hi)
            ))
        }
        Cmd::ChernoffMulti { null, alts, weights, ns } => {
            let a = io::parse_operator(&read(null)?)?;
            let alt_ops = alts
                .iter()
                .map(|p| io::parse_operator(&read(p)?))
                .collect::<Result<Vec<_>>>()?;
            let trace = hyptest::chernoff_multi_trace(&a, &alt_ops, weights, ns)?;
            match cli.format {
                Format::Csv => {
                    let mut out = String::from("n,rate,chernoff_floor,gap\n");
                    for row in &trace.rows {
                        out.push_str(&format!(
                            "{},{},{},{}\n",
                            row.n,
                            fmt_float(row.rate),
                            fmt_float(row.chernoff_floor),
                            fmt_float(row.gap)
                        ));
                    }
                    ok(out)
                }
                Format::Json => {
                    let rows: Vec<String> = trace
                        .rows
                        .iter()
                        .map(|r| {
                            format!(
                                "{{\"n\":{},\"rate\":{},\"chernoff_floor\":{},\"gap\":{}}}",
                                r.n,
                                fmt_float(r.rate),
                                fmt_float(r.chernoff_floor),
                                fmt_float(r.gap)
                            )
                        })
                        .collect();
                    ok(format!(
                        "{{\"rows\":[{}],\"truncated\":{}}}",
                        rows.join(","),
                        trace.truncated
                    ))
                }
            }
        }
        Cmd::Typicality { state, n, delta, alt, eps } => {
            json_only(cli.format)?;
            let rho = io::parse_density(&read(state)?)?;
            match alt {
                Some(path) => {
                    let b = io::parse_operator(&read(path)?)?;
                    let p = typicality::relative_typical_projector(&rho, &b, *n, *delta)?;
                    ok(format!(
                        "{{\"prob\":{},\"expected_score\":{},\"chebyshev_n\":{}}}",
                        fmt_float(p.prob),
                        fmt_float(p.expected_score),
                        fmt_float(p.chebyshev_threshold(*eps))
                    ))
                }
                None => {
                    let p = typicality::typical_projector(&rho, *n, *delta)?;
                    ok(format!(
                        "{{\"prob\":{},\"entropy\":{},\"log2_trace\":{},\"chebyshev_n\":{}}}",
                        fmt_float(p.prob),
                        fmt_float(p.entropy),
                        fmt_float(p.log2_trace),
                        fmt_float(p.chebyshev_threshold(*eps))
                    ))
                }
            }
        }
        Cmd::P2p(sub) => run_p2p(cli, sub),
        Cmd::Mac(sub) => run_mac(cli, sub),
        Cmd::Check(sub) => run_check(cli, sub),
    }
}

fn run_p2p(cli: &Cli, sub: &P2pCmd) -> Result<Outcome> {
    json_only(cli.format)?;
    match sub {
        P2pCmd::Simulate { spec } => {
            let spec = io::parse_p2p_spec(&read(spec)?)?;
            let perf = p2p::simulate_p2p(&spec)?;
            ok(format!(
                "{{\"exact_error\":{},\"bound\":{}}}",
                fmt_float(perf.exact_error),
                fmt_float(perf.bound)
            ))
        }
        P2pCmd::Bound { spec } => {
            let spec = io::parse_p2p_spec(&read(spec)?)?;
            ok(format!("{{\"bound\":{}}}", fmt_float(p2p::one_shot_error_bound(&spec)?)))
        }
        P2pCmd::Exponent { resource, channel, rate, iid, grid } => {
            let theta = io::parse_density(&read(resource)?)?;
            let ch = io::parse_channel(&read(channel)?)?;
            let s_grid = linspace01(*grid)?;
            let e = p2p::error_exponent_lower(&theta, &ch, *rate, &s_grid, *iid)?;
            ok(format!(
                "{{\"value\":{},\"s_star\":{},\"unimodal\":{}}}",
                fmt_float(e.value),
                fmt_float(e.s_star),
                e.unimodal
            ))
        }
        P2pCmd::Capacity { resource, channel, eps, eta } => {
            let theta = io::parse_density(&read(resource)?)?;
            let ch = io::parse_channel(&read(channel)?)?;
            let v = p2p::one_shot_capacity_lower(&theta, &ch, *eps, *eta)?;
            ok(format!("{{\"capacity_lower\":{}}}", fmt_float(v)))
        }
        P2pCmd::SecondOrder { resource, channel, n, eps } => {
            let theta = io::parse_density(&read(resource)?)?;
            let ch = io::parse_channel(&read(channel)?)?;
            let v = p2p::second_order_rate(&theta, &ch, *n, *eps)?;
            ok(format!("{{\"rate\":{}}}", fmt_float(v)))
        }
        P2pCmd::Upper { channel, eps, restarts } => {
            let ch = io::parse_channel(&read(channel)?)?;
            let est = p2p::capacity_upper_eps_mi(&ch, *eps, *restarts, cli.seed)?;
            ok(format!(
                "{{\"estimate\":{},\"best\":{},\"worst\":{},\"heuristic\":{}}}",
                fmt_float(est.estimate),
                fmt_float(est.best),
                fmt_float(est.worst),
                est.heuristic
            ))
        }
    }
}

fn run_mac(cli: &Cli, sub: &MacCmd) -> Result<Outcome> {
    match sub {
        MacCmd::Simulate { spec } => {
            json_only(cli.format)?;
            let spec = io::parse_mac_spec(&read(spec)?)?;
            let perf = mac::simulate_mac(&spec)?;
            ok(format!(
                "{{\"exact_error\":{},\"bound\":{}}}",
                fmt_float(perf.exact_error),
                fmt_float(perf.bound)
            ))
        }
        MacCmd::Bound { spec } => {
            json_only(cli.format)?;
            let spec = io::parse_mac_spec(&read(spec)?)?;
            ok(format!("{{\"bound\":{}}}", fmt_float(mac::mac_one_shot_bound(&spec)?)))
        }
        MacCmd::Derandomize { mac: path, l, m, budget } => {
            json_only(cli.format)?;
            let cq = io::parse_cq_mac(&read(path)?)?;
            let r = mac::derandomize_cq_mac(&cq, *l, *m, *budget, cli.seed)?;
            let cx: Vec<String> = r.codebook_x.iter().map(|v| v.to_string()).collect();
            let cy: Vec<String> = r.codebook_y.iter().map(|v| v.to_string()).collect();
            ok(format!(
                "{{\"codebook_x\":[{}],\"codebook_y\":[{}],\"avg_error\":{},\"ensemble_average\":{},\"enumerated\":{}}}",
                cx.join(","),
                cy.join(","),
                fmt_float(r.avg_error),
                fmt_float(r.ensemble_average),
                r.enumerated
            ))
        }
        MacCmd::Region { state, kind } => {
            let omega = io::parse_density(&read(state)?)?;
            let region = match kind {
                RegionKind::Renyi2 => mac::rate_region_renyi2(&omega)?,
                RegionKind::Collision => mac::rate_region_collision(&omega)?,
                RegionKind::Mi => mac::rate_region_mi(&omega)?,
            };
            match cli.format {
                Format::Json => ok(io::write_rate_region(&region)),
                Format::Csv => {
                    let hull = mac::region_vertices_2d(&region, &region)?;
                    ok(io::vertices_csv(&hull.hull))
                }
            }
        }
        MacCmd::Exponent { theta, gamma, channel, r1, r2, grid } => {
            json_only(cli.format)?;
            let theta = io::parse_density(&read(theta)?)?;
            let gamma = io::parse_density(&read(gamma)?)?;
            let ch = io::parse_channel(&read(channel)?)?;
            let s_grid = linspace01(*grid)?;
            let e = mac::mac_error_exponent(&theta, &gamma, &ch, *r1, *r2, &s_grid)?;
            let terms: Vec<String> = e
                .terms
                .iter()
                .map(|(v, s)| format!("[{},{}]", fmt_float(*v), fmt_float(*s)))
                .collect();
            ok(format!(
                "{{\"value\":{},\"terms\":[{}],\"conditional\":{}}}",
                fmt_float(e.value),
                terms.join(","),
                e.conditional
            ))
        }
        MacCmd::Identities { theta, gamma, channel, r1, r2 } => {
            json_only(cli.format)?;
            let theta = io::parse_density(&read(theta)?)?;
            let gamma = io::parse_density(&read(gamma)?)?;
            let ch = io::parse_channel(&read(channel)?)?;
            let rows = mac::mac_divergence_identities(&theta, &gamma, &ch, *r1, *r2)?;
            let slack = tol_map(cli).get("residual").copied().unwrap_or(1e-6);
            let failed = rows.iter().any(|r| !(r.residual <= slack));
            let body: Vec<String> = rows
                .iter()
                .map(|r| {
                    format!(
                        "{{\"name\":\"{}\",\"divergence\":{},\"mi_minus_rate\":{},\"residual\":{}}}",
                        r.name,
                        fmt_float(r.divergence),
                        fmt_float(r.mi_minus_rate),
                        fmt_float(r.residual)
                    )
                })
                .collect();
            Ok(Outcome {
                artifact: format!("{{\"rows\":[{}]}}", body.join(",")),
                failed,
            })
        }
    }
}

fn linspace01(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::Precondition("grid needs at least 2 points".into()));
    }
    Ok((0..points)
        .map(|k| k as f64 / (points - 1) as f64)
        .collect())
}

fn trial_rng(seed: u64, i: usize) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn run_check(cli: &Cli, sub: &CheckCmd) -> Result<Outcome> {
    json_only(cli.format)?;
    use rand::Rng;
    let seed = cli.seed;
    let (trials, check): (usize, Box<dyn Fn(usize) -> Result<bool> + Sync>) = match sub {
        CheckCmd::Gentle { trials } => (*trials, Box::new(move |i| {
            let mut rng = trial_rng(seed, i);
            let d = 2 + i % 4;
            let rho = random::density(&mut rng, d);
            let lam = random::test_operator(&mut rng, d);
            let eps = (1.0 - lam.trace_product(rho.op())).max(0.0) + 1e-12;
            hyptest::check_gentle(&rho, &lam, eps)
        })),
        CheckCmd::Close { trials } => (*trials, Box::new(move |i| {
            let mut rng = trial_rng(seed, i);
            let d = 2 + i % 4;
            let rho = random::density(&mut rng, d);
            let sigma = random::density(&mut rng, d);
            let lam = random::test_operator(&mut rng, d);
            hyptest::check_close(rho.op(), sigma.op(), &lam)
        })),
        CheckCmd::Hn { trials } => (*trials, Box::new(move |i| {
            let mut rng = trial_rng(seed, i);
            let d = 2 + i % 5;
            let s = random::test_operator(&mut rng, d);
            let t = random::psd(&mut rng, d, 1.0);
            let c = [0.5, 1.0, 2.0][i % 3];
            hyptest::check_hayashi_nagaoka(&s, &t, c)
        })),
        CheckCmd::Spectral { trials } => (*trials, Box::new(move |i| {
            let mut rng = trial_rng(seed, i);
            let d = 2 + i % 4;
            let a = random::psd(&mut rng, d, 1.0);
            let b = random::psd(&mut rng, d, 1.0);
            let s: f64 = rng.random();
            hyptest::check_spectral_ineq(&a, &b, s).map(|(_, _, held)| held)
        })),
        CheckCmd::Prop1 { trials } => (*trials, Box::new(move |i| {
            let mut rng = trial_rng(seed, i);
            let d = 2 + i % 4;
            let rho = random::density(&mut rng, d);
            let sigma = random::density(&mut rng, d);
            let alpha = 0.05 + 0.9 * rng.random::<f64>();
            let eps = 0.05 + 0.9 * rng.random::<f64>();
            hyptest::check_prop_hypo_renyi(&rho, sigma.op(), alpha, eps)
                .map(|(_, _, held)| held)
        })),
        CheckCmd::Cmw { trials } => (*trials, Box::new(move |i| {
            let mut rng = trial_rng(seed, i);
            let d = 2 + i % 4;
            let rho = random::density(&mut rng, d);
            let sigma = random::density(&mut rng, d);
            let alpha = 1.0 + 0.05 + 2.0 * rng.random::<f64>();
            let eps = 0.05 + 0.9 * rng.random::<f64>();
            hyptest::check_cmw_upper(&rho, sigma.op(), alpha, eps)
                .map(|(_, _, held)| held)
        })),
    };
    let results: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|i| check(i))
        .collect::<Result<Vec<bool>>>()?;
    let violations = results.iter().filter(|&&held| !held).count();
    Ok(Outcome {
        artifact: format!("{{\"trials\":{trials},\"violations\":{violations}}}"),
        failed: violations > 0,
    })
}
