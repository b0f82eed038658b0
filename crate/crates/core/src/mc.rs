//! Monte Carlo verification: outage probability over an SNR ladder,
//! diversity-slope fitting, small-ball and tail-probability decay checks,
//! and noise-covariance eigenvalue bounds.
//!
//! Trials are partitioned into a fixed number of chunks; every chunk owns a
//! counter-mode RNG stream derived from (master seed, stream tag, chunk), so
//! results are bit-identical for any worker count.

use crate::poly::{Poly, PolyMatrix};
use crate::proto::InducedChannel;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use thiserror::Error;

/// Fixed chunk count; independent of the worker count for reproducibility.
const CHUNKS: u64 = 64;

#[derive(Debug, Error)]
pub enum McError {
    #[error("tail-bound polynomial must have no constant term")]
    ConstantTerm,
}

fn worker_count() -> usize {
    std::env::var("DMTLAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

fn chunk_rng(seed: u64, stream: u64, chunk: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    key[16..24].copy_from_slice(&chunk.to_le_bytes());
    key[24..32].copy_from_slice(&0x6d635f6c61625f31u64.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Circularly-symmetric CN(0, 1): independent N(0, 1/2) parts.
fn sample_cn(rng: &mut ChaCha8Rng) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

fn sample_assignment(rng: &mut ChaCha8Rng, n: usize, into: &mut Vec<Complex64>) {
    into.clear();
    into.extend((0..n).map(|_| sample_cn(rng)));
}

/// Run `trials` of `tally` across chunks and sum the per-bucket counts.
/// `tally` increments any subset of `counts` for one trial.
fn mc_tally<F>(trials: u64, seed: u64, stream: u64, buckets: usize, tally: F) -> Vec<u64>
where
    F: Fn(&mut ChaCha8Rng, &mut [u64]) + Sync,
{
    let sizes: Vec<u64> = (0..CHUNKS)
        .map(|c| trials / CHUNKS + u64::from(c < trials % CHUNKS))
        .collect();
    let next = AtomicUsize::new(0);
    let totals: Vec<AtomicU64> = (0..buckets).map(|_| AtomicU64::new(0)).collect();
    let workers = worker_count().min(CHUNKS as usize).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                let mut local = vec![0u64; buckets];
                loop {
                    let c = next.fetch_add(1, Ordering::Relaxed);
                    if c >= CHUNKS as usize {
                        break;
                    }
                    let mut rng = chunk_rng(seed, stream, c as u64);
                    for _ in 0..sizes[c] {
                        tally(&mut rng, &mut local);
                    }
                }
                for (t, &v) in totals.iter().zip(local.iter()) {
                    t.fetch_add(v, Ordering::Relaxed);
                }
            });
        }
    });
    totals.into_iter().map(|t| t.into_inner()).collect()
}

/// Flattened evaluation plan for a sparse polynomial matrix.
struct Plan {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Vec<(f64, Vec<u32>)>)>,
}

impl Plan {
    fn new(m: &PolyMatrix) -> Plan {
        let entries = m
            .entries()
            .map(|(r, c, p)| {
                let terms = p
                    .terms()
                    .map(|(mono, coeff)| {
                        let mut vars = Vec::new();
                        for &(v, e) in &mono.0 {
                            for _ in 0..e {
                                vars.push(v);
                            }
                        }
                        (coeff as f64, vars)
                    })
                    .collect();
                (r, c, terms)
            })
            .collect();
        Plan { rows: m.rows(), cols: m.cols(), entries }
    }

    fn eval_into(&self, a: &[Complex64], out: &mut DMatrix<Complex64>) {
        out.fill(Complex64::new(0.0, 0.0));
        for (r, c, terms) in &self.entries {
            let mut acc = Complex64::new(0.0, 0.0);
            for (coeff, vars) in terms {
                let mut t = Complex64::new(*coeff, 0.0);
                for &v in vars {
                    t *= a[v as usize];
                }
                acc += t;
            }
            out[(*r, *c)] = acc;
        }
    }
}

fn logdet_hermitian(m: DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    match m.cholesky() {
        Some(chol) => {
            let l = chol.l();
            let mut ld = 0.0;
            for i in 0..n {
                ld += l[(i, i)].re.ln();
            }
            2.0 * ld
        }
        // positive definiteness can only fail through rounding at the
        // boundary; treat as singular
        None => f64::NEG_INFINITY,
    }
}

struct ChannelSim {
    h_plan: Plan,
    g_plans: Vec<Plan>,
    n_vars: usize,
    data_slots: usize,
}

impl ChannelSim {
    fn new(ic: &InducedChannel) -> Self {
        ChannelSim {
            h_plan: Plan::new(&ic.signal),
            g_plans: ic
                .noise_transfers
                .iter()
                .filter(|g| g.num_entries() > 0)
                .map(Plan::new)
                .collect(),
            n_vars: ic.n_vars,
            data_slots: ic.data_slots,
        }
    }

    /// Mutual information (nats) of one realization with i.i.d. gaussian
    /// inputs: `logdet(I + ρ H H† Σ^{-1})`, with `Σ = I` when not whitening.
    fn mutual_info_nats(&self, a: &[Complex64], rho: f64, whiten: bool) -> f64 {
        let mut h = DMatrix::zeros(self.h_plan.rows, self.h_plan.cols);
        self.h_plan.eval_into(a, &mut h);
        let hh = &h * h.adjoint() * Complex64::new(rho, 0.0);
        if whiten && !self.g_plans.is_empty() {
            let n = self.h_plan.rows;
            let mut sigma = DMatrix::<Complex64>::identity(n, n);
            let mut g = DMatrix::zeros(n, 1);
            for plan in &self.g_plans {
                plan.eval_into(a, &mut g);
                sigma += &g * g.adjoint();
            }
            let a_mat = &sigma + &hh;
            logdet_hermitian(a_mat) - logdet_hermitian(sigma)
        } else {
            let n = self.h_plan.rows;
            logdet_hermitian(DMatrix::<Complex64>::identity(n, n) + hh)
        }
    }
}

fn outage_count(
    ic: &InducedChannel,
    r: f64,
    rho: f64,
    trials: u64,
    whiten: bool,
    seed: u64,
    stream: u64,
) -> u64 {
    let sim = ChannelSim::new(ic);
    // outage event: (1/data_slots)·log2 det < r·log2 ρ, in nats
    let threshold = r * sim.data_slots as f64 * rho.ln();
    let counts = mc_tally(trials, seed, stream, 1, |rng, counts| {
        let mut a = Vec::new();
        sample_assignment(rng, sim.n_vars, &mut a);
        if sim.mutual_info_nats(&a, rho, whiten) < threshold {
            counts[0] += 1;
        }
    });
    counts[0]
}

/// Empirical outage probability of the induced channel at multiplexing
/// gain `r` and SNR `rho` (linear). The rate is `r·log2(ρ)` bits per
/// network use over `data_slots` slots; at exactly `r = 0` the event is
/// empty (use a small positive r for the zero endpoint).
pub fn outage_probability(
    ic: &InducedChannel,
    r: f64,
    rho: f64,
    trials: u64,
    whiten: bool,
    seed: u64,
) -> f64 {
    assert!(trials >= 1);
    outage_count(ic, r, rho, trials, whiten, seed, 0) as f64 / trials as f64
}

/// Outage estimate across an SNR ladder with a fitted diversity slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageEstimate {
    pub rho_db: Vec<f64>,
    pub p_out: Vec<f64>,
    pub trials: u64,
    /// Points with at least this many outage events enter the fit.
    pub min_events: u64,
    pub used: Vec<bool>,
    /// Fitted diversity: slope of −ln P_out against ln ρ.
    pub slope: f64,
    /// Half-width of the 95% confidence interval on the slope.
    pub ci: f64,
    pub seed: u64,
    pub whiten: bool,
}

/// Minimum outage events for a ladder point to enter the regression.
pub const MIN_OUTAGE_EVENTS: u64 = 50;

pub fn estimate_diversity(
    ic: &InducedChannel,
    r: f64,
    rho_db: &[f64],
    trials: u64,
    whiten: bool,
    seed: u64,
) -> OutageEstimate {
    assert!(rho_db.len() >= 3, "need at least 3 SNR points");
    let mut p_out = Vec::with_capacity(rho_db.len());
    let mut used = Vec::with_capacity(rho_db.len());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut vars = Vec::new();
    for (i, &db) in rho_db.iter().enumerate() {
        let rho = 10f64.powf(db / 10.0);
        let count = outage_count(ic, r, rho, trials, whiten, seed, i as u64);
        let p = count as f64 / trials as f64;
        p_out.push(p);
        let usable = count >= MIN_OUTAGE_EVENTS && p < 1.0;
        used.push(usable);
        if usable {
            xs.push(rho.ln());
            ys.push(-p.ln());
            // var of ln p̂ from the binomial standard error
            vars.push((1.0 - p) / (trials as f64 * p));
        }
    }
    let (slope, ci) = fit_slope(&xs, &ys, &vars);
    OutageEstimate {
        rho_db: rho_db.to_vec(),
        p_out,
        trials,
        min_events: MIN_OUTAGE_EVENTS,
        used,
        slope,
        ci,
        seed,
        whiten,
    }
}

/// Ordinary least squares slope with error propagated from per-point
/// variances; returns (slope, 95% half-width).
fn fit_slope(xs: &[f64], ys: &[f64], vars: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n < 2 {
        return (f64::NAN, f64::INFINITY);
    }
    let xbar = xs.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let slope: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - xbar) * y)
        .sum::<f64>()
        / sxx;
    let var: f64 = xs
        .iter()
        .zip(vars)
        .map(|(x, v)| ((x - xbar) / sxx).powi(2) * v)
        .sum();
    (slope, 1.96 * var.sqrt())
}

/// Whether two slope estimates agree within their combined confidence
/// intervals.
pub fn slopes_agree(a: &OutageEstimate, b: &OutageEstimate) -> bool {
    (a.slope - b.slope).abs() <= a.ci + b.ci
}

/// Small-ball decay report for `Pr{|f|² < δ}`.
#[derive(Debug, Clone, Serialize)]
pub struct SmallBallReport {
    pub deltas: Vec<f64>,
    pub probs: Vec<f64>,
    pub trials: u64,
    /// Fitted slope of ln Pr against ln δ (positive when the probability
    /// vanishes polynomially).
    pub decay_slope: f64,
    /// Identically-zero determinant: probability 1 at every δ.
    pub rank_deficient: bool,
    pub seed: u64,
}

/// Estimate `Pr{|f(h)|² < δ}` for each δ with the variables of `f` drawn
/// i.i.d. CN(0,1), and fit the log-log decay slope.
pub fn small_ball_check(
    poly: &Poly,
    deltas: &[f64],
    trials: u64,
    seed: u64,
) -> SmallBallReport {
    assert!(!deltas.is_empty() && deltas.iter().all(|&d| d > 0.0));
    if poly.is_zero() {
        return SmallBallReport {
            deltas: deltas.to_vec(),
            probs: vec![1.0; deltas.len()],
            trials,
            decay_slope: 0.0,
            rank_deficient: true,
            seed,
        };
    }
    let n_vars = poly_var_span(poly);
    let plan = single_plan(poly);
    let counts = mc_tally(trials, seed, 0, deltas.len(), |rng, counts| {
        let mut a = Vec::new();
        sample_assignment(rng, n_vars, &mut a);
        let v = eval_single(&plan, &a).norm_sqr();
        for (i, &d) in deltas.iter().enumerate() {
            if v < d {
                counts[i] += 1;
            }
        }
    });
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
    let pts: Vec<(f64, f64)> = deltas
        .iter()
        .zip(&probs)
        .filter(|&(_, &p)| p > 0.0 && p < 1.0)
        .map(|(&d, &p)| (d.ln(), p.ln()))
        .collect();
    let decay_slope = if pts.len() >= 2 {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        fit_slope(&xs, &ys, &vec![0.0; xs.len()]).0
    } else {
        f64::NAN
    };
    SmallBallReport {
        deltas: deltas.to_vec(),
        probs,
        trials,
        decay_slope,
        rank_deficient: false,
        seed,
    }
}

/// Tail decay report for `Pr{|f|² > k}`.
#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    pub ks: Vec<f64>,
    pub probs: Vec<f64>,
    pub trials: u64,
    /// Stretch exponent used for the concavity diagnostic
    /// (variable count × max monomial degree).
    pub d_exponent: f64,
    /// ln Pr is concave decreasing in k^(1/d) over the usable tail points.
    pub eventually_concave: bool,
    /// f ≡ 0 never exceeds a positive threshold.
    pub zero_polynomial: bool,
    pub seed: u64,
}

/// Estimate `Pr{|f(h)|² > k}` for each k and check the stretched-
/// exponential shape: ln Pr concave decreasing in k^(1/d).
pub fn tail_bound_check(
    poly: &Poly,
    ks: &[f64],
    trials: u64,
    seed: u64,
) -> Result<TailReport, McError> {
    assert!(!ks.is_empty() && ks.iter().all(|&k| k > 0.0));
    if poly.has_constant_term() {
        return Err(McError::ConstantTerm);
    }
    if poly.is_zero() {
        return Ok(TailReport {
            ks: ks.to_vec(),
            probs: vec![0.0; ks.len()],
            trials,
            d_exponent: 1.0,
            eventually_concave: true,
            zero_polynomial: true,
            seed,
        });
    }
    let n_vars = poly_var_span(poly);
    let max_deg = poly
        .terms()
        .map(|(m, _)| m.total_degree())
        .max()
        .unwrap_or(1)
        .max(1);
    let d_exponent = (n_vars as f64) * max_deg as f64;
    let plan = single_plan(poly);
    let counts = mc_tally(trials, seed, 0, ks.len(), |rng, counts| {
        let mut a = Vec::new();
        sample_assignment(rng, n_vars, &mut a);
        let v = eval_single(&plan, &a).norm_sqr();
        for (i, &k) in ks.iter().enumerate() {
            if v > k {
                counts[i] += 1;
            }
        }
    });
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
    // slopes of ln Pr vs s = k^(1/d) must be negative and nonincreasing
    let mut pts: Vec<(f64, f64)> = ks
        .iter()
        .zip(&probs)
        .filter(|&(_, &p)| p > 0.0)
        .map(|(&k, &p)| (k.powf(1.0 / d_exponent), p.ln()))
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // slopes must stay negative and must not move toward zero by more than
    // the statistical slack (a polynomial tail rises clearly beyond it)
    let mut eventually_concave = true;
    let mut prev_slope = f64::NEG_INFINITY;
    for w in pts.windows(2) {
        let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        if slope >= 0.0 || (prev_slope.is_finite() && slope > 0.85 * prev_slope) {
            eventually_concave = false;
        }
        prev_slope = slope;
    }
    Ok(TailReport {
        ks: ks.to_vec(),
        probs,
        trials,
        d_exponent,
        eventually_concave,
        zero_polynomial: false,
        seed,
    })
}

fn poly_var_span(p: &Poly) -> usize {
    let mut vars = std::collections::BTreeSet::new();
    p.collect_vars(&mut vars);
    vars.iter().max().map_or(0, |&v| v as usize + 1)
}

fn single_plan(p: &Poly) -> Vec<(f64, Vec<u32>)> {
    p.terms()
        .map(|(mono, coeff)| {
            let mut vars = Vec::new();
            for &(v, e) in &mono.0 {
                for _ in 0..e {
                    vars.push(v);
                }
            }
            (coeff as f64, vars)
        })
        .collect()
}

fn eval_single(plan: &[(f64, Vec<u32>)], a: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (coeff, vars) in plan {
        let mut t = Complex64::new(*coeff, 0.0);
        for &v in vars {
            t *= a[v as usize];
        }
        acc += t;
    }
    acc
}

/// Result of the noise-covariance eigenvalue bound check.
#[derive(Debug, Clone, Serialize)]
pub struct EigenReport {
    pub samples: u64,
    pub violations: u64,
    pub min_lambda_min: f64,
    /// Largest observed `λ_max − (1 + Σ‖G_i‖_F²)`.
    pub max_excess: f64,
    pub seed: u64,
}

impl EigenReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Relative tolerance for the eigenvalue bounds.
pub const EIGEN_TOL: f64 = 1e-9;

/// Check `1 ≤ λ_min(Σ)` and `λ_max(Σ) ≤ 1 + Σ‖G_i‖_F²` on one covariance
/// realization.
pub fn sigma_bounds_ok(sigma: &DMatrix<Complex64>, frob_sum: f64, tol: f64) -> bool {
    let eig = sigma.clone().symmetric_eigen();
    let lmin = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let lmax = eig.eigenvalues.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let upper = 1.0 + frob_sum;
    lmin >= 1.0 - tol && lmax <= upper * (1.0 + tol) + tol
}

/// Sample fading assignments and verify the covariance eigenvalue bounds
/// on every realization.
pub fn eigen_bound_check(ic: &InducedChannel, trials: u64, seed: u64) -> EigenReport {
    let g_plans: Vec<Plan> = ic
        .noise_transfers
        .iter()
        .filter(|g| g.num_entries() > 0)
        .map(Plan::new)
        .collect();
    let n = ic.signal.rows();
    let mut rng = chunk_rng(seed, 0, 0);
    let mut violations = 0u64;
    let mut min_lambda_min = f64::INFINITY;
    let mut max_excess = f64::NEG_INFINITY;
    let mut a = Vec::new();
    let mut g = DMatrix::zeros(n, 1);
    for _ in 0..trials {
        sample_assignment(&mut rng, ic.n_vars, &mut a);
        let mut sigma = DMatrix::<Complex64>::identity(n, n);
        let mut frob_sum = 0.0;
        for plan in &g_plans {
            plan.eval_into(&a, &mut g);
            frob_sum += g.iter().map(|z| z.norm_sqr()).sum::<f64>();
            sigma += &g * g.adjoint();
        }
        let eig = sigma.clone().symmetric_eigen();
        let lmin = eig.eigenvalues.iter().fold(f64::INFINITY, |x, &b| x.min(b));
        let lmax = eig.eigenvalues.iter().fold(f64::NEG_INFINITY, |x, &b| x.max(b));
        min_lambda_min = min_lambda_min.min(lmin);
        max_excess = max_excess.max(lmax - (1.0 + frob_sum));
        if !sigma_bounds_ok(&sigma, frob_sum, EIGEN_TOL) {
            violations += 1;
        }
    }
    EigenReport { samples: trials, violations, min_lambda_min, max_excess, seed }
}
