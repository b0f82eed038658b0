//! Structural rank of polynomial matrices, min-cut rank, and the derived
//! finite-field deterministic network with its lift back to a fading
//! assignment.
//!
//! Structural rank is estimated by evaluating the matrix at random points
//! of a large prime field and taking the best rank over independent trials;
//! the reported failure probability is the Schwartz-Zippel bound. The
//! deterministic network keeps the topology, picks a prime `p` and per-edge
//! coefficients `ξ` so that every cut's rank witness stays nonsingular, and
//! lifting `ξ` back as complex integers exhibits a fading realization whose
//! rank matches the finite-field one.

use crate::net::{NetError, NetworkGraph};
use crate::poly::{mulmod, PolyMatrix};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Field used for structural-rank trials (a prime just above 2^31, so
/// products stay within u64).
pub const STRUCTURAL_PRIME: u64 = 2_147_483_659;

/// Default number of independent structural-rank trials.
pub const DEFAULT_RANK_TRIALS: usize = 20;

/// Prime-ladder bounds for the deterministic-network construction.
const LADDER_START_BITS: u32 = 13;
const LADDER_END_BITS: u32 = 61;
const LADDER_ATTEMPTS_PER_PRIME: usize = 16;

/// Default relative singular-value threshold for numeric rank.
pub const DEFAULT_SV_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DetError {
    #[error("network error: {0}")]
    Net(#[from] NetError),
    #[error("prime ladder exhausted above 2^{LADDER_END_BITS} without a nonvanishing assignment")]
    LadderExhausted,
    #[error("lift requires an acyclic network")]
    Cyclic,
    #[error("network has no sinks")]
    NoSinks,
}

/// Structural-rank estimate with its rank witness.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    pub trials: usize,
    /// Schwartz-Zippel bound on `Pr[reported < structural rank]`.
    pub failure_bound: f64,
    /// Row/column indices of a `rank × rank` submatrix whose determinant
    /// evaluated nonzero (certain, not probabilistic).
    pub witness_rows: Vec<usize>,
    pub witness_cols: Vec<usize>,
}

struct RankPivots {
    rank: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b { a - b } else { a + p - b }
}

fn powmod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// Rank of a matrix over F_p by row reduction.
pub fn rank_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    rank_pivots(&mut m, p).rank
}

fn rank_pivots(m: &mut [Vec<u64>], p: u64) -> RankPivots {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    for row in m.iter_mut() {
        for v in row.iter_mut() {
            *v %= p;
        }
    }
    let mut perm: Vec<usize> = (0..rows).collect();
    let mut pivot_rows = Vec::new();
    let mut pivot_cols = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        perm.swap(r, pr);
        pivot_rows.push(perm[r]);
        pivot_cols.push(c);
        let inv = inv_mod(m[r][c], p);
        for i in (r + 1)..rows {
            if m[i][c] != 0 {
                let factor = mulmod(m[i][c], inv, p);
                for j in c..cols {
                    let sub = mulmod(factor, m[r][j], p);
                    m[i][j] = submod(m[i][j], sub, p);
                }
            }
        }
        r += 1;
    }
    RankPivots { rank: r, rows: pivot_rows, cols: pivot_cols }
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    key[16..24].copy_from_slice(&0x6472616e6b5f5f31u64.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Structural rank with default trial count and seed.
pub fn structural_rank(m: &PolyMatrix) -> RankReport {
    structural_rank_with(m, DEFAULT_RANK_TRIALS, 42)
}

/// Maximum rank of the matrix over random assignments in F_p, maximized
/// over `trials` independent trials. The witness submatrix of the reported
/// rank has a certainly-nonzero determinant polynomial; only the claim
/// "no larger rank exists" carries the reported failure probability.
pub fn structural_rank_with(m: &PolyMatrix, trials: usize, seed: u64) -> RankReport {
    assert!(trials >= 1);
    let n_vars = {
        let mut vars = std::collections::BTreeSet::new();
        m.collect_vars(&mut vars);
        vars.iter().max().map_or(0, |&v| v as usize + 1)
    };
    let p = STRUCTURAL_PRIME;
    let mut best = RankPivots { rank: 0, rows: Vec::new(), cols: Vec::new() };
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let assignment: Vec<u64> = (0..n_vars).map(|_| rng.gen_range(0..p)).collect();
        let mut grid = m.eval_mod(&assignment, p);
        let piv = rank_pivots(&mut grid, p);
        if piv.rank > best.rank {
            best = piv;
        }
    }
    let degree = m.det_degree_bound().max(1) as f64;
    let per_trial = (degree / p as f64).min(1.0);
    RankReport {
        rank: best.rank,
        trials,
        failure_bound: per_trial.powi(trials as i32),
        witness_rows: best.rows,
        witness_cols: best.cols,
    }
}

/// Per-cut rank detail for reports.
#[derive(Debug, Clone, Serialize)]
pub struct CutRankDetail {
    pub source_side: Vec<String>,
    pub crossing_edges: usize,
    pub rank: usize,
}

/// Maximum multiplexing gain report: the min over all cuts of the cut
/// pattern's structural rank. Achievable for full-duplex networks; an
/// upper bound under half-duplex operation.
#[derive(Debug, Clone, Serialize)]
pub struct MmgReport {
    pub value: usize,
    pub per_cut: Vec<CutRankDetail>,
    pub trials: usize,
    /// Union bound over cuts of the per-cut Schwartz-Zippel bounds.
    pub failure_bound: f64,
}

pub fn mmg(net: &NetworkGraph) -> Result<MmgReport, DetError> {
    mmg_with(net, DEFAULT_RANK_TRIALS, 42)
}

pub fn mmg_with(net: &NetworkGraph, trials: usize, seed: u64) -> Result<MmgReport, DetError> {
    let (s, t) = (net.source()?, net.sink()?);
    mmg_between(net, s, t, trials, seed)
}

fn mmg_between(
    net: &NetworkGraph,
    s: usize,
    t: usize,
    trials: usize,
    seed: u64,
) -> Result<MmgReport, DetError> {
    let cuts = net.enumerate_cuts_between(s, t)?;
    let mut per_cut = Vec::with_capacity(cuts.len());
    let mut value = usize::MAX;
    let mut failure_bound = 0.0;
    for (i, cut) in cuts.iter().enumerate() {
        let pattern = net.cut_transfer_pattern(cut);
        let report = structural_rank_with(&pattern.matrix, trials, seed.wrapping_add(i as u64));
        value = value.min(report.rank);
        failure_bound += report.failure_bound;
        per_cut.push(CutRankDetail {
            source_side: cut
                .source_side
                .iter()
                .map(|&n| net.nodes()[n].id.clone())
                .collect(),
            crossing_edges: cut.crossing_edges.len(),
            rank: report.rank,
        });
    }
    Ok(MmgReport { value, per_cut, trials, failure_bound })
}

/// Multicast MMG: the minimum over sinks of the single-sink MMG.
pub fn mmg_multicast(net: &NetworkGraph, trials: usize, seed: u64) -> Result<MmgReport, DetError> {
    let s = net.source()?;
    let sinks = net.sinks();
    if sinks.is_empty() {
        return Err(DetError::NoSinks);
    }
    let mut best: Option<MmgReport> = None;
    for (j, &t) in sinks.iter().enumerate() {
        let r = mmg_between(net, s, t, trials, seed.wrapping_mul(j as u64 + 1))?;
        best = match best {
            None => Some(r),
            Some(b) if r.value < b.value => Some(r),
            Some(b) => Some(b),
        };
    }
    Ok(best.unwrap())
}

// --- Primality ----------------------------------------------------------------

/// Deterministic Miller-Rabin for u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn next_prime(mut n: u64) -> u64 {
    if n <= 2 {
        return 2;
    }
    if n % 2 == 0 {
        n += 1;
    }
    while !is_prime(n) {
        n += 2;
    }
    n
}

// --- Derived deterministic network ---------------------------------------------

/// Finite-field image of a fading network: same topology, prime modulus
/// `p`, vector length `q` (the largest antenna count), and one coefficient
/// `ξ` per edge chosen so every cut's rank witness is nonsingular.
#[derive(Debug, Clone)]
pub struct DetNetwork {
    pub net: NetworkGraph,
    pub p: u64,
    pub q: usize,
    /// Edge variable id → field coefficient.
    pub xi: BTreeMap<u32, u64>,
}

impl DetNetwork {
    pub fn assignment_vec(&self) -> Vec<u64> {
        let n = self.net.edges().len();
        let mut v = vec![0u64; n];
        for (&var, &val) in &self.xi {
            v[var as usize] = val;
        }
        v
    }

    pub fn to_json(&self) -> DetNetworkJson {
        DetNetworkJson {
            p: self.p,
            q: self.q,
            xi: self.xi.iter().map(|(&k, &v)| (k.to_string(), v)).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DetNetworkJson {
    pub p: u64,
    pub q: usize,
    pub xi: BTreeMap<String, u64>,
}

/// Build the derived deterministic network: per cut, take the structural
/// rank witness submatrix; then walk a doubling prime ladder, sampling
/// coefficients uniformly until every witness determinant is nonzero mod p.
pub fn derive_deterministic(net: &NetworkGraph, seed: u64) -> Result<DetNetwork, DetError> {
    let cuts = net.enumerate_cuts()?;
    let mut witnesses: Vec<PolyMatrix> = Vec::with_capacity(cuts.len());
    for (i, cut) in cuts.iter().enumerate() {
        let pattern = net.cut_transfer_pattern(cut);
        let report =
            structural_rank_with(&pattern.matrix, DEFAULT_RANK_TRIALS, seed.wrapping_add(i as u64));
        if report.rank > 0 {
            witnesses.push(pattern.matrix.submatrix(&report.witness_rows, &report.witness_cols));
        }
    }
    let q = net.nodes().iter().map(|n| n.antennas).max().unwrap_or(1);
    let n_edges = net.edges().len();

    let mut stream = 0u64;
    for bits in LADDER_START_BITS..=LADDER_END_BITS {
        let p = next_prime(1u64 << bits);
        for _ in 0..LADDER_ATTEMPTS_PER_PRIME {
            let mut rng = trial_rng(seed, 0x86a7_0000 + stream);
            stream += 1;
            let assignment: Vec<u64> = (0..n_edges).map(|_| rng.gen_range(0..p)).collect();
            let ok = witnesses.iter().all(|w| {
                let mut grid = w.eval_mod(&assignment, p);
                rank_pivots(&mut grid, p).rank == w.rows()
            });
            if ok {
                let xi = assignment
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (i as u32, v))
                    .collect();
                return Ok(DetNetwork { net: net.clone(), p, q, xi });
            }
        }
    }
    Err(DetError::LadderExhausted)
}

/// Per-cut F_p rank report for the deterministic network.
#[derive(Debug, Clone, Serialize)]
pub struct DetRankReport {
    pub value: usize,
    pub per_cut: Vec<CutRankDetail>,
}

/// Min over cuts of the F_p rank of the cut transfer matrix; equals the
/// zero-error capacity of the deterministic network in field symbols per
/// use.
pub fn det_min_cut_rank(d: &DetNetwork) -> Result<DetRankReport, DetError> {
    let cuts = d.net.enumerate_cuts()?;
    let assignment = d.assignment_vec();
    let mut per_cut = Vec::with_capacity(cuts.len());
    let mut value = usize::MAX;
    for cut in &cuts {
        let pattern = d.net.cut_transfer_pattern(cut);
        let grid = pattern.matrix.eval_mod(&assignment, d.p);
        let rank = rank_mod_p(grid, d.p);
        value = value.min(rank);
        per_cut.push(CutRankDetail {
            source_side: cut
                .source_side
                .iter()
                .map(|&n| d.net.nodes()[n].id.clone())
                .collect(),
            crossing_edges: cut.crossing_edges.len(),
            rank,
        });
    }
    Ok(DetRankReport { value, per_cut })
}

/// Result of lifting the deterministic coefficients back to a complex
/// fading assignment.
#[derive(Debug, Clone, Serialize)]
pub struct LiftReport {
    /// `h_i` = integer image of `ξ_i`, in edge order.
    pub assignment: Vec<u64>,
    /// Numeric rank (SVD, relative threshold) of the end-to-end transfer
    /// matrix at this assignment.
    pub numeric_rank: usize,
    /// Exact F_p rank of the deterministic end-to-end transfer matrix,
    /// a certified lower bound on the rational rank.
    pub witness_rank: usize,
    /// Set when the SVD disagrees with the certified bound.
    pub ill_conditioned: bool,
    pub sv_threshold: f64,
}

/// Flow-through end-to-end transfer of an acyclic full-duplex network:
/// entry (sink antenna, source antenna) sums the edge-coefficient products
/// over all directed paths.
fn end_to_end_f64(net: &NetworkGraph, values: &[f64]) -> Result<DMatrix<f64>, DetError> {
    let order = net.topo_order().ok_or(DetError::Cyclic)?;
    let source = net.source()?;
    let sink = net.sink()?;
    let n_src = net.nodes()[source].antennas;
    let mut mats: Vec<DMatrix<f64>> = net
        .nodes()
        .iter()
        .map(|n| DMatrix::zeros(n.antennas, n_src))
        .collect();
    mats[source] = DMatrix::identity(n_src, n_src);
    for &v in &order {
        if v == source {
            continue;
        }
        let mut acc = DMatrix::zeros(net.nodes()[v].antennas, n_src);
        for &ei in net.in_edges(v) {
            let e = &net.edges()[ei];
            let coeff = values[e.var as usize];
            for c in 0..n_src {
                acc[(e.to.index, c)] += coeff * mats[e.from.node][(e.from.index, c)];
            }
        }
        mats[v] = acc;
    }
    Ok(mats[sink].clone())
}

fn end_to_end_mod(net: &NetworkGraph, values: &[u64], p: u64) -> Result<Vec<Vec<u64>>, DetError> {
    let order = net.topo_order().ok_or(DetError::Cyclic)?;
    let source = net.source()?;
    let sink = net.sink()?;
    let n_src = net.nodes()[source].antennas;
    let mut mats: Vec<Vec<Vec<u64>>> = net
        .nodes()
        .iter()
        .map(|n| vec![vec![0u64; n_src]; n.antennas])
        .collect();
    for c in 0..n_src {
        mats[source][c][c] = 1;
    }
    for &v in &order {
        if v == source {
            continue;
        }
        let mut acc = vec![vec![0u64; n_src]; net.nodes()[v].antennas];
        for &ei in net.in_edges(v) {
            let e = &net.edges()[ei];
            let coeff = values[e.var as usize] % p;
            for c in 0..n_src {
                let add = mulmod(coeff, mats[e.from.node][e.from.index][c], p);
                acc[e.to.index][c] = crate::poly::addmod(acc[e.to.index][c], add, p);
            }
        }
        mats[v] = acc;
    }
    Ok(mats[sink].clone())
}

fn numeric_rank(mut m: DMatrix<f64>, rel_threshold: f64) -> usize {
    // equilibrate to tame the dynamic range of integer path products
    for mut row in m.row_iter_mut() {
        let mx = row.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if mx > 0.0 {
            row /= mx;
        }
    }
    for mut col in m.column_iter_mut() {
        let mx = col.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if mx > 0.0 {
            col /= mx;
        }
    }
    let svd = m.svd(false, false);
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > rel_threshold * smax)
        .count()
}

pub fn lift_to_fading(d: &DetNetwork) -> Result<LiftReport, DetError> {
    lift_to_fading_with(d, DEFAULT_SV_THRESHOLD)
}

/// Lift `ξ` to the complex assignment `h_i = ξ_i` and compare the numeric
/// rank of the end-to-end fading transfer with the exact F_p rank of its
/// deterministic image.
pub fn lift_to_fading_with(d: &DetNetwork, sv_threshold: f64) -> Result<LiftReport, DetError> {
    let assignment = d.assignment_vec();
    let values_f: Vec<f64> = assignment.iter().map(|&v| v as f64).collect();
    let h = end_to_end_f64(&d.net, &values_f)?;
    let g = end_to_end_mod(&d.net, &assignment, d.p)?;
    let witness_rank = rank_mod_p(g, d.p);
    let numeric = numeric_rank(h, sv_threshold);
    Ok(LiftReport {
        assignment,
        numeric_rank: numeric,
        witness_rank,
        ill_conditioned: numeric < witness_rank,
        sv_threshold,
    })
}
