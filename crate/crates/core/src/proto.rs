//! Amplify-and-forward protocol schedules and their induced channels.
//!
//! A schedule lists, per slot, the live antenna-level edges. Relays buffer
//! the most recent completed reception and forward it (unit amplification
//! gain) in a later slot; receiver noise is injected at every listening
//! event and propagated symbolically exactly like the signal. The builder
//! produces the signal transfer matrix `H` and one noise-transfer column
//! per relay noise injection; sink noise is the implicit identity.

use crate::dmt::{
    blt_lower_bound, parallel_weighted, rayleigh_mimo_dmt, DmtCurve, DmtError,
};
use crate::net::{NetError, NetworkGraph, Role, ScheduleViolation};
use crate::poly::{Poly, PolyMatrix, Var};
use crate::rat::{rat, rat_from_f64, rint, Rat};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProtoError {
    #[error("network error: {0}")]
    Net(#[from] NetError),
    #[error("schedule rejected: {0}")]
    Schedule(#[from] ScheduleViolation),
    #[error("slot {slot}: relay {node:?} antenna {antenna} transmits with an empty buffer")]
    EmptyBuffer { slot: usize, node: String, antenna: usize },
    #[error("slot {slot}: the sink cannot transmit")]
    SinkTransmits { slot: usize },
    #[error("schedule names {got} source emissions but {expected} source transmit events occur")]
    EmissionCount { expected: usize, got: usize },
    #[error("emission references data symbol {index} beyond the declared count")]
    BadEmission { index: usize },
    #[error("source and sink are disconnected")]
    Disconnected,
    #[error("protocol requires full-duplex nodes")]
    RequiresFullDuplex,
    #[error("need more than {delay} slots per path, got {slots}")]
    SlotsTooFew { slots: usize, delay: usize },
    #[error("neither protocol condition holds: {diagnosis}")]
    ConditionsUnmet { diagnosis: String },
    #[error("bad protocol parameters: {0}")]
    BadParams(String),
    #[error("curve error: {0}")]
    Dmt(#[from] DmtError),
}

/// What the source puts on air at one of its transmit events.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emit {
    Data(usize),
    Zero,
}

/// Protocol schedule: per-slot live edge sets plus the source emission plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    /// Per slot, the indices of live edges.
    pub slots: Vec<Vec<usize>>,
    /// Consumed one per source transmitting antenna, slot-major then
    /// antenna order.
    pub emissions: Vec<Emit>,
    /// Number of distinct data symbols.
    pub source_symbols: usize,
}

impl Schedule {
    pub fn new(slots: Vec<Vec<usize>>, emissions: Vec<Emit>, source_symbols: usize) -> Self {
        Schedule { slots, emissions, source_symbols }
    }

    /// Schedule that sends a fresh data symbol at every source transmit
    /// event.
    pub fn fresh_symbols(net: &NetworkGraph, slots: Vec<Vec<usize>>) -> Result<Self, ProtoError> {
        let source = net.source()?;
        let mut count = 0;
        for live in &slots {
            let mut ants = BTreeSet::new();
            for &ei in live {
                let e = net
                    .edges()
                    .get(ei)
                    .ok_or(NetError::BadEdgeIndex(ei))?;
                if e.from.node == source {
                    ants.insert(e.from.index);
                }
            }
            count += ants.len();
        }
        Ok(Schedule {
            slots,
            emissions: (0..count).map(Emit::Data).collect(),
            source_symbols: count,
        })
    }

    pub fn total_slots(&self) -> usize {
        self.slots.len()
    }
}

/// Symbolic induced channel of an AF protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedChannel {
    /// Signal transfer: sink receptions × data symbols.
    pub signal: PolyMatrix,
    /// One column (rows × 1) per relay noise injection; sink noise is the
    /// implicit identity.
    pub noise_transfers: Vec<PolyMatrix>,
    pub total_slots: usize,
    /// Slot count charged against the rate (the outage divisor).
    pub data_slots: usize,
    /// Number of fading variables of the owning network.
    pub n_vars: usize,
}

impl InducedChannel {
    /// Wrap a bare matrix channel (no relay noise), e.g. for simulating a
    /// point-to-point or parallel matrix directly.
    pub fn from_signal(signal: PolyMatrix, total_slots: usize, data_slots: usize) -> Self {
        let mut vars = BTreeSet::new();
        signal.collect_vars(&mut vars);
        let n_vars = vars.iter().max().map_or(0, |&v| v as usize + 1);
        InducedChannel {
            signal,
            noise_transfers: Vec::new(),
            total_slots,
            data_slots,
            n_vars,
        }
    }
}

/// Buffered or transmitted signal: linear combination of data symbols and
/// noise injections with polynomial coefficients.
#[derive(Debug, Clone, Default)]
struct Signal {
    data: BTreeMap<usize, Poly>,
    noise: BTreeMap<usize, Poly>,
}

impl Signal {
    fn unit(symbol: usize) -> Self {
        let mut data = BTreeMap::new();
        data.insert(symbol, Poly::one());
        Signal { data, noise: BTreeMap::new() }
    }

    /// `self += var · other`
    fn scaled_add(&mut self, var: Var, other: &Signal) {
        for (&k, p) in &other.data {
            self.data.entry(k).or_default().add_assign(&p.mul_var(var));
        }
        for (&k, p) in &other.noise {
            self.noise.entry(k).or_default().add_assign(&p.mul_var(var));
        }
    }
}

/// Propagate a schedule symbolically through the network.
///
/// Relay buffers hold the latest completed reception strictly before the
/// transmit slot; within a slot all transmissions read pre-slot buffers.
pub fn build_induced_channel(
    net: &NetworkGraph,
    sched: &Schedule,
) -> Result<InducedChannel, ProtoError> {
    net.validate_slots(&sched.slots)?;
    let source = net.source()?;
    let sink = net.sink()?;
    for e in &sched.emissions {
        if let Emit::Data(k) = e {
            if *k >= sched.source_symbols {
                return Err(ProtoError::BadEmission { index: *k });
            }
        }
    }

    let mut buffers: BTreeMap<(usize, usize), Signal> = BTreeMap::new();
    let mut rows: Vec<Signal> = Vec::new();
    let mut noise_count = 0usize;
    let mut emissions = sched.emissions.iter();
    let mut consumed = 0usize;

    for (slot, live) in sched.slots.iter().enumerate() {
        let mut live_sorted = live.clone();
        live_sorted.sort_unstable();
        live_sorted.dedup();

        let mut tx_ants: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &ei in &live_sorted {
            let e = &net.edges()[ei];
            tx_ants.insert((e.from.node, e.from.index));
        }
        let mut tx: BTreeMap<(usize, usize), Signal> = BTreeMap::new();
        for &(node, antenna) in &tx_ants {
            let sig = if node == source {
                consumed += 1;
                match emissions.next() {
                    Some(Emit::Data(k)) => Signal::unit(*k),
                    Some(Emit::Zero) => Signal::default(),
                    None => {
                        return Err(ProtoError::EmissionCount {
                            expected: consumed,
                            got: sched.emissions.len(),
                        })
                    }
                }
            } else if node == sink {
                return Err(ProtoError::SinkTransmits { slot });
            } else {
                buffers
                    .get(&(node, antenna))
                    .cloned()
                    .ok_or_else(|| ProtoError::EmptyBuffer {
                        slot,
                        node: net.nodes()[node].id.clone(),
                        antenna,
                    })?
            };
            tx.insert((node, antenna), sig);
        }

        let mut rx: BTreeMap<(usize, usize), Signal> = BTreeMap::new();
        for &ei in &live_sorted {
            let e = &net.edges()[ei];
            let src = &tx[&(e.from.node, e.from.index)];
            rx.entry((e.to.node, e.to.index))
                .or_default()
                .scaled_add(e.var, src);
        }
        for ((node, antenna), mut sig) in rx {
            if node == sink {
                rows.push(sig);
            } else {
                sig.noise.insert(noise_count, Poly::one());
                noise_count += 1;
                buffers.insert((node, antenna), sig);
            }
        }
    }
    if consumed != sched.emissions.len() {
        return Err(ProtoError::EmissionCount {
            expected: consumed,
            got: sched.emissions.len(),
        });
    }

    let mut signal = PolyMatrix::new(rows.len(), sched.source_symbols);
    for (r, sig) in rows.iter().enumerate() {
        for (&k, p) in &sig.data {
            signal.set(r, k, p.clone());
        }
    }
    // one column per injection, in injection order; an injection that never
    // reaches the sink keeps an all-zero column
    let mut noise_transfers = Vec::with_capacity(noise_count);
    for k in 0..noise_count {
        let mut g = PolyMatrix::new(rows.len(), 1);
        for (r, sig) in rows.iter().enumerate() {
            if let Some(p) = sig.noise.get(&k) {
                g.set(r, 0, p.clone());
            }
        }
        noise_transfers.push(g);
    }

    Ok(InducedChannel {
        signal,
        noise_transfers,
        total_slots: sched.slots.len(),
        data_slots: sched.slots.len(),
        n_vars: net.edges().len(),
    })
}

/// Numeric noise covariance `Σ = I + Σ_i G_i G_i†` at a fading assignment.
pub fn noise_covariance(ic: &InducedChannel, assignment: &[Complex64]) -> DMatrix<Complex64> {
    let n = ic.signal.rows();
    let mut sigma = DMatrix::<Complex64>::identity(n, n);
    for g in &ic.noise_transfers {
        let gv = g.eval_complex(assignment);
        sigma += &gv * gv.adjoint();
    }
    sigma
}

/// Entry-level diagonal part and last sub-diagonal part of a square matrix.
pub fn blt_parts(m: &PolyMatrix) -> (PolyMatrix, PolyMatrix) {
    assert_eq!(m.rows(), m.cols(), "blt decomposition needs a square matrix");
    let mut diag = PolyMatrix::new(m.rows(), m.cols());
    let mut ell = 0usize;
    for (r, c, _) in m.entries() {
        if r == c {
            diag.set(r, c, m.get(r, c).unwrap().clone());
        } else if r > c {
            ell = ell.max(r - c);
        }
    }
    let mut sub = PolyMatrix::new(m.rows(), m.cols());
    if ell > 0 {
        for (r, c, p) in m.entries() {
            if r > c && r - c == ell {
                sub.set(r, c, p.clone());
            }
        }
    }
    (diag, sub)
}

// --- Named protocols ---------------------------------------------------------

/// The three-node single-relay network used by the NAF protocol:
/// edges `s→t` (direct), `s→r`, `r→t`.
pub fn naf_network() -> NetworkGraph {
    crate::net::NetBuilder::new()
        .node("s", 1, Role::Source)
        .node("r", 1, Role::Relay)
        .node("t", 1, Role::Sink)
        .edge(("s", 0), ("t", 0))
        .edge(("s", 0), ("r", 0))
        .edge(("r", 0), ("t", 0))
        .build()
        .expect("NAF network is valid")
}

/// Single-relay NAF protocol: induced channel
/// `[[g_d, 0], [g_1 h_1, g_d]]` and its DMT lower bound
/// `(1-r)^+ + (1-2r)^+`.
pub fn naf_single() -> (InducedChannel, DmtCurve) {
    let net = naf_network();
    let sched = Schedule::new(
        vec![vec![0, 1], vec![0, 2]],
        vec![Emit::Data(0), Emit::Data(1)],
        2,
    );
    let ic = build_induced_channel(&net, &sched).expect("NAF schedule is valid");
    let diag = DmtCurve::linear(rint(1), rint(2)); // (1 - r/2)^+
    let sub = DmtCurve::linear(rint(1), rint(1)); // (1 - r)^+
    let curve = blt_lower_bound(&diag, &sub, true).scale_rate(2, 1);
    (ic, curve)
}

/// DMT lower bound of the N-relay NAF protocol: `(1-r)^+ + N(1-2r)^+`.
pub fn naf_n_relay_bound(n_relays: u32) -> DmtCurve {
    assert!(n_relays >= 1);
    DmtCurve::linear(rint(1), rint(1))
        .sum(&DmtCurve::linear(rint(n_relays as i64), rat(1, 2)))
}

fn saf_network(n_relays: usize) -> NetworkGraph {
    let mut b = crate::net::NetBuilder::new().node("s", 1, Role::Source);
    for i in 1..=n_relays {
        b = b.node(&format!("r{i}"), 1, Role::Relay);
    }
    b = b.node("t", 1, Role::Sink).edge(("s", 0), ("t", 0)); // edge 0: direct
    for i in 1..=n_relays {
        let r = format!("r{i}");
        b = b.edge(("s", 0), (&r, 0)).edge((&r, 0), ("t", 0)); // edges 2i-1, 2i
    }
    b.build().expect("SAF network is valid")
}

fn saf_schedule(n_relays: usize, m_slots: usize) -> Schedule {
    let mut slots = Vec::with_capacity(m_slots);
    for j in 1..=m_slots {
        let mut live = vec![0usize];
        if j < m_slots {
            let relay = (j - 1) % n_relays + 1;
            live.push(2 * relay - 1); // s -> relay
        }
        if j > 1 {
            let relay = (j - 2) % n_relays + 1;
            live.push(2 * relay); // relay -> t
        }
        slots.push(live);
    }
    Schedule::new(slots, (0..m_slots).map(Emit::Data).collect(), m_slots)
}

/// Slotted AF with isolated relays: `M = k·N + 1` slots, direct coefficient
/// on the diagonal and the N relay path products cycling along the first
/// sub-diagonal.
pub fn saf_matrix(n_relays: u32, cycles: u32) -> Result<InducedChannel, ProtoError> {
    if n_relays < 1 || cycles < 1 {
        return Err(ProtoError::BadParams("need N >= 1 relays and k >= 1 cycles".into()));
    }
    let n = n_relays as usize;
    let m = cycles as usize * n + 1;
    let net = saf_network(n);
    let sched = saf_schedule(n, m);
    build_induced_channel(&net, &sched)
}

/// SAF DMT lower bound `(1-r)^+ + N(1 - M/(M-1)·r)^+` for `M = kN + 1`.
pub fn saf_bound(n_relays: u32, m_slots: u32) -> Result<DmtCurve, ProtoError> {
    if n_relays < 1 || m_slots < 2 || (m_slots - 1) % n_relays != 0 {
        return Err(ProtoError::BadParams(
            "SAF needs M = k·N + 1 slots for a positive cycle count k".into(),
        ));
    }
    Ok(DmtCurve::linear(rint(1), rint(1)).sum(&DmtCurve::linear(
        rint(n_relays as i64),
        rat(m_slots as i64 - 1, m_slots as i64),
    )))
}

/// Multi-antenna single-relay NAF bound: `d_Hd(r) + d_product(2r)` where
/// `d_product` is the plug-in DMT of the relay product channel.
pub fn mimo_naf(n_s: u32, _n_r: u32, n_d: u32, d_product: &DmtCurve) -> DmtCurve {
    rayleigh_mimo_dmt(n_s, n_d).sum(&d_product.scale_rate(2, 1))
}

/// Relay activation-fraction choice for the generalized NAF bound.
#[derive(Debug, Clone)]
pub enum Fractions {
    Given(Vec<Rat>),
    Optimize { resolution: u32, refine_rounds: u32 },
}

impl Fractions {
    pub fn optimize_default() -> Self {
        Fractions::Optimize { resolution: 50, refine_rounds: 3 }
    }
}

#[derive(Debug, Clone)]
pub struct GenNafBound {
    pub curve: DmtCurve,
    /// Fractions attaining the bound at each breakpoint of the curve.
    pub fractions_per_r: Vec<(Rat, Vec<Rat>)>,
}

fn gen_naf_fixed(
    d_direct: &DmtCurve,
    relay_curves: &[DmtCurve],
    fractions: &[Rat],
) -> Result<DmtCurve, ProtoError> {
    let total: Rat = fractions.iter().copied().sum();
    if (total - rint(1)).abs() > rat_from_f64(1e-12) {
        return Err(ProtoError::BadParams("activation fractions must sum to 1".into()));
    }
    let inner = parallel_weighted(relay_curves, fractions)?;
    Ok(d_direct.sum(&inner.scale_rate(2, 1)))
}

fn simplex_grid(n: usize, resolution: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            let mut v = acc.clone();
            v.push(left);
            out.push(v);
            return;
        }
        for a in 0..=left {
            acc.push(a);
            rec(n - 1, left - a, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, resolution, &mut Vec::new(), &mut out);
    out
}

/// Generalized NAF bound `d_direct(r) + inf{Σ f_i r_i = 2r} Σ d_i(r_i)`,
/// either at given activation fractions or optimized over the fraction
/// simplex by grid search with coordinate refinement.
pub fn gen_naf_bound(
    d_direct: &DmtCurve,
    relay_curves: &[DmtCurve],
    fractions: Fractions,
) -> Result<GenNafBound, ProtoError> {
    if relay_curves.is_empty() {
        return Ok(GenNafBound {
            curve: d_direct.clone(),
            fractions_per_r: Vec::new(),
        });
    }
    match fractions {
        Fractions::Given(f) => {
            if f.len() != relay_curves.len() {
                return Err(ProtoError::BadParams(
                    "fraction count must match relay curve count".into(),
                ));
            }
            let curve = gen_naf_fixed(d_direct, relay_curves, &f)?;
            let fractions_per_r = curve
                .breakpoints()
                .iter()
                .map(|&(r, _)| (r, f.clone()))
                .collect();
            Ok(GenNafBound { curve, fractions_per_r })
        }
        Fractions::Optimize { resolution, refine_rounds } => {
            if resolution == 0 {
                return Err(ProtoError::BadParams("resolution must be positive".into()));
            }
            let n = relay_curves.len();
            let mut seen: BTreeSet<Vec<Rat>> = BTreeSet::new();
            let mut pool: Vec<(Vec<Rat>, DmtCurve)> = Vec::new();
            let add = |fs: Vec<Vec<Rat>>,
                           pool: &mut Vec<(Vec<Rat>, DmtCurve)>,
                           seen: &mut BTreeSet<Vec<Rat>>| {
                for f in fs {
                    if seen.insert(f.clone()) {
                        if let Ok(c) = gen_naf_fixed(d_direct, relay_curves, &f) {
                            pool.push((f, c));
                        }
                    }
                }
            };
            let initial: Vec<Vec<Rat>> = simplex_grid(n, resolution)
                .into_iter()
                .map(|v| v.iter().map(|&a| rat(a as i64, resolution as i64)).collect())
                .collect();
            add(initial, &mut pool, &mut seen);
            if pool.is_empty() {
                return Err(ProtoError::BadParams("no feasible fraction vector".into()));
            }
            // the envelope only grows as candidates are folded in
            let mut envelope = pool[0].1.clone();
            for (_, c) in &pool[1..] {
                envelope = envelope.pointwise_max(c);
            }
            // a linear piece's winner is attributed at its midpoint, where
            // the attaining candidate is unambiguous
            let piece_winners = |envelope: &DmtCurve, pool: &[(Vec<Rat>, DmtCurve)]| {
                let bps = envelope.breakpoints();
                let mut winners: Vec<Vec<Rat>> = Vec::new();
                for w in bps.windows(2) {
                    let mid = (w[0].0 + w[1].0) / rint(2);
                    let target = envelope.eval(mid);
                    let win = pool
                        .iter()
                        .find(|(_, c)| c.eval(mid) == target)
                        .map(|(f, _)| f.clone())
                        .unwrap_or_else(|| pool[0].0.clone());
                    winners.push(win);
                }
                winners
            };
            for round in 0..refine_rounds {
                let winners = piece_winners(&envelope, &pool);
                let step = rat(1, (resolution as i64) << (round + 1));
                let mut next: Vec<Vec<Rat>> = Vec::new();
                for w in &winners {
                    for i in 0..n {
                        for j in 0..n {
                            if i == j {
                                continue;
                            }
                            let mut f = w.clone();
                            f[i] += step;
                            f[j] -= step;
                            if f[j] >= Rat::zero() {
                                next.push(f);
                            }
                        }
                    }
                }
                let before = pool.len();
                add(next, &mut pool, &mut seen);
                for (_, c) in &pool[before..] {
                    envelope = envelope.pointwise_max(c);
                }
            }
            let winners = piece_winners(&envelope, &pool);
            let bps = envelope.breakpoints().to_vec();
            let fractions_per_r = bps
                .iter()
                .enumerate()
                .map(|(i, &(r, _))| {
                    let w = if i < winners.len() { &winners[i] } else { &winners[i - 1] };
                    (r, w.clone())
                })
                .collect();
            Ok(GenNafBound { curve: envelope, fractions_per_r })
        }
    }
}

/// Sequential per-edge activation of a maximum set of edge-disjoint paths.
/// With `m` paths of total length `N`, the induced channel is diagonal with
/// the path products and the protocol DMT is `(m - N·r)^+`.
pub fn edge_disjoint_protocol(
    net: &NetworkGraph,
) -> Result<(Schedule, InducedChannel, DmtCurve), ProtoError> {
    let paths = net.edge_disjoint_paths()?;
    if paths.is_empty() {
        return Err(ProtoError::Disconnected);
    }
    let m = paths.len();
    let total_len: usize = paths.iter().map(|p| p.len()).sum();
    let slots: Vec<Vec<usize>> = paths.iter().flatten().map(|&e| vec![e]).collect();
    let sched = Schedule::new(slots, (0..m).map(Emit::Data).collect(), m);
    let ic = build_induced_channel(net, &sched)?;
    let curve = DmtCurve::linear(rint(m as i64), rat(m as i64, total_len as i64));
    Ok((sched, ic, curve))
}

/// Result of the full-duplex linear-DMT protocol.
#[derive(Debug, Clone)]
pub struct FdLinear {
    pub schedule: Schedule,
    pub channel: InducedChannel,
    /// Finite-horizon curve `M(1 - MTr/(M(T-D)))^+`.
    pub finite: DmtCurve,
    /// Large-T limit `M(1 - r)^+`.
    pub limit: DmtCurve,
}

/// Per-path simultaneous activation for `T` slots with zero padding: on a
/// network that is acyclic or whose edge-disjoint paths are shortcut-free,
/// the induced per-path blocks are triangular and a linear DMT between the
/// extreme points is achieved as `T → ∞`.
pub fn fd_linear_protocol(net: &NetworkGraph, t_slots: usize) -> Result<FdLinear, ProtoError> {
    if !net.is_full_duplex() {
        return Err(ProtoError::RequiresFullDuplex);
    }
    let paths = net.edge_disjoint_paths()?;
    if paths.is_empty() {
        return Err(ProtoError::Disconnected);
    }
    let acyclic = net.is_acyclic();
    let shortcut_paths: Vec<usize> = paths
        .iter()
        .enumerate()
        .filter(|(_, p)| net.path_has_shortcut(p).unwrap_or(true))
        .map(|(i, _)| i)
        .collect();
    if !acyclic && !shortcut_paths.is_empty() {
        return Err(ProtoError::ConditionsUnmet {
            diagnosis: format!(
                "directed cycle found and path(s) {:?} of the canonical edge-disjoint set have shortcuts",
                shortcut_paths
            ),
        });
    }
    let m = paths.len();
    let delay = paths.iter().map(|p| p.len()).max().unwrap();
    if t_slots <= delay {
        return Err(ProtoError::SlotsTooFew { slots: t_slots, delay });
    }

    let mut slots: Vec<Vec<usize>> = Vec::with_capacity(m * t_slots);
    let mut emissions: Vec<Emit> = Vec::with_capacity(m * t_slots);
    let mut symbol = 0usize;
    for path in &paths {
        for local in 0..t_slots {
            // edge j of the path goes live once its relay has content
            let live: Vec<usize> = path
                .iter()
                .enumerate()
                .filter(|&(j, _)| j <= local)
                .map(|(_, &e)| e)
                .collect();
            slots.push(live);
            if local < t_slots - delay {
                emissions.push(Emit::Data(symbol));
                symbol += 1;
            } else {
                emissions.push(Emit::Zero);
            }
        }
    }
    let sched = Schedule::new(slots, emissions, symbol);
    let ic = build_induced_channel(net, &sched)?;
    let finite = DmtCurve::linear(
        rint(m as i64),
        rat((t_slots - delay) as i64, t_slots as i64),
    );
    let limit = DmtCurve::linear(rint(m as i64), rint(1));
    Ok(FdLinear { schedule: sched, channel: ic, finite, limit })
}

/// JSON form of a protocol run: schedule plus sparse matrices and curves.
#[derive(Debug, serde::Serialize)]
pub struct ProtocolJson {
    pub slots: Vec<Vec<usize>>,
    pub source_symbols: usize,
    pub total_slots: usize,
    pub data_slots: usize,
    pub signal: crate::poly::PolyMatrixJson,
    pub noise_transfers: Vec<crate::poly::PolyMatrixJson>,
}

pub fn protocol_json(sched: &Schedule, ic: &InducedChannel) -> ProtocolJson {
    ProtocolJson {
        slots: sched.slots.clone(),
        source_symbols: sched.source_symbols,
        total_slots: ic.total_slots,
        data_slots: ic.data_slots,
        signal: ic.signal.to_json(),
        noise_transfers: ic.noise_transfers.iter().map(|g| g.to_json()).collect(),
    }
}
