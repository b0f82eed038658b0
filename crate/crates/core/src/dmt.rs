//! Exact calculus on piecewise-linear diversity-multiplexing tradeoff curves.
//!
//! A `DmtCurve` is a continuous, nonincreasing, piecewise-linear function
//! `d(r)` on `[0, r_max]` with `d(r_max) = 0`; evaluation beyond `r_max`
//! returns 0. Breakpoints are exact rationals, so every identity here
//! (infimal convolution, rate rescaling, pointwise sums and maxima) holds
//! with exact breakpoint equality.

use crate::net::{MinCut, NetworkGraph};
use crate::rat::{rat, rat_from_f64, rat_to_f64, rint, Rat};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DmtError {
    #[error("curve needs at least one breakpoint")]
    Empty,
    #[error("breakpoint r-values must start at 0 and strictly increase")]
    BadRAxis,
    #[error("diversity values must be nonnegative and nonincreasing")]
    BadDAxis,
    #[error("curve must end at d = 0")]
    NoZeroTail,
    #[error("operation requires convex input curves (use the grid fallback for non-convex plug-ins)")]
    NonConvex,
    #[error("multiplicities/fractions must be positive and match the curve list")]
    BadMultiplicity,
    #[error("network error: {0}")]
    Net(#[from] crate::net::NetError),
    #[error("det-lift error: {0}")]
    Det(#[from] crate::detlift::DetError),
}

/// Piecewise-linear nonincreasing DMT curve with exact rational breakpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmtCurve {
    pts: Vec<(Rat, Rat)>,
}

impl DmtCurve {
    /// Build a curve from breakpoints, canonicalizing (sorting is not done:
    /// r must already strictly increase) and validating the invariants.
    pub fn from_breakpoints(pts: Vec<(Rat, Rat)>) -> Result<Self, DmtError> {
        if pts.is_empty() {
            return Err(DmtError::Empty);
        }
        if pts[0].0 != Rat::zero() {
            return Err(DmtError::BadRAxis);
        }
        for w in pts.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(DmtError::BadRAxis);
            }
            if w[1].1 > w[0].1 {
                return Err(DmtError::BadDAxis);
            }
        }
        if pts.iter().any(|&(_, d)| d < Rat::zero()) {
            return Err(DmtError::BadDAxis);
        }
        if pts.last().unwrap().1 != Rat::zero() {
            return Err(DmtError::NoZeroTail);
        }
        Ok(Self::canonical(pts))
    }

    fn canonical(pts: Vec<(Rat, Rat)>) -> Self {
        // Trim everything past the first zero, then merge collinear points.
        let mut trimmed: Vec<(Rat, Rat)> = Vec::with_capacity(pts.len());
        for p in pts {
            trimmed.push(p);
            if p.1.is_zero() {
                break;
            }
        }
        let mut out: Vec<(Rat, Rat)> = Vec::with_capacity(trimmed.len());
        for p in trimmed {
            while out.len() >= 2 {
                let a = out[out.len() - 2];
                let b = out[out.len() - 1];
                // b lies on segment a..p  <=>  cross product vanishes
                let lhs = (b.1 - a.1) * (p.0 - a.0);
                let rhs = (p.1 - a.1) * (b.0 - a.0);
                if lhs == rhs {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        DmtCurve { pts: out }
    }

    /// The zero curve `d ≡ 0` (r_max = 0).
    pub fn zero() -> Self {
        DmtCurve {
            pts: vec![(Rat::zero(), Rat::zero())],
        }
    }

    /// The linear curve `d0 · (1 - r/r_max)^+`, i.e. breakpoints
    /// `(0, d0), (r_max, 0)`.
    pub fn linear(d0: Rat, r_max: Rat) -> Self {
        if d0.is_zero() || r_max.is_zero() {
            return Self::zero();
        }
        assert!(d0 > Rat::zero() && r_max > Rat::zero());
        DmtCurve {
            pts: vec![(Rat::zero(), d0), (r_max, Rat::zero())],
        }
    }

    pub fn breakpoints(&self) -> &[(Rat, Rat)] {
        &self.pts
    }

    /// Largest multiplexing gain with positive diversity.
    pub fn r_max(&self) -> Rat {
        self.pts.last().unwrap().0
    }

    /// Diversity at r = 0.
    pub fn d0(&self) -> Rat {
        self.pts[0].1
    }

    pub fn is_zero(&self) -> bool {
        self.d0().is_zero()
    }

    /// Exact evaluation; 0 beyond `r_max`, clamped at r = 0 for negative r.
    pub fn eval(&self, r: Rat) -> Rat {
        if r <= Rat::zero() {
            return self.d0();
        }
        if r >= self.r_max() {
            return Rat::zero();
        }
        let i = self.pts.partition_point(|&(rp, _)| rp <= r);
        let (r0, d0) = self.pts[i - 1];
        let (r1, d1) = self.pts[i];
        d0 + (d1 - d0) * (r - r0) / (r1 - r0)
    }

    pub fn eval_f64(&self, r: f64) -> f64 {
        rat_to_f64(self.eval(rat_from_f64(r)))
    }

    /// Slopes are nondecreasing.
    pub fn is_convex(&self) -> bool {
        let mut prev: Option<Rat> = None;
        for w in self.pts.windows(2) {
            let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            if let Some(p) = prev {
                if s < p {
                    return false;
                }
            }
            prev = Some(s);
        }
        true
    }

    /// Pointwise sum; r_max of the result is the larger of the two.
    pub fn sum(&self, other: &DmtCurve) -> DmtCurve {
        let grid = merge_r_grid(&[self, other]);
        let pts = grid
            .into_iter()
            .map(|r| (r, self.eval(r) + other.eval(r)))
            .collect();
        DmtCurve::canonical(pts)
    }

    /// Pointwise maximum, with exact crossing points inserted.
    pub fn pointwise_max(&self, other: &DmtCurve) -> DmtCurve {
        let grid = merge_r_grid(&[self, other]);
        let mut pts: Vec<(Rat, Rat)> = Vec::new();
        for (i, &r) in grid.iter().enumerate() {
            if i > 0 {
                let a = grid[i - 1];
                let fa = self.eval(a) - other.eval(a);
                let fb = self.eval(r) - other.eval(r);
                if (fa.is_positive() && fb.is_negative())
                    || (fa.is_negative() && fb.is_positive())
                {
                    let rc = a + (r - a) * fa / (fa - fb);
                    pts.push((rc, self.eval(rc)));
                }
            }
            pts.push((r, self.eval(r).max(other.eval(r))));
        }
        DmtCurve::canonical(pts)
    }

    /// Rate rescaling `r ↦ d((slots/data_slots)·r)`: breakpoint r-values are
    /// divided by `slots/data_slots`. Preserves d(0) and divides r_max.
    pub fn scale_rate(&self, slots: u32, data_slots: u32) -> DmtCurve {
        assert!(data_slots >= 1 && slots >= data_slots);
        self.scale_r_axis(rat(data_slots as i64, slots as i64))
    }

    /// Multiply every breakpoint r-value by `factor > 0`.
    pub fn scale_r_axis(&self, factor: Rat) -> DmtCurve {
        assert!(factor > Rat::zero());
        DmtCurve {
            pts: self.pts.iter().map(|&(r, d)| (r * factor, d)).collect(),
        }
    }

    /// `M · d(r/M)`: both axes scaled by M.
    fn scale_both(&self, m: Rat) -> DmtCurve {
        assert!(m > Rat::zero());
        DmtCurve {
            pts: self.pts.iter().map(|&(r, d)| (r * m, d * m)).collect(),
        }
    }

    /// Export grid: union of breakpoints and a uniform grid of the given
    /// step over `[0, r_max]`, as `(r, d)` float pairs.
    pub fn export_grid(&self, step: f64) -> Vec<(f64, f64)> {
        assert!(step > 0.0);
        let mut rs: Vec<Rat> = self.pts.iter().map(|&(r, _)| r).collect();
        let stepr = rat_from_f64(step);
        let mut r = Rat::zero();
        while r < self.r_max() {
            rs.push(r);
            r += stepr;
        }
        rs.push(self.r_max());
        rs.sort();
        rs.dedup();
        rs.into_iter()
            .map(|r| (rat_to_f64(r), rat_to_f64(self.eval(r))))
            .collect()
    }

    pub fn to_json(&self) -> CurveJson {
        CurveJson {
            breakpoints: self
                .pts
                .iter()
                .map(|&(r, d)| (rat_to_f64(r), rat_to_f64(d)))
                .collect(),
        }
    }

    pub fn from_json(j: &CurveJson) -> Result<Self, DmtError> {
        Self::from_breakpoints(
            j.breakpoints
                .iter()
                .map(|&(r, d)| (rat_from_f64(r), rat_from_f64(d)))
                .collect(),
        )
    }
}

/// JSON form of a curve: a breakpoint list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveJson {
    pub breakpoints: Vec<(f64, f64)>,
}

fn merge_r_grid(curves: &[&DmtCurve]) -> Vec<Rat> {
    let mut rs: Vec<Rat> = curves
        .iter()
        .flat_map(|c| c.pts.iter().map(|&(r, _)| r))
        .collect();
    rs.sort();
    rs.dedup();
    rs
}

/// One optimal per-subchannel rate split for a target total rate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateAllocation {
    pub rates: Vec<Rat>,
    pub total: Rat,
}

/// DMT of an m×n i.i.d. Rayleigh MIMO link: the piecewise-linear curve
/// through `(k, (m-k)(n-k))` for `k = 0..min(m,n)`.
pub fn rayleigh_mimo_dmt(m: u32, n: u32) -> DmtCurve {
    assert!(m >= 1 && n >= 1);
    let k_max = m.min(n) as i64;
    let pts = (0..=k_max)
        .map(|k| (rint(k), rint((m as i64 - k) * (n as i64 - k))))
        .collect();
    DmtCurve::from_breakpoints(pts).expect("Rayleigh MIMO breakpoints are valid")
}

/// DMT of a product of scalar Rayleigh coefficients: `(1 - r)^+` for any
/// number of hops (a single product path always contributes diversity 1).
pub fn scalar_rayleigh_product_dmt(n_hops: u32) -> DmtCurve {
    assert!(n_hops >= 1);
    DmtCurve::linear(rint(1), rint(1))
}

/// Linear segments of all curves sorted steepest first: the exact infimal
/// convolution of convex piecewise-linear curves is their concatenation.
fn sorted_segments(curves: &[&DmtCurve]) -> Vec<(Rat, Rat, usize)> {
    let mut segs: Vec<(Rat, Rat, usize)> = Vec::new(); // (slope, width, curve idx)
    for (ci, c) in curves.iter().enumerate() {
        for w in c.pts.windows(2) {
            let width = w[1].0 - w[0].0;
            let slope = (w[1].1 - w[0].1) / width;
            segs.push((slope, width, ci));
        }
    }
    segs.sort_by(|a, b| (a.0, a.2).cmp(&(b.0, b.2)));
    segs
}

/// Exact DMT of a parallel channel with independent sub-channels:
/// `inf over Σ r_i = r of Σ d_i(r_i)`, for convex inputs.
pub fn parallel_dmt(curves: &[DmtCurve]) -> Result<DmtCurve, DmtError> {
    if curves.is_empty() {
        return Err(DmtError::Empty);
    }
    if curves.iter().any(|c| !c.is_convex()) {
        return Err(DmtError::NonConvex);
    }
    if curves.len() == 1 {
        return Ok(curves[0].clone());
    }
    let refs: Vec<&DmtCurve> = curves.iter().collect();
    let d0: Rat = refs.iter().map(|c| c.d0()).sum();
    let mut pts = vec![(Rat::zero(), d0)];
    let (mut r, mut d) = (Rat::zero(), d0);
    for (slope, width, _) in sorted_segments(&refs) {
        r += width;
        d += slope * width;
        pts.push((r, d));
    }
    if let Some(last) = pts.last_mut() {
        last.1 = Rat::zero(); // total drop telescopes to Σ d_i(0) exactly
    }
    Ok(DmtCurve::canonical(pts))
}

/// Grid-search fallback for non-convex plug-in curves: dynamic program over
/// rate allocations at the given step. Approximate by construction.
pub fn parallel_dmt_grid(curves: &[DmtCurve], step: f64) -> Result<DmtCurve, DmtError> {
    if curves.is_empty() {
        return Err(DmtError::Empty);
    }
    assert!(step > 0.0);
    let total: f64 = curves.iter().map(|c| rat_to_f64(c.r_max())).sum();
    let n = (total / step).ceil() as usize + 1;
    // best[t] = inf over allocations summing to t·step of the curves so far
    let mut best: Vec<f64> = (0..=n).map(|t| curves[0].eval_f64(t as f64 * step)).collect();
    for c in &curves[1..] {
        let cv: Vec<f64> = (0..=n).map(|t| c.eval_f64(t as f64 * step)).collect();
        let mut next = vec![f64::INFINITY; n + 1];
        for t in 0..=n {
            for j in 0..=t {
                let v = best[j] + cv[t - j];
                if v < next[t] {
                    next[t] = v;
                }
            }
        }
        best = next;
    }
    let mut pts: Vec<(Rat, Rat)> = best
        .iter()
        .enumerate()
        .map(|(t, &d)| (rat_from_f64(t as f64 * step), rat_from_f64(d.max(0.0))))
        .collect();
    // enforce the nonincreasing invariant against float dust
    for i in 1..pts.len() {
        if pts[i].1 > pts[i - 1].1 {
            pts[i].1 = pts[i - 1].1;
        }
    }
    if let Some(last) = pts.last_mut() {
        last.1 = Rat::zero();
    }
    DmtCurve::from_breakpoints(pts)
}

/// One optimal allocation attaining `parallel_dmt` at total rate `r`.
pub fn optimal_allocation(curves: &[DmtCurve], r: Rat) -> Result<RateAllocation, DmtError> {
    if curves.is_empty() {
        return Err(DmtError::Empty);
    }
    if curves.iter().any(|c| !c.is_convex()) {
        return Err(DmtError::NonConvex);
    }
    let refs: Vec<&DmtCurve> = curves.iter().collect();
    let mut rates = vec![Rat::zero(); curves.len()];
    let mut remaining = r;
    for (_, width, ci) in sorted_segments(&refs) {
        if remaining.is_zero() {
            break;
        }
        let take = width.min(remaining);
        rates[ci] += take;
        remaining -= take;
    }
    rates[0] += remaining; // past Σ r_max every curve is flat zero
    Ok(RateAllocation { rates, total: r })
}

/// DMT of M identical independent sub-channels with convex DMT `d1`:
/// `M · d1(r/M)`.
pub fn parallel_identical(curve: &DmtCurve, m: u32) -> Result<DmtCurve, DmtError> {
    assert!(m >= 1);
    if !curve.is_convex() {
        return Err(DmtError::NonConvex);
    }
    Ok(curve.scale_both(rint(m as i64)))
}

/// DMT of a parallel channel with repeated coefficients:
/// `inf over Σ n_i r_i = r of Σ d_i(r_i)`, computed as the infimal
/// convolution after rescaling each curve's r-axis by its multiplicity.
pub fn parallel_repeated(curves: &[DmtCurve], multiplicities: &[u32]) -> Result<DmtCurve, DmtError> {
    if curves.len() != multiplicities.len() || multiplicities.iter().any(|&n| n == 0) {
        return Err(DmtError::BadMultiplicity);
    }
    let scaled: Vec<DmtCurve> = curves
        .iter()
        .zip(multiplicities)
        .map(|(c, &n)| c.scale_r_axis(rint(n as i64)))
        .collect();
    parallel_dmt(&scaled)
}

/// Rational-weight variant of [`parallel_repeated`], used for activation
/// fractions. Zero-weight channels are skipped.
pub fn parallel_weighted(curves: &[DmtCurve], weights: &[Rat]) -> Result<DmtCurve, DmtError> {
    if curves.len() != weights.len() || weights.iter().any(|w| w.is_negative()) {
        return Err(DmtError::BadMultiplicity);
    }
    let scaled: Vec<DmtCurve> = curves
        .iter()
        .zip(weights)
        .filter(|(_, w)| !w.is_zero())
        .map(|(c, &w)| c.scale_r_axis(w))
        .collect();
    if scaled.is_empty() {
        return Err(DmtError::BadMultiplicity);
    }
    parallel_dmt(&scaled)
}

/// DMT lower bound for a block-lower-triangular channel matrix from its
/// diagonal part and last sub-diagonal part: the pointwise sum when the two
/// parts are independent, the pointwise max otherwise.
pub fn blt_lower_bound(d_diag: &DmtCurve, d_subdiag: &DmtCurve, independent: bool) -> DmtCurve {
    if independent {
        d_diag.sum(d_subdiag)
    } else {
        d_diag.pointwise_max(d_subdiag)
    }
}

/// Network extreme points: maximum diversity (min-cut edge count) and
/// maximum multiplexing gain (min-cut structural rank).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtremePoints {
    pub d_max: usize,
    pub r_max: usize,
    pub disconnected: bool,
    /// For half-duplex networks the rank bound is only an upper bound.
    pub r_max_upper_bound_only: bool,
}

/// Extreme points of the DMT of a single-source single-sink network.
pub fn extreme_points(net: &NetworkGraph) -> Result<ExtremePoints, DmtError> {
    let d_max = match net.min_cut_edges()? {
        MinCut::Disconnected => {
            return Ok(ExtremePoints {
                d_max: 0,
                r_max: 0,
                disconnected: true,
                r_max_upper_bound_only: false,
            })
        }
        MinCut::Connected(m) => m,
    };
    let mmg = crate::detlift::mmg(net)?;
    Ok(ExtremePoints {
        d_max,
        r_max: mmg.value,
        disconnected: false,
        r_max_upper_bound_only: !net.is_full_duplex(),
    })
}
