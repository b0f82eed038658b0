//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `cargo test --test acceptance -- --nocapture` to see
//! them all).

mod common;

use dmtlab_core::detlift::{derive_deterministic, det_min_cut_rank, lift_to_fading, mmg_with};
use dmtlab_core::dmt::{extreme_points, parallel_dmt, DmtCurve};
use dmtlab_core::mc::{
    estimate_diversity, slopes_agree, small_ball_check, tail_bound_check, eigen_bound_check,
};
use dmtlab_core::net::{chain, diamond, two_relay_layered};
use dmtlab_core::poly::{Poly, PolyMatrix};
use dmtlab_core::proto::{
    blt_parts, edge_disjoint_protocol, fd_linear_protocol, naf_n_relay_bound, naf_single,
    saf_bound, InducedChannel,
};
use dmtlab_core::rat::{rat, rint, Rat};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::Instant;

fn verdict(name: &str, pass: bool, detail: String) {
    println!(
        "acceptance {}: {} ({})",
        name,
        if pass { "PASS" } else { "FAIL" },
        detail
    );
    assert!(pass, "{name} failed: {detail}");
}

#[test]
fn criterion_1_analytic_formulas_exact() {
    let t0 = Instant::now();
    let mut ok = true;

    // NAF: (1-r)^+ + (1-2r)^+, breakpoints (0,2), (1/2,1/2), (1,0)
    let (_, naf) = naf_single();
    let naf_want =
        DmtCurve::linear(rint(1), rint(1)).sum(&DmtCurve::linear(rint(1), rat(1, 2)));
    ok &= naf == naf_want;
    ok &= naf.breakpoints()
        == [(rint(0), rint(2)), (rat(1, 2), rat(1, 2)), (rint(1), rint(0))];

    // N-relay NAF: (1-r)^+ + N(1-2r)^+
    for n in 1..=4u32 {
        let want = DmtCurve::linear(rint(1), rint(1))
            .sum(&DmtCurve::linear(rint(n as i64), rat(1, 2)));
        ok &= naf_n_relay_bound(n) == want;
    }

    // SAF(N=2, M=5): d(0)=3 with the slope break at r = 4/5,
    // i.e. (1-r)^+ + 2(1-5r/4)^+
    let saf = saf_bound(2, 5).unwrap();
    ok &= saf.eval(rint(0)) == rint(3);
    let saf_want = DmtCurve::linear(rint(1), rint(1)).sum(&DmtCurve::linear(rint(2), rat(4, 5)));
    ok &= saf == saf_want;
    ok &= saf.breakpoints().iter().any(|&(r, _)| r == rat(4, 5));

    // edge-disjoint: (m - N r)^+
    let (_, _, ed) = edge_disjoint_protocol(&diamond()).unwrap();
    ok &= ed == DmtCurve::linear(rint(2), rat(2, 4));
    let (_, _, ed1) = edge_disjoint_protocol(&chain(3)).unwrap();
    ok &= ed1 == DmtCurve::linear(rint(1), rat(1, 3));

    // fd-linear: finite M(1 - MTr/(M(T-D)))^+ and limit M(1-r)^+
    let fd = fd_linear_protocol(&chain(1), 10).unwrap();
    ok &= fd.finite == DmtCurve::linear(rint(1), rat(9, 10));
    ok &= fd.limit == DmtCurve::linear(rint(1), rint(1));
    let fd2 = fd_linear_protocol(&diamond(), 6).unwrap();
    ok &= fd2.finite == DmtCurve::linear(rint(2), rat(4, 6));
    ok &= fd2.limit == DmtCurve::linear(rint(2), rint(1));

    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 1.0;
    verdict(
        "1 analytic-formula reproduction",
        ok,
        format!("exact breakpoint equality, {secs:.3}s"),
    );
}

/// Random convex piecewise-linear curve whose breakpoints sit on the
/// 1e-3 grid used by the oracle.
fn random_convex_curve(rng: &mut StdRng) -> DmtCurve {
    let mut slopes: Vec<Rat> = (0..rng.gen_range(1..=3))
        .map(|_| -rat(rng.gen_range(1..=12), rng.gen_range(1..=8)))
        .collect();
    slopes.sort();
    slopes.dedup();
    let widths: Vec<i64> = (0..slopes.len())
        .map(|_| rng.gen_range(50..=450))
        .collect();
    let d0: Rat = slopes
        .iter()
        .zip(&widths)
        .map(|(&s, &w)| -s * rat(w, 1000))
        .sum();
    let mut pts = vec![(rint(0), d0)];
    let (mut r, mut d) = (rint(0), d0);
    for (&s, &w) in slopes.iter().zip(&widths) {
        r += rat(w, 1000);
        d += s * rat(w, 1000);
        pts.push((r, d));
    }
    DmtCurve::from_breakpoints(pts).expect("random convex curve is valid")
}

#[test]
fn criterion_2_inf_convolution_matches_grid_search() {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(20_240_501);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = rng.gen_range(1..=3);
        let curves: Vec<DmtCurve> = (0..m).map(|_| random_convex_curve(&mut rng)).collect();
        let exact = parallel_dmt(&curves).unwrap();

        // grid-search oracle at step 1e-3: dynamic program over the total
        let total_milli: i128 = curves
            .iter()
            .map(|c| (c.r_max() * rint(1000)).to_integer())
            .sum();
        let n = total_milli as usize;
        let eval_milli =
            |c: &DmtCurve, t: usize| -> f64 { dmtlab_core::rat::rat_to_f64(c.eval(rat(t as i64, 1000))) };
        let mut best: Vec<f64> = (0..=n).map(|t| eval_milli(&curves[0], t)).collect();
        for c in &curves[1..] {
            let cv: Vec<f64> = (0..=n).map(|t| eval_milli(c, t)).collect();
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

        for _ in 0..50 {
            let t = rng.gen_range(0..=n);
            let got = dmtlab_core::rat::rat_to_f64(exact.eval(rat(t as i64, 1000)));
            let diff = (got - best[t]).abs();
            worst = worst.max(diff);
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let ok = worst <= 2e-3 && secs < 30.0;
    verdict(
        "2 inf-convolution oracle equivalence",
        ok,
        format!("worst |exact - grid| = {worst:.2e}, {secs:.1}s"),
    );
}

#[test]
fn criterion_3_min_cut_identities() {
    let t0 = Instant::now();
    let mut ok = true;
    for seed in 0..200u64 {
        let net = common::random_dag(seed, 10, 4);
        let min_cut = net.min_cut_edges().unwrap().value();
        let paths = net.edge_disjoint_paths().unwrap();
        let brute = common::brute_force_min_cut(&net);
        let mmg = mmg_with(&net, 3, seed).unwrap().value;
        let here = min_cut == paths.len() && min_cut == brute && mmg <= min_cut;
        if !here {
            println!(
                "  seed {seed}: min_cut={min_cut} paths={} brute={brute} mmg={mmg}",
                paths.len()
            );
        }
        ok &= here;
        // paths must be pairwise edge-disjoint
        let mut used = std::collections::BTreeSet::new();
        for p in &paths {
            for &e in p {
                ok &= used.insert(e);
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    verdict(
        "3 min-cut identities",
        ok,
        format!("200 random DAGs, {secs:.1}s"),
    );
}

#[test]
fn criterion_4_layered_network_extreme_points() {
    let net = two_relay_layered();
    let ep = extreme_points(&net).unwrap();
    verdict(
        "4 layered-network analysis",
        ep.d_max == 12 && ep.r_max == 2 && !ep.disconnected,
        format!("diversity = {}, MMG = {}", ep.d_max, ep.r_max),
    );
}

#[test]
fn criterion_5_deterministic_lift() {
    let t0 = Instant::now();
    let mut ok = true;
    for seed in 0..50u64 {
        let net = common::random_dag(seed.wrapping_mul(977).wrapping_add(5), 8, 3);
        let mmg = mmg_with(&net, 4, seed).unwrap();
        let det = derive_deterministic(&net, seed).unwrap();
        let ranks = det_min_cut_rank(&det).unwrap();
        // cut-by-cut: the deterministic image never loses rank
        ok &= ranks.per_cut.len() == mmg.per_cut.len();
        for (dr, mr) in ranks.per_cut.iter().zip(&mmg.per_cut) {
            if dr.rank < mr.rank {
                println!("  seed {seed}: cut {:?} lost rank {} -> {}", dr.source_side, mr.rank, dr.rank);
                ok = false;
            }
        }
        ok &= ranks.value >= mmg.value;
        let lift = lift_to_fading(&det).unwrap();
        if lift.numeric_rank < lift.witness_rank {
            println!(
                "  seed {seed}: lift numeric rank {} < witness {}",
                lift.numeric_rank, lift.witness_rank
            );
            ok = false;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 120.0;
    verdict(
        "5 deterministic lift",
        ok,
        format!("50 random networks, {secs:.1}s"),
    );
}

fn two_branch_parallel_channel() -> InducedChannel {
    let mut m = PolyMatrix::new(2, 2);
    m.set(0, 0, Poly::var(0));
    m.set(1, 1, Poly::var(1));
    InducedChannel::from_signal(m, 1, 1)
}

#[test]
fn criterion_6_monte_carlo_diversity_slopes() {
    let t0 = Instant::now();
    let ladder: Vec<f64> = (0..6).map(|k| 10.0 + 5.0 * k as f64).collect();
    let trials = 1_000_000u64;
    let mut ok = true;

    let scalar = {
        let net = chain(1);
        let sched =
            dmtlab_core::proto::Schedule::fresh_symbols(&net, vec![vec![0]]).unwrap();
        dmtlab_core::proto::build_induced_channel(&net, &sched).unwrap()
    };
    let est_scalar = estimate_diversity(&scalar, 0.2, &ladder, trials, false, 42);
    ok &= est_scalar.slope >= 0.65 && est_scalar.slope <= 0.95;

    let par = two_branch_parallel_channel();
    let est_par = estimate_diversity(&par, 0.05, &ladder, trials, false, 42);
    ok &= est_par.slope >= 1.6 && est_par.slope <= 2.4;

    let (naf, _) = naf_single();
    let est_white = estimate_diversity(&naf, 0.05, &ladder, trials, true, 42);
    let est_color = estimate_diversity(&naf, 0.05, &ladder, trials, false, 42);
    ok &= est_white.slope >= 1.5 && est_white.slope <= 2.5;
    ok &= slopes_agree(&est_white, &est_color);

    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 600.0;
    verdict(
        "6 Monte Carlo diversity slopes",
        ok,
        format!(
            "scalar {:.2}±{:.2}, parallel {:.2}±{:.2}, NAF white {:.2}±{:.2} vs colored {:.2}±{:.2}, {secs:.0}s",
            est_scalar.slope,
            est_scalar.ci,
            est_par.slope,
            est_par.ci,
            est_white.slope,
            est_white.ci,
            est_color.slope,
            est_color.ci
        ),
    );
}

#[test]
fn criterion_7_invariant_suites() {
    let t0 = Instant::now();
    let mut ok = true;

    // eigenvalue bounds: 1000 samples per shipped protocol
    let (naf, _) = naf_single();
    let saf = dmtlab_core::proto::saf_matrix(2, 2).unwrap();
    let (_, ed, _) = edge_disjoint_protocol(&diamond()).unwrap();
    let fd = fd_linear_protocol(&chain(2), 6).unwrap().channel;
    for (name, ic) in [("naf", &naf), ("saf", &saf), ("edge-disjoint", &ed), ("fd-linear", &fd)] {
        let rep = eigen_bound_check(ic, 1000, 7);
        if !rep.passed() {
            println!("  eigen bounds violated for {name}: {}", rep.violations);
            ok = false;
        }
    }

    // determinant inequalities for the blt channels, 200 samples x 3 SNRs
    let mut rng = StdRng::seed_from_u64(77);
    for ic in [&naf, &saf] {
        let (h0, hl) = blt_parts(&ic.signal);
        for _ in 0..200 {
            let a: Vec<num_complex::Complex64> = (0..ic.n_vars)
                .map(|_| {
                    let s = std::f64::consts::FRAC_1_SQRT_2;
                    num_complex::Complex64::new(
                        rng.gen::<f64>() * 2.0 - 1.0,
                        rng.gen::<f64>() * 2.0 - 1.0,
                    ) * s
                })
                .collect();
            for rho in [1.0, 10.0, 100.0] {
                let det = |m: &PolyMatrix| -> f64 {
                    let v = m.eval_complex(&a);
                    let n = v.nrows();
                    let mm = nalgebra::DMatrix::<num_complex::Complex64>::identity(n, n)
                        + &v * v.adjoint() * num_complex::Complex64::new(rho, 0.0);
                    mm.determinant().re
                };
                let full = det(&ic.signal);
                ok &= full >= det(&h0) * (1.0 - 1e-9);
                ok &= full >= det(&hl) * (1.0 - 1e-9);
            }
        }
    }

    let secs = t0.elapsed().as_secs_f64();
    verdict(
        "7 invariant suites",
        ok,
        format!("eigen bounds and determinant inequalities, {secs:.1}s"),
    );
}

#[test]
fn criterion_8_small_ball_and_tail() {
    let t0 = Instant::now();
    let trials = 10_000_000u64;
    let mut ok = true;

    // Pr{|h|^2 < δ}/δ → 1 within 5% for δ ≤ 1e-2
    let rep = small_ball_check(&Poly::var(0), &[1e-2, 3e-3, 1e-3], trials, 42);
    let mut ratios = Vec::new();
    for (d, p) in rep.deltas.iter().zip(&rep.probs) {
        let ratio = p / d;
        ratios.push(ratio);
        ok &= (ratio - 1.0).abs() <= 0.05;
    }

    // Pr{|h1 h2|^2 > k} below exp(-0.5 sqrt(k)) for k >= 25
    let tail = tail_bound_check(&Poly::var(0).mul_var(1), &[25.0, 49.0, 100.0], trials, 42).unwrap();
    for (k, p) in tail.ks.iter().zip(&tail.probs) {
        ok &= *p <= (-0.5 * k.sqrt()).exp();
    }

    // 2x2 i.i.d. determinant small-ball decay slope stays clearly positive
    let det2 = {
        let mut mm = PolyMatrix::new(2, 2);
        mm.set(0, 0, Poly::var(0));
        mm.set(0, 1, Poly::var(1));
        mm.set(1, 0, Poly::var(2));
        mm.set(1, 1, Poly::var(3));
        mm.det_symbolic()
    };
    let rep2 = small_ball_check(&det2, &[1e-1, 1e-2, 1e-3, 1e-4], trials, 42);
    ok &= rep2.decay_slope > 0.4;

    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 120.0;
    verdict(
        "8 small-ball and tail checks",
        ok,
        format!(
            "ratios {:?}, tail max {:.1e}, det slope {:.2}, {secs:.0}s",
            ratios
                .iter()
                .map(|r| (r * 1000.0).round() / 1000.0)
                .collect::<Vec<_>>(),
            tail.probs.iter().cloned().fold(0.0, f64::max),
            rep2.decay_slope
        ),
    );
}
