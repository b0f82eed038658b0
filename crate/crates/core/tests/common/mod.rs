//! Shared test support: seeded random network generation and brute-force
//! oracles kept independent of the library's computation paths.

use dmtlab_core::net::{Antenna, Duplex, NetworkGraph, Role, SuperNode};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Random connected DAG: node 0 is the source, the last node the sink,
/// edges only go forward in node order, every node lies on some
/// source-to-sink path.
pub fn random_dag(seed: u64, max_nodes: usize, max_antennas: usize) -> NetworkGraph {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.gen_range(3..=max_nodes.max(3));
    let nodes: Vec<SuperNode> = (0..n)
        .map(|i| SuperNode {
            id: format!("n{i}"),
            antennas: rng.gen_range(1..=max_antennas.max(1)),
            role: if i == 0 {
                Role::Source
            } else if i == n - 1 {
                Role::Sink
            } else {
                Role::Relay
            },
            duplex: Duplex::Full,
        })
        .collect();

    let mut ends: Vec<(Antenna, Antenna)> = Vec::new();
    let mut add_link = |rng: &mut StdRng, ends: &mut Vec<(Antenna, Antenna)>, i: usize, j: usize| {
        let (ai, aj) = (nodes[i].antennas, nodes[j].antennas);
        let mut any = false;
        for a in 0..ai {
            for b in 0..aj {
                if rng.gen_bool(0.5) {
                    ends.push((Antenna { node: i, index: a }, Antenna { node: j, index: b }));
                    any = true;
                }
            }
        }
        if !any {
            let a = rng.gen_range(0..ai);
            let b = rng.gen_range(0..aj);
            ends.push((Antenna { node: i, index: a }, Antenna { node: j, index: b }));
        }
    };

    // every non-source node hears someone earlier; every non-sink node
    // talks to someone later — this keeps the whole graph on s-t paths
    for j in 1..n {
        let i = rng.gen_range(0..j);
        add_link(&mut rng, &mut ends, i, j);
    }
    for i in 0..n - 1 {
        if !ends.iter().any(|(f, _)| f.node == i) {
            let j = rng.gen_range(i + 1..n);
            add_link(&mut rng, &mut ends, i, j);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.3) {
                add_link(&mut rng, &mut ends, i, j);
            }
        }
    }
    NetworkGraph::new(nodes, ends).expect("generated network is valid")
}

/// Exhaustive minimum crossing-edge count over all source/sink partitions,
/// written directly against the edge list.
pub fn brute_force_min_cut(net: &NetworkGraph) -> usize {
    let s = net.source().unwrap();
    let t = net.sink().unwrap();
    let middles: Vec<usize> = (0..net.nodes().len()).filter(|&i| i != s && i != t).collect();
    let mut best = usize::MAX;
    for mask in 0u64..(1 << middles.len()) {
        let mut side = vec![false; net.nodes().len()];
        side[s] = true;
        for (bit, &m) in middles.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                side[m] = true;
            }
        }
        let crossing = net
            .edges()
            .iter()
            .filter(|e| side[e.from.node] && !side[e.to.node])
            .count();
        best = best.min(crossing);
    }
    best
}
