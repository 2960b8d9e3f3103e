//! Global minimum cut capacity `λ(G)`.
//!
//! [`global_min_cut`] runs the maximum-adjacency (Stoer–Wagner) contraction
//! algorithm and is the default. [`global_min_cut_via_maxflow`] fixes vertex 0
//! as source and takes the smallest Ford–Fulkerson max flow over all sinks.
//! [`min_cut_by_enumeration`] walks every bipartition and serves as the oracle.

use std::collections::VecDeque;

use crate::cutspace::{bipartition_weight_counts, DEFAULT_CUT_GUARD};
use crate::ensemble::WeightedGraph;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinCutResult {
    pub value: u64,
    /// Sorted vertex set `X`, non-empty and proper. Not canonical among
    /// equal-value cuts.
    pub witness: Vec<usize>,
}

impl MinCutResult {
    /// Crossing weight of the witness, recomputed from the graph.
    pub fn witness_weight(&self, g: &WeightedGraph) -> u64 {
        let mut side = vec![false; g.k()];
        for &v in &self.witness {
            side[v] = true;
        }
        g.crossing_weight(&side)
    }
}

/// The component holding vertex 0, when `g` is disconnected.
fn disconnected_witness(g: &WeightedGraph) -> Option<MinCutResult> {
    let labels = g.component_labels();
    if labels.iter().all(|&l| l == 0) {
        return None;
    }
    let witness = (0..g.k()).filter(|&v| labels[v] == 0).collect();
    Some(MinCutResult { value: 0, witness })
}

pub fn global_min_cut(g: &WeightedGraph) -> MinCutResult {
    if let Some(r) = disconnected_witness(g) {
        return r;
    }
    let k = g.k();
    let mut weight = vec![0u64; k * k];
    for e in g.edges() {
        weight[e.u * k + e.v] += e.w as u64;
        weight[e.v * k + e.u] += e.w as u64;
    }
    let mut members: Vec<Vec<usize>> = (0..k).map(|v| vec![v]).collect();
    let mut active: Vec<usize> = (0..k).collect();
    let mut best = MinCutResult {
        value: u64::MAX,
        witness: Vec::new(),
    };
    let mut key = vec![0u64; k];
    let mut added = vec![false; k];

    while active.len() > 1 {
        for &v in &active {
            key[v] = 0;
            added[v] = false;
        }
        let (mut prev, mut last) = (active[0], active[0]);
        for _ in 0..active.len() {
            let next = *active
                .iter()
                .filter(|&&v| !added[v])
                .max_by(|&&a, &&b| key[a].cmp(&key[b]).then(b.cmp(&a)))
                .expect("an unadded vertex remains");
            added[next] = true;
            prev = last;
            last = next;
            let row = &weight[next * k..next * k + k];
            for &v in &active {
                if !added[v] {
                    key[v] += row[v];
                }
            }
        }
        // cut of the phase separates `last` from everything else
        if key[last] < best.value {
            best.value = key[last];
            best.witness = members[last].clone();
        }
        let moved = std::mem::take(&mut members[last]);
        members[prev].extend(moved);
        for &v in &active {
            let w = weight[last * k + v];
            weight[prev * k + v] += w;
            weight[v * k + prev] += w;
        }
        weight[prev * k + prev] = 0;
        active.retain(|&v| v != last);
    }
    best.witness.sort_unstable();
    best
}

/// Residual network with paired arcs; arc `i ^ 1` is the reverse of arc `i`.
struct FlowNetwork {
    head: Vec<usize>,
    cap: Vec<u64>,
    out: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn new(g: &WeightedGraph) -> Self {
        let mut net = FlowNetwork {
            head: Vec::with_capacity(2 * g.n()),
            cap: Vec::with_capacity(2 * g.n()),
            out: vec![Vec::new(); g.k()],
        };
        for e in g.edges() {
            // an undirected edge is capacity w both ways on one arc pair
            let w = e.w as u64;
            net.out[e.u].push(net.head.len());
            net.head.push(e.v);
            net.cap.push(w);
            net.out[e.v].push(net.head.len());
            net.head.push(e.u);
            net.cap.push(w);
        }
        net
    }

    /// Shortest augmenting path by BFS; returns the parent arcs on success.
    fn augmenting_path(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let mut parent = vec![usize::MAX; self.out.len()];
        let mut seen = vec![false; self.out.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &arc in &self.out[x] {
                let y = self.head[arc];
                if !seen[y] && self.cap[arc] > 0 {
                    seen[y] = true;
                    parent[y] = arc;
                    if y == t {
                        return Some(parent);
                    }
                    queue.push_back(y);
                }
            }
        }
        None
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut flow = 0;
        while let Some(parent) = self.augmenting_path(s, t) {
            let mut bottleneck = u64::MAX;
            let mut v = t;
            while v != s {
                let arc = parent[v];
                bottleneck = bottleneck.min(self.cap[arc]);
                v = self.head[arc ^ 1];
            }
            let mut v = t;
            while v != s {
                let arc = parent[v];
                self.cap[arc] -= bottleneck;
                self.cap[arc ^ 1] += bottleneck;
                v = self.head[arc ^ 1];
            }
            flow += bottleneck;
        }
        flow
    }

    fn reachable(&self, s: usize) -> Vec<usize> {
        let mut seen = vec![false; self.out.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &arc in &self.out[x] {
                let y = self.head[arc];
                if !seen[y] && self.cap[arc] > 0 {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..seen.len()).filter(|&v| seen[v]).collect()
    }
}

/// `s`-`t` maximum flow with every undirected edge usable in both directions
/// up to its weight.
///
/// # Panics
///
/// If `s == t` or either vertex is out of range.
pub fn max_flow(g: &WeightedGraph, s: usize, t: usize) -> u64 {
    assert!(s != t, "source and sink coincide");
    assert!(s < g.k() && t < g.k(), "vertex out of range");
    FlowNetwork::new(g).max_flow(s, t)
}

pub fn global_min_cut_via_maxflow(g: &WeightedGraph) -> MinCutResult {
    if let Some(r) = disconnected_witness(g) {
        return r;
    }
    let mut best = MinCutResult {
        value: u64::MAX,
        witness: Vec::new(),
    };
    for t in 1..g.k() {
        let mut net = FlowNetwork::new(g);
        let flow = net.max_flow(0, t);
        if flow < best.value {
            best = MinCutResult {
                value: flow,
                witness: net.reachable(0),
            };
        }
    }
    best
}

/// Minimum crossing weight over all bipartitions; oracle for small `k`.
pub fn min_cut_by_enumeration(g: &WeightedGraph) -> Result<u64> {
    if g.k() > DEFAULT_CUT_GUARD {
        return Err(Error::GuardExceeded {
            what: "bipartition enumeration",
            count: format!("k = {}", g.k()),
            guard: format!("k = {DEFAULT_CUT_GUARD}"),
        });
    }
    let counts = bipartition_weight_counts(g)?;
    Ok(*counts.keys().next().expect("k >= 2 gives at least one cut"))
}
