//! The weighted Erdős–Rényi ensemble: `n` labeled edges placed uniformly on
//! `k` labeled vertices, each carrying an i.i.d. integer weight drawn from a
//! pmf over `1..=q`.
//!
//! Vertices are 0-based throughout the crate.

use std::collections::HashSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::numeric::{binomial, exact_decimal, factorial, parse_rational, ratio, sig15_rational};

/// Default bound on the number of (edge set, weight assignment) configurations
/// visited by [`enumerate_ensemble`].
pub const DEFAULT_ENUMERATION_GUARD: u64 = 10_000_000;

/// A discrete probability measure over the edge weights `1..=q`, held exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightPmf {
    probs: Vec<BigRational>,
}

impl WeightPmf {
    /// `probs[i]` is the probability of weight `i + 1`.
    pub fn new(probs: Vec<BigRational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("no weights given".into()));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| p.is_negative()) {
            return Err(Error::InvalidPmf(format!(
                "weight {} has negative probability {}",
                i + 1,
                exact_decimal(p)
            )));
        }
        let sum: BigRational = probs.iter().sum();
        if !sum.is_one() {
            return Err(Error::PmfSum(exact_decimal(&sum)));
        }
        Ok(Self { probs })
    }

    /// Parses a comma-separated list of decimals or `p/q` rationals.
    /// Decimals are read exactly, so `0.1` is `1/10`.
    pub fn parse(s: &str) -> Result<Self> {
        let probs = s
            .split(',')
            .map(|item| {
                parse_rational(item)
                    .ok_or_else(|| Error::InvalidPmf(format!("cannot parse {:?}", item.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(probs)
    }

    /// Uniform pmf over `1..=q`.
    pub fn uniform(q: usize) -> Self {
        let p = BigRational::new(BigInt::one(), BigInt::from(q));
        Self {
            probs: vec![p; q.max(1)],
        }
    }

    /// Point mass on weight 1.
    pub fn unit() -> Self {
        Self::uniform(1)
    }

    pub fn q(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    /// Probability of weight `w`; zero outside `1..=q`.
    pub fn prob(&self, w: u32) -> BigRational {
        match (w as usize).checked_sub(1).and_then(|i| self.probs.get(i)) {
            Some(p) => p.clone(),
            None => BigRational::zero(),
        }
    }

    /// Smallest weight with non-zero probability.
    pub fn min_support(&self) -> u32 {
        self.probs
            .iter()
            .position(|p| !p.is_zero())
            .map(|i| i as u32 + 1)
            .expect("a pmf summing to one has non-empty support")
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.probs
            .iter()
            .map(|p| p.to_f64().unwrap_or(0.0))
            .collect()
    }
}

impl fmt::Display for WeightPmf {
    /// Comma-separated exact values, parseable by [`WeightPmf::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.probs.iter().map(exact_decimal).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnsembleParams {
    pub k: usize,
    pub n: usize,
    pub pmf: WeightPmf,
}

impl EnsembleParams {
    pub fn new(k: usize, n: usize, pmf: WeightPmf) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParams(format!(
                "k = {k}: at least two vertices are needed for a cut"
            )));
        }
        let pairs = k * (k - 1) / 2;
        if n == 0 || n > pairs {
            return Err(Error::InvalidParams(format!(
                "n = {n} must lie in [1, {pairs}] for k = {k}"
            )));
        }
        Ok(Self { k, n, pmf })
    }

    pub fn q(&self) -> usize {
        self.pmf.q()
    }

    /// Number of vertex pairs, `C(k, 2)`.
    pub fn pair_count(&self) -> usize {
        self.k * (self.k - 1) / 2
    }

    /// Number of unlabeled edge sets times weight assignments, `C(C(k,2), n) · qⁿ`.
    pub fn configuration_count(&self) -> BigUint {
        binomial(self.pair_count() as u64, self.n as u64)
            * num_traits::pow(BigUint::from(self.q()), self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: u32,
}

impl Edge {
    pub fn new(u: usize, v: usize, w: u32) -> Self {
        Self { u, v, w }
    }
}

/// A simple undirected graph with positive integer edge weights. Edge label
/// `i` is position `i` in [`WeightedGraph::edges`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    k: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(k: usize, edges: Vec<Edge>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidGraph(format!("k = {k} < 2")));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if e.u >= k || e.v >= k {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} ({}, {}) has an endpoint outside 0..{k}",
                    e.u, e.v
                )));
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} is a self-loop at {}",
                    e.u
                )));
            }
            if e.w == 0 {
                return Err(Error::InvalidGraph(format!("edge {i} has weight 0")));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} duplicates the pair ({}, {})",
                    e.u, e.v
                )));
            }
        }
        Ok(Self { k, edges })
    }

    /// Builds from `(u, v, w)` triples; panics on invalid input. Test and
    /// example convenience.
    pub fn from_triples(k: usize, triples: &[(usize, usize, u32)]) -> Self {
        let edges = triples
            .iter()
            .map(|&(u, v, w)| Edge::new(u, v, w))
            .collect();
        Self::new(k, edges).expect("valid graph")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Checks that this graph belongs to the ensemble described by `params`.
    pub fn check_member(&self, params: &EnsembleParams) -> Result<()> {
        if self.k != params.k || self.n() != params.n {
            return Err(Error::InvalidGraph(format!(
                "graph has k = {}, n = {} but the ensemble has k = {}, n = {}",
                self.k,
                self.n(),
                params.k,
                params.n
            )));
        }
        if let Some(e) = self.edges.iter().find(|e| e.w as usize > params.q()) {
            return Err(Error::InvalidGraph(format!(
                "weight {} exceeds q = {}",
                e.w,
                params.q()
            )));
        }
        Ok(())
    }

    /// Adjacency lists of `(neighbour, weight)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, u64)>> {
        let mut adj = vec![Vec::new(); self.k];
        for e in &self.edges {
            adj[e.u].push((e.v, e.w as u64));
            adj[e.v].push((e.u, e.w as u64));
        }
        adj
    }

    /// Connected-component label of every vertex; labels are the smallest
    /// vertex of each component.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.k).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        (0..self.k).map(|x| find(&mut parent, x)).collect()
    }

    pub fn component_count(&self) -> usize {
        let labels = self.component_labels();
        labels.iter().enumerate().filter(|&(v, &l)| v == l).count()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// Total weight of edges with exactly one endpoint in `side`.
    pub fn crossing_weight(&self, side: &[bool]) -> u64 {
        self.edges
            .iter()
            .filter(|e| side[e.u] != side[e.v])
            .map(|e| e.w as u64)
            .sum()
    }
}

/// `|R| = n! · C(C(k,2), n) · qⁿ`.
pub fn ensemble_cardinality(params: &EnsembleParams) -> BigUint {
    factorial(params.n as u64) * params.configuration_count()
}

/// `P(G) = ∏ μ(wᵢ) / (n! · C(C(k,2), n))`.
pub fn graph_probability(params: &EnsembleParams, g: &WeightedGraph) -> Result<BigRational> {
    g.check_member(params)?;
    let labelings =
        factorial(params.n as u64) * binomial(params.pair_count() as u64, params.n as u64);
    let weight_mass: BigRational = g.edges().iter().map(|e| params.pmf.prob(e.w)).product();
    Ok(weight_mass / ratio(labelings, BigUint::one()))
}

/// Maps pair index `0..C(k,2)` to the vertex pair in lexicographic order.
fn pair_table(k: usize) -> Vec<(u32, u32)> {
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for u in 0..k {
        for v in u + 1..k {
            pairs.push((u as u32, v as u32));
        }
    }
    pairs
}

/// Reusable sampler with the pair table and weight CDF precomputed.
#[derive(Clone, Debug)]
pub struct EnsembleSampler {
    k: usize,
    n: usize,
    pairs: Vec<(u32, u32)>,
    cdf: Vec<f64>,
}

impl EnsembleSampler {
    pub fn new(params: &EnsembleParams) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = params
            .pmf
            .to_f64()
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        // the last non-zero weight absorbs rounding
        let last = params
            .pmf
            .probs()
            .iter()
            .rposition(|p| !p.is_zero())
            .unwrap_or(0);
        for c in &mut cdf[last..] {
            *c = f64::INFINITY;
        }
        Self {
            k: params.k,
            n: params.n,
            pairs: pair_table(params.k),
            cdf,
        }
    }

    /// Partial Fisher–Yates over the pair indices for the edge set, then
    /// inverse-CDF draws for the weights.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> WeightedGraph {
        let mut idx: Vec<u32> = (0..self.pairs.len() as u32).collect();
        for i in 0..self.n {
            let j = rng.gen_range(i..idx.len());
            idx.swap(i, j);
        }
        let edges = idx[..self.n]
            .iter()
            .map(|&p| {
                let (u, v) = self.pairs[p as usize];
                let r: f64 = rng.gen();
                let w = self
                    .cdf
                    .iter()
                    .position(|&c| r < c)
                    .expect("cdf ends at infinity");
                Edge::new(u as usize, v as usize, w as u32 + 1)
            })
            .collect();
        WeightedGraph { k: self.k, edges }
    }
}

pub fn sample_graph<R: Rng + ?Sized>(params: &EnsembleParams, rng: &mut R) -> WeightedGraph {
    EnsembleSampler::new(params).sample(rng)
}

/// Iterates every unordered edge set × weight assignment once, with the `n!`
/// labelings folded into the emitted probability.
pub fn enumerate_ensemble(params: &EnsembleParams) -> Result<EnsembleEnumerator> {
    enumerate_ensemble_with_guard(params, DEFAULT_ENUMERATION_GUARD)
}

pub fn enumerate_ensemble_with_guard(
    params: &EnsembleParams,
    guard: u64,
) -> Result<EnsembleEnumerator> {
    let count = params.configuration_count();
    if count > BigUint::from(guard) {
        let digits = count.to_string();
        let count = if digits.len() > 15 {
            sig15_rational(&ratio(count, BigUint::one()))
        } else {
            digits
        };
        return Err(Error::GuardExceeded {
            what: "ensemble configuration count",
            count,
            guard: guard.to_string(),
        });
    }
    let subsets = binomial(params.pair_count() as u64, params.n as u64);
    Ok(EnsembleEnumerator {
        k: params.k,
        pairs: pair_table(params.k),
        probs: params.pmf.probs().to_vec(),
        subset_mass: ratio(BigUint::one(), subsets),
        subset: (0..params.n).collect(),
        weights: vec![0; params.n],
        done: false,
    })
}

pub struct EnsembleEnumerator {
    k: usize,
    pairs: Vec<(u32, u32)>,
    probs: Vec<BigRational>,
    subset_mass: BigRational,
    subset: Vec<usize>,
    // weight index (w - 1) per edge
    weights: Vec<usize>,
    done: bool,
}

impl EnsembleEnumerator {
    fn advance(&mut self) {
        let q = self.probs.len();
        for w in self.weights.iter_mut().rev() {
            *w += 1;
            if *w < q {
                return;
            }
            *w = 0;
        }
        // weights wrapped: next lexicographic subset
        let n = self.subset.len();
        let total = self.pairs.len();
        let mut i = n;
        while i > 0 {
            i -= 1;
            if self.subset[i] < total - n + i {
                self.subset[i] += 1;
                for j in i + 1..n {
                    self.subset[j] = self.subset[j - 1] + 1;
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for EnsembleEnumerator {
    type Item = (WeightedGraph, BigRational);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let edges = self
            .subset
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| {
                let (u, v) = self.pairs[p];
                Edge::new(u as usize, v as usize, w as u32 + 1)
            })
            .collect();
        let mass = self
            .weights
            .iter()
            .fold(self.subset_mass.clone(), |acc, &w| acc * &self.probs[w]);
        let item = (WeightedGraph { k: self.k, edges }, mass);
        self.advance();
        Some(item)
    }
}
