//! Exact per-graph cut-space quantities by explicit enumeration: the F2
//! incidence matrix, its rank, the cut weight distribution `B_w(G)` and the
//! detailed distribution `A_{u,v,w}(G)`.
//!
//! Enumerations walk a Gray code over vertex-side vectors, so each step flips
//! one vertex and updates the crossing weight from its adjacency list.

use std::collections::BTreeMap;

use serde::ser::{Serialize, SerializeMap, SerializeStruct, Serializer};

use crate::ensemble::WeightedGraph;
use crate::error::{Error, Result};

pub const DEFAULT_CUT_GUARD: usize = 24;
pub const DEFAULT_DETAILED_GUARD: usize = 20;

/// `k × n` incidence matrix over F2 with bit-packed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    k: usize,
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.k
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i][j / 64] >> (j % 64) & 1 == 1
    }

    pub fn row_weight(&self, i: usize) -> u32 {
        self.rows[i].iter().map(|w| w.count_ones()).sum()
    }

    pub fn column_weight(&self, j: usize) -> u32 {
        (0..self.k).filter(|&i| self.get(i, j)).count() as u32
    }

    /// `m · M` over F2 for a vertex indicator `m`.
    pub fn mul_left(&self, m: &[bool]) -> Vec<bool> {
        let mut acc = vec![0u64; self.n.div_ceil(64)];
        for (row, _) in self.rows.iter().zip(m).filter(|(_, &bit)| bit) {
            for (a, r) in acc.iter_mut().zip(row) {
                *a ^= r;
            }
        }
        (0..self.n)
            .map(|j| acc[j / 64] >> (j % 64) & 1 == 1)
            .collect()
    }
}

pub fn incidence_matrix(g: &WeightedGraph) -> IncidenceMatrix {
    let words = g.n().div_ceil(64);
    let mut rows = vec![vec![0u64; words]; g.k()];
    for (j, e) in g.edges().iter().enumerate() {
        rows[e.u][j / 64] |= 1 << (j % 64);
        rows[e.v][j / 64] |= 1 << (j % 64);
    }
    IncidenceMatrix {
        k: g.k(),
        n: g.n(),
        rows,
    }
}

/// Rank over F2 by Gaussian elimination on the packed rows.
pub fn f2_rank(m: &IncidenceMatrix) -> usize {
    let mut rows = m.rows.clone();
    let mut rank = 0;
    for col in 0..m.n {
        let (word, bit) = (col / 64, 1u64 << (col % 64));
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][word] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[word] & bit != 0 {
                for (a, p) in row.iter_mut().zip(&pivot_row) {
                    *a ^= p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `(u, v, w)`: Hamming weight of the vertex vector, Hamming weight of the
/// cut-set vector, and cut weight.
pub type Cell = (usize, usize, u64);

/// Exact cut-space spectrum of one graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CutSpectrum {
    pub k: usize,
    pub n: usize,
    /// `w ↦ B_w(G)`, the number of distinct cut-sets of weight `w`.
    pub b: BTreeMap<u64, u64>,
    /// `(u, v, w) ↦ A_{u,v,w}(G)`.
    pub a: BTreeMap<Cell, u64>,
}

impl CutSpectrum {
    /// Largest possible cut weight, the total edge weight.
    pub fn max_weight(&self) -> u64 {
        self.b
            .keys()
            .chain(self.a.keys().map(|c| &c.2))
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// `½ Σ_{u,v} A_{u,v,w}` doubled, i.e. the plain cell sum at weight `w`.
    pub fn detailed_sum_at(&self, w: u64) -> u64 {
        self.a
            .iter()
            .filter(|((_, _, cw), _)| *cw == w)
            .map(|(_, c)| c)
            .sum()
    }
}

struct SparseCounts<'a, K>(&'a BTreeMap<K, u64>, fn(&K) -> String);

impl<K> Serialize for SparseCounts<'_, K> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (key, count) in self.0 {
            map.serialize_entry(&(self.1)(key), count)?;
        }
        map.end()
    }
}

impl Serialize for CutSpectrum {
    /// `{"k", "n", "b": {"w": count}, "a": {"u,v,w": count}}`, keys in
    /// numeric order.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CutSpectrum", 4)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("b", &SparseCounts(&self.b, |w| w.to_string()))?;
        st.serialize_field(
            "a",
            &SparseCounts(&self.a, |(u, v, w)| format!("{u},{v},{w}")),
        )?;
        st.end()
    }
}

fn check_guard(g: &WeightedGraph, guard: usize, what: &'static str) -> Result<()> {
    if g.k() > guard {
        return Err(Error::GuardExceeded {
            what,
            count: format!("k = {}", g.k()),
            guard: format!("k = {guard}"),
        });
    }
    Ok(())
}

/// Visits every non-zero assignment of the `free` vertices (all others held
/// on side 0) in Gray-code order, passing the vertex just flipped, its new
/// side, the crossing weight and the crossing-edge count.
fn gray_walk(g: &WeightedGraph, free: &[usize], mut visit: impl FnMut(usize, bool, u64, usize)) {
    let adj = g.adjacency();
    let mut side = vec![false; g.k()];
    let (mut weight, mut crossing) = (0u64, 0usize);
    for step in 1u64..(1u64 << free.len()) {
        let x = free[step.trailing_zeros() as usize];
        for &(y, w) in &adj[x] {
            if side[x] == side[y] {
                weight += w;
                crossing += 1;
            } else {
                weight -= w;
                crossing -= 1;
            }
        }
        side[x] = !side[x];
        visit(x, side[x], weight, crossing);
    }
}

/// `B_w(G)`: distinct cut-sets by weight, including the empty cut-set
/// (weight 0) when `G` is disconnected.
pub fn cut_weight_distribution(g: &WeightedGraph) -> Result<BTreeMap<u64, u64>> {
    cut_weight_distribution_with_guard(g, DEFAULT_CUT_GUARD)
}

pub fn cut_weight_distribution_with_guard(
    g: &WeightedGraph,
    guard: usize,
) -> Result<BTreeMap<u64, u64>> {
    check_guard(g, guard, "cut weight enumeration")?;
    // Two side vectors give the same cut-set iff they differ by a union of
    // components; pinning each component's smallest vertex to side 0 picks
    // one representative per cut-set.
    let labels = g.component_labels();
    let free: Vec<usize> = (0..g.k()).filter(|&v| labels[v] != v).collect();
    let mut b = BTreeMap::new();
    if free.len() + 1 < g.k() {
        b.insert(0, 1);
    }
    gray_walk(g, &free, |_, _, w, _| *b.entry(w).or_insert(0) += 1);
    Ok(b)
}

/// Crossing weight of every bipartition `{X, V∖X}` with vertex 0 in `X`,
/// counted with multiplicity (no merging of equal cut-sets).
pub fn bipartition_weight_counts(g: &WeightedGraph) -> Result<BTreeMap<u64, u64>> {
    check_guard(g, DEFAULT_CUT_GUARD, "bipartition enumeration")?;
    let free: Vec<usize> = (1..g.k()).collect();
    let mut counts = BTreeMap::new();
    gray_walk(g, &free, |_, _, w, _| *counts.entry(w).or_insert(0) += 1);
    Ok(counts)
}

/// `A_{u,v,w}(G)` over all `m ∉ {0ᵏ, 1ᵏ}`.
pub fn detailed_cut_distribution(g: &WeightedGraph) -> Result<BTreeMap<Cell, u64>> {
    detailed_cut_distribution_with_guard(g, DEFAULT_DETAILED_GUARD)
}

pub fn detailed_cut_distribution_with_guard(
    g: &WeightedGraph,
    guard: usize,
) -> Result<BTreeMap<Cell, u64>> {
    check_guard(g, guard, "detailed cut enumeration")?;
    let free: Vec<usize> = (0..g.k()).collect();
    let k = g.k();
    let mut a = BTreeMap::new();
    let mut ones = 0usize;
    gray_walk(g, &free, |_, now_set, w, v| {
        if now_set {
            ones += 1;
        } else {
            ones -= 1;
        }
        if ones < k {
            *a.entry((ones, v, w)).or_insert(0) += 1;
        }
    });
    Ok(a)
}

pub fn cut_spectrum(g: &WeightedGraph) -> Result<CutSpectrum> {
    Ok(CutSpectrum {
        k: g.k(),
        n: g.n(),
        b: cut_weight_distribution(g)?,
        a: detailed_cut_distribution(g)?,
    })
}

/// A weight at which `B_w(G) > ½ Σ_{u,v} A_{u,v,w}(G)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lemma1Violation {
    pub w: u64,
    pub b: u64,
    pub detailed_sum: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma1Check {
    pub violation: Option<Lemma1Violation>,
    /// Weights where `2·B_w = Σ_{u,v} A_{u,v,w}`.
    pub tight_at: Vec<u64>,
}

impl Lemma1Check {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `B_w(G) ≤ ½ Σ_{u,v} A_{u,v,w}(G)` for every `w` in exact integers.
pub fn lemma1_check(g: &WeightedGraph) -> Result<Lemma1Check> {
    let spectrum = cut_spectrum(g)?;
    Ok(check_spectrum(&spectrum))
}

pub fn check_spectrum(spectrum: &CutSpectrum) -> Lemma1Check {
    let mut detailed: BTreeMap<u64, u64> = BTreeMap::new();
    for (&(_, _, w), &c) in &spectrum.a {
        *detailed.entry(w).or_insert(0) += c;
    }
    let mut weights: Vec<u64> = spectrum.b.keys().chain(detailed.keys()).copied().collect();
    weights.sort_unstable();
    weights.dedup();
    let mut check = Lemma1Check {
        violation: None,
        tight_at: Vec::new(),
    };
    for w in weights {
        let b = spectrum.b.get(&w).copied().unwrap_or(0);
        let sum = detailed.get(&w).copied().unwrap_or(0);
        if 2 * b > sum {
            check.violation = Some(Lemma1Violation {
                w,
                b,
                detailed_sum: sum,
            });
            break;
        }
        if 2 * b == sum {
            check.tight_at.push(w);
        }
    }
    check
}
