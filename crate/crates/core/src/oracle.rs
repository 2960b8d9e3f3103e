//! Exact ensemble averages by full enumeration: `Pr[λ ≥ δ]`, `E[B_w]` and
//! `E[A_{u,v,w}]`. Used to check the closed forms on small `(k, n, q)`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::cutspace::{cut_weight_distribution, detailed_cut_distribution, Cell};
use crate::ensemble::{enumerate_ensemble_with_guard, EnsembleParams};
use crate::error::Result;
use crate::mincut::global_min_cut;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnsembleSummary {
    /// `λ ↦ Pr[λ(G) = λ]`.
    pub lambda: BTreeMap<u64, BigRational>,
    /// `w ↦ E[B_w(G)]`.
    pub expected_b: BTreeMap<u64, BigRational>,
    /// `(u, v, w) ↦ E[A_{u,v,w}(G)]`.
    pub expected_a: BTreeMap<Cell, BigRational>,
}

impl EnsembleSummary {
    /// `Pr[λ(G) ≥ δ]`.
    pub fn tail(&self, delta: u64) -> BigRational {
        self.lambda.range(delta..).map(|(_, p)| p).sum()
    }

    pub fn expected_b(&self, w: u64) -> BigRational {
        self.expected_b
            .get(&w)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn expected_a(&self, cell: Cell) -> BigRational {
        self.expected_a
            .get(&cell)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }
}

pub fn ensemble_summary(params: &EnsembleParams, guard: u64) -> Result<EnsembleSummary> {
    let mut summary = EnsembleSummary {
        lambda: BTreeMap::new(),
        expected_b: BTreeMap::new(),
        expected_a: BTreeMap::new(),
    };
    for (g, mass) in enumerate_ensemble_with_guard(params, guard)? {
        if mass.is_zero() {
            continue;
        }
        let lambda = global_min_cut(&g).value;
        *summary
            .lambda
            .entry(lambda)
            .or_insert_with(BigRational::zero) += &mass;
        for (w, count) in cut_weight_distribution(&g)? {
            *summary
                .expected_b
                .entry(w)
                .or_insert_with(BigRational::zero) +=
                &mass * BigRational::from_integer(count.into());
        }
        for (cell, count) in detailed_cut_distribution(&g)? {
            *summary
                .expected_a
                .entry(cell)
                .or_insert_with(BigRational::zero) +=
                &mass * BigRational::from_integer(count.into());
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{WeightPmf, DEFAULT_ENUMERATION_GUARD};
    use crate::error::Error;
    use num_traits::One;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn summary(k: usize, n: usize, pmf: &str) -> EnsembleSummary {
        let p = EnsembleParams::new(k, n, WeightPmf::parse(pmf).unwrap()).unwrap();
        ensemble_summary(&p, DEFAULT_ENUMERATION_GUARD).unwrap()
    }

    #[test]
    fn path_ensemble() {
        let s = summary(3, 2, "1");
        assert!(s.tail(1).is_one());
        assert!(s.tail(2).is_zero());
        assert_eq!(s.expected_b(1), q(2, 1));
        assert_eq!(s.expected_b(2), q(1, 1));
        assert_eq!(s.expected_a((1, 1, 1)), q(2, 1));
    }

    #[test]
    fn triangle_ensemble() {
        let s = summary(3, 3, "1");
        assert!(s.tail(2).is_one());
        assert!(s.tail(3).is_zero());
        assert_eq!(s.expected_b(2), q(3, 1));
        assert_eq!(s.expected_a((1, 2, 2)), q(3, 1));
    }

    #[test]
    fn disconnection_probability() {
        // two edges cannot connect four vertices
        let s = summary(4, 2, "1");
        assert!(s.tail(1).is_zero());
        // k = 4, n = 3: connected iff the 3 edges form a spanning tree, 16 of 20
        let s = summary(4, 3, "1");
        assert_eq!(s.tail(1), q(16, 20));
    }

    #[test]
    fn guard_is_enforced() {
        let p = EnsembleParams::new(6, 8, WeightPmf::uniform(2)).unwrap();
        assert!(matches!(
            ensemble_summary(&p, 1000),
            Err(Error::GuardExceeded { .. })
        ));
    }
}
