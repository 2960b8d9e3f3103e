//! Closed-form ensemble quantities and the Markov-type lower bound on
//! `Pr[λ(G) ≥ δ]`.
//!
//! With `N = C(k,2)` and `a = u(k−u)` (the number of vertex pairs crossing a
//! side of size `u`):
//!
//! ```text
//! E[A_{u,v,w}] = C(k,u) · C(a,v) · C(N−a, n−v) · [xʷ] f(x)ᵛ / C(N,n)
//! E[B_w]      ≤ ½ Σ_u Σ_v E[A_{u,v,w}]
//! Pr[λ ≥ δ]   ≥ 1 − Σ_{w<δ} ½ Σ_u Σ_v E[A_{u,v,w}]
//! ```
//!
//! `f(x) = Σ μ(i) xⁱ` has no constant term, so `[xʷ] f(x)ᵛ` vanishes once
//! `v · min_support > w`; every `v` sum below stops there. The `u` sum does
//! not depend on `w` and is folded once per `v` into [`ExactBound`].

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use statrs::function::gamma::ln_gamma;

use crate::ensemble::{EnsembleParams, WeightPmf};
use crate::numeric::{binomial, ratio, to_f64};

/// Polynomial with exact coefficients for degrees `0..=max_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedPolynomial {
    coeffs: Vec<BigRational>,
}

impl TruncatedPolynomial {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a polynomial has at least a constant term"
        );
        Self { coeffs }
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, degree: usize) -> BigRational {
        self.coeffs
            .get(degree)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Lowest degree with a non-zero coefficient.
    pub fn min_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Product truncated at `max_degree`.
    pub fn mul_truncated(&self, other: &Self, max_degree: usize) -> Self {
        let mut out = vec![BigRational::zero(); max_degree + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(max_degree + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(max_degree + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self { coeffs: out }
    }
}

/// `f(x) = Σ μ(i) xⁱ` truncated at `max_degree`.
pub fn weight_poly(pmf: &WeightPmf, max_degree: usize) -> TruncatedPolynomial {
    let mut coeffs = vec![BigRational::zero(); max_degree + 1];
    for (i, p) in pmf.probs().iter().enumerate() {
        if i < max_degree {
            coeffs[i + 1] = p.clone();
        }
    }
    TruncatedPolynomial { coeffs }
}

/// `[xʷ] f(x)ᵛ` by repeated multiplication truncated at degree `w`.
///
/// # Panics
///
/// If `w > f.max_degree()`.
pub fn power_coeff(f: &TruncatedPolynomial, v: usize, w: usize) -> BigRational {
    assert!(w <= f.max_degree(), "degree {w} beyond the truncation");
    if v == 0 {
        return if w == 0 {
            BigRational::one()
        } else {
            BigRational::zero()
        };
    }
    match f.min_degree() {
        Some(d) if d.saturating_mul(v) <= w => {}
        _ => return BigRational::zero(),
    }
    let mut acc = TruncatedPolynomial::new(vec![BigRational::one()]);
    for _ in 0..v {
        acc = acc.mul_truncated(f, w);
    }
    acc.coeff(w)
}

/// `[xʷ] f(x)ᵛ` for all `v ≤ max_v`, `w ≤ max_w`.
#[derive(Clone, Debug)]
struct PowerTable {
    rows: Vec<TruncatedPolynomial>,
}

impl PowerTable {
    fn new(pmf: &WeightPmf, max_v: usize, max_w: usize) -> Self {
        let f = weight_poly(pmf, max_w);
        let mut rows = vec![TruncatedPolynomial::new(vec![BigRational::one()])];
        for v in 1..=max_v {
            rows.push(rows[v - 1].mul_truncated(&f, max_w));
        }
        Self { rows }
    }

    fn get(&self, v: usize, w: usize) -> BigRational {
        self.rows[v].coeff(w)
    }
}

fn crossing_pairs(k: u64, u: u64) -> u64 {
    u * (k - u)
}

/// `E[A_{u,v,w}(G)]`, exactly. Zero outside `u ∈ [1, k−1]`, `v ∈ [0, n]`.
pub fn expected_a(params: &EnsembleParams, u: usize, v: usize, w: usize) -> BigRational {
    let (k, n) = (params.k as u64, params.n as u64);
    let (u, v) = (u as u64, v as u64);
    if u == 0 || u >= k || v > n {
        return BigRational::zero();
    }
    let pairs = params.pair_count() as u64;
    let a = crossing_pairs(k, u);
    let count = binomial(k, u) * binomial(a, v) * binomial(pairs - a, n - v);
    if count.is_zero() {
        return BigRational::zero();
    }
    let f = weight_poly(&params.pmf, w);
    ratio(count, binomial(pairs, n)) * power_coeff(&f, v as usize, w)
}

/// Largest `v` with a possibly non-zero `[xʷ] f(x)ᵛ`.
fn v_limit(params: &EnsembleParams, w: usize) -> usize {
    params.n.min(w / params.pmf.min_support() as usize)
}

/// Exact evaluator for the upper bound on `E[B_w]` and the tail bound.
#[derive(Clone, Debug)]
pub struct ExactBound {
    params: EnsembleParams,
    /// `2 · C(N, n)`
    denom: BigUint,
    /// `Σ_u C(k,u) · C(a,v) · C(N−a, n−v)` by `v`.
    by_v: Vec<BigUint>,
    powers: PowerTable,
}

impl ExactBound {
    pub fn new(params: &EnsembleParams) -> Self {
        let mut bound = Self {
            params: params.clone(),
            denom: binomial(params.pair_count() as u64, params.n as u64) * 2u32,
            by_v: Vec::new(),
            powers: PowerTable { rows: Vec::new() },
        };
        bound.grow(8);
        bound
    }

    fn max_w(&self) -> usize {
        self.powers.rows.first().map_or(0, |r| r.max_degree())
    }

    /// Extends the tables to cover every `w ≤ max_w`.
    fn grow(&mut self, max_w: usize) {
        if !self.by_v.is_empty() && max_w <= self.max_w() {
            return;
        }
        let max_w = max_w.max(2 * self.max_w());
        let max_v = v_limit(&self.params, max_w);
        self.by_v = crossing_sums(&self.params, max_v);
        self.powers = PowerTable::new(&self.params.pmf, max_v, max_w);
    }

    /// `½ Σ_u Σ_v E[A_{u,v,w}]`.
    pub fn expected_bw_upper(&mut self, w: usize) -> BigRational {
        self.grow(w);
        let mut num = BigRational::zero();
        for v in 0..=v_limit(&self.params, w) {
            let c = self.powers.get(v, w);
            if !c.is_zero() {
                num += c * BigRational::from_integer(self.by_v[v].clone().into());
            }
        }
        num / BigRational::from_integer(self.denom.clone().into())
    }
}

/// `Σ_{u=1}^{k−1} C(k,u) · C(a_u, v) · C(N − a_u, n − v)` for `v = 0..=max_v`,
/// stepping `C(M, n−v)` down from `C(M, n)` one factor at a time.
fn crossing_sums(params: &EnsembleParams, max_v: usize) -> Vec<BigUint> {
    let (k, n) = (params.k as u64, params.n as u64);
    let pairs = params.pair_count() as u64;
    let mut sums = vec![BigUint::zero(); max_v + 1];
    for u in 1..k {
        let a = crossing_pairs(k, u);
        let rest = pairs - a;
        let choose_u = binomial(k, u);
        let mut tail: Option<BigUint> = None;
        for v in 0..=max_v as u64 {
            let j = n - v;
            tail = match tail {
                _ if j > rest => None,
                // C(M, j) = C(M, j+1) · (j+1) / (M − j)
                Some(prev) => Some(prev * (j + 1) / (rest - j)),
                None => Some(binomial(rest, j)),
            };
            if let Some(t) = &tail {
                let choose_v = binomial(a, v);
                if !choose_v.is_zero() {
                    sums[v as usize] += &choose_u * choose_v * t;
                }
            }
        }
    }
    sums
}

/// `E[B_w]` upper bound, exactly.
pub fn expected_bw_upper(params: &EnsembleParams, w: usize) -> BigRational {
    ExactBound::new(params).expected_bw_upper(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Exact,
    LogDomain,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Exact => "exact",
            Representation::LogDomain => "log",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundPoint {
    pub delta: u64,
    /// `1 − Σ_{w<δ} E[B_w]` upper bound; may be negative.
    pub raw: f64,
    /// Present on the exact path.
    pub exact: Option<BigRational>,
}

impl BoundPoint {
    pub fn clamped(&self) -> f64 {
        self.raw.max(0.0)
    }

    pub fn clamped_exact(&self) -> Option<BigRational> {
        self.exact.as_ref().map(|r| {
            if r.is_negative() {
                BigRational::zero()
            } else {
                r.clone()
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundCurve {
    pub params: EnsembleParams,
    pub representation: Representation,
    /// One point per `δ = 0, 1, …`.
    pub points: Vec<BoundPoint>,
}

impl BoundCurve {
    pub fn delta_max(&self) -> u64 {
        self.points.len() as u64 - 1
    }

    pub fn point(&self, delta: u64) -> Option<&BoundPoint> {
        self.points.get(delta as usize)
    }

    /// Largest relative difference of `raw` against `reference`, over points
    /// where `|reference.raw| > floor`.
    pub fn max_relative_disagreement(&self, reference: &BoundCurve, floor: f64) -> f64 {
        self.points
            .iter()
            .zip(&reference.points)
            .filter(|(_, r)| r.raw.abs() > floor)
            .map(|(p, r)| ((p.raw - r.raw) / r.raw).abs())
            .fold(0.0, f64::max)
    }
}

/// Incremental walk over `δ`, shared by the fixed-range and open-ended entry
/// points.
trait TailAccumulator {
    /// Adds the `E[B_w]` term for the next `w` and returns the raw bound at
    /// `δ = w + 1`.
    fn step(&mut self) -> BoundPoint;
}

struct ExactTail {
    bound: ExactBound,
    next_w: usize,
    raw: BigRational,
}

impl TailAccumulator for ExactTail {
    fn step(&mut self) -> BoundPoint {
        let term = self.bound.expected_bw_upper(self.next_w);
        self.raw -= term;
        self.next_w += 1;
        BoundPoint {
            delta: self.next_w as u64,
            raw: to_f64(&self.raw),
            exact: Some(self.raw.clone()),
        }
    }
}

fn origin(representation: Representation) -> BoundPoint {
    BoundPoint {
        delta: 0,
        raw: 1.0,
        exact: match representation {
            Representation::Exact => Some(BigRational::one()),
            Representation::LogDomain => None,
        },
    }
}

fn walk(
    params: &EnsembleParams,
    representation: Representation,
    acc: &mut dyn TailAccumulator,
    delta_max: Option<u64>,
) -> BoundCurve {
    let mut points = vec![origin(representation)];
    match delta_max {
        Some(d) => {
            for _ in 0..d {
                points.push(acc.step());
            }
        }
        None => {
            // first δ with raw ≤ 0, then out to twice that
            while points.last().expect("origin").raw > 0.0 {
                points.push(acc.step());
            }
            let end = 2 * points.len() as u64 - 2;
            while (points.len() as u64) <= end {
                points.push(acc.step());
            }
        }
    }
    BoundCurve {
        params: params.clone(),
        representation,
        points,
    }
}

fn exact_tail(params: &EnsembleParams) -> ExactTail {
    ExactTail {
        bound: ExactBound::new(params),
        next_w: 0,
        raw: BigRational::one(),
    }
}

/// `raw(δ) = 1 − Σ_{w<δ} E[B_w]` upper bound for `δ = 0..=delta_max`, exactly.
pub fn tail_lower_bound(params: &EnsembleParams, delta_max: u64) -> BoundCurve {
    walk(
        params,
        Representation::Exact,
        &mut exact_tail(params),
        Some(delta_max),
    )
}

/// Exact curve out to twice the first `δ` where the raw bound is `≤ 0`.
pub fn tail_lower_bound_auto(params: &EnsembleParams) -> BoundCurve {
    walk(params, Representation::Exact, &mut exact_tail(params), None)
}

fn ln_binomial(n: u64, r: u64) -> f64 {
    if r > n {
        return f64::NEG_INFINITY;
    }
    if r == 0 || r == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(r as f64 + 1.0) - ln_gamma((n - r) as f64 + 1.0)
}

fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Log-domain evaluator. All summed terms are non-negative, so the sum
/// `Σ_{w<δ} E[B_w]` is carried as a logarithm and subtracted from 1 once.
struct LogTail {
    params: EnsembleParams,
    /// `ln(Σ_u C(k,u) C(a,v) C(N−a,n−v) / (2 C(N,n)))` by `v`.
    ln_by_v: Vec<f64>,
    /// `ln [xʷ] f(x)ᵛ`, rows by `v`, grown column by column.
    ln_powers: Vec<Vec<f64>>,
    ln_pmf: Vec<f64>,
    next_w: usize,
    ln_sum: f64,
}

impl LogTail {
    fn new(params: &EnsembleParams) -> Self {
        let ln_pmf = params.pmf.to_f64().into_iter().map(f64::ln).collect();
        Self {
            params: params.clone(),
            ln_by_v: Vec::new(),
            ln_powers: vec![vec![0.0]],
            ln_pmf,
            next_w: 0,
            ln_sum: f64::NEG_INFINITY,
        }
    }

    fn ln_crossing_sum(&self, v: u64) -> f64 {
        let (k, n) = (self.params.k as u64, self.params.n as u64);
        let pairs = self.params.pair_count() as u64;
        let ln_denom = std::f64::consts::LN_2 + ln_binomial(pairs, n);
        if v > n {
            return f64::NEG_INFINITY;
        }
        (1..k)
            .map(|u| {
                let a = crossing_pairs(k, u);
                ln_binomial(k, u) + ln_binomial(a, v) + ln_binomial(pairs - a, n - v)
            })
            .fold(f64::NEG_INFINITY, ln_add)
            - ln_denom
    }

    /// `ln [xʷ] f(x)ᵛ`, filling column `w` of every row up to `v`.
    fn ln_power(&mut self, v: usize, w: usize) -> f64 {
        while self.ln_powers.len() <= v {
            self.ln_powers.push(Vec::new());
        }
        for row in 0..=v {
            while self.ln_powers[row].len() <= w {
                let col = self.ln_powers[row].len();
                let value = if row == 0 {
                    if col == 0 {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    self.ln_pmf
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i < col)
                        .map(|(i, &lp)| lp + self.ln_powers[row - 1][col - i - 1])
                        .fold(f64::NEG_INFINITY, ln_add)
                };
                self.ln_powers[row].push(value);
            }
        }
        self.ln_powers[v][w]
    }
}

impl TailAccumulator for LogTail {
    fn step(&mut self) -> BoundPoint {
        let w = self.next_w;
        let mut ln_term = f64::NEG_INFINITY;
        for v in 0..=v_limit(&self.params, w) {
            while self.ln_by_v.len() <= v {
                let next = self.ln_by_v.len() as u64;
                let value = self.ln_crossing_sum(next);
                self.ln_by_v.push(value);
            }
            let c = self.ln_power(v, w);
            ln_term = ln_add(ln_term, self.ln_by_v[v] + c);
        }
        self.ln_sum = ln_add(self.ln_sum, ln_term);
        self.next_w += 1;
        BoundPoint {
            delta: self.next_w as u64,
            raw: -self.ln_sum.exp_m1(),
            exact: None,
        }
    }
}

/// Same quantity as [`tail_lower_bound`] through log-gamma binomials.
pub fn tail_lower_bound_logdomain(params: &EnsembleParams, delta_max: u64) -> BoundCurve {
    walk(
        params,
        Representation::LogDomain,
        &mut LogTail::new(params),
        Some(delta_max),
    )
}

pub fn tail_lower_bound_logdomain_auto(params: &EnsembleParams) -> BoundCurve {
    walk(
        params,
        Representation::LogDomain,
        &mut LogTail::new(params),
        None,
    )
}
