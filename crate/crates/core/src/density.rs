//! Limit densities of free submodules: the multi-index series for fixed
//! length, its Andrews-Gordon bounds, the `s = 2` closed form, rank-density
//! trends, and an explorer for how type orders relate to submodule counts.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modcount::{
    enum_compositions, enum_types_of_length, ChainRingSpec, ModuleTypeCounts, SubmoduleCounter,
};
use crate::qseries::{
    euler_function, pochhammer_infinite, ApproxReal, ExactCount, ExactRatio, TruncationPolicy,
};

/// Summation vector `(k_2, …, k_s)` of the limit series with partial sums
/// `K_i = k_2 + ⋯ + k_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummationIndex {
    kvec: Vec<u64>,
}

impl SummationIndex {
    pub fn new(kvec: Vec<u64>) -> Self {
        SummationIndex { kvec }
    }

    pub fn entries(&self) -> &[u64] {
        &self.kvec
    }

    /// `(K_2, …, K_s)`.
    pub fn partial_sums(&self) -> Vec<u64> {
        self.kvec
            .iter()
            .scan(0u64, |acc, &k| {
                *acc += k;
                Some(*acc)
            })
            .collect()
    }

    /// `s | Σ_{i=2}^s (s-i+1) k_i`.
    pub fn weighted_divisible(&self, s: usize) -> bool {
        let s64 = s as u64;
        let total: u64 = self
            .kvec
            .iter()
            .enumerate()
            .map(|(j, &k)| (s64 - 1 - j as u64) * k)
            .sum();
        total.is_multiple_of(s64)
    }

    /// `s | K_2 + ⋯ + K_s`.
    pub fn partial_sum_divisible(&self, s: usize) -> bool {
        self.partial_sums().iter().sum::<u64>() % s as u64 == 0
    }

    /// The summation condition; both transcriptions are evaluated and
    /// required to agree.
    pub fn admissible(&self, s: usize) -> Result<bool> {
        let a = self.weighted_divisible(s);
        let b = self.partial_sum_divisible(s);
        if a != b {
            return Err(Error::IdentityViolation(format!(
                "divisibility conditions disagree for {:?}, s = {s}",
                self.kvec
            )));
        }
        Ok(a)
    }
}

fn ratio(n: i64, d: i64) -> ExactRatio {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `k C^{-1} k^T` with `C^{-1}_{ij} = min(i, j) - ij/s`, computed by the
/// matrix product and by `K_2² + ⋯ + K_s² - (K_2 + ⋯ + K_s)²/s`; both must
/// agree exactly.
pub fn cartan_quadratic_form(kvec: &[u64], s: usize) -> Result<ExactRatio> {
    if s < 2 {
        return Err(Error::invalid("the quadratic form needs s >= 2"));
    }
    if kvec.len() != s - 1 {
        return Err(Error::invalid(format!(
            "expected {} entries for s = {s}, got {}",
            s - 1,
            kvec.len()
        )));
    }
    let s_i = s as i64;
    let mut matrix_form = ExactRatio::zero();
    for (a, &ka) in kvec.iter().enumerate() {
        for (b, &kb) in kvec.iter().enumerate() {
            if ka == 0 || kb == 0 {
                continue;
            }
            let (i, j) = (a as i64 + 1, b as i64 + 1);
            let entry = ratio(i.min(j) * s_i - i * j, s_i);
            matrix_form += entry * ratio((ka * kb) as i64, 1);
        }
    }
    let closed = closed_quadratic_form(kvec, s);
    if matrix_form != closed {
        return Err(Error::IdentityViolation(format!(
            "quadratic form mismatch for {kvec:?}: matrix {matrix_form} vs closed {closed}"
        )));
    }
    Ok(closed)
}

fn closed_quadratic_form(kvec: &[u64], s: usize) -> ExactRatio {
    let sums = SummationIndex::new(kvec.to_vec()).partial_sums();
    let squares: u64 = sums.iter().map(|k| k * k).sum();
    let total: u64 = sums.iter().sum();
    ratio(squares as i64, 1) - ratio((total * total) as i64, s as i64)
}

/// Result of a certified multi-index series: the full sum and the sum
/// without the all-zero term (whose value is exactly 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub total: ApproxReal,
    pub excess: ApproxReal,
    /// Largest level `Σ k_i` summed explicitly.
    pub levels: u64,
}

impl SeriesValue {
    /// `1 / total`.
    pub fn reciprocal(&self) -> ApproxReal {
        self.total.recip()
    }

    /// `1 - 1/total = excess / total`, accurate when the reciprocal is near 1.
    pub fn reciprocal_complement(&self) -> ApproxReal {
        self.excess / self.total
    }
}

/// Bound on `Σ_{T > level} C(T+d-1, d-1) x^{c T²}` divided by `(x)_∞^d`,
/// i.e. on every term of a `d`-fold series whose exponent is at least
/// `c (k_1 + ⋯ + k_d)²` and whose denominators are `(x)_{k_i}` products.
fn level_tail_bound(x: f64, d: usize, c: f64, level: u64, euler_lower: f64) -> f64 {
    let ln_x = x.ln();
    let ln_count = |t: f64| -> f64 {
        // ln C(t + d - 1, d - 1)
        (1..d).map(|j| ((t + j as f64) / j as f64).ln()).sum()
    };
    let mut total = 0.0;
    let mut t = level as f64 + 1.0;
    loop {
        let ln_term = ln_count(t) + c * t * t * ln_x;
        let term = ln_term.exp();
        let ratio = ((t + d as f64) / (t + 1.0)) * (c * (2.0 * t + 1.0) * ln_x).exp();
        if ratio < 0.5 {
            total += term / (1.0 - ratio);
            break;
        }
        total += term;
        t += 1.0;
    }
    total / euler_lower.powi(d as i32) * (1.0 + 1e-12)
}

/// Sums `Σ_k x^{e(k)} / ∏ (x)_{k_i}` over `k ∈ N^d`, level by level in
/// `T = Σ k_i`, until the certified tail beyond the current level is below
/// `policy.target_tail` (or `policy.max_index` levels are done). `exponent`
/// returns `None` for excluded indices and must satisfy `e(k) >= c T²`.
fn certified_series(
    x: f64,
    d: usize,
    c: f64,
    policy: &TruncationPolicy,
    exponent: impl Fn(&[u64]) -> Result<Option<f64>>,
) -> Result<SeriesValue> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::invalid(format!(
            "series base must lie in (0, 1), got {x}"
        )));
    }
    let euler = euler_function(x, policy)?;
    let euler_lower = euler.lower();
    if euler_lower <= 0.0 {
        return Err(Error::NonConvergent(format!(
            "(x)_inf not certified positive at x = {x}"
        )));
    }
    let ln_x = x.ln();
    // ln (x)_k for k up to the level cap
    let mut ln_poch = vec![0.0f64];
    let mut excess = 0.0f64;
    let mut rounding = 0.0f64;
    let mut level = 0u64;
    loop {
        if level > 0 {
            while ln_poch.len() as u64 <= level {
                let k = ln_poch.len() as i32;
                let prev = *ln_poch.last().expect("nonempty");
                ln_poch.push(prev + (-x.powi(k)).ln_1p());
            }
            for comp in enum_compositions(d, level) {
                let counts = comp.counts();
                let Some(e) = exponent(counts)? else { continue };
                let denom: f64 = counts.iter().map(|&k| ln_poch[k as usize]).sum();
                let ln_term = e * ln_x - denom;
                let term = ln_term.exp();
                excess += term;
                rounding += term * (ln_term.abs() + 4.0 * level as f64 + 16.0) * f64::EPSILON;
            }
        }
        let tail = level_tail_bound(x, d, c, level, euler_lower);
        let resolved = tail < policy.target_tail && (level > 0 && tail < 1e-9 * excess);
        if resolved || level as usize >= policy.max_index {
            let err = tail + rounding + excess * 4.0 * f64::EPSILON;
            return Ok(SeriesValue {
                total: ApproxReal::new(1.0 + excess, err + f64::EPSILON),
                excess: ApproxReal::new(excess, err),
                levels: level,
            });
        }
        level += 1;
    }
}

/// The length-density series
/// `Σ_{k_2,…,k_s >= 0, s | K_2+⋯+K_s} x^{K_2²+⋯+K_s² - (K_2+⋯+K_s)²/s} / ((x)_{k_2}⋯(x)_{k_s})`
/// at `x = 1/q`.
pub fn length_density_series(
    ring: ChainRingSpec,
    policy: &TruncationPolicy,
) -> Result<SeriesValue> {
    let s = ring.s();
    if s < 2 {
        return Err(Error::invalid("the length-density series needs s >= 2"));
    }
    let x = 1.0 / ring.q() as f64;
    certified_series(x, s - 1, 1.0 / s as f64, policy, |kvec| {
        let index = SummationIndex::new(kvec.to_vec());
        if !index.admissible(s)? {
            return Ok(None);
        }
        let form = closed_quadratic_form(kvec, s);
        Ok(Some(form.to_f64().expect("small rational")))
    })
}

/// Density, as `n → ∞`, of free submodules among submodules of `R^n` of
/// length `ℓ = R n s`. Exactly 1 for `s = 1`.
pub fn limit_density_length(ring: ChainRingSpec, policy: &TruncationPolicy) -> Result<ApproxReal> {
    if ring.s() == 1 {
        return Ok(ApproxReal::exact(1.0));
    }
    Ok(length_density_series(ring, policy)?.reciprocal())
}

/// The Andrews-Gordon multi-sum
/// `Σ_{n_1,…,n_{s-1} >= 0} x^{N_1²+⋯+N_{s-1}²} / ((x)_{n_1}⋯(x)_{n_{s-1}})`,
/// `N_i = n_i + ⋯ + n_{s-1}`, with its excess over 1.
pub fn agi_series_value(qinv: f64, s: usize, policy: &TruncationPolicy) -> Result<SeriesValue> {
    if s < 2 {
        return Err(Error::invalid("the Andrews-Gordon series needs s >= 2"));
    }
    certified_series(qinv, s - 1, 1.0, policy, |nvec| {
        let mut tail_sum = 0u64;
        let mut exponent = 0u64;
        for &v in nvec.iter().rev() {
            tail_sum += v;
            exponent += tail_sum * tail_sum;
        }
        Ok(Some(exponent as f64))
    })
}

pub fn agi_series(qinv: f64, s: usize, policy: &TruncationPolicy) -> Result<ApproxReal> {
    Ok(agi_series_value(qinv, s, policy)?.total)
}

/// Product side of the Andrews-Gordon identity,
/// `(x^s; x^{2s+1})_∞ (x^{s+1}; x^{2s+1})_∞ (x^{2s+1}; x^{2s+1})_∞ / (x; x)_∞`.
pub fn agi_product(qinv: f64, s: usize, policy: &TruncationPolicy) -> Result<ApproxReal> {
    if s < 2 {
        return Err(Error::invalid("the Andrews-Gordon product needs s >= 2"));
    }
    let x = qinv;
    let step = x.powi(2 * s as i32 + 1);
    let a = pochhammer_infinite(x.powi(s as i32), step, policy)?;
    let b = pochhammer_infinite(x.powi(s as i32 + 1), step, policy)?;
    let c = pochhammer_infinite(step, step, policy)?;
    let euler = euler_function(x, policy)?;
    Ok(a * b * c / euler)
}

/// `1 / AGI(1/q, s)`, the universal lower bound on free-module densities.
pub fn agi_inverse_lower(q: u64, s: usize, policy: &TruncationPolicy) -> Result<ApproxReal> {
    Ok(agi_series_value(1.0 / q as f64, s, policy)?.reciprocal())
}

/// Lower bound, limit value and upper bound of the length density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityResult {
    pub value: ApproxReal,
    pub lower_bound: ApproxReal,
    pub upper_bound: ApproxReal,
    /// `1 - value`, `1 - lower_bound`, `1 - upper_bound` computed without
    /// cancellation.
    pub value_complement: ApproxReal,
    pub lower_complement: ApproxReal,
    pub upper_complement: ApproxReal,
    pub ring: ChainRingSpec,
}

impl DensityResult {
    /// `lower - err <= value <= upper + err`.
    pub fn is_ordered(&self) -> bool {
        self.lower_bound.lower() <= self.value.upper()
            && self.value.lower() <= self.upper_bound.upper()
    }
}

/// `AGI(1/q, s)^{-1} <= density <= AGI(1/q', s)^{-1}` with `q' = q^{s²-s}`.
pub fn density_bounds(ring: ChainRingSpec, policy: &TruncationPolicy) -> Result<DensityResult> {
    let s = ring.s();
    if s < 2 {
        return Err(Error::invalid("density bounds need s >= 2"));
    }
    let q = ring.q() as f64;
    let exact = length_density_series(ring, policy)?;
    let lower = agi_series_value(1.0 / q, s, policy)?;
    let upper = agi_series_value(q.powi(-((s * s - s) as i32)), s, policy)?;
    Ok(DensityResult {
        value: exact.reciprocal(),
        lower_bound: lower.reciprocal(),
        upper_bound: upper.reciprocal(),
        value_complement: exact.reciprocal_complement(),
        lower_complement: lower.reciprocal_complement(),
        upper_complement: upper.reciprocal_complement(),
        ring,
    })
}

/// `s = 2` density `2 / ((-√(1/q); 1/q)_∞ + (√(1/q); 1/q)_∞)`.
pub fn limit_density_s2_closed(q: u64, policy: &TruncationPolicy) -> Result<ApproxReal> {
    if q < 2 {
        return Err(Error::invalid("q must be at least 2"));
    }
    let x = 1.0 / q as f64;
    let root = x.sqrt();
    let plus = pochhammer_infinite(-root, x, policy)?;
    let minus = pochhammer_infinite(root, x, policy)?;
    Ok(ApproxReal::exact(2.0) / (plus + minus))
}

/// Residue field sizes and nilpotency indices of the fixed-length density table.
pub const TABLE1_Q: [u64; 5] = [2, 3, 5, 7, 11];
pub const TABLE1_S: [usize; 3] = [2, 3, 4];

/// All 15 `(s, q)` cells of the fixed-length density table, ordered by `s`
/// then `q`.
pub fn density_table(policy: &TruncationPolicy) -> Result<Vec<DensityResult>> {
    let mut rows = Vec::with_capacity(15);
    for s in TABLE1_S {
        for q in TABLE1_Q {
            rows.push(density_bounds(ChainRingSpec::new(q, s)?, policy)?);
        }
    }
    Ok(rows)
}

/// A `(q, s, K, n)` point of the fixed-rank probability table.
pub type RankGridPoint = (u64, usize, u64, u64);

/// The grid of the fixed-rank probability table.
pub const TABLE2_GRID: [RankGridPoint; 9] = [
    (2, 2, 50, 100),
    (2, 2, 40, 100),
    (2, 2, 60, 100),
    (2, 3, 50, 100),
    (2, 3, 40, 100),
    (2, 3, 60, 100),
    (3, 2, 50, 100),
    (3, 2, 40, 100),
    (3, 2, 60, 100),
];

/// Exact `φ(n, K, q, s)` for every row of [`TABLE2_GRID`].
pub fn rank_table() -> Result<Vec<(RankGridPoint, ExactRatio)>> {
    TABLE2_GRID
        .iter()
        .map(|&(q, s, k, n)| {
            let counter = SubmoduleCounter::new(n, ChainRingSpec::new(q, s)?);
            Ok(((q, s, k, n), counter.phi_free_given_rank(k)?))
        })
        .collect()
}

/// `φ(n, R' n)` for each `n`; every `R' n` must be an integer.
pub fn rank_density_trend(
    ring: ChainRingSpec,
    rprime: &ExactRatio,
    ns: &[u64],
) -> Result<Vec<ExactRatio>> {
    if !(rprime > &ExactRatio::zero() && rprime < &ExactRatio::one()) {
        return Err(Error::invalid(format!("R' = {rprime} must lie in (0, 1)")));
    }
    ns.iter()
        .map(|&n| {
            let k = rprime * BigRational::from_integer(BigInt::from(n));
            if !k.is_integer() {
                return Err(Error::invalid(format!(
                    "R' n = {k} is not an integer for n = {n}"
                )));
            }
            let k = k.to_integer().to_u64().expect("nonnegative rank");
            SubmoduleCounter::new(n, ring).phi_free_given_rank(k)
        })
        .collect()
}

/// Every type of length `ℓ` in `R^n` with its exact count, sorted by
/// descending count and then ascending lexicographic type.
pub fn order_explore(
    n: u64,
    ring: ChainRingSpec,
    ell: u64,
) -> Result<Vec<(ModuleTypeCounts, ExactCount)>> {
    let counter = SubmoduleCounter::new(n, ring);
    let mut rows = enum_types_of_length(ring.s(), n, ell)
        .map(|t| {
            let c = counter.count_by_type(&t)?;
            Ok((t, c))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(rows)
}

/// Candidate orders on `L(s, n, ℓ)` that one might hope induce the count order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeOrder {
    /// `a > b` iff `a` is lexicographically larger.
    Lexicographic,
    /// `a > b` iff `a` has smaller rank.
    Rank,
    /// `a > b` iff `Σ_i (k_1+⋯+k_i)²` is smaller for `a`.
    ShapeEnergy,
}

impl TypeOrder {
    pub fn compare(&self, a: &ModuleTypeCounts, b: &ModuleTypeCounts) -> Ordering {
        match self {
            TypeOrder::Lexicographic => a.cmp(b),
            TypeOrder::Rank => b.rank().cmp(&a.rank()),
            TypeOrder::ShapeEnergy => b.shape_energy().cmp(&a.shape_energy()),
        }
    }
}

/// A pair `(greater, lesser)` with `greater >_order lesser` although
/// `N(greater) < N(lesser)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderViolation {
    pub greater: ModuleTypeCounts,
    pub greater_count: BigUint,
    pub lesser: ModuleTypeCounts,
    pub lesser_count: BigUint,
}

/// All pairs of a census on which `order` disagrees with the count order.
pub fn order_violations(
    census: &[(ModuleTypeCounts, ExactCount)],
    order: TypeOrder,
) -> Vec<OrderViolation> {
    let mut out = Vec::new();
    for (a, ca) in census {
        for (b, cb) in census {
            if order.compare(a, b) == Ordering::Greater && ca < cb {
                out.push(OrderViolation {
                    greater: a.clone(),
                    greater_count: ca.clone(),
                    lesser: b.clone(),
                    lesser_count: cb.clone(),
                });
            }
        }
    }
    out.sort_by(|x, y| (&x.greater, &x.lesser).cmp(&(&y.greater, &y.lesser)));
    out
}
