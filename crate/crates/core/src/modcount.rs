//! Exact counts of submodules of `R^n` over a finite chain ring with residue
//! field of size `q` and nilpotency index `s`, by shape, type, length and
//! rank, together with the finite-n free-module probabilities.
//!
//! A type `(s^{k_1} (s-1)^{k_2} ⋯ 1^{k_s})` is stored by its frequency vector
//! `(k_1, …, k_s)`; its conjugate partition is the shape `μ` with
//! `μ_i = k_1 + ⋯ + k_{s-i+1}`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qseries::{euler_partial, ExactCount, ExactRatio, GaussianTable};

/// Residue field size `q` (a prime power) and nilpotency index `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ChainRingSpec {
    q: u64,
    s: usize,
}

/// Splits `q` as `p^e` when it is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= q {
        if q.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if !q.is_multiple_of(p) || p.saturating_mul(p) > q {
        // no factor up to sqrt(q): q is prime
        return Some((q, 1));
    }
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

impl ChainRingSpec {
    pub fn new(q: u64, s: usize) -> Result<Self> {
        if prime_power(q).is_none() {
            return Err(Error::invalid(format!("q = {q} is not a prime power")));
        }
        if s == 0 {
            return Err(Error::invalid("nilpotency index s must be at least 1"));
        }
        Ok(ChainRingSpec { q, s })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// `|R| = q^s`.
    pub fn size(&self) -> BigUint {
        Pow::pow(&BigUint::from(self.q), self.s as u64)
    }
}

impl fmt::Display for ChainRingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(q={}, s={})", self.q, self.s)
    }
}

/// Frequencies `(k_1, …, k_s)` of the parts `s, s-1, …, 1` of a module type.
///
/// Ordering is lexicographic on the frequency vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ModuleTypeCounts {
    counts: Vec<u64>,
}

impl ModuleTypeCounts {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::invalid(
                "a type needs at least one frequency (s >= 1)",
            ));
        }
        Ok(ModuleTypeCounts { counts })
    }

    /// The free type `(K, 0, …, 0)`.
    pub fn free(rank: u64, s: usize) -> Self {
        let mut counts = vec![0; s.max(1)];
        counts[0] = rank;
        ModuleTypeCounts { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn s(&self) -> usize {
        self.counts.len()
    }

    /// Number of cyclic summands (minimal number of generators).
    pub fn rank(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `log_q |M| = Σ k_i (s - i + 1)`.
    pub fn length(&self) -> u64 {
        let s = self.s() as u64;
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &k)| k * (s - i as u64))
            .sum()
    }

    pub fn is_free(&self) -> bool {
        self.counts[1..].iter().all(|&k| k == 0)
    }

    /// Partial sums `P_i = k_1 + ⋯ + k_i`, for `i = 0..=s`.
    fn prefix_sums(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.counts.len() + 1);
        out.push(0);
        let mut acc = 0;
        for &k in &self.counts {
            acc += k;
            out.push(acc);
        }
        out
    }

    /// `Σ_i (k_1 + ⋯ + k_i)²`, the quantity behind the shape order.
    pub fn shape_energy(&self) -> u64 {
        self.prefix_sums()[1..].iter().map(|p| p * p).sum()
    }

    /// Parses `"3,3,0"`.
    pub fn parse(text: &str) -> Result<Self> {
        let counts = text
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::invalid(format!("bad type entry {part:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ModuleTypeCounts::new(counts)
    }
}

impl fmt::Display for ModuleTypeCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Weakly decreasing `(μ_1, …, μ_s)`, the conjugate of a type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Shape {
    mu: Vec<u64>,
}

impl Shape {
    pub fn new(mu: Vec<u64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::invalid("a shape needs at least one entry (s >= 1)"));
        }
        if mu.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid(format!(
                "shape {mu:?} is not weakly decreasing"
            )));
        }
        Ok(Shape { mu })
    }

    pub fn parts(&self) -> &[u64] {
        &self.mu
    }

    pub fn length(&self) -> u64 {
        self.mu.iter().sum()
    }
}

/// `μ_i = Σ_{j=1}^{s-i+1} k_j`.
pub fn shape_from_type(t: &ModuleTypeCounts) -> Shape {
    let prefix = t.prefix_sums();
    let s = t.s();
    Shape {
        mu: (1..=s).map(|i| prefix[s - i + 1]).collect(),
    }
}

/// `k_j = μ_{s-j+1} - μ_{s-j+2}` with `μ_{s+1} = 0`.
pub fn type_from_shape(m: &Shape) -> ModuleTypeCounts {
    let s = m.mu.len();
    let at = |i: usize| if i > s { 0 } else { m.mu[i - 1] };
    ModuleTypeCounts {
        counts: (1..=s).map(|j| at(s - j + 1) - at(s - j + 2)).collect(),
    }
}

/// Lexicographically ascending stream of frequency vectors `k` with
/// `Σ w_i k_i = target` and `Σ k_i <= cap`, where the last weight is 1.
#[derive(Debug, Clone)]
pub struct TypeStream {
    weights: Vec<u64>,
    target: u64,
    cap: u64,
    current: Vec<u64>,
    state: StreamState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StreamState {
    Fresh,
    Running,
    Done,
}

impl TypeStream {
    fn new(weights: Vec<u64>, target: u64, cap: u64) -> Self {
        debug_assert!(weights.last().is_none_or(|&w| w == 1));
        let mut current = vec![0; weights.len()];
        if let Some(last) = current.last_mut() {
            *last = target;
        }
        let state = if weights.is_empty() {
            StreamState::Done
        } else {
            StreamState::Fresh
        };
        TypeStream {
            weights,
            target,
            cap,
            current,
            state,
        }
    }

    fn empty() -> Self {
        TypeStream::new(Vec::new(), 0, 0)
    }

    /// Moves to the lexicographic successor ignoring the cap.
    fn advance(&mut self) -> bool {
        let last = self.current.len() - 1;
        let mut prefix: Vec<u64> = Vec::with_capacity(last);
        let mut acc = 0;
        for i in 0..last {
            prefix.push(acc);
            acc += self.weights[i] * self.current[i];
        }
        for i in (0..last).rev() {
            let used = prefix[i] + self.weights[i] * (self.current[i] + 1);
            if used <= self.target {
                self.current[i] += 1;
                for v in &mut self.current[i + 1..last] {
                    *v = 0;
                }
                self.current[last] = self.target - used;
                return true;
            }
        }
        false
    }
}

impl Iterator for TypeStream {
    type Item = ModuleTypeCounts;

    fn next(&mut self) -> Option<ModuleTypeCounts> {
        loop {
            match self.state {
                StreamState::Done => return None,
                StreamState::Fresh => self.state = StreamState::Running,
                StreamState::Running => {
                    if !self.advance() {
                        self.state = StreamState::Done;
                        return None;
                    }
                }
            }
            if self.current.iter().sum::<u64>() <= self.cap {
                return Some(ModuleTypeCounts {
                    counts: self.current.clone(),
                });
            }
        }
    }
}

/// The set `L(s, n, ℓ)` of types of length `ℓ` and rank at most `n`, in
/// ascending lexicographic order on `(k_1, …, k_s)`.
pub fn enum_types_of_length(s: usize, n: u64, ell: u64) -> TypeStream {
    if s == 0 || ell > n * s as u64 {
        return TypeStream::empty();
    }
    let weights = (0..s).map(|i| (s - i) as u64).collect();
    TypeStream::new(weights, ell, n)
}

/// The weak compositions `C(s, K)` of `K` into `s` parts, in ascending
/// lexicographic order.
pub fn enum_compositions(s: usize, rank: u64) -> TypeStream {
    if s == 0 {
        return TypeStream::empty();
    }
    TypeStream::new(vec![1; s], rank, rank)
}

/// Counting context for submodules of `R^n`; memoises Gaussian binomials
/// so that sums over many types stay cheap.
#[derive(Debug, Clone)]
pub struct SubmoduleCounter {
    ring: ChainRingSpec,
    n: u64,
    gauss: GaussianTable,
    q: BigUint,
}

impl SubmoduleCounter {
    pub fn new(n: u64, ring: ChainRingSpec) -> Self {
        SubmoduleCounter {
            ring,
            n,
            gauss: GaussianTable::new(ring.q, n),
            q: BigUint::from(ring.q),
        }
    }

    pub fn ring(&self) -> ChainRingSpec {
        self.ring
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    fn check_type(&self, t: &ModuleTypeCounts) -> Result<()> {
        if t.s() != self.ring.s {
            return Err(Error::invalid(format!(
                "type {t} has {} entries but s = {}",
                t.s(),
                self.ring.s
            )));
        }
        if t.rank() > self.n {
            return Err(Error::invalid(format!(
                "type {t} has rank {} > n = {}",
                t.rank(),
                self.n
            )));
        }
        Ok(())
    }

    /// `N_{n,q}(k_1, …, k_s)`.
    pub fn count_by_type(&self, t: &ModuleTypeCounts) -> Result<ExactCount> {
        self.check_type(t)?;
        let p = t.prefix_sums();
        let n = self.n;
        let mut exponent = 0u64;
        let mut product = BigUint::one();
        for i in 1..=t.s() {
            exponent += (n - p[i]) * p[i - 1];
            product *= self.gauss.get(n - p[i - 1], t.counts[i - 1] as i64);
        }
        Ok(Pow::pow(&self.q, exponent) * product)
    }

    /// `N_{n,q}(μ) = ∏_i q^{(n-μ_i) μ_{i+1}} [n-μ_{i+1}, μ_i-μ_{i+1}]_q`.
    pub fn count_by_shape(&self, m: &Shape) -> Result<ExactCount> {
        if m.mu.len() != self.ring.s {
            return Err(Error::invalid(format!(
                "shape has {} entries but s = {}",
                m.mu.len(),
                self.ring.s
            )));
        }
        if m.mu[0] > self.n {
            return Err(Error::invalid(format!(
                "shape μ_1 = {} > n = {}",
                m.mu[0], self.n
            )));
        }
        let n = self.n;
        let at = |i: usize| m.mu.get(i).copied().unwrap_or(0);
        let mut exponent = 0u64;
        let mut product = BigUint::one();
        for i in 0..m.mu.len() {
            let (cur, next) = (at(i), at(i + 1));
            exponent += (n - cur) * next;
            product *= self.gauss.get(n - next, (cur - next) as i64);
        }
        Ok(Pow::pow(&self.q, exponent) * product)
    }

    /// `q^{(n-K)K(s-1)} [n, K]_q`.
    pub fn count_free(&self, rank: u64) -> Result<ExactCount> {
        if rank > self.n {
            return Err(Error::invalid(format!("rank {rank} > n = {}", self.n)));
        }
        let exponent = (self.n - rank) * rank * (self.ring.s as u64 - 1);
        Ok(Pow::pow(&self.q, exponent) * self.gauss.get(self.n, rank as i64))
    }

    /// `M(n, ℓ, q, s)`: all submodules of length `ℓ`.
    pub fn total_by_length(&self, ell: u64) -> Result<ExactCount> {
        let max = self.n * self.ring.s as u64;
        if ell > max {
            return Err(Error::invalid(format!("length {ell} outside 0..={max}")));
        }
        enum_types_of_length(self.ring.s, self.n, ell)
            .map(|t| self.count_by_type(&t))
            .sum()
    }

    /// `W(n, K, q, s)`: all submodules of rank `K`.
    pub fn total_by_rank(&self, rank: u64) -> Result<ExactCount> {
        if rank > self.n {
            return Err(Error::invalid(format!("rank {rank} > n = {}", self.n)));
        }
        enum_compositions(self.ring.s, rank)
            .map(|t| self.count_by_type(&t))
            .sum()
    }

    /// Probability `ψ` that a uniformly random submodule of length `ℓ` is free.
    pub fn psi_free_given_length(&self, ell: u64) -> Result<ExactRatio> {
        let s = self.ring.s as u64;
        if !ell.is_multiple_of(s) {
            return Err(Error::invalid(format!(
                "s = {s} does not divide length {ell}"
            )));
        }
        let free = self.count_free(ell / s)?;
        let total = self.total_by_length(ell)?;
        Ok(BigRational::new(BigInt::from(free), BigInt::from(total)))
    }

    /// Probability `φ` that a uniformly random submodule of rank `K` is free.
    pub fn phi_free_given_rank(&self, rank: u64) -> Result<ExactRatio> {
        let free = self.count_free(rank)?;
        let total = self.total_by_rank(rank)?;
        Ok(BigRational::new(BigInt::from(free), BigInt::from(total)))
    }
}

pub fn count_by_shape(n: u64, ring: ChainRingSpec, m: &Shape) -> Result<ExactCount> {
    SubmoduleCounter::new(n, ring).count_by_shape(m)
}

pub fn count_by_type(n: u64, ring: ChainRingSpec, t: &ModuleTypeCounts) -> Result<ExactCount> {
    SubmoduleCounter::new(n, ring).count_by_type(t)
}

pub fn count_free(n: u64, ring: ChainRingSpec, rank: u64) -> Result<ExactCount> {
    SubmoduleCounter::new(n, ring).count_free(rank)
}

pub fn total_by_length(n: u64, ring: ChainRingSpec, ell: u64) -> Result<ExactCount> {
    SubmoduleCounter::new(n, ring).total_by_length(ell)
}

pub fn total_by_rank(n: u64, ring: ChainRingSpec, rank: u64) -> Result<ExactCount> {
    SubmoduleCounter::new(n, ring).total_by_rank(rank)
}

pub fn psi_free_given_length(n: u64, ring: ChainRingSpec, ell: u64) -> Result<ExactRatio> {
    SubmoduleCounter::new(n, ring).psi_free_given_length(ell)
}

pub fn phi_free_given_rank(n: u64, ring: ChainRingSpec, rank: u64) -> Result<ExactRatio> {
    SubmoduleCounter::new(n, ring).phi_free_given_rank(rank)
}

/// Number of `m × n` matrices over `R` whose row module has type `t`.
///
/// The factor written `q^{mks}` is `q^{mℓ}` with `ℓ` the length of `t`
/// (`k = ℓ/s` is the R-dimension, not the rank): a module `M` of type `t`
/// is the row span of exactly `|Hom(R^m, M)| · P(surjective)` matrices,
/// i.e. `q^{mℓ} (1/q)_m / (1/q)_{m-K}`. This reading is pinned by the
/// exhaustive census tests; the rank reading fails already at `1 × 2` over
/// `Z/4`. Computed here as `q^{m(ℓ-K)} ∏_{i<K} (q^m - q^i) · N_{n,q}(t)`.
pub fn matrix_count_by_type(
    m: u64,
    n: u64,
    ring: ChainRingSpec,
    t: &ModuleTypeCounts,
) -> Result<ExactCount> {
    let rank = t.rank();
    if rank > m.min(n) {
        return Err(Error::invalid(format!(
            "type {t} has rank {rank} > min(m, n) = {}",
            m.min(n)
        )));
    }
    let modules = count_by_type(n, ring, t)?;
    let q = BigUint::from(ring.q);
    let qm: BigUint = Pow::pow(&q, m);
    let mut surjections: BigUint = Pow::pow(&q, m * (t.length() - rank));
    for i in 0..rank {
        surjections *= &qm - Pow::pow(&q, i);
    }
    Ok(surjections * modules)
}

/// Probability that a uniform `k × n` matrix is rectangular unimodular,
/// `(1/q)_n / (1/q)_{n-k}`; independent of `s`.
pub fn rect_unimodular_probability(k: u64, n: u64, ring: ChainRingSpec) -> Result<ExactRatio> {
    if k > n {
        return Err(Error::invalid(format!("k = {k} > n = {n}")));
    }
    Ok(euler_partial(ring.q, n) / euler_partial(ring.q, n - k))
}

/// Every type admissible for an `m × n` matrix (rank at most `min(m, n)`),
/// ordered lexicographically.
pub fn matrix_types(m: u64, n: u64, s: usize) -> Vec<ModuleTypeCounts> {
    let cap = m.min(n);
    (0..=cap)
        .flat_map(|rank| enum_compositions(s, rank))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Total number of submodules of `R^n`.
pub fn total_submodules(n: u64, ring: ChainRingSpec) -> Result<ExactCount> {
    let counter = SubmoduleCounter::new(n, ring);
    (0..=n).try_fold(
        BigUint::zero(),
        |acc, k| Ok(acc + counter.total_by_rank(k)?),
    )
}
