//! Concrete arithmetic over `Z/p^s`: matrix types by diagonal reduction,
//! row spans, the exhaustive submodule census, seeded matrix sampling and
//! Monte Carlo ensembles.
//!
//! Random streams use ChaCha8: stream `t` of seed `seed` is
//! `ChaCha8Rng::seed_from_u64(seed)` with `set_stream(t)`. Monte Carlo trial
//! `t` always uses stream `t`, so results do not depend on the thread count.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modcount::{enum_types_of_length, ChainRingSpec, ModuleTypeCounts, SubmoduleCounter};
use crate::qseries::ExactCount;

/// Default cap on `(p^s)^n`, the size of the ambient module, for [`row_span`].
pub const SPAN_BUDGET: u128 = 1 << 20;
/// Cap on `(p^s)^{n²}`, the number of generator matrices, for [`enumerate_submodules`].
pub const ENUMERATION_BUDGET: u128 = 1 << 24;

fn is_prime(p: u64) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// The ring `Z/p^s` with `p` prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ConcreteRing {
    p: u64,
    s: usize,
    modulus: u64,
}

impl ConcreteRing {
    pub fn new(p: u64, s: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        if s == 0 {
            return Err(Error::invalid("nilpotency index s must be at least 1"));
        }
        let modulus = u32::try_from(s)
            .ok()
            .and_then(|e| p.checked_pow(e))
            .filter(|&m| m <= u32::MAX as u64)
            .ok_or_else(|| {
                Error::invalid(format!("{p}^{s} is too large for concrete arithmetic"))
            })?;
        Ok(ConcreteRing { p, s, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn spec(&self) -> ChainRingSpec {
        ChainRingSpec::new(self.p, self.s).expect("prime residue field")
    }

    /// Largest `v <= s` with `p^v | x`; `valuation(0) = s`.
    pub fn valuation(&self, x: u64) -> usize {
        let mut x = x % self.modulus;
        if x == 0 {
            return self.s;
        }
        let mut v = 0;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        v
    }

    /// Inverse of a unit.
    pub fn unit_inverse(&self, u: u64) -> Option<u64> {
        let m = self.modulus as i64;
        let eg = (u as i64 % m).extended_gcd(&m);
        (eg.gcd == 1).then(|| eg.x.rem_euclid(m) as u64)
    }
}

impl fmt::Display for ConcreteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}", self.modulus)
    }
}

/// Valuation of a ring element; see [`ConcreteRing::valuation`].
pub fn valuation(x: u64, ring: &ConcreteRing) -> usize {
    ring.valuation(x)
}

/// A row-major `m × n` matrix over `Z/p^s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingMatrix {
    ring: ConcreteRing,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl RingMatrix {
    pub fn new(ring: ConcreteRing, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|&&x| x >= ring.modulus) {
            return Err(Error::invalid(format!(
                "entry {bad} is not reduced mod {}",
                ring.modulus
            )));
        }
        Ok(RingMatrix {
            ring,
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from nested rows, reducing every entry.
    pub fn from_rows(ring: ConcreteRing, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged rows"));
        }
        let m = ring.modulus as i64;
        let entries = rows
            .iter()
            .flatten()
            .map(|&x| x.rem_euclid(m) as u64)
            .collect();
        RingMatrix::new(ring, rows.len(), cols, entries)
    }

    pub fn zero(ring: ConcreteRing, rows: usize, cols: usize) -> Self {
        RingMatrix {
            ring,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(ring: ConcreteRing, n: usize) -> Self {
        let mut m = RingMatrix::zero(ring, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1 % ring.modulus;
        }
        m
    }

    pub fn ring(&self) -> &ConcreteRing {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn mul(&self, other: &RingMatrix) -> Result<RingMatrix> {
        if self.cols != other.rows || self.ring != other.ring {
            return Err(Error::invalid("incompatible matrix product"));
        }
        let m = self.ring.modulus as u128;
        let mut out = RingMatrix::zero(self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let acc: u128 = (0..self.cols)
                    .map(|k| self.get(i, k) as u128 * other.get(k, j) as u128 % m)
                    .sum();
                out.entries[i * other.cols + j] = (acc % m) as u64;
            }
        }
        Ok(out)
    }

    /// The matrix with rows permuted: row `i` of the result is row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> RingMatrix {
        let entries = perm
            .iter()
            .flat_map(|&r| self.row(r).iter().copied())
            .collect();
        RingMatrix {
            entries,
            ..self.clone()
        }
    }
}

impl fmt::Display for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(u64::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Type of the row module of `m`, by diagonal reduction: the entry of least
/// valuation `v` becomes the pivot, its row and column are cleared, and a
/// pivot of valuation `v < s` contributes one cyclic summand of length `s - v`.
pub fn matrix_type(m: &RingMatrix) -> ModuleTypeCounts {
    let ring = m.ring;
    let modulus = ring.modulus as u128;
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<u64> = m.entries.clone();
    let mut counts = vec![0u64; ring.s];
    let p_pow: Vec<u64> = (0..=ring.s).map(|v| ring.p.pow(v as u32)).collect();
    for r in 0..rows.min(cols) {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in r..rows {
            for j in r..cols {
                let v = ring.valuation(a[i * cols + j]);
                if v < ring.s && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        counts[v] += 1;
        if pi != r {
            for j in 0..cols {
                a.swap(pi * cols + j, r * cols + j);
            }
        }
        if pj != r {
            for i in 0..rows {
                a.swap(i * cols + pj, i * cols + r);
            }
        }
        let unit = a[r * cols + r] / p_pow[v];
        let inv = ring
            .unit_inverse(unit)
            .expect("pivot divided by its valuation is a unit") as u128;
        for i in r + 1..rows {
            let x = a[i * cols + r];
            if x == 0 {
                continue;
            }
            let factor = (x / p_pow[v]) as u128 * inv % modulus;
            for j in r..cols {
                let sub = factor * a[r * cols + j] as u128 % modulus;
                a[i * cols + j] = ((a[i * cols + j] as u128 + modulus - sub) % modulus) as u64;
            }
        }
        for j in r + 1..cols {
            let x = a[r * cols + j];
            if x == 0 {
                continue;
            }
            let factor = (x / p_pow[v]) as u128 * inv % modulus;
            for i in r..rows {
                let sub = factor * a[i * cols + r] as u128 % modulus;
                a[i * cols + j] = ((a[i * cols + j] as u128 + modulus - sub) % modulus) as u64;
            }
        }
    }
    ModuleTypeCounts::new(counts).expect("s >= 1")
}

/// True iff `m` has type `(m, 0, …, 0)`.
pub fn is_rect_unimodular(m: &RingMatrix) -> Result<bool> {
    if m.rows > m.cols {
        return Err(Error::invalid(format!(
            "rectangular unimodularity needs rows <= cols, got {}x{}",
            m.rows, m.cols
        )));
    }
    Ok(matrix_type(m) == ModuleTypeCounts::free(m.rows as u64, m.ring.s))
}

fn ambient_size(ring: &ConcreteRing, n: usize) -> Option<u128> {
    (ring.modulus as u128).checked_pow(n as u32)
}

fn encode(v: &[u64], modulus: u64) -> u64 {
    v.iter().fold(0, |acc, &x| acc * modulus + x)
}

fn decode(mut code: u64, n: usize, modulus: u64) -> Vec<u64> {
    let mut v = vec![0; n];
    for slot in v.iter_mut().rev() {
        *slot = code % modulus;
        code /= modulus;
    }
    v
}

/// Adds two encoded vectors componentwise.
fn add_codes(a: u64, b: u64, n: usize, modulus: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    let mut out = 0u64;
    let mut place = 1u64;
    for _ in 0..n {
        let digit = (a % modulus + b % modulus) % modulus;
        out += digit * place;
        place = place.wrapping_mul(modulus);
        a /= modulus;
        b /= modulus;
    }
    out
}

/// Sorted codes of the additive closure of the rows; membership is tracked
/// in a bitmap over the whole ambient module.
fn span_codes(m: &RingMatrix, seen: &mut [bool]) -> Vec<u64> {
    let (n, modulus) = (m.cols, m.ring.modulus);
    let mut elements = vec![0u64];
    seen[0] = true;
    for i in 0..m.rows {
        let g = encode(m.row(i), modulus);
        if seen[g as usize] {
            continue;
        }
        let base = elements.clone();
        let mut shift = g;
        while !seen[shift as usize] {
            for &h in &base {
                let x = add_codes(h, shift, n, modulus);
                seen[x as usize] = true;
                elements.push(x);
            }
            shift = add_codes(shift, g, n, modulus);
        }
    }
    for &x in &elements {
        seen[x as usize] = false;
    }
    elements.sort_unstable();
    elements
}

/// The set `{x m : x ∈ R^rows}` in lexicographic order.
pub fn row_span(m: &RingMatrix) -> Result<Vec<Vec<u64>>> {
    row_span_with_budget(m, SPAN_BUDGET)
}

pub fn row_span_with_budget(m: &RingMatrix, budget: u128) -> Result<Vec<Vec<u64>>> {
    let size = ambient_size(&m.ring, m.cols).filter(|&sz| sz <= budget);
    let Some(size) = size else {
        return Err(Error::BudgetExceeded {
            needed: ambient_size(&m.ring, m.cols).unwrap_or(u128::MAX),
            budget,
        });
    };
    let mut seen = vec![false; size as usize];
    Ok(span_codes(m, &mut seen)
        .into_iter()
        .map(|c| decode(c, m.cols, m.ring.modulus))
        .collect())
}

/// Counts of types, keyed in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeCensus {
    s: usize,
    counts: BTreeMap<ModuleTypeCounts, ExactCount>,
    total: ExactCount,
}

impl TypeCensus {
    pub fn new(s: usize) -> Self {
        TypeCensus {
            s,
            counts: BTreeMap::new(),
            total: BigUint::zero(),
        }
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn add(&mut self, t: ModuleTypeCounts, count: impl Into<BigUint>) {
        let count = count.into();
        self.total += &count;
        *self.counts.entry(t).or_insert_with(BigUint::zero) += count;
    }

    pub fn merge(mut self, other: TypeCensus) -> TypeCensus {
        for (t, c) in other.counts {
            self.add(t, c);
        }
        self
    }

    pub fn get(&self, t: &ModuleTypeCounts) -> ExactCount {
        self.counts.get(t).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> &ExactCount {
        &self.total
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModuleTypeCounts, &ExactCount)> {
        self.counts.iter()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Observed fraction of `t`.
    pub fn frequency(&self, t: &ModuleTypeCounts) -> f64 {
        if self.total.is_zero() {
            return 0.0;
        }
        crate::qseries::ratio_to_f64(&num_rational::BigRational::new(
            self.get(t).into(),
            self.total.clone().into(),
        ))
    }

    /// One row per type present in either census, in lexicographic order.
    pub fn compare(&self, expected: &TypeCensus) -> Vec<CensusRow> {
        let mut keys: Vec<&ModuleTypeCounts> =
            self.counts.keys().chain(expected.counts.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|t| {
                let (count, exact) = (self.get(t), expected.get(t));
                CensusRow {
                    matches: count == exact,
                    module_type: t.clone(),
                    count,
                    exact_formula: exact,
                }
            })
            .collect()
    }

    /// CSV with columns `k_1..k_s,count,exact_formula,match`.
    pub fn to_csv(&self, expected: &TypeCensus) -> String {
        let mut out = String::new();
        let header: Vec<String> = (1..=self.s).map(|i| format!("k_{i}")).collect();
        out.push_str(&header.join(","));
        out.push_str(",count,exact_formula,match\n");
        for row in self.compare(expected) {
            for k in row.module_type.counts() {
                out.push_str(&format!("{k},"));
            }
            out.push_str(&format!(
                "{},{},{}\n",
                row.count, row.exact_formula, row.matches
            ));
        }
        out
    }
}

/// A census entry next to its closed-form value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub module_type: ModuleTypeCounts,
    pub count: ExactCount,
    pub exact_formula: ExactCount,
    pub matches: bool,
}

/// Every submodule of `R^n`, found as the row span of some `n × n` matrix,
/// deduplicated and classified by type.
pub fn enumerate_submodules(ring: ConcreteRing, n: usize) -> Result<TypeCensus> {
    let needed = (ring.modulus as u128)
        .checked_pow((n * n) as u32)
        .unwrap_or(u128::MAX);
    if needed > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            budget: ENUMERATION_BUDGET,
        });
    }
    let size = ambient_size(&ring, n).expect("within enumeration budget") as usize;
    let mut seen = vec![false; size];
    let mut spans: HashSet<Vec<u64>> = HashSet::new();
    let mut census = TypeCensus::new(ring.s);
    let cells = n * n;
    let mut entries = vec![0u64; cells];
    for _ in 0..needed {
        let m = RingMatrix {
            ring,
            rows: n,
            cols: n,
            entries: entries.clone(),
        };
        let span = span_codes(&m, &mut seen);
        if !spans.contains(&span) {
            spans.insert(span);
            census.add(matrix_type(&m), 1u32);
        }
        for e in entries.iter_mut().rev() {
            *e += 1;
            if *e < ring.modulus {
                break;
            }
            *e = 0;
        }
    }
    Ok(census)
}

/// Closed-form census of all submodules of `R^n`.
pub fn formula_census(ring: ChainRingSpec, n: u64) -> Result<TypeCensus> {
    let counter = SubmoduleCounter::new(n, ring);
    let mut census = TypeCensus::new(ring.s());
    for ell in 0..=n * ring.s() as u64 {
        for t in enum_types_of_length(ring.s(), n, ell) {
            let c = counter.count_by_type(&t)?;
            census.add(t, c);
        }
    }
    Ok(census)
}

/// Closed-form census of all `m × n` matrices by type.
pub fn formula_matrix_census(ring: ChainRingSpec, m: u64, n: u64) -> Result<TypeCensus> {
    let mut census = TypeCensus::new(ring.s());
    for t in crate::modcount::matrix_types(m, n, ring.s()) {
        let c = crate::modcount::matrix_count_by_type(m, n, ring, &t)?;
        if !c.is_zero() {
            census.add(t, c);
        }
    }
    Ok(census)
}

/// Random stream `stream` of seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A matrix with i.i.d. uniform entries drawn from `rng`.
pub fn sample_matrix_with(
    m: usize,
    n: usize,
    ring: ConcreteRing,
    rng: &mut impl Rng,
) -> RingMatrix {
    let entries = (0..m * n).map(|_| rng.gen_range(0..ring.modulus)).collect();
    RingMatrix {
        ring,
        rows: m,
        cols: n,
        entries,
    }
}

/// A uniform matrix from stream `stream` of seed `seed`.
pub fn sample_matrix(m: usize, n: usize, ring: ConcreteRing, seed: u64, stream: u64) -> RingMatrix {
    sample_matrix_with(m, n, ring, &mut stream_rng(seed, stream))
}

/// Empirical type census of `trials` uniform `m × n` matrices.
pub fn monte_carlo_type_distribution(
    m: usize,
    n: usize,
    ring: ConcreteRing,
    trials: u64,
    seed: u64,
) -> Result<TypeCensus> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let census = (0..trials)
        .into_par_iter()
        .fold(BTreeMap::<ModuleTypeCounts, u64>::new, |mut acc, t| {
            let mat = sample_matrix(m, n, ring, seed, t);
            *acc.entry(matrix_type(&mat)).or_insert(0) += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (t, c) in b {
                *a.entry(t).or_insert(0) += c;
            }
            a
        });
    let mut out = TypeCensus::new(ring.s);
    for (t, c) in census {
        out.add(t, c);
    }
    Ok(out)
}

/// Number of rectangular unimodular `k × n` matrices among `trials` samples.
pub fn monte_carlo_unimodular(
    k: usize,
    n: usize,
    ring: ConcreteRing,
    trials: u64,
    seed: u64,
) -> Result<u64> {
    if k > n {
        return Err(Error::invalid("rectangular unimodularity needs k <= n"));
    }
    let census = monte_carlo_type_distribution(k, n, ring, trials, seed)?;
    Ok(census
        .get(&ModuleTypeCounts::free(k as u64, ring.s))
        .to_u64()
        .expect("at most trials"))
}

/// Binomial standard deviation of an observed fraction.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// `|observed/trials - p| <= nsigma σ` (with a floor of one count for
/// probabilities at 0 or 1).
pub fn within_sigma(observed: u64, trials: u64, p: f64, nsigma: f64) -> bool {
    let freq = observed as f64 / trials as f64;
    let tol = (nsigma * binomial_sigma(p, trials)).max(1.0 / trials as f64);
    (freq - p).abs() <= tol
}
