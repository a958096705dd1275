//! Gaussian binomials, q-Pochhammer symbols and the shape-summed
//! q-multinomial, evaluated exactly over big rationals or, for infinite
//! products, as floats with a certified truncation bound.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Arbitrary-precision nonnegative integer count.
pub type ExactCount = BigUint;

/// Arbitrary-precision rational, always held in lowest terms with a
/// positive denominator.
pub type ExactRatio = BigRational;

/// Relative rounding slack charged per floating point operation.
const ROUND: f64 = 4.0 * f64::EPSILON;

/// A float together with a certified bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxReal {
    pub value: f64,
    pub abs_error: f64,
}

impl ApproxReal {
    pub fn new(value: f64, abs_error: f64) -> Self {
        debug_assert!(abs_error >= 0.0 && abs_error.is_finite());
        ApproxReal { value, abs_error }
    }

    pub fn exact(value: f64) -> Self {
        ApproxReal {
            value,
            abs_error: 0.0,
        }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.abs_error
    }

    pub fn upper(&self) -> f64 {
        self.value + self.abs_error
    }

    /// Whether `x` lies inside the certified interval.
    pub fn contains(&self, x: f64) -> bool {
        (self.value - x).abs() <= self.abs_error
    }

    /// `1 / self`; requires the interval to exclude zero.
    pub fn recip(self) -> ApproxReal {
        ApproxReal::exact(1.0) / self
    }

    /// Whether two certified values are consistent with each other.
    pub fn agrees_with(&self, other: &ApproxReal) -> bool {
        (self.value - other.value).abs() <= self.abs_error + other.abs_error
    }
}

impl fmt::Display for ApproxReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:.3e}", self.value, self.abs_error)
    }
}

impl Add for ApproxReal {
    type Output = ApproxReal;
    fn add(self, rhs: ApproxReal) -> ApproxReal {
        let value = self.value + rhs.value;
        ApproxReal::new(value, self.abs_error + rhs.abs_error + ROUND * value.abs())
    }
}

impl Sub for ApproxReal {
    type Output = ApproxReal;
    fn sub(self, rhs: ApproxReal) -> ApproxReal {
        self + (-rhs)
    }
}

impl Neg for ApproxReal {
    type Output = ApproxReal;
    fn neg(self) -> ApproxReal {
        ApproxReal::new(-self.value, self.abs_error)
    }
}

impl Mul for ApproxReal {
    type Output = ApproxReal;
    fn mul(self, rhs: ApproxReal) -> ApproxReal {
        let value = self.value * rhs.value;
        let err = self.value.abs() * rhs.abs_error
            + rhs.value.abs() * self.abs_error
            + self.abs_error * rhs.abs_error
            + ROUND * value.abs();
        ApproxReal::new(value, err)
    }
}

impl Div for ApproxReal {
    type Output = ApproxReal;
    fn div(self, rhs: ApproxReal) -> ApproxReal {
        let b = rhs.value.abs();
        assert!(
            b > rhs.abs_error,
            "division by an interval containing zero: {rhs}"
        );
        let value = self.value / rhs.value;
        let err = (self.value.abs() * rhs.abs_error + b * self.abs_error)
            / (b * (b - rhs.abs_error))
            + ROUND * value.abs();
        ApproxReal::new(value, err)
    }
}

/// Controls evaluation of infinite products and series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationPolicy {
    pub max_index: usize,
    pub target_tail: f64,
}

/// Environment variable overriding [`TruncationPolicy::default`]'s tail target.
pub const ENV_TARGET_TAIL: &str = "CHAINRING_TARGET_TAIL";
/// Environment variable overriding [`TruncationPolicy::default`]'s index cap.
pub const ENV_MAX_INDEX: &str = "CHAINRING_MAX_INDEX";

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            max_index: 512,
            target_tail: 1e-12,
        }
    }
}

impl TruncationPolicy {
    pub fn new(max_index: usize, target_tail: f64) -> Result<Self> {
        if max_index == 0 {
            return Err(Error::invalid("max_index must be positive"));
        }
        if !(target_tail > 0.0 && target_tail.is_finite()) {
            return Err(Error::invalid(
                "target_tail must be a positive finite number",
            ));
        }
        Ok(TruncationPolicy {
            max_index,
            target_tail,
        })
    }

    /// The default policy with `CHAINRING_TARGET_TAIL` / `CHAINRING_MAX_INDEX`
    /// applied when set.
    pub fn from_env() -> Result<Self> {
        let mut policy = TruncationPolicy::default();
        if let Ok(raw) = std::env::var(ENV_TARGET_TAIL) {
            policy.target_tail = raw
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("{ENV_TARGET_TAIL}={raw} is not a number")))?;
        }
        if let Ok(raw) = std::env::var(ENV_MAX_INDEX) {
            policy.max_index = raw
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("{ENV_MAX_INDEX}={raw} is not an integer")))?;
        }
        TruncationPolicy::new(policy.max_index, policy.target_tail)
    }
}

pub fn ratio_from_int(n: impl Into<BigInt>) -> ExactRatio {
    BigRational::from_integer(n.into())
}

/// `1/q` as an exact rational.
pub fn inverse_base(q: u64) -> ExactRatio {
    BigRational::new(BigInt::one(), BigInt::from(q))
}

fn rpow(base: &ExactRatio, exp: u64) -> ExactRatio {
    Pow::pow(base, BigUint::from(exp))
}

/// Natural logarithm of a big unsigned integer (must be nonzero).
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit prefix");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational.
pub fn ln_ratio(r: &ExactRatio) -> f64 {
    assert!(r.is_positive(), "logarithm of a non-positive rational");
    ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude())
}

/// Nearest float to a rational, valid across the full range of magnitudes
/// that occur here (including values far below `1e-300` as long as the
/// result is representable).
pub fn ratio_to_f64(r: &ExactRatio) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let Some(v) = r.to_f64() {
        if v.is_finite() && v != 0.0 {
            return v;
        }
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * ln_ratio(&r.abs()).exp()
}

/// Gaussian binomial `[n, k]_q` for an integer base `q`, as an exact integer.
pub fn gaussian_binomial_int(n: u64, k: i64, q: &BigUint) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    if q.is_one() {
        return binomial(n, k);
    }
    // [n, j] = [n, j-1] (q^{n-j+1} - 1) / (q^j - 1); every partial quotient is integral.
    let mut acc = BigUint::one();
    for j in 1..=k {
        let num = Pow::pow(q, n - j + 1) - BigUint::one();
        let den = Pow::pow(q, j) - BigUint::one();
        acc = acc * num / den;
    }
    acc
}

/// Ordinary binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Gaussian binomial `[n, k]` evaluated at an arbitrary rational base.
///
/// Returns 0 when `k < 0` or `k > n` and 1 when `k ∈ {0, n}`. Integer bases
/// and reciprocals of integers go through the integer product; any other
/// base uses the q-Pascal recurrence, which is a polynomial identity and so
/// stays valid even at roots of unity such as `1` or `-1`.
pub fn gaussian_binomial(n: u64, k: i64, base: &ExactRatio) -> ExactRatio {
    if k < 0 || k as u64 > n {
        return ExactRatio::zero();
    }
    let ku = k as u64;
    if ku == 0 || ku == n {
        return ExactRatio::one();
    }
    if base.is_integer() && !base.is_negative() {
        let q = base.to_integer().to_biguint().expect("nonnegative");
        return ratio_from_int(BigInt::from(gaussian_binomial_int(n, k, &q)));
    }
    if base.numer().is_one() && base.denom() > &BigInt::one() {
        // [n,k]_{1/q} = [n,k]_q / q^{(n-k)k}
        let q = base.denom().to_biguint().expect("positive denominator");
        let top = BigInt::from(gaussian_binomial_int(n, k, &q));
        let bottom = BigInt::from(Pow::pow(&q, (n - ku) * ku));
        return BigRational::new(top, bottom);
    }
    q_pascal_row(n, base)[ku as usize].clone()
}

/// Row `n` of the q-Pascal triangle at a rational base.
fn q_pascal_row(n: u64, base: &ExactRatio) -> Vec<ExactRatio> {
    let mut row = vec![ExactRatio::one()];
    for m in 1..=n {
        let mut next = Vec::with_capacity(m as usize + 1);
        next.push(ExactRatio::one());
        for k in 1..m {
            // [m,k] = [m-1,k-1] + base^k [m-1,k]
            let v = &row[k as usize - 1] + rpow(base, k) * &row[k as usize];
            next.push(v);
        }
        next.push(ExactRatio::one());
        row = next;
    }
    row
}

/// Memoised Gaussian binomials `[m, k]_q` for all `0 <= k <= m <= max_n`.
#[derive(Debug, Clone)]
pub struct GaussianTable {
    q: BigUint,
    rows: Vec<Vec<BigUint>>,
}

impl GaussianTable {
    pub fn new(q: u64, max_n: u64) -> Self {
        let qb = BigUint::from(q);
        let mut powers = vec![BigUint::one()];
        for _ in 0..max_n {
            let next = powers.last().expect("nonempty") * &qb;
            powers.push(next);
        }
        let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
        for m in 1..=max_n as usize {
            let prev = &rows[m - 1];
            let mut row = Vec::with_capacity(m + 1);
            row.push(BigUint::one());
            for k in 1..m {
                row.push(&prev[k - 1] + &powers[k] * &prev[k]);
            }
            row.push(BigUint::one());
            rows.push(row);
        }
        GaussianTable { q: qb, rows }
    }

    pub fn base(&self) -> &BigUint {
        &self.q
    }

    pub fn max_n(&self) -> u64 {
        self.rows.len() as u64 - 1
    }

    /// `[m, k]_q`, zero outside `0 <= k <= m`.
    pub fn get(&self, m: u64, k: i64) -> BigUint {
        if k < 0 || k as u64 > m {
            return BigUint::zero();
        }
        match self.rows.get(m as usize) {
            Some(row) => row[k as usize].clone(),
            None => gaussian_binomial_int(m, k, &self.q),
        }
    }
}

/// Finite q-Pochhammer symbol `(a; q)_r = ∏_{i<r} (1 - a q^i)`.
pub fn pochhammer_finite(a: &ExactRatio, q: &ExactRatio, r: u64) -> ExactRatio {
    let mut acc = ExactRatio::one();
    let mut term = a.clone();
    for _ in 0..r {
        acc *= ExactRatio::one() - &term;
        term *= q;
    }
    acc
}

/// `(1/q; 1/q)_r` as an exact rational.
pub fn euler_partial(q: u64, r: u64) -> ExactRatio {
    let x = inverse_base(q);
    pochhammer_finite(&x, &x, r)
}

/// Infinite q-Pochhammer symbol `(a; q)_∞` for `|q| < 1`.
///
/// Stops at the first index `r` where `|a q^r| <= 1/2` and the certified
/// bound `|P_r| (exp(2|a||q|^r/(1-|q|)) - 1)` on the neglected factors drops
/// below `policy.target_tail`. If `policy.max_index` is reached first the
/// (larger) bound at that index is reported.
pub fn pochhammer_infinite(a: f64, q: f64, policy: &TruncationPolicy) -> Result<ApproxReal> {
    if q.is_nan() || q.abs() >= 1.0 || !a.is_finite() {
        return Err(Error::NonConvergent(format!(
            "(a; q)_inf requires |q| < 1, got a={a}, q={q}"
        )));
    }
    let mut product = 1.0f64;
    let mut term = a; // a q^r
    let mut rounding = 0.0f64;
    let mut r = 0usize;
    loop {
        let head = term.abs();
        if head <= 0.5 {
            let log_tail = 2.0 * head / (1.0 - q.abs());
            let tail = product.abs() * log_tail.exp_m1();
            if tail + rounding < policy.target_tail || r >= policy.max_index {
                return Ok(ApproxReal::new(product, tail + rounding));
            }
        } else if r >= policy.max_index {
            return Err(Error::NonConvergent(format!(
                "(a; q)_inf with a={a}, q={q}: factor {term} still exceeds 1/2 at index {r}"
            )));
        }
        product *= 1.0 - term;
        term *= q;
        r += 1;
        rounding += 2.0 * f64::EPSILON * product.abs();
    }
}

/// Euler's function `(1/q; 1/q)_∞`, written in terms of `qinv = 1/q`.
pub fn euler_function(qinv: f64, policy: &TruncationPolicy) -> Result<ApproxReal> {
    pochhammer_infinite(qinv, qinv, policy)
}

/// All weakly decreasing `(μ_1, …, μ_s)` with `μ_1 <= n` and `Σ μ_i = ell`.
pub(crate) fn decreasing_shapes(n: u64, ell: u64, s: usize) -> Vec<Vec<u64>> {
    fn rec(prefix: &mut Vec<u64>, cap: u64, remaining: u64, slots: usize, out: &mut Vec<Vec<u64>>) {
        if slots == 0 {
            if remaining == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        // remaining must fit in `slots` parts each at most `cap`
        if remaining > cap * slots as u64 {
            return;
        }
        let lo = remaining.div_ceil(slots as u64);
        for v in (lo..=cap.min(remaining)).rev() {
            prefix.push(v);
            rec(prefix, v, remaining - v, slots - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(s), n, ell, s, &mut out);
    out
}

/// The shape-summed q-multinomial
/// `Σ_{μ_1+…+μ_s=ℓ} base^{Σ_j (n-μ_j) μ_{j+1}} [n,μ_1][μ_1,μ_2]⋯[μ_{s-1},μ_s]`.
///
/// Terms whose composition is not weakly decreasing vanish through the
/// Gaussian zero convention, so only partitions are enumerated.
pub fn q_multinomial(n: u64, ell: i64, s: usize, base: &ExactRatio) -> Result<ExactRatio> {
    if s == 0 {
        return Err(Error::invalid("s must be at least 1"));
    }
    if ell < 0 || ell as u64 > n * s as u64 {
        return Err(Error::invalid(format!(
            "length {ell} outside 0..={} for n={n}, s={s}",
            n * s as u64
        )));
    }
    let mut total = ExactRatio::zero();
    for mu in decreasing_shapes(n, ell as u64, s) {
        let exponent: u64 = mu.windows(2).map(|w| (n - w[0]) * w[1]).sum();
        let mut term = rpow(base, exponent);
        let mut top = n;
        for &m in &mu {
            term *= gaussian_binomial(top, m as i64, base);
            top = m;
        }
        total += term;
    }
    Ok(total)
}

/// `q^{s n²/4 - m²/s} [n, sn/2 - m]^{(s)}_q` at an exact base `0 < q < 1`,
/// evaluated in the log domain since the exponent is generally fractional.
pub fn t_s_value(n: u64, m: &ExactRatio, s: usize, base: &ExactRatio) -> Result<ApproxReal> {
    if s == 0 {
        return Err(Error::invalid("s must be at least 1"));
    }
    if !(base.is_positive() && base < &ExactRatio::one()) {
        return Err(Error::invalid("t_s_value needs a base in (0, 1)"));
    }
    let s_r = ratio_from_int(s as u64);
    let n_r = ratio_from_int(n);
    let index = &s_r * &n_r / ratio_from_int(2u32) - m;
    if !index.is_integer() || index.is_negative() || index > &s_r * &n_r {
        return Err(Error::invalid(format!(
            "multinomial index sn/2 - m = {index} is not an integer in 0..={}",
            n * s as u64
        )));
    }
    let ell = index.to_integer().to_i64().expect("small index");
    let mult = q_multinomial(n, ell, s, base)?;
    let exponent = &s_r * &n_r * &n_r / ratio_from_int(4u32) - m * m / &s_r;
    let log_value = ratio_to_f64(&exponent) * ln_ratio(base) + ln_ratio(&mult);
    let value = log_value.exp();
    let err = value * (log_value.abs() + 1.0) * 8.0 * f64::EPSILON;
    Ok(ApproxReal::new(value, err))
}
