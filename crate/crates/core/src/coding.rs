//! Additive weights on `Z/p^s`, exact ball volumes, finite-length entropy
//! estimates, the Gilbert-Varshamov bound and the random-code experiment.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modcount::rect_unimodular_probability;
use crate::qseries::{ln_biguint, ratio_to_f64, ApproxReal, ExactCount, ExactRatio};
use crate::sim::{binomial_sigma, is_rect_unimodular, sample_matrix, ConcreteRing, RingMatrix};

/// Cap on the number of messages `(p^s)^k` enumerated for a minimum distance.
pub const CODEWORD_BUDGET: u128 = 1 << 20;
/// Code length used to estimate the threshold `D` numerically.
pub const THRESHOLD_LENGTH: u64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Hamming,
    Lee,
    Homogeneous,
}

impl FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hamming" => Ok(WeightKind::Hamming),
            "lee" => Ok(WeightKind::Lee),
            "homogeneous" => Ok(WeightKind::Homogeneous),
            other => Err(Error::invalid(format!("unknown weight '{other}'"))),
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightKind::Hamming => "hamming",
            WeightKind::Lee => "lee",
            WeightKind::Homogeneous => "homogeneous",
        })
    }
}

fn rat(n: u64, d: u64) -> ExactRatio {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A symbol weight table on `Z/p^s`, also stored on an integer grid
/// (every weight multiplied by `scale`).
#[derive(Debug, Clone)]
pub struct WeightModel {
    kind: WeightKind,
    ring: ConcreteRing,
    symbol_weights: Vec<ExactRatio>,
    scale: u64,
    grid_weights: Vec<u64>,
    threshold: OnceLock<f64>,
}

impl WeightModel {
    pub fn new(kind: WeightKind, ring: ConcreteRing) -> Result<Self> {
        let modulus = ring.modulus();
        let weights: Vec<ExactRatio> = (0..modulus)
            .map(|x| match kind {
                WeightKind::Hamming => rat(u64::from(x != 0), 1),
                WeightKind::Lee => rat(x.min(modulus - x), 1),
                WeightKind::Homogeneous => {
                    let socle_step = modulus / ring.p();
                    if x == 0 {
                        rat(0, 1)
                    } else if x % socle_step == 0 {
                        rat(ring.p(), ring.p() - 1)
                    } else {
                        rat(1, 1)
                    }
                }
            })
            .collect();
        Self::from_table(kind, ring, weights)
    }

    fn from_table(kind: WeightKind, ring: ConcreteRing, weights: Vec<ExactRatio>) -> Result<Self> {
        let modulus = ring.modulus() as usize;
        for x in 0..modulus {
            let wx = &weights[x];
            if (x == 0) != wx.is_zero() || wx < &ExactRatio::zero() {
                return Err(Error::invalid(format!(
                    "{kind} weight is not positive definite at {x}"
                )));
            }
            if wx != &weights[(modulus - x) % modulus] {
                return Err(Error::invalid(format!(
                    "{kind} weight is not symmetric at {x}"
                )));
            }
            for y in 0..modulus {
                if weights[(x + y) % modulus] > wx + &weights[y] {
                    return Err(Error::invalid(format!(
                        "{kind} weight violates the triangle inequality at ({x}, {y})"
                    )));
                }
            }
        }
        let scale = weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()))
            .to_u64()
            .ok_or_else(|| Error::invalid("weight denominators too large"))?;
        let grid_weights = weights
            .iter()
            .map(|w| {
                (w * BigRational::from_integer(BigInt::from(scale)))
                    .to_integer()
                    .to_u64()
                    .expect("small weight")
            })
            .collect();
        Ok(WeightModel {
            kind,
            ring,
            symbol_weights: weights,
            scale,
            grid_weights,
            threshold: OnceLock::new(),
        })
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn ring(&self) -> &ConcreteRing {
        &self.ring
    }

    /// Weight of a single symbol.
    pub fn weight(&self, x: u64) -> &ExactRatio {
        &self.symbol_weights[(x % self.ring.modulus()) as usize]
    }

    pub fn symbol_weights(&self) -> &[ExactRatio] {
        &self.symbol_weights
    }

    /// Common denominator of the symbol weights.
    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// Symbol weights multiplied by [`scale`](Self::scale).
    pub fn grid_weights(&self) -> &[u64] {
        &self.grid_weights
    }

    /// Additive weight of a vector on the integer grid.
    pub fn grid_weight_of(&self, v: &[u64]) -> u64 {
        v.iter().map(|&x| self.grid_weights[x as usize]).sum()
    }

    pub fn vector_weight(&self, v: &[u64]) -> ExactRatio {
        rat(self.grid_weight_of(v), self.scale)
    }

    pub fn max_symbol_weight(&self) -> ExactRatio {
        self.symbol_weights
            .iter()
            .max()
            .cloned()
            .expect("nonempty ring")
    }

    fn max_grid_weight(&self) -> u64 {
        *self.grid_weights.iter().max().expect("nonempty ring")
    }

    /// `N(n) = n · max symbol weight`.
    pub fn max_weight(&self, n: u64) -> ExactRatio {
        self.max_symbol_weight() * BigRational::from_integer(BigInt::from(n))
    }

    /// Ratio of the largest to the smallest nonzero symbol weight.
    pub fn eta(&self) -> ExactRatio {
        let min = self.symbol_weights.iter().filter(|w| !w.is_zero()).min();
        match min {
            Some(min) => self.max_symbol_weight() / min,
            None => ExactRatio::one(),
        }
    }

    /// Least relative radius at which balls fill almost the whole space:
    /// `1 - 1/p^s` for Hamming, 1 for homogeneous, and for Lee the least
    /// `δ` on a `10^{-3}` grid with `g_n(δ) >= 1 - 10^{-3}` at
    /// `n = THRESHOLD_LENGTH`.
    pub fn d_threshold(&self) -> f64 {
        *self.threshold.get_or_init(|| match self.kind {
            WeightKind::Hamming => 1.0 - 1.0 / self.ring.modulus() as f64,
            WeightKind::Homogeneous => 1.0,
            WeightKind::Lee => {
                let n = THRESHOLD_LENGTH;
                let profile = BallProfile::new(n, self, None);
                let full = n * self.max_grid_weight();
                (0..=1000u64)
                    .map(|i| i as f64 / 1000.0)
                    .find(|&delta| {
                        let r = (delta * full as f64).floor() as u64;
                        profile.growth(r) >= 1.0 - 1e-3
                    })
                    .unwrap_or(1.0)
            }
        })
    }
}

pub fn make_weight_model(kind: WeightKind, ring: ConcreteRing) -> Result<WeightModel> {
    WeightModel::new(kind, ring)
}

/// Cumulative ball volumes `V̄(n, w)` for every grid weight `w` up to a cap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallProfile {
    n: u64,
    scale: u64,
    modulus: u64,
    cumulative: Vec<ExactCount>,
}

impl BallProfile {
    /// Convolves the symbol-weight histogram `n` times, discarding grid
    /// weights above `cap`.
    pub fn new(n: u64, model: &WeightModel, cap: Option<u64>) -> Self {
        let full = n * model.max_grid_weight();
        let top = cap.map_or(full, |c| c.min(full)) as usize;
        let mut hist: Vec<(usize, u64)> = Vec::new();
        for &w in model.grid_weights() {
            match hist.iter_mut().find(|(g, _)| *g == w as usize) {
                Some(entry) => entry.1 += 1,
                None => hist.push((w as usize, 1)),
            }
        }
        let mut dist = vec![BigUint::zero(); top + 1];
        dist[0] = BigUint::one();
        let mut reach = 0usize;
        for _ in 0..n {
            let new_reach = (reach + model.max_grid_weight() as usize).min(top);
            let mut next = vec![BigUint::zero(); top + 1];
            for (w, count) in &hist {
                for i in 0..=reach {
                    if i + w > top {
                        break;
                    }
                    if !dist[i].is_zero() {
                        next[i + w] += &dist[i] * *count;
                    }
                }
            }
            dist = next;
            reach = new_reach;
        }
        let mut acc = BigUint::zero();
        let cumulative = dist
            .into_iter()
            .map(|d| {
                acc += d;
                acc.clone()
            })
            .collect();
        BallProfile {
            n,
            scale: model.scale(),
            modulus: model.ring().modulus(),
            cumulative,
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Largest grid weight covered.
    pub fn max_grid_radius(&self) -> u64 {
        self.cumulative.len() as u64 - 1
    }

    /// `#{v : grid weight(v) <= r}`.
    pub fn closed(&self, r: u64) -> &ExactCount {
        let idx = (r as usize).min(self.cumulative.len() - 1);
        &self.cumulative[idx]
    }

    /// `#{v : grid weight(v) < r}`.
    pub fn open(&self, r: u64) -> ExactCount {
        if r == 0 {
            BigUint::zero()
        } else {
            self.closed(r - 1).clone()
        }
    }

    /// `log_{p^s} V̄(n, r) / n`.
    pub fn growth(&self, r: u64) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        ln_biguint(self.closed(r)) / (self.n as f64 * (self.modulus as f64).ln())
    }
}

fn grid_radius_closed(w: &ExactRatio, scale: u64) -> Result<u64> {
    if w < &ExactRatio::zero() {
        return Err(Error::invalid("radius must be nonnegative"));
    }
    (w * BigRational::from_integer(BigInt::from(scale)))
        .floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::invalid("radius too large"))
}

/// Smallest grid weight not below `w` (the exclusive bound of the open ball).
fn grid_radius_open(w: &ExactRatio, scale: u64) -> Result<u64> {
    if w < &ExactRatio::zero() {
        return Err(Error::invalid("radius must be nonnegative"));
    }
    (w * BigRational::from_integer(BigInt::from(scale)))
        .ceil()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::invalid("radius too large"))
}

/// Number of vectors of `R^n` with weight `< w` (open) or `<= w` (closed).
pub fn ball_volume(
    n: u64,
    w: &ExactRatio,
    model: &WeightModel,
    closed: bool,
) -> Result<ExactCount> {
    if closed {
        let r = grid_radius_closed(w, model.scale())?;
        Ok(BallProfile::new(n, model, Some(r)).closed(r).clone())
    } else {
        let r = grid_radius_open(w, model.scale())?;
        Ok(BallProfile::new(n, model, Some(r)).open(r))
    }
}

/// `(p^s)^n / V(n, d)` with `V` the open ball.
pub fn gv_lower_bound(n: u64, d: &ExactRatio, model: &WeightModel) -> Result<ExactRatio> {
    if d <= &ExactRatio::zero() {
        return Err(Error::invalid("distance must be positive"));
    }
    let volume = ball_volume(n, d, model, false)?;
    let space = BigUint::from(model.ring().modulus()).pow(n as u32);
    Ok(BigRational::new(space.into(), volume.into()))
}

fn relative_grid_radius(n: u64, delta: f64, model: &WeightModel) -> Result<u64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::invalid(format!(
            "delta = {delta} must lie in [0, 1]"
        )));
    }
    let full = BigRational::from_integer(BigInt::from(n * model.max_grid_weight()));
    let exact_delta = BigRational::from_float(delta).expect("finite");
    Ok((exact_delta * full)
        .floor()
        .to_integer()
        .to_u64()
        .expect("nonnegative"))
}

/// `g_n(δ) = log_{p^s} V̄(n, ⌊δ N(n)⌋) / n`.
pub fn entropy_estimate(n: u64, delta: f64, model: &WeightModel) -> Result<ApproxReal> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let r = relative_grid_radius(n, delta, model)?;
    let g = BallProfile::new(n, model, Some(r)).growth(r);
    Ok(ApproxReal::new(g, 1e-13 * g.max(1e-300) + 1e-15))
}

/// `h_Q(δ) = δ log_Q(Q-1) - δ log_Q δ - (1-δ) log_Q(1-δ)`.
pub fn hamming_entropy(delta: f64, alphabet: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) || alphabet < 2 {
        return Err(Error::invalid("need 0 <= delta <= 1 and alphabet >= 2"));
    }
    let xlx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
    let q = alphabet as f64;
    Ok((delta * (q - 1.0).ln() - xlx(delta) - xlx(1.0 - delta)) / q.ln())
}

/// Minimum distance of a linear code, with `Infinite` for the zero code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeDistance {
    Finite(ExactRatio),
    Infinite,
}

impl CodeDistance {
    pub fn exceeds(&self, bound: &ExactRatio) -> bool {
        match self {
            CodeDistance::Finite(d) => d > bound,
            CodeDistance::Infinite => true,
        }
    }
}

impl PartialOrd for CodeDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CodeDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (CodeDistance::Finite(a), CodeDistance::Finite(b)) => a.cmp(b),
            (CodeDistance::Finite(_), CodeDistance::Infinite) => Ordering::Less,
            (CodeDistance::Infinite, CodeDistance::Finite(_)) => Ordering::Greater,
            (CodeDistance::Infinite, CodeDistance::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for CodeDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeDistance::Finite(d) => write!(f, "{d}"),
            CodeDistance::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for CodeDistance {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Least grid weight of a nonzero codeword `xG`, enumerating every message
/// `x` in odometer order (each digit step adds one generator row).
fn min_grid_weight(g: &RingMatrix, model: &WeightModel) -> Result<Option<u64>> {
    let ring = g.ring();
    let modulus = ring.modulus();
    let messages = (modulus as u128)
        .checked_pow(g.rows() as u32)
        .unwrap_or(u128::MAX);
    if messages > CODEWORD_BUDGET {
        return Err(Error::BudgetExceeded {
            needed: messages,
            budget: CODEWORD_BUDGET,
        });
    }
    let (k, n) = (g.rows(), g.cols());
    let mut digits = vec![0u64; k];
    let mut word = vec![0u64; n];
    let mut best: Option<u64> = None;
    let weights = model.grid_weights();
    for _ in 1..messages {
        for i in (0..k).rev() {
            for (c, &gj) in word.iter_mut().zip(g.row(i)) {
                *c = (*c + gj) % modulus;
            }
            digits[i] += 1;
            if digits[i] < modulus {
                break;
            }
            digits[i] = 0;
        }
        let w: u64 = word.iter().map(|&c| weights[c as usize]).sum();
        if w > 0 && best.is_none_or(|b| w < b) {
            best = Some(w);
            if w == 1 && model.scale() == 1 {
                break;
            }
        }
    }
    Ok(best)
}

/// Minimum weight of a nonzero codeword of the row span of `g`.
pub fn min_distance_exhaustive(g: &RingMatrix, model: &WeightModel) -> Result<CodeDistance> {
    if g.ring() != model.ring() {
        return Err(Error::invalid(
            "generator matrix and weight are over different rings",
        ));
    }
    Ok(match min_grid_weight(g, model)? {
        Some(w) => CodeDistance::Finite(rat(w, model.scale())),
        None => CodeDistance::Infinite,
    })
}

/// Inputs of the random-code experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GvParams {
    pub n: u64,
    pub delta: f64,
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Outcome of one sampled generator matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GvTrial {
    pub seed: u64,
    pub stream: u64,
    pub free: bool,
    pub min_dist: CodeDistance,
    pub far: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GvFractions {
    pub free: f64,
    pub far: f64,
    pub joint: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GvSigma {
    /// Binomial σ at the exact unimodular probability.
    pub free: f64,
    /// Binomial σ at the clamped joint bound.
    pub joint: f64,
}

/// Report of the random-code experiment. The bound is
/// `unimodular · distance_factor` where `unimodular` is the exact
/// probability that a uniform `k × n` matrix is rectangular unimodular and
/// `distance_factor = 1 - q^{s(1 - ε n)}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GvReport {
    pub params: GvParams,
    pub weight: WeightKind,
    pub ring: String,
    pub k: u64,
    pub g_n: f64,
    pub distance_threshold: String,
    pub bound_exact: String,
    pub unimodular_probability: f64,
    pub distance_factor: f64,
    pub bound_decimal: f64,
    pub vacuous: bool,
    pub fractions: GvFractions,
    pub sigma: GvSigma,
    /// Joint fraction at least `max(0, bound) - 4σ`.
    pub pass: bool,
    /// Free fraction within `4σ` of the exact unimodular probability.
    pub free_pass: bool,
    #[serde(skip)]
    pub trials: Vec<GvTrial>,
}

impl GvReport {
    /// One row per trial: `seed,stream,free,min_dist,far`.
    pub fn trials_csv(&self) -> String {
        let mut out = String::from("seed,stream,free,min_dist,far\n");
        for t in &self.trials {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                t.seed, t.stream, t.free, t.min_dist, t.far
            ));
        }
        out
    }
}

/// The rate `k = ⌈(1 - g_n(δ) - ε) n⌉` and `g_n(δ)`, after checking the
/// experiment's preconditions.
pub fn gv_rate(params: &GvParams, model: &WeightModel) -> Result<(u64, f64)> {
    let GvParams {
        n, delta, epsilon, ..
    } = *params;
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let d = model.d_threshold();
    if !(delta >= 0.0 && delta < d) {
        return Err(Error::invalid(format!(
            "delta = {delta} must lie in [0, D) with D = {d}"
        )));
    }
    let g = entropy_estimate(n, delta, model)?.value;
    if !(epsilon > 0.0 && epsilon < 1.0 - g) {
        return Err(Error::invalid(format!(
            "epsilon = {epsilon} must lie in (0, 1 - g_n(delta)) with g_n(delta) = {g}"
        )));
    }
    let k = ((1.0 - g - epsilon) * n as f64 - 1e-12).ceil().max(0.0) as u64;
    if k == 0 {
        return Err(Error::invalid(format!(
            "rate rounds to k = 0 (g_n(delta) = {g})"
        )));
    }
    Ok((k.min(n), g))
}

/// Samples `trials` uniform `k × n` generator matrices and measures how
/// often they are free of rank `k` and have minimum distance `> δ N(n)`.
pub fn gv_random_experiment(params: GvParams, model: &WeightModel) -> Result<GvReport> {
    if params.trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let (k, g) = gv_rate(&params, model)?;
    let ring = *model.ring();
    let messages = (ring.modulus() as u128)
        .checked_pow(k as u32)
        .unwrap_or(u128::MAX);
    if messages > CODEWORD_BUDGET {
        return Err(Error::BudgetExceeded {
            needed: messages,
            budget: CODEWORD_BUDGET,
        });
    }
    let threshold =
        BigRational::from_float(params.delta).expect("finite") * model.max_weight(params.n);
    let trials: Vec<GvTrial> = (0..params.trials)
        .into_par_iter()
        .map(|t| {
            let gm = sample_matrix(k as usize, params.n as usize, ring, params.seed, t);
            let free = is_rect_unimodular(&gm)?;
            let min_dist = min_distance_exhaustive(&gm, model)?;
            let far = min_dist.exceeds(&threshold);
            Ok(GvTrial {
                seed: params.seed,
                stream: t,
                free,
                min_dist,
                far,
            })
        })
        .collect::<Result<_>>()?;
    let count = |f: &dyn Fn(&GvTrial) -> bool| {
        trials.iter().filter(|t| f(t)).count() as f64 / params.trials as f64
    };
    let fractions = GvFractions {
        free: count(&|t| t.free),
        far: count(&|t| t.far),
        joint: count(&|t| t.free && t.far),
    };
    let unimodular = rect_unimodular_probability(k, params.n, ring.spec())?;
    let unimodular_f = ratio_to_f64(&unimodular);
    let q = ring.p() as f64;
    let s = ring.s() as f64;
    let distance_factor = 1.0 - q.powf(s * (1.0 - params.epsilon * params.n as f64));
    let raw_bound = unimodular_f * distance_factor;
    let vacuous = raw_bound <= 0.0;
    let bound = raw_bound.max(0.0);
    let floor = 1.0 / params.trials as f64;
    let sigma = GvSigma {
        free: binomial_sigma(unimodular_f, params.trials).max(floor),
        joint: binomial_sigma(bound, params.trials).max(floor),
    };
    Ok(GvReport {
        params,
        weight: model.kind(),
        ring: ring.to_string(),
        k,
        g_n: g,
        distance_threshold: threshold.to_string(),
        bound_exact: format!(
            "{unimodular} * (1 - {}^({}*(1 - {}*{})))",
            ring.p(),
            ring.s(),
            params.epsilon,
            params.n
        ),
        unimodular_probability: unimodular_f,
        distance_factor,
        bound_decimal: bound,
        vacuous,
        pass: fractions.joint >= bound - 4.0 * sigma.joint,
        free_pass: (fractions.free - unimodular_f).abs() <= 4.0 * sigma.free,
        fractions,
        sigma,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u64, s: usize) -> ConcreteRing {
        ConcreteRing::new(p, s).unwrap()
    }

    fn model(kind: WeightKind, p: u64, s: usize) -> WeightModel {
        WeightModel::new(kind, z(p, s)).unwrap()
    }

    fn all_vectors(n: usize, modulus: u64) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v| (0..modulus).map(move |x| [v.clone(), vec![x]].concat()))
                .collect();
        }
        out
    }

    #[test]
    fn weight_tables() {
        let lee8 = model(WeightKind::Lee, 2, 3);
        assert_eq!(lee8.weight(5), &rat(3, 1));
        assert_eq!(lee8.eta(), rat(4, 1));
        let hom4 = model(WeightKind::Homogeneous, 2, 2);
        let lee4 = model(WeightKind::Lee, 2, 2);
        assert_eq!(hom4.symbol_weights(), lee4.symbol_weights());
        let hom9 = model(WeightKind::Homogeneous, 3, 2);
        assert_eq!(hom9.weight(3), &rat(3, 2));
        assert_eq!(hom9.weight(6), &rat(3, 2));
        assert_eq!(hom9.weight(1), &rat(1, 1));
        assert_eq!(hom9.scale(), 2);
        assert_eq!(hom9.grid_weights(), &[0, 2, 2, 3, 2, 2, 3, 2, 2]);
        assert_eq!(model(WeightKind::Hamming, 3, 2).eta(), rat(1, 1));
        assert!("lee".parse::<WeightKind>().is_ok());
        assert!("euclid".parse::<WeightKind>().is_err());
    }

    #[test]
    fn rejects_non_metric_table() {
        let weights = vec![rat(0, 1), rat(1, 1), rat(3, 1), rat(1, 1)];
        assert!(WeightModel::from_table(WeightKind::Lee, z(2, 2), weights).is_err());
        let asymmetric = vec![rat(0, 1), rat(1, 1), rat(2, 1), rat(2, 1)];
        assert!(WeightModel::from_table(WeightKind::Lee, z(2, 2), asymmetric).is_err());
    }

    #[test]
    fn ball_examples() {
        let lee4 = model(WeightKind::Lee, 2, 2);
        let ham4 = model(WeightKind::Hamming, 2, 2);
        assert_eq!(
            ball_volume(1, &rat(1, 1), &lee4, true).unwrap(),
            BigUint::from(3u32)
        );
        assert_eq!(
            ball_volume(2, &rat(1, 1), &ham4, true).unwrap(),
            BigUint::from(7u32)
        );
        assert_eq!(
            ball_volume(5, &rat(0, 1), &lee4, true).unwrap(),
            BigUint::from(1u32)
        );
        assert_eq!(gv_lower_bound(1, &rat(1, 1), &ham4).unwrap(), rat(4, 1));
        assert_eq!(gv_lower_bound(2, &rat(1, 1), &ham4).unwrap(), rat(16, 1));
        assert_eq!(gv_lower_bound(2, &rat(2, 1), &lee4).unwrap(), rat(16, 5));
        assert!(gv_lower_bound(2, &rat(0, 1), &lee4).is_err());
    }

    #[test]
    fn ball_dp_matches_brute_force() {
        for (p, s) in [(2, 2), (2, 3), (3, 2)] {
            for kind in [
                WeightKind::Hamming,
                WeightKind::Lee,
                WeightKind::Homogeneous,
            ] {
                let m = model(kind, p, s);
                let n = 2;
                let profile = BallProfile::new(n, &m, None);
                let vectors = all_vectors(n as usize, m.ring().modulus());
                for r in 0..=profile.max_grid_radius() {
                    let closed = vectors.iter().filter(|v| m.grid_weight_of(v) <= r).count();
                    let open = vectors.iter().filter(|v| m.grid_weight_of(v) < r).count();
                    assert_eq!(profile.closed(r), &BigUint::from(closed));
                    assert_eq!(profile.open(r), BigUint::from(open));
                }
                assert_eq!(
                    profile.closed(profile.max_grid_radius()),
                    &BigUint::from(vectors.len())
                );
            }
        }
    }

    #[test]
    fn entropy_basics() {
        let ham4 = model(WeightKind::Hamming, 2, 2);
        assert_eq!(entropy_estimate(50, 0.0, &ham4).unwrap().value, 0.0);
        assert!((hamming_entropy(0.2, 4).unwrap() - 0.5195).abs() < 1e-4);
        assert!((hamming_entropy(0.75, 4).unwrap() - 1.0).abs() < 1e-12);
        let g = entropy_estimate(400, 0.2, &ham4).unwrap().value;
        assert!((g - 0.5195).abs() < 0.02);
        let mut prev = -1.0;
        for i in 0..=10 {
            let gi = entropy_estimate(60, i as f64 / 10.0, &ham4).unwrap().value;
            assert!(gi >= prev);
            prev = gi;
        }
        assert!((prev - 1.0).abs() < 1e-12);
        assert!(entropy_estimate(10, 1.5, &ham4).is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(model(WeightKind::Hamming, 2, 2).d_threshold(), 0.75);
        assert_eq!(model(WeightKind::Homogeneous, 3, 2).d_threshold(), 1.0);
        let d = model(WeightKind::Lee, 2, 2).d_threshold();
        assert!(d > 0.45 && d < 0.7, "{d}");
    }

    #[test]
    fn min_distance_examples() {
        let lee4 = model(WeightKind::Lee, 2, 2);
        let ham4 = model(WeightKind::Hamming, 2, 2);
        let r = z(2, 2);
        let g = RingMatrix::from_rows(r, &[vec![1, 1]]).unwrap();
        assert_eq!(
            min_distance_exhaustive(&g, &lee4).unwrap(),
            CodeDistance::Finite(rat(2, 1))
        );
        let id = RingMatrix::identity(r, 2);
        assert_eq!(
            min_distance_exhaustive(&id, &ham4).unwrap(),
            CodeDistance::Finite(rat(1, 1))
        );
        let g = RingMatrix::from_rows(r, &[vec![2, 2]]).unwrap();
        assert_eq!(
            min_distance_exhaustive(&g, &lee4).unwrap(),
            CodeDistance::Finite(rat(4, 1))
        );
        let zero = RingMatrix::zero(r, 2, 3);
        assert_eq!(
            min_distance_exhaustive(&zero, &lee4).unwrap(),
            CodeDistance::Infinite
        );
        let hom9 = model(WeightKind::Homogeneous, 3, 2);
        let g = RingMatrix::from_rows(z(3, 2), &[vec![3, 6]]).unwrap();
        assert_eq!(
            min_distance_exhaustive(&g, &hom9).unwrap(),
            CodeDistance::Finite(rat(3, 1))
        );
    }

    #[test]
    fn experiment_preconditions() {
        let lee4 = model(WeightKind::Lee, 2, 2);
        let base = GvParams {
            n: 8,
            delta: 0.05,
            epsilon: 0.15,
            trials: 10,
            seed: 1,
        };
        assert!(gv_random_experiment(
            GvParams {
                n: 12,
                epsilon: 0.85,
                ..base
            },
            &lee4
        )
        .is_err());
        let (k, g) = gv_rate(&GvParams { n: 12, ..base }, &lee4).unwrap();
        assert!((g - 25f64.ln() / 4f64.ln() / 12.0).abs() < 1e-12);
        assert_eq!(k, 8);
        assert!(gv_random_experiment(GvParams { trials: 0, ..base }, &lee4).is_err());
        assert!(gv_random_experiment(GvParams { delta: 0.9, ..base }, &lee4).is_err());
        let (k, g) = gv_rate(&GvParams { delta: 0.0, ..base }, &lee4).unwrap();
        assert_eq!(g, 0.0);
        assert_eq!(k, 7);
        let report = gv_random_experiment(GvParams { delta: 0.0, ..base }, &lee4).unwrap();
        assert_eq!(report.fractions.far, 1.0);
        assert_eq!(report.trials.len(), 10);
        assert!(report
            .trials_csv()
            .starts_with("seed,stream,free,min_dist,far\n1,0,"));
    }
}
