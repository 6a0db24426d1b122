//! Unseen-count and population-size estimators on frequency-of-frequencies data.
//!
//! Notation: `n_k` subjects were seen exactly `k` times, `N1 = sum n_k` subjects
//! were seen at all, `n = sum k n_k` events were recorded. Estimators target the
//! unseen count `n_0`, the population size `N = N1 + n_0`, the expected number of
//! events per subject `nu t`, or an unseen probability mass.
//!
//! | id | target | bound |
//! |----|--------|-------|
//! | `ambartsumian` (`chao`) | `n_0 = n_1^2 / 2n_2` | lower |
//! | `ambartsumian-upper` | `n_0 = n_1^2 / n_2` | upper |
//! | `ambartsumian-total`, `ambartsumian-total-upper` | `N1 +` the above | lower / upper |
//! | `robust-k-l` | `n_0 = n_k n_l / (C(k+l, k) n_{k+l})` | point |
//! | `mean-rate` | `nu t = 2 n_2 / n_1` | point |
//! | `mle-rate`, `mle-total` | zero-truncated Poisson MLE | point |
//! | `plackett-a`, `plackett-total-a` | `n_0 = n_1 sum_{k>a} n_k / sum_{k>a+1} k n_k` | lower |
//! | `stirling-total` | `N = S(n, N1) / S(n-1, N1)` | point |
//! | `zelterman-l` | `N = N1 / (1 - e^-<nu t>)` | upper |
//! | `good-turing-p0` | `p_0 = n_1 / n` | point |
//!
//! Lower bounds hold when subjects differ in their event rates; every estimator
//! except the upper ones is exact at expectation level when all rates are equal.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::counts::Frequencies;
use crate::error::{Error, Result};
use crate::numerics::{solve_truncated_rate, stirling_ratio_exact, stirling_ratio_log, RootConfig};

/// Above this many events the Stirling estimator switches to log-space rows.
pub const STIRLING_EXACT_LIMIT: u64 = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Unseen,
    Total,
    Rate,
    Probability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    Lower,
    Upper,
    Point,
}

/// Variance attached to an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variance {
    Estimated(f64),
    /// The closed-form expression evaluated to a negative number.
    OutOfRange {
        raw: f64,
    },
}

impl Variance {
    fn from_raw(raw: f64) -> Self {
        if raw >= 0.0 {
            Variance::Estimated(raw)
        } else {
            Variance::OutOfRange { raw }
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Variance::Estimated(v) => Some(v),
            Variance::OutOfRange { .. } => None,
        }
    }
}

/// Source of `<nu t>` for the Zelterman total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateSource {
    /// `2 n_2 / n_1`.
    Conventional,
    /// `sum_{k=1..l} (k+1) n_{k+1} / sum_{k=1..l} n_k`.
    Generalized(u32),
}

impl RateSource {
    fn limit(self) -> u32 {
        match self {
            RateSource::Conventional => 1,
            RateSource::Generalized(l) => l,
        }
    }
}

/// Estimator identity, with its parameters.
///
/// The derived ordering is the report ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EstimatorId {
    Ambartsumian,
    AmbartsumianUpper,
    AmbartsumianTotal,
    AmbartsumianTotalUpper,
    RobustPair { k: u32, l: u32 },
    MeanRate,
    MleRate,
    MleTotal,
    Plackett { a: u32 },
    PlackettTotal { a: u32 },
    StirlingTotal,
    Zelterman { l: u32 },
    GoodTuringP0,
}

impl EstimatorId {
    /// The default estimator set, in report order.
    pub fn catalogue() -> Vec<EstimatorId> {
        use EstimatorId::*;
        vec![
            Ambartsumian,
            AmbartsumianUpper,
            AmbartsumianTotal,
            AmbartsumianTotalUpper,
            RobustPair { k: 1, l: 2 },
            MeanRate,
            MleRate,
            MleTotal,
            Plackett { a: 0 },
            PlackettTotal { a: 0 },
            StirlingTotal,
            Zelterman { l: 1 },
            GoodTuringP0,
        ]
    }

    /// What the estimator targets and how its value relates to the truth.
    pub fn contract(self) -> (Target, Bound) {
        use EstimatorId::*;
        match self {
            Ambartsumian => (Target::Unseen, Bound::Lower),
            AmbartsumianUpper => (Target::Unseen, Bound::Upper),
            AmbartsumianTotal => (Target::Total, Bound::Lower),
            AmbartsumianTotalUpper => (Target::Total, Bound::Upper),
            RobustPair { .. } => (Target::Unseen, Bound::Point),
            MeanRate | MleRate => (Target::Rate, Bound::Point),
            MleTotal | StirlingTotal => (Target::Total, Bound::Point),
            Plackett { .. } => (Target::Unseen, Bound::Lower),
            PlackettTotal { .. } => (Target::Total, Bound::Lower),
            Zelterman { .. } => (Target::Total, Bound::Upper),
            GoodTuringP0 => (Target::Probability, Bound::Point),
        }
    }

    /// Runs this estimator on `table`.
    pub fn evaluate<F: Frequencies + ?Sized>(self, table: &F) -> Result<Estimate> {
        use EstimatorId::*;
        match self {
            Ambartsumian => ambartsumian_unseen(table),
            AmbartsumianUpper => ambartsumian_bounds(table).map(|(_, upper)| upper),
            AmbartsumianTotal => ambartsumian_total(table).map(|(lower, _)| lower),
            AmbartsumianTotalUpper => ambartsumian_total(table).map(|(_, upper)| upper),
            RobustPair { k, l } => robust_pair(table, k, l),
            MeanRate => mean_rate(table),
            MleRate => mle_total(table).map(|(rate, _)| rate),
            MleTotal => mle_total(table).map(|(_, total)| total),
            Plackett { a } => plackett_unseen(table, a),
            PlackettTotal { a } => plackett_total(table, a),
            StirlingTotal => stirling_total(table),
            Zelterman { l } => zelterman_total(table, RateSource::Generalized(l)),
            GoodTuringP0 => good_turing(table).map(|gt| Estimate::new(GoodTuringP0, gt.p0)),
        }
    }

    pub fn valid_names() -> &'static str {
        "ambartsumian (chao), ambartsumian-upper (chao-upper), ambartsumian-total (chao-total), \
         ambartsumian-total-upper (chao-total-upper), robust-K-L (robust = robust-1-2), mean-rate, \
         mle-rate, mle-total (mle), plackett-A (plackett = plackett-0), plackett-total-A, \
         stirling-total, zelterman-L (zelterman = zelterman-1), good-turing-p0 (good-turing)"
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use EstimatorId::*;
        match self {
            Ambartsumian => f.write_str("ambartsumian"),
            AmbartsumianUpper => f.write_str("ambartsumian-upper"),
            AmbartsumianTotal => f.write_str("ambartsumian-total"),
            AmbartsumianTotalUpper => f.write_str("ambartsumian-total-upper"),
            RobustPair { k, l } => write!(f, "robust-{k}-{l}"),
            MeanRate => f.write_str("mean-rate"),
            MleRate => f.write_str("mle-rate"),
            MleTotal => f.write_str("mle-total"),
            Plackett { a } => write!(f, "plackett-{a}"),
            PlackettTotal { a } => write!(f, "plackett-total-{a}"),
            StirlingTotal => f.write_str("stirling-total"),
            Zelterman { l } => write!(f, "zelterman-{l}"),
            GoodTuringP0 => f.write_str("good-turing-p0"),
        }
    }
}

impl FromStr for EstimatorId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        use EstimatorId::*;
        let s = s.trim().to_ascii_lowercase();
        let unknown = || {
            format!(
                "unknown estimator `{s}`; valid ids: {}",
                EstimatorId::valid_names()
            )
        };
        let param = |rest: &str| rest.parse::<u32>().map_err(|_| unknown());
        let id = match s.as_str() {
            "ambartsumian" | "chao" => Ambartsumian,
            "ambartsumian-upper" | "chao-upper" => AmbartsumianUpper,
            "ambartsumian-total" | "chao-total" => AmbartsumianTotal,
            "ambartsumian-total-upper" | "chao-total-upper" => AmbartsumianTotalUpper,
            "robust" => RobustPair { k: 1, l: 2 },
            "mean-rate" => MeanRate,
            "mle-rate" => MleRate,
            "mle-total" | "mle" => MleTotal,
            "plackett" => Plackett { a: 0 },
            "plackett-total" => PlackettTotal { a: 0 },
            "stirling-total" | "stirling" => StirlingTotal,
            "zelterman" => Zelterman { l: 1 },
            "good-turing-p0" | "good-turing" => GoodTuringP0,
            other => {
                if let Some(rest) = other.strip_prefix("robust-") {
                    let (k, l) = rest.split_once('-').ok_or_else(unknown)?;
                    let (k, l) = (param(k)?, param(l)?);
                    if k == 0 || l == 0 {
                        return Err(unknown());
                    }
                    RobustPair { k, l }
                } else if let Some(rest) = other.strip_prefix("plackett-total-") {
                    PlackettTotal { a: param(rest)? }
                } else if let Some(rest) = other.strip_prefix("plackett-") {
                    Plackett { a: param(rest)? }
                } else if let Some(rest) = other.strip_prefix("zelterman-") {
                    let l = param(rest)?;
                    if l == 0 {
                        return Err(unknown());
                    }
                    Zelterman { l }
                } else {
                    return Err(unknown());
                }
            }
        };
        Ok(id)
    }
}

impl Serialize for EstimatorId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EstimatorId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A point value with its estimator identity and contract.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimator: EstimatorId,
    pub value: f64,
    pub target: Target,
    pub bound: Bound,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub variance: Option<Variance>,
}

impl Estimate {
    pub fn new(estimator: EstimatorId, value: f64) -> Self {
        let (target, bound) = estimator.contract();
        Self {
            estimator,
            value,
            target,
            bound,
            variance: None,
        }
    }

    fn with_variance(mut self, variance: Variance) -> Self {
        self.variance = Some(variance);
        self
    }
}

/// `n_0 = n_1^2 / (2 n_2)`, with its variance attached.
pub fn ambartsumian_unseen<F: Frequencies + ?Sized>(table: &F) -> Result<Estimate> {
    let (n1, n2) = (table.count(1), table.count(2));
    require_doubletons(EstimatorId::Ambartsumian, n2)?;
    let estimate = Estimate::new(EstimatorId::Ambartsumian, n1 * n1 / (2.0 * n2));
    Ok(match chao_variance_unseen(table) {
        Ok(v) => estimate.with_variance(v),
        Err(_) => estimate,
    })
}

/// Two-sided bounds `n_1^2 / 2n_2 <= n_0 <= n_1^2 / n_2`.
pub fn ambartsumian_bounds<F: Frequencies + ?Sized>(table: &F) -> Result<(Estimate, Estimate)> {
    let lower = ambartsumian_unseen(table)?;
    let (n1, n2) = (table.count(1), table.count(2));
    let upper = Estimate::new(EstimatorId::AmbartsumianUpper, n1 * n1 / n2);
    Ok((lower, upper))
}

/// The bounds shifted to population totals, `N1 + n_0`.
pub fn ambartsumian_total<F: Frequencies + ?Sized>(table: &F) -> Result<(Estimate, Estimate)> {
    let (lower, upper) = ambartsumian_bounds(table)?;
    let observed = table.observed();
    let mut total_lower = Estimate::new(EstimatorId::AmbartsumianTotal, observed + lower.value);
    if let Ok(v) = chao_variance_total(table) {
        total_lower = total_lower.with_variance(v);
    }
    let total_upper = Estimate::new(EstimatorId::AmbartsumianTotalUpper, observed + upper.value);
    Ok((total_lower, total_upper))
}

/// `n_0 = n_k n_l / (C(k+l, k) n_{k+l})`.
///
/// The constant makes the estimator exact for a homogeneous Poisson population,
/// where `n_k n_l / n_{k+l} = C(k+l, k) n_0`. `(1, 1)` is the Ambartsumian estimator.
pub fn robust_pair<F: Frequencies + ?Sized>(table: &F, k: u32, l: u32) -> Result<Estimate> {
    let id = EstimatorId::RobustPair { k, l };
    if k == 0 || l == 0 {
        return Err(Error::domain("robust pair needs k, l >= 1"));
    }
    let m = u64::from(k) + u64::from(l);
    let denominator = table.count(m);
    if !(denominator > 0.0) {
        return Err(Error::inapplicable(id.to_string(), format!("n_{m} = 0")));
    }
    let binom = binomial(m, u64::from(k));
    let value = table.count(k.into()) * table.count(l.into()) / (binom * denominator);
    Ok(Estimate::new(id, value))
}

/// `<nu t> = 2 n_2 / n_1`.
pub fn mean_rate<F: Frequencies + ?Sized>(table: &F) -> Result<Estimate> {
    let n1 = table.count(1);
    if !(n1 > 0.0) {
        return Err(Error::inapplicable("mean-rate", "n_1 = 0"));
    }
    Ok(Estimate::new(
        EstimatorId::MeanRate,
        2.0 * table.count(2) / n1,
    ))
}

/// Variance of `N = n_1^2 / 2n_2 + N1`.
pub fn chao_variance_total<F: Frequencies + ?Sized>(table: &F) -> Result<Variance> {
    let (n1, n2, observed) = variance_inputs(table)?;
    let r = n1 / n2;
    let n1_4 = n1.powi(4);
    let bracket = 0.5 * r * r + r.powi(3) + 0.25 * r.powi(4)
        - 0.25 * n1_4 / (observed * n2.powi(3))
        - 0.5 * n1_4 / (n2 * n2 * (2.0 * n2 * observed + n1 * n1));
    Ok(Variance::from_raw(n2 * bracket))
}

/// Variance of `n_0 = n_1^2 / 2n_2`.
pub fn chao_variance_unseen<F: Frequencies + ?Sized>(table: &F) -> Result<Variance> {
    let (n1, n2, observed) = variance_inputs(table)?;
    let raw = n1.powi(3) / (n2 * n2) * (1.0 + 0.25 * (n1 / n2) * (1.0 - n2 / observed));
    Ok(Variance::from_raw(raw))
}

fn variance_inputs<F: Frequencies + ?Sized>(table: &F) -> Result<(f64, f64, f64)> {
    let n2 = table.count(2);
    if !(n2 > 0.0) {
        return Err(Error::inapplicable("chao-variance", "n_2 = 0"));
    }
    Ok((table.count(1), n2, table.observed()))
}

/// Zero-truncated Poisson maximum likelihood: solves
/// `x / (1 - e^-x) = n / N1` and returns `(x, N1 / (1 - e^-x))`.
pub fn mle_total<F: Frequencies + ?Sized>(table: &F) -> Result<(Estimate, Estimate)> {
    let observed = table.observed();
    let events = table.events();
    if !(observed > 0.0) {
        return Err(Error::inapplicable("mle-total", "N1 = 0"));
    }
    if !(events > observed) {
        return Err(Error::Degenerate(
            "n = N1: every subject seen once, the population estimate diverges".into(),
        ));
    }
    let rate = solve_truncated_rate(events / observed, &RootConfig::default())?;
    let total = observed / -(-rate).exp_m1();
    Ok((
        Estimate::new(EstimatorId::MleRate, rate),
        Estimate::new(EstimatorId::MleTotal, total),
    ))
}

/// `n_0 = n_1 sum_{k>=a+1} n_k / sum_{k>=a+2} k n_k`, from the Plackett rate
/// estimator of a Poisson truncated at `a`. For `a = 0` this is `n_1 N1 / (n - n_1)`.
pub fn plackett_unseen<F: Frequencies + ?Sized>(table: &F, a: u32) -> Result<Estimate> {
    let id = EstimatorId::Plackett { a };
    let a = u64::from(a);
    let (numerator, denominator) = table.entries().fold((0.0, 0.0), |(num, den), (k, c)| {
        (
            if k > a { num + c } else { num },
            if k > a + 1 { den + k as f64 * c } else { den },
        )
    });
    if !(denominator > 0.0) {
        return Err(Error::inapplicable(
            id.to_string(),
            format!("sum of k n_k over k >= {} is 0", a + 2),
        ));
    }
    Ok(Estimate::new(id, table.count(1) * numerator / denominator))
}

/// `N1 + plackett_unseen`; for `a = 0` this is `N1 n / (n - n_1)`.
pub fn plackett_total<F: Frequencies + ?Sized>(table: &F, a: u32) -> Result<Estimate> {
    let unseen = plackett_unseen(table, a)?;
    Ok(Estimate::new(
        EstimatorId::PlackettTotal { a },
        table.observed() + unseen.value,
    ))
}

/// `N = S(n, N1) / S(n - 1, N1)` with Stirling numbers of the second kind.
///
/// Exact big-integer rows up to [`STIRLING_EXACT_LIMIT`] events, log-space rows above.
pub fn stirling_total<F: Frequencies + ?Sized>(table: &F) -> Result<Estimate> {
    let (observed, events) = table
        .integral_totals()
        .ok_or_else(|| Error::inapplicable("stirling-total", "counts are not integers"))?;
    if observed == 0 {
        return Err(Error::inapplicable("stirling-total", "N1 = 0"));
    }
    if events <= observed {
        return Err(Error::Degenerate(format!(
            "n = N1 = {observed}: S(n - 1, N1) = 0"
        )));
    }
    let value = if events <= STIRLING_EXACT_LIMIT {
        stirling_ratio_exact(events, observed)?
    } else {
        stirling_ratio_log(events, observed)?
    };
    Ok(Estimate::new(EstimatorId::StirlingTotal, value))
}

/// `N = N1 / (1 - e^-<nu t>)` with `<nu t>` from `source`.
pub fn zelterman_total<F: Frequencies + ?Sized>(table: &F, source: RateSource) -> Result<Estimate> {
    let l = source.limit();
    let id = EstimatorId::Zelterman { l };
    if l == 0 {
        return Err(Error::domain("zelterman summation limit must be >= 1"));
    }
    let (mut numerator, mut denominator) = (0.0, 0.0);
    for k in 1..=u64::from(l) {
        numerator += (k + 1) as f64 * table.count(k + 1);
        denominator += table.count(k);
    }
    if !(denominator > 0.0) {
        return Err(Error::inapplicable(
            id.to_string(),
            format!("n_1 + ... + n_{l} = 0"),
        ));
    }
    let rate = numerator / denominator;
    if !(rate > 0.0) {
        return Err(Error::Degenerate(format!(
            "{id}: <nu t> = 0, no repeat events"
        )));
    }
    Ok(Estimate::new(id, table.observed() / -(-rate).exp_m1()))
}

/// Good-Turing unseen mass and adjusted occurrence probabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodTuring {
    /// `n_1 / n`.
    pub p0: f64,
    /// `pi_k = (k+1) n_{k+1} / (n n_k)` for every `k` with `n_k > 0`.
    pub pi: Vec<(u64, f64)>,
    /// Mass `(k+1) n_{k+1} / n` of classes `k` that have `n_k = 0`; no subject
    /// can carry it, so it is reported rather than spread.
    pub orphaned_mass: f64,
}

impl GoodTuring {
    /// `p0 + sum n_k pi_k + orphaned_mass`, which is 1 by construction.
    pub fn total_mass<F: Frequencies + ?Sized>(&self, table: &F) -> f64 {
        self.p0
            + self
                .pi
                .iter()
                .map(|&(k, p)| table.count(k) * p)
                .sum::<f64>()
            + self.orphaned_mass
    }
}

pub fn good_turing<F: Frequencies + ?Sized>(table: &F) -> Result<GoodTuring> {
    let events = table.events();
    if !(events > 0.0) {
        return Err(Error::EmptyTable);
    }
    let mut pi: Vec<(u64, f64)> = Vec::new();
    let mut orphaned_mass = 0.0;
    let mut previous: Option<(u64, f64)> = None;
    for (k, c) in table.entries() {
        if let Some((pk, pc)) = previous {
            if pk + 1 == k && pc > 0.0 {
                if let Some(last) = pi.last_mut() {
                    last.1 = k as f64 * c / (events * pc);
                }
            } else if c > 0.0 {
                // class k - 1 is empty but k is populated
                orphaned_mass += k as f64 * c / events;
            }
        } else if k > 1 && c > 0.0 {
            orphaned_mass += k as f64 * c / events;
        }
        if c > 0.0 {
            pi.push((k, 0.0));
        }
        previous = Some((k, c));
    }
    Ok(GoodTuring {
        p0: table.count(1) / events,
        pi,
        orphaned_mass,
    })
}

/// The ratios `k n_k / n_{k-1}` and their least-squares trend against `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Heterogeneity {
    pub sequence: Vec<(u64, f64)>,
    /// Positive slope flags rate heterogeneity; zero is expected for equal rates.
    pub trend: f64,
}

pub fn heterogeneity_sequence<F: Frequencies + ?Sized>(table: &F) -> Result<Heterogeneity> {
    let max_k = table.max_multiplicity().unwrap_or(0);
    let sequence: Vec<(u64, f64)> = (2..=max_k)
        .filter_map(|k| {
            let previous = table.count(k - 1);
            (previous > 0.0).then(|| (k, k as f64 * table.count(k) / previous))
        })
        .collect();
    if sequence.len() < 2 {
        return Err(Error::inapplicable(
            "heterogeneity",
            "fewer than two computable ratios k n_k / n_(k-1)",
        ));
    }
    let len = sequence.len() as f64;
    let mean_k = sequence.iter().map(|&(k, _)| k as f64).sum::<f64>() / len;
    let mean_v = sequence.iter().map(|&(_, v)| v).sum::<f64>() / len;
    let (sxy, sxx) = sequence.iter().fold((0.0, 0.0), |(sxy, sxx), &(k, v)| {
        let dk = k as f64 - mean_k;
        (sxy + dk * (v - mean_v), sxx + dk * dk)
    });
    Ok(Heterogeneity {
        sequence,
        trend: sxy / sxx,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InputEcho {
    pub observed: f64,
    pub events: f64,
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
}

impl InputEcho {
    pub fn of<F: Frequencies + ?Sized>(table: &F) -> Self {
        Self {
            observed: table.observed(),
            events: table.events(),
            n1: table.count(1),
            n2: table.count(2),
            n3: table.count(3),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Blocked {
    pub estimator: EstimatorId,
    pub reason: String,
}

/// Every requested estimator's outcome on one table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorReport {
    pub input: InputEcho,
    pub estimates: Vec<Estimate>,
    pub inapplicable: Vec<Blocked>,
    pub good_turing: Option<GoodTuring>,
    pub heterogeneity: Option<Heterogeneity>,
}

impl EstimatorReport {
    pub fn get(&self, id: EstimatorId) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.estimator == id)
    }
}

/// Runs the default catalogue.
pub fn estimate_all<F: Frequencies + ?Sized>(table: &F) -> EstimatorReport {
    estimate_selected(table, &EstimatorId::catalogue())
}

/// Runs the given estimators, deduplicated and in id order.
pub fn estimate_selected<F: Frequencies + ?Sized>(
    table: &F,
    ids: &[EstimatorId],
) -> EstimatorReport {
    let mut ids = ids.to_vec();
    ids.sort();
    ids.dedup();
    let mut estimates = Vec::new();
    let mut inapplicable = Vec::new();
    for id in ids {
        match id.evaluate(table) {
            Ok(e) => estimates.push(e),
            Err(e) => inapplicable.push(Blocked {
                estimator: id,
                reason: e.to_string(),
            }),
        }
    }
    EstimatorReport {
        input: InputEcho::of(table),
        estimates,
        inapplicable,
        good_turing: good_turing(table).ok(),
        heterogeneity: heterogeneity_sequence(table).ok(),
    }
}

fn require_doubletons(id: EstimatorId, n2: f64) -> Result<()> {
    if n2 > 0.0 {
        Ok(())
    } else {
        Err(Error::inapplicable(id.to_string(), "n_2 = 0"))
    }
}

/// `C(n, k)` as a float, by the multiplicative formula.
pub(crate) fn binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
