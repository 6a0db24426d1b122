//! Mixed-Poisson populations: exact count probabilities, expected tables and
//! Monte-Carlo event logs.
//!
//! Each subject carries a rate `nu` drawn from a mixing distribution and
//! produces a Poisson number of events over `[0, T]`, placed uniformly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use statrs::function::factorial::ln_factorial;
use statrs::function::gamma::ln_gamma;

use crate::counts::{from_events, EventLog, Frequencies};
use crate::error::{Error, Result};
use crate::estimators::{Bound, EstimatorId, Target};
use crate::numerics::integrate;

/// Tail mass left out of an expected table.
pub const TAIL_MASS: f64 = 1e-12;
/// Hard cap on the multiplicities of an expected table.
pub const MAX_MULTIPLICITY: u64 = 10_000;
/// Lowest accepted margin in [`check_holder`].
pub const HOLDER_FLOOR: f64 = -1e-12;

pub const MIXTURE_GRAMMAR: &str = "point:NU | discrete:NU,W;NU,W;... | exp:BETA | gamma:ALPHA,BETA";

const GENERATOR: &str =
    "rand_chacha::ChaCha8Rng 0.9; stream = replication, word position = subject << 32";

/// Distribution of subject rates.
///
/// Point and exponential mixtures are stored in their general forms, so
/// `point(nu) == discrete([(nu, 1)])` and `exponential(b) == gamma(1, b)`.
#[derive(Debug, Clone, PartialEq)]
pub enum MixtureSpec {
    /// Atoms `(nu, weight)` sorted by rate, weights summing to one.
    Discrete(Vec<(f64, f64)>),
    Gamma {
        shape: f64,
        rate: f64,
    },
}

impl MixtureSpec {
    pub fn point(nu: f64) -> Result<Self> {
        Self::discrete(vec![(nu, 1.0)])
    }

    /// Rates must be finite and non-negative; weights positive and summing to one.
    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMixture("no atoms".into()));
        }
        let mut merged: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
        for (nu, w) in atoms {
            if !(nu.is_finite() && nu >= 0.0) {
                return Err(Error::InvalidMixture(format!(
                    "rate {nu} is not a non-negative number"
                )));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidMixture(format!("weight {w} is not positive")));
            }
            // `nu + 0.0` folds -0.0 into 0.0 so the bit pattern is a sort key.
            merged
                .entry((nu + 0.0).to_bits())
                .or_insert((nu + 0.0, 0.0))
                .1 += w;
        }
        let total: f64 = merged.values().map(|&(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMixture(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(MixtureSpec::Discrete(merged.into_values().collect()))
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::gamma(1.0, rate)
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0 && rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidMixture(format!(
                "gamma parameters must be positive, got shape {shape}, rate {rate}"
            )));
        }
        Ok(MixtureSpec::Gamma { shape, rate })
    }

    /// Mean rate `E[nu]`.
    pub fn mean(&self) -> f64 {
        match self {
            MixtureSpec::Discrete(atoms) => atoms.iter().map(|&(nu, w)| nu * w).sum(),
            MixtureSpec::Gamma { shape, rate } => shape / rate,
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, MixtureSpec::Discrete(atoms) if atoms.len() == 1)
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            MixtureSpec::Discrete(atoms) => {
                if atoms.len() == 1 {
                    return atoms[0].0;
                }
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(nu, w) in atoms {
                    acc += w;
                    if u < acc {
                        return nu;
                    }
                }
                atoms[atoms.len() - 1].0
            }
            MixtureSpec::Gamma { shape, rate } => Gamma::new(*shape, 1.0 / rate)
                .expect("validated gamma parameters")
                .sample(rng),
        }
    }
}

impl fmt::Display for MixtureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MixtureSpec::Discrete(atoms) if atoms.len() == 1 => write!(f, "point:{}", atoms[0].0),
            MixtureSpec::Discrete(atoms) => {
                let parts: Vec<String> = atoms.iter().map(|(nu, w)| format!("{nu},{w}")).collect();
                write!(f, "discrete:{}", parts.join(";"))
            }
            MixtureSpec::Gamma { shape, rate } => write!(f, "gamma:{shape},{rate}"),
        }
    }
}

impl FromStr for MixtureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: String| Error::InvalidMixture(format!("{why}; expected {MIXTURE_GRAMMAR}"));
        let (family, args) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| bad(format!("missing ':' in {s:?}")))?;
        let numbers = |text: &str| -> Result<Vec<f64>> {
            text.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| bad(format!("not a number: {x:?}")))
                })
                .collect()
        };
        let arity = |v: Vec<f64>, n: usize| -> Result<Vec<f64>> {
            if v.len() == n {
                Ok(v)
            } else {
                Err(bad(format!(
                    "{family} takes {n} parameter(s), got {}",
                    v.len()
                )))
            }
        };
        match family.trim() {
            "point" => Self::point(arity(numbers(args)?, 1)?[0]),
            "exp" | "exponential" => Self::exponential(arity(numbers(args)?, 1)?[0]),
            "gamma" => {
                let v = arity(numbers(args)?, 2)?;
                Self::gamma(v[0], v[1])
            }
            "discrete" => {
                let atoms = args
                    .split(';')
                    .map(|atom| arity(numbers(atom)?, 2).map(|v| (v[0], v[1])))
                    .collect::<Result<Vec<_>>>()?;
                Self::discrete(atoms)
            }
            other => Err(bad(format!("unknown family {other:?}"))),
        }
    }
}

impl Serialize for MixtureSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MixtureSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `p_k(t)`: probability that a subject drawn from `mix` shows `k` events in time `t`.
pub fn pk_mixture(mix: &MixtureSpec, t: f64, k: u64) -> Result<f64> {
    check_time(t)?;
    Ok(match mix {
        MixtureSpec::Discrete(atoms) => atoms
            .iter()
            .map(|&(nu, w)| w * poisson_mass(nu * t, k))
            .sum(),
        MixtureSpec::Gamma { shape, rate } => {
            let kf = k as f64;
            let ln_coef = if *shape == 1.0 {
                0.0
            } else {
                ln_gamma(kf + shape) - ln_factorial(k) - ln_gamma(*shape)
            };
            let s = rate + t;
            (ln_coef + shape * (rate / s).ln() + kf * (t / s).ln()).exp()
        }
    })
}

/// `p_k(t)` by integrating the gamma density against the Poisson mass.
pub fn pk_quadrature(mix: &MixtureSpec, t: f64, k: u64) -> Result<f64> {
    check_time(t)?;
    let (shape, rate) = match mix {
        MixtureSpec::Gamma { shape, rate } => (*shape, *rate),
        MixtureSpec::Discrete(_) => {
            return Err(Error::domain(
                "a discrete mixture has no density to integrate",
            ))
        }
    };
    let kf = k as f64;
    let ln_norm = shape * rate.ln() - ln_gamma(shape) - ln_factorial(k) + kf * t.ln();
    let integrand = |nu: f64| {
        if !(nu > 0.0 && nu.is_finite()) {
            return 0.0;
        }
        (ln_norm + (shape - 1.0 + kf) * nu.ln() - (rate + t) * nu).exp()
    };
    let split = (kf + shape - 1.0).max(1.0) / (rate + t);
    let head = integrate(integrand, 0.0, split, 1e-13)?;
    let tail = integrate(integrand, split, f64::INFINITY, 1e-13)?;
    Ok(head.value + tail.value)
}

/// Expected frequency table `n_k = N p_k` of a population observed for time `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedTable {
    pub population: f64,
    pub time: f64,
    /// `(k, N p_k)` for `k = 1..=k_max`.
    pub counts: Vec<(u64, f64)>,
    /// `N p_0`.
    pub true_unseen: f64,
    /// Present when the tail could not be cut below the target mass.
    pub truncation: Option<String>,
}

impl ExpectedTable {
    pub fn k_max(&self) -> u64 {
        self.counts.len() as u64
    }
}

impl Frequencies for ExpectedTable {
    fn entries(&self) -> Box<dyn Iterator<Item = (u64, f64)> + '_> {
        Box::new(self.counts.iter().copied())
    }

    fn count(&self, k: u64) -> f64 {
        match k {
            0 => 0.0,
            k => self.counts.get(k as usize - 1).map_or(0.0, |&(_, c)| c),
        }
    }
}

/// Expected counts for `k = 1..=k_max`, extending `k_max` until the omitted
/// tail holds less than [`TAIL_MASS`], up to [`MAX_MULTIPLICITY`].
pub fn expected_table(
    mix: &MixtureSpec,
    population: f64,
    t: f64,
    k_max: u64,
) -> Result<ExpectedTable> {
    if !(population.is_finite() && population >= 0.0) {
        return Err(Error::domain(format!(
            "population must be non-negative, got {population}"
        )));
    }
    let p0 = pk_mixture(mix, t, 0)?;
    let mut cumulative = p0;
    let mut counts = Vec::new();
    let mut k = 0;
    while k < MAX_MULTIPLICITY && (k < k_max || 1.0 - cumulative >= TAIL_MASS) {
        k += 1;
        let p = pk_mixture(mix, t, k)?;
        cumulative += p;
        counts.push((k, population * p));
    }
    let tail = 1.0 - cumulative;
    let truncation = (tail >= TAIL_MASS)
        .then(|| format!("tail mass {tail:e} beyond k = {MAX_MULTIPLICITY} omitted"));
    Ok(ExpectedTable {
        population,
        time: t,
        counts,
        true_unseen: population * p0,
        truncation,
    })
}

/// Margins `k p_0 p_k - p_1 p_(k-1)` for `k = 2..=k_max`.
///
/// These are non-negative for every mixture and vanish for a point mass.
pub fn check_holder(mix: &MixtureSpec, t: f64, k_max: u64) -> Result<Vec<(u64, f64)>> {
    if k_max < 2 {
        return Err(Error::domain(format!(
            "k_max must be at least 2, got {k_max}"
        )));
    }
    let p = (0..=k_max)
        .map(|k| pk_mixture(mix, t, k))
        .collect::<Result<Vec<_>>>()?;
    Ok((2..=k_max)
        .map(|k| {
            let k_us = k as usize;
            (k, k as f64 * p[0] * p[k_us] - p[1] * p[k_us - 1])
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub population: u64,
    pub horizon: f64,
    pub mixture: MixtureSpec,
    pub replications: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population == 0 {
            return Err(Error::domain("population must be at least 1"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::domain(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.replications == 0 {
            return Err(Error::domain("at least one replication is required"));
        }
        Ok(())
    }
}

/// Simulates one replication. Subject `i` draws from its own random stream,
/// so the log depends only on `(seed, replication, i)`.
pub fn simulate_log(config: &SimConfig, replication: u64) -> Result<EventLog> {
    config.validate()?;
    let mut base = ChaCha8Rng::seed_from_u64(config.seed);
    base.set_stream(replication);
    let width = config.population.to_string().len();
    let mut records = BTreeMap::new();
    for i in 0..config.population {
        let mut rng = base.clone();
        rng.set_word_pos(u128::from(i) << 32);
        let nu = config.mixture.sample(&mut rng);
        let mean = nu * config.horizon;
        let count = if mean > 0.0 {
            Poisson::new(mean)
                .map_err(|e| Error::domain(format!("Poisson mean {mean}: {e}")))?
                .sample(&mut rng) as usize
        } else {
            0
        };
        if count == 0 {
            continue;
        }
        let times: Vec<f64> = (0..count)
            .map(|_| rng.random::<f64>() * config.horizon)
            .collect();
        records.insert(format!("s{i:0width$}"), times);
    }
    EventLog::new(config.horizon, records)
}

/// Monte-Carlo summary of one estimator across replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorRow {
    pub estimator: EstimatorId,
    pub target: Target,
    pub bound: Bound,
    pub applicable: u64,
    pub inapplicable: u64,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    /// Mean of the quantity the estimator targets, over applicable replications.
    pub mean_truth: Option<f64>,
    /// Fraction of applicable replications on the wrong side of the truth.
    pub violation_fraction: Option<f64>,
    /// Mean of the attached variance formula, where one exists.
    pub mean_variance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub tool: String,
    pub version: String,
    pub generator: String,
    pub config: SimConfig,
    pub expected_unseen: f64,
    pub mean_true_unseen: f64,
    pub rows: Vec<EstimatorRow>,
}

impl ExperimentReport {
    pub fn row(&self, id: EstimatorId) -> Option<&EstimatorRow> {
        self.rows.iter().find(|r| r.estimator == id)
    }
}

struct Replication {
    true_unseen: f64,
    outcomes: Vec<Option<(f64, Option<f64>)>>,
}

/// Simulates every replication, evaluates `ids` on the table at `T` and
/// aggregates. Replications run in parallel and are reduced in index order.
pub fn run_experiment(config: &SimConfig, ids: &[EstimatorId]) -> Result<ExperimentReport> {
    config.validate()?;
    let mut ids = ids.to_vec();
    ids.sort();
    ids.dedup();
    let reps = (0..config.replications)
        .into_par_iter()
        .map(|rep| {
            let log = simulate_log(config, rep)?;
            let table = from_events(&log, config.horizon)?;
            let outcomes = ids
                .iter()
                .map(|id| {
                    id.evaluate(&table)
                        .ok()
                        .map(|e| (e.value, e.variance.and_then(|v| v.value())))
                })
                .collect();
            Ok(Replication {
                true_unseen: (config.population - log.subjects() as u64) as f64,
                outcomes,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let population = config.population as f64;
    let rate_truth = config.mixture.mean() * config.horizon;
    let rows = ids
        .iter()
        .enumerate()
        .map(|(j, &id)| {
            let (target, bound) = id.contract();
            let mut values = Vec::new();
            let mut truths = Vec::new();
            let mut variances = Vec::new();
            for rep in &reps {
                if let Some((value, variance)) = rep.outcomes[j] {
                    values.push(value);
                    truths.push(match target {
                        Target::Unseen => Some(rep.true_unseen),
                        Target::Total => Some(population),
                        Target::Rate => Some(rate_truth),
                        Target::Probability => None,
                    });
                    variances.extend(variance);
                }
            }
            let truth: Option<Vec<f64>> = truths.iter().copied().collect();
            let violation_fraction = match (bound, &truth) {
                (Bound::Point, _) | (_, None) => None,
                (_, Some(t)) if t.is_empty() => None,
                (_, Some(t)) => {
                    let wrong = values
                        .iter()
                        .zip(t)
                        .filter(|&(v, t)| if bound == Bound::Lower { v > t } else { v < t })
                        .count();
                    Some(wrong as f64 / t.len() as f64)
                }
            };
            EstimatorRow {
                estimator: id,
                target,
                bound,
                applicable: values.len() as u64,
                inapplicable: reps.len() as u64 - values.len() as u64,
                mean: mean(&values),
                sd: sample_sd(&values),
                mean_truth: truth.as_deref().and_then(mean),
                violation_fraction,
                mean_variance: if variances.len() == values.len() {
                    mean(&variances)
                } else {
                    None
                },
            }
        })
        .collect();

    let true_unseen: Vec<f64> = reps.iter().map(|r| r.true_unseen).collect();
    Ok(ExperimentReport {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        generator: GENERATOR.into(),
        config: config.clone(),
        expected_unseen: population * pk_mixture(&config.mixture, config.horizon, 0)?,
        mean_true_unseen: mean(&true_unseen).unwrap_or(0.0),
        rows,
    })
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn sample_sd(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values)?;
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}

fn poisson_mass(lambda: f64, k: u64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if k == 0 {
        return (-lambda).exp();
    }
    (k as f64 * lambda.ln() - lambda - ln_factorial(k)).exp()
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("time must be positive, got {t}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mix(s: &str) -> MixtureSpec {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_forms_coincide() {
        assert_eq!(
            MixtureSpec::point(1.5).unwrap(),
            MixtureSpec::discrete(vec![(1.5, 1.0)]).unwrap()
        );
        assert_eq!(
            MixtureSpec::exponential(2.0).unwrap(),
            MixtureSpec::gamma(1.0, 2.0).unwrap()
        );
        assert_eq!(mix("exp:1.0"), mix("gamma:1,1"));
        assert_eq!(mix("discrete:2,0.5;0.2,0.5"), mix("discrete:0.2,0.5;2,0.5"));
        assert_eq!(mix("discrete:1,0.25;1,0.75"), mix("point:1"));
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in [
            "point:1",
            "discrete:0.2,0.5;2,0.5",
            "gamma:2,2",
            "gamma:0.5,1",
        ] {
            assert_eq!(mix(s).to_string(), s);
            assert_eq!(mix(&mix(s).to_string()), mix(s));
        }
        assert_eq!(mix("exp:3").to_string(), "gamma:1,3");
        for bad in [
            "point",
            "point:x",
            "gamma:1",
            "gamma:-1,1",
            "exp:0",
            "discrete:1,0.3",
            "weird:1",
            "discrete:1,0.5;2",
        ] {
            let err = bad.parse::<MixtureSpec>().unwrap_err();
            assert!(matches!(err, Error::InvalidMixture(_)), "{bad}");
        }
    }

    #[test]
    fn pk_examples() {
        let p = pk_mixture(&mix("point:1"), 1.0, 0).unwrap();
        assert!((p - (-1.0f64).exp()).abs() < 1e-15);
        for k in 0..30 {
            let p = pk_mixture(&mix("exp:1"), 1.0, k).unwrap();
            let expected = 0.5f64.powi(k as i32 + 1);
            assert!((p - expected).abs() <= 1e-13 * expected, "k = {k}");
        }
        let g = mix("gamma:2,2");
        let closed = pk_mixture(&g, 1.0, 2).unwrap();
        assert!((closed - 12.0 / 81.0).abs() < 1e-14);
        assert!((pk_quadrature(&g, 1.0, 2).unwrap() - closed).abs() < 1e-8);
        assert!(pk_quadrature(&mix("point:1"), 1.0, 2).is_err());
        assert!(pk_mixture(&g, 0.0, 2).is_err());
    }

    #[test]
    fn discrete_pk_is_weighted_poisson() {
        let m = mix("discrete:0.2,0.5;2,0.5");
        let p0 = pk_mixture(&m, 1.0, 0).unwrap();
        assert!((p0 - 0.5 * ((-0.2f64).exp() + (-2.0f64).exp())).abs() < 1e-15);
        let p3 = pk_mixture(&m, 1.0, 3).unwrap();
        let oracle = 0.5 * (0.008 * (-0.2f64).exp() / 6.0 + 8.0 * (-2.0f64).exp() / 6.0);
        assert!((p3 - oracle).abs() < 1e-15);
    }

    #[test]
    fn expected_table_examples() {
        let t = expected_table(&mix("point:1"), 1000.0, 1.0, 5).unwrap();
        assert!((t.count(1) - 367.879441171).abs() < 1e-6);
        assert!((t.count(2) - 183.939720586).abs() < 1e-6);
        assert!((t.true_unseen - 367.879441171).abs() < 1e-6);
        assert!(t.truncation.is_none());
        let total: f64 = t.counts.iter().map(|&(_, c)| c).sum::<f64>() + t.true_unseen;
        assert!((total - 1000.0).abs() < 1e-9);

        let g = expected_table(&mix("exp:1"), 1000.0, 1.0, 1).unwrap();
        assert_eq!(g.true_unseen, 500.0);
        for &(k, c) in g.counts.iter().take(20) {
            assert!((c - 1000.0 * 0.5f64.powi(k as i32 + 1)).abs() < 1e-11);
        }
        assert!(g.k_max() > 30);
    }

    #[test]
    fn expected_table_respects_cap() {
        let t = expected_table(&mix("point:20000"), 1.0, 1.0, 1).unwrap();
        assert_eq!(t.k_max(), MAX_MULTIPLICITY);
        assert!(t.truncation.is_some());
    }

    #[test]
    fn holder_examples() {
        for (_, m) in check_holder(&mix("point:1"), 1.0, 6).unwrap() {
            assert!(m.abs() < 1e-12);
        }
        for s in ["gamma:2,2", "discrete:0.2,0.5;2,0.5"] {
            let margins = check_holder(&mix(s), 1.0, 6).unwrap();
            assert_eq!(margins.len(), 5);
            assert!(margins.iter().all(|&(_, m)| m > 0.0), "{s}: {margins:?}");
        }
        assert!(check_holder(&mix("point:1"), 1.0, 1).is_err());
    }

    #[test]
    fn gamma_heterogeneity_ratio_is_linear() {
        let (alpha, beta, t) = (2.5, 1.5, 0.7);
        let m = MixtureSpec::gamma(alpha, beta).unwrap();
        for k in 1..20u64 {
            let ratio =
                k as f64 * pk_mixture(&m, t, k).unwrap() / pk_mixture(&m, t, k - 1).unwrap();
            let law = (k as f64 + alpha - 1.0) * t / (beta + t);
            assert!((ratio - law).abs() < 1e-12 * law.max(1.0), "k = {k}");
        }
    }

    fn config(mixture: &str, population: u64, replications: u64, seed: u64) -> SimConfig {
        SimConfig {
            population,
            horizon: 1.0,
            mixture: mix(mixture),
            replications,
            seed,
        }
    }

    #[test]
    fn zero_rate_gives_empty_log() {
        let log = simulate_log(&config("point:0", 50, 1, 1), 0).unwrap();
        assert_eq!(log.subjects(), 0);
    }

    #[test]
    fn simulation_is_deterministic_per_replication() {
        let c = config("gamma:2,2", 200, 3, 9);
        assert_eq!(simulate_log(&c, 1).unwrap(), simulate_log(&c, 1).unwrap());
        assert_ne!(simulate_log(&c, 1).unwrap(), simulate_log(&c, 2).unwrap());
        let other = SimConfig {
            seed: 10,
            ..c.clone()
        };
        assert_ne!(
            simulate_log(&c, 1).unwrap(),
            simulate_log(&other, 1).unwrap()
        );
    }

    #[test]
    fn subject_streams_do_not_depend_on_population() {
        let small = simulate_log(&config("point:2", 10, 1, 3), 0).unwrap();
        let large = simulate_log(&config("point:2", 1000, 1, 3), 0).unwrap();
        let pick = |log: &EventLog, i: usize| {
            log.records()
                .iter()
                .find(|(id, _)| id.trim_start_matches('s').parse::<usize>().unwrap() == i)
                .map(|(_, v)| v.clone())
        };
        for i in 0..10 {
            assert_eq!(pick(&small, i), pick(&large, i));
        }
    }

    #[test]
    fn homogeneous_observed_count_matches_binomial() {
        let log = simulate_log(&config("point:1", 1000, 1, 42), 0).unwrap();
        let p = 1.0 - (-1.0f64).exp();
        let sigma = (1000.0 * p * (1.0 - p)).sqrt();
        assert!((log.subjects() as f64 - 1000.0 * p).abs() < 4.0 * sigma);
    }

    #[test]
    fn experiment_is_order_independent_and_reproducible() {
        let c = config("point:1", 300, 20, 5);
        let a = run_experiment(&c, &[EstimatorId::MleTotal, EstimatorId::Ambartsumian]).unwrap();
        let b = run_experiment(
            &c,
            &[
                EstimatorId::Ambartsumian,
                EstimatorId::MleTotal,
                EstimatorId::Ambartsumian,
            ],
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.rows.len(), 2);
        let row = a.row(EstimatorId::Ambartsumian).unwrap();
        assert_eq!(row.applicable + row.inapplicable, 20);
        let f = row.violation_fraction.unwrap();
        assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn inapplicable_replications_are_counted() {
        let c = config("point:0.001", 5, 4, 2);
        let r = run_experiment(&c, &[EstimatorId::Ambartsumian]).unwrap();
        let row = &r.rows[0];
        assert_eq!(row.applicable + row.inapplicable, 4);
        assert!(row.inapplicable > 0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = config("point:1", 0, 1, 1);
        assert!(simulate_log(&c, 0).is_err());
        c.population = 5;
        c.replications = 0;
        assert!(run_experiment(&c, &[EstimatorId::Ambartsumian]).is_err());
    }

    proptest! {
        #[test]
        fn gamma_mass_normalizes(alpha in 0.2f64..8.0, beta in 0.2f64..5.0, t in 0.1f64..10.0) {
            let m = MixtureSpec::gamma(alpha, beta).unwrap();
            let table = expected_table(&m, 1.0, t, 1).unwrap();
            let total = table.true_unseen + table.counts.iter().map(|&(_, c)| c).sum::<f64>();
            prop_assert!((1.0 - 1e-9..=1.0 + 1e-12).contains(&total), "{}", total);
        }

        #[test]
        fn holder_margins_are_nonnegative(nu1 in 0.01f64..5.0, nu2 in 0.01f64..5.0, w in 0.05f64..0.95, t in 0.1f64..3.0) {
            let m = MixtureSpec::discrete(vec![(nu1, w), (nu2, 1.0 - w)]).unwrap();
            for (_, margin) in check_holder(&m, t, 10).unwrap() {
                prop_assert!(margin >= HOLDER_FLOOR);
            }
        }
    }
}
