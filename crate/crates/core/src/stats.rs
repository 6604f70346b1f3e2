//! Monte Carlo statistics of gradient ensembles and the closed-form variance
//! predictors they are compared against. Pooled numbers treat every rotation
//! slot of every sampled circuit as one observation; slots replaced by fixed
//! gates contribute an exact literal zero, which is what makes variance track
//! the effective-parameter fraction when slots are knocked out.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{sample_circuit, Circuit, CircuitError, EnsembleSpec, EntanglerPattern, Observable};
use crate::scalar::Scalar;
use crate::simulator::{gradient_commutator, SimError, StateVector};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("need at least 2 samples, got {got}")]
    TooFewSamples { got: usize },
    #[error(transparent)]
    Spec(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("qubit count {n} exceeds the predictor overflow guard of {max}")]
    QubitCountTooLarge { n: usize, max: usize },
    #[error("effective count {m} exceeds the {slots} rotation slots")]
    EffectiveExceedsSlots { m: f64, slots: usize },
    #[error("proportionality constant must exceed 1, got {alpha}")]
    AlphaNotAboveOne { alpha: f64 },
    #[error("alpha fit needs at least {need} observations, got {got}")]
    TooFewObservations { got: usize, need: usize },
    #[error("alpha fit rejected: all observations share one predictor value, no scaling information")]
    DegenerateFit,
    #[error("alpha fit needs positive variances; observation {index} has {variance}")]
    NonPositiveVariance { index: usize, variance: f64 },
}

/// Streaming mean and sum of squared deviations. Merging two accumulators
/// gives the same result as one pass over the concatenated stream, up to
/// roundoff, in any association order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford<F> {
    count: u64,
    mean: F,
    m2: F,
}

impl<F: Scalar> Welford<F> {
    pub fn new() -> Self {
        Self { count: 0, mean: F::zero(), m2: F::zero() }
    }

    pub fn push(&mut self, x: F) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / F::of_usize(self.count as usize);
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&self, other: &Self) -> Self {
        if other.count == 0 {
            return *self;
        }
        if self.count == 0 {
            return *other;
        }
        let total = self.count + other.count;
        let (na, nb) = (F::of_usize(self.count as usize), F::of_usize(other.count as usize));
        let nt = F::of_usize(total as usize);
        let delta = other.mean - self.mean;
        Self {
            count: total,
            mean: self.mean + delta * nb / nt,
            m2: self.m2 + other.m2 + delta * delta * na * nb / nt,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> F {
        self.mean
    }

    /// Population variance M2/N, the estimator implied by
    /// Var = E[x^2] - E[x]^2. Pinned so golden outputs stay stable.
    pub fn variance(&self) -> F {
        if self.count == 0 {
            F::zero()
        } else {
            self.m2 / F::of_usize(self.count as usize)
        }
    }

    pub fn stderr_mean(&self) -> F {
        if self.count == 0 {
            F::zero()
        } else {
            (self.variance() / F::of_usize(self.count as usize)).sqrt()
        }
    }

    /// Standard error of the variance under the Gaussian-sample
    /// approximation, var * sqrt(2/(N-1)).
    pub fn stderr_variance(&self) -> F {
        if self.count < 2 {
            F::zero()
        } else {
            self.variance() * (F::of(2.0) / F::of_usize(self.count as usize - 1)).sqrt()
        }
    }
}

/// Gradient statistics of one sampled ensemble: a pooled accumulator over
/// every rotation slot of every circuit, plus one accumulator per slot
/// (layer-major) for diagnostics.
#[derive(Debug, Clone)]
pub struct GradientStats {
    samples: usize,
    pooled: Welford<f64>,
    per_slot: Vec<Welford<f64>>,
}

impl GradientStats {
    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn pooled(&self) -> &Welford<f64> {
        &self.pooled
    }

    pub fn count(&self) -> u64 {
        self.pooled.count()
    }

    pub fn mean(&self) -> f64 {
        self.pooled.mean()
    }

    pub fn variance(&self) -> f64 {
        self.pooled.variance()
    }

    pub fn stderr_mean(&self) -> f64 {
        self.pooled.stderr_mean()
    }

    pub fn stderr_variance(&self) -> f64 {
        self.pooled.stderr_variance()
    }

    /// Layer-major slot accumulators, one per rotation slot.
    pub fn per_slot(&self) -> &[Welford<f64>] {
        &self.per_slot
    }
}

/// One observation per rotation slot, layer-major: the gradient where the
/// slot carries a parameter, an exact zero where it was replaced.
fn slot_values(c: &Circuit, grad: &[f64]) -> Vec<f64> {
    let mut values = Vec::with_capacity(c.slot_count());
    for layer in &c.layers {
        for rot in &layer.rotations {
            values.push(match rot.param_index {
                Some(k) => grad[k],
                None => 0.0,
            });
        }
    }
    values
}

struct Partial {
    pooled: Welford<f64>,
    per_slot: Vec<Welford<f64>>,
}

/// Samples per chunk in the parallel path. Chunks are accumulated
/// sequentially inside and merged in index order, so results do not depend
/// on thread scheduling.
const CHUNK: usize = 32;

/// Monte Carlo gradient statistics over the ensemble, parallel across
/// sample chunks. Deterministic for a fixed spec.
pub fn estimate(spec: &EnsembleSpec, init: &StateVector<f64>) -> Result<GradientStats, StatsError> {
    estimate_mode(spec, init, false)
}

/// Fully sequential variant: one pass in sample order, guaranteeing
/// bit-identical accumulation for golden outputs.
pub fn estimate_sequential(
    spec: &EnsembleSpec,
    init: &StateVector<f64>,
) -> Result<GradientStats, StatsError> {
    estimate_mode(spec, init, true)
}

pub fn estimate_mode(
    spec: &EnsembleSpec,
    init: &StateVector<f64>,
    sequential: bool,
) -> Result<GradientStats, StatsError> {
    spec.validate()?;
    if spec.samples < 2 {
        return Err(StatsError::TooFewSamples { got: spec.samples });
    }
    let nd = spec.slot_count();
    let constant_loss = spec.observable.is_identity();

    let run_chunk = |start: usize, end: usize| -> Result<Partial, StatsError> {
        let mut pooled = Welford::new();
        let mut per_slot = vec![Welford::new(); nd];
        for index in start..end {
            let c = sample_circuit(spec, index);
            let values = if constant_loss {
                // identity observable: the loss is constant, every gradient
                // is identically zero, no sweep needed
                vec![0.0; nd]
            } else {
                let grad = gradient_commutator(&c, &spec.observable, init)?;
                slot_values(&c, &grad)
            };
            for (slot, v) in values.into_iter().enumerate() {
                pooled.push(v);
                per_slot[slot].push(v);
            }
        }
        Ok(Partial { pooled, per_slot })
    };

    let partials: Vec<Result<Partial, StatsError>> = if sequential {
        vec![run_chunk(0, spec.samples)]
    } else {
        (0..spec.samples)
            .step_by(CHUNK)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&start| run_chunk(start, (start + CHUNK).min(spec.samples)))
            .collect()
    };

    let mut pooled = Welford::new();
    let mut per_slot = vec![Welford::new(); nd];
    for partial in partials {
        let partial = partial?;
        pooled = pooled.merge(&partial.pooled);
        for (acc, part) in per_slot.iter_mut().zip(&partial.per_slot) {
            *acc = acc.merge(part);
        }
    }
    Ok(GradientStats { samples: spec.samples, pooled, per_slot })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PredictorModel {
    #[serde(rename = "weingarten_eq6")]
    Weingarten,
    #[serde(rename = "direct_eq12")]
    Direct,
}

/// A closed-form variance prediction with its inputs echoed, so reports can
/// show exactly what was plugged in.
#[derive(Debug, Clone, Serialize)]
pub struct TheoryPrediction {
    pub model: PredictorModel,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tr_o2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tr_rho2: Option<f64>,
}

const PREDICTOR_MAX_N: usize = 20;

/// Variance prediction from the unitary-average identity:
/// Tr{O^2} Tr{rho^2} / (2^{3n} - 2^n).
pub fn predict_weingarten(n: usize, tr_o2: f64, tr_rho2: f64) -> Result<TheoryPrediction, StatsError> {
    if n > PREDICTOR_MAX_N {
        return Err(StatsError::QubitCountTooLarge { n, max: PREDICTOR_MAX_N });
    }
    let denom = 2.0f64.powi(3 * n as i32) - 2.0f64.powi(n as i32);
    Ok(TheoryPrediction {
        model: PredictorModel::Weingarten,
        value: tr_o2 * tr_rho2 / denom,
        alpha: None,
        n,
        d: None,
        m: None,
        tr_o2: Some(tr_o2),
        tr_rho2: Some(tr_rho2),
    })
}

/// Variance prediction from the effective-parameter scaling law:
/// (alpha - 1) m / (2^{3n+1} n d), with alpha a fitted constant.
pub fn predict_direct(n: usize, d: usize, m: usize, alpha: f64) -> Result<TheoryPrediction, StatsError> {
    if n > PREDICTOR_MAX_N {
        return Err(StatsError::QubitCountTooLarge { n, max: PREDICTOR_MAX_N });
    }
    if m > n * d {
        return Err(StatsError::EffectiveExceedsSlots { m: m as f64, slots: n * d });
    }
    if alpha <= 1.0 {
        return Err(StatsError::AlphaNotAboveOne { alpha });
    }
    let denom = 2.0f64.powi(3 * n as i32 + 1) * (n * d) as f64;
    Ok(TheoryPrediction {
        model: PredictorModel::Direct,
        value: (alpha - 1.0) * m as f64 / denom,
        alpha: Some(alpha),
        n,
        d: Some(d),
        m: Some(m),
        tr_o2: None,
        tr_rho2: None,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct VarianceObservation {
    pub n: usize,
    pub d: usize,
    /// effective rotation count, fractional when averaged over an ensemble
    pub m: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlphaFit {
    pub alpha: f64,
    /// root-mean-square residual of log(variance) after the fit
    pub residual_rms: f64,
    pub observations: usize,
}

/// Least-squares fit of the proportionality constant in the scaling law:
/// log(variance) = log(alpha - 1) + log(m / (2^{3n+1} n d)) has a single
/// unknown intercept, so the fit is the mean log-offset.
pub fn fit_alpha(observations: &[VarianceObservation]) -> Result<AlphaFit, StatsError> {
    const NEED: usize = 3;
    if observations.len() < NEED {
        return Err(StatsError::TooFewObservations { got: observations.len(), need: NEED });
    }
    let mut offsets = Vec::with_capacity(observations.len());
    let mut bases = Vec::with_capacity(observations.len());
    for (index, obs) in observations.iter().enumerate() {
        if obs.n > PREDICTOR_MAX_N {
            return Err(StatsError::QubitCountTooLarge { n: obs.n, max: PREDICTOR_MAX_N });
        }
        if obs.m > (obs.n * obs.d) as f64 {
            return Err(StatsError::EffectiveExceedsSlots { m: obs.m, slots: obs.n * obs.d });
        }
        if obs.variance <= 0.0 || obs.m <= 0.0 {
            return Err(StatsError::NonPositiveVariance { index, variance: obs.variance });
        }
        let base = obs.m / (2.0f64.powi(3 * obs.n as i32 + 1) * (obs.n * obs.d) as f64);
        bases.push(base);
        offsets.push(obs.variance.ln() - base.ln());
    }
    if bases.iter().all(|&b| b == bases[0]) {
        return Err(StatsError::DegenerateFit);
    }
    let intercept = offsets.iter().sum::<f64>() / offsets.len() as f64;
    let residual_rms = (offsets.iter().map(|o| (o - intercept).powi(2)).sum::<f64>()
        / offsets.len() as f64)
        .sqrt();
    Ok(AlphaFit { alpha: 1.0 + intercept.exp(), residual_rms, observations: observations.len() })
}

/// One row of the expectation-scaling table: how the pooled mean gradient
/// shrinks with qubit count, against the 3^{-n} envelope.
#[derive(Debug, Clone, Serialize)]
pub struct ExpectationScalingRow {
    pub n: usize,
    pub d: usize,
    pub samples: usize,
    pub pooled_mean: f64,
    pub stderr_mean: f64,
    /// |mean| > 0 at machine precision; a continuous estimator never lands
    /// on zero exactly
    pub nonzero: bool,
    /// the comparison envelope 3^{-n}
    pub scale_3_to_minus_n: f64,
    pub abs_mean_over_scale: f64,
}

/// Pooled mean gradient per qubit count on brick circuits measuring Z on
/// every qubit, at one fixed depth. Deep circuits (d well above 10n) give
/// the cleanest scaling.
pub fn expectation_scaling_report(
    n_list: &[usize],
    d: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<ExpectationScalingRow>, StatsError> {
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let spec = EnsembleSpec {
            n,
            d,
            entangler_pattern: EntanglerPattern::Brick,
            observable: Observable::all_z(n),
            replacement_mode: crate::circuit::ReplacementMode::None,
            replacement_fraction: 0.0,
            samples,
            master_seed: seed,
        };
        let stats = estimate(&spec, &StateVector::zero_state(n))?;
        let scale = 3.0f64.powi(-(n as i32));
        rows.push(ExpectationScalingRow {
            n,
            d,
            samples,
            pooled_mean: stats.mean(),
            stderr_mean: stats.stderr_mean(),
            nonzero: stats.mean() != 0.0,
            scale_3_to_minus_n: scale,
            abs_mean_over_scale: stats.mean().abs() / scale,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::ReplacementMode;
    use proptest::prelude::*;

    fn spec(n: usize, d: usize, samples: usize, seed: u64) -> EnsembleSpec {
        EnsembleSpec {
            n,
            d,
            entangler_pattern: EntanglerPattern::Brick,
            observable: Observable::all_z(n),
            replacement_mode: ReplacementMode::None,
            replacement_fraction: 0.0,
            samples,
            master_seed: seed,
        }
    }

    #[test]
    fn welford_matches_hand_computed_moments() {
        let mut w = Welford::<f64>::new();
        for x in [1.0, 2.0, 3.0, 4.0] {
            w.push(x);
        }
        assert_eq!(w.count(), 4);
        assert!((w.mean() - 2.5).abs() <= 1e-15);
        assert!((w.variance() - 1.25).abs() <= 1e-15);
        assert!((w.stderr_mean() - (1.25f64 / 4.0).sqrt()).abs() <= 1e-15);
        assert!((w.stderr_variance() - 1.25 * (2.0f64 / 3.0).sqrt()).abs() <= 1e-15);

        let empty = Welford::<f64>::new();
        assert_eq!(empty.variance(), 0.0);
        assert_eq!(empty.merge(&w).count(), 4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn welford_merge_is_associative(
            xs in proptest::collection::vec(-1e3f64..1e3, 1..40),
            ys in proptest::collection::vec(-1e3f64..1e3, 1..40),
            zs in proptest::collection::vec(-1e3f64..1e3, 1..40),
        ) {
            let acc = |v: &[f64]| {
                let mut w = Welford::<f64>::new();
                for &x in v {
                    w.push(x);
                }
                w
            };
            let (a, b, c) = (acc(&xs), acc(&ys), acc(&zs));
            let left = a.merge(&b).merge(&c);
            let right = a.merge(&b.merge(&c));
            let scale = left.variance().abs().max(1.0);
            prop_assert!((left.mean() - right.mean()).abs() <= 1e-12 * left.mean().abs().max(1.0));
            prop_assert!((left.variance() - right.variance()).abs() <= 1e-12 * scale);
            prop_assert_eq!(left.count(), right.count());
        }

        #[test]
        fn streaming_variance_equals_two_pass(
            xs in proptest::collection::vec(-1e3f64..1e3, 2..200),
        ) {
            let mut w = Welford::<f64>::new();
            for &x in &xs {
                w.push(x);
            }
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
            prop_assert!((w.mean() - mean).abs() <= 1e-12 * mean.abs().max(1.0));
            prop_assert!((w.variance() - var).abs() <= 1e-12 * var.max(1.0));
        }
    }

    #[test]
    fn single_slot_ensemble_variance_sits_at_one_third() {
        // one RY/RX/RZ slot on |0> measuring Z: the per-axis average of
        // E[(dL/dtheta)^2] is (1/2 + 1/2 + 0)/3 = 1/3; the band is +-5
        // standard errors around that at 10k samples
        let stats = estimate(&spec(1, 1, 10_000, 404), &StateVector::zero_state(1)).unwrap();
        assert!(stats.variance() >= 0.30 && stats.variance() <= 0.37, "var = {}", stats.variance());
        assert_eq!(stats.count(), 10_000);
    }

    #[test]
    fn identity_observable_gives_exact_zeros() {
        let mut s = spec(2, 3, 50, 7);
        s.observable = Observable::parse("II").unwrap();
        let stats = estimate(&s, &StateVector::zero_state(2)).unwrap();
        assert_eq!(stats.mean(), 0.0);
        assert_eq!(stats.variance(), 0.0);
        assert_eq!(stats.count(), 50 * 6);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let s = spec(2, 4, 130, 11);
        let init = StateVector::zero_state(2);
        let seq = estimate_sequential(&s, &init).unwrap();
        let seq2 = estimate_sequential(&s, &init).unwrap();
        assert_eq!(seq.mean().to_bits(), seq2.mean().to_bits());
        assert_eq!(seq.variance().to_bits(), seq2.variance().to_bits());

        let par = estimate(&s, &init).unwrap();
        assert!((seq.mean() - par.mean()).abs() <= 1e-12);
        assert!((seq.variance() - par.variance()).abs() <= 1e-12 * seq.variance().max(1e-30));
        assert_eq!(seq.count(), par.count());
    }

    #[test]
    fn pooled_statistics_match_two_pass_recomputation() {
        let s = spec(2, 3, 60, 13);
        let init = StateVector::zero_state(2);
        let stats = estimate(&s, &init).unwrap();

        let mut raw = Vec::new();
        for index in 0..s.samples {
            let c = sample_circuit(&s, index);
            let grad = gradient_commutator(&c, &s.observable, &init).unwrap();
            raw.extend(slot_values(&c, &grad));
        }
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        let var = raw.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / raw.len() as f64;
        assert_eq!(stats.count() as usize, raw.len());
        assert!((stats.mean() - mean).abs() <= 1e-12 * mean.abs().max(1.0));
        assert!((stats.variance() - var).abs() <= 1e-12 * var.max(1.0));
    }

    #[test]
    fn replaced_slots_still_count_as_observations() {
        let mut s = spec(2, 4, 40, 19);
        s.replacement_mode = ReplacementMode::Identity;
        s.replacement_fraction = 0.5;
        let stats = estimate(&s, &StateVector::zero_state(2)).unwrap();
        // pooled count covers all slots, zeros included
        assert_eq!(stats.count(), 40 * 8);
        assert_eq!(stats.per_slot().len(), 8);
        let slot_total: u64 = stats.per_slot().iter().map(|w| w.count()).sum();
        assert_eq!(slot_total, stats.count());
    }

    #[test]
    fn too_few_samples_is_rejected() {
        let s = spec(1, 1, 1, 0);
        assert!(matches!(
            estimate(&s, &StateVector::zero_state(1)),
            Err(StatsError::TooFewSamples { got: 1 })
        ));
    }

    #[test]
    fn weingarten_predictor_values_and_scaling() {
        let p = predict_weingarten(2, 4.0, 1.0).unwrap();
        assert!((p.value - 4.0 / 60.0).abs() <= 1e-15);
        assert_eq!(p.model, PredictorModel::Weingarten);

        let p = predict_weingarten(1, 2.0, 1.0).unwrap();
        assert!((p.value - 2.0 / 6.0).abs() <= 1e-15);

        // ratio of consecutive n tends to 1/8
        let a = predict_weingarten(15, 1.0, 1.0).unwrap().value;
        let b = predict_weingarten(16, 1.0, 1.0).unwrap().value;
        assert!((b / a - 0.125).abs() <= 1e-4);

        assert!(predict_weingarten(20, 1.0, 1.0).is_ok());
        assert!(matches!(
            predict_weingarten(21, 1.0, 1.0),
            Err(StatsError::QubitCountTooLarge { n: 21, max: 20 })
        ));
    }

    #[test]
    fn direct_predictor_tracks_its_inputs() {
        let base = predict_direct(3, 10, 12, 3.0).unwrap().value;
        assert!(base > 0.0);

        let deeper = predict_direct(3, 20, 12, 3.0).unwrap().value;
        assert!((deeper - base / 2.0).abs() <= 1e-18);

        let half_m = predict_direct(3, 10, 6, 3.0).unwrap().value;
        assert!((half_m - base / 2.0).abs() <= 1e-18);

        let next_n = predict_direct(4, 10, 12, 3.0).unwrap().value;
        assert!((next_n / base - 3.0 / (8.0 * 4.0)).abs() <= 1e-15);

        assert!(matches!(
            predict_direct(2, 3, 7, 3.0),
            Err(StatsError::EffectiveExceedsSlots { slots: 6, .. })
        ));
        assert!(matches!(predict_direct(2, 3, 6, 1.0), Err(StatsError::AlphaNotAboveOne { .. })));
    }

    #[test]
    fn alpha_fit_round_trips_synthetic_data() {
        let obs: Vec<VarianceObservation> = [(2usize, 10usize, 15usize), (3, 12, 30), (4, 20, 64)]
            .iter()
            .map(|&(n, d, m)| VarianceObservation {
                n,
                d,
                m: m as f64,
                variance: predict_direct(n, d, m, 3.0).unwrap().value,
            })
            .collect();
        let fit = fit_alpha(&obs).unwrap();
        assert!((fit.alpha - 3.0).abs() <= 1e-6);
        assert!(fit.residual_rms <= 1e-12);

        assert!(matches!(
            fit_alpha(&obs[..1]),
            Err(StatsError::TooFewObservations { got: 1, need: 3 })
        ));

        let same = vec![obs[0]; 3];
        assert!(matches!(fit_alpha(&same), Err(StatsError::DegenerateFit)));

        let mut bad = obs.clone();
        bad[1].variance = 0.0;
        assert!(matches!(fit_alpha(&bad), Err(StatsError::NonPositiveVariance { index: 1, .. })));
    }

    #[test]
    fn scaling_report_emits_comparable_rows() {
        let rows = expectation_scaling_report(&[1, 2], 6, 60, 505).unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            assert!(row.nonzero, "finite MC mean should not be exactly zero");
            assert!((row.abs_mean_over_scale
                - row.pooled_mean.abs() / row.scale_3_to_minus_n)
                .abs()
                <= 1e-18);
        }
        assert!((rows[0].scale_3_to_minus_n - 1.0 / 3.0).abs() <= 1e-15);
        assert!((rows[1].scale_3_to_minus_n - 1.0 / 9.0).abs() <= 1e-15);
    }
}
