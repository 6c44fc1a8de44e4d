//! Learning loops: multileave gradient descent over a linear model (MGD),
//! over a reference-similarity model (Sim-MGD), and the two-stage cascade
//! that starts with the similarity model and switches to the linear model
//! once the weights stop moving (C-MGD).

use std::collections::VecDeque;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::clicks::{simulate_clicks, ClickModelParams};
use crate::error::{Error, Result};
use crate::evaluation::{ndcg_at_k, online_performance, DEFAULT_CUTOFF, DEFAULT_DISCOUNT};
use crate::letor::{Dataset, QueryGroup};
use crate::multileaving::{Comparison, RankingSlate};
use crate::ranking::{
    convert_sim_to_linear, select_references_kmeans, select_references_uniform, LinearModel, RankerModel, ReferenceSet,
    SelectionMethod, SimilarityModel,
};
use crate::scalar::{dot, l2_norm, Scalar};

pub const DEFAULT_CANDIDATES: usize = 19;
pub const DEFAULT_HISTORY_WINDOW: usize = 200;
pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_RECORD_EVERY: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig<T> {
    /// Candidates per impression (n).
    pub candidates: usize,
    /// Distance of each candidate from the current best (δ).
    pub radius: T,
    /// Update step size (η).
    pub step_size: T,
    /// Number of displayed documents (κ), also the NDCG cutoff.
    pub cutoff: usize,
    /// Convergence window in impressions (h).
    pub history_window: usize,
    /// Convergence threshold on `1 - cos` (ε).
    pub epsilon: T,
    /// Online performance discount (γ).
    pub discount: T,
    pub comparison: Comparison,
    /// Held-out NDCG is recorded every this many impressions and at the end.
    pub record_every: usize,
}

impl<T: Scalar> Default for EngineConfig<T> {
    fn default() -> Self {
        EngineConfig {
            candidates: DEFAULT_CANDIDATES,
            radius: T::one(),
            step_size: T::of(0.01),
            cutoff: DEFAULT_CUTOFF,
            history_window: DEFAULT_HISTORY_WINDOW,
            epsilon: T::of(DEFAULT_EPSILON),
            discount: T::of(DEFAULT_DISCOUNT),
            comparison: Comparison::default(),
            record_every: DEFAULT_RECORD_EVERY,
        }
    }
}

impl<T: Scalar> EngineConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidConfig(m));
        if self.candidates == 0 {
            return fail("candidates must be at least 1".into());
        }
        if !(self.radius > T::zero()) {
            return fail(format!("radius must be positive, got {}", self.radius));
        }
        if !(self.step_size > T::zero()) {
            return fail(format!("step_size must be positive, got {}", self.step_size));
        }
        if self.cutoff == 0 {
            return fail("cutoff must be at least 1".into());
        }
        if self.history_window == 0 {
            return fail("history_window must be at least 1".into());
        }
        // ε = 0 is accepted: it disables the switch.
        if !(self.epsilon >= T::zero() && self.epsilon < T::one()) {
            return fail(format!("epsilon must be in [0, 1), got {}", self.epsilon));
        }
        if !(self.discount > T::zero() && self.discount <= T::one()) {
            return fail(format!("discount must be in (0, 1], got {}", self.discount));
        }
        if self.record_every == 0 {
            return fail("record_every must be at least 1".into());
        }
        if let Comparison::Probabilistic { samples, tau } = self.comparison {
            if samples == 0 {
                return fail("inference samples must be at least 1".into());
            }
            if !(tau > 0.0) {
                return fail(format!("tau must be positive, got {tau}"));
            }
        }
        Ok(())
    }
}

/// Which model space the current best lives in: the similarity model is the
/// simple space, the linear model the complex one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Simple,
    Complex,
}

impl Phase {
    pub fn of<T: Scalar>(model: &RankerModel<T>) -> Phase {
        match model {
            RankerModel::Similarity(_) => Phase::Simple,
            RankerModel::Linear(_) => Phase::Complex,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Simple => "simple",
            Phase::Complex => "complex",
        }
    }
}

/// The current best weights after each of the last `h + 1` impressions,
/// i.e. `w_{t-h} ..= w_t`, where `w_0` is the initial model.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightHistory<T> {
    t: usize,
    window: VecDeque<Vec<T>>,
    capacity: usize,
}

impl<T: Scalar> WeightHistory<T> {
    pub fn new(h: usize, initial: Vec<T>) -> Self {
        let mut window = VecDeque::with_capacity(h + 1);
        window.push_back(initial);
        WeightHistory {
            t: 0,
            window,
            capacity: h + 1,
        }
    }

    /// Records the weights after the next impression.
    pub fn push(&mut self, weights: Vec<T>) {
        if self.window.len() == self.capacity {
            self.window.pop_front();
        }
        self.window.push_back(weights);
        self.t += 1;
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    pub fn latest(&self) -> &[T] {
        self.window.back().expect("history always holds the latest weights")
    }

    /// `w_{t-h}` if it is still in the window.
    pub fn lagged(&self, h: usize) -> Option<&[T]> {
        let back = self.window.len().checked_sub(1 + h)?;
        self.window.get(back).map(Vec::as_slice)
    }
}

/// True when `t >= h`, both `w_t` and `w_{t-h}` are nonzero, and
/// `1 - cos(w_t, w_{t-h}) < ε`.
pub fn detect_convergence<T: Scalar>(history: &WeightHistory<T>, h: usize, epsilon: T) -> bool {
    if history.t() < h {
        return false;
    }
    let Some(old) = history.lagged(h) else {
        return false;
    };
    let new = history.latest();
    let (na, nb) = (l2_norm(new), l2_norm(old));
    if !(na > T::zero() && nb > T::zero()) {
        return false;
    }
    let cos = (dot(new, old) / (na * nb)).min(T::one());
    T::one() - cos < epsilon
}

#[derive(Debug, Clone)]
pub struct EngineState<T> {
    pub current_best: RankerModel<T>,
    pub history: WeightHistory<T>,
    pub phase: Phase,
}

impl<T: Scalar> EngineState<T> {
    pub fn new(initial: RankerModel<T>, h: usize) -> Self {
        let phase = Phase::of(&initial);
        let history = WeightHistory::new(h, initial.weights().to_vec());
        EngineState {
            current_best: initial,
            history,
            phase,
        }
    }

    pub fn t(&self) -> usize {
        self.history.t()
    }

    /// Convergence check restricted to the simple phase.
    pub fn converged(&self, h: usize, epsilon: T) -> bool {
        self.phase == Phase::Simple && detect_convergence(&self.history, h, epsilon)
    }
}

/// Moves a similarity-model state into the linear space. The converted
/// weights are rescaled to norm `‖w_simple‖ · √D_simple / √D_complex`; a zero
/// conversion is carried over unscaled.
pub fn cascade_switch<T: Scalar>(
    state: &EngineState<T>,
    d_simple: usize,
    d_complex: usize,
    h: usize,
) -> Result<EngineState<T>> {
    let RankerModel::Similarity(sim) = &state.current_best else {
        return Err(Error::AlreadySwitched);
    };
    if state.phase != Phase::Simple {
        return Err(Error::AlreadySwitched);
    }
    let converted = convert_sim_to_linear(sim);
    let converted_norm = l2_norm(&converted.weights);
    let weights = if converted_norm > T::zero() {
        let scale = l2_norm(&sim.weights) / converted_norm * (T::of(d_simple as f64) / T::of(d_complex as f64)).sqrt();
        converted.weights.iter().map(|&w| w * scale).collect()
    } else {
        converted.weights
    };
    let model = RankerModel::Linear(LinearModel { weights });
    Ok(EngineState {
        history: WeightHistory {
            t: state.t(),
            window: VecDeque::from([model.weights().to_vec()]),
            capacity: h + 1,
        },
        current_best: model,
        phase: Phase::Complex,
    })
}

/// Isotropic unit vector: normalized standard normal coordinates.
pub fn sample_unit_vector<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<T> {
    assert!(dim >= 1, "unit vectors need at least one dimension");
    loop {
        let v: Vec<T> = (0..dim).map(|_| T::of(rng.sample::<f64, _>(StandardNormal))).collect();
        let norm = l2_norm(&v);
        if norm > T::zero() {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// `w + η · mean(winning directions)`; unchanged when nobody won.
pub fn apply_update<T: Scalar>(weights: &[T], directions: &[Vec<T>], winners: &[usize], step_size: T) -> Vec<T> {
    if winners.is_empty() {
        return weights.to_vec();
    }
    let scale = step_size / T::of(winners.len() as f64);
    let mut sum = vec![T::zero(); weights.len()];
    for &j in winners {
        for (s, &u) in sum.iter_mut().zip(&directions[j - 1]) {
            *s = *s + u;
        }
    }
    weights.iter().zip(sum).map(|(&w, s)| w + scale * s).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpressionRecord<T> {
    pub t: usize,
    pub displayed_ndcg: T,
    pub offline_ndcg: Option<T>,
    pub winners: usize,
    pub phase: Phase,
}

/// Everything one impression produced, for inspection in tests.
#[derive(Debug, Clone)]
pub struct StepOutcome<T> {
    pub record: ImpressionRecord<T>,
    /// Unit directions of candidates 1..=n.
    pub directions: Vec<Vec<T>>,
    pub winners: Vec<usize>,
    pub displayed: Vec<usize>,
    pub clamped: usize,
}

/// One impression: rank with the current best and n candidates at distance
/// δ, multileave, simulate clicks, infer winners and step toward them.
pub fn mgd_step<T: Scalar, R: Rng + ?Sized>(
    state: &mut EngineState<T>,
    qg: &QueryGroup<T>,
    cfg: &EngineConfig<T>,
    click_model: &ClickModelParams,
    rng: &mut R,
) -> StepOutcome<T> {
    let dim = state.current_best.dimensionality();
    let base = state.current_best.weights().to_vec();
    let mut lists = Vec::with_capacity(cfg.candidates + 1);
    lists.push(state.current_best.rank(qg));
    let mut directions = Vec::with_capacity(cfg.candidates);
    for _ in 0..cfg.candidates {
        let u: Vec<T> = sample_unit_vector(dim, rng);
        let candidate: Vec<T> = base.iter().zip(&u).map(|(&w, &x)| w + cfg.radius * x).collect();
        lists.push(state.current_best.with_weights(candidate).rank(qg));
        directions.push(u);
    }
    let slate = RankingSlate::new(lists);
    let outcome = cfg.comparison.multileave(&slate, cfg.cutoff, rng);
    let relevances: Vec<u32> = outcome.displayed.iter().map(|&d| qg.documents[d].relevance).collect();
    let simulated = simulate_clicks(click_model, &relevances, rng);
    let winners = cfg.comparison.infer(&outcome, &simulated.clicks, rng);

    let updated = apply_update(&base, &directions, &winners, cfg.step_size);
    state.current_best = state.current_best.with_weights(updated.clone());
    state.history.push(updated);

    let record = ImpressionRecord {
        t: state.t(),
        displayed_ndcg: ndcg_at_k(&relevances, &qg.relevances(), cfg.cutoff),
        offline_ndcg: None,
        winners: winners.len(),
        phase: state.phase,
    };
    StepOutcome {
        record,
        directions,
        winners,
        displayed: outcome.displayed,
        clamped: simulated.clamped,
    }
}

/// Training and held-out queries of one fold.
#[derive(Debug, Clone)]
pub struct TrainTest<'a, T> {
    pub train: Vec<&'a QueryGroup<T>>,
    pub test: Vec<&'a QueryGroup<T>>,
    pub dimensionality: usize,
}

impl<'a, T: Scalar> TrainTest<'a, T> {
    pub fn from_fold(ds: &'a Dataset<T>, fold: usize) -> Result<Self> {
        let f = ds
            .fold(fold)
            .ok_or_else(|| Error::InvalidConfig(format!("dataset has no fold {}", fold + 1)))?;
        TrainTest::new(
            ds.select(&f.train).collect(),
            ds.select(&f.test).collect(),
            ds.dimensionality(),
        )
    }

    pub fn new(train: Vec<&'a QueryGroup<T>>, test: Vec<&'a QueryGroup<T>>, dimensionality: usize) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::InvalidConfig("fold has no training queries".into()));
        }
        if test.is_empty() {
            return Err(Error::InvalidConfig("fold has no held-out test queries".into()));
        }
        Ok(TrainTest {
            train,
            test,
            dimensionality,
        })
    }
}

/// Mean NDCG@k of `model` over `queries`, and how many of them have no
/// relevant document (those score 0).
pub fn offline_ndcg<T: Scalar>(model: &RankerModel<T>, queries: &[&QueryGroup<T>], k: usize) -> (T, usize) {
    let mut total = T::zero();
    let mut zero_ideal = 0;
    for q in queries {
        let pool = q.relevances();
        if pool.iter().all(|&g| g == 0) {
            zero_ideal += 1;
        }
        let ranked: Vec<u32> = model.rank(q).into_iter().map(|i| pool[i]).collect();
        total = total + ndcg_at_k(&ranked, &pool, k);
    }
    (total / T::of(queries.len() as f64), zero_ideal)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct RunTrace<T> {
    pub records: Vec<ImpressionRecord<T>>,
    pub online_performance: T,
    pub final_offline_ndcg: T,
    pub switch_impression: Option<usize>,
    pub final_model: RankerModel<T>,
    /// Held-out queries without relevant documents, scored as 0.
    pub zero_ideal_queries: usize,
    pub clamped_grades: usize,
}

impl<T: Scalar> RunTrace<T> {
    /// Offline NDCG recorded at impression `t`, if one was.
    pub fn offline_at(&self, t: usize) -> Option<T> {
        self.records.get(t.checked_sub(1)?).and_then(|r| r.offline_ndcg)
    }
}

/// Where the similarity model's references come from.
#[derive(Debug, Clone)]
pub enum References<T> {
    Sample { count: usize, method: SelectionMethod },
    Fixed(Arc<ReferenceSet<T>>),
}

impl<T: Scalar> References<T> {
    pub fn resolve<R: Rng + ?Sized>(&self, train: &[&QueryGroup<T>], rng: &mut R) -> Result<Arc<ReferenceSet<T>>> {
        match self {
            References::Sample { count, method } => Ok(Arc::new(match method {
                SelectionMethod::Uniform => select_references_uniform(train, *count, rng)?,
                SelectionMethod::Kmeans => select_references_kmeans(train, *count, rng)?,
            })),
            References::Fixed(refs) => Ok(Arc::clone(refs)),
        }
    }
}

fn run_loop<T: Scalar, R: Rng + ?Sized>(
    data: &TrainTest<'_, T>,
    cfg: &EngineConfig<T>,
    initial: RankerModel<T>,
    cascade: bool,
    click_model: &ClickModelParams,
    impressions: usize,
    rng: &mut R,
) -> Result<RunTrace<T>> {
    cfg.validate()?;
    click_model.validate()?;
    if impressions == 0 {
        return Err(Error::InvalidConfig("impressions must be at least 1".into()));
    }
    if initial.feature_dimensionality() != data.dimensionality {
        return Err(Error::DimensionMismatch {
            expected: data.dimensionality,
            actual: initial.feature_dimensionality(),
        });
    }
    let d_simple = initial.dimensionality();
    let mut state = EngineState::new(initial, cfg.history_window);
    let mut records = Vec::with_capacity(impressions);
    let mut switch_impression = None;
    let mut clamped_grades = 0;
    let mut zero_ideal_queries = 0;
    for t in 1..=impressions {
        let qg = data.train[rng.random_range(0..data.train.len())];
        let step = mgd_step(&mut state, qg, cfg, click_model, rng);
        clamped_grades += step.clamped;
        let mut record = step.record;
        if cascade && state.converged(cfg.history_window, cfg.epsilon) {
            state = cascade_switch(&state, d_simple, data.dimensionality, cfg.history_window)?;
            switch_impression = Some(t);
        }
        if t % cfg.record_every == 0 || t == impressions {
            let (score, zero) = offline_ndcg(&state.current_best, &data.test, cfg.cutoff);
            record.offline_ndcg = Some(score);
            zero_ideal_queries = zero;
        }
        records.push(record);
    }
    let displayed: Vec<T> = records.iter().map(|r| r.displayed_ndcg).collect();
    let final_offline_ndcg = records
        .last()
        .and_then(|r| r.offline_ndcg)
        .expect("the last impression is always evaluated");
    Ok(RunTrace {
        online_performance: online_performance(&displayed, cfg.discount),
        final_offline_ndcg,
        switch_impression,
        final_model: state.current_best,
        zero_ideal_queries,
        clamped_grades,
        records,
    })
}

/// MGD over the linear model, starting from the zero vector.
pub fn run_mgd<T: Scalar, R: Rng + ?Sized>(
    data: &TrainTest<'_, T>,
    cfg: &EngineConfig<T>,
    click_model: &ClickModelParams,
    impressions: usize,
    rng: &mut R,
) -> Result<RunTrace<T>> {
    let initial = RankerModel::Linear(LinearModel::zeros(data.dimensionality));
    run_loop(data, cfg, initial, false, click_model, impressions, rng)
}

/// MGD over the similarity model. References are resolved once, before the
/// first impression.
pub fn run_sim_mgd<T: Scalar, R: Rng + ?Sized>(
    data: &TrainTest<'_, T>,
    cfg: &EngineConfig<T>,
    refs: &References<T>,
    click_model: &ClickModelParams,
    impressions: usize,
    rng: &mut R,
) -> Result<RunTrace<T>> {
    let refs = refs.resolve(&data.train, rng)?;
    let initial = RankerModel::Similarity(SimilarityModel::zeros(refs));
    run_loop(data, cfg, initial, false, click_model, impressions, rng)
}

/// Sim-MGD until convergence is detected, then MGD in the linear space for
/// the remaining impressions.
pub fn run_cmgd<T: Scalar, R: Rng + ?Sized>(
    data: &TrainTest<'_, T>,
    cfg: &EngineConfig<T>,
    refs: &References<T>,
    click_model: &ClickModelParams,
    impressions: usize,
    rng: &mut R,
) -> Result<RunTrace<T>> {
    let refs = refs.resolve(&data.train, rng)?;
    let initial = RankerModel::Similarity(SimilarityModel::zeros(refs));
    run_loop(data, cfg, initial, true, click_model, impressions, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::SelectionMethod;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn history_of(vectors: &[Vec<f64>], h: usize) -> WeightHistory<f64> {
        let mut hist = WeightHistory::new(h, vectors[0].clone());
        for v in &vectors[1..] {
            hist.push(v.clone());
        }
        hist
    }

    #[test]
    fn convergence_cases() {
        let same = history_of(&[vec![1.0, 2.0], vec![1.0, 2.0]], 1);
        assert!(detect_convergence(&same, 1, 1e-12));

        let orthogonal = history_of(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1);
        assert!(!detect_convergence(&orthogonal, 1, 0.5));

        let near = history_of(&[vec![1.0, 0.0], vec![1.0, 0.1]], 1);
        let gap = 1.0 - 1.0 / 1.01f64.sqrt();
        assert!((gap - 0.00496).abs() < 1e-5);
        assert!(detect_convergence(&near, 1, 0.01));
        assert!(!detect_convergence(&near, 1, 0.004));

        let zero_start = history_of(&[vec![0.0, 0.0], vec![1.0, 0.0]], 1);
        assert!(!detect_convergence(&zero_start, 1, 0.99));

        let too_early = history_of(&[vec![1.0, 0.0], vec![1.0, 0.0]], 2);
        assert!(!detect_convergence(&too_early, 2, 0.5));
    }

    #[test]
    fn history_keeps_h_plus_one() {
        let mut hist = WeightHistory::new(3, vec![0.0]);
        for i in 1..=10 {
            hist.push(vec![i as f64]);
            assert!(hist.len() <= 4);
            assert_eq!(hist.latest(), &[i as f64]);
        }
        assert_eq!(hist.lagged(3), Some(&[7.0][..]));
        assert_eq!(hist.lagged(4), None);
    }

    #[test]
    fn unit_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for dim in 1..20 {
            let v: Vec<f64> = sample_unit_vector(dim, &mut rng);
            assert!((l2_norm(&v) - 1.0).abs() < 1e-9);
        }
        let draws = 10_000;
        let positive = (0..draws)
            .filter(|_| sample_unit_vector::<f64, _>(1, &mut rng)[0] > 0.0)
            .count();
        assert!((positive as f64 / draws as f64 - 0.5).abs() < 0.02);
        for _ in 0..100 {
            let v = sample_unit_vector::<f64, _>(1, &mut rng)[0];
            assert!(v == 1.0 || v == -1.0);
        }
    }

    #[test]
    fn isotropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let mut mean = [0.0; 3];
        for _ in 0..n {
            let v: Vec<f64> = sample_unit_vector(3, &mut rng);
            for (m, x) in mean.iter_mut().zip(v) {
                *m += x / n as f64;
            }
        }
        assert!(l2_norm(&mean) < 0.02);
    }

    #[test]
    fn update_rule() {
        let w = vec![0.5, -0.5];
        let dirs = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(apply_update(&w, &dirs, &[], 0.01), w);
        assert_eq!(apply_update(&w, &dirs, &[2], 0.01), vec![0.5, -0.5 + 0.01]);
        assert_eq!(apply_update(&w, &dirs, &[1, 2], 0.01), vec![0.5 + 0.005, -0.5 + 0.005]);
    }

    #[test]
    fn switch_rescales() {
        let refs = Arc::new(
            ReferenceSet::new(
                (0..4)
                    .map(|i| {
                        let mut v = vec![0.0; 16];
                        v[i] = 1.0;
                        v
                    })
                    .collect(),
                SelectionMethod::Uniform,
            )
            .unwrap(),
        );
        let sim = SimilarityModel::new(vec![1.0, 1.0, 1.0, 1.0], refs).unwrap();
        let state = EngineState::new(RankerModel::Similarity(sim), 5);
        let switched = cascade_switch(&state, 4, 16, 5).unwrap();
        assert_eq!(switched.phase, Phase::Complex);
        let norm: f64 = l2_norm(switched.current_best.weights());
        assert!((norm - 1.0).abs() < 1e-15);
        assert_eq!(switched.history.len(), 1);
        assert!(matches!(
            cascade_switch(&switched, 4, 16, 5),
            Err(Error::AlreadySwitched)
        ));
    }

    #[test]
    fn switch_with_zero_weights_carries_zero() {
        let refs = Arc::new(ReferenceSet::new(vec![vec![1.0, 1.0]], SelectionMethod::Uniform).unwrap());
        let state = EngineState::new(RankerModel::Similarity(SimilarityModel::zeros(refs)), 3);
        let switched = cascade_switch(&state, 1, 2, 3).unwrap();
        assert_eq!(switched.current_best.weights(), &[0.0, 0.0]);
    }

    #[test]
    fn config_validation() {
        let cfg = EngineConfig::<f64>::default();
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.candidates, 19);
        assert_eq!(
            cfg.comparison,
            Comparison::Probabilistic {
                samples: 10_000,
                tau: 3.0
            }
        );
        for broken in [
            EngineConfig {
                candidates: 0,
                ..cfg.clone()
            },
            EngineConfig {
                radius: 0.0,
                ..cfg.clone()
            },
            EngineConfig {
                step_size: -1.0,
                ..cfg.clone()
            },
            EngineConfig {
                epsilon: 1.0,
                ..cfg.clone()
            },
            EngineConfig {
                history_window: 0,
                ..cfg.clone()
            },
            EngineConfig {
                discount: 1.5,
                ..cfg.clone()
            },
        ] {
            assert!(broken.validate().is_err(), "{broken:?}");
        }
        assert!(EngineConfig { epsilon: 0.0, ..cfg }.validate().is_ok());
    }
}
