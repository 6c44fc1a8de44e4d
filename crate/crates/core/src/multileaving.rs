//! Combining n+1 rankings into one displayed list and inferring, from clicks,
//! which candidates beat the current best (ranker 0).

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Default exponent of the rank-decaying distribution used by probabilistic
/// multileaving.
pub const DEFAULT_TAU: f64 = 3.0;
pub const DEFAULT_INFERENCE_SAMPLES: usize = 10_000;

/// One ranked list of document indices per ranker; index 0 is the current best.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingSlate {
    pub lists: Vec<Vec<usize>>,
}

impl RankingSlate {
    pub fn new(lists: Vec<Vec<usize>>) -> Self {
        RankingSlate { lists }
    }

    pub fn num_rankers(&self) -> usize {
        self.lists.len()
    }

    fn universe(&self) -> usize {
        self.lists
            .iter()
            .flat_map(|l| l.iter().copied())
            .max()
            .map_or(0, |m| m + 1)
    }

    fn distinct_docs(&self) -> usize {
        let mut seen = vec![false; self.universe()];
        for &d in self.lists.iter().flatten() {
            seen[d] = true;
        }
        seen.into_iter().filter(|&s| s).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Attribution {
    /// Owning team of each displayed slot.
    TeamDraft(Vec<usize>),
    /// For each slot, every ranker's probability of placing the chosen
    /// document at that step.
    Probabilistic(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultileaveOutcome {
    pub displayed: Vec<usize>,
    pub attribution: Attribution,
    pub num_rankers: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClickVector {
    pub clicked: Vec<bool>,
}

impl ClickVector {
    pub fn new(clicked: Vec<bool>) -> Self {
        ClickVector { clicked }
    }

    pub fn none(len: usize) -> Self {
        ClickVector {
            clicked: vec![false; len],
        }
    }

    pub fn len(&self) -> usize {
        self.clicked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clicked.is_empty()
    }

    pub fn count(&self) -> usize {
        self.clicked.iter().filter(|&&c| c).count()
    }
}

/// Team-draft multileaving: each round visits the teams in a fresh random
/// order and every team appends its best document not yet displayed.
pub fn team_draft_multileave<R: Rng + ?Sized>(slate: &RankingSlate, k: usize, rng: &mut R) -> MultileaveOutcome {
    let target = k.min(slate.distinct_docs());
    let mut placed = vec![false; slate.universe()];
    let mut cursor = vec![0usize; slate.num_rankers()];
    let mut displayed = Vec::with_capacity(target);
    let mut teams = Vec::with_capacity(target);
    let mut order: Vec<usize> = (0..slate.num_rankers()).collect();
    while displayed.len() < target {
        order.shuffle(rng);
        for &team in &order {
            if displayed.len() == target {
                break;
            }
            let list = &slate.lists[team];
            while cursor[team] < list.len() && placed[list[cursor[team]]] {
                cursor[team] += 1;
            }
            if let Some(&doc) = list.get(cursor[team]) {
                placed[doc] = true;
                displayed.push(doc);
                teams.push(team);
            }
        }
    }
    MultileaveOutcome {
        displayed,
        attribution: Attribution::TeamDraft(teams),
        num_rankers: slate.num_rankers(),
    }
}

fn winners_from_credit(credit: &[usize]) -> impl Iterator<Item = usize> + '_ {
    (1..credit.len()).filter(move |&j| credit[j] > credit[0])
}

/// Candidates whose clicked-slot count exceeds the current best's.
///
/// Panics when the outcome does not carry team-draft attribution.
pub fn team_draft_infer(outcome: &MultileaveOutcome, clicks: &ClickVector) -> Vec<usize> {
    let Attribution::TeamDraft(teams) = &outcome.attribution else {
        panic!("team_draft_infer requires team-draft attribution");
    };
    let mut credit = vec![0usize; outcome.num_rankers];
    for (&team, &c) in teams.iter().zip(&clicks.clicked) {
        if c {
            credit[team] += 1;
        }
    }
    winners_from_credit(&credit).collect()
}

/// Probabilistic multileaving. Ranker `r` puts mass `1 / rank^tau` on each of
/// its documents, using the rank in its original list and renormalizing over
/// the documents not yet placed. For every slot a ranker with documents left
/// is picked uniformly and samples the next document.
pub fn probabilistic_multileave<R: Rng + ?Sized>(
    slate: &RankingSlate,
    k: usize,
    tau: f64,
    rng: &mut R,
) -> MultileaveOutcome {
    let universe = slate.universe();
    let longest = slate.lists.iter().map(Vec::len).max().unwrap_or(0);
    let decay: Vec<f64> = (1..=longest).map(|r| (r as f64).powf(-tau)).collect();
    let mut rank_of = vec![vec![usize::MAX; universe]; slate.num_rankers()];
    for (r, list) in slate.lists.iter().enumerate() {
        for (pos, &doc) in list.iter().enumerate() {
            rank_of[r][doc] = pos;
        }
    }
    let target = k.min(slate.distinct_docs());
    let mut placed = vec![false; universe];
    let mut displayed = Vec::with_capacity(target);
    let mut probabilities = Vec::with_capacity(target);
    let mut mass = vec![0.0; slate.num_rankers()];
    let mut active = Vec::with_capacity(slate.num_rankers());
    while displayed.len() < target {
        active.clear();
        for (r, list) in slate.lists.iter().enumerate() {
            mass[r] = list
                .iter()
                .enumerate()
                .filter(|(_, &d)| !placed[d])
                .map(|(pos, _)| decay[pos])
                .sum();
            if mass[r] > 0.0 {
                active.push(r);
            }
        }
        let chooser = active[rng.random_range(0..active.len())];
        let list = &slate.lists[chooser];
        let mut target_mass = rng.random::<f64>() * mass[chooser];
        let mut doc = None;
        for (pos, &d) in list.iter().enumerate() {
            if placed[d] {
                continue;
            }
            doc = Some(d);
            if target_mass < decay[pos] {
                break;
            }
            target_mass -= decay[pos];
        }
        let doc = doc.expect("an active ranker has an unplaced document");
        let slot_probs = (0..slate.num_rankers())
            .map(|r| match rank_of[r][doc] {
                pos if pos != usize::MAX && mass[r] > 0.0 => decay[pos] / mass[r],
                _ => 0.0,
            })
            .collect();
        placed[doc] = true;
        displayed.push(doc);
        probabilities.push(slot_probs);
    }
    MultileaveOutcome {
        displayed,
        attribution: Attribution::Probabilistic(probabilities),
        num_rankers: slate.num_rankers(),
    }
}

/// Sample-based credit inference. Each sample assigns every clicked document
/// to one ranker with probability proportional to the recorded placement
/// probabilities; candidate `j` wins a sample when its credit exceeds ranker
/// 0's. The winners are candidates that win a strict majority of samples.
///
/// Panics when the outcome does not carry probabilistic attribution.
pub fn probabilistic_infer<R: Rng + ?Sized>(
    outcome: &MultileaveOutcome,
    clicks: &ClickVector,
    num_samples: usize,
    rng: &mut R,
) -> Vec<usize> {
    let Attribution::Probabilistic(probabilities) = &outcome.attribution else {
        panic!("probabilistic_infer requires probabilistic attribution");
    };
    let n = outcome.num_rankers;
    // Only clicked documents carry credit; unclicked assignments never matter.
    let cumulative: Vec<Vec<f64>> = probabilities
        .iter()
        .zip(&clicks.clicked)
        .filter(|(_, &c)| c)
        .map(|(p, _)| {
            let mut acc = 0.0;
            p.iter()
                .map(|&x| {
                    acc += x;
                    acc
                })
                .collect()
        })
        .collect();
    if cumulative.is_empty() {
        return Vec::new();
    }
    let mut wins = vec![0usize; n];
    let mut credit = vec![0usize; n];
    for _ in 0..num_samples {
        credit.iter_mut().for_each(|c| *c = 0);
        for cdf in &cumulative {
            let total = *cdf.last().unwrap();
            let u = rng.random::<f64>() * total;
            let owner = cdf.partition_point(|&c| c <= u).min(n - 1);
            credit[owner] += 1;
        }
        for j in winners_from_credit(&credit) {
            wins[j] += 1;
        }
    }
    (1..n).filter(|&j| 2 * wins[j] > num_samples).collect()
}

/// Multileaving method together with its inference settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Comparison {
    TeamDraft,
    Probabilistic { samples: usize, tau: f64 },
}

impl Default for Comparison {
    fn default() -> Self {
        Comparison::Probabilistic {
            samples: DEFAULT_INFERENCE_SAMPLES,
            tau: DEFAULT_TAU,
        }
    }
}

impl Comparison {
    pub fn multileave<R: Rng + ?Sized>(&self, slate: &RankingSlate, k: usize, rng: &mut R) -> MultileaveOutcome {
        match *self {
            Comparison::TeamDraft => team_draft_multileave(slate, k, rng),
            Comparison::Probabilistic { tau, .. } => probabilistic_multileave(slate, k, tau, rng),
        }
    }

    pub fn infer<R: Rng + ?Sized>(&self, outcome: &MultileaveOutcome, clicks: &ClickVector, rng: &mut R) -> Vec<usize> {
        match *self {
            Comparison::TeamDraft => team_draft_infer(outcome, clicks),
            Comparison::Probabilistic { samples, .. } => probabilistic_infer(outcome, clicks, samples, rng),
        }
    }
}
