//! Ranking model families: direct linear scoring and weighted similarity to a
//! fixed set of unit-norm reference documents.

use std::cmp::Ordering;
use std::sync::Arc;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmeans;
use crate::letor::QueryGroup;
use crate::scalar::{dot, l2_norm, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel<T> {
    pub weights: Vec<T>,
}

impl<T: Scalar> LinearModel<T> {
    pub fn zeros(dim: usize) -> Self {
        LinearModel {
            weights: vec![T::zero(); dim],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMethod {
    Uniform,
    Kmeans,
}

/// M unit-norm reference vectors over the document feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ReferenceSetRepr<T>", into = "ReferenceSetRepr<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ReferenceSet<T> {
    docs: Vec<Vec<T>>,
    norms: Vec<T>,
    selection: SelectionMethod,
}

#[derive(Serialize, Deserialize)]
struct ReferenceSetRepr<T> {
    docs: Vec<Vec<T>>,
    selection: SelectionMethod,
}

impl<T: Scalar> TryFrom<ReferenceSetRepr<T>> for ReferenceSet<T> {
    type Error = Error;

    fn try_from(r: ReferenceSetRepr<T>) -> Result<Self> {
        ReferenceSet::new(r.docs, r.selection)
    }
}

impl<T: Scalar> From<ReferenceSet<T>> for ReferenceSetRepr<T> {
    fn from(r: ReferenceSet<T>) -> Self {
        ReferenceSetRepr {
            docs: r.docs,
            selection: r.selection,
        }
    }
}

impl<T: Scalar> ReferenceSet<T> {
    /// L2-normalizes each vector. Zero vectors and ragged input are rejected.
    pub fn new(vectors: Vec<Vec<T>>, selection: SelectionMethod) -> Result<Self> {
        let Some(dim) = vectors.first().map(Vec::len) else {
            return Err(Error::InsufficientCandidates {
                required: 1,
                available: 0,
            });
        };
        let mut docs = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: v.len(),
                });
            }
            let norm = l2_norm(&v);
            if !(norm > T::zero()) {
                return Err(Error::Validation("reference vectors must be nonzero".into()));
            }
            docs.push(v.into_iter().map(|x| x / norm).collect::<Vec<_>>());
        }
        let norms = docs.iter().map(|d| l2_norm(d)).collect();
        Ok(ReferenceSet { docs, norms, selection })
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn feature_dimensionality(&self) -> usize {
        self.docs[0].len()
    }

    pub fn docs(&self) -> &[Vec<T>] {
        &self.docs
    }

    pub fn norms(&self) -> &[T] {
        &self.norms
    }

    pub fn selection(&self) -> SelectionMethod {
        self.selection
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct SimilarityModel<T> {
    pub weights: Vec<T>,
    pub refs: Arc<ReferenceSet<T>>,
}

impl<T: Scalar> SimilarityModel<T> {
    pub fn zeros(refs: Arc<ReferenceSet<T>>) -> Self {
        SimilarityModel {
            weights: vec![T::zero(); refs.len()],
            refs,
        }
    }

    pub fn new(weights: Vec<T>, refs: Arc<ReferenceSet<T>>) -> Result<Self> {
        if weights.len() != refs.len() {
            return Err(Error::DimensionMismatch {
                expected: refs.len(),
                actual: weights.len(),
            });
        }
        Ok(SimilarityModel { weights, refs })
    }
}

/// Either model family. Serialized as `{"kind": ..., "weights": [...], "refs"?: {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub enum RankerModel<T> {
    Linear(LinearModel<T>),
    Similarity(SimilarityModel<T>),
}

impl<T: Scalar> RankerModel<T> {
    pub fn weights(&self) -> &[T] {
        match self {
            RankerModel::Linear(m) => &m.weights,
            RankerModel::Similarity(m) => &m.weights,
        }
    }

    /// Number of weights: D for linear models, M for similarity models.
    pub fn dimensionality(&self) -> usize {
        self.weights().len()
    }

    /// Length of the document vectors this model scores.
    pub fn feature_dimensionality(&self) -> usize {
        match self {
            RankerModel::Linear(m) => m.weights.len(),
            RankerModel::Similarity(m) => m.refs.feature_dimensionality(),
        }
    }

    /// Same model family and references with new weights.
    pub fn with_weights(&self, weights: Vec<T>) -> Self {
        debug_assert_eq!(weights.len(), self.dimensionality());
        match self {
            RankerModel::Linear(_) => RankerModel::Linear(LinearModel { weights }),
            RankerModel::Similarity(m) => RankerModel::Similarity(SimilarityModel {
                weights,
                refs: Arc::clone(&m.refs),
            }),
        }
    }

    pub fn scaled(&self, beta: T) -> Self {
        self.with_weights(self.weights().iter().map(|&w| w * beta).collect())
    }

    fn score_unchecked(&self, features: &[T]) -> T {
        match self {
            RankerModel::Linear(m) => dot(&m.weights, features),
            RankerModel::Similarity(m) => {
                m.weights
                    .iter()
                    .zip(m.refs.docs.iter().zip(&m.refs.norms))
                    .fold(T::zero(), |acc, (&w, (r, &n))| {
                        if n > T::zero() {
                            acc + w / n * dot(features, r)
                        } else {
                            acc
                        }
                    })
            }
        }
    }

    pub fn score(&self, features: &[T]) -> Result<T> {
        let expected = self.feature_dimensionality();
        if features.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: features.len(),
            });
        }
        Ok(self.score_unchecked(features))
    }

    /// Document indices by descending score; ties keep ascending index order.
    pub fn rank(&self, qg: &QueryGroup<T>) -> Vec<usize> {
        let scores: Vec<T> = qg.documents.iter().map(|d| self.score_unchecked(&d.features)).collect();
        rank_by_scores(&scores)
    }
}

pub fn rank_by_scores<T: Scalar>(scores: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Rewrites a similarity model as the linear model `Σ_m (w_m / |d_m|) d_m`,
/// which scores every document identically.
pub fn convert_sim_to_linear<T: Scalar>(sm: &SimilarityModel<T>) -> LinearModel<T> {
    let mut weights = vec![T::zero(); sm.refs.feature_dimensionality()];
    for ((&w, r), &n) in sm.weights.iter().zip(&sm.refs.docs).zip(&sm.refs.norms) {
        if n > T::zero() {
            let coef = w / n;
            for (acc, &x) in weights.iter_mut().zip(r) {
                *acc = *acc + coef * x;
            }
        }
    }
    LinearModel { weights }
}

fn nonzero_documents<'a, T: Scalar>(train: &[&'a QueryGroup<T>]) -> Vec<&'a [T]> {
    train
        .iter()
        .flat_map(|q| &q.documents)
        .map(|d| d.features.as_slice())
        .filter(|f| f.iter().any(|&x| x != T::zero()))
        .collect()
}

/// Samples `m` distinct query-document pairs uniformly without replacement
/// from the training queries. Zero vectors are never chosen.
pub fn select_references_uniform<T: Scalar, R: Rng + ?Sized>(
    train: &[&QueryGroup<T>],
    m: usize,
    rng: &mut R,
) -> Result<ReferenceSet<T>> {
    let pool = nonzero_documents(train);
    if m == 0 || pool.len() < m {
        return Err(Error::InsufficientCandidates {
            required: m.max(1),
            available: pool.len(),
        });
    }
    let picked = index::sample(rng, pool.len(), m)
        .into_iter()
        .map(|i| pool[i].to_vec())
        .collect();
    ReferenceSet::new(picked, SelectionMethod::Uniform)
}

/// k-means with k = `m` over the L2-normalized training documents; the
/// re-normalized centroids become the references.
pub fn select_references_kmeans<T: Scalar, R: Rng + ?Sized>(
    train: &[&QueryGroup<T>],
    m: usize,
    rng: &mut R,
) -> Result<ReferenceSet<T>> {
    let points: Vec<Vec<T>> = nonzero_documents(train)
        .into_iter()
        .map(|f| {
            let n = l2_norm(f);
            f.iter().map(|&x| x / n).collect()
        })
        .collect();
    if points.is_empty() {
        return Err(Error::InsufficientCandidates {
            required: m.max(1),
            available: 0,
        });
    }
    let clustering = kmeans::kmeans(&points, m, rng)?;
    let centroids = clustering
        .centroids
        .iter()
        .enumerate()
        .map(|(c, centroid)| {
            if l2_norm(centroid) > T::zero() {
                centroid.clone()
            } else {
                // Antipodal members can cancel out; fall back to a member.
                let member = clustering.assignments.iter().position(|&a| a == c).unwrap();
                points[member].clone()
            }
        })
        .collect();
    ReferenceSet::new(centroids, SelectionMethod::Kmeans)
}
