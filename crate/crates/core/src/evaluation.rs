//! NDCG@k, discounted online performance and Student's t-tests.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_CUTOFF: usize = 10;
pub const DEFAULT_DISCOUNT: f64 = 0.9995;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub cutoff: usize,
    pub discount: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            cutoff: DEFAULT_CUTOFF,
            discount: DEFAULT_DISCOUNT,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cutoff == 0 {
            return Err(Error::InvalidConfig("cutoff must be at least 1".into()));
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "discount must be in (0, 1], got {}",
                self.discount
            )));
        }
        Ok(())
    }
}

fn gain<T: Scalar>(grade: u32) -> T {
    T::of(2f64.powi(grade as i32) - 1.0)
}

fn discount<T: Scalar>(position: usize) -> T {
    T::of((position as f64 + 2.0).log2())
}

/// DCG of the first `k` grades in displayed order.
pub fn dcg_at_k<T: Scalar>(grades: &[u32], k: usize) -> T {
    grades
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, &g)| gain::<T>(g) / discount::<T>(i))
        .sum()
}

/// DCG of the best possible ordering of `pool`.
pub fn ideal_dcg_at_k<T: Scalar>(pool: &[u32], k: usize) -> T {
    let mut sorted = pool.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    dcg_at_k(&sorted, k)
}

/// NDCG@k of a displayed ranking against every grade of the query. Queries
/// without relevant documents score 0.
pub fn ndcg_at_k<T: Scalar>(ranking: &[u32], ideal_pool: &[u32], k: usize) -> T {
    let ideal: T = ideal_dcg_at_k(ideal_pool, k);
    if ideal <= T::zero() {
        return T::zero();
    }
    dcg_at_k::<T>(ranking, k) / ideal
}

/// `Σ_t ndcg_t · γ^(t-1)`.
pub fn online_performance<T: Scalar>(ndcg: &[T], discount: T) -> T {
    let mut weight = T::one();
    let mut total = T::zero();
    for &v in ndcg {
        total = total + v * weight;
        weight = weight * discount;
    }
    total
}

/// Outcome of comparing two samples. `t_statistic` is positive when sample
/// a has the larger mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub mean_a: f64,
    pub mean_b: f64,
    pub std_a: f64,
    pub std_b: f64,
    #[serde(with = "extended_float")]
    pub t_statistic: f64,
    pub p_value: f64,
    pub degrees_of_freedom: f64,
    pub n_a: usize,
    pub n_b: usize,
    /// Zero pooled variance with different means.
    pub degenerate_variance: bool,
}

impl ComparisonReport {
    pub fn significant_at(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }

    /// One-sided p-value for the alternative "mean a > mean b".
    pub fn p_greater(&self) -> f64 {
        if self.t_statistic > 0.0 {
            self.p_value / 2.0
        } else {
            1.0 - self.p_value / 2.0
        }
    }

    pub fn significance(&self) -> Significance {
        let delta = self.mean_a - self.mean_b;
        match (delta.partial_cmp(&0.0), self.p_value) {
            (Some(std::cmp::Ordering::Greater), p) if p < 0.01 => Significance::StrongImprovement,
            (Some(std::cmp::Ordering::Greater), p) if p < 0.05 => Significance::Improvement,
            (Some(std::cmp::Ordering::Less), p) if p < 0.01 => Significance::StrongLoss,
            (Some(std::cmp::Ordering::Less), p) if p < 0.05 => Significance::Loss,
            _ => Significance::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Significance {
    None,
    /// p < 0.05
    Improvement,
    /// p < 0.01
    StrongImprovement,
    Loss,
    StrongLoss,
}

impl Significance {
    pub fn marker(self) -> &'static str {
        match self {
            Significance::None => "",
            Significance::Improvement => "\u{25b5}",
            Significance::StrongImprovement => "\u{25b4}",
            Significance::Loss => "\u{25bf}",
            Significance::StrongLoss => "\u{25be}",
        }
    }
}

fn mean_and_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, if xs.len() > 1 { ss / (n - 1.0) } else { 0.0 })
}

/// Two-tailed p-value of Student's t with `df` degrees of freedom.
pub fn student_t_two_tailed_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

#[allow(clippy::too_many_arguments)]
fn report(
    mean_a: f64,
    mean_b: f64,
    std_a: f64,
    std_b: f64,
    se: f64,
    df: f64,
    n_a: usize,
    n_b: usize,
) -> ComparisonReport {
    let diff = mean_a - mean_b;
    let (t, p, degenerate) = if se > 0.0 {
        let t = diff / se;
        (t, student_t_two_tailed_p(t, df), false)
    } else if diff == 0.0 {
        (0.0, 1.0, false)
    } else {
        (f64::INFINITY.copysign(diff), 0.0, true)
    };
    ComparisonReport {
        mean_a,
        mean_b,
        std_a,
        std_b,
        t_statistic: t,
        p_value: p,
        degrees_of_freedom: df,
        n_a,
        n_b,
        degenerate_variance: degenerate,
    }
}

/// Two-sample Student's t-test with pooled variance.
pub fn t_test_two_tailed(a: &[f64], b: &[f64]) -> Result<ComparisonReport> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "t-test needs at least 2 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mean_a, var_a) = mean_and_var(a);
    let (mean_b, var_b) = mean_and_var(b);
    let df = na + nb - 2.0;
    let pooled = ((na - 1.0) * var_a + (nb - 1.0) * var_b) / df;
    let se = (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    Ok(report(
        mean_a,
        mean_b,
        var_a.sqrt(),
        var_b.sqrt(),
        se,
        df,
        a.len(),
        b.len(),
    ))
}

/// Paired t-test over per-index differences `a[i] - b[i]`.
pub fn t_test_paired(a: &[f64], b: &[f64]) -> Result<ComparisonReport> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "paired t-test needs two equal-length samples of at least 2, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = diffs.len() as f64;
    let (_, var_d) = mean_and_var(&diffs);
    let (mean_a, var_a) = mean_and_var(a);
    let (mean_b, var_b) = mean_and_var(b);
    let se = (var_d / n).sqrt();
    Ok(report(
        mean_a,
        mean_b,
        var_a.sqrt(),
        var_b.sqrt(),
        se,
        n - 1.0,
        a.len(),
        b.len(),
    ))
}

/// JSON has no infinities; they are written as the strings "inf" / "-inf".
mod extended_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) if t == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("invalid number {t:?}"))),
        }
    }
}
