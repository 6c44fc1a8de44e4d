//! Lloyd's algorithm with k-means++ seeding.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone)]
pub struct Clustering<T> {
    pub centroids: Vec<Vec<T>>,
    pub assignments: Vec<usize>,
    pub iterations: usize,
}

impl<T: Scalar> Clustering<T> {
    /// Within-cluster sum of squared Euclidean distances.
    pub fn sse(&self, points: &[Vec<T>]) -> T {
        points
            .iter()
            .zip(&self.assignments)
            .map(|(p, &c)| squared_distance(p, &self.centroids[c]))
            .sum()
    }
}

pub fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
}

fn nearest<T: Scalar>(point: &[T], centroids: &[Vec<T>]) -> (usize, T) {
    let mut best = (0, T::infinity());
    for (i, c) in centroids.iter().enumerate() {
        let d = squared_distance(point, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

pub fn count_distinct<T: Scalar>(points: &[Vec<T>]) -> usize {
    let mut keys: Vec<Vec<u64>> = points
        .iter()
        .map(|p| p.iter().map(|v| v.as_f64().to_bits()).collect())
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

/// k-means++: the first centroid is uniform, each further one is drawn with
/// probability proportional to its squared distance to the nearest centroid.
fn seed_centroids<T: Scalar, R: Rng + ?Sized>(points: &[Vec<T>], k: usize, rng: &mut R) -> Vec<Vec<T>> {
    let mut centroids = vec![points[rng.random_range(0..points.len())].clone()];
    let mut dist: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p, &centroids[0]).as_f64())
        .collect();
    while centroids.len() < k {
        let total: f64 = dist.iter().sum();
        let mut target = rng.random::<f64>() * total;
        let mut pick = None;
        for (i, &d) in dist.iter().enumerate() {
            if d <= 0.0 {
                continue;
            }
            pick = Some(i);
            if target < d {
                break;
            }
            target -= d;
        }
        let pick = pick.expect("enough distinct points were checked by the caller");
        let c = points[pick].clone();
        for (d, p) in dist.iter_mut().zip(points) {
            *d = d.min(squared_distance(p, &c).as_f64());
        }
        centroids.push(c);
    }
    centroids
}

/// Clusters `points` into `k` groups. Converges when no assignment changes or
/// after [`MAX_ITERATIONS`] rounds. An empty cluster is re-seeded with the
/// point farthest from its current centroid.
pub fn kmeans<T: Scalar, R: Rng + ?Sized>(points: &[Vec<T>], k: usize, rng: &mut R) -> Result<Clustering<T>> {
    let distinct = count_distinct(points);
    if k == 0 || distinct < k {
        return Err(Error::InsufficientCandidates {
            required: k.max(1),
            available: distinct,
        });
    }
    let dim = points[0].len();
    let mut centroids = seed_centroids(points, k, rng);
    let mut assignments = vec![usize::MAX; points.len()];
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut changed = false;
        let mut dists = Vec::with_capacity(points.len());
        for (p, a) in points.iter().zip(assignments.iter_mut()) {
            let (c, d) = nearest(p, &centroids);
            if *a != c {
                *a = c;
                changed = true;
            }
            dists.push(d);
        }

        let mut counts = vec![0usize; k];
        for &a in &assignments {
            counts[a] += 1;
        }
        let empties: Vec<usize> = (0..k).filter(|&c| counts[c] == 0).collect();
        for empty in empties {
            let far = (0..points.len())
                .filter(|&i| counts[assignments[i]] > 1)
                .max_by(|&a, &b| dists[a].partial_cmp(&dists[b]).unwrap().then(b.cmp(&a)))
                .expect("k <= distinct points leaves a cluster with two members");
            counts[assignments[far]] -= 1;
            counts[empty] = 1;
            assignments[far] = empty;
            dists[far] = T::zero();
            changed = true;
        }

        let mut sums = vec![vec![T::zero(); dim]; k];
        for (p, &a) in points.iter().zip(&assignments) {
            for (s, &v) in sums[a].iter_mut().zip(p) {
                *s = *s + v;
            }
        }
        for ((c, s), &n) in centroids.iter_mut().zip(sums).zip(&counts) {
            let n = T::of(n as f64);
            *c = s.into_iter().map(|v| v / n).collect();
        }
        if !changed {
            break;
        }
    }
    Ok(Clustering {
        centroids,
        assignments,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn separated_clusters() {
        let mut points = vec![vec![1.0f64, 0.0]; 10];
        points.extend(vec![vec![0.0, 1.0]; 10]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = kmeans(&points, 2, &mut rng).unwrap();
        let mut cents = c.centroids.clone();
        cents.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(cents, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(c.sse(&points), 0.0);
    }

    #[test]
    fn too_few_distinct_points() {
        let points = vec![vec![1.0f64, 0.0]; 5];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            kmeans(&points, 2, &mut rng),
            Err(Error::InsufficientCandidates {
                required: 2,
                available: 1
            })
        ));
    }

    // Brute force: the Lloyd fixed point must beat random assignments.
    #[test]
    fn sse_is_a_local_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let points: Vec<Vec<f64>> = (0..24)
            .map(|i| {
                let angle = (i % 3) as f64 * 2.0 + rng.random_range(-0.3..0.3);
                vec![angle.cos(), angle.sin()]
            })
            .collect();
        let k = 3;
        let result = kmeans(&points, k, &mut rng).unwrap();
        let sse = result.sse(&points);

        let assignment_sse = |assign: &[usize]| -> f64 {
            let mut total = 0.0;
            for c in 0..k {
                let members: Vec<&Vec<f64>> = points
                    .iter()
                    .zip(assign)
                    .filter(|(_, &a)| a == c)
                    .map(|(p, _)| p)
                    .collect();
                if members.is_empty() {
                    continue;
                }
                let mean: Vec<f64> = (0..2)
                    .map(|j| members.iter().map(|p| p[j]).sum::<f64>() / members.len() as f64)
                    .collect();
                total += members.iter().map(|p| squared_distance(p, &mean)).sum::<f64>();
            }
            total
        };
        assert!((assignment_sse(&result.assignments) - sse).abs() < 1e-12);
        for _ in 0..100 {
            let random: Vec<usize> = (0..points.len()).map(|_| rng.random_range(0..k)).collect();
            assert!(sse <= assignment_sse(&random) + 1e-12);
        }
    }
}
