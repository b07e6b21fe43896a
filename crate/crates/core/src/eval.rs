//! Clustering quality: the pairwise Rand index, a seeded Lloyd's K-means
//! baseline on the raw signals, and the per-dataset result record.

use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::{domain, StreamKey};

/// Pair-agreement counts underlying the Rand index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairCounts {
    /// Pairs sharing a label and sharing a cluster.
    pub agree_same: u64,
    /// Pairs split by label and split by cluster.
    pub agree_diff: u64,
    pub total_pairs: u64,
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Exact pair counts from the label/cluster contingency table — O(N + k_l * k_c)
/// instead of enumerating the N(N-1)/2 pairs.
pub fn pair_counts(labels: &[usize], clusters: &[usize]) -> Result<PairCounts> {
    if labels.len() != clusters.len() {
        return Err(Error::Eval(format!(
            "{} labels vs {} cluster assignments",
            labels.len(),
            clusters.len()
        )));
    }
    let n = labels.len() as u64;
    if n < 2 {
        return Err(Error::Eval(format!(
            "pairwise agreement needs at least 2 items, got {n}"
        )));
    }
    let k_l = labels.iter().max().unwrap() + 1;
    let k_c = clusters.iter().max().unwrap() + 1;
    let mut table = vec![0u64; k_l * k_c];
    for (&l, &c) in labels.iter().zip(clusters) {
        table[l * k_c + c] += 1;
    }
    let cells: u64 = table.iter().map(|&v| choose2(v)).sum();
    let rows: u64 = (0..k_l)
        .map(|l| choose2(table[l * k_c..(l + 1) * k_c].iter().sum()))
        .sum();
    let cols: u64 = (0..k_c)
        .map(|c| choose2((0..k_l).map(|l| table[l * k_c + c]).sum()))
        .sum();
    let total_pairs = choose2(n);
    // adding `cells` first keeps every intermediate non-negative
    Ok(PairCounts {
        agree_same: cells,
        agree_diff: total_pairs + cells - rows - cols,
        total_pairs,
    })
}

/// Rand index in [0, 1]: the fraction of item pairs on which the two
/// partitions agree. Invariant under relabeling of either side.
pub fn rand_index(labels: &[usize], clusters: &[usize]) -> Result<f64> {
    let pc = pair_counts(labels, clusters)?;
    Ok((pc.agree_same + pc.agree_diff) as f64 / pc.total_pairs as f64)
}

/// Ratio of the engine's Rand index to the baseline's; > 1 means the engine
/// beat K-means on the same data.
pub fn normalized_ri(tnn_ri: f64, kmeans_ri: f64) -> Result<f64> {
    if kmeans_ri <= 0.0 || kmeans_ri.is_nan() {
        return Err(Error::Eval(format!(
            "cannot normalize by a baseline Rand index of {kmeans_ri}"
        )));
    }
    Ok(tnn_ri / kmeans_ri)
}

const KMEANS_MAX_ITERS: usize = 100;

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's K-means on the raw signals: seeded random-point initialization,
/// best of `restarts` runs by within-cluster sum of squares, at most 100
/// iterations per run, convergence on unchanged assignments. Deterministic
/// for a given `(seed, restarts)`.
pub fn kmeans_baseline(ds: &Dataset, k: usize, seed: u64, restarts: usize) -> Result<Vec<usize>> {
    let n = ds.len();
    if k == 0 || k > n {
        return Err(Error::Eval(format!(
            "k = {k} is out of range for {n} samples"
        )));
    }
    if restarts == 0 {
        return Err(Error::Eval("kmeans needs at least one restart".into()));
    }
    let key = StreamKey::root(seed).child(domain::KMEANS);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for restart in 0..restarts {
        let mut rng = key.child(restart as u64).rng();
        // k distinct random samples as the initial centroids
        let mut order: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut order);
        let mut centroids: Vec<Vec<f64>> =
            order[..k].iter().map(|&i| ds.samples[i].clone()).collect();
        let mut assignments = vec![usize::MAX; n];
        for _ in 0..KMEANS_MAX_ITERS {
            let mut moved = false;
            for (i, sample) in ds.samples.iter().enumerate() {
                let mut best_c = 0;
                let mut best_d = f64::INFINITY;
                for (c, centroid) in centroids.iter().enumerate() {
                    let d = squared_distance(sample, centroid);
                    if d < best_d {
                        best_d = d;
                        best_c = c;
                    }
                }
                if assignments[i] != best_c {
                    assignments[i] = best_c;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
            // recompute means; an emptied cluster keeps its old centroid
            let width = ds.signal_length();
            let mut sums = vec![vec![0.0; width]; k];
            let mut counts = vec![0usize; k];
            for (i, sample) in ds.samples.iter().enumerate() {
                counts[assignments[i]] += 1;
                for (s, &v) in sums[assignments[i]].iter_mut().zip(sample) {
                    *s += v;
                }
            }
            for c in 0..k {
                if counts[c] > 0 {
                    for (slot, s) in centroids[c].iter_mut().zip(&sums[c]) {
                        *slot = s / counts[c] as f64;
                    }
                }
            }
        }
        let wcss: f64 = ds
            .samples
            .iter()
            .zip(&assignments)
            .map(|(s, &c)| squared_distance(s, &centroids[c]))
            .sum();
        if best.as_ref().is_none_or(|(b, _)| wcss < *b) {
            best = Some((wcss, assignments));
        }
    }
    Ok(best.expect("at least one restart ran").1)
}

/// One dataset's evaluation summary; serialized as a JSON object in results
/// files, one object per dataset.
#[derive(Clone, Debug, Serialize)]
pub struct EvalRecord {
    pub name: String,
    pub tnn_ri: f64,
    pub kmeans_ri: f64,
    pub normalized_ri: f64,
    pub epochs: usize,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Literal O(N^2) pair enumeration, kept independent of `pair_counts`.
    fn enumerate_pairs(labels: &[usize], clusters: &[usize]) -> PairCounts {
        let n = labels.len();
        let (mut same, mut diff, mut total) = (0u64, 0u64, 0u64);
        for i in 0..n {
            for j in (i + 1)..n {
                total += 1;
                let l_same = labels[i] == labels[j];
                let c_same = clusters[i] == clusters[j];
                if l_same && c_same {
                    same += 1;
                } else if !l_same && !c_same {
                    diff += 1;
                }
            }
        }
        PairCounts {
            agree_same: same,
            agree_diff: diff,
            total_pairs: total,
        }
    }

    #[test]
    fn hand_case_is_exactly_one_half() {
        // labels [0,0,1,1] vs clusters [0,1,1,1]: agreeing pairs are
        // {3,4} (together/together) and {1,3}, {1,4} (apart/apart) -> 3/6.
        let ri = rand_index(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap();
        assert_eq!(ri, 0.5);
    }

    #[test]
    fn perfect_agreement_scores_one() {
        assert_eq!(rand_index(&[0, 1, 0, 2], &[2, 0, 2, 1]).unwrap(), 1.0);
    }

    #[test]
    fn relabeling_either_side_changes_nothing() {
        let labels = [0, 0, 1, 1, 2, 2, 0];
        let clusters = [1, 1, 0, 2, 2, 0, 1];
        let base = rand_index(&labels, &clusters).unwrap();
        // swap cluster ids 0 <-> 2
        let swapped: Vec<usize> = clusters
            .iter()
            .map(|&c| match c {
                0 => 2,
                2 => 0,
                c => c,
            })
            .collect();
        assert_eq!(rand_index(&labels, &swapped).unwrap(), base);
        assert_eq!(rand_index(&clusters, &labels).unwrap(), base, "symmetric");
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(rand_index(&[0], &[0]).is_err());
        assert!(rand_index(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn closed_form_equals_enumeration_on_seeded_instances() {
        let mut rng = crate::rng::StreamKey::root(50).child(1).rng();
        for _ in 0..50 {
            let n = 2 + rng.uniform(199) as usize;
            let kl = 1 + rng.uniform(6) as usize;
            let kc = 1 + rng.uniform(6) as usize;
            let labels: Vec<usize> = (0..n).map(|_| rng.uniform(kl as u64) as usize).collect();
            let clusters: Vec<usize> = (0..n).map(|_| rng.uniform(kc as u64) as usize).collect();
            assert_eq!(
                pair_counts(&labels, &clusters).unwrap(),
                enumerate_pairs(&labels, &clusters)
            );
        }
    }

    proptest! {
        #[test]
        fn closed_form_equals_enumeration(
            pairs in prop::collection::vec((0usize..5, 0usize..5), 2..60)
        ) {
            let labels: Vec<usize> = pairs.iter().map(|p| p.0).collect();
            let clusters: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            prop_assert_eq!(
                pair_counts(&labels, &clusters).unwrap(),
                enumerate_pairs(&labels, &clusters)
            );
        }

        #[test]
        fn rand_index_stays_in_unit_interval(
            pairs in prop::collection::vec((0usize..4, 0usize..4), 2..40)
        ) {
            let labels: Vec<usize> = pairs.iter().map(|p| p.0).collect();
            let clusters: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            let ri = rand_index(&labels, &clusters).unwrap();
            prop_assert!((0.0..=1.0).contains(&ri));
        }
    }

    fn clouds(n_per: usize, centers: &[f64]) -> Dataset {
        let mut rng = crate::rng::StreamKey::root(60).child(2).rng();
        let mut samples = Vec::new();
        let mut labels = Vec::new();
        for (c, &center) in centers.iter().enumerate() {
            for _ in 0..n_per {
                samples.push((0..8).map(|_| center + 0.01 * rng.gaussian()).collect());
                labels.push(c);
            }
        }
        Dataset {
            name: "clouds".into(),
            samples,
            labels,
            num_classes: centers.len(),
        }
    }

    #[test]
    fn kmeans_separates_distant_clouds_perfectly() {
        let ds = clouds(20, &[-10.0, 0.0, 10.0]);
        let assign = kmeans_baseline(&ds, 3, 99, 10).unwrap();
        assert_eq!(rand_index(&ds.labels, &assign).unwrap(), 1.0);
    }

    #[test]
    fn kmeans_is_deterministic_per_seed() {
        let ds = clouds(15, &[-3.0, 3.0]);
        let a = kmeans_baseline(&ds, 2, 7, 10).unwrap();
        let b = kmeans_baseline(&ds, 2, 7, 10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn k_equal_to_n_isolates_every_distinct_point() {
        let ds = clouds(1, &[-9.0, -3.0, 3.0, 9.0]);
        let assign = kmeans_baseline(&ds, 4, 3, 5).unwrap();
        let mut sorted = assign.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 4, "every point in its own cluster");
    }

    #[test]
    fn kmeans_rejects_bad_k_and_restarts() {
        let ds = clouds(5, &[0.0]);
        assert!(kmeans_baseline(&ds, 0, 1, 10).is_err());
        assert!(kmeans_baseline(&ds, 6, 1, 10).is_err());
        assert!(kmeans_baseline(&ds, 2, 1, 0).is_err());
    }

    #[test]
    fn normalized_ri_divides_and_guards_zero() {
        assert_eq!(normalized_ri(0.9, 0.75).unwrap(), 1.2);
        assert!(normalized_ri(0.9, 0.0).is_err());
    }
}
