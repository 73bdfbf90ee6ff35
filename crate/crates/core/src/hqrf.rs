//! The feature-partition ensemble: split the m input features into
//! `D = ceil(m / (3*nq))` disjoint groups, train an independent hybrid network
//! per group, and soft-vote (average) the per-tree class-1 scores.
//!
//! There is no tree-count or tree-depth hyperparameter: D follows from the
//! qubit count. Trees are independent, so they train in parallel; per-tree
//! seeds derive from the forest seed and the tree index, which keeps the
//! result identical under any thread schedule.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use crate::dataio::{Dataset, Sample};
use crate::error::{Error, Result};
use crate::hqnn::{self, HqnnModel, TrainConfig, ANGLES_PER_QUBIT};
use crate::seeding;

const FOREST_SCHEMA: &str = "qforest-hqrf/v1";

/// How feature-group sizes are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionPolicy {
    /// Near-equal chunks (sizes differ by at most 1).
    Balanced,
    /// Literal 5/5/3 group sizes; only valid for m=13 features on 2 qubits,
    /// the one shape where it satisfies the D and size bounds.
    PaperFiveFiveThree,
}

/// Disjoint feature groups covering `0..feature_count`, each of size at most
/// `3 * num_qubits`. Group membership is random (seeded); indices inside a
/// group are kept sorted, so a single-group partition is the identity
/// projection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeaturePartition {
    pub feature_count: usize,
    pub num_qubits: usize,
    pub groups: Vec<Vec<usize>>,
}

impl FeaturePartition {
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }
}

/// `ceil(m / (3*nq))`, the derived tree count.
pub fn tree_count(feature_count: usize, num_qubits: usize) -> usize {
    let cap = ANGLES_PER_QUBIT * num_qubits;
    feature_count.div_ceil(cap)
}

/// Shuffle the feature indices with the seeded RNG and cut them into
/// `ceil(m/(3*nq))` chunks according to `policy`.
pub fn partition_features_with_policy(
    feature_count: usize,
    num_qubits: usize,
    seed: u64,
    policy: PartitionPolicy,
) -> Result<FeaturePartition> {
    if feature_count == 0 {
        return Err(Error::config("feature count must be at least 1".to_string()));
    }
    if num_qubits == 0 {
        return Err(Error::config("qubit count must be at least 1".to_string()));
    }
    let groups_needed = tree_count(feature_count, num_qubits);
    let sizes: Vec<usize> = match policy {
        PartitionPolicy::Balanced => {
            let base = feature_count / groups_needed;
            let extras = feature_count % groups_needed;
            (0..groups_needed)
                .map(|g| base + usize::from(g < extras))
                .collect()
        }
        PartitionPolicy::PaperFiveFiveThree => {
            if feature_count != 13 || groups_needed != 3 || ANGLES_PER_QUBIT * num_qubits < 5 {
                return Err(Error::config(format!(
                    "paper-5-5-3 partition requires 13 features on 2 qubits, got m={feature_count}, nq={num_qubits}"
                )));
            }
            vec![5, 5, 3]
        }
    };

    let mut indices: Vec<usize> = (0..feature_count).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);

    let mut groups = Vec::with_capacity(groups_needed);
    let mut at = 0;
    for size in sizes {
        let mut group: Vec<usize> = indices[at..at + size].to_vec();
        group.sort_unstable();
        groups.push(group);
        at += size;
    }
    Ok(FeaturePartition {
        feature_count,
        num_qubits,
        groups,
    })
}

/// [`partition_features_with_policy`] with the balanced default.
pub fn partition_features(
    feature_count: usize,
    num_qubits: usize,
    seed: u64,
) -> Result<FeaturePartition> {
    partition_features_with_policy(feature_count, num_qubits, seed, PartitionPolicy::Balanced)
}

/// Seed for tree `tree_index` inside a forest trained with `forest_seed`.
pub fn derive_tree_seed(forest_seed: u64, tree_index: usize) -> u64 {
    seeding::derive(forest_seed, &[seeding::tag::TREE, tree_index as u64])
}

/// A trained forest: the partition plus one hybrid network per group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HqrfModel {
    pub partition: FeaturePartition,
    pub trees: Vec<HqnnModel>,
    pub num_qubits: usize,
    pub layers: usize,
}

/// Soft voting: the arithmetic mean of per-tree class-1 scores.
pub fn aggregate_scores(tree_scores: &[f64]) -> Result<f64> {
    if tree_scores.is_empty() {
        return Err(Error::structure(
            "cannot aggregate an empty score list".to_string(),
        ));
    }
    Ok(tree_scores.iter().sum::<f64>() / tree_scores.len() as f64)
}

/// Train one tree per feature group, in parallel. Tree i trains on the
/// dataset projected onto its group with seed `derive_tree_seed(config.seed, i)`.
pub fn train_forest_with_partition(
    dataset: &Dataset,
    partition: &FeaturePartition,
    layers: usize,
    config: &TrainConfig,
) -> Result<HqrfModel> {
    if partition.feature_count != dataset.feature_count() {
        return Err(Error::structure(format!(
            "partition covers {} features but the dataset has {}",
            partition.feature_count,
            dataset.feature_count()
        )));
    }
    let trees: Vec<HqnnModel> = partition
        .groups
        .par_iter()
        .enumerate()
        .map(|(tree_index, group)| {
            let projected = dataset.select_features(group)?;
            let tree_config = TrainConfig {
                seed: derive_tree_seed(config.seed, tree_index),
                ..*config
            };
            hqnn::train(&projected, partition.num_qubits, layers, &tree_config)
                .map(|(model, _)| model)
                .map_err(|e| e.annotate(format!("tree {tree_index}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HqrfModel {
        partition: partition.clone(),
        trees,
        num_qubits: partition.num_qubits,
        layers,
    })
}

/// Partition (balanced policy, seed derived from the config seed) and train.
pub fn train_forest(
    dataset: &Dataset,
    num_qubits: usize,
    layers: usize,
    config: &TrainConfig,
) -> Result<HqrfModel> {
    let partition_seed = seeding::derive(config.seed, &[seeding::tag::PARTITION]);
    let partition = partition_features(dataset.feature_count(), num_qubits, partition_seed)?;
    train_forest_with_partition(dataset, &partition, layers, config)
}

impl HqrfModel {
    /// Aggregate score and thresholded class for one feature vector.
    /// Ties at exactly 0.5 go to class 1 (`score >= 0.5`).
    pub fn predict(&self, features: &[f64]) -> Result<(f64, u8)> {
        if features.len() != self.partition.feature_count {
            return Err(Error::structure(format!(
                "sample has {} features, forest expects {}",
                features.len(),
                self.partition.feature_count
            )));
        }
        let mut tree_scores = Vec::with_capacity(self.trees.len());
        for (tree, group) in self.trees.iter().zip(&self.partition.groups) {
            let slice: Vec<f64> = group.iter().map(|&c| features[c]).collect();
            tree_scores.push(tree.forward(&slice)?.score);
        }
        let score = aggregate_scores(&tree_scores)?;
        Ok((score, u8::from(score >= 0.5)))
    }

    /// Aggregate scores for a batch, order preserving.
    pub fn predict_scores(&self, samples: &[Sample]) -> Result<Vec<f64>> {
        samples
            .iter()
            .map(|s| self.predict(&s.features).map(|(score, _)| score))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct VersionedForest {
    schema: String,
    forest: HqrfModel,
}

/// Serialize the partition and every tree as self-describing JSON.
pub fn save_forest<W: Write>(forest: &HqrfModel, writer: W) -> Result<()> {
    let versioned = VersionedForest {
        schema: FOREST_SCHEMA.to_string(),
        forest: forest.clone(),
    };
    serde_json::to_writer_pretty(writer, &versioned)?;
    Ok(())
}

pub fn load_forest<R: Read>(reader: R) -> Result<HqrfModel> {
    let versioned: VersionedForest = serde_json::from_reader(reader)?;
    if versioned.schema != FOREST_SCHEMA {
        return Err(Error::structure(format!(
            "unsupported forest schema '{}'",
            versioned.schema
        )));
    }
    Ok(versioned.forest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::DatasetName;
    use rand::Rng;

    fn check_partition(p: &FeaturePartition) {
        let expected = tree_count(p.feature_count, p.num_qubits);
        assert_eq!(p.group_count(), expected);
        let cap = ANGLES_PER_QUBIT * p.num_qubits;
        let mut seen = vec![false; p.feature_count];
        for group in &p.groups {
            assert!(!group.is_empty());
            assert!(group.len() <= cap);
            for &idx in group {
                assert!(!seen[idx], "feature {idx} appears twice");
                seen[idx] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn partition_counts_from_ceiling_rule() {
        assert_eq!(partition_features(13, 2, 0).unwrap().group_count(), 3);
        assert_eq!(partition_features(13, 4, 0).unwrap().group_count(), 2);
        let single = partition_features(6, 2, 0).unwrap();
        assert_eq!(single.group_count(), 1);
        assert_eq!(single.groups[0], (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn partition_is_seeded() {
        let a = partition_features(13, 2, 7).unwrap();
        let b = partition_features(13, 2, 7).unwrap();
        assert_eq!(a, b);
        let c = partition_features(13, 2, 8).unwrap();
        assert_ne!(a, c);
        check_partition(&a);
        check_partition(&c);
    }

    #[test]
    fn balanced_sizes_differ_by_at_most_one() {
        for (m, nq) in [(13, 2), (13, 3), (20, 2), (64, 6), (7, 1)] {
            let p = partition_features(m, nq, 3).unwrap();
            check_partition(&p);
            let max = p.groups.iter().map(Vec::len).max().unwrap();
            let min = p.groups.iter().map(Vec::len).min().unwrap();
            assert!(max - min <= 1, "m={m} nq={nq}: sizes {max}/{min}");
        }
    }

    #[test]
    fn paper_policy_only_fits_its_shape() {
        let p = partition_features_with_policy(13, 2, 1, PartitionPolicy::PaperFiveFiveThree)
            .unwrap();
        let sizes: Vec<usize> = p.groups.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![5, 5, 3]);
        check_partition(&p);

        assert!(matches!(
            partition_features_with_policy(13, 3, 1, PartitionPolicy::PaperFiveFiveThree),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            partition_features_with_policy(12, 2, 1, PartitionPolicy::PaperFiveFiveThree),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn aggregate_is_plain_mean() {
        assert_eq!(aggregate_scores(&[0.2, 0.4, 0.9]).unwrap(), 0.5);
        assert_eq!(aggregate_scores(&[0.37]).unwrap(), 0.37);
        assert_eq!(aggregate_scores(&[0.6, 0.6, 0.6]).unwrap(), 0.6);
        assert!(matches!(
            aggregate_scores(&[]),
            Err(Error::Structure(_))
        ));
    }

    fn toy_dataset(m: usize, n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..n)
            .map(|_| {
                let label = u8::from(rng.gen_bool(0.5));
                let shift = if label == 1 { 0.8 } else { -0.8 };
                Sample {
                    features: (0..m).map(|_| shift + rng.gen_range(-0.5..0.5)).collect(),
                    label,
                }
            })
            .collect();
        Dataset::new(DatasetName::Synthetic, samples).unwrap()
    }

    fn quick_config(seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: 4,
            seed,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn single_group_forest_reduces_to_lone_network() {
        let ds = toy_dataset(6, 24, 11);
        let config = quick_config(11);
        let forest = train_forest(&ds, 2, 1, &config).unwrap();
        assert_eq!(forest.trees.len(), 1);

        let lone_config = TrainConfig {
            seed: derive_tree_seed(config.seed, 0),
            ..config
        };
        let (lone, _) = hqnn::train(&ds, 2, 1, &lone_config).unwrap();
        assert_eq!(forest.trees[0], lone);

        let forest_scores = forest.predict_scores(&ds.samples).unwrap();
        let lone_scores = lone.predict_scores(&ds.samples).unwrap();
        assert_eq!(forest_scores, lone_scores);
    }

    #[test]
    fn forest_training_is_thread_count_invariant() {
        let ds = toy_dataset(13, 20, 5);
        let config = quick_config(5);
        let sequential = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| train_forest(&ds, 2, 1, &config).unwrap());
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| train_forest(&ds, 2, 1, &config).unwrap());
        assert_eq!(sequential, parallel);
    }

    #[test]
    fn zero_parameter_trees_tie_break_to_class_one() {
        let partition = partition_features(4, 2, 0).unwrap();
        let trees = partition
            .groups
            .iter()
            .map(|g| HqnnModel::zeros(g.len(), 2, 1).unwrap())
            .collect();
        let forest = HqrfModel {
            partition,
            trees,
            num_qubits: 2,
            layers: 1,
        };
        let (score, class) = forest.predict(&[0.3, -0.2, 1.0, 0.0]).unwrap();
        assert_eq!(score, 0.5);
        assert_eq!(class, 1);
    }

    #[test]
    fn predict_rejects_wrong_width_and_mean_is_group_order_invariant() {
        let ds = toy_dataset(5, 16, 9);
        let config = quick_config(9);
        let mut forest = train_forest(&ds, 1, 1, &config).unwrap();
        assert!(forest.trees.len() > 1);
        assert!(matches!(
            forest.predict(&[1.0, 2.0]),
            Err(Error::Structure(_))
        ));

        let sample = &ds.samples[0].features;
        let (score, _) = forest.predict(sample).unwrap();
        forest.trees.reverse();
        forest.partition.groups.reverse();
        let (swapped, _) = forest.predict(sample).unwrap();
        assert!((score - swapped).abs() < 1e-15);
    }

    #[test]
    fn forest_json_round_trips_exactly() {
        let ds = toy_dataset(5, 16, 13);
        let forest = train_forest(&ds, 2, 1, &quick_config(13)).unwrap();
        let mut buf = Vec::new();
        save_forest(&forest, &mut buf).unwrap();
        let back = load_forest(buf.as_slice()).unwrap();
        assert_eq!(forest, back);
    }
}
