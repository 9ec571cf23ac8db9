//! Fixed adversary strategies for the adversarial-order-with-sample setting.
//!
//! An adversary sees the instance, the marginals, and the sample set S, but
//! not the scheme's coins or its random tiebreak labeling. Each strategy is a
//! deterministic function of (instance, S, seed) and emits a permutation of
//! the non-sampled edges. Strategies that rank edges by their sample-based
//! bucket therefore use a fixed reference labeling (the identity), which is
//! the adversary's best guess at the scheme's hidden tiebreak.

use std::fmt;
use std::str::FromStr;

use rocrs_core::rng::{mix, SplitMix64};
use rocrs_core::{Instance, Labeling, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Non-sampled edges in ascending id order.
    Identity,
    /// Descending id order.
    Reverse,
    /// Descending sampled bucket load of the edge's order-smaller endpoint.
    HeavyBucketFirst,
    /// Ascending sampled bucket load of the edge's order-smaller endpoint.
    LightBucketFirst,
    /// A fixed shuffle derived from (seed, S).
    RandomFixed,
    /// Edges with endpoints outside the sampled core first (they force the
    /// scheme to extend its ordering), then by descending owner position.
    LabelingAttack,
}

pub const ALL_STRATEGIES: [Strategy; 6] = [
    Strategy::Identity,
    Strategy::Reverse,
    Strategy::HeavyBucketFirst,
    Strategy::LightBucketFirst,
    Strategy::RandomFixed,
    Strategy::LabelingAttack,
];

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Identity => "identity",
            Strategy::Reverse => "reverse",
            Strategy::HeavyBucketFirst => "heavy-bucket-first",
            Strategy::LightBucketFirst => "light-bucket-first",
            Strategy::RandomFixed => "random-fixed",
            Strategy::LabelingAttack => "labeling-attack",
        }
    }

    /// The arrival order of the non-sampled edges: a permutation of E\S,
    /// deterministic given (strategy, instance, S, seed).
    pub fn order(&self, instance: &Instance, sample: &[bool], seed: u64) -> Vec<usize> {
        let mut rest: Vec<usize> = (0..instance.edge_count())
            .filter(|&id| !sample[id])
            .collect();
        match self {
            Strategy::Identity => {}
            Strategy::Reverse => rest.reverse(),
            Strategy::HeavyBucketFirst => {
                let keys = bucket_keys(instance, sample, &rest);
                rest.sort_by_key(|&id| (std::cmp::Reverse(keys[id]), id));
            }
            Strategy::LightBucketFirst => {
                let keys = bucket_keys(instance, sample, &rest);
                rest.sort_by_key(|&id| (keys[id], id));
            }
            Strategy::RandomFixed => {
                let mut s_hash = 0u64;
                for (id, &in_s) in sample.iter().enumerate() {
                    if in_s {
                        s_hash = mix(s_hash, id as u64, 0x5348);
                    }
                }
                SplitMix64::new(mix(seed, s_hash, 0x6164_7621)).shuffle(&mut rest);
            }
            Strategy::LabelingAttack => {
                let ordering = reference_ordering(instance, sample);
                let core_set: Vec<bool> = {
                    let mut present = vec![false; instance.vertex_count()];
                    for &v in ordering.order() {
                        present[v] = true;
                    }
                    present
                };
                rest.sort_by_key(|&id| {
                    let e = instance.edge(id).expect("valid id");
                    let unseen =
                        (!core_set[e.u]) as usize + (!core_set[e.v]) as usize;
                    let owner_pos = owner_position(&ordering, e.u, e.v);
                    (std::cmp::Reverse(unseen), std::cmp::Reverse(owner_pos), id)
                });
            }
        }
        rest
    }
}

/// The sample-based ordering an adversary can predict: built with the
/// identity labeling and extended over all vertices.
fn reference_ordering(instance: &Instance, sample: &[bool]) -> Ordering {
    let labeling = Labeling::identity(instance.vertex_count());
    Ordering::from_sample_full(instance, sample, &labeling).expect("complete labeling")
}

fn owner_position(ordering: &Ordering, u: usize, v: usize) -> usize {
    let pu = ordering.position(u).expect("full ordering");
    let pv = ordering.position(v).expect("full ordering");
    pu.min(pv)
}

/// Sampled bucket load of the order-smaller endpoint of each edge, under the
/// reference ordering.
fn bucket_keys(instance: &Instance, sample: &[bool], rest: &[usize]) -> Vec<i64> {
    let ordering = reference_ordering(instance, sample);
    let mut keys = vec![0i64; instance.edge_count()];
    for &id in rest {
        let e = instance.edge(id).expect("valid id");
        let owner = if ordering.precedes(e.u, e.v).expect("present") {
            e.u
        } else {
            e.v
        };
        keys[id] = ordering
            .bucket_load_num(instance, owner, Some(sample))
            .expect("present");
    }
    keys
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Strategy, String> {
        ALL_STRATEGIES
            .iter()
            .find(|strategy| strategy.name() == s)
            .copied()
            .ok_or_else(|| {
                format!(
                    "unknown adversary '{}' (expected one of: {})",
                    s,
                    ALL_STRATEGIES.map(|s| s.name()).join(", ")
                )
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rocrs_core::fixtures;

    #[test]
    fn identity_and_reverse_orders() {
        let fig5 = fixtures::fig5();
        let sample = vec![false, true, false, false];
        assert_eq!(
            Strategy::Identity.order(&fig5, &sample, 0),
            vec![0, 2, 3]
        );
        assert_eq!(Strategy::Reverse.order(&fig5, &sample, 0), vec![3, 2, 0]);
    }

    #[test]
    fn every_strategy_is_a_deterministic_permutation() {
        let fig6 = fixtures::fig6();
        for mask in 0u32..32 {
            let sample: Vec<bool> = (0..5).map(|i| mask & (1 << i) != 0).collect();
            for strategy in ALL_STRATEGIES {
                let a = strategy.order(&fig6, &sample, 42);
                let b = strategy.order(&fig6, &sample, 42);
                assert_eq!(a, b);
                let mut sorted = a.clone();
                sorted.sort_unstable();
                let expected: Vec<usize> =
                    (0..5).filter(|&id| !sample[id]).collect();
                assert_eq!(sorted, expected, "{} mask {:b}", strategy, mask);
            }
        }
    }

    #[test]
    fn heavy_and_light_bucket_orders_on_fig6() {
        // S = {v-u, first u-c edge}: the reference ordering is c, v, u on the
        // core, so the remaining parallel u-c edge is owned by c, whose
        // sampled bucket carries load 0.2; the other two owners carry 0.
        let fig6 = fixtures::fig6();
        let sample = vec![false, false, true, true, false];
        assert_eq!(
            Strategy::HeavyBucketFirst.order(&fig6, &sample, 0),
            vec![4, 0, 1]
        );
        assert_eq!(
            Strategy::LightBucketFirst.order(&fig6, &sample, 0),
            vec![0, 1, 4]
        );
    }

    #[test]
    fn random_fixed_depends_on_sample_and_seed() {
        let fig6 = fixtures::fig6();
        let empty = vec![false; 5];
        let one = vec![true, false, false, false, false];
        let a = Strategy::RandomFixed.order(&fig6, &empty, 1);
        let b = Strategy::RandomFixed.order(&fig6, &empty, 2);
        let c = Strategy::RandomFixed.order(&fig6, &one, 1);
        assert!(a != b || a != c, "shuffles never vary");
    }

    #[test]
    fn strategy_names_round_trip() {
        for strategy in ALL_STRATEGIES {
            assert_eq!(strategy.name().parse::<Strategy>().unwrap(), strategy);
        }
        assert!("nope".parse::<Strategy>().is_err());
    }
}
