//! The selection schemes.
//!
//! Three variants share one selection rule: pick an arriving edge if it is
//! active, not excluded by its pre-flipped coin, and its bucket (the edges
//! owned by its order-smaller endpoint) has no pick yet.
//!
//! * prior knowledge: full ordering over all edges, non-exclusion 1/8;
//! * ROCRS: binomial sample prefix, ordering from the sample only,
//!   non-exclusion 1/24;
//! * sample OCRS: same rule, but the non-sampled edges arrive in an
//!   adversary-chosen order and never reveal their marginals.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::frac::{lcm, Frac};
use crate::instance::{Instance, InstanceError, EXACT_POLYTOPE_CAP};
use crate::ordering::{Labeling, Ordering, OrderingError};
use crate::rng::{tag, CoinBox, SplitMix64};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeError {
    /// The marginals are not in the forest polytope.
    PolytopeViolation,
    StreamTooShort { expected: usize, got: usize },
    /// A sampled-phase event arrived without its marginal.
    MissingMarginal { edge: usize },
    /// An arrival sequence is not a permutation of the expected edge set.
    NotAPermutation,
    /// A vertex id is outside the declared id space.
    VertexOutOfRange { vertex: usize },
    Ordering(OrderingError),
    Instance(InstanceError),
    NumericOverflow,
}

impl fmt::Display for SchemeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeError::PolytopeViolation => write!(f, "marginals outside the forest polytope"),
            SchemeError::StreamTooShort { expected, got } => {
                write!(f, "stream has {} events, expected {}", got, expected)
            }
            SchemeError::MissingMarginal { edge } => {
                write!(f, "sampled edge {} has no marginal", edge)
            }
            SchemeError::NotAPermutation => write!(f, "arrival order is not a permutation"),
            SchemeError::VertexOutOfRange { vertex } => {
                write!(f, "vertex id {} out of range", vertex)
            }
            SchemeError::Ordering(e) => write!(f, "{}", e),
            SchemeError::Instance(e) => write!(f, "{}", e),
            SchemeError::NumericOverflow => write!(f, "marginal denominators overflow"),
        }
    }
}

impl From<OrderingError> for SchemeError {
    fn from(e: OrderingError) -> SchemeError {
        SchemeError::Ordering(e)
    }
}

impl From<InstanceError> for SchemeError {
    fn from(e: InstanceError) -> SchemeError {
        SchemeError::Instance(e)
    }
}

/// Scheme constants. Defaults are the analyzed values (pick 1/24 on a half
/// sample, pick 1/8 with prior knowledge); they are configuration so sharper
/// empirical constants can be explored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoinConfig {
    /// Pick (non-exclusion) probability of the sample-based schemes.
    pub pick_probability: Frac,
    /// Per-edge sample inclusion rate; also the binomial rate of the prefix.
    pub sample_rate: Frac,
    /// Pick probability of the prior-knowledge scheme.
    pub prior_pick_probability: Frac,
}

impl Default for CoinConfig {
    fn default() -> CoinConfig {
        CoinConfig {
            pick_probability: Frac::new(1, 24),
            sample_rate: Frac::new(1, 2),
            prior_pick_probability: Frac::new(1, 8),
        }
    }
}

/// One online arrival. `x` is present only when the scheme is entitled to it:
/// sampled-phase events and the prior-knowledge setting. The unknown-setting
/// schemes never read `x` of a post-sample event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalEvent {
    pub edge: usize,
    pub u: usize,
    pub v: usize,
    pub active: bool,
    pub x: Option<Frac>,
}

/// Per-edge audit trail of one trial.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeTrail {
    pub sampled: bool,
    pub active: bool,
    /// Pre-flipped exclusion mark (true with probability 1 − pick).
    pub excluded: bool,
    /// Active and non-excluded, but the bucket already had a pick.
    pub blocked: bool,
    pub picked: bool,
}

/// Outcome of one trial: the picked forest, the audit trail, and the vertex
/// ordering the run used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub picked: Vec<usize>,
    pub trail: Vec<EdgeTrail>,
    pub ordering: Ordering,
}

/// Tiebreak source: a fixed injected labeling (verification) or the on-the-fly
/// uniformly random insertion the streaming schemes use.
#[derive(Debug, Clone, Copy)]
pub enum TieBreak<'a> {
    Fixed(&'a Labeling),
    OnTheFly,
}

enum LabelingState<'a> {
    Fixed(&'a Labeling),
    Own(Labeling, SplitMix64),
}

impl<'a> LabelingState<'a> {
    fn new(tiebreak: TieBreak<'a>, coins: &CoinBox) -> LabelingState<'a> {
        match tiebreak {
            TieBreak::Fixed(labeling) => LabelingState::Fixed(labeling),
            TieBreak::OnTheFly => LabelingState::Own(Labeling::new(), coins.stream(tag::LABELING)),
        }
    }

    /// Ensures `v` has a label; on-the-fly inserts at a random position.
    fn observe(&mut self, v: usize) -> Result<(), SchemeError> {
        match self {
            LabelingState::Fixed(labeling) => labeling
                .rank(v)
                .map(|_| ())
                .ok_or(SchemeError::Ordering(OrderingError::LabelingIncomplete { vertex: v })),
            LabelingState::Own(labeling, rng) => {
                if labeling.rank(v).is_none() {
                    labeling.insert_random(v, rng).expect("fresh vertex");
                }
                Ok(())
            }
        }
    }

    fn labeling(&self) -> &Labeling {
        match self {
            LabelingState::Fixed(labeling) => labeling,
            LabelingState::Own(labeling, _) => labeling,
        }
    }
}

/// Draws the active edge set: each edge independently with probability `x_e`.
pub fn realize_activity(instance: &Instance, coins: &CoinBox) -> Vec<bool> {
    let scale = instance.scale();
    instance
        .edges()
        .iter()
        .map(|e| coins.coin(e.id, tag::ACTIVE, instance.x_num(e.id), scale))
        .collect()
}

/// Draws the sample set of the adversarial-order setting: each edge
/// independently with probability `sample_rate`.
pub fn realize_sample(instance: &Instance, coins: &CoinBox, cfg: &CoinConfig) -> Vec<bool> {
    let rate = cfg.sample_rate;
    (0..instance.edge_count())
        .map(|id| coins.coin(id, tag::SAMPLE, rate.num(), rate.den()))
        .collect()
}

fn check_permutation(order: &[usize], expected: &[bool]) -> Result<(), SchemeError> {
    let mut seen = vec![false; expected.len()];
    let mut count = 0;
    for &id in order {
        if id >= expected.len() || !expected[id] || seen[id] {
            return Err(SchemeError::NotAPermutation);
        }
        seen[id] = true;
        count += 1;
    }
    if count != expected.iter().filter(|&&b| b).count() {
        return Err(SchemeError::NotAPermutation);
    }
    Ok(())
}

/// The warm-up scheme with full prior knowledge of the graph and `x`.
pub fn run_prior_knowledge(
    instance: &Instance,
    activity: &[bool],
    arrival: &[usize],
    tiebreak: TieBreak<'_>,
    coins: &CoinBox,
    cfg: &CoinConfig,
) -> Result<Selection, SchemeError> {
    if instance.vertex_count() <= EXACT_POLYTOPE_CAP && !instance.in_forest_polytope()? {
        return Err(SchemeError::PolytopeViolation);
    }
    let m = instance.edge_count();
    check_permutation(arrival, &vec![true; m])?;
    let mut labels = LabelingState::new(tiebreak, coins);
    // The vertex set is known upfront here, so the whole labeling is drawn
    // before the ordering is built.
    for v in 0..instance.vertex_count() {
        labels.observe(v)?;
    }
    let ordering = Ordering::offline(instance, None, labels.labeling())?;

    let pick = cfg.prior_pick_probability;
    let mut trail = vec![EdgeTrail::default(); m];
    let mut used = vec![false; instance.vertex_count()];
    let mut picked = Vec::new();
    for &id in arrival {
        let e = instance.edge(id)?;
        let t = &mut trail[id];
        t.active = activity[id];
        t.excluded = !coins.coin(id, tag::EXCLUDE, pick.num(), pick.den());
        if !t.active || t.excluded {
            continue;
        }
        let owner = if ordering.precedes(e.u, e.v)? { e.u } else { e.v };
        if used[owner] {
            t.blocked = true;
        } else {
            used[owner] = true;
            t.picked = true;
            picked.push(id);
        }
    }
    Ok(Selection {
        picked,
        trail,
        ordering,
    })
}

/// Shared second phase: the first `s` events are the observed sample, the
/// rest are selected online under `≺_S`. `n_hint` only bounds the vertex id
/// space; no structure is read from it.
fn run_stream(
    events: &[ArrivalEvent],
    s: usize,
    n_hint: usize,
    tiebreak: TieBreak<'_>,
    coins: &CoinBox,
    cfg: &CoinConfig,
) -> Result<Selection, SchemeError> {
    let m = events.len();
    let mut seen_edge = vec![false; m];
    for ev in events {
        if ev.edge >= m || seen_edge[ev.edge] {
            return Err(SchemeError::NotAPermutation);
        }
        seen_edge[ev.edge] = true;
        if ev.u >= n_hint || ev.v >= n_hint {
            return Err(SchemeError::VertexOutOfRange {
                vertex: ev.u.max(ev.v),
            });
        }
    }

    let mut labels = LabelingState::new(tiebreak, coins);
    let pick = cfg.pick_probability;
    let mut trail = vec![EdgeTrail::default(); m];

    // Sample phase: observe, never pick. Marginals are revealed here.
    let mut scale: i64 = 1;
    for ev in &events[..s] {
        let x = ev.x.ok_or(SchemeError::MissingMarginal { edge: ev.edge })?;
        scale = lcm(scale, x.den())
            .filter(|&s| s <= 1_000_000_000_000)
            .ok_or(SchemeError::NumericOverflow)?;
        labels.observe(ev.u)?;
        labels.observe(ev.v)?;
        trail[ev.edge].sampled = true;
        trail[ev.edge].active = ev.active;
    }
    let sampled_edges: Vec<(usize, usize, i64)> = events[..s]
        .iter()
        .map(|ev| {
            let x = ev.x.expect("checked above");
            (ev.u, ev.v, x.num() * (scale / x.den()))
        })
        .collect();
    let mut ordering = Ordering::from_scaled_edges(n_hint, &sampled_edges, labels.labeling())?;

    // Selection phase. Post-sample marginals are never read.
    let mut used = vec![false; n_hint];
    let mut picked = Vec::new();
    for ev in &events[s..] {
        for w in [ev.u, ev.v] {
            if !ordering.contains(w) {
                labels.observe(w)?;
                ordering.extend_with_unseen(labels.labeling(), w)?;
            }
        }
        let t = &mut trail[ev.edge];
        t.active = ev.active;
        t.excluded = !coins.coin(ev.edge, tag::EXCLUDE, pick.num(), pick.den());
        if !ev.active || t.excluded {
            continue;
        }
        let owner = if ordering.precedes(ev.u, ev.v)? { ev.u } else { ev.v };
        if used[owner] {
            t.blocked = true;
        } else {
            used[owner] = true;
            t.picked = true;
            picked.push(ev.edge);
        }
    }
    Ok(Selection {
        picked,
        trail,
        ordering,
    })
}

/// Algorithm: sample a Binomial(m, sample_rate) prefix of the stream, build
/// `≺_S` from it, then select greedily per bucket with the pick coin.
pub fn run_rocrs(
    events: &[ArrivalEvent],
    m: usize,
    n_hint: usize,
    tiebreak: TieBreak<'_>,
    coins: &CoinBox,
    cfg: &CoinConfig,
) -> Result<Selection, SchemeError> {
    if events.len() < m {
        return Err(SchemeError::StreamTooShort {
            expected: m,
            got: events.len(),
        });
    }
    let s = coins.binomial(m, cfg.sample_rate.num(), cfg.sample_rate.den());
    run_stream(&events[..m], s, n_hint, tiebreak, coins, cfg)
}

/// The adversarial-order variant: `sample` is drawn externally (independent
/// inclusion), the non-sampled edges follow `adversary_order` and reveal only
/// endpoints and activity.
pub fn run_sample_ocrs(
    instance: &Instance,
    activity: &[bool],
    sample: &[bool],
    adversary_order: &[usize],
    tiebreak: TieBreak<'_>,
    coins: &CoinBox,
    cfg: &CoinConfig,
) -> Result<Selection, SchemeError> {
    let complement: Vec<bool> = sample.iter().map(|&b| !b).collect();
    check_permutation(adversary_order, &complement)?;
    let mut events = Vec::with_capacity(instance.edge_count());
    for e in instance.edges() {
        if sample[e.id] {
            events.push(ArrivalEvent {
                edge: e.id,
                u: e.u,
                v: e.v,
                active: activity[e.id],
                x: Some(instance.x(e.id)),
            });
        }
    }
    let s = events.len();
    for &id in adversary_order {
        let e = instance.edge(id)?;
        events.push(ArrivalEvent {
            edge: id,
            u: e.u,
            v: e.v,
            active: activity[id],
            x: None,
        });
    }
    run_stream(&events, s, instance.vertex_count(), tiebreak, coins, cfg)
}

/// A violated per-trial structural invariant found by [`audit_selection`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditViolation {
    /// The picked set contains a cycle.
    NotAForest,
    /// A sampled edge was picked.
    SampledPicked { edge: usize },
    /// Two picks share the same order-smaller endpoint.
    MultiplePicksInBucket { vertex: usize },
    /// An active, non-excluded, non-sampled edge was skipped although every
    /// competing bucket edge of both endpoints was excluded or inactive.
    DecompositionFailure { edge: usize },
}

impl fmt::Display for AuditViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditViolation::NotAForest => write!(f, "picked set is not a forest"),
            AuditViolation::SampledPicked { edge } => {
                write!(f, "sampled edge {} was picked", edge)
            }
            AuditViolation::MultiplePicksInBucket { vertex } => {
                write!(f, "bucket of vertex {} has several picks", vertex)
            }
            AuditViolation::DecompositionFailure { edge } => {
                write!(f, "edge {} unblocked but not picked", edge)
            }
        }
    }
}

/// Structural audit of one trial: the picked set is a forest, sampled edges
/// are never picked, each bucket holds at most one pick, and whenever an edge
/// is active, non-excluded, non-sampled, and every other non-sampled edge in
/// the buckets of its endpoints is excluded or inactive, it must be picked.
pub fn audit_selection(
    instance: &Instance,
    sel: &Selection,
) -> Result<(), AuditViolation> {
    if !instance
        .is_forest(sel.picked.iter().copied())
        .expect("trail ids are valid")
    {
        return Err(AuditViolation::NotAForest);
    }
    let mut owner_used = vec![false; instance.vertex_count()];
    for &id in &sel.picked {
        if sel.trail[id].sampled {
            return Err(AuditViolation::SampledPicked { edge: id });
        }
        let e = instance.edge(id).expect("picked id");
        let owner = if sel.ordering.precedes(e.u, e.v).expect("ordered") {
            e.u
        } else {
            e.v
        };
        if owner_used[owner] {
            return Err(AuditViolation::MultiplePicksInBucket { vertex: owner });
        }
        owner_used[owner] = true;
    }
    for (id, t) in sel.trail.iter().enumerate() {
        if t.sampled || !t.active || t.excluded || t.picked {
            continue;
        }
        // The edge satisfied events A and C but was skipped; some competitor
        // in a shared bucket must defeat event B.
        let e = instance.edge(id).expect("trail id");
        let mut unblocked = true;
        'endpoints: for w in [e.u, e.v] {
            for &f in instance.incident(w) {
                if f == id {
                    continue;
                }
                let ft = &sel.trail[f];
                let other = instance.edge(f).expect("incident id").other(w);
                let in_bucket = sel.ordering.precedes(w, other).expect("ordered");
                if in_bucket && !ft.sampled && ft.active && !ft.excluded {
                    unblocked = false;
                    break 'endpoints;
                }
            }
        }
        if unblocked {
            return Err(AuditViolation::DecompositionFailure { edge: id });
        }
    }
    Ok(())
}

/// Builds the ROCRS event stream for a trial of the random-order model:
/// a uniformly random arrival permutation with all information attached.
/// The scheme itself only reads what its phase entitles it to.
pub fn random_order_events(
    instance: &Instance,
    activity: &[bool],
    coins: &CoinBox,
) -> Vec<ArrivalEvent> {
    let mut order: Vec<usize> = (0..instance.edge_count()).collect();
    coins.stream(tag::ARRIVAL).shuffle(&mut order);
    order
        .into_iter()
        .map(|id| {
            let e = instance.edge(id).expect("valid id");
            ArrivalEvent {
                edge: id,
                u: e.u,
                v: e.v,
                active: activity[id],
                x: Some(instance.x(id)),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn freq(hits: u64, trials: u64) -> f64 {
        hits as f64 / trials as f64
    }

    fn assert_within_4_sigma(f: f64, p: f64, trials: u64) {
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((f - p).abs() <= 4.0 * sigma, "f = {}, p = {}", f, p);
    }

    #[test]
    fn activity_degenerate_cases() {
        let zeros = Instance::from_f64(3, &[(0, 1, 0.0), (1, 2, 0.0)]).unwrap();
        let ones = Instance::from_f64(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        for t in 0..50 {
            let coins = CoinBox::for_trial(5, t);
            assert!(realize_activity(&zeros, &coins).iter().all(|&a| !a));
            assert!(realize_activity(&ones, &coins).iter().all(|&a| a));
        }
    }

    #[test]
    fn activity_frequency_tracks_marginals() {
        let fig5 = fixtures::fig5();
        let trials = 100_000u64;
        let mut hits = vec![0u64; 4];
        for t in 0..trials {
            let coins = CoinBox::for_trial(11, t);
            for (id, &a) in realize_activity(&fig5, &coins).iter().enumerate() {
                if a {
                    hits[id] += 1;
                }
            }
        }
        for id in 0..4 {
            assert_within_4_sigma(freq(hits[id], trials), fig5.x(id).to_f64(), trials);
        }
    }

    #[test]
    fn prior_single_edge_law_is_one_eighth() {
        let single = Instance::from_f64(2, &[(0, 1, 1.0)]).unwrap();
        let cfg = CoinConfig::default();
        let trials = 400_000u64;
        let mut hits = 0u64;
        for t in 0..trials {
            let coins = CoinBox::for_trial(21, t);
            let activity = realize_activity(&single, &coins);
            let sel =
                run_prior_knowledge(&single, &activity, &[0], TieBreak::OnTheFly, &coins, &cfg)
                    .unwrap();
            if sel.trail[0].picked {
                hits += 1;
            }
        }
        assert_within_4_sigma(freq(hits, trials), 0.125, trials);
    }

    #[test]
    fn prior_rejects_polytope_violation() {
        let triangle =
            Instance::from_f64(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let coins = CoinBox::new(1);
        let err = run_prior_knowledge(
            &triangle,
            &[true, true, true],
            &[0, 1, 2],
            TieBreak::OnTheFly,
            &coins,
            &CoinConfig::default(),
        );
        assert_eq!(err, Err(SchemeError::PolytopeViolation));
    }

    #[test]
    fn rocrs_single_edge_law_is_one_in_48() {
        let single = Instance::from_f64(2, &[(0, 1, 1.0)]).unwrap();
        let cfg = CoinConfig::default();
        let trials = 600_000u64;
        let mut hits = 0u64;
        for t in 0..trials {
            let coins = CoinBox::for_trial(31, t);
            let activity = realize_activity(&single, &coins);
            let events = random_order_events(&single, &activity, &coins);
            let sel = run_rocrs(&events, 1, 2, TieBreak::OnTheFly, &coins, &cfg).unwrap();
            if sel.trail[0].picked {
                hits += 1;
            }
        }
        assert_within_4_sigma(freq(hits, trials), 1.0 / 48.0, trials);
    }

    #[test]
    fn every_selection_is_a_forest_with_one_pick_per_bucket() {
        let fig6 = fixtures::fig6();
        let cfg = CoinConfig::default();
        for t in 0..3000 {
            let coins = CoinBox::for_trial(41, t);
            let activity = realize_activity(&fig6, &coins);
            let events = random_order_events(&fig6, &activity, &coins);
            let sel = run_rocrs(&events, 5, 5, TieBreak::OnTheFly, &coins, &cfg).unwrap();
            assert!(fig6.is_forest(sel.picked.iter().copied()).unwrap());
            // Sampled edges are never picked.
            for (id, t) in sel.trail.iter().enumerate() {
                assert!(!(t.sampled && t.picked), "sampled edge {} picked", id);
            }
            // At most one pick per bucket owner.
            let mut owners = vec![0u32; 5];
            for &id in &sel.picked {
                let e = fig6.edge(id).unwrap();
                let owner = if sel.ordering.precedes(e.u, e.v).unwrap() {
                    e.u
                } else {
                    e.v
                };
                owners[owner] += 1;
            }
            assert!(owners.iter().all(|&c| c <= 1));
        }
    }

    #[test]
    fn post_sample_marginals_are_never_read() {
        // Blanking x on post-sample events must not change anything.
        let fig6 = fixtures::fig6();
        let cfg = CoinConfig::default();
        for t in 0..2000 {
            let coins = CoinBox::for_trial(51, t);
            let activity = realize_activity(&fig6, &coins);
            let events = random_order_events(&fig6, &activity, &coins);
            let s = coins.binomial(5, 1, 2);
            let mut blanked = events.clone();
            for ev in &mut blanked[s..] {
                ev.x = None;
            }
            let full = run_rocrs(&events, 5, 5, TieBreak::OnTheFly, &coins, &cfg).unwrap();
            let blind = run_rocrs(&blanked, 5, 5, TieBreak::OnTheFly, &coins, &cfg).unwrap();
            assert_eq!(full, blind);
        }
    }

    #[test]
    fn missing_sampled_marginal_is_an_error() {
        let single = Instance::from_f64(2, &[(0, 1, 1.0)]).unwrap();
        let coins = CoinBox::new(0);
        // Force a sampling seed where the edge lands in the prefix.
        for t in 0..64 {
            let coins = CoinBox::for_trial(61, t);
            if coins.binomial(1, 1, 2) == 1 {
                let activity = realize_activity(&single, &coins);
                let mut events = random_order_events(&single, &activity, &coins);
                events[0].x = None;
                let err = run_rocrs(&events, 1, 2, TieBreak::OnTheFly, &coins, &CoinConfig::default());
                assert_eq!(err, Err(SchemeError::MissingMarginal { edge: 0 }));
                return;
            }
        }
        let _ = coins;
        panic!("no sampling seed found");
    }

    #[test]
    fn sample_ocrs_rejects_bad_adversary_order() {
        let fig5 = fixtures::fig5();
        let coins = CoinBox::new(3);
        let activity = vec![true; 4];
        let sample = vec![true, false, false, false];
        for bad in [vec![1, 2], vec![0, 1, 2, 3], vec![1, 1, 2]] {
            let err = run_sample_ocrs(
                &fig5,
                &activity,
                &sample,
                &bad,
                TieBreak::OnTheFly,
                &coins,
                &CoinConfig::default(),
            );
            assert_eq!(err, Err(SchemeError::NotAPermutation));
        }
    }

    #[test]
    fn sample_ocrs_identity_matches_rocrs_law() {
        // With a uniformly random adversary order and an independent-coin
        // sample, the selection law coincides with the random-order run.
        let fig5 = fixtures::fig5();
        let cfg = CoinConfig::default();
        let trials = 120_000u64;
        let mut rocrs_hits = vec![0u64; 4];
        let mut ocrs_hits = vec![0u64; 4];
        for t in 0..trials {
            let coins = CoinBox::for_trial(71, t);
            let activity = realize_activity(&fig5, &coins);
            let events = random_order_events(&fig5, &activity, &coins);
            let sel = run_rocrs(&events, 4, 5, TieBreak::OnTheFly, &coins, &cfg).unwrap();
            for &id in &sel.picked {
                rocrs_hits[id] += 1;
            }

            let coins = CoinBox::for_trial(72, t);
            let activity = realize_activity(&fig5, &coins);
            let sample = realize_sample(&fig5, &coins, &cfg);
            let mut rest: Vec<usize> = (0..4).filter(|&id| !sample[id]).collect();
            coins.stream(tag::ARRIVAL).shuffle(&mut rest);
            let sel = run_sample_ocrs(
                &fig5, &activity, &sample, &rest, TieBreak::OnTheFly, &coins, &cfg,
            )
            .unwrap();
            for &id in &sel.picked {
                ocrs_hits[id] += 1;
            }
        }
        for id in 0..4 {
            let fa = freq(rocrs_hits[id], trials);
            let fb = freq(ocrs_hits[id], trials);
            let sigma = (fa.max(fb).max(1e-6) / trials as f64).sqrt();
            assert!((fa - fb).abs() < 6.0 * sigma, "edge {}: {} vs {}", id, fa, fb);
        }
    }

    #[test]
    fn audits_pass_on_all_three_schemes() {
        let fig6 = fixtures::fig6();
        let cfg = CoinConfig::default();
        for t in 0..2000 {
            let coins = CoinBox::for_trial(81, t);
            let activity = realize_activity(&fig6, &coins);

            let mut arrival: Vec<usize> = (0..5).collect();
            coins.stream(tag::ARRIVAL).shuffle(&mut arrival);
            let sel = run_prior_knowledge(
                &fig6, &activity, &arrival, TieBreak::OnTheFly, &coins, &cfg,
            )
            .unwrap();
            audit_selection(&fig6, &sel).unwrap();

            let events = random_order_events(&fig6, &activity, &coins);
            let sel = run_rocrs(&events, 5, 5, TieBreak::OnTheFly, &coins, &cfg).unwrap();
            audit_selection(&fig6, &sel).unwrap();

            let sample = realize_sample(&fig6, &coins, &cfg);
            let rest: Vec<usize> = (0..5).filter(|&id| !sample[id]).collect();
            let sel = run_sample_ocrs(
                &fig6, &activity, &sample, &rest, TieBreak::OnTheFly, &coins, &cfg,
            )
            .unwrap();
            audit_selection(&fig6, &sel).unwrap();
        }
    }

    #[test]
    fn audit_flags_fabricated_violations() {
        let fig6 = fixtures::fig6();
        let cfg = CoinConfig::default();
        let coins = CoinBox::for_trial(91, 0);
        let activity = vec![true; 5];
        let sample = vec![false; 5];
        let rest: Vec<usize> = (0..5).collect();
        let sel = run_sample_ocrs(
            &fig6, &activity, &sample, &rest, TieBreak::OnTheFly, &coins, &cfg,
        )
        .unwrap();
        // The two parallel edges picked together form a 2-cycle.
        let mut broken = sel.clone();
        broken.picked = vec![3, 4];
        assert_eq!(audit_selection(&fig6, &broken), Err(AuditViolation::NotAForest));
        // An unblocked active, non-excluded, non-sampled edge must be picked.
        let mut broken = sel.clone();
        for t in broken.trail.iter_mut() {
            t.active = false;
            t.excluded = true;
            t.picked = false;
        }
        broken.picked.clear();
        broken.trail[0].active = true;
        broken.trail[0].excluded = false;
        assert_eq!(
            audit_selection(&fig6, &broken),
            Err(AuditViolation::DecompositionFailure { edge: 0 })
        );
    }

    #[test]
    fn ordering_ignores_arrival_order_of_non_sampled_edges() {
        // With a fixed labeling, the final ordering depends only on the
        // sample and its marginals, never on how the rest is permuted.
        let fig6 = fixtures::fig6();
        let cfg = CoinConfig::default();
        let labeling = Labeling::from_order(&[2, 0, 4, 1, 3]).unwrap();
        for mask in 0u32..32 {
            let sample: Vec<bool> = (0..5).map(|i| mask & (1 << i) != 0).collect();
            let rest: Vec<usize> = (0..5).filter(|&id| !sample[id]).collect();
            let mut baseline = None;
            for t in 0..6 {
                let coins = CoinBox::for_trial(101, t);
                let mut order = rest.clone();
                coins.stream(tag::ARRIVAL).shuffle(&mut order);
                let sel = run_sample_ocrs(
                    &fig6,
                    &[true; 5],
                    &sample,
                    &order,
                    TieBreak::Fixed(&labeling),
                    &coins,
                    &cfg,
                )
                .unwrap();
                match &baseline {
                    None => baseline = Some(sel.ordering),
                    Some(b) => assert_eq!(b, &sel.ordering, "mask = {:b}", mask),
                }
            }
        }
    }

    #[test]
    fn binomial_prefix_equals_independent_inclusion() {
        // Exact enumeration on m ≤ 4: under a uniform arrival order and a
        // Binomial(m, 1/2) prefix, every subset S has probability 2^-m.
        for m in 1usize..=4 {
            let ids: Vec<usize> = (0..m).collect();
            let mut orders = Vec::new();
            heap_permutations(&mut ids.clone(), m, &mut orders);
            let mut subset_weight = vec![Frac::ZERO; 1 << m];
            let order_weight = Frac::new(1, orders.len() as i64);
            for order in &orders {
                for s in 0..=m {
                    // Binomial(m, 1/2) puts weight C(m, s) / 2^m on s.
                    let binom = Frac::new(choose(m, s), 1 << m);
                    let mut mask = 0usize;
                    for &id in &order[..s] {
                        mask |= 1 << id;
                    }
                    let w = order_weight.checked_mul(binom).unwrap();
                    subset_weight[mask] = subset_weight[mask].checked_add(w).unwrap();
                }
            }
            for (mask, &w) in subset_weight.iter().enumerate() {
                assert_eq!(w, Frac::new(1, 1 << m), "m = {}, mask = {:b}", m, mask);
            }
        }
    }

    fn choose(n: usize, k: usize) -> i64 {
        let mut c = 1i64;
        for i in 0..k {
            c = c * (n - i) as i64 / (i + 1) as i64;
        }
        c
    }

    fn heap_permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap_permutations(items, k - 1, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
}
