//! x-topological orderings and the consistent tiebreak labeling.
//!
//! An ordering is built by repeatedly removing the vertex with minimum
//! remaining incident x-load; ties go to the vertex with the smallest labeling
//! position. Sample-based orderings cover the endpoints of sampled edges and
//! are extended on the fly: vertices revealed later are inserted before the
//! sampled core, mutually ordered by the labeling.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::Instance;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingError {
    DuplicateVertex { vertex: usize },
    UnknownVertex { vertex: usize },
    /// The labeling does not contain a vertex that must be ordered.
    LabelingIncomplete { vertex: usize },
}

impl fmt::Display for OrderingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderingError::DuplicateVertex { vertex } => {
                write!(f, "vertex {} already present", vertex)
            }
            OrderingError::UnknownVertex { vertex } => {
                write!(f, "vertex {} not present", vertex)
            }
            OrderingError::LabelingIncomplete { vertex } => {
                write!(f, "labeling misses vertex {}", vertex)
            }
        }
    }
}

/// A total order on vertices used as the consistent tiebreaking rule.
/// Position in the list is the label rank; lower rank wins ties.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Labeling {
    order: Vec<usize>,
}

impl Labeling {
    pub fn new() -> Labeling {
        Labeling { order: Vec::new() }
    }

    /// A fixed labeling, for deterministic verification runs.
    pub fn from_order(order: &[usize]) -> Result<Labeling, OrderingError> {
        let mut labeling = Labeling::new();
        for &v in order {
            if labeling.rank(v).is_some() {
                return Err(OrderingError::DuplicateVertex { vertex: v });
            }
            labeling.order.push(v);
        }
        Ok(labeling)
    }

    /// The identity labeling on `0..n`.
    pub fn identity(n: usize) -> Labeling {
        Labeling {
            order: (0..n).collect(),
        }
    }

    /// Inserts `v` at a uniformly random position among the `len + 1` slots,
    /// preserving the relative order of the existing vertices.
    pub fn insert_random(&mut self, v: usize, rng: &mut SplitMix64) -> Result<(), OrderingError> {
        if self.rank(v).is_some() {
            return Err(OrderingError::DuplicateVertex { vertex: v });
        }
        let slot = rng.uniform_below(self.order.len() as u64 + 1) as usize;
        self.order.insert(slot, v);
        Ok(())
    }

    pub fn rank(&self, v: usize) -> Option<usize> {
        self.order.iter().position(|&w| w == v)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Rank lookup table over vertex ids `0..n`; `usize::MAX` for absent.
    pub fn rank_table(&self, n: usize) -> Vec<usize> {
        let mut table = vec![usize::MAX; n];
        for (rank, &v) in self.order.iter().enumerate() {
            if v < n {
                table[v] = rank;
            }
        }
        table
    }
}

/// A (possibly partial) vertex order: an optional prefix of vertices revealed
/// after sampling, followed by the iterative-minimum order of the sampled core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ordering {
    /// Vertices in order; earlier means smaller.
    order: Vec<usize>,
    /// Position per vertex id, `usize::MAX` when absent.
    pos: Vec<usize>,
    /// Index where the sampled core `T` starts; everything before is unseen.
    core_start: usize,
}

/// Iterative-minimum construction over an explicit vertex pool.
/// `edges` carries integer load numerators over any common scale.
fn iterative_min(
    n: usize,
    edges: &[(usize, usize, i64)],
    pool: &[usize],
    label_rank: &[usize],
) -> Result<Vec<usize>, OrderingError> {
    let mut in_pool = vec![false; n];
    for &v in pool {
        if label_rank[v] == usize::MAX {
            return Err(OrderingError::LabelingIncomplete { vertex: v });
        }
        in_pool[v] = true;
    }
    let mut adjacency: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    let mut load = vec![0i64; n];
    for &(u, v, x) in edges {
        debug_assert!(in_pool[u] && in_pool[v]);
        adjacency[u].push((v, x));
        adjacency[v].push((u, x));
        load[u] += x;
        load[v] += x;
    }
    let mut remaining: Vec<usize> = pool.to_vec();
    let mut order = Vec::with_capacity(pool.len());
    while !remaining.is_empty() {
        let mut best = 0;
        for i in 1..remaining.len() {
            let (v, b) = (remaining[i], remaining[best]);
            if (load[v], label_rank[v]) < (load[b], label_rank[b]) {
                best = i;
            }
        }
        let v = remaining.swap_remove(best);
        in_pool[v] = false;
        order.push(v);
        for &(w, x) in &adjacency[v] {
            if in_pool[w] {
                load[w] -= x;
            }
        }
    }
    Ok(order)
}

impl Ordering {
    fn from_parts(n: usize, order: Vec<usize>, core_start: usize) -> Ordering {
        let mut ordering = Ordering {
            order,
            pos: vec![usize::MAX; n],
            core_start,
        };
        ordering.rebuild_pos();
        ordering
    }

    fn rebuild_pos(&mut self) {
        self.pos.fill(usize::MAX);
        for (i, &v) in self.order.iter().enumerate() {
            self.pos[v] = i;
        }
    }

    /// Offline x-topological ordering of all vertices of `instance`, with
    /// loads restricted to `restrict` when given.
    pub fn offline(
        instance: &Instance,
        restrict: Option<&[bool]>,
        labeling: &Labeling,
    ) -> Result<Ordering, OrderingError> {
        let n = instance.vertex_count();
        let edges: Vec<(usize, usize, i64)> = instance
            .edges()
            .iter()
            .filter(|e| restrict.map_or(true, |r| r[e.id]))
            .map(|e| (e.u, e.v, instance.x_num(e.id)))
            .collect();
        let pool: Vec<usize> = (0..n).collect();
        let order = iterative_min(n, &edges, &pool, &labeling.rank_table(n))?;
        Ok(Ordering::from_parts(n, order, 0))
    }

    /// Sample-based ordering over the endpoints `T` of the sampled edges only.
    pub fn from_sample(
        instance: &Instance,
        sample: &[bool],
        labeling: &Labeling,
    ) -> Result<Ordering, OrderingError> {
        let edges: Vec<(usize, usize, i64)> = instance
            .edges()
            .iter()
            .filter(|e| sample[e.id])
            .map(|e| (e.u, e.v, instance.x_num(e.id)))
            .collect();
        Ordering::from_scaled_edges(instance.vertex_count(), &edges, labeling)
    }

    /// Sample-based ordering from explicit `(u, v, load_numerator)` edges; the
    /// entry point for the streaming schemes, which have no `Instance`.
    /// `n` bounds the vertex id space.
    pub fn from_scaled_edges(
        n: usize,
        edges: &[(usize, usize, i64)],
        labeling: &Labeling,
    ) -> Result<Ordering, OrderingError> {
        let mut seen = vec![false; n];
        let mut pool = Vec::new();
        for &(u, v, _) in edges {
            for w in [u, v] {
                if !seen[w] {
                    seen[w] = true;
                    pool.push(w);
                }
            }
        }
        let order = iterative_min(n, edges, &pool, &labeling.rank_table(n))?;
        Ok(Ordering::from_parts(n, order, 0))
    }

    /// The sample-based ordering extended by every vertex of the instance not
    /// incident to a sampled edge.
    pub fn from_sample_full(
        instance: &Instance,
        sample: &[bool],
        labeling: &Labeling,
    ) -> Result<Ordering, OrderingError> {
        let mut ordering = Ordering::from_sample(instance, sample, labeling)?;
        for v in 0..instance.vertex_count() {
            if !ordering.contains(v) {
                ordering.extend_with_unseen(labeling, v)?;
            }
        }
        Ok(ordering)
    }

    /// Inserts a vertex revealed after sampling: it precedes the entire core
    /// and sits among the other unseen vertices by labeling rank.
    pub fn extend_with_unseen(
        &mut self,
        labeling: &Labeling,
        v: usize,
    ) -> Result<(), OrderingError> {
        if self.contains(v) {
            return Err(OrderingError::DuplicateVertex { vertex: v });
        }
        let rank = labeling
            .rank(v)
            .ok_or(OrderingError::LabelingIncomplete { vertex: v })?;
        let mut slot = 0;
        while slot < self.core_start {
            let w = self.order[slot];
            let w_rank = labeling
                .rank(w)
                .ok_or(OrderingError::LabelingIncomplete { vertex: w })?;
            if w_rank > rank {
                break;
            }
            slot += 1;
        }
        self.order.insert(slot, v);
        self.core_start += 1;
        self.rebuild_pos();
        Ok(())
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.pos.len() && self.pos[v] != usize::MAX
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        if self.contains(v) {
            Some(self.pos[v])
        } else {
            None
        }
    }

    /// True iff `a ≺ b`. Total, irreflexive, transitive on present vertices.
    pub fn precedes(&self, a: usize, b: usize) -> Result<bool, OrderingError> {
        let pa = self.position(a).ok_or(OrderingError::UnknownVertex { vertex: a })?;
        let pb = self.position(b).ok_or(OrderingError::UnknownVertex { vertex: b })?;
        Ok(pa < pb)
    }

    /// Vertices in order, unseen prefix first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// The iterative-minimum core (the ordered endpoints of sampled edges).
    pub fn core(&self) -> &[usize] {
        &self.order[self.core_start..]
    }

    /// Edges incident to `v` whose other endpoint succeeds `v`, intersected
    /// with `restrict` when given.
    pub fn bucket(
        &self,
        instance: &Instance,
        v: usize,
        restrict: Option<&[bool]>,
    ) -> Result<Vec<usize>, OrderingError> {
        let pv = self.position(v).ok_or(OrderingError::UnknownVertex { vertex: v })?;
        let mut bucket = Vec::new();
        for &id in instance.incident(v) {
            if restrict.map_or(false, |r| !r[id]) {
                continue;
            }
            let other = instance.edge(id).expect("incident id").other(v);
            let po = self
                .position(other)
                .ok_or(OrderingError::UnknownVertex { vertex: other })?;
            if pv < po {
                bucket.push(id);
            }
        }
        Ok(bucket)
    }

    /// Integer numerator (over `instance.scale()`) of the bucket load of `v`.
    pub fn bucket_load_num(
        &self,
        instance: &Instance,
        v: usize,
        restrict: Option<&[bool]>,
    ) -> Result<i64, OrderingError> {
        let pv = self.position(v).ok_or(OrderingError::UnknownVertex { vertex: v })?;
        let mut load = 0;
        for &id in instance.incident(v) {
            if restrict.map_or(false, |r| !r[id]) {
                continue;
            }
            let other = instance.edge(id).expect("incident id").other(v);
            let po = self
                .position(other)
                .ok_or(OrderingError::UnknownVertex { vertex: other })?;
            if pv < po {
                load += instance.x_num(id);
            }
        }
        Ok(load)
    }
}

/// The witness vertex `w_S(v)`: the overall minimum of `≺_S` when the sampled
/// load at `v` is at most 2; otherwise the vertex whose removal during the
/// ordering construction first drops the remaining sampled load at `v` to at
/// most 2.
pub fn witness_vertex(
    instance: &Instance,
    sample: &[bool],
    labeling: &Labeling,
    v: usize,
) -> Result<usize, OrderingError> {
    let ordering = Ordering::from_sample_full(instance, sample, labeling)?;
    witness_from(instance, sample, &ordering, v)
}

/// [`witness_vertex`] against an already-built full sample ordering.
pub fn witness_from(
    instance: &Instance,
    sample: &[bool],
    ordering: &Ordering,
    v: usize,
) -> Result<usize, OrderingError> {
    if !ordering.contains(v) {
        return Err(OrderingError::UnknownVertex { vertex: v });
    }
    let scale = instance.scale();
    let mut residual: i64 = instance
        .incident(v)
        .iter()
        .filter(|&&id| sample[id])
        .map(|&id| instance.x_num(id))
        .sum();
    if residual <= 2 * scale {
        return Ok(ordering.order()[0]);
    }
    for &w in ordering.core() {
        for &id in instance.incident(v) {
            if sample[id] && instance.edge(id).expect("incident id").other(v) == w {
                residual -= instance.x_num(id);
            }
        }
        if residual <= 2 * scale {
            return Ok(w);
        }
    }
    // Unreachable for x in the forest polytope: the minimum remaining load is
    // always at most 2, so v itself is never removed while its residual
    // exceeds 2. Fall back to the last core vertex to stay total.
    Ok(*ordering.core().last().expect("nonempty core"))
}
