//! Multigraph instances with exact marginals.
//!
//! Parallel edges are distinct ground-set elements identified solely by their
//! edge id. Marginals are stored as integer numerators over one instance-wide
//! scale (the lcm of the input denominators), so load sums and tie detection
//! are exact integer arithmetic.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::frac::{lcm, Frac};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceError {
    /// An edge has identical endpoints.
    LoopEdge { edge_index: usize },
    /// An endpoint is not in `[0, vertex_count)`.
    EndpointOutOfRange { edge_index: usize },
    /// A marginal lies outside `[0, 1]`.
    MarginalOutOfRange { edge_index: usize },
    /// An edge id does not exist in this instance.
    InvalidEdgeId { id: usize },
    /// The instance is too large for the exact subset-enumeration check.
    ExactCheckUnavailable { vertex_count: usize },
    /// An input edge set is not a forest.
    NonForestInput { forest_index: usize },
    /// Weights are not a convex combination (nonnegative, summing to one).
    NotConvexWeights,
    /// Denominators do not fit a common integer scale.
    NumericOverflow,
    /// An `f64` input is not close to any small rational.
    UnrepresentableMarginal { edge_index: usize },
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::LoopEdge { edge_index } => {
                write!(f, "edge {} is a loop", edge_index)
            }
            InstanceError::EndpointOutOfRange { edge_index } => {
                write!(f, "edge {} has an endpoint out of range", edge_index)
            }
            InstanceError::MarginalOutOfRange { edge_index } => {
                write!(f, "edge {} has a marginal outside [0, 1]", edge_index)
            }
            InstanceError::InvalidEdgeId { id } => write!(f, "invalid edge id {}", id),
            InstanceError::ExactCheckUnavailable { vertex_count } => {
                write!(f, "exact check unavailable for {} vertices", vertex_count)
            }
            InstanceError::NonForestInput { forest_index } => {
                write!(f, "input set {} is not a forest", forest_index)
            }
            InstanceError::NotConvexWeights => {
                write!(f, "weights are not a convex combination")
            }
            InstanceError::NumericOverflow => write!(f, "marginal denominators overflow"),
            InstanceError::UnrepresentableMarginal { edge_index } => {
                write!(f, "edge {} marginal is not a representable rational", edge_index)
            }
        }
    }
}

/// One edge of the multigraph; `id` is the index into the edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRecord {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    x_num: i64,
}

impl EdgeRecord {
    /// The endpoint opposite to `w`. Panics if `w` is not an endpoint.
    pub fn other(&self, w: usize) -> usize {
        if w == self.u {
            self.v
        } else {
            debug_assert_eq!(w, self.v);
            self.u
        }
    }
}

/// Immutable multigraph with per-edge marginals `x ∈ [0,1]^E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    vertex_count: usize,
    edges: Vec<EdgeRecord>,
    /// Common denominator: `x_e = x_num(e) / scale`.
    scale: i64,
    /// Edge ids incident to each vertex.
    adjacency: Vec<Vec<usize>>,
}

/// Largest vertex count for which subset enumeration is attempted.
pub const EXACT_POLYTOPE_CAP: usize = 20;

const MAX_SCALE: i64 = 1_000_000_000_000;

impl Instance {
    /// Builds an instance from `(u, v, x)` triples; edge ids follow list order.
    pub fn new(
        vertex_count: usize,
        edge_list: &[(usize, usize, Frac)],
    ) -> Result<Instance, InstanceError> {
        let mut scale: i64 = 1;
        for (i, &(u, v, x)) in edge_list.iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(InstanceError::EndpointOutOfRange { edge_index: i });
            }
            if u == v {
                return Err(InstanceError::LoopEdge { edge_index: i });
            }
            if x < Frac::ZERO || x > Frac::ONE {
                return Err(InstanceError::MarginalOutOfRange { edge_index: i });
            }
            scale = lcm(scale, x.den())
                .filter(|&s| s <= MAX_SCALE)
                .ok_or(InstanceError::NumericOverflow)?;
        }
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (id, &(u, v, x)) in edge_list.iter().enumerate() {
            edges.push(EdgeRecord {
                id,
                u,
                v,
                x_num: x.num() * (scale / x.den()),
            });
            adjacency[u].push(id);
            adjacency[v].push(id);
        }
        Ok(Instance {
            vertex_count,
            edges,
            scale,
            adjacency,
        })
    }

    /// Convenience builder taking `f64` marginals; each must be within `1e-9`
    /// of a rational with denominator at most `10^9`.
    pub fn from_f64(
        vertex_count: usize,
        edge_list: &[(usize, usize, f64)],
    ) -> Result<Instance, InstanceError> {
        let mut exact = Vec::with_capacity(edge_list.len());
        for (i, &(u, v, x)) in edge_list.iter().enumerate() {
            let x = Frac::approx_f64(x)
                .ok_or(InstanceError::UnrepresentableMarginal { edge_index: i })?;
            exact.push((u, v, x));
        }
        Instance::new(vertex_count, &exact)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Result<&EdgeRecord, InstanceError> {
        self.edges.get(id).ok_or(InstanceError::InvalidEdgeId { id })
    }

    /// Edge ids incident to `v`.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// The common denominator of all marginals.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Integer numerator of `x_e` over `scale()`.
    pub fn x_num(&self, id: usize) -> i64 {
        self.edges[id].x_num
    }

    pub fn x(&self, id: usize) -> Frac {
        Frac::new(self.edges[id].x_num, self.scale)
    }

    /// True iff the edge subset is acyclic (independent in the graphic matroid).
    pub fn is_forest<I>(&self, edge_ids: I) -> Result<bool, InstanceError>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut checker = ForestChecker::new(self.vertex_count);
        for id in edge_ids {
            let e = self.edge(id)?;
            if !checker.add_edge(e.u, e.v) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact forest-polytope membership by vertex-subset enumeration:
    /// `x(E[W]) ≤ |W| − 1` for every `W` with `|W| ≥ 2`.
    pub fn in_forest_polytope(&self) -> Result<bool, InstanceError> {
        let n = self.vertex_count;
        if n > EXACT_POLYTOPE_CAP {
            return Err(InstanceError::ExactCheckUnavailable { vertex_count: n });
        }
        for mask in 0u32..(1u32 << n) {
            let size = mask.count_ones() as i64;
            if size < 2 {
                continue;
            }
            let mut load: i64 = 0;
            for e in &self.edges {
                if mask & (1 << e.u) != 0 && mask & (1 << e.v) != 0 {
                    load += e.x_num;
                }
            }
            if load > (size - 1) * self.scale {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Integer numerator (over `scale()`) of the load of edges from `v` into
    /// the vertex set `w`, optionally restricted to an edge-id mask.
    pub fn incident_load_num(&self, v: usize, w: &[bool], restrict: Option<&[bool]>) -> i64 {
        let mut load = 0;
        for &id in &self.adjacency[v] {
            if let Some(r) = restrict {
                if !r[id] {
                    continue;
                }
            }
            let e = &self.edges[id];
            if w[e.other(v)] {
                load += e.x_num;
            }
        }
        load
    }

    /// Sum of `x_e` over edges with one endpoint `v`, the other in `w`, and
    /// (if given) id in `restrict`.
    pub fn incident_load(&self, v: usize, w: &[bool], restrict: Option<&[bool]>) -> Frac {
        Frac::new(self.incident_load_num(v, w, restrict), self.scale)
    }

    /// Converts an edge-id list into a mask over `0..edge_count()`.
    pub fn edge_mask<I>(&self, edge_ids: I) -> Result<Vec<bool>, InstanceError>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut mask = vec![false; self.edges.len()];
        for id in edge_ids {
            self.edge(id)?;
            mask[id] = true;
        }
        Ok(mask)
    }
}

/// Builds marginals as a convex combination of forest characteristic vectors:
/// `x_e` is the total weight of the forests containing `e`. The result lies in
/// the forest polytope by construction.
pub fn marginals_from_forests(
    vertex_count: usize,
    skeleton: &[(usize, usize)],
    forests: &[Vec<usize>],
    weights: &[Frac],
) -> Result<Instance, InstanceError> {
    if weights.len() != forests.len() {
        return Err(InstanceError::NotConvexWeights);
    }
    let mut total = Frac::ZERO;
    for &w in weights {
        if w < Frac::ZERO {
            return Err(InstanceError::NotConvexWeights);
        }
        total = total.checked_add(w).ok_or(InstanceError::NumericOverflow)?;
    }
    if total != Frac::ONE {
        return Err(InstanceError::NotConvexWeights);
    }
    let mut x = vec![Frac::ZERO; skeleton.len()];
    for (fi, forest) in forests.iter().enumerate() {
        let mut checker = ForestChecker::new(vertex_count);
        for &id in forest {
            let &(u, v) = skeleton
                .get(id)
                .ok_or(InstanceError::InvalidEdgeId { id })?;
            if !checker.add_edge(u, v) {
                return Err(InstanceError::NonForestInput { forest_index: fi });
            }
            x[id] = x[id]
                .checked_add(weights[fi])
                .ok_or(InstanceError::NumericOverflow)?;
        }
    }
    let edge_list: Vec<(usize, usize, Frac)> = skeleton
        .iter()
        .zip(x)
        .map(|(&(u, v), x)| (u, v, x))
        .collect();
    Instance::new(vertex_count, &edge_list)
}

/// Union-find acyclicity checker; one mutable scratch object per worker.
#[derive(Debug, Clone)]
pub struct ForestChecker {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl ForestChecker {
    pub fn new(vertex_count: usize) -> ForestChecker {
        ForestChecker {
            parent: (0..vertex_count).collect(),
            rank: vec![0; vertex_count],
        }
    }

    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i;
        }
        self.rank.fill(0);
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Adds an edge; returns false iff it closes a cycle (two parallel edges
    /// form a 2-cycle).
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        let (ru, rv) = (self.find(u), self.find(v));
        if ru == rv {
            return false;
        }
        match self.rank[ru].cmp(&self.rank[rv]) {
            core::cmp::Ordering::Less => self.parent[ru] = rv,
            core::cmp::Ordering::Greater => self.parent[rv] = ru,
            core::cmp::Ordering::Equal => {
                self.parent[rv] = ru;
                self.rank[ru] += 1;
            }
        }
        true
    }
}
