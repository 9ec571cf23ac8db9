//! Exact brute-force oracles.
//!
//! Everything here enumerates all `2^m` sample realizations (each of weight
//! `2^-m`) with integer load arithmetic, so verdicts and counts are bit-exact.
//! These oracles are deliberately independent of the streaming schemes: they
//! rebuild orderings from scratch for every realization.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::fixtures::{self, U, V, VU_EDGE};
use crate::frac::Frac;
use crate::instance::{Instance, InstanceError};
use crate::ordering::{witness_from, Labeling, Ordering, OrderingError};

/// Largest edge count enumerated exhaustively.
pub const SAMPLE_ENUM_CAP: usize = 16;
/// Largest vertex count for which all labelings are enumerated.
pub const LABELING_ENUM_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The instance exceeds the exhaustive-enumeration cap.
    CapExceeded { edges: usize },
    PolytopeViolation,
    Ordering(OrderingError),
    Instance(InstanceError),
    NumericOverflow,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::CapExceeded { edges } => {
                write!(f, "{} edges exceed the enumeration cap {}", edges, SAMPLE_ENUM_CAP)
            }
            OracleError::PolytopeViolation => {
                write!(f, "marginals outside the forest polytope")
            }
            OracleError::Ordering(e) => write!(f, "{}", e),
            OracleError::Instance(e) => write!(f, "{}", e),
            OracleError::NumericOverflow => write!(f, "exact value overflows"),
        }
    }
}

impl From<OrderingError> for OracleError {
    fn from(e: OrderingError) -> OracleError {
        OracleError::Ordering(e)
    }
}

impl From<InstanceError> for OracleError {
    fn from(e: InstanceError) -> OracleError {
        OracleError::Instance(e)
    }
}

/// Iterator over all `2^m` sample realizations, each with weight `2^-m`.
#[derive(Debug, Clone)]
pub struct SampleEnumeration {
    m: usize,
    next: u64,
}

impl SampleEnumeration {
    pub fn new(instance: &Instance) -> Result<SampleEnumeration, OracleError> {
        let m = instance.edge_count();
        if m > SAMPLE_ENUM_CAP {
            return Err(OracleError::CapExceeded { edges: m });
        }
        Ok(SampleEnumeration { m, next: 0 })
    }

    /// The probability weight of every realization.
    pub fn weight(&self) -> Frac {
        Frac::new(1, 1i64 << self.m)
    }

    pub fn realization_count(&self) -> u64 {
        1u64 << self.m
    }
}

impl Iterator for SampleEnumeration {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.next >= (1u64 << self.m) {
            return None;
        }
        let mask = self.next;
        self.next += 1;
        Some(mask)
    }
}

fn fill_mask(buf: &mut [bool], mask: u64) {
    for (i, slot) in buf.iter_mut().enumerate() {
        *slot = mask & (1 << i) != 0;
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn reduce_to_frac(num: i128, den: i128) -> Result<Frac, OracleError> {
    let g = gcd_i128(num, den).max(1);
    let (num, den) = (num / g, den / g);
    if num > i64::MAX as i128 || den > i64::MAX as i128 {
        return Err(OracleError::NumericOverflow);
    }
    Ok(Frac::new(num as i64, den as i64))
}

/// Exact `E_S[x(E_v^S \ S)]` for every vertex, in one enumeration pass.
pub fn exact_offsample_expectation_all(
    instance: &Instance,
    labeling: &Labeling,
) -> Result<Vec<Frac>, OracleError> {
    let n = instance.vertex_count();
    let m = instance.edge_count();
    let samples = SampleEnumeration::new(instance)?;
    let mut sample = vec![false; m];
    let mut off_sample = vec![false; m];
    let mut sums = vec![0i128; n];
    for mask in samples.clone() {
        fill_mask(&mut sample, mask);
        for (i, &s) in sample.iter().enumerate() {
            off_sample[i] = !s;
        }
        let ordering = Ordering::from_sample_full(instance, &sample, labeling)?;
        for v in 0..n {
            sums[v] += ordering.bucket_load_num(instance, v, Some(&off_sample))? as i128;
        }
    }
    let den = instance.scale() as i128 * samples.realization_count() as i128;
    sums.into_iter().map(|num| reduce_to_frac(num, den)).collect()
}

/// Exact `E_S[x(E_v^S \ S)]`, the quantity bounded by 3 for `x` in the
/// forest polytope.
pub fn exact_offsample_expectation(
    instance: &Instance,
    labeling: &Labeling,
    v: usize,
) -> Result<Frac, OracleError> {
    Ok(exact_offsample_expectation_all(instance, labeling)?[v])
}

/// Coupling counts for one edge incident to the inspected vertex `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CouplingEdge {
    pub edge: usize,
    /// Realizations with `e ∉ S` and `v ≺_S u`.
    pub off_and_v_precedes: u64,
    /// Realizations with `e ∈ S` and `w_S(v) ⪯_S u`.
    pub on_and_witness_before: u64,
    /// Realizations with `e ∈ S` and `v ≺_S u` (the plain coupling, which
    /// fails in general).
    pub on_and_v_precedes: u64,
}

/// Verdicts of the witness coupling for one vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingReport {
    pub vertex: usize,
    pub edges: Vec<CouplingEdge>,
    /// `x({e ∈ δ(v)∩S : w_S(v) ⪯_S u}) ≤ 3` for every realization.
    pub witness_load_ok: bool,
    /// The strict lower bound `2 < x(...)` whenever `x(δ(v)∩S) > 2`.
    pub strict_lower_ok: bool,
}

impl CouplingReport {
    /// The per-edge count inequality of the witness coupling.
    pub fn coupling_holds(&self) -> bool {
        self.edges
            .iter()
            .all(|e| e.off_and_v_precedes <= e.on_and_witness_before)
    }

    /// Whether the naive coupling (witness replaced by `v`) also holds.
    pub fn plain_coupling_holds(&self) -> bool {
        self.edges
            .iter()
            .all(|e| e.off_and_v_precedes <= e.on_and_v_precedes)
    }
}

/// Witness-coupling verdicts for every vertex, in one enumeration pass.
pub fn check_coupling_all(
    instance: &Instance,
    labeling: &Labeling,
) -> Result<Vec<CouplingReport>, OracleError> {
    let n = instance.vertex_count();
    let m = instance.edge_count();
    let samples = SampleEnumeration::new(instance)?;
    let scale = instance.scale();
    let mut reports: Vec<CouplingReport> = (0..n)
        .map(|v| CouplingReport {
            vertex: v,
            edges: instance
                .incident(v)
                .iter()
                .map(|&edge| CouplingEdge {
                    edge,
                    off_and_v_precedes: 0,
                    on_and_witness_before: 0,
                    on_and_v_precedes: 0,
                })
                .collect(),
            witness_load_ok: true,
            strict_lower_ok: true,
        })
        .collect();
    let mut sample = vec![false; m];
    for mask in samples {
        fill_mask(&mut sample, mask);
        let ordering = Ordering::from_sample_full(instance, &sample, labeling)?;
        for v in 0..n {
            let witness = witness_from(instance, &sample, &ordering, v)?;
            let mut witness_bucket_load: i64 = 0;
            let mut sampled_load: i64 = 0;
            let report = &mut reports[v];
            for slot in report.edges.iter_mut() {
                let other = instance.edge(slot.edge)?.other(v);
                let in_sample = sample[slot.edge];
                let witness_before = witness == other || ordering.precedes(witness, other)?;
                if in_sample {
                    sampled_load += instance.x_num(slot.edge);
                    if witness_before {
                        witness_bucket_load += instance.x_num(slot.edge);
                        slot.on_and_witness_before += 1;
                    }
                    if ordering.precedes(v, other)? {
                        slot.on_and_v_precedes += 1;
                    }
                } else if ordering.precedes(v, other)? {
                    slot.off_and_v_precedes += 1;
                }
            }
            if witness_bucket_load > 3 * scale {
                report.witness_load_ok = false;
            }
            if sampled_load > 2 * scale && witness_bucket_load <= 2 * scale {
                report.strict_lower_ok = false;
            }
        }
    }
    Ok(reports)
}

/// Witness-coupling verdicts for one vertex.
pub fn check_coupling(
    instance: &Instance,
    labeling: &Labeling,
    v: usize,
) -> Result<CouplingReport, OracleError> {
    Ok(check_coupling_all(instance, labeling)?.swap_remove(v))
}

/// Prefix stability: for every `S`, every `e = {v,u} ∉ S`, and every `t`
/// preceding both endpoints under `≺_S`, `t` still precedes both under
/// `≺_{S ∪ {e}}`.
pub fn check_prefix_stability(
    instance: &Instance,
    labeling: &Labeling,
) -> Result<bool, OracleError> {
    let n = instance.vertex_count();
    let m = instance.edge_count();
    let samples = SampleEnumeration::new(instance)?;
    let count = samples.realization_count() as usize;
    // Position table per realization; vertex ids fit u8 at enumeration scale.
    let mut positions: Vec<Vec<usize>> = Vec::with_capacity(count);
    let mut sample = vec![false; m];
    for mask in samples {
        fill_mask(&mut sample, mask);
        let ordering = Ordering::from_sample_full(instance, &sample, labeling)?;
        let mut pos = vec![0usize; n];
        for v in 0..n {
            pos[v] = ordering.position(v).expect("full ordering");
        }
        positions.push(pos);
    }
    for mask in 0..count {
        let pos_s = &positions[mask];
        for e in instance.edges() {
            if mask & (1 << e.id) != 0 {
                continue;
            }
            let pos_se = &positions[mask | (1 << e.id)];
            for t in 0..n {
                if pos_s[t] < pos_s[e.u] && pos_s[t] < pos_s[e.v] {
                    if !(pos_se[t] < pos_se[e.u] && pos_se[t] < pos_se[e.v]) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Bucket-load bounds: the full offline ordering satisfies `x(E_v^≺) ≤ 2`
/// for every `v`, and every realization `S` satisfies the sampled-restricted
/// bound `x({e ∈ δ(v)∩S : v ≺_S u}) ≤ 2`.
pub fn verify_load_bounds(
    instance: &Instance,
    labeling: &Labeling,
) -> Result<bool, OracleError> {
    if !instance.in_forest_polytope()? {
        return Err(OracleError::PolytopeViolation);
    }
    let n = instance.vertex_count();
    let m = instance.edge_count();
    let scale = instance.scale();
    let offline = Ordering::offline(instance, None, labeling)?;
    for v in 0..n {
        if offline.bucket_load_num(instance, v, None)? > 2 * scale {
            return Ok(false);
        }
    }
    let samples = SampleEnumeration::new(instance)?;
    let mut sample = vec![false; m];
    for mask in samples {
        fill_mask(&mut sample, mask);
        let ordering = Ordering::from_sample_full(instance, &sample, labeling)?;
        for v in 0..n {
            if ordering.bucket_load_num(instance, v, Some(&sample))? > 2 * scale {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Calls `f` with every labeling of `0..n` (all `n!` permutations).
pub fn for_each_labeling<F>(n: usize, mut f: F)
where
    F: FnMut(&Labeling),
{
    let mut items: Vec<usize> = (0..n).collect();
    fn recurse<F: FnMut(&Labeling)>(items: &mut Vec<usize>, k: usize, f: &mut F) {
        if k == items.len() {
            f(&Labeling::from_order(items).expect("permutation"));
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            recurse(items, k + 1, f);
            items.swap(k, i);
        }
    }
    recurse(&mut items, 0, &mut f);
}

/// The ordering flip of the basic path counterexample: dropping the `{v,u}`
/// edge from the full sample flips the relative order of `v` and `u`, under
/// every labeling.
pub fn verify_appendix_fig5() -> bool {
    let fig5 = fixtures::fig5();
    let without_vu = fig5
        .edge_mask((0..fig5.edge_count()).filter(|&id| id != VU_EDGE))
        .expect("fixed ids");
    let all = vec![true; fig5.edge_count()];
    let mut ok = true;
    for_each_labeling(fig5.vertex_count(), |labeling| {
        let s1 = Ordering::from_sample_full(&fig5, &without_vu, labeling).expect("fixture");
        let s2 = Ordering::from_sample_full(&fig5, &all, labeling).expect("fixture");
        if !s1.precedes(V, U).expect("present") || !s2.precedes(U, V).expect("present") {
            ok = false;
        }
    });
    ok
}

/// Classification of the 32 sample realizations of the parallel-edge
/// counterexample, by the relative order of `v` and `u` across all labelings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fig6Report {
    /// Realizations with `{v,u} ∉ S`: (always `v ≺ u`, labeling-dependent,
    /// always `u ≺ v`).
    pub off_counts: (u32, u32, u32),
    /// Realizations with `{v,u} ∈ S`: same classification.
    pub on_counts: (u32, u32, u32),
    /// `count(e∉S ∧ v≺u) > count(e∈S ∧ v≺u)` for every single labeling.
    pub strict_for_every_labeling: bool,
}

/// Reference classification counts for the parallel-edge counterexample:
/// 13/2/1 off-sample and 0/11/5 on-sample. The enumeration below reproduces
/// the qualitative claim (the strict count inequality holds under every
/// labeling) but settles on 12/2/2 and 0/12/4; the reference counts are kept
/// so verification reports can state the discrepancy explicitly.
pub const FIG6_REFERENCE_OFF: (u32, u32, u32) = (13, 2, 1);
/// See [`FIG6_REFERENCE_OFF`].
pub const FIG6_REFERENCE_ON: (u32, u32, u32) = (0, 11, 5);

impl Fig6Report {
    /// Whether the enumerated counts equal the reference counts
    /// ([`FIG6_REFERENCE_OFF`], [`FIG6_REFERENCE_ON`]) and the strict count
    /// inequality holds under every labeling.
    pub fn matches_reference(&self) -> bool {
        self.off_counts == FIG6_REFERENCE_OFF
            && self.on_counts == FIG6_REFERENCE_ON
            && self.strict_for_every_labeling
    }
}

/// Enumerates all realizations and labelings of the parallel-edge
/// counterexample instance.
pub fn verify_appendix_fig6() -> Fig6Report {
    let fig6 = fixtures::fig6();
    let m = fig6.edge_count();
    let n = fig6.vertex_count();
    let mut off_counts = (0u32, 0u32, 0u32);
    let mut on_counts = (0u32, 0u32, 0u32);
    // Per labeling: count(e∉S ∧ v≺u) and count(e∈S ∧ v≺u).
    let mut per_labeling: Vec<(u32, u32)> = Vec::new();
    let mut sample = vec![false; m];
    for mask in 0u64..(1 << m) {
        fill_mask(&mut sample, mask);
        let in_sample = mask & (1 << VU_EDGE) != 0;
        let mut v_first = 0u32;
        let mut u_first = 0u32;
        let mut labeling_index = 0;
        for_each_labeling(n, |labeling| {
            let ordering = Ordering::from_sample_full(&fig6, &sample, labeling).expect("fixture");
            let v_precedes = ordering.precedes(V, U).expect("present");
            if v_precedes {
                v_first += 1;
            } else {
                u_first += 1;
            }
            if per_labeling.len() <= labeling_index {
                per_labeling.push((0, 0));
            }
            if v_precedes {
                if in_sample {
                    per_labeling[labeling_index].1 += 1;
                } else {
                    per_labeling[labeling_index].0 += 1;
                }
            }
            labeling_index += 1;
        });
        let slot = if u_first == 0 {
            0
        } else if v_first == 0 {
            2
        } else {
            1
        };
        let counts = if in_sample { &mut on_counts } else { &mut off_counts };
        match slot {
            0 => counts.0 += 1,
            1 => counts.1 += 1,
            _ => counts.2 += 1,
        }
    }
    Fig6Report {
        off_counts,
        on_counts,
        strict_for_every_labeling: per_labeling.iter().all(|&(off, on)| off > on),
    }
}
