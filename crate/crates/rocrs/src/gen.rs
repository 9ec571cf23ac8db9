//! Deterministic instance generators.
//!
//! Every random family is a pure function of its parameters and seed.
//! Families with a non-tree skeleton obtain their marginals as convex
//! combinations of random forests, so forest-polytope membership holds by
//! construction; tree skeletons accept any marginals in `[0, 1]`.

use std::fmt;

use rocrs_core::instance::marginals_from_forests;
use rocrs_core::rng::SplitMix64;
use rocrs_core::{fixtures, Frac, ForestChecker, Instance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenError {
    Infeasible(String),
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::Infeasible(msg) => write!(f, "infeasible generator parameters: {}", msg),
        }
    }
}

impl std::error::Error for GenError {}

pub fn fig5() -> Instance {
    fixtures::fig5()
}

pub fn fig6() -> Instance {
    fixtures::fig6()
}

/// A path of `m` edges with random tenths marginals.
pub fn path(m: usize, seed: u64) -> Result<Instance, GenError> {
    if m == 0 {
        return Err(GenError::Infeasible("path needs at least one edge".into()));
    }
    let mut rng = SplitMix64::new(seed ^ 0x7061_7468);
    let edges: Vec<(usize, usize, Frac)> = (0..m)
        .map(|i| (i, i + 1, Frac::new(1 + rng.uniform_below(10) as i64, 10)))
        .collect();
    Ok(Instance::new(m + 1, &edges).expect("tree skeleton"))
}

/// A handle path ending at a center that carries `leaves` leaf edges.
pub fn broom(handle: usize, leaves: usize) -> Result<Instance, GenError> {
    if leaves == 0 {
        return Err(GenError::Infeasible("broom needs at least one leaf".into()));
    }
    Ok(fixtures::broom(
        handle,
        leaves,
        Frac::new(1, 2),
        Frac::new(3, 5),
    ))
}

/// Random maximal-forest convex combination over a fixed skeleton.
fn forest_convex(
    n: usize,
    skeleton: &[(usize, usize)],
    num_forests: usize,
    rng: &mut SplitMix64,
) -> Instance {
    let mut forests = Vec::with_capacity(num_forests);
    let mut ids: Vec<usize> = (0..skeleton.len()).collect();
    for _ in 0..num_forests {
        rng.shuffle(&mut ids);
        let mut checker = ForestChecker::new(n);
        let forest: Vec<usize> = ids
            .iter()
            .copied()
            .filter(|&id| checker.add_edge(skeleton[id].0, skeleton[id].1))
            .collect();
        forests.push(forest);
    }
    let raw: Vec<i64> = (0..num_forests)
        .map(|_| 1 + rng.uniform_below(9) as i64)
        .collect();
    let total: i64 = raw.iter().sum();
    let weights: Vec<Frac> = raw.iter().map(|&w| Frac::new(w, total)).collect();
    marginals_from_forests(n, skeleton, &forests, &weights).expect("forests by construction")
}

/// A cycle on `n` vertices plus `chords` random extra edges, marginals by
/// forest-convex combination.
pub fn cycle_chords(n: usize, chords: usize, seed: u64) -> Result<Instance, GenError> {
    if n < 3 {
        return Err(GenError::Infeasible("cycle needs at least 3 vertices".into()));
    }
    let mut rng = SplitMix64::new(seed ^ 0x6379_636c);
    let mut skeleton: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    for _ in 0..chords {
        let u = rng.uniform_below(n as u64) as usize;
        let mut v = rng.uniform_below(n as u64) as usize;
        while v == u {
            v = rng.uniform_below(n as u64) as usize;
        }
        skeleton.push((u.min(v), u.max(v)));
    }
    Ok(forest_convex(n, &skeleton, 4, &mut rng))
}

/// A random multigraph on `n` vertices with `m` edges and forest-convex
/// marginals.
pub fn random_multigraph(n: usize, m: usize, seed: u64) -> Result<Instance, GenError> {
    if n < 2 {
        return Err(GenError::Infeasible("need at least 2 vertices".into()));
    }
    let mut rng = SplitMix64::new(seed ^ 0x726e_6467);
    let mut skeleton = Vec::with_capacity(m);
    for _ in 0..m {
        let u = rng.uniform_below(n as u64) as usize;
        let mut v = rng.uniform_below(n as u64) as usize;
        while v == u {
            v = rng.uniform_below(n as u64) as usize;
        }
        skeleton.push((u, v));
    }
    Ok(forest_convex(n, &skeleton, 4, &mut rng))
}

/// The union of `k` random spanning trees on `n` vertices with uniform
/// marginals `x = 1/k`. Returns the instance and the per-tree edge-id sets.
pub fn forest_union(
    k: usize,
    n: usize,
    seed: u64,
) -> Result<(Instance, Vec<Vec<usize>>), GenError> {
    if k == 0 || n < 2 {
        return Err(GenError::Infeasible(
            "forest union needs k ≥ 1 and n ≥ 2".into(),
        ));
    }
    let mut rng = SplitMix64::new(seed ^ 0x756e_696f);
    let mut edges: Vec<(usize, usize, Frac)> = Vec::with_capacity(k * (n - 1));
    let mut forests = Vec::with_capacity(k);
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let x = Frac::new(1, k as i64);
    for _ in 0..k {
        rng.shuffle(&mut pairs);
        let mut checker = ForestChecker::new(n);
        let mut ids = Vec::with_capacity(n - 1);
        for &(u, v) in &pairs {
            if checker.add_edge(u, v) {
                ids.push(edges.len());
                edges.push((u, v, x));
            }
        }
        forests.push(ids);
    }
    let inst = Instance::new(n, &edges).expect("valid by construction");
    Ok((inst, forests))
}

/// The fixture battery used by the exhaustive verification suites: the two
/// counterexample instances, short paths, brooms, and 50 random forest-convex
/// instances, all small enough for full sample and labeling enumeration.
pub fn battery() -> Vec<(String, Instance)> {
    let mut out = vec![
        ("fig5".to_string(), fig5()),
        ("fig6".to_string(), fig6()),
    ];
    for m in 2..=6 {
        out.push((format!("path-{}", m), path(m, m as u64).unwrap()));
    }
    out.push(("broom-1-4".to_string(), broom(1, 4).unwrap()));
    out.push(("broom-0-5".to_string(), broom(0, 5).unwrap()));
    for seed in 0..50u64 {
        let n = 4 + (seed % 3) as usize; // 4..=6 vertices
        let m = 5 + (seed % 5) as usize; // 5..=9 edges
        out.push((
            format!("random-{}", seed),
            random_multigraph(n, m, seed).unwrap(),
        ));
    }
    out
}
