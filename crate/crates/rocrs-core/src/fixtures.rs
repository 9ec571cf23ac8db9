//! Fixed counterexample and test instances.
//!
//! Vertex convention for the two path-based counterexamples:
//! `a, b, v, u, c` map to vertex ids `0..5`.

use alloc::vec::Vec;

use crate::frac::Frac;
use crate::instance::Instance;

/// The path `a–b–v–u–c` with marginals `1.0, 0.1, 0.5, 0.4`.
pub fn fig5() -> Instance {
    Instance::new(
        5,
        &[
            (0, 1, Frac::ONE),
            (1, 2, Frac::new(1, 10)),
            (2, 3, Frac::new(1, 2)),
            (3, 4, Frac::new(2, 5)),
        ],
    )
    .expect("fixed instance")
}

/// Edge id of `{v, u}` in [`fig5`] and [`fig6`].
pub const VU_EDGE: usize = 2;
/// Vertex id of `v` in [`fig5`] and [`fig6`].
pub const V: usize = 2;
/// Vertex id of `u` in [`fig5`] and [`fig6`].
pub const U: usize = 3;

/// The multigraph variant of [`fig5`] where the `u–c` edge is split into two
/// parallel edges of marginal `0.2` each.
pub fn fig6() -> Instance {
    Instance::new(
        5,
        &[
            (0, 1, Frac::ONE),
            (1, 2, Frac::new(1, 10)),
            (2, 3, Frac::new(1, 2)),
            (3, 4, Frac::new(1, 5)),
            (3, 4, Frac::new(1, 5)),
        ],
    )
    .expect("fixed instance")
}

/// A path handle of `handle` edges ending at a center vertex that carries
/// `leaves` leaf edges of marginal `leaf_x` each. The skeleton is a tree, so
/// any `x ∈ [0,1]^E` is in the forest polytope.
pub fn broom(handle: usize, leaves: usize, handle_x: Frac, leaf_x: Frac) -> Instance {
    let center = handle;
    let n = handle + 1 + leaves;
    let mut edges: Vec<(usize, usize, Frac)> = (0..handle)
        .map(|i| (i, i + 1, handle_x))
        .collect();
    for leaf in 0..leaves {
        edges.push((center, handle + 1 + leaf, leaf_x));
    }
    Instance::new(n, &edges).expect("fixed instance")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_polytope_valid() {
        assert!(fig5().in_forest_polytope().unwrap());
        assert!(fig6().in_forest_polytope().unwrap());
        let b = broom(1, 5, Frac::new(1, 2), Frac::new(3, 5));
        assert!(b.in_forest_polytope().unwrap());
        assert_eq!(b.edge_count(), 6);
        assert_eq!(b.vertex_count(), 7);
    }

    #[test]
    fn vu_edge_points_at_v_and_u() {
        for inst in [fig5(), fig6()] {
            let e = inst.edge(VU_EDGE).unwrap();
            assert_eq!((e.u, e.v), (V, U));
        }
    }
}
