//! Shared fixtures for the criterion benches.

use cylindra::toposet::{full_set_algebra, FiniteTopology};
use cylindra::{complex_algebra, generated_subalgebra, FiniteBao};

/// The topological set algebra on `^2U` for the chain on `u` points.
pub fn chain_algebra(u: usize) -> FiniteBao {
    full_set_algebra(&FiniteTopology::chain(u), 2).expect("chain topology")
}

/// The subalgebra of `^2 3` generated by a fixed off-diagonal set, a small
/// representable algebra with a nontrivial minimal base.
pub fn small_subalgebra() -> FiniteBao {
    let full = complex_algebra(cylindra::toposet::square_frame(3, 2, None).expect("square frame"));
    let mut g = full.bottom();
    for p in [1, 5, 6] {
        g.insert(p);
    }
    generated_subalgebra(&full, &[g]).expect("generators lie in the algebra")
}
