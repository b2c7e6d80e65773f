//! Benchmark fixtures shared by the criterion targets.

use nccause_core::{AlgebraElement, Dynamics, DynamicsParams, Monomial};

/// Dense element on doubled sites `-8..=8` with every pair of distinct generators present.
pub fn pair_element() -> AlgebraElement {
    let mut acc = AlgebraElement::zero();
    for i in -8..=8 {
        for j in (i + 1)..=8 {
            let m = Monomial::from_doubled(&[i, j]).expect("in range");
            acc += &AlgebraElement::monomial(m);
        }
    }
    acc
}

/// Generic dynamics with both bond angles nonzero.
pub fn generic_dynamics() -> Dynamics {
    Dynamics::new(DynamicsParams::new(0.3, 0.7, 1, -1).expect("valid tuple"))
}
