//! Fixtures shared by the cover benchmarks.

use fairmdp_core::backend::FeasibilityBackend;
use fairmdp_core::{example1_values, example2_values, random_instance, LpBackend};

pub fn example1(n: u32) -> FeasibilityBackend {
    FeasibilityBackend::Explicit(example1_values(n).expect("valid chain length"))
}

pub fn example2(n: u32) -> FeasibilityBackend {
    FeasibilityBackend::Explicit(example2_values(n).expect("valid chain length"))
}

/// LP backend over a seeded random instance.
pub fn random_lp(
    seed: u64,
    states: usize,
    actions: usize,
    objectives: usize,
    deterministic: bool,
) -> FeasibilityBackend {
    let m = random_instance(seed, states, actions, objectives).expect("positive dimensions");
    FeasibilityBackend::Lp(LpBackend::new(m, deterministic))
}
