//! Fixtures shared by the benchmarks.

use fracvar_core::presets;
use fracvar_core::types::{make_uniform_grid, FractionalOrder, SampledFunction};

pub fn half() -> FractionalOrder {
    FractionalOrder::new(0.5).expect("0.5 is a valid order")
}

/// `t sin(pi t)` on `[0, 1]` with `n` cells.
pub fn trajectory(n: usize) -> SampledFunction {
    presets::damped_sine().sample(&make_uniform_grid(0.0, 1.0, n).expect("n >= 1"))
}
