//! Independent oracles, seeded instance families and the hardness gadget.

mod generators;
mod grid;
mod hardness;

pub use generators::{
    double_root_instance, parabola, random_circuit_instance, random_simplex_instance, random_tetranomial,
    random_trinomial,
};
pub use grid::{
    grid_supremum, grid_supremum_report, sign_sweep_count, widening_oracle, GridReport, LogEvaluator,
    WideningReport, WIDENING_RANGES,
};
pub use hardness::{
    gadget_m, make_hardness_instance, quartic_term_bound, t_m, HardnessInstance, HardnessMode, SparsePoly,
    MAX_UNCAPPED_M,
};
