//! Approximating functions ψ and dimension functions h.

mod approx;
mod dimension;
mod growth;
pub mod parse;

pub use approx::{
    floor_modify, partial_product_sums, reduce_min_max, slowdown_by_partial_sums, ApproxFamily, ApproxFn,
};
pub use dimension::{
    check_regular, check_t04_admissible, default_probe_grid, geometric_grid, AdmissibilityReport, CheckMethod,
    DimensionFamily, DimensionFn, RegularityReport, RegularityWitness, GRID_GROWTH_EVIDENCE,
};
pub use growth::Growth;
pub use parse::{parse_approx, parse_dimension};
