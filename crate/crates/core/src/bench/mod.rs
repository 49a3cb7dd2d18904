//! Parameter-sweep harness: grid resolution, sweeps over alternating and
//! adiabatic runs, record persistence and reports.

pub mod config;
pub mod grid;
pub mod io;
pub mod report;
pub mod sweep;

pub use config::{ModelSpec, SweepSpec, TimePolicy};
pub use grid::{resolve_grid, GridPoint};
pub use io::{read_records, write_records};
pub use report::{population_report, shannon_entropy, table_report, top_k};
pub use sweep::{
    adiabatic_record, alternating_record, build_family, build_schedule, run_sweep, slice_populations, Method,
    PointFailure, RunRecord, SweepOutcome,
};

/// The p = 3, N = 100 sweep over the full `(j, k, L)` grid.
pub const TABLE1_CONFIG: &str = r#"[model]
kind = "pspin"
n = 100
p = 3

[grid]
j = [0, 1, 2, 3, 4, 5]
k = [0, 1, 2, 3, 4, 5]
L = [2, 4, 6, 8]

[adiabatic]
policy = "mirror"
"#;
