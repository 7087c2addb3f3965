//! Parameter sweeps over pilot designs and jamming strategies, with CSV
//! output and a TOML metadata sidecar that can regenerate every row.

mod figures;
mod io;
mod spec;
mod sweep;

pub use figures::{figure_spec, FIGURE_POWER_DB};
pub use io::{
    format_float, load_metadata, load_spec, read_results, write_experiment, write_metadata,
    write_results, write_results_to, Metadata, CSV_HEADER,
};
pub use spec::{ExperimentSpec, LemmaConfig, Scenario, SweepAxis};
pub use sweep::{run_sweep, ResultRow};
