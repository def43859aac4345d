//! Experiments: moving polarization, the Hopf sign check, verification
//! campaigns, configuration and reports.

pub mod campaign;
pub mod cli;
pub mod config;
pub mod moving;

pub use campaign::{
    parse_summary, report, summary_csv, verify_theorem_campaign, write_atomic, SummaryRow, Verdict, SUMMARY_HEADER,
};
pub use cli::{cli_main, exit_code, EXIT_INVARIANT, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE};
pub use config::{domain_from, domain_label, parse_config, parse_configs, ExperimentConfig, Mode, Schedule};
pub use moving::{
    hopf_conflict_check, manufactured_field, moving_polarization, trace_csv, ContactCheck, HopfReport,
    HopfVerdict, MovingOutcome, MovingPolarization, PolarizationTraceEntry,
};
