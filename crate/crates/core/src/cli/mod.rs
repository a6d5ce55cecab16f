//! Configuration, sweeps and figure presets behind the `hybrid-noma` binary.

pub mod config;
pub mod figures;
pub mod selftest;
pub mod sweep;

pub use config::{Settings, Source};
pub use figures::{reproduce_figure, FigureId};
pub use sweep::{read_csv, run_sweep, write_csv, Link, Mode, RunRecord, Scale, SweepParam, SweepSpec};
