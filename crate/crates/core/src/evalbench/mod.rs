//! Quantitative experiments on simulated flights.
//!
//! Each experiment is a serde-configurable struct with a `run` method that
//! returns a report. Reports print as plain-text tables, export CSV and
//! expose their headline numbers as a flat metric map that [`check_gates`]
//! can compare against bounds.
//!
//! * [`RockfieldExperiment`]: detection, false-positive and recall rates
//!   against rock size.
//! * [`CellSizeSweep`]: detection of graded rocks against map resolution.
//! * [`AltitudeSweep`]: recall against altitude, with and without noise.
//! * [`CliffExperiment`]: per-class map error while flying over a cliff.
//! * [`benchmark`]: per-frame runtime and map memory.

mod bench;
mod cliff;
mod gates;
mod metrics;
mod report;
mod rockfield;
mod rockgrid;
mod runner;
mod scenes;

pub use bench::{benchmark, BenchConfig, BenchReport};
pub use cliff::{CliffExperiment, CliffReport};
pub use gates::{check_gates, Gate, GateFile, GateOutcome};
pub use metrics::{
    landing_metrics, map_rmse, rmse_by_class, rock_outcomes, true_hazard, ClassRmse, EvalCriteria, LandingMetrics,
    RockOutcome,
};
pub use report::{frames_csv, runs_csv, EvalReport, FrameRecord, RunRecord, Summary};
pub use rockfield::{run_rockfield_experiment, RockfieldExperiment, RockfieldReport, RockfieldRow};
pub use rockgrid::{
    run_altitude_sweep, AltitudeReport, AltitudeRow, AltitudeSweep, BinOutcome, CellSizeReport, CellSizeRow, CellSizeSweep, RockGridScene,
};
pub use scenes::{extent_for_pass, plane_following_pass, rock_grid_terrain, DiameterBin, RockGridLayout};
