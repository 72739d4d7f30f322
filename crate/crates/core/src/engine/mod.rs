//! Scenario-driven simulation engine.
//!
//! A [`Scenario`] is read from a JSON document, turned into a
//! [`Simulation`] (wind synthesized, state layout fixed) and integrated with
//! fixed-step RK4. In transient mode the state holds the drivetrain, the
//! stator and rotor fluxes in the stationary frame, the line segment and any
//! inductive load currents. In RMS mode the grid is solved as phasors at
//! every stage and only the drivetrain and the rotor flux (synchronous frame)
//! are integrated.

mod integrate;
mod output;
mod scenario;
mod system;

pub use integrate::{integrate, RunResult};
pub use output::{column_stats, summarize, ColumnStats, EnergyAudit, MachineAudit, TimeSeriesOutput};
pub use scenario::{
    load_scenario, load_scenario_with_base, load_wind_spec, set_path, DrivetrainConfig, GridConfig,
    InitialConfig, IntegratorConfig, Mode, Scenario, TurbineConfig,
};
pub use system::{available_columns, default_columns, Simulation, StateLayout, SIGNALS};

use std::path::{Path, PathBuf};

use crate::Result;

/// Paths written by [`write_run`].
#[derive(Debug, Clone, PartialEq)]
pub struct WrittenRun {
    pub csv: PathBuf,
    pub summary: PathBuf,
}

/// Writes `<stem>.csv` and `<stem>_summary.txt` into `dir`.
pub fn write_run(dir: &Path, stem: &str, scenario: &Scenario, result: &RunResult) -> Result<WrittenRun> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{stem}.csv"));
    let summary = dir.join(format!("{stem}_summary.txt"));
    result.output.write_csv(&csv)?;
    std::fs::write(
        &summary,
        summarize(
            &scenario.name,
            &result.output,
            &result.audit,
            result.machine_audit.as_ref(),
        ),
    )?;
    Ok(WrittenRun { csv, summary })
}
