//! Rotated-state quenches: trajectories and steady-state summaries.

use rayon::prelude::*;

use pxp_core::dynamics::{steady_average, time_grid, Method, QuenchSetup, TimeSeries};
use pxp_core::states::RotationAngle;

use crate::config::RunConfig;
use crate::error::RunResult;
use crate::manifest::{ManifestWriter, Status};
use crate::tables::{write_rows, SummaryRow, TrajectoryRow};

pub fn trajectory_name(length: usize, theta_index: usize) -> String {
    format!("quench_L{length}_theta{theta_index:02}.csv")
}

pub fn summary_name(length: usize) -> String {
    format!("quench_summary_L{length}.csv")
}

pub fn trajectory_rows(series: &TimeSeries) -> Vec<TrajectoryRow> {
    series
        .samples
        .iter()
        .map(|s| TrajectoryRow {
            length: series.length,
            theta: series.theta,
            t: s.t,
            energy: s.energy,
            ergotropy: s.ergotropy,
            bound: s.bound,
            entropy: s.entropy,
        })
        .collect()
}

pub fn summary_row(series: &TimeSeries, window: [f64; 2]) -> RunResult<SummaryRow> {
    let steady = steady_average(series, (window[0], window[1]))?;
    Ok(SummaryRow {
        length: series.length,
        theta: series.theta,
        ergotropy: steady.ergotropy,
        bound: steady.bound,
        entropy: steady.entropy,
        max_energy_drift: series.max_energy_drift(),
    })
}

/// One trajectory per angle, computed in parallel; each cell fails on its own.
pub fn run_cells(setup: &QuenchSetup, thetas: &[f64], times: &[f64], method: Method) -> Vec<RunResult<TimeSeries>> {
    thetas
        .par_iter()
        .map(|&theta| Ok(setup.run(RotationAngle::new(theta)?, times, method)?))
        .collect()
}

pub fn run_quench(cfg: &RunConfig) -> RunResult<Vec<SummaryRow>> {
    let mut manifest = ManifestWriter::begin(cfg)?;
    let result = (|| {
        let times = time_grid(cfg.t_max, cfg.dt)?;
        let mut all = Vec::new();
        for &l in &cfg.lengths {
            let setup = QuenchSetup::new(l)?;
            let method = Method::from(cfg.propagator).resolve(setup.sector.dim());
            manifest.note(format!(
                "L={l}: sector dim {}, propagator {}",
                setup.sector.dim(),
                method.name()
            ))?;
            let mut summary = Vec::new();
            for (k, cell) in run_cells(&setup, &cfg.theta_grid, &times, method).into_iter().enumerate() {
                let theta = cfg.theta_grid[k];
                let series = match cell {
                    Ok(s) => s,
                    Err(e) => {
                        manifest.record_failure(format!("L={l} theta={theta}: {e}"))?;
                        continue;
                    }
                };
                let path = cfg.out.join(trajectory_name(l, k));
                let n = write_rows(&path, &trajectory_rows(&series))?;
                manifest.record_output(&path, n)?;
                summary.push(summary_row(&series, cfg.window)?);
            }
            let path = cfg.out.join(summary_name(l));
            let n = write_rows(&path, &summary)?;
            manifest.record_output(&path, n)?;
            all.extend(summary);
        }
        Ok(all)
    })();
    manifest.finish(if result.is_ok() { Status::Complete } else { Status::Failed })?;
    result
}
