//! CSV row types. Field names are the column headers.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, RunError, RunResult};

pub const EIGENSTUDY_HEADER: &str = "L,lambda,thermal_index,E,W,Q,S_vN,f_Q,I2,I3";
pub const TRAJECTORY_HEADER: &str = "L,theta,t,E_A,W,Q,S_vN";
pub const SUMMARY_HEADER: &str = "L,theta,W_bar,Q_bar,S_bar,max_dE_A";
pub const ANALYTICS_HEADER: &str = "theta,f,lambda1,lambda2,xi,h,p1,p2,p3,p4,e_analytic,e_numeric,L_numeric";

/// Marks ensemble-mean rows in the `thermal_index` column.
pub const MEAN_INDEX: &str = "mean";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    #[serde(rename = "L")]
    pub length: usize,
    pub lambda: f64,
    /// Index into the shell's thermal vectors, or [`MEAN_INDEX`].
    pub thermal_index: String,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "W")]
    pub ergotropy: f64,
    #[serde(rename = "Q")]
    pub bound: f64,
    #[serde(rename = "S_vN")]
    pub entropy: f64,
    #[serde(rename = "f_Q")]
    pub qfi: f64,
    #[serde(rename = "I2")]
    pub mutual_info: f64,
    #[serde(rename = "I3")]
    pub tripartite: f64,
}

impl EigenRow {
    pub fn is_mean(&self) -> bool {
        self.thermal_index == MEAN_INDEX
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    #[serde(rename = "L")]
    pub length: usize,
    pub theta: f64,
    pub t: f64,
    #[serde(rename = "E_A")]
    pub energy: f64,
    #[serde(rename = "W")]
    pub ergotropy: f64,
    #[serde(rename = "Q")]
    pub bound: f64,
    #[serde(rename = "S_vN")]
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    #[serde(rename = "L")]
    pub length: usize,
    pub theta: f64,
    #[serde(rename = "W_bar")]
    pub ergotropy: f64,
    #[serde(rename = "Q_bar")]
    pub bound: f64,
    #[serde(rename = "S_bar")]
    pub entropy: f64,
    #[serde(rename = "max_dE_A")]
    pub max_energy_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticsRow {
    pub theta: f64,
    pub f: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub xi: f64,
    pub h: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    pub e_analytic: f64,
    pub e_numeric: f64,
    #[serde(rename = "L_numeric")]
    pub length: usize,
}

/// Writes `rows` with a header row; returns the number of data rows.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> RunResult<usize> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(rows.len())
}

/// Reads rows after checking the header against `expected`.
pub fn read_rows<T: DeserializeOwned>(path: &Path, expected: &str) -> RunResult<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != expected {
        return Err(RunError::Input {
            path: path.to_path_buf(),
            reason: format!("header '{header}' differs from '{expected}'"),
        });
    }
    r.deserialize().map(|row| row.map_err(RunError::from)).collect()
}
