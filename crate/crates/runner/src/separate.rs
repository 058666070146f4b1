//! Scar separation report.

use serde::{Deserialize, Serialize};

use pxp_core::hilbert::ConstrainedBasis;
use pxp_core::scars::{separate_for_length, Separation};

use crate::config::RunConfig;
use crate::error::{io_err, RunResult};
use crate::manifest::{ManifestWriter, Status};

/// `(|P v - v|, |P v + v|)` for the basis permutation `map` (`P e_i = e_map[i]`).
pub fn parity_residuals(map: &[usize], v: &[f64]) -> (f64, f64) {
    let mut pv = vec![0.0; v.len()];
    for (i, &j) in map.iter().enumerate() {
        pv[j] = v[i];
    }
    let dist = |sign: f64| {
        pv.iter()
            .zip(v)
            .map(|(a, b)| (a - sign * b).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    (dist(1.0), dist(-1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    #[serde(rename = "L")]
    pub length: usize,
    pub dim: usize,
    pub shell_size: usize,
    pub shell_gap: f64,
    /// Leading eigenvalues of the shell-projected FSA projector, descending.
    pub fsa_weights: Vec<f64>,
    pub multi_scar: bool,
    /// `|T s - s|` and `|T s + s|` for the scar `s`.
    pub translation_even: f64,
    pub translation_odd: f64,
    pub inversion_even: f64,
    pub inversion_odd: f64,
    pub scar_z2_weight: f64,
    pub max_thermal_z2_weight: f64,
}

impl SeparationReport {
    pub fn new(sep: &Separation) -> RunResult<Self> {
        let basis: &ConstrainedBasis = &sep.basis;
        let split = &sep.split;
        let z2 = basis.state_index(basis.z2_config())?;
        let (translation_even, translation_odd) = parity_residuals(&basis.translation_map()?, &split.scar);
        let (inversion_even, inversion_odd) = parity_residuals(&basis.inversion_map()?, &split.scar);
        Ok(Self {
            length: basis.length(),
            dim: basis.dim(),
            shell_size: sep.shell.len(),
            shell_gap: sep.shell_gap,
            fsa_weights: split.fsa_weights.iter().take(5).copied().collect(),
            multi_scar: split.multi_scar,
            translation_even,
            translation_odd,
            inversion_even,
            inversion_odd,
            scar_z2_weight: split.scar[z2].powi(2),
            max_thermal_z2_weight: split.thermal.iter().map(|t| t[z2].powi(2)).fold(0.0, f64::max),
        })
    }
}

pub fn output_name(length: usize) -> String {
    format!("separate_L{length}.json")
}

pub fn run_separate(cfg: &RunConfig) -> RunResult<Vec<SeparationReport>> {
    let mut manifest = ManifestWriter::begin(cfg)?;
    let result = (|| {
        let mut reports = Vec::new();
        for &l in &cfg.lengths {
            let report = SeparationReport::new(&separate_for_length(l, cfg.shell_tol)?)?;
            let path = cfg.out.join(output_name(l));
            let text = serde_json::to_string_pretty(&report)?;
            std::fs::write(&path, text + "\n").map_err(io_err(&path))?;
            manifest.record_output(&path, 1)?;
            reports.push(report);
        }
        Ok(reports)
    })();
    manifest.finish(if result.is_ok() { Status::Complete } else { Status::Failed })?;
    result
}
