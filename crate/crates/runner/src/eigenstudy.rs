//! Interpolated scar/thermal eigenstate sweep.

use std::sync::Arc;

use rayon::prelude::*;

use pxp_core::entanglement::{entropy, CutPlan, QuarterPlans};
use pxp_core::ergotropy::{ergotropy_with_plan, SubsystemHamiltonian};
use pxp_core::hilbert::{ConstrainedBasis, CutGeometry};
use pxp_core::operators::{staggered_z, DiagonalOperator};
use pxp_core::scars::{separate_for_length, thermal_subsample, Separation};
use pxp_core::states::{interpolate, Space, StateVector};

use crate::config::RunConfig;
use crate::error::{RunError, RunResult};
use crate::fitreport::FitReport;
use crate::manifest::{ManifestWriter, Status};
use crate::tables::{write_rows, EigenRow, MEAN_INDEX};

/// Subsampling seed for one length, so that adding lengths to a run leaves
/// the others unchanged.
pub fn length_seed(seed: u64, length: usize) -> u64 {
    seed.wrapping_add(length as u64)
}

/// Everything computed for one chain length.
#[derive(Debug, Clone)]
pub struct LengthStudy {
    pub separation: Separation,
    /// Thermal vectors entering the ensemble.
    pub thermal_used: Vec<usize>,
    pub rows: Vec<EigenRow>,
}

struct Probes {
    half: CutPlan,
    quarters: QuarterPlans,
    h_a: SubsystemHamiltonian,
    staggered: DiagonalOperator,
}

impl Probes {
    fn new(basis: &ConstrainedBasis) -> RunResult<Self> {
        let l = basis.length();
        Ok(Self {
            half: CutPlan::new(basis, &CutGeometry::half_chain(l))?,
            quarters: QuarterPlans::new(basis)?,
            h_a: SubsystemHamiltonian::new(l / 2)?,
            staggered: staggered_z(basis),
        })
    }

    fn row(&self, psi: &StateVector, lambda: f64, index: String) -> RunResult<EigenRow> {
        let l = self.half.geometry().length();
        let (erg, spec) = ergotropy_with_plan(&self.half, psi.amps(), &self.h_a)?;
        let (mutual_info, tripartite) = self.quarters.evaluate(psi.amps())?;
        Ok(EigenRow {
            length: l,
            lambda,
            thermal_index: index,
            energy: erg.energy,
            ergotropy: erg.ergotropy,
            bound: erg.bound,
            entropy: entropy(&spec),
            qfi: self.staggered.variance(psi.amps())? / l as f64,
            mutual_info,
            tripartite,
        })
    }
}

fn mean_row(cell: &[EigenRow]) -> EigenRow {
    let n = cell.len() as f64;
    let avg = |f: fn(&EigenRow) -> f64| cell.iter().map(f).sum::<f64>() / n;
    EigenRow {
        length: cell[0].length,
        lambda: cell[0].lambda,
        thermal_index: MEAN_INDEX.to_string(),
        energy: avg(|r| r.energy),
        ergotropy: avg(|r| r.ergotropy),
        bound: avg(|r| r.bound),
        entropy: avg(|r| r.entropy),
        qfi: avg(|r| r.qfi),
        mutual_info: avg(|r| r.mutual_info),
        tripartite: avg(|r| r.tripartite),
    }
}

/// Separates the shell at `length` and evaluates every `(lambda, thermal)` cell,
/// each lambda block followed by its ensemble-mean row.
pub fn study_length(length: usize, cfg: &RunConfig) -> RunResult<LengthStudy> {
    let separation = separate_for_length(length, cfg.shell_tol)?;
    let split = &separation.split;
    if split.thermal.is_empty() {
        return Err(RunError::Config(format!(
            "L = {length}: the zero-energy shell holds no thermal directions"
        )));
    }
    let thermal_used = thermal_subsample(
        split.thermal.len(),
        cfg.max_thermal,
        length_seed(cfg.seed, length),
    );
    let basis: &Arc<ConstrainedBasis> = &separation.basis;
    let probes = Probes::new(basis)?;
    let space = Space::Chain(basis.clone());
    let scar = StateVector::from_real(space.clone(), &split.scar)?;

    let cells: Vec<(f64, usize)> = cfg
        .lambda_grid
        .iter()
        .flat_map(|&lam| thermal_used.iter().map(move |&n| (lam, n)))
        .collect();
    let computed: Vec<EigenRow> = cells
        .par_iter()
        .map(|&(lam, n)| {
            let thermal = StateVector::from_real(space.clone(), &split.thermal[n])?;
            let psi = interpolate(&scar, &thermal, 1.0 - lam)?;
            probes.row(&psi, lam, n.to_string())
        })
        .collect::<RunResult<_>>()?;

    let mut rows = Vec::with_capacity(computed.len() + cfg.lambda_grid.len());
    for cell in computed.chunks(thermal_used.len()) {
        rows.extend_from_slice(cell);
        rows.push(mean_row(cell));
    }
    Ok(LengthStudy {
        separation,
        thermal_used,
        rows,
    })
}

pub fn output_name(length: usize) -> String {
    format!("eigenstudy_L{length}.csv")
}

pub const FIT_REPORT: &str = "eigenstudy_fits.json";

pub fn run_eigenstudy(cfg: &RunConfig) -> RunResult<Vec<LengthStudy>> {
    let mut manifest = ManifestWriter::begin(cfg)?;
    let result = (|| {
        let mut studies = Vec::new();
        for &l in &cfg.lengths {
            let study = study_length(l, cfg)?;
            let sep = &study.separation;
            manifest.note(format!(
                "L={l}: shell {} (gap {:.3e}), top FSA weights {:?}, thermal {} of {} (seed {})",
                sep.shell.len(),
                sep.shell_gap,
                &sep.split.fsa_weights[..sep.split.fsa_weights.len().min(3)],
                study.thermal_used.len(),
                sep.split.thermal.len(),
                length_seed(cfg.seed, l)
            ))?;
            let path = cfg.out.join(output_name(l));
            let n = write_rows(&path, &study.rows)?;
            manifest.record_output(&path, n)?;
            studies.push(study);
        }
        let all: Vec<EigenRow> = studies.iter().flat_map(|s| s.rows.iter().cloned()).collect();
        let report = FitReport::from_rows(&all);
        let path = cfg.out.join(FIT_REPORT);
        report.write(&path)?;
        manifest.record_output(&path, report.len())?;
        Ok(studies)
    })();
    manifest.finish(if result.is_ok() { Status::Complete } else { Status::Failed })?;
    result
}
