//! Scaling fits over eigenstudy tables.

use std::path::Path;

use serde::{Deserialize, Serialize};

use pxp_core::fits::{
    drop_smallest_sensitivity, extrapolate_ergotropy_density, fit_entropy_scaling, fit_sq_over_q, linear_fit,
    FitResult, Regime,
};

use crate::config::RunConfig;
use crate::eigenstudy::{output_name, FIT_REPORT};
use crate::error::{io_err, RunResult};
use crate::manifest::{ManifestWriter, Status};
use crate::tables::{read_rows, EigenRow, EIGENSTUDY_HEADER};

/// Ensemble averages for one `(L, lambda)` cell, recomputed from the per-state rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsemblePoint {
    pub length: usize,
    pub lambda: f64,
    pub energy: f64,
    pub ergotropy: f64,
    pub bound: f64,
    pub entropy: f64,
    /// Mean of `S_vN^2 / Q` over the ensemble.
    pub sq_over_q: f64,
    pub qfi: f64,
    pub members: usize,
}

impl EnsemblePoint {
    pub fn ergotropy_density(&self) -> f64 {
        self.ergotropy / self.length as f64
    }
}

/// One point per `(L, lambda)`, sorted by lambda then L.
pub fn ensemble_points(rows: &[EigenRow]) -> Vec<EnsemblePoint> {
    let mut keys: Vec<(f64, usize)> = rows
        .iter()
        .filter(|r| !r.is_mean())
        .map(|r| (r.lambda, r.length))
        .collect();
    keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keys.dedup();
    keys.into_iter()
        .map(|(lambda, length)| {
            let cell: Vec<&EigenRow> = rows
                .iter()
                .filter(|r| !r.is_mean() && r.length == length && r.lambda == lambda)
                .collect();
            let n = cell.len() as f64;
            let avg = |f: &dyn Fn(&EigenRow) -> f64| cell.iter().map(|r| f(r)).sum::<f64>() / n;
            EnsemblePoint {
                length,
                lambda,
                energy: avg(&|r| r.energy),
                ergotropy: avg(&|r| r.ergotropy),
                bound: avg(&|r| r.bound),
                entropy: avg(&|r| r.entropy),
                sq_over_q: avg(&|r| r.entropy * r.entropy / r.bound),
                qfi: avg(&|r| r.qfi),
                members: cell.len(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub model: String,
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub residual_norm: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// Largest coefficient change when the smallest L is dropped.
    pub drop_smallest_shift: Option<f64>,
}

impl FitSummary {
    fn new(fit: &FitResult, drop_smallest_shift: Option<f64>) -> Self {
        Self {
            model: fit.model.clone(),
            names: fit.names.clone(),
            coefficients: fit.coefficients.clone(),
            std_errors: fit.std_errors.clone(),
            residual_norm: fit.residual_norm,
            r_squared: fit.r_squared,
            n_points: fit.n_points,
            drop_smallest_shift,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaFits {
    pub lambda: f64,
    pub entropy_scaling: Option<FitSummary>,
    pub sq_over_q: Option<FitSummary>,
    pub qfi: Option<FitSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationSummary {
    pub lambda: f64,
    pub regime: String,
    pub limit: f64,
    pub limit_std_error: f64,
    pub fit: FitSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub lambdas: Vec<LambdaFits>,
    pub extrapolations: Vec<ExtrapolationSummary>,
    pub notes: Vec<String>,
}

fn attempt(
    points: &[(f64, f64)],
    fit: impl Fn(&[(f64, f64)]) -> pxp_core::Result<FitResult>,
    what: &str,
    notes: &mut Vec<String>,
) -> Option<FitSummary> {
    match drop_smallest_sensitivity(points, &fit) {
        Ok(s) => Some(FitSummary::new(&s.full, s.max_shift)),
        Err(e) => {
            notes.push(format!("{what}: {e}"));
            None
        }
    }
}

impl FitReport {
    pub fn from_rows(rows: &[EigenRow]) -> Self {
        let points = ensemble_points(rows);
        let mut lambdas: Vec<f64> = points.iter().map(|p| p.lambda).collect();
        lambdas.dedup();
        let mut notes = vec![
            "thermal extrapolation keeps a 1/L^2 correction next to 1/L".to_string(),
            "lambda is the thermal weight of the interpolated state".to_string(),
        ];
        let mut per_lambda = Vec::new();
        let mut extrapolations = Vec::new();
        for &lambda in &lambdas {
            let at: Vec<&EnsemblePoint> = points.iter().filter(|p| p.lambda == lambda).collect();
            let series = |f: fn(&EnsemblePoint) -> f64| -> Vec<(f64, f64)> {
                at.iter().map(|p| (p.length as f64, f(p))).collect()
            };
            let tag = |what: &str| format!("lambda={lambda} {what}");
            per_lambda.push(LambdaFits {
                lambda,
                entropy_scaling: attempt(&series(|p| p.entropy), fit_entropy_scaling, &tag("S_vN"), &mut notes),
                sq_over_q: attempt(&series(|p| p.sq_over_q), fit_sq_over_q, &tag("S^2/Q"), &mut notes),
                qfi: attempt(&series(|p| p.qfi), linear_fit, &tag("f_Q"), &mut notes),
            });
            let regime = if lambda == 0.0 {
                Some(Regime::Scar)
            } else if lambda == 1.0 {
                Some(Regime::Thermal)
            } else {
                None
            };
            if let Some(regime) = regime {
                let density = series(|p| p.ergotropy_density());
                match extrapolate_ergotropy_density(&density, regime) {
                    Ok(ex) => {
                        let shift = drop_smallest_sensitivity(&density, |pts| {
                            extrapolate_ergotropy_density(pts, regime).map(|e| e.fit)
                        })
                        .ok()
                        .and_then(|s| s.max_shift);
                        extrapolations.push(ExtrapolationSummary {
                            lambda,
                            regime: format!("{regime:?}").to_lowercase(),
                            limit: ex.limit,
                            limit_std_error: ex.limit_std_error,
                            fit: FitSummary::new(&ex.fit, shift),
                        });
                    }
                    Err(e) => notes.push(format!("{}: {e}", tag("W/L extrapolation"))),
                }
            }
        }
        Self {
            lambdas: per_lambda,
            extrapolations,
            notes,
        }
    }

    /// Number of fits reported.
    pub fn len(&self) -> usize {
        self.extrapolations.len()
            + self
                .lambdas
                .iter()
                .map(|l| [&l.entropy_scaling, &l.sq_over_q, &l.qfi].iter().filter(|f| f.is_some()).count())
                .sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn write(&self, path: &Path) -> RunResult<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(io_err(path))
    }
}

/// Refits from the eigenstudy tables of `cfg.lengths` in `cfg.out`.
pub fn run_fit(cfg: &RunConfig) -> RunResult<FitReport> {
    let mut manifest = ManifestWriter::begin(cfg)?;
    let result = (|| {
        let mut rows: Vec<EigenRow> = Vec::new();
        for &l in &cfg.lengths {
            rows.extend(read_rows::<EigenRow>(&cfg.out.join(output_name(l)), EIGENSTUDY_HEADER)?);
        }
        let report = FitReport::from_rows(&rows);
        let path = cfg.out.join(FIT_REPORT);
        report.write(&path)?;
        manifest.record_output(&path, report.len())?;
        Ok(report)
    })();
    manifest.finish(if result.is_ok() { Status::Complete } else { Status::Failed })?;
    result
}
