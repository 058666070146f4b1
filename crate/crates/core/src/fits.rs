//! Least-squares scaling fits, extrapolations and rank statistics.

use faer::linalg::solvers::SolveLstsq;
use faer::Mat;

use crate::{Error, Result};

/// Coefficients of a linear-in-parameters model with their standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: String,
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    /// `NaN` when there are no residual degrees of freedom.
    pub std_errors: Vec<f64>,
    pub residual_norm: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

impl FitResult {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| self.coefficients[k])
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| self.std_errors[k])
    }
}

/// Fits `y ~ sum_j c_j basis_j(x)` by Householder QR.
pub fn least_squares(
    model: &str,
    names: &[&str],
    points: &[(f64, f64)],
    basis: impl Fn(f64) -> Vec<f64>,
) -> Result<FitResult> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let n = sorted.len();
    let p = names.len();
    if n < p {
        return Err(Error::InvalidArgument(format!(
            "{model}: {n} points for {p} parameters"
        )));
    }
    let rows: Vec<Vec<f64>> = sorted.iter().map(|&(x, _)| basis(x)).collect();
    let x = Mat::<f64>::from_fn(n, p, |i, j| rows[i][j]);
    let y = Mat::<f64>::from_fn(n, 1, |i, _| sorted[i].1);
    let qr = x.qr();
    let r = qr.thin_R();
    let scale = (0..p).map(|k| r[(k, k)].abs()).fold(0.0, f64::max);
    if (0..p).any(|k| r[(k, k)].abs() <= 1e-12 * scale.max(1e-300)) {
        return Err(Error::RankDeficient);
    }
    let sol = qr.solve_lstsq(&y);
    let coefficients: Vec<f64> = (0..p).map(|k| sol[(k, 0)]).collect();
    let fitted: Vec<f64> = rows
        .iter()
        .map(|row| row.iter().zip(&coefficients).map(|(a, c)| a * c).sum())
        .collect();
    let rss: f64 = sorted
        .iter()
        .zip(&fitted)
        .map(|(&(_, y), f)| (y - f).powi(2))
        .sum();
    let mean = sorted.iter().map(|&(_, y)| y).sum::<f64>() / n as f64;
    let tss: f64 = sorted.iter().map(|&(_, y)| (y - mean).powi(2)).sum();
    let r_squared = if tss > 0.0 { (1.0 - rss / tss).clamp(0.0, 1.0) } else { 1.0 };

    // cov = sigma^2 (R^T R)^{-1} = sigma^2 R^{-1} R^{-T}
    let std_errors = if n > p {
        let sigma2 = rss / (n - p) as f64;
        let mut rinv = Mat::<f64>::zeros(p, p);
        for col in 0..p {
            for row in (0..=col).rev() {
                let mut acc = if row == col { 1.0 } else { 0.0 };
                for k in row + 1..=col {
                    acc -= r[(row, k)] * rinv[(k, col)];
                }
                rinv[(row, col)] = acc / r[(row, row)];
            }
        }
        (0..p)
            .map(|k| (sigma2 * (0..p).map(|j| rinv[(k, j)].powi(2)).sum::<f64>()).sqrt())
            .collect()
    } else {
        vec![f64::NAN; p]
    };

    Ok(FitResult {
        model: model.to_string(),
        names: names.iter().map(|s| s.to_string()).collect(),
        coefficients,
        std_errors,
        residual_norm: rss.sqrt(),
        r_squared,
        n_points: n,
    })
}

/// `S = a + v L + c ln(L) / 3`.
pub fn fit_entropy_scaling(points: &[(f64, f64)]) -> Result<FitResult> {
    require(points, 4, "entropy scaling")?;
    least_squares("S = a + v L + c lnL/3", &["a", "v", "c"], points, |l| {
        vec![1.0, l, l.ln() / 3.0]
    })
}

/// `S^2 / Q = n + m L`.
pub fn fit_sq_over_q(points: &[(f64, f64)]) -> Result<FitResult> {
    require(points, 3, "S^2/Q")?;
    linear_fit(points)
}

/// Plain straight line `y = n + m x` with coefficient names `n`, `m`.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    least_squares("y = n + m x", &["n", "m"], points, |x| vec![1.0, x])
}

/// Which asymptotic form an ergotropy-density extrapolation assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `W/L = w_inf + beta ln^2(L) / L^2`
    Scar,
    /// `W/L = w_inf + d / L + c / L^2`; the constant is kept so that its
    /// consistency with zero can be tested.
    Thermal,
}

/// Extrapolated large-`L` ergotropy density.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation {
    pub regime: Regime,
    pub limit: f64,
    pub limit_std_error: f64,
    pub fit: FitResult,
}

pub fn extrapolate_ergotropy_density(points: &[(f64, f64)], regime: Regime) -> Result<Extrapolation> {
    require(points, 4, "ergotropy extrapolation")?;
    let fit = match regime {
        Regime::Scar => least_squares(
            "W/L = w_inf + beta ln^2(L)/L^2",
            &["w_inf", "beta"],
            points,
            |l| vec![1.0, l.ln().powi(2) / (l * l)],
        )?,
        Regime::Thermal => least_squares(
            "W/L = w_inf + d/L + c/L^2",
            &["w_inf", "d", "c"],
            points,
            |l| vec![1.0, 1.0 / l, 1.0 / (l * l)],
        )?,
    };
    Ok(Extrapolation {
        regime,
        limit: fit.coefficients[0],
        limit_std_error: fit.std_errors[0],
        fit,
    })
}

/// A fit on all sizes next to the same fit without the smallest size.
#[derive(Debug, Clone, PartialEq)]
pub struct Sensitivity {
    pub full: FitResult,
    pub dropped: Option<FitResult>,
    /// Largest absolute coefficient change, when the reduced fit exists.
    pub max_shift: Option<f64>,
}

pub fn drop_smallest_sensitivity(
    points: &[(f64, f64)],
    fit: impl Fn(&[(f64, f64)]) -> Result<FitResult>,
) -> Result<Sensitivity> {
    let full = fit(points)?;
    let smallest = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let rest: Vec<_> = points.iter().copied().filter(|p| p.0 != smallest).collect();
    let dropped = fit(&rest).ok();
    let max_shift = dropped.as_ref().map(|d| {
        d.coefficients
            .iter()
            .zip(&full.coefficients)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    });
    Ok(Sensitivity {
        full,
        dropped,
        max_shift,
    })
}

fn require(points: &[(f64, f64)], min: usize, what: &str) -> Result<()> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < min {
        return Err(Error::InvalidArgument(format!(
            "{what} needs at least {min} sizes, got {}",
            xs.len()
        )));
    }
    Ok(())
}

/// Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

// Ranks starting at 1, ties receive their average rank.
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    let mut out = vec![0.0; x.len()];
    let mut k = 0;
    while k < order.len() {
        let mut end = k;
        while end + 1 < order.len() && x[order[end + 1]] == x[order[k]] {
            end += 1;
        }
        let avg = (k + end) as f64 / 2.0 + 1.0;
        for &i in &order[k..=end] {
            out[i] = avg;
        }
        k = end + 1;
    }
    out
}

/// Spearman rank correlation.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_linear_entropy_recovered() {
        let pts: Vec<_> = [10.0, 12.0, 14.0, 16.0].iter().map(|&l| (l, 2.0 * l)).collect();
        let fit = fit_entropy_scaling(&pts).unwrap();
        assert!((fit.coefficient("v").unwrap() - 2.0).abs() < 1e-10);
        assert!(fit.coefficient("a").unwrap().abs() < 1e-10);
        assert!(fit.coefficient("c").unwrap().abs() < 1e-10);
        assert!(fit_entropy_scaling(&pts[..3]).is_err());
    }

    #[test]
    fn straight_line_and_permutation_invariance() {
        let pts = [(10.0, 1.5), (12.0, 1.9), (14.0, 2.3)];
        let fit = fit_sq_over_q(&pts).unwrap();
        assert!((fit.coefficient("m").unwrap() - 0.2).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        let rev = fit_sq_over_q(&[pts[2], pts[0], pts[1]]).unwrap();
        assert_eq!(fit, rev);
    }

    #[test]
    fn scar_extrapolation_recovers_limit() {
        let pts: Vec<_> = [10.0f64, 12.0, 14.0, 16.0, 18.0]
            .iter()
            .map(|&l| (l, 0.3 - 1.7 * l.ln().powi(2) / (l * l)))
            .collect();
        let ex = extrapolate_ergotropy_density(&pts, Regime::Scar).unwrap();
        assert!((ex.limit - 0.3).abs() < 1e-8);
    }

    #[test]
    fn rank_deficient_design() {
        let pts = [(3.0, 1.0), (3.0, 2.0), (3.0, 3.0)];
        assert_eq!(linear_fit(&pts), Err(Error::RankDeficient));
    }

    #[test]
    fn standard_errors_of_noisy_line() {
        let pts = [(0.0, 0.1), (1.0, 0.9), (2.0, 2.1), (3.0, 2.9)];
        let fit = linear_fit(&pts).unwrap();
        // closed form: se(m) = sqrt(s^2 / Sxx), Sxx = 5, residuals +-0.1 pattern
        let resid: Vec<f64> = pts
            .iter()
            .map(|&(x, y)| y - fit.coefficients[0] - fit.coefficients[1] * x)
            .collect();
        let s2 = resid.iter().map(|r| r * r).sum::<f64>() / 2.0;
        assert!((fit.std_errors[1] - (s2 / 5.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rank_correlation() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        assert_eq!(ranks(&[2.0, 1.0, 2.0]), vec![2.5, 1.0, 2.5]);
    }
}
