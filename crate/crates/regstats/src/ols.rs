//! Ordinary least squares through a column-pivoted QR decomposition.
//! Pivoting supplies rank detection; the normal equations are never formed
//! on the solve path (they only appear in test oracles).

use nalgebra::{DMatrix, DVector};

use crate::dist::t_p_value;
use crate::{ModelFit, Result, StatsError};

/// Fit y = X beta + e and derive the usual inference quantities.
///
/// `names` labels the columns of X (used in reports and in the singular
/// design diagnostic).
pub fn ols_fit(x: &DMatrix<f64>, y: &DVector<f64>, names: &[String]) -> Result<ModelFit> {
    let (n, k) = x.shape();
    if names.len() != k {
        return Err(StatsError::InvalidInput(format!(
            "{} names for {k} columns",
            names.len()
        )));
    }
    if y.len() != n {
        return Err(StatsError::InvalidInput(format!(
            "{} responses for {n} rows",
            y.len()
        )));
    }
    if k == 0 {
        return Err(StatsError::InvalidInput("design matrix has no columns".into()));
    }
    if n <= k {
        return Err(StatsError::InsufficientData { rows: n, cols: k });
    }

    let qr = x.clone().col_piv_qr();
    let r = qr.r();
    let q = qr.q();

    // Column permutation: position j of the pivoted matrix holds original
    // column perm[j].
    let mut idx = DMatrix::<f64>::from_fn(k, 1, |row, _| row as f64);
    qr.p().permute_rows(&mut idx);
    let perm: Vec<usize> = (0..k).map(|j| idx[(j, 0)] as usize).collect();

    // Rank check on the pivoted diagonal.
    let scale = r[(0, 0)].abs();
    let tol = scale * (n.max(k) as f64) * f64::EPSILON * 16.0;
    let deficient: Vec<String> = (0..k)
        .filter(|&j| r[(j, j)].abs() <= tol)
        .map(|j| names[perm[j]].clone())
        .collect();
    if scale == 0.0 || !deficient.is_empty() {
        return Err(StatsError::SingularDesign { columns: deficient });
    }

    let qty = q.transpose() * y;
    let gamma = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| StatsError::Numeric("triangular solve failed".into()))?;
    let mut estimates = vec![0.0f64; k];
    for j in 0..k {
        estimates[perm[j]] = gamma[j];
    }

    let beta = DVector::from_column_slice(&estimates);
    let residuals = y - x * &beta;
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let df = n - k;
    let sigma2 = rss / df as f64;

    // (X'X)^-1 = P R^-1 R^-T P'; only the diagonal is needed for the
    // standard errors, taken through the same permutation.
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| StatsError::Numeric("triangular inversion failed".into()))?;
    let mut std_errors = vec![0.0f64; k];
    for j in 0..k {
        let var: f64 = (0..k).map(|c| r_inv[(j, c)] * r_inv[(j, c)]).sum();
        std_errors[perm[j]] = (sigma2 * var).sqrt();
    }

    let mut t_values = Vec::with_capacity(k);
    let mut p_values = Vec::with_capacity(k);
    for j in 0..k {
        let t = if std_errors[j] > 0.0 { estimates[j] / std_errors[j] } else { 0.0 };
        t_values.push(t);
        p_values.push(t_p_value(t, df)?);
    }

    let mean_y = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum();
    let r2 = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };

    Ok(ModelFit {
        terms: names.to_vec(),
        estimates,
        std_errors,
        t_values,
        p_values,
        residual_df: df,
        sigma2,
        r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use imgcore::RngStream;

    /// Brute-force oracle: explicit normal equations with Gauss-Jordan
    /// inversion, written without nalgebra's solvers.
    pub(crate) fn normal_equations_fit(
        x: &DMatrix<f64>,
        y: &DVector<f64>,
    ) -> (Vec<f64>, Vec<f64>, f64) {
        let (n, k) = x.shape();
        let mut xtx = vec![vec![0.0f64; k]; k];
        let mut xty = vec![0.0f64; k];
        for a in 0..k {
            for b in 0..k {
                xtx[a][b] = (0..n).map(|r| x[(r, a)] * x[(r, b)]).sum();
            }
            xty[a] = (0..n).map(|r| x[(r, a)] * y[r]).sum();
        }
        let inv = gauss_jordan(xtx);
        let beta: Vec<f64> =
            (0..k).map(|a| (0..k).map(|b| inv[a][b] * xty[b]).sum()).collect();
        let rss: f64 = (0..n)
            .map(|r| {
                let fitted: f64 = (0..k).map(|c| x[(r, c)] * beta[c]).sum();
                (y[r] - fitted) * (y[r] - fitted)
            })
            .sum();
        let sigma2 = rss / (n - k) as f64;
        let se: Vec<f64> = (0..k).map(|a| (sigma2 * inv[a][a]).sqrt()).collect();
        (beta, se, rss)
    }

    pub(crate) fn gauss_jordan(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        let k = m.len();
        let mut inv: Vec<Vec<f64>> =
            (0..k).map(|i| (0..k).map(|j| f64::from(i == j)).collect()).collect();
        for col in 0..k {
            let pivot = (col..k)
                .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
                .unwrap();
            m.swap(col, pivot);
            inv.swap(col, pivot);
            let d = m[col][col];
            for j in 0..k {
                m[col][j] /= d;
                inv[col][j] /= d;
            }
            for row in 0..k {
                if row != col {
                    let f = m[row][col];
                    for j in 0..k {
                        m[row][j] -= f * m[col][j];
                        inv[row][j] -= f * inv[col][j];
                    }
                }
            }
        }
        inv
    }

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("x{i}")).collect()
    }

    fn random_system(rng: &mut RngStream, n: usize, k: usize) -> (DMatrix<f64>, DVector<f64>) {
        let x = DMatrix::from_fn(n, k, |r, c| {
            if c == 0 {
                1.0
            } else {
                let _ = (r, c);
                rng.uniform(-3.0, 3.0).unwrap()
            }
        });
        let y = DVector::from_fn(n, |_, _| rng.uniform(-5.0, 5.0).unwrap());
        (x, y)
    }

    #[test]
    fn noiseless_system_is_recovered_exactly() {
        let mut rng = RngStream::new(17, 0);
        let (x, _) = random_system(&mut rng, 12, 4);
        let truth = DVector::from_column_slice(&[2.0, -1.5, 0.25, 4.0]);
        let y = &x * &truth;
        let fit = ols_fit(&x, &y, &names(4)).unwrap();
        for j in 0..4 {
            assert!((fit.estimates[j] - truth[j]).abs() < 1e-10);
        }
        let rss = fit.sigma2 * fit.residual_df as f64;
        assert!(rss < 1e-10, "rss {rss}");
        assert!(fit.r2 > 1.0 - 1e-10);
    }

    #[test]
    fn matches_normal_equations_on_random_systems() {
        let mut rng = RngStream::new(400, 1);
        for trial in 0..100 {
            let k = 2 + rng.index(6);
            let n = k + 2 + rng.index(20);
            let (x, y) = random_system(&mut rng, n, k);
            let fit = ols_fit(&x, &y, &names(k)).unwrap();
            let (beta, se, _) = normal_equations_fit(&x, &y);
            for j in 0..k {
                assert!(
                    (fit.estimates[j] - beta[j]).abs() < 1e-8,
                    "trial {trial} beta[{j}]: {} vs {}",
                    fit.estimates[j],
                    beta[j]
                );
                assert!(
                    (fit.std_errors[j] - se[j]).abs() < 1e-8,
                    "trial {trial} se[{j}]"
                );
            }
        }
    }

    #[test]
    fn residuals_are_orthogonal_to_the_design() {
        let mut rng = RngStream::new(900, 2);
        for _ in 0..20 {
            let (x, y) = random_system(&mut rng, 24, 5);
            let fit = ols_fit(&x, &y, &names(5)).unwrap();
            let beta = DVector::from_column_slice(&fit.estimates);
            let resid = &y - &x * beta;
            let xtr = x.transpose() * resid;
            let y_norm = y.norm();
            for v in xtr.iter() {
                assert!(v.abs() <= 1e-8 * y_norm, "X'r = {v}");
            }
        }
    }

    #[test]
    fn duplicate_columns_are_reported_as_singular() {
        let mut rng = RngStream::new(31, 3);
        let base = DMatrix::from_fn(10, 2, |_, _| rng.uniform(-1.0, 1.0).unwrap());
        let mut x = DMatrix::zeros(10, 3);
        x.set_column(0, &base.column(0));
        x.set_column(1, &base.column(1));
        x.set_column(2, &base.column(1));
        let y = DVector::from_fn(10, |_, _| rng.uniform(-1.0, 1.0).unwrap());
        match ols_fit(&x, &y, &["a".into(), "b".into(), "c".into()]) {
            Err(StatsError::SingularDesign { columns }) => {
                assert!(!columns.is_empty());
                assert!(columns.iter().all(|c| c == "b" || c == "c"), "{columns:?}");
            }
            other => panic!("expected singular design, got {other:?}"),
        }
    }

    #[test]
    fn too_few_rows_is_an_error() {
        let x = DMatrix::identity(3, 3);
        let y = DVector::zeros(3);
        assert!(matches!(
            ols_fit(&x, &y, &names(3)),
            Err(StatsError::InsufficientData { .. })
        ));
    }

    #[test]
    fn orthogonal_extra_column_leaves_estimates_unchanged() {
        // Plus/minus full factorial columns are mutually orthogonal, so
        // adding an interaction column does not move existing estimates.
        let levels: Vec<[f64; 2]> =
            vec![[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]];
        let mut rows = Vec::new();
        for rep in 0..3 {
            for l in &levels {
                rows.push([l[0], l[1], rep as f64]);
            }
        }
        let n = rows.len();
        let x2 = DMatrix::from_fn(n, 3, |r, c| match c {
            0 => 1.0,
            1 => rows[r][0],
            _ => rows[r][1],
        });
        let x3 = DMatrix::from_fn(n, 4, |r, c| match c {
            0 => 1.0,
            1 => rows[r][0],
            2 => rows[r][1],
            _ => rows[r][0] * rows[r][1],
        });
        let mut rng = RngStream::new(77, 7);
        let y = DVector::from_fn(n, |_, _| rng.uniform(0.0, 10.0).unwrap());
        let f2 = ols_fit(&x2, &y, &names(3)).unwrap();
        let f3 = ols_fit(&x3, &y, &names(4)).unwrap();
        for j in 0..3 {
            assert!((f2.estimates[j] - f3.estimates[j]).abs() < 1e-12);
        }
    }
}
