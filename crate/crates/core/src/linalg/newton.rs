use crate::error::{Error, Result};
use faer::Mat;

#[derive(Clone, Debug)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Relative central-difference step.
    pub fd_step: f64,
    /// Maximum number of step halvings per iteration.
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_iter: 200,
            fd_step: 1e-7,
            max_halvings: 40,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NewtonReport {
    pub x: Vec<f64>,
    pub norm: f64,
    pub iterations: usize,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(
        0.0f64,
        |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) },
    )
}

fn fd_jacobian<F>(f: &mut F, x: &[f64], h: f64) -> Result<Mat<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let mut cols = Vec::with_capacity(n);
    let mut xp = x.to_vec();
    for k in 0..n {
        let step = h * x[k].abs().max(1.0);
        xp[k] = x[k] + step;
        let fp = f(&xp)?;
        xp[k] = x[k] - step;
        let fm = f(&xp)?;
        xp[k] = x[k];
        cols.push(
            fp.iter()
                .zip(&fm)
                .map(|(a, b)| (a - b) / (2.0 * step))
                .collect::<Vec<_>>(),
        );
    }
    let m = cols.first().map_or(0, |c| c.len());
    Ok(Mat::from_fn(m, n, |i, k| cols[k][i]))
}

/// Gauss-Newton with backtracking for f: R^n -> R^m, m >= n.
pub fn newton_solve<F, J>(
    mut residual: F,
    mut jacobian: Option<J>,
    seed: &[f64],
    opts: &NewtonOptions,
) -> Result<NewtonReport>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
    J: FnMut(&[f64]) -> Result<Mat<f64>>,
{
    if seed.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("seed is not finite".into()));
    }
    let mut x = seed.to_vec();
    let mut r = residual(&x)?;
    if r.len() < x.len() {
        return Err(Error::Shape(format!(
            "{} equations for {} unknowns",
            r.len(),
            x.len()
        )));
    }
    let mut norm = inf_norm(&r);
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if norm < opts.tol {
            return Ok(NewtonReport {
                x,
                norm,
                iterations,
            });
        }
        iterations += 1;
        let jac = match jacobian.as_mut() {
            Some(j) => j(&x)?,
            None => fd_jacobian(&mut residual, &x, opts.fd_step)?,
        };
        let svd = jac
            .thin_svd()
            .map_err(|_| Error::SingularJacobian { ratio: 0.0 })?;
        let s = svd.S().column_vector();
        let n = x.len();
        let smax = s[0];
        let smin = s[n - 1];
        let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
        if !(ratio > 1e-14) {
            return Err(Error::SingularJacobian { ratio });
        }
        let u = svd.U();
        let v = svd.V();
        let mut step = vec![0.0; n];
        for k in 0..n {
            let mut p = 0.0;
            for (i, ri) in r.iter().enumerate() {
                p += u[(i, k)] * ri;
            }
            p /= s[k];
            for (j, sj) in step.iter_mut().enumerate() {
                *sj -= v[(j, k)] * p;
            }
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + t * b).collect();
            if let Ok(rt) = residual(&trial) {
                let nt = inf_norm(&rt);
                if nt < norm {
                    x = trial;
                    r = rt;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm < opts.tol {
        return Ok(NewtonReport {
            x,
            norm,
            iterations,
        });
    }
    Err(Error::NonConvergence {
        iterations,
        norm,
        best: x,
    })
}

/// Placeholder type for calls without an analytic jacobian.
pub type NoJacobian = fn(&[f64]) -> Result<Mat<f64>>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_quadratic() {
        let r = newton_solve(
            |x: &[f64]| Ok(vec![x[0] * x[0] - 4.0]),
            None::<NoJacobian>,
            &[1.0],
            &NewtonOptions::default(),
        )
        .unwrap();
        assert!((r.x[0] - 2.0).abs() < 1e-11);
    }

    #[test]
    fn linear_system_one_step() {
        let a = [[4.0, 1.0, 0.5], [1.0, 3.0, -0.2], [0.5, -0.2, 2.0]];
        let b = [1.0, -2.0, 0.5];
        let f = |x: &[f64]| {
            Ok((0..3)
                .map(|i| (0..3).map(|j| a[i][j] * x[j]).sum::<f64>() - b[i])
                .collect())
        };
        let j = |_: &[f64]| Ok(Mat::from_fn(3, 3, |i, k| a[i][k]));
        let r = newton_solve(f, Some(j), &[0.0; 3], &NewtonOptions::default()).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.norm < 1e-11);
    }

    #[test]
    fn analytic_jacobian_used() {
        let j = |x: &[f64]| Ok(Mat::from_fn(1, 1, |_, _| 2.0 * x[0]));
        let r = newton_solve(
            |x: &[f64]| Ok(vec![x[0] * x[0] - 9.0]),
            Some(j),
            &[1.0],
            &NewtonOptions::default(),
        )
        .unwrap();
        assert!((r.x[0] - 3.0).abs() < 1e-11);
    }

    #[test]
    fn no_root_reports_best_point() {
        let e = newton_solve(
            |x: &[f64]| Ok(vec![x[0] * x[0] + 1.0]),
            None::<NoJacobian>,
            &[0.5],
            &NewtonOptions::default(),
        )
        .unwrap_err();
        match e {
            Error::NonConvergence { norm, best, .. } => {
                assert!(norm >= 1.0 - 1e-9);
                assert_eq!(best.len(), 1);
            }
            Error::SingularJacobian { .. } => {}
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn singular_jacobian() {
        let e = newton_solve(
            |x: &[f64]| Ok(vec![x[0] + x[1] - 1.0, 2.0 * x[0] + 2.0 * x[1] - 2.5]),
            None::<NoJacobian>,
            &[0.0, 0.0],
            &NewtonOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(e, Error::SingularJacobian { .. }));
    }

    #[test]
    fn overdetermined_consistent() {
        let r = newton_solve(
            |x: &[f64]| Ok(vec![x[0] - 1.0, 2.0 * x[0] - 2.0, x[0] * x[0] - 1.0]),
            None::<NoJacobian>,
            &[3.0],
            &NewtonOptions::default(),
        )
        .unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-11);
    }
}
