//! Levenberg–Marquardt with a forward-difference Jacobian.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug)]
pub struct LmOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iter: 200,
            tol: 1e-15,
        }
    }
}

/// Minimizes `½‖r(x)‖²`; returns the best point and its residual norm.
pub fn levenberg_marquardt<F>(mut r: F, x0: &[f64], opts: LmOptions) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = DVector::from_vec(r(&x));
    let mut cost = fx.norm();
    let mut lambda = 1e-3;
    for _ in 0..opts.max_iter {
        if cost <= opts.tol {
            break;
        }
        let m = fx.len();
        let mut jac = DMatrix::<f64>::zeros(m, n);
        for j in 0..n {
            let h = 1e-7 * x[j].abs().max(1.0);
            let mut xp = x.clone();
            xp[j] += h;
            let fp = DVector::from_vec(r(&xp));
            jac.set_column(j, &((fp - &fx) / h));
        }
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * &fx;
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for i in 0..n {
                a[(i, i)] += lambda * (1.0 + jtj[(i, i)]);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let xn: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let fn_ = DVector::from_vec(r(&xn));
            let cn = fn_.norm();
            if cn.is_finite() && cn < cost {
                x = xn;
                fx = fn_;
                let rel = (cost - cn) / cost.max(1e-300);
                cost = cn;
                lambda = (lambda * 0.3).max(1e-15);
                improved = true;
                if rel < 1e-14 {
                    return (x, cost);
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (x, cost)
}
