//! Scaled conjugate gradient (Møller, 1993).
//!
//! A conjugate-direction method with no line search: curvature along the
//! search direction comes from a finite difference of gradients, and a
//! Levenberg-Marquardt style scale `lambda` keeps the local quadratic model
//! positive definite.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Differentiable training objective over a flat parameter vector.
pub trait Objective {
    fn loss_and_grad(&self, w: &[f64]) -> (f64, Vec<f64>);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScgConfig {
    pub max_epochs: usize,
    /// Step used for the second-order finite difference.
    pub sigma: f64,
    pub lambda_init: f64,
    /// Stop once the gradient norm drops below this.
    pub grad_tol: f64,
}

impl Default for ScgConfig {
    fn default() -> Self {
        ScgConfig {
            max_epochs: 15_000,
            sigma: 5e-5,
            lambda_init: 5e-7,
            grad_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScgReport {
    /// Loss after each epoch.
    pub history: Vec<f64>,
    pub converged: bool,
}

const LAMBDA_MIN: f64 = 1e-15;
const LAMBDA_MAX: f64 = 1e100;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(w: &[f64], alpha: f64, p: &[f64]) -> Vec<f64> {
    w.iter().zip(p).map(|(x, d)| x + alpha * d).collect()
}

/// Minimize `obj` starting from `w`, updating it in place.
pub fn minimize<O: Objective>(obj: &O, w: &mut Vec<f64>, cfg: &ScgConfig) -> Result<ScgReport> {
    let n = w.len();
    let (mut loss, grad) = obj.loss_and_grad(w);
    if !loss.is_finite() {
        return Err(Error::Divergence { epoch: 0 });
    }
    let mut r: Vec<f64> = grad.iter().map(|g| -g).collect();
    let mut p = r.clone();
    let mut lambda = cfg.lambda_init;
    let mut lambda_bar = 0.0;
    let mut success = true;
    let mut delta = 0.0;
    let mut history = Vec::with_capacity(cfg.max_epochs);

    for epoch in 1..=cfg.max_epochs {
        if dot(&r, &r).sqrt() < cfg.grad_tol {
            return Ok(ScgReport { history, converged: true });
        }
        let p_sq = dot(&p, &p);
        if p_sq == 0.0 {
            return Ok(ScgReport { history, converged: true });
        }
        if success {
            let sigma_k = cfg.sigma / p_sq.sqrt();
            let (_, g_probe) = obj.loss_and_grad(&axpy(w, sigma_k, &p));
            // s = (E'(w + sigma p) - E'(w)) / sigma, with E'(w) = -r.
            delta = g_probe
                .iter()
                .zip(&r)
                .zip(&p)
                .map(|((g, ri), pi)| (g + ri) / sigma_k * pi)
                .sum();
        }

        delta += (lambda - lambda_bar) * p_sq;
        if delta <= 0.0 {
            lambda_bar = 2.0 * (lambda - delta / p_sq);
            delta = -delta + lambda * p_sq;
            lambda = lambda_bar;
        }

        let mu = dot(&p, &r);
        let alpha = mu / delta;
        if !alpha.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        let w_new = axpy(w, alpha, &p);
        let (loss_new, grad_new) = obj.loss_and_grad(&w_new);
        // A non-finite trial loss is simply a rejected step.
        let comparison = if loss_new.is_finite() {
            2.0 * delta * (loss - loss_new) / (mu * mu)
        } else {
            f64::NEG_INFINITY
        };

        if comparison >= 0.0 {
            *w = w_new;
            loss = loss_new;
            let r_new: Vec<f64> = grad_new.iter().map(|g| -g).collect();
            lambda_bar = 0.0;
            success = true;
            if epoch % n == 0 {
                p = r_new.clone();
            } else {
                let beta = (dot(&r_new, &r_new) - dot(&r_new, &r)) / mu;
                p = r_new.iter().zip(&p).map(|(ri, pi)| ri + beta * pi).collect();
            }
            r = r_new;
            if comparison >= 0.75 {
                lambda *= 0.25;
            }
        } else {
            lambda_bar = lambda;
            success = false;
        }
        if comparison < 0.25 {
            lambda += delta * (1.0 - comparison) / p_sq;
        }
        if lambda.is_nan() || grad_new.iter().any(|g| !g.is_finite()) && success {
            return Err(Error::Divergence { epoch });
        }
        lambda = lambda.clamp(LAMBDA_MIN, LAMBDA_MAX);
        history.push(loss);
    }
    let converged = dot(&r, &r).sqrt() < cfg.grad_tol;
    Ok(ScgReport { history, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rosenbrock valley.
    struct Rosen;

    impl Rosen {
        fn loss(&self, w: &[f64]) -> f64 {
            (1.0 - w[0]).powi(2) + 100.0 * (w[1] - w[0] * w[0]).powi(2)
        }
    }

    impl Objective for Rosen {
        fn loss_and_grad(&self, w: &[f64]) -> (f64, Vec<f64>) {
            let g0 = -2.0 * (1.0 - w[0]) - 400.0 * w[0] * (w[1] - w[0] * w[0]);
            let g1 = 200.0 * (w[1] - w[0] * w[0]);
            (self.loss(w), vec![g0, g1])
        }
    }

    /// Ill-conditioned quadratic.
    struct Quad;

    impl Quad {
        fn loss(&self, w: &[f64]) -> f64 {
            w.iter().enumerate().map(|(i, x)| (i + 1) as f64 * x * x).sum()
        }
    }

    impl Objective for Quad {
        fn loss_and_grad(&self, w: &[f64]) -> (f64, Vec<f64>) {
            (self.loss(w), w.iter().enumerate().map(|(i, x)| 2.0 * (i + 1) as f64 * x).collect())
        }
    }

    #[test]
    fn solves_rosenbrock() {
        let mut w = vec![-1.2, 1.0];
        let cfg = ScgConfig { max_epochs: 5000, ..ScgConfig::default() };
        let rep = minimize(&Rosen, &mut w, &cfg).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-5 && (w[1] - 1.0).abs() < 1e-5, "{w:?}");
        assert!(rep.history.windows(2).all(|h| h[1] <= h[0] + 1e-15));
    }

    #[test]
    fn quadratic_converges_quickly() {
        let mut w = vec![1.0; 10];
        let rep = minimize(&Quad, &mut w, &ScgConfig { max_epochs: 200, ..ScgConfig::default() }).unwrap();
        assert!(rep.converged);
        assert!(w.iter().all(|x| x.abs() < 1e-9));
    }
}
