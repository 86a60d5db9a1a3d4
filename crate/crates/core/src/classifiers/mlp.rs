//! Two-layer tanh perceptron trained on the regularized mean squared error
//!
//! ```text
//! MSEREG = gamma * mean((t - a)^2) + (1 - gamma) * mean(w^2)
//! ```
//!
//! where the second mean runs over every weight and bias.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::scg::{self, Objective, ScgConfig};
use super::{Gallery, Normalizer, Polarity, Scaling, ScoreSet};
use crate::error::{Error, Result};
use crate::transforms::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub epochs: usize,
    pub gamma: f64,
    pub seed: u64,
    pub hidden: usize,
    pub sigma: f64,
    pub lambda_init: f64,
    pub grad_tol: f64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        let scg = ScgConfig::default();
        MlpConfig {
            epochs: 15_000,
            gamma: 0.9,
            seed: 0,
            hidden: 40,
            sigma: scg.sigma,
            lambda_init: scg.lambda_init,
            grad_tol: scg.grad_tol,
        }
    }
}

/// Layer sizes and the flat parameter layout
/// `[W1 (hidden x inputs, row-major), b1, W2 (outputs x hidden), b2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Network {
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
}

struct Layers {
    w1: DMatrix<f64>,
    b1: DVector<f64>,
    w2: DMatrix<f64>,
    b2: DVector<f64>,
}

impl Network {
    pub fn n_params(&self) -> usize {
        self.hidden * self.inputs + self.hidden + self.outputs * self.hidden + self.outputs
    }

    fn unpack(&self, p: &[f64]) -> Layers {
        let (i, h, o) = (self.inputs, self.hidden, self.outputs);
        let (w1, rest) = p.split_at(h * i);
        let (b1, rest) = rest.split_at(h);
        let (w2, b2) = rest.split_at(o * h);
        Layers {
            w1: DMatrix::from_row_slice(h, i, w1),
            b1: DVector::from_column_slice(b1),
            w2: DMatrix::from_row_slice(o, h, w2),
            b2: DVector::from_column_slice(b2),
        }
    }

    /// Hidden and output activations for a batch `x` (one sample per row).
    fn forward_batch(&self, l: &Layers, x: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let mut h = x * l.w1.transpose();
        for mut row in h.row_iter_mut() {
            row += l.b1.transpose();
        }
        h.apply(|v| *v = v.tanh());
        let mut y = &h * l.w2.transpose();
        for mut row in y.row_iter_mut() {
            row += l.b2.transpose();
        }
        y.apply(|v| *v = v.tanh());
        (h, y)
    }

    pub fn forward(&self, params: &[f64], x: &[f64]) -> Vec<f64> {
        let l = self.unpack(params);
        let (_, y) = self.forward_batch(&l, &DMatrix::from_row_slice(1, x.len(), x));
        y.iter().copied().collect()
    }

    pub fn loss(&self, params: &[f64], batch: &MlpBatch, gamma: f64) -> f64 {
        let l = self.unpack(params);
        let (_, y) = self.forward_batch(&l, &batch.inputs);
        let mse = (y - &batch.targets).norm_squared() / batch.targets.len() as f64;
        let reg = params.iter().map(|w| w * w).sum::<f64>() / params.len() as f64;
        gamma * mse + (1.0 - gamma) * reg
    }

    /// Loss and its analytic gradient by backpropagation.
    pub fn loss_and_grad(&self, params: &[f64], batch: &MlpBatch, gamma: f64) -> (f64, Vec<f64>) {
        let l = self.unpack(params);
        let x = &batch.inputs;
        let (h, y) = self.forward_batch(&l, x);
        let err = &y - &batch.targets;
        let n_out = batch.targets.len() as f64;
        let n_par = params.len() as f64;
        let mse = err.norm_squared() / n_out;
        let reg = params.iter().map(|w| w * w).sum::<f64>() / n_par;

        // dL/d(pre-activation) at the output layer.
        let d2 = err.zip_map(&y, |e, a| gamma * 2.0 * e / n_out * (1.0 - a * a));
        let g_w2 = d2.transpose() * &h;
        let g_b2 = d2.row_sum();
        let d1 = (&d2 * &l.w2).zip_map(&h, |g, a| g * (1.0 - a * a));
        let g_w1 = d1.transpose() * x;
        let g_b1 = d1.row_sum();

        let mut grad = Vec::with_capacity(params.len());
        grad.extend(g_w1.transpose().iter());
        grad.extend(g_b1.iter());
        grad.extend(g_w2.transpose().iter());
        grad.extend(g_b2.iter());
        let decay = (1.0 - gamma) * 2.0 / n_par;
        for (g, w) in grad.iter_mut().zip(params) {
            *g += decay * w;
        }
        (gamma * mse + (1.0 - gamma) * reg, grad)
    }
}

/// Normalized gallery inputs with +-1 one-of-S targets.
#[derive(Debug, Clone)]
pub struct MlpBatch {
    pub inputs: DMatrix<f64>,
    pub targets: DMatrix<f64>,
}

impl MlpBatch {
    pub fn new(inputs: DMatrix<f64>, targets: DMatrix<f64>) -> Result<Self> {
        if inputs.nrows() != targets.nrows() || inputs.nrows() == 0 {
            return Err(Error::arg("batch inputs and targets need matching nonzero rows"));
        }
        Ok(MlpBatch { inputs, targets })
    }

    pub fn from_gallery(gallery: &Gallery, normalizer: &Normalizer) -> Result<Self> {
        let rows = gallery
            .vectors()
            .iter()
            .map(|v| normalizer.apply(&v.coeffs))
            .collect::<Result<Vec<_>>>()?;
        let dim = gallery.dim();
        let inputs = DMatrix::from_row_iterator(rows.len(), dim, rows.into_iter().flatten());
        let t = gallery.targets();
        let s = gallery.subjects().len();
        let targets = DMatrix::from_row_iterator(t.len(), s, t.into_iter().flatten());
        MlpBatch::new(inputs, targets)
    }
}

struct MseReg<'a> {
    net: Network,
    batch: &'a MlpBatch,
    gamma: f64,
}

impl Objective for MseReg<'_> {
    fn loss_and_grad(&self, w: &[f64]) -> (f64, Vec<f64>) {
        self.net.loss_and_grad(w, self.batch, self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub network: Network,
    pub params: Vec<f64>,
    pub config: MlpConfig,
    pub normalizer: Normalizer,
    pub subjects: Vec<u32>,
    /// Training loss after each epoch.
    pub loss_history: Vec<f64>,
}

fn init_params(net: &Network, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s1 = 1.0 / (net.inputs as f64).sqrt();
    let s2 = 1.0 / (net.hidden as f64).sqrt();
    let n1 = net.hidden * net.inputs + net.hidden;
    (0..net.n_params())
        .map(|k| {
            let scale = if k < n1 { s1 } else { s2 };
            rng.random_range(-0.5..0.5) * scale
        })
        .collect()
}

/// Train one network with an output per gallery subject.
pub fn mlp_train(gallery: &Gallery, cfg: &MlpConfig) -> Result<MlpModel> {
    if !(0.0..=1.0).contains(&cfg.gamma) {
        return Err(Error::arg(format!("gamma must lie in [0, 1], got {}", cfg.gamma)));
    }
    if cfg.hidden == 0 {
        return Err(Error::arg("hidden layer needs at least one neuron"));
    }
    let normalizer = gallery.normalizer(Scaling::ZScore);
    let batch = MlpBatch::from_gallery(gallery, &normalizer)?;
    let network = Network {
        inputs: gallery.dim(),
        hidden: cfg.hidden,
        outputs: gallery.subjects().len(),
    };
    let mut params = init_params(&network, cfg.seed);
    let objective = MseReg {
        net: network,
        batch: &batch,
        gamma: cfg.gamma,
    };
    let scg_cfg = ScgConfig {
        max_epochs: cfg.epochs,
        sigma: cfg.sigma,
        lambda_init: cfg.lambda_init,
        grad_tol: cfg.grad_tol,
    };
    let report = scg::minimize(&objective, &mut params, &scg_cfg)?;
    Ok(MlpModel {
        network,
        params,
        config: *cfg,
        normalizer,
        subjects: gallery.subjects().to_vec(),
        loss_history: report.history,
    })
}

pub fn mlp_scores(model: &MlpModel, probe: &FeatureVector) -> Result<ScoreSet> {
    let x = model.normalizer.apply(&probe.coeffs)?;
    let out = model.network.forward(&model.params, &x);
    ScoreSet::new(out, model.subjects.clone(), Polarity::HigherIsBetter, "mlp")
}

/// Analytic MSEREG gradient of `model` on `batch`, with the model's gamma.
pub fn mlp_gradient(model: &MlpModel, batch: &MlpBatch) -> Vec<f64> {
    model.network.loss_and_grad(&model.params, batch, model.config.gamma).1
}

impl super::Classifier for MlpModel {
    fn scores(&self, probe: &FeatureVector) -> Result<ScoreSet> {
        mlp_scores(self, probe)
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_util::*;
    use super::*;

    fn random_batch(seed: u64, n: usize, i: usize, o: usize) -> MlpBatch {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(n, i, |_, _| rng.random_range(-1.5..1.5));
        let t = DMatrix::from_fn(n, o, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 });
        MlpBatch::new(x, t).unwrap()
    }

    fn central_diff(net: &Network, p: &[f64], b: &MlpBatch, gamma: f64, k: usize) -> f64 {
        let h = 1e-6;
        let mut plus = p.to_vec();
        let mut minus = p.to_vec();
        plus[k] += h;
        minus[k] -= h;
        (net.loss(&plus, b, gamma) - net.loss(&minus, b, gamma)) / (2.0 * h)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let net = Network { inputs: 5, hidden: 4, outputs: 3 };
        let batch = random_batch(41, 7, 5, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let params: Vec<f64> = (0..net.n_params()).map(|_| rng.random_range(-0.8..0.8)).collect();
        for gamma in [0.9, 1.0, 0.3] {
            let (loss, grad) = net.loss_and_grad(&params, &batch, gamma);
            assert_eq!(loss, net.loss(&params, &batch, gamma));
            for k in 0..net.n_params() {
                let fd = central_diff(&net, &params, &batch, gamma, k);
                let rel = (grad[k] - fd).abs() / grad[k].abs().max(fd.abs()).max(1e-8);
                assert!(rel < 1e-5, "gamma {gamma} param {k}: analytic {} fd {fd}", grad[k]);
            }
        }
    }

    #[test]
    fn gamma_limits() {
        let net = Network { inputs: 3, hidden: 2, outputs: 2 };
        let batch = random_batch(43, 4, 3, 2);
        let params: Vec<f64> = (0..net.n_params()).map(|k| 0.1 * k as f64 - 0.5).collect();
        // gamma = 0: only weight decay, gradient 2w/n.
        let (_, g) = net.loss_and_grad(&params, &batch, 0.0);
        let n = params.len() as f64;
        for (gi, w) in g.iter().zip(&params) {
            assert!((gi - 2.0 * w / n).abs() < 1e-15);
        }
        // gamma = 1: plain MSE.
        let l = net.loss(&params, &batch, 1.0);
        let mut mse = 0.0;
        for r in 0..4 {
            let y = net.forward(&params, batch.inputs.row(r).clone_owned().as_slice());
            for c in 0..2 {
                mse += (y[c] - batch.targets[(r, c)]).powi(2);
            }
        }
        assert!((l - mse / 8.0).abs() < 1e-15);
    }

    #[test]
    fn zero_error_batch_has_zero_gradient() {
        let net = Network { inputs: 2, hidden: 3, outputs: 2 };
        let params = vec![0.0; net.n_params()];
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -1.0, 0.5]);
        let batch = MlpBatch::new(x, DMatrix::zeros(2, 2)).unwrap();
        let (loss, g) = net.loss_and_grad(&params, &batch, 1.0);
        assert_eq!(loss, 0.0);
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_weights_output_tanh_bias() {
        let net = Network { inputs: 2, hidden: 2, outputs: 3 };
        let mut params = vec![0.0; net.n_params()];
        let b2 = net.n_params() - 3;
        params[b2..].copy_from_slice(&[0.5, -1.0, 2.0]);
        let y = net.forward(&params, &[3.0, -7.0]);
        assert_eq!(y, vec![0.5f64.tanh(), (-1.0f64).tanh(), 2.0f64.tanh()]);
    }

    /// Full-batch gradient descent on the same objective, as an independent
    /// check that SCG reaches the low-loss region.
    fn gradient_descent(net: &Network, batch: &MlpBatch, mut p: Vec<f64>, steps: usize) -> f64 {
        for _ in 0..steps {
            let (_, g) = net.loss_and_grad(&p, batch, 1.0);
            for (w, gi) in p.iter_mut().zip(&g) {
                *w -= 0.5 * gi;
            }
        }
        net.loss(&p, batch, 1.0)
    }

    #[test]
    fn learns_separable_toy() {
        let g = toy_gallery();
        let cfg = MlpConfig { epochs: 2000, gamma: 1.0, seed: 7, hidden: 4, ..MlpConfig::default() };
        let model = mlp_train(&g, &cfg).unwrap();
        let mse = *model.loss_history.last().unwrap();
        assert!(mse < 1e-3, "final mse {mse}");

        let batch = MlpBatch::from_gallery(&g, &model.normalizer).unwrap();
        let gd = gradient_descent(&model.network, &batch, init_params(&model.network, 7), 20_000);
        assert!(gd < 1e-2, "gradient descent oracle stalled at {gd}");

        for v in g.vectors() {
            let s = mlp_scores(&model, v).unwrap();
            assert_eq!(s.predicted(), v.subject.unwrap());
            let own = s.score_of(v.subject.unwrap()).unwrap();
            assert!(s.scores.iter().filter(|&&x| x != own).all(|&x| x < own));
            assert!(s.scores.iter().all(|x| x.abs() < 1.0));
        }
        assert!(mlp_scores(&model, &fv(&[1.0], 1)).is_err());
    }

    #[test]
    fn training_is_bit_reproducible() {
        let g = toy_gallery();
        let cfg = MlpConfig { epochs: 300, hidden: 3, seed: 11, ..MlpConfig::default() };
        let a = mlp_train(&g, &cfg).unwrap();
        let b = mlp_train(&g, &cfg).unwrap();
        assert_eq!(a, b);
        let c = mlp_train(&g, &MlpConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a.params, c.params);
        let batch = MlpBatch::from_gallery(&g, &a.normalizer).unwrap();
        assert_eq!(mlp_gradient(&a, &batch).len(), a.network.n_params());
    }

    #[test]
    fn rejects_bad_config() {
        let g = toy_gallery();
        assert!(mlp_train(&g, &MlpConfig { gamma: 1.5, ..MlpConfig::default() }).is_err());
        assert!(mlp_train(&g, &MlpConfig { hidden: 0, ..MlpConfig::default() }).is_err());
    }
}
