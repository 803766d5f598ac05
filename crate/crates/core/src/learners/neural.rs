//! One-hidden-layer network of logistic units trained per sample.
//!
//! The output unit uses the delta-rule update `w + lr * (y - y_hat) * x`
//! with `x` the hidden activation; hidden units receive the usual
//! backpropagated delta `(y - y_hat) * v_j * h_j * (1 - h_j)`.

use super::{logistic, Classifier, Hyperparameters, Standardizer, TrainView};
use crate::rng::SplitMix64;

/// `w + lr * (y - y_hat) * x`.
pub fn weight_update(w: f64, lr: f64, y: f64, y_hat: f64, x: f64) -> f64 {
    w + lr * (y - y_hat) * x
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeuralNet {
    scaler: Standardizer,
    /// `hidden[j][k]`: weight from input `k` to hidden unit `j`.
    pub hidden: Vec<Vec<f64>>,
    pub hidden_bias: Vec<f64>,
    pub output: Vec<f64>,
    pub output_bias: f64,
}

impl NeuralNet {
    /// Weights start uniform in [-0.5, 0.5], drawn in the order: hidden
    /// weights (unit-major), hidden biases, output weights, output bias.
    pub fn fit(view: &TrainView, hp: &Hyperparameters, seed: u64) -> NeuralNet {
        let width = view.width();
        let units = hp.hidden_units.max(1);
        let mut rng = SplitMix64::new(seed);
        let mut init = || rng.uniform(-0.5, 0.5);
        let hidden: Vec<Vec<f64>> = (0..units).map(|_| (0..width).map(|_| init()).collect()).collect();
        let hidden_bias: Vec<f64> = (0..units).map(|_| init()).collect();
        let output: Vec<f64> = (0..units).map(|_| init()).collect();
        let output_bias = init();

        let scaler = Standardizer::fit(&view.x, width);
        let mut net = NeuralNet {
            scaler,
            hidden,
            hidden_bias,
            output,
            output_bias,
        };
        let x: Vec<Vec<f64>> = view.x.iter().map(|r| net.scaler.transform(r)).collect();
        let lr = hp.learning_rate;
        let mut h = vec![0.0; units];
        for _ in 0..hp.nn_epochs {
            let mut order: Vec<usize> = (0..x.len()).collect();
            rng.shuffle(&mut order);
            for i in order {
                let xi = &x[i];
                let y = f64::from(view.y[i]);
                let y_hat = net.forward(xi, &mut h);
                let err = y - y_hat;
                for j in 0..units {
                    let delta = err * net.output[j] * h[j] * (1.0 - h[j]);
                    net.output[j] = weight_update(net.output[j], lr, y, y_hat, h[j]);
                    for (w, xk) in net.hidden[j].iter_mut().zip(xi) {
                        *w += lr * delta * xk;
                    }
                    net.hidden_bias[j] += lr * delta;
                }
                net.output_bias = weight_update(net.output_bias, lr, y, y_hat, 1.0);
            }
        }
        net
    }

    /// Output activation for a standardised input; fills `h` with hidden
    /// activations.
    fn forward(&self, x: &[f64], h: &mut [f64]) -> f64 {
        let mut z = self.output_bias;
        for (j, hj) in h.iter_mut().enumerate() {
            let a = self.hidden_bias[j]
                + self.hidden[j].iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            *hj = logistic(a);
            z += self.output[j] * *hj;
        }
        logistic(z)
    }
}

impl Classifier for NeuralNet {
    fn probability(&self, x: &[f64]) -> f64 {
        let mut h = vec![0.0; self.hidden.len()];
        self.forward(&self.scaler.transform(x), &mut h)
    }

    fn param_count(&self) -> usize {
        let units = self.hidden.len();
        let width = self.hidden.first().map_or(0, Vec::len);
        units * width + units + units + 1
    }
}
