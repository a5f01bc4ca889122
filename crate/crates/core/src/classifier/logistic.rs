//! Multinomial logistic regression trained by full-batch gradient descent.
//!
//! Objective: mean softmax cross-entropy plus `l2 / 2 * ||W||²` (the bias is
//! not penalized). When a step would increase the objective, the step size is
//! halved until it does not, so the recorded loss never goes up.

use ndarray::{Array1, Array2, ArrayView2, Axis};

use super::{softmax_rows, Hyperparams};

const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub l2: f64,
    pub iterations: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            learning_rate: 0.1,
            l2: 1e-4,
            iterations: 500,
        }
    }
}

impl LogisticParams {
    pub(crate) fn from_hyperparams(hp: &Hyperparams) -> Self {
        LogisticParams {
            learning_rate: hp.get("lr"),
            l2: hp.get("l2"),
            iterations: hp.get("iters") as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    /// K × D
    pub weights: Array2<f64>,
    /// K
    pub bias: Array1<f64>,
}

impl LogisticModel {
    pub fn zeros(n_classes: usize, dim: usize) -> Self {
        LogisticModel {
            weights: Array2::zeros((n_classes, dim)),
            bias: Array1::zeros(n_classes),
        }
    }

    fn logits(&self, x: ArrayView2<f64>) -> Array2<f64> {
        x.dot(&self.weights.t()) + &self.bias
    }

    /// Row-wise class probabilities.
    pub fn probabilities(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut p = self.logits(x);
        softmax_rows(&mut p);
        p
    }
}

/// Objective value with its gradient.
#[derive(Debug, Clone)]
pub struct LossGradient {
    pub loss: f64,
    pub grad_weights: Array2<f64>,
    pub grad_bias: Array1<f64>,
}

/// Regularized cross-entropy.
pub fn loss(model: &LogisticModel, x: ArrayView2<f64>, y: &[usize], l2: f64) -> f64 {
    let logits = model.logits(x);
    let mut total = 0.0;
    for (row, &c) in logits.rows().into_iter().zip(y) {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        total += lse - row[c];
    }
    total / y.len() as f64 + 0.5 * l2 * model.weights.iter().map(|w| w * w).sum::<f64>()
}

/// Analytic gradient of [`loss`].
pub fn loss_and_gradient(model: &LogisticModel, x: ArrayView2<f64>, y: &[usize], l2: f64) -> LossGradient {
    let n = y.len() as f64;
    let mut residual = model.probabilities(x);
    for (mut row, &c) in residual.rows_mut().into_iter().zip(y) {
        row[c] -= 1.0;
    }
    let grad_weights = residual.t().dot(&x) / n + &(&model.weights * l2);
    let grad_bias = residual.sum_axis(Axis(0)) / n;
    LossGradient {
        loss: loss(model, x, y, l2),
        grad_weights,
        grad_bias,
    }
}

#[derive(Debug, Clone)]
pub struct LogisticFit {
    pub model: LogisticModel,
    /// Objective at the start and after every accepted step.
    pub loss_history: Vec<f64>,
}

/// Gradient descent from zero weights for a fixed iteration budget.
pub fn fit(x: ArrayView2<f64>, y: &[usize], n_classes: usize, params: &LogisticParams) -> LogisticFit {
    let mut model = LogisticModel::zeros(n_classes, x.ncols());
    let mut lr = params.learning_rate;
    let mut current = loss_and_gradient(&model, x, y, params.l2);
    let mut history = vec![current.loss];

    'outer: for _ in 0..params.iterations {
        let mut halvings = 0;
        let candidate = loop {
            let cand = LogisticModel {
                weights: &model.weights - &(&current.grad_weights * lr),
                bias: &model.bias - &(&current.grad_bias * lr),
            };
            let l = loss(&cand, x, y, params.l2);
            if l <= current.loss {
                break cand;
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                // no descent available at machine precision
                break 'outer;
            }
            lr *= 0.5;
        };
        model = candidate;
        current = loss_and_gradient(&model, x, y, params.l2);
        history.push(current.loss);
    }

    LogisticFit {
        model,
        loss_history: history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{train, Algorithm, AlgorithmSpec};
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_problem(rng: &mut ChaCha8Rng, n: usize, d: usize, k: usize) -> (Array2<f64>, Vec<usize>, LogisticModel) {
        let x = Array2::from_shape_fn((n, d), |_| rng.random_range(-2.0..2.0));
        let y = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
        let model = LogisticModel {
            weights: Array2::from_shape_fn((k, d), |_| rng.random_range(-1.0..1.0)),
            bias: Array1::from_shape_fn(k, |_| rng.random_range(-1.0..1.0)),
        };
        (x, y, model)
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let h = 1e-5;
        for _ in 0..10 {
            let n = rng.random_range(3..=20);
            let d = rng.random_range(1..=5);
            let k = rng.random_range(2..=3);
            let (x, y, model) = random_problem(&mut rng, n, d, k);
            let l2 = 0.05;
            let g = loss_and_gradient(&model, x.view(), &y, l2);
            for c in 0..k {
                for j in 0..d {
                    let mut plus = model.clone();
                    plus.weights[[c, j]] += h;
                    let mut minus = model.clone();
                    minus.weights[[c, j]] -= h;
                    let fd = (loss(&plus, x.view(), &y, l2) - loss(&minus, x.view(), &y, l2)) / (2.0 * h);
                    let an = g.grad_weights[[c, j]];
                    assert!((fd - an).abs() / fd.abs().max(an.abs()).max(1e-8) < 1e-4);
                }
            }
        }
    }

    #[test]
    fn loss_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (x, y, _) = random_problem(&mut rng, 40, 4, 3);
        // deliberately large step to force halving
        let params = LogisticParams {
            learning_rate: 50.0,
            l2: 1e-3,
            iterations: 200,
        };
        let fit = fit(x.view(), &y, 3, &params);
        assert!(fit.loss_history.len() > 1);
        for w in fit.loss_history.windows(2) {
            assert!(w[1] <= w[0], "{} -> {}", w[0], w[1]);
        }
        assert!(fit.loss_history.last().unwrap() < &fit.loss_history[0]);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let x = array![[0.0, 1.0], [1.0, 0.0], [2.0, 2.0], [3.0, -1.0], [-2.0, 0.5], [0.5, 0.5]];
        let m = train(
            &AlgorithmSpec::new(Algorithm::LogisticRegression),
            x.view(),
            &[0, 1, 2, 1, 0, 2],
        )
        .unwrap();
        let s = m.predict_scores(x.view()).unwrap();
        for row in s.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-9);
        }
    }
}
