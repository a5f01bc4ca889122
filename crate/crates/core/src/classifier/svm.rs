use ndarray::{Array1, Array2, ArrayView2};

/// One-vs-rest linear SVMs, each minimizing
/// `0.5 * ||w||² + C * mean(max(0, 1 - y (w·x + b)))` by full-batch
/// subgradient descent with a fixed step.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SvmModel {
    /// K × D
    pub(crate) weights: Array2<f64>,
    pub(crate) bias: Array1<f64>,
}

impl SvmModel {
    pub(crate) fn fit(x: ArrayView2<f64>, y: &[usize], n_classes: usize, lr: f64, c: f64, iters: usize) -> Self {
        let (n, d) = x.dim();
        let mut weights = Array2::zeros((n_classes, d));
        let mut bias = Array1::zeros(n_classes);
        let scale = c / n as f64;

        for class in 0..n_classes {
            let target: Vec<f64> = y.iter().map(|&l| if l == class { 1.0 } else { -1.0 }).collect();
            let mut w = Array1::<f64>::zeros(d);
            let mut b = 0.0;
            for _ in 0..iters {
                let margins = x.dot(&w) + b;
                let mut gw = w.clone();
                let mut gb = 0.0;
                for (i, (&m, &t)) in margins.iter().zip(&target).enumerate() {
                    if t * m < 1.0 {
                        gw.scaled_add(-scale * t, &x.row(i));
                        gb -= scale * t;
                    }
                }
                w.scaled_add(-lr, &gw);
                b -= lr * gb;
            }
            weights.row_mut(class).assign(&w);
            bias[class] = b;
        }
        SvmModel { weights, bias }
    }

    pub(crate) fn margins(&self, x: ArrayView2<f64>) -> Array2<f64> {
        x.dot(&self.weights.t()) + &self.bias
    }
}

#[cfg(test)]
mod tests {
    use super::super::{train, Algorithm, AlgorithmSpec};
    use ndarray::array;

    #[test]
    fn separates_two_clusters() {
        let x = array![[0.0, 0.0], [0.5, 0.2], [0.1, 0.4], [5.0, 5.0], [5.5, 4.8], [4.7, 5.2]];
        let y = [-1, -1, -1, 1, 1, 1];
        let m = train(&AlgorithmSpec::new(Algorithm::LinearSvmOvr), x.view(), &y).unwrap();
        assert_eq!(m.predict(x.view()).unwrap(), y.to_vec());
        let s = m.predict_scores(array![[6.0, 6.0]].view()).unwrap();
        assert!(s[[0, 1]] > 0.0 && s[[0, 0]] < 0.0);
    }
}
