use std::f64::consts::PI;

use ndarray::{Array1, Array2, ArrayView2};

use super::softmax_rows;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct GaussianNb {
    /// K × D
    pub(crate) means: Array2<f64>,
    /// K × D, smoothed, strictly positive
    pub(crate) variances: Array2<f64>,
    pub(crate) log_priors: Array1<f64>,
}

impl GaussianNb {
    /// `var_smoothing` is scaled by the largest per-feature variance of the
    /// whole training set (or used as is when every feature is constant).
    pub(crate) fn fit(x: ArrayView2<f64>, y: &[usize], n_classes: usize, var_smoothing: f64) -> Self {
        let (n, d) = x.dim();
        let max_var = x
            .columns()
            .into_iter()
            .map(|col| {
                let m = col.sum() / n as f64;
                col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64
            })
            .fold(0.0, f64::max);
        let eps = if max_var > 0.0 {
            var_smoothing * max_var
        } else {
            var_smoothing
        };

        let mut counts = vec![0usize; n_classes];
        let mut means = Array2::<f64>::zeros((n_classes, d));
        for (row, &c) in x.rows().into_iter().zip(y) {
            counts[c] += 1;
            let mut m = means.row_mut(c);
            m += &row;
        }
        for (mut m, &cnt) in means.rows_mut().into_iter().zip(&counts) {
            m /= cnt as f64;
        }
        let mut variances = Array2::<f64>::zeros((n_classes, d));
        for (row, &c) in x.rows().into_iter().zip(y) {
            for j in 0..d {
                let diff = row[j] - means[[c, j]];
                variances[[c, j]] += diff * diff;
            }
        }
        for (mut v, &cnt) in variances.rows_mut().into_iter().zip(&counts) {
            v.mapv_inplace(|s| s / cnt as f64 + eps);
        }
        let log_priors = counts.iter().map(|&c| (c as f64 / n as f64).ln()).collect();
        GaussianNb {
            means,
            variances,
            log_priors,
        }
    }

    pub(crate) fn joint_log_likelihood(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let k = self.means.nrows();
        let mut out = Array2::zeros((x.nrows(), k));
        for (q, row) in x.rows().into_iter().enumerate() {
            for c in 0..k {
                let mut ll = self.log_priors[c];
                for (j, &v) in row.iter().enumerate() {
                    let var = self.variances[[c, j]];
                    let diff = v - self.means[[c, j]];
                    ll -= 0.5 * ((2.0 * PI * var).ln() + diff * diff / var);
                }
                out[[q, c]] = ll;
            }
        }
        out
    }

    pub(crate) fn probabilities(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut p = self.joint_log_likelihood(x);
        softmax_rows(&mut p);
        p
    }
}

#[cfg(test)]
mod tests {
    use super::super::{train, Algorithm, AlgorithmSpec};
    use ndarray::{array, Array2};

    #[test]
    fn one_feature_equal_priors_picks_nearer_standardized_mean() {
        // class 0: mean 0, var 1; class 1: mean 4, var 1
        let x = array![[-1.0], [1.0], [3.0], [5.0]];
        let y = [0, 0, 1, 1];
        let m = train(&AlgorithmSpec::new(Algorithm::GaussianNaiveBayes), x.view(), &y).unwrap();
        let q = Array2::from_shape_fn((41, 1), |(i, _)| -2.0 + 0.2 * i as f64);
        let pred = m.predict(q.view()).unwrap();
        for (i, p) in pred.iter().enumerate() {
            let v = q[[i, 0]];
            // equal variances: the decision boundary is the midpoint 2.0
            if (v - 2.0).abs() > 1e-9 {
                assert_eq!(*p, if v < 2.0 { 0 } else { 1 }, "x = {v}");
            }
        }
        let s = m.predict_scores(q.view()).unwrap();
        for row in s.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_feature_stays_finite() {
        let x = array![[1.0, 0.0], [1.0, 0.1], [1.0, 5.0], [1.0, 5.1]];
        let m = train(
            &AlgorithmSpec::new(Algorithm::GaussianNaiveBayes),
            x.view(),
            &[0, 0, 1, 1],
        )
        .unwrap();
        let s = m.predict_scores(x.view()).unwrap();
        assert!(s.iter().all(|v| v.is_finite()));
        assert_eq!(m.predict(x.view()).unwrap(), vec![0, 0, 1, 1]);
    }
}
