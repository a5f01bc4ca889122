use ndarray::{Array2, ArrayView2};

use super::{softmax_rows, sq_dist};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CentroidModel {
    /// K × D class means.
    pub(crate) centroids: Array2<f64>,
}

impl CentroidModel {
    pub(crate) fn fit(x: ArrayView2<f64>, y: &[usize], n_classes: usize) -> Self {
        let mut centroids = Array2::zeros((n_classes, x.ncols()));
        let mut counts = vec![0usize; n_classes];
        for (row, &c) in x.rows().into_iter().zip(y) {
            let mut acc = centroids.row_mut(c);
            acc += &row;
            counts[c] += 1;
        }
        for (mut row, &n) in centroids.rows_mut().into_iter().zip(&counts) {
            row /= n as f64;
        }
        CentroidModel { centroids }
    }

    /// Softmax over negated Euclidean distances to each centroid.
    pub(crate) fn scores(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut out = Array2::zeros((x.nrows(), self.centroids.nrows()));
        for (q, row) in x.rows().into_iter().enumerate() {
            for (c, centroid) in self.centroids.rows().into_iter().enumerate() {
                out[[q, c]] = -sq_dist(row.iter(), centroid.iter()).sqrt();
            }
        }
        softmax_rows(&mut out);
        out
    }
}
