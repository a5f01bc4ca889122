use ndarray::{Array2, ArrayView2};

use super::sq_dist;

/// Brute-force k-nearest-neighbour vote over stored (scaled) training points.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct KnnModel {
    pub(crate) k: usize,
    pub(crate) points: Array2<f64>,
    pub(crate) labels: Vec<usize>,
}

impl KnnModel {
    pub(crate) fn fit(x: ArrayView2<f64>, y: &[usize], k: usize) -> Self {
        KnnModel {
            k,
            points: x.to_owned(),
            labels: y.to_vec(),
        }
    }

    /// Neighbour-vote fractions. Distance ties keep the lower training index.
    pub(crate) fn scores(&self, x: ArrayView2<f64>, n_classes: usize) -> Array2<f64> {
        let k = self.k.min(self.labels.len());
        let mut out = Array2::zeros((x.nrows(), n_classes));
        let mut dist: Vec<(f64, usize)> = Vec::with_capacity(self.labels.len());
        for (q, query) in x.rows().into_iter().enumerate() {
            dist.clear();
            dist.extend(
                self.points
                    .rows()
                    .into_iter()
                    .enumerate()
                    .map(|(i, p)| (sq_dist(query.iter(), p.iter()), i)),
            );
            let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < dist.len() {
                dist.select_nth_unstable_by(k - 1, cmp);
            }
            for &(_, i) in &dist[..k] {
                out[[q, self.labels[i]]] += 1.0;
            }
        }
        out.mapv_inplace(|v| v / k as f64);
        out
    }
}
