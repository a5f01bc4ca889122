//! CART trees (Gini impurity) and a bagged random forest over them.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{argmax_first, Hyperparams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestParams {
    pub trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub bootstrap: bool,
    /// Features tried per split; 0 means floor(sqrt(D)).
    pub max_features: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            trees: 100,
            max_depth: 12,
            min_leaf: 2,
            bootstrap: true,
            max_features: 0,
        }
    }
}

impl ForestParams {
    pub(crate) fn from_hyperparams(hp: &Hyperparams) -> Self {
        ForestParams {
            trees: hp.get("trees") as usize,
            max_depth: hp.get("max_depth") as usize,
            min_leaf: hp.get("min_leaf") as usize,
            bootstrap: hp.get("bootstrap") != 0.0,
            max_features: hp.get("max_features") as usize,
        }
    }

    fn features_per_split(&self, dim: usize) -> usize {
        let m = if self.max_features == 0 {
            (dim as f64).sqrt().floor() as usize
        } else {
            self.max_features
        };
        m.clamp(1, dim.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        class: usize,
    },
}

/// A fitted tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub(crate) nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Class index reached by one row.
    pub fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { class } => return class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    fn fit(
        x: ArrayView2<f64>,
        y: &[usize],
        n_classes: usize,
        sample: Vec<usize>,
        params: &ForestParams,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let mut builder = TreeBuilder {
            x,
            y,
            n_classes,
            params,
            mtry: params.features_per_split(x.ncols()),
            nodes: Vec::new(),
        };
        builder.grow(sample, 0, rng);
        DecisionTree { nodes: builder.nodes }
    }
}

struct TreeBuilder<'a> {
    x: ArrayView2<'a, f64>,
    y: &'a [usize],
    n_classes: usize,
    params: &'a ForestParams,
    mtry: usize,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

impl TreeBuilder<'_> {
    fn class_counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &r in rows {
            counts[self.y[r]] += 1;
        }
        counts
    }

    /// Appends the subtree for `rows` and returns its node index.
    fn grow(&mut self, rows: Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let counts = self.class_counts(&rows);
        let majority = argmax_first(counts.iter().map(|&c| c as f64));
        let parent = gini(&counts, rows.len());

        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { class: majority });

        if parent == 0.0 || depth >= self.params.max_depth || rows.len() < 2 * self.params.min_leaf {
            return id;
        }
        let Some(best) = self.best_split(&rows, parent, rng) else {
            return id;
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.x[[r, best.feature]] <= best.threshold);
        let left = self.grow(left_rows, depth + 1, rng);
        let right = self.grow(right_rows, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    fn best_split(&self, rows: &[usize], parent: f64, rng: &mut ChaCha8Rng) -> Option<BestSplit> {
        let n = rows.len();
        let min_leaf = self.params.min_leaf;
        let total = self.class_counts(rows);
        let mut best: Option<BestSplit> = None;
        let mut order = rows.to_vec();

        for feature in index::sample(rng, self.x.ncols(), self.mtry) {
            order.sort_by(|&a, &b| self.x[[a, feature]].total_cmp(&self.x[[b, feature]]).then(a.cmp(&b)));
            let mut left = vec![0usize; self.n_classes];
            for i in 1..n {
                left[self.y[order[i - 1]]] += 1;
                if i < min_leaf || n - i < min_leaf {
                    continue;
                }
                let lo = self.x[[order[i - 1], feature]];
                let hi = self.x[[order[i], feature]];
                if lo == hi {
                    continue;
                }
                let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
                let impurity = (i as f64 * gini(&left, i) + (n - i) as f64 * gini(&right, n - i)) / n as f64;
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    let mid = lo + (hi - lo) / 2.0;
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some(BestSplit {
                        feature,
                        threshold,
                        impurity,
                    });
                }
            }
        }
        best.filter(|b| b.impurity < parent - 1e-12)
    }
}

/// Bagged ensemble of CART trees; scores are per-tree vote fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub(crate) trees: Vec<DecisionTree>,
}

impl Forest {
    pub fn fit(x: ArrayView2<f64>, y: &[usize], n_classes: usize, params: &ForestParams, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = x.nrows();
        let trees = (0..params.trees)
            .map(|_| {
                let sample = if params.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit(x, y, n_classes, sample, params, &mut rng)
            })
            .collect();
        Forest { trees }
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub(crate) fn vote_fractions(&self, x: ArrayView2<f64>, n_classes: usize) -> Array2<f64> {
        let mut out = Array2::zeros((x.nrows(), n_classes));
        for (q, row) in x.rows().into_iter().enumerate() {
            for t in &self.trees {
                out[[q, t.predict_row(row)]] += 1.0;
            }
        }
        let n = self.trees.len() as f64;
        out.mapv_inplace(|v| v / n);
        out
    }
}
