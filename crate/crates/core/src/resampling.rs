//! SMOTE oversampling of minority classes.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::Label;

/// Identifier of the generator behind every seeded stream in this crate.
pub const RNG_ALGORITHM: &str = "chacha8 (rand_chacha 0.9, seed_from_u64)";

#[derive(Debug, Error, PartialEq)]
pub enum ResampleError {
    #[error("need at least 2 samples, got {0}")]
    TooFewRows(usize),
    #[error("feature matrix has no columns")]
    NoFeatures,
    #[error("{rows} feature rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("class {class} has {count} sample(s); SMOTE needs at least 2")]
    ClassTooSmall { class: Label, count: usize },
    #[error("non-finite feature at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("k_neighbors must be at least 1")]
    ZeroNeighbors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoteParams {
    pub k_neighbors: usize,
    pub seed: u64,
}

impl Default for SmoteParams {
    fn default() -> Self {
        SmoteParams {
            k_neighbors: 5,
            seed: 0,
        }
    }
}

/// How one synthetic row was made: `anchor + u * (neighbor - anchor)`, with
/// both indices pointing into the input rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticOrigin {
    pub anchor: usize,
    pub neighbor: usize,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResampledDataset {
    /// Input rows first, in input order, then synthetic rows.
    pub features: Array2<f64>,
    pub labels: Vec<Label>,
    pub synthetic_mask: Vec<bool>,
    /// One entry per synthetic row, in row order.
    pub provenance: Vec<SyntheticOrigin>,
}

impl ResampledDataset {
    pub fn original_rows(&self) -> usize {
        self.labels.len() - self.provenance.len()
    }
}

/// Balances every class up to the majority count by interpolating between a
/// random class member and one of its k nearest same-class neighbours.
///
/// Classes are processed in ascending label order. When a class has `c`
/// members, `min(k, c - 1)` neighbours are considered; distance ties go to the
/// lower row index.
pub fn smote(
    features: ArrayView2<f64>,
    labels: &[Label],
    params: SmoteParams,
) -> Result<ResampledDataset, ResampleError> {
    let (n, d) = features.dim();
    if n != labels.len() {
        return Err(ResampleError::LengthMismatch {
            rows: n,
            labels: labels.len(),
        });
    }
    if n < 2 {
        return Err(ResampleError::TooFewRows(n));
    }
    if d == 0 {
        return Err(ResampleError::NoFeatures);
    }
    if params.k_neighbors == 0 {
        return Err(ResampleError::ZeroNeighbors);
    }
    if let Some(((row, col), _)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(ResampleError::NonFinite { row, col });
    }

    let mut members: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        members.entry(l).or_default().push(i);
    }
    if let Some((&class, m)) = members.iter().find(|(_, m)| m.len() < 2) {
        return Err(ResampleError::ClassTooSmall { class, count: m.len() });
    }
    let majority = members.values().map(Vec::len).max().unwrap_or(0);

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut provenance = Vec::new();
    let mut synth_labels = Vec::new();

    for (&class, rows) in &members {
        let needed = majority - rows.len();
        if needed == 0 {
            continue;
        }
        let k = params.k_neighbors.min(rows.len() - 1);
        let neighbours: Vec<Vec<usize>> = rows.iter().map(|&i| nearest_in_class(features, i, rows, k)).collect();
        for _ in 0..needed {
            let a = rng.random_range(0..rows.len());
            let anchor = rows[a];
            let neighbor = neighbours[a][rng.random_range(0..k)];
            let u: f64 = rng.random();
            provenance.push(SyntheticOrigin { anchor, neighbor, u });
            synth_labels.push(class);
        }
    }

    let total = n + provenance.len();
    let mut out = Array2::<f64>::zeros((total, d));
    out.slice_mut(ndarray::s![..n, ..]).assign(&features);
    for (r, origin) in provenance.iter().enumerate() {
        let a = features.row(origin.anchor);
        let b = features.row(origin.neighbor);
        let mut row = out.row_mut(n + r);
        for j in 0..d {
            row[j] = a[j] + origin.u * (b[j] - a[j]);
        }
    }

    let mut out_labels = labels.to_vec();
    out_labels.extend(synth_labels);
    let mut mask = vec![false; n];
    mask.resize(total, true);

    Ok(ResampledDataset {
        features: out,
        labels: out_labels,
        synthetic_mask: mask,
        provenance,
    })
}

fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest_in_class(features: ArrayView2<f64>, i: usize, rows: &[usize], k: usize) -> Vec<usize> {
    let xi = features.row(i);
    let mut cand: Vec<(f64, usize)> = rows
        .iter()
        .filter(|&&j| j != i)
        .map(|&j| (sq_dist(xi, features.row(j)), j))
        .collect();
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    cand.truncate(k);
    cand.into_iter().map(|(_, j)| j).collect()
}
