//! One-vs-rest linear SVM that predicts a publication year from a topic
//! distribution.
//!
//! Each binary machine minimizes the L2-regularized hinge loss
//! `lambda/2 (|w|^2 + b^2) + mean(max(0, 1 - y (w.x + b)))` with
//! `lambda = 1 / (C n)`. The bias is treated as a weight on a constant
//! feature, so it is regularized too. Optimization is Pegasos: step
//! `1 / (lambda t)`, projection onto the ball of radius `1/sqrt(lambda)`,
//! one seeded shuffle per epoch shared by every machine. Subgradient steps
//! do not decrease the objective monotonically, so each machine keeps the
//! epoch-end iterate with the lowest objective, starting from zero.

mod io;

use thiserror::Error;

use crate::rng;
use crate::textfmt::ParseError;
use crate::topics::TopicDistribution;

pub(crate) use io::read_svm_section;
pub use io::{parse_svm_section, write_svm_section, SVM_HEADER};

#[derive(Debug, Error)]
pub enum SvmError {
    #[error("{features} feature vectors but {labels} labels")]
    LengthMismatch { features: usize, labels: usize },
    #[error("need at least two distinct years to train, found {0:?}")]
    SingleClass(Vec<i32>),
    #[error("C must be positive and finite, got {0}")]
    InvalidC(f64),
    #[error("epochs must be at least 1")]
    NoEpochs,
    #[error("feature dimension {actual} does not match classifier dimension {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("model file {0}")]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            epochs: 100,
            seed: 42,
        }
    }
}

impl AsRef<[f64]> for TopicDistribution {
    fn as_ref(&self) -> &[f64] {
        self.as_slice()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct YearClassifier {
    classes: Vec<i32>,
    dim: usize,
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
    params: SvmParams,
}

impl YearClassifier {
    /// Assembles a classifier from explicit parameters. `classes` must be
    /// strictly increasing with one weight vector and bias each.
    pub fn from_parts(
        classes: Vec<i32>,
        weights: Vec<Vec<f64>>,
        biases: Vec<f64>,
        params: SvmParams,
    ) -> Result<Self, String> {
        if classes.is_empty() {
            return Err("no classes".into());
        }
        if classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err("classes must be strictly increasing".into());
        }
        if weights.len() != classes.len() || biases.len() != classes.len() {
            return Err("one weight vector and one bias per class required".into());
        }
        let dim = weights[0].len();
        if weights.iter().any(|w| w.len() != dim) {
            return Err("weight vectors differ in length".into());
        }
        Ok(Self {
            classes,
            dim,
            weights,
            biases,
            params,
        })
    }

    pub fn classes(&self) -> &[i32] {
        &self.classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn params(&self) -> &SvmParams {
        &self.params
    }

    /// `w_c . x + b_c` for every class, in class order.
    pub fn decision_scores(&self, x: &[f64]) -> Result<Vec<f64>, SvmError> {
        if x.len() != self.dim {
            return Err(SvmError::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| dot(w, x) + b)
            .collect())
    }

    /// Year with the highest score; the earliest year wins ties.
    pub fn predict_year(&self, x: &[f64]) -> Result<i32, SvmError> {
        let scores = self.decision_scores(x)?;
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        Ok(self.classes[best])
    }

    /// Regularized hinge objective of each binary machine on a data set.
    pub fn objectives<F: AsRef<[f64]>>(&self, features: &[F], labels: &[i32]) -> Vec<f64> {
        let lambda = lambda(self.params.c, features.len());
        let xs: Vec<&[f64]> = features.iter().map(AsRef::as_ref).collect();
        self.classes
            .iter()
            .enumerate()
            .map(|(c, &year)| {
                let ys: Vec<f64> = labels
                    .iter()
                    .map(|&l| if l == year { 1.0 } else { -1.0 })
                    .collect();
                objective(&self.weights[c], self.biases[c], &xs, &ys, lambda)
            })
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn lambda(c: f64, n: usize) -> f64 {
    1.0 / (c * n as f64)
}

fn objective(w: &[f64], b: f64, xs: &[&[f64]], ys: &[f64], lambda: f64) -> f64 {
    let reg = 0.5 * lambda * (dot(w, w) + b * b);
    let hinge: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (1.0 - y * (dot(w, x) + b)).max(0.0))
        .sum();
    reg + hinge / xs.len() as f64
}

/// Trains one machine per distinct label. Identical inputs give
/// bit-identical weights.
pub fn train_svm<F: AsRef<[f64]>>(
    features: &[F],
    labels: &[i32],
    params: &SvmParams,
) -> Result<YearClassifier, SvmError> {
    if features.len() != labels.len() {
        return Err(SvmError::LengthMismatch {
            features: features.len(),
            labels: labels.len(),
        });
    }
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(SvmError::InvalidC(params.c));
    }
    if params.epochs == 0 {
        return Err(SvmError::NoEpochs);
    }
    let mut classes: Vec<i32> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(SvmError::SingleClass(classes));
    }
    let xs: Vec<&[f64]> = features.iter().map(AsRef::as_ref).collect();
    let dim = xs[0].len();
    if let Some(x) = xs.iter().find(|x| x.len() != dim) {
        return Err(SvmError::DimensionMismatch {
            expected: dim,
            actual: x.len(),
        });
    }

    let n = xs.len();
    let lambda = lambda(params.c, n);
    let radius = 1.0 / lambda.sqrt();
    let targets: Vec<Vec<f64>> = classes
        .iter()
        .map(|&year| {
            labels
                .iter()
                .map(|&l| if l == year { 1.0 } else { -1.0 })
                .collect()
        })
        .collect();

    let mut rng = rng::seeded(params.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut current: Vec<(Vec<f64>, f64)> = vec![(vec![0.0; dim], 0.0); classes.len()];
    let mut best: Vec<(Vec<f64>, f64, f64)> = targets
        .iter()
        .map(|ys| {
            (
                vec![0.0; dim],
                0.0,
                objective(&vec![0.0; dim], 0.0, &xs, ys, lambda),
            )
        })
        .collect();

    for epoch in 0..params.epochs {
        rng::shuffle(&mut rng, &mut order);
        let t0 = epoch * n;
        for (c, (w, b)) in current.iter_mut().enumerate() {
            let ys = &targets[c];
            for (step, &i) in order.iter().enumerate() {
                let t = (t0 + step + 1) as f64;
                let eta = 1.0 / (lambda * t);
                let margin = ys[i] * (dot(w, xs[i]) + *b);
                let shrink = 1.0 - 1.0 / t;
                w.iter_mut().for_each(|wj| *wj *= shrink);
                *b *= shrink;
                if margin < 1.0 {
                    for (wj, xj) in w.iter_mut().zip(xs[i]) {
                        *wj += eta * ys[i] * xj;
                    }
                    *b += eta * ys[i];
                }
                let norm = (dot(w, w) + *b * *b).sqrt();
                if norm > radius {
                    let s = radius / norm;
                    w.iter_mut().for_each(|wj| *wj *= s);
                    *b *= s;
                }
            }
            let obj = objective(w, *b, &xs, ys, lambda);
            if obj < best[c].2 {
                best[c] = (w.clone(), *b, obj);
            }
        }
    }

    let (weights, biases) = best.into_iter().map(|(w, b, _)| (w, b)).unzip();
    Ok(YearClassifier {
        classes,
        dim,
        weights,
        biases,
        params: params.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Two well separated clusters on the 3-simplex.
    fn separable(n_per: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<i32>) {
        let mut r = rng::seeded(seed);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (year, center) in [(2001, [0.8, 0.1, 0.1]), (2005, [0.1, 0.1, 0.8])] {
            for _ in 0..n_per {
                let jitter = (rng::index(&mut r, 1000) as f64 / 1000.0 - 0.5) * 0.1;
                xs.push(vec![center[0] + jitter, center[1], center[2] - jitter]);
                ys.push(year);
            }
        }
        (xs, ys)
    }

    #[test]
    fn separable_clusters_are_learned() {
        let (xs, ys) = separable(30, 1);
        let clf = train_svm(&xs, &ys, &SvmParams::default()).unwrap();
        assert_eq!(clf.classes(), [2001, 2005]);
        let correct = xs
            .iter()
            .zip(&ys)
            .filter(|(x, y)| clf.predict_year(x).unwrap() == **y)
            .count();
        assert!(correct as f64 / xs.len() as f64 >= 0.95);
        for obj in clf.objectives(&xs, &ys) {
            assert!(obj <= 1.0);
        }
    }

    #[test]
    fn shifted_labels_shift_predictions() {
        let (xs, ys) = separable(20, 2);
        let shifted: Vec<i32> = ys.iter().map(|y| y + 100).collect();
        let a = train_svm(&xs, &ys, &SvmParams::default()).unwrap();
        let b = train_svm(&xs, &shifted, &SvmParams::default()).unwrap();
        assert_eq!(a.weights(), b.weights());
        for x in &xs {
            assert_eq!(a.predict_year(x).unwrap() + 100, b.predict_year(x).unwrap());
        }
    }

    #[test]
    fn input_errors() {
        let p = SvmParams::default();
        let xs = vec![vec![1.0], vec![0.0]];
        assert!(matches!(
            train_svm(&xs, &[1, 2, 3], &p),
            Err(SvmError::LengthMismatch { .. })
        ));
        assert!(matches!(
            train_svm(&xs, &[2000, 2000], &p),
            Err(SvmError::SingleClass(_))
        ));
        let bad_c = SvmParams {
            c: 0.0,
            ..p.clone()
        };
        assert!(matches!(
            train_svm(&xs, &[1, 2], &bad_c),
            Err(SvmError::InvalidC(_))
        ));
        let no_epochs = SvmParams { epochs: 0, ..p };
        assert!(matches!(
            train_svm(&xs, &[1, 2], &no_epochs),
            Err(SvmError::NoEpochs)
        ));
    }

    #[test]
    fn decision_scores_linear_form() {
        let clf = YearClassifier::from_parts(
            vec![1999, 2005],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            vec![1.0, -1.0],
            SvmParams::default(),
        )
        .unwrap();
        assert_eq!(clf.decision_scores(&[0.3, 0.7]).unwrap(), [1.0, -1.0]);
        assert!(matches!(
            clf.decision_scores(&[1.0]),
            Err(SvmError::DimensionMismatch {
                expected: 2,
                actual: 1
            })
        ));

        // hand-checked 2x2 model against an explicit loop
        let clf = YearClassifier::from_parts(
            vec![2000, 2001],
            vec![vec![0.5, -2.0], vec![1.5, 0.25]],
            vec![0.1, -0.3],
            SvmParams::default(),
        )
        .unwrap();
        let x = [0.4, 0.6];
        let mut naive = [0.0; 2];
        for (c, acc) in naive.iter_mut().enumerate() {
            *acc = clf.biases()[c];
            for (w, xj) in clf.weights()[c].iter().zip(x) {
                *acc += w * xj;
            }
        }
        for (s, n) in clf.decision_scores(&x).unwrap().iter().zip(naive) {
            assert!((s - n).abs() < 1e-12);
        }
        let by_hand = [0.2 - 1.2 + 0.1, 0.6 + 0.15 - 0.3];
        for (a, b) in naive.iter().zip(by_hand) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ties_go_to_earliest_year() {
        let clf = YearClassifier::from_parts(
            vec![1999, 2005],
            vec![vec![1.0], vec![1.0]],
            vec![0.0, 0.0],
            SvmParams::default(),
        )
        .unwrap();
        assert_eq!(clf.predict_year(&[0.5]).unwrap(), 1999);
        let single = YearClassifier::from_parts(
            vec![2000],
            vec![vec![0.3]],
            vec![0.0],
            SvmParams::default(),
        )
        .unwrap();
        assert_eq!(single.predict_year(&[7.0]).unwrap(), 2000);
    }

    #[test]
    fn deterministic_weights() {
        let (xs, ys) = separable(15, 3);
        let p = SvmParams {
            epochs: 20,
            ..SvmParams::default()
        };
        let a = train_svm(&xs, &ys, &p).unwrap();
        let b = train_svm(&xs, &ys, &p).unwrap();
        let bits = |c: &YearClassifier| {
            c.weights()
                .iter()
                .flatten()
                .chain(c.biases())
                .map(|x| x.to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
    }

    proptest! {
        #[test]
        fn permuting_coordinates_preserves_scores(
            w in prop::collection::vec(-5.0f64..5.0, 4),
            x in prop::collection::vec(0.0f64..1.0, 4),
            b in -3.0f64..3.0,
        ) {
            let perm = [2usize, 0, 3, 1];
            let clf = YearClassifier::from_parts(vec![1], vec![w.clone()], vec![b], SvmParams::default()).unwrap();
            let pw: Vec<f64> = perm.iter().map(|&i| w[i]).collect();
            let px: Vec<f64> = perm.iter().map(|&i| x[i]).collect();
            let permuted = YearClassifier::from_parts(vec![1], vec![pw], vec![b], SvmParams::default()).unwrap();
            let s = clf.decision_scores(&x).unwrap()[0];
            let ps = permuted.decision_scores(&px).unwrap()[0];
            prop_assert!((s - ps).abs() < 1e-12);
        }

        #[test]
        fn objective_never_exceeds_zero_start(
            rows in prop::collection::vec((prop::collection::vec(0.0f64..1.0, 3), 0i32..4), 2..25),
            seed in 0u64..1000,
        ) {
            let xs: Vec<Vec<f64>> = rows.iter().map(|r| r.0.clone()).collect();
            let ys: Vec<i32> = rows.iter().map(|r| 2000 + r.1).collect();
            let params = SvmParams { epochs: 5, seed, ..SvmParams::default() };
            match train_svm(&xs, &ys, &params) {
                Ok(clf) => {
                    for obj in clf.objectives(&xs, &ys) {
                        // zero weights give exactly mean hinge 1
                        prop_assert!(obj <= 1.0);
                    }
                    for x in &xs {
                        prop_assert!(clf.classes().contains(&clf.predict_year(x).unwrap()));
                    }
                }
                Err(SvmError::SingleClass(_)) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
