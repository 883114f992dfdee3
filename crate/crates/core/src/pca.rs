//! Per-class PCA subspaces and minimum-reconstruction-error classification.
//!
//! Training centers each class's feature vectors, eigendecomposes the small
//! `P x P` Gram matrix instead of the huge `D x D` covariance, and lifts the
//! Gram eigenvectors through the centered data matrix to obtain the class
//! basis. Classification projects a probe onto every class basis and picks
//! the class whose projection residual is smallest.

use crate::error::{Error, Result};
use crate::expression::Expression;
use crate::features::{FeatureConfig, FeatureVector};
use crate::linalg::{dot, jacobi_eigen_sym, norm};

/// Gram eigenvalues at or below `RANK_TOL_REL * mu_max` are treated as zero;
/// if even the largest is at most `RANK_TOL_ABS` the class has rank 0.
/// Discarding them keeps the basis lift (division by the singular value)
/// well conditioned.
const RANK_TOL_REL: f64 = 1e-8;
const RANK_TOL_ABS: f64 = 1e-12;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// One expression class: mean feature vector plus the leading eigenvectors
/// of the class covariance.
#[derive(Clone, Debug)]
pub struct ClassModel {
    pub label: Expression,
    /// Class mean, length D.
    pub mean: Vec<f64>,
    /// Covariance eigenvalues, strictly positive, descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal basis vectors, one per eigenvalue, each length D.
    pub basis: Vec<Vec<f64>>,
    /// The K that was asked for; the kept count may be smaller.
    pub k_requested: usize,
}

impl ClassModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn k_actual(&self) -> usize {
        self.basis.len()
    }
}

/// The six-class ensemble plus the feature geometry it was trained with.
#[derive(Clone, Debug)]
pub struct ExpressionModel {
    /// Exactly six models, in canonical expression order.
    pub classes: Vec<ClassModel>,
    pub feature_config: FeatureConfig,
    pub format_version: u32,
}

impl ExpressionModel {
    pub fn dim(&self) -> usize {
        self.feature_config.feature_dim()
    }
}

/// Per-class reconstruction errors plus the winning label.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassScores {
    /// One residual per class, canonical order.
    pub errors: [f64; Expression::COUNT],
    pub predicted: Expression,
}

/// Trains one class subspace from its feature vectors.
///
/// The mean is subtracted from every sample, the `P x P` Gram matrix of the
/// centered samples is eigendecomposed, and each Gram eigenvector `v` with a
/// non-negligible eigenvalue is lifted to a unit covariance eigenvector
/// `u = A v / |A v|`. At most `min(k, rank)` vectors are kept. Stored
/// eigenvalues are Gram eigenvalues divided by P, matching the
/// `(1/P) A A^T` covariance scaling.
pub fn train_class(label: Expression, samples: &[FeatureVector], k: usize) -> Result<ClassModel> {
    if samples.is_empty() {
        return Err(Error::Dataset(format!("class {label}: no training samples")));
    }
    if k < 1 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    let dim = samples[0].len();
    for (i, s) in samples.iter().enumerate() {
        if s.len() != dim {
            return Err(Error::LengthMismatch {
                context: "training feature vector",
                expected: dim,
                got: samples[i].len(),
            });
        }
    }
    let count = samples.len();

    let mut mean = vec![0.0f64; dim];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(&s.values) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= count as f64;
    }

    // Centered samples, the columns of A.
    let centered: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| s.values.iter().zip(&mean).map(|(v, m)| v - m).collect())
        .collect();

    // Gram matrix G = A^T A, P x P.
    let mut gram = vec![0.0f64; count * count];
    for i in 0..count {
        for j in i..count {
            let g = dot(&centered[i], &centered[j]);
            gram[i * count + j] = g;
            gram[j * count + i] = g;
        }
    }

    let (gram_values, gram_vectors) = jacobi_eigen_sym(&gram, count);
    let mu_max = gram_values.first().copied().unwrap_or(0.0);

    let mut eigenvalues = Vec::new();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    if mu_max > RANK_TOL_ABS {
        for (mu, v) in gram_values.iter().zip(&gram_vectors) {
            if basis.len() >= k || *mu <= RANK_TOL_REL * mu_max {
                break;
            }
            // Lift through A and normalize.
            let mut u = vec![0.0f64; dim];
            for (coef, phi) in v.iter().zip(&centered) {
                for (ui, pi) in u.iter_mut().zip(phi) {
                    *ui += coef * pi;
                }
            }
            let len = norm(&u);
            if len == 0.0 {
                continue;
            }
            for ui in &mut u {
                *ui /= len;
            }
            fix_sign(&mut u);
            eigenvalues.push(mu / count as f64);
            basis.push(u);
        }
    }

    Ok(ClassModel {
        label,
        mean,
        eigenvalues,
        basis,
        k_requested: k,
    })
}

/// Flips a vector so its largest-magnitude component is positive, making
/// the basis orientation deterministic for persistence and tests.
fn fix_sign(u: &mut [f64]) {
    let mut idx = 0;
    let mut best = 0.0f64;
    for (i, &v) in u.iter().enumerate() {
        if v.abs() > best {
            best = v.abs();
            idx = i;
        }
    }
    if u[idx] < 0.0 {
        for v in u.iter_mut() {
            *v = -*v;
        }
    }
}

/// Trains all six classes. `samples_by_class[i]` holds the samples for
/// `Expression::ALL[i]`; every class must be non-empty and every sample must
/// match the feature config's dimension and id.
pub fn train_model(
    samples_by_class: &[Vec<FeatureVector>; Expression::COUNT],
    k: usize,
    cfg: &FeatureConfig,
) -> Result<ExpressionModel> {
    cfg.validate()?;
    let dim = cfg.feature_dim();
    let cfg_id = cfg.id();
    let mut classes = Vec::with_capacity(Expression::COUNT);
    for (label, samples) in Expression::ALL.into_iter().zip(samples_by_class) {
        if samples.is_empty() {
            return Err(Error::Dataset(format!("class {label}: no training samples")));
        }
        for s in samples {
            if s.len() != dim {
                return Err(Error::LengthMismatch {
                    context: "training feature vector",
                    expected: dim,
                    got: s.len(),
                });
            }
            if s.config_id != cfg_id {
                return Err(Error::InvalidConfig(format!(
                    "class {label}: feature vector built with a different feature config"
                )));
            }
        }
        classes.push(train_class(label, samples, k)?);
    }
    Ok(ExpressionModel {
        classes,
        feature_config: cfg.clone(),
        format_version: MODEL_FORMAT_VERSION,
    })
}

/// Weight vector of `gamma` against one class: `W = U^T (gamma - mean)`.
pub fn project(cm: &ClassModel, gamma: &[f64]) -> Result<Vec<f64>> {
    if gamma.len() != cm.dim() {
        return Err(Error::LengthMismatch {
            context: "feature vector",
            expected: cm.dim(),
            got: gamma.len(),
        });
    }
    let centered: Vec<f64> = gamma.iter().zip(&cm.mean).map(|(g, m)| g - m).collect();
    Ok(cm.basis.iter().map(|u| dot(u, &centered)).collect())
}

/// Linear combination of the class basis: `sum_i w_i u_i`.
pub fn reconstruct(cm: &ClassModel, weights: &[f64]) -> Result<Vec<f64>> {
    if weights.len() != cm.k_actual() {
        return Err(Error::LengthMismatch {
            context: "weight vector",
            expected: cm.k_actual(),
            got: weights.len(),
        });
    }
    let mut out = vec![0.0f64; cm.dim()];
    for (w, u) in weights.iter().zip(&cm.basis) {
        for (o, ui) in out.iter_mut().zip(u) {
            *o += w * ui;
        }
    }
    Ok(out)
}

/// Euclidean distance between the centered probe and its orthogonal
/// projection onto the class subspace. With an empty basis this degenerates
/// to the distance from the class mean.
pub fn reconstruction_error(cm: &ClassModel, gamma: &[f64]) -> Result<f64> {
    let weights = project(cm, gamma)?;
    let approx = reconstruct(cm, &weights)?;
    let residual_sq = gamma
        .iter()
        .zip(&cm.mean)
        .zip(&approx)
        .map(|((g, m), a)| {
            let r = (g - m) - a;
            r * r
        })
        .sum::<f64>();
    Ok(residual_sq.sqrt())
}

/// Scores a probe against every class and picks the minimum-error label.
/// Ties break toward the lowest canonical class index.
pub fn classify(model: &ExpressionModel, gamma: &FeatureVector) -> Result<ClassScores> {
    if gamma.config_id != model.feature_config.id() {
        return Err(Error::InvalidConfig(
            "feature vector was built with a different feature config".into(),
        ));
    }
    if gamma.len() != model.dim() {
        return Err(Error::LengthMismatch {
            context: "feature vector",
            expected: model.dim(),
            got: gamma.len(),
        });
    }
    let mut errors = [0.0f64; Expression::COUNT];
    for (slot, cm) in errors.iter_mut().zip(&model.classes) {
        *slot = reconstruction_error(cm, &gamma.values)?;
    }
    let mut best = 0;
    for i in 1..Expression::COUNT {
        if errors[i] < errors[best] {
            best = i;
        }
    }
    Ok(ClassScores {
        errors,
        predicted: Expression::ALL[best],
    })
}
