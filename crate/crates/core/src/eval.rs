//! Model evaluation: runs the classification path over a labeled set,
//! accumulates a confusion matrix, and measures per-image latency of the
//! preprocess + features + classify chain (detection cost, when enabled, is
//! deliberately excluded so the figure describes the classifier itself).

use crate::cascade::HaarCascade;
use crate::dataset::{DatasetManifest, LabeledImage};
use crate::detect::{detect_faces, DetectParams, Detection};
use crate::error::{Error, Result};
use crate::expression::Expression;
use crate::features::extract_features;
use crate::image::Rect;
use crate::pca::{classify, ExpressionModel};
use crate::pgm::load_pgm;
use crate::preprocess::{preprocess_face, PreprocessConfig};
use std::time::{Duration, Instant};

/// Row = true class, column = predicted class, canonical order both ways.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub counts: [[u64; Expression::COUNT]; Expression::COUNT],
}

impl ConfusionMatrix {
    pub fn record(&mut self, truth: Expression, predicted: Expression) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..Expression::COUNT).map(|i| self.counts[i][i]).sum()
    }

    /// Rows scaled to sum to 1; rows with no samples stay all-zero.
    pub fn row_normalized(&self) -> [[f64; Expression::COUNT]; Expression::COUNT] {
        let mut out = [[0.0; Expression::COUNT]; Expression::COUNT];
        for (row, counts) in out.iter_mut().zip(&self.counts) {
            let total: u64 = counts.iter().sum();
            if total > 0 {
                for (o, &c) in row.iter_mut().zip(counts) {
                    *o = c as f64 / total as f64;
                }
            }
        }
        out
    }

    pub fn overall_accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.correct() as f64 / total as f64
        }
    }

    pub fn per_class_accuracy(&self) -> [f64; Expression::COUNT] {
        let mut out = [0.0; Expression::COUNT];
        for (i, (slot, counts)) in out.iter_mut().zip(&self.counts).enumerate() {
            let total: u64 = counts.iter().sum();
            if total > 0 {
                *slot = counts[i] as f64 / total as f64;
            }
        }
        out
    }
}

/// Evaluation result, serializable as a small CSV report.
#[derive(Clone, Debug)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    pub overall_accuracy: f64,
    pub per_class_accuracy: [f64; Expression::COUNT],
    /// Mean preprocess + extract + classify time per image.
    pub mean_latency: Duration,
    /// Images dropped: unreadable files, or no face found in detect mode.
    pub skipped: usize,
}

impl EvalReport {
    /// Header row, six row-normalized confusion rows, then accuracy and
    /// latency rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("expression");
        for e in Expression::ALL {
            out.push(',');
            out.push_str(e.name());
        }
        out.push('\n');
        let normalized = self.confusion.row_normalized();
        for (e, row) in Expression::ALL.into_iter().zip(&normalized) {
            out.push_str(e.name());
            for v in row {
                out.push_str(&format!(",{v:.6}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("overall_accuracy,{:.6}\n", self.overall_accuracy));
        out.push_str(&format!(
            "mean_latency_s,{:.9}\n",
            self.mean_latency.as_secs_f64()
        ));
        out
    }
}

/// Face localization policy during evaluation: trust the file as a cropped
/// face, or run the detector and take the strongest hit.
pub enum FaceSource<'a> {
    PreCropped,
    Detect {
        cascade: &'a HaarCascade,
        params: DetectParams,
    },
}

fn best_detection(detections: &[Detection]) -> Option<Detection> {
    detections
        .iter()
        .copied()
        .max_by_key(|d| (d.neighbors, d.rect.area()))
}

/// Evaluates a model over dataset files. Unreadable images are skipped and
/// counted; an evaluation with zero usable images is an error.
pub fn evaluate(
    model: &ExpressionModel,
    test: &DatasetManifest,
    pre: &PreprocessConfig,
    source: &FaceSource<'_>,
) -> Result<EvalReport> {
    let mut images = Vec::with_capacity(test.entries.len());
    let mut skipped = 0usize;
    for entry in &test.entries {
        let image = std::fs::read(&entry.path)
            .map_err(Error::from)
            .and_then(|bytes| load_pgm(&bytes));
        match image {
            Ok(image) => images.push(LabeledImage {
                label: entry.label,
                image,
            }),
            Err(_) => skipped += 1,
        }
    }
    let mut report = evaluate_images(model, &images, pre, source)?;
    report.skipped += skipped;
    Ok(report)
}

/// Core evaluation loop over in-memory images.
pub fn evaluate_images(
    model: &ExpressionModel,
    images: &[LabeledImage],
    pre: &PreprocessConfig,
    source: &FaceSource<'_>,
) -> Result<EvalReport> {
    if model.feature_config.face_w != pre.face_w || model.feature_config.face_h != pre.face_h {
        return Err(Error::InvalidConfig(format!(
            "model expects {}x{} faces but preprocess produces {}x{}",
            model.feature_config.face_w, model.feature_config.face_h, pre.face_w, pre.face_h
        )));
    }
    let mut confusion = ConfusionMatrix::default();
    let mut total_latency = Duration::ZERO;
    let mut used = 0usize;
    let mut skipped = 0usize;

    for labeled in images {
        let face_rect = match source {
            FaceSource::PreCropped => Rect::new(0, 0, labeled.image.width(), labeled.image.height()),
            FaceSource::Detect { cascade, params } => {
                match best_detection(&detect_faces(&labeled.image, cascade, params)) {
                    Some(d) => d.rect,
                    None => {
                        skipped += 1;
                        continue;
                    }
                }
            }
        };

        let start = Instant::now();
        let face = preprocess_face(&labeled.image, face_rect, pre)?;
        let features = extract_features(&face, &model.feature_config)?;
        let scores = classify(model, &features)?;
        total_latency += start.elapsed();

        confusion.record(labeled.label, scores.predicted);
        used += 1;
    }

    if used == 0 {
        return Err(Error::Dataset("no usable images to evaluate".into()));
    }
    Ok(EvalReport {
        overall_accuracy: confusion.overall_accuracy(),
        per_class_accuracy: confusion.per_class_accuracy(),
        mean_latency: total_latency / used as u32,
        confusion,
        skipped,
    })
}

/// Trains a model straight from labeled images (the library-level core of
/// the train command): preprocess each image as a pre-cropped face, extract
/// features, and fit the per-class subspaces.
pub fn train_from_images(
    images: &[LabeledImage],
    k: usize,
    cfg: &crate::features::FeatureConfig,
    pre: &PreprocessConfig,
) -> Result<ExpressionModel> {
    let mut by_class: [Vec<crate::features::FeatureVector>; Expression::COUNT] =
        Default::default();
    for labeled in images {
        let full = Rect::new(0, 0, labeled.image.width(), labeled.image.height());
        let face = preprocess_face(&labeled.image, full, pre)?;
        by_class[labeled.label.index()].push(extract_features(&face, cfg)?);
    }
    crate::pca::train_model(&by_class, k, cfg)
}
