//! # exprlbp
//!
//! Real-time facial expression classification from grayscale images:
//!
//! 1. **Detect** a frontal face with a Viola-Jones-style Haar cascade
//!    evaluated over integral images ([`detect`], [`cascade`]).
//! 2. **Normalize** the face crop: bilinear resize to a 40x40 working
//!    resolution and bilateral noise filtering ([`preprocess`]).
//! 3. **Describe** it with multi-level block LBP histograms, concatenated
//!    into one feature vector ([`lbp`], [`features`]).
//! 4. **Classify** by projecting the feature vector onto six per-class PCA
//!    subspaces and picking the class with the smallest reconstruction
//!    error ([`pca`]).
//!
//! Models persist as CSV ([`model_csv`]), cascades as JSON ([`cascade`]),
//! and images as binary PGM ([`pgm`]). [`dataset`] and [`eval`] cover
//! directory ingestion, deterministic splits, synthetic data, and
//! confusion-matrix evaluation.
//!
//! Everything here is pure computation on immutable values; all types are
//! `Send + Sync` and safe to share across threads.

pub mod cascade;
pub mod dataset;
pub mod detect;
pub mod error;
pub mod eval;
pub mod expression;
pub mod features;
pub mod image;
pub mod integral;
pub mod lbp;
mod linalg;
pub mod model_csv;
pub mod pca;
pub mod pgm;
pub mod preprocess;

pub use cascade::{load_cascade, HaarCascade};
pub use dataset::{scan_dataset, split, synth_dataset, DatasetManifest, LabeledImage};
pub use detect::{detect_faces, eval_window, group_detections, DetectParams, Detection};
pub use error::{Error, Result};
pub use eval::{evaluate, evaluate_images, train_from_images, ConfusionMatrix, EvalReport, FaceSource};
pub use expression::Expression;
pub use features::{
    block_histogram, block_partition, extract_features, BlockSpec, FeatureConfig, FeatureVector,
};
pub use image::{crop, resize_bilinear, GrayImage, Rect};
pub use integral::IntegralImage;
pub use lbp::{lbp_code, lbp_map, LbpMap};
pub use model_csv::{load_model_csv, save_model_csv};
pub use pca::{
    classify, project, reconstruct, reconstruction_error, train_class, train_model, ClassModel,
    ClassScores, ExpressionModel,
};
pub use pgm::{load_pgm, save_pgm};
pub use preprocess::{bilateral_filter, preprocess_face, BilateralParams, PreprocessConfig};
