//! Shared fixtures for the pipeline benchmarks: deterministic faces, a
//! trained model, and a handcrafted detection scene.

use exprlbp::cascade::{HaarCascade, HaarFeature, Stage, WeakClassifier, WeightedRect};
use exprlbp::dataset::synth_dataset;
use exprlbp::eval::train_from_images;
use exprlbp::features::FeatureConfig;
use exprlbp::image::GrayImage;
use exprlbp::pca::ExpressionModel;
use exprlbp::preprocess::PreprocessConfig;

/// One noisy 40x40 face from the synthetic set.
pub fn sample_face() -> GrayImage {
    synth_dataset(21, 1, 10).remove(0).image
}

/// Model trained on the synthetic set with the stock configuration.
pub fn sample_model(per_class: u32, k: usize) -> ExpressionModel {
    let images = synth_dataset(7, per_class, 10);
    train_from_images(
        &images,
        k,
        &FeatureConfig::default(),
        &PreprocessConfig::default(),
    )
    .expect("synthetic training succeeds")
}

/// Dark scene with one bright square for detector benchmarks.
pub fn detection_scene(side: u32) -> GrayImage {
    let lo = side / 3;
    let hi = lo + side / 4;
    GrayImage::from_fn(side, side, |x, y| {
        if (lo..hi).contains(&x) && (lo..hi).contains(&y) {
            220
        } else {
            30
        }
    })
}

/// Two-feature center-surround cascade with zero-sum weights.
pub fn blob_cascade() -> HaarCascade {
    let weak = |rects: Vec<WeightedRect>| WeakClassifier {
        threshold: 0.08,
        left: 0.0,
        right: 1.0,
        feature: HaarFeature { rects },
    };
    HaarCascade {
        base_w: 8,
        base_h: 8,
        stages: vec![Stage {
            threshold: 2.0,
            weak: vec![
                weak(vec![
                    WeightedRect { x: 0, y: 0, w: 8, h: 8, weight: -1.0 },
                    WeightedRect { x: 2, y: 0, w: 4, h: 8, weight: 2.0 },
                ]),
                weak(vec![
                    WeightedRect { x: 0, y: 0, w: 8, h: 8, weight: -1.0 },
                    WeightedRect { x: 0, y: 2, w: 8, h: 4, weight: 2.0 },
                ]),
            ],
        }],
    }
}
