//! End-to-end acceptance suite. Each test exercises one release criterion at
//! its pinned tolerance and prints a single pass line; run with
//! `cargo test --test acceptance -- --nocapture` to see them.

use exprlbp::cascade::{HaarCascade, HaarFeature, Stage, WeakClassifier, WeightedRect};
use exprlbp::dataset::{synth_dataset, LabeledImage};
use exprlbp::detect::{detect_faces, eval_window, DetectParams};
use exprlbp::eval::{evaluate_images, train_from_images, FaceSource};
use exprlbp::features::{block_partition, extract_features, FeatureConfig, FeatureVector};
use exprlbp::image::{GrayImage, Rect};
use exprlbp::integral::IntegralImage;
use exprlbp::lbp::{lbp_map, NEIGHBOR_OFFSETS};
use exprlbp::model_csv::{load_model_csv, save_model_csv};
use exprlbp::pca::{classify, reconstruction_error, train_class, train_model};
use exprlbp::preprocess::PreprocessConfig;
use exprlbp::Expression;
use std::time::{Duration, Instant};

/// Small deterministic generator so expected values never depend on crate
/// RNG choices.
struct Lcg(u64);

impl Lcg {
    fn new(seed: u64) -> Self {
        Lcg(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(0x1234_5678))
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0
    }

    fn byte(&mut self) -> u8 {
        (self.next_u64() >> 56) as u8
    }

    fn below(&mut self, m: u64) -> u64 {
        (self.next_u64() >> 16) % m
    }

    fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn image(&mut self, w: u32, h: u32) -> GrayImage {
        GrayImage::from_fn(w, h, |_, _| self.byte())
    }
}

#[test]
fn criterion_01_lbp_matches_brute_force_oracle() {
    let start = Instant::now();
    let mut rng = Lcg::new(1);
    for case in 0..1000u32 {
        let w = 8 + (rng.below(9)) as u32;
        let h = 8 + (rng.below(9)) as u32;
        let img = rng.image(w, h);
        let map = lbp_map(&img);
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let center = img.get_clamped(x, y);
                let mut code = 0u32;
                for (n, (dx, dy)) in NEIGHBOR_OFFSETS.iter().enumerate() {
                    if img.get_clamped(x + dx, y + dy) as i32 - center as i32 >= 0 {
                        code += 1 << n;
                    }
                }
                assert_eq!(
                    map.get(x as u32, y as u32),
                    code as u8,
                    "case {case}, pixel ({x},{y})"
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!("[PASS] criterion 01: lbp_map == brute-force oracle on 1000 random images ({elapsed:?})");
}

#[test]
fn criterion_02_lbp_illumination_invariance() {
    let mut rng = Lcg::new(2);
    for case in 0..100u32 {
        let w = 6 + rng.below(11) as u32;
        let h = 6 + rng.below(11) as u32;
        // Keep headroom so adding up to 50 never clips.
        let base = GrayImage::from_fn(w, h, |_, _| rng.byte() % 205);
        let reference = lbp_map(&base);
        for shift in 1..=50u8 {
            let shifted = GrayImage::from_fn(w, h, |x, y| base.get(x, y) + shift);
            assert_eq!(
                lbp_map(&shifted).codes(),
                reference.codes(),
                "case {case}, shift {shift}"
            );
        }
    }
    println!("[PASS] criterion 02: lbp_map invariant under brightness shifts 1..=50");
}

#[test]
fn criterion_03_feature_dimension_and_normalization() {
    let cfg = FeatureConfig::default();
    assert_eq!(cfg.feature_dim(), 608, "36*8 + 20*16 under the partition rule");

    let mut rng = Lcg::new(3);
    for _ in 0..20 {
        let face = rng.image(40, 40);
        let fv = extract_features(&face, &cfg).unwrap();
        assert_eq!(fv.len(), 608);
        let mut offset = 0;
        for level in &cfg.levels {
            for _ in 0..block_partition(cfg.face_w, cfg.face_h, level).len() {
                let sum: f64 = fv.values[offset..offset + level.bins as usize].iter().sum();
                assert!((sum - 1.0).abs() < 1e-12, "segment sum {sum}");
                offset += level.bins as usize;
            }
        }
        assert_eq!(offset, 608);
    }
    println!("[PASS] criterion 03: default feature dimension 608, segments sum to 1 within 1e-12");
}

/// Test-local symmetric eigensolver for the direct covariance route,
/// independent of the crate's implementation.
fn eig_sym_oracle(m: &[f64], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut a = m.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _ in 0..300 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].abs();
            }
        }
        if off < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p * n + q].abs() < 1e-300 {
                    continue;
                }
                let phi = 0.5 * (2.0 * a[p * n + q]).atan2(a[q * n + q] - a[p * n + p]);
                let (s, c) = phi.sin_cos();
                for i in 0..n {
                    let (aip, aiq) = (a[i * n + p], a[i * n + q]);
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let (api, aqi) = (a[p * n + i], a[q * n + i]);
                    a[p * n + i] = c * api - s * aqi;
                    a[q * n + i] = s * api + c * aqi;
                }
                for i in 0..n {
                    let (vip, viq) = (v[i * n + p], v[i * n + q]);
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| (a[k * n + k], (0..n).map(|i| v[i * n + k]).collect()))
        .collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    pairs.into_iter().unzip()
}

fn span_residual(basis: &[Vec<f64>], u: &[f64]) -> f64 {
    let mut r = u.to_vec();
    for b in basis {
        let w: f64 = b.iter().zip(u).map(|(x, y)| x * y).sum();
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri -= w * bi;
        }
    }
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn criterion_04_gram_trick_matches_direct_covariance() {
    let mut rng = Lcg::new(4);
    for case in 0..50u32 {
        let p = 3 + rng.below(8) as usize; // 3..=10
        let d = (p + 1).max(5) + rng.below(10) as usize; // keeps D <= 20, > rank
        let d = d.min(20);
        let samples: Vec<FeatureVector> = (0..p)
            .map(|_| FeatureVector::new((0..d).map(|_| rng.unit() * 4.0 - 2.0).collect(), 0))
            .collect();
        let cm = train_class(Expression::Anger, &samples, p).unwrap();

        // Direct covariance route.
        let mean: Vec<f64> = (0..d)
            .map(|i| samples.iter().map(|s| s.values[i]).sum::<f64>() / p as f64)
            .collect();
        let mut cov = vec![0.0; d * d];
        for s in &samples {
            let phi: Vec<f64> = s.values.iter().zip(&mean).map(|(v, m)| v - m).collect();
            for i in 0..d {
                for j in 0..d {
                    cov[i * d + j] += phi[i] * phi[j] / p as f64;
                }
            }
        }
        let (vals, vecs) = eig_sym_oracle(&cov, d);

        let rank = cm.k_actual();
        assert!(rank < p);
        for (i, (have, want)) in cm.eigenvalues.iter().zip(&vals).enumerate() {
            assert!(
                (have - want).abs() <= 1e-9 * want.abs().max(1e-30),
                "case {case}: eigenvalue {i}: {have} vs {want}"
            );
        }
        let direct: Vec<Vec<f64>> = vecs[..rank].to_vec();
        for (i, u) in cm.basis.iter().enumerate() {
            let r = span_residual(&direct, u);
            assert!(r < 1e-8, "case {case}: lifted vector {i} residual {r}");
        }
        for (i, u) in direct.iter().enumerate() {
            let r = span_residual(&cm.basis, u);
            assert!(r < 1e-8, "case {case}: direct vector {i} residual {r}");
        }
    }
    println!("[PASS] criterion 04: Gram-trick subspaces match direct covariance on 50 instances");
}

#[test]
fn criterion_05_reconstruction_error_properties() {
    let mut rng = Lcg::new(5);

    // e(mean) = 0 and nested-K monotonicity with residual orthogonality.
    let samples: Vec<FeatureVector> = (0..9)
        .map(|_| FeatureVector::new((0..12).map(|_| rng.unit() * 2.0).collect(), 0))
        .collect();
    let full = train_class(Expression::Fear, &samples, 8).unwrap();
    let rank = full.k_actual();
    assert!(reconstruction_error(&full, &full.mean).unwrap() == 0.0);

    let probe: Vec<f64> = (0..12).map(|_| rng.unit() * 2.0).collect();
    let mut previous = f64::INFINITY;
    for k in 1..=rank {
        let cm = train_class(Expression::Fear, &samples, k).unwrap();
        let e = reconstruction_error(&cm, &probe).unwrap();
        assert!(e <= previous + 1e-12, "e_j grew at k={k}");
        previous = e;

        let w = exprlbp::pca::project(&cm, &probe).unwrap();
        let approx = exprlbp::pca::reconstruct(&cm, &w).unwrap();
        let residual: Vec<f64> = probe
            .iter()
            .zip(&cm.mean)
            .zip(&approx)
            .map(|((g, m), a)| (g - m) - a)
            .collect();
        for u in &cm.basis {
            let d: f64 = u.iter().zip(&residual).map(|(a, b)| a * b).sum();
            assert!(d.abs() < 1e-9, "residual not orthogonal at k={k}: {d}");
        }
    }

    // With K_actual = rank, every training sample reconstructs exactly and
    // classifies to its own class; other classes sit far away.
    let cfg = FeatureConfig {
        face_w: 40,
        face_h: 40,
        levels: vec![exprlbp::features::BlockSpec::new(40, 40, 8)],
    };
    let mut by_class: [Vec<FeatureVector>; 6] = Default::default();
    for (c, bucket) in by_class.iter_mut().enumerate() {
        for _ in 0..5 {
            let mut v = vec![0.0f64; 8];
            v[c] = 50.0;
            for x in v.iter_mut() {
                *x += rng.unit();
            }
            bucket.push(FeatureVector::new(v, cfg.id()));
        }
    }
    let model = train_model(&by_class, 4, &cfg).unwrap(); // rank = P-1 = 4
    for (c, bucket) in by_class.iter().enumerate() {
        for sample in bucket {
            let scores = classify(&model, sample).unwrap();
            assert_eq!(scores.predicted, Expression::ALL[c]);
            assert!(
                scores.errors[c].abs() < 1e-9,
                "own-class error {}",
                scores.errors[c]
            );
        }
    }
    println!("[PASS] criterion 05: e(mean)=0, monotone in K, residual orthogonal, training samples at e=0");
}

#[test]
fn criterion_06_integral_image_exact() {
    let mut rng = Lcg::new(6);
    for case in 0..1000u32 {
        let w = 1 + rng.below(24) as u32;
        let h = 1 + rng.below(24) as u32;
        let img = rng.image(w, h);
        let ii = IntegralImage::new(&img);
        let x = rng.below(w as u64) as u32;
        let y = rng.below(h as u64) as u32;
        let rw = rng.below((w - x + 1) as u64) as u32;
        let rh = rng.below((h - y + 1) as u64) as u32;
        let r = Rect::new(x, y, rw, rh);
        let mut naive = 0u64;
        for yy in y..y + rh {
            for xx in x..x + rw {
                naive += img.get(xx, yy) as u64;
            }
        }
        assert_eq!(ii.rect_sum(r).unwrap(), naive, "case {case}, rect {r:?}");
    }
    println!("[PASS] criterion 06: rect_sum exactly equals naive summation on 1000 random rects");
}

fn center_surround_cascade(threshold: f64) -> HaarCascade {
    let weak = |rects: Vec<WeightedRect>| WeakClassifier {
        threshold,
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

#[test]
fn criterion_07_detection_sanity() {
    // Always-pass and always-fail contracts.
    let img = GrayImage::from_fn(16, 16, |x, y| ((x * 11 + y * 29) % 256) as u8);
    let ii = IntegralImage::new(&img);
    let mut pass = center_surround_cascade(-1e30);
    pass.stages[0].threshold = 0.5;
    pass.stages[0].weak.truncate(1);
    let mut fail = pass.clone();
    fail.stages[0].threshold = 1e30;
    for y in 0..=8 {
        for x in 0..=8 {
            let w = Rect::new(x, y, 8, 8);
            assert!(eval_window(&pass, &ii, w).unwrap());
            assert!(!eval_window(&fail, &ii, w).unwrap());
        }
    }
    assert!(detect_faces(&img, &fail, &DetectParams::default()).is_empty());

    // Handcrafted cascade localizes a synthetic bright square within 2 px.
    let scene = GrayImage::from_fn(32, 32, |x, y| {
        if (12..20).contains(&x) && (12..20).contains(&y) {
            220
        } else {
            30
        }
    });
    let params = DetectParams {
        scale_factor: 1.2,
        step: 1,
        min_neighbors: 2,
        min_size: 0,
    };
    let hits = detect_faces(&scene, &center_surround_cascade(0.08), &params);
    assert!(!hits.is_empty(), "no detections on the synthetic target");
    let best = hits.iter().max_by_key(|d| d.neighbors).unwrap();
    let cx = best.rect.x as i64 + best.rect.w as i64 / 2;
    let cy = best.rect.y as i64 + best.rect.h as i64 / 2;
    assert!((cx - 16).abs() <= 2 && (cy - 16).abs() <= 2, "best = {best:?}");

    // Affine intensity invariance for zero-sum-weight features.
    let cascade = center_surround_cascade(0.05);
    for weak in &cascade.stages[0].weak {
        let weighted_area: f64 = weak
            .feature
            .rects
            .iter()
            .map(|r| r.weight * (r.w * r.h) as f64)
            .sum();
        assert_eq!(weighted_area, 0.0);
    }
    let base = GrayImage::from_fn(24, 24, |x, y| (20 + (x * 7 + y * 13 + x * y) % 50) as u8);
    let transformed = GrayImage::from_fn(24, 24, |x, y| (base.get(x, y) as u32 * 3 + 12) as u8);
    let ii_a = IntegralImage::new(&base);
    let ii_b = IntegralImage::new(&transformed);
    for y in (0..=16).step_by(2) {
        for x in (0..=16).step_by(2) {
            let w = Rect::new(x, y, 8, 8);
            assert_eq!(
                eval_window(&cascade, &ii_a, w).unwrap(),
                eval_window(&cascade, &ii_b, w).unwrap(),
                "window {w:?}"
            );
        }
    }
    println!("[PASS] criterion 07: detection contracts, synthetic target within 2 px, affine invariance");
}

fn split_synth(per_class_train: usize, per_class_test: usize) -> (Vec<LabeledImage>, Vec<LabeledImage>) {
    let total = (per_class_train + per_class_test) as u32;
    let all = synth_dataset(7, total, 10);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, labeled) in all.into_iter().enumerate() {
        if i % (total as usize) < per_class_train {
            train.push(labeled);
        } else {
            test.push(labeled);
        }
    }
    (train, test)
}

#[test]
fn criterion_08_end_to_end_accuracy_on_synthetic_data() {
    let start = Instant::now();
    let (train, test) = split_synth(90, 150);
    assert_eq!(train.len(), 540);
    assert_eq!(test.len(), 900);

    let cfg = FeatureConfig::default();
    let pre = PreprocessConfig::default();
    let model = train_from_images(&train, 40, &cfg, &pre).unwrap();
    let report = evaluate_images(&model, &test, &pre, &FaceSource::PreCropped).unwrap();
    assert!(
        report.overall_accuracy >= 0.95,
        "accuracy {} below 0.95",
        report.overall_accuracy
    );

    // Deterministic across runs.
    let model2 = train_from_images(&train, 40, &cfg, &pre).unwrap();
    let report2 = evaluate_images(&model2, &test, &pre, &FaceSource::PreCropped).unwrap();
    assert_eq!(report.confusion, report2.confusion);

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "[PASS] criterion 08: synthetic pipeline accuracy {:.4} >= 0.95, deterministic ({elapsed:?})",
        report.overall_accuracy
    );
}

#[test]
fn criterion_09_model_persistence_round_trip() {
    let (train, _) = split_synth(20, 1);
    let cfg = FeatureConfig::default();
    let pre = PreprocessConfig::default();
    let model = train_from_images(&train, 10, &cfg, &pre).unwrap();
    let loaded = load_model_csv(&save_model_csv(&model)).unwrap();

    let mut rng = Lcg::new(9);
    for case in 0..100u32 {
        let gamma: Vec<f64> = (0..cfg.feature_dim()).map(|_| rng.unit()).collect();
        let fv = FeatureVector::new(gamma, cfg.id());
        let a = classify(&model, &fv).unwrap();
        let b = classify(&loaded, &fv).unwrap();
        assert_eq!(a.predicted, b.predicted, "case {case}");
        for (x, y) in a.errors.iter().zip(&b.errors) {
            assert!((x - y).abs() < 1e-12, "case {case}: {x} vs {y}");
        }
    }
    println!("[PASS] criterion 09: save/load preserves predictions and errors within 1e-12");
}

#[test]
fn criterion_10_classification_latency() {
    let (train, test) = split_synth(30, 5);
    let cfg = FeatureConfig::default();
    let pre = PreprocessConfig::default();
    let model = train_from_images(&train, 40, &cfg, &pre).unwrap();

    // Warm up, then time the preprocess + extract + classify chain.
    let report = evaluate_images(&model, &test, &pre, &FaceSource::PreCropped).unwrap();
    let report = if report.mean_latency > Duration::ZERO {
        evaluate_images(&model, &test, &pre, &FaceSource::PreCropped).unwrap()
    } else {
        report
    };
    let per_image = report.mean_latency;
    assert!(
        per_image <= Duration::from_millis(5),
        "mean latency {per_image:?} exceeds 5 ms"
    );
    println!("[PASS] criterion 10: mean preprocess+extract+classify latency {per_image:?} <= 5 ms");
}
