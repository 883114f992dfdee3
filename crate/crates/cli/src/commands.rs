//! Implementations of the six subcommands.

use crate::config::{
    detect_params, feature_config, preprocess_config, resolve, FileConfig, DEFAULT_BINS,
    DEFAULT_BLOCKS, DEFAULT_FACE_SIZE, DEFAULT_K, DEFAULT_NOISE, DEFAULT_PER_CLASS, DEFAULT_SEED,
};
use crate::review::{self, ReviewRow};
use crate::{
    BilateralFlags, ClassifyArgs, CliError, CliResult, DetectArgs, DetectFlags, EvaluateArgs,
    ExtractFeaturesArgs, FeatureFlags, SynthArgs, TrainArgs,
};
use exprlbp::cascade::HaarCascade;
use exprlbp::dataset::{scan_dataset, synth_dataset};
use exprlbp::detect::{detect_faces, DetectParams, Detection};
use exprlbp::eval::{evaluate as lib_evaluate, FaceSource};
use exprlbp::expression::Expression;
use exprlbp::features::{extract_features as lib_extract_features, FeatureConfig, FeatureVector};
use exprlbp::image::{GrayImage, Rect};
use exprlbp::model_csv::{load_model_csv, save_model_csv};
use exprlbp::pca::{classify as lib_classify, train_model, ExpressionModel};
use exprlbp::pgm::{load_pgm, save_pgm};
use exprlbp::preprocess::{preprocess_face, PreprocessConfig};
use std::path::Path;

fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_image(path: &Path) -> CliResult<GrayImage> {
    let bytes = read_bytes(path)?;
    load_pgm(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> CliResult<ExpressionModel> {
    let bytes = read_bytes(path)?;
    load_model_csv(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_cascade_file(path: &Path) -> CliResult<HaarCascade> {
    let bytes = read_bytes(path)?;
    exprlbp::cascade::load_cascade(&bytes)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn resolved_feature_config(flags: &FeatureFlags, file: &FileConfig) -> CliResult<FeatureConfig> {
    let face_size = resolve(
        flags.face_size.clone(),
        file.face_size.clone(),
        DEFAULT_FACE_SIZE.to_string(),
    );
    let blocks = resolve(
        flags.blocks.clone(),
        file.blocks.clone(),
        DEFAULT_BLOCKS.to_string(),
    );
    let bins = resolve(
        flags.bins.clone(),
        file.bins.clone(),
        DEFAULT_BINS.to_string(),
    );
    feature_config(&face_size, &blocks, &bins)
}

fn resolved_preprocess(
    face_w: u32,
    face_h: u32,
    flags: &BilateralFlags,
    file: &FileConfig,
) -> CliResult<PreprocessConfig> {
    preprocess_config(
        face_w,
        face_h,
        resolve(flags.bilateral_radius, file.bilateral_radius, 2),
        resolve(
            flags.bilateral_sigma_spatial,
            file.bilateral_sigma_spatial,
            2.0,
        ),
        resolve(flags.bilateral_sigma_range, file.bilateral_sigma_range, 25.0),
    )
}

fn resolved_detect(flags: &DetectFlags, file: &FileConfig) -> CliResult<DetectParams> {
    detect_params(
        resolve(flags.scale_factor, file.scale_factor, 1.2),
        resolve(flags.step, file.step, 2),
        resolve(flags.min_neighbors, file.min_neighbors, 3),
        resolve(flags.min_size, file.min_size, 0),
    )
}

fn full_rect(img: &GrayImage) -> Rect {
    Rect::new(0, 0, img.width(), img.height())
}

fn best_detection(detections: &[Detection]) -> Option<Detection> {
    detections
        .iter()
        .copied()
        .max_by_key(|d| (d.neighbors, d.rect.area()))
}

pub fn train(args: TrainArgs, file: &FileConfig) -> CliResult<()> {
    let k = resolve(args.k, file.k, DEFAULT_K);
    if k < 1 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let cfg = resolved_feature_config(&args.features, file)?;
    let pre = resolved_preprocess(cfg.face_w, cfg.face_h, &args.bilateral, file)?;
    let params = resolved_detect(&args.detect, file)?;
    let cascade = args
        .cascade
        .as_deref()
        .map(load_cascade_file)
        .transpose()?;
    let reviewed = args
        .review_manifest
        .as_deref()
        .map(review::load)
        .transpose()?
        .map(|rows| review::kept_by_path(&rows));

    let manifest = scan_dataset(&args.dataset_dir)?;
    if manifest.ignored_files > 0 {
        eprintln!("warning: ignored {} non-PGM files", manifest.ignored_files);
    }

    let mut by_class: [Vec<FeatureVector>; Expression::COUNT] = Default::default();
    let mut skipped = 0usize;
    for entry in &manifest.entries {
        let image = load_image(&entry.path)?;
        let path_key = entry.path.to_string_lossy().to_string();
        let faces: Vec<Rect> = match (&reviewed, &cascade) {
            (Some(map), _) if map.contains_key(&path_key) => map[&path_key].clone(),
            (_, Some(cascade)) => best_detection(&detect_faces(&image, cascade, &params))
                .map(|d| vec![d.rect])
                .unwrap_or_default(),
            _ => vec![full_rect(&image)],
        };
        if faces.is_empty() {
            skipped += 1;
            continue;
        }
        for face in faces {
            let normalized = preprocess_face(&image, face, &pre)?;
            by_class[entry.label.index()].push(lib_extract_features(&normalized, &cfg)?);
        }
    }
    if skipped > 0 {
        eprintln!("warning: skipped {skipped} images with no usable face");
    }

    let model = train_model(&by_class, k, &cfg)?;
    write_bytes(&args.model_out, &save_model_csv(&model))?;

    for (label, cm) in Expression::ALL.into_iter().zip(&model.classes) {
        println!(
            "{label}: {} samples, k_actual {}",
            by_class[label.index()].len(),
            cm.k_actual()
        );
    }
    println!(
        "model written to {} (k {}, dim {})",
        args.model_out.display(),
        k,
        cfg.feature_dim()
    );
    Ok(())
}

pub fn classify(args: ClassifyArgs, file: &FileConfig) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let cfg = &model.feature_config;
    let pre = resolved_preprocess(cfg.face_w, cfg.face_h, &args.bilateral, file)?;
    let image = load_image(&args.image)?;

    let face = match args.cascade.as_deref() {
        Some(path) => {
            let cascade = load_cascade_file(path)?;
            let params = resolved_detect(&args.detect, file)?;
            best_detection(&detect_faces(&image, &cascade, &params))
                .ok_or(CliError::NoFace)?
                .rect
        }
        None => full_rect(&image),
    };

    let normalized = preprocess_face(&image, face, &pre)?;
    let features = lib_extract_features(&normalized, cfg)?;
    let scores = lib_classify(&model, &features)?;

    if args.porcelain {
        let fields: Vec<String> = scores
            .errors
            .iter()
            .map(|e| format!("{e:.16e}"))
            .chain(std::iter::once(scores.predicted.to_string()))
            .collect();
        println!("{}", fields.join(","));
    } else {
        for (label, e) in Expression::ALL.into_iter().zip(&scores.errors) {
            println!("{label}: {e:.6}");
        }
        println!("predicted: {}", scores.predicted);
    }
    Ok(())
}

pub fn evaluate(args: EvaluateArgs, file: &FileConfig) -> CliResult<()> {
    let model = load_model(&args.model)?;
    let cfg = &model.feature_config;
    let pre = resolved_preprocess(cfg.face_w, cfg.face_h, &args.bilateral, file)?;
    let manifest = scan_dataset(&args.dataset_dir)?;

    let cascade = args
        .cascade
        .as_deref()
        .map(load_cascade_file)
        .transpose()?;
    let source = match &cascade {
        Some(cascade) => FaceSource::Detect {
            cascade,
            params: resolved_detect(&args.detect, file)?,
        },
        None => FaceSource::PreCropped,
    };

    let report = lib_evaluate(&model, &manifest, &pre, &source)?;
    if report.skipped > 0 {
        eprintln!("warning: skipped {} images", report.skipped);
    }
    if let Some(path) = &args.report_out {
        write_bytes(path, report.to_csv().as_bytes())?;
    }
    println!("overall_accuracy,{:.6}", report.overall_accuracy);
    println!("mean_latency_s,{:.9}", report.mean_latency.as_secs_f64());
    Ok(())
}

pub fn detect(args: DetectArgs, file: &FileConfig) -> CliResult<()> {
    let image = load_image(&args.image)?;
    let cascade = load_cascade_file(&args.cascade)?;
    let params = resolved_detect(&args.detect, file)?;
    let detections = detect_faces(&image, &cascade, &params);

    for d in &detections {
        println!("{},{},{},{},{}", d.rect.x, d.rect.y, d.rect.w, d.rect.h, d.neighbors);
    }
    if let Some(path) = &args.review_out {
        let rows: Vec<ReviewRow> = detections
            .iter()
            .map(|d| ReviewRow {
                path: args.image.to_string_lossy().to_string(),
                rect: d.rect,
                keep: true,
            })
            .collect();
        write_bytes(path, review::render(&rows).as_bytes())?;
    }
    Ok(())
}

pub fn extract_features(args: ExtractFeaturesArgs, file: &FileConfig) -> CliResult<()> {
    let cfg = resolved_feature_config(&args.features, file)?;
    let pre = resolved_preprocess(cfg.face_w, cfg.face_h, &args.bilateral, file)?;
    for path in &args.images {
        let image = load_image(path)?;
        let normalized = preprocess_face(&image, full_rect(&image), &pre)?;
        let features = lib_extract_features(&normalized, &cfg)?;
        let mut line = path.to_string_lossy().to_string();
        for v in &features.values {
            line.push(',');
            line.push_str(&v.to_string());
        }
        println!("{line}");
    }
    Ok(())
}

pub fn synth(args: SynthArgs, file: &FileConfig) -> CliResult<()> {
    let seed = resolve(args.seed, file.seed, DEFAULT_SEED);
    let per_class = resolve(args.per_class, file.per_class, DEFAULT_PER_CLASS);
    let noise = resolve(args.noise, file.noise, DEFAULT_NOISE);
    if per_class < 1 {
        return Err(CliError::Usage("--per-class must be at least 1".into()));
    }

    let images = synth_dataset(seed, per_class, noise);
    for label in Expression::ALL {
        let dir = args.out.join(label.name());
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    let mut index = [0usize; Expression::COUNT];
    for labeled in &images {
        let i = &mut index[labeled.label.index()];
        let path = args
            .out
            .join(labeled.label.name())
            .join(format!("{i:04}.pgm"));
        write_bytes(&path, &save_pgm(&labeled.image))?;
        *i += 1;
    }
    println!(
        "wrote {} images ({per_class} per class, seed {seed}, noise {noise}) to {}",
        images.len(),
        args.out.display()
    );
    Ok(())
}
