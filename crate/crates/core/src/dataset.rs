//! Dataset ingestion from the directory convention (one subdirectory per
//! expression, PGM files inside), deterministic stratified splitting, and
//! the synthetic texture dataset used by end-to-end tests.

use crate::error::{Error, Result};
use crate::expression::Expression;
use crate::image::GrayImage;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};

/// One labeled image file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetEntry {
    pub path: PathBuf,
    pub label: Expression,
}

/// Listing of a dataset directory: every `.pgm` under the six class
/// subdirectories, in canonical class order and lexicographic file order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetManifest {
    pub root: PathBuf,
    pub entries: Vec<DatasetEntry>,
    /// Files that were present but skipped (non-PGM extension).
    pub ignored_files: usize,
}

impl DatasetManifest {
    pub fn per_class_counts(&self) -> [usize; Expression::COUNT] {
        let mut counts = [0usize; Expression::COUNT];
        for e in &self.entries {
            counts[e.label.index()] += 1;
        }
        counts
    }
}

/// Scans `root`, requiring all six class directories to exist. Non-PGM files
/// are ignored but counted.
pub fn scan_dataset(root: &Path) -> Result<DatasetManifest> {
    let mut entries = Vec::new();
    let mut ignored = 0usize;
    for label in Expression::ALL {
        let dir = root.join(label.name());
        if !dir.is_dir() {
            return Err(Error::Dataset(format!(
                "missing class directory {}",
                dir.display()
            )));
        }
        let mut files: Vec<PathBuf> = Vec::new();
        for entry in std::fs::read_dir(&dir)? {
            let entry = entry?;
            let path = entry.path();
            if !entry.file_type()?.is_file() {
                continue;
            }
            let is_pgm = path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
            if is_pgm {
                files.push(path);
            } else {
                ignored += 1;
            }
        }
        files.sort();
        entries.extend(files.into_iter().map(|path| DatasetEntry { path, label }));
    }
    Ok(DatasetManifest {
        root: root.to_path_buf(),
        entries,
        ignored_files: ignored,
    })
}

/// Stratified train/test split with a seeded shuffle: per class,
/// `round(n * test_fraction)` entries (clamped so both sides stay non-empty)
/// go to the test set. The same seed always produces the same split.
pub fn split(
    manifest: &DatasetManifest,
    test_fraction: f64,
    seed: u64,
) -> Result<(DatasetManifest, DatasetManifest)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "test_fraction {test_fraction} not in (0, 1)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for label in Expression::ALL {
        let mut class: Vec<&DatasetEntry> = manifest
            .entries
            .iter()
            .filter(|e| e.label == label)
            .collect();
        if class.len() < 2 {
            return Err(Error::Dataset(format!(
                "class {label} has {} images, need at least 2 to split",
                class.len()
            )));
        }
        class.shuffle(&mut rng);
        let n = class.len();
        let test_n = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
        for (i, entry) in class.into_iter().enumerate() {
            if i < test_n {
                test.push(entry.clone());
            } else {
                train.push(entry.clone());
            }
        }
    }
    let sort_key = |e: &DatasetEntry| (e.label.index(), e.path.clone());
    train.sort_by_key(sort_key);
    test.sort_by_key(sort_key);
    let wrap = |entries: Vec<DatasetEntry>| DatasetManifest {
        root: manifest.root.clone(),
        entries,
        ignored_files: 0,
    };
    Ok((wrap(train), wrap(test)))
}

/// One labeled in-memory image, the unit of the synthetic dataset.
#[derive(Clone, Debug)]
pub struct LabeledImage {
    pub label: Expression,
    pub image: GrayImage,
}

const SYNTH_SIDE: u32 = 40;
const SYNTH_DARK: u8 = 55;
const SYNTH_BRIGHT: u8 = 200;

/// Deterministic 40x40 texture archetype for a class: stripe orientations
/// and frequencies plus a checkerboard, chosen so block LBP histograms
/// separate the classes.
fn archetype(label: Expression, x: u32, y: u32) -> u8 {
    let band = |v: u32, period: u32| -> u8 {
        if (v / period).is_multiple_of(2) {
            SYNTH_BRIGHT
        } else {
            SYNTH_DARK
        }
    };
    match label {
        Expression::Anger => band(y, 5),
        Expression::Disgust => band(x, 5),
        Expression::Fear => band(x + y, 6),
        Expression::Happiness => band(x + (SYNTH_SIDE - 1 - y), 6),
        Expression::Sadness => {
            if ((x / 5) + (y / 5)).is_multiple_of(2) {
                SYNTH_BRIGHT
            } else {
                SYNTH_DARK
            }
        }
        Expression::Surprise => band(y, 2),
    }
}

/// Generates `per_class` noisy copies of each class archetype. Noise is
/// uniform in `[-noise_level, +noise_level]`, clamped to intensity range;
/// the same seed yields a bit-identical dataset.
pub fn synth_dataset(seed: u64, per_class: u32, noise_level: u32) -> Vec<LabeledImage> {
    assert!(per_class >= 1, "per_class must be >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(Expression::COUNT * per_class as usize);
    let noise = noise_level as i32;
    for label in Expression::ALL {
        for _ in 0..per_class {
            let image = GrayImage::from_fn(SYNTH_SIDE, SYNTH_SIDE, |x, y| {
                let base = archetype(label, x, y) as i32;
                let delta = if noise > 0 {
                    rng.random_range(-noise..=noise)
                } else {
                    0
                };
                (base + delta).clamp(0, 255) as u8
            });
            out.push(LabeledImage { label, image });
        }
    }
    out
}
