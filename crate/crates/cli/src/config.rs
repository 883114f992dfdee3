//! Parameter resolution. Every tunable resolves as: command-line flag,
//! then config-file value, then built-in default (the trained-system
//! parameters: 40x40 faces, 6x6/8-bin plus 8x10/16-bin blocks, K = 40).

use crate::{CliError, CliResult};
use exprlbp::detect::DetectParams;
use exprlbp::features::{BlockSpec, FeatureConfig};
use exprlbp::preprocess::{BilateralParams, PreprocessConfig};
use serde::Deserialize;
use std::path::Path;

pub const DEFAULT_K: usize = 40;
pub const DEFAULT_FACE_SIZE: &str = "40x40";
pub const DEFAULT_BLOCKS: &str = "6x6,8x10";
pub const DEFAULT_BINS: &str = "8,16";
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_PER_CLASS: u32 = 90;
pub const DEFAULT_NOISE: u32 = 10;

/// Optional overrides loaded from a TOML file. Keys mirror the long flag
/// names; unknown keys are rejected so typos surface instead of silently
/// using defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k: Option<usize>,
    pub face_size: Option<String>,
    pub blocks: Option<String>,
    pub bins: Option<String>,
    pub bilateral_radius: Option<u32>,
    pub bilateral_sigma_spatial: Option<f64>,
    pub bilateral_sigma_range: Option<f64>,
    pub scale_factor: Option<f64>,
    pub step: Option<u32>,
    pub min_neighbors: Option<u32>,
    pub min_size: Option<u32>,
    pub seed: Option<u64>,
    pub per_class: Option<u32>,
    pub noise: Option<u32>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<FileConfig> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

pub fn resolve<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

pub fn parse_size(s: &str) -> CliResult<(u32, u32)> {
    let parse = |part: &str| {
        part.parse::<u32>()
            .map_err(|_| CliError::Usage(format!("bad size component {part:?} in {s:?}")))
    };
    match s.split_once('x') {
        Some((w, h)) => Ok((parse(w)?, parse(h)?)),
        None => Err(CliError::Usage(format!(
            "bad size {s:?}, expected WIDTHxHEIGHT"
        ))),
    }
}

fn parse_blocks(s: &str) -> CliResult<Vec<(u32, u32)>> {
    s.split(',')
        .map(|item| {
            let (h, w) = item.split_once('x').ok_or_else(|| {
                CliError::Usage(format!("bad block {item:?}, expected HxW"))
            })?;
            let parse = |p: &str| {
                p.parse::<u32>()
                    .map_err(|_| CliError::Usage(format!("bad block component {p:?}")))
            };
            Ok((parse(h)?, parse(w)?))
        })
        .collect()
}

fn parse_bins(s: &str) -> CliResult<Vec<u32>> {
    s.split(',')
        .map(|item| {
            item.parse::<u32>()
                .map_err(|_| CliError::Usage(format!("bad bin count {item:?}")))
        })
        .collect()
}

/// Builds the feature geometry from resolved flag strings. Block and bin
/// lists pair up by position and must have equal length.
pub fn feature_config(
    face_size: &str,
    blocks: &str,
    bins: &str,
) -> CliResult<FeatureConfig> {
    let (face_w, face_h) = parse_size(face_size)?;
    let blocks = parse_blocks(blocks)?;
    let bins = parse_bins(bins)?;
    if blocks.len() != bins.len() {
        return Err(CliError::Usage(format!(
            "{} block sizes but {} bin counts; the lists pair up by position",
            blocks.len(),
            bins.len()
        )));
    }
    let cfg = FeatureConfig {
        face_w,
        face_h,
        levels: blocks
            .into_iter()
            .zip(bins)
            .map(|((h, w), b)| BlockSpec::new(h, w, b))
            .collect(),
    };
    cfg.validate().map_err(|e| CliError::Data(e.to_string()))?;
    Ok(cfg)
}

pub fn preprocess_config(
    face_w: u32,
    face_h: u32,
    radius: u32,
    sigma_spatial: f64,
    sigma_range: f64,
) -> CliResult<PreprocessConfig> {
    let cfg = PreprocessConfig {
        face_w,
        face_h,
        bilateral: BilateralParams {
            radius,
            sigma_spatial,
            sigma_range,
        },
    };
    cfg.validate().map_err(|e| CliError::Data(e.to_string()))?;
    Ok(cfg)
}

pub fn detect_params(
    scale_factor: f64,
    step: u32,
    min_neighbors: u32,
    min_size: u32,
) -> CliResult<DetectParams> {
    let params = DetectParams {
        scale_factor,
        step,
        min_neighbors,
        min_size,
    };
    params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(params)
}
