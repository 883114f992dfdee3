//! Model persistence as a line-oriented CSV file:
//!
//! ```text
//! exprlbp-model,1
//! config,<face_w>,<face_h>
//! level,<block_h>,<block_w>,<bins>      one line per level, in order
//! class,<label>,<K_actual>,<D>
//! mean,<v1>,...,<vD>
//! eig,<lambda>,<u1>,...,<uD>            K_actual lines, descending lambda
//! ```
//!
//! Class blocks repeat in canonical order. Reals are written with 17
//! significant digits so the round trip is bit-exact.

use crate::error::{Error, Result};
use crate::expression::Expression;
use crate::features::{BlockSpec, FeatureConfig};
use crate::pca::{ClassModel, ExpressionModel, MODEL_FORMAT_VERSION};

const MAGIC: &str = "exprlbp-model";

fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes a model to the CSV format (UTF-8, LF line endings).
pub fn save_model_csv(model: &ExpressionModel) -> Vec<u8> {
    let mut out = String::new();
    out.push_str(&format!("{MAGIC},{}\n", model.format_version));
    let cfg = &model.feature_config;
    out.push_str(&format!("config,{},{}\n", cfg.face_w, cfg.face_h));
    for level in &cfg.levels {
        out.push_str(&format!(
            "level,{},{},{}\n",
            level.block_h, level.block_w, level.bins
        ));
    }
    for cm in &model.classes {
        out.push_str(&format!(
            "class,{},{},{}\n",
            cm.label,
            cm.k_actual(),
            cm.dim()
        ));
        out.push_str("mean");
        for v in &cm.mean {
            out.push(',');
            out.push_str(&fmt_real(*v));
        }
        out.push('\n');
        for (lambda, u) in cm.eigenvalues.iter().zip(&cm.basis) {
            out.push_str("eig,");
            out.push_str(&fmt_real(*lambda));
            for v in u {
                out.push(',');
                out.push_str(&fmt_real(*v));
            }
            out.push('\n');
        }
    }
    out.into_bytes()
}

struct Lines<'a> {
    inner: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        self.inner.next().map(|l| {
            self.line_no += 1;
            (self.line_no, l)
        })
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next().ok_or_else(|| Error::ModelFormat {
            line: self.line_no + 1,
            msg: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::ModelFormat {
        line,
        msg: msg.into(),
    }
}

fn parse_u32(line: usize, field: &str, what: &str) -> Result<u32> {
    field
        .parse::<u32>()
        .map_err(|_| err(line, format!("bad {what}: {field:?}")))
}

fn parse_real(line: usize, field: &str, what: &str) -> Result<f64> {
    let v = field
        .parse::<f64>()
        .map_err(|_| err(line, format!("bad {what}: {field:?}")))?;
    if !v.is_finite() {
        return Err(err(line, format!("non-finite {what}: {field:?}")));
    }
    Ok(v)
}

fn parse_reals(line: usize, fields: &[&str], what: &str) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|f| parse_real(line, f, what))
        .collect()
}

/// Parses a model file, validating structure, class order, and per-row
/// vector lengths. Errors carry the offending line number.
pub fn load_model_csv(bytes: &[u8]) -> Result<ExpressionModel> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| err(1, "model file is not valid UTF-8"))?;
    let mut lines = Lines {
        inner: text.lines(),
        line_no: 0,
    };

    let (line, header) = lines.expect("header")?;
    let mut parts = header.split(',');
    let magic = parts.next().unwrap_or("");
    if magic != MAGIC {
        return Err(err(line, format!("bad magic {magic:?}, expected {MAGIC:?}")));
    }
    let version = parts
        .next()
        .ok_or_else(|| err(line, "missing format version"))?;
    let version = parse_u32(line, version, "format version")?;
    if version != MODEL_FORMAT_VERSION {
        return Err(err(
            line,
            format!("unsupported format version {version}, expected {MODEL_FORMAT_VERSION}"),
        ));
    }

    let (line, config_line) = lines.expect("config line")?;
    let fields: Vec<&str> = config_line.split(',').collect();
    if fields.len() != 3 || fields[0] != "config" {
        return Err(err(line, "expected config,<face_w>,<face_h>"));
    }
    let face_w = parse_u32(line, fields[1], "face_w")?;
    let face_h = parse_u32(line, fields[2], "face_h")?;

    // Level lines run until the first class line.
    let mut levels = Vec::new();
    let mut pending = loop {
        let (line, text) = lines.expect("level or class line")?;
        if text.starts_with("class,") {
            break Some((line, text));
        }
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != 4 || fields[0] != "level" {
            return Err(err(line, "expected level,<block_h>,<block_w>,<bins>"));
        }
        levels.push(BlockSpec::new(
            parse_u32(line, fields[1], "block_h")?,
            parse_u32(line, fields[2], "block_w")?,
            parse_u32(line, fields[3], "bins")?,
        ));
    };
    let feature_config = FeatureConfig {
        face_w,
        face_h,
        levels,
    };
    feature_config
        .validate()
        .map_err(|e| err(2, format!("invalid feature config: {e}")))?;
    let dim = feature_config.feature_dim();

    let mut classes = Vec::with_capacity(Expression::COUNT);
    for expected_label in Expression::ALL {
        let (line, text) = match pending.take() {
            Some(p) => p,
            None => lines.expect("class line")?,
        };
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != 4 || fields[0] != "class" {
            return Err(err(line, "expected class,<label>,<K>,<D>"));
        }
        let label = Expression::from_name(fields[1])
            .ok_or_else(|| err(line, format!("unknown class label {:?}", fields[1])))?;
        if label != expected_label {
            return Err(err(
                line,
                format!("class {label} out of canonical order, expected {expected_label}"),
            ));
        }
        let k_actual = parse_u32(line, fields[2], "K")? as usize;
        let d = parse_u32(line, fields[3], "D")? as usize;
        if d != dim {
            return Err(err(
                line,
                format!("class {label} has D={d}, feature config implies {dim}"),
            ));
        }

        let (line, text) = lines.expect("mean line")?;
        let fields: Vec<&str> = text.split(',').collect();
        if fields.first() != Some(&"mean") {
            return Err(err(line, "expected mean row"));
        }
        if fields.len() != dim + 1 {
            return Err(err(
                line,
                format!("mean row has {} values, expected {dim}", fields.len() - 1),
            ));
        }
        let mean = parse_reals(line, &fields[1..], "mean value")?;

        let mut eigenvalues = Vec::with_capacity(k_actual);
        let mut basis = Vec::with_capacity(k_actual);
        for _ in 0..k_actual {
            let (line, text) = lines.expect("eig line")?;
            let fields: Vec<&str> = text.split(',').collect();
            if fields.first() != Some(&"eig") {
                return Err(err(line, "expected eig row"));
            }
            if fields.len() != dim + 2 {
                return Err(err(
                    line,
                    format!(
                        "eig row has {} values, expected lambda plus {dim}",
                        fields.len() - 1
                    ),
                ));
            }
            let lambda = parse_real(line, fields[1], "eigenvalue")?;
            if lambda <= 0.0 {
                return Err(err(line, format!("eigenvalue {lambda} must be positive")));
            }
            if let Some(&prev) = eigenvalues.last() {
                if lambda > prev {
                    return Err(err(line, "eigenvalues must be in descending order"));
                }
            }
            eigenvalues.push(lambda);
            basis.push(parse_reals(line, &fields[2..], "eigenvector value")?);
        }

        classes.push(ClassModel {
            label,
            mean,
            eigenvalues,
            basis,
            k_requested: k_actual,
        });
    }

    if let Some((line, _)) = lines.next() {
        return Err(err(line, "trailing content after last class block"));
    }

    Ok(ExpressionModel {
        classes,
        feature_config,
        format_version: version,
    })
}
