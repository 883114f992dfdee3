//! Cascade classifier description and its JSON document format. Cascades are
//! always loaded from file; training one is out of scope here.

use crate::error::{Error, Result};
use crate::image::Rect;
use serde::{Deserialize, Serialize};

const FORMAT: &str = "exprlbp-cascade-1";

/// One signed-weight rectangle of a Haar-like feature, in base-window
/// coordinates.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedRect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
    pub weight: f64,
}

impl WeightedRect {
    pub fn rect(&self) -> Rect {
        Rect::new(self.x, self.y, self.w, self.h)
    }
}

/// A Haar-like feature: the weighted difference of 2-3 rectangle sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HaarFeature {
    pub rects: Vec<WeightedRect>,
}

/// Decision stump over one feature value with real-valued leaves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakClassifier {
    pub threshold: f64,
    pub left: f64,
    pub right: f64,
    #[serde(rename = "rects")]
    pub feature: HaarFeature,
}

/// One cascade stage: the window passes when the stump outputs sum to at
/// least the stage threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub threshold: f64,
    pub weak: Vec<WeakClassifier>,
}

/// Full detector: base window geometry plus ordered stages. Any stage
/// rejection terminates window evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarCascade {
    pub base_w: u32,
    pub base_h: u32,
    pub stages: Vec<Stage>,
}

#[derive(Serialize, Deserialize)]
struct CascadeDoc {
    format: String,
    base_w: u32,
    base_h: u32,
    stages: Vec<Stage>,
}

fn schema_err(path: String, msg: impl Into<String>) -> Error {
    Error::CascadeSchema {
        path,
        msg: msg.into(),
    }
}

impl HaarCascade {
    /// Semantic validation with the JSON path of the first offending element.
    pub fn validate(&self) -> Result<()> {
        if self.base_w < 4 || self.base_h < 4 {
            return Err(schema_err(
                "base_w/base_h".into(),
                format!("base window {}x{} too small (min 4x4)", self.base_w, self.base_h),
            ));
        }
        if self.stages.is_empty() {
            return Err(schema_err("stages".into(), "at least one stage required"));
        }
        for (si, stage) in self.stages.iter().enumerate() {
            if !stage.threshold.is_finite() {
                return Err(schema_err(
                    format!("stages[{si}].threshold"),
                    "must be finite",
                ));
            }
            if stage.weak.is_empty() {
                return Err(schema_err(
                    format!("stages[{si}].weak"),
                    "stage has no weak classifiers",
                ));
            }
            for (wi, weak) in stage.weak.iter().enumerate() {
                let base = format!("stages[{si}].weak[{wi}]");
                for (name, v) in [
                    ("threshold", weak.threshold),
                    ("left", weak.left),
                    ("right", weak.right),
                ] {
                    if !v.is_finite() {
                        return Err(schema_err(format!("{base}.{name}"), "must be finite"));
                    }
                }
                let n = weak.feature.rects.len();
                if !(2..=3).contains(&n) {
                    return Err(schema_err(
                        format!("{base}.rects"),
                        format!("expected 2-3 rects, found {n}"),
                    ));
                }
                for (ri, r) in weak.feature.rects.iter().enumerate() {
                    let rpath = format!("{base}.rects[{ri}]");
                    if r.w < 1 || r.h < 1 {
                        return Err(schema_err(rpath, "rect must have positive area"));
                    }
                    if !r.rect().within(self.base_w, self.base_h) {
                        return Err(schema_err(
                            rpath,
                            format!(
                                "rect exceeds {}x{} base window",
                                self.base_w, self.base_h
                            ),
                        ));
                    }
                    if !r.weight.is_finite() {
                        return Err(schema_err(format!("{rpath}.weight"), "must be finite"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Emits the JSON document (pretty-printed). Inverse of [`load_cascade`].
    pub fn to_json(&self) -> Vec<u8> {
        let doc = CascadeDoc {
            format: FORMAT.to_string(),
            base_w: self.base_w,
            base_h: self.base_h,
            stages: self.stages.clone(),
        };
        let mut bytes = serde_json::to_vec_pretty(&doc).expect("cascade serializes");
        bytes.push(b'\n');
        bytes
    }
}

/// Parses and validates a cascade JSON document.
pub fn load_cascade(bytes: &[u8]) -> Result<HaarCascade> {
    let doc: CascadeDoc = serde_json::from_slice(bytes)?;
    if doc.format != FORMAT {
        return Err(schema_err(
            "format".into(),
            format!("expected {FORMAT:?}, found {:?}", doc.format),
        ));
    }
    let cascade = HaarCascade {
        base_w: doc.base_w,
        base_h: doc.base_h,
        stages: doc.stages,
    };
    cascade.validate()?;
    Ok(cascade)
}
