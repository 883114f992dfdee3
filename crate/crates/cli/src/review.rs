//! Review manifest: the batch replacement for interactively rejecting false
//! detections. `detect --review-out` writes one editable row per detection;
//! a human flips the keep column to 0 for bad boxes (or edits coordinates),
//! and `train --review-manifest` uses the kept rows instead of re-detecting.
//!
//! ```text
//! exprlbp-review,1
//! <path>,<x>,<y>,<w>,<h>,<keep 0|1>
//! ```

use crate::{CliError, CliResult};
use exprlbp::image::Rect;
use std::collections::HashMap;
use std::path::Path;

const MAGIC: &str = "exprlbp-review,1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReviewRow {
    pub path: String,
    pub rect: Rect,
    pub keep: bool,
}

pub fn render(rows: &[ReviewRow]) -> String {
    let mut out = String::from(MAGIC);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.path,
            row.rect.x,
            row.rect.y,
            row.rect.w,
            row.rect.h,
            if row.keep { 1 } else { 0 }
        ));
    }
    out
}

pub fn parse(text: &str) -> CliResult<Vec<ReviewRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim_end() == MAGIC => {}
        _ => {
            return Err(CliError::Data(format!(
                "review manifest: missing {MAGIC:?} header"
            )))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        // Split from the right so paths containing commas survive.
        let mut fields = line.rsplitn(6, ',');
        let err = |what: &str| {
            CliError::Data(format!("review manifest line {}: {what}", idx + 1))
        };
        let keep = fields.next().ok_or_else(|| err("missing keep flag"))?;
        let h = fields.next().ok_or_else(|| err("missing h"))?;
        let w = fields.next().ok_or_else(|| err("missing w"))?;
        let y = fields.next().ok_or_else(|| err("missing y"))?;
        let x = fields.next().ok_or_else(|| err("missing x"))?;
        let path = fields.next().ok_or_else(|| err("missing path"))?;
        let num = |s: &str, what: &str| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| err(&format!("bad {what}: {s:?}")))
        };
        let keep = match keep.trim() {
            "0" => false,
            "1" => true,
            other => return Err(err(&format!("bad keep flag {other:?}, expected 0 or 1"))),
        };
        rows.push(ReviewRow {
            path: path.to_string(),
            rect: Rect::new(num(x, "x")?, num(y, "y")?, num(w, "w")?, num(h, "h")?),
            keep,
        });
    }
    Ok(rows)
}

/// Kept rects grouped by image path.
pub fn kept_by_path(rows: &[ReviewRow]) -> HashMap<String, Vec<Rect>> {
    let mut map: HashMap<String, Vec<Rect>> = HashMap::new();
    for row in rows {
        let entry = map.entry(row.path.clone()).or_default();
        if row.keep {
            entry.push(row.rect);
        }
    }
    map
}

pub fn load(path: &Path) -> CliResult<Vec<ReviewRow>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("review manifest {}: {e}", path.display())))?;
    parse(&text)
}
