//! Reading two-column sample files and flat key=value config files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use mdep_core::SampleSet;

/// A sample read from disk plus the `rho` recorded in its metadata header, if any.
pub struct SampleFile {
    pub sample: SampleSet,
    pub rho: Option<f64>,
}

/// Parses `x,y` rows. Lines starting with `#` are metadata (`# key=value`),
/// blank lines are skipped and a non-numeric first row is taken as a header.
pub fn parse_sample(text: &str) -> Result<SampleFile> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut rho = None;
    let mut seen_row = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((k, v)) = meta.split_once('=') {
                if k.trim() == "rho" {
                    rho = Some(v.trim().parse::<f64>().with_context(|| format!("line {}: bad rho metadata", lineno + 1))?);
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            bail!("line {}: expected 2 columns, found {}", lineno + 1, fields.len());
        }
        let parsed = (fields[0].parse::<f64>(), fields[1].parse::<f64>());
        match parsed {
            (Ok(x), Ok(y)) => {
                if !(x.is_finite() && y.is_finite()) {
                    bail!("line {}: non-finite value", lineno + 1);
                }
                xs.push(x);
                ys.push(y);
            }
            _ if !seen_row => {}
            _ => bail!("line {}: cannot parse '{line}' as two numbers", lineno + 1),
        }
        seen_row = true;
    }
    if xs.is_empty() {
        bail!("no data rows");
    }
    Ok(SampleFile { sample: SampleSet::new(xs, ys)?, rho })
}

pub fn read_sample(path: &Path) -> Result<SampleFile> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_sample(&text).with_context(|| format!("in {}", path.display()))
}

/// `key = value` lines; `#` starts a comment. Keys are normalized to use `_`.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("line {}: expected key=value, got '{line}'", lineno + 1);
        };
        let key = k.trim().replace('-', "_");
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            bail!("line {}: duplicate key '{key}'", lineno + 1);
        }
    }
    Ok(map)
}
