//! Plain-text channel statistics: one `key = value` per line, `#` starts a
//! comment, probabilities as decimals in `[0, 1]`.
//!
//! ```text
//! # measured on link 7
//! p000 = 0.9025
//! p001 = 0.0475
//! ...
//! p_plus_minus = 0.05
//! p_minus_plus = 0.05
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::stats::ChannelStatistics;

/// Keys in the order they are written.
pub const KEYS: [&str; 10] = [
    "p000",
    "p001",
    "p010",
    "p011",
    "p100",
    "p101",
    "p110",
    "p111",
    "p_plus_minus",
    "p_minus_plus",
];

/// The ten values as read, before any consistency checks across keys.
pub fn parse_values(text: &str) -> Result<[f64; 10]> {
    let mut values: [Option<f64>; 10] = [None; 10];
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: String| Error::StatsFileSyntax {
            line: line_no,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected 'key = value', found '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| syntax(format!("unknown key '{key}'")))?;
        if values[slot].is_some() {
            return Err(syntax(format!("duplicate key '{key}'")));
        }
        let v: f64 = value
            .parse()
            .map_err(|_| syntax(format!("value '{value}' for '{key}' is not a number")))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(syntax(format!("value {v} for '{key}' is outside [0, 1]")));
        }
        values[slot] = Some(v);
    }
    let mut out = [0.0; 10];
    for (slot, v) in values.iter().enumerate() {
        out[slot] = v.ok_or_else(|| Error::StatsFileMissingKey {
            key: KEYS[slot].to_string(),
        })?;
    }
    Ok(out)
}

/// Parses and validates; with `normalize` each `p_i..` block is rescaled to one.
pub fn parse(text: &str, normalize: bool) -> Result<ChannelStatistics> {
    let v = parse_values(text)?;
    let z = [[[v[0], v[1]], [v[2], v[3]]], [[v[4], v[5]], [v[6], v[7]]]];
    if normalize {
        ChannelStatistics::normalized(z, v[8], v[9])
    } else {
        ChannelStatistics::new(z, v[8], v[9])
    }
}

pub fn read(path: &Path, normalize: bool) -> Result<ChannelStatistics> {
    parse(&std::fs::read_to_string(path)?, normalize)
}

/// Serializes with shortest round-trip decimals, so reading back is exact.
pub fn to_string(stats: &ChannelStatistics) -> String {
    let mut out = String::new();
    for (key, value) in KEYS.iter().zip(stats.to_array()) {
        writeln!(out, "{key} = {value}").expect("writing to a String");
    }
    out
}

pub fn write(path: &Path, stats: &ChannelStatistics, header: &str) -> Result<()> {
    let mut text = String::new();
    for line in header.lines() {
        text.push_str("# ");
        text.push_str(line);
        text.push('\n');
    }
    text.push_str(&to_string(stats));
    std::fs::write(path, text)?;
    Ok(())
}
