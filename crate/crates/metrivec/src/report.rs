//! Report envelopes and the CSV table writers.
//!
//! Every emitted report embeds its full configuration, the seed and the
//! artifact version; identical `(config, seed)` pairs produce
//! byte-identical output. Floats print in Rust's shortest round-trip
//! form, so no value is rounded beyond its own representation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integration::LevelRow;
use crate::oscillation::GridClassRow;
use crate::spaces::VectorValue;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Wraps a report with provenance for emission.
#[derive(Clone, Debug, Serialize)]
pub struct Envelope<C: Serialize, R: Serialize> {
    pub artifact_version: &'static str,
    pub command: String,
    pub config: C,
    pub report: R,
}

impl<C: Serialize, R: Serialize> Envelope<C, R> {
    pub fn new(command: &str, config: C, report: R) -> Envelope<C, R> {
        Envelope { artifact_version: ARTIFACT_VERSION, command: command.to_string(), config, report }
    }
}

/// Deterministic pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Parse(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Convergence table: `mesh,worst_separation,samples`.
pub fn convergence_csv(levels: &[LevelRow]) -> String {
    let mut out = String::from("mesh,worst_separation,samples\n");
    for row in levels {
        out.push_str(&format!("{},{},{}\n", row.mesh, row.worst_separation, row.samples));
    }
    out
}

/// Grid classification table: `t,omega_estimate,class`.
pub fn grid_csv(rows: &[GridClassRow]) -> String {
    let mut out = String::from("t,omega_estimate,class\n");
    for row in rows {
        out.push_str(&format!("{},{},{}\n", row.t, row.omega_estimate, row.class));
    }
    out
}

/// Primitive table: `t,coord_1..coord_k,converged`. Coordinate
/// backends only.
pub fn primitive_csv(table: &crate::calculus::PrimitiveTable) -> Result<String> {
    let width = match table.values.first() {
        Some(VectorValue::Dense(v)) | Some(VectorValue::Prefix(v)) => v.len(),
        Some(VectorValue::Sparse(_)) => {
            return Err(Error::Capability("primitive CSV needs a coordinate backend".into()))
        }
        None => 0,
    };
    let mut out = String::from("t");
    for i in 1..=width {
        out.push_str(&format!(",coord_{i}"));
    }
    out.push_str(",converged\n");
    for (j, t) in table.grid.iter().enumerate() {
        out.push_str(&format!("{t}"));
        match &table.values[j] {
            VectorValue::Dense(v) | VectorValue::Prefix(v) => {
                for c in v {
                    out.push_str(&format!(",{c}"));
                }
            }
            VectorValue::Sparse(_) => unreachable!(),
        }
        out.push_str(&format!(",{}\n", table.converged[j]));
    }
    Ok(out)
}

/// Atlas table: one row per `(function, space)` cell.
pub fn atlas_csv(cells: &[crate::atlas::AtlasCell]) -> String {
    let mut out = String::from(
        "function,space,bounded,darboux_passed,darboux_final,tag_separation_n64,measure_lower,measure_upper,coherent,annotations\n",
    );
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            c.function,
            c.space,
            c.bounded,
            c.darboux_passed,
            c.darboux_final,
            c.tag_separation_n64.map(|v| v.to_string()).unwrap_or_default(),
            c.measure_lower,
            c.measure_upper,
            c.coherent,
            c.annotations.join(";"),
        ));
    }
    out
}

/// Oscillation profiles flattened for plotting: `target,value,estimate`.
pub fn profiles_csv(profiles: &[crate::oscillation::OscillationProfile]) -> String {
    let mut out = String::from("target,at,estimate\n");
    for p in profiles {
        let (kind, at) = match &p.target {
            crate::oscillation::OscTarget::Interval { lo, hi } => ("interval".to_string(), format!("{lo}..{hi}")),
            crate::oscillation::OscTarget::Partition { intervals, .. } => ("partition".to_string(), intervals.to_string()),
            crate::oscillation::OscTarget::Point { t } => ("point".to_string(), t.to_string()),
        };
        out.push_str(&format!("{kind},{at},{}\n", p.estimate));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_embeds_provenance() {
        let env = Envelope::new("integrate", serde_json::json!({"eps": 1e-4}), serde_json::json!({"ok": true}));
        let s = to_json_pretty(&env).unwrap();
        assert!(s.contains("artifact_version"));
        assert!(s.ends_with('\n'));
        // identical inputs, identical bytes
        let s2 = to_json_pretty(&Envelope::new(
            "integrate",
            serde_json::json!({"eps": 1e-4}),
            serde_json::json!({"ok": true}),
        ))
        .unwrap();
        assert_eq!(s, s2);
    }

    #[test]
    fn csv_headers() {
        assert!(convergence_csv(&[]).starts_with("mesh,"));
        assert!(grid_csv(&[]).starts_with("t,"));
    }
}
