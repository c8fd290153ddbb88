//! JSON and CSV emission helpers. JSON for structured results, CSV for
//! plot-ready traces; no binary formats.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Serialise a result to pretty JSON (stable field order comes from the
/// struct definitions and BTree maps).
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, to_json(value)? + "\n")?;
    Ok(())
}

/// Two-column CSV for an `(x, y)` series.
pub fn trace_csv(header: (&str, &str), series: &[(f64, f64)]) -> String {
    let mut out = String::with_capacity(series.len() * 32 + 16);
    out.push_str(header.0);
    out.push(',');
    out.push_str(header.1);
    out.push('\n');
    for (x, y) in series {
        out.push_str(&format!("{x},{y}\n"));
    }
    out
}

pub fn write_trace_csv(header: (&str, &str), series: &[(f64, f64)], path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, trace_csv(header, series))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let csv = trace_csv(("r", "ratio"), &[(1.0, 2.0), (0.5, 4.0)]);
        assert_eq!(csv, "r,ratio\n1,2\n0.5,4\n");
    }
}
