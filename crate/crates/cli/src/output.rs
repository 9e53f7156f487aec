//! Report rendering: CSV with fixed 17-significant-digit decimals for
//! byte-reproducible diffs, JSON via serde, and atomic file writes
//! (temporary file plus rename) so partial output never lands.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use varreg_core::ext::ExtReal;

/// Fixed-width scientific rendering: one leading digit plus sixteen
/// fractional digits, 17 significant digits total.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn ext(v: ExtReal) -> String {
    match v.value() {
        Some(f) => num(f),
        None => "inf".to_string(),
    }
}

pub fn ext_json(v: ExtReal) -> serde_json::Value {
    match v.value() {
        Some(f) => serde_json::json!(f),
        None => serde_json::json!("inf"),
    }
}

/// Write atomically: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp: PathBuf = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out")
    ));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Simple CSV assembly; fields never contain commas or quotes here.
pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            lines: vec![header.join(",")],
        }
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) {
        self.lines
            .push(fields.into_iter().collect::<Vec<_>>().join(","));
    }

    pub fn finish(self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(1.0), "1.0000000000000000e0");
        assert_eq!(num(0.5), "5.0000000000000000e-1");
        // 17 significant digits round-trip every f64 exactly
        for v in [-0.257_434_469_219_358_3, 1.8239849754765619, 2f64.powi(-40)] {
            let rendered = num(v);
            assert_eq!(rendered.parse::<f64>().unwrap(), v, "{rendered}");
        }
    }

    #[test]
    fn csv_shape() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.row([num(1.0), "x".to_string()]);
        assert_eq!(csv.finish(), "a,b\n1.0000000000000000e0,x\n");
    }
}
