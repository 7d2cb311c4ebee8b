//! Deterministic artifact writers.
//!
//! Every CSV is assembled in memory with `\n` line endings and floats
//! rendered through [`hypalg_core::format_f64`] (17 significant digits),
//! so identical inputs produce identical bytes. Reports carry no
//! timestamps or timings for the same reason.

use std::fs;
use std::path::Path;

use crate::config::{CliResult, Failure};

pub fn fnum(v: f64) -> String {
    hypalg_core::format_f64(v)
}

/// CSV accumulator with a fixed column count.
pub struct Csv {
    columns: usize,
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { columns: header.len(), buf: format!("{}\n", header.join(",")) }
    }

    pub fn row<I, T>(&mut self, fields: I)
    where
        I: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let mut n = 0;
        for (i, field) in fields.into_iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            self.buf.push_str(field.as_ref());
            n += 1;
        }
        debug_assert_eq!(n, self.columns, "row width mismatch");
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

pub fn write_artifact(dir: &Path, name: &str, content: &str) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| {
        Failure::config(format!("cannot create output directory `{}`: {e}", dir.display()))
    })?;
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|e| Failure::config(format!("cannot write `{}`: {e}", path.display())))
}

pub fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::config(format!("cannot serialize `{name}`: {e}")))?;
    text.push('\n');
    write_artifact(dir, name, &text)
}
