//! Deterministic CSV formatting: 17 significant digits, `.` decimal
//! separator, `\n` line endings.

use std::io::{self, Write};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header row followed by numeric rows.
pub fn write_numeric_csv<W: Write>(mut out: W, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
