//! Machine-readable emission conventions.
//!
//! Every numeric field written to CSV goes through [`fmt12`]: scientific
//! notation with 12 significant digits, locale-independent, byte-stable for
//! equal inputs.

/// Formats a float with 12 significant digits in scientific notation.
pub fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

/// Joins already-formatted fields into one CSV record.
pub fn csv_line(fields: &[String]) -> String {
    fields.join(",")
}
