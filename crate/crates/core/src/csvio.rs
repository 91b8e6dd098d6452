//! CSV helpers shared by every file writer.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// 17 significant digits, round-trip exact for `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn writer<P: AsRef<Path>>(path: P, header: &[&str]) -> Result<csv::Writer<File>> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    Ok(w)
}

pub fn writer_from<W: Write>(inner: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(inner);
    w.write_record(header)?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_digits() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }
}
