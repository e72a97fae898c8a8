//! CSV emission with locale-independent, byte-stable number formatting.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// `%.12e`-style scientific notation: 12 fractional digits and a signed
/// two-digit exponent. Dot decimal separator regardless of locale.
pub fn fmt_sci(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.000000000000e+00".to_string();
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponential format");
    let (sign, digits) = match exp.strip_prefix('-') {
        Some(d) => ('-', d),
        None => ('+', exp),
    };
    format!("{mantissa}e{sign}{digits:0>2}")
}

/// Stdout or a file, behind one writer.
pub fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// Writes a single-header CSV; each row is a prebuilt comma-joined line.
pub fn write_csv<W: Write>(
    out: &mut W,
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> io::Result<()> {
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_are_c_style() {
        assert_eq!(fmt_sci(1.5), "1.500000000000e+00");
        assert_eq!(fmt_sci(-0.25), "-2.500000000000e-01");
        assert_eq!(fmt_sci(0.0), "0.000000000000e+00");
        assert_eq!(fmt_sci(-0.0), "0.000000000000e+00");
        assert_eq!(fmt_sci(6.02214076e23), "6.022140760000e+23");
        assert_eq!(fmt_sci(1e-120), "1.000000000000e-120");
    }
}
