//! CSV and JSON-lines writers.

use std::io::{self, Write};

use crate::runner::BenchRecord;

pub const CSV_HEADER: &str =
    "decoder,L,p,c,eta,alpha,samples,failures,aborts,fail_rate,ci_low,ci_high,mean_sequences,stddev_sequences,seed,wall_time_s";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" | "jsonl" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?}, expected csv or json")),
        }
    }
}

/// C `%.{digits}g`. Non-finite values give an empty string.
pub fn format_g(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return String::new();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn g9(x: f64) -> String {
    format_g(x, 9)
}

pub fn csv_row(r: &BenchRecord) -> String {
    [
        r.decoder.to_string(),
        r.size.to_string(),
        g9(r.p),
        r.c.clone(),
        r.eta.map(g9).unwrap_or_default(),
        r.alpha.map(g9).unwrap_or_default(),
        r.samples.to_string(),
        r.failures.to_string(),
        r.aborts.to_string(),
        g9(r.fail_rate),
        g9(r.ci_low),
        g9(r.ci_high),
        g9(r.mean_sequences),
        g9(r.stddev_sequences),
        r.seed.to_string(),
        g9(r.wall_time_s),
    ]
    .join(",")
}

pub fn write_csv<W: Write + ?Sized>(out: &mut W, records: &[BenchRecord]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", csv_row(r))?;
    }
    Ok(())
}

pub fn write_jsonl<W: Write + ?Sized>(out: &mut W, records: &[BenchRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_records<W: Write + ?Sized>(
    out: &mut W,
    records: &[BenchRecord],
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(out, records),
        Format::Json => write_jsonl(out, records),
    }
}

pub fn to_bytes(records: &[BenchRecord], format: Format) -> Vec<u8> {
    let mut buf = Vec::new();
    write_records(&mut buf, records, format).expect("writing to memory");
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_formatting_matches_printf() {
        let cases = [
            (0.0, "0"),
            (0.05, "0.05"),
            (0.1 + 0.2, "0.3"),
            (1.0 / 3.0, "0.333333333"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001234, "0.0001234"),
            (0.00001234, "1.234e-05"),
            (-2.5, "-2.5"),
            (90.0, "90"),
            (0.999999999951, "1"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g(x, 9), want, "{x}");
        }
        assert_eq!(format_g(f64::NAN, 9), "");
    }

    #[test]
    fn header_has_sixteen_columns() {
        assert_eq!(CSV_HEADER.split(',').count(), 16);
    }
}
