//! CSV output: `snr_db,scheme,mean_capacity_bits,std_err,mean_cos2beta,mean_abs_theta,n_trials`,
//! LF line endings, numbers formatted like C's `%.10g`.

use std::io::Write;

use super::ResultRow;
use crate::error::Result;

pub const HEADER: &str =
    "snr_db,scheme,mean_capacity_bits,std_err,mean_cos2beta,mean_abs_theta,n_trials";

/// Formats `x` as C's `%.{precision}g` does.
pub fn format_g(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let p = precision.max(1);
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    // the exponent after rounding to p significant digits decides the style
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn g10(x: f64) -> String {
    format_g(x, 10)
}

/// Writes the header and one line per row.
pub fn write_csv<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    for r in rows {
        let opt = |v: Option<f64>| v.map(g10).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            g10(r.snr_db),
            r.scheme,
            g10(r.mean_capacity),
            g10(r.std_error),
            opt(r.mean_cos2beta),
            opt(r.mean_abs_theta),
            r.n_trials
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}
