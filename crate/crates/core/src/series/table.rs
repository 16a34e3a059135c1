//! Coefficient tables as CSV: header `n,numerator,denominator`, one row per
//! index.

use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Series, SeriesError};
use crate::scalar::Rational;

pub const HEADER: &str = "n,numerator,denominator";

/// Write coefficients `0..=order`.
pub fn write_table(
    series: &Series<Rational>,
    order: usize,
    mut out: impl Write,
) -> std::io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for (n, c) in series.coeffs(order).iter().enumerate() {
        writeln!(out, "{n},{},{}", c.numer(), c.denom())?;
    }
    Ok(())
}

/// Read a table back. Missing indices are zero; rows may come in any order.
pub fn read_table(input: impl BufRead) -> Result<Vec<Rational>, SeriesError> {
    let mut rows: Vec<(usize, Rational)> = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line.map_err(|e| SeriesError::Table(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line == HEADER) {
            continue;
        }
        let bad = |what: &str| SeriesError::Table(format!("line {}: {what}", lineno + 1));
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(bad("expected three fields"));
        }
        let n: usize = fields[0].parse().map_err(|_| bad("bad index"))?;
        let num: BigInt = fields[1].parse().map_err(|_| bad("bad numerator"))?;
        let den: BigInt = fields[2].parse().map_err(|_| bad("bad denominator"))?;
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        rows.push((n, Rational::new(num, den)));
    }
    let len = rows.iter().map(|(n, _)| n + 1).max().unwrap_or(0);
    let mut out = vec![Rational::zero(); len];
    for (n, c) in rows {
        out[n] = c;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn round_trip() {
        let s = Series::sigma_scale(&ratio(1, 2), 0);
        let mut buf = Vec::new();
        write_table(&s, 6, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,numerator,denominator\n0,1,1\n1,1,2\n"));
        let back = read_table(buf.as_slice()).unwrap();
        assert_eq!(back, s.coeffs(6));
    }

    #[test]
    fn rejects_malformed_rows() {
        assert!(read_table("n,numerator,denominator\n0,1\n".as_bytes()).is_err());
        assert!(read_table("0,1,0\n".as_bytes()).is_err());
    }
}
