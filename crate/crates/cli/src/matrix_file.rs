//! Plain-text parity check matrices.
//!
//! ```text
//! # (4,2) self-dual code
//! 2 2 4
//! 0110
//! 1001
//! ```
//!
//! The header holds `q r n`; each of the `r` rows is `n` digits below `q`.
//! Lines starting with `#` and blank lines are skipped.

use trellis_core::{Field, Matrix, ParityCheckMatrix};

use crate::error::{CliError, Result};

pub fn parse_matrix(text: &str) -> Result<ParityCheckMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| CliError::parse(1, 1, "missing header \"q r n\""))?;
    let mut fields = Vec::new();
    let mut offset = 0;
    for tok in header.split(' ') {
        if !tok.is_empty() {
            let value: usize = tok.parse().map_err(|_| {
                CliError::parse(
                    hline,
                    offset + 1,
                    format!("'{tok}' is not a base-10 integer"),
                )
            })?;
            fields.push((offset + 1, value));
        }
        offset += tok.len() + 1;
    }
    if fields.len() != 3 {
        return Err(CliError::parse(
            hline,
            1,
            format!("header needs 3 integers, found {}", fields.len()),
        ));
    }
    let (qcol, q) = fields[0];
    let (_, r) = fields[1];
    let (_, n) = fields[2];
    let field = u32::try_from(q)
        .ok()
        .and_then(|q| Field::new(q).ok())
        .ok_or_else(|| CliError::parse(hline, qcol, format!("{q} is not a prime")))?;
    if q > 10 {
        return Err(CliError::parse(
            hline,
            qcol,
            format!("entries are single digits, so q must be below 10, not {q}"),
        ));
    }
    if n == 0 {
        return Err(CliError::parse(hline, 1, "code length must be positive"));
    }

    let mut data = Vec::with_capacity(r * n);
    let mut last = hline;
    for row in 0..r {
        let (ln, line) = lines.next().ok_or_else(|| {
            CliError::parse(last + 1, 1, format!("expected {r} rows, found {row}"))
        })?;
        last = ln;
        let mut count = 0;
        for (col, ch) in line.chars().enumerate() {
            let d = ch
                .to_digit(10)
                .filter(|&d| d < field.order())
                .ok_or_else(|| {
                    CliError::parse(ln, col + 1, format!("'{ch}' is not a digit below {q}"))
                })?;
            if col == n {
                return Err(CliError::parse(
                    ln,
                    col + 1,
                    format!("row is longer than {n} digits"),
                ));
            }
            data.push(d);
            count += 1;
        }
        if count != n {
            return Err(CliError::parse(
                ln,
                count + 1,
                format!("row has {count} digits, expected {n}"),
            ));
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(CliError::parse(
            ln,
            1,
            format!("unexpected content after {r} rows"),
        ));
    }
    Ok(ParityCheckMatrix::new(Matrix::new(field, r, n, data)?))
}

pub fn emit_matrix(h: &ParityCheckMatrix) -> String {
    let mut out = format!("{} {} {}\n", h.field().order(), h.r(), h.n());
    for row in h.matrix().row_vectors() {
        out.push_str(&row.to_digits());
        out.push('\n');
    }
    out
}
