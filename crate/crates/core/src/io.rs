//! Text formats for bit-channel bounds and frozen sets.

use crate::construct::{ChannelBounds, ConstructionResult};
use crate::error::{Error, Result};
use crate::real::Real;
use std::fmt::Write as _;

/// Seven significant digits with a signed two-digit exponent, e.g.
/// `5.096030e-03`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.6e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", e.abs())
}

/// Bounds as tab-separated rows `index pe_upper pe_lower i_lower i_upper`.
pub fn write_bounds_tsv<T: Real>(bounds: &[ChannelBounds<T>], mu: usize) -> String {
    let mut out = format!("#bounds v1 n={} mu={}\n", bounds.len(), mu);
    for b in bounds {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            b.index,
            format_sci(b.pe_upper.f64()),
            format_sci(b.pe_lower.f64()),
            format_sci(b.i_lower.f64()),
            format_sci(b.i_upper.f64()),
        );
    }
    out
}

/// Parses the output of [`write_bounds_tsv`]. Columns absent from the format
/// keep their trivial values.
pub fn read_bounds_tsv(text: &str) -> Result<(usize, Vec<ChannelBounds<f64>>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::input("empty bounds file"))?;
    let fields = header_fields(header, "#bounds v1")?;
    let n = field(&fields, "n")?;
    let mu = field(&fields, "mu")?;
    let mut bounds = Vec::with_capacity(n);
    for (row, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(Error::input(format!("bounds row {row} has {} columns", cols.len())));
        }
        let num = |c: &str| -> Result<f64> {
            c.trim().parse().map_err(|_| Error::input(format!("bad number `{c}` in bounds row {row}")))
        };
        let index: usize =
            cols[0].trim().parse().map_err(|_| Error::input(format!("bad index in bounds row {row}")))?;
        if index != row {
            return Err(Error::input(format!("bounds row {row} carries index {index}")));
        }
        let mut b = ChannelBounds::trivial(index);
        b.pe_upper = num(cols[1])?;
        b.pe_degraded = b.pe_upper;
        b.pe_lower = num(cols[2])?;
        b.i_lower = num(cols[3])?;
        b.i_upper = num(cols[4])?;
        bounds.push(b);
    }
    if bounds.len() != n {
        return Err(Error::input(format!("bounds header announces {n} rows, found {}", bounds.len())));
    }
    Ok((mu, bounds))
}

/// Frozen indices, one per line, ascending.
pub fn write_frozen(result: &ConstructionResult) -> String {
    let mut out = format!("#frozen v1 n={} k={}\n", result.n, result.k);
    for i in &result.frozen_set {
        let _ = writeln!(out, "{i}");
    }
    out
}

/// Parses a frozen-set file into `(n, k, frozen indices)`.
pub fn read_frozen(text: &str) -> Result<(usize, usize, Vec<usize>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::input("empty frozen-set file"))?;
    let fields = header_fields(header, "#frozen v1")?;
    let n = field(&fields, "n")?;
    let k = field(&fields, "k")?;
    let mut frozen = Vec::with_capacity(n.saturating_sub(k));
    for line in lines {
        let i: usize = line.trim().parse().map_err(|_| Error::input(format!("bad frozen index `{line}`")))?;
        if i >= n || frozen.last().is_some_and(|&last| last >= i) {
            return Err(Error::input(format!("frozen index {i} out of range or out of order")));
        }
        frozen.push(i);
    }
    if frozen.len() + k != n {
        return Err(Error::input(format!("{} frozen indices do not match n={n} k={k}", frozen.len())));
    }
    Ok((n, k, frozen))
}

fn header_fields<'a>(header: &'a str, magic: &str) -> Result<Vec<(&'a str, &'a str)>> {
    let rest = header
        .strip_prefix(magic)
        .ok_or_else(|| Error::input(format!("expected header `{magic} ...`, got `{header}`")))?;
    rest.split_whitespace()
        .map(|kv| kv.split_once('=').ok_or_else(|| Error::input(format!("malformed header field `{kv}`"))))
        .collect()
}

fn field(fields: &[(&str, &str)], key: &str) -> Result<usize> {
    let v = fields
        .iter()
        .find(|(k, _)| *k == key)
        .ok_or_else(|| Error::input(format!("header lacks `{key}`")))?
        .1;
    v.parse().map_err(|_| Error::input(format!("header field `{key}={v}` is not an integer")))
}
