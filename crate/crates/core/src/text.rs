//! Helpers shared by the line-oriented text formats.

use crate::error::{Error, Result};

/// Lines that carry content, with 1-based line numbers. Blank lines and
/// `#` comments are skipped.
pub(crate) fn content_lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Splits `a=1 b=2` into ordered `(key, value)` pairs.
pub(crate) fn key_values(line_no: usize, line: &str) -> Result<Vec<(&str, &str)>> {
    line.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .ok_or_else(|| Error::parse(line_no, format!("expected key=value, got `{tok}`")))
        })
        .collect()
}

/// Requires exactly the given keys, in order.
pub(crate) fn expect_keys<'a, const N: usize>(
    line_no: usize,
    line: &'a str,
    keys: [&str; N],
) -> Result<[&'a str; N]> {
    let kv = key_values(line_no, line)?;
    if kv.len() != N {
        return Err(Error::parse(
            line_no,
            format!("expected fields {}", keys.join(" ")),
        ));
    }
    let mut out = [""; N];
    for (i, ((k, v), want)) in kv.into_iter().zip(keys).enumerate() {
        if k != want {
            return Err(Error::parse(
                line_no,
                format!("expected `{want}=`, got `{k}=`"),
            ));
        }
        out[i] = v;
    }
    Ok(out)
}

pub(crate) fn parse_num<T: std::str::FromStr>(line_no: usize, what: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(line_no, format!("invalid {what} `{s}`")))
}

/// Parses a comma-separated id list; the empty string is the empty list.
pub(crate) fn parse_list<T: std::str::FromStr>(
    line_no: usize,
    what: &str,
    s: &str,
) -> Result<Vec<T>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| parse_num(line_no, what, p.trim()))
        .collect()
}
