//! Node and qubit lists on the command line and in scripts.

use crate::CliError;

/// Parses `"1,3,4"`. With 1-based indexing on, entries are shifted down and, for checks,
/// letters `a..z` stand for `0..25`. Blank input is an empty list.
pub fn parse(text: &str, one_based: bool, letters: bool) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        out.push(parse_token(token, one_based, letters)?);
    }
    Ok(out)
}

fn parse_token(token: &str, one_based: bool, letters: bool) -> Result<usize, CliError> {
    if let Ok(i) = token.parse::<usize>() {
        return shift(i, one_based, token);
    }
    let mut chars = token.chars();
    if let (true, true, Some(c), None) = (one_based, letters, chars.next(), chars.next()) {
        if c.is_ascii_lowercase() {
            return Ok(c as usize - 'a' as usize);
        }
    }
    Err(CliError::Input(format!("invalid list entry {token:?}")))
}

fn shift(i: usize, one_based: bool, token: &str) -> Result<usize, CliError> {
    if !one_based {
        return Ok(i);
    }
    i.checked_sub(1)
        .ok_or_else(|| CliError::Input(format!("entry {token:?} is not 1-indexed")))
}

/// Converts already-parsed script indices.
pub fn rebase(values: &[usize], one_based: bool) -> Result<Vec<usize>, CliError> {
    values.iter().map(|&i| shift(i, one_based, &i.to_string())).collect()
}
