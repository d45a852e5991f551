//! Element arguments: inline text or `@path` to a file holding the text.

use std::fs;

use cendalg::arith::ParseError;
use cendalg::conformal::CendElem;

use crate::CliError;

pub fn read_source(arg: &str) -> Result<String, CliError> {
    match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)
            .map(|s| s.trim().to_string())
            .map_err(|e| CliError::Invalid(format!("cannot read {path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

/// Renders a parse error with the offending text and a caret under the column.
pub fn located(label: &str, src: &str, err: &ParseError) -> CliError {
    let pad = " ".repeat(err.column.saturating_sub(1));
    CliError::Invalid(format!("{label}: {err}\n  {src}\n  {pad}^"))
}

pub fn element(label: &str, arg: &str) -> Result<CendElem, CliError> {
    let src = read_source(arg)?;
    CendElem::parse(&src).map_err(|e| located(label, &src, &e))
}

pub fn elements(label: &str, args: &[String]) -> Result<Vec<CendElem>, CliError> {
    let elems = args
        .iter()
        .enumerate()
        .map(|(i, a)| element(&format!("{label} {}", i + 1), a))
        .collect::<Result<Vec<_>, _>>()?;
    same_size(&elems)?;
    Ok(elems)
}

pub fn same_size(elems: &[CendElem]) -> Result<(), CliError> {
    if let Some(first) = elems.first() {
        if let Some(bad) = elems.iter().find(|e| e.size() != first.size()) {
            return Err(CliError::Invalid(format!(
                "size mismatch: {0}x{0} against {1}x{1}",
                first.size(),
                bad.size()
            )));
        }
    }
    Ok(())
}
