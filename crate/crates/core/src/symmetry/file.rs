//! Plain-text group definitions: one element per line,
//! `phase_over_pi m11 m12 ... mdd`, `#` starts a comment.

use std::f64::consts::PI;
use std::path::Path;

use super::element::GroupElement;
use super::group::{verify_group, SymmetryGroup};
use crate::error::{Error, Result};

pub fn parse_group(text: &str) -> Result<SymmetryGroup> {
    let mut elements = Vec::new();
    let mut dim = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: lineno + 1, message };
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| parse_err(format!("'{t}': {e}"))))
            .collect::<Result<_>>()?;
        let entries = values.len() - 1;
        let d = (entries as f64).sqrt().round() as usize;
        if d == 0 || d * d != entries {
            return Err(parse_err(format!("expected 1 + d² numbers, found {}", values.len())));
        }
        match dim {
            None => dim = Some(d),
            Some(prev) if prev != d => {
                return Err(parse_err(format!("dimension {d} differs from earlier lines ({prev})")))
            }
            _ => {}
        }
        let e = GroupElement::from_rows(values[0] * PI, d, &values[1..]).map_err(|e| parse_err(e.to_string()))?;
        elements.push(e);
    }
    let dim = dim.ok_or(Error::EmptyGroup)?;
    verify_group(&elements, dim)
}

pub fn load_group(path: &Path) -> Result<SymmetryGroup> {
    let text = std::fs::read_to_string(path)?;
    let group = parse_group(&text)?;
    let name = path.file_stem().and_then(|s| s.to_str()).map(str::to_owned);
    Ok(match (group.name(), name) {
        (None, Some(n)) => group.with_name(n),
        _ => group,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::catalog;

    #[test]
    fn parses_quarter_turn() {
        let text = "# order-4 planar group\n0 1 0 0 1\n1 0 -1 1 0   # (pi, R_{pi/2})\n\n1 0 1 -1 0\n0 -1 0 0 -1\n";
        let g = parse_group(text).unwrap();
        assert_eq!(g.canonical_key(), catalog::quarter_turn().canonical_key());
    }

    #[test]
    fn display_roundtrips() {
        for g in catalog::all_finite() {
            let back = parse_group(&g.to_string()).unwrap();
            assert_eq!(back.canonical_key(), g.canonical_key());
        }
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_group("0 1\n1 -1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_group("0 1\nx -1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(matches!(parse_group("# nothing\n"), Err(Error::EmptyGroup)));
        assert!(matches!(parse_group("0 1\n0.5 -1\n1 -1\n"), Err(Error::AssumptionAViolated(_))));
    }
}
