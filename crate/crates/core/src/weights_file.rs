//! Plain-text sector weights: one `two_J p_J` pair per line, whitespace
//! separated, `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::spin::{format_half, BlockWeights, SpinEnsemble};
use crate::{Error, Result};

/// Accepted deviation of the file's total weight from 1 before
/// renormalization.
pub const FILE_SUM_TOL: f64 = 1e-6;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Reads the `two_J → p_J` pairs without reference to an ensemble.
pub fn parse_entries(text: &str) -> Result<BTreeMap<u32, f64>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut fields = body.split_whitespace();
        let (Some(tj), Some(p), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(line, "expected two columns: two_J p_J"));
        };
        let tj: u32 = tj.parse().map_err(|_| {
            parse_err(
                line,
                format!("two_J must be a non-negative integer, got {tj:?}"),
            )
        })?;
        let p: f64 = p
            .parse()
            .map_err(|_| parse_err(line, format!("p_J must be a number, got {p:?}")))?;
        if !(p.is_finite() && p >= 0.0) {
            return Err(parse_err(
                line,
                format!("p_J must be finite and non-negative, got {p}"),
            ));
        }
        if out.insert(tj, p).is_some() {
            return Err(parse_err(line, format!("sector two_J = {tj} listed twice")));
        }
    }
    Ok(out)
}

/// Parses and validates a weights file for `ensemble`. The total must be
/// within [`FILE_SUM_TOL`] of 1; the weights are then rescaled to unit sum.
pub fn parse(text: &str, ensemble: &SpinEnsemble) -> Result<BlockWeights> {
    let entries = parse_entries(text)?;
    if entries.is_empty() {
        return Err(parse_err(0, "no weights found"));
    }
    for &tj in entries.keys() {
        if !ensemble.has_sector(tj) {
            return Err(parse_err(
                0,
                format!("J = {} is not a sector of {ensemble}", format_half(tj)),
            ));
        }
    }
    let total: f64 = entries.values().sum();
    if (total - 1.0).abs() > FILE_SUM_TOL {
        return Err(parse_err(0, format!("weights sum to {total}, not 1")));
    }
    BlockWeights::normalized(*ensemble, entries)
}

/// Renders weights in the file format, readable by [`parse`].
pub fn format(weights: &BlockWeights) -> String {
    let mut s = format!("# {}\n# two_J p_J\n", weights.ensemble());
    for (tj, p) in weights.iter() {
        let _ = writeln!(s, "{tj} {p:e}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::thermal_product_weights;

    fn ens(n: u32, two_s: u32) -> SpinEnsemble {
        SpinEnsemble::new(n, two_s).unwrap()
    }

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = "# weights\n\n0 0.25   # singlet\n2\t0.75\n";
        let w = parse(text, &ens(2, 1)).unwrap();
        assert_eq!(w.weight(0), 0.25);
        assert_eq!(w.weight(2), 0.75);
    }

    #[test]
    fn renormalizes_small_deviations() {
        let w = parse("1 0.6666667\n3 0.3333333\n", &ens(3, 1)).unwrap();
        assert!((w.weight(1) + w.weight(3) - 1.0).abs() < 1e-15);
        assert!(parse("1 0.6\n3 0.3\n", &ens(3, 1)).is_err());
    }

    #[test]
    fn rejects_malformed_input() {
        let e = ens(2, 1);
        for (text, line) in [
            ("0 0.5\n0 0.5\n", 2),
            ("x 1\n", 1),
            ("0\n", 1),
            ("0 1 2\n", 1),
            ("\n2 -1\n", 2),
            ("2 nan\n", 1),
        ] {
            match parse(text, &e) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(parse("1 1.0\n", &e).is_err());
        assert!(parse("4 1.0\n", &e).is_err());
        assert!(parse("# nothing\n", &e).is_err());
    }

    #[test]
    fn round_trip() {
        let e = ens(5, 3);
        let w = thermal_product_weights(&e, 0.8).unwrap();
        let back = parse(&format(&w), &e).unwrap();
        for (tj, p) in w.iter() {
            assert!((back.weight(tj) - p).abs() < 1e-15);
        }
    }
}
