//! Instance text format and report serialization.
//!
//! Instance files are line oriented: `#` starts a comment, `n <count>`
//! declares the vertex count, and each `e <u> <v> <x>` line appends one edge
//! (ids in file order). Marginals are written as short decimals when possible
//! and as `p/q` otherwise; the parser accepts both, so files round-trip
//! exactly.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use rocrs_core::instance::InstanceError;
use rocrs_core::{Frac, Instance};

#[derive(Debug)]
pub enum FileError {
    Io(io::Error),
    Parse { line: usize, message: String },
    Instance(InstanceError),
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FileError::Io(e) => write!(f, "{}", e),
            FileError::Parse { line, message } => write!(f, "line {}: {}", line, message),
            FileError::Instance(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for FileError {}

impl From<io::Error> for FileError {
    fn from(e: io::Error) -> FileError {
        FileError::Io(e)
    }
}

impl From<InstanceError> for FileError {
    fn from(e: InstanceError) -> FileError {
        FileError::Instance(e)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> FileError {
    FileError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses a marginal literal: a decimal with at most 12 fractional digits
/// (`0.5`, `1`, `.25`) or an explicit ratio (`1/3`). Exact in both cases.
fn parse_frac(token: &str, line: usize) -> Result<Frac, FileError> {
    if let Some((num, den)) = token.split_once('/') {
        let num: i64 = num
            .parse()
            .map_err(|_| parse_err(line, format!("bad numerator '{}'", num)))?;
        let den: i64 = den
            .parse()
            .map_err(|_| parse_err(line, format!("bad denominator '{}'", den)))?;
        if den == 0 {
            return Err(parse_err(line, "zero denominator"));
        }
        return Ok(Frac::new(num, den));
    }
    let (int_part, frac_part) = match token.split_once('.') {
        Some((i, f)) => (i, f),
        None => (token, ""),
    };
    if frac_part.len() > 12
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
        || (!int_part.is_empty() && !int_part.bytes().all(|b| b.is_ascii_digit()))
        || (int_part.is_empty() && frac_part.is_empty())
    {
        return Err(parse_err(line, format!("bad marginal '{}'", token)));
    }
    let int: i64 = if int_part.is_empty() {
        0
    } else {
        int_part
            .parse()
            .map_err(|_| parse_err(line, format!("bad marginal '{}'", token)))?
    };
    let den = 10i64.pow(frac_part.len() as u32);
    let frac: i64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().expect("digits checked")
    };
    Ok(Frac::new(int * den + frac, den))
}

/// Parses the instance text format. Errors carry 1-based line numbers.
pub fn parse_instance(text: &str) -> Result<Instance, FileError> {
    let mut vertex_count: Option<usize> = None;
    let mut edges: Vec<(usize, usize, Frac)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("n") => {
                if vertex_count.is_some() {
                    return Err(parse_err(line, "duplicate 'n' directive"));
                }
                let count = tokens
                    .next()
                    .ok_or_else(|| parse_err(line, "missing vertex count"))?;
                let count: usize = count
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad vertex count '{}'", count)))?;
                if tokens.next().is_some() {
                    return Err(parse_err(line, "trailing tokens after vertex count"));
                }
                vertex_count = Some(count);
            }
            Some("e") => {
                if vertex_count.is_none() {
                    return Err(parse_err(line, "edge before the 'n' directive"));
                }
                let mut field = |name: &str| {
                    tokens
                        .next()
                        .ok_or_else(|| parse_err(line, format!("missing {}", name)))
                };
                let u = field("endpoint u")?;
                let v = field("endpoint v")?;
                let x = field("marginal x")?;
                let u: usize = u
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad endpoint '{}'", u)))?;
                let v: usize = v
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad endpoint '{}'", v)))?;
                let x = parse_frac(x, line)?;
                if tokens.next().is_some() {
                    return Err(parse_err(line, "trailing tokens after edge"));
                }
                edges.push((u, v, x));
            }
            Some(other) => {
                return Err(parse_err(line, format!("unknown directive '{}'", other)));
            }
            None => unreachable!("non-empty content"),
        }
    }
    let vertex_count = vertex_count.ok_or_else(|| parse_err(0, "missing 'n' directive"))?;
    Ok(Instance::new(vertex_count, &edges)?)
}

pub fn read_instance(path: &Path) -> Result<Instance, FileError> {
    parse_instance(&fs::read_to_string(path)?)
}

/// Renders the instance text format; `parse_instance` inverts this exactly.
pub fn format_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str(&format!("n {}\n", inst.vertex_count()));
    for e in inst.edges() {
        out.push_str(&format!("e {} {} {}\n", e.u, e.v, inst.x(e.id)));
    }
    out
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<(), FileError> {
    Ok(fs::write(path, format_instance(inst))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rocrs_core::fixtures;

    #[test]
    fn parses_decimals_and_ratios() {
        assert_eq!(parse_frac("0.5", 1).unwrap(), Frac::new(1, 2));
        assert_eq!(parse_frac("1", 1).unwrap(), Frac::ONE);
        assert_eq!(parse_frac(".25", 1).unwrap(), Frac::new(1, 4));
        assert_eq!(parse_frac("1/3", 1).unwrap(), Frac::new(1, 3));
        assert!(parse_frac("x", 1).is_err());
        assert!(parse_frac("1/0", 1).is_err());
        assert!(parse_frac(".", 1).is_err());
    }

    #[test]
    fn round_trips_fixtures_exactly() {
        for inst in [
            fixtures::fig5(),
            fixtures::fig6(),
            fixtures::broom(1, 4, Frac::new(1, 2), Frac::new(1, 3)),
        ] {
            let text = format_instance(&inst);
            assert_eq!(parse_instance(&text).unwrap(), inst);
        }
    }

    #[test]
    fn accepts_comments_and_blank_lines() {
        let text = "# header\n\nn 3  # three vertices\ne 0 1 0.5\ne 1 2 1/3 # ratio\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.vertex_count(), 3);
        assert_eq!(inst.x(1), Frac::new(1, 3));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_instance("n 3\ne 0 1\n").unwrap_err();
        match err {
            FileError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {:?}", other),
        }
        let err = parse_instance("e 0 1 0.5\n").unwrap_err();
        match err {
            FileError::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {:?}", other),
        }
        // Semantic failures surface the core validation error.
        let err = parse_instance("n 2\ne 0 0 0.5\n").unwrap_err();
        assert!(matches!(err, FileError::Instance(_)));
    }
}
