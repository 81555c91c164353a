use csm_core::poly::{parse_poly, MultiPoly, Ring, VarSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: expected a header `n: <int>`")]
    MissingHeader { line: usize },
    #[error("line {line}: {msg}")]
    Generator { line: usize, msg: String },
    #[error("no generators after the header")]
    Empty,
}

/// A parsed input file: the ambient dimension and the generators over `Q`.
#[derive(Debug, Clone)]
pub struct InputFile {
    pub n: usize,
    pub gens: Vec<MultiPoly>,
}

/// Parses `n: <int>` followed by one generator per line. Blank lines and
/// `#` comments are skipped.
pub fn parse_input(text: &str) -> Result<InputFile, InputError> {
    let mut n = None;
    let mut gens = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some(n) = n else {
            let value = line
                .strip_prefix("n:")
                .and_then(|v| v.trim().parse::<usize>().ok())
                .ok_or(InputError::MissingHeader { line: line_no })?;
            n = Some(value);
            continue;
        };
        let p = parse_poly(line, VarSpec::projective(n), Ring::Rational)
            .map_err(|e| InputError::Generator { line: line_no, msg: e.to_string() })?;
        gens.push(p);
    }
    let n = n.ok_or(InputError::MissingHeader { line: 1 })?;
    if gens.is_empty() {
        return Err(InputError::Empty);
    }
    Ok(InputFile { n, gens })
}

pub fn read_input(path: &str) -> Result<InputFile, InputError> {
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io { path: path.to_string(), source })?;
    parse_input(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_comments_and_blank_lines() {
        let f = parse_input("# a double line\n\nn: 2\nx0^2   # first\nx0*x1\n").unwrap();
        assert_eq!(f.n, 2);
        assert_eq!(f.gens.len(), 2);
    }

    #[test]
    fn errors_name_the_line() {
        assert!(matches!(parse_input("x0\n"), Err(InputError::MissingHeader { line: 1 })));
        assert!(matches!(parse_input("n: 1\nx0\nx7\n"), Err(InputError::Generator { line: 3, .. })));
        assert!(matches!(parse_input("n: 3\n"), Err(InputError::Empty)));
    }
}
