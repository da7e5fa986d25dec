use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::error::{Error, Result};

use super::{IntMatrix, ResidueMatrix};

/// A parsed matrix file: `rows cols [modulus]` followed by the entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixText {
    Integer(IntMatrix),
    Residue(ResidueMatrix),
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Content lines with their 1-based numbers, comments and blanks removed.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| {
        parse_err(
            line,
            format!("expected a non-negative integer, got `{tok}`"),
        )
    })
}

pub fn parse_matrix(text: &str) -> Result<MatrixText> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if !(2..=3).contains(&toks.len()) {
        return Err(parse_err(hline, "header must be `rows cols [modulus]`"));
    }
    let rows = parse_usize(toks[0], hline)?;
    let cols = parse_usize(toks[1], hline)?;
    let modulus = toks
        .get(2)
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| parse_err(hline, format!("bad modulus `{t}`")))
        })
        .transpose()?;
    parse_body(lines, rows, cols, modulus, hline)
}

pub(crate) fn parse_body<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
    rows: usize,
    cols: usize,
    modulus: Option<u64>,
    hline: usize,
) -> Result<MatrixText> {
    let mut entries = Vec::with_capacity(rows * cols);
    let mut last = hline;
    for (n, l) in lines {
        last = n;
        for tok in l.split_whitespace() {
            let v: BigInt = tok
                .parse()
                .map_err(|_| parse_err(n, format!("bad integer `{tok}`")))?;
            entries.push(v);
        }
    }
    if entries.len() != rows * cols {
        return Err(parse_err(
            last,
            format!("expected {} entries, found {}", rows * cols, entries.len()),
        ));
    }
    let m = IntMatrix::new(rows, cols, entries).map_err(|e| parse_err(hline, e.to_string()))?;
    match modulus {
        None => Ok(MatrixText::Integer(m)),
        Some(q) if q >= 2 => Ok(MatrixText::Residue(m.reduce(q)?)),
        Some(q) => Err(parse_err(
            hline,
            format!("modulus must be at least 2, got {q}"),
        )),
    }
}

pub fn format_int_matrix(m: &IntMatrix) -> String {
    let mut s = format!("{} {}\n", m.rows(), m.cols());
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|c| m.get(r, c).to_string()).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

pub fn format_residue_matrix(m: &ResidueMatrix) -> String {
    let mut s = format!("{} {} {}\n", m.rows(), m.cols(), m.modulus());
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|c| m.get(r, c).to_string()).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = IntMatrix::from_i64(2, 2, &[2, -5, 1, 3]).unwrap();
        assert_eq!(
            parse_matrix(&format_int_matrix(&m)).unwrap(),
            MatrixText::Integer(m)
        );
        let r = ResidueMatrix::from_i64(25, 2, 2, &[11, 0, 0, 16]).unwrap();
        assert_eq!(
            parse_matrix(&format_residue_matrix(&r)).unwrap(),
            MatrixText::Residue(r)
        );
    }

    #[test]
    fn comments_and_errors() {
        let t = "# a comment\n2 2 5\n1 2\n# middle\n-1 4\n";
        let MatrixText::Residue(r) = parse_matrix(t).unwrap() else {
            panic!("expected residue matrix")
        };
        assert_eq!(r.entries(), &[1, 2, 4, 4]);
        assert!(matches!(
            parse_matrix("2 2\n1 2 3\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_matrix("2 x\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse_matrix(""), Err(Error::Parse { .. })));
    }
}
