//! Reader for the corner-point subset of GRDECL: SPECGRID/DIMENS, COORD,
//! ZCORN and ACTNUM. Other keywords are skipped with a warning.

use super::cornerpoint::CornerPointSpec;
use crate::error::{Error, Result};

/// Keywords that carry no data block.
const BARE_KEYWORDS: &[&str] = &[
    "NOECHO", "ECHO", "GRID", "EDIT", "PROPS", "REGIONS", "SOLUTION", "SUMMARY", "SCHEDULE", "RUNSPEC", "END",
];

struct Tokens<'a> {
    words: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut words = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = match line.find("--") {
                Some(i) => &line[..i],
                None => line,
            };
            for w in line.split_whitespace() {
                // a terminator may be glued to the last value
                match w.strip_suffix('/') {
                    Some(v) if !v.is_empty() => {
                        words.push((ln + 1, v));
                        words.push((ln + 1, "/"));
                    }
                    _ => words.push((ln + 1, w)),
                }
            }
        }
        Self { words, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let w = self.words.get(self.pos).copied();
        self.pos += 1;
        w
    }

    /// Items up to the next '/', with repeat counts expanded.
    fn record(&mut self, keyword: &str, line: usize) -> Result<Vec<String>> {
        let mut out = Vec::new();
        loop {
            match self.next() {
                None => {
                    return Err(Error::Grdecl(format!(
                        "unterminated keyword {keyword} (line {line}): missing '/'"
                    )))
                }
                Some((_, "/")) => return Ok(out),
                Some((ln, w)) => match w.split_once('*') {
                    Some((n, v)) => {
                        let n: usize = n
                            .parse()
                            .map_err(|_| Error::Grdecl(format!("malformed repeat token '{w}' (line {ln})")))?;
                        if v.is_empty() || n == 0 {
                            return Err(Error::Grdecl(format!("malformed repeat token '{w}' (line {ln})")));
                        }
                        out.extend(std::iter::repeat(v.to_string()).take(n));
                    }
                    None => out.push(w.to_string()),
                },
            }
        }
    }
}

fn reals(keyword: &str, items: &[String]) -> Result<Vec<f64>> {
    items
        .iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Grdecl(format!("{keyword}: '{s}' is not a number")))
        })
        .collect()
}

/// Parses GRDECL text into a corner-point specification.
pub fn parse_grdecl(text: &str) -> Result<CornerPointSpec> {
    let mut tokens = Tokens::new(text);
    let mut dims: Option<[usize; 3]> = None;
    let mut coord = None;
    let mut zcorn = None;
    let mut actnum = None;
    while let Some((line, word)) = tokens.next() {
        let kw = word.to_ascii_uppercase();
        match kw.as_str() {
            "SPECGRID" | "DIMENS" => {
                let items = tokens.record(&kw, line)?;
                if items.len() < 3 {
                    return Err(Error::Grdecl(format!("{kw} needs 3 dimensions, got {}", items.len())));
                }
                let mut d = [0; 3];
                for (k, s) in items[..3].iter().enumerate() {
                    d[k] = s
                        .parse()
                        .map_err(|_| Error::Grdecl(format!("{kw}: '{s}' is not a cell count")))?;
                }
                dims = Some(d);
            }
            "COORD" => coord = Some(reals(&kw, &tokens.record(&kw, line)?)?),
            "ZCORN" => zcorn = Some(reals(&kw, &tokens.record(&kw, line)?)?),
            "ACTNUM" => {
                let items = tokens.record(&kw, line)?;
                let v = items
                    .iter()
                    .map(|s| match s.as_str() {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        other => Err(Error::Grdecl(format!("ACTNUM: '{other}' is not 0 or 1"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                actnum = Some(v);
            }
            "/" => return Err(Error::Grdecl(format!("stray '/' at line {line}"))),
            k if BARE_KEYWORDS.contains(&k) => {}
            _ => {
                log::warn!("GRDECL: skipping unsupported keyword {word} (line {line})");
                tokens.record(&kw, line)?;
            }
        }
    }
    let [nx, ny, nz] = dims.ok_or_else(|| Error::Grdecl("missing SPECGRID/DIMENS".into()))?;
    let coord = coord.ok_or_else(|| Error::Grdecl("missing COORD".into()))?;
    let zcorn = zcorn.ok_or_else(|| Error::Grdecl("missing ZCORN".into()))?;
    let n_cells = nx * ny * nz;
    let actnum = actnum.unwrap_or_else(|| vec![true; n_cells]);
    CornerPointSpec::new([nx, ny, nz], coord, zcorn, actnum)
}

/// Writes a specification back as GRDECL text.
pub fn write_grdecl(spec: &CornerPointSpec) -> String {
    use std::fmt::Write;
    let [nx, ny, nz] = spec.dims();
    let mut s = String::new();
    let _ = writeln!(s, "SPECGRID\n{nx} {ny} {nz} 1 F /\n\nCOORD");
    for p in spec.coord().chunks(6) {
        let line: Vec<String> = p.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    let _ = writeln!(s, "/\n\nZCORN");
    for row in spec.zcorn().chunks(8) {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    let _ = writeln!(s, "/\n\nACTNUM");
    for row in spec.actnum().chunks(20) {
        let line: Vec<&str> = row.iter().map(|&a| if a { "1" } else { "0" }).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    let _ = writeln!(s, "/");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_CELL: &str = "\
SPECGRID
1 1 1 1 F /
COORD
0 0 0 0 0 1
1 0 0 1 0 1
0 1 0 0 1 1
1 1 0 1 1 1 /
ZCORN
4*0 4*1 /
";

    #[test]
    fn one_cell() {
        let s = parse_grdecl(ONE_CELL).unwrap();
        assert_eq!(s.dims(), [1, 1, 1]);
        assert_eq!(s.zcorn(), &[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(s.actnum(), &[true]);
    }

    #[test]
    fn repeat_expansion() {
        let text = ONE_CELL.replace("4*0 4*1", "8*0.0");
        let s = parse_grdecl(&text).unwrap();
        assert_eq!(s.zcorn(), &[0.0; 8]);
    }

    #[test]
    fn zcorn_count_mismatch() {
        let text = ONE_CELL.replace("4*0 4*1", "0 0 0 0 1 1 1");
        let e = parse_grdecl(&text).unwrap_err();
        assert!(e.to_string().contains("ZCORN count mismatch (7≠8)"), "{e}");
    }

    #[test]
    fn malformed_and_unterminated() {
        let e = parse_grdecl(&ONE_CELL.replace("4*0", "x*0")).unwrap_err();
        assert!(e.to_string().contains("malformed repeat"));
        let e = parse_grdecl(&ONE_CELL.replace("4*1 /", "4*1")).unwrap_err();
        assert!(e.to_string().contains("unterminated"));
    }

    #[test]
    fn comments_and_unknown_keywords() {
        let text = format!("-- header\nNOECHO\nMAPAXES\n 0 1 0 0 1 0 /\n{}ACTNUM\n1 / -- trailing\n", ONE_CELL);
        let s = parse_grdecl(&text).unwrap();
        assert_eq!(s.actnum(), &[true]);
    }

    #[test]
    fn round_trip() {
        let s = parse_grdecl(ONE_CELL).unwrap();
        let t = parse_grdecl(&write_grdecl(&s)).unwrap();
        assert_eq!(s, t);
    }
}
