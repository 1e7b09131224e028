//! Text formats: scheme files, move scripts, schedules, traces and manifests.
//!
//! A scheme file:
//!
//! ```text
//! mms 1
//! dims 2 2 2
//! rank 7
//! 1001 1001 1001
//! ...
//! ```
//!
//! Term lines hold the alpha, beta and gamma bit strings; bit `q` of the
//! flattening is the character at position `q`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, ParseError, Result};
use crate::gf2::BitVector;
use crate::moves::{FlipMove, Move, PlusMove};
use crate::scheme::{Dims, Scheme, Slot, Term};
use crate::search::{Stage, TraceRecord};
use crate::witness::MoveScript;

pub const SCHEME_MAGIC: &str = "mms 1";
pub const SCRIPT_MAGIC: &str = "mss 1";
pub const TRACE_HEADER: &str = "iteration,current_rank,best_rank";

pub fn serialize_scheme(s: &Scheme) -> String {
    let d = s.dims();
    let mut out = format!("{SCHEME_MAGIC}\ndims {} {} {}\nrank {}\n", d.n, d.m, d.p, s.rank());
    for t in s.terms() {
        let _ = writeln!(out, "{} {} {}", t.alpha, t.beta, t.gamma);
    }
    out
}

/// Line-numbered reader over `\n`-separated text; a trailing `\r` is ignored.
struct Lines<'a> {
    lines: Vec<&'a str>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect(),
        }
    }

    /// 1-based line, or `MissingLine` past the end.
    fn get(&self, line: usize) -> std::result::Result<&'a str, ParseError> {
        match self.lines.get(line - 1) {
            Some(l) if !(line == self.lines.len() && l.is_empty()) => Ok(l),
            _ => Err(ParseError::MissingLine { line }),
        }
    }

    /// First non-blank line after `line`, if any.
    fn trailing_after(&self, line: usize) -> Option<usize> {
        (line..self.lines.len())
            .find(|&i| !self.lines[i].trim().is_empty())
            .map(|i| i + 1)
    }
}

fn header_fields<'a>(
    l: &'a str,
    line: usize,
    key: &str,
    count: usize,
    expected: &'static str,
) -> std::result::Result<Vec<&'a str>, ParseError> {
    let f: Vec<&str> = l.split_whitespace().collect();
    if f.first() != Some(&key) || f.len() != count + 1 {
        return Err(ParseError::Header { line, expected });
    }
    Ok(f[1..].to_vec())
}

fn parse_usize(s: &str, line: usize, expected: &'static str) -> std::result::Result<usize, ParseError> {
    s.parse().map_err(|_| ParseError::Header { line, expected })
}

fn parse_bits(text: &str, len: usize, line: usize) -> std::result::Result<BitVector, ParseError> {
    if text.len() != len {
        return Err(ParseError::BitLength {
            line,
            expected: len,
            found: text.chars().count(),
        });
    }
    BitVector::from_bit_str(text).map_err(|_| ParseError::BitChars {
        line,
        text: text.to_string(),
    })
}

fn parse_dims_header(lines: &Lines, line: usize) -> std::result::Result<Dims, ParseError> {
    const E: &str = "dims <n> <m> <p>";
    let f = header_fields(lines.get(line)?, line, "dims", 3, E)?;
    let (n, m, p) = (parse_usize(f[0], line, E)?, parse_usize(f[1], line, E)?, parse_usize(f[2], line, E)?);
    Dims::new(n, m, p).map_err(|e| ParseError::Invalid {
        line,
        message: e.to_string(),
    })
}

/// Parses a scheme file and checks that it is a valid scheme.
pub fn parse_scheme(text: &str) -> Result<Scheme> {
    let lines = Lines::new(text);
    if lines.get(1)?.trim_end() != SCHEME_MAGIC {
        return Err(ParseError::Header {
            line: 1,
            expected: SCHEME_MAGIC,
        }
        .into());
    }
    let dims = parse_dims_header(&lines, 2)?;
    let r = parse_usize(header_fields(lines.get(3)?, 3, "rank", 1, "rank <r>")?[0], 3, "rank <r>")?;
    let [la, lb, lc] = dims.lens();
    let mut terms = Vec::with_capacity(r);
    for k in 0..r {
        let line = 4 + k;
        let f: Vec<&str> = lines.get(line)?.split_whitespace().collect();
        if f.len() != 3 {
            return Err(ParseError::FieldCount {
                line,
                expected: 3,
                found: f.len(),
            }
            .into());
        }
        let t = Term::new(
            parse_bits(f[0], la, line)?,
            parse_bits(f[1], lb, line)?,
            parse_bits(f[2], lc, line)?,
        );
        if t.has_zero_component() {
            return Err(ParseError::ZeroComponent { line }.into());
        }
        terms.push(t);
    }
    if let Some(line) = lines.trailing_after(3 + r) {
        return Err(ParseError::Trailing { line }.into());
    }
    let s = Scheme::new(dims, terms)?;
    if !s.verify() {
        return Err(ParseError::Verify { line: 3 + r }.into());
    }
    Ok(s)
}

pub fn read_scheme(path: &Path) -> Result<Scheme> {
    parse_scheme(&fs::read_to_string(path)?)
}

pub fn write_scheme(path: &Path, s: &Scheme) -> Result<()> {
    fs::write(path, serialize_scheme(s))?;
    Ok(())
}

/// Move script file: a header with the dims and move count, then one move per
/// line in the [`Move`] display form.
pub fn serialize_script(script: &MoveScript) -> String {
    let d = script.start.dims();
    let mut out = format!(
        "{SCRIPT_MAGIC}\ndims {} {} {}\nmoves {}\n",
        d.n,
        d.m,
        d.p,
        script.moves.len()
    );
    for mv in &script.moves {
        let _ = writeln!(out, "{mv}");
    }
    out
}

fn parse_move(l: &str, line: usize, dims: Dims) -> std::result::Result<Move, ParseError> {
    let f: Vec<&str> = l.split_whitespace().collect();
    let bad = |message: &str| ParseError::Invalid {
        line,
        message: format!("{message}: {l:?}"),
    };
    let idx = |s: &str| s.parse::<usize>().map_err(|_| bad("bad index"));
    let slot = |s: &str| s.parse::<Slot>().map_err(|_| bad("bad slot"));
    let want = |n: usize| {
        if f.len() == n {
            Ok(())
        } else {
            Err(ParseError::FieldCount {
                line,
                expected: n,
                found: f.len(),
            })
        }
    };
    match f.first().copied() {
        Some("flip") => {
            want(4)?;
            Ok(Move::Flip(FlipMove {
                slot: slot(f[1])?,
                i: idx(f[2])?,
                j: idx(f[3])?,
            }))
        }
        Some("plus") => {
            want(4)?;
            Ok(Move::Plus(PlusMove {
                slot: slot(f[1])?,
                i: idx(f[2])?,
                j: idx(f[3])?,
            }))
        }
        Some("reduce") => {
            want(3)?;
            Ok(Move::Reduce {
                i: idx(f[1])?,
                j: idx(f[2])?,
            })
        }
        Some("greduce") => {
            if f.len() < 3 {
                return Err(bad("group reduction needs a slot and members"));
            }
            Ok(Move::GeneralReduce {
                slot: slot(f[1])?,
                group: f[2..].iter().map(|s| idx(s)).collect::<std::result::Result<_, _>>()?,
            })
        }
        Some("split") => {
            want(4)?;
            let s = slot(f[1])?;
            Ok(Move::Split {
                slot: s,
                idx: idx(f[2])?,
                donor: parse_bits(f[3], dims.len(s), line)?,
            })
        }
        _ => Err(bad("unknown move")),
    }
}

/// Parses a move script; `start` must have the declared dims.
pub fn parse_script(text: &str, start: &Scheme) -> Result<MoveScript> {
    let lines = Lines::new(text);
    if lines.get(1)?.trim_end() != SCRIPT_MAGIC {
        return Err(ParseError::Header {
            line: 1,
            expected: SCRIPT_MAGIC,
        }
        .into());
    }
    let dims = parse_dims_header(&lines, 2)?;
    if dims != start.dims() {
        return Err(ParseError::Invalid {
            line: 2,
            message: format!("script is for {dims}, start scheme is {}", start.dims()),
        }
        .into());
    }
    let k = parse_usize(header_fields(lines.get(3)?, 3, "moves", 1, "moves <k>")?[0], 3, "moves <k>")?;
    let mut moves = Vec::with_capacity(k);
    for i in 0..k {
        moves.push(parse_move(lines.get(4 + i)?, 4 + i, dims)?);
    }
    if let Some(line) = lines.trailing_after(3 + k) {
        return Err(ParseError::Trailing { line }.into());
    }
    Ok(MoveScript {
        start: start.clone(),
        moves,
    })
}

/// Schedule file: one stage per line, `<n>x<m>x<p> <budget>`; blank lines and
/// lines starting with `#` are skipped.
pub fn parse_schedule(text: &str) -> Result<Vec<Stage>> {
    let mut out = Vec::new();
    for (k, l) in text.lines().enumerate() {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let line = k + 1;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 2 {
            return Err(ParseError::FieldCount {
                line,
                expected: 2,
                found: f.len(),
            }
            .into());
        }
        let constraint: Dims = f[0].parse().map_err(|e: Error| ParseError::Invalid {
            line,
            message: e.to_string(),
        })?;
        let budget = f[1].parse().map_err(|_| ParseError::Invalid {
            line,
            message: format!("bad budget {:?}", f[1]),
        })?;
        out.push(Stage { constraint, budget });
    }
    Ok(out)
}

pub fn serialize_schedule(schedule: &[Stage]) -> String {
    schedule
        .iter()
        .map(|s| format!("{} {}\n", s.constraint, s.budget))
        .collect()
}

pub fn trace_csv(trace: &[TraceRecord]) -> String {
    let mut out = format!("{TRACE_HEADER}\n");
    for r in trace {
        let _ = writeln!(out, "{},{},{}", r.iteration, r.current_rank, r.best_rank);
    }
    out
}

/// Key-value manifest, one `key = value` per line in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn set(&mut self, key: &str, value: impl ToString) {
        let v = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = v,
            None => self.entries.push((key.to_string(), v)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Manifest::default();
        for (k, l) in text.lines().enumerate() {
            if l.trim().is_empty() {
                continue;
            }
            let (key, value) = l.split_once(" = ").ok_or(ParseError::Invalid {
                line: k + 1,
                message: "expected `key = value`".into(),
            })?;
            m.set(key.trim(), value);
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{standard_scheme, strassen_scheme};

    #[test]
    fn standard_first_term_line() {
        let text = serialize_scheme(&standard_scheme(2, 2, 2).unwrap());
        assert_eq!(text.lines().nth(3), Some("1000 1000 1000"));
        assert!(text.starts_with("mms 1\ndims 2 2 2\nrank 8\n"));
    }

    #[test]
    fn strassen_round_trip() {
        let s = strassen_scheme();
        let text = serialize_scheme(&s);
        assert_eq!(text.lines().count(), 10);
        let back = parse_scheme(&text).unwrap();
        assert_eq!(back.terms(), s.terms());
    }

    fn err(text: &str) -> ParseError {
        match parse_scheme(text).unwrap_err() {
            Error::Parse(e) => e,
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn parse_errors_name_lines() {
        let good = serialize_scheme(&strassen_scheme());
        let lines: Vec<&str> = good.lines().collect();
        let missing = lines[..9].join("\n") + "\n";
        assert_eq!(err(&missing), ParseError::MissingLine { line: 10 });
        assert!(matches!(err(&good.replacen("mms 1", "mms 2", 1)), ParseError::Header { line: 1, .. }));
        assert!(matches!(err(&good.replacen("dims 2 2 2", "dims 2 x 2", 1)), ParseError::Header { line: 2, .. }));
        assert!(matches!(err(&good.replacen("rank 7", "rank", 1)), ParseError::Header { line: 3, .. }));
        assert_eq!(
            err(&good.replacen("1001 1001 1001", "1001 10010 1001", 1)),
            ParseError::BitLength { line: 4, expected: 4, found: 5 }
        );
        assert!(matches!(err(&good.replacen("1001 1001 1001", "1001 1021 1001", 1)), ParseError::BitChars { line: 4, .. }));
        assert_eq!(err(&good.replacen("1001 1001 1001", "1001 0000 1001", 1)), ParseError::ZeroComponent { line: 4 });
        assert_eq!(err(&good.replacen("1001 1001 1001", "1001 1001", 1)), ParseError::FieldCount { line: 4, expected: 3, found: 2 });
        assert_eq!(err(&good.replacen("1001 1001 1001", "1001 1001 1000", 1)), ParseError::Verify { line: 10 });
        assert_eq!(err(&format!("{good}\n1000 1000 1000\n")), ParseError::Trailing { line: 12 });
    }

    #[test]
    fn scripts_and_schedules_round_trip() {
        let s = standard_scheme(2, 2, 2).unwrap();
        let script = crate::witness::connectivity_path(&s, &strassen_scheme()).unwrap();
        let text = serialize_script(&script);
        assert_eq!(parse_script(&text, &s).unwrap(), script);
        let sched = crate::search::default_schedule(3, 4, 5, 1000).unwrap();
        assert_eq!(parse_schedule(&serialize_schedule(&sched)).unwrap(), sched);
    }

    #[test]
    fn manifest_round_trip() {
        let mut m = Manifest::default();
        m.set("dims", "2x2x2");
        m.set("seed", 7);
        m.set("seed", 8);
        assert_eq!(m.to_text(), "dims = 2x2x2\nseed = 8\n");
        assert_eq!(Manifest::parse(&m.to_text()).unwrap(), m);
    }
}
