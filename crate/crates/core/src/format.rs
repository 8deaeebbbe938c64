//! Plain-text family format.
//!
//! ```text
//! # comment
//! n=6
//! {}
//! 1,2,3
//! 1,2,3,4,5,6
//! ```
//!
//! The first content line declares the ground size; every following nonblank
//! line is one member, `{}` for the empty set or ascending comma-separated
//! labels. Lines starting with `#` are ignored. Duplicate members are an
//! error.

use std::fmt::Write as _;

use thiserror::Error;

use crate::family::{FamilyError, SetFamily};
use crate::mask::{SubsetMask, MAX_GROUND};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing `n=<int>` header")]
    MissingHeader,
    #[error("invalid header {0:?}, expected `n=<int>`")]
    BadHeader(String),
    #[error("ground size {0} is outside 2..={MAX_GROUND}")]
    GroundSize(u32),
    #[error("invalid element label {0:?}")]
    BadLabel(String),
    #[error("label {label} is outside 1..={n}")]
    LabelOutOfRange { label: u32, n: u8 },
    #[error("labels must be strictly ascending")]
    NotAscending,
    #[error("expected a single family, found another `n=` header")]
    MultipleFamilies,
    #[error("duplicate member {member} (first seen on line {first})")]
    Duplicate { member: SubsetMask, first: usize },
}

impl ParseError {
    fn at(line: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, kind }
    }
}

/// Parses a single family.
pub fn parse_family(text: &str) -> Result<SetFamily, ParseError> {
    let mut families = parse_family_stream(text)?;
    match families.len() {
        0 => Err(ParseError::at(
            text.lines().count().max(1),
            ParseErrorKind::MissingHeader,
        )),
        1 => Ok(families.pop().unwrap()),
        _ => {
            let line = second_header_line(text);
            Err(ParseError::at(line, ParseErrorKind::MultipleFamilies))
        }
    }
}

fn second_header_line(text: &str) -> usize {
    text.lines()
        .enumerate()
        .filter(|(_, l)| l.trim().starts_with("n="))
        .nth(1)
        .map(|(i, _)| i + 1)
        .unwrap_or(1)
}

/// Parses a sequence of families; each `n=<int>` line starts a new one.
pub fn parse_family_stream(text: &str) -> Result<Vec<SetFamily>, ParseError> {
    struct Pending {
        n: u8,
        members: Vec<(SubsetMask, usize)>,
    }

    fn finish(p: Pending) -> Result<SetFamily, ParseError> {
        let mut sorted = p.members.clone();
        sorted.sort_by_key(|&(m, line)| (m, line));
        if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(ParseError::at(
                w[1].1,
                ParseErrorKind::Duplicate {
                    member: w[0].0,
                    first: w[0].1,
                },
            ));
        }
        let members = p.members.into_iter().map(|(m, _)| m).collect();
        Ok(SetFamily::new(p.n, members).expect("members validated while parsing"))
    }

    let mut out = Vec::new();
    let mut current: Option<Pending> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if let Some(rest) = content.strip_prefix("n=") {
            if let Some(p) = current.take() {
                out.push(finish(p)?);
            }
            let n: u32 = rest.trim().parse().map_err(|_| {
                ParseError::at(line, ParseErrorKind::BadHeader(content.to_string()))
            })?;
            if !(2..=MAX_GROUND as u32).contains(&n) {
                return Err(ParseError::at(line, ParseErrorKind::GroundSize(n)));
            }
            current = Some(Pending {
                n: n as u8,
                members: Vec::new(),
            });
            continue;
        }
        let Some(p) = current.as_mut() else {
            return Err(ParseError::at(line, ParseErrorKind::MissingHeader));
        };
        let mask = parse_member(content, p.n).map_err(|kind| ParseError::at(line, kind))?;
        p.members.push((mask, line));
    }
    if let Some(p) = current.take() {
        out.push(finish(p)?);
    }
    Ok(out)
}

/// Parses one member line (`{}` or `1,2,3`) over a ground set of size `n`.
pub fn parse_member(token: &str, n: u8) -> Result<SubsetMask, ParseErrorKind> {
    let token = token.trim();
    if token == "{}" {
        return Ok(SubsetMask::EMPTY);
    }
    let mut bits = 0u16;
    let mut last = 0u32;
    for part in token.split(',') {
        let part = part.trim();
        let label: u32 = part
            .parse()
            .map_err(|_| ParseErrorKind::BadLabel(part.to_string()))?;
        if label == 0 || label > n as u32 {
            return Err(ParseErrorKind::LabelOutOfRange { label, n });
        }
        if label <= last {
            return Err(ParseErrorKind::NotAscending);
        }
        last = label;
        bits |= 1 << (label - 1);
    }
    Ok(SubsetMask::from_bits(bits))
}

/// Renders a family in the text format, one member per line.
pub fn format_family(family: &SetFamily) -> String {
    let mut out = String::new();
    writeln!(out, "n={}", family.n()).unwrap();
    for m in family.members() {
        writeln!(out, "{m}").unwrap();
    }
    out
}

/// Single-line rendering used inside reports: members separated by spaces,
/// e.g. `n=6: {} 1,2,3 1,2,3,4,5,6`.
pub fn format_family_inline(family: &SetFamily) -> String {
    let mut out = format!("n={}:", family.n());
    for m in family.members() {
        write!(out, " {m}").unwrap();
    }
    out
}

/// Inverse of [`format_family_inline`].
pub fn parse_family_inline(text: &str) -> Result<SetFamily, ParseError> {
    let err = |kind| ParseError::at(1, kind);
    let (head, rest) = text
        .split_once(':')
        .ok_or_else(|| err(ParseErrorKind::MissingHeader))?;
    let n: u32 = head
        .trim()
        .strip_prefix("n=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err(ParseErrorKind::BadHeader(head.to_string())))?;
    if !(2..=MAX_GROUND as u32).contains(&n) {
        return Err(err(ParseErrorKind::GroundSize(n)));
    }
    let members = rest
        .split_whitespace()
        .map(|tok| parse_member(tok, n as u8).map_err(err))
        .collect::<Result<Vec<_>, _>>()?;
    SetFamily::new(n as u8, members).map_err(|e| match e {
        FamilyError::DuplicateMember(member) => err(ParseErrorKind::Duplicate { member, first: 1 }),
        other => err(ParseErrorKind::BadLabel(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_blank_lines() {
        let f = parse_family("# example\nn=6\n\n1,2,3\n{}\n# mid\n1,2,3,4,5,6\n").unwrap();
        assert_eq!(f.n(), 6);
        assert_eq!(
            f.members()
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>(),
            vec!["{}", "1,2,3", "1,2,3,4,5,6"]
        );
    }

    #[test]
    fn empty_file_is_an_error() {
        let e = parse_family("").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingHeader);
        let e = parse_family("# only a comment\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingHeader);
    }

    #[test]
    fn duplicate_reports_second_occurrence() {
        let e = parse_family("n=4\n1,2\n{}\n1,2\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(matches!(e.kind, ParseErrorKind::Duplicate { first: 2, .. }));
    }

    #[test]
    fn rejects_malformed_members() {
        assert_eq!(
            parse_family("n=3\n1,4\n").unwrap_err(),
            ParseError::at(2, ParseErrorKind::LabelOutOfRange { label: 4, n: 3 })
        );
        assert_eq!(
            parse_family("n=3\n2,1\n").unwrap_err().kind,
            ParseErrorKind::NotAscending
        );
        assert!(matches!(
            parse_family("n=3\n1;2\n").unwrap_err().kind,
            ParseErrorKind::BadLabel(_)
        ));
        assert_eq!(
            parse_family("1,2\n").unwrap_err(),
            ParseError::at(1, ParseErrorKind::MissingHeader)
        );
        assert_eq!(
            parse_family("n=13\n").unwrap_err().kind,
            ParseErrorKind::GroundSize(13)
        );
        assert!(matches!(
            parse_family("n=six\n").unwrap_err().kind,
            ParseErrorKind::BadHeader(_)
        ));
    }

    #[test]
    fn stream_splits_on_headers() {
        let fs = parse_family_stream("n=2\n{}\n1,2\n\nn=3\n{}\n").unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[1].n(), 3);
        assert!(parse_family("n=2\n{}\nn=3\n{}\n").is_err());
    }

    #[test]
    fn inline_round_trip() {
        let f = parse_family("n=6\n{}\n1,2,3\n4,5,6\n1,2,3,4,5,6\n").unwrap();
        let s = format_family_inline(&f);
        assert_eq!(s, "n=6: {} 1,2,3 4,5,6 1,2,3,4,5,6");
        assert_eq!(parse_family_inline(&s).unwrap(), f);
    }
}
