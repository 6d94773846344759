//! Graph exchange formats.
//!
//! **Text.** A file is a sequence of records. A record is a line holding the
//! vertex count `V`, followed by exactly `V` lines; line `i` lists the
//! neighbors of vertex `i` (0-indexed, whitespace separated) in clockwise
//! order. Blank lines and lines starting with `#` may appear between records.
//! The writer emits records separated by one blank line, with a single space
//! between ids and LF line endings:
//!
//! ```text
//! 4
//! 1 3 2
//! 0 2 3
//! 0 3 1
//! 0 1 2
//! ```
//!
//! **Binary (planar code).** An optional 15-byte header `>>planar_code<<`,
//! then records. A record is one byte `V` (1..=255), then for each vertex its
//! clockwise neighbor list as 1-based byte ids terminated by a `0` byte. The
//! writer always emits the header.

use thiserror::Error;

use super::{CombError, RotationSystem};

pub const PLANAR_CODE_HEADER: &[u8] = b">>planar_code<<";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("record starting at line {line}: {source}")]
    Invalid { line: usize, source: CombError },
    #[error("binary record {index}: {msg}")]
    Binary { index: usize, msg: String },
    #[error("vertex count {0} does not fit the binary format")]
    TooLarge(usize),
}

pub fn read_text(input: &str) -> Result<Vec<RotationSystem>, ParseError> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut out = Vec::new();
    loop {
        let Some((header_line, header)) = lines.by_ref().find(|(_, l)| !l.is_empty() && !l.starts_with('#')) else {
            break;
        };
        let n: usize = header.parse().map_err(|_| ParseError::Syntax {
            line: header_line,
            msg: format!("expected a vertex count, found `{header}`"),
        })?;
        if n == 0 {
            return Err(ParseError::Syntax { line: header_line, msg: "vertex count must be positive".into() });
        }
        let mut rot = Vec::with_capacity(n);
        for v in 0..n {
            let Some((line, text)) = lines.next() else {
                return Err(ParseError::Syntax {
                    line: header_line + v + 1,
                    msg: format!("unexpected end of input: record declares {n} vertices, found {v}"),
                });
            };
            let nbrs = text
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| ParseError::Syntax { line, msg: format!("bad vertex id `{tok}`") })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if nbrs.is_empty() && n > 1 {
                return Err(ParseError::Syntax { line, msg: format!("vertex {v} has no neighbors") });
            }
            rot.push(nbrs);
        }
        let rs = RotationSystem::new(rot).map_err(|source| ParseError::Invalid { line: header_line, source })?;
        out.push(rs);
    }
    Ok(out)
}

pub fn write_text(maps: &[RotationSystem]) -> String {
    let mut s = String::new();
    for (k, rs) in maps.iter().enumerate() {
        if k > 0 {
            s.push('\n');
        }
        s.push_str(&format!("{}\n", rs.vertex_count()));
        for rot in rs.rotations() {
            let ids: Vec<String> = rot.iter().map(usize::to_string).collect();
            s.push_str(&ids.join(" "));
            s.push('\n');
        }
    }
    s
}

pub fn read_planar_code(bytes: &[u8]) -> Result<Vec<RotationSystem>, ParseError> {
    let mut data = bytes.strip_prefix(PLANAR_CODE_HEADER).unwrap_or(bytes);
    let mut out = Vec::new();
    while let Some((&n, rest)) = data.split_first() {
        let index = out.len();
        let n = n as usize;
        if n == 0 {
            return Err(ParseError::Binary { index, msg: "zero vertex count".into() });
        }
        data = rest;
        let mut rot = Vec::with_capacity(n);
        for v in 0..n {
            let end = data.iter().position(|&b| b == 0).ok_or_else(|| ParseError::Binary {
                index,
                msg: format!("neighbor list of vertex {v} is not terminated"),
            })?;
            let list = data[..end]
                .iter()
                .map(|&b| {
                    let u = b as usize;
                    if u > n {
                        Err(ParseError::Binary { index, msg: format!("neighbor {u} out of range") })
                    } else {
                        Ok(u - 1)
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            rot.push(list);
            data = &data[end + 1..];
        }
        let rs = RotationSystem::new(rot).map_err(|e| ParseError::Binary { index, msg: e.to_string() })?;
        out.push(rs);
    }
    Ok(out)
}

pub fn write_planar_code(maps: &[RotationSystem]) -> Result<Vec<u8>, ParseError> {
    let mut out = PLANAR_CODE_HEADER.to_vec();
    for rs in maps {
        let n = rs.vertex_count();
        if n > 255 {
            return Err(ParseError::TooLarge(n));
        }
        out.push(n as u8);
        for rot in rs.rotations() {
            out.extend(rot.iter().map(|&u| (u + 1) as u8));
            out.push(0);
        }
    }
    Ok(out)
}
