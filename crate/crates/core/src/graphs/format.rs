//! graph6 (short form, `n <= 62`) and plain edge-list formats.

use super::Graph;
use crate::error::{Error, Result};

const HEADER: &str = ">>graph6<<";

/// Decode one graph6 line.
pub fn parse_graph6(text: &str) -> Result<Graph> {
    let line = text.trim_end_matches(['\n', '\r']);
    let (skip, body) = match line.strip_prefix(HEADER) {
        Some(rest) => (HEADER.len(), rest),
        None => (0, line),
    };
    let bytes = body.as_bytes();
    let err = |offset: usize, message: String| Error::Graph6 { offset: offset + skip, message };
    let first = *bytes.first().ok_or_else(|| err(0, "empty input".into()))?;
    if first == b'~' {
        return Err(err(0, "long-form graph6 (n > 62) is not supported".into()));
    }
    if !(63..=126).contains(&first) {
        return Err(err(0, format!("byte {first} is not a graph6 character")));
    }
    let n = (first - 63) as usize;
    let bits = n * n.saturating_sub(1) / 2;
    let need = bits.div_ceil(6);
    let data = &bytes[1..];
    if data.len() < need {
        return Err(err(bytes.len(), format!("truncated: {n} vertices need {need} data bytes, found {}", data.len())));
    }
    if data.len() > need {
        return Err(err(1 + need, format!("{} unexpected trailing bytes", data.len() - need)));
    }
    let mut g = Graph::empty(n);
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = data[k / 6];
            if !(63..=126).contains(&byte) {
                return Err(err(1 + k / 6, format!("byte {byte} is not a graph6 character")));
            }
            if (byte - 63) >> (5 - k % 6) & 1 == 1 {
                g.add_edge(i, j)?;
            }
            k += 1;
        }
    }
    if let Some((pos, &b)) = data.iter().enumerate().find(|(_, b)| !(63..=126).contains(*b)) {
        return Err(err(1 + pos, format!("byte {b} is not a graph6 character")));
    }
    Ok(g)
}

/// Decode one graph per non-empty line.
pub fn parse_graph6_lines(text: &str) -> Vec<Result<Graph>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(parse_graph6).collect()
}

/// Encode in short-form graph6.
pub fn to_graph6(g: &Graph) -> Result<String> {
    let n = g.n();
    if n > 62 {
        return Err(Error::InvalidArgument(format!("graph6 short form needs n <= 62, got {n}")));
    }
    let mut out = vec![(n as u8) + 63];
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 bytes are ASCII"))
}

/// `u v` per line, 0-indexed, `#` starts a comment. The vertex count is one
/// more than the largest index.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::EdgeList { line: lineno + 1, message };
        let mut parts = line.split_whitespace();
        let mut next = || -> Result<usize> {
            parts
                .next()
                .ok_or_else(|| err("expected two vertex indices".into()))?
                .parse::<usize>()
                .map_err(|e| err(e.to_string()))
        };
        let (u, v) = (next()?, next()?);
        if parts.next().is_some() {
            return Err(err("expected exactly two fields".into()));
        }
        if u == v {
            return Err(err(format!("self-loop at {u}")));
        }
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v));
    }
    Graph::from_edges(n, &edges)
}
