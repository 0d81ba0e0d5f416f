use super::Network;
use crate::error::{Error, Result};

/// Parses whitespace-separated `a b` pairs. `#` starts a comment; a
/// `# nodes: N` comment fixes the node count, otherwise it is the largest
/// id plus one. Duplicate edges collapse; self-loops are rejected.
pub(super) fn parse(text: &str) -> Result<Network> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_id: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let at = || format!("line {line_no}");
        let (body, comment) = match raw.split_once('#') {
            Some((b, c)) => (b, Some(c)),
            None => (raw, None),
        };
        if let Some(c) = comment {
            if let Some(rest) = c.trim().strip_prefix("nodes:") {
                let n = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::parse(at(), format!("bad node-count header {:?}", rest.trim())))?;
                declared = Some(n);
            }
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 2 {
            return Err(Error::parse(at(), format!("expected two node ids, found {} tokens", tokens.len())));
        }
        let mut ids = [0usize; 2];
        for (slot, tok) in ids.iter_mut().zip(&tokens) {
            *slot = tok
                .parse::<usize>()
                .map_err(|_| Error::parse(at(), format!("node id {tok:?} is not a non-negative integer")))?;
        }
        if ids[0] == ids[1] {
            return Err(Error::parse(at(), format!("self-loop at node {}", ids[0])));
        }
        max_id = Some(max_id.unwrap_or(0).max(ids[0]).max(ids[1]));
        edges.push((ids[0], ids[1], line_no));
    }
    let implied = max_id.map_or(0, |m| m + 1);
    let node_count = match declared {
        Some(n) if n < implied => {
            return Err(Error::parse(
                "header",
                format!("declared {n} nodes but ids reach {}", implied - 1),
            ))
        }
        Some(n) => n,
        None => implied,
    };
    let mut g = Network::empty(node_count);
    for (a, b, _) in edges {
        g.add_edge(a, b)?;
    }
    Ok(g)
}
