use crate::error::{Error, Result};

/// Parses the edge-list format: one whitespace-separated `u v` pair per
/// line, `#` starts a comment. Returns `(order, edges)` with
/// `order = max vertex + 1`.
pub fn parse_edge_list(text: &str) -> Result<(u64, Vec<(u64, u64)>)> {
    let mut edges = Vec::new();
    let mut order = 0u64;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| Error::Parse(format!("line {}: `{s}` is not a vertex", lineno + 1)))
        };
        match nums.as_slice() {
            [u, v] => {
                let (u, v) = (parse(u)?, parse(v)?);
                order = order.max(u + 1).max(v + 1);
                edges.push((u, v));
            }
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: expected exactly two vertices",
                    lineno + 1
                )))
            }
        }
    }
    if edges.is_empty() {
        return Err(Error::Parse("edge list has no edges".into()));
    }
    Ok((order, edges))
}

pub(crate) fn build_adjacency(order: u64, edges: &[(u64, u64)]) -> Result<Vec<Vec<u32>>> {
    if order == 0 || order > u64::from(u32::MAX) {
        return Err(Error::InvalidParameter(format!(
            "explicit graph order {order} out of range"
        )));
    }
    let mut adj = vec![Vec::new(); order as usize];
    for &(u, v) in edges {
        if u >= order || v >= order {
            return Err(Error::InvalidParameter(format!(
                "edge ({u},{v}) outside 0..{order}"
            )));
        }
        if u == v {
            return Err(Error::NotSimple(format!("self-loop at {u}")));
        }
        adj[u as usize].push(v as u32);
        adj[v as usize].push(u as u32);
    }
    for (u, list) in adj.iter_mut().enumerate() {
        list.sort_unstable();
        if list.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotSimple(format!("repeated edge at vertex {u}")));
        }
    }
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &w in &adj[u] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w as usize);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Disconnected);
    }
    Ok(adj)
}
