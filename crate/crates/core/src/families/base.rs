use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A small connected factor of a Cartesian product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "base", content = "size", rename_all = "snake_case")]
pub enum BaseSpec {
    /// Path on `len` vertices.
    Path(u32),
    /// Cycle on `len` vertices.
    Cycle(u32),
    /// Complete graph on `len` vertices.
    Complete(u32),
    /// Star with one centre and `leaves` leaves.
    Star(u32),
}

impl fmt::Display for BaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseSpec::Path(k) => write!(f, "path:{k}"),
            BaseSpec::Cycle(k) => write!(f, "cycle:{k}"),
            BaseSpec::Complete(k) => write!(f, "complete:{k}"),
            BaseSpec::Star(k) => write!(f, "star:{k}"),
        }
    }
}

impl FromStr for BaseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "edge" {
            return Ok(BaseSpec::Path(2));
        }
        let (kind, size) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("base graph `{s}` must look like kind:size")))?;
        let size: u32 = size
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad base graph size in `{s}`")))?;
        match kind.trim() {
            "path" | "P" => Ok(BaseSpec::Path(size)),
            "cycle" | "C" => Ok(BaseSpec::Cycle(size)),
            "complete" | "K" => Ok(BaseSpec::Complete(size)),
            "star" | "S" => Ok(BaseSpec::Star(size)),
            other => Err(Error::Parse(format!("unknown base graph kind `{other}`"))),
        }
    }
}

/// Materialised base graph: adjacency lists and all-pairs distances.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseGraph {
    pub spec: BaseSpec,
    pub adj: Vec<Vec<u32>>,
    pub dist: Vec<Vec<u32>>,
}

impl BaseGraph {
    pub fn new(spec: BaseSpec) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("{spec}: {msg}")));
        let edges: Vec<(u32, u32)> = match spec {
            BaseSpec::Path(k) => {
                if k < 2 {
                    return bad("paths need at least 2 vertices");
                }
                (1..k).map(|i| (i - 1, i)).collect()
            }
            BaseSpec::Cycle(k) => {
                if k < 3 {
                    return bad("cycles need at least 3 vertices");
                }
                (0..k).map(|i| (i, (i + 1) % k)).collect()
            }
            BaseSpec::Complete(k) => {
                if k < 2 {
                    return bad("complete graphs need at least 2 vertices");
                }
                (0..k)
                    .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                    .collect()
            }
            BaseSpec::Star(k) => {
                if k < 1 {
                    return bad("stars need at least one leaf");
                }
                (1..=k).map(|i| (0, i)).collect()
            }
        };
        let n = match spec {
            BaseSpec::Star(k) => k + 1,
            BaseSpec::Path(k) | BaseSpec::Cycle(k) | BaseSpec::Complete(k) => k,
        } as usize;
        if n > 1 << 16 {
            return bad("base graph too large");
        }
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        adj.iter_mut().for_each(|l| l.sort_unstable());
        let dist = (0..n)
            .map(|s| {
                let mut d = vec![u32::MAX; n];
                d[s] = 0;
                let mut queue = std::collections::VecDeque::from([s]);
                while let Some(u) = queue.pop_front() {
                    for &w in &adj[u] {
                        if d[w as usize] == u32::MAX {
                            d[w as usize] = d[u] + 1;
                            queue.push_back(w as usize);
                        }
                    }
                }
                d
            })
            .collect();
        Ok(Self { spec, adj, dist })
    }

    pub fn size(&self) -> usize {
        self.adj.len()
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }
}
