//! Implicit-graph contract and bounded-radius traversal (balls, spheres,
//! capped distances).
//!
//! Graphs here are never materialised: every traversal walks the owning
//! family's neighbour generator and keeps its own visited map, so the same
//! code serves a 10-vertex Petersen graph and a 2^24-vertex hypercube.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on vertices visited by a single traversal.
pub const DEFAULT_VISIT_BUDGET: usize = 1 << 26;

/// Opaque single-word vertex handle; its meaning is defined by the owning
/// family (bitmask, subset mask or mixed-radix index).
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct VertexId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Read-only view of an undirected simple graph given implicitly.
pub trait Graph: Sync {
    fn order(&self) -> u64;

    fn contains(&self, v: VertexId) -> bool;

    /// Calls `f` on every neighbour of `v` in the family's generation order.
    /// `v` must be a vertex of the graph.
    fn for_each_neighbour<F: FnMut(VertexId)>(&self, v: VertexId, f: F);

    fn degree(&self, v: VertexId) -> usize {
        let mut d = 0;
        self.for_each_neighbour(v, |_| d += 1);
        d
    }

    /// All vertices in ascending encoding order.
    fn vertices(&self) -> Vec<VertexId>;

    /// Membership of `y` in the non-typical set `D` of centre `x`.
    ///
    /// Families without a coordinate irregularity report `false`
    /// everywhere; families whose `D` is only known locally return
    /// [`Error::NotEvaluated`] outside that radius.
    fn nontypical(&self, x: VertexId, y: VertexId) -> Result<bool>;

    fn label(&self, v: VertexId) -> String {
        v.0.to_string()
    }

    fn neighbours(&self, v: VertexId) -> Result<Neighbourhood> {
        if !self.contains(v) {
            return Err(Error::InvalidVertex(v));
        }
        let mut members = Vec::new();
        self.for_each_neighbour(v, |w| members.push(w));
        members.sort_unstable();
        Ok(Neighbourhood { center: v, members })
    }

    fn is_adjacent(&self, u: VertexId, v: VertexId) -> bool {
        let mut hit = false;
        self.for_each_neighbour(u, |w| hit |= w == v);
        hit
    }
}

/// Neighbour list of a vertex, sorted by encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Neighbourhood {
    pub center: VertexId,
    pub members: Vec<VertexId>,
}

impl Neighbourhood {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// BFS layers around a centre up to a fixed radius. Layer `i` is the sphere
/// of radius `i`; each layer is sorted by encoding.
#[derive(Clone, Debug)]
pub struct BallView {
    pub center: VertexId,
    pub radius: u32,
    pub layers: Vec<Vec<VertexId>>,
    dist: FxHashMap<VertexId, u32>,
}

impl BallView {
    pub fn layer(&self, i: u32) -> &[VertexId] {
        self.layers.get(i as usize).map_or(&[], |l| l.as_slice())
    }

    pub fn distance_of(&self, v: VertexId) -> Option<u32> {
        self.dist.get(&v).copied()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.dist.contains_key(&v)
    }

    pub fn size(&self) -> usize {
        self.dist.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.layers.iter().flatten().copied()
    }
}

pub fn ball<G: Graph>(graph: &G, x: VertexId, radius: u32) -> Result<BallView> {
    ball_with_budget(graph, x, radius, DEFAULT_VISIT_BUDGET)
}

pub fn ball_with_budget<G: Graph>(
    graph: &G,
    x: VertexId,
    radius: u32,
    budget: usize,
) -> Result<BallView> {
    if !graph.contains(x) {
        return Err(Error::InvalidVertex(x));
    }
    let mut dist = FxHashMap::default();
    dist.insert(x, 0);
    let mut layers = vec![vec![x]];
    for level in 1..=radius {
        let mut next = Vec::new();
        for &u in layers.last().expect("non-empty") {
            graph.for_each_neighbour(u, |w| {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                    e.insert(level);
                    next.push(w);
                }
            });
            if dist.len() > budget {
                return Err(Error::BudgetExceeded { budget });
            }
        }
        next.sort_unstable();
        layers.push(next);
    }
    Ok(BallView {
        center: x,
        radius,
        layers,
        dist,
    })
}

pub fn sphere<G: Graph>(graph: &G, x: VertexId, radius: u32) -> Result<Vec<VertexId>> {
    let mut b = ball(graph, x, radius)?;
    Ok(b.layers.pop().unwrap_or_default())
}

/// Exact distance if it is at most `cap`, `None` otherwise.
pub fn distance_within<G: Graph>(
    graph: &G,
    x: VertexId,
    y: VertexId,
    cap: u32,
) -> Result<Option<u32>> {
    for v in [x, y] {
        if !graph.contains(v) {
            return Err(Error::InvalidVertex(v));
        }
    }
    if x == y {
        return Ok(Some(0));
    }
    let mut seen = rustc_hash::FxHashSet::default();
    seen.insert(x);
    let mut frontier = vec![x];
    for level in 1..=cap {
        let mut next = Vec::new();
        let mut found = false;
        for &u in &frontier {
            graph.for_each_neighbour(u, |w| {
                found |= w == y;
                if seen.insert(w) {
                    next.push(w);
                }
            });
            if found {
                return Ok(Some(level));
            }
        }
        if seen.len() > DEFAULT_VISIT_BUDGET {
            return Err(Error::BudgetExceeded {
                budget: DEFAULT_VISIT_BUDGET,
            });
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(None)
}
