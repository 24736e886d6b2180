//! Implicit constructions of the geometric graph families: hypercubes,
//! Cartesian products (Hamming graphs, tori, grids), middle layer graphs,
//! odd graphs, folded hypercubes, plus explicit edge-list graphs.
//!
//! Vertex encodings:
//! * hypercube `n` and folded `n`: bitmask over `n` (resp. `n - 1`)
//!   coordinates, bit `i` is coordinate `i`;
//! * middle layer `n`: `(2n-1)`-bit mask of popcount `n-1` or `n`;
//! * odd `n`: `(2n-1)`-bit mask of popcount `n-1` (element `i+1` of the
//!   ground set is bit `i`);
//! * products: mixed-radix integer, coordinate 0 least significant;
//! * explicit graphs: the vertex number from the edge list.

mod base;
pub mod combinadic;
mod edge_list;
mod local_iso;
mod projection;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use base::{BaseGraph, BaseSpec};
pub use edge_list::parse_edge_list;
pub use local_iso::local_iso_check;
pub use projection::{Constraint, Projectable, Projection};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use combinadic::{binomial, rank, unrank};

/// Which graph to build.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    Hypercube {
        n: u32,
    },
    Product {
        bases: Vec<BaseSpec>,
    },
    /// `K_q^n`.
    Hamming {
        n: u32,
        q: u32,
    },
    /// Product of cycles.
    Torus {
        dims: Vec<u32>,
    },
    /// Product of paths.
    Grid {
        dims: Vec<u32>,
    },
    MiddleLayer {
        n: u32,
    },
    Odd {
        n: u32,
    },
    Folded {
        n: u32,
    },
    /// Simple connected graph on `0..order`, with a user-declared `K`.
    Explicit {
        order: u64,
        edges: Vec<(u64, u64)>,
        k: u32,
    },
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Hypercube { n } => write!(f, "hypercube {n}"),
            FamilySpec::Product { bases } => {
                let parts: Vec<String> = bases.iter().map(ToString::to_string).collect();
                write!(f, "product [{}]", parts.join(" x "))
            }
            FamilySpec::Hamming { n, q } => write!(f, "hamming ({n},{q})"),
            FamilySpec::Torus { dims } => write!(f, "torus {dims:?}"),
            FamilySpec::Grid { dims } => write!(f, "grid {dims:?}"),
            FamilySpec::MiddleLayer { n } => write!(f, "middle_layer {n}"),
            FamilySpec::Odd { n } => write!(f, "odd {n}"),
            FamilySpec::Folded { n } => write!(f, "folded {n}"),
            FamilySpec::Explicit { order, edges, .. } => {
                write!(f, "explicit ({order} vertices, {} edges)", edges.len())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Topology {
    Cube {
        dim: u32,
    },
    /// `bits = n - 1` coordinates plus the antipodal edge.
    Folded {
        bits: u32,
    },
    MiddleLayer {
        n: u32,
    },
    Odd {
        n: u32,
    },
    Product {
        bases: Vec<BaseGraph>,
        strides: Vec<u64>,
    },
    Explicit {
        adj: Vec<Vec<u32>>,
    },
}

/// An immutable implicit graph with its structural metadata.
#[derive(Clone, Debug)]
pub struct GraphFamily {
    spec: FamilySpec,
    pub(crate) topo: Topology,
    order: u64,
    canonical_k: u32,
    min_degree: usize,
    max_degree: usize,
}

#[inline]
fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Distance in the odd graph `O_n` between `(n-1)`-subsets sharing all but
/// `j` elements.
fn odd_distance(n: u32, j: u32) -> u32 {
    (2 * j).min(2 * (n - 1 - j) + 1)
}

pub fn make_family(spec: FamilySpec) -> Result<GraphFamily> {
    GraphFamily::new(spec)
}

impl GraphFamily {
    pub fn new(spec: FamilySpec) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let product = |bases: Vec<BaseSpec>| -> Result<(Topology, u64, u32, usize, usize)> {
            if bases.is_empty() {
                return Err(Error::InvalidParameter(
                    "product needs n >= 1 factors".into(),
                ));
            }
            let bases = bases
                .into_iter()
                .map(BaseGraph::new)
                .collect::<Result<Vec<_>>>()?;
            let mut strides = Vec::with_capacity(bases.len());
            let mut order: u64 = 1;
            for b in &bases {
                strides.push(order);
                order = order
                    .checked_mul(b.size() as u64)
                    .filter(|&o| o <= 1 << 63)
                    .ok_or_else(|| {
                        Error::InvalidParameter("product order exceeds one machine word".into())
                    })?;
            }
            let k = bases.iter().map(BaseGraph::size).max().unwrap_or(1) as u32;
            let dmin = bases.iter().map(BaseGraph::min_degree).sum();
            let dmax = bases.iter().map(BaseGraph::max_degree).sum();
            Ok((Topology::Product { bases, strides }, order, k, dmin, dmax))
        };
        let (topo, order, canonical_k, min_degree, max_degree) = match &spec {
            FamilySpec::Hypercube { n } => {
                if !(1..=63).contains(n) {
                    return bad(format!("hypercube dimension {n} not in 1..=63"));
                }
                (
                    Topology::Cube { dim: *n },
                    1u64 << n,
                    2,
                    *n as usize,
                    *n as usize,
                )
            }
            FamilySpec::Folded { n } => {
                if !(3..=64).contains(n) {
                    return bad(format!("folded hypercube dimension {n} not in 3..=64"));
                }
                (
                    Topology::Folded { bits: n - 1 },
                    1u64 << (n - 1),
                    3,
                    *n as usize,
                    *n as usize,
                )
            }
            FamilySpec::MiddleLayer { n } => {
                if !(1..=32).contains(n) {
                    return bad(format!("middle layer dimension {n} not in 1..=32"));
                }
                let order = 2 * binomial(2 * n - 1, n - 1);
                (
                    Topology::MiddleLayer { n: *n },
                    order,
                    4,
                    *n as usize,
                    *n as usize,
                )
            }
            FamilySpec::Odd { n } => {
                if !(2..=32).contains(n) {
                    return bad(format!("odd graph dimension {n} not in 2..=32"));
                }
                let order = binomial(2 * n - 1, n - 1);
                (Topology::Odd { n: *n }, order, 4, *n as usize, *n as usize)
            }
            FamilySpec::Product { bases } => product(bases.clone())?,
            FamilySpec::Hamming { n, q } => {
                if *n < 1 {
                    return bad("hamming graph needs n >= 1".into());
                }
                product(vec![BaseSpec::Complete(*q); *n as usize])?
            }
            FamilySpec::Torus { dims } => {
                product(dims.iter().map(|&k| BaseSpec::Cycle(k)).collect())?
            }
            FamilySpec::Grid { dims } => {
                product(dims.iter().map(|&k| BaseSpec::Path(k)).collect())?
            }
            FamilySpec::Explicit { order, edges, k } => {
                let adj = edge_list::build_adjacency(*order, edges)?;
                let dmin = adj.iter().map(Vec::len).min().unwrap_or(0);
                let dmax = adj.iter().map(Vec::len).max().unwrap_or(0);
                if *k < 1 {
                    return bad("K must be at least 1".into());
                }
                (Topology::Explicit { adj }, *order, *k, dmin, dmax)
            }
        };
        Ok(Self {
            spec,
            topo,
            order,
            canonical_k,
            min_degree,
            max_degree,
        })
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn canonical_k(&self) -> u32 {
        self.canonical_k
    }

    pub fn min_degree(&self) -> usize {
        self.min_degree
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn is_regular(&self) -> bool {
        self.min_degree == self.max_degree
    }

    /// Number of bits in a cube-like encoding, if the family has one.
    fn width(&self) -> Option<u32> {
        match self.topo {
            Topology::Cube { dim } => Some(dim),
            Topology::Folded { bits } => Some(bits),
            Topology::MiddleLayer { n } | Topology::Odd { n } => Some(2 * n - 1),
            _ => None,
        }
    }

    /// Radius within which the non-typical oracle is defined (`None` when it
    /// is defined everywhere).
    pub fn local_radius(&self) -> Option<u32> {
        match self.topo {
            Topology::Odd { n } => Some(n.saturating_sub(2)),
            Topology::Folded { bits } => Some(bits.div_ceil(2).saturating_sub(1)),
            _ => None,
        }
    }

    /// Dense index in `0..order` of a vertex.
    #[inline]
    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        if !self.contains(v) {
            return None;
        }
        Some(self.index_unchecked(v))
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, v: VertexId) -> usize {
        match self.topo {
            Topology::MiddleLayer { n } => {
                if v.0.count_ones() == n - 1 {
                    rank(v.0) as usize
                } else {
                    (binomial(2 * n - 1, n - 1) + rank(v.0)) as usize
                }
            }
            Topology::Odd { .. } => rank(v.0) as usize,
            _ => v.0 as usize,
        }
    }

    /// Vertex with dense index `i`; inverse of [`index_of`](Self::index_of).
    #[inline]
    pub fn vertex_at(&self, i: usize) -> VertexId {
        debug_assert!((i as u64) < self.order);
        match self.topo {
            Topology::MiddleLayer { n } => {
                let half = binomial(2 * n - 1, n - 1);
                if (i as u64) < half {
                    VertexId(unrank(i as u64, n - 1))
                } else {
                    VertexId(unrank(i as u64 - half, n))
                }
            }
            Topology::Odd { n } => VertexId(unrank(i as u64, n - 1)),
            _ => VertexId(i as u64),
        }
    }

    #[inline]
    pub fn degree_at(&self, i: usize) -> usize {
        match &self.topo {
            Topology::Cube { dim } => *dim as usize,
            Topology::Folded { bits } => *bits as usize + 1,
            Topology::MiddleLayer { n } | Topology::Odd { n } => *n as usize,
            Topology::Explicit { adj } => adj[i].len(),
            Topology::Product { .. } => self.degree(VertexId(i as u64)),
        }
    }

    /// Neighbour enumeration on dense indices (the process engine's hot path).
    #[inline]
    pub fn for_each_neighbour_index<F: FnMut(usize)>(&self, i: usize, mut f: F) {
        match &self.topo {
            Topology::Cube { dim } => {
                for b in 0..*dim {
                    f(i ^ (1 << b));
                }
            }
            Topology::Folded { bits } => {
                for b in 0..*bits {
                    f(i ^ (1 << b));
                }
                f(i ^ low_mask(*bits) as usize);
            }
            Topology::Explicit { adj } => {
                for &w in &adj[i] {
                    f(w as usize);
                }
            }
            Topology::Product { .. } => {
                self.for_each_neighbour(VertexId(i as u64), |w| f(w.0 as usize))
            }
            Topology::MiddleLayer { .. } | Topology::Odd { .. } => {
                let v = self.vertex_at(i);
                self.for_each_neighbour(v, |w| f(self.index_unchecked(w)));
            }
        }
    }

    /// Closed-form distance where the family has one.
    pub fn exact_distance(&self, x: VertexId, y: VertexId) -> Option<u32> {
        match &self.topo {
            Topology::Cube { .. } | Topology::MiddleLayer { .. } => Some((x.0 ^ y.0).count_ones()),
            Topology::Folded { bits } => {
                let s = (x.0 ^ y.0).count_ones();
                Some(s.min(bits + 1 - s))
            }
            Topology::Odd { n } => Some(odd_distance(*n, (x.0 & !y.0).count_ones())),
            Topology::Product { bases, .. } => Some(
                self.coords(x)
                    .zip(self.coords(y))
                    .zip(bases)
                    .map(|((a, b), h)| h.dist[a as usize][b as usize])
                    .sum(),
            ),
            Topology::Explicit { .. } => None,
        }
    }

    /// Coordinates of a product vertex.
    pub(crate) fn coords(&self, v: VertexId) -> impl Iterator<Item = u32> + '_ {
        let (bases, strides): (&[BaseGraph], &[u64]) = match &self.topo {
            Topology::Product { bases, strides } => (bases, strides),
            _ => (&[], &[]),
        };
        bases
            .iter()
            .zip(strides)
            .map(move |(b, &s)| ((v.0 / s) % b.size() as u64) as u32)
    }

    /// Coordinates where two product vertices differ, `I(x, y)`.
    pub fn differing_coords(&self, x: VertexId, y: VertexId) -> Vec<usize> {
        self.coords(x)
            .zip(self.coords(y))
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i)
            .collect()
    }

    /// Parses a vertex label in the family's notation (see [`Graph::label`]).
    pub fn parse_vertex(&self, s: &str) -> Result<VertexId> {
        let s = s.trim();
        let err = || Error::Parse(format!("`{s}` is not a vertex label of {}", self.spec));
        let v = match &self.topo {
            Topology::Cube { .. } | Topology::Folded { .. } | Topology::MiddleLayer { .. } => {
                let width = self.width().unwrap_or(0) as usize;
                if s.len() != width || !s.bytes().all(|c| c == b'0' || c == b'1') {
                    return Err(err());
                }
                VertexId(
                    s.bytes()
                        .enumerate()
                        .fold(0, |m, (i, c)| m | (u64::from(c == b'1') << i)),
                )
            }
            Topology::Odd { .. } => {
                let inner = s.trim_start_matches('{').trim_end_matches('}');
                let mut mask = 0u64;
                for part in inner.split(|c: char| c == ',' || c.is_whitespace()) {
                    if part.is_empty() {
                        continue;
                    }
                    let e: u32 = part.parse().map_err(|_| err())?;
                    if e == 0 || e > 63 {
                        return Err(err());
                    }
                    mask |= 1 << (e - 1);
                }
                VertexId(mask)
            }
            Topology::Product { bases, strides } => {
                let inner = s.trim_start_matches('(').trim_end_matches(')');
                let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
                if parts.len() != bases.len() {
                    return Err(err());
                }
                let mut code = 0u64;
                for ((p, b), st) in parts.iter().zip(bases).zip(strides) {
                    let c: u64 = p.parse().map_err(|_| err())?;
                    if c >= b.size() as u64 {
                        return Err(err());
                    }
                    code += c * st;
                }
                VertexId(code)
            }
            Topology::Explicit { .. } => VertexId(s.parse().map_err(|_| err())?),
        };
        if self.contains(v) {
            Ok(v)
        } else {
            Err(err())
        }
    }
}

impl Graph for GraphFamily {
    fn order(&self) -> u64 {
        self.order
    }

    fn contains(&self, v: VertexId) -> bool {
        match self.topo {
            Topology::MiddleLayer { n } => {
                v.0 & !low_mask(2 * n - 1) == 0 && {
                    let w = v.0.count_ones();
                    w == n || w == n - 1
                }
            }
            Topology::Odd { n } => v.0 & !low_mask(2 * n - 1) == 0 && v.0.count_ones() == n - 1,
            _ => v.0 < self.order,
        }
    }

    #[inline]
    fn for_each_neighbour<F: FnMut(VertexId)>(&self, v: VertexId, mut f: F) {
        match &self.topo {
            Topology::Cube { dim } => {
                for b in 0..*dim {
                    f(VertexId(v.0 ^ (1 << b)));
                }
            }
            Topology::Folded { bits } => {
                for b in 0..*bits {
                    f(VertexId(v.0 ^ (1 << b)));
                }
                f(VertexId(v.0 ^ low_mask(*bits)));
            }
            Topology::MiddleLayer { n } => {
                let width = 2 * n - 1;
                // weight n-1 vertices gain a one, weight n vertices lose one
                let flippable = if v.0.count_ones() == n - 1 {
                    !v.0 & low_mask(width)
                } else {
                    v.0
                };
                let mut m = flippable;
                while m != 0 {
                    let bit = m & m.wrapping_neg();
                    f(VertexId(v.0 ^ bit));
                    m &= m - 1;
                }
            }
            Topology::Odd { n } => {
                let comp = !v.0 & low_mask(2 * n - 1);
                let mut m = comp;
                while m != 0 {
                    let bit = m & m.wrapping_neg();
                    f(VertexId(comp ^ bit));
                    m &= m - 1;
                }
            }
            Topology::Product { bases, strides } => {
                for (b, &s) in bases.iter().zip(strides) {
                    let c = (v.0 / s) % b.size() as u64;
                    let rest = v.0 - c * s;
                    for &w in &b.adj[c as usize] {
                        f(VertexId(rest + u64::from(w) * s));
                    }
                }
            }
            Topology::Explicit { adj } => {
                for &w in &adj[v.0 as usize] {
                    f(VertexId(u64::from(w)));
                }
            }
        }
    }

    fn degree(&self, v: VertexId) -> usize {
        match &self.topo {
            Topology::Product { bases, strides } => bases
                .iter()
                .zip(strides)
                .map(|(b, &s)| b.degree(((v.0 / s) % b.size() as u64) as u32))
                .sum(),
            Topology::Explicit { adj } => adj[v.0 as usize].len(),
            _ => self.degree_at(0),
        }
    }

    fn vertices(&self) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = (0..self.order as usize)
            .map(|i| self.vertex_at(i))
            .collect();
        vs.sort_unstable();
        vs
    }

    fn nontypical(&self, x: VertexId, y: VertexId) -> Result<bool> {
        for v in [x, y] {
            if !self.contains(v) {
                return Err(Error::InvalidVertex(v));
            }
        }
        if x == y {
            return Ok(false);
        }
        match &self.topo {
            Topology::Cube { .. } | Topology::MiddleLayer { .. } | Topology::Explicit { .. } => {
                Ok(false)
            }
            Topology::Product { .. } => {
                let dist = self.exact_distance(x, y).unwrap_or(0);
                Ok(self.differing_coords(x, y).len() as u32 != dist)
            }
            Topology::Odd { .. } | Topology::Folded { .. } => {
                let radius = self.local_radius().unwrap_or(0);
                let dist = self.exact_distance(x, y).unwrap_or(u32::MAX);
                if dist <= radius {
                    Ok(false)
                } else {
                    Err(Error::NotEvaluated { radius })
                }
            }
        }
    }

    fn label(&self, v: VertexId) -> String {
        match &self.topo {
            Topology::Cube { .. } | Topology::Folded { .. } | Topology::MiddleLayer { .. } => {
                let width = self.width().unwrap_or(0);
                (0..width)
                    .map(|i| if v.0 >> i & 1 == 1 { '1' } else { '0' })
                    .collect()
            }
            Topology::Odd { .. } => {
                let elems: Vec<String> = (0..64)
                    .filter(|i| v.0 >> i & 1 == 1)
                    .map(|i| (i + 1).to_string())
                    .collect();
                format!("{{{}}}", elems.join(","))
            }
            Topology::Product { .. } => {
                let c: Vec<String> = self.coords(v).map(|c| c.to_string()).collect();
                format!("({})", c.join(","))
            }
            Topology::Explicit { .. } => v.0.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ball, distance_within, sphere};

    fn fam(spec: FamilySpec) -> GraphFamily {
        GraphFamily::new(spec).unwrap()
    }

    #[test]
    fn closed_form_orders() {
        assert_eq!(fam(FamilySpec::Hypercube { n: 5 }).order(), 32);
        assert_eq!(fam(FamilySpec::MiddleLayer { n: 4 }).order(), 70);
        assert_eq!(fam(FamilySpec::Odd { n: 3 }).order(), 10);
        assert_eq!(fam(FamilySpec::Folded { n: 8 }).order(), 128);
        assert_eq!(fam(FamilySpec::Hamming { n: 3, q: 3 }).order(), 27);
        assert_eq!(fam(FamilySpec::Grid { dims: vec![3, 3] }).order(), 9);
    }

    #[test]
    fn invalid_parameters() {
        assert!(GraphFamily::new(FamilySpec::Hypercube { n: 0 }).is_err());
        assert!(GraphFamily::new(FamilySpec::Hypercube { n: 64 }).is_err());
        assert!(GraphFamily::new(FamilySpec::MiddleLayer { n: 33 }).is_err());
        assert!(GraphFamily::new(FamilySpec::Folded { n: 2 }).is_err());
        assert!(GraphFamily::new(FamilySpec::Torus { dims: vec![2] }).is_err());
        assert!(GraphFamily::new(FamilySpec::Product { bases: vec![] }).is_err());
    }

    #[test]
    fn canonical_k() {
        assert_eq!(fam(FamilySpec::Hypercube { n: 3 }).canonical_k(), 2);
        assert_eq!(fam(FamilySpec::MiddleLayer { n: 3 }).canonical_k(), 4);
        assert_eq!(fam(FamilySpec::Odd { n: 3 }).canonical_k(), 4);
        assert_eq!(fam(FamilySpec::Folded { n: 5 }).canonical_k(), 3);
        assert_eq!(fam(FamilySpec::Torus { dims: vec![4, 5] }).canonical_k(), 5);
    }

    #[test]
    fn odd_three_neighbours() {
        let g = fam(FamilySpec::Odd { n: 3 });
        let x = g.parse_vertex("{1,2}").unwrap();
        let labels: Vec<String> = g
            .neighbours(x)
            .unwrap()
            .members
            .iter()
            .map(|&v| g.label(v))
            .collect();
        assert_eq!(labels, vec!["{3,4}", "{3,5}", "{4,5}"]);
    }

    #[test]
    fn folded_three_is_k4() {
        let g = fam(FamilySpec::Folded { n: 3 });
        let x = g.parse_vertex("00").unwrap();
        let mut labels: Vec<String> = g
            .neighbours(x)
            .unwrap()
            .members
            .iter()
            .map(|&v| g.label(v))
            .collect();
        labels.sort();
        assert_eq!(labels, vec!["01", "10", "11"]);
        assert!(sphere(&g, x, 2).unwrap().is_empty());
    }

    #[test]
    fn middle_layer_two_is_hexagon() {
        let g = fam(FamilySpec::MiddleLayer { n: 2 });
        assert_eq!(g.order(), 6);
        for v in g.vertices() {
            assert_eq!(g.degree(v), 2);
            let s = sphere(&g, v, 3).unwrap();
            assert_eq!(s, vec![VertexId(!v.0 & 0b111)]);
        }
    }

    #[test]
    fn middle_layer_four_is_four_regular() {
        let g = fam(FamilySpec::MiddleLayer { n: 4 });
        for v in g.vertices() {
            assert_eq!(g.neighbours(v).unwrap().len(), 4);
        }
    }

    #[test]
    fn dense_index_round_trip() {
        for spec in [
            FamilySpec::MiddleLayer { n: 4 },
            FamilySpec::Odd { n: 4 },
            FamilySpec::Torus { dims: vec![3, 4] },
            FamilySpec::Folded { n: 5 },
        ] {
            let g = fam(spec);
            for i in 0..g.order() as usize {
                let v = g.vertex_at(i);
                assert!(g.contains(v));
                assert_eq!(g.index_of(v), Some(i));
                let mut a = Vec::new();
                g.for_each_neighbour_index(i, |j| a.push(g.vertex_at(j)));
                let mut b = Vec::new();
                g.for_each_neighbour(v, |w| b.push(w));
                assert_eq!(a, b);
                assert_eq!(g.degree_at(i), g.degree(v));
            }
        }
    }

    #[test]
    fn hypercube_ball_and_distances() {
        let g = fam(FamilySpec::Hypercube { n: 3 });
        let b = ball(&g, VertexId(0), 1).unwrap();
        let layer1: Vec<String> = b.layer(1).iter().map(|&v| g.label(v)).collect();
        assert_eq!(layer1, vec!["100", "010", "001"]);
        assert_eq!(sphere(&g, VertexId(0), 3).unwrap(), vec![VertexId(0b111)]);
        let q4 = fam(FamilySpec::Hypercube { n: 4 });
        assert_eq!(ball(&q4, VertexId(0), 2).unwrap().layer(2).len(), 6);
        let (a, c) = (
            q4.parse_vertex("0011").unwrap(),
            q4.parse_vertex("1100").unwrap(),
        );
        assert_eq!(distance_within(&q4, a, c, 6).unwrap(), Some(4));
        assert_eq!(distance_within(&q4, a, c, 3).unwrap(), None);
    }

    #[test]
    fn odd_three_distance_is_two() {
        // {1,2} and {1,3} share the unique common neighbour {4,5}
        let g = fam(FamilySpec::Odd { n: 3 });
        let (x, y) = (
            g.parse_vertex("{1,2}").unwrap(),
            g.parse_vertex("{1,3}").unwrap(),
        );
        assert_eq!(distance_within(&g, x, y, 6).unwrap(), Some(2));
        assert_eq!(g.exact_distance(x, y), Some(2));
    }

    #[test]
    fn product_nontypical() {
        let c4 = fam(FamilySpec::Torus { dims: vec![4, 4] });
        let x = c4.parse_vertex("(0,0)").unwrap();
        assert!(c4.nontypical(x, c4.parse_vertex("(2,0)").unwrap()).unwrap());
        assert!(!c4.nontypical(x, c4.parse_vertex("(1,1)").unwrap()).unwrap());
        let q = fam(FamilySpec::Product {
            bases: vec![BaseSpec::Path(2), BaseSpec::Path(2)],
        });
        let (a, b) = (
            q.parse_vertex("(0,0)").unwrap(),
            q.parse_vertex("(1,1)").unwrap(),
        );
        assert!(!q.nontypical(a, b).unwrap());
    }

    #[test]
    fn hypercube_d_is_empty() {
        let g = fam(FamilySpec::Hypercube { n: 5 });
        for y in g.vertices().into_iter().skip(1) {
            assert!(!g.nontypical(VertexId(0), y).unwrap());
        }
    }

    #[test]
    fn odd_and_folded_oracle_radius() {
        let g = fam(FamilySpec::Odd { n: 4 });
        let x = g.vertex_at(0);
        let far = g
            .vertices()
            .into_iter()
            .find(|&y| g.exact_distance(x, y) == Some(3))
            .unwrap();
        assert_eq!(g.nontypical(x, far), Err(Error::NotEvaluated { radius: 2 }));
        let f = fam(FamilySpec::Folded { n: 8 });
        assert_eq!(f.local_radius(), Some(3));
        assert_eq!(f.nontypical(VertexId(0), VertexId(0b111)), Ok(false));
        assert!(f.nontypical(VertexId(0), VertexId(0b1111)).is_err());
    }

    #[test]
    fn labels_round_trip() {
        for spec in [
            FamilySpec::Hypercube { n: 4 },
            FamilySpec::Odd { n: 3 },
            FamilySpec::Torus { dims: vec![3, 4] },
            FamilySpec::MiddleLayer { n: 3 },
        ] {
            let g = fam(spec);
            for v in g.vertices() {
                assert_eq!(g.parse_vertex(&g.label(v)).unwrap(), v);
            }
        }
        let g = fam(FamilySpec::Hypercube { n: 4 });
        assert!(g.parse_vertex("012").is_err());
    }
}
