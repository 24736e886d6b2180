//! Brute-force ground truth on small graphs.
//!
//! The simulator here works on `u32` vertex masks and shares no code with
//! the process engine, so the two can be compared.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::families::GraphFamily;
use crate::graph::Graph;
use crate::process::{run, ProcessSpec, Variant};

pub const PHI_ORDER_LIMIT: u64 = 20;
pub const CLOSURE_ORDER_LIMIT: u64 = 1 << 10;
pub const DISTANCE_ORDER_LIMIT: u64 = 1 << 12;

fn guard(graph: &GraphFamily, limit: u64) -> Result<usize> {
    let order = graph.order();
    if order > limit {
        return Err(Error::OrderGuard { order, limit });
    }
    Ok(order as usize)
}

fn adjacency_lists(graph: &GraphFamily) -> Vec<Vec<usize>> {
    (0..graph.order() as usize)
        .map(|i| {
            let mut out = Vec::new();
            graph.for_each_neighbour(graph.vertex_at(i), |w| {
                out.push(graph.index_of(w).expect("neighbour in graph"))
            });
            out
        })
        .collect()
}

/// Whether a vertex of degree `d` with `count` infected neighbours becomes
/// infected when leaving round `round`.
fn meets_threshold(spec: &ProcessSpec, d: usize, count: usize, round: u32) -> bool {
    let (d, count) = (d as f64, count as f64);
    match spec.variant {
        Variant::RNeighbour { r } => count >= f64::from(r),
        Variant::Majority { m } => {
            let needed = d / 2.0 + f64::from(m);
            if spec.strict {
                count > needed
            } else {
                count >= needed
            }
        }
        Variant::Boot { k, gamma_scale } => {
            let slack = if d >= 2.0 {
                (d / d.ln().sqrt()).sqrt()
            } else {
                0.0
            };
            let t = d / 2.0 - f64::from(k.saturating_sub(round)) * gamma_scale * slack;
            t <= 0.0 || count >= t - 1e-9
        }
    }
}

struct MaskSim<'a> {
    adj: Vec<u32>,
    spec: &'a ProcessSpec,
    full: u32,
    min_rounds: u32,
}

impl<'a> MaskSim<'a> {
    fn new(graph: &GraphFamily, spec: &'a ProcessSpec) -> Self {
        let lists = adjacency_lists(graph);
        let adj = lists
            .iter()
            .map(|l| l.iter().fold(0u32, |m, &j| m | 1 << j))
            .collect();
        let n = lists.len();
        let min_rounds = match spec.variant {
            Variant::Boot { k, .. } => k,
            _ => 0,
        };
        Self {
            adj,
            spec,
            full: if n == 32 { u32::MAX } else { (1u32 << n) - 1 },
            min_rounds,
        }
    }

    /// Synchronous closure of `set`, with the round-0 counts supplied.
    fn percolates(&self, set: u32, counts0: &[u8]) -> bool {
        let mut cur = set;
        let mut round = 0u32;
        loop {
            if cur == self.full {
                return true;
            }
            let mut next = cur;
            let mut rest = self.full & !cur;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let count = if round == 0 {
                    counts0[v] as usize
                } else {
                    (self.adj[v] & cur).count_ones() as usize
                };
                if meets_threshold(self.spec, self.adj[v].count_ones() as usize, count, round) {
                    next |= 1 << v;
                }
            }
            round += 1;
            if next == cur && round >= self.min_rounds {
                return false;
            }
            cur = next;
        }
    }
}

/// Percolation indicator of every subset of a graph with at most 20
/// vertices, grouped by subset size.
#[derive(Clone, Debug)]
pub struct ExactPhi {
    order: usize,
    indicator: BitSet,
    by_size: Vec<u64>,
}

impl ExactPhi {
    pub fn new(graph: &GraphFamily, spec: &ProcessSpec) -> Result<Self> {
        spec.validate()?;
        let n = guard(graph, PHI_ORDER_LIMIT)?;
        let sim = MaskSim::new(graph, spec);
        let total = 1usize << n;
        let chunk = total.min(1 << 12);
        let parts: Vec<Vec<u32>> = (0..total / chunk)
            .into_par_iter()
            .map(|c| {
                // Gray-code walk over indices [c·chunk, (c+1)·chunk)
                let start = c * chunk;
                let mut set = (start ^ (start >> 1)) as u32;
                let mut counts: Vec<u8> = sim
                    .adj
                    .iter()
                    .map(|&a| (a & set).count_ones() as u8)
                    .collect();
                let mut hits = Vec::new();
                for i in start..start + chunk {
                    if i > start {
                        let v = i.trailing_zeros() as usize;
                        let added = set & (1 << v) == 0;
                        set ^= 1 << v;
                        let mut nb = sim.adj[v];
                        while nb != 0 {
                            let w = nb.trailing_zeros() as usize;
                            nb &= nb - 1;
                            if added {
                                counts[w] += 1;
                            } else {
                                counts[w] -= 1;
                            }
                        }
                    }
                    if sim.percolates(set, &counts) {
                        hits.push(set);
                    }
                }
                hits
            })
            .collect();
        let mut indicator = BitSet::new(total);
        let mut by_size = vec![0u64; n + 1];
        for set in parts.into_iter().flatten() {
            indicator.insert(set as usize);
            by_size[set.count_ones() as usize] += 1;
        }
        Ok(Self {
            order: n,
            indicator,
            by_size,
        })
    }

    /// Whether the subset with bit `i` for dense index `i` percolates.
    pub fn percolates(&self, subset: u32) -> bool {
        self.indicator.contains(subset as usize)
    }

    /// Number of percolating subsets of each size.
    pub fn counts_by_size(&self) -> &[u64] {
        &self.by_size
    }

    pub fn phi(&self, p: f64) -> f64 {
        let n = self.order as i32;
        self.by_size
            .iter()
            .enumerate()
            .map(|(s, &c)| c as f64 * p.powi(s as i32) * (1.0 - p).powi(n - s as i32))
            .sum()
    }

    /// `inf{p : Φ(p) ≥ 1/2}` by bisection to `tol`.
    pub fn pc(&self, tol: f64) -> f64 {
        if self.phi(0.0) >= 0.5 {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.phi(mid) >= 0.5 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Exact `Φ(p, G)` by enumerating all `2^|V|` initial sets.
pub fn exact_phi(graph: &GraphFamily, spec: &ProcessSpec, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "p must lie in [0, 1], got {p}"
        )));
    }
    Ok(ExactPhi::new(graph, spec)?.phi(p))
}

/// Exact `p_c(G)` to within `tol`.
pub fn exact_pc(graph: &GraphFamily, spec: &ProcessSpec, tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    Ok(ExactPhi::new(graph, spec)?.pc(tol))
}

/// Compares the synchronous final set with the closure under single-vertex
/// updates in a random order drawn from `seed`.
pub fn closure_async_equiv(
    graph: &GraphFamily,
    spec: &ProcessSpec,
    a0: &BitSet,
    seed: u64,
) -> Result<bool> {
    if matches!(spec.variant, Variant::Boot { .. }) {
        return Err(Error::Unsupported(
            "closure equivalence needs round-independent thresholds".into(),
        ));
    }
    let n = guard(graph, CLOSURE_ORDER_LIMIT)?;
    if a0.len() != n {
        return Err(Error::InvalidArgument(
            "initial set sized for another graph".into(),
        ));
    }
    let sync = run(graph, spec, a0)?;
    let lists = adjacency_lists(graph);
    let mut infected = a0.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &v in &order {
            if infected.contains(v) {
                continue;
            }
            let count = lists[v].iter().filter(|&&w| infected.contains(w)).count();
            if meets_threshold(spec, lists[v].len(), count, u32::MAX) {
                infected.insert(v);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(infected == sync.final_set)
}

/// All-pairs distances by dense index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    order: usize,
    data: Vec<u16>,
}

impl DistanceMatrix {
    pub const UNREACHABLE: u16 = u16::MAX;

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> u16 {
        self.data[i * self.order + j]
    }

    pub fn row(&self, i: usize) -> &[u16] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    /// Largest finite entry.
    pub fn max(&self) -> u16 {
        self.data
            .iter()
            .copied()
            .filter(|&d| d != Self::UNREACHABLE)
            .max()
            .unwrap_or(0)
    }
}

pub fn distance_matrix(graph: &GraphFamily) -> Result<DistanceMatrix> {
    let n = guard(graph, DISTANCE_ORDER_LIMIT)?;
    let lists = adjacency_lists(graph);
    let rows: Vec<Vec<u16>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut dist = vec![DistanceMatrix::UNREACHABLE; n];
            let mut queue = std::collections::VecDeque::from([s]);
            dist[s] = 0;
            while let Some(v) = queue.pop_front() {
                for &w in &lists[v] {
                    if dist[w] == DistanceMatrix::UNREACHABLE {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            dist
        })
        .collect();
    Ok(DistanceMatrix {
        order: n,
        data: rows.concat(),
    })
}
