//! Projection subgraphs `G(y)`: lower-dimensional copies of the family that
//! contain `y` and avoid the ball of radius `dist(x, y) - 1` around `x`.

use serde::Serialize;

use super::combinadic::{binomial, lowest_bits};
use super::{low_mask, GraphFamily, Topology};
use crate::error::{Error, Result};
use crate::graph::{distance_within, Graph, VertexId};

/// Membership rule of a projection inside its root family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Constraint {
    /// Cube-like coordinates in `mask` frozen to the bits of `value`.
    Bits { mask: u64, value: u64 },
    /// Product coordinates frozen to the given base vertices.
    Coords { fixed: Vec<Option<u32>> },
    /// Odd graph slice: `left ⊆ v` and `v ∩ right = ∅`, or the same with
    /// the roles of `left` and `right` exchanged.
    OddSlice { left: u64, right: u64 },
    /// Folded cube subcube in lifted coordinates relative to `anchor`: bit
    /// `n-1` of the lift records use of the antipodal edge.
    FoldedLift { anchor: u64, mask: u64, value: u64 },
}

impl Constraint {
    fn admits(&self, root: &GraphFamily, v: VertexId) -> bool {
        match self {
            Constraint::Bits { mask, value } => v.0 & mask == *value,
            Constraint::Coords { fixed } => root
                .coords(v)
                .zip(fixed)
                .all(|(c, f)| f.is_none_or(|f| f == c)),
            Constraint::OddSlice { left, right } => {
                (v.0 & left == *left && v.0 & right == 0)
                    || (v.0 & right == *right && v.0 & left == 0)
            }
            Constraint::FoldedLift {
                anchor,
                mask,
                value,
            } => {
                let Topology::Folded { bits } = root.topo else {
                    return false;
                };
                let t = v.0 ^ anchor;
                let plain = t;
                let wrapped = (!t & low_mask(bits)) | 1 << bits;
                plain & mask == *value || wrapped & mask == *value
            }
        }
    }
}

/// Restricted view of a root family: the projection `G(y)` with its
/// provenance `(x, y, ell)`.
#[derive(Clone, Debug)]
pub struct Projection {
    root: GraphFamily,
    pub anchor: VertexId,
    pub target: VertexId,
    pub ell: u32,
    pub constraint: Constraint,
    order: u64,
    iso: String,
}

impl Projection {
    pub fn root(&self) -> &GraphFamily {
        &self.root
    }

    /// Isomorphism type of the projection, e.g. `Q_4` or `M_3`.
    pub fn isomorphism_type(&self) -> &str {
        &self.iso
    }

    /// Whether further projections of this view can be built explicitly
    /// (otherwise membership in the class is attested by its isomorphism
    /// type).
    pub fn supports_nesting(&self) -> bool {
        matches!(
            self.constraint,
            Constraint::Bits { .. } | Constraint::Coords { .. }
        )
    }
}

impl Graph for Projection {
    fn order(&self) -> u64 {
        self.order
    }

    fn contains(&self, v: VertexId) -> bool {
        self.root.contains(v) && self.constraint.admits(&self.root, v)
    }

    fn for_each_neighbour<F: FnMut(VertexId)>(&self, v: VertexId, mut f: F) {
        self.root.for_each_neighbour(v, |w| {
            if self.constraint.admits(&self.root, w) {
                f(w)
            }
        });
    }

    fn vertices(&self) -> Vec<VertexId> {
        self.root
            .vertices()
            .into_iter()
            .filter(|&v| self.constraint.admits(&self.root, v))
            .collect()
    }

    fn nontypical(&self, x: VertexId, y: VertexId) -> Result<bool> {
        for v in [x, y] {
            if !self.contains(v) {
                return Err(Error::InvalidVertex(v));
            }
        }
        match self.constraint {
            // a sub-product keeps the product distance, so the rule carries over
            Constraint::Coords { .. } => self.root.nontypical(x, y),
            _ => Ok(false),
        }
    }

    fn label(&self, v: VertexId) -> String {
        self.root.label(v)
    }
}

/// Graphs that can produce projection subgraphs.
pub trait Projectable: Graph + Sized {
    /// `G(y)` for `y ∈ S(x, ell)`; the caller supplies `ell = dist(x, y)`.
    fn projection_at(&self, x: VertexId, y: VertexId, ell: u32) -> Result<Projection>;

    fn projection(&self, x: VertexId, y: VertexId) -> Result<Projection> {
        if x == y {
            return Err(Error::InvalidArgument(
                "projection needs distinct vertices".into(),
            ));
        }
        let cap = 64;
        let ell = distance_within(self, x, y, cap)?
            .ok_or_else(|| Error::InvalidArgument(format!("distance exceeds the cap of {cap}")))?;
        self.projection_at(x, y, ell)
    }
}

impl Projectable for GraphFamily {
    fn projection_at(&self, x: VertexId, y: VertexId, ell: u32) -> Result<Projection> {
        build(self, None, x, y, ell)
    }
}

impl Projectable for Projection {
    fn projection_at(&self, x: VertexId, y: VertexId, ell: u32) -> Result<Projection> {
        for v in [x, y] {
            if !self.contains(v) {
                return Err(Error::InvalidVertex(v));
            }
        }
        if !self.supports_nesting() {
            return Err(Error::Unsupported(format!(
                "nested projection of a {} slice",
                self.iso
            )));
        }
        build(&self.root, Some(&self.constraint), x, y, ell)
    }
}

fn build(
    root: &GraphFamily,
    base: Option<&Constraint>,
    x: VertexId,
    y: VertexId,
    ell: u32,
) -> Result<Projection> {
    for v in [x, y] {
        if !root.contains(v) {
            return Err(Error::InvalidVertex(v));
        }
    }
    if x == y || ell == 0 {
        return Err(Error::InvalidArgument(
            "projection needs distinct vertices".into(),
        ));
    }
    let degenerate = || {
        Err(Error::InvalidParameter(format!(
            "distance {ell} too large for a projection of {}",
            root.spec()
        )))
    };
    let (base_mask, base_value) = match base {
        Some(Constraint::Bits { mask, value }) => (*mask, *value),
        _ => (0, 0),
    };
    let (constraint, order, iso) = match &root.topo {
        Topology::Cube { dim } => {
            let diff = x.0 ^ y.0;
            let mask = base_mask | diff;
            let free = dim - mask.count_ones();
            (
                Constraint::Bits {
                    mask,
                    value: base_value | (y.0 & diff),
                },
                1u64 << free,
                format!("Q_{free}"),
            )
        }
        Topology::MiddleLayer { n } => {
            let width = 2 * n - 1;
            let diff = x.0 ^ y.0;
            let mut mask = base_mask | diff;
            let ones = (y.0 & diff).count_ones();
            let zeros = diff.count_ones() - ones;
            if ones != zeros {
                // balance the frozen coordinates with one extra free coordinate
                // on which y has the under-represented value
                let free = !mask & low_mask(width);
                let want = if ones > zeros {
                    !y.0 & free
                } else {
                    y.0 & free
                };
                if want == 0 {
                    return degenerate();
                }
                mask |= lowest_bits(want, 1);
            }
            let free = width - mask.count_ones();
            if free.is_multiple_of(2) {
                return degenerate();
            }
            let m = free.div_ceil(2);
            (
                Constraint::Bits {
                    mask,
                    value: y.0 & mask,
                },
                2 * binomial(free, m - 1),
                format!("M_{m}"),
            )
        }
        Topology::Product { bases, .. } => {
            let mut fixed = match base {
                Some(Constraint::Coords { fixed }) => fixed.clone(),
                _ => vec![None; bases.len()],
            };
            let ys: Vec<u32> = root.coords(y).collect();
            for i in root.differing_coords(x, y) {
                fixed[i] = Some(ys[i]);
            }
            let free: Vec<&super::BaseGraph> = bases
                .iter()
                .zip(&fixed)
                .filter(|(_, f)| f.is_none())
                .map(|(b, _)| b)
                .collect();
            let order = free.iter().map(|b| b.size() as u64).product();
            let iso = if free.is_empty() {
                "K_1".to_string()
            } else {
                free.iter()
                    .map(|b| b.spec.to_string())
                    .collect::<Vec<_>>()
                    .join(" x ")
            };
            (Constraint::Coords { fixed }, order, iso)
        }
        Topology::Odd { n } => {
            if base.is_some() {
                return Err(Error::Unsupported("nested odd graph projection".into()));
            }
            let full = low_mask(2 * n - 1);
            let (a, b, a_pool, b_pool, a_len, b_len) = if ell.is_multiple_of(2) {
                let k = ell / 2;
                (x.0 & !y.0, y.0 & !x.0, x.0 & y.0, full & !(x.0 | y.0), k, k)
            } else {
                let k = (ell - 1) / 2;
                (
                    x.0 & y.0,
                    full & !(x.0 | y.0),
                    x.0 & !y.0,
                    y.0 & !x.0,
                    k,
                    k + 1,
                )
            };
            if a.count_ones() != a_len
                || b.count_ones() != b_len
                || a_pool.count_ones() < a_len
                || b_pool.count_ones() < b_len
                || ell >= *n
            {
                return degenerate();
            }
            // lexicographically least admissible a', b'
            let a2 = lowest_bits(a_pool, a_len);
            let b2 = lowest_bits(b_pool, b_len);
            let m = n - ell;
            (
                Constraint::OddSlice {
                    left: b | a2,
                    right: b2 | a,
                },
                2 * binomial(2 * m - 1, m - 1),
                format!("M_{m}"),
            )
        }
        Topology::Folded { bits } => {
            if base.is_some() {
                return Err(Error::Unsupported("nested folded cube projection".into()));
            }
            let n = bits + 1;
            let s = x.0 ^ y.0;
            let w = s.count_ones();
            let lift = if w <= n - w {
                s
            } else {
                (!s & low_mask(*bits)) | 1 << bits
            };
            if lift.count_ones() != ell || 2 * ell > n {
                return degenerate();
            }
            // freeze the ell ones of the lift and its ell lowest zeros
            let zeros = lowest_bits(!lift & low_mask(n), ell);
            let mask = lift | zeros;
            let free = n - 2 * ell;
            (
                Constraint::FoldedLift {
                    anchor: x.0,
                    mask,
                    value: lift,
                },
                1u64 << free,
                format!("Q_{free}"),
            )
        }
        Topology::Explicit { .. } => {
            return Err(Error::Unsupported(
                "explicit graphs have no projection".into(),
            ))
        }
    };
    let proj = Projection {
        root: root.clone(),
        anchor: x,
        target: y,
        ell,
        constraint,
        order,
        iso,
    };
    debug_assert!(proj.contains(y));
    Ok(proj)
}
