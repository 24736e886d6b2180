//! Explicit local isomorphisms: odd graph balls against middle layer balls
//! (complement on odd spheres) and folded cube balls against hypercube
//! balls (coordinate lift).

use rustc_hash::FxHashSet;

use super::{low_mask, GraphFamily, Topology};
use crate::error::{Error, Result};
use crate::graph::{ball, Graph, VertexId};

/// Builds the explicit map from `B_a(x_a, ell)` to `B_b(x_b, ell)` and
/// returns whether it is a graph isomorphism of the two balls.
///
/// Supported pairs (in either order): odd `n` with middle layer `n` for
/// `ell < n - 1`, and folded `n` with hypercube `n` for `ell < ⌊n/2⌋`.
pub fn local_iso_check(
    family_a: &GraphFamily,
    x_a: VertexId,
    family_b: &GraphFamily,
    x_b: VertexId,
    ell: u32,
) -> Result<bool> {
    match (&family_a.topo, &family_b.topo) {
        (Topology::MiddleLayer { .. }, Topology::Odd { .. })
        | (Topology::Cube { .. }, Topology::Folded { .. }) => {
            return local_iso_check(family_b, x_b, family_a, x_a, ell)
        }
        _ => {}
    }
    for (g, v) in [(family_a, x_a), (family_b, x_b)] {
        if !g.contains(v) {
            return Err(Error::InvalidVertex(v));
        }
    }
    let map: Box<dyn Fn(VertexId, u32) -> VertexId> = match (&family_a.topo, &family_b.topo) {
        (Topology::Odd { n }, Topology::MiddleLayer { n: m }) if n == m => {
            let limit = n - 1;
            if ell >= limit {
                return Err(Error::RadiusOutOfRange { radius: ell, limit });
            }
            let width = 2 * n - 1;
            let full = low_mask(width);
            // relabel ground elements so x_a lands on x_b (or on its
            // complement when x_b sits in the upper layer)
            let target_low = if x_b.0.count_ones() == n - 1 {
                x_b.0
            } else {
                !x_b.0 & full
            };
            let flip_all = target_low != x_b.0;
            let perm = element_permutation(x_a.0, target_low, width);
            Box::new(move |v: VertexId, dist: u32| {
                let relabelled = permute(v.0, &perm);
                let img = if dist % 2 == 1 {
                    !relabelled & full
                } else {
                    relabelled
                };
                VertexId(if flip_all { !img & full } else { img })
            })
        }
        (Topology::Folded { bits }, Topology::Cube { dim }) if bits + 1 == *dim => {
            let n = *dim;
            let limit = n / 2;
            if ell >= limit {
                return Err(Error::RadiusOutOfRange { radius: ell, limit });
            }
            let bits = *bits;
            let (xa, xb) = (x_a.0, x_b.0);
            Box::new(move |v: VertexId, dist: u32| {
                let s = v.0 ^ xa;
                let lift = if s.count_ones() == dist {
                    s
                } else {
                    (!s & low_mask(bits)) | 1 << bits
                };
                VertexId(xb ^ lift)
            })
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "no local isomorphism between {} and {}",
                family_a.spec(),
                family_b.spec()
            )))
        }
    };

    let ball_a = ball(family_a, x_a, ell)?;
    let ball_b = ball(family_b, x_b, ell)?;
    if ball_a.size() != ball_b.size() {
        return Ok(false);
    }
    let mut image = FxHashSet::default();
    for v in ball_a.vertices() {
        let d = ball_a.distance_of(v).unwrap_or(0);
        let w = map(v, d);
        if ball_b.distance_of(w) != Some(d) || !image.insert(w) {
            return Ok(false);
        }
    }
    let induced_edges = |g: &GraphFamily, b: &crate::graph::BallView| {
        let mut e = 0usize;
        for v in b.vertices() {
            g.for_each_neighbour(v, |w| e += usize::from(b.contains(w)));
        }
        e / 2
    };
    for u in ball_a.vertices() {
        let du = ball_a.distance_of(u).unwrap_or(0);
        let fu = map(u, du);
        let mut ok = true;
        family_a.for_each_neighbour(u, |v| {
            if let Some(dv) = ball_a.distance_of(v) {
                ok &= family_b.is_adjacent(fu, map(v, dv));
            }
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(induced_edges(family_a, &ball_a) == induced_edges(family_b, &ball_b))
}

/// Order-preserving bijection of `0..width` sending the elements of `from`
/// onto those of `to` and the complement onto the complement.
fn element_permutation(from: u64, to: u64, width: u32) -> Vec<u32> {
    let members = |m: u64| (0..width).filter(move |i| m >> i & 1 == 1);
    let outside = |m: u64| (0..width).filter(move |i| m >> i & 1 == 0);
    let mut perm = vec![0; width as usize];
    for (a, b) in members(from).zip(members(to)) {
        perm[a as usize] = b;
    }
    for (a, b) in outside(from).zip(outside(to)) {
        perm[a as usize] = b;
    }
    perm
}

fn permute(mask: u64, perm: &[u32]) -> u64 {
    perm.iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .fold(0, |acc, (_, &p)| acc | 1 << p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilySpec;

    fn fam(spec: FamilySpec) -> GraphFamily {
        GraphFamily::new(spec).unwrap()
    }

    #[test]
    fn odd_matches_middle_layer() {
        let o = fam(FamilySpec::Odd { n: 4 });
        let m = fam(FamilySpec::MiddleLayer { n: 4 });
        for x in o.vertices() {
            assert!(local_iso_check(&o, x, &m, x, 2).unwrap());
        }
        let upper = m
            .vertices()
            .into_iter()
            .find(|v| v.0.count_ones() == 4)
            .unwrap();
        assert!(local_iso_check(&o, o.vertex_at(3), &m, upper, 2).unwrap());
        assert!(local_iso_check(&m, upper, &o, o.vertex_at(0), 1).unwrap());
        assert_eq!(
            local_iso_check(&o, o.vertex_at(0), &m, o.vertex_at(0), 3),
            Err(Error::RadiusOutOfRange {
                radius: 3,
                limit: 3
            })
        );
    }

    #[test]
    fn folded_matches_hypercube() {
        let f = fam(FamilySpec::Folded { n: 6 });
        let q = fam(FamilySpec::Hypercube { n: 6 });
        for x in f.vertices() {
            assert!(local_iso_check(&f, x, &q, VertexId(0b100110), 2).unwrap());
        }
        let f3 = fam(FamilySpec::Folded { n: 3 });
        let q3 = fam(FamilySpec::Hypercube { n: 3 });
        assert_eq!(
            local_iso_check(&f3, VertexId(0), &q3, VertexId(0), 1),
            Err(Error::RadiusOutOfRange {
                radius: 1,
                limit: 1
            })
        );
    }

    #[test]
    fn full_radius_is_not_isomorphic() {
        // the lemma's radius bound is tight: beyond it a wrong map is detected
        let f = fam(FamilySpec::Folded { n: 8 });
        let q = fam(FamilySpec::Hypercube { n: 8 });
        assert!(local_iso_check(&f, VertexId(0), &q, VertexId(0), 3).unwrap());
        assert!(local_iso_check(&f, VertexId(0), &q, VertexId(0), 4).is_err());
    }

    #[test]
    fn unsupported_pairs() {
        let q = fam(FamilySpec::Hypercube { n: 4 });
        let m = fam(FamilySpec::MiddleLayer { n: 4 });
        assert!(matches!(
            local_iso_check(&q, VertexId(0), &m, m.vertex_at(0), 1),
            Err(Error::Unsupported(_))
        ));
    }
}
