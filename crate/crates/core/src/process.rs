//! Synchronous infection dynamics: r-neighbour, majority with a raised
//! threshold, and the round-dependent Boot_k(γ) dominating process.
//!
//! The engine keeps, for every vertex, the number of infected neighbours.
//! The first round and every Boot round `ℓ < k` test every uninfected
//! vertex; after that the thresholds are fixed, and a vertex is infected in
//! the round after its count reaches its threshold.

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::families::GraphFamily;
use crate::graph::{Graph, VertexId};

/// `√(ln d / d)`.
pub fn sigma(d: u64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "sigma needs d >= 2, got {d}"
        )));
    }
    let d = d as f64;
    Ok((d.ln() / d).sqrt())
}

/// `√(d / √(ln d))`, the Boot slack.
pub fn gamma(d: u64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "gamma needs d >= 2, got {d}"
        )));
    }
    let d = d as f64;
    Ok((d / d.ln().sqrt()).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Variant {
    /// Infect once at least `r` neighbours are infected.
    RNeighbour { r: u32 },
    /// Infect once `2·count ≥ d(v) + 2m` (strictly greater in strict mode).
    Majority { m: u32 },
    /// Round `ℓ` threshold `d(v)/2 − max(0, k − ℓ)·scale·γ(d(v))`.
    Boot { k: u32, gamma_scale: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    #[serde(flatten)]
    pub variant: Variant,
    pub max_rounds: u32,
    /// Majority only: require strictly more than half.
    #[serde(default)]
    pub strict: bool,
}

impl ProcessSpec {
    pub fn majority(m: u32) -> Self {
        Self::new(Variant::Majority { m })
    }

    pub fn rneighbour(r: u32) -> Self {
        Self::new(Variant::RNeighbour { r })
    }

    pub fn boot(k: u32) -> Self {
        Self::new(Variant::Boot {
            k,
            gamma_scale: 1.0,
        })
    }

    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            max_rounds: u32::MAX,
            strict: false,
        }
    }

    pub fn with_max_rounds(mut self, max_rounds: u32) -> Self {
        self.max_rounds = max_rounds;
        self
    }

    pub fn with_strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.variant {
            Variant::Boot { k, gamma_scale } => {
                if k == 0 {
                    return Err(Error::InvalidArgument("boot needs k >= 1".into()));
                }
                if !(gamma_scale.is_finite() && gamma_scale >= 0.0) {
                    return Err(Error::InvalidArgument(
                        "gamma scale must be finite and non-negative".into(),
                    ));
                }
            }
            Variant::RNeighbour { .. } | Variant::Majority { .. } => {}
        }
        if self.strict && !matches!(self.variant, Variant::Majority { .. }) {
            return Err(Error::InvalidArgument(
                "strict mode only applies to majority".into(),
            ));
        }
        Ok(())
    }

    /// Rounds during which every uninfected vertex must be re-tested.
    fn global_rounds(&self) -> u32 {
        match self.variant {
            Variant::Boot { k, .. } => k,
            _ => 1,
        }
    }

    /// Minimum number of infected neighbours a vertex of degree `d` needs
    /// to become infected when moving from round `round` to `round + 1`.
    pub fn required(&self, d: usize, round: u32) -> u64 {
        let d = d as u64;
        match self.variant {
            Variant::RNeighbour { r } => u64::from(r),
            Variant::Majority { m } => {
                let t = d + 2 * u64::from(m);
                if self.strict {
                    t / 2 + 1
                } else {
                    t.div_ceil(2)
                }
            }
            Variant::Boot { k, gamma_scale } => {
                let slack_rounds = k.saturating_sub(round);
                // degree < 2 leaves γ undefined; such vertices get no slack
                let g = gamma(d).unwrap_or(0.0);
                let t = d as f64 / 2.0 - f64::from(slack_rounds) * gamma_scale * g;
                if t <= 0.0 {
                    0
                } else {
                    (t - 1e-9).ceil() as u64
                }
            }
        }
    }
}

/// Mutable state of one synchronous run on dense vertex indices.
#[derive(Clone, Debug)]
pub struct InfectionState {
    infected: BitSet,
    frontier: Vec<u32>,
    round: u32,
    infection_round: Vec<i32>,
    counts: Vec<u32>,
    /// Uninfected vertices whose count reached the steady threshold during
    /// the latest round's updates.
    pending: Vec<u32>,
    /// Threshold by degree for rounds past the global ones, and the spec it
    /// was built for.
    steady: Option<(ProcessSpec, Vec<u64>)>,
    record_rounds: bool,
}

impl InfectionState {
    /// Starts from the infected set `a0` (over dense indices).
    pub fn new(graph: &GraphFamily, a0: &BitSet) -> Self {
        let mut state = Self::empty(graph, true);
        state.reset(graph, a0);
        state
    }

    /// Allocates buffers without recording per-vertex infection rounds.
    pub(crate) fn empty(graph: &GraphFamily, record_rounds: bool) -> Self {
        let n = graph.order() as usize;
        Self {
            infected: BitSet::new(n),
            frontier: Vec::new(),
            round: 0,
            infection_round: if record_rounds {
                vec![-1; n]
            } else {
                Vec::new()
            },
            counts: vec![0; n],
            pending: Vec::new(),
            steady: None,
            record_rounds,
        }
    }

    /// Reuses the buffers for a new initial set.
    pub(crate) fn reset(&mut self, graph: &GraphFamily, a0: &BitSet) {
        assert_eq!(
            a0.len() as u64,
            graph.order(),
            "initial set sized for another graph"
        );
        self.infected.clone_from(a0);
        self.round = 0;
        self.frontier.clear();
        self.pending.clear();
        self.counts.iter_mut().for_each(|c| *c = 0);
        if self.record_rounds {
            self.infection_round.iter_mut().for_each(|r| *r = -1);
        }
        for i in a0.iter() {
            self.frontier.push(i as u32);
            if self.record_rounds {
                self.infection_round[i] = 0;
            }
            let counts = &mut self.counts;
            graph.for_each_neighbour_index(i, |j| counts[j] += 1);
        }
    }

    pub fn infected(&self) -> &BitSet {
        &self.infected
    }

    /// Vertices infected in the latest round (`A_0` itself before the first
    /// step).
    pub fn frontier(&self) -> &[u32] {
        &self.frontier
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    /// Round in which each vertex became infected, `-1` if never.
    pub fn infection_round(&self) -> &[i32] {
        &self.infection_round
    }

    pub fn is_full(&self) -> bool {
        self.infected.is_full()
    }

    /// Advances one synchronous round and returns the number of newly
    /// infected vertices. Every step of a run must use the same `spec`.
    pub fn step(&mut self, graph: &GraphFamily, spec: &ProcessSpec) -> usize {
        let round = self.round;
        let global_rounds = spec.global_rounds();
        if self.steady.as_ref().is_none_or(|(s, _)| s != spec) {
            self.steady = Some((*spec, threshold_table(graph, spec, global_rounds)));
        }
        if round < global_rounds {
            let table = threshold_table(graph, spec, round);
            self.frontier.clear();
            for i in 0..graph.order() as usize {
                if !self.infected.contains(i)
                    && u64::from(self.counts[i]) >= table[graph.degree_at(i)]
                {
                    self.frontier.push(i as u32);
                }
            }
        } else {
            // thresholds no longer change, so a vertex qualifies exactly when
            // its count reached the threshold during the previous updates
            std::mem::swap(&mut self.frontier, &mut self.pending);
        }
        self.pending.clear();
        for &f in &self.frontier {
            self.infected.insert(f as usize);
            if self.record_rounds {
                self.infection_round[f as usize] = round as i32 + 1;
            }
        }
        let track = round + 1 >= global_rounds;
        let steady = &self.steady.as_ref().expect("built above").1;
        let regular = graph.is_regular().then(|| steady[graph.min_degree()]);
        let (counts, infected, pending) = (&mut self.counts, &self.infected, &mut self.pending);
        for &f in &self.frontier {
            graph.for_each_neighbour_index(f as usize, |j| {
                counts[j] += 1;
                if track {
                    let t = regular.unwrap_or_else(|| steady[graph.degree_at(j)]);
                    if u64::from(counts[j]) == t && !infected.contains(j) {
                        pending.push(j as u32);
                    }
                }
            });
        }
        self.round += 1;
        self.frontier.len()
    }
}

/// `spec.required(d, round)` for every degree `d ≤ Δ`.
fn threshold_table(graph: &GraphFamily, spec: &ProcessSpec, round: u32) -> Vec<u64> {
    (0..=graph.max_degree())
        .map(|d| spec.required(d, round))
        .collect()
}

/// Outcome of a run until the fixpoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trace {
    pub percolated: bool,
    /// Last round in which a vertex was infected (0 if none ever was).
    pub rounds_to_stabilize: u32,
    #[serde(skip)]
    pub final_set: BitSet,
    /// Per dense index; `-1` for never infected.
    #[serde(skip)]
    pub infection_round: Vec<i32>,
}

impl Trace {
    pub fn final_size(&self) -> usize {
        self.final_set.count()
    }

    /// Infected set after `round` rounds, `A_round`.
    pub fn infected_by(&self, round: u32) -> BitSet {
        BitSet::from_indices(
            self.infection_round.len(),
            self.infection_round
                .iter()
                .enumerate()
                .filter(|(_, &r)| r >= 0 && r as u32 <= round)
                .map(|(i, _)| i),
        )
    }

    /// Number of vertices infected in each round `0..=rounds_to_stabilize`.
    pub fn per_round_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.rounds_to_stabilize as usize + 1];
        for &r in &self.infection_round {
            if r >= 0 {
                counts[r as usize] += 1;
            }
        }
        counts
    }

    pub fn final_vertices(&self, graph: &GraphFamily) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = self.final_set.iter().map(|i| graph.vertex_at(i)).collect();
        vs.sort_unstable();
        vs
    }
}

/// Converts vertex handles to a dense-index set.
pub fn vertex_set(graph: &GraphFamily, vertices: &[VertexId]) -> Result<BitSet> {
    let mut set = BitSet::new(graph.order() as usize);
    for &v in vertices {
        let i = graph.index_of(v).ok_or(Error::InvalidVertex(v))?;
        set.insert(i);
    }
    Ok(set)
}

fn stabilised(state: &InfectionState, spec: &ProcessSpec, last_new: usize) -> bool {
    last_new == 0 && state.round >= spec.global_rounds()
}

/// Iterates [`InfectionState::step`] to the fixpoint.
pub fn run(graph: &GraphFamily, spec: &ProcessSpec, a0: &BitSet) -> Result<Trace> {
    spec.validate()?;
    let mut state = InfectionState::new(graph, a0);
    let mut last_active = 0;
    loop {
        if state.is_full() && state.round >= spec.global_rounds() {
            break;
        }
        if state.round >= spec.max_rounds {
            return Err(Error::RoundLimit {
                max_rounds: spec.max_rounds,
            });
        }
        let added = state.step(graph, spec);
        if added > 0 {
            last_active = state.round;
        }
        if stabilised(&state, spec, added) {
            break;
        }
    }
    Ok(Trace {
        percolated: state.is_full(),
        rounds_to_stabilize: last_active,
        final_set: state.infected.clone(),
        infection_round: state.infection_round,
    })
}

/// Runs to the fixpoint on a reusable state and reports only whether the
/// process percolated; used by the Monte Carlo drivers.
pub(crate) fn percolates_with(
    graph: &GraphFamily,
    spec: &ProcessSpec,
    state: &mut InfectionState,
    a0: &BitSet,
) -> Result<bool> {
    state.reset(graph, a0);
    let full = a0.len();
    let mut count = a0.count();
    loop {
        if count == full {
            return Ok(true);
        }
        if state.round >= spec.max_rounds {
            return Err(Error::RoundLimit {
                max_rounds: spec.max_rounds,
            });
        }
        let added = state.step(graph, spec);
        count += added;
        if stabilised(state, spec, added) {
            return Ok(count == full);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilySpec;

    fn fam(spec: FamilySpec) -> GraphFamily {
        GraphFamily::new(spec).unwrap()
    }

    fn set(g: &GraphFamily, labels: &[&str]) -> BitSet {
        let vs: Vec<VertexId> = labels.iter().map(|l| g.parse_vertex(l).unwrap()).collect();
        vertex_set(g, &vs).unwrap()
    }

    #[test]
    fn sigma_and_gamma_values() {
        assert!((sigma(100).unwrap() - 0.214_597).abs() < 1e-6);
        assert!((sigma(2).unwrap() - 0.588_705).abs() < 1e-6);
        assert!(sigma(16).unwrap() > sigma(64).unwrap());
        assert!((gamma(256).unwrap() - 10.4266).abs() < 1e-4);
        assert!((gamma(8).unwrap() - 2.355_366).abs() < 1e-6);
        for d in [2u64, 3, 10, 1000] {
            let g = gamma(d).unwrap();
            let df = d as f64;
            assert!((g * df.ln().powf(0.25) / df.sqrt() - 1.0).abs() < 1e-12);
        }
        assert!(sigma(1).is_err());
        assert!(gamma(0).is_err());
    }

    #[test]
    fn thresholds() {
        let maj = ProcessSpec::majority(0);
        assert_eq!(maj.required(2, 0), 1);
        assert_eq!(maj.required(3, 0), 2);
        assert_eq!(ProcessSpec::majority(2).required(4, 5), 4);
        assert_eq!(ProcessSpec::majority(0).with_strict(true).required(4, 0), 3);
        let boot = ProcessSpec::boot(2);
        assert_eq!(boot.required(8, 0), 0);
        // round 1: 4 - γ(8) = 1.64 → 2; round 2 onwards: majority
        assert_eq!(boot.required(8, 1), 2);
        assert_eq!(boot.required(8, 2), 4);
        let flat = ProcessSpec::new(Variant::Boot {
            k: 2,
            gamma_scale: 0.0,
        });
        for d in 1..12 {
            assert_eq!(flat.required(d, 0), maj.required(d, 0));
        }
    }

    #[test]
    fn majority_on_square() {
        let g = fam(FamilySpec::Hypercube { n: 2 });
        let a0 = set(&g, &["00"]);
        let mut state = InfectionState::new(&g, &a0);
        assert_eq!(state.step(&g, &ProcessSpec::majority(0)), 2);
        assert_eq!(state.infected().count(), 3);
        assert!(!state
            .infected()
            .contains(g.index_of(VertexId(0b11)).unwrap()));
        let t = run(&g, &ProcessSpec::majority(0), &a0).unwrap();
        assert!(t.percolated);
        assert_eq!(t.rounds_to_stabilize, 2);
        assert_eq!(t.per_round_counts(), vec![1, 2, 1]);
    }

    #[test]
    fn saturated_state_is_fixpoint() {
        let g = fam(FamilySpec::Hypercube { n: 3 });
        let mut state = InfectionState::new(&g, &BitSet::full(8));
        assert_eq!(state.step(&g, &ProcessSpec::majority(0)), 0);
        assert!(state.frontier().is_empty());
    }

    #[test]
    fn empty_seed_on_edge() {
        let g = fam(FamilySpec::Hypercube { n: 1 });
        let t = run(&g, &ProcessSpec::majority(0), &BitSet::new(2)).unwrap();
        assert!(!t.percolated);
        assert_eq!(t.final_size(), 0);
        assert_eq!(t.rounds_to_stabilize, 0);
    }

    #[test]
    fn folded_three_one_round() {
        let g = fam(FamilySpec::Folded { n: 3 });
        let t = run(&g, &ProcessSpec::majority(0), &set(&g, &["00", "11"])).unwrap();
        assert!(t.percolated);
        assert_eq!(t.rounds_to_stabilize, 1);
    }

    #[test]
    fn boot_negative_threshold_infects_everything() {
        let g = fam(FamilySpec::Hypercube { n: 8 });
        let mut state = InfectionState::new(&g, &BitSet::new(256));
        state.step(&g, &ProcessSpec::boot(2));
        assert!(state.is_full());
    }

    #[test]
    fn rneighbour_zero_percolates_from_nothing() {
        let g = fam(FamilySpec::Odd { n: 3 });
        let t = run(&g, &ProcessSpec::rneighbour(0), &BitSet::new(10)).unwrap();
        assert!(t.percolated);
        assert_eq!(t.rounds_to_stabilize, 1);
    }

    #[test]
    fn round_limit_is_reported() {
        let g = fam(FamilySpec::Hypercube { n: 2 });
        let spec = ProcessSpec::majority(0).with_max_rounds(1);
        assert_eq!(
            run(&g, &spec, &set(&g, &["00"])),
            Err(Error::RoundLimit { max_rounds: 1 })
        );
    }

    #[test]
    fn boot_runs_at_least_k_rounds() {
        // d = 16, k = 2, half slack: 8 - 3.10 → 5 needed, then 8 - 1.55 → 7
        let g = fam(FamilySpec::Hypercube { n: 16 });
        let spec = ProcessSpec::new(Variant::Boot {
            k: 2,
            gamma_scale: 0.5,
        });
        assert_eq!(spec.required(16, 0), 5);
        assert_eq!(spec.required(16, 1), 7);
        assert_eq!(spec.required(16, 2), 8);
        let t = run(&g, &spec, &BitSet::new(1 << 16)).unwrap();
        assert!(!t.percolated);
        assert_eq!(t.rounds_to_stabilize, 0);
        // negative round-0 threshold on Q_2 with k = 3: the whole graph at once
        let q2 = fam(FamilySpec::Hypercube { n: 2 });
        let t = run(&q2, &ProcessSpec::boot(3), &BitSet::new(4)).unwrap();
        assert!(t.percolated);
        assert_eq!(t.rounds_to_stabilize, 1);
    }

    #[test]
    fn invalid_specs() {
        assert!(ProcessSpec::boot(0).validate().is_err());
        assert!(ProcessSpec::rneighbour(1)
            .with_strict(true)
            .validate()
            .is_err());
        let bad = ProcessSpec::new(Variant::Boot {
            k: 1,
            gamma_scale: f64::NAN,
        });
        assert!(bad.validate().is_err());
    }
}
