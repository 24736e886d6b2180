//! Simulation engine and structural certifier for majority bootstrap
//! percolation on high-dimensional geometric graphs.

pub mod bitset;
pub mod certify;
pub mod error;
pub mod families;
pub mod graph;
pub mod oracle;
pub mod process;
pub mod sampler;
pub mod theory;

pub use bitset::BitSet;
pub use certify::{
    certify, check_p1, check_p2, check_p3, check_p4, check_p5, check_p6, replay,
    separating_partition, CenterPolicy, CertRequest, Certificate, Property, Verdict, Witness,
};
pub use error::{Error, Result};
pub use families::{make_family, FamilySpec, GraphFamily, Projectable, Projection};
pub use graph::{ball, distance_within, sphere, BallView, Graph, Neighbourhood, VertexId};
pub use oracle::{
    closure_async_equiv, distance_matrix, exact_pc, exact_phi, DistanceMatrix, ExactPhi,
};
pub use process::{gamma, run, sigma, vertex_set, InfectionState, ProcessSpec, Trace, Variant};
pub use sampler::{
    critical_points, estimate_pc, estimate_phi, sample_infected, scan_phi, trial_critical_p,
    trial_critical_point, trial_percolates, wilson_interval, CriticalPoint, PcEstimate,
    PhiEstimate, TrialRandomness,
};
pub use theory::{theory_curves, theory_curves_irregular, TheoryCurves};
