//! Triviality certificates: non-negative combinations of order-2 minors, the descending chain
//! of kernels they cut out, and genericity scans over Grassmannian charts.

mod chain;
mod combination;
mod grassmann;
mod reduction;

pub use chain::{
    heuristic_combination, reduce_chain, two_atom_measure, verify_certificate, ArtifactCombination, ArtifactStep,
    CertificateArtifact, CertificateCheck, ChainOptions, ChainOutcome, ChainStep, StepCheck, StepMethod,
    TrivialityCertificate,
};
pub use combination::{verify_combination, CombinationVerdict, Cone, MinorCombination};
pub use grassmann::{
    combination_at, exact_span_dim, grassmann_genericity, grassmann_scan, Chart, GenericityReport, ScanSample,
    ScanSummary, LAMBDA_TOL,
};
pub use reduction::{constructive_combination, find_certificate_d_le_3, pull_back, CertificateSearch, ReductionCase};
