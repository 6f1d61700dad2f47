//! Steady states of coupled quantum self-sustained oscillators and the
//! phase-synchronization measures built on top of them.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`hilbert`] builds truncated Fock/spin operator algebras and composite
//!   (tensor-product) spaces with both lexicographic and excitation-grouped
//!   basis orderings.
//! * [`lindblad`] assembles Liouvillian superoperators from a Hamiltonian and
//!   a set of dissipators, and solves for the unique steady state.
//! * [`phase`] turns a joint density matrix into a relative-phase
//!   distribution P(φ) via Wigner, Husimi, or phase-state constructions.
//! * [`subsets`] decomposes coherences into the excitation-relation subsets
//!   S_k and reports A_k, θ_k, L_k, the dominant harmonic and max S(φ).
//! * [`infomeasures`] computes entropy, coherence, mutual information,
//!   negativity, and two-qubit X-state discord.
//! * [`perturb`] expands the steady state perturbatively in the interaction
//!   via the pseudoinverse of the uncoupled Liouvillian.
//! * [`scenarios`] names every system/interaction combination the toolkit
//!   supports so configs can reference physics instead of raw matrices.
//!
//! All quantities are dimensionless (ℏ = 1); logs are natural.

pub mod error;
pub mod hilbert;
pub mod infomeasures;
mod linalg;
pub mod lindblad;
pub mod perturb;
pub mod phase;
pub mod scenarios;
pub mod subsets;

pub use error::{Error, Result};
pub use hilbert::{CompositeSpace, Operator, PairType, SystemSpec, C64};
pub use infomeasures::BipartiteSplit;
pub use lindblad::{Dissipator, Superoperator};
pub use perturb::{PerturbationSeries, PseudoInverse};
pub use phase::{Method, PhaseDistribution};
pub use scenarios::{build_scenario, InteractionKind, InteractionSpec, Scenario};
pub use subsets::SubsetReport;
