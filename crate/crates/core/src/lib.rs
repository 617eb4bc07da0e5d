//! Discrete phase spaces over finite fields, complete sets of mutually
//! unbiased bases, and the spectra of every phase-space point operator they
//! define.
//!
//! The pipeline:
//!
//! 1. [`field`] and [`geometry`] build the d×d grid over GF(d) with its
//!    `d(d+1)` lines grouped into `d+1` striations.
//! 2. [`mub`] (with [`pauli`] for qubit systems) builds `d+1` mutually
//!    unbiased bases.
//! 3. [`census`] enumerates all `d^(d+1)` point operators
//!    `A = Σ_r |v_{r,c_r}⟩⟨v_{r,c_r}| − I` and groups them by spectrum.
//! 4. [`dwf`] evaluates discrete Wigner functions `W = Tr(ρA)/d` over a
//!    chosen association of lines to projectors and derives their extrema.
//! 5. [`qrac`] turns top eigenvectors into `(d+1) → d` random access codes.
//!
//! Matrix code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the double-precision types used by the reports.

pub mod census;
pub mod dwf;
pub mod error;
pub mod field;
pub mod geometry;
pub mod linalg;
pub mod mub;
pub mod pauli;
pub mod qrac;
pub mod scalar;

pub use census::{
    census, census_equal, extremal_eigenvalues, operator_count, point_operator, scan_summary, CensusReport,
    PointOperatorIndex, ScanOptions, ScanSummary, SpectrumClass,
};
pub use dwf::{dwf_extrema, evaluate, line_sums, nonnegativity_check, reconstruct, DwfMap, QuantumNet};
pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};
pub use geometry::{AxiomReport, Line, PhasePoint, PhaseSpace, Striation};
pub use linalg::{hermitian_eig, projector, rayleigh, trace_product, EigenvalueSolver};
pub use mub::{default_mub, mub_from_pauli_table, mub_prime, mub_qubit, MubReport, MubSource};
pub use pauli::{enumerate_pauli_partitions, CommutingSet, PauliString};
pub use qrac::{classical_3to1_optimum, qrac_rate, simulate, QracCode, QracReport};
pub use scalar::Real;

pub type CVec<T = f64> = linalg::CVec<T>;
pub type CMat<T = f64> = linalg::CMat<T>;
pub type Spectrum<T = f64> = linalg::Spectrum<T>;
pub type MubSet<T = f64> = mub::MubSet<T>;
pub type DensityMatrix<T = f64> = dwf::DensityMatrix<T>;

pub type CVec32 = linalg::CVec<f32>;
pub type CMat32 = linalg::CMat<f32>;
pub type MubSet32 = mub::MubSet<f32>;
