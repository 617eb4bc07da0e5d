use thiserror::Error;

/// Errors raised by the phase-space, MUB and census machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("no built-in modulus for GF({p}^{n}); supply an irreducible modulus")]
    UnsupportedField { p: u32, n: u32 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("no finite field of order {0}")]
    NotPrimePower(usize),
    #[error("field elements belong to different fields")]
    MixedFields,
    #[error("zero has no multiplicative inverse")]
    DivisionByZero,
    #[error("coefficient {coeff} out of range for characteristic {p}")]
    CoefficientOutOfRange { coeff: u32, p: u32 },
    #[error("point does not belong to this phase space")]
    ForeignPoint,
    #[error("matrix is not Hermitian (max |M - M^H| = {0:e})")]
    NotHermitian(f64),
    #[error("vector is not normalized (|norm - 1| = {0:e})")]
    NotUnitVector(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid Pauli string: {0}")]
    InvalidPauli(String),
    #[error("Pauli table: {0}")]
    PauliTable(String),
    #[error("projector for sign pattern {pattern} has rank other than one (trace {trace})")]
    ProjectorRank { pattern: usize, trace: f64 },
    #[error("unsupported dimension {0}: {1}")]
    UnsupportedDimension(usize, &'static str),
    #[error("MUB verification failed: max deviation {deviation:e} exceeds {tolerance:e}")]
    MubVerification { deviation: f64, tolerance: f64 },
    #[error("index tuple {0:?} is not valid for this MUB set")]
    InvalidIndex(Vec<usize>),
    #[error("invalid quantum net: {0}")]
    InvalidNet(String),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error(
        "a full scan at d = {dimension} visits {} operators; heavy runs must be enabled explicitly",
        group_thousands(*.operators)
    )]
    HeavyScan { dimension: usize, operators: u64 },
    #[error("point operators fail the spot check (|Tr A - 1| = {trace:e}, |A - A^H| = {hermiticity:e})")]
    SpotCheck { trace: f64, hermiticity: f64 },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// `134217728` as `134,217,728`.
pub fn group_thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}
