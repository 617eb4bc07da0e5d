//! Complete sets of mutually unbiased bases.

use std::fmt;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::is_prime;
use crate::linalg::{CMat, CVec};
use crate::pauli::{self, check_cover, CommutingSet};
use crate::scalar::Real;

/// Tolerance applied when loading bases from a file.
pub const FILE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MubSource {
    Ivanovic,
    PauliTable,
    File,
}

impl fmt::Display for MubSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MubSource::Ivanovic => "ivanovic",
            MubSource::PauliTable => "pauli-table",
            MubSource::File => "file",
        })
    }
}

/// `d + 1` orthonormal bases of `C^d`. Vector `k` of basis `r` is
/// `bases[r][k]`.
#[derive(Clone, Debug)]
pub struct MubSet<T> {
    dimension: usize,
    bases: Vec<Vec<CVec<T>>>,
    source: MubSource,
}

/// Worst-case deviations from orthonormality and unbiasedness.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MubReport {
    /// `max |‖v‖² − 1|` over all vectors.
    pub max_norm_deviation: f64,
    /// `max |⟨u|v⟩|²` over distinct vectors of one basis.
    pub max_orthogonality_deviation: f64,
    /// `max ||⟨u|v⟩|² − 1/d|` over vectors of different bases.
    pub max_unbiasedness_deviation: f64,
}

impl MubReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_norm_deviation.max(self.max_orthogonality_deviation).max(self.max_unbiasedness_deviation)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation() <= tol
    }
}

impl<T: Real> MubSet<T> {
    /// Wraps bases without checking them; see [`MubSet::verify`].
    pub fn from_bases(bases: Vec<Vec<CVec<T>>>, source: MubSource) -> Result<Self> {
        let d = bases.first().map(Vec::len).unwrap_or(0);
        if d == 0 {
            return Err(Error::InvalidArgument("empty MUB set".into()));
        }
        if bases.len() != d + 1 {
            return Err(Error::DimensionMismatch { expected: d + 1, got: bases.len() });
        }
        for basis in &bases {
            if basis.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: basis.len() });
            }
            if let Some(v) = basis.iter().find(|v| v.len() != d) {
                return Err(Error::DimensionMismatch { expected: d, got: v.len() });
            }
        }
        Ok(Self { dimension: d, bases, source })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn bases(&self) -> &[Vec<CVec<T>>] {
        &self.bases
    }

    pub fn vector(&self, basis: usize, k: usize) -> &CVec<T> {
        &self.bases[basis][k]
    }

    pub fn source(&self) -> MubSource {
        self.source
    }

    /// Deviations from orthonormality (same basis) and unbiasedness
    /// (different bases), over all vector pairs.
    pub fn verify(&self) -> MubReport {
        let d = self.dimension;
        let inv_d = 1.0 / d as f64;
        let mut report =
            MubReport { max_norm_deviation: 0.0, max_orthogonality_deviation: 0.0, max_unbiasedness_deviation: 0.0 };
        for (i, bi) in self.bases.iter().enumerate() {
            for (j, u) in bi.iter().enumerate() {
                for (k, bk) in self.bases.iter().enumerate() {
                    for (l, v) in bk.iter().enumerate() {
                        let ov = u.inner(v).norm_sqr().as_f64();
                        if i == k {
                            if j == l {
                                report.max_norm_deviation = report.max_norm_deviation.max((ov - 1.0).abs());
                            } else {
                                report.max_orthogonality_deviation = report.max_orthogonality_deviation.max(ov);
                            }
                        } else {
                            report.max_unbiasedness_deviation =
                                report.max_unbiasedness_deviation.max((ov - inv_d).abs());
                        }
                    }
                }
            }
        }
        report
    }

    pub fn to_file(&self) -> MubFile {
        MubFile {
            dimension: self.dimension,
            source: Some(self.source),
            bases: self
                .bases
                .iter()
                .map(|b| {
                    b.iter().map(|v| v.entries().iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect()).collect()
                })
                .collect(),
        }
    }

    /// Builds a set from file contents, re-verifying at [`FILE_TOLERANCE`].
    pub fn from_file(file: &MubFile) -> Result<Self> {
        let bases = file
            .bases
            .iter()
            .map(|b| {
                b.iter()
                    .map(|v| CVec::new(v.iter().map(|&[re, im]| Complex::new(T::lit(re), T::lit(im))).collect()))
                    .collect()
            })
            .collect();
        let set = Self::from_bases(bases, MubSource::File)?;
        if set.dimension != file.dimension {
            return Err(Error::DimensionMismatch { expected: file.dimension, got: set.dimension });
        }
        let report = set.verify();
        if !report.passes(FILE_TOLERANCE) {
            return Err(Error::MubVerification { deviation: report.max_deviation(), tolerance: FILE_TOLERANCE });
        }
        Ok(set)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_file(&serde_json::from_str(&text)?)
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U + Copy) -> MubSet<U> {
        MubSet {
            dimension: self.dimension,
            bases: self.bases.iter().map(|b| b.iter().map(|v| v.map(f)).collect()).collect(),
            source: self.source,
        }
    }
}

/// On-disk representation: vectors as rows of `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MubFile {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<MubSource>,
    pub bases: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Ivanovic's complete set for an odd prime `d`: the computational basis,
/// then `|v_{r,k}⟩_j = exp(2πi(r j² + j k)/d)/√d` for `r = 1..d-1`, and the
/// Fourier basis last.
pub fn mub_prime<T: Real>(d: usize) -> Result<MubSet<T>> {
    if d == 2 {
        return Err(Error::UnsupportedDimension(d, "the quadratic-phase bases coincide for d = 2; use mub_qubit"));
    }
    if d > u32::MAX as usize || !is_prime(d as u32) {
        return Err(Error::UnsupportedDimension(d, "Ivanovic construction needs an odd prime"));
    }
    let norm = T::lit(1.0 / (d as f64).sqrt());
    let mut bases = vec![(0..d).map(|k| CVec::basis(d, k)).collect()];
    for r in 1..=d {
        let quad = if r == d { 0 } else { r };
        let basis = (0..d)
            .map(|k| {
                CVec::new(
                    (0..d)
                        .map(|j| {
                            // Reduce the exponent mod d before converting to an angle.
                            let e = (quad * j * j + j * k) % d;
                            let theta = T::lit(2.0 * std::f64::consts::PI * e as f64 / d as f64);
                            Complex::from_polar(norm, theta)
                        })
                        .collect(),
                )
            })
            .collect();
        bases.push(basis);
    }
    MubSet::from_bases(bases, MubSource::Ivanovic)
}

/// Eigenbases of Z, X and Y.
pub fn mub_qubit<T: Real>() -> MubSet<T> {
    let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let o = T::zero();
    let v = |a: (T, T), b: (T, T)| CVec::new(vec![Complex::new(a.0, a.1), Complex::new(b.0, b.1)]);
    let bases = vec![
        vec![CVec::basis(2, 0), CVec::basis(2, 1)],
        vec![v((h, o), (h, o)), v((h, o), (-h, o))],
        vec![v((h, o), (o, h)), v((h, o), (o, -h))],
    ];
    MubSet::from_bases(bases, MubSource::PauliTable).expect("well-formed qubit bases")
}

/// Common eigenbases of the rows of a stabilizer table.
///
/// Vector `Σ_k (1 − s_k)/2 · 2^(n−1−k)` of a row is the joint eigenvector with
/// eigenvalue `s_k = ±1` on generator `k`.
pub fn mub_from_pauli_table<T: Real>(rows: &[CommutingSet]) -> Result<MubSet<T>> {
    check_cover(rows)?;
    let n = rows[0].qubits();
    let d = 1usize << n;
    let id = CMat::<T>::identity(d);
    let half = T::lit(0.5);
    let mut bases = Vec::with_capacity(rows.len());
    for row in rows {
        let gens: Vec<CMat<T>> = row.generators().iter().map(|g| g.matrix()).collect();
        let mut basis = Vec::with_capacity(d);
        for pattern in 0..d {
            let mut proj = id.clone();
            for (k, g) in gens.iter().enumerate() {
                let negative = pattern >> (n - 1 - k) & 1 == 1;
                let signed = if negative { id.sub(g) } else { id.add(g) };
                proj = proj.matmul(&signed.scale(half));
            }
            let trace = proj.trace().re;
            let idempotent = proj.matmul(&proj).sub(&proj).frobenius();
            if (trace - T::one()).abs() > T::tolerance(1e-10) || idempotent > T::tolerance(1e-10) {
                return Err(Error::ProjectorRank { pattern, trace: trace.as_f64() });
            }
            let col = (0..d)
                .max_by(|&a, &b| {
                    let na: T = (0..d).map(|r| proj[(r, a)].norm_sqr()).sum();
                    let nb: T = (0..d).map(|r| proj[(r, b)].norm_sqr()).sum();
                    na.partial_cmp(&nb).expect("finite").then(b.cmp(&a))
                })
                .expect("non-empty");
            let v = CVec::new((0..d).map(|r| proj[(r, col)]).collect());
            basis.push(v.normalized().phase_fixed());
        }
        bases.push(basis);
    }
    MubSet::from_bases(bases, MubSource::PauliTable)
}

/// The default complete set for a supported dimension: Z/X/Y for d = 2,
/// Ivanovic for odd primes, the stabilizer tables for d = 4 and d = 8.
pub fn default_mub<T: Real>(d: usize) -> Result<MubSet<T>> {
    match d {
        2 => Ok(mub_qubit()),
        4 => mub_from_pauli_table(&pauli::two_qubit_table()),
        8 => mub_from_pauli_table(&pauli::three_qubit_table()),
        _ => mub_prime(d),
    }
}
