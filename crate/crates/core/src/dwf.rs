//! Discrete Wigner functions over a quantum net.
//!
//! A [`QuantumNet`] fixes which basis each striation carries and which basis
//! vector each line carries. Given a net, `W_β = Tr(ρ A_β)/d`, the line sums
//! of `W` reproduce the projector probabilities, and `ρ = Σ_β W_β A_β`.

use std::path::Path;

use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::census::{
    csv_err, geometric_point_operator, operator_count, point_operator, CensusReport, PointOperatorIndex,
};
use crate::error::{Error, Result};
use crate::geometry::PhaseSpace;
use crate::linalg::{hermitian_eig, trace_product, CMat, CVec};
use crate::mub::MubSet;
use crate::scalar::Real;

/// Association of striations to bases and lines to basis vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumNet {
    striation_to_basis: Vec<usize>,
    /// `line_to_vector[striation][line_id]`.
    line_to_vector: Vec<Vec<usize>>,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&i| i < p.len() && !std::mem::replace(&mut seen[i], true))
}

impl QuantumNet {
    pub fn new(striation_to_basis: Vec<usize>, line_to_vector: Vec<Vec<usize>>) -> Result<Self> {
        let d = line_to_vector.first().map(Vec::len).unwrap_or(0);
        if striation_to_basis.len() != d + 1 || line_to_vector.len() != d + 1 {
            return Err(Error::InvalidNet(format!(
                "expected {} striations, got {} / {}",
                d + 1,
                striation_to_basis.len(),
                line_to_vector.len()
            )));
        }
        if !is_permutation(&striation_to_basis) {
            return Err(Error::InvalidNet("striation map is not a bijection".into()));
        }
        if let Some(s) = line_to_vector.iter().position(|p| p.len() != d || !is_permutation(p)) {
            return Err(Error::InvalidNet(format!("line map of striation {s} is not a bijection")));
        }
        Ok(Self { striation_to_basis, line_to_vector })
    }

    /// Striation `s` carries basis `s`; line `b` carries vector `b`.
    pub fn canonical(d: usize) -> Self {
        Self { striation_to_basis: (0..=d).collect(), line_to_vector: vec![(0..d).collect(); d + 1] }
    }

    /// Uniformly random bijections.
    pub fn random(d: usize, rng: &mut impl Rng) -> Self {
        let mut striation_to_basis: Vec<usize> = (0..=d).collect();
        striation_to_basis.shuffle(rng);
        let line_to_vector = (0..=d)
            .map(|_| {
                let mut p: Vec<usize> = (0..d).collect();
                p.shuffle(rng);
                p
            })
            .collect();
        Self { striation_to_basis, line_to_vector }
    }

    pub fn dimension(&self) -> usize {
        self.line_to_vector[0].len()
    }

    pub fn basis_of(&self, striation: usize) -> usize {
        self.striation_to_basis[striation]
    }

    pub fn vector_of(&self, striation: usize, line: usize) -> usize {
        self.line_to_vector[striation][line]
    }

    pub fn is_canonical(&self) -> bool {
        *self == Self::canonical(self.dimension())
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T> {
    mat: CMat<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(mat: CMat<T>) -> Result<Self> {
        let tol = T::tolerance(1e-10);
        let herm = mat.hermitian_deviation();
        if herm > tol {
            return Err(Error::InvalidDensity(format!("not Hermitian ({:e})", herm.as_f64())));
        }
        let tr = mat.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidDensity(format!("trace {} + {}i", tr.re, tr.im)));
        }
        let lo = hermitian_eig(&mat)?.min();
        if lo < -tol {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {lo}")));
        }
        Ok(Self { mat })
    }

    pub fn pure(state: &CVec<T>) -> Result<Self> {
        let dev = (state.norm() - T::one()).abs();
        if dev > T::tolerance(1e-10) {
            return Err(Error::NotUnitVector(dev.as_f64()));
        }
        Ok(Self { mat: crate::linalg::projector(state) })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { mat: CMat::identity(d).scale(T::lit(1.0 / d as f64)) }
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.mat
    }

    pub fn dimension(&self) -> usize {
        self.mat.dim()
    }
}

/// Wigner function values indexed by phase-point index.
#[derive(Clone, Debug, PartialEq)]
pub struct DwfMap {
    pub dimension: usize,
    pub values: Vec<f64>,
}

impl DwfMap {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `d` rows of `d` values: row `x`, column `y`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        for row in self.values.chunks(self.dimension) {
            w.write_record(row.iter().map(|v| format!("{v:.12}"))).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_dims<T: Real>(d: usize, m: &MubSet<T>, ps: &PhaseSpace, net: &QuantumNet) -> Result<()> {
    for got in [m.dimension(), ps.dimension(), net.dimension()] {
        if got != d {
            return Err(Error::DimensionMismatch { expected: d, got });
        }
    }
    Ok(())
}

/// `W_β = Tr(ρ A_β)/d` at every phase-space point.
pub fn evaluate<T: Real>(rho: &DensityMatrix<T>, m: &MubSet<T>, ps: &PhaseSpace, net: &QuantumNet) -> Result<DwfMap> {
    let d = rho.dimension();
    check_dims(d, m, ps, net)?;
    let inv_d = 1.0 / d as f64;
    let values = ps
        .points()
        .iter()
        .map(|pt| {
            let a = geometric_point_operator(m, ps, net, pt)?;
            Ok(trace_product(rho.matrix(), &a).re.as_f64() * inv_d)
        })
        .collect::<Result<_>>()?;
    Ok(DwfMap { dimension: d, values })
}

/// Sum of `W` along every line, as `sums[striation][line_id]`.
pub fn line_sums(w: &DwfMap, ps: &PhaseSpace) -> Result<Vec<Vec<f64>>> {
    if w.dimension != ps.dimension() {
        return Err(Error::DimensionMismatch { expected: ps.dimension(), got: w.dimension });
    }
    Ok(ps
        .striations()
        .iter()
        .map(|s| s.lines.iter().map(|l| l.points.iter().map(|&p| w.values[p]).sum()).collect())
        .collect())
}

/// `Σ_β W_β A_β`.
pub fn reconstruct<T: Real>(w: &DwfMap, m: &MubSet<T>, ps: &PhaseSpace, net: &QuantumNet) -> Result<CMat<T>> {
    let d = w.dimension;
    check_dims(d, m, ps, net)?;
    if w.values.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, got: w.values.len() });
    }
    let mut rho = CMat::zeros(d);
    for (pt, &wv) in ps.points().iter().zip(&w.values) {
        rho.add_assign(&geometric_point_operator(m, ps, net, pt)?.scale(T::lit(wv)));
    }
    Ok(rho)
}

/// `(W_min, W_max) = (λ_min/d, λ_max/d)` over the whole operator set.
pub fn dwf_extrema(census: &CensusReport) -> (f64, f64) {
    let d = census.dimension as f64;
    (census.lambda_min / d, census.lambda_max / d)
}

/// Largest dimension enumerated by [`nonnegativity_check`] without override.
pub const NONNEGATIVITY_DEFAULT_MAX_DIM: usize = 3;

/// `min_c ⟨ψ|A_c|ψ⟩` by enumerating every point operator, with the
/// minimizing index.
pub fn nonnegativity_check<T: Real>(
    m: &MubSet<T>,
    state: &CVec<T>,
    allow_large: bool,
) -> Result<(f64, PointOperatorIndex)> {
    let d = m.dimension();
    if state.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: state.len() });
    }
    let dev = (state.norm() - T::one()).abs();
    if dev > T::tolerance(1e-10) {
        return Err(Error::NotUnitVector(dev.as_f64()));
    }
    if d > NONNEGATIVITY_DEFAULT_MAX_DIM && !allow_large {
        return Err(Error::UnsupportedDimension(d, "full enumeration beyond d = 3 needs an explicit override"));
    }
    let mut best = (f64::INFINITY, 0u64);
    for linear in 0..operator_count(d) {
        let a = point_operator(m, &PointOperatorIndex::from_linear(d, linear))?;
        let v = state.inner(&a.apply(state)).re.as_f64();
        if v < best.0 {
            best = (v, linear);
        }
    }
    Ok((best.0, PointOperatorIndex::from_linear(d, best.1)))
}

/// State file: a pure state vector or a density matrix, entries `[re, im]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    Vector { vector: Vec<[f64; 2]> },
    Density { density: Vec<Vec<[f64; 2]>> },
}

impl StateFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn to_density<T: Real>(&self) -> Result<DensityMatrix<T>> {
        let c = |&[re, im]: &[f64; 2]| Complex::new(T::lit(re), T::lit(im));
        match self {
            StateFile::Vector { vector } => DensityMatrix::pure(&CVec::new(vector.iter().map(c).collect())),
            StateFile::Density { density } => {
                DensityMatrix::new(CMat::from_rows(density.iter().map(|r| r.iter().map(c).collect()).collect())?)
            }
        }
    }
}

/// Haar-random pure state.
pub fn random_pure_state<T: Real>(d: usize, rng: &mut impl Rng) -> CVec<T> {
    use rand_distr::StandardNormal;
    loop {
        let v = CVec::new(
            (0..d)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex::new(T::lit(re), T::lit(im))
                })
                .collect(),
        );
        if v.norm() > T::lit(1e-6) {
            return v.normalized();
        }
    }
}

/// Random full-rank mixed state: a random convex mixture of `d` Haar-random
/// pure states.
pub fn random_mixed_state<T: Real>(d: usize, rng: &mut impl Rng) -> DensityMatrix<T> {
    let cols: Vec<CVec<T>> = (0..d).map(|_| random_pure_state(d, rng)).collect();
    let weights: Vec<f64> = (0..d).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut mat = CMat::zeros(d);
    for (v, w) in cols.iter().zip(&weights) {
        mat.add_assign(&crate::linalg::projector(v).scale(T::lit(w / total)));
    }
    let tr = mat.trace().re;
    let mut mat = mat.scale(tr.recip());
    for i in 0..d {
        mat[(i, i)] = Complex::new(mat[(i, i)].re, T::zero());
    }
    DensityMatrix::new(mat).expect("convex mixture of pure states")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{census, ScanOptions};
    use crate::field::FieldSpec;
    use crate::linalg::projector;
    use crate::mub::{default_mub, mub_qubit};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(d: usize) -> (MubSet<f64>, PhaseSpace) {
        (default_mub(d).unwrap(), PhaseSpace::build(&FieldSpec::of_order(d).unwrap()))
    }

    #[test]
    fn net_validation() {
        assert!(QuantumNet::new(vec![0, 1, 2], vec![vec![0, 1]; 3]).is_ok());
        assert!(QuantumNet::new(vec![0, 0, 2], vec![vec![0, 1]; 3]).is_err());
        assert!(QuantumNet::new(vec![0, 1, 2], vec![vec![0, 1], vec![1, 1], vec![0, 1]]).is_err());
        assert!(QuantumNet::new(vec![0, 1], vec![vec![0, 1]; 3]).is_err());
        assert!(QuantumNet::canonical(4).is_canonical());
    }

    #[test]
    fn maximally_mixed_is_flat() {
        for d in [2, 3, 4, 5] {
            let (m, ps) = setup(d);
            let w = evaluate(&DensityMatrix::maximally_mixed(d), &m, &ps, &QuantumNet::canonical(d)).unwrap();
            for v in &w.values {
                assert!((v - 1.0 / (d * d) as f64).abs() < 1e-12);
            }
            for row in line_sums(&w, &ps).unwrap() {
                for s in row {
                    assert!((s - 1.0 / d as f64).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn qubit_zero_state_vertical_lines() {
        let (m, ps) = setup(2);
        let rho = DensityMatrix::pure(&CVec::basis(2, 0)).unwrap();
        let w = evaluate(&rho, &m, &ps, &QuantumNet::canonical(2)).unwrap();
        let sums = line_sums(&w, &ps).unwrap();
        assert!((sums[0][0] - 1.0).abs() < 1e-12);
        assert!(sums[0][1].abs() < 1e-12);
    }

    #[test]
    fn line_sums_equal_projector_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in [2, 3, 4, 5, 7] {
            let (m, ps) = setup(d);
            for _ in 0..5 {
                let net = QuantumNet::random(d, &mut rng);
                let rho = random_mixed_state::<f64>(d, &mut rng);
                let w = evaluate(&rho, &m, &ps, &net).unwrap();
                assert!((w.total() - 1.0).abs() < 1e-9);
                let sums = line_sums(&w, &ps).unwrap();
                for (s, row) in sums.iter().enumerate() {
                    for (l, &sum) in row.iter().enumerate() {
                        let q = projector(m.vector(net.basis_of(s), net.vector_of(s, l)));
                        let p = trace_product(&q, rho.matrix()).re;
                        assert!((sum - p).abs() < 1e-10, "d={d} s={s} l={l}");
                    }
                }
            }
        }
    }

    #[test]
    fn point_operators_on_a_line_sum_to_d_times_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in [3, 4] {
            let (m, ps) = setup(d);
            let net = QuantumNet::random(d, &mut rng);
            for line in ps.lines() {
                let mut sum = CMat::zeros(d);
                for &p in &line.points {
                    sum.add_assign(&geometric_point_operator(&m, &ps, &net, &ps.points()[p]).unwrap());
                }
                let q = projector(
                    m.vector(net.basis_of(line.striation_id), net.vector_of(line.striation_id, line.line_id)),
                );
                assert!(sum.sub(&q.scale(d as f64)).frobenius() < 1e-10);
            }
        }
    }

    #[test]
    fn pure_own_line_sums_to_one() {
        let (m, ps) = setup(3);
        let net = QuantumNet::canonical(3);
        let rho = DensityMatrix::pure(m.vector(2, 1)).unwrap();
        let w = evaluate(&rho, &m, &ps, &net).unwrap();
        assert!((line_sums(&w, &ps).unwrap()[2][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for d in [2, 3, 4, 5] {
            let (m, ps) = setup(d);
            for i in 0..20 {
                let net = if i == 0 { QuantumNet::canonical(d) } else { QuantumNet::random(d, &mut rng) };
                let rho = if i % 2 == 0 {
                    DensityMatrix::pure(&random_pure_state(d, &mut rng)).unwrap()
                } else {
                    random_mixed_state(d, &mut rng)
                };
                let w = evaluate(&rho, &m, &ps, &net).unwrap();
                let back = reconstruct(&w, &m, &ps, &net).unwrap();
                assert!(back.sub(rho.matrix()).frobenius() < 1e-9);
            }
        }
        let (m, ps) = setup(3);
        let w = evaluate(&DensityMatrix::maximally_mixed(3), &m, &ps, &QuantumNet::canonical(3)).unwrap();
        assert!(reconstruct(&w, &m, &ps, &QuantumNet::canonical(4)).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(CMat::<f64>::diag(&[0.5, 0.5])).is_ok());
        assert!(DensityMatrix::new(CMat::<f64>::diag(&[1.5, -0.5])).is_err());
        assert!(DensityMatrix::new(CMat::<f64>::diag(&[0.5, 0.6])).is_err());
        assert!(DensityMatrix::pure(&CVec::<f64>::from_real(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn extrema_from_census() {
        let m = mub_qubit::<f64>();
        let r = census(&m, &ScanOptions::default()).unwrap();
        let (lo, hi) = dwf_extrema(&r);
        let r3 = 3f64.sqrt();
        assert!((hi - (1.0 + r3) / 4.0).abs() < 1e-12);
        assert!((lo - (1.0 - r3) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn mub_vectors_are_nonnegative_and_tilted_state_is_not() {
        for d in [2, 3] {
            let m = default_mub::<f64>(d).unwrap();
            for basis in m.bases() {
                for v in basis {
                    let (lo, _) = nonnegativity_check(&m, v, false).unwrap();
                    assert!(lo >= -1e-10);
                }
            }
        }
        let m = mub_qubit::<f64>();
        let t = std::f64::consts::PI / 8.0;
        let psi = CVec::from_real(&[t.cos(), t.sin()]);
        let (lo, _) = nonnegativity_check(&m, &psi, false).unwrap();
        // Separable oracle: the minimum picks the least likely outcome in
        // every basis independently.
        let oracle: f64 = m
            .bases()
            .iter()
            .map(|b| b.iter().map(|v| v.inner(&psi).norm_sqr()).fold(f64::INFINITY, f64::min))
            .sum::<f64>()
            - 1.0;
        assert!((lo - oracle).abs() < 1e-12);
        assert!(lo < 0.0);
        assert!(nonnegativity_check(&default_mub::<f64>(5).unwrap(), &CVec::basis(5, 0), false).is_err());
    }

    #[test]
    fn state_file_formats() {
        let v: StateFile = serde_json::from_str(r#"{"vector": [[1,0],[0,0]]}"#).unwrap();
        assert!(v.to_density::<f64>().is_ok());
        let dm: StateFile = serde_json::from_str(r#"{"density": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#).unwrap();
        assert_eq!(dm.to_density::<f64>().unwrap().matrix(), &CMat::diag(&[0.5, 0.5]));
        let bad: StateFile = serde_json::from_str(r#"{"vector": [[1,0],[1,0]]}"#).unwrap();
        assert!(bad.to_density::<f64>().is_err());
    }

    #[test]
    fn dwf_csv_grid() {
        let (m, ps) = setup(3);
        let w = evaluate(&DensityMatrix::maximally_mixed(3), &m, &ps, &QuantumNet::canonical(3)).unwrap();
        let mut buf = Vec::new();
        w.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().all(|l| l.split(',').count() == 3));
    }
}
