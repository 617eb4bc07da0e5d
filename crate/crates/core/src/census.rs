//! Phase-space point operators and the exhaustive spectrum census.
//!
//! A point operator picks one vector from each of the `d + 1` bases,
//! `A = Σ_r |v_{r,c_r}⟩⟨v_{r,c_r}| − I`. There are `d^(d+1)` of them for a
//! fixed MUB set. The scan walks their linear indices as a base-d odometer
//! (`c_0` most significant), keeps running prefix sums of projectors so each
//! step costs about one matrix addition, and computes eigenvalues only.
//!
//! The index space is cut into fixed blocks of [`BLOCK`] operators and each
//! worker takes a contiguous run of blocks. Per-block floating-point partials
//! are combined in block order and integer counts commute, so every result is
//! bit-identical for any worker count.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dwf::QuantumNet;
use crate::error::{Error, Result};
use crate::geometry::{PhasePoint, PhaseSpace};
use crate::linalg::{projector, CMat, EigenvalueSolver};
use crate::mub::MubSet;
use crate::scalar::Real;

/// Operators per scheduling block.
pub const BLOCK: u64 = 4096;

/// Eigenvalues are grouped on a grid of this spacing.
pub const KEY_RESOLUTION: f64 = 1e-6;

/// Scans larger than this need [`ScanOptions::allow_heavy`].
pub const HEAVY_THRESHOLD: u64 = 100_000_000;

/// Tuple `c` of `d + 1` vector indices, one per basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointOperatorIndex(Vec<usize>);

impl PointOperatorIndex {
    pub fn new(d: usize, digits: Vec<usize>) -> Result<Self> {
        if digits.len() != d + 1 || digits.iter().any(|&c| c >= d) {
            return Err(Error::InvalidIndex(digits));
        }
        Ok(Self(digits))
    }

    /// Decodes a linear index, `c_0` most significant.
    pub fn from_linear(d: usize, mut linear: u64) -> Self {
        let mut digits = vec![0; d + 1];
        for slot in digits.iter_mut().rev() {
            *slot = (linear % d as u64) as usize;
            linear /= d as u64;
        }
        Self(digits)
    }

    pub fn to_linear(&self, d: usize) -> u64 {
        self.0.iter().fold(0, |acc, &c| acc * d as u64 + c as u64)
    }

    pub fn digits(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for PointOperatorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Number of point operators, `d^(d+1)`.
pub fn operator_count(d: usize) -> u64 {
    (d as u64).pow(d as u32 + 1)
}

/// `A_c = Σ_r |v_{r,c_r}⟩⟨v_{r,c_r}| − I`.
pub fn point_operator<T: Real>(m: &MubSet<T>, c: &PointOperatorIndex) -> Result<CMat<T>> {
    let d = m.dimension();
    if c.0.len() != d + 1 || c.0.iter().any(|&k| k >= d) {
        return Err(Error::InvalidIndex(c.0.clone()));
    }
    let mut a = CMat::identity(d).scale(-T::one());
    for (r, &k) in c.0.iter().enumerate() {
        a.add_assign(&projector(m.vector(r, k)));
    }
    Ok(a)
}

/// The index tuple read off the `d + 1` lines through `point` under `net`.
pub fn geometric_index(ps: &PhaseSpace, net: &QuantumNet, point: &PhasePoint) -> Result<PointOperatorIndex> {
    let d = ps.dimension();
    if net.dimension() != d {
        return Err(Error::DimensionMismatch { expected: d, got: net.dimension() });
    }
    let lines = ps.lines_through(point)?;
    let mut digits = vec![0; d + 1];
    for line in lines {
        let s = line.striation_id;
        digits[net.basis_of(s)] = net.vector_of(s, line.line_id);
    }
    PointOperatorIndex::new(d, digits)
}

/// `A_β` for the projectors the net assigns to the lines through `β`.
pub fn geometric_point_operator<T: Real>(
    m: &MubSet<T>,
    ps: &PhaseSpace,
    net: &QuantumNet,
    point: &PhasePoint,
) -> Result<CMat<T>> {
    if m.dimension() != ps.dimension() {
        return Err(Error::DimensionMismatch { expected: ps.dimension(), got: m.dimension() });
    }
    point_operator(m, &geometric_index(ps, net, point)?)
}

/// Progress callback: `(operators done, total)`. Called from worker threads.
pub type Progress<'a> = &'a (dyn Fn(u64, u64) + Sync);

#[derive(Clone, Copy)]
pub struct ScanOptions<'a> {
    pub workers: usize,
    /// Maximum number of classes that keep a representative index in the
    /// report. Counts are always exact.
    pub representative_limit: usize,
    pub allow_heavy: bool,
    pub progress: Option<Progress<'a>>,
}

impl Default for ScanOptions<'_> {
    fn default() -> Self {
        Self { workers: 1, representative_limit: 10_000, allow_heavy: false, progress: None }
    }
}

impl<'a> ScanOptions<'a> {
    pub fn with_workers(workers: usize) -> Self {
        Self { workers, ..Self::default() }
    }
}

/// One class of operators sharing a spectrum.
#[derive(Clone, Debug)]
pub struct SpectrumClass {
    /// Ascending eigenvalues in units of [`KEY_RESOLUTION`].
    pub key: Vec<i64>,
    pub count: u64,
    /// Lowest-index member, if within the representative limit.
    pub representative: Option<PointOperatorIndex>,
    /// Unrounded eigenvalues of the lowest-index member.
    pub spectrum: Vec<f64>,
}

impl SpectrumClass {
    pub fn key_values(&self) -> Vec<f64> {
        self.key.iter().map(|&k| k as f64 * KEY_RESOLUTION).collect()
    }
}

#[derive(Clone, Debug)]
pub struct CensusReport {
    pub dimension: usize,
    pub mub_source: String,
    pub classes: Vec<SpectrumClass>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub argmin: PointOperatorIndex,
    pub argmax: PointOperatorIndex,
    /// `Σ_c λ_max(A_c)`, summed in fixed block order.
    pub sum_lambda_max: f64,
    pub total_operators: u64,
    pub elapsed_seconds: f64,
    pub workers: usize,
}

/// Global extrema and the top-eigenvalue sum, without the class histogram.
#[derive(Clone, Debug)]
pub struct ScanSummary {
    pub dimension: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub argmin: PointOperatorIndex,
    pub argmax: PointOperatorIndex,
    pub sum_lambda_max: f64,
    pub total_operators: u64,
    pub elapsed_seconds: f64,
    pub workers: usize,
}

struct ClassAcc {
    count: u64,
    rep: u64,
    spectrum: Vec<f64>,
}

struct Partial {
    min: (f64, u64),
    max: (f64, u64),
    block_sums: Vec<f64>,
    classes: Option<HashMap<Vec<i64>, ClassAcc>>,
}

fn better_min(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

fn better_max(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

fn round_key(x: f64) -> i64 {
    (x / KEY_RESOLUTION).round() as i64
}

/// Walks blocks `[first, last)` of the index space.
fn scan_blocks<T: Real>(
    projs: &[CMat<T>],
    d: usize,
    total: u64,
    blocks: (u64, u64),
    with_classes: bool,
    done: &AtomicU64,
    progress: Option<Progress<'_>>,
) -> Partial {
    let mut partial = Partial {
        min: (f64::INFINITY, u64::MAX),
        max: (f64::NEG_INFINITY, u64::MAX),
        block_sums: Vec::with_capacity((blocks.1 - blocks.0) as usize),
        classes: with_classes.then(HashMap::new),
    };
    let start = blocks.0 * BLOCK;
    let end = (blocks.1 * BLOCK).min(total);
    if start >= end {
        return partial;
    }

    let mut solver = EigenvalueSolver::<T>::new(d);
    let mut eig = vec![T::zero(); d];
    let mut eig64 = vec![0.0f64; d];
    let mut key = vec![0i64; d];
    // prefix[r] = −I + Σ_{s<r} P_{s,c_s}
    let mut prefix: Vec<CMat<T>> = vec![CMat::identity(d).scale(-T::one()); d + 2];
    let mut digits = PointOperatorIndex::from_linear(d, start).0;
    let mut dirty = 0usize;

    let mut block_sum = 0.0f64;
    let mut in_block = 0u64;
    for linear in start..end {
        for r in dirty..=d {
            let (head, tail) = prefix.split_at_mut(r + 1);
            let next = &mut tail[0];
            next.data_mut().copy_from_slice(head[r].data());
            next.add_assign(&projs[r * d + digits[r]]);
        }
        solver.eigenvalues_into(&prefix[d + 1], &mut eig);
        for (dst, src) in eig64.iter_mut().zip(&eig) {
            *dst = src.as_f64();
        }
        let lo = eig64[0];
        let hi = eig64[d - 1];
        partial.min = better_min(partial.min, (lo, linear));
        partial.max = better_max(partial.max, (hi, linear));
        block_sum += hi;

        if let Some(classes) = partial.classes.as_mut() {
            for (k, &x) in key.iter_mut().zip(&eig64) {
                *k = round_key(x);
            }
            match classes.get_mut(key.as_slice()) {
                Some(acc) => acc.count += 1,
                None => {
                    classes.insert(key.clone(), ClassAcc { count: 1, rep: linear, spectrum: eig64.clone() });
                }
            }
        }

        in_block += 1;
        if in_block == BLOCK || linear + 1 == end {
            partial.block_sums.push(block_sum);
            block_sum = 0.0;
            let now = done.fetch_add(in_block, Ordering::Relaxed) + in_block;
            if let Some(cb) = progress {
                cb(now, total);
            }
            in_block = 0;
        }

        // Advance the odometer; `dirty` is the most significant changed digit.
        let mut pos = d;
        loop {
            digits[pos] += 1;
            if digits[pos] < d || pos == 0 {
                break;
            }
            digits[pos] = 0;
            pos -= 1;
        }
        dirty = pos;
    }
    partial
}

fn run_scan<T: Real>(m: &MubSet<T>, opts: &ScanOptions<'_>, with_classes: bool) -> Result<(Partial, f64, usize)> {
    let d = m.dimension();
    let total = operator_count(d);
    if total > HEAVY_THRESHOLD && !opts.allow_heavy {
        return Err(Error::HeavyScan { dimension: d, operators: total });
    }
    let workers = opts.workers.max(1);
    let projs: Vec<CMat<T>> =
        (0..=d).flat_map(|r| (0..d).map(move |k| (r, k))).map(|(r, k)| projector(m.vector(r, k))).collect();
    let nblocks = total.div_ceil(BLOCK);
    let per = nblocks.div_ceil(workers as u64);
    let done = AtomicU64::new(0);
    let t0 = Instant::now();

    let partials: Vec<Partial> = if workers == 1 {
        vec![scan_blocks(&projs, d, total, (0, nblocks), with_classes, &done, opts.progress)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers as u64)
                .map(|w| {
                    let range = ((w * per).min(nblocks), ((w + 1) * per).min(nblocks));
                    let projs = &projs;
                    let done = &done;
                    let progress = opts.progress;
                    scope.spawn(move || scan_blocks(projs, d, total, range, with_classes, done, progress))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("scan worker panicked")).collect()
        })
    };

    let mut merged = Partial {
        min: (f64::INFINITY, u64::MAX),
        max: (f64::NEG_INFINITY, u64::MAX),
        block_sums: Vec::with_capacity(nblocks as usize),
        classes: with_classes.then(HashMap::new),
    };
    for p in partials {
        merged.min = better_min(merged.min, p.min);
        merged.max = better_max(merged.max, p.max);
        merged.block_sums.extend(p.block_sums);
        if let (Some(all), Some(part)) = (merged.classes.as_mut(), p.classes) {
            for (key, acc) in part {
                match all.get_mut(&key) {
                    Some(existing) => {
                        existing.count += acc.count;
                        if acc.rep < existing.rep {
                            existing.rep = acc.rep;
                            existing.spectrum = acc.spectrum;
                        }
                    }
                    None => {
                        all.insert(key, acc);
                    }
                }
            }
        }
    }
    Ok((merged, t0.elapsed().as_secs_f64(), workers))
}

/// Samples evenly spaced operators and returns the worst
/// `(|Tr A − 1|, max |A − A^H|)`.
pub fn spot_check<T: Real>(m: &MubSet<T>, samples: u64) -> Result<(f64, f64)> {
    let d = m.dimension();
    let total = operator_count(d);
    let step = (total / samples.max(1)).max(1);
    let mut worst = (0.0f64, 0.0f64);
    let mut linear = 0;
    while linear < total {
        let a = point_operator(m, &PointOperatorIndex::from_linear(d, linear))?;
        let tr = a.trace();
        worst.0 = worst.0.max((tr.re.as_f64() - 1.0).abs().max(tr.im.as_f64().abs()));
        worst.1 = worst.1.max(a.hermitian_deviation().as_f64());
        linear += step;
    }
    Ok(worst)
}

/// Full spectrum census over all `d^(d+1)` point operators.
pub fn census<T: Real>(m: &MubSet<T>, opts: &ScanOptions<'_>) -> Result<CensusReport> {
    let d = m.dimension();
    let (trace_dev, herm_dev) = spot_check(m, 10_000)?;
    let tol = T::tolerance(1e-9).as_f64();
    if trace_dev > tol || herm_dev > tol {
        return Err(Error::SpotCheck { trace: trace_dev, hermiticity: herm_dev });
    }
    let (partial, elapsed, workers) = run_scan(m, opts, true)?;
    let mut classes: Vec<SpectrumClass> = partial
        .classes
        .expect("class histogram requested")
        .into_iter()
        .map(|(key, acc)| SpectrumClass {
            key,
            count: acc.count,
            representative: Some(PointOperatorIndex::from_linear(d, acc.rep)),
            spectrum: acc.spectrum,
        })
        .collect();
    classes.sort_by(|a, b| b.key[0].cmp(&a.key[0]).then_with(|| a.key.cmp(&b.key)));
    for class in classes.iter_mut().skip(opts.representative_limit) {
        class.representative = None;
    }
    Ok(CensusReport {
        dimension: d,
        mub_source: m.source().to_string(),
        classes,
        lambda_min: partial.min.0,
        lambda_max: partial.max.0,
        argmin: PointOperatorIndex::from_linear(d, partial.min.1),
        argmax: PointOperatorIndex::from_linear(d, partial.max.1),
        sum_lambda_max: partial.block_sums.iter().sum(),
        total_operators: operator_count(d),
        elapsed_seconds: elapsed,
        workers,
    })
}

/// Extrema and `Σ λ_max` over all point operators, without class bookkeeping.
pub fn scan_summary<T: Real>(m: &MubSet<T>, opts: &ScanOptions<'_>) -> Result<ScanSummary> {
    let d = m.dimension();
    let (partial, elapsed, workers) = run_scan(m, opts, false)?;
    Ok(ScanSummary {
        dimension: d,
        lambda_min: partial.min.0,
        lambda_max: partial.max.0,
        argmin: PointOperatorIndex::from_linear(d, partial.min.1),
        argmax: PointOperatorIndex::from_linear(d, partial.max.1),
        sum_lambda_max: partial.block_sums.iter().sum(),
        total_operators: operator_count(d),
        elapsed_seconds: elapsed,
        workers,
    })
}

/// `(λ_min, λ_max, argmin, argmax)` over all point operators.
pub fn extremal_eigenvalues<T: Real>(
    m: &MubSet<T>,
    opts: &ScanOptions<'_>,
) -> Result<(f64, f64, PointOperatorIndex, PointOperatorIndex)> {
    let s = scan_summary(m, opts)?;
    Ok((s.lambda_min, s.lambda_max, s.argmin, s.argmax))
}

/// Same dimension, same class keys, same counts.
pub fn census_equal(a: &CensusReport, b: &CensusReport) -> bool {
    if a.dimension != b.dimension || a.classes.len() != b.classes.len() {
        return false;
    }
    let mut ka: Vec<(&[i64], u64)> = a.classes.iter().map(|c| (c.key.as_slice(), c.count)).collect();
    let mut kb: Vec<(&[i64], u64)> = b.classes.iter().map(|c| (c.key.as_slice(), c.count)).collect();
    ka.sort();
    kb.sort();
    ka == kb
}

/// Provenance attached to serialized reports.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub net: Option<String>,
    pub workers: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassRecord {
    pub spectrum: Vec<f64>,
    pub count: u64,
    pub representative: Option<PointOperatorIndex>,
}

/// JSON form of a [`CensusReport`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusRecord {
    pub dim: usize,
    pub mub_source: String,
    pub classes: Vec<ClassRecord>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub total_operators: u64,
    pub elapsed_seconds: f64,
    pub meta: ReportMeta,
}

pub(crate) fn round_to(x: f64, digits: u32) -> f64 {
    let scale = 10f64.powi(digits as i32);
    let r = (x * scale).round() / scale;
    // Avoid printing -0.0.
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

impl CensusReport {
    pub fn to_record(&self, digits: u32, meta: ReportMeta) -> CensusRecord {
        CensusRecord {
            dim: self.dimension,
            mub_source: self.mub_source.clone(),
            classes: self
                .classes
                .iter()
                .map(|c| ClassRecord {
                    spectrum: c.spectrum.iter().map(|&x| round_to(x, digits)).collect(),
                    count: c.count,
                    representative: c.representative.clone(),
                })
                .collect(),
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            total_operators: self.total_operators,
            elapsed_seconds: self.elapsed_seconds,
            meta,
        }
    }

    /// One class per row: `count,representative,lambda_1,...,lambda_d`.
    pub fn write_csv<W: std::io::Write>(&self, out: W, digits: u32) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["count".to_string(), "representative".to_string()];
        header.extend((1..=self.dimension).map(|k| format!("lambda_{k}")));
        w.write_record(&header).map_err(csv_err)?;
        for c in &self.classes {
            let mut row =
                vec![c.count.to_string(), c.representative.as_ref().map(|r| r.to_string()).unwrap_or_default()];
            row.extend(c.spectrum.iter().map(|&x| format!("{:.*}", digits as usize, round_to(x, digits))));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
