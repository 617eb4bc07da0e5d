//! `(d+1) → d` quantum random access codes built from point operators.
//!
//! A message is a point-operator index `c`, one d-ary symbol per basis. Alice
//! sends the top eigenvector of `A_c`; Bob recovers symbol `r` by measuring in
//! basis `r`. Averaged over `r`, the success probability of message `c` is
//! `(λ_max(A_c) + 1)/(d + 1)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::census::{operator_count, point_operator, scan_summary, PointOperatorIndex, ScanOptions};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, CVec};
use crate::mub::MubSet;
use crate::scalar::Real;

/// Trials per deterministic RNG stream in [`simulate`].
pub const TRIAL_CHUNK: u64 = 1 << 16;

/// Encodings are precomputed when the message space is at most this large.
const ENCODING_CACHE_LIMIT: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QracReport {
    pub d: usize,
    pub p_q_exact: f64,
    pub p_q_empirical: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

pub struct QracCode<'a, T> {
    mub: &'a MubSet<T>,
    cache: Option<Vec<CVec<T>>>,
}

impl<'a, T: Real> QracCode<'a, T> {
    pub fn new(mub: &'a MubSet<T>) -> Result<Self> {
        let mut code = Self { mub, cache: None };
        let total = operator_count(mub.dimension());
        if total <= ENCODING_CACHE_LIMIT {
            let d = mub.dimension();
            code.cache =
                Some((0..total).map(|l| code.compute(&PointOperatorIndex::from_linear(d, l))).collect::<Result<_>>()?);
        }
        Ok(code)
    }

    pub fn dimension(&self) -> usize {
        self.mub.dimension()
    }

    pub fn mub(&self) -> &MubSet<T> {
        self.mub
    }

    fn compute(&self, message: &PointOperatorIndex) -> Result<CVec<T>> {
        let spectrum = hermitian_eig(&point_operator(self.mub, message)?)?;
        Ok(spectrum.top_vector().expect("eigenvectors requested").clone())
    }

    /// Top eigenvector of `A_message`.
    pub fn encode(&self, message: &PointOperatorIndex) -> Result<CVec<T>> {
        let d = self.dimension();
        PointOperatorIndex::new(d, message.digits().to_vec())?;
        match &self.cache {
            Some(cache) => Ok(cache[message.to_linear(d) as usize].clone()),
            None => self.compute(message),
        }
    }

    /// Outcome distribution when measuring `state` in basis `r`.
    pub fn decode_distribution(&self, state: &CVec<T>, r: usize) -> Vec<f64> {
        self.mub.bases()[r].iter().map(|v| v.inner(state).norm_sqr().as_f64()).collect()
    }

    /// Success probability of `message`, averaged over the `d + 1` bases.
    pub fn average_success(&self, message: &PointOperatorIndex) -> Result<f64> {
        let psi = self.encode(message)?;
        let d = self.dimension();
        let total: f64 = (0..=d).map(|r| self.decode_distribution(&psi, r)[message.digits()[r]]).sum();
        Ok(total / (d + 1) as f64)
    }
}

/// `p_q = Σ_c (λ_max(A_c) + 1) / (d^(d+1) (d+1))` over the full operator set.
pub fn qrac_rate<T: Real>(m: &MubSet<T>, opts: &ScanOptions<'_>) -> Result<QracReport> {
    let s = scan_summary(m, opts)?;
    Ok(QracReport {
        d: m.dimension(),
        p_q_exact: rate_from_sum(m.dimension(), s.sum_lambda_max),
        p_q_empirical: None,
        trials: None,
        seed: None,
    })
}

/// `p_q` from `Σ λ_max` over all `d^(d+1)` operators.
pub fn rate_from_sum(d: usize, sum_lambda_max: f64) -> f64 {
    let n = operator_count(d) as f64;
    (sum_lambda_max + n) / (n * (d + 1) as f64)
}

fn run_chunk<T: Real>(code: &QracCode<'_, T>, seed: u64, chunk: u64, trials: u64) -> Result<u64> {
    let d = code.dimension();
    let total = operator_count(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut successes = 0;
    for _ in 0..trials {
        let message = PointOperatorIndex::from_linear(d, rng.random_range(0..total));
        let psi = code.encode(&message)?;
        let r = rng.random_range(0..=d);
        let probs = code.decode_distribution(&psi, r);
        let norm: f64 = probs.iter().sum();
        let u = rng.random::<f64>() * norm;
        let mut acc = 0.0;
        let mut outcome = d - 1;
        for (k, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                outcome = k;
                break;
            }
        }
        if outcome == message.digits()[r] {
            successes += 1;
        }
    }
    Ok(successes)
}

/// Monte Carlo run of the protocol.
///
/// Trials are cut into chunks of [`TRIAL_CHUNK`]; chunk `i` draws from the
/// ChaCha stream `i` of `seed`, so the result depends on `(trials, seed)` only.
pub fn simulate<T: Real>(code: &QracCode<'_, T>, trials: u64, seed: u64, workers: usize) -> Result<QracReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let nchunks = trials.div_ceil(TRIAL_CHUNK);
    let chunk_len = |c: u64| TRIAL_CHUNK.min(trials - c * TRIAL_CHUNK);
    let workers = (workers.max(1) as u64).min(nchunks);
    let successes: u64 = if workers == 1 {
        (0..nchunks).map(|c| run_chunk(code, seed, c, chunk_len(c))).sum::<Result<u64>>()?
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    scope.spawn(move || {
                        (w..nchunks)
                            .step_by(workers as usize)
                            .map(|c| run_chunk(code, seed, c, chunk_len(c)))
                            .sum::<Result<u64>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("simulation worker panicked")).sum::<Result<u64>>()
        })?
    };
    let d = code.dimension();
    Ok(QracReport {
        d,
        p_q_exact: exact_rate_small(code)?,
        p_q_empirical: Some(successes as f64 / trials as f64),
        trials: Some(trials),
        seed: Some(seed),
    })
}

/// Exact rate by direct evaluation when encodings are cached, else via a scan.
fn exact_rate_small<T: Real>(code: &QracCode<'_, T>) -> Result<f64> {
    let d = code.dimension();
    match &code.cache {
        Some(_) => {
            let total = operator_count(d);
            let sum: f64 = (0..total)
                .map(|l| code.average_success(&PointOperatorIndex::from_linear(d, l)))
                .sum::<Result<f64>>()?;
            Ok(sum / total as f64)
        }
        None => Ok(qrac_rate(code.mub(), &ScanOptions::default())?.p_q_exact),
    }
}

/// Best average success of a deterministic classical `3 → 1` bit code.
///
/// Enumerates all 256 encoders `{0,1}³ → {0,1}` and all 64 decoder triples
/// (one map `{0,1} → {0,1}` per bit).
pub fn classical_3to1_optimum() -> f64 {
    let mut best = 0u32;
    for encoder in 0u32..256 {
        for decoders in 0u32..64 {
            let mut wins = 0;
            for msg in 0u32..8 {
                let sent = encoder >> msg & 1;
                for bit in 0..3 {
                    let table = decoders >> (2 * bit) & 3;
                    let guess = table >> sent & 1;
                    if guess == msg >> bit & 1 {
                        wins += 1;
                    }
                }
            }
            best = best.max(wins);
        }
    }
    best as f64 / 24.0
}

/// Number of deterministic protocols searched by [`classical_3to1_optimum`].
pub const CLASSICAL_3TO1_PROTOCOLS: u32 = 256 * 64;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rayleigh;
    use crate::mub::{default_mub, mub_qubit};

    fn bloch(v: &CVec<f64>) -> [f64; 3] {
        let (a, b) = (v[0], v[1]);
        let x = 2.0 * (a.conj() * b).re;
        let y = 2.0 * (a.conj() * b).im;
        let z = a.norm_sqr() - b.norm_sqr();
        [x, y, z]
    }

    #[test]
    fn qubit_rate_matches_cube_vertex_value() {
        let m = mub_qubit::<f64>();
        let r = qrac_rate(&m, &ScanOptions::default()).unwrap();
        assert!((r.p_q_exact - (3.0 + 3f64.sqrt()) / 6.0).abs() < 1e-12);
        assert!((r.p_q_exact - (0.5 + 3f64.sqrt() / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn qutrit_rate_closed_form() {
        let m = default_mub::<f64>(3).unwrap();
        let r = qrac_rate(&m, &ScanOptions::default()).unwrap();
        assert!((r.p_q_exact - (7.0 / 18.0 + 5f64.sqrt() / 9.0)).abs() < 1e-12);
    }

    #[test]
    fn qubit_encodings_are_cube_vertices() {
        let m = mub_qubit::<f64>();
        let code = QracCode::new(&m).unwrap();
        let vs: Vec<[f64; 3]> =
            (0..8).map(|l| bloch(&code.encode(&PointOperatorIndex::from_linear(2, l)).unwrap())).collect();
        let first = vs[0];
        let s = 1.0 / 3f64.sqrt();
        // Z, X, Y measure bases 0, 1, 2 and vector 0 is the + eigenstate.
        for (got, want) in [first[2], first[0], first[1]].iter().zip([s, s, s]) {
            assert!((got - want).abs() < 1e-9);
        }
        for (i, a) in vs.iter().enumerate() {
            for b in &vs[i + 1..] {
                let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                assert!([1.0 / 3.0, -1.0 / 3.0, -1.0].iter().any(|t| (dot - t).abs() < 1e-9), "{dot}");
            }
        }
    }

    #[test]
    fn encodings_attain_top_eigenvalue() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [2usize, 3, 4, 5, 7] {
            let m = default_mub::<f64>(d).unwrap();
            let code = QracCode::new(&m).unwrap();
            for _ in 0..100 {
                let c = PointOperatorIndex::from_linear(d, rng.random_range(0..operator_count(d)));
                let a = point_operator(&m, &c).unwrap();
                let top = hermitian_eig(&a).unwrap().max();
                let psi = code.encode(&c).unwrap();
                assert!((psi.norm() - 1.0).abs() < 1e-12);
                assert!((rayleigh(&a, &psi).unwrap() - top).abs() < 1e-10);
                assert!((code.average_success(&c).unwrap() - (top + 1.0) / (d + 1) as f64).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn simulation_is_reproducible_and_worker_independent() {
        let m = mub_qubit::<f64>();
        let code = QracCode::new(&m).unwrap();
        let a = simulate(&code, 200_000, 7, 1).unwrap();
        let b = simulate(&code, 200_000, 7, 3).unwrap();
        assert_eq!(a, b);
        let c = simulate(&code, 200_000, 8, 1).unwrap();
        assert_ne!(a.p_q_empirical, c.p_q_empirical);
        let p = a.p_q_exact;
        let sigma = (p * (1.0 - p) / 200_000.0).sqrt();
        assert!((a.p_q_empirical.unwrap() - p).abs() < 4.0 * sigma);
        assert!(simulate(&code, 0, 1, 1).is_err());
    }

    #[test]
    fn classical_baseline() {
        assert_eq!(classical_3to1_optimum(), 0.75);
        assert_eq!(CLASSICAL_3TO1_PROTOCOLS, 16384);
    }
}
