//! Small dense complex linear algebra.
//!
//! Two Hermitian eigensolvers live here:
//!
//! * [`hermitian_eig`]: cyclic complex Jacobi rotations, returns eigenvalues
//!   and an orthonormal eigenbasis. Used wherever vectors are needed.
//! * [`EigenvalueSolver`]: Householder reduction to a real tridiagonal matrix
//!   followed by implicit QL, eigenvalues only, allocation-free after
//!   construction. This is the census hot path.
//!
//! The two share no code, so each serves as an oracle for the other.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type C<T> = Complex<T>;

/// Complex column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CVec<T> {
    entries: Vec<C<T>>,
}

impl<T: Real> CVec<T> {
    pub fn new(entries: Vec<C<T>>) -> Self {
        Self { entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self { entries: vec![C::zero(); n] }
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.entries[k] = C::one();
        v
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self { entries: entries.iter().map(|&x| C::new(T::lit(x), T::zero())).collect() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [C<T>] {
        &mut self.entries
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> C<T> {
        self.entries.iter().zip(&other.entries).fold(C::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn norm(&self) -> T {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { entries: self.entries.iter().map(|z| z * s).collect() }
    }

    pub fn normalized(&self) -> Self {
        self.scale(C::new(self.norm().recip(), T::zero()))
    }

    /// Multiplies by a global phase so the first non-negligible component is
    /// real and positive.
    pub fn phase_fixed(&self) -> Self {
        let cutoff = self.norm() * T::tolerance(1e-12);
        match self.entries.iter().find(|z| z.norm() > cutoff) {
            Some(z) => self.scale(z.conj() / C::new(z.norm(), T::zero())),
            None => self.clone(),
        }
    }

    pub fn is_unit(&self, tol: T) -> bool {
        (self.norm() - T::one()).abs() <= tol
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> CVec<U> {
        CVec { entries: self.entries.iter().map(|z| C::new(f(z.re), f(z.im))).collect() }
    }
}

impl<T> Index<usize> for CVec<T> {
    type Output = C<T>;
    fn index(&self, i: usize) -> &C<T> {
        &self.entries[i]
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    n: usize,
    data: Vec<C<T>>,
}

impl<T> Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C<T> {
        &self.data[r * self.n + c]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C<T> {
        &mut self.data[r * self.n + c]
    }
}

impl<T: Real> CMat<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
        }
        Ok(Self { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C::new(v, T::zero());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                m[(c, r)] = self[(r, c)].conj();
            }
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] = out.data[r * n + c] + a * other.data[k * n + c];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &CVec<T>) -> CVec<T> {
        let n = self.n;
        CVec::new((0..n).map(|r| (0..n).fold(C::zero(), |acc, c| acc + self.data[r * n + c] * v[c])).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { n: self.n, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { n: self.n, data }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + b;
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> C<T> {
        (0..self.n).fold(C::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `max |M - M^H|` over entries.
    pub fn hermitian_deviation(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.n {
            for c in r..self.n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> CMat<U> {
        CMat { n: self.n, data: self.data.iter().map(|z| C::new(f(z.re), f(z.im))).collect() }
    }
}

/// `|v⟩⟨v|`.
pub fn projector<T: Real>(v: &CVec<T>) -> CMat<T> {
    let n = v.len();
    let mut m = CMat::zeros(n);
    for r in 0..n {
        for c in 0..n {
            m[(r, c)] = v[r] * v[c].conj();
        }
    }
    m
}

/// `Tr(A·B)` without forming the product.
pub fn trace_product<T: Real>(a: &CMat<T>, b: &CMat<T>) -> C<T> {
    let n = a.dim();
    let mut acc = C::zero();
    for r in 0..n {
        for k in 0..n {
            acc = acc + a[(r, k)] * b[(k, r)];
        }
    }
    acc
}

/// `⟨v|M|v⟩` for a unit vector `v`.
pub fn rayleigh<T: Real>(m: &CMat<T>, v: &CVec<T>) -> Result<T> {
    let dev = (v.norm() - T::one()).abs();
    if dev > T::tolerance(1e-10) {
        return Err(Error::NotUnitVector(dev.as_f64()));
    }
    Ok(v.inner(&m.apply(v)).re)
}

/// Eigenvalues (ascending) and, optionally, aligned orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Option<Vec<CVec<T>>>,
}

impl<T: Real> Spectrum<T> {
    pub fn min(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> T {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// Eigenvector of the largest eigenvalue (the last one on ties).
    pub fn top_vector(&self) -> Option<&CVec<T>> {
        self.eigenvectors.as_ref().and_then(|v| v.last())
    }
}

fn check_hermitian<T: Real>(m: &CMat<T>) -> Result<()> {
    let dev = m.hermitian_deviation();
    if dev > T::tolerance(1e-10) {
        return Err(Error::NotHermitian(dev.as_f64()));
    }
    Ok(())
}

/// Full Hermitian eigendecomposition by cyclic Jacobi rotations.
pub fn hermitian_eig<T: Real>(m: &CMat<T>) -> Result<Spectrum<T>> {
    check_hermitian(m)?;
    let n = m.dim();
    let mut a = m.clone();
    // Symmetrize so rounding in the input cannot bias the rotations.
    for r in 0..n {
        a[(r, r)] = C::new(a[(r, r)].re, T::zero());
        for c in r + 1..n {
            let avg = (a[(r, c)] + a[(c, r)].conj()) * T::lit(0.5);
            a[(r, c)] = avg;
            a[(c, r)] = avg.conj();
        }
    }
    let mut v = CMat::identity(n);
    let scale = a.frobenius();
    let threshold = scale * T::tolerance(1e-14);
    let off = |a: &CMat<T>| {
        let mut s = T::zero();
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    s = s + a[(r, c)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    for _sweep in 0..64 {
        if off(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= T::min_positive_value() {
                    continue;
                }
                let phase = apq / C::new(mag, T::zero());
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Real Jacobi rotation for [[app, mag], [mag, aqq]].
                let theta = (aqq - app) / (T::lit(2.0) * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                // J = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let j00 = C::new(c, T::zero());
                let j01 = C::new(s, T::zero());
                let j10 = phase.conj() * (-s);
                let j11 = phase.conj() * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * j00 + akq * j10;
                    a[(k, q)] = akp * j01 + akq * j11;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = j00.conj() * apk + j10.conj() * aqk;
                    a[(q, k)] = j01.conj() * apk + j11.conj() * aqk;
                }
                a[(p, q)] = C::zero();
                a[(q, p)] = C::zero();
                a[(p, p)] = C::new(a[(p, p)].re, T::zero());
                a[(q, q)] = C::new(a[(q, q)].re, T::zero());
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * j00 + vkq * j10;
                    v[(k, q)] = vkp * j01 + vkq * j11;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = order.iter().map(|&i| CVec::new((0..n).map(|k| v[(k, i)]).collect())).collect();
    Ok(Spectrum { eigenvalues, eigenvectors: Some(eigenvectors) })
}

/// Eigenvalues of Hermitian matrices of a fixed size, with reusable scratch.
///
/// The matrix is reduced to Hermitian tridiagonal form by Householder
/// reflections; since a diagonal unitary maps it to a real symmetric
/// tridiagonal matrix with off-diagonals `|e_k|`, only the moduli are kept and
/// the spectrum is finished with implicit QL.
#[derive(Clone, Debug)]
pub struct EigenvalueSolver<T> {
    n: usize,
    work: Vec<C<T>>,
    u: Vec<C<T>>,
    p: Vec<C<T>>,
    diag: Vec<T>,
    off: Vec<T>,
}

impl<T: Real> EigenvalueSolver<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            work: vec![C::zero(); n * n],
            u: vec![C::zero(); n],
            p: vec![C::zero(); n],
            diag: vec![T::zero(); n],
            off: vec![T::zero(); n],
        }
    }

    /// Writes the ascending eigenvalues of `m` (assumed Hermitian) into `out`.
    pub fn eigenvalues_into(&mut self, m: &CMat<T>, out: &mut [T]) {
        let n = self.n;
        debug_assert_eq!(m.dim(), n);
        self.work.copy_from_slice(m.data());
        self.tridiagonalize();
        tql_eigenvalues(&mut self.diag, &mut self.off);
        out.copy_from_slice(&self.diag);
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    }

    /// Checked, allocating convenience wrapper.
    pub fn eigenvalues(&mut self, m: &CMat<T>) -> Result<Vec<T>> {
        if m.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: m.dim() });
        }
        check_hermitian(m)?;
        let mut out = vec![T::zero(); self.n];
        self.eigenvalues_into(m, &mut out);
        Ok(out)
    }

    fn tridiagonalize(&mut self) {
        let n = self.n;
        let a = &mut self.work;
        let two = T::lit(2.0);
        for k in 0..n.saturating_sub(1) {
            let m = n - k - 1;
            let sigma: T = (k + 1..n).map(|i| a[i * n + k].norm_sqr()).sum();
            let alpha = sigma.sqrt();
            self.off[k] = alpha;
            if alpha <= T::min_positive_value() || m == 1 {
                // Nothing to annihilate; keep the modulus of the single entry.
                continue;
            }
            let x0 = a[(k + 1) * n + k];
            let x0n = x0.norm();
            let phase = if x0n > T::zero() { x0 / C::new(x0n, T::zero()) } else { C::one() };
            // v = x + phase·alpha·e1, |v|² = 2·alpha·(alpha + |x0|)
            let vnorm2 = two * alpha * (alpha + x0n);
            let s = (two / vnorm2).sqrt();
            for i in 0..m {
                let xi = a[(k + 1 + i) * n + k];
                self.u[i] = if i == 0 { (xi + phase * alpha) * s } else { xi * s };
            }
            // Trailing block B := H B H with H = I - u u^H, |u|² = 2.
            let mut kdot: C<T> = C::zero();
            for i in 0..m {
                let mut acc = C::zero();
                let row = (k + 1 + i) * n + k + 1;
                for j in 0..m {
                    acc = acc + a[row + j] * self.u[j];
                }
                self.p[i] = acc;
                kdot = kdot + self.u[i].conj() * acc;
            }
            let half = kdot.re * T::lit(0.5);
            for i in 0..m {
                self.p[i] = self.p[i] - self.u[i] * half;
            }
            for i in 0..m {
                let row = (k + 1 + i) * n + k + 1;
                for j in 0..m {
                    a[row + j] = a[row + j] - self.u[i] * self.p[j].conj() - self.p[i] * self.u[j].conj();
                }
            }
        }
        for i in 0..n {
            self.diag[i] = a[i * n + i].re;
        }
        if n > 0 {
            self.off[n - 1] = T::zero();
        }
    }
}

/// Implicit QL with Wilkinson shifts on a real symmetric tridiagonal matrix
/// (`diag`, sub-diagonal `off[0..n-1]`). Eigenvalues overwrite `diag`.
fn tql_eigenvalues<T: Real>(diag: &mut [T], off: &mut [T]) {
    let n = diag.len();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (diag[l + 1] - diag[l]) / (two * off[l]);
            let mut r = g.hypot(T::one());
            g = diag[m] - diag[l] + off[l] / (g + r.abs().copysign(g));
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == T::zero() {
                    diag[i + 1] = diag[i + 1] - p;
                    off[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + two * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            diag[l] = diag[l] - p;
            off[l] = g;
            off[m] = T::zero();
        }
    }
}
