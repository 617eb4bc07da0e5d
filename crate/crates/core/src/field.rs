//! Exact arithmetic in GF(p^n).
//!
//! Elements are coefficient vectors over Z_p, lowest degree first, reduced
//! modulo a fixed monic irreducible polynomial. Elements are ordered by the
//! base-p integer their coefficients spell, so `0` has index 0 and `1` has
//! index 1.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Parameters of a finite field GF(p^n).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u32,
    n: u32,
    /// Monic modulus, coefficients low-to-high, length `n + 1`.
    modulus: Vec<u32>,
    order: usize,
}

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2u32;
    while k * k <= p {
        if p.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Splits `d` into `(p, n)` with `d = p^n`, if it is a prime power.
pub fn prime_power(d: usize) -> Option<(u32, u32)> {
    if d < 2 {
        return None;
    }
    let p = (2..=d).find(|k| d.is_multiple_of(*k))?;
    let mut rest = d;
    let mut n = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        n += 1;
    }
    (rest == 1).then_some((p as u32, n))
}

fn default_modulus(p: u32, n: u32) -> Option<Vec<u32>> {
    match (p, n) {
        (_, 1) => Some(vec![0, 1]),
        (2, 2) => Some(vec![1, 1, 1]),
        (2, 3) => Some(vec![1, 1, 0, 1]),
        _ => None,
    }
}

// Polynomial helpers over Z_p, coefficients low-to-high.

fn trim(poly: &mut Vec<u32>) {
    while poly.len() > 1 && *poly.last().unwrap() == 0 {
        poly.pop();
    }
}

/// Remainder of `num` divided by the monic polynomial `den`.
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let mut r = num.to_vec();
    trim(&mut r);
    let dd = den.len() - 1;
    while r.len() > dd && !(r.len() == 1 && r[0] == 0) {
        let shift = r.len() - 1 - dd;
        let lead = *r.last().unwrap();
        for (i, &c) in den.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - (lead * c) % p) % p;
        }
        trim(&mut r);
        if r.len() <= dd {
            break;
        }
    }
    r
}

/// Irreducibility by trial division against every monic polynomial of degree
/// 1..=n/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let n = modulus.len() - 1;
    for deg in 1..=n / 2 {
        let count = (p as usize).pow(deg as u32);
        for low in 0..count {
            let mut cand = Vec::with_capacity(deg + 1);
            let mut v = low;
            for _ in 0..deg {
                cand.push((v % p as usize) as u32);
                v /= p as usize;
            }
            cand.push(1);
            let r = poly_rem(modulus, &cand, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    /// GF(p^n) with the built-in modulus: `x` for prime fields, `x²+x+1` for
    /// GF(4), `x³+x+1` for GF(8).
    pub fn new(p: u32, n: u32) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let modulus = default_modulus(p, n).ok_or(Error::UnsupportedField { p, n })?;
        Self::with_modulus(p, n, modulus)
    }

    /// GF(p^n) reduced by a caller-supplied monic irreducible `modulus`
    /// (coefficients low-to-high, length `n + 1`).
    pub fn with_modulus(p: u32, n: u32, modulus: Vec<u32>) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::InvalidModulus("extension degree must be at least 1".into()));
        }
        if modulus.len() != n as usize + 1 {
            return Err(Error::InvalidModulus(format!("expected {} coefficients, got {}", n + 1, modulus.len())));
        }
        if let Some(&c) = modulus.iter().find(|&&c| c >= p) {
            return Err(Error::CoefficientOutOfRange { coeff: c, p });
        }
        if modulus[n as usize] != 1 {
            return Err(Error::InvalidModulus("modulus must be monic".into()));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::InvalidModulus(format!("{modulus:?} is reducible over Z_{p}")));
        }
        let order = (p as usize).checked_pow(n).ok_or(Error::UnsupportedField { p, n })?;
        Ok(Arc::new(Self { p, n, modulus, order }))
    }

    /// The field of order `d`, if `d` is a prime power with a built-in modulus.
    pub fn of_order(d: usize) -> Result<Arc<Self>> {
        let (p, n) = prime_power(d).ok_or(Error::NotPrimePower(d))?;
        Self::new(p, n)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Number of elements, `p^n`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Human-readable modulus, e.g. `x^3 + x + 1`.
    pub fn modulus_string(&self) -> String {
        poly_string(&self.modulus)
    }
}

fn poly_string(coeffs: &[u32]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(k, &c)| {
            let coeff = if c == 1 && k > 0 { String::new() } else { c.to_string() };
            match k {
                0 => coeff,
                1 => format!("{coeff}x"),
                _ => format!("{coeff}x^{k}"),
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// An element of GF(p^n).
#[derive(Clone)]
pub struct FieldElement {
    spec: Arc<FieldSpec>,
    coeffs: Vec<u32>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other) && self.coeffs == other.coeffs
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", poly_string(&self.coeffs))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", poly_string(&self.coeffs))
    }
}

impl FieldElement {
    pub fn new(spec: &Arc<FieldSpec>, coeffs: &[u32]) -> Result<Self> {
        if coeffs.len() != spec.n as usize {
            return Err(Error::InvalidArgument(format!(
                "GF({}) elements have {} coefficients, got {}",
                spec.order,
                spec.n,
                coeffs.len()
            )));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= spec.p) {
            return Err(Error::CoefficientOutOfRange { coeff: c, p: spec.p });
        }
        Ok(Self { spec: Arc::clone(spec), coeffs: coeffs.to_vec() })
    }

    /// The element whose coefficients spell `index` in base p.
    pub fn from_index(spec: &Arc<FieldSpec>, index: usize) -> Result<Self> {
        if index >= spec.order {
            return Err(Error::InvalidArgument(format!("index {index} out of range for GF({})", spec.order)));
        }
        let p = spec.p as usize;
        let mut v = index;
        let coeffs = (0..spec.n)
            .map(|_| {
                let c = (v % p) as u32;
                v /= p;
                c
            })
            .collect();
        Ok(Self { spec: Arc::clone(spec), coeffs })
    }

    pub fn zero(spec: &Arc<FieldSpec>) -> Self {
        Self { spec: Arc::clone(spec), coeffs: vec![0; spec.n as usize] }
    }

    pub fn one(spec: &Arc<FieldSpec>) -> Self {
        let mut e = Self::zero(spec);
        e.coeffs[0] = 1;
        e
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// Position in the canonical (base-p integer) order.
    pub fn index(&self) -> usize {
        let p = self.spec.p as usize;
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * p + c as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn same_field(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_field(other) {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.spec.p;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a + b) % p).collect();
        Ok(Self { spec: Arc::clone(&self.spec), coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let p = self.spec.p;
        let coeffs = self.coeffs.iter().map(|&a| (p - a) % p).collect();
        Self { spec: Arc::clone(&self.spec), coeffs }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.spec.p as u64;
        let n = self.spec.n as usize;
        let mut prod = vec![0u32; 2 * n - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + a as u64 * b as u64) % p) as u32;
            }
        }
        let mut r = poly_rem(&prod, &self.spec.modulus, self.spec.p);
        r.resize(n, 0);
        Ok(Self { spec: Arc::clone(&self.spec), coeffs: r })
    }

    /// `self^k` by square-and-multiply.
    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.spec);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            base = base.mul(&base).expect("same field");
            k >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `a^(q-2)`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.spec.order as u64 - 2))
    }
}

/// All elements of the field in canonical order.
pub fn enumerate(spec: &Arc<FieldSpec>) -> Vec<FieldElement> {
    (0..spec.order).map(|i| FieldElement::from_index(spec, i).expect("index in range")).collect()
}

// Operator sugar for same-field arithmetic; panics on mixed fields.

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: Self) -> FieldElement {
        FieldElement::add(self, rhs).expect("elements of the same field")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: Self) -> FieldElement {
        FieldElement::sub(self, rhs).expect("elements of the same field")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: Self) -> FieldElement {
        FieldElement::mul(self, rhs).expect("elements of the same field")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(self)
    }
}
