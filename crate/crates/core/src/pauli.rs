//! Phase-free multi-qubit Pauli strings in symplectic form, commuting sets,
//! and the stabilizer MUB tables for two and three qubits.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::One;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::Real;

/// Maximum supported qubit count (keeps `x`/`z` in a `u16` each).
pub const MAX_QUBITS: usize = 8;

/// A tensor product of `1, X, Y, Z` on `n` qubits, ignoring phase.
///
/// Qubit 0 is the leftmost letter and occupies the most significant bit of
/// `x` and `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: u8,
    x: u16,
    z: u16,
}

impl PauliString {
    pub fn from_bits(n: usize, x: u16, z: u16) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidPauli(format!("unsupported qubit count {n}")));
        }
        let mask = ((1u32 << n) - 1) as u16;
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::InvalidPauli("bits beyond qubit count".into()));
        }
        Ok(Self { n: n as u8, x, z })
    }

    /// Decodes the `2n`-bit integer `(x << n) | z`.
    pub fn from_symplectic(n: usize, bits: u32) -> Result<Self> {
        Self::from_bits(n, (bits >> n) as u16, (bits & ((1 << n) - 1)) as u16)
    }

    pub fn identity(n: usize) -> Self {
        Self { n: n as u8, x: 0, z: 0 }
    }

    pub fn qubits(&self) -> usize {
        self.n as usize
    }

    pub fn x_bits(&self) -> u16 {
        self.x
    }

    pub fn z_bits(&self) -> u16 {
        self.z
    }

    /// `(x << n) | z`, the canonical integer encoding.
    pub fn symplectic(&self) -> u32 {
        ((self.x as u32) << self.n) | self.z as u32
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Letter on qubit `q` (0 = leftmost): one of `1`, `X`, `Y`, `Z`.
    pub fn letter(&self, q: usize) -> char {
        let bit = self.n as usize - 1 - q;
        match (self.x >> bit & 1, self.z >> bit & 1) {
            (0, 0) => '1',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    /// Symplectic product parity: `true` iff the strings commute.
    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Product up to phase.
    pub fn times(&self, other: &Self) -> Self {
        Self { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z }
    }

    /// The explicit `2^n × 2^n` Hermitian matrix (Y = [[0, -i], [i, 0]]).
    pub fn matrix<T: Real>(&self) -> CMat<T> {
        let n = self.qubits();
        let dim = 1usize << n;
        let mut m = CMat::zeros(dim);
        // P|col⟩ = phase·|col ⊕ x⟩: each letter contributes a factor depending
        // on its input bit b: X → 1, Z → (-1)^b, Y → i·(-1)^b.
        for col in 0..dim {
            let row = col ^ self.x as usize;
            let mut phase: Complex<T> = Complex::one();
            for q in 0..n {
                let bit = n - 1 - q;
                let b = (col >> bit) & 1;
                let sign = if b == 1 { -T::one() } else { T::one() };
                match self.letter(q) {
                    'Z' => phase = phase * sign,
                    'Y' => phase = phase * Complex::new(T::zero(), sign),
                    _ => {}
                }
            }
            m[(row, col)] = phase;
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.qubits() {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses words like `XY1` or `XYI`; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let n = letters.len();
        let (mut x, mut z) = (0u16, 0u16);
        for (q, ch) in letters.iter().enumerate() {
            let bit = n - 1 - q;
            let (bx, bz) = match ch.to_ascii_uppercase() {
                '1' | 'I' => (0, 0),
                'X' => (1, 0),
                'Y' => (1, 1),
                'Z' => (0, 1),
                other => return Err(Error::InvalidPauli(format!("unknown letter {other:?} in {s:?}"))),
            };
            x |= bx << bit;
            z |= bz << bit;
        }
        Self::from_bits(n, x, z)
    }
}

/// Rank of a set of symplectic vectors over GF(2).
fn gf2_rank(vectors: impl IntoIterator<Item = u32>) -> usize {
    let mut basis: Vec<u32> = Vec::new();
    for v in vectors {
        let mut v = v;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// `2^n - 1` pairwise-commuting Pauli strings forming a stabilizer group minus
/// the identity, together with `n` independent generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutingSet {
    strings: Vec<PauliString>,
    generators: Vec<PauliString>,
}

impl CommutingSet {
    /// Validates a row; generators are the first independent entries in row
    /// order.
    pub fn new(strings: Vec<PauliString>) -> Result<Self> {
        let n = strings.first().ok_or_else(|| Error::PauliTable("empty row".into()))?.qubits();
        let want = (1usize << n) - 1;
        let label = || strings.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ");
        if strings.len() != want {
            return Err(Error::PauliTable(format!("row [{}] has {} strings, expected {want}", label(), strings.len())));
        }
        if strings.iter().any(|s| s.qubits() != n) {
            return Err(Error::PauliTable(format!("row [{}] mixes qubit counts", label())));
        }
        if strings.iter().any(PauliString::is_identity) {
            return Err(Error::PauliTable(format!("row [{}] contains the identity", label())));
        }
        for (i, a) in strings.iter().enumerate() {
            for b in &strings[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(Error::PauliTable(format!("{a} and {b} anticommute in row [{}]", label())));
                }
            }
        }
        let mut generators: Vec<PauliString> = Vec::with_capacity(n);
        for s in &strings {
            let syms = generators.iter().chain(std::iter::once(s)).map(PauliString::symplectic);
            if gf2_rank(syms) == generators.len() + 1 {
                generators.push(*s);
            }
            if generators.len() == n {
                break;
            }
        }
        if generators.len() != n {
            return Err(Error::PauliTable(format!("row [{}] has rank {} < {n}", label(), generators.len())));
        }
        // The row must be exactly the generated group minus the identity.
        let mut group = BTreeSet::new();
        for mask in 1u32..(1 << n) {
            let mut p = PauliString::identity(n);
            for (k, g) in generators.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    p = p.times(g);
                }
            }
            group.insert(p);
        }
        let row: BTreeSet<_> = strings.iter().copied().collect();
        if row != group {
            return Err(Error::PauliTable(format!("row [{}] is not closed under products", label())));
        }
        Ok(Self { strings, generators })
    }

    pub fn parse(words: &[&str]) -> Result<Self> {
        Self::new(words.iter().map(|w| w.parse()).collect::<Result<_>>()?)
    }

    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn qubits(&self) -> usize {
        self.strings[0].qubits()
    }

    /// Sorted symplectic encodings, used for canonical ordering.
    pub fn canonical_key(&self) -> Vec<u32> {
        let mut k: Vec<u32> = self.strings.iter().map(PauliString::symplectic).collect();
        k.sort_unstable();
        k
    }
}

/// Checks that `rows` is a partition of all `4^n - 1` non-identity strings
/// into `2^n + 1` commuting sets.
pub fn check_cover(rows: &[CommutingSet]) -> Result<()> {
    let n = rows.first().ok_or_else(|| Error::PauliTable("no rows".into()))?.qubits();
    if rows.len() != (1 << n) + 1 {
        return Err(Error::PauliTable(format!("{} rows, expected {}", rows.len(), (1 << n) + 1)));
    }
    let mut seen = BTreeSet::new();
    for row in rows {
        if row.qubits() != n {
            return Err(Error::PauliTable("rows mix qubit counts".into()));
        }
        for s in row.strings() {
            if !seen.insert(*s) {
                return Err(Error::PauliTable(format!("{s} appears in more than one row")));
            }
        }
    }
    if seen.len() != (1 << (2 * n)) - 1 {
        return Err(Error::PauliTable(format!("rows cover {} of {} strings", seen.len(), (1 << (2 * n)) - 1)));
    }
    Ok(())
}

const TWO_QUBIT_TABLE: [[&str; 3]; 5] =
    [["XX", "X1", "1X"], ["ZZ", "Z1", "1Z"], ["YY", "Y1", "1Y"], ["XY", "YZ", "ZX"], ["XZ", "YX", "ZY"]];

// Row 7 entry 4 reads `YY1`: it is the product XZ1·ZX1, and the only string
// left uncovered by the other rows.
const THREE_QUBIT_TABLE: [[&str; 7]; 9] = [
    ["XXX", "XX1", "X1X", "X11", "1XX", "1X1", "11X"],
    ["XXY", "XYX", "YXX", "YYY", "ZZ1", "Z1Z", "1ZZ"],
    ["XXZ", "XYY", "YZ1", "Y1X", "ZXY", "ZYZ", "1ZX"],
    ["XYZ", "XZX", "YX1", "Y1Y", "ZYX", "ZZZ", "1XY"],
    ["XY1", "X1Z", "YXY", "YZX", "ZXX", "ZZY", "1YZ"],
    ["XZY", "X1Y", "YZZ", "Y1Z", "ZZX", "Z1X", "1Z1"],
    ["XZZ", "XZ1", "YYZ", "YY1", "ZXZ", "ZX1", "11Z"],
    ["YXZ", "YYX", "YZY", "Y11", "1XZ", "1YX", "1ZY"],
    ["ZYY", "ZY1", "Z1Y", "Z11", "1YY", "1Y1", "11Y"],
];

/// The five commuting sets of the standard two-qubit stabilizer MUB.
pub fn two_qubit_table() -> Vec<CommutingSet> {
    TWO_QUBIT_TABLE.iter().map(|row| CommutingSet::parse(row).expect("valid built-in row")).collect()
}

/// The nine commuting sets of the standard three-qubit stabilizer MUB.
pub fn three_qubit_table() -> Vec<CommutingSet> {
    THREE_QUBIT_TABLE.iter().map(|row| CommutingSet::parse(row).expect("valid built-in row")).collect()
}

/// The single-qubit table `{Z}, {X}, {Y}`.
pub fn one_qubit_table() -> Vec<CommutingSet> {
    ["Z", "X", "Y"].iter().map(|w| CommutingSet::parse(&[w]).expect("valid built-in row")).collect()
}

/// Every partition of the 15 non-identity two-qubit strings into five
/// commuting triples, rows sorted within each partition, partitions sorted
/// lexicographically by their canonical row encodings.
pub fn enumerate_pauli_partitions(n: usize) -> Result<Vec<Vec<CommutingSet>>> {
    if n != 2 {
        return Err(Error::InvalidArgument(format!(
            "partition enumeration is implemented for two qubits only, got {n}"
        )));
    }
    let strings: Vec<PauliString> =
        (1u32..16).map(|b| PauliString::from_symplectic(2, b).expect("2-qubit bits")).collect();
    // All maximal commuting sets: {a, b, a·b} with a, b commuting.
    let mut candidates: BTreeSet<Vec<u32>> = BTreeSet::new();
    for (i, a) in strings.iter().enumerate() {
        for b in &strings[i + 1..] {
            if a.commutes_with(b) {
                let mut row = vec![a.symplectic(), b.symplectic(), a.times(b).symplectic()];
                row.sort_unstable();
                candidates.insert(row);
            }
        }
    }
    let candidates: Vec<Vec<u32>> = candidates.into_iter().collect();

    fn search(cands: &[Vec<u32>], used: u32, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if used == 0xFFFE {
            out.push(chosen.clone());
            return;
        }
        // Smallest uncovered string must be covered by the next row.
        let first = (1..16).find(|b| used >> b & 1 == 0).expect("uncovered string");
        for (i, row) in cands.iter().enumerate() {
            if !row.contains(&first) {
                continue;
            }
            let mask: u32 = row.iter().map(|b| 1 << b).sum();
            if mask & used != 0 {
                continue;
            }
            chosen.push(i);
            search(cands, used | mask, chosen, out);
            chosen.pop();
        }
    }
    let mut found = Vec::new();
    search(&candidates, 0, &mut Vec::new(), &mut found);

    let mut partitions: Vec<Vec<Vec<u32>>> = found
        .into_iter()
        .map(|idx| {
            let mut rows: Vec<Vec<u32>> = idx.iter().map(|&i| candidates[i].clone()).collect();
            rows.sort();
            rows
        })
        .collect();
    partitions.sort();
    partitions.dedup();
    partitions
        .into_iter()
        .map(|rows| {
            rows.into_iter()
                .map(|row| {
                    CommutingSet::new(
                        row.into_iter().map(|b| PauliString::from_symplectic(2, b)).collect::<Result<_>>()?,
                    )
                })
                .collect()
        })
        .collect()
}

/// Are two matrices equal up to sign? Used to cross-check symplectic products.
#[cfg(test)]
fn equal_up_to_phase(a: &CMat<f64>, b: &CMat<f64>) -> bool {
    use num_traits::Zero;
    let n = a.dim();
    let mut phase = None;
    for r in 0..n {
        for c in 0..n {
            let (x, y) = (a[(r, c)], b[(r, c)]);
            if x.is_zero() != y.is_zero() {
                return false;
            }
            if !x.is_zero() {
                let ph = x / y;
                match phase {
                    None => phase = Some(ph),
                    Some(p) => {
                        if (p - ph).norm() > 1e-12 {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}
