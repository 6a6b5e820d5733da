//! N-qubit Pauli operators in symplectic form and Clifford unitaries.
//!
//! A [`PauliOperator`] is `i^phase · σ_0 ⊗ … ⊗ σ_{n-1}` where each
//! `σ_j ∈ {I, X, Y, Z}` is encoded by the bit pair `(x_j, z_j)` with
//! `(1, 1) ↦ Y`. Under this convention every Hermitian Pauli has an even
//! phase exponent, so stored stabilizers, checks and logicals carry a plain
//! ±1 sign, while intermediate products such as `X·Z = -iY` keep their exact
//! phase.

mod clifford;

pub use clifford::{random_clifford, CliffordUnitary};

use std::fmt;
use std::str::FromStr;

use crate::bitlinalg::{BitMatrix, BitVector};
use crate::error::{Error, Result};

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Phase exponent (mod 4) picked up by the word-parallel product of two
/// Pauli strings, together with the resulting bits.
#[inline]
pub(crate) fn mul_word(x1: u64, z1: u64, x2: u64, z2: u64) -> (u64, u64, i32) {
    // XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i.
    let xo1 = x1 & !z1;
    let y1 = x1 & z1;
    let zo1 = !x1 & z1;
    let xo2 = x2 & !z2;
    let y2 = x2 & z2;
    let zo2 = !x2 & z2;
    let plus = (xo1 & y2) | (y1 & zo2) | (zo1 & xo2);
    let minus = (y1 & xo2) | (zo1 & y2) | (xo1 & zo2);
    (
        x1 ^ x2,
        z1 ^ z2,
        plus.count_ones() as i32 - minus.count_ones() as i32,
    )
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: BitVector,
    z: BitVector,
    phase: u8,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: BitVector::zeros(n),
            z: BitVector::zeros(n),
            phase: 0,
        }
    }

    pub fn from_xz(x: BitVector, z: BitVector, phase: u8) -> Self {
        assert_eq!(x.len(), z.len(), "x and z parts differ in length");
        Self {
            n: x.len(),
            x,
            z,
            phase: phase & 3,
        }
    }

    /// From a `2n`-bit `(x|z)` vector.
    pub fn from_symplectic(v: &BitVector, phase: u8) -> Self {
        assert!(v.len() % 2 == 0, "symplectic vector must have even length");
        let n = v.len() / 2;
        let x = v.select(&(0..n).collect::<Vec<_>>());
        let z = v.select(&(n..2 * n).collect::<Vec<_>>());
        Self::from_xz(x, z, phase)
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut op = Self::identity(n);
        op.set(qubit, p);
        op
    }

    /// Tensor product of X on every listed qubit.
    pub fn x_on(n: usize, qubits: &[usize]) -> Self {
        Self::from_xz(
            BitVector::from_indices(n, qubits.iter().copied()),
            BitVector::zeros(n),
            0,
        )
    }

    pub fn z_on(n: usize, qubits: &[usize]) -> Self {
        Self::from_xz(
            BitVector::zeros(n),
            BitVector::from_indices(n, qubits.iter().copied()),
            0,
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> &BitVector {
        &self.x
    }

    pub fn z(&self) -> &BitVector {
        &self.z
    }

    /// Exponent `e` of the global factor `i^e`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// `true` for a `-1` sign. Only meaningful for Hermitian operators.
    pub fn is_negative(&self) -> bool {
        self.phase == 2
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x.get(qubit), self.z.get(qubit))
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        let (x, z) = p.bits();
        self.x.set(qubit, x);
        self.z.set(qubit, z);
    }

    pub fn weight(&self) -> usize {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Qubits on which the operator acts nontrivially.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.x.iter_ones().chain(self.z.iter_ones()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Identity up to phase.
    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn to_symplectic(&self) -> BitVector {
        self.x.concat(&self.z)
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    pub fn negated(mut self) -> Self {
        self.phase = (self.phase + 2) & 3;
        self
    }

    pub(crate) fn add_phase(&mut self, delta: i32) {
        self.phase = ((self.phase as i32 + delta).rem_euclid(4)) as u8;
    }

    /// The same operator on `total ≥ n` qubits, identity on the new ones.
    pub fn extended(&self, total: usize) -> Self {
        assert!(total >= self.n);
        let mut x = BitVector::zeros(total);
        let mut z = BitVector::zeros(total);
        for i in self.x.iter_ones() {
            x.set(i, true);
        }
        for i in self.z.iter_ones() {
            z.set(i, true);
        }
        Self::from_xz(x, z, self.phase)
    }

    /// `self ⊗ other` with `other` on the qubits following `self`.
    pub fn tensor(&self, other: &PauliOperator) -> Self {
        Self::from_xz(
            self.x.concat(&other.x),
            self.z.concat(&other.z),
            (self.phase + other.phase) & 3,
        )
    }

    /// `self ← self · other`, exact phase.
    pub(crate) fn mul_assign_right(&mut self, other: &PauliOperator) {
        debug_assert_eq!(self.n, other.n);
        let mut delta = other.phase as i32;
        let xs = self.x.words_mut();
        let zs = self.z.words_mut();
        for (w, (ox, oz)) in other.x.words().iter().zip(other.z.words()).enumerate() {
            let (x, z, d) = mul_word(xs[w], zs[w], *ox, *oz);
            xs[w] = x;
            zs[w] = z;
            delta += d;
        }
        self.add_phase(delta);
    }

    /// The product `self · other`.
    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator> {
        if self.n != other.n {
            return Err(Error::QubitMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut out = self.clone();
        out.mul_assign_right(other);
        Ok(out)
    }

    #[inline]
    pub(crate) fn anticommutes_with(&self, other: &PauliOperator) -> bool {
        debug_assert_eq!(self.n, other.n);
        let mut acc = 0u32;
        let (ax, az, bx, bz) = (self.x.words(), self.z.words(), other.x.words(), other.z.words());
        for w in 0..ax.len() {
            acc ^= ((ax[w] & bz[w]) ^ (az[w] & bx[w])).count_ones();
        }
        acc & 1 == 1
    }

    pub fn commutes(&self, other: &PauliOperator) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::QubitMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(!self.anticommutes_with(other))
    }

    /// Restriction to `support` (in the given order), without phase.
    pub(crate) fn restrict(&self, support: &[usize]) -> PauliOperator {
        PauliOperator::from_xz(self.x.select(support), self.z.select(support), 0)
    }

    /// Product of `ops` in order, exact phase.
    pub fn product<'a>(n: usize, ops: impl IntoIterator<Item = &'a PauliOperator>) -> Self {
        let mut acc = Self::identity(n);
        for op in ops {
            acc.mul_assign_right(op);
        }
        acc
    }

    pub fn letters(&self) -> String {
        (0..self.n).map(|q| self.get(q).letter()).collect()
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}{}", self.letters())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    /// Accepts an optional `+`, `-`, `−`, `+i`, `-i` or `i` prefix followed
    /// by letters from `IXYZ` (qubit 0 first).
    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::PauliParse(s.to_string());
        let t = s.trim();
        let (sign, rest) = if let Some(r) = t.strip_prefix('+') {
            (0u8, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = t.strip_prefix('−') {
            (2, r)
        } else {
            (0, t)
        };
        let (phase, letters) = match rest.strip_prefix('i') {
            Some(r) => (sign + 1, r),
            None => (sign, rest),
        };
        let n = letters.chars().count();
        let mut op = PauliOperator::identity(n);
        for (q, c) in letters.chars().enumerate() {
            let p = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(err()),
            };
            op.set(q, p);
        }
        Ok(op.with_phase(phase))
    }
}

impl serde::Serialize for PauliOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for PauliOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `T_ij = 1` iff `a[i]` anticommutes with `b[j]`. Row `i` is the XOR of
/// per-qubit columns of `b` over the support of `a[i]`, so sparse `a` is
/// cheap.
pub fn anticommutation_matrix(n: usize, a: &[PauliOperator], b: &[PauliOperator]) -> BitMatrix {
    let g = b.len();
    let mut col_x = vec![BitVector::zeros(g); n];
    let mut col_z = vec![BitVector::zeros(g); n];
    for (j, p) in b.iter().enumerate() {
        debug_assert_eq!(p.n, n);
        for q in p.x.iter_ones() {
            col_x[q].set(j, true);
        }
        for q in p.z.iter_ones() {
            col_z[q].set(j, true);
        }
    }
    let rows: Vec<BitVector> = a
        .iter()
        .map(|p| {
            debug_assert_eq!(p.n, n);
            let mut r = BitVector::zeros(g);
            for q in p.x.iter_ones() {
                r.xor_assign(&col_z[q]);
            }
            for q in p.z.iter_ones() {
                r.xor_assign(&col_x[q]);
            }
            r
        })
        .collect();
    BitMatrix::from_rows_with_cols(&rows, g)
}

/// First pair `(i, j)`, `i < j`, of anticommuting operators in `ops`.
pub(crate) fn first_anticommuting_pair(n: usize, ops: &[PauliOperator]) -> Option<(usize, usize)> {
    let t = anticommutation_matrix(n, ops, ops);
    (0..ops.len()).find_map(|i| t.row(i).iter_ones().find(|&j| j > i).map(|j| (i, j)))
}

/// Symplectic inner product of two `(x|z)` vectors of length `2n`.
pub fn symplectic_product(a: &BitVector, b: &BitVector) -> bool {
    assert_eq!(a.len(), b.len());
    let n = a.len() / 2;
    let mut acc = false;
    for i in a.iter_ones() {
        let partner = if i < n { i + n } else { i - n };
        acc ^= b.get(partner);
    }
    acc
}
