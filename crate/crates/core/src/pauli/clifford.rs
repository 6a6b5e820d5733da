use rand::Rng;

use super::{mul_word, symplectic_product, PauliOperator};
use crate::bitlinalg::{BitMatrix, BitVector};
use crate::error::{Error, Result};

/// A Clifford unitary modulo global phase, stored as its tableau: the
/// signed images `U X_j U†` and `U Z_j U†` of the single-qubit generators.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CliffordUnitary {
    n: usize,
    // X_0..X_{n-1}, Z_0..Z_{n-1}
    images: Vec<PauliOperator>,
}

impl CliffordUnitary {
    pub fn identity(n: usize) -> Self {
        let images = (0..n)
            .map(|j| PauliOperator::x_on(n, &[j]))
            .chain((0..n).map(|j| PauliOperator::z_on(n, &[j])))
            .collect();
        Self { n, images }
    }

    /// Builds a Clifford from the images of `X_j` and `Z_j`, checking that
    /// they are Hermitian and satisfy the canonical commutation relations.
    pub fn from_images(x_images: Vec<PauliOperator>, z_images: Vec<PauliOperator>) -> Result<Self> {
        let n = x_images.len();
        if z_images.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: z_images.len(),
            });
        }
        let images: Vec<PauliOperator> = x_images.into_iter().chain(z_images).collect();
        for (i, img) in images.iter().enumerate() {
            if img.n() != n {
                return Err(Error::QubitMismatch {
                    left: n,
                    right: img.n(),
                });
            }
            if !img.is_hermitian() {
                return Err(Error::NonHermitian(i));
            }
        }
        for a in 0..2 * n {
            for b in a + 1..2 * n {
                let expected = b == a + n;
                if images[a].anticommutes_with(&images[b]) != expected {
                    return Err(Error::InvalidArgument(format!(
                        "images {a} and {b} violate the symplectic relations"
                    )));
                }
            }
        }
        Ok(Self { n, images })
    }

    /// From a `2n × 2n` symplectic matrix whose rows are the `(x|z)` images
    /// of `X_0..X_{n-1}, Z_0..Z_{n-1}`, and one sign bit per row.
    pub fn from_symplectic(symplectic: &BitMatrix, signs: &BitVector) -> Result<Self> {
        let two_n = symplectic.rows();
        if symplectic.cols() != two_n || two_n % 2 != 0 || signs.len() != two_n {
            return Err(Error::DimensionMismatch {
                expected: two_n,
                found: symplectic.cols(),
            });
        }
        let n = two_n / 2;
        let imgs: Vec<PauliOperator> = (0..two_n)
            .map(|r| {
                PauliOperator::from_symplectic(&symplectic.row(r), if signs.get(r) { 2 } else { 0 })
            })
            .collect();
        let (xs, zs) = imgs.split_at(n);
        Self::from_images(xs.to_vec(), zs.to_vec())
    }

    pub fn hadamard(n: usize, q: usize) -> Self {
        let mut u = Self::identity(n);
        u.images[q] = PauliOperator::z_on(n, &[q]);
        u.images[n + q] = PauliOperator::x_on(n, &[q]);
        u
    }

    /// The phase gate `S = diag(1, i)`: X ↦ Y, Z ↦ Z.
    pub fn phase_s(n: usize, q: usize) -> Self {
        let mut u = Self::identity(n);
        u.images[q] = PauliOperator::single(n, q, super::Pauli::Y);
        u
    }

    pub fn cnot(n: usize, control: usize, target: usize) -> Self {
        assert_ne!(control, target);
        let mut u = Self::identity(n);
        u.images[control] = PauliOperator::x_on(n, &[control, target]);
        u.images[n + target] = PauliOperator::z_on(n, &[control, target]);
        u
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `U X_j U†`.
    pub fn x_image(&self, j: usize) -> &PauliOperator {
        &self.images[j]
    }

    /// `U Z_j U†`.
    pub fn z_image(&self, j: usize) -> &PauliOperator {
        &self.images[self.n + j]
    }

    /// Rows are the `(x|z)` images of `X_0..X_{n-1}, Z_0..Z_{n-1}`.
    pub fn symplectic(&self) -> BitMatrix {
        let rows: Vec<BitVector> = self.images.iter().map(PauliOperator::to_symplectic).collect();
        BitMatrix::from_rows_with_cols(&rows, 2 * self.n)
    }

    /// Sign bit of each image (set for `-1`).
    pub fn signs(&self) -> BitVector {
        BitVector::from_indices(
            2 * self.n,
            self.images
                .iter()
                .enumerate()
                .filter(|(_, p)| p.is_negative())
                .map(|(i, _)| i),
        )
    }

    /// Checks `S Λ Sᵀ = Λ` by direct matrix products.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        let s = self.symplectic();
        let mut lambda = BitMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            lambda.set(i, n + i, true);
            lambda.set(n + i, i, true);
        }
        let lhs = s
            .mul(&lambda)
            .and_then(|m| m.mul(&s.transpose()))
            .expect("square matrices");
        lhs == lambda
    }

    /// `U P U†` for a Pauli `P` on the same register.
    pub fn conjugate(&self, p: &PauliOperator) -> Result<PauliOperator> {
        if p.n() != self.n {
            return Err(Error::QubitMismatch {
                left: self.n,
                right: p.n(),
            });
        }
        Ok(self.conjugate_unchecked(p))
    }

    pub(crate) fn conjugate_unchecked(&self, p: &PauliOperator) -> PauliOperator {
        let n = self.n;
        let mut acc = PauliOperator::identity(n).with_phase(p.phase());
        for j in 0..n {
            match (p.x().get(j), p.z().get(j)) {
                (false, false) => {}
                (true, false) => acc.mul_assign_right(&self.images[j]),
                (false, true) => acc.mul_assign_right(&self.images[n + j]),
                (true, true) => {
                    // Y = i X Z
                    acc.add_phase(1);
                    acc.mul_assign_right(&self.images[j]);
                    acc.mul_assign_right(&self.images[n + j]);
                }
            }
        }
        acc
    }

    /// Applies this `q`-qubit Clifford, acting on `support` of a larger
    /// register, to `p` in place.
    pub(crate) fn conjugate_on_support(&self, p: &mut PauliOperator, support: &[usize]) {
        debug_assert_eq!(support.len(), self.n);
        let mut any = false;
        for &s in support {
            any |= p.x().get(s) || p.z().get(s);
        }
        if !any {
            return;
        }
        if self.n <= 64 {
            let (mut lx, mut lz) = (0u64, 0u64);
            for (j, &s) in support.iter().enumerate() {
                lx |= u64::from(p.x().get(s)) << j;
                lz |= u64::from(p.z().get(s)) << j;
            }
            let (ox, oz, phase) = self.conjugate_word(lx, lz);
            for (j, &s) in support.iter().enumerate() {
                p.x.set(s, ox >> j & 1 == 1);
                p.z.set(s, oz >> j & 1 == 1);
            }
            p.add_phase(phase);
        } else {
            let local = p.restrict(support);
            let img = self.conjugate_unchecked(&local);
            for (j, &s) in support.iter().enumerate() {
                p.x.set(s, img.x().get(j));
                p.z.set(s, img.z().get(j));
            }
            p.add_phase(img.phase() as i32);
        }
    }

    // Single-word conjugation for registers of at most 64 qubits.
    fn conjugate_word(&self, lx: u64, lz: u64) -> (u64, u64, i32) {
        let n = self.n;
        let (mut ax, mut az, mut phase) = (0u64, 0u64, 0i32);
        let mut apply = |img: &PauliOperator, phase: &mut i32| {
            let (x, z, d) = mul_word(ax, az, img.x().words()[0], img.z().words()[0]);
            ax = x;
            az = z;
            *phase += d + img.phase() as i32;
        };
        let mut bits = lx | lz;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (xb, zb) = (lx >> j & 1 == 1, lz >> j & 1 == 1);
            if xb && zb {
                phase += 1;
            }
            if xb {
                apply(&self.images[j], &mut phase);
            }
            if zb {
                apply(&self.images[n + j], &mut phase);
            }
        }
        (ax, az, phase)
    }

    /// `self ∘ other`: conjugation by the result equals conjugating by
    /// `other` first and then by `self`.
    pub fn compose(&self, other: &CliffordUnitary) -> Result<CliffordUnitary> {
        if self.n != other.n {
            return Err(Error::QubitMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let images = other
            .images
            .iter()
            .map(|p| self.conjugate_unchecked(p))
            .collect();
        Ok(Self { n: self.n, images })
    }

    /// Places this Clifford on `support` of an `n`-qubit register, identity
    /// elsewhere. `support[a]` is the global index of local qubit `a`.
    pub fn embed(&self, support: &[usize], n: usize) -> Result<CliffordUnitary> {
        if support.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: support.len(),
            });
        }
        let mut seen = vec![false; n];
        for &s in support {
            if s >= n || seen[s] {
                return Err(Error::InvalidArgument(format!(
                    "support index {s} is duplicated or out of range for {n} qubits"
                )));
            }
            seen[s] = true;
        }
        let lift = |local: &PauliOperator| {
            let mut g = PauliOperator::identity(n).with_phase(local.phase());
            for (a, &s) in support.iter().enumerate() {
                g.set(s, local.get(a));
            }
            g
        };
        let mut out = Self::identity(n);
        for (a, &s) in support.iter().enumerate() {
            out.images[s] = lift(&self.images[a]);
            out.images[n + s] = lift(&self.images[self.n + a]);
        }
        Ok(out)
    }
}

/// Uniformly random `n`-qubit Clifford (modulo global phase).
///
/// Qubit by qubit, a uniformly random image pair `(a, b)` with `⟨a, b⟩ = 1`
/// is drawn from the symplectic complement of the images chosen so far; the
/// complement is then re-based by symplectic Gram–Schmidt. Signs are
/// uniform and independent.
pub fn random_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliffordUnitary {
    assert!(n >= 1, "random_clifford needs at least one qubit");
    let dim = 2 * n;
    let unit = |i: usize| BitVector::from_indices(dim, [i]);
    let mut basis: Vec<BitVector> = (0..n).flat_map(|j| [unit(j), unit(n + j)]).collect();
    let mut x_imgs = Vec::with_capacity(n);
    let mut z_imgs = Vec::with_capacity(n);

    let combine = |basis: &[BitVector], rng: &mut R| {
        let mut v = BitVector::zeros(dim);
        for b in basis {
            if rng.random::<bool>() {
                v.xor_assign(b);
            }
        }
        v
    };

    for _ in 0..n {
        let a = loop {
            let v = combine(&basis, rng);
            if !v.is_zero() {
                break v;
            }
        };
        let b = loop {
            let v = combine(&basis, rng);
            if symplectic_product(&a, &v) {
                break v;
            }
        };
        let projected: Vec<BitVector> = basis
            .iter()
            .map(|v| {
                let mut w = v.clone();
                if symplectic_product(v, &b) {
                    w.xor_assign(&a);
                }
                if symplectic_product(v, &a) {
                    w.xor_assign(&b);
                }
                w
            })
            .collect();
        basis = symplectic_basis(projected);
        x_imgs.push(a);
        z_imgs.push(b);
    }

    let sign = |rng: &mut R| if rng.random::<bool>() { 2 } else { 0 };
    let xs = x_imgs
        .iter()
        .map(|v| PauliOperator::from_symplectic(v, sign(rng)))
        .collect::<Vec<_>>();
    let zs = z_imgs
        .iter()
        .map(|v| PauliOperator::from_symplectic(v, sign(rng)))
        .collect::<Vec<_>>();
    CliffordUnitary { n, images: xs.into_iter().chain(zs).collect() }
}

/// Symplectic Gram–Schmidt on a spanning set of a nondegenerate subspace:
/// returns `u_1, w_1, u_2, w_2, …` with `⟨u_i, w_j⟩ = δ_ij` and all other
/// products zero.
fn symplectic_basis(mut pool: Vec<BitVector>) -> Vec<BitVector> {
    pool.retain(|v| !v.is_zero());
    let mut out = Vec::new();
    while let Some(u) = pool.first().cloned() {
        let Some(wi) = pool.iter().position(|v| symplectic_product(&u, v)) else {
            // u is in the radical; cannot happen for a nondegenerate span
            pool.remove(0);
            continue;
        };
        let w = pool.remove(wi);
        pool.remove(0);
        for v in pool.iter_mut() {
            let pu = symplectic_product(v, &u);
            let pw = symplectic_product(v, &w);
            if pw {
                v.xor_assign(&u);
            }
            if pu {
                v.xor_assign(&w);
            }
        }
        pool.retain(|v| !v.is_zero());
        out.push(u);
        out.push(w);
    }
    out
}
