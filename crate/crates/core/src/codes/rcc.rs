use rand::Rng;

use super::{CodeFamily, Geometry, StabilizerCode};
use crate::error::{Error, Result};
use crate::pauli::{random_clifford, CliffordUnitary, PauliOperator};

/// Brickwork encoding circuit of uniformly random two-qubit Cliffords.
///
/// Layer `t` acts on the bonds `(i, i+1)` with `i ≡ t (mod 2)` and
/// `i + 1 < n`; there are no periodic bonds.
#[derive(Clone, Debug)]
pub struct RccEncoder {
    pub n: usize,
    pub depth: usize,
    /// `(i, gate on qubits (i, i+1))` in application order.
    pub gates: Vec<(usize, CliffordUnitary)>,
}

impl RccEncoder {
    pub fn sample<R: Rng + ?Sized>(n: usize, depth: usize, rng: &mut R) -> Result<Self> {
        if n < 2 || depth < 1 {
            return Err(Error::InvalidArgument(format!(
                "brickwork needs n ≥ 2 and depth ≥ 1, got n = {n}, depth = {depth}"
            )));
        }
        let mut gates = Vec::new();
        for t in 0..depth {
            let mut i = t % 2;
            while i + 1 < n {
                gates.push((i, random_clifford(2, rng)));
                i += 2;
            }
        }
        Ok(Self { n, depth, gates })
    }

    /// `U P U†` with `U` the whole circuit.
    pub fn conjugate(&self, p: &PauliOperator) -> PauliOperator {
        let mut q = p.clone();
        for (i, g) in &self.gates {
            g.conjugate_on_support(&mut q, &[*i, i + 1]);
        }
        q
    }

    /// Checks `U Z_j U†` for `j ≥ k`, logicals `U Z_i U†`, `U X_i U†` for
    /// `i < k`.
    pub fn code(&self, k: usize) -> Result<StabilizerCode> {
        let n = self.n;
        if k > n {
            return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
        }
        let checks = (k..n).map(|j| self.conjugate(&PauliOperator::z_on(n, &[j]))).collect();
        let lz = (0..k).map(|i| self.conjugate(&PauliOperator::z_on(n, &[i]))).collect();
        let lx = (0..k).map(|i| self.conjugate(&PauliOperator::x_on(n, &[i]))).collect();
        StabilizerCode::new(CodeFamily::Rcc, n, checks, lz, lx, Geometry::Chain)
    }
}

/// Random Clifford code: `k` logical qubits encoded by a depth-`depth`
/// brickwork on `n` qubits.
pub fn build_rcc<R: Rng + ?Sized>(n: usize, k: usize, depth: usize, rng: &mut R) -> Result<StabilizerCode> {
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    RccEncoder::sample(n, depth, rng)?.code(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn depth_one_checks_are_local() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let code = build_rcc(10, 2, 1, &mut rng).unwrap();
        assert!(code.checks.iter().all(|c| c.weight() <= 2));
    }

    #[test]
    fn invariants_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [2, 5, 8, 16, 33] {
            let code = build_rcc(n, n / 4, n, &mut rng).unwrap();
            assert_eq!(code.k, n / 4);
            code.validate().unwrap();
        }
        assert!(build_rcc(4, 5, 4, &mut rng).is_err());
        assert!(build_rcc(4, 1, 0, &mut rng).is_err());
    }

    #[test]
    fn encoder_layers() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let enc = RccEncoder::sample(5, 3, &mut rng).unwrap();
        let starts: Vec<usize> = enc.gates.iter().map(|(i, _)| *i).collect();
        assert_eq!(starts, vec![0, 2, 1, 3, 0, 2]);
    }
}
