use rand::seq::SliceRandom;
use rand::Rng;

use crate::bitlinalg::BitMatrix;
use crate::error::{Error, Result};

pub const MAX_LDPC_ATTEMPTS: usize = 10_000;

/// Classical (3,6)-regular parity-check code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalLdpcCode {
    pub n: usize,
    /// `n/2 × n`, column weight 3, row weight 6.
    pub parity: BitMatrix,
}

impl ClassicalLdpcCode {
    pub fn rank(&self) -> usize {
        self.parity.rank()
    }

    /// Dimension of `ker H`.
    pub fn k(&self) -> usize {
        self.n - self.rank()
    }

    /// Dimension of `ker Hᵀ`.
    pub fn k_transpose(&self) -> usize {
        self.parity.rows() - self.rank()
    }
}

/// Samples a (3,6)-regular parity matrix from the configuration model,
/// drawing a fresh socket matching whenever one produces a repeated edge.
pub fn build_ldpc<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ClassicalLdpcCode> {
    if n < 6 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "(3,6)-regular code needs an even length of at least 6, got {n}"
        )));
    }
    let rows = n / 2;
    // bit socket s belongs to bit s / 3, check socket t to check t / 6
    let mut sockets: Vec<usize> = (0..3 * n).collect();
    for _ in 0..MAX_LDPC_ATTEMPTS {
        sockets.shuffle(rng);
        let mut h = BitMatrix::zeros(rows, n);
        let mut simple = true;
        for (t, &s) in sockets.iter().enumerate() {
            let (check, bit) = (t / 6, s / 3);
            if h.get(check, bit) {
                simple = false;
                break;
            }
            h.set(check, bit, true);
        }
        if simple {
            return Ok(ClassicalLdpcCode { n, parity: h });
        }
    }
    Err(Error::LdpcSampling(MAX_LDPC_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn regularity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in [6, 8, 12, 16, 32] {
            let c = build_ldpc(n, &mut rng).unwrap();
            assert_eq!((c.parity.rows(), c.parity.cols()), (n / 2, n));
            for j in 0..n {
                assert_eq!(c.parity.column(j).count_ones(), 3);
            }
            for i in 0..n / 2 {
                assert_eq!(c.parity.row(i).count_ones(), 6);
            }
            // the all-ones row combination has odd column sums
            let mut sum = crate::bitlinalg::BitVector::zeros(n);
            for i in 0..n / 2 {
                sum.xor_assign(&c.parity.row(i));
            }
            assert_eq!(sum.count_ones(), n);
        }
    }

    #[test]
    fn invalid_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(build_ldpc(7, &mut rng).is_err());
        assert!(build_ldpc(4, &mut rng).is_err());
    }
}
