use super::{complete_logical_x, shared_check_adjacency, ClassicalLdpcCode, CodeFamily, Geometry, StabilizerCode};
use crate::bitlinalg::{BitMatrix, BitVector};
use crate::error::Result;
use crate::pauli::PauliOperator;

pub fn build_hgp(c1: &ClassicalLdpcCode, c2: &ClassicalLdpcCode) -> Result<StabilizerCode> {
    hypergraph_product(&c1.parity, &c2.parity)
}

/// Unit vectors at the non-pivot columns of `rref(m)`.
fn non_pivot_units(m: &BitMatrix) -> Vec<BitVector> {
    let pivots = m.rref().pivots;
    (0..m.cols())
        .filter(|c| !pivots.contains(c))
        .map(|c| BitVector::from_indices(m.cols(), [c]))
        .collect()
}

fn tensor(a: &BitVector, b: &BitVector) -> BitVector {
    let mut out = BitVector::zeros(a.len() * b.len());
    for i in a.iter_ones() {
        for j in b.iter_ones() {
            out.set(i * b.len() + j, true);
        }
    }
    out
}

/// CSS hypergraph product of `H1` (`r1 × n1`) and `H2` (`r2 × n2`).
///
/// Qubits are `n1·n2` left-block qubits `a·n2 + b` followed by `r1·r2`
/// right-block qubits `n1·n2 + i·r2 + j`. X checks are the rows of
/// `[H1⊗I | I⊗H2ᵀ]`, Z checks the rows of `[I⊗H2 | H1ᵀ⊗I]`.
///
/// The `logical_z` list holds X-type operators `(u ⊗ v | 0)` with `u` a
/// unit vector off the pivots of `rref(H1)` and `v ∈ ker H2`, then
/// `(0 | u' ⊗ v')` with `u' ∈ ker H1ᵀ` and `v'` a unit vector off the
/// pivots of `rref(H2ᵀ)`. `logical_x` is completed from Z-type operators.
pub fn hypergraph_product(h1: &BitMatrix, h2: &BitMatrix) -> Result<StabilizerCode> {
    let (r1, n1) = (h1.rows(), h1.cols());
    let (r2, n2) = (h2.rows(), h2.cols());
    let left = n1 * n2;
    let n = left + r1 * r2;

    let hx = h1
        .kron(&BitMatrix::identity(n2))
        .hstack(&BitMatrix::identity(r1).kron(&h2.transpose()))?;
    let hz = BitMatrix::identity(n1)
        .kron(h2)
        .hstack(&h1.transpose().kron(&BitMatrix::identity(r2)))?;
    debug_assert!(hx.mul(&hz.transpose())?.is_zero());

    let zeros = BitVector::zeros(n);
    let mut checks = Vec::with_capacity(hx.rows() + hz.rows());
    for row in hx.row_vectors() {
        checks.push(PauliOperator::from_xz(row, zeros.clone(), 0));
    }
    for row in hz.row_vectors() {
        checks.push(PauliOperator::from_xz(zeros.clone(), row, 0));
    }

    let mut seeds: Vec<BitVector> = Vec::new();
    let ker_h2 = h2.null_space().row_vectors();
    for u in non_pivot_units(h1) {
        for v in &ker_h2 {
            seeds.push(tensor(&u, v).concat(&BitVector::zeros(r1 * r2)));
        }
    }
    let ker_h1t = h1.transpose().null_space().row_vectors();
    let units_h2t = non_pivot_units(&h2.transpose());
    for u in &ker_h1t {
        for v in &units_h2t {
            seeds.push(BitVector::zeros(left).concat(&tensor(u, v)));
        }
    }
    let logical_z: Vec<PauliOperator> = seeds
        .into_iter()
        .map(|x| PauliOperator::from_xz(x, zeros.clone(), 0))
        .collect();

    // Z-type operators commuting with every X check: (0 | ker H_X)
    let ker_hx = hx.null_space();
    let lift: Vec<BitVector> = ker_hx
        .row_vectors()
        .iter()
        .map(|z| BitVector::zeros(n).concat(z))
        .collect();
    let candidates = BitMatrix::from_rows_with_cols(&lift, 2 * n);
    let logical_x = complete_logical_x(n, &logical_z, &candidates)?;

    let adjacency = shared_check_adjacency(n, &checks);
    StabilizerCode::new(
        CodeFamily::Hgp,
        n,
        checks,
        logical_z,
        logical_x,
        Geometry::Graph { adjacency },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::build_ldpc;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn repetition_code_product_is_a_surface_code() {
        // 2×3 repetition parity checks give the [[13, 1]] planar code
        let h = BitMatrix::from_bool_rows(&[vec![true, true, false], vec![false, true, true]]);
        let code = hypergraph_product(&h, &h).unwrap();
        assert_eq!((code.n, code.k), (13, 1));
        let s = code.checks.iter().map(|c| c.weight()).max().unwrap();
        assert_eq!(s, 4);
    }

    #[test]
    fn parameter_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [8, 12, 16] {
            for _ in 0..50 {
                let c1 = build_ldpc(n, &mut rng).unwrap();
                let c2 = build_ldpc(n, &mut rng).unwrap();
                let code = build_hgp(&c1, &c2).unwrap();
                assert_eq!(code.n, n * n + (n / 2) * (n / 2));
                assert_eq!(code.k, c1.k() * c2.k() + c1.k_transpose() * c2.k_transpose());
                assert_eq!(code.k, code.n - code.check_rank());
            }
        }
    }

    #[test]
    fn full_rank_inputs_give_five_quarters() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut seen = 0;
        while seen < 5 {
            let c1 = build_ldpc(8, &mut rng).unwrap();
            let c2 = build_ldpc(8, &mut rng).unwrap();
            if c1.rank() == 4 && c2.rank() == 4 {
                let code = build_hgp(&c1, &c2).unwrap();
                assert_eq!((code.n, code.k), (80, 16));
                seen += 1;
            }
        }
    }
}
