//! Stabilizer code families: toric, hypergraph-product and random Clifford
//! codes, each carrying checks, a symplectic logical basis and geometry.

mod hgp;
mod ldpc;
mod rcc;
mod toric;

pub use hgp::{build_hgp, hypergraph_product};
pub use ldpc::{build_ldpc, ClassicalLdpcCode, MAX_LDPC_ATTEMPTS};
pub use rcc::{build_rcc, RccEncoder};
pub use toric::{build_toric, ToricLattice};

use serde::{Deserialize, Serialize};

use crate::bitlinalg::{BitMatrix, BitVector, EchelonBasis};
use crate::error::{Error, Result};
use crate::pauli::{anticommutation_matrix, first_anticommuting_pair, PauliOperator};
use crate::stabsim::{StabilizerGroup, StabilizerState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeFamily {
    Toric,
    Hgp,
    Rcc,
    Custom,
}

impl CodeFamily {
    pub fn name(self) -> &'static str {
        match self {
            CodeFamily::Toric => "toric",
            CodeFamily::Hgp => "hgp",
            CodeFamily::Rcc => "rcc",
            CodeFamily::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// Periodic `L × L` lattice, qubits on edges (see [`ToricLattice`]).
    Toric { l: usize },
    /// Qubit adjacency graph; neighbours sorted.
    Graph { adjacency: Vec<Vec<usize>> },
    /// Open 1-D chain in index order.
    Chain,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerCode {
    pub family: CodeFamily,
    pub n: usize,
    pub k: usize,
    pub checks: Vec<PauliOperator>,
    pub logical_z: Vec<PauliOperator>,
    pub logical_x: Vec<PauliOperator>,
    pub geometry: Geometry,
}

#[derive(Serialize, Deserialize)]
struct CodeDocument {
    family: CodeFamily,
    n: usize,
    k: usize,
    checks: Vec<PauliOperator>,
    logical_z: Vec<PauliOperator>,
    logical_x: Vec<PauliOperator>,
    geometry: Geometry,
    adjacency: Vec<Vec<usize>>,
}

fn symplectic_rows(ops: &[PauliOperator], n: usize) -> BitMatrix {
    let rows: Vec<BitVector> = ops.iter().map(PauliOperator::to_symplectic).collect();
    BitMatrix::from_rows_with_cols(&rows, 2 * n)
}

/// Rows `(z|x)` so that `swap(A) · vᵀ` gives symplectic products with `v`.
fn swapped_rows(ops: &[PauliOperator], n: usize) -> BitMatrix {
    let rows: Vec<BitVector> = ops.iter().map(|p| p.z().concat(p.x())).collect();
    BitMatrix::from_rows_with_cols(&rows, 2 * n)
}

impl StabilizerCode {
    /// Assembles and validates a code.
    pub fn new(
        family: CodeFamily,
        n: usize,
        checks: Vec<PauliOperator>,
        logical_z: Vec<PauliOperator>,
        logical_x: Vec<PauliOperator>,
        geometry: Geometry,
    ) -> Result<Self> {
        let code = Self {
            family,
            n,
            k: logical_z.len(),
            checks,
            logical_z,
            logical_x,
            geometry,
        };
        code.validate()?;
        Ok(code)
    }

    /// One unencoded qubit per logical: no checks, `Z̄_i = Z_i`, `X̄_i = X_i`.
    pub fn trivial(k: usize) -> Self {
        Self {
            family: CodeFamily::Custom,
            n: k,
            k,
            checks: Vec::new(),
            logical_z: (0..k).map(|i| PauliOperator::z_on(k, &[i])).collect(),
            logical_x: (0..k).map(|i| PauliOperator::x_on(k, &[i])).collect(),
            geometry: Geometry::Chain,
        }
    }

    /// Checks the commutation, pairing and counting invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let all = self.checks.iter().chain(&self.logical_z).chain(&self.logical_x);
        for (i, p) in all.enumerate() {
            if p.n() != n {
                return Err(Error::QubitMismatch { left: n, right: p.n() });
            }
            if !p.is_hermitian() {
                return Err(Error::NonHermitian(i));
            }
        }
        if self.logical_z.len() != self.k || self.logical_x.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: self.logical_x.len(),
            });
        }
        if let Some((i, j)) = first_anticommuting_pair(n, &self.checks) {
            return Err(Error::NonCommuting(i, j));
        }
        let m = self.checks.len();
        let logicals: Vec<PauliOperator> =
            self.logical_z.iter().chain(&self.logical_x).cloned().collect();
        let t = anticommutation_matrix(n, &logicals, &self.checks);
        for a in 0..logicals.len() {
            if let Some(c) = t.row(a).iter_ones().next() {
                return Err(Error::NonCommuting(m + a, c));
            }
        }
        for i in 0..self.k {
            for j in 0..self.k {
                let zx = self.logical_z[i].anticommutes_with(&self.logical_x[j]);
                let zz = self.logical_z[i].anticommutes_with(&self.logical_z[j]);
                let xx = self.logical_x[i].anticommutes_with(&self.logical_x[j]);
                if zx != (i == j) || zz || xx {
                    return Err(Error::InvalidArgument(format!(
                        "logical operators {i} and {j} are not a symplectic pair basis"
                    )));
                }
            }
        }
        let r = self.check_rank();
        if r + self.k != n {
            return Err(Error::InvalidArgument(format!(
                "check rank {r} plus {} logicals does not equal {n} qubits",
                self.k
            )));
        }
        Ok(())
    }

    pub fn check_matrix(&self) -> BitMatrix {
        symplectic_rows(&self.checks, self.n)
    }

    pub fn check_rank(&self) -> usize {
        self.check_matrix().rank()
    }

    /// An independent subset of the checks, in order.
    pub fn independent_checks(&self) -> Vec<PauliOperator> {
        let mut basis = EchelonBasis::new(2 * self.n);
        self.checks
            .iter()
            .filter(|c| basis.insert(c.to_symplectic()))
            .cloned()
            .collect()
    }

    /// The logical stabilizer group `⟨Z̄_1, …, Z̄_k⟩`.
    pub fn logical_group(&self) -> StabilizerGroup {
        StabilizerGroup::new(self.n, self.logical_z.clone()).expect("logicals commute")
    }

    /// The code state stabilized by the checks and every `Z̄_i`.
    pub fn code_state(&self) -> StabilizerState {
        let mut gens = self.independent_checks();
        gens.extend(self.logical_z.iter().cloned());
        StabilizerState::from_generators(self.n, gens).expect("valid code")
    }

    /// Qubits adjacent when they share a check (chain neighbours for RCC).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        match &self.geometry {
            Geometry::Graph { adjacency } => adjacency.clone(),
            Geometry::Chain => (0..self.n)
                .map(|i| {
                    let mut v = Vec::new();
                    if i > 0 {
                        v.push(i - 1);
                    }
                    if i + 1 < self.n {
                        v.push(i + 1);
                    }
                    v
                })
                .collect(),
            Geometry::Toric { .. } | Geometry::None => shared_check_adjacency(self.n, &self.checks),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = CodeDocument {
            family: self.family,
            n: self.n,
            k: self.k,
            checks: self.checks.clone(),
            logical_z: self.logical_z.clone(),
            logical_x: self.logical_x.clone(),
            geometry: self.geometry.clone(),
            adjacency: self.adjacency(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CodeDocument = serde_json::from_str(text)?;
        let code = Self::new(doc.family, doc.n, doc.checks, doc.logical_z, doc.logical_x, doc.geometry)?;
        if code.k != doc.k {
            return Err(Error::DimensionMismatch {
                expected: doc.k,
                found: code.k,
            });
        }
        Ok(code)
    }
}

/// Qubits adjacent when some check acts on both.
pub fn shared_check_adjacency(n: usize, checks: &[PauliOperator]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for c in checks {
        let s = c.support();
        for &a in &s {
            for &b in &s {
                if a != b {
                    adj[a].push(b);
                }
            }
        }
    }
    for v in &mut adj {
        v.sort_unstable();
        v.dedup();
    }
    adj
}

/// Completes `logical_z` to a symplectic pair basis.
///
/// Each `x_j` is drawn from the span of `candidates` (rows in `(x|z)`
/// form, all commuting with the checks) by solving `⟨z_i, x_j⟩ = δ_ij`;
/// the resulting set is then made mutually commuting with
/// `x_j ← x_j + Σ_{i<j} ⟨x_i, x_j⟩ z_i`.
pub fn complete_logical_x(
    n: usize,
    logical_z: &[PauliOperator],
    candidates: &BitMatrix,
) -> Result<Vec<PauliOperator>> {
    let k = logical_z.len();
    // pairing[i][c] = ⟨z_i, candidate_c⟩
    let zs = swapped_rows(logical_z, n);
    let pairing = zs.mul(&candidates.transpose())?;
    let mut xs: Vec<PauliOperator> = Vec::with_capacity(k);
    for j in 0..k {
        let e = BitVector::from_indices(k, [j]);
        let coeffs = pairing.solve(&e)?.ok_or(Error::Inexpressible)?;
        let mut v = BitVector::zeros(2 * n);
        for c in coeffs.iter_ones() {
            v.xor_assign(&candidates.row(c));
        }
        xs.push(PauliOperator::from_symplectic(&v, 0));
    }
    for j in 0..k {
        for i in 0..j {
            if xs[i].anticommutes_with(&xs[j]) {
                let zi = logical_z[i].to_symplectic();
                let mut v = xs[j].to_symplectic();
                v.xor_assign(&zi);
                xs[j] = PauliOperator::from_symplectic(&v, 0);
            }
        }
    }
    Ok(xs)
}

/// Rows spanning the centralizer of `ops`: all `(x|z)` vectors with zero
/// symplectic product against every operator.
pub fn centralizer(n: usize, ops: &[PauliOperator]) -> BitMatrix {
    swapped_rows(ops, n).null_space()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_code_is_valid() {
        let c = StabilizerCode::trivial(3);
        c.validate().unwrap();
        assert!(c.code_state().is_pure());
    }

    #[test]
    fn completion_on_generic_centralizer() {
        // five-qubit code with its standard Z̄ = ZZZZZ
        let checks: Vec<PauliOperator> = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let lz: Vec<PauliOperator> = vec!["ZZZZZ".parse().unwrap()];
        let cand = centralizer(5, &checks);
        let lx = complete_logical_x(5, &lz, &cand).unwrap();
        StabilizerCode::new(CodeFamily::Custom, 5, checks, lz, lx, Geometry::None).unwrap();
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for code in [
            build_toric(3).unwrap(),
            build_rcc(8, 2, 4, &mut rng).unwrap(),
            build_hgp(&build_ldpc(8, &mut rng).unwrap(), &build_ldpc(8, &mut rng).unwrap()).unwrap(),
        ] {
            let text = code.to_json().unwrap();
            let back = StabilizerCode::from_json(&text).unwrap();
            assert_eq!(back, code);
        }
    }

    #[test]
    fn broken_codes_are_rejected() {
        let mut code = build_toric(2).unwrap();
        code.logical_x.swap(0, 1);
        assert!(code.validate().is_err());
        let mut code = build_toric(2).unwrap();
        code.checks[0] = "XIIIIIII".parse().unwrap();
        assert!(code.validate().is_err());
    }
}
