//! Stabilizer states without destabilizers.
//!
//! A state on `n` qubits is a group of `g ≤ n` independent, commuting,
//! signed Hermitian Paulis; `g < n` describes the mixed state proportional to
//! the projector onto the common `+1` eigenspace. Measurement of a commuting
//! observable set is handled collectively: the full constraint system
//! linking the outcomes is extracted first and the syndrome is then sampled
//! from it, so the distribution, the post-measurement group and the
//! syndrome-averaged group all come from the same linear-algebra pass.

use rand::Rng;

use crate::bitlinalg::{BitMatrix, BitVector, EchelonBasis};
use crate::error::{Error, Result};
use crate::pauli::{anticommutation_matrix, first_anticommuting_pair, CliffordUnitary, PauliOperator};

/// Position of the leading bit of `p` in `(x|z)` order.
fn leading_bit(p: &PauliOperator) -> Option<usize> {
    let n = p.n();
    p.x()
        .iter_ones()
        .next()
        .or_else(|| p.z().iter_ones().next().map(|i| n + i))
}

#[inline]
fn symplectic_bit(p: &PauliOperator, col: usize) -> bool {
    let n = p.n();
    if col < n {
        p.x().get(col)
    } else {
        p.z().get(col - n)
    }
}

/// Incremental echelon basis of signed, mutually commuting Hermitian Paulis.
/// Every stored row is zero at the pivots of the rows before it.
#[derive(Clone, Debug)]
pub(crate) struct SignedBasis {
    n: usize,
    rows: Vec<PauliOperator>,
    pivots: Vec<usize>,
}

impl SignedBasis {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub(crate) fn reduce(&self, p: &mut PauliOperator) {
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            if symplectic_bit(p, piv) {
                p.mul_assign_right(row);
            }
        }
    }

    /// Adds `p`. Returns `Ok(false)` if `p` already lies in the group and
    /// `InconsistentSigns` if `-p` does.
    pub(crate) fn insert(&mut self, mut p: PauliOperator) -> Result<bool> {
        debug_assert_eq!(p.n(), self.n);
        self.reduce(&mut p);
        match leading_bit(&p) {
            Some(piv) => {
                self.rows.push(p);
                self.pivots.push(piv);
                Ok(true)
            }
            None if p.phase() == 0 => Ok(false),
            None => Err(Error::InconsistentSigns),
        }
    }
}

/// Reduced row-echelon form of signed commuting Paulis, columns in `(x|z)`
/// order. Zero rows are dropped; a row reducing to `-I` is an error.
pub(crate) fn signed_rref(mut rows: Vec<PauliOperator>, n: usize) -> Result<Vec<PauliOperator>> {
    let mut rank = 0;
    for col in 0..2 * n {
        let Some(p) = (rank..rows.len()).find(|&r| symplectic_bit(&rows[r], col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && symplectic_bit(row, col) {
                row.mul_assign_right(&pivot);
            }
        }
        rank += 1;
    }
    for row in &rows[rank..] {
        if row.phase() != 0 {
            return Err(Error::InconsistentSigns);
        }
    }
    rows.truncate(rank);
    Ok(rows)
}

/// Abelian group generated by independent, commuting, signed Hermitian Paulis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerGroup {
    n: usize,
    generators: Vec<PauliOperator>,
}

impl StabilizerGroup {
    /// Validates Hermiticity, commutation and independence.
    pub fn new(n: usize, generators: Vec<PauliOperator>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.n() != n {
                return Err(Error::QubitMismatch {
                    left: n,
                    right: g.n(),
                });
            }
            if !g.is_hermitian() {
                return Err(Error::NonHermitian(i));
            }
        }
        if let Some((i, j)) = first_anticommuting_pair(n, &generators) {
            return Err(Error::NonCommuting(i, j));
        }
        // independent as vectors, hence no product can equal -I
        let mut basis = EchelonBasis::new(2 * n);
        for (i, g) in generators.iter().enumerate() {
            if !basis.insert(g.to_symplectic()) {
                return Err(Error::Dependent(i));
            }
        }
        Ok(Self { n, generators })
    }

    pub(crate) fn new_unchecked(n: usize, generators: Vec<PauliOperator>) -> Self {
        debug_assert!(generators.iter().all(|g| g.n() == n && g.is_hermitian()));
        Self { n, generators }
    }

    /// The group generated by `ops`, keeping an independent subset in order.
    /// Fails if the operators do not commute or imply `-I`.
    pub fn generated_by(n: usize, ops: &[PauliOperator]) -> Result<Self> {
        for i in 0..ops.len() {
            if ops[i].n() != n {
                return Err(Error::QubitMismatch {
                    left: n,
                    right: ops[i].n(),
                });
            }
            if !ops[i].is_hermitian() {
                return Err(Error::NonHermitian(i));
            }
        }
        if let Some((i, j)) = first_anticommuting_pair(n, ops) {
            return Err(Error::NonCommuting(i, j));
        }
        let mut basis = SignedBasis::new(n);
        let mut kept = Vec::new();
        for op in ops {
            if basis.insert(op.clone())? {
                kept.push(op.clone());
            }
        }
        Ok(Self::new_unchecked(n, kept))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    /// `g × 2n` matrix of `(x|z)` rows.
    pub fn symplectic_matrix(&self) -> BitMatrix {
        let rows: Vec<BitVector> = self.generators.iter().map(PauliOperator::to_symplectic).collect();
        BitMatrix::from_rows_with_cols(&rows, 2 * self.n)
    }

    /// Unique signed generating set: the rref of the `(x|z)` matrix with
    /// each row's sign fixed by the group.
    pub fn canonical_form(&self) -> Vec<PauliOperator> {
        signed_rref(self.generators.clone(), self.n).expect("independent generators")
    }

    /// Unique unsigned generating set as an rref matrix.
    pub fn sign_free_form(&self) -> BitMatrix {
        self.symplectic_matrix().rref().matrix
    }

    /// Whether `p` (up to sign when `sign_free`) is a group element.
    pub fn contains(&self, p: &PauliOperator, sign_free: bool) -> bool {
        let mut basis = SignedBasis::new(self.n);
        for g in &self.generators {
            basis.insert(g.clone()).expect("independent generators");
        }
        let mut q = p.clone();
        basis.reduce(&mut q);
        q.is_identity() && (sign_free || q.phase() == 0)
    }
}

/// Whether two groups coincide, as signed groups or modulo signs.
pub fn groups_equal(a: &StabilizerGroup, b: &StabilizerGroup, sign_free: bool) -> bool {
    if a.n != b.n || a.len() != b.len() {
        return false;
    }
    if sign_free {
        a.sign_free_form() == b.sign_free_form()
    } else {
        a.canonical_form() == b.canonical_form()
    }
}

/// Stabilizer state; pure iff the group has `n` generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerState {
    group: StabilizerGroup,
}

/// Result of measuring a commuting observable set.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    /// Bit `i` set when observable `i` gave `-1`.
    pub syndrome: BitVector,
    /// Rows are independent index sets `Q_k` of observables whose product
    /// lies in the stabilizer group up to sign.
    pub constraint_matrix: BitMatrix,
    /// Bit `k` set when `Π_{i∈Q_k} O_i = -(group element)`, i.e. the
    /// outcomes satisfy `Π_{i∈Q_k} s_i = -1`.
    pub constraint_signs: BitVector,
    pub rank_t: usize,
    pub post_state: StabilizerState,
}

impl MeasurementOutcome {
    pub fn num_observables(&self) -> usize {
        self.constraint_matrix.cols()
    }

    pub fn r_q(&self) -> usize {
        self.constraint_matrix.rows()
    }

    /// `±1` outcome of observable `i`.
    pub fn sign(&self, i: usize) -> i8 {
        if self.syndrome.get(i) {
            -1
        } else {
            1
        }
    }

    pub fn satisfies_constraints(&self, syndrome: &BitVector) -> bool {
        (0..self.r_q()).all(|k| {
            self.constraint_matrix.row(k).dot(syndrome) == self.constraint_signs.get(k)
        })
    }

    /// Born probability of `syndrome`: uniform over the syndromes allowed by
    /// the constraints.
    pub fn probability(&self, syndrome: &BitVector) -> f64 {
        if self.satisfies_constraints(syndrome) {
            (-((self.num_observables() - self.r_q()) as f64)).exp2()
        } else {
            0.0
        }
    }
}

/// Constraint data shared by measurement and syndrome averaging.
struct ConstraintSystem {
    t: BitMatrix,
    rank_t: usize,
    q: BitMatrix,
    signs: BitVector,
}

impl StabilizerState {
    /// State stabilized by exactly the given signed generators.
    pub fn from_generators(n: usize, generators: Vec<PauliOperator>) -> Result<Self> {
        Ok(Self {
            group: StabilizerGroup::new(n, generators)?,
        })
    }

    pub fn from_group(group: StabilizerGroup) -> Self {
        Self { group }
    }

    /// Maximally mixed state on `n` qubits.
    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            group: StabilizerGroup::new_unchecked(n, Vec::new()),
        }
    }

    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        Self {
            group: StabilizerGroup::new_unchecked(n, (0..n).map(|j| PauliOperator::z_on(n, &[j])).collect()),
        }
    }

    pub fn n(&self) -> usize {
        self.group.n
    }

    pub fn group(&self) -> &StabilizerGroup {
        &self.group
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.group.generators
    }

    pub fn is_pure(&self) -> bool {
        self.group.len() == self.group.n
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> usize {
        self.group.n - self.group.len()
    }

    pub fn apply_clifford(&self, u: &CliffordUnitary) -> Result<Self> {
        if u.n() != self.n() {
            return Err(Error::QubitMismatch {
                left: self.n(),
                right: u.n(),
            });
        }
        let generators = self.group.generators.iter().map(|g| u.conjugate_unchecked(g)).collect();
        Ok(Self {
            group: StabilizerGroup::new_unchecked(self.n(), generators),
        })
    }

    /// Applies a `|support|`-qubit Clifford to the listed qubits in place.
    pub fn apply_gate(&mut self, u: &CliffordUnitary, support: &[usize]) -> Result<()> {
        if u.n() != support.len() {
            return Err(Error::DimensionMismatch {
                expected: u.n(),
                found: support.len(),
            });
        }
        let n = self.n();
        let mut seen = vec![false; n];
        for &s in support {
            if s >= n || seen[s] {
                return Err(Error::InvalidArgument(format!(
                    "support index {s} is duplicated or out of range for {n} qubits"
                )));
            }
            seen[s] = true;
        }
        for g in &mut self.group.generators {
            u.conjugate_on_support(g, support);
        }
        Ok(())
    }

    fn check_observables(&self, observables: &[PauliOperator]) -> Result<()> {
        for (i, o) in observables.iter().enumerate() {
            if o.n() != self.n() {
                return Err(Error::QubitMismatch {
                    left: self.n(),
                    right: o.n(),
                });
            }
            if !o.is_hermitian() {
                return Err(Error::NonHermitian(i));
            }
        }
        if let Some((i, j)) = first_anticommuting_pair(self.n(), observables) {
            return Err(Error::NonCommuting(i, j));
        }
        Ok(())
    }

    fn commutator_matrix(&self, observables: &[PauliOperator]) -> BitMatrix {
        anticommutation_matrix(self.n(), observables, &self.group.generators)
    }

    /// Signed product of the generators selected by `r`.
    fn generator_product(&self, r: &BitVector) -> PauliOperator {
        PauliOperator::product(self.n(), r.iter_ones().map(|j| &self.group.generators[j]))
    }

    fn constraints(&self, observables: &[PauliOperator]) -> ConstraintSystem {
        let n = self.n();
        let m = observables.len();
        let g = self.group.len();
        let t = self.commutator_matrix(observables);
        let rank_t = t.rank();

        // (Q | R) with Σ Q_i O_i + Σ R_j g_j = 0 in the symplectic space.
        let stacked: Vec<BitVector> = observables
            .iter()
            .chain(&self.group.generators)
            .map(PauliOperator::to_symplectic)
            .collect();
        let kernel = BitMatrix::from_rows_with_cols(&stacked, 2 * n).left_null_space();
        let q_cols: Vec<usize> = (0..m).collect();
        let r_cols: Vec<usize> = (m..m + g).collect();
        let q = kernel.select_columns(&q_cols);
        let r = kernel.select_columns(&r_cols);

        let mut signs = BitVector::zeros(q.rows());
        for k in 0..q.rows() {
            let po = PauliOperator::product(n, q.row(k).iter_ones().map(|i| &observables[i]));
            let pg = self.generator_product(&r.row(k));
            debug_assert_eq!(po.to_symplectic(), pg.to_symplectic());
            debug_assert!(po.is_hermitian() && pg.is_hermitian());
            signs.set(k, po.phase() != pg.phase());
        }
        ConstraintSystem { t, rank_t, q, signs }
    }

    /// Inherited generators: signed products of generators commuting with
    /// every observable.
    fn inherited(&self, t: &BitMatrix) -> Vec<PauliOperator> {
        t.null_space()
            .row_vectors()
            .iter()
            .map(|r| self.generator_product(r))
            .collect()
    }

    /// Measures the commuting observables, sampling a syndrome from `rng`.
    ///
    /// Observables whose outcome is not fixed by the constraints are
    /// sampled by fair coins in observable order; the rest follow.
    pub fn measure_commuting_set<R: Rng + ?Sized>(
        &self,
        observables: &[PauliOperator],
        rng: &mut R,
    ) -> Result<MeasurementOutcome> {
        self.check_observables(observables)?;
        let n = self.n();
        let m = observables.len();
        let cs = self.constraints(observables);

        // rref of [Q | c]; Q has independent rows so no pivot lands on c.
        let mut aug = BitMatrix::zeros(cs.q.rows(), m + 1);
        for k in 0..cs.q.rows() {
            for i in cs.q.row(k).iter_ones() {
                aug.set(k, i, true);
            }
            aug.set(k, m, cs.signs.get(k));
        }
        let rref = aug.rref();
        debug_assert!(rref.pivots.iter().all(|&p| p < m));
        let mut is_pivot = vec![false; m];
        for &p in &rref.pivots {
            is_pivot[p] = true;
        }
        let mut syndrome = BitVector::zeros(m);
        for i in 0..m {
            if !is_pivot[i] && rng.random::<bool>() {
                syndrome.set(i, true);
            }
        }
        for (row, &p) in rref.pivots.iter().enumerate() {
            let mut bit = rref.matrix.get(row, m);
            for i in rref.matrix.row(row).iter_ones() {
                if i != p && i < m {
                    bit ^= syndrome.get(i);
                }
            }
            syndrome.set(p, bit);
        }

        let mut basis = SignedBasis::new(n);
        let mut post = Vec::new();
        let signed = observables.iter().enumerate().map(|(i, o)| {
            if syndrome.get(i) {
                o.clone().negated()
            } else {
                o.clone()
            }
        });
        for cand in signed.chain(self.inherited(&cs.t)) {
            if basis.insert(cand.clone())? {
                post.push(cand);
            }
        }

        Ok(MeasurementOutcome {
            syndrome,
            constraint_matrix: cs.q,
            constraint_signs: cs.signs,
            rank_t: cs.rank_t,
            post_state: Self {
                group: StabilizerGroup::new_unchecked(n, post),
            },
        })
    }

    /// Constraint matrix and signs alone, without sampling.
    pub fn constraint_system(&self, observables: &[PauliOperator]) -> Result<(BitMatrix, BitVector, usize)> {
        self.check_observables(observables)?;
        let cs = self.constraints(observables);
        Ok((cs.q, cs.signs, cs.rank_t))
    }

    /// The state averaged over all measurement branches: the subgroup
    /// commuting with every observable.
    pub fn average_over_syndromes(&self, observables: &[PauliOperator]) -> Result<Self> {
        self.check_observables(observables)?;
        let t = self.commutator_matrix(observables);
        Ok(Self {
            group: StabilizerGroup::new_unchecked(self.n(), self.inherited(&t)),
        })
    }

    fn check_region(&self, region: &[usize]) -> Result<Vec<bool>> {
        let n = self.n();
        let mut mask = vec![false; n];
        for &q in region {
            if q >= n {
                return Err(Error::BadRegions);
            }
            mask[q] = true;
        }
        Ok(mask)
    }

    /// Entropy of the reduced state on `region`, in bits. Repeated indices
    /// count once.
    pub fn region_entropy(&self, region: &[usize]) -> Result<usize> {
        let n = self.n();
        let mask = self.check_region(region)?;
        let size = mask.iter().filter(|&&b| b).count();
        let complement: Vec<usize> = (0..n).filter(|&q| !mask[q]).collect();
        let cols: Vec<usize> = complement
            .iter()
            .copied()
            .chain(complement.iter().map(|&q| n + q))
            .collect();
        let restricted = self.group.symplectic_matrix().select_columns(&cols);
        let inside = self.group.len() - restricted.rank();
        Ok(size - inside)
    }

    /// Quantum conditional mutual information `I(A:B|C)` in bits.
    pub fn qcmi(&self, a: &[usize], b: &[usize], c: &[usize]) -> Result<usize> {
        let ma = self.check_region(a)?;
        let mb = self.check_region(b)?;
        let mc = self.check_region(c)?;
        if (0..self.n()).any(|q| (ma[q] as u8 + mb[q] as u8 + mc[q] as u8) > 1) {
            return Err(Error::BadRegions);
        }
        let join = |xs: &[&[usize]]| xs.iter().flat_map(|x| x.iter().copied()).collect::<Vec<_>>();
        let s_ac = self.region_entropy(&join(&[a, c]))?;
        let s_bc = self.region_entropy(&join(&[b, c]))?;
        let s_c = self.region_entropy(c)?;
        let s_abc = self.region_entropy(&join(&[a, b, c]))?;
        Ok(s_ac + s_bc - s_c - s_abc)
    }

    /// Canonical signed generators as strings, for golden comparisons.
    pub fn dump(&self) -> Vec<String> {
        self.group.canonical_form().iter().map(ToString::to_string).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::random_clifford;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn state(gens: &[&str]) -> StabilizerState {
        let ops: Vec<_> = gens.iter().map(|s| p(s)).collect();
        StabilizerState::from_generators(ops[0].n(), ops).unwrap()
    }

    fn random_pure(n: usize, rng: &mut ChaCha8Rng) -> StabilizerState {
        StabilizerState::zero(n).apply_clifford(&random_clifford(n, rng)).unwrap()
    }

    #[test]
    fn construction_rejects_bad_generators() {
        assert!(matches!(
            StabilizerState::from_generators(1, vec![p("X"), p("Z")]),
            Err(Error::NonCommuting(0, 1))
        ));
        assert!(matches!(
            StabilizerState::from_generators(2, vec![p("ZZ"), p("ZI"), p("IZ")]),
            Err(Error::Dependent(2))
        ));
        assert!(matches!(
            StabilizerState::from_generators(1, vec![p("iZ")]),
            Err(Error::NonHermitian(0))
        ));
    }

    #[test]
    fn entropy_of_simple_states() {
        assert_eq!(state(&["Z"]).entropy(), 0);
        let s = state(&["ZZ"]);
        assert_eq!(s.entropy(), 1);
        assert!(!s.is_pure());
        let bell = state(&["XX", "ZZ"]);
        assert_eq!(bell.region_entropy(&[0]).unwrap(), 1);
        assert_eq!(bell.region_entropy(&[0, 1]).unwrap(), 0);
        let prod = state(&["ZII", "IXI", "IIY"]);
        for r in [vec![0], vec![1, 2], vec![0, 2]] {
            assert_eq!(prod.region_entropy(&r).unwrap(), 0);
        }
        assert!(prod.region_entropy(&[3]).is_err());
    }

    #[test]
    fn hadamard_maps_zero_to_plus() {
        let s = StabilizerState::zero(1)
            .apply_clifford(&CliffordUnitary::hadamard(1, 0))
            .unwrap();
        assert_eq!(s.dump(), vec!["+X"]);
    }

    #[test]
    fn deterministic_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = state(&["Z"]).measure_commuting_set(&[p("Z")], &mut rng).unwrap();
        assert_eq!(out.sign(0), 1);
        assert_eq!((out.r_q(), out.rank_t), (1, 0));
        let out = state(&["-Z"]).measure_commuting_set(&[p("Z")], &mut rng).unwrap();
        assert_eq!(out.sign(0), -1);
    }

    #[test]
    fn ghz_measurement() {
        let ghz = state(&["XXX", "ZZI", "IZZ"]);
        let obs = [p("ZII"), p("IZI"), p("IIZ")];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut counts: HashMap<String, usize> = HashMap::new();
        for _ in 0..2000 {
            let out = ghz.measure_commuting_set(&obs, &mut rng).unwrap();
            assert_eq!((out.r_q(), out.rank_t), (2, 1));
            assert!(out.post_state.is_pure());
            let key: String = (0..3).map(|i| if out.sign(i) > 0 { '+' } else { '-' }).collect();
            let expected = if key == "+++" { "+ZII" } else { "-ZII" };
            assert_eq!(out.post_state.dump()[0], expected);
            *counts.entry(key).or_default() += 1;
        }
        assert_eq!(counts.len(), 2);
        let plus = counts["+++"] as f64;
        // 5σ band around 1000
        assert!((plus - 1000.0).abs() < 5.0 * 22.37, "{counts:?}");
        assert_eq!(counts["+++"] + counts["---"], 2000);
    }

    #[test]
    fn averaging() {
        let zero = state(&["Z"]);
        let avg = zero.average_over_syndromes(&[p("X")]).unwrap();
        assert!(avg.generators().is_empty());
        assert_eq!(avg.entropy(), 1);
        let bell = state(&["XX", "ZZ"]);
        assert_eq!(bell.average_over_syndromes(&[p("ZZ")]).unwrap(), bell);
    }

    #[test]
    fn ghz_qcmi() {
        let ghz = state(&["XXX", "ZZI", "IZZ"]);
        assert_eq!(ghz.qcmi(&[0], &[1], &[2]).unwrap(), 1);
        assert!(matches!(ghz.qcmi(&[0], &[0], &[2]), Err(Error::BadRegions)));
        assert_eq!(state(&["ZII", "IZI", "IIZ"]).qcmi(&[0], &[1], &[2]).unwrap(), 0);
    }

    #[test]
    fn group_equality() {
        let a = StabilizerGroup::new(1, vec![p("Z")]).unwrap();
        let b = StabilizerGroup::new(1, vec![p("-Z")]).unwrap();
        assert!(groups_equal(&a, &b, true));
        assert!(!groups_equal(&a, &b, false));
        let c = StabilizerGroup::new(2, vec![p("ZZ"), p("XX")]).unwrap();
        let d = StabilizerGroup::new(2, vec![p("-YY"), p("XX")]).unwrap();
        assert!(groups_equal(&c, &d, false));
    }

    #[test]
    fn regenerated_groups_are_equal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let n = rng.random_range(1..=7);
            let s = random_pure(n, &mut rng);
            let mut gens = s.generators().to_vec();
            for _ in 0..3 * n {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                if i != j {
                    let other = gens[j].clone();
                    gens[i].mul_assign_right(&other);
                }
            }
            let g2 = StabilizerGroup::new(n, gens).unwrap();
            assert!(groups_equal(s.group(), &g2, false));
            assert_eq!(s.group().canonical_form(), g2.canonical_form());
        }
    }

    #[test]
    fn measurement_invariants_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let n = rng.random_range(1..=8);
            let s = random_pure(n, &mut rng);
            // observables: commuting set from another random pure state
            let other = random_pure(n, &mut rng);
            let m = rng.random_range(1..=n);
            let obs: Vec<_> = other.generators()[..m].to_vec();
            let out = s.measure_commuting_set(&obs, &mut rng).unwrap();
            assert_eq!(out.r_q() + out.rank_t, m);
            assert!(out.post_state.is_pure());
            assert!(out.satisfies_constraints(&out.syndrome));
            let again = out.post_state.measure_commuting_set(&obs, &mut rng).unwrap();
            assert_eq!(again.syndrome, out.syndrome);
            assert_eq!(again.rank_t, 0);
            let avg = s.average_over_syndromes(&obs).unwrap();
            assert_eq!(avg.entropy(), out.rank_t);
        }
    }

    #[test]
    fn mixed_state_measurement() {
        // ⟨ZZ⟩ on two qubits; Z0 is random, Z1 then follows.
        let s = state(&["ZZ"]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let out = s.measure_commuting_set(&[p("ZI"), p("IZ")], &mut rng).unwrap();
        assert_eq!(out.r_q(), 1);
        assert_eq!(out.rank_t, 0);
        assert_eq!(out.sign(0), out.sign(1));
        assert_eq!(out.post_state.generators().len(), 2);
    }

    #[test]
    fn local_gate_matches_global_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let s = random_pure(6, &mut rng);
            let u = random_clifford(2, &mut rng);
            let mut local = s.clone();
            local.apply_gate(&u, &[4, 1]).unwrap();
            let global = s.apply_clifford(&u.embed(&[4, 1], 6).unwrap()).unwrap();
            assert_eq!(local, global);
        }
    }
}
