//! Per-realization diagnostics: logical-group change and MAP recovery,
//! coherent information, classical and quantum conditional mutual
//! information, and syndrome free entropy.

use rand::Rng;

use crate::bitlinalg::{BitMatrix, BitVector, EchelonBasis};
use crate::codes::{Geometry, StabilizerCode, ToricLattice};
use crate::error::{Error, Result};
use crate::noise::{apply_realization, ErrorRealization};
use crate::pauli::PauliOperator;
use crate::stabsim::{MeasurementOutcome, StabilizerGroup, StabilizerState};

#[derive(Clone, Debug, PartialEq)]
pub struct LogicalDiagnostic {
    /// `log₂|⟨G_L, G_L', S⟩/S| − k`.
    pub delta: usize,
    /// `rank T_L` from the logical-basis expansion of `G_L'`.
    pub delta_commutator: usize,
    pub p_rec: f64,
    /// Toric codes only.
    pub group_class: Option<ToricGroupClass>,
    /// rref of the `(x|z)` rows of `G_L'` modulo the checks.
    pub sign_free_group: BitMatrix,
    /// `(T_L)_{ij}`: coefficient of `X̄_i` in the expansion of generator
    /// `j` of `G_L'`.
    pub t_l: BitMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ToricClassKind {
    /// `⟨O₁, O₂'⟩`, one generator per logical qubit.
    Product,
    /// Three weight-two elements.
    Bell,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ToricGroupClass {
    pub kind: ToricClassKind,
    /// `"Z1|X2"` for product groups, `"X1X2|Y1Y2|Z1Z2"` for Bell groups.
    pub label: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyndromeStats {
    pub n_s: usize,
    pub r_q: usize,
    /// `log₂ Z = N_s − r_Q`.
    pub phi_global: usize,
    /// `r_Q / N_s`.
    pub varphi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelDiagnostic {
    pub coherent_info: i64,
    pub per_logical: f64,
}

/// Logical operators of a post-measurement state: its generators reduced
/// modulo the row space of the checks, as a sign-free rref matrix.
pub fn post_logical_group(code: &StabilizerCode, post: &StabilizerState) -> BitMatrix {
    let basis = EchelonBasis::from_matrix(&code.check_matrix());
    let mut rows = Vec::new();
    for g in post.generators() {
        let mut v = g.to_symplectic();
        basis.reduce(&mut v);
        if !v.is_zero() {
            rows.push(v);
        }
    }
    BitMatrix::from_rows_with_cols(&rows, 2 * code.n).rref().matrix
}

/// Coefficients of each row of `ops` over the basis
/// `[independent checks; Z̄_1..Z̄_k; X̄_1..X̄_k]`; returns the `Z̄` and `X̄`
/// blocks as `k × rows(ops)` matrices.
pub fn logical_expansion(code: &StabilizerCode, ops: &BitMatrix) -> Result<(BitMatrix, BitMatrix)> {
    let n = code.n;
    let k = code.k;
    let checks = code.independent_checks();
    let s = checks.len();
    let basis_rows: Vec<BitVector> = checks
        .iter()
        .chain(&code.logical_z)
        .chain(&code.logical_x)
        .map(PauliOperator::to_symplectic)
        .collect();
    let basis = BitMatrix::from_rows_with_cols(&basis_rows, 2 * n);
    let coeffs = basis
        .transpose()
        .solve_many(&ops.transpose())?
        .ok_or(Error::Inexpressible)?;
    let z_block: Vec<usize> = (s..s + k).collect();
    let x_block: Vec<usize> = (s + k..s + 2 * k).collect();
    Ok((coeffs.select_rows(&z_block), coeffs.select_rows(&x_block)))
}

/// Change of the logical stabilizer group, computed both as a rank
/// increment of the combined group and as the rank of the logical
/// commutator matrix `T_L`.
pub fn delta_logical(
    code: &StabilizerCode,
    initial: &StabilizerGroup,
    post: &StabilizerState,
) -> Result<LogicalDiagnostic> {
    if !post.is_pure() {
        return Err(Error::MixedState {
            generators: post.generators().len(),
            qubits: post.n(),
        });
    }
    if post.n() != code.n || initial.n() != code.n {
        return Err(Error::QubitMismatch {
            left: code.n,
            right: post.n(),
        });
    }
    let gl_prime = post_logical_group(code, post);
    let s_gl = code.check_matrix().vstack(&initial.symplectic_matrix())?;
    let combined = s_gl.vstack(&gl_prime)?;
    let delta = combined.rank() - s_gl.rank();

    // T_L from expansions over the logical basis. With G_L = ⟨Z̄_i⟩ its
    // entries are the X̄_i coefficients of the G_L' generators; a general
    // initial group pairs its own coordinates symplectically.
    let (z_coeffs, x_coeffs) = logical_expansion(code, &gl_prime)?;
    let (init_z, init_x) = logical_expansion(code, &initial.symplectic_matrix())?;
    let t_l = add(
        &init_z.transpose().mul(&x_coeffs)?,
        &init_x.transpose().mul(&z_coeffs)?,
    );
    let delta_commutator = t_l.rank();

    let group_class = match code.geometry {
        Geometry::Toric { .. } => Some(classify_toric_group(code, &gl_prime)?),
        _ => None,
    };
    Ok(LogicalDiagnostic {
        delta,
        delta_commutator,
        p_rec: (-(delta as f64)).exp2(),
        group_class,
        sign_free_group: gl_prime,
        t_l,
    })
}

fn add(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let mut out = a.clone();
    for r in 0..b.rows() {
        for c in b.row(r).iter_ones() {
            out.set(r, c, !out.get(r, c));
        }
    }
    out
}

fn letter(x: bool, z: bool) -> char {
    match (x, z) {
        (false, false) => 'I',
        (true, false) => 'X',
        (true, true) => 'Y',
        (false, true) => 'Z',
    }
}

/// Labels a two-generator sign-free group by its logical content.
pub fn classify_toric_group(code: &StabilizerCode, group: &BitMatrix) -> Result<ToricGroupClass> {
    if code.k != 2 || group.rows() != 2 {
        return Err(Error::Inexpressible);
    }
    let (z, x) = logical_expansion(code, group)?;
    // columns of z, x index the group generators
    let gen = |j: usize| [(x.get(0, j), z.get(0, j)), (x.get(1, j), z.get(1, j))];
    let mut elements = Vec::with_capacity(3);
    let (a, b) = (gen(0), gen(1));
    let c = [
        (a[0].0 ^ b[0].0, a[0].1 ^ b[0].1),
        (a[1].0 ^ b[1].0, a[1].1 ^ b[1].1),
    ];
    for e in [a, b, c] {
        elements.push((letter(e[0].0, e[0].1), letter(e[1].0, e[1].1)));
    }
    if elements.iter().any(|&(p, q)| p == 'I' && q == 'I') {
        return Err(Error::Inexpressible);
    }
    let one = elements.iter().find(|(_, q)| *q == 'I').map(|(p, _)| *p);
    let two = elements.iter().find(|(p, _)| *p == 'I').map(|(_, q)| *q);
    match (one, two) {
        (Some(p), Some(q)) => Ok(ToricGroupClass {
            kind: ToricClassKind::Product,
            label: format!("{p}1|{q}2"),
        }),
        (None, None) => {
            elements.sort();
            let label = elements
                .iter()
                .map(|(p, q)| format!("{p}1{q}2"))
                .collect::<Vec<_>>()
                .join("|");
            Ok(ToricGroupClass {
                kind: ToricClassKind::Bell,
                label,
            })
        }
        // a single-qubit element paired with a two-qubit one anticommutes
        // somewhere, so this cannot be an isotropic group
        _ => Err(Error::Inexpressible),
    }
}

/// The 15 two-qubit logical stabilizer group labels: 9 product, 6 Bell.
pub fn toric_class_labels() -> Vec<ToricGroupClass> {
    let ps = ['X', 'Y', 'Z'];
    let mut out = Vec::new();
    for p in ps {
        for q in ps {
            out.push(ToricGroupClass {
                kind: ToricClassKind::Product,
                label: format!("{p}1|{q}2"),
            });
        }
    }
    // Bell groups: ⟨P⊗σ(P), Q⊗σ(Q)⟩ for each bijection σ of {X, Y, Z}
    // mapping commuting pairs correctly; all six permutations qualify.
    let perms = [
        ['X', 'Y', 'Z'],
        ['X', 'Z', 'Y'],
        ['Y', 'X', 'Z'],
        ['Y', 'Z', 'X'],
        ['Z', 'X', 'Y'],
        ['Z', 'Y', 'X'],
    ];
    for perm in perms {
        let label = ps
            .iter()
            .zip(perm)
            .map(|(p, q)| format!("{p}1{q}2"))
            .collect::<Vec<_>>()
            .join("|");
        out.push(ToricGroupClass {
            kind: ToricClassKind::Bell,
            label,
        });
    }
    out
}

/// Measures all checks of the errored code state `trials` times and
/// reports whether every branch has the same sign-free `G_L'`.
pub fn syndrome_independence_check<R: Rng + ?Sized>(
    code: &StabilizerCode,
    realization: &ErrorRealization,
    trials: usize,
    rng: &mut R,
) -> Result<bool> {
    if trials < 2 {
        return Err(Error::InvalidArgument("need at least two trials".into()));
    }
    let state = apply_realization(&code.code_state(), realization)?;
    let mut first: Option<BitMatrix> = None;
    for _ in 0..trials {
        let out = state.measure_commuting_set(&code.checks, rng)?;
        let g = post_logical_group(code, &out.post_state);
        match &first {
            None => first = Some(g),
            Some(f) if *f != g => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}

/// Code qubits `0..n` entangled with `k` reference qubits `n..n+k` through
/// `X̄_i X^r_i` and `Z̄_i Z^r_i`.
pub fn purified_code_state(code: &StabilizerCode) -> StabilizerState {
    let n = code.n;
    let total = n + code.k;
    let mut gens: Vec<PauliOperator> = code.independent_checks().iter().map(|c| c.extended(total)).collect();
    for i in 0..code.k {
        let mut rx = PauliOperator::identity(code.k);
        rx.set(i, crate::pauli::Pauli::X);
        let mut rz = PauliOperator::identity(code.k);
        rz.set(i, crate::pauli::Pauli::Z);
        gens.push(code.logical_x[i].tensor(&rx));
        gens.push(code.logical_z[i].tensor(&rz));
    }
    StabilizerState::from_generators(total, gens).expect("valid code")
}

/// `S(code qubits) − S(code + reference)` of the syndrome-averaged
/// purified state after the error.
pub fn coherent_information(code: &StabilizerCode, realization: &ErrorRealization) -> Result<ChannelDiagnostic> {
    let total = code.n + code.k;
    let state = apply_realization(&purified_code_state(code), realization)?;
    let checks: Vec<PauliOperator> = code.checks.iter().map(|c| c.extended(total)).collect();
    let avg = state.average_over_syndromes(&checks)?;
    let code_qubits: Vec<usize> = (0..code.n).collect();
    let s_q = avg.region_entropy(&code_qubits)? as i64;
    let s_rq = avg.entropy() as i64;
    let coherent_info = s_q - s_rq;
    let per_logical = if code.k == 0 {
        0.0
    } else {
        coherent_info as f64 / code.k as f64
    };
    Ok(ChannelDiagnostic {
        coherent_info,
        per_logical,
    })
}

fn mask(len: usize, set: &[usize]) -> Result<Vec<bool>> {
    let mut m = vec![false; len];
    for &i in set {
        if i >= len || m[i] {
            return Err(Error::BadRegions);
        }
        m[i] = true;
    }
    Ok(m)
}

/// Classical `I(A:B|C)` of the uniform distribution on syndromes obeying
/// the constraint rows of `q`: `rank Q_A + rank Q_B − rank Q_{AB}`, where
/// `Q_D` keeps the columns in `D`.
pub fn classical_cmi(q: &BitMatrix, a: &[usize], b: &[usize], c: &[usize]) -> Result<usize> {
    let m = q.cols();
    let (ma, mb, mc) = (mask(m, a)?, mask(m, b)?, mask(m, c)?);
    for i in 0..m {
        if ma[i] as u8 + mb[i] as u8 + mc[i] as u8 != 1 {
            return Err(Error::BadRegions);
        }
    }
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    let ra = q.select_columns(a).rank();
    let rb = q.select_columns(b).rank();
    let rab = q.select_columns(&ab).rank();
    Ok(ra + rb - rab)
}

pub fn syndrome_stats(outcome: &MeasurementOutcome) -> SyndromeStats {
    let n_s = outcome.num_observables();
    let r_q = outcome.r_q();
    SyndromeStats {
        n_s,
        r_q,
        phi_global: n_s - r_q,
        varphi: if n_s == 0 { 1.0 } else { r_q as f64 / n_s as f64 },
    }
}

/// Strip regions on the torus: `A` and `B` are column bands of `width`
/// starting at columns `0` and `d_ab`; `C` is everything else.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StripGeometry {
    pub width: usize,
    pub d_ab: usize,
}

impl StripGeometry {
    /// Width 1 and separation `L/2`.
    pub fn default_for(l: usize) -> Self {
        Self { width: 1, d_ab: l / 2 }
    }

    fn validate(&self, l: usize) -> Result<()> {
        if self.width == 0 || self.d_ab < self.width || self.d_ab + self.width > l {
            return Err(Error::BadRegions);
        }
        Ok(())
    }

    pub fn qubit_regions(&self, l: usize) -> Result<[Vec<usize>; 3]> {
        self.validate(l)?;
        let lat = ToricLattice::new(l);
        Ok(split(lat.num_qubits(), lat.ring(0, self.width), lat.ring(self.d_ab, self.width)))
    }

    pub fn check_regions(&self, l: usize) -> Result<[Vec<usize>; 3]> {
        self.validate(l)?;
        let lat = ToricLattice::new(l);
        Ok(split(
            2 * l * l,
            lat.check_ring(0, self.width),
            lat.check_ring(self.d_ab, self.width),
        ))
    }
}

fn split(total: usize, a: Vec<usize>, b: Vec<usize>) -> [Vec<usize>; 3] {
    let mut in_ab = vec![false; total];
    for &i in a.iter().chain(&b) {
        in_ab[i] = true;
    }
    let c = (0..total).filter(|&i| !in_ab[i]).collect();
    [a, b, c]
}

fn toric_l(code: &StabilizerCode) -> Result<usize> {
    match code.geometry {
        Geometry::Toric { l } => Ok(l),
        _ => Err(Error::InvalidArgument("strip regions need a toric code".into())),
    }
}

/// qCMI of a toric state between two strips.
pub fn toric_qcmi(code: &StabilizerCode, state: &StabilizerState, geom: StripGeometry) -> Result<usize> {
    let [a, b, c] = geom.qubit_regions(toric_l(code)?)?;
    state.qcmi(&a, &b, &c)
}

/// Classical CMI of the toric syndrome distribution between two strips of
/// checks.
pub fn toric_classical_cmi(code: &StabilizerCode, q: &BitMatrix, geom: StripGeometry) -> Result<usize> {
    let [a, b, c] = geom.check_regions(toric_l(code)?)?;
    classical_cmi(q, &a, &b, &c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::build_toric;
    use crate::noise::sample_toric_errors;
    use crate::pauli::CliffordUnitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn clean_code_has_no_change() {
        let code = build_toric(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = code.code_state().measure_commuting_set(&code.checks, &mut rng).unwrap();
        let d = delta_logical(&code, &code.logical_group(), &out.post_state).unwrap();
        assert_eq!((d.delta, d.delta_commutator, d.p_rec), (0, 0, 1.0));
        assert_eq!(d.group_class.unwrap().label, "Z1|Z2");
        let st = syndrome_stats(&out);
        assert_eq!(st.varphi, 1.0);
        assert_eq!(st.r_q, 18);
        let ci = coherent_information(&code, &ErrorRealization::empty(code.n)).unwrap();
        assert_eq!(ci.coherent_info, 2);
    }

    #[test]
    fn single_qubit_hadamard() {
        let code = StabilizerCode::trivial(1);
        let mut e = ErrorRealization::empty(1);
        e.push(vec![0], CliffordUnitary::hadamard(1, 0)).unwrap();
        let state = apply_realization(&code.code_state(), &e).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = state.measure_commuting_set(&code.checks, &mut rng).unwrap();
        let d = delta_logical(&code, &code.logical_group(), &out.post_state).unwrap();
        assert_eq!((d.delta, d.delta_commutator, d.p_rec), (1, 1, 0.5));
        assert_eq!(coherent_information(&code, &e).unwrap().coherent_info, 1);
    }

    fn toric_post(code: &StabilizerCode, logicals: &[PauliOperator]) -> StabilizerState {
        let mut gens = code.independent_checks();
        gens.extend(logicals.iter().cloned());
        StabilizerState::from_generators(code.n, gens).unwrap()
    }

    #[test]
    fn toric_class_entries() {
        let code = build_toric(3).unwrap();
        let (z1, z2) = (&code.logical_z[0], &code.logical_z[1]);
        let (x1, x2) = (&code.logical_x[0], &code.logical_x[1]);
        let mul = |a: &PauliOperator, b: &PauliOperator| {
            let m = a.multiply(b).unwrap();
            if m.is_hermitian() {
                m
            } else {
                m.with_phase(0)
            }
        };
        let cases = [
            (vec![mul(x1, x2), mul(z1, z2)], 1, "X1X2|Y1Y2|Z1Z2"),
            (vec![x1.clone(), x2.clone()], 2, "X1|X2"),
            (vec![z1.clone(), x2.clone()], 1, "Z1|X2"),
        ];
        for (gens, delta, label) in cases {
            let post = toric_post(&code, &gens);
            let d = delta_logical(&code, &code.logical_group(), &post).unwrap();
            assert_eq!(d.delta, delta);
            assert_eq!(d.delta_commutator, delta);
            assert_eq!(d.group_class.unwrap().label, label);
        }
    }

    #[test]
    fn all_fifteen_classes_have_expected_multiplicities() {
        let code = build_toric(2).unwrap();
        let labels = toric_class_labels();
        assert_eq!(labels.len(), 15);
        let n = code.n;
        let mut hist = std::collections::HashMap::new();
        // every isotropic 2-dim subspace of logical space, via its coordinates
        let logical = |c: [bool; 4]| {
            let mut v = BitVector::zeros(2 * n);
            for (bit, op) in c.iter().zip(code.logical_z.iter().chain(&code.logical_x)) {
                if *bit {
                    v.xor_assign(&op.to_symplectic());
                }
            }
            PauliOperator::from_symplectic(&v, 0)
        };
        let coords: Vec<[bool; 4]> = (1..16u8)
            .map(|m| [m & 1 != 0, m & 2 != 0, m & 4 != 0, m & 8 != 0])
            .collect();
        let mut seen = std::collections::HashSet::new();
        for a in &coords {
            for b in &coords {
                let (la, lb) = (logical(*a), logical(*b));
                if a >= b || !la.commutes(&lb).unwrap() {
                    continue;
                }
                let post = toric_post(&code, &[la, lb]);
                let d = delta_logical(&code, &code.logical_group(), &post).unwrap();
                let class = d.group_class.unwrap();
                if seen.insert(class.label.clone()) {
                    assert!(labels.contains(&class), "{}", class.label);
                    *hist.entry((class.kind, d.delta)).or_insert(0) += 1;
                }
            }
        }
        assert_eq!(seen.len(), 15);
        assert_eq!(hist[&(ToricClassKind::Product, 0)], 1);
        assert_eq!(hist[&(ToricClassKind::Product, 1)], 4);
        assert_eq!(hist[&(ToricClassKind::Product, 2)], 4);
        assert_eq!(hist[&(ToricClassKind::Bell, 1)], 2);
        assert_eq!(hist[&(ToricClassKind::Bell, 2)], 4);
    }

    #[test]
    fn classical_cmi_basics() {
        // one constraint on bits {0, 1}
        let q = BitMatrix::from_bool_rows(&[vec![true, true, false]]);
        assert_eq!(classical_cmi(&q, &[0], &[1], &[2]).unwrap(), 1);
        assert_eq!(classical_cmi(&q, &[0, 1], &[2], &[]).unwrap(), 0);
        assert!(classical_cmi(&q, &[0], &[0], &[1, 2]).is_err());
        assert!(classical_cmi(&q, &[0], &[1], &[]).is_err());
    }

    #[test]
    fn clean_toric_qcmi_vanishes() {
        let code = build_toric(4).unwrap();
        let state = code.code_state().average_over_syndromes(&code.checks).unwrap();
        assert_eq!(toric_qcmi(&code, &state, StripGeometry::default_for(4)).unwrap(), 0);
    }

    #[test]
    fn syndrome_independence_on_toric() {
        let code = build_toric(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let e = sample_toric_errors(&code, 0.5, &mut rng).unwrap();
            assert!(syndrome_independence_check(&code, &e, 8, &mut rng).unwrap());
        }
    }
}
